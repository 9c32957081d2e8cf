//! Decision procedures over Montesinos knots and rational tangles:
//! component counting, persistence and genuineness classification with
//! independently re-validated certificates, a Seifert-fibered surgery
//! candidate filter, and the two-sided tangle classifier.

use crate::assembly::{assemble_montesinos, assemble_tangle, Assembly, AssemblyError};
use crate::farey::{boundary_paths, build_diagram};
use crate::paths::{
    build_double_half_path, build_channel_path, build_half_path, enumerate_paths, ChannelType, Constraints, Context,
    GammaPath, PathElement, PathKind, PathsError,
};
use crate::rational::{
    mod_neg_inverse, normalize_montesinos, parity_pair, MontesinosKnot, ParityPair, RationalError,
    Slope,
};
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClassifyError {
    #[error("input is a link with {0} components, not a knot")]
    Link(usize),
    #[error("two-bridge input: fewer than three tangles; use the allowable-path machinery directly")]
    TwoBridge,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Paths(#[from] PathsError),
    #[error(transparent)]
    Farey(#[from] crate::farey::FareyError),
    #[error(transparent)]
    Rational(#[from] RationalError),
    #[error("internal: no certificate found for an expected-positive case: {0}")]
    NoCertificate(String),
}

// ---------------------------------------------------------------------------
// Component counting
// ---------------------------------------------------------------------------

// Corner encoding per tangle: 0 = NW, 1 = NE, 2 = SW, 3 = SE.

fn pairing(p: ParityPair) -> [(usize, usize); 2] {
    match p {
        // Same parity pair as 1/0: two vertical strands.
        ParityPair::OE => [(0, 2), (1, 3)],
        // As 0/1: two horizontal strands.
        ParityPair::EO => [(0, 1), (2, 3)],
        // As 1/1: two diagonal strands.
        ParityPair::OO => [(0, 3), (1, 2)],
    }
}

/// Number of link components: pair the four boundary points of each tangle
/// by the pattern of the slope sharing its parity pair, compose the
/// tangles left to right, and close through the band (odd twist counts
/// transpose the two band strands).
pub fn component_count(k: &MontesinosKnot) -> usize {
    let kk = k.tangles.len();
    let node = |i: usize, c: usize| i * 4 + c;
    let mut adj: Vec<Vec<usize>> = vec![vec![]; 4 * kk];
    let add = |a: usize, b: usize, adj: &mut Vec<Vec<usize>>| {
        adj[a].push(b);
        adj[b].push(a);
    };
    for (i, r) in k.tangles.iter().enumerate() {
        for (a, b) in pairing(parity_pair(*r)) {
            add(node(i, a), node(i, b), &mut adj);
        }
    }
    for i in 0..kk.saturating_sub(1) {
        add(node(i, 1), node(i + 1, 0), &mut adj);
        add(node(i, 3), node(i + 1, 2), &mut adj);
    }
    let last = kk - 1;
    if k.n.rem_euclid(2) == 1 {
        add(node(last, 1), node(0, 2), &mut adj);
        add(node(last, 3), node(0, 0), &mut adj);
    } else {
        add(node(last, 1), node(0, 0), &mut adj);
        add(node(last, 3), node(0, 2), &mut adj);
    }
    // Count connected components of the 2-regular pairing graph.
    let mut seen = vec![false; 4 * kk];
    let mut components = 0;
    for start in 0..4 * kk {
        if seen[start] {
            continue;
        }
        components += 1;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            stack.extend(adj[v].iter().copied().filter(|w| !seen[*w]));
        }
    }
    components
}

/// Crossing-level oracle for pretzel forms K(1/q₁, …, 1/q_k, n): walk the
/// strands through every crossing of each vertical twist column and the
/// band, then count cycles of the resulting pairing. Shares no code with
/// [`component_count`]'s parity-class route.
pub fn pretzel_strand_trace(qs: &[i64], n: i64) -> usize {
    let k = qs.len();
    // Endpoint encoding per column: 0 = top-left, 1 = top-right,
    // 2 = bottom-left, 3 = bottom-right. Every endpoint lies on one
    // internal (through-the-column) pairing and one external wire.
    let mut internal = vec![usize::MAX; 4 * k];
    let mut external = vec![usize::MAX; 4 * k];
    let node = |i: usize, c: usize| i * 4 + c;
    for (i, &q) in qs.iter().enumerate() {
        // Drop two strands through |q| crossings; each crossing swaps the
        // two occupied positions.
        let mut pos = [0usize, 1usize];
        for _ in 0..q.unsigned_abs() {
            pos.swap(0, 1);
        }
        // Strand entering top-left (slot 0) exits at bottom position
        // pos[0]; top-right at pos[1].
        internal[node(i, 0)] = node(i, 2 + pos[0]);
        internal[node(i, 2 + pos[0])] = node(i, 0);
        internal[node(i, 1)] = node(i, 2 + pos[1]);
        internal[node(i, 2 + pos[1])] = node(i, 1);
    }
    let wire = |a: usize, b: usize, external: &mut Vec<usize>| {
        external[a] = b;
        external[b] = a;
    };
    // Pretzel columns hang side by side: tops chained, bottoms chained,
    // and the band of n half twists closes top of the first column to top
    // of the last around the outside.
    for i in 0..k - 1 {
        wire(node(i, 1), node(i + 1, 0), &mut external);
        wire(node(i, 3), node(i + 1, 2), &mut external);
    }
    // Walk the band's two strands through |n| crossings.
    let mut band = [0usize, 1usize];
    for _ in 0..n.unsigned_abs() {
        band.swap(0, 1);
    }
    // Band strand entering at the last column's top-right (slot band
    // position 0) returns to the first column's NW or SW.
    let first_targets = [node(0, 0), node(0, 2)];
    wire(node(k - 1, 1), first_targets[band[0]], &mut external);
    wire(node(k - 1, 3), first_targets[band[1]], &mut external);
    // Count cycles alternating internal and external pairings.
    let mut seen = vec![false; 4 * k];
    let mut cycles = 0;
    for start in 0..4 * k {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut v = start;
        let mut use_internal = true;
        loop {
            seen[v] = true;
            v = if use_internal { internal[v] } else { external[v] };
            use_internal = !use_internal;
            if v == start && use_internal {
                break;
            }
        }
    }
    cycles
}

// ---------------------------------------------------------------------------
// Knot classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum KnotStatus {
    PersistentlyLaminar(Box<Assembly>),
    ExceptionalForm(Value),
    LengthAtLeast4,
}

#[derive(Debug, Clone)]
pub struct KnotVerdict {
    pub status: KnotStatus,
    pub genuine: Option<bool>,
}

impl KnotVerdict {
    pub fn to_json(&self) -> Value {
        match &self.status {
            KnotStatus::PersistentlyLaminar(a) => json!({
                "status": "persistently-laminar",
                "genuine": self.genuine,
                "certificate": a.to_json(),
            }),
            KnotStatus::ExceptionalForm(f) => json!({
                "status": "exceptional-form",
                "genuine": self.genuine,
                "form": f,
            }),
            KnotStatus::LengthAtLeast4 => json!({
                "status": "length-at-least-4",
                "note": "contains a closed essential surface",
            }),
        }
    }
}

fn require_knot(k: &MontesinosKnot) -> Result<(), ClassifyError> {
    if k.tangles.len() < 3 {
        return Err(ClassifyError::TwoBridge);
    }
    let c = component_count(k);
    if c != 1 {
        return Err(ClassifyError::Link(c));
    }
    Ok(())
}

/// Pure edge path along one boundary chain of the diagram: the upper
/// chain starts toward 1, the lower chain toward 0.
pub fn boundary_edge_path(
    target: Slope,
    toward_one: bool,
    context: Context,
) -> Result<GammaPath, ClassifyError> {
    let d = build_diagram(target)?;
    let (upper_chain, lower_chain) = boundary_paths(&d);
    let chain = if toward_one { upper_chain } else { lower_chain };
    let els = chain
        .windows(2)
        .map(|w| PathElement::edge(w[0], w[1]))
        .collect();
    Ok(GammaPath::new(els, target, context))
}

fn exceptional_band_form(k: &MontesinosKnot) -> Value {
    let mut qs: Vec<i64> = k.tangles.iter().map(|r| r.q).collect();
    qs.sort_by_key(|q| (q % 2 != 0, *q));
    json!({ "form": "band-exception", "q": qs })
}

/// Persistence decision for a normalized Montesinos knot. Positive answers
/// carry an assembly certificate that re-validates through the independent
/// path validators.
pub fn classify_persistent(k: &MontesinosKnot) -> Result<KnotVerdict, ClassifyError> {
    require_knot(k)?;
    if k.tangles.len() >= 4 {
        return Ok(KnotVerdict {
            status: KnotStatus::LengthAtLeast4,
            genuine: None,
        });
    }
    let (r1, r2, r3) = (k.tangles[0], k.tangles[1], k.tangles[2]);
    let assembly = if k.n >= 0 {
        let paths = vec![
            build_half_path(r1, 1)
                .ok_or_else(|| ClassifyError::NoCertificate(format!("variant 1 for {r1}")))?,
            build_half_path(r2, 3)
                .ok_or_else(|| ClassifyError::NoCertificate(format!("variant 3 for {r2}")))?,
            boundary_edge_path(r3, true, Context::Knot)?,
        ];
        assemble_montesinos(k, &paths)?
    } else {
        // n = -1: one downward start-1 path, one upward, one boundary.
        let down = k
            .tangles
            .iter()
            .enumerate()
            .find_map(|(i, r)| build_half_path(*r, 2).map(|g| (i, g)));
        match down {
            Some((i, g_down)) => {
                let others: Vec<usize> = (0..3).filter(|j| *j != i).collect();
                let g_up = build_half_path(k.tangles[others[0]], 1).ok_or_else(|| {
                    ClassifyError::NoCertificate(format!("variant 1 for {}", k.tangles[others[0]]))
                })?;
                let g_bd = boundary_edge_path(k.tangles[others[1]], true, Context::Knot)?;
                let mut paths = vec![None, None, None];
                paths[i] = Some(g_down);
                paths[others[0]] = Some(g_up);
                paths[others[1]] = Some(g_bd);
                let paths: Vec<GammaPath> = paths.into_iter().map(|p| p.unwrap()).collect();
                assemble_montesinos(k, &paths)?
            }
            None if k.tangles.iter().all(|r| r.p == 1) => {
                return Ok(KnotVerdict {
                    status: KnotStatus::ExceptionalForm(exceptional_band_form(k)),
                    genuine: Some(false),
                });
            }
            None => {
                // Some tangle is (q-1)/q with q even >= 4: route it through
                // the double-half construction.
                let i = k
                    .tangles
                    .iter()
                    .position(|r| r.p == r.q - 1 && r.q % 2 == 0 && r.q >= 4)
                    .ok_or_else(|| {
                        ClassifyError::NoCertificate("no qualifying tangle at n = -1".into())
                    })?;
                let mut paths = vec![];
                for (j, r) in k.tangles.iter().enumerate() {
                    if j == i {
                        paths.push(build_double_half_path(*r)?);
                    } else {
                        paths.push(build_half_path(*r, 1).ok_or_else(|| {
                            ClassifyError::NoCertificate(format!("variant 1 for {r}"))
                        })?);
                    }
                }
                assemble_montesinos(k, &paths)?
            }
        }
    };
    if !assembly.persistent {
        return Err(ClassifyError::NoCertificate(format!(
            "assembly not persistent for {k:?}"
        )));
    }
    Ok(KnotVerdict {
        status: KnotStatus::PersistentlyLaminar(Box::new(assembly)),
        genuine: None,
    })
}

/// Genuineness exceptions at n = −1: at least two tangles of the form
/// 1/q and the remaining numerator in {1, 2, q−1}.
fn genuine_exception_band(k: &MontesinosKnot) -> bool {
    let ones = k.tangles.iter().filter(|r| r.p == 1).count();
    if ones == 3 {
        return true;
    }
    if ones == 2 {
        let r = k.tangles.iter().find(|r| r.p != 1).unwrap();
        return r.p == 2 || r.p == r.q - 1;
    }
    false
}

/// Genuineness decision. Positive answers carry a certificate whose
/// assembly is both persistent and genuine.
pub fn classify_genuine(k: &MontesinosKnot) -> Result<KnotVerdict, ClassifyError> {
    require_knot(k)?;
    if k.tangles.len() >= 4 {
        return Ok(KnotVerdict {
            status: KnotStatus::LengthAtLeast4,
            genuine: None,
        });
    }
    if k.n == 0 && k.tangles.iter().all(|r| r.p == 1) {
        return Ok(KnotVerdict {
            status: KnotStatus::ExceptionalForm(json!({
                "form": "genuine-exception-1",
                "q": k.tangles.iter().map(|r| r.q).collect::<Vec<_>>(),
            })),
            genuine: Some(false),
        });
    }
    if k.n == -1 && genuine_exception_band(k) {
        return Ok(KnotVerdict {
            status: KnotStatus::ExceptionalForm(json!({
                "form": "genuine-exception-2",
                "tangles": k.tangles,
            })),
            genuine: Some(false),
        });
    }
    // Candidate paths per tangle, genuine-prone ones first for
    // deterministic greedy search.
    let candidates = |r: Slope| -> Vec<GammaPath> {
        let mut cs = vec![];
        if let Some(g) = build_half_path(r, 2) {
            cs.push(g);
        }
        if let Some(g) = build_half_path(r, 1) {
            cs.push(g);
        }
        if r.p == r.q - 1 && r.q % 2 == 0 && r.q >= 4 {
            if let Ok(g) = build_double_half_path(r) {
                cs.push(g);
            }
        }
        if let Ok(g) = boundary_edge_path(r, true, Context::Knot) {
            cs.push(g);
        }
        if let Some(g) = build_half_path(r, 3) {
            cs.push(g);
        }
        if let Ok(g) = boundary_edge_path(r, false, Context::Knot) {
            cs.push(g);
        }
        cs
    };
    let c1 = candidates(k.tangles[0]);
    let c2 = candidates(k.tangles[1]);
    let c3 = candidates(k.tangles[2]);
    for g1 in &c1 {
        for g2 in &c2 {
            for g3 in &c3 {
                let paths = vec![g1.clone(), g2.clone(), g3.clone()];
                if let Ok(a) = assemble_montesinos(k, &paths) {
                    if a.persistent && a.genuine {
                        return Ok(KnotVerdict {
                            status: KnotStatus::PersistentlyLaminar(Box::new(a)),
                            genuine: Some(true),
                        });
                    }
                }
            }
        }
    }
    Err(ClassifyError::NoCertificate(format!(
        "no genuine certificate found for {k:?}"
    )))
}

// ---------------------------------------------------------------------------
// Seifert-fibered surgery filter
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurgeryStatus {
    NoAtoroidalSFS { reason: String },
    Candidate { form: String, params: Value },
}

impl SurgeryStatus {
    pub fn to_json(&self) -> Value {
        match self {
            SurgeryStatus::NoAtoroidalSFS { reason } => {
                json!({ "status": "no-atoroidal-sfs", "reason": reason })
            }
            SurgeryStatus::Candidate { form, params } => {
                json!({ "status": "candidate", "form": form, "params": params })
            }
        }
    }
}

/// The branch inequality 1/(|q₁|−1) + 1/(|q₂|−1) + 1/(|q₃|−1) > 1.
pub fn pretzel_inequality(qs: [i64; 3]) -> bool {
    // Compare exactly over a common denominator.
    let d: Vec<i64> = qs.iter().map(|q| q.abs() - 1).collect();
    if d.iter().any(|x| *x <= 0) {
        return true;
    }
    d[1] * d[2] + d[0] * d[2] + d[0] * d[1] > d[0] * d[1] * d[2]
}

/// Equivalent characterization: the multiset {|q₁|, |q₂|, |q₃|} sorted is
/// (2, ·, ·), (3, 3, ·) or (3, 4, 5).
pub fn pretzel_multiset_listed(qs: [i64; 3]) -> bool {
    let mut a: Vec<i64> = qs.iter().map(|q| q.abs()).collect();
    a.sort();
    a[0] == 2 || (a[0] == 3 && a[1] == 3) || (a == [3, 4, 5])
}

fn canonical_key(k: &MontesinosKnot) -> (Vec<Slope>, i64) {
    let mut t = k.tangles.clone();
    t.sort();
    (t, k.n)
}

fn mirror_key(k: &MontesinosKnot) -> Result<(Vec<Slope>, i64), ClassifyError> {
    let raw: Vec<Slope> = k.tangles.iter().map(|r| r.neg()).collect();
    let m = normalize_montesinos(&raw, -k.n)?;
    Ok(canonical_key(&m))
}

fn form_key(raw: &[Slope], n: i64) -> (Vec<Slope>, i64) {
    canonical_key(&normalize_montesinos(raw, n).expect("fixed form normalizes"))
}

/// Filter for atoroidal Seifert-fibered surgery candidates among length-3
/// Montesinos knots.
pub fn sfs_surgery_filter(k: &MontesinosKnot) -> Result<SurgeryStatus, ClassifyError> {
    require_knot(k)?;
    if k.tangles.len() != 3 {
        return Err(ClassifyError::Degenerate("filter needs exactly three tangles".into()));
    }
    if k.pretzel {
        // Rewrite (q-1)/q tangles as 1/(-q) with band compensation to get
        // signed pretzel parameters.
        let mut m = k.n;
        let mut qs = [0i64; 3];
        for (i, r) in k.tangles.iter().enumerate() {
            if r.p == 1 {
                qs[i] = r.q;
            } else {
                qs[i] = -r.q;
                m += 1;
            }
        }
        let band_ok = m == 0 || (m == -1 && qs.iter().all(|q| *q > 0));
        if !band_ok {
            return Ok(SurgeryStatus::NoAtoroidalSFS {
                reason: format!(
                    "pretzel band form n = {m} admits a genuine persistently laminar branched surface"
                ),
            });
        }
        if !pretzel_inequality(qs) {
            return Ok(SurgeryStatus::NoAtoroidalSFS {
                reason: "1/(|q1|-1) + 1/(|q2|-1) + 1/(|q3|-1) <= 1".into(),
            });
        }
        return Ok(SurgeryStatus::Candidate {
            form: "pretzel".into(),
            params: json!({ "q": qs, "n": m }),
        });
    }
    // Non-pretzel: match the three listed families up to mirror image.
    let keys = [canonical_key(k), mirror_key(k)?];
    let s = Slope::new;
    let form_a = form_key(&[s(-2, 3), s(1, 3), s(2, 5)], 0);
    if keys.contains(&form_a) {
        return Ok(SurgeryStatus::Candidate {
            form: "non-pretzel-a".into(),
            params: json!({}),
        });
    }
    for a in 3..=6 {
        let fb = form_key(&[s(-1, 2), s(1, 3), s(2, 2 * a + 1)], 0);
        if keys.contains(&fb) {
            return Ok(SurgeryStatus::Candidate {
                form: "non-pretzel-b".into(),
                params: json!({ "a": a }),
            });
        }
    }
    // Family (c): K(-1/2, 1/q, 2/5) with odd q >= 3; match structurally
    // on the normalized key (1/2, 1/q, 2/5 | n = -1).
    for key in &keys {
        let (t, n) = key;
        if *n == -1 && t.len() == 3 {
            let has_half = t.iter().any(|r| *r == s(1, 2));
            let has_25 = t.iter().any(|r| *r == s(2, 5));
            let third = t.iter().find(|r| **r != s(1, 2) && **r != s(2, 5));
            if has_half && has_25 {
                if let Some(r) = third {
                    if r.p == 1 && r.q % 2 == 1 && r.q >= 3 {
                        return Ok(SurgeryStatus::Candidate {
                            form: "non-pretzel-c".into(),
                            params: json!({ "q": r.q }),
                        });
                    }
                }
            }
        }
    }
    Ok(SurgeryStatus::NoAtoroidalSFS {
        reason: "outside the candidate families (inverse-numerator arithmetic excludes it)"
            .into(),
    })
}

/// p̄: the inverse of p negated mod q, the arithmetic used to match
/// two-bridge surgery tables.
pub fn p_bar(p: i64, q: i64) -> Result<i64, ClassifyError> {
    Ok(mod_neg_inverse(p, q)?)
}

// ---------------------------------------------------------------------------
// Tangle classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct TangleVerdict {
    /// Some(true) when certified; None means the sufficient criterion does
    /// not apply and no negative criterion is available.
    pub persistent: Option<bool>,
    pub representative: Option<(Slope, Slope)>,
    pub certificate: Option<Assembly>,
    /// Draft-derived genuineness of the channel-start paths, verified by
    /// enumeration; reported separately from the persistence verdict.
    pub genuine_extension: Option<bool>,
}

impl TangleVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "persistent": match self.persistent {
                Some(b) => json!(b),
                None => json!("unknown"),
            },
            "representative": self.representative.map(|(a, b)| json!([a, b])),
            "genuine_extension": self.genuine_extension,
            "certificate": self.certificate.as_ref().map(|a| a.to_json()),
        })
    }
}

fn in_unit_interval(r: Slope) -> bool {
    !r.is_infinite() && r.p > 0 && r.p < r.q
}

/// Classify the tangle T(r₁, −r₂). Equivalences: T(r₁, −r₂) ≅
/// T(r₂, −(1−r₁)), iterated to a 4-element orbit; the sufficient criterion
/// needs a representative with both denominators odd and both slopes
/// below 2/3.
pub fn classify_tangle(r1: Slope, r2: Slope) -> Result<TangleVerdict, ClassifyError> {
    if !in_unit_interval(r1) || !in_unit_interval(r2) {
        return Err(ClassifyError::Degenerate(format!(
            "tangle slopes must lie strictly between 0 and 1, got {r1}, {r2}"
        )));
    }
    let orbit = [
        (r1, r2),
        (r2, r1.one_minus()),
        (r1.one_minus(), r2.one_minus()),
        (r2.one_minus(), r1),
    ];
    let qualifies = |r: Slope| r.q % 2 == 1 && 3 * r.p < 2 * r.q;
    // Deterministic representative: the numerically least qualifying pair,
    // so every tangle in the orbit reports the same one.
    let lt = |x: Slope, y: Slope| x.p * y.q < y.p * x.q;
    let rep = orbit
        .iter()
        .filter(|(a, b)| qualifies(*a) && qualifies(*b))
        .copied()
        .reduce(|best, cand| {
            if lt(cand.0, best.0) || (cand.0 == best.0 && lt(cand.1, best.1)) {
                cand
            } else {
                best
            }
        });
    match rep {
        Some((a, b)) => {
            let g1 = build_channel_path(a, ChannelType::B)
                .ok_or_else(|| ClassifyError::NoCertificate(format!("channel path for {a}")))?;
            let g2 = build_channel_path(b, ChannelType::B)
                .ok_or_else(|| ClassifyError::NoCertificate(format!("channel path for {b}")))?;
            let cert = assemble_tangle(&g1, &g2)?;
            if !cert.persistent {
                return Err(ClassifyError::NoCertificate(format!(
                    "tangle assembly not persistent for ({a}, {b})"
                )));
            }
            let genuine_side = |r: Slope| -> Result<bool, ClassifyError> {
                let d = build_diagram(r)?;
                let mut c = Constraints::new(PathKind::Allowable, Context::Tangle);
                c.require_genuine = true;
                c.first_element = Some(ChannelType::B);
                Ok(!enumerate_paths(&d, &c)?.is_empty())
            };
            let genuine_extension = Some(genuine_side(a)? && genuine_side(b)?);
            Ok(TangleVerdict {
                persistent: Some(true),
                representative: Some((a, b)),
                certificate: Some(cert),
                genuine_extension,
            })
        }
        None => Ok(TangleVerdict {
            persistent: None,
            representative: None,
            certificate: None,
            genuine_extension: None,
        }),
    }
}
