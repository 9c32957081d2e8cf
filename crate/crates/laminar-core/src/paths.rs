//! Channel-bearing paths on Farey diagrams: element and path types,
//! allowable / semi-allowable validators, constructive builders for the
//! standard existence results, and an exhaustive enumeration oracle.

use crate::farey::{boundary_paths, ChainSide, FareyDiagram, FareyError};
use crate::rational::{delta, parity_pair, ParityPair, Slope};
use serde::{Deserialize, Serialize};
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HalfSubtype {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
    /// Rotated variant of A2 used as the initial element of the
    /// two-half-channel path toward (q−1)/q; same interface data as A2 but
    /// with its meridional cusp on the top level surface.
    A2Rot,
    /// Mirror of A2Rot.
    B2Rot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    Edge,
    ChannelA,
    ChannelB,
    Half(HalfSubtype),
}

/// Which boundary chain of the diagram a channel leans on at its start or
/// arrival.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Upper,
    Lower,
}

impl ElementKind {
    pub fn is_channel(self) -> bool {
        matches!(self, ElementKind::ChannelA | ElementKind::ChannelB)
    }

    pub fn is_half(self) -> bool {
        matches!(self, ElementKind::Half(_))
    }

    /// Meridional cusps contributed by the element's surface piece.
    pub fn meridional_cusps(self) -> u32 {
        match self {
            ElementKind::Edge => 0,
            ElementKind::ChannelA | ElementKind::ChannelB => 2,
            ElementKind::Half(_) => 1,
        }
    }

    /// Chain side of the cusp the element initially travels toward.
    fn start_side(self) -> Option<Side> {
        use HalfSubtype::*;
        match self {
            ElementKind::Edge => None,
            ElementKind::ChannelA | ElementKind::Half(A1 | A2 | A3 | A2Rot) => Some(Side::Upper),
            ElementKind::ChannelB | ElementKind::Half(B1 | B2 | B3 | B2Rot) => Some(Side::Lower),
        }
    }

    /// Chain side of the cusp the element arrives from at its end.
    fn arrive_side(self) -> Option<Side> {
        use HalfSubtype::*;
        match self {
            ElementKind::Edge => None,
            ElementKind::ChannelA | ElementKind::Half(A1 | A2 | A2Rot | B3) => Some(Side::Lower),
            ElementKind::ChannelB | ElementKind::Half(B1 | B2 | B2Rot | A3) => Some(Side::Upper),
        }
    }
}

/// One step of a path: a diagram edge, a full full channel, or a half
/// channel. Channels span the two triangles flanking one interior diagram
/// edge; their two cusps are the endpoints of that edge. `upper_cusp` is
/// the cusp on the top side of the level sphere — the one the element
/// starts toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathElement {
    pub kind: ElementKind,
    pub start: Slope,
    pub end: Slope,
    pub upper_cusp: Option<Slope>,
    pub lower_cusp: Option<Slope>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathsError {
    #[error("edge {0}→{1} is not in the diagram")]
    MissingEdge(Slope, Slope),
    #[error("no channel from {0} to {1} in the diagram")]
    BadChannel(Slope, Slope),
    #[error("path elements do not chain at position {0}")]
    BrokenChain(usize),
    #[error("path revisits vertex {0}")]
    Revisit(Slope),
    #[error("path is empty or does not run from 1/0 to the target")]
    BadEndpoints,
    #[error("path has no half channel")]
    NoHalfChannel,
    #[error("builder precondition failed: {0}")]
    Precondition(&'static str),
    #[error("enumeration guard exceeded: q = {0} > {1}")]
    GuardExceeded(i64, i64),
    #[error(transparent)]
    Farey(#[from] FareyError),
}

impl PathElement {
    pub fn edge(start: Slope, end: Slope) -> PathElement {
        PathElement {
            kind: ElementKind::Edge,
            start,
            end,
            upper_cusp: None,
            lower_cusp: None,
        }
    }

    /// Build a channel or half channel from `start` to `end` in `d`,
    /// computing the two cusps as the common neighbors flanking the
    /// interior edge between the spanned triangles.
    pub fn channel(
        d: &FareyDiagram,
        kind: ElementKind,
        start: Slope,
        end: Slope,
    ) -> Result<PathElement, PathsError> {
        assert!(!matches!(kind, ElementKind::Edge));
        if delta(start, end) != 2 {
            return Err(PathsError::BadChannel(start, end));
        }
        let common: Vec<Slope> = d
            .neighbors(start)
            .iter()
            .copied()
            .filter(|&x| d.has_edge(x, end) && d.has_triangle(start, x, end) == false)
            .filter(|&x| delta(x, start) == 1 && delta(x, end) == 1)
            .collect();
        let mut flank = vec![];
        for &x in &common {
            for &y in &common {
                if x < y && d.has_edge(x, y) && d.has_triangle(start, x, y) && d.has_triangle(end, x, y) {
                    flank.push((x, y));
                }
            }
        }
        let (x, y) = *flank.first().ok_or(PathsError::BadChannel(start, end))?;
        let (du, dl) = match (d.chain_side(x), d.chain_side(y)) {
            (ChainSide::Upper, _) => (x, y),
            (_, ChainSide::Upper) => (y, x),
            (ChainSide::Lower, _) => (y, x),
            (_, ChainSide::Lower) => (x, y),
            _ => return Err(PathsError::BadChannel(start, end)),
        };
        let (upper_cusp, lower_cusp) = match kind.start_side().unwrap() {
            Side::Upper => (du, dl),
            Side::Lower => (dl, du),
        };
        Ok(PathElement {
            kind,
            start,
            end,
            upper_cusp: Some(upper_cusp),
            lower_cusp: Some(lower_cusp),
        })
    }

    /// The cusp the element starts toward (defines the path's starting
    /// slope when this is the first element).
    pub fn start_toward(&self) -> Option<Slope> {
        self.upper_cusp
    }

    /// The cusp the element arrives from; the virtual neighbor used for
    /// the corner at the arrival junction.
    pub fn arrive_from(&self, d: &FareyDiagram) -> Option<Slope> {
        let side = self.kind.arrive_side()?;
        let (u, l) = (self.upper_cusp?, self.lower_cusp?);
        let pick = |s: Side| {
            [u, l].into_iter().find(|&c| match d.chain_side(c) {
                ChainSide::Upper => s == Side::Upper,
                ChainSide::Lower => s == Side::Lower,
                ChainSide::Endpoint => false,
            })
        };
        pick(side)
    }

}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Context {
    Knot,
    Tangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Upward,
    Downward,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaPath {
    pub elements: Vec<PathElement>,
    pub target: Slope,
    pub context: Context,
}

impl GammaPath {
    pub fn new(elements: Vec<PathElement>, target: Slope, context: Context) -> GammaPath {
        GammaPath {
            elements,
            target,
            context,
        }
    }

    pub fn vertices(&self) -> Vec<Slope> {
        let mut v = vec![];
        if let Some(first) = self.elements.first() {
            v.push(first.start);
        }
        v.extend(self.elements.iter().map(|e| e.end));
        v
    }

    pub fn channel_count(&self) -> usize {
        self.elements.iter().filter(|e| e.kind.is_channel()).count()
    }

    pub fn half_count(&self) -> usize {
        self.elements.iter().filter(|e| e.kind.is_half()).count()
    }

    pub fn meridional_cusps(&self) -> u32 {
        self.elements.iter().map(|e| e.kind.meridional_cusps()).sum()
    }

    pub fn half_subtypes(&self) -> Vec<HalfSubtype> {
        self.elements
            .iter()
            .filter_map(|e| match e.kind {
                ElementKind::Half(s) => Some(s),
                _ => None,
            })
            .collect()
    }

    /// Vertical reflection r ↦ 1 − r, swapping the a- and b-families.
    pub fn reflect(&self) -> GammaPath {
        self.relabel(|r| r.one_minus())
    }

    /// Mirror r ↦ −r, also swapping the families.
    pub fn mirror(&self) -> GammaPath {
        self.relabel(|r| r.neg())
    }

    fn relabel(&self, f: impl Fn(Slope) -> Slope) -> GammaPath {
        use ElementKind::*;
        use HalfSubtype::*;
        let swap = |k: ElementKind| match k {
            Edge => Edge,
            ChannelA => ChannelB,
            ChannelB => ChannelA,
            Half(s) => Half(match s {
                A1 => B1,
                A2 => B2,
                A3 => B3,
                B1 => A1,
                B2 => A2,
                B3 => A3,
                A2Rot => B2Rot,
                B2Rot => A2Rot,
            }),
        };
        GammaPath {
            elements: self
                .elements
                .iter()
                .map(|e| PathElement {
                    kind: swap(e.kind),
                    start: f(e.start),
                    end: f(e.end),
                    upper_cusp: e.upper_cusp.map(&f),
                    lower_cusp: e.lower_cusp.map(&f),
                })
                .collect(),
            target: f(self.target),
            context: self.context,
        }
    }

    pub fn to_json(&self, corners: &[i64]) -> serde_json::Value {
        json!({
            "target": self.target,
            "context": self.context,
            "elements": self.elements.iter().map(|e| json!({
                "kind": e.kind,
                "start": e.start,
                "end": e.end,
                "upper_cusp": e.upper_cusp,
                "lower_cusp": e.lower_cusp,
            })).collect::<Vec<_>>(),
            "corners": corners,
        })
    }
}

/// True iff the unique half channel travels upward through its level.
pub fn is_upward(gamma: &GammaPath) -> Result<bool, PathsError> {
    use HalfSubtype::*;
    match gamma.half_subtypes().first() {
        Some(s) => Ok(matches!(s, B1 | A2 | A3 | A2Rot)),
        None => Err(PathsError::NoHalfChannel),
    }
}

/// The slope the path initially travels toward: the far vertex of an
/// initial edge, or the start-toward cusp of an initial channel.
pub fn starting_slope(gamma: &GammaPath) -> Option<Slope> {
    let first = gamma.elements.first()?;
    match first.kind {
        ElementKind::Edge => Some(first.end),
        _ => first.start_toward(),
    }
}

/// Structural check + corner numbers at every junction vertex. A channel
/// contributes virtual neighbors at its junctions: its start-toward cusp on
/// departure and its arrive-from cusp on arrival.
pub fn corners_of(gamma: &GammaPath, d: &FareyDiagram) -> Result<Vec<i64>, PathsError> {
    let els = &gamma.elements;
    if els.is_empty()
        || els[0].start != Slope::INFINITY
        || els.last().unwrap().end != gamma.target
    {
        return Err(PathsError::BadEndpoints);
    }
    let verts = gamma.vertices();
    for (i, &v) in verts.iter().enumerate() {
        if verts[..i].contains(&v) {
            return Err(PathsError::Revisit(v));
        }
    }
    for (i, pair) in els.windows(2).enumerate() {
        if pair[0].end != pair[1].start {
            return Err(PathsError::BrokenChain(i));
        }
    }
    // Embeddability: re-derive channel cusps and compare.
    for e in els {
        match e.kind {
            ElementKind::Edge => {
                if !d.has_edge(e.start, e.end) {
                    return Err(PathsError::MissingEdge(e.start, e.end));
                }
            }
            k => {
                let fresh = PathElement::channel(d, k, e.start, e.end)?;
                if fresh.upper_cusp != e.upper_cusp || fresh.lower_cusp != e.lower_cusp {
                    return Err(PathsError::BadChannel(e.start, e.end));
                }
            }
        }
    }
    let mut corners = vec![];
    for i in 1..els.len() {
        let (left, right) = (&els[i - 1], &els[i]);
        let v = left.end;
        let a = match left.kind {
            ElementKind::Edge => left.start,
            _ => left.arrive_from(d).ok_or(PathsError::BadChannel(left.start, left.end))?,
        };
        let b = match right.kind {
            ElementKind::Edge => right.end,
            _ => right
                .start_toward()
                .ok_or(PathsError::BadChannel(right.start, right.end))?,
        };
        corners.push(d.corner_between(v, a, b)?);
    }
    Ok(corners)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    MinimalCorner,
    ParityCondition,
    OrientationRequirement,
    Adjacency,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathVerdict {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl PathVerdict {
    fn from(violations: Vec<Violation>) -> PathVerdict {
        PathVerdict {
            ok: violations.is_empty(),
            violations,
        }
    }
}

fn structural_violations(gamma: &GammaPath, d: &FareyDiagram) -> Result<Vec<i64>, Violation> {
    corners_of(gamma, d).map_err(|e| Violation {
        rule: Rule::Adjacency,
        location: e.to_string(),
    })
}

fn minimal_violations(gamma: &GammaPath, corners: &[i64]) -> Vec<Violation> {
    let verts = gamma.vertices();
    corners
        .iter()
        .enumerate()
        .filter(|(_, c)| c.abs() < 2)
        .map(|(i, c)| Violation {
            rule: Rule::MinimalCorner,
            location: format!("corner {c} at {}", verts[i + 1]),
        })
        .collect()
}

/// Validate a path made of edges and full channels: embeddability, all
/// corner magnitudes at least 2, and the parity condition on channel
/// endpoints (one shared parity pair, different from the target's, and in
/// knot context also different from 1/0's).
pub fn validate_allowable(gamma: &GammaPath, d: &FareyDiagram) -> PathVerdict {
    let mut vs = vec![];
    if gamma.half_count() != 0 {
        vs.push(Violation {
            rule: Rule::Adjacency,
            location: "allowable paths contain no half channel".into(),
        });
        return PathVerdict::from(vs);
    }
    let corners = match structural_violations(gamma, d) {
        Ok(c) => c,
        Err(v) => return PathVerdict::from(vec![v]),
    };
    vs.extend(minimal_violations(gamma, &corners));
    let mut endpoint_parities = gamma
        .elements
        .iter()
        .filter(|e| e.kind.is_channel())
        .flat_map(|e| [parity_pair(e.start), parity_pair(e.end)]);
    if let Some(p) = endpoint_parities.next() {
        let uniform = endpoint_parities.all(|x| x == p);
        let clash_target = p == parity_pair(gamma.target);
        let clash_knot = gamma.context == Context::Knot && p == ParityPair::OE;
        if !uniform || clash_target || clash_knot {
            vs.push(Violation {
                rule: Rule::ParityCondition,
                location: format!("channel endpoint parity {p:?}"),
            });
        }
    }
    PathVerdict::from(vs)
}

/// Validate a path made of edges and exactly one half channel: corner
/// minimality plus the orientation requirement, which fails only for an
/// index-1 half channel whose initial point shares the target's parity
/// pair.
pub fn validate_semi_allowable(gamma: &GammaPath, d: &FareyDiagram) -> PathVerdict {
    let mut vs = vec![];
    if gamma.half_count() != 1 || gamma.channel_count() != 0 {
        vs.push(Violation {
            rule: Rule::Adjacency,
            location: "semi-allowable paths are edges plus one half channel".into(),
        });
        return PathVerdict::from(vs);
    }
    let corners = match structural_violations(gamma, d) {
        Ok(c) => c,
        Err(v) => return PathVerdict::from(vec![v]),
    };
    vs.extend(minimal_violations(gamma, &corners));
    let half = gamma
        .elements
        .iter()
        .find(|e| e.kind.is_half())
        .expect("checked above");
    if matches!(
        half.kind,
        ElementKind::Half(HalfSubtype::A1) | ElementKind::Half(HalfSubtype::B1)
    ) && parity_pair(half.start) == parity_pair(gamma.target)
    {
        vs.push(Violation {
            rule: Rule::OrientationRequirement,
            location: format!("index-1 half channel starts at {}", half.start),
        });
    }
    PathVerdict::from(vs)
}

/// Corner-minimality-only validation, for the special two-half-channel
/// shape toward (q−1)/q where neither standard validator applies.
pub fn validate_minimal(gamma: &GammaPath, d: &FareyDiagram) -> PathVerdict {
    let corners = match structural_violations(gamma, d) {
        Ok(c) => c,
        Err(v) => return PathVerdict::from(vec![v]),
    };
    PathVerdict::from(minimal_violations(gamma, &corners))
}

/// True iff some interior corner has magnitude at least 3.
pub fn is_genuine_path(gamma: &GammaPath, d: &FareyDiagram) -> Result<bool, PathsError> {
    Ok(corners_of(gamma, d)?.iter().any(|c| c.abs() >= 3))
}

/// The boundary-chain tail from `v` (inclusive) to the target, on whichever
/// chain `v` lies.
fn chain_from(d: &FareyDiagram, v: Slope) -> Vec<Slope> {
    let (upper, lower) = boundary_paths(d);
    let chain = match d.chain_side(v) {
        ChainSide::Upper => upper,
        ChainSide::Lower => lower,
        ChainSide::Endpoint => return vec![v],
    };
    let i = chain.iter().position(|&x| x == v).expect("vertex on its chain");
    chain[i..].to_vec()
}

fn edges_along(verts: &[Slope]) -> Vec<PathElement> {
    verts
        .windows(2)
        .map(|w| PathElement::edge(w[0], w[1]))
        .collect()
}

fn hc(d: &FareyDiagram, s: HalfSubtype, from: Slope, to: Slope) -> Option<PathElement> {
    PathElement::channel(d, ElementKind::Half(s), from, to).ok()
}

const HALF: Slope = Slope { p: 1, q: 2 };

/// Builders for the four semi-allowable existence variants: (1) upward with
/// starting slope 1, (2) downward with starting slope 1, (3)/(4) their
/// reflections with starting slope 0. Returns None exactly when no such
/// path exists.
pub fn build_half_path(target: Slope, variant: u8) -> Option<GammaPath> {
    assert!((1..=4).contains(&variant));
    if !(Slope::new(0, 1) < target && target < Slope::new(1, 1)) {
        return None;
    }
    match variant {
        1 | 2 => build_half_path_direct(target, variant),
        _ => {
            let refl = build_half_path(target.one_minus(), variant - 2)?;
            let gamma = refl.reflect();
            let d = crate::farey::build_diagram(target).ok()?;
            debug_assert!(validate_semi_allowable(&gamma, &d).ok);
            Some(gamma)
        }
    }
}

fn finish_with_chain(
    d: &FareyDiagram,
    mut els: Vec<PathElement>,
    from: Slope,
) -> Option<GammaPath> {
    els.extend(edges_along(&chain_from(d, from)));
    Some(GammaPath::new(els, d.target, Context::Knot))
}

fn build_half_path_direct(target: Slope, variant: u8) -> Option<GammaPath> {
    use HalfSubtype::*;
    let d = crate::farey::build_diagram(target).ok()?;
    let mut candidates: Vec<GammaPath> = vec![];
    let mut push = |g: Option<GammaPath>| {
        if let Some(g) = g {
            candidates.push(g);
        }
    };
    if variant == 1 {
        let s = if target >= HALF { A2 } else { A3 };
        push(hc(&d, s, Slope::INFINITY, HALF)
            .and_then(|h| finish_with_chain(&d, vec![h], HALF)));
    } else {
        if target > HALF {
            // Straight shape: half channel into 1/2, then the lower chain.
            push(hc(&d, A1, Slope::INFINITY, HALF)
                .and_then(|h| finish_with_chain(&d, vec![h], HALF)));
            // Detour shape: edge to 1/1, then jump across the last interior
            // edge at 1/1 (its far lower neighbor v″ and the second upper
            // vertex u2).
            let one = Slope::new(1, 1);
            let (upper, _) = boundary_paths(&d);
            if upper.len() >= 4 {
                let u2 = upper[2];
                if let Some(&vpp) = d
                    .neighbors(one)
                    .iter()
                    .filter(|&&x| d.chain_side(x) == ChainSide::Lower && d.has_edge(x, u2))
                    .last()
                {
                    // The far flank of the interior edge (v″, u2).
                    let w = d
                        .neighbors(vpp)
                        .iter()
                        .copied()
                        .find(|&w| w != one && d.has_triangle(w, vpp, u2));
                    if let Some(w) = w {
                        for s in [A1, B2] {
                            push(
                                hc(&d, s, one, w).and_then(|h| {
                                    finish_with_chain(
                                        &d,
                                        vec![PathElement::edge(Slope::INFINITY, one), h],
                                        w,
                                    )
                                }),
                            );
                        }
                    }
                }
            }
        } else if target < HALF && target.p >= 2 {
            // Fan-jump shapes: run along the top to 1/(j−1), jump across the
            // interior edge (0/1, 1/j) to 1/(j+1), then follow that chain.
            let a = Slope::new(target.q, target.p).ceil();
            for j in [a - 2, a - 1] {
                if j < 1 {
                    continue;
                }
                let top: Vec<Slope> = std::iter::once(Slope::INFINITY)
                    .chain((1..j).map(|k| Slope::new(1, k)))
                    .collect();
                let from = *top.last().unwrap();
                let to = Slope::new(1, j + 1);
                if !d.has_vertex(to) {
                    continue;
                }
                for s in [A1, B2] {
                    push(hc(&d, s, from, to).and_then(|h| {
                        let mut els = edges_along(&top);
                        els.push(h);
                        finish_with_chain(&d, els, to)
                    }));
                }
            }
        }
    }
    let want_dir = if variant == 1 {
        Direction::Upward
    } else {
        Direction::Downward
    };
    let one = Slope::new(1, 1);
    let mut valid: Vec<(i64, GammaPath)> = candidates
        .into_iter()
        .filter(|g| starting_slope(g) == Some(one))
        .filter(|g| {
            is_upward(g).map(|u| (u && want_dir == Direction::Upward) || (!u && want_dir == Direction::Downward))
                == Ok(true)
        })
        .filter(|g| validate_semi_allowable(g, &d).ok)
        .map(|g| {
            let m = corners_of(&g, &d)
                .map(|cs| cs.iter().map(|c| c.abs()).max().unwrap_or(0))
                .unwrap_or(0);
            (m, g)
        })
        .collect();
    // Deterministic genuineness-greedy tie-break: keep the candidate with
    // the largest maximal corner, first-listed on ties.
    valid.sort_by_key(|(m, _)| -*m);
    valid.into_iter().next().map(|(_, g)| g)
}

/// Expected genuineness of the variant-`variant` path per the stated
/// exceptions (used by tests against the enumeration oracle).
pub fn half_path_expected_genuine(target: Slope, variant: u8) -> bool {
    let (p, q) = (target.p, target.q);
    match variant {
        1 => p != 1 && p != q - 1,
        2 => p != 1 && p != 2 && p != q - 1,
        3 => p != 1 && p != q - 1,
        4 => p != 1 && p != q - 2 && p != q - 1,
        _ => unreachable!(),
    }
}

/// Expected existence of the variant path per the stated exceptions.
pub fn half_path_expected_exists(target: Slope, variant: u8) -> bool {
    let (p, q) = (target.p, target.q);
    match variant {
        1 | 3 => true,
        2 => !(p == 1 || (p == q - 1 && q % 2 == 0)),
        4 => !(p == q - 1 || (p == 1 && q % 2 == 0)),
        _ => unreachable!(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelType {
    A,
    B,
}

/// Allowable path starting with a full full channel, in tangle context.
/// Type A exists exactly for 1/3 < target < 1, type B for
/// 0 < target < 2/3 (odd denominators).
pub fn build_channel_path(target: Slope, channel: ChannelType) -> Option<GammaPath> {
    if target.q < 3 || target.q % 2 == 0 {
        return None;
    }
    if !(Slope::new(0, 1) < target && target < Slope::new(1, 1)) {
        return None;
    }
    let in_range = match channel {
        ChannelType::A => target > Slope::new(1, 3),
        ChannelType::B => target < Slope::new(2, 3),
    };
    if !in_range {
        return None;
    }
    let d = crate::farey::build_diagram(target).ok()?;
    let kind = match channel {
        ChannelType::A => ElementKind::ChannelA,
        ChannelType::B => ElementKind::ChannelB,
    };
    let ch = PathElement::channel(&d, kind, Slope::INFINITY, HALF).ok()?;
    let mut best: Option<(i64, GammaPath)> = None;
    let continuations: Vec<Vec<PathElement>> = if target == HALF {
        vec![vec![]]
    } else {
        d.neighbors(HALF)
            .iter()
            .copied()
            .filter(|&x| x != Slope::new(0, 1) && x != Slope::new(1, 1))
            .map(|x| {
                let mut els = vec![PathElement::edge(HALF, x)];
                els.extend(edges_along(&chain_from(&d, x)));
                els
            })
            .collect()
    };
    for cont in continuations {
        let mut els = vec![ch];
        els.extend(cont);
        let g = GammaPath::new(els, target, Context::Tangle);
        if validate_allowable(&g, &d).ok {
            let m = corners_of(&g, &d)
                .map(|cs| cs.iter().map(|c| c.abs()).max().unwrap_or(0))
                .unwrap_or(0);
            if best.as_ref().map_or(true, |(bm, _)| m > *bm) {
                best = Some((m, g));
            }
        }
    }
    best.map(|(_, g)| g)
}

/// The two-half-channel path toward (q−1)/q, q even ≥ 4: a rotated upward
/// half channel into 1/2 (meridional cusp on the top level, cusp slopes 1
/// and 0), the lower chain to (q−3)/(q−2), and a terminal B2 half channel
/// into the target. Contributes 2 meridional cusps.
pub fn build_double_half_path(target: Slope) -> Result<GammaPath, PathsError> {
    let q = target.q;
    if q < 4 || q % 2 != 0 || target.p != q - 1 {
        return Err(PathsError::Precondition(
            "needs target (q-1)/q with q even, q >= 4",
        ));
    }
    let d = crate::farey::build_diagram(target)?;
    let first = PathElement::channel(&d, ElementKind::Half(HalfSubtype::A2Rot), Slope::INFINITY, HALF)?;
    let mut els = vec![first];
    let middle: Vec<Slope> = (2..=q - 2).map(|k| Slope::new(k - 1, k)).collect();
    els.extend(edges_along(&middle));
    let from = Slope::new(q - 3, q - 2);
    els.push(PathElement::channel(
        &d,
        ElementKind::Half(HalfSubtype::B2),
        from,
        target,
    )?);
    let g = GammaPath::new(els, target, Context::Knot);
    debug_assert!(validate_minimal(&g, &d).ok);
    Ok(g)
}

/// Channel-start path for the 1/n tangles, |n| > 2: a type B channel plus
/// the top chain for odd n, the reflected two-half-channel shape for even
/// n, mirrored for negative n.
pub fn build_integer_tangle_path(n: i64) -> Result<GammaPath, PathsError> {
    if n.abs() <= 2 {
        return Err(PathsError::Precondition("needs |n| > 2"));
    }
    if n < 0 {
        return Ok(build_integer_tangle_path(-n)?.mirror());
    }
    let target = Slope::new(1, n);
    if n % 2 == 1 {
        let d = crate::farey::build_diagram(target)?;
        let ch = PathElement::channel(&d, ElementKind::ChannelB, Slope::INFINITY, HALF)?;
        let mut els = vec![ch];
        els.extend(edges_along(&chain_from(&d, HALF)));
        let g = GammaPath::new(els, target, Context::Tangle);
        debug_assert!(validate_allowable(&g, &d).ok);
        Ok(g)
    } else {
        let mut g = build_double_half_path(target.one_minus())?.reflect();
        g.context = Context::Tangle;
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Allowable,
    SemiAllowable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constraints {
    pub kind: PathKind,
    pub context: Context,
    pub require_genuine: bool,
    pub starting_slope: Option<Slope>,
    pub direction: Option<Direction>,
    /// Require the first element to be this full channel type.
    pub first_element: Option<ChannelType>,
    pub max_q: i64,
}

impl Constraints {
    pub fn new(kind: PathKind, context: Context) -> Constraints {
        Constraints {
            kind,
            context,
            require_genuine: false,
            starting_slope: None,
            direction: None,
            first_element: None,
            max_q: 64,
        }
    }
}

/// Exhaustive depth-first search for valid paths under the constraints.
/// Channels are explored across every interior diagram edge flanking the
/// current vertex; half channels try all six standard subtypes. Prunes on
/// corner minimality as it extends.
pub fn enumerate_paths(
    d: &FareyDiagram,
    constraints: &Constraints,
) -> Result<Vec<GammaPath>, PathsError> {
    if d.target.q > constraints.max_q {
        return Err(PathsError::GuardExceeded(d.target.q, constraints.max_q));
    }
    let mut out = vec![];
    let mut els: Vec<PathElement> = vec![];
    dfs(d, constraints, &mut els, &mut out);
    Ok(out)
}

fn junction_ok(d: &FareyDiagram, left: &PathElement, right: &PathElement) -> bool {
    let v = left.end;
    let a = match left.kind {
        ElementKind::Edge => left.start,
        _ => match left.arrive_from(d) {
            Some(a) => a,
            None => return false,
        },
    };
    let b = match right.kind {
        ElementKind::Edge => right.end,
        _ => match right.start_toward() {
            Some(b) => b,
            None => return false,
        },
    };
    matches!(d.corner_between(v, a, b), Ok(c) if c.abs() >= 2)
}

fn candidate_moves(d: &FareyDiagram, cur: Slope, want_half: bool, want_channel: bool) -> Vec<PathElement> {
    use HalfSubtype::*;
    let mut moves: Vec<PathElement> = d
        .neighbors(cur)
        .iter()
        .map(|&n| PathElement::edge(cur, n))
        .collect();
    // Channel jumps: across each interior edge (x, y) spanning a triangle
    // with the current vertex.
    let link = d.link(cur);
    for w in link.windows(2) {
        let (x, y) = (w[0], w[1]);
        if let Some(&far) = d
            .neighbors(x)
            .iter()
            .find(|&&far| far != cur && d.has_triangle(far, x, y))
        {
            let mut kinds = vec![];
            if want_channel {
                kinds.extend([ElementKind::ChannelA, ElementKind::ChannelB]);
            }
            if want_half {
                kinds.extend([A1, A2, A3, B1, B2, B3].map(ElementKind::Half));
            }
            for k in kinds {
                if let Ok(e) = PathElement::channel(d, k, cur, far) {
                    moves.push(e);
                }
            }
        }
    }
    moves
}

fn dfs(d: &FareyDiagram, cs: &Constraints, els: &mut Vec<PathElement>, out: &mut Vec<GammaPath>) {
    let cur = els.last().map_or(Slope::INFINITY, |e| e.end);
    if cur == d.target {
        let g = GammaPath::new(els.clone(), d.target, cs.context);
        if accepts(d, cs, &g) {
            out.push(g);
        }
        return;
    }
    let halves = els.iter().filter(|e| e.kind.is_half()).count();
    let want_half = cs.kind == PathKind::SemiAllowable && halves == 0;
    let want_channel = cs.kind == PathKind::Allowable;
    for m in candidate_moves(d, cur, want_half, want_channel) {
        // Simple paths only: no vertex revisits (1/0 is always used).
        if m.end == Slope::INFINITY || els.iter().any(|e| e.start == m.end || e.end == m.end) {
            continue;
        }
        if let Some(prev) = els.last() {
            if !junction_ok(d, prev, &m) {
                continue;
            }
        }
        els.push(m);
        dfs(d, cs, els, out);
        els.pop();
    }
}

fn accepts(d: &FareyDiagram, cs: &Constraints, g: &GammaPath) -> bool {
    match cs.kind {
        PathKind::Allowable => {
            if !validate_allowable(g, d).ok {
                return false;
            }
        }
        PathKind::SemiAllowable => {
            if !validate_semi_allowable(g, d).ok {
                return false;
            }
        }
    }
    if let Some(s) = cs.starting_slope {
        if starting_slope(g) != Some(s) {
            return false;
        }
    }
    if let Some(dir) = cs.direction {
        match is_upward(g) {
            Ok(u) => {
                if (dir == Direction::Upward) != u {
                    return false;
                }
            }
            Err(_) => return false,
        }
    }
    if let Some(ft) = cs.first_element {
        let want = match ft {
            ChannelType::A => ElementKind::ChannelA,
            ChannelType::B => ElementKind::ChannelB,
        };
        if g.elements.first().map(|e| e.kind) != Some(want) {
            return false;
        }
    }
    if cs.require_genuine && !is_genuine_path(g, d).unwrap_or(false) {
        return false;
    }
    true
}

/// All reduced fractions 0 < p/q < 1 with q ≤ qmax.
pub fn reduced_fractions(qmax: i64) -> Vec<Slope> {
    let mut v = vec![];
    for q in 2..=qmax {
        for p in 1..q {
            let s = Slope::new(p, q);
            if s.q == q {
                v.push(s);
            }
        }
    }
    v
}

/// Map `f` over targets, in parallel when the `parallel` feature is on.
pub fn map_targets<T: Send>(targets: &[Slope], f: impl Fn(Slope) -> T + Sync) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        targets.par_iter().map(|&t| f(t)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        targets.iter().map(|&t| f(t)).collect()
    }
}

/// Sequential twin of [`map_targets`], kept for benchmarking the parallel
/// speedup.
pub fn map_targets_seq<T>(targets: &[Slope], f: impl Fn(Slope) -> T) -> Vec<T> {
    targets.iter().map(|&t| f(t)).collect()
}

/// Compare the four variant builders against the enumeration oracle for one
/// target: existence and genuineness-availability must agree. Returns
/// human-readable disagreements.
pub fn half_path_agreement(target: Slope) -> Vec<String> {
    let mut bad = vec![];
    let d = match crate::farey::build_diagram(target) {
        Ok(d) => d,
        Err(e) => return vec![e.to_string()],
    };
    for variant in 1..=4u8 {
        let start = if variant <= 2 {
            Slope::new(1, 1)
        } else {
            Slope::new(0, 1)
        };
        // Reflection flips the vertical direction, so the two reflected
        // variants swap it: 1 and 4 run upward, 2 and 3 downward.
        let dir = if variant == 1 || variant == 4 {
            Direction::Upward
        } else {
            Direction::Downward
        };
        let mut cs = Constraints::new(PathKind::SemiAllowable, Context::Knot);
        cs.starting_slope = Some(start);
        cs.direction = Some(dir);
        let found = enumerate_paths(&d, &cs).map(|v| !v.is_empty()).unwrap_or(false);
        let built = build_half_path(target, variant);
        if built.is_some() != found {
            bad.push(format!(
                "{target} v{variant}: builder {} vs oracle {}",
                built.is_some(),
                found
            ));
        }
        if found != half_path_expected_exists(target, variant) {
            bad.push(format!("{target} v{variant}: existence vs stated exceptions"));
        }
        if found {
            cs.require_genuine = true;
            let genuine_found = enumerate_paths(&d, &cs).map(|v| !v.is_empty()).unwrap_or(false);
            if genuine_found != half_path_expected_genuine(target, variant) {
                bad.push(format!(
                    "{target} v{variant}: genuineness {} vs stated exceptions {}",
                    genuine_found,
                    half_path_expected_genuine(target, variant)
                ));
            }
            if let Some(g) = &built {
                if !validate_semi_allowable(g, &d).ok {
                    bad.push(format!("{target} v{variant}: builder output invalid"));
                }
                // The builder must produce a genuine path whenever one exists.
                if genuine_found && is_genuine_path(g, &d) != Ok(true) {
                    bad.push(format!("{target} v{variant}: builder missed a genuine path"));
                }
            }
        }
    }
    bad
}

/// Draft genuineness exceptions for type-A channel-start paths:
/// r = 1 − 1/q or r = 2k/(6k−1).
pub fn channel_expected_genuine(target: Slope, channel: ChannelType) -> bool {
    let r = match channel {
        ChannelType::A => target,
        ChannelType::B => target.one_minus(),
    };
    let (p, q) = (r.p, r.q);
    if p == q - 1 {
        return false;
    }
    // r = 2k/(6k-1) ⟺ q = 6k-1 and p = 2k.
    if (q + 1) % 6 == 0 && p * 3 == q + 1 {
        return false;
    }
    true
}

/// Compare build_channel_path and the draft genuineness census against the
/// enumeration oracle for one odd-denominator target.
pub fn channel_agreement(target: Slope) -> Vec<String> {
    let mut bad = vec![];
    let d = match crate::farey::build_diagram(target) {
        Ok(d) => d,
        Err(e) => return vec![e.to_string()],
    };
    for ch in [ChannelType::A, ChannelType::B] {
        let mut cs = Constraints::new(PathKind::Allowable, Context::Tangle);
        cs.first_element = Some(ch);
        let found = enumerate_paths(&d, &cs).map(|v| !v.is_empty()).unwrap_or(false);
        let built = build_channel_path(target, ch);
        let expected = match ch {
            ChannelType::A => target > Slope::new(1, 3),
            ChannelType::B => target < Slope::new(2, 3),
        };
        if built.is_some() != found || found != expected {
            bad.push(format!(
                "{target} {ch:?}: builder {} oracle {} range {}",
                built.is_some(),
                found,
                expected
            ));
        }
        if let Some(g) = &built {
            if !validate_allowable(g, &d).ok {
                bad.push(format!("{target} {ch:?}: builder output invalid"));
            }
        }
        if found {
            cs.require_genuine = true;
            let genuine = enumerate_paths(&d, &cs).map(|v| !v.is_empty()).unwrap_or(false);
            if genuine != channel_expected_genuine(target, ch) {
                bad.push(format!(
                    "{target} {ch:?}: genuine {} vs draft {}",
                    genuine,
                    channel_expected_genuine(target, ch)
                ));
            }
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::farey::build_diagram;

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q)
    }

    #[test]
    fn channel_model_position_cusps() {
        let d = build_diagram(s(3, 5)).unwrap();
        let a = PathElement::channel(&d, ElementKind::ChannelA, Slope::INFINITY, HALF).unwrap();
        assert_eq!(a.upper_cusp, Some(s(1, 1)));
        assert_eq!(a.lower_cusp, Some(s(0, 1)));
        let b = PathElement::channel(&d, ElementKind::ChannelB, Slope::INFINITY, HALF).unwrap();
        assert_eq!(b.upper_cusp, Some(s(0, 1)));
        assert_eq!(b.lower_cusp, Some(s(1, 1)));
    }

    #[test]
    fn allowable_validation_examples() {
        let d = build_diagram(s(3, 5)).unwrap();
        let ch = PathElement::channel(&d, ElementKind::ChannelA, Slope::INFINITY, HALF).unwrap();
        let g = GammaPath::new(
            vec![ch, PathElement::edge(HALF, s(3, 5))],
            s(3, 5),
            Context::Tangle,
        );
        assert!(validate_allowable(&g, &d).ok);
        assert_eq!(corners_of(&g, &d).unwrap(), vec![3]);

        let mut gk = g.clone();
        gk.context = Context::Knot;
        let v = validate_allowable(&gk, &d);
        assert!(!v.ok);
        assert!(v.violations.iter().any(|x| x.rule == Rule::ParityCondition));
    }

    #[test]
    fn semi_allowable_a3_shape() {
        let d = build_diagram(s(2, 5)).unwrap();
        let h = hc(&d, HalfSubtype::A3, Slope::INFINITY, HALF).unwrap();
        let g = GammaPath::new(
            vec![h, PathElement::edge(HALF, s(2, 5))],
            s(2, 5),
            Context::Knot,
        );
        assert!(validate_semi_allowable(&g, &d).ok);
        assert!(is_upward(&g).unwrap());
        assert_eq!(starting_slope(&g), Some(s(1, 1)));
    }

    #[test]
    fn half_path_examples() {
        let g = build_half_path(s(2, 5), 1).unwrap();
        assert!(is_upward(&g).unwrap());
        assert_eq!(starting_slope(&g), Some(s(1, 1)));
        let d = build_diagram(s(2, 5)).unwrap();
        assert!(is_genuine_path(&g, &d).unwrap());

        assert!(build_half_path(s(1, 5), 2).is_none());
        assert!(build_half_path(s(1, 7), 2).is_none());
        let g = build_half_path(s(2, 7), 2).unwrap();
        let d = build_diagram(s(2, 7)).unwrap();
        assert!(!is_upward(&g).unwrap());
        assert!(!is_genuine_path(&g, &d).unwrap());
    }

    #[test]
    fn channel_path_examples() {
        let g = build_channel_path(s(3, 5), ChannelType::A).unwrap();
        assert_eq!(g.elements.len(), 2);
        assert_eq!(g.elements[0].kind, ElementKind::ChannelA);
        assert!(build_channel_path(s(1, 5), ChannelType::A).is_none());
        assert!(build_channel_path(s(1, 5), ChannelType::B).is_some());
        assert!(build_channel_path(s(3, 4), ChannelType::A).is_none()); // even q
    }

    #[test]
    fn double_half_shapes() {
        let g = build_double_half_path(s(3, 4)).unwrap();
        let d = build_diagram(s(3, 4)).unwrap();
        assert_eq!(g.half_count(), 2);
        assert_eq!(g.meridional_cusps(), 2);
        assert_eq!(corners_of(&g, &d).unwrap(), vec![2]);
        assert!(validate_minimal(&g, &d).ok);

        let g = build_double_half_path(s(5, 6)).unwrap();
        let d = build_diagram(s(5, 6)).unwrap();
        assert_eq!(corners_of(&g, &d).unwrap(), vec![2, 2, 2]);
        assert!(build_double_half_path(s(2, 3)).is_err());
    }

    #[test]
    fn integer_tangle_shapes() {
        let g = build_integer_tangle_path(5).unwrap();
        assert_eq!(g.elements[0].kind, ElementKind::ChannelB);
        assert_eq!(g.meridional_cusps(), 2);
        let g = build_integer_tangle_path(4).unwrap();
        assert_eq!(g.half_count(), 2);
        assert_eq!(g.target, s(1, 4));
        let g = build_integer_tangle_path(-5).unwrap();
        assert_eq!(g.target, s(-1, 5));
        assert!(build_integer_tangle_path(2).is_err());
    }

    #[test]
    fn enumeration_matches_builders_smoke() {
        for t in [s(2, 5), s(3, 5), s(2, 7), s(5, 8), s(7, 10), s(3, 11)] {
            assert_eq!(half_path_agreement(t), Vec::<String>::new());
        }
        for t in [s(1, 3), s(2, 5), s(3, 5), s(4, 5), s(2, 3)] {
            assert_eq!(channel_agreement(t), Vec::<String>::new());
        }
    }

    #[test]
    fn draft_nongenuine_cases() {
        // 4/5 = 1 - 1/5 and 2/5 = 2k/(6k-1) with k = 1.
        assert!(!channel_expected_genuine(s(4, 5), ChannelType::A));
        assert!(!channel_expected_genuine(s(2, 5), ChannelType::A));
        assert!(channel_expected_genuine(s(3, 5), ChannelType::A));
        // Reflections for type B: 1/5 and 3/5.
        assert!(!channel_expected_genuine(s(1, 5), ChannelType::B));
        assert!(!channel_expected_genuine(s(3, 5), ChannelType::B));
    }
}
