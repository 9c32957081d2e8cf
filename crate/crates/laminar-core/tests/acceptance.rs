//! Full acceptance sweep: ten gate checks covering the census, diagram,
//! path, classification, surgery, and model-piece layers. Each check
//! prints a single PASS/FAIL line; run with `--nocapture` to see them.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use laminar_core::assembly::{
    essential_verdict, reversed_orientation_control, validate_auto, Assembly,
};
use laminar_core::classify::{
    classify_genuine, classify_persistent, component_count, p_bar, pretzel_inequality,
    pretzel_multiset_listed, pretzel_strand_trace, sfs_surgery_filter, KnotStatus, SurgeryStatus,
};
use laminar_core::complex::{
    all_circle_mark_systems, channel_piece_a, channel_piece_b, classify_boundary_circle,
    disk_roles, enumerate_valid_configs, half_channel_piece, ht_piece, is_prelaminar, trivial_cap,
    CircleType, DiskRole,
};
use laminar_core::farey::{
    boundary_paths, build_diagram, corners_of_vertex_path, enumerate_minimal_paths, fork_vertices,
};
use laminar_core::paths::{
    channel_agreement, half_path_agreement, map_targets, reduced_fractions, Context, GammaPath,
    PathElement,
};
use laminar_core::rational::{
    cont_frac, delta, eval_cont_frac, normalize_montesinos, CfSign, ContFrac, MontesinosKnot,
    Slope,
};

fn s(p: i64, q: i64) -> Slope {
    Slope::new(p, q)
}

fn knot(tangles: &[Slope], n: i64) -> MontesinosKnot {
    normalize_montesinos(tangles, n).expect("normalizable input")
}

// ---------------------------------------------------------------------------
// 1. Local singular-point census
// ---------------------------------------------------------------------------

fn local_config_census() -> Result<(), String> {
    let valid = enumerate_valid_configs();
    if valid.len() != 12 {
        return Err(format!("expected 12 valid configs, got {}", valid.len()));
    }
    for cfg in &valid {
        let roles = disk_roles(cfg);
        let count = |r: DiskRole| roles.values().filter(|&&x| x == r).count();
        if count(DiskRole::Sink) != 1 || count(DiskRole::Passing) != 2 || count(DiskRole::Source) != 3
        {
            return Err(format!("bad role distribution in {cfg:?}"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 2. Diagram invariants and the continued-fraction identity
// ---------------------------------------------------------------------------

fn diagram_invariants() -> Result<(), String> {
    for t in reduced_fractions(50) {
        let d = build_diagram(t).map_err(|e| e.to_string())?;
        for &(a, b) in &d.edges {
            if delta(a, b) != 1 {
                return Err(format!("edge {a}-{b} in D({t}) has delta != 1"));
            }
        }
        if d.triangles.len() != d.vertices.len() - 2 {
            return Err(format!(
                "D({t}): {} triangles for {} vertices",
                d.triangles.len(),
                d.vertices.len()
            ));
        }
        let (upper, lower) = boundary_paths(&d);
        if upper[1..upper.len() - 1].iter().any(|v| v.p * t.q <= t.p * v.q)
            || lower[1..lower.len() - 1].iter().any(|v| v.p * t.q >= t.p * v.q)
        {
            return Err(format!("D({t}): boundary labels do not partition"));
        }
        if upper.len() + lower.len() != d.vertices.len() + 2 {
            return Err(format!("D({t}): chains do not cover the boundary"));
        }
    }
    for t in reduced_fractions(30) {
        let d = build_diagram(t).map_err(|e| e.to_string())?;
        for path in enumerate_minimal_paths(&d) {
            if path[1].q != 1 {
                return Err(format!("minimal path in D({t}) misses an integer vertex"));
            }
            let cf = ContFrac {
                v1: path[1].p,
                cs: corners_of_vertex_path(&d, &path).map_err(|e| e.to_string())?,
            };
            let back = eval_cont_frac(&cf).map_err(|e| e.to_string())?;
            if back != t {
                return Err(format!("minimal path in D({t}) evaluates to {back}"));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 3. The 3/11 diagram against hand-derived values
// ---------------------------------------------------------------------------

fn diagram_3_11_sanity() -> Result<(), String> {
    let t = s(3, 11);
    let d = build_diagram(t).map_err(|e| e.to_string())?;
    if d.vertices.len() != 8 || d.triangles.len() != 6 {
        return Err(format!(
            "{} vertices / {} triangles",
            d.vertices.len(),
            d.triangles.len()
        ));
    }
    let (upper, lower) = boundary_paths(&d);
    let up_corners = corners_of_vertex_path(&d, &upper).map_err(|e| e.to_string())?;
    let lo_corners = corners_of_vertex_path(&d, &lower).map_err(|e| e.to_string())?;
    if lo_corners != [4, 3] {
        return Err(format!("lower corners {lo_corners:?}"));
    }
    if up_corners != [-2, -2, -3, -2] {
        return Err(format!("upper corners {up_corners:?}"));
    }
    let forks: BTreeSet<Slope> = fork_vertices(&d).into_iter().collect();
    let expect: BTreeSet<Slope> = [s(0, 1), s(1, 3), s(1, 4)].into_iter().collect();
    if forks != expect {
        return Err(format!("fork vertices {forks:?}"));
    }
    // Cross-check through the two continued-fraction expansions.
    let pos = cont_frac(t, CfSign::Positive).map_err(|e| e.to_string())?;
    let neg = cont_frac(t, CfSign::Negative).map_err(|e| e.to_string())?;
    if pos.cs != lo_corners || neg.cs != up_corners {
        return Err(format!("corner/expansion mismatch: {pos:?} {neg:?}"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 4. Single-half-channel builders against exhaustive enumeration
// ---------------------------------------------------------------------------

fn half_path_oracle_agreement() -> Result<(), String> {
    let targets = reduced_fractions(25);
    let reports = map_targets(&targets, half_path_agreement);
    let bad: Vec<String> = targets
        .iter()
        .zip(&reports)
        .filter(|(_, r)| !r.is_empty())
        .map(|(t, r)| format!("{t}: {r:?}"))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad.join("; "))
    }
}

// ---------------------------------------------------------------------------
// 5. Full-channel starts: existence ranges and genuineness
// ---------------------------------------------------------------------------

fn channel_oracle_agreement() -> Result<(), String> {
    let targets: Vec<Slope> = reduced_fractions(25)
        .into_iter()
        .filter(|t| t.q % 2 == 1)
        .collect();
    let reports = map_targets(&targets, channel_agreement);
    let bad: Vec<String> = targets
        .iter()
        .zip(&reports)
        .filter(|(_, r)| !r.is_empty())
        .map(|(t, r)| format!("{t}: {r:?}"))
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad.join("; "))
    }
}

// ---------------------------------------------------------------------------
// 6. Knot classification spot checks with certificate re-validation
// ---------------------------------------------------------------------------

/// Re-run a positive verdict's certificate through the path validator and
/// the region checker, independently of the classifier that produced it.
fn revalidate(a: &Assembly) -> Result<(), String> {
    if !(a.laminar && a.persistent) {
        return Err("certificate verdict booleans are not set".into());
    }
    if a.meridional_cusps < 2 {
        return Err(format!("{} meridional cusps", a.meridional_cusps));
    }
    let ev = essential_verdict(&a.regions);
    if !ev.essential {
        return Err(format!("regions not essential: {:?}", ev.failures));
    }
    if a.certificates.is_empty() {
        return Err("no path certificates recorded".into());
    }
    for cert in &a.certificates {
        let target: Slope = serde_json::from_value(cert["target"].clone())
            .map_err(|e| format!("certificate target: {e}"))?;
        let context: Context = serde_json::from_value(cert["context"].clone())
            .map_err(|e| format!("certificate context: {e}"))?;
        let elements: Vec<PathElement> = serde_json::from_value(cert["elements"].clone())
            .map_err(|e| format!("certificate elements: {e}"))?;
        let g = GammaPath::new(elements, target, context);
        let d = build_diagram(target).map_err(|e| e.to_string())?;
        let verdict = validate_auto(&g, &d);
        if !verdict.ok {
            return Err(format!(
                "certificate path to {target} fails validation: {:?}",
                verdict.violations
            ));
        }
    }
    Ok(())
}

fn knot_spot_checks() -> Result<(), String> {
    // The (3, 3, -4) pretzel knot.
    let v = classify_persistent(&knot(&[s(1, 3), s(1, 3), s(-1, 4)], 0))
        .map_err(|e| e.to_string())?;
    match &v.status {
        KnotStatus::PersistentlyLaminar(a) => revalidate(a)?,
        other => return Err(format!("K(1/3,1/3,-1/4): {other:?}")),
    }
    // Band exceptions: one even twist region, n = -1.
    for qs in [[2, 3, 7], [4, 3, 5], [6, 5, 7]] {
        let k = knot(&[s(1, qs[0]), s(1, qs[1]), s(1, qs[2])], -1);
        let v = classify_persistent(&k).map_err(|e| e.to_string())?;
        if !matches!(v.status, KnotStatus::ExceptionalForm(_)) {
            return Err(format!("K(1/{},1/{},1/{},-1) not exceptional", qs[0], qs[1], qs[2]));
        }
    }
    // A genuine example away from the pretzel families.
    let v = classify_genuine(&knot(&[s(2, 5), s(1, 3), s(1, 7)], 1)).map_err(|e| e.to_string())?;
    if v.genuine != Some(true) {
        return Err(format!("K(2/5,1/3,1/7,1) genuineness {:?}", v.genuine));
    }
    match &v.status {
        KnotStatus::PersistentlyLaminar(a) => {
            if !a.genuine {
                return Err("genuine verdict without a genuine assembly".into());
            }
            revalidate(a)?;
        }
        other => return Err(format!("K(2/5,1/3,1/7,1): {other:?}")),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 7. Component counting against strand tracing
// ---------------------------------------------------------------------------

fn component_count_oracle() -> Result<(), String> {
    for q1 in [3, 5, 7, 9] {
        for q2 in [3, 5, 7, 9] {
            for q3 in [3, 5, 7, 9] {
                let k = knot(&[s(1, q1), s(1, q2), s(1, q3)], -1);
                let c = component_count(&k);
                if c != 2 {
                    return Err(format!("all-odd ({q1},{q2},{q3}) gives {c} components"));
                }
            }
        }
    }
    let c = component_count(&knot(&[s(1, 3), s(1, 3), s(3, 4)], -1));
    if c != 1 {
        return Err(format!("K(1/3,1/3,3/4,-1) gives {c} components"));
    }
    for q1 in 2..=9 {
        for q2 in 2..=9 {
            for q3 in 2..=9 {
                for n in [-1, 0, 1] {
                    let k = MontesinosKnot {
                        tangles: vec![s(1, q1), s(1, q2), s(1, q3)],
                        n,
                        mirrored: false,
                        pretzel: true,
                    };
                    let (a, b) = (component_count(&k), pretzel_strand_trace(&[q1, q2, q3], n));
                    if a != b {
                        return Err(format!("({q1},{q2},{q3}), n = {n}: {a} vs traced {b}"));
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 8. Surgery filter arithmetic
// ---------------------------------------------------------------------------

fn surgery_filter_checks() -> Result<(), String> {
    // The branch inequality matches the listed multisets over all triples
    // of twist counts that close into a knot (at most one even entry —
    // two even twist regions close into a link).
    for q1 in 2..=50 {
        for q2 in q1..=50 {
            for q3 in q2..=50 {
                if [q1, q2, q3].iter().filter(|q| *q % 2 == 0).count() > 1 {
                    continue;
                }
                let qs = [q1, q2, q3];
                if pretzel_inequality(qs) != pretzel_multiset_listed(qs) {
                    return Err(format!("inequality/multiset split at {qs:?}"));
                }
            }
        }
    }
    let v = sfs_surgery_filter(&knot(&[s(-1, 2), s(1, 3), s(2, 9)], 0)).map_err(|e| e.to_string())?;
    match &v {
        SurgeryStatus::Candidate { form, params } if form.ends_with('b') => {
            if params["a"] != 4 {
                return Err(format!("candidate (b) with a = {}", params["a"]));
            }
        }
        other => return Err(format!("K(-1/2,1/3,2/9): {other:?}")),
    }
    for a in 2..=100 {
        let pb = p_bar(2, 2 * a + 1).map_err(|e| e.to_string())?;
        if pb != a {
            return Err(format!("p-bar(2, {}) = {pb}, want {a}", 2 * a + 1));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 9. Model-piece validation and the reversed-orientation control
// ---------------------------------------------------------------------------

fn model_piece_checks() -> Result<(), String> {
    let cases = [
        ("ht", ht_piece(), 0),
        ("channel A", channel_piece_a(), 2),
        ("channel B", channel_piece_b(), 2),
        ("half channel", half_channel_piece(), 1),
        ("trivial cap", trivial_cap(), 0),
    ];
    for (name, tc, cusps) in &cases {
        let report = is_prelaminar(tc).map_err(|e| format!("{name}: {e}"))?;
        if !report.ok {
            return Err(format!("{name} is not pre-laminar"));
        }
        if report.meridional_cusps != *cusps {
            return Err(format!(
                "{name}: {} cusps, want {cusps}",
                report.meridional_cusps
            ));
        }
    }
    let good = essential_verdict(&reversed_orientation_control(false));
    let bad = essential_verdict(&reversed_orientation_control(true));
    if !good.essential {
        return Err("control surface fails unreversed".into());
    }
    if bad.essential || !bad.failures.iter().any(|f| f.contains("winding 1")) {
        return Err(format!("reversed control not rejected: {:?}", bad.failures));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// 10. Boundary-circle extension census
// ---------------------------------------------------------------------------

fn extension_census() -> Result<(), String> {
    let systems = all_circle_mark_systems();
    if systems.len() != 36 {
        return Err(format!("{} mark systems, want 36", systems.len()));
    }
    let count = |t: CircleType| {
        systems
            .iter()
            .filter(|x| classify_boundary_circle(x) == t)
            .count()
    };
    let got = (
        count(CircleType::I),
        count(CircleType::II),
        count(CircleType::III),
        count(CircleType::Unsupported),
    );
    if got != (2, 4, 8, 22) {
        return Err(format!("census {got:?}, want (2, 4, 8, 22)"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------

#[test]
fn acceptance_criteria() {
    type Check = (&'static str, fn() -> Result<(), String>, Option<Duration>);
    let checks: [Check; 10] = [
        ("local-config census", local_config_census, Some(Duration::from_secs(1))),
        ("diagram invariants", diagram_invariants, Some(Duration::from_secs(30))),
        ("D(3/11) sanity", diagram_3_11_sanity, None),
        ("half-path oracle agreement", half_path_oracle_agreement, Some(Duration::from_secs(120))),
        ("channel oracle agreement", channel_oracle_agreement, None),
        ("knot spot checks", knot_spot_checks, None),
        ("component-count oracle", component_count_oracle, None),
        ("surgery filter", surgery_filter_checks, None),
        ("model pieces", model_piece_checks, None),
        ("extension census", extension_census, None),
    ];
    let mut failures = vec![];
    for (i, (name, check, budget)) in checks.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = check();
        let dt = t0.elapsed();
        match outcome {
            Ok(()) => {
                let over = budget.map(|b| dt > b).unwrap_or(false);
                if over {
                    println!("criterion {:2} ({name}): FAIL — over budget at {dt:.2?}", i + 1);
                    failures.push(format!("{name}: exceeded {:?} budget ({dt:.2?})", budget.unwrap()));
                } else {
                    println!("criterion {:2} ({name}): PASS ({dt:.2?})", i + 1);
                }
            }
            Err(e) => {
                println!("criterion {:2} ({name}): FAIL — {e}", i + 1);
                failures.push(format!("{name}: {e}"));
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}
