//! Randomized invariant checks for the arithmetic, diagram, path, and
//! complex layers.

use laminar_core::complex::{
    all_circle_mark_systems, classify_boundary_circle, extend_boundary_circle,
    extension_candidates, CircleType,
};
use laminar_core::farey::{boundary_paths, build_diagram, corners_of_vertex_path};
use laminar_core::paths::build_half_path;
use laminar_core::rational::{
    cont_frac, delta, eval_cont_frac, mod_neg_inverse, normalize_montesinos, parity_pair, CfSign,
    ParityPair, Slope,
};
use proptest::prelude::*;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// A reduced fraction p/q with q ≥ 2 and 0 < p < q.
fn proper_slope(qmax: i64) -> impl Strategy<Value = Slope> {
    (2..=qmax)
        .prop_flat_map(|q| (1..q, Just(q)))
        .prop_filter("coprime", |(p, q)| gcd(*p, *q) == 1)
        .prop_map(|(p, q)| Slope::new(p, q))
}

/// Any finite reduced fraction, possibly negative or integral.
fn finite_slope(bound: i64) -> impl Strategy<Value = Slope> {
    (-bound..=bound, 1..=bound).prop_map(|(p, q)| Slope::new(p, q))
}

proptest! {
    #[test]
    fn cont_frac_round_trips(r in proper_slope(1000), v1 in -5i64..=5) {
        let r = r.add_int(v1);
        for sign in [CfSign::Positive, CfSign::Negative] {
            let cf = cont_frac(r, sign).unwrap();
            prop_assert!(cf.cs.iter().all(|&c| c.abs() >= 2));
            let want_positive = sign == CfSign::Positive;
            prop_assert!(cf.cs.iter().all(|&c| (c > 0) == want_positive));
            prop_assert_eq!(eval_cont_frac(&cf).unwrap(), r);
        }
    }

    #[test]
    fn parity_pair_matches_residues(r in finite_slope(500)) {
        let pp = parity_pair(r);
        let expect = match (r.p.rem_euclid(2), r.q.rem_euclid(2)) {
            (1, 0) => ParityPair::OE,
            (0, 1) => ParityPair::EO,
            (1, 1) => ParityPair::OO,
            _ => unreachable!("reduced fraction cannot be even/even"),
        };
        prop_assert_eq!(pp, expect);
    }

    #[test]
    fn delta_is_symmetric_and_unimodular_on_mediants(a in finite_slope(200), b in finite_slope(200)) {
        prop_assert_eq!(delta(a, b), delta(b, a));
        prop_assert_eq!(delta(a, a), 0);
        if delta(a, b) == 1 {
            let m = Slope::mediant(a, b);
            prop_assert_eq!(delta(a, m), 1);
            prop_assert_eq!(delta(m, b), 1);
        }
    }

    #[test]
    fn mod_neg_inverse_inverts(r in proper_slope(200)) {
        let pb = mod_neg_inverse(r.p, r.q).unwrap();
        prop_assert!(2 * pb.abs() <= r.q, "not the minimal representative");
        prop_assert_eq!((r.p * pb + 1).rem_euclid(r.q), 0);
    }

    #[test]
    fn normalization_is_idempotent(
        raw in prop::collection::vec(proper_slope(40).prop_map(|s| s.add_int(-2)), 3..=4),
        n in -6i64..=6,
    ) {
        let k = normalize_montesinos(&raw, n).unwrap();
        for t in &k.tangles {
            prop_assert!(0 < t.p && t.p < t.q, "tangle {} outside (0, 1)", t);
        }
        prop_assert!(k.n >= -1 || !k.mirrored);
        let again = normalize_montesinos(&k.tangles, k.n).unwrap();
        prop_assert_eq!(again.tangles, k.tangles);
        prop_assert_eq!(again.n, k.n);
        prop_assert!(!again.mirrored);
    }

    #[test]
    fn diagram_structural_invariants(t in proper_slope(50)) {
        let d = build_diagram(t).unwrap();
        for &(a, b) in &d.edges {
            prop_assert_eq!(delta(a, b), 1, "edge {}-{}", a, b);
        }
        prop_assert_eq!(d.triangles.len(), d.vertices.len() - 2);
        let (upper, lower) = boundary_paths(&d);
        prop_assert_eq!(upper.first().copied(), Some(Slope::INFINITY));
        prop_assert_eq!(lower.first().copied(), Some(Slope::INFINITY));
        prop_assert_eq!(upper.last().copied(), Some(t));
        prop_assert_eq!(lower.last().copied(), Some(t));
        // The two boundary chains split the remaining vertices into labels
        // above and below the target.
        for v in &upper[1..upper.len() - 1] {
            prop_assert!(v.p * t.q > t.p * v.q, "{} not above {}", v, t);
        }
        for v in &lower[1..lower.len() - 1] {
            prop_assert!(v.p * t.q < t.p * v.q, "{} not below {}", v, t);
        }
        // Every non-endpoint vertex is on exactly one chain.
        prop_assert_eq!(upper.len() + lower.len(), d.vertices.len() + 2);
    }

    #[test]
    fn boundary_corners_match_continued_fractions(t in proper_slope(30)) {
        let d = build_diagram(t).unwrap();
        let (upper, lower) = boundary_paths(&d);
        let pos = cont_frac(t, CfSign::Positive).unwrap();
        let neg = cont_frac(t, CfSign::Negative).unwrap();
        prop_assert_eq!(corners_of_vertex_path(&d, &lower).unwrap(), pos.cs);
        prop_assert_eq!(corners_of_vertex_path(&d, &upper).unwrap(), neg.cs);
    }

    #[test]
    fn half_path_reflection_symmetry(t in proper_slope(40)) {
        // Reflecting the diagram at one half exchanges the two pairs of
        // single-half-channel variants.
        let m = t.one_minus();
        for (v, w) in [(1u8, 3u8), (2, 4)] {
            prop_assert_eq!(
                build_half_path(t, v).is_some(),
                build_half_path(m, w).is_some(),
                "variant {} at {} vs variant {} at {}", v, t, w, m
            );
        }
    }

    #[test]
    fn extension_is_deterministic_and_unique(seed in 0usize..36) {
        let systems = all_circle_mark_systems();
        let x = &systems[seed % systems.len()];
        for chirality in [1, -1] {
            let cands = extension_candidates(x, chirality);
            let ext = extend_boundary_circle(x, chirality);
            match classify_boundary_circle(x) {
                CircleType::Unsupported => prop_assert!(ext.is_none()),
                _ => {
                    prop_assert_eq!(cands.len(), 1);
                    prop_assert_eq!(ext.as_ref(), cands.first());
                    // Idempotent: recomputing gives the identical extension.
                    prop_assert_eq!(extend_boundary_circle(x, chirality), ext);
                }
            }
        }
    }
}
