//! Exterior-region analysis of path surfaces and assembly of knot and
//! tangle branched surfaces with laminar / genuine / persistent verdicts.
//!
//! Region topology is computed symbolically from the path structure: the
//! exterior of a path surface decomposes into level regions, one per path
//! vertex, and the interior ones are solid tori whose cusp winding equals
//! the corner magnitude at that vertex. No 3-manifold algorithms run here.

use crate::complex;
use crate::farey::{build_diagram, FareyDiagram, FareyError};
use crate::paths::{
    corners_of, starting_slope, validate_allowable, validate_minimal,
    validate_semi_allowable, Context, ElementKind, GammaPath, PathVerdict, PathsError,
};
use crate::rational::{MontesinosKnot, Slope};
use serde::Serialize;
use serde_json::json;
use std::sync::OnceLock;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssemblyError {
    #[error(transparent)]
    Paths(#[from] PathsError),
    #[error(transparent)]
    Farey(#[from] FareyError),
    #[error("path for {0} fails validation: {1}")]
    Invalid(Slope, String),
    #[error("orientation incompatibility: {0}")]
    Orientation(String),
    #[error("assembly shape error: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegionTopology {
    Ball,
    SolidTorus,
    BandComplement,
    /// Outer collar of a tangle assembly; carries a single cusp of the
    /// recorded slope and no winding number.
    Collar,
}

/// One complementary region Y_i of a path surface or assembled surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CuspedRegion {
    pub index: usize,
    pub topology: RegionTopology,
    pub cusp_winding: Option<u32>,
    pub half_twists: Option<i64>,
    pub cusp_slope: Option<Slope>,
}

impl CuspedRegion {
    fn ball(index: usize) -> CuspedRegion {
        CuspedRegion {
            index,
            topology: RegionTopology::Ball,
            cusp_winding: None,
            half_twists: None,
            cusp_slope: None,
        }
    }

    fn solid_torus(index: usize, winding: u32) -> CuspedRegion {
        CuspedRegion {
            index,
            topology: RegionTopology::SolidTorus,
            cusp_winding: Some(winding),
            half_twists: None,
            cusp_slope: None,
        }
    }

    fn collar(index: usize, slope: Option<Slope>) -> CuspedRegion {
        CuspedRegion {
            index,
            topology: RegionTopology::Collar,
            cusp_winding: None,
            half_twists: None,
            cusp_slope: slope,
        }
    }

    fn band(index: usize, half_twists: i64) -> CuspedRegion {
        CuspedRegion {
            index,
            topology: RegionTopology::BandComplement,
            cusp_winding: None,
            half_twists: Some(half_twists),
            cusp_slope: None,
        }
    }
}

/// Pick the validator matching the path's shape: full-channel paths,
/// single-half paths, the double-half shape, or pure boundary edge paths
/// (which only need corner minimality).
pub fn validate_auto(gamma: &GammaPath, d: &FareyDiagram) -> PathVerdict {
    match (gamma.channel_count(), gamma.half_count()) {
        (_, 0) if gamma.channel_count() > 0 => validate_allowable(gamma, d),
        (0, 1) => validate_semi_allowable(gamma, d),
        (0, 2) => validate_minimal(gamma, d),
        (0, 0) => validate_allowable(gamma, d),
        _ => PathVerdict {
            ok: false,
            violations: vec![],
        },
    }
}

/// Decompose the exterior of a path surface into level regions: the top
/// region (a ball in knot context, the slope-carrying collar in tangle
/// context), one solid torus per interior vertex with cusp winding equal
/// to the corner magnitude there, and a bottom ball.
pub fn exterior_components(
    gamma: &GammaPath,
    context: Context,
) -> Result<Vec<CuspedRegion>, AssemblyError> {
    let d = build_diagram(gamma.target)?;
    let verdict = validate_auto(gamma, &d);
    if !verdict.ok {
        return Err(AssemblyError::Invalid(
            gamma.target,
            format!("{:?}", verdict.violations),
        ));
    }
    let corners = corners_of(gamma, &d)?;
    let mut regions = vec![match context {
        Context::Knot => CuspedRegion::ball(0),
        Context::Tangle => CuspedRegion::collar(0, starting_slope(gamma)),
    }];
    for (i, c) in corners.iter().enumerate() {
        regions.push(CuspedRegion::solid_torus(i + 1, c.unsigned_abs() as u32));
    }
    regions.push(CuspedRegion::ball(corners.len() + 1));
    Ok(regions)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EssentialVerdict {
    pub essential: bool,
    /// Band complements with 0 or ±1 half twists are never certified
    /// either way; they fail the verdict but carry this flag.
    pub uncertified: bool,
    pub failures: Vec<String>,
}

/// A region list is essential iff every solid torus has cusp winding at
/// least 2 (winding 1 yields a monogon) and every band complement has at
/// least 2 half twists in magnitude.
pub fn essential_verdict(regions: &[CuspedRegion]) -> EssentialVerdict {
    let mut failures = vec![];
    let mut uncertified = false;
    for r in regions {
        match r.topology {
            RegionTopology::SolidTorus => {
                let w = r.cusp_winding.unwrap_or(0);
                if w < 2 {
                    failures.push(format!("region {} has cusp winding {w}", r.index));
                }
            }
            RegionTopology::BandComplement => {
                let h = r.half_twists.unwrap_or(0);
                if h.abs() < 2 {
                    failures.push(format!("region {} has {h} half twists", r.index));
                    uncertified = true;
                }
            }
            _ => {}
        }
    }
    EssentialVerdict {
        essential: failures.is_empty(),
        uncertified,
        failures,
    }
}

/// The bundled model pieces all pass the pre-laminarity check; assembled
/// surfaces are unions of these pieces, so the check runs once and is
/// cached.
fn pieces_prelaminar() -> bool {
    static CACHE: OnceLock<bool> = OnceLock::new();
    *CACHE.get_or_init(|| {
        [
            complex::ht_piece(),
            complex::channel_piece_a(),
            complex::channel_piece_b(),
            complex::half_channel_piece(),
            complex::trivial_cap(),
        ]
        .iter()
        .all(|tc| complex::is_prelaminar(tc).map(|r| r.ok).unwrap_or(false))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Assembly {
    pub regions: Vec<CuspedRegion>,
    pub meridional_cusps: u32,
    pub band_half_twists: Option<i64>,
    pub degeneracy_slope: Option<Slope>,
    pub laminar: bool,
    pub genuine: bool,
    pub persistent: bool,
    pub uncertified: bool,
    pub certificates: Vec<serde_json::Value>,
}

impl Assembly {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "laminar": self.laminar,
            "genuine": self.genuine,
            "persistent": self.persistent,
            "meridional_cusps": self.meridional_cusps,
            "degeneracy_slope": self.degeneracy_slope,
            "band_half_twists": self.band_half_twists,
            "uncertified": self.uncertified,
            "regions": self.regions.iter().map(|r| json!({
                "index": r.index,
                "topology": r.topology,
                "winding": r.cusp_winding,
                "half_twists": r.half_twists,
                "cusp_slope": r.cusp_slope,
            })).collect::<Vec<_>>(),
            "certificates": self.certificates,
        })
    }
}

/// The integer value (0 or 1) of a path's starting slope, if it is one.
fn start_as_int(gamma: &GammaPath) -> Option<i64> {
    let s = starting_slope(gamma)?;
    if s.q == 1 && (s.p == 0 || s.p == 1) {
        Some(s.p)
    } else {
        None
    }
}

fn is_boundary_path(gamma: &GammaPath) -> bool {
    gamma.channel_count() == 0 && gamma.half_count() == 0
}

/// Direction content of a path: (provides upward, provides downward),
/// judged from its half-channel subtypes.
fn directions(gamma: &GammaPath) -> (bool, bool) {
    use crate::paths::HalfSubtype::*;
    let mut up = false;
    let mut down = false;
    for s in gamma.half_subtypes() {
        if matches!(s, B1 | A2 | A3 | A2Rot) {
            up = true;
        } else {
            down = true;
        }
    }
    (up, down)
}

/// Orientation-compatibility check for the three knot paths: band twists
/// come out as n + Σ starts, and the sanctioned patterns are starts
/// (1, 0, 1) with one upward and one downward single-half path plus a
/// boundary path (n ≥ 0), or starts (1, 1, 1) with both directions
/// represented (n ≥ −1).
fn sanctioned_pattern(n: i64, paths: &[GammaPath]) -> Result<i64, AssemblyError> {
    let mut starts = vec![];
    for g in paths {
        starts.push(start_as_int(g).ok_or_else(|| {
            AssemblyError::Orientation(format!(
                "path for {} does not start toward an integer slope 0 or 1",
                g.target
            ))
        })?);
    }
    let sum: i64 = starts.iter().sum();
    let ups = paths.iter().filter(|g| directions(g).0).count();
    let downs = paths.iter().filter(|g| directions(g).1).count();
    let boundary = paths.iter().filter(|g| is_boundary_path(g)).count();
    match (n, sum) {
        (n, 2) if n >= 0 => {
            if ups >= 1 && downs >= 1 && boundary == 1 {
                Ok(n + sum)
            } else {
                Err(AssemblyError::Orientation(format!(
                    "starts {starts:?} need one upward, one downward and one boundary path"
                )))
            }
        }
        (n, 3) if n >= -1 => {
            if ups >= 1 && downs >= 1 {
                Ok(n + sum)
            } else {
                Err(AssemblyError::Orientation(format!(
                    "starts {starts:?} need both directions represented"
                )))
            }
        }
        _ => Err(AssemblyError::Orientation(format!(
            "band twist count n = {n} with starts {starts:?} matches no sanctioned pattern"
        ))),
    }
}

/// Assemble three validated paths into the branched surface of a length-3
/// Montesinos knot: inner regions from each path plus the outer band
/// complement.
pub fn assemble_montesinos(
    k: &MontesinosKnot,
    paths: &[GammaPath],
) -> Result<Assembly, AssemblyError> {
    if k.tangles.len() != 3 || paths.len() != 3 {
        return Err(AssemblyError::Shape("need exactly three tangles and paths".into()));
    }
    for (g, r) in paths.iter().zip(&k.tangles) {
        if g.target != *r {
            return Err(AssemblyError::Shape(format!(
                "path target {} does not match tangle {r}",
                g.target
            )));
        }
        if g.context != Context::Knot {
            return Err(AssemblyError::Shape("knot assembly needs knot-context paths".into()));
        }
    }
    let band = sanctioned_pattern(k.n, paths)?;
    let mut regions = vec![];
    let mut certificates = vec![];
    let mut cusps = 0;
    for g in paths {
        let rs = exterior_components(g, Context::Knot)?;
        let base = regions.len();
        regions.extend(rs.into_iter().map(|mut r| {
            r.index += base;
            r
        }));
        cusps += g.meridional_cusps();
        let d = build_diagram(g.target)?;
        certificates.push(g.to_json(&corners_of(g, &d)?));
    }
    let outer = CuspedRegion::band(regions.len(), band);
    regions.push(outer);
    let ev = essential_verdict(&regions);
    let laminar = ev.essential && pieces_prelaminar();
    let persistent = laminar && cusps >= 2;
    let genuine = regions
        .iter()
        .any(|r| r.cusp_winding.map(|w| w >= 3).unwrap_or(false))
        || band.abs() >= 3;
    Ok(Assembly {
        regions,
        meridional_cusps: cusps,
        band_half_twists: Some(band),
        degeneracy_slope: None,
        laminar,
        genuine,
        persistent,
        uncertified: ev.uncertified,
        certificates,
    })
}

/// Glue two tangle path surfaces along their boundary train tracks. Both
/// paths must start with a full type B channel; the seam contributes a
/// single cusp of slope 1/2 − 1/2 = 0, the degeneracy slope.
pub fn assemble_tangle(g1: &GammaPath, g2: &GammaPath) -> Result<Assembly, AssemblyError> {
    for g in [g1, g2] {
        if g.context != Context::Tangle {
            return Err(AssemblyError::Shape("tangle assembly needs tangle-context paths".into()));
        }
        match g.elements.first().map(|e| e.kind) {
            Some(ElementKind::ChannelB) => {}
            other => {
                return Err(AssemblyError::Shape(format!(
                    "tangle path for {} must start with a type B channel, found {other:?}",
                    g.target
                )))
            }
        }
    }
    let mut regions = vec![CuspedRegion::collar(0, Some(Slope::new(0, 1)))];
    let mut certificates = vec![];
    let mut cusps = 0;
    for g in [g1, g2] {
        let rs = exterior_components(g, Context::Tangle)?;
        let base = regions.len();
        // The per-path collar is absorbed into the joint outer collar.
        regions.extend(
            rs.into_iter()
                .filter(|r| r.topology != RegionTopology::Collar)
                .map(|mut r| {
                    r.index += base;
                    r
                }),
        );
        cusps += g.meridional_cusps();
        let d = build_diagram(g.target)?;
        certificates.push(g.to_json(&corners_of(g, &d)?));
    }
    let ev = essential_verdict(&regions);
    let laminar = ev.essential && pieces_prelaminar();
    let persistent = laminar && cusps >= 2;
    let genuine = regions
        .iter()
        .any(|r| r.cusp_winding.map(|w| w >= 3).unwrap_or(false));
    Ok(Assembly {
        regions,
        meridional_cusps: cusps,
        band_half_twists: None,
        degeneracy_slope: Some(Slope::new(0, 1)),
        laminar,
        genuine,
        persistent,
        uncertified: ev.uncertified,
        certificates,
    })
}

/// The fixed two-tube tangle control surface for 1/3: its single interior
/// region has cusp winding 2, and reversing every boundary orientation
/// drops the winding to 1, producing a monogon.
pub fn reversed_orientation_control(reversed: bool) -> Vec<CuspedRegion> {
    let winding = if reversed { 1 } else { 2 };
    vec![
        CuspedRegion::collar(0, Some(Slope::new(0, 1))),
        CuspedRegion::solid_torus(1, winding),
        CuspedRegion::ball(2),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::{build_channel_path, build_half_path, ChannelType};
    use crate::rational::normalize_montesinos;

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q)
    }

    /// Pure boundary path along the upper chain (starting slope 1).
    fn boundary_path_toward_one(target: Slope) -> GammaPath {
        let d = build_diagram(target).unwrap();
        let (upper, _) = crate::farey::boundary_paths(&d);
        let els = upper
            .windows(2)
            .map(|w| crate::paths::PathElement::edge(w[0], w[1]))
            .collect();
        GammaPath::new(els, target, Context::Knot)
    }

    #[test]
    fn exterior_regions_match_corners() {
        // Path with corners (4, 3) toward 3/11.
        let g = build_half_path(s(3, 11), 1).unwrap();
        let d = build_diagram(s(3, 11)).unwrap();
        let corners = corners_of(&g, &d).unwrap();
        let regions = exterior_components(&g, Context::Knot).unwrap();
        assert_eq!(regions.len(), g.vertices().len());
        assert_eq!(regions.first().unwrap().topology, RegionTopology::Ball);
        assert_eq!(regions.last().unwrap().topology, RegionTopology::Ball);
        let windings: Vec<u32> = regions.iter().filter_map(|r| r.cusp_winding).collect();
        let expected: Vec<u32> = corners.iter().map(|c| c.unsigned_abs() as u32).collect();
        assert_eq!(windings, expected);
        assert!(windings.iter().all(|w| *w >= 2));
    }

    #[test]
    fn essential_needs_winding_two() {
        let good = vec![
            CuspedRegion::ball(0),
            CuspedRegion::solid_torus(1, 2),
            CuspedRegion::band(2, 2),
        ];
        assert!(essential_verdict(&good).essential);
        let monogon = vec![CuspedRegion::solid_torus(0, 1)];
        assert!(!essential_verdict(&monogon).essential);
        let thin_band = vec![CuspedRegion::band(0, 1)];
        let v = essential_verdict(&thin_band);
        assert!(!v.essential);
        assert!(v.uncertified);
    }

    #[test]
    fn montesinos_n0_pattern() {
        let k = normalize_montesinos(&[s(2, 5), s(1, 3), s(1, 7)], 0).unwrap();
        let paths = vec![
            build_half_path(s(2, 5), 1).unwrap(),
            build_half_path(s(1, 3), 3).unwrap(),
            boundary_path_toward_one(s(1, 7)),
        ];
        let a = assemble_montesinos(&k, &paths).unwrap();
        assert_eq!(a.band_half_twists, Some(2));
        assert!(a.laminar);
        assert!(a.persistent);
        assert_eq!(a.meridional_cusps, 2);
    }

    #[test]
    fn montesinos_n1_genuine_band() {
        let k = normalize_montesinos(&[s(2, 5), s(1, 3), s(1, 7)], 1).unwrap();
        let paths = vec![
            build_half_path(s(2, 5), 1).unwrap(),
            build_half_path(s(1, 3), 3).unwrap(),
            boundary_path_toward_one(s(1, 7)),
        ];
        let a = assemble_montesinos(&k, &paths).unwrap();
        assert_eq!(a.band_half_twists, Some(3));
        assert!(a.persistent);
        assert!(a.genuine);
    }

    #[test]
    fn tangle_assembly_degeneracy_slope_zero() {
        let g1 = build_channel_path(s(1, 3), ChannelType::B).unwrap();
        let g2 = build_channel_path(s(1, 3), ChannelType::B).unwrap();
        let a = assemble_tangle(&g1, &g2).unwrap();
        assert_eq!(a.degeneracy_slope, Some(s(0, 1)));
        assert!(a.persistent);
        assert!(a.meridional_cusps >= 4);
    }

    #[test]
    fn reversed_control_fails() {
        assert!(essential_verdict(&reversed_orientation_control(false)).essential);
        let v = essential_verdict(&reversed_orientation_control(true));
        assert!(!v.essential);
        assert!(v.failures.iter().any(|f| f.contains("winding 1")));
    }
}
