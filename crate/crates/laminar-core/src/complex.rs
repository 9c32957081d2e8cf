//! Combinatorial branched surfaces: local sink-direction configurations at
//! singular points, classification of the singular circles and interior
//! double points of tangle complexes, the unique extension of sink marks
//! over the singular circles, and the pre-laminarity check.
//!
//! Local geometry is computed with integer 3-vectors: a sink mark that is
//! an orientation arrow sends its arc's sheet into the sector on the side
//! of `direction × normal`, where the normal points from the carrying
//! surface toward the attached (crossing) sheet; a diamond sends it into
//! the crossing sheet itself.

use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeMap;
use std::fmt;

// ---------------------------------------------------------------------------
// Local singular configurations (four arcs, six sectors)
// ---------------------------------------------------------------------------

/// Unordered pair of arc indices in 0..4 naming one of the six local
/// sectors around a singular point.
pub type DiskPair = (usize, usize);

fn pair(a: usize, b: usize) -> DiskPair {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Sink-direction assignment at a singular point where two arcs cross:
/// four arc germs, six sectors A_(i,j), and for each germ the sector its
/// sheet is smooth into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct LocalSingularConfig {
    pub sink_dir: [DiskPair; 4],
}

impl LocalSingularConfig {
    pub fn well_formed(&self) -> bool {
        self.sink_dir
            .iter()
            .enumerate()
            .all(|(i, &(a, b))| a < b && b < 4 && (a == i || b == i))
    }
}

/// The reference assignment: arcs 0 and 1 sink into A_(0,1), arc 2 into
/// A_(1,2), arc 3 into A_(0,3).
pub const MODEL_CONFIG: LocalSingularConfig = LocalSingularConfig {
    sink_dir: [(0, 1), (0, 1), (1, 2), (0, 3)],
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskRole {
    Sink,
    Passing,
    Source,
}

/// Role of each of the six sectors: an incident germ is a sink edge when
/// it points into the sector, a source edge otherwise.
pub fn disk_roles(cfg: &LocalSingularConfig) -> BTreeMap<DiskPair, DiskRole> {
    let mut out = BTreeMap::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            let d = (i, j);
            let sinks = [i, j]
                .iter()
                .filter(|&&e| cfg.sink_dir[e] == d)
                .count();
            let role = match sinks {
                2 => DiskRole::Sink,
                1 => DiskRole::Passing,
                _ => DiskRole::Source,
            };
            out.insert(d, role);
        }
    }
    out
}

fn all_permutations() -> Vec<[usize; 4]> {
    let mut out = vec![];
    let mut idx = [0usize, 1, 2, 3];
    // Heap's algorithm, iterative.
    let mut c = [0usize; 4];
    out.push(idx);
    let mut i = 0;
    while i < 4 {
        if c[i] < i {
            if i % 2 == 0 {
                idx.swap(0, i);
            } else {
                idx.swap(c[i], i);
            }
            out.push(idx);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// True iff some relabeling of the four arcs carries the configuration to
/// the reference assignment.
pub fn check_local_config(cfg: &LocalSingularConfig) -> bool {
    if !cfg.well_formed() {
        return false;
    }
    all_permutations().iter().any(|perm| {
        let mut relabeled = [(0, 0); 4];
        for e in 0..4 {
            let (a, b) = cfg.sink_dir[e];
            relabeled[perm[e]] = pair(perm[a], perm[b]);
        }
        LocalSingularConfig {
            sink_dir: relabeled,
        } == MODEL_CONFIG
    })
}

/// Filter all 3^4 = 81 sink-direction assignments by the structural
/// criteria: exactly one sink sector, exactly two passing sectors whose
/// index pairs are disjoint and whose source edges point into one common
/// sector, and three source sectors. Deliberately a different code path
/// from [`check_local_config`]; tests assert the two agree.
pub fn enumerate_valid_configs() -> Vec<LocalSingularConfig> {
    let mut out = vec![];
    let choices: [[DiskPair; 3]; 4] = [
        [(0, 1), (0, 2), (0, 3)],
        [(0, 1), (1, 2), (1, 3)],
        [(0, 2), (1, 2), (2, 3)],
        [(0, 3), (1, 3), (2, 3)],
    ];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let cfg = LocalSingularConfig {
                        sink_dir: [choices[0][a], choices[1][b], choices[2][c], choices[3][d]],
                    };
                    let roles = disk_roles(&cfg);
                    let sinks: Vec<DiskPair> = roles
                        .iter()
                        .filter(|(_, r)| **r == DiskRole::Sink)
                        .map(|(d, _)| *d)
                        .collect();
                    let passing: Vec<DiskPair> = roles
                        .iter()
                        .filter(|(_, r)| **r == DiskRole::Passing)
                        .map(|(d, _)| *d)
                        .collect();
                    if sinks.len() != 1 || passing.len() != 2 {
                        continue;
                    }
                    let (p, q) = (passing[0], passing[1]);
                    if p.0 == q.0 || p.0 == q.1 || p.1 == q.0 || p.1 == q.1 {
                        continue;
                    }
                    // The source edge of a passing sector is the incident
                    // germ pointing elsewhere; both must point into the
                    // same sector.
                    let source_target = |d: DiskPair| {
                        [d.0, d.1]
                            .into_iter()
                            .find(|&e| cfg.sink_dir[e] != d)
                            .map(|e| cfg.sink_dir[e])
                    };
                    if source_target(p) != source_target(q) {
                        continue;
                    }
                    out.push(cfg);
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Sink marks and the integer-vector germ engine
// ---------------------------------------------------------------------------

/// A sink mark on one arc or arc segment: a diamond, or an orientation
/// relative to the segment's reference direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mark {
    Diamond,
    Plus,
    Minus,
}

impl Mark {
    pub fn sign(self) -> Option<i32> {
        match self {
            Mark::Diamond => None,
            Mark::Plus => Some(1),
            Mark::Minus => Some(-1),
        }
    }

    pub fn flipped(self) -> Mark {
        match self {
            Mark::Diamond => Mark::Diamond,
            Mark::Plus => Mark::Minus,
            Mark::Minus => Mark::Plus,
        }
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mark::Diamond => "diamond",
            Mark::Plus => "+",
            Mark::Minus => "-",
        })
    }
}

impl Serialize for Mark {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Mark {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Mark, D::Error> {
        let t = String::deserialize(d)?;
        match t.as_str() {
            "diamond" => Ok(Mark::Diamond),
            "+" => Ok(Mark::Plus),
            "-" => Ok(Mark::Minus),
            other => Err(serde::de::Error::custom(format!(
                "bad mark {other:?}: expected \"diamond\", \"+\" or \"-\""
            ))),
        }
    }
}

type V3 = [i32; 3];

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn scale(s: i32, a: V3) -> V3 {
    [s * a[0], s * a[1], s * a[2]]
}

const X: V3 = [1, 0, 0];
const Y: V3 = [0, 1, 0];
const Z: V3 = [0, 0, 1];

// ---------------------------------------------------------------------------
// Boundary circles
// ---------------------------------------------------------------------------

/// Marks seen by one singular circle of P from one of the two disks
/// crossing it: the mark on the adjacent segment of the disk's P-arc
/// (arrival reference: "+" points at the crossing), the mark on its Q-arc
/// (departure reference), and whether that Q-arc leaves the crossing along
/// the tube's positive orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingMarks {
    pub alpha: Mark,
    pub beta: Mark,
    pub beta_along_tube: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryCircleMarks {
    pub d1: CrossingMarks,
    pub d2: CrossingMarks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CircleType {
    I,
    II,
    III,
    Unsupported,
}

fn consistent(c: &CrossingMarks) -> bool {
    c.alpha != Mark::Diamond && c.alpha == c.beta
}

fn beta_abs_dir(c: &CrossingMarks) -> Option<i32> {
    Some(c.beta.sign()? * if c.beta_along_tube { 1 } else { -1 })
}

/// Direct classification of the marks around a singular circle. Diamonds
/// on Q-arcs make the circle unsupported outright.
pub fn classify_boundary_circle(x: &BoundaryCircleMarks) -> CircleType {
    if x.d1.beta == Mark::Diamond || x.d2.beta == Mark::Diamond {
        return CircleType::Unsupported;
    }
    let diamonds = [x.d1.alpha, x.d2.alpha]
        .iter()
        .filter(|m| **m == Mark::Diamond)
        .count();
    match diamonds {
        2 => {
            if beta_abs_dir(&x.d1) == beta_abs_dir(&x.d2) {
                CircleType::I
            } else {
                CircleType::Unsupported
            }
        }
        0 => match (consistent(&x.d1), consistent(&x.d2)) {
            (true, true) => CircleType::II,
            (true, false) | (false, true) => CircleType::III,
            (false, false) => CircleType::Unsupported,
        },
        _ => CircleType::Unsupported,
    }
}

/// The unique sink marks on the two circle segments when the system
/// extends. `seg_pos` is the segment entered by traveling in the tube's
/// meridional positive direction from the first crossing; "+" means that
/// same direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleExtension {
    pub seg_pos: Mark,
    pub seg_neg: Mark,
}

/// Local config at one circle crossing. Germ indices: 0 = circle germ in
/// the meridional + direction, 1 = opposite circle germ, 2 = the P-arc
/// germ, 3 = the Q-arc germ.
fn crossing_config(m: &CrossingMarks, seg0: Mark, seg1: Mark, chirality: i32) -> Option<LocalSingularConfig> {
    // Local frame: meridian along x, tube longitude along y, P above the
    // tube plane along z. The Q-arc germ leaves along ±y per the along
    // flag; the disk is attached on that same side of P.
    let beta_germ_y = if m.beta_along_tube { 1 } else { -1 };
    let beta_germ = scale(beta_germ_y, Y);
    let n_p = scale(chirality * beta_germ_y, Y); // normal of P toward the disk
    let n_q = scale(chirality, Z); // normal of Q toward P

    // Sector on a given y-side incident to a circle germ g (0 or 1):
    // the quadrant next to the Q-arc, or the half-plane away from it.
    let q_sector = |g: usize, y_side: i32| -> DiskPair {
        if y_side == beta_germ_y {
            pair(g, 3)
        } else {
            (0, 1)
        }
    };

    let mut sink = [(0, 0); 4];
    // Circle germs carry the candidate segment marks.
    for (g, seg) in [(0usize, seg0), (1usize, seg1)] {
        sink[g] = match seg {
            Mark::Diamond => pair(g, 2),
            _ => {
                let d = scale(seg.sign().unwrap(), X);
                let side = cross(d, n_q);
                q_sector(g, side[1].signum())
            }
        };
    }
    // P-arc germ: +z; its "+" reference points at the crossing (-z).
    sink[2] = match m.alpha {
        Mark::Diamond => (2, 3),
        _ => {
            let d = scale(-m.alpha.sign().unwrap(), Z);
            let side = cross(d, n_p);
            if side[0] > 0 {
                (0, 2)
            } else {
                (1, 2)
            }
        }
    };
    // Q-arc germ: along beta_germ; its "+" reference points away from the
    // crossing along the germ.
    sink[3] = {
        let d = scale(m.beta.sign()?, beta_germ);
        let side = cross(d, n_q);
        if side[0] > 0 {
            (0, 3)
        } else {
            (1, 3)
        }
    };
    Some(LocalSingularConfig { sink_dir: sink })
}

/// Ground-truth extension: search the nine segment-mark assignments for
/// the ones making both crossings valid local configurations. Lemma-level
/// uniqueness is asserted by tests, not assumed here.
pub fn extension_candidates(x: &BoundaryCircleMarks, chirality: i32) -> Vec<CircleExtension> {
    let marks = [Mark::Diamond, Mark::Plus, Mark::Minus];
    let mut out = vec![];
    for &sp in &marks {
        for &sn in &marks {
            // At the first crossing the + germ enters seg_pos; at the
            // second, the + germ enters seg_neg.
            let ok1 = crossing_config(&x.d1, sp, sn, chirality)
                .is_some_and(|c| check_local_config(&c));
            let ok2 = crossing_config(&x.d2, sn, sp, chirality)
                .is_some_and(|c| check_local_config(&c));
            if ok1 && ok2 {
                out.push(CircleExtension {
                    seg_pos: sp,
                    seg_neg: sn,
                });
            }
        }
    }
    out
}

pub fn extend_boundary_circle(x: &BoundaryCircleMarks, chirality: i32) -> Option<CircleExtension> {
    let mut cands = extension_candidates(x, chirality);
    if cands.len() == 1 {
        cands.pop()
    } else {
        None
    }
}

/// All 36 diamond-free-on-Q mark systems, for the census.
pub fn all_circle_mark_systems() -> Vec<BoundaryCircleMarks> {
    let alphas = [Mark::Diamond, Mark::Plus, Mark::Minus];
    let betas = [Mark::Plus, Mark::Minus];
    let mut out = vec![];
    for &a1 in &alphas {
        for &b1 in &betas {
            for &a2 in &alphas {
                for &b2 in &betas {
                    out.push(BoundaryCircleMarks {
                        d1: CrossingMarks {
                            alpha: a1,
                            beta: b1,
                            beta_along_tube: true,
                        },
                        d2: CrossingMarks {
                            alpha: a2,
                            beta: b2,
                            beta_along_tube: false,
                        },
                    });
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Interior double points of P
// ---------------------------------------------------------------------------

/// Marks at an interior double point: the P-arc of the disk attached above
/// P crosses the P-arc of the disk attached below. Each arc contributes
/// two segments; segment marks use the outward (away from the point)
/// reference direction, so a consistently oriented arc has opposite
/// segment marks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteriorPointMarks {
    pub over: [Mark; 2],
    pub under: [Mark; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InteriorType {
    IV,
    V,
    Invalid,
}

fn interior_config(x: &InteriorPointMarks, chirality: i32) -> LocalSingularConfig {
    // Over arc along x (germs 0: +x, 2: -x), under arc along y
    // (germs 1: +y, 3: -y). Sectors: four quadrants plus the two disks
    // (0,2) over and (1,3) under.
    let n_over = scale(chirality, Z);
    let n_under = scale(-chirality, Z);
    let germ = |g: usize| -> V3 {
        match g {
            0 => X,
            1 => Y,
            2 => scale(-1, X),
            _ => scale(-1, Y),
        }
    };
    let quadrant = |xs: i32, ys: i32| -> DiskPair {
        match (xs > 0, ys > 0) {
            (true, true) => (0, 1),
            (false, true) => (1, 2),
            (false, false) => (2, 3),
            (true, false) => (0, 3),
        }
    };
    let mut sink = [(0, 0); 4];
    for (g, mark, n, own) in [
        (0usize, x.over[0], n_over, (0usize, 2usize)),
        (2, x.over[1], n_over, (0, 2)),
        (1, x.under[0], n_under, (1, 3)),
        (3, x.under[1], n_under, (1, 3)),
    ] {
        sink[g] = match mark {
            Mark::Diamond => own,
            _ => {
                let d = scale(mark.sign().unwrap(), germ(g));
                let side = cross(d, n);
                // The quadrant incident to this germ on the given side.
                let gv = germ(g);
                let q = [gv[0] + side[0], gv[1] + side[1]];
                quadrant(q[0], q[1])
            }
        };
    }
    LocalSingularConfig { sink_dir: sink }
}

pub fn interior_point_valid(x: &InteriorPointMarks, chirality: i32) -> bool {
    check_local_config(&interior_config(x, chirality))
}

/// Classify an interior double point. Type IV: one arc is a diamond edge
/// and the other reverses orientation across it; type V: no diamonds and
/// both arcs consistently oriented. Valid sink patterns outside the two
/// pictured classes are not produced by tangle complexes and are rejected.
pub fn classify_interior_point(x: &InteriorPointMarks, chirality: i32) -> InteriorType {
    if !interior_point_valid(x, chirality) {
        return InteriorType::Invalid;
    }
    let all_diamond = |a: [Mark; 2]| a[0] == Mark::Diamond && a[1] == Mark::Diamond;
    let no_diamond = |a: [Mark; 2]| a[0] != Mark::Diamond && a[1] != Mark::Diamond;
    // Outward segment references: a consistent arc has opposite marks, a
    // reversing arc equal ones.
    let reversing = |a: [Mark; 2]| no_diamond(a) && a[0] == a[1];
    let consistent_arc = |a: [Mark; 2]| no_diamond(a) && a[0] != a[1];
    if (all_diamond(x.over) && reversing(x.under)) || (all_diamond(x.under) && reversing(x.over)) {
        InteriorType::IV
    } else if consistent_arc(x.over) && consistent_arc(x.under) {
        InteriorType::V
    } else {
        InteriorType::Invalid
    }
}

pub fn all_interior_mark_systems() -> Vec<InteriorPointMarks> {
    let ms = [Mark::Diamond, Mark::Plus, Mark::Minus];
    let mut out = vec![];
    for &a in &ms {
        for &b in &ms {
            for &c in &ms {
                for &d in &ms {
                    out.push(InteriorPointMarks {
                        over: [a, b],
                        under: [c, d],
                    });
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Tangle complexes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("schema violation at {0}: {1}")]
    Schema(String, String),
    #[error("diamond mark on a Q-arc of disk {0}")]
    QDiamond(String),
    #[error("circle {0} has {1} disk crossings, expected 2")]
    CrossingCount(String, usize),
    #[error("circle {0} does not extend: mark system is unsupported")]
    Unsupported(String),
    #[error("interior point {0} is not of type IV or V")]
    BadInteriorPoint(String),
    #[error("meridian condition fails at circle {0}: both disk arcs leave on the same side")]
    Meridian(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tube {
    pub id: String,
    #[serde(default = "one")]
    pub orientation: i32,
}

fn one() -> i32 {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attach {
    Tube,
    Interior,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryCircle {
    pub id: String,
    pub attach: Attach,
    pub tube_id: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sphere {
    pub id: String,
    pub boundary_circles: Vec<BoundaryCircle>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OnSurface {
    P,
    Q,
    /// Outer boundary of the ambient region; unmarked and excluded from
    /// all censuses.
    B,
}

/// One arc of a disk boundary, in cyclic order. P-arcs may carry several
/// segment marks (orientation can reverse at interior double points);
/// marks are listed along the traversal direction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryArc {
    pub id: String,
    pub on: OnSurface,
    pub sphere_or_tube: String,
    #[serde(default)]
    pub marks: Vec<Mark>,
    /// Q-arcs: does the traversal direction agree with the tube's
    /// orientation?
    #[serde(default)]
    pub along_tube: Option<bool>,
    /// Q-arcs: the singular circle crossed at this arc's junction with its
    /// neighboring P-arc.
    #[serde(default)]
    pub circle: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Disk {
    pub id: String,
    pub boundary: Vec<BoundaryArc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InteriorPointSpec {
    pub id: String,
    pub sphere: String,
    pub over_disk: String,
    pub under_disk: String,
    pub over_marks: [Mark; 2],
    pub under_marks: [Mark; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchSide {
    Left,
    Right,
    Cross,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchEdge {
    pub edge: String,
    pub side: BranchSide,
}

/// A branch of P or Q, listed explicitly with its boundary edges and the
/// side of each edge the branch lies on. "Right" is by definition the
/// side an oriented "+" mark sinks into; "cross" marks the sheet a
/// diamond sinks into.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchSpec {
    pub id: String,
    pub surface: OnSurface,
    pub is_disk: bool,
    pub edges: Vec<BranchEdge>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangleComplex {
    #[serde(default = "one")]
    pub chirality: i32,
    pub tubes: Vec<Tube>,
    pub spheres: Vec<Sphere>,
    pub disks: Vec<Disk>,
    #[serde(default)]
    pub interior_points: Vec<InteriorPointSpec>,
    #[serde(default)]
    pub branches: Vec<BranchSpec>,
}

/// One disk junction at a singular circle, extracted from the disk
/// boundary cycle.
#[derive(Debug, Clone)]
struct Junction {
    /// Adjacent segment mark of the P-arc, arrival-referenced.
    alpha: Mark,
    /// Q-arc mark, departure-referenced.
    beta: Mark,
    beta_along: bool,
    /// Absolute tube direction of the Q-arc germ leaving the crossing.
    germ_dir: i32,
}

impl TangleComplex {
    fn circle(&self, id: &str) -> Option<&BoundaryCircle> {
        self.spheres
            .iter()
            .flat_map(|s| &s.boundary_circles)
            .find(|c| c.id == id)
    }


    /// Collect the disk junctions at each interior-attached circle.
    fn junctions(&self) -> Result<BTreeMap<String, Vec<Junction>>, ComplexError> {
        let mut map: BTreeMap<String, Vec<Junction>> = BTreeMap::new();
        for c in self.spheres.iter().flat_map(|s| &s.boundary_circles) {
            if c.attach == Attach::Interior {
                map.insert(c.id.clone(), vec![]);
            }
        }
        for d in &self.disks {
            let n = d.boundary.len();
            for i in 0..n {
                let a = &d.boundary[i];
                let b = &d.boundary[(i + 1) % n];
                let (p_arc, q_arc, p_before) = match (a.on, b.on) {
                    (OnSurface::P, OnSurface::Q) => (a, b, true),
                    (OnSurface::Q, OnSurface::P) => (b, a, false),
                    _ => continue,
                };
                let cid = match &q_arc.circle {
                    Some(c) => c.clone(),
                    None => {
                        // Unique circle joining this sphere and tube.
                        let hits: Vec<&BoundaryCircle> = self
                            .spheres
                            .iter()
                            .filter(|s| s.id == p_arc.sphere_or_tube)
                            .flat_map(|s| &s.boundary_circles)
                            .filter(|c| c.tube_id == q_arc.sphere_or_tube)
                            .collect();
                        match hits.as_slice() {
                            [c] => c.id.clone(),
                            _ => {
                                return Err(ComplexError::Schema(
                                    format!("disk {} arc {}", d.id, q_arc.id),
                                    "ambiguous or missing junction circle".into(),
                                ))
                            }
                        }
                    }
                };
                let circle = self.circle(&cid).ok_or_else(|| {
                    ComplexError::Schema(cid.clone(), "unknown circle".into())
                })?;
                if circle.attach != Attach::Interior {
                    continue;
                }
                if q_arc.marks.iter().any(|m| *m == Mark::Diamond) {
                    return Err(ComplexError::QDiamond(d.id.clone()));
                }
                let p_mark = if p_before {
                    *p_arc.marks.last().ok_or_else(|| {
                        ComplexError::Schema(p_arc.id.clone(), "P-arc without marks".into())
                    })?
                } else {
                    *p_arc.marks.first().ok_or_else(|| {
                        ComplexError::Schema(p_arc.id.clone(), "P-arc without marks".into())
                    })?
                };
                // Arrival reference for alpha: flip when the P-arc departs
                // the junction.
                let alpha = if p_before { p_mark } else { p_mark.flipped() };
                let q_mark = *q_arc.marks.first().ok_or_else(|| {
                    ComplexError::Schema(q_arc.id.clone(), "Q-arc without marks".into())
                })?;
                // Departure reference for beta: flip when the Q-arc
                // arrives at the junction.
                let q_departs = p_before;
                let beta = if q_departs { q_mark } else { q_mark.flipped() };
                let along = q_arc.along_tube.unwrap_or(true);
                let beta_along = if q_departs { along } else { !along };
                let germ_dir = if along == q_departs { 1 } else { -1 };
                map.entry(cid).or_default().push(Junction {
                    alpha,
                    beta,
                    beta_along,
                    germ_dir,
                });
            }
        }
        Ok(map)
    }
}

/// Fully analyzed complex: circle and interior point types plus the
/// extended sink marks on the circle segments.
#[derive(Debug, Clone, Serialize)]
pub struct ExtendedComplex {
    #[serde(skip)]
    pub tc: TangleComplex,
    pub circle_types: BTreeMap<String, CircleType>,
    pub interior_types: BTreeMap<String, InteriorType>,
    /// Marks of the circle segments, keyed "<circle>.s0" / "<circle>.s1".
    pub segment_marks: BTreeMap<String, Mark>,
}

/// Classify every singular circle and interior point and fill the unique
/// sink marks on the circle segments.
pub fn extend_marks(tc: &TangleComplex) -> Result<ExtendedComplex, ComplexError> {
    let mut circle_types = BTreeMap::new();
    let mut segment_marks = BTreeMap::new();
    for (cid, js) in tc.junctions()? {
        if js.len() != 2 {
            return Err(ComplexError::CrossingCount(cid, js.len()));
        }
        if js[0].germ_dir == js[1].germ_dir {
            return Err(ComplexError::Meridian(cid));
        }
        let marks = BoundaryCircleMarks {
            d1: CrossingMarks {
                alpha: js[0].alpha,
                beta: js[0].beta,
                beta_along_tube: js[0].beta_along,
            },
            d2: CrossingMarks {
                alpha: js[1].alpha,
                beta: js[1].beta,
                beta_along_tube: js[1].beta_along,
            },
        };
        let ty = classify_boundary_circle(&marks);
        let ext = extend_boundary_circle(&marks, tc.chirality);
        match (ty, ext) {
            (CircleType::Unsupported, _) | (_, None) => {
                return Err(ComplexError::Unsupported(cid))
            }
            (ty, Some(e)) => {
                circle_types.insert(cid.clone(), ty);
                segment_marks.insert(format!("{cid}.s0"), e.seg_pos);
                segment_marks.insert(format!("{cid}.s1"), e.seg_neg);
            }
        }
    }
    let mut interior_types = BTreeMap::new();
    for p in &tc.interior_points {
        let ty = classify_interior_point(
            &InteriorPointMarks {
                over: p.over_marks,
                under: p.under_marks,
            },
            tc.chirality,
        );
        if ty == InteriorType::Invalid {
            return Err(ComplexError::BadInteriorPoint(p.id.clone()));
        }
        interior_types.insert(p.id.clone(), ty);
    }
    Ok(ExtendedComplex {
        tc: tc.clone(),
        circle_types,
        interior_types,
        segment_marks,
    })
}

pub fn meridional_cusps(ext: &ExtendedComplex) -> u32 {
    ext.circle_types
        .values()
        .filter(|t| **t == CircleType::II)
        .count() as u32
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchClass {
    SinkDisk,
    SourceDisk,
    PassingDisk,
    NonDisk,
}

fn edge_mark(ext: &ExtendedComplex, edge: &str) -> Option<Mark> {
    if let Some(m) = ext.segment_marks.get(edge) {
        return Some(*m);
    }
    for d in &ext.tc.disks {
        for a in &d.boundary {
            if a.id == edge {
                return a.marks.first().copied();
            }
            // Segment ids "<arc>.k" index into multi-segment P-arcs.
            if let Some(rest) = edge.strip_prefix(&format!("{}.", a.id)) {
                if let Ok(k) = rest.parse::<usize>() {
                    return a.marks.get(k).copied();
                }
            }
        }
    }
    None
}

/// Sink/source census per branch. Disks are implicit branches; explicit
/// P/Q branches come from the complex's branch list.
pub fn classify_branches(ext: &ExtendedComplex) -> BTreeMap<String, BranchClass> {
    let mut out = BTreeMap::new();
    for d in &ext.tc.disks {
        let mut sink = 0;
        let mut source = 0;
        for a in &d.boundary {
            if a.on == OnSurface::B {
                continue;
            }
            for m in &a.marks {
                match m {
                    Mark::Diamond => sink += 1,
                    _ => source += 1,
                }
            }
        }
        out.insert(d.id.clone(), census_class(true, sink, source));
    }
    for b in &ext.tc.branches {
        let mut sink = 0;
        let mut source = 0;
        for e in &b.edges {
            let Some(m) = edge_mark(ext, &e.edge) else {
                continue;
            };
            let into_branch = match (m, e.side) {
                (Mark::Diamond, BranchSide::Cross) => true,
                (Mark::Plus, BranchSide::Right) => true,
                (Mark::Minus, BranchSide::Left) => true,
                _ => false,
            };
            if into_branch {
                sink += 1;
            } else {
                source += 1;
            }
        }
        out.insert(b.id.clone(), census_class(b.is_disk, sink, source));
    }
    out
}

fn census_class(is_disk: bool, sink: u32, source: u32) -> BranchClass {
    if !is_disk {
        BranchClass::NonDisk
    } else if sink > 0 && source == 0 {
        BranchClass::SinkDisk
    } else if source > 0 && sink == 0 {
        BranchClass::SourceDisk
    } else {
        BranchClass::PassingDisk
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PrelaminarReport {
    pub ok: bool,
    pub witnesses: Vec<String>,
    /// Atoroidality and absence of trivial bubbles hold by the structure
    /// of tangle complexes with the diamond-edge hypothesis; the verdict
    /// is hypothesis-derived, not algorithmically checked.
    pub notes: Vec<String>,
    pub meridional_cusps: u32,
    pub circle_types: BTreeMap<String, CircleType>,
    pub interior_types: BTreeMap<String, InteriorType>,
    pub branch_classes: BTreeMap<String, BranchClass>,
}

/// Extension + the diamond-edge hypothesis on P-branches + a direct
/// sink-disk scan.
pub fn is_prelaminar(tc: &TangleComplex) -> Result<PrelaminarReport, ComplexError> {
    let ext = extend_marks(tc)?;
    let mut witnesses = vec![];
    for b in &tc.branches {
        if b.surface == OnSurface::P {
            let has_diamond = b
                .edges
                .iter()
                .any(|e| edge_mark(&ext, &e.edge) == Some(Mark::Diamond));
            if !has_diamond {
                witnesses.push(format!("P-branch {} has no diamond boundary edge", b.id));
            }
        }
    }
    let classes = classify_branches(&ext);
    for (id, c) in &classes {
        if *c == BranchClass::SinkDisk {
            witnesses.push(format!("branch {id} is a sink disk"));
        }
    }
    Ok(PrelaminarReport {
        ok: witnesses.is_empty(),
        witnesses,
        notes: vec![
            "atoroidality and no-trivial-bubble are hypothesis-derived for tangle complexes"
                .into(),
        ],
        meridional_cusps: meridional_cusps(&ext),
        circle_types: ext.circle_types.clone(),
        interior_types: ext.interior_types.clone(),
        branch_classes: classes,
    })
}

/// Reverse every orientation mark, keeping diamonds; valid complexes stay
/// valid, with circle types unchanged.
pub fn reverse_marks(tc: &TangleComplex) -> TangleComplex {
    let mut out = tc.clone();
    for d in &mut out.disks {
        for a in &mut d.boundary {
            for m in &mut a.marks {
                *m = m.flipped();
            }
        }
    }
    for p in &mut out.interior_points {
        for m in p.over_marks.iter_mut().chain(p.under_marks.iter_mut()) {
            *m = m.flipped();
        }
    }
    out
}

pub fn report_json(r: &PrelaminarReport) -> serde_json::Value {
    json!(r)
}

// ---------------------------------------------------------------------------
// Model-piece library (reconstructed from prose-level descriptions)
// ---------------------------------------------------------------------------

fn arc(id: &str, on: OnSurface, host: &str, marks: &[Mark]) -> BoundaryArc {
    BoundaryArc {
        id: id.into(),
        on,
        sphere_or_tube: host.into(),
        marks: marks.to_vec(),
        along_tube: None,
        circle: None,
    }
}

fn qarc(id: &str, tube: &str, mark: Mark, along: bool, circle: &str) -> BoundaryArc {
    BoundaryArc {
        id: id.into(),
        on: OnSurface::Q,
        sphere_or_tube: tube.into(),
        marks: vec![mark],
        along_tube: Some(along),
        circle: Some(circle.into()),
    }
}

fn tubes(n: usize) -> Vec<Tube> {
    (1..=n)
        .map(|i| Tube {
            id: format!("t{i}"),
            orientation: 1,
        })
        .collect()
}

fn circles(n: usize) -> Vec<BoundaryCircle> {
    (1..=n)
        .map(|i| BoundaryCircle {
            id: format!("c{i}"),
            attach: Attach::Interior,
            tube_id: format!("t{i}"),
        })
        .collect()
}

/// Four vertical tubes, a horizontal punctured sphere, and four rectangles
/// with diamond P-edges; a consistent orientation of the strands induces
/// the Q-marks and every singular circle is of type I.
pub fn ht_piece() -> TangleComplex {
    use Mark::*;
    // Upper rectangles d1 (t1,t2), d2 (t3,t4); lower d3 (t2,t3), d4 (t4,t1).
    // All strands oriented positively; a rectangle's first Q-arc is
    // traversed toward the sphere and its second away from it.
    let rect = |id: &str, ta: &str, ca: &str, tb: &str, cb: &str, upper: bool| Disk {
        id: id.into(),
        boundary: vec![
            // Traversal arrives at the circle: for upper rectangles it
            // comes down the tube (against orientation), for lower ones up.
            // All four sheets sink upward in absolute terms, so the
            // traversal-relative mark flips between upper and lower.
            qarc(
                &format!("{id}.q0"),
                ta,
                if upper { Minus } else { Plus },
                !upper,
                ca,
            ),
            arc(&format!("{id}.p"), OnSurface::P, "P1", &[Diamond]),
            qarc(
                &format!("{id}.q1"),
                tb,
                if upper { Plus } else { Minus },
                upper,
                cb,
            ),
            arc(&format!("{id}.b"), OnSurface::B, "outer", &[]),
        ],
    };
    let disks = vec![
        rect("d1", "t1", "c1", "t2", "c2", true),
        rect("d2", "t3", "c3", "t4", "c4", true),
        rect("d3", "t2", "c2", "t3", "c3", false),
        rect("d4", "t4", "c4", "t1", "c1", false),
    ];
    let p_branch = |id: &str, seg: usize| BranchSpec {
        id: id.into(),
        surface: OnSurface::P,
        is_disk: true,
        edges: (1..=4)
            .map(|i| BranchEdge {
                edge: format!("d{i}.p"),
                side: if seg == 0 { BranchSide::Left } else { BranchSide::Right },
            })
            .chain((1..=4).map(|i| BranchEdge {
                edge: format!("c{i}.s{seg}"),
                side: BranchSide::Cross,
            }))
            .collect(),
    };
    let q_branch = |i: usize, arcs: [&str; 2]| BranchSpec {
        id: format!("q{i}"),
        surface: OnSurface::Q,
        is_disk: false,
        edges: arcs
            .iter()
            .flat_map(|a| {
                [
                    BranchEdge {
                        edge: (*a).into(),
                        side: BranchSide::Left,
                    },
                    BranchEdge {
                        edge: (*a).into(),
                        side: BranchSide::Right,
                    },
                ]
            })
            .chain([
                BranchEdge {
                    edge: format!("c{i}.s0"),
                    side: BranchSide::Left,
                },
                BranchEdge {
                    edge: format!("c{i}.s1"),
                    side: BranchSide::Right,
                },
            ])
            .collect(),
    };
    TangleComplex {
        chirality: 1,
        tubes: tubes(4),
        spheres: vec![Sphere {
            id: "P1".into(),
            boundary_circles: circles(4),
        }],
        disks,
        interior_points: vec![],
        branches: vec![
            p_branch("P1.front", 0),
            p_branch("P1.back", 1),
            q_branch(1, ["d1.q0", "d4.q1"]),
            q_branch(2, ["d1.q1", "d3.q0"]),
            q_branch(3, ["d2.q0", "d3.q1"]),
            q_branch(4, ["d2.q1", "d4.q0"]),
        ],
    }
}

/// The type A full channel piece: disks d1 (over) and d3 (under) span
/// the left tubes with diamond P-arcs, disks d2/d4 span the right tubes
/// with oriented P-arcs that reverse at the two interior double points;
/// left circles are of type I, right circles of type II.
pub fn channel_piece_a() -> TangleComplex {
    use Mark::*;
    let disks = vec![
        Disk {
            id: "d1".into(),
            boundary: vec![
                qarc("d1.q0", "t1", Minus, false, "c1"),
                arc("d1.p", OnSurface::P, "P1", &[Diamond, Diamond]),
                qarc("d1.q1", "t2", Plus, true, "c2"),
                arc("d1.b", OnSurface::B, "outer", &[]),
            ],
        },
        Disk {
            id: "d3".into(),
            boundary: vec![
                qarc("d3.q0", "t1", Plus, true, "c1"),
                arc("d3.p", OnSurface::P, "P1", &[Diamond, Diamond]),
                qarc("d3.q1", "t2", Minus, false, "c2"),
                arc("d3.b", OnSurface::B, "outer", &[]),
            ],
        },
        // d2 over: its P-arc runs c3 -> c4 and reverses at the double
        // point with d3's arc; consistency with both Q-arcs makes the
        // right circles type II.
        Disk {
            id: "d2".into(),
            boundary: vec![
                qarc("d2.q0", "t3", Plus, false, "c3"),
                arc("d2.p", OnSurface::P, "P1", &[Plus, Plus]),
                qarc("d2.q1", "t4", Plus, true, "c4"),
                arc("d2.b", OnSurface::B, "outer", &[]),
            ],
        },
        Disk {
            id: "d4".into(),
            boundary: vec![
                qarc("d4.q0", "t3", Plus, true, "c3"),
                arc("d4.p", OnSurface::P, "P1", &[Plus, Plus]),
                qarc("d4.q1", "t4", Plus, false, "c4"),
                arc("d4.b", OnSurface::B, "outer", &[]),
            ],
        },
    ];
    let interior_points = vec![
        InteriorPointSpec {
            id: "x1".into(),
            sphere: "P1".into(),
            over_disk: "d1".into(),
            under_disk: "d4".into(),
            over_marks: [Diamond, Diamond],
            under_marks: [Plus, Plus],
        },
        InteriorPointSpec {
            id: "x2".into(),
            sphere: "P1".into(),
            over_disk: "d2".into(),
            under_disk: "d3".into(),
            over_marks: [Plus, Plus],
            under_marks: [Diamond, Diamond],
        },
    ];
    let pb = |id: &str, edges: Vec<(&str, BranchSide)>| BranchSpec {
        id: id.into(),
        surface: OnSurface::P,
        is_disk: true,
        edges: edges
            .into_iter()
            .map(|(e, s)| BranchEdge {
                edge: e.into(),
                side: s,
            })
            .collect(),
    };
    use BranchSide::*;
    TangleComplex {
        chirality: 1,
        tubes: tubes(4),
        spheres: vec![Sphere {
            id: "P1".into(),
            boundary_circles: circles(4),
        }],
        disks,
        interior_points,
        branches: vec![
            pb(
                "P1.r1",
                vec![
                    ("d1.p.0", Left),
                    ("d3.p.0", Left),
                    ("d4.p.0", Left),
                    ("c1.s0", Cross),
                ],
            ),
            pb(
                "P1.r2",
                vec![
                    ("d1.p.1", Right),
                    ("d3.p.1", Right),
                    ("d2.p.0", Left),
                    ("c2.s0", Cross),
                ],
            ),
            pb(
                "P1.r3",
                vec![
                    ("d1.p.0", Right),
                    ("d2.p.1", Right),
                    ("d4.p.1", Right),
                    ("c3.s0", Cross),
                    ("c1.s1", Cross),
                ],
            ),
            pb(
                "P1.r4",
                vec![
                    ("d3.p.0", Right),
                    ("d2.p.0", Right),
                    ("d4.p.0", Right),
                    ("c4.s0", Cross),
                    ("c2.s1", Cross),
                    ("c3.s1", Cross),
                    ("c4.s1", Cross),
                ],
            ),
            BranchSpec {
                id: "q.t1".into(),
                surface: OnSurface::Q,
                is_disk: false,
                edges: vec![
                    BranchEdge {
                        edge: "d1.q0".into(),
                        side: Left,
                    },
                    BranchEdge {
                        edge: "d1.q0".into(),
                        side: Right,
                    },
                ],
            },
            BranchSpec {
                id: "q.t3".into(),
                surface: OnSurface::Q,
                is_disk: false,
                edges: vec![
                    BranchEdge {
                        edge: "d2.q0".into(),
                        side: Left,
                    },
                    BranchEdge {
                        edge: "d2.q0".into(),
                        side: Right,
                    },
                ],
            },
        ],
    }
}

/// Type B channel piece: all orientation marks of the type A piece
/// reversed.
pub fn channel_piece_b() -> TangleComplex {
    reverse_marks(&channel_piece_a())
}

/// Half channel piece: one side keeps the diamond pair (two type I
/// circles), the other has one consistent junction pair (type II) and one
/// junction where exactly one disk is consistent (type III); a single
/// meridional cusp.
pub fn half_channel_piece() -> TangleComplex {
    use Mark::*;
    let mut tc = channel_piece_a();
    // Straighten d2/d4: no interior reversal, single-segment P-arcs.
    tc.interior_points.clear();
    for d in &mut tc.disks {
        match d.id.as_str() {
            "d1" | "d3" => {
                d.boundary[1].marks = vec![Diamond];
            }
            "d2" => {
                // Consistent at c3 (type II side), inconsistent at c4.
                d.boundary[1].marks = vec![Plus, Minus];
                d.boundary[2].marks = vec![Plus]; // breaks consistency at c4
            }
            "d4" => {
                d.boundary[1].marks = vec![Plus, Minus];
                // d4 stays consistent at both ends.
                d.boundary[2].marks = vec![Minus];
            }
            _ => {}
        }
    }
    // Rebuild the P-branches with the simplified segment ids.
    for b in &mut tc.branches {
        for e in &mut b.edges {
            e.edge = e
                .edge
                .replace("d1.p.0", "d1.p")
                .replace("d1.p.1", "d1.p")
                .replace("d3.p.0", "d3.p")
                .replace("d3.p.1", "d3.p");
        }
    }
    tc
}

/// Trivial cap: a sphere glued to the tube ends (its boundary circles are
/// tube boundaries, so there are no singular circles to classify) with one
/// diamond-edged disk between the strands.
pub fn trivial_cap() -> TangleComplex {
    use Mark::*;
    TangleComplex {
        chirality: 1,
        tubes: tubes(2),
        spheres: vec![Sphere {
            id: "P1".into(),
            boundary_circles: vec![
                BoundaryCircle {
                    id: "c1".into(),
                    attach: Attach::Tube,
                    tube_id: "t1".into(),
                },
                BoundaryCircle {
                    id: "c2".into(),
                    attach: Attach::Tube,
                    tube_id: "t2".into(),
                },
            ],
        }],
        disks: vec![Disk {
            id: "d1".into(),
            boundary: vec![
                arc("d1.p", OnSurface::P, "P1", &[Diamond]),
                {
                    let mut a = qarc("d1.q0", "t1", Plus, true, "c1");
                    a.circle = Some("c1".into());
                    a
                },
                arc("d1.b", OnSurface::B, "outer", &[]),
                {
                    let mut a = qarc("d1.q1", "t2", Minus, false, "c2");
                    a.circle = Some("c2".into());
                    a
                },
            ],
        }],
        interior_points: vec![],
        branches: vec![
            BranchSpec {
                id: "P1.front".into(),
                surface: OnSurface::P,
                is_disk: true,
                edges: vec![BranchEdge {
                    edge: "d1.p".into(),
                    side: BranchSide::Left,
                }],
            },
            BranchSpec {
                id: "P1.back".into(),
                surface: OnSurface::P,
                is_disk: true,
                edges: vec![BranchEdge {
                    edge: "d1.p".into(),
                    side: BranchSide::Right,
                }],
            },
        ],
    }
}
