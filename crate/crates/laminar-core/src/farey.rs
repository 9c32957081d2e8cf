//! The finite triangulated disk of minimal Farey paths from 1/0 to a target
//! slope: construction, boundary chains, vertex links, corner numbers, and a
//! brute-force minimal-path enumerator used as an oracle by higher layers.

use crate::rational::{delta, eval_cont_frac, ContFrac, RationalError, Slope};
use serde_json::json;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FareyError {
    #[error("target {0} is degenerate (needs a finite slope with q ≥ 2)")]
    DegenerateTarget(Slope),
    #[error("path vertices {0} and {1} are not adjacent in the diagram")]
    NotAdjacent(Slope, Slope),
    #[error("corner index {0} is an endpoint or out of range")]
    BadIndex(usize),
    #[error("vertex {0} is not in the diagram")]
    UnknownVertex(Slope),
    #[error("prefix {0} of the corner word evaluates to a non-adjacent vertex")]
    MalformedCorners(usize),
    #[error(transparent)]
    Rational(#[from] RationalError),
}

/// Which boundary chain a vertex lies on. Both endpoints (1/0 and the
/// target) belong to both chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainSide {
    Upper,
    Lower,
    Endpoint,
}

/// The diagram for a target p/q: a triangulated disk with all vertices on
/// the boundary circle, produced by mediant descent from the triangle
/// {1/0, m, m+1} toward the target.
#[derive(Debug, Clone)]
pub struct FareyDiagram {
    pub target: Slope,
    /// Circular boundary order: 1/0, the upper chain (labels above the
    /// target, decreasing), the target, then the lower chain reversed.
    pub vertices: Vec<Slope>,
    /// Sorted list of sorted pairs; every pair has Δ = 1.
    pub edges: Vec<(Slope, Slope)>,
    /// Sorted list of sorted triples.
    pub triangles: Vec<[Slope; 3]>,
    adj: BTreeMap<Slope, Vec<Slope>>,
    /// Link of each vertex: its neighbors in path order, consecutive ones
    /// spanning a triangle with the vertex. Endpoints of the link are the
    /// vertex's two boundary-circle neighbors.
    links: BTreeMap<Slope, Vec<Slope>>,
}

pub fn build_diagram(target: Slope) -> Result<FareyDiagram, FareyError> {
    if target.is_infinite() || target.q < 2 {
        return Err(FareyError::DegenerateTarget(target));
    }
    let m = target.floor();
    let mut triangles = vec![sorted3(Slope::INFINITY, Slope::new(m, 1), Slope::new(m + 1, 1))];
    let (mut lo, mut hi) = (Slope::new(m, 1), Slope::new(m + 1, 1));
    loop {
        let mid = Slope::mediant(lo, hi);
        triangles.push(sorted3(lo, hi, mid));
        if mid == target {
            break;
        }
        if target < mid {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    triangles.sort();

    let mut adj: BTreeMap<Slope, Vec<Slope>> = BTreeMap::new();
    let mut edges = vec![];
    for t in &triangles {
        for (a, b) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            let e = if a < b { (a, b) } else { (b, a) };
            if !edges.contains(&e) {
                edges.push(e);
                adj.entry(a).or_default().push(b);
                adj.entry(b).or_default().push(a);
            }
        }
    }
    edges.sort();
    for nbrs in adj.values_mut() {
        nbrs.sort();
    }

    let links = adj
        .keys()
        .map(|&v| (v, link_path(v, &adj, &triangles)))
        .collect();

    let mut upper: Vec<Slope> = adj.keys().copied().filter(|&v| v > target && !v.is_infinite()).collect();
    upper.sort();
    upper.reverse();
    let mut lower: Vec<Slope> = adj.keys().copied().filter(|&v| v < target).collect();
    lower.sort();
    let mut vertices = vec![Slope::INFINITY];
    vertices.extend(&upper);
    vertices.push(target);
    lower.reverse();
    vertices.extend(&lower);

    Ok(FareyDiagram {
        target,
        vertices,
        edges,
        triangles,
        adj,
        links,
    })
}

fn sorted3(a: Slope, b: Slope, c: Slope) -> [Slope; 3] {
    let mut t = [a, b, c];
    t.sort();
    t
}

/// Order the neighbors of `v` into the link path: consecutive entries span
/// a triangle with `v`. Starts at the smaller of the two degree-one ends.
fn link_path(v: Slope, adj: &BTreeMap<Slope, Vec<Slope>>, triangles: &[[Slope; 3]]) -> Vec<Slope> {
    let nbrs = &adj[&v];
    let is_tri = |a: Slope, b: Slope| triangles.binary_search(&sorted3(v, a, b)).is_ok();
    if nbrs.len() == 1 {
        return nbrs.clone();
    }
    let mut ends: Vec<Slope> = nbrs
        .iter()
        .copied()
        .filter(|&a| nbrs.iter().filter(|&&b| b != a && is_tri(a, b)).count() == 1)
        .collect();
    ends.sort();
    let mut path = vec![ends[0]];
    while path.len() < nbrs.len() {
        let cur = *path.last().unwrap();
        let next = nbrs
            .iter()
            .copied()
            .find(|&b| b != cur && !path.contains(&b) && is_tri(cur, b))
            .expect("link of a disk-boundary vertex is a path");
        path.push(next);
    }
    path
}

impl FareyDiagram {
    pub fn has_vertex(&self, v: Slope) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, a: Slope, b: Slope) -> bool {
        let e = if a < b { (a, b) } else { (b, a) };
        self.edges.binary_search(&e).is_ok()
    }

    pub fn has_triangle(&self, a: Slope, b: Slope, c: Slope) -> bool {
        self.triangles.binary_search(&sorted3(a, b, c)).is_ok()
    }

    pub fn neighbors(&self, v: Slope) -> &[Slope] {
        self.adj.get(&v).map(|n| n.as_slice()).unwrap_or(&[])
    }

    pub fn degree(&self, v: Slope) -> usize {
        self.neighbors(v).len()
    }

    pub fn link(&self, v: Slope) -> &[Slope] {
        self.links.get(&v).map(|n| n.as_slice()).unwrap_or(&[])
    }

    pub fn chain_side(&self, v: Slope) -> ChainSide {
        if v.is_infinite() || v == self.target {
            ChainSide::Endpoint
        } else if v > self.target {
            ChainSide::Upper
        } else {
            ChainSide::Lower
        }
    }

    /// Sign convention for corners at `v`: the flanking triangles of a path
    /// through a boundary vertex all lie inside the disk, which is the upper
    /// side for lower-chain vertices and vice versa.
    pub fn corner_sign(&self, v: Slope) -> i64 {
        match self.chain_side(v) {
            ChainSide::Lower => 1,
            ChainSide::Upper => -1,
            ChainSide::Endpoint => 0,
        }
    }

    /// Position of neighbor `a` in the link of `v`.
    pub fn link_pos(&self, v: Slope, a: Slope) -> Option<usize> {
        self.link(v).iter().position(|&x| x == a)
    }

    /// Signed triangle count pinched at `v` between edges to `a` and `b`
    /// (both must be neighbors of `v`).
    pub fn corner_between(&self, v: Slope, a: Slope, b: Slope) -> Result<i64, FareyError> {
        let pa = self.link_pos(v, a).ok_or(FareyError::NotAdjacent(v, a))?;
        let pb = self.link_pos(v, b).ok_or(FareyError::NotAdjacent(v, b))?;
        let t = (pa as i64 - pb as i64).abs();
        Ok(self.corner_sign(v) * t)
    }
}

/// Corner number of a pure-edge path at interior index `i`.
pub fn corner_number(d: &FareyDiagram, path: &[Slope], i: usize) -> Result<i64, FareyError> {
    if i == 0 || i + 1 >= path.len() {
        return Err(FareyError::BadIndex(i));
    }
    for w in path.windows(2) {
        if !d.has_edge(w[0], w[1]) {
            return Err(FareyError::NotAdjacent(w[0], w[1]));
        }
    }
    d.corner_between(path[i], path[i - 1], path[i + 1])
}

/// All interior corners of a pure-edge path.
pub fn corners_of_vertex_path(d: &FareyDiagram, path: &[Slope]) -> Result<Vec<i64>, FareyError> {
    (1..path.len().saturating_sub(1))
        .map(|i| corner_number(d, path, i))
        .collect()
}

pub fn boundary_paths(d: &FareyDiagram) -> (Vec<Slope>, Vec<Slope>) {
    let pos_target = d.vertices.iter().position(|&v| v == d.target).unwrap();
    let upper = d.vertices[..=pos_target].to_vec();
    let mut lower = vec![Slope::INFINITY];
    lower.extend(d.vertices[pos_target + 1..].iter().rev());
    lower.push(d.target);
    (upper, lower)
}

pub fn fork_vertices(d: &FareyDiagram) -> Vec<Slope> {
    d.adj
        .iter()
        .filter(|(_, n)| n.len() >= 4)
        .map(|(&v, _)| v)
        .collect()
}

/// Vertex sequence (1/0, v₁, v₁+[c₁], …, target) realizing a corner word.
/// Fails with the first prefix that is not a Farey neighbor of its
/// predecessor.
pub fn path_from_corners(target: Slope, cf: &ContFrac) -> Result<Vec<Slope>, FareyError> {
    let mut path = vec![Slope::INFINITY, Slope::new(cf.v1, 1)];
    for i in 1..=cf.cs.len() {
        let prefix = ContFrac {
            v1: cf.v1,
            cs: cf.cs[..i].to_vec(),
        };
        let v = eval_cont_frac(&prefix)?;
        if delta(*path.last().unwrap(), v) != 1 {
            return Err(FareyError::MalformedCorners(i));
        }
        path.push(v);
    }
    if *path.last().unwrap() != target {
        return Err(FareyError::MalformedCorners(cf.cs.len()));
    }
    if delta(path[0], path[1]) != 1 {
        return Err(FareyError::MalformedCorners(0));
    }
    Ok(path)
}

/// All simple edge-paths from 1/0 to the target in which consecutive edges
/// never share a triangle (equivalently, all interior corner magnitudes are
/// at least 2). Brute-force oracle; exponential in principle, fine at desk
/// scale.
pub fn enumerate_minimal_paths(d: &FareyDiagram) -> Vec<Vec<Slope>> {
    let mut out = vec![];
    let mut path = vec![Slope::INFINITY];
    dfs_minimal(d, &mut path, &mut out);
    out
}

fn dfs_minimal(d: &FareyDiagram, path: &mut Vec<Slope>, out: &mut Vec<Vec<Slope>>) {
    let cur = *path.last().unwrap();
    if cur == d.target {
        out.push(path.clone());
        return;
    }
    for &next in d.neighbors(cur) {
        if path.contains(&next) {
            continue;
        }
        if path.len() >= 2 && d.has_triangle(path[path.len() - 2], cur, next) {
            continue;
        }
        path.push(next);
        dfs_minimal(d, path, out);
        path.pop();
    }
}

pub fn to_json(d: &FareyDiagram) -> serde_json::Value {
    let (upper, lower) = boundary_paths(d);
    json!({
        "target": d.target,
        "vertices": d.vertices,
        "edges": d.edges.iter().map(|(a, b)| json!([a, b])).collect::<Vec<_>>(),
        "triangles": d.triangles,
        "upper_boundary": upper,
        "lower_boundary": lower,
        "fork_vertices": fork_vertices(d),
    })
}

pub fn to_dot(d: &FareyDiagram) -> String {
    let mut s = String::from("graph farey {\n  layout=neato;\n");
    for v in &d.vertices {
        s.push_str(&format!("  \"{v}\";\n"));
    }
    let n = d.vertices.len();
    let boundary: Vec<(Slope, Slope)> = (0..n)
        .map(|i| {
            let (a, b) = (d.vertices[i], d.vertices[(i + 1) % n]);
            if a < b {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    for e in &d.edges {
        let style = if boundary.contains(e) {
            " [style=bold]"
        } else {
            " [style=dashed]"
        };
        s.push_str(&format!("  \"{}\" -- \"{}\"{};\n", e.0, e.1, style));
    }
    s.push_str("}\n");
    s
}
