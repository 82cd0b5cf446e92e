//! Delaunay triangulation inside the fixed boundary triangle, its ordered
//! basis, and the decomposition of a triangulation change into flips.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{DelaunayError, FlipError};
use crate::geometry::{incircle_int, orient2d_int, Configuration, IntPoint};
use crate::rational::Rational;

/// A triangle named by its three point indices in ascending order.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[usize; 3]", try_from = "[usize; 3]")]
pub struct Triangle([usize; 3]);

impl Triangle {
    /// Sorts the indices; panics if two coincide.
    pub fn new(a: usize, b: usize, c: usize) -> Self {
        let mut v = [a, b, c];
        v.sort_unstable();
        assert!(v[0] < v[1] && v[1] < v[2], "triangle needs distinct vertices: {v:?}");
        Triangle(v)
    }

    pub fn vertices(&self) -> [usize; 3] {
        self.0
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.contains(&index)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.contains(u) && self.contains(v)
    }

    /// The vertex that is not on edge `{u, v}`.
    pub fn opposite(&self, u: usize, v: usize) -> Option<usize> {
        if !self.has_edge(u, v) {
            return None;
        }
        self.0.iter().copied().find(|&w| w != u && w != v)
    }
}

impl From<Triangle> for [usize; 3] {
    fn from(t: Triangle) -> Self {
        t.0
    }
}

impl TryFrom<[usize; 3]> for Triangle {
    type Error = String;

    fn try_from(v: [usize; 3]) -> Result<Self, Self::Error> {
        if v[0] < v[1] && v[1] < v[2] {
            Ok(Triangle(v))
        } else {
            Err(format!("triangle indices must be strictly ascending: {v:?}"))
        }
    }
}

impl fmt::Display for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D({} {} {})", self.0[0], self.0[1], self.0[2])
    }
}

impl fmt::Debug for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A triangulation of a configuration. Two triangulations are equal when
/// their triangle sets are; the geometry is carried along for predicates and
/// drawing only.
#[derive(Debug, Clone)]
pub struct Triangulation {
    triangles: BTreeSet<Triangle>,
    config: Configuration,
}

impl PartialEq for Triangulation {
    fn eq(&self, other: &Self) -> bool {
        self.triangles == other.triangles
    }
}

impl Eq for Triangulation {}

impl Triangulation {
    pub fn triangles(&self) -> &BTreeSet<Triangle> {
        &self.triangles
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn ordered_basis(&self) -> OrderedBasis {
        ordered_basis(self)
    }

    pub fn to_json(&self) -> TriangulationJson {
        TriangulationJson {
            triangles: self.triangles.iter().copied().collect(),
        }
    }
}

/// `{"triangles": [[1,2,3], ...]}`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangulationJson {
    pub triangles: Vec<Triangle>,
}

/// Triangles of a triangulation in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OrderedBasis {
    triangles: Vec<Triangle>,
}

impl OrderedBasis {
    pub fn from_set(set: &BTreeSet<Triangle>) -> Self {
        OrderedBasis {
            triangles: set.iter().copied().collect(),
        }
    }

    /// Sorts and deduplicates.
    pub fn new(mut triangles: Vec<Triangle>) -> Self {
        triangles.sort_unstable();
        triangles.dedup();
        OrderedBasis { triangles }
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn position(&self, t: &Triangle) -> Option<usize> {
        self.triangles.binary_search(t).ok()
    }

    pub fn contains(&self, t: &Triangle) -> bool {
        self.position(t).is_some()
    }

    pub fn to_set(&self) -> BTreeSet<Triangle> {
        self.triangles.iter().copied().collect()
    }
}

pub fn ordered_basis(t: &Triangulation) -> OrderedBasis {
    OrderedBasis::from_set(&t.triangles)
}

/// One diagonal exchange inside a quadrilateral.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlipEvent {
    pub removed: [usize; 2],
    pub inserted: [usize; 2],
    pub quad: [usize; 4],
    pub time_bracket: Option<(Rational, Rational)>,
}

impl FlipEvent {
    pub fn new(removed: [usize; 2], inserted: [usize; 2]) -> Self {
        let mut r = removed;
        let mut i = inserted;
        r.sort_unstable();
        i.sort_unstable();
        let mut quad = [r[0], r[1], i[0], i[1]];
        quad.sort_unstable();
        FlipEvent {
            removed: r,
            inserted: i,
            quad,
            time_bracket: None,
        }
    }

    pub fn with_bracket(mut self, lo: Rational, hi: Rational) -> Self {
        self.time_bracket = Some((lo, hi));
        self
    }

    /// The two triangles that disappear.
    pub fn removed_triangles(&self) -> [Triangle; 2] {
        let [i, k] = self.removed;
        let [j, l] = self.inserted;
        [Triangle::new(i, k, j), Triangle::new(i, k, l)]
    }

    /// The two triangles that appear.
    pub fn inserted_triangles(&self) -> [Triangle; 2] {
        let [i, k] = self.removed;
        let [j, l] = self.inserted;
        [Triangle::new(j, l, i), Triangle::new(j, l, k)]
    }

    /// The same exchange in the opposite direction.
    pub fn reversed(&self) -> FlipEvent {
        FlipEvent {
            removed: self.inserted,
            inserted: self.removed,
            quad: self.quad,
            time_bracket: self.time_bracket.clone(),
        }
    }

    /// Applies the exchange to a triangle set.
    pub fn apply(&self, triangles: &BTreeSet<Triangle>) -> Result<BTreeSet<Triangle>, FlipError> {
        let mut out = triangles.clone();
        for t in self.removed_triangles() {
            if !out.remove(&t) {
                return Err(FlipError::MissingTriangle(t));
            }
        }
        for t in self.inserted_triangles() {
            if !out.insert(t) {
                return Err(FlipError::BasisMismatch {
                    removed: self.removed,
                    inserted: self.inserted,
                    detail: format!("{t} already present"),
                });
            }
        }
        Ok(out)
    }
}

/// Outcome of comparing two triangulations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlipDiff {
    /// Disjoint quadrilateral exchanges, sorted by quadrilateral; empty when
    /// the triangulations coincide.
    Flips(Vec<FlipEvent>),
    /// The change is not a set of independent flips.
    NotAFlipSet,
}

/// Builds the Delaunay triangulation, inserting interior points in index
/// order.
pub fn build_delaunay(config: &Configuration) -> Result<Triangulation, DelaunayError> {
    let order: Vec<usize> = config.interior_points().map(|p| p.index).collect();
    build_delaunay_in_order(config, &order)
}

/// Bowyer-Watson insertion starting from the boundary triangle. `order` lists
/// the interior point indices in insertion order.
pub fn build_delaunay_in_order(config: &Configuration, order: &[usize]) -> Result<Triangulation, DelaunayError> {
    let pts = config.integer_points();
    let pos = |index: usize| {
        config
            .position_of(index)
            .ok_or(crate::error::GeometryError::UnknownIndex(index))
    };
    let [b0, b1, b2] = config.boundary();
    let (b0, b1, b2) = (pos(b0)?, pos(b1)?, pos(b2)?);
    // triangles hold point positions in counterclockwise order
    let mut tris: Vec<[usize; 3]> = vec![if orient2d_int(&pts[b0], &pts[b1], &pts[b2]) > 0 {
        [b0, b1, b2]
    } else {
        [b0, b2, b1]
    }];
    let interior: BTreeSet<usize> = config.interior_points().map(|p| p.index).collect();
    let requested: BTreeSet<usize> = order.iter().copied().collect();
    assert!(
        requested == interior && order.len() == interior.len(),
        "insertion order must list every interior point exactly once"
    );

    for &index in order {
        let p = pos(index)?;
        let mut cavity_edges: HashMap<(usize, usize), usize> = HashMap::new();
        let mut kept = Vec::with_capacity(tris.len() + 2);
        for t in tris.drain(..) {
            let inside = incircle_int(&pts[t[0]], &pts[t[1]], &pts[t[2]], &pts[p]).map_err(DelaunayError::from)? > 0;
            if inside {
                for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                    *cavity_edges.entry(e).or_insert(0) += 1;
                }
            } else {
                kept.push(t);
            }
        }
        let mut boundary: Vec<(usize, usize)> = cavity_edges
            .keys()
            .copied()
            .filter(|&(u, v)| !cavity_edges.contains_key(&(v, u)))
            .collect();
        boundary.sort_unstable();
        kept.extend(boundary.into_iter().map(|(u, v)| [u, v, p]));
        tris = kept;
    }

    check_locally_delaunay(&tris, &pts, config)?;

    let idx: Vec<usize> = config.indices().collect();
    let triangles: BTreeSet<Triangle> = tris
        .iter()
        .map(|t| Triangle::new(idx[t[0]], idx[t[1]], idx[t[2]]))
        .collect();
    debug_assert_eq!(triangles.len(), 2 * config.interior_count() + 1);
    let tri = Triangulation {
        triangles,
        config: config.clone(),
    };
    debug_assert!(verify_empty_circumdisks(&tri).is_ok());
    Ok(tri)
}

/// Every interior edge must see the opposite apex strictly outside the
/// neighbouring circumcircle; equality means the input is degenerate.
fn check_locally_delaunay(tris: &[[usize; 3]], pts: &[IntPoint], config: &Configuration) -> Result<(), DelaunayError> {
    let mut apex: HashMap<(usize, usize), usize> = HashMap::new();
    for t in tris {
        apex.insert((t[0], t[1]), t[2]);
        apex.insert((t[1], t[2]), t[0]);
        apex.insert((t[2], t[0]), t[1]);
    }
    let idx: Vec<usize> = config.indices().collect();
    for (&(u, v), &w) in &apex {
        let Some(&z) = apex.get(&(v, u)) else {
            continue;
        };
        if u > v {
            continue;
        }
        let s = incircle_int(&pts[u], &pts[v], &pts[w], &pts[z]).map_err(DelaunayError::from)?;
        if s == 0 {
            let mut quad = [idx[u], idx[v], idx[w], idx[z]];
            quad.sort_unstable();
            return Err(DelaunayError::Cocircular(quad));
        }
        assert!(s < 0, "Bowyer-Watson produced a non-Delaunay edge");
    }
    Ok(())
}

/// Exhaustive check: no configuration point lies strictly inside any
/// triangle's circumcircle. Returns the first violating (triangle, point).
pub fn verify_empty_circumdisks(t: &Triangulation) -> Result<(), (Triangle, usize)> {
    let pts = t.config.integer_points();
    let idx: Vec<usize> = t.config.indices().collect();
    for tri in &t.triangles {
        let [a, b, c] = tri.vertices().map(|i| t.config.position_of(i).expect("known index"));
        for (e, &index) in idx.iter().enumerate() {
            if tri.contains(index) {
                continue;
            }
            if incircle_int(&pts[a], &pts[b], &pts[c], &pts[e]).unwrap_or(1) > 0 {
                return Err((*tri, index));
            }
        }
    }
    Ok(())
}

/// Decomposes the change from `before` to `after` into disjoint flips.
pub fn diff_flips(before: &Triangulation, after: &Triangulation) -> FlipDiff {
    diff_triangle_sets(&before.triangles, &after.triangles)
}

pub fn diff_triangle_sets(before: &BTreeSet<Triangle>, after: &BTreeSet<Triangle>) -> FlipDiff {
    let removed: Vec<Triangle> = before.difference(after).copied().collect();
    let added: BTreeSet<Triangle> = after.difference(before).copied().collect();
    if removed.is_empty() && added.is_empty() {
        return FlipDiff::Flips(Vec::new());
    }
    if removed.len() != added.len() || !removed.len().is_multiple_of(2) {
        return FlipDiff::NotAFlipSet;
    }

    // Candidate exchanges: two removed triangles sharing an edge whose
    // quadrilateral reappears with the other diagonal.
    let mut candidates: Vec<(usize, usize, FlipEvent)> = Vec::new();
    for a in 0..removed.len() {
        for b in a + 1..removed.len() {
            let (ta, tb) = (removed[a], removed[b]);
            let shared: Vec<usize> = ta.vertices().into_iter().filter(|&v| tb.contains(v)).collect();
            if shared.len() != 2 {
                continue;
            }
            let w = ta.opposite(shared[0], shared[1]).expect("shared edge");
            let z = tb.opposite(shared[0], shared[1]).expect("shared edge");
            let ev = FlipEvent::new([shared[0], shared[1]], [w, z]);
            if ev.inserted_triangles().iter().all(|t| added.contains(t)) {
                candidates.push((a, b, ev));
            }
        }
    }

    let mut used = vec![false; removed.len()];
    let mut chosen = Vec::new();
    if cover(&candidates, &mut used, &mut chosen, 0) {
        let mut events: Vec<FlipEvent> = chosen.into_iter().map(|c| candidates[c].2.clone()).collect();
        let inserted: BTreeSet<Triangle> = events.iter().flat_map(|e| e.inserted_triangles()).collect();
        if inserted != added {
            return FlipDiff::NotAFlipSet;
        }
        events.sort_by(|x, y| x.quad.cmp(&y.quad).then(x.removed.cmp(&y.removed)));
        FlipDiff::Flips(events)
    } else {
        FlipDiff::NotAFlipSet
    }
}

// Exact cover of the removed triangles by candidate pairs.
fn cover(candidates: &[(usize, usize, FlipEvent)], used: &mut [bool], chosen: &mut Vec<usize>, start: usize) -> bool {
    let Some(first) = used.iter().position(|u| !u) else {
        return true;
    };
    for (c, (a, b, _)) in candidates.iter().enumerate().skip(start) {
        if *a != first || used[*b] {
            continue;
        }
        used[*a] = true;
        used[*b] = true;
        chosen.push(c);
        if cover(candidates, used, chosen, 0) {
            return true;
        }
        chosen.pop();
        used[*a] = false;
        used[*b] = false;
    }
    false
}
