//! Transition matrices of single flips.
//!
//! A flip replacing diagonal `ik` by `jl` maps the basis of the old
//! triangulation to the new one. Shared triangles map to themselves, and the
//! two removed triangles map to label-weighted combinations of the two new
//! triangles:
//!
//! ```text
//! ijk -> (z_i - z_l)/(z_i - z_k) ijl + (z_l - z_k)/(z_i - z_k) jkl
//! ikl -> (z_i - z_j)/(z_i - z_k) ijl + (z_j - z_k)/(z_i - z_k) jkl
//! ```
//!
//! Columns of the matrix are indexed by the old basis and rows by the new
//! one, so a later flip multiplies on the left.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::delaunay::{FlipEvent, OrderedBasis, Triangle};
use crate::error::FlipError;
use crate::geometry::Configuration;
use crate::matrix::RationalMatrix;
use crate::rational::Rational;

/// Labels attached to point indices.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LabelMap(BTreeMap<usize, Rational>);

impl LabelMap {
    pub fn new(map: BTreeMap<usize, Rational>) -> Self {
        LabelMap(map)
    }

    /// `zeta_m = m` for `m` in `1..=count`.
    pub fn identity(count: usize) -> Self {
        LabelMap((1..=count).map(|m| (m, Rational::from(m as i64))).collect())
    }

    pub fn from_config(config: &Configuration) -> Self {
        LabelMap(config.points().iter().map(|p| (p.index, p.zeta.clone())).collect())
    }

    pub fn get(&self, index: usize) -> Result<&Rational, FlipError> {
        self.0.get(&index).ok_or(FlipError::MissingLabel(index))
    }

    pub fn insert(&mut self, index: usize, zeta: Rational) {
        self.0.insert(index, zeta);
    }
}

/// Role assignment for the flip `ik -> jl`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FlipRoles {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
}

impl FlipRoles {
    pub fn new(i: usize, j: usize, k: usize, l: usize) -> Result<Self, FlipError> {
        let v = [i, j, k, l];
        let distinct = (0..4).all(|a| (a + 1..4).all(|b| v[a] != v[b]));
        if !distinct {
            return Err(FlipError::InvalidRoles(i, j, k, l));
        }
        Ok(FlipRoles { i, j, k, l })
    }

    /// Canonical assignment `i < k`, `j < l` for an event.
    pub fn from_event(ev: &FlipEvent) -> Self {
        FlipRoles {
            i: ev.removed[0],
            k: ev.removed[1],
            j: ev.inserted[0],
            l: ev.inserted[1],
        }
    }

    pub fn removed(&self) -> [usize; 2] {
        [self.i, self.k]
    }

    pub fn inserted(&self) -> [usize; 2] {
        [self.j, self.l]
    }

    pub fn to_event(&self) -> FlipEvent {
        FlipEvent::new(self.removed(), self.inserted())
    }

    pub fn as_tuple(&self) -> [usize; 4] {
        [self.i, self.j, self.k, self.l]
    }
}

/// The flip `jl -> ik`.
pub fn reverse_roles(roles: FlipRoles) -> FlipRoles {
    FlipRoles {
        i: roles.j,
        j: roles.i,
        k: roles.l,
        l: roles.k,
    }
}

/// Position maps of the eight tuples naming the same quadrilateral:
/// (ijkl), (kjil), (ilkj), (klij), (jkli), (jilk), (lkji), (lijk).
const DIHEDRAL: [[usize; 4]; 8] = [
    [0, 1, 2, 3],
    [2, 1, 0, 3],
    [0, 3, 2, 1],
    [2, 3, 0, 1],
    [1, 2, 3, 0],
    [1, 0, 3, 2],
    [3, 2, 1, 0],
    [3, 0, 1, 2],
];

/// Least tuple of the dihedral class of `(i, j, k, l)`.
pub fn gamma_canonical(roles: FlipRoles) -> [usize; 4] {
    let t = roles.as_tuple();
    DIHEDRAL.iter().map(|p| p.map(|a| t[a])).min().expect("nonempty")
}

/// Generator name such as `d(1 2 3 4)`.
pub fn gamma_generator_name(roles: FlipRoles) -> String {
    let [a, b, c, d] = gamma_canonical(roles);
    format!("d({a} {b} {c} {d})")
}

/// A flip's transition matrix together with the bases it maps between.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlipMatrix {
    pub matrix: RationalMatrix,
    pub from_basis: OrderedBasis,
    pub to_basis: OrderedBasis,
}

/// The four label ratios, as `(ijk -> ijl, ijk -> jkl, ikl -> ijl, ikl -> jkl)`.
pub fn flip_coefficients(roles: FlipRoles, labels: &LabelMap) -> Result<[Rational; 4], FlipError> {
    let (zi, zj, zk, zl) = (
        labels.get(roles.i)?,
        labels.get(roles.j)?,
        labels.get(roles.k)?,
        labels.get(roles.l)?,
    );
    let denom = zi - zk;
    if denom.is_zero() {
        return Err(FlipError::CoincidentLabels(roles.i, roles.k));
    }
    Ok([
        (zi - zl) / &denom,
        (zl - zk) / &denom,
        (zi - zj) / &denom,
        (zj - zk) / &denom,
    ])
}

pub fn build_flip_matrix(
    roles: FlipRoles,
    from: &OrderedBasis,
    to: &OrderedBasis,
    labels: &LabelMap,
) -> Result<FlipMatrix, FlipError> {
    let FlipRoles { i, j, k, l } = roles;
    let mismatch = |detail: String| FlipError::BasisMismatch {
        removed: [i, k],
        inserted: [j, l],
        detail,
    };
    let ijk = Triangle::new(i, j, k);
    let ikl = Triangle::new(i, k, l);
    let ijl = Triangle::new(i, j, l);
    let jkl = Triangle::new(j, k, l);
    for t in [ijk, ikl] {
        if !from.contains(&t) {
            return Err(mismatch(format!("{t} not in the source basis")));
        }
        if to.contains(&t) {
            return Err(mismatch(format!("{t} survives in the target basis")));
        }
    }
    for t in [ijl, jkl] {
        if !to.contains(&t) {
            return Err(mismatch(format!("{t} not in the target basis")));
        }
        if from.contains(&t) {
            return Err(mismatch(format!("{t} already in the source basis")));
        }
    }
    if from.len() != to.len() {
        return Err(mismatch(format!("basis sizes differ: {} vs {}", from.len(), to.len())));
    }
    let [a_ijl, a_jkl, b_ijl, b_jkl] = flip_coefficients(roles, labels)?;

    let size = from.len();
    let row_ijl = to.position(&ijl).expect("checked");
    let row_jkl = to.position(&jkl).expect("checked");
    let mut matrix = RationalMatrix::zeros(size, size);
    for (col, t) in from.triangles().iter().enumerate() {
        if *t == ijk {
            matrix.set(row_ijl, col, a_ijl.clone());
            matrix.set(row_jkl, col, a_jkl.clone());
        } else if *t == ikl {
            matrix.set(row_ijl, col, b_ijl.clone());
            matrix.set(row_jkl, col, b_jkl.clone());
        } else {
            let row = to
                .position(t)
                .ok_or_else(|| mismatch(format!("{t} missing from the target basis")))?;
            matrix.set(row, col, Rational::one());
        }
    }
    Ok(FlipMatrix {
        matrix,
        from_basis: from.clone(),
        to_basis: to.clone(),
    })
}

/// Builds the matrix of `event` applied to `from`, deriving the target basis.
pub fn flip_matrix_for_event(
    event: &FlipEvent,
    from: &OrderedBasis,
    labels: &LabelMap,
) -> Result<FlipMatrix, FlipError> {
    let to = OrderedBasis::from_set(&event.apply(&from.to_set())?);
    build_flip_matrix(FlipRoles::from_event(event), from, &to, labels)
}

/// One entry of the flip-sequence JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipRecord {
    pub removed: [usize; 2],
    pub inserted: [usize; 2],
    pub quad: [usize; 4],
    pub gamma: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_lo: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_hi: Option<Rational>,
}

impl From<&FlipEvent> for FlipRecord {
    fn from(ev: &FlipEvent) -> Self {
        let (t_lo, t_hi) = match &ev.time_bracket {
            Some((lo, hi)) => (Some(lo.clone()), Some(hi.clone())),
            None => (None, None),
        };
        FlipRecord {
            removed: ev.removed,
            inserted: ev.inserted,
            quad: ev.quad,
            gamma: gamma_generator_name(FlipRoles::from_event(ev)),
            t_lo,
            t_hi,
        }
    }
}

impl From<&FlipRecord> for FlipEvent {
    fn from(r: &FlipRecord) -> Self {
        let ev = FlipEvent::new(r.removed, r.inserted);
        match (&r.t_lo, &r.t_hi) {
            (Some(lo), Some(hi)) => ev.with_bracket(lo.clone(), hi.clone()),
            _ => ev,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn basis(ts: &[[usize; 3]]) -> OrderedBasis {
        OrderedBasis::new(ts.iter().map(|t| Triangle::new(t[0], t[1], t[2])).collect())
    }

    fn square_bases() -> (OrderedBasis, OrderedBasis) {
        (basis(&[[1, 2, 3], [1, 3, 4]]), basis(&[[1, 2, 4], [2, 3, 4]]))
    }

    #[test]
    fn active_block_at_unit_labels() {
        let (from, to) = square_bases();
        let roles = FlipRoles::new(1, 2, 3, 4).unwrap();
        let fm = build_flip_matrix(roles, &from, &to, &LabelMap::identity(4)).unwrap();
        let expected = RationalMatrix::from_rows(vec![vec![q(3, 2), q(1, 2)], vec![q(-1, 2), q(1, 2)]]).unwrap();
        assert_eq!(fm.matrix, expected);
        assert_eq!(fm.matrix.column_sums(), vec![q(1, 1), q(1, 1)]);

        let swapped = FlipRoles::new(3, 2, 1, 4).unwrap();
        let fm2 = build_flip_matrix(swapped, &from, &to, &LabelMap::identity(4)).unwrap();
        assert_eq!(fm2.matrix, expected);
    }

    #[test]
    fn reverse_builds_the_inverse() {
        let (from, to) = square_bases();
        let labels = LabelMap::identity(4);
        let roles = FlipRoles::new(1, 2, 3, 4).unwrap();
        let fwd = build_flip_matrix(roles, &from, &to, &labels).unwrap();
        let back = build_flip_matrix(reverse_roles(roles), &to, &from, &labels).unwrap();
        assert!(back.matrix.mul(&fwd.matrix).unwrap().is_identity());
        assert_eq!(fwd.matrix.inverse().unwrap(), back.matrix);
    }

    #[test]
    fn reverse_roles_swaps_pairs() {
        let r = FlipRoles::new(1, 2, 3, 4).unwrap();
        let rev = reverse_roles(r);
        assert_eq!(rev.removed(), [2, 4]);
        assert_eq!(rev.inserted(), [1, 3]);
        assert_eq!(reverse_roles(rev), r);
    }

    #[test]
    fn gamma_names() {
        let name = |i, j, k, l| gamma_generator_name(FlipRoles::new(i, j, k, l).unwrap());
        assert_eq!(name(1, 2, 3, 4), "d(1 2 3 4)");
        assert_eq!(name(3, 2, 1, 4), "d(1 2 3 4)");
        assert_eq!(name(2, 3, 4, 1), "d(1 2 3 4)");
        assert_eq!(name(1, 3, 2, 4), "d(1 3 2 4)");
        let ev = FlipEvent::new([1, 3], [2, 4]);
        assert_eq!(FlipRecord::from(&ev).gamma, "d(1 2 3 4)");
    }

    #[test]
    fn errors() {
        let (from, to) = square_bases();
        let mut labels = LabelMap::identity(4);
        labels.insert(3, q(1, 1));
        let roles = FlipRoles::new(1, 2, 3, 4).unwrap();
        assert_eq!(
            build_flip_matrix(roles, &from, &to, &labels).unwrap_err(),
            FlipError::CoincidentLabels(1, 3)
        );
        let wrong = FlipRoles::new(2, 1, 4, 3).unwrap();
        assert!(matches!(
            build_flip_matrix(wrong, &from, &to, &LabelMap::identity(4)),
            Err(FlipError::BasisMismatch { .. })
        ));
        assert!(FlipRoles::new(1, 1, 2, 3).is_err());
    }

    #[test]
    fn record_json() {
        let ev = FlipEvent::new([1, 3], [2, 4]).with_bracket(q(1, 64), q(1, 32));
        let text = serde_json::to_string(&FlipRecord::from(&ev)).unwrap();
        assert_eq!(
            text,
            r#"{"removed":[1,3],"inserted":[2,4],"quad":[1,2,3,4],"gamma":"d(1 2 3 4)","t_lo":"1/64","t_hi":"1/32"}"#
        );
        let back: FlipRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(FlipEvent::from(&back), ev);
    }
}
