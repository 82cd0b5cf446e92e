//! Exact planar predicates and the labelled point configuration.
//!
//! Coordinates are rationals. The predicates clear denominators over the
//! handful of points involved and evaluate the determinants over big
//! integers, which keeps them exact without any gcd work in the inner loop.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(Rational::from(x), Rational::from(y))
    }

    /// `self + (other - self) * t`
    pub fn lerp(&self, other: &Point, t: &Rational) -> Point {
        Point {
            x: &self.x + &(&(&other.x - &self.x) * t),
            y: &self.y + &(&(&other.y - &self.y) * t),
        }
    }
}

/// A point on integer coordinates, obtained by clearing a common denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct IntPoint {
    pub x: BigInt,
    pub y: BigInt,
}

/// Scales all points by the lcm of their denominators. Orientation and
/// incircle signs are invariant under this positive scaling.
pub(crate) fn clear_denominators<'a>(points: impl IntoIterator<Item = &'a Point> + Clone) -> Vec<IntPoint> {
    let lcm = points
        .clone()
        .into_iter()
        .fold(BigInt::one(), |acc, p| acc.lcm(p.x.denom()).lcm(p.y.denom()));
    points
        .into_iter()
        .map(|p| IntPoint {
            x: p.x.numer() * (&lcm / p.x.denom()),
            y: p.y.numer() * (&lcm / p.y.denom()),
        })
        .collect()
}

fn sign(v: &BigInt) -> i32 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

pub(crate) fn orient2d_int(a: &IntPoint, b: &IntPoint, c: &IntPoint) -> i32 {
    let det = (&b.x - &a.x) * (&c.y - &a.y) - (&b.y - &a.y) * (&c.x - &a.x);
    sign(&det)
}

/// Raw lifted determinant; positive iff `d` is inside the circle through
/// counterclockwise `a, b, c`.
fn incircle_det(a: &IntPoint, b: &IntPoint, c: &IntPoint, d: &IntPoint) -> BigInt {
    let adx = &a.x - &d.x;
    let ady = &a.y - &d.y;
    let bdx = &b.x - &d.x;
    let bdy = &b.y - &d.y;
    let cdx = &c.x - &d.x;
    let cdy = &c.y - &d.y;
    let alift = &adx * &adx + &ady * &ady;
    let blift = &bdx * &bdx + &bdy * &bdy;
    let clift = &cdx * &cdx + &cdy * &cdy;
    alift * (&bdx * &cdy - &bdy * &cdx) + blift * (&cdx * &ady - &cdy * &adx) + clift * (&adx * &bdy - &ady * &bdx)
}

pub(crate) fn incircle_int(a: &IntPoint, b: &IntPoint, c: &IntPoint, d: &IntPoint) -> Result<i32, GeometryError> {
    let o = orient2d_int(a, b, c);
    if o == 0 {
        return Err(GeometryError::DegenerateCircumcircle);
    }
    Ok(o * sign(&incircle_det(a, b, c, d)))
}

/// Sign of the cross product `(b - a) x (c - a)`; +1 means counterclockwise.
pub fn orient2d(a: &Point, b: &Point, c: &Point) -> i32 {
    let p = clear_denominators([a, b, c]);
    orient2d_int(&p[0], &p[1], &p[2])
}

/// +1 if `d` lies strictly inside the circumcircle of `a, b, c`, 0 if the four
/// points are cocircular, -1 if outside. The orientation of `a, b, c` does not
/// matter.
pub fn incircle(a: &Point, b: &Point, c: &Point, d: &Point) -> Result<i32, GeometryError> {
    let p = clear_denominators([a, b, c, d]);
    incircle_int(&p[0], &p[1], &p[2], &p[3])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub index: usize,
    pub x: Rational,
    pub y: Rational,
    pub zeta: Rational,
}

impl LabeledPoint {
    pub fn new(index: usize, position: Point, zeta: Rational) -> Self {
        LabeledPoint {
            index,
            x: position.x,
            y: position.y,
            zeta,
        }
    }

    pub fn position(&self) -> Point {
        Point::new(self.x.clone(), self.y.clone())
    }
}

/// The full point state: three fixed boundary vertices plus the mobile
/// interior points. Points are kept sorted by index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ConfigurationJson", into = "ConfigurationJson")]
pub struct Configuration {
    points: Vec<LabeledPoint>,
    boundary: [usize; 3],
}

#[derive(Serialize, Deserialize)]
struct ConfigurationJson {
    points: Vec<LabeledPoint>,
    boundary: [usize; 3],
}

impl TryFrom<ConfigurationJson> for Configuration {
    type Error = GeometryError;

    fn try_from(raw: ConfigurationJson) -> Result<Self, Self::Error> {
        Configuration::new(raw.points, raw.boundary)
    }
}

impl From<Configuration> for ConfigurationJson {
    fn from(c: Configuration) -> Self {
        ConfigurationJson {
            points: c.points,
            boundary: c.boundary,
        }
    }
}

impl Configuration {
    /// Validates unique indices, pairwise distinct labels, a nondegenerate
    /// boundary and strict containment of every interior point.
    pub fn new(mut points: Vec<LabeledPoint>, boundary: [usize; 3]) -> Result<Self, GeometryError> {
        points.sort_by_key(|p| p.index);
        for w in points.windows(2) {
            if w[0].index == w[1].index {
                return Err(GeometryError::DuplicateIndex(w[0].index));
            }
        }
        for (a, p) in points.iter().enumerate() {
            for q in &points[a + 1..] {
                if p.zeta == q.zeta {
                    return Err(GeometryError::CoincidentLabels(p.index, q.index, p.zeta.to_string()));
                }
            }
        }
        let distinct: BTreeSet<usize> = boundary.iter().copied().collect();
        if distinct.len() != 3 {
            return Err(GeometryError::BadBoundary);
        }
        let config = Configuration { points, boundary };
        for &b in &boundary {
            if config.position_of(b).is_none() {
                return Err(GeometryError::BadBoundary);
            }
        }
        let [a, b, c] = boundary.map(|i| config.point(i).expect("checked").position());
        let orient = orient2d(&a, &b, &c);
        if orient == 0 {
            return Err(GeometryError::DegenerateBoundary);
        }
        for p in config.interior_points() {
            let pos = p.position();
            let inside = [(&a, &b), (&b, &c), (&c, &a)]
                .iter()
                .all(|(u, v)| orient2d(u, v, &pos) == orient);
            if !inside {
                return Err(GeometryError::OutsideBoundary(p.index));
            }
        }
        Ok(config)
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn boundary(&self) -> [usize; 3] {
        self.boundary
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of mobile points.
    pub fn interior_count(&self) -> usize {
        self.points.len() - 3
    }

    pub fn interior_points(&self) -> impl Iterator<Item = &LabeledPoint> {
        self.points.iter().filter(move |p| !self.boundary.contains(&p.index))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.points.iter().map(|p| p.index)
    }

    pub(crate) fn position_of(&self, index: usize) -> Option<usize> {
        self.points.binary_search_by_key(&index, |p| p.index).ok()
    }

    pub fn point(&self, index: usize) -> Option<&LabeledPoint> {
        self.position_of(index).map(|k| &self.points[k])
    }

    pub fn zeta(&self, index: usize) -> Option<&Rational> {
        self.point(index).map(|p| &p.zeta)
    }

    /// Same indices and labels with new positions; positions are looked up by
    /// index. Interior containment is rechecked.
    pub fn with_positions(&self, mut position: impl FnMut(usize) -> Point) -> Result<Configuration, GeometryError> {
        let points = self
            .points
            .iter()
            .map(|p| LabeledPoint::new(p.index, position(p.index), p.zeta.clone()))
            .collect();
        Configuration::new(points, self.boundary)
    }

    pub(crate) fn integer_points(&self) -> Vec<IntPoint> {
        let positions: Vec<Point> = self.points.iter().map(LabeledPoint::position).collect();
        clear_denominators(positions.iter())
    }
}

/// Reports every 4-subset of points that are cocircular with no other point of
/// the configuration strictly inside their common circle. An empty list means
/// the configuration is in general position.
pub fn validate_general_position(config: &Configuration) -> Result<(), Vec<[usize; 4]>> {
    let pts = config.integer_points();
    let idx: Vec<usize> = config.indices().collect();
    let m = pts.len();
    let mut offending = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                // three collinear points never share a circle with a fourth
                if orient2d_int(&pts[a], &pts[b], &pts[c]) == 0 {
                    continue;
                }
                for d in c + 1..m {
                    let on_circle = incircle_int(&pts[a], &pts[b], &pts[c], &pts[d]).expect("noncollinear triple");
                    if on_circle != 0 {
                        continue;
                    }
                    let disk_empty = (0..m)
                        .filter(|&e| ![a, b, c, d].contains(&e))
                        .all(|e| incircle_int(&pts[a], &pts[b], &pts[c], &pts[e]).expect("noncollinear") <= 0);
                    if disk_empty {
                        offending.push([idx[a], idx[b], idx[c], idx[d]]);
                    }
                }
            }
        }
    }
    if offending.is_empty() {
        Ok(())
    } else {
        Err(offending)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use proptest::prelude::*;

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn pq(x: (i64, i64), y: (i64, i64)) -> Point {
        Point::new(q(x.0, x.1), q(y.0, y.1))
    }

    #[test]
    fn orient_examples() {
        assert_eq!(orient2d(&p(0, 0), &p(1, 0), &p(0, 1)), 1);
        assert_eq!(orient2d(&p(0, 0), &p(1, 1), &p(2, 2)), 0);
        assert_eq!(orient2d(&p(0, 0), &p(0, 1), &p(1, 0)), -1);
    }

    #[test]
    fn incircle_examples() {
        let (a, b, c) = (p(0, 0), p(1, 0), p(0, 1));
        assert_eq!(incircle(&a, &b, &c, &p(1, 1)).unwrap(), 0);
        assert_eq!(incircle(&a, &b, &c, &pq((1, 4), (1, 4))).unwrap(), 1);
        assert_eq!(incircle(&a, &b, &c, &p(2, 2)).unwrap(), -1);
        // clockwise input gives the same answers
        assert_eq!(incircle(&a, &c, &b, &pq((1, 4), (1, 4))).unwrap(), 1);
        assert_eq!(incircle(&a, &c, &b, &p(2, 2)).unwrap(), -1);
    }

    #[test]
    fn incircle_rejects_collinear() {
        assert_eq!(
            incircle(&p(0, 0), &p(1, 1), &p(2, 2), &p(5, 0)),
            Err(GeometryError::DegenerateCircumcircle)
        );
    }

    fn lp(index: usize, x: i64, y: i64) -> LabeledPoint {
        LabeledPoint::new(index, p(x, y), Rational::from(index as i64))
    }

    fn far_triangle() -> Vec<LabeledPoint> {
        vec![lp(1, -100, -100), lp(2, 100, -100), lp(3, 0, 100)]
    }

    #[test]
    fn general_position_examples() {
        let tri = Configuration::new(far_triangle(), [1, 2, 3]).unwrap();
        assert_eq!(validate_general_position(&tri), Ok(()));

        let mut pts = far_triangle();
        pts.extend([lp(4, 0, 0), lp(5, 1, 0), lp(6, 1, 1), lp(7, 0, 1)]);
        let square = Configuration::new(pts, [1, 2, 3]).unwrap();
        assert_eq!(validate_general_position(&square), Err(vec![[4, 5, 6, 7]]));
    }

    #[test]
    fn cocircular_with_occupied_disk_is_fine() {
        let mut pts = far_triangle();
        pts.extend([lp(4, -2, 0), lp(5, 2, 0), lp(6, 0, 2), lp(7, 0, -2), lp(8, 1, 0)]);
        let c = Configuration::new(pts, [1, 2, 3]).unwrap();
        assert_eq!(validate_general_position(&c), Ok(()));
    }

    #[test]
    fn configuration_checks() {
        let mut pts = far_triangle();
        pts.push(lp(4, 0, 0));
        pts.push(lp(4, 1, 0));
        assert_eq!(
            Configuration::new(pts, [1, 2, 3]),
            Err(GeometryError::DuplicateIndex(4))
        );

        let mut pts = far_triangle();
        pts.push(LabeledPoint::new(4, p(0, 0), Rational::from(1)));
        assert!(matches!(
            Configuration::new(pts, [1, 2, 3]),
            Err(GeometryError::CoincidentLabels(1, 4, _))
        ));

        let mut pts = far_triangle();
        pts.push(lp(4, 0, -100));
        assert_eq!(
            Configuration::new(pts, [1, 2, 3]),
            Err(GeometryError::OutsideBoundary(4))
        );

        assert_eq!(
            Configuration::new(far_triangle(), [1, 2, 2]),
            Err(GeometryError::BadBoundary)
        );
    }

    #[test]
    fn configuration_json() {
        let mut pts = far_triangle();
        pts.push(LabeledPoint::new(4, pq((1, 2), (-3, 4)), q(7, 3)));
        let c = Configuration::new(pts, [1, 2, 3]).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains(r#"{"index":4,"x":"1/2","y":"-3/4","zeta":"7/3"}"#));
        assert!(text.ends_with(r#""boundary":[1,2,3]}"#));
        let back: Configuration = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);

        let bad = text.replace(r#""zeta":"7/3""#, r#""zeta":"1""#);
        assert!(serde_json::from_str::<Configuration>(&bad).is_err());
    }

    fn coord() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..8).prop_map(|(n, d)| q(n, d))
    }

    fn point() -> impl Strategy<Value = Point> {
        (coord(), coord()).prop_map(|(x, y)| Point::new(x, y))
    }

    fn scaled(p: &Point, s: &Rational) -> Point {
        Point::new(&p.x * s, &p.y * s)
    }

    proptest! {
        #[test]
        fn orient_antisymmetric(a in point(), b in point(), c in point()) {
            prop_assert_eq!(orient2d(&a, &b, &c), -orient2d(&a, &c, &b));
        }

        #[test]
        fn predicates_scale_invariant(
            a in point(), b in point(), c in point(), d in point(),
            s in (1i64..40, 1i64..40).prop_map(|(n, d)| q(n, d)),
        ) {
            let (sa, sb, sc, sd) = (scaled(&a, &s), scaled(&b, &s), scaled(&c, &s), scaled(&d, &s));
            prop_assert_eq!(orient2d(&a, &b, &c), orient2d(&sa, &sb, &sc));
            prop_assert_eq!(incircle(&a, &b, &c, &d), incircle(&sa, &sb, &sc, &sd));
        }

        #[test]
        fn incircle_role_consistency(a in point(), b in point(), c in point(), d in point()) {
            prop_assume!(orient2d(&a, &b, &c) != 0 && orient2d(&a, &b, &d) != 0
                && orient2d(&a, &c, &d) != 0 && orient2d(&b, &c, &d) != 0);
            let s = incircle(&a, &b, &c, &d).unwrap();
            // every role assignment agrees on cocircularity
            let all = [
                incircle(&b, &c, &d, &a).unwrap(),
                incircle(&a, &c, &d, &b).unwrap(),
                incircle(&a, &b, &d, &c).unwrap(),
            ];
            if s == 0 {
                prop_assert!(all.iter().all(|&v| v == 0));
            } else {
                prop_assert!(all.iter().all(|&v| v != 0));
            }
        }

        #[test]
        fn cocircular_quadruples_are_zero_for_every_role(
            picks in prop::sample::subsequence(vec![0usize, 1, 2, 3, 4, 5, 6, 7], 4),
            shift in point(),
        ) {
            let base = [(3i64, 4i64), (4, 3), (5, 0), (0, 5), (-3, 4), (-4, -3), (3, -4), (-5, 0)];
            let pts: Vec<Point> = picks
                .iter()
                .map(|&i| Point::new(&Rational::from(base[i].0) + &shift.x, &Rational::from(base[i].1) + &shift.y))
                .collect();
            for perm in [[0, 1, 2, 3], [1, 2, 3, 0], [2, 3, 0, 1], [3, 0, 1, 2], [1, 0, 2, 3]] {
                let r = incircle(&pts[perm[0]], &pts[perm[1]], &pts[perm[2]], &pts[perm[3]]).unwrap();
                prop_assert_eq!(r, 0);
            }
        }
    }
}
