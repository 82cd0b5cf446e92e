//! Flip extraction for moving points.
//!
//! Points follow piecewise-linear paths over `[0, 1]`. Rather than solving for
//! the exact event times, the triangulation is rebuilt at exact rational
//! sample times and adjacent samples are compared. An interval whose change is
//! a single flip, certified by a sign change of the quadrilateral's incircle
//! test, is recorded; any other change is bisected until it is.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::delaunay::{build_delaunay, diff_flips, FlipDiff, FlipEvent, OrderedBasis, Triangle, Triangulation};
use crate::error::{DelaunayError, KineticsError};
use crate::flip::{flip_matrix_for_event, FlipMatrix, LabelMap};
use crate::geometry::{incircle, Configuration, Point};
use crate::matrix::RationalMatrix;
use crate::rational::Rational;

/// Piecewise-linear path of one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    index: usize,
    breakpoints: Vec<(Rational, Point)>,
}

impl Trajectory {
    /// Breakpoint times must increase strictly from 0 to 1.
    pub fn new(index: usize, breakpoints: Vec<(Rational, Point)>) -> Result<Self, KineticsError> {
        let bad = |reason: &str| KineticsError::BadTrajectory {
            index,
            reason: reason.to_string(),
        };
        if breakpoints.len() < 2 {
            return Err(bad("needs at least two breakpoints"));
        }
        if !breakpoints[0].0.is_zero() {
            return Err(bad("first breakpoint must be at time 0"));
        }
        if !breakpoints.last().expect("nonempty").0.is_one() {
            return Err(bad("last breakpoint must be at time 1"));
        }
        if breakpoints.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(bad("breakpoint times must increase strictly"));
        }
        Ok(Trajectory { index, breakpoints })
    }

    pub fn constant(index: usize, position: Point) -> Self {
        Trajectory {
            index,
            breakpoints: vec![(Rational::zero(), position.clone()), (Rational::one(), position)],
        }
    }

    /// Visits `waypoints` with times proportional to the Manhattan length of
    /// each leg, so axis-parallel paths move at constant speed.
    pub fn through_waypoints(index: usize, waypoints: &[Point]) -> Result<Self, KineticsError> {
        let legs: Vec<Rational> = waypoints
            .windows(2)
            .map(|w| (&w[1].x - &w[0].x).abs() + (&w[1].y - &w[0].y).abs())
            .collect();
        let total: Rational = legs.iter().sum();
        if total.is_zero() {
            return Err(KineticsError::BadTrajectory {
                index,
                reason: "waypoints do not move".into(),
            });
        }
        let mut t = Rational::zero();
        let mut breakpoints = vec![(t.clone(), waypoints[0].clone())];
        for (leg, p) in legs.iter().zip(&waypoints[1..]) {
            if leg.is_zero() {
                continue;
            }
            t = &t + &(leg / &total);
            breakpoints.push((t.clone(), p.clone()));
        }
        Trajectory::new(index, breakpoints)
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn breakpoints(&self) -> &[(Rational, Point)] {
        &self.breakpoints
    }

    pub fn is_constant(&self) -> bool {
        self.breakpoints.windows(2).all(|w| w[0].1 == w[1].1)
    }

    pub fn start(&self) -> &Point {
        &self.breakpoints[0].1
    }

    pub fn end(&self) -> &Point {
        &self.breakpoints.last().expect("nonempty").1
    }

    /// Position at `t`, which must lie in `[0, 1]`.
    pub fn position_at(&self, t: &Rational) -> Point {
        let seg = self.breakpoints.windows(2).find(|w| *t <= w[1].0).unwrap_or_else(|| {
            let n = self.breakpoints.len();
            &self.breakpoints[n - 2..]
        });
        let (t0, p0) = &seg[0];
        let (t1, p1) = &seg[1];
        if t == t0 {
            return p0.clone();
        }
        if t == t1 {
            return p1.clone();
        }
        let s = &(t - t0) / &(t1 - t0);
        p0.lerp(p1, &s)
    }

    /// The same path traversed backwards in time.
    pub fn reversed(&self) -> Trajectory {
        let one = Rational::one();
        Trajectory {
            index: self.index,
            breakpoints: self
                .breakpoints
                .iter()
                .rev()
                .map(|(t, p)| (&one - t, p.clone()))
                .collect(),
        }
    }

    /// Runs this path over `[start, start + span]` of a longer timeline.
    fn rescaled(&self, start: &Rational, span: &Rational) -> Vec<(Rational, Point)> {
        self.breakpoints
            .iter()
            .map(|(t, p)| (start + &(t * span), p.clone()))
            .collect()
    }
}

/// One trajectory per point of a base configuration. The base supplies
/// indices, labels and the boundary; its positions are those at time 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrajectorySet {
    base: Configuration,
    trajectories: BTreeMap<usize, Trajectory>,
}

impl TrajectorySet {
    pub fn new(base: Configuration, trajectories: Vec<Trajectory>) -> Result<Self, KineticsError> {
        let mut map = BTreeMap::new();
        for tr in trajectories {
            let index = tr.index;
            if base.point(index).is_none() {
                return Err(KineticsError::BadTrajectory {
                    index,
                    reason: "no such point in the configuration".into(),
                });
            }
            if map.insert(index, tr).is_some() {
                return Err(KineticsError::BadTrajectory {
                    index,
                    reason: "duplicate trajectory".into(),
                });
            }
        }
        for p in base.points() {
            let Some(tr) = map.get(&p.index) else {
                return Err(KineticsError::BadTrajectory {
                    index: p.index,
                    reason: "missing trajectory".into(),
                });
            };
            if base.boundary().contains(&p.index) && !tr.is_constant() {
                return Err(KineticsError::BadTrajectory {
                    index: p.index,
                    reason: "boundary points must stay fixed".into(),
                });
            }
        }
        let base = base.with_positions(|i| map[&i].start().clone())?;
        Ok(TrajectorySet {
            base,
            trajectories: map,
        })
    }

    /// Every point stays at its position in `base`.
    pub fn stationary(base: &Configuration) -> Self {
        let trajectories = base
            .points()
            .iter()
            .map(|p| (p.index, Trajectory::constant(p.index, p.position())))
            .collect();
        TrajectorySet {
            base: base.clone(),
            trajectories,
        }
    }

    pub fn base(&self) -> &Configuration {
        &self.base
    }

    pub fn trajectory(&self, index: usize) -> Option<&Trajectory> {
        self.trajectories.get(&index)
    }

    pub fn trajectories(&self) -> impl Iterator<Item = &Trajectory> {
        self.trajectories.values()
    }

    pub fn labels(&self) -> LabelMap {
        LabelMap::from_config(&self.base)
    }

    pub fn reversed(&self) -> TrajectorySet {
        let trajectories: BTreeMap<usize, Trajectory> =
            self.trajectories.iter().map(|(&i, tr)| (i, tr.reversed())).collect();
        let base = self
            .base
            .with_positions(|i| trajectories[&i].start().clone())
            .expect("endpoint of a valid motion");
        TrajectorySet { base, trajectories }
    }

    /// Plays the sets one after another, each in an equal share of `[0, 1]`.
    /// Consecutive sets must meet: each ends where the next starts.
    pub fn concat(sets: &[TrajectorySet]) -> Result<TrajectorySet, KineticsError> {
        let Some(first) = sets.first() else {
            return Err(KineticsError::BadTrajectory {
                index: 0,
                reason: "nothing to concatenate".into(),
            });
        };
        let span = Rational::new(1, sets.len() as i64);
        let mut out = Vec::new();
        for p in first.base.points() {
            let mut breakpoints: Vec<(Rational, Point)> = Vec::new();
            for (k, set) in sets.iter().enumerate() {
                let tr = set.trajectory(p.index).ok_or_else(|| KineticsError::BadTrajectory {
                    index: p.index,
                    reason: "missing from a concatenated set".into(),
                })?;
                let start = &span * &Rational::from(k as i64);
                let mut pts = tr.rescaled(&start, &span);
                if let Some((_, last)) = breakpoints.last() {
                    if *last != pts[0].1 {
                        return Err(KineticsError::BadTrajectory {
                            index: p.index,
                            reason: format!("segment {k} does not start where the previous ended"),
                        });
                    }
                    pts.remove(0);
                }
                breakpoints.extend(pts);
            }
            out.push(Trajectory::new(p.index, breakpoints)?);
        }
        TrajectorySet::new(first.base.clone(), out)
    }
}

/// Exact positions of every point at time `t`.
pub fn configuration_at(ts: &TrajectorySet, t: &Rational) -> Result<Configuration, KineticsError> {
    if *t < 0 || *t > 1 {
        return Err(KineticsError::TimeOutOfRange(t.to_string()));
    }
    Ok(ts.base.with_positions(|i| ts.trajectories[&i].position_at(t))?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractOptions {
    /// Initial spacing of sample times.
    pub step: Rational,
    /// Narrowest interval bisection may produce.
    pub floor: Rational,
    /// Attempts to move a degenerate sample time before giving up.
    pub jitter_retries: usize,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            step: Rational::new(1, 64),
            floor: Rational::new(BigInt::from(1), BigInt::from(1u64 << 40)),
            jitter_retries: 6,
        }
    }
}

/// Time-ordered flips with the triangulations at both ends.
#[derive(Debug, Clone)]
pub struct FlipSequence {
    pub events: Vec<FlipEvent>,
    pub initial: Triangulation,
    pub terminal: Triangulation,
}

impl FlipSequence {
    /// Folds the events over the initial triangle set.
    pub fn replay(&self) -> Result<BTreeSet<Triangle>, KineticsError> {
        let mut set = self.initial.triangles().clone();
        for ev in &self.events {
            set = ev.apply(&set)?;
        }
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Flip matrices in time order.
    pub fn flip_matrices(&self, labels: &LabelMap) -> Result<Vec<FlipMatrix>, KineticsError> {
        let mut basis = self.initial.ordered_basis();
        let mut out = Vec::with_capacity(self.events.len());
        for ev in &self.events {
            let fm = flip_matrix_for_event(ev, &basis, labels)?;
            basis = fm.to_basis.clone();
            out.push(fm);
        }
        Ok(out)
    }

    /// Product of all flip matrices, later flips on the left.
    pub fn product(&self, labels: &LabelMap) -> Result<RationalMatrix, KineticsError> {
        let size = self.initial.len();
        let mut acc = RationalMatrix::identity(size);
        for fm in self.flip_matrices(labels)? {
            acc = fm.matrix.mul(&acc).expect("bases have equal size");
        }
        Ok(acc)
    }

    pub fn initial_basis(&self) -> OrderedBasis {
        self.initial.ordered_basis()
    }
}

struct Extractor<'a> {
    ts: &'a TrajectorySet,
    opts: &'a ExtractOptions,
    events: Vec<FlipEvent>,
}

impl Extractor<'_> {
    fn triangulate(&self, t: &Rational) -> Result<Result<Triangulation, DelaunayError>, KineticsError> {
        let config = configuration_at(self.ts, t)?;
        Ok(build_delaunay(&config))
    }

    /// Triangulates at `t`, nudging the time inside `(lo, hi)` while the
    /// configuration is degenerate.
    fn sample(&self, t: Rational, lo: &Rational, hi: &Rational) -> Result<(Rational, Triangulation), KineticsError> {
        if let Ok(tri) = self.triangulate(&t)? {
            return Ok((t, tri));
        }
        let mut offset = &self.opts.floor / &Rational::from(3);
        for _ in 0..self.opts.jitter_retries {
            for candidate in [&t + &offset, &t - &offset] {
                if candidate > *lo && candidate < *hi {
                    if let Ok(tri) = self.triangulate(&candidate)? {
                        return Ok((candidate, tri));
                    }
                }
            }
            offset = &offset / &Rational::from(3);
        }
        Err(KineticsError::PersistentDegeneracy(t.to_string()))
    }

    fn certified(&self, ev: &FlipEvent, a: &Triangulation, b: &Triangulation) -> bool {
        let sign = |tri: &Triangulation| {
            let [i, k] = ev.removed;
            let [j, l] = ev.inserted;
            let p = |idx: usize| tri.config().point(idx).expect("known index").position();
            incircle(&p(i), &p(k), &p(j), &p(l)).ok()
        };
        // l is outside circle(i, k, j) before the flip and inside after
        matches!((sign(a), sign(b)), (Some(x), Some(y)) if x < 0 && y > 0)
    }

    fn resolve(
        &mut self,
        t_a: &Rational,
        tri_a: &Triangulation,
        t_b: &Rational,
        tri_b: &Triangulation,
    ) -> Result<(), KineticsError> {
        let diff = diff_flips(tri_a, tri_b);
        match &diff {
            FlipDiff::Flips(evs) if evs.is_empty() => return Ok(()),
            FlipDiff::Flips(evs) if evs.len() == 1 && self.certified(&evs[0], tri_a, tri_b) => {
                self.events.push(evs[0].clone().with_bracket(t_a.clone(), t_b.clone()));
                return Ok(());
            }
            _ => {}
        }
        let width = t_b - t_a;
        if width <= self.opts.floor {
            return match diff {
                FlipDiff::Flips(evs) if far_apart(&evs) => {
                    for ev in evs {
                        self.events.push(ev.with_bracket(t_a.clone(), t_b.clone()));
                    }
                    Ok(())
                }
                _ => Err(KineticsError::UnresolvedEvent {
                    t_lo: t_a.to_string(),
                    t_hi: t_b.to_string(),
                }),
            };
        }
        let mid = &(t_a + t_b) / &Rational::from(2);
        let (t_m, tri_m) = self.sample(mid, t_a, t_b)?;
        self.resolve(t_a, tri_a, &t_m, &tri_m)?;
        self.resolve(&t_m, &tri_m, t_b, tri_b)
    }
}

/// Quadrilaterals pairwise share at most two points.
fn far_apart(events: &[FlipEvent]) -> bool {
    events.iter().enumerate().all(|(a, x)| {
        events[a + 1..]
            .iter()
            .all(|y| x.quad.iter().filter(|v| y.quad.contains(v)).count() <= 2)
    })
}

pub fn extract_flip_sequence(ts: &TrajectorySet, opts: &ExtractOptions) -> Result<FlipSequence, KineticsError> {
    if opts.step.signum() <= 0 || opts.floor.signum() <= 0 || opts.step <= opts.floor {
        return Err(KineticsError::BadStep);
    }
    let zero = Rational::zero();
    let one = Rational::one();
    let initial = build_delaunay(&configuration_at(ts, &zero)?).map_err(KineticsError::DegenerateEndpoint)?;
    let terminal = build_delaunay(&configuration_at(ts, &one)?).map_err(KineticsError::DegenerateEndpoint)?;

    let mut ex = Extractor {
        ts,
        opts,
        events: Vec::new(),
    };
    let mut t_prev = zero;
    let mut tri_prev = initial.clone();
    let mut k = 1i64;
    loop {
        let nominal = &opts.step * &Rational::from(k);
        let (t_next, tri_next) = if nominal >= one {
            (one.clone(), terminal.clone())
        } else {
            ex.sample(nominal, &t_prev, &one)?
        };
        ex.resolve(&t_prev, &tri_prev, &t_next, &tri_next)?;
        if t_next == one {
            break;
        }
        t_prev = t_next;
        tri_prev = tri_next;
        k += 1;
    }
    Ok(FlipSequence {
        events: ex.events,
        initial,
        terminal,
    })
}

#[derive(Serialize, Deserialize)]
struct TrajectoryJson {
    index: usize,
    breakpoints: Vec<(Rational, Rational, Rational)>,
}

/// `{"trajectories":[{"index":4,"breakpoints":[["0","x","y"],...]},...]}`
#[derive(Serialize, Deserialize)]
pub struct TrajectorySetJson {
    trajectories: Vec<TrajectoryJson>,
}

impl TrajectorySet {
    pub fn to_json(&self) -> TrajectorySetJson {
        TrajectorySetJson {
            trajectories: self
                .trajectories
                .values()
                .map(|tr| TrajectoryJson {
                    index: tr.index,
                    breakpoints: tr
                        .breakpoints
                        .iter()
                        .map(|(t, p)| (t.clone(), p.x.clone(), p.y.clone()))
                        .collect(),
                })
                .collect(),
        }
    }

    /// Reads trajectories for the points of `base`, which supplies the
    /// labels and the boundary.
    pub fn from_json(base: &Configuration, json: TrajectorySetJson) -> Result<Self, KineticsError> {
        let trajectories = json
            .trajectories
            .into_iter()
            .map(|tr| {
                Trajectory::new(
                    tr.index,
                    tr.breakpoints
                        .into_iter()
                        .map(|(t, x, y)| (t, Point::new(x, y)))
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        TrajectorySet::new(base.clone(), trajectories)
    }
}
