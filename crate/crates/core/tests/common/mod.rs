//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use flipbraid::kinetics::TrajectorySet;
use flipbraid::{Configuration, FlipEvent, LabeledPoint, Point, Rational, Triangle};
use rand::Rng;

/// Sign of the in-circle determinant of `d` against the circle through
/// `a, b, c`, normalised so that +1 means strictly inside. Uses a float
/// filter and falls back to exact arithmetic near zero.
pub fn in_circle(a: &Point, b: &Point, c: &Point, d: &Point) -> i32 {
    let f = |p: &Point| (p.x.to_f64(), p.y.to_f64());
    let (a, b, c, d) = (a, b, c, d);
    let ((ax, ay), (bx, by), (cx, cy), (dx, dy)) = (f(a), f(b), f(c), f(d));
    let orient = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    let (adx, ady, bdx, bdy, cdx, cdy) = (ax - dx, ay - dy, bx - dx, by - dy, cx - dx, cy - dy);
    let (al, bl, cl) = (adx * adx + ady * ady, bdx * bdx + bdy * bdy, cdx * cdx + cdy * cdy);
    let det = adx * (bdy * cl - bl * cdy) - ady * (bdx * cl - bl * cdx) + al * (bdx * cdy - bdy * cdx);
    let scale = (adx.abs() + ady.abs() + bdx.abs() + bdy.abs() + cdx.abs() + cdy.abs()).powi(4);
    let oscale = (bx - ax)
        .abs()
        .max((cx - ax).abs())
        .max((by - ay).abs())
        .max((cy - ay).abs())
        .powi(2);
    if det.abs() > 1e-9 * scale && orient.abs() > 1e-9 * oscale {
        return (det.signum() * orient.signum()) as i32;
    }
    exact_in_circle(a, b, c, d)
}

fn sign(r: &Rational) -> i32 {
    r.signum()
}

pub fn exact_in_circle(a: &Point, b: &Point, c: &Point, d: &Point) -> i32 {
    let orient = &(&(&b.x - &a.x) * &(&c.y - &a.y)) - &(&(&b.y - &a.y) * &(&c.x - &a.x));
    let rel = |p: &Point| (&p.x - &d.x, &p.y - &d.y);
    let ((adx, ady), (bdx, bdy), (cdx, cdy)) = (rel(a), rel(b), rel(c));
    let lift = |x: &Rational, y: &Rational| &(x * x) + &(y * y);
    let (al, bl, cl) = (lift(&adx, &ady), lift(&bdx, &bdy), lift(&cdx, &cdy));
    let det = &(&(&adx * &(&(&bdy * &cl) - &(&bl * &cdy))) - &(&ady * &(&(&bdx * &cl) - &(&bl * &cdx))))
        + &(&al * &(&(&bdx * &cdy) - &(&bdy * &cdx)));
    sign(&det) * sign(&orient)
}

fn collinear(a: &Point, b: &Point, c: &Point) -> bool {
    (&(&b.x - &a.x) * &(&c.y - &a.y)) == (&(&b.y - &a.y) * &(&c.x - &a.x))
}

/// Every triangle with an empty open circumdisk. `None` if some point lies
/// on the circle of an otherwise empty triangle.
pub fn brute_force_delaunay(config: &Configuration) -> Option<BTreeSet<Triangle>> {
    let pts: Vec<(usize, Point)> = config.points().iter().map(|p| (p.index, p.position())).collect();
    let mut out = BTreeSet::new();
    for x in 0..pts.len() {
        for y in x + 1..pts.len() {
            for z in y + 1..pts.len() {
                let (a, b, c) = (&pts[x].1, &pts[y].1, &pts[z].1);
                if collinear(a, b, c) {
                    continue;
                }
                let mut empty = true;
                let mut on_circle = false;
                for (w, (_, d)) in pts.iter().enumerate() {
                    if w == x || w == y || w == z {
                        continue;
                    }
                    match in_circle(a, b, c, d) {
                        1 => {
                            empty = false;
                            break;
                        }
                        0 => on_circle = true,
                        _ => {}
                    }
                }
                if empty {
                    if on_circle {
                        return None;
                    }
                    out.insert(Triangle::new(pts[x].0, pts[y].0, pts[z].0));
                }
            }
        }
    }
    Some(out)
}

/// Decomposes a triangle-set change into pairwise far-apart flips, sorted by
/// quad. `None` when the change is not such a set.
pub fn decompose(before: &BTreeSet<Triangle>, after: &BTreeSet<Triangle>) -> Option<Vec<FlipEvent>> {
    let removed: Vec<Triangle> = before.difference(after).copied().collect();
    let inserted: BTreeSet<Triangle> = after.difference(before).copied().collect();
    let mut flips = Vec::new();
    let mut used = BTreeSet::new();
    for (p, t) in removed.iter().enumerate() {
        for u in &removed[p + 1..] {
            let shared: Vec<usize> = t.vertices().into_iter().filter(|v| u.contains(*v)).collect();
            if shared.len() != 2 {
                continue;
            }
            let w = t.vertices().into_iter().find(|v| !shared.contains(v)).unwrap();
            let z = u.vertices().into_iter().find(|v| !shared.contains(v)).unwrap();
            let new = [Triangle::new(shared[0], w, z), Triangle::new(shared[1], w, z)];
            if new.iter().all(|n| inserted.contains(n)) {
                for tri in [*t, *u, new[0], new[1]] {
                    if !used.insert(tri) {
                        return None;
                    }
                }
                flips.push(FlipEvent::new([shared[0], shared[1]], [w, z]));
            }
        }
    }
    if used.len() != removed.len() + inserted.len() {
        return None;
    }
    for (a, f) in flips.iter().enumerate() {
        for g in &flips[a + 1..] {
            if f.quad.iter().filter(|v| g.quad.contains(v)).count() > 2 {
                return None;
            }
        }
    }
    flips.sort_by_key(|f| f.quad);
    Some(flips)
}

fn positions_at(ts: &TrajectorySet, t: &Rational) -> Configuration {
    ts.base()
        .with_positions(|i| ts.trajectory(i).expect("every point has a trajectory").position_at(t))
        .expect("motion stays inside the boundary")
}

/// Brute-force triangulation at `t`, nudging `t` forward past degenerate times.
fn sample(ts: &TrajectorySet, t: &Rational, nudge: &Rational) -> (Rational, BTreeSet<Triangle>) {
    let mut t = t.clone();
    for _ in 0..20 {
        if let Some(set) = brute_force_delaunay(&positions_at(ts, &t)) {
            return (t, set);
        }
        t = &t + nudge;
    }
    panic!("oracle stuck at degenerate time {t}");
}

fn refine(
    ts: &TrajectorySet,
    (t0, s0): (&Rational, &BTreeSet<Triangle>),
    (t1, s1): (&Rational, &BTreeSet<Triangle>),
    depth: usize,
    out: &mut Vec<FlipEvent>,
) {
    if s0 == s1 {
        return;
    }
    if let Some(flips) = decompose(s0, s1) {
        out.extend(flips);
        return;
    }
    assert!(depth > 0, "oracle could not resolve the change in ({t0}, {t1})");
    let parts = 10;
    let width = &(t1 - t0) / Rational::from(parts);
    let nudge = &width / Rational::from(1009);
    let mut prev = (t0.clone(), s0.clone());
    for p in 1..=parts {
        let next = if p == parts {
            (t1.clone(), s1.clone())
        } else {
            sample(ts, &(t0 + &(&width * Rational::from(p))), &nudge)
        };
        refine(ts, (&prev.0, &prev.1), (&next.0, &next.1), depth - 1, out);
        prev = next;
    }
}

/// Flips observed by sampling at `1/steps` with a brute-force triangulation,
/// refining only where one step hides dependent flips.
pub fn dense_oracle(ts: &TrajectorySet, steps: i64) -> (BTreeSet<Triangle>, Vec<FlipEvent>) {
    let step = Rational::new(1, steps);
    let nudge = &step / Rational::from(1009);
    let (_, start) = sample(ts, &Rational::zero(), &nudge);
    let mut prev = (Rational::zero(), start.clone());
    let mut events = Vec::new();
    for k in 1..=steps {
        let t = Rational::new(k, steps);
        let next = if k == steps {
            (
                t.clone(),
                brute_force_delaunay(&positions_at(ts, &t)).expect("endpoint in general position"),
            )
        } else {
            sample(ts, &t, &nudge)
        };
        refine(ts, (&prev.0, &prev.1), (&next.0, &next.1), 4, &mut events);
        prev = next;
    }
    (start, events)
}

/// Random configuration with `interior` points inside a random boundary
/// triangle; labels are random distinct rationals. Retries until general.
pub fn random_configuration(rng: &mut impl Rng, interior: usize) -> Configuration {
    loop {
        let mut pts = Vec::new();
        let corner = |rng: &mut dyn rand::RngCore, x0: i64, y0: i64| {
            Point::from_ints(x0 + rng.gen_range(-20..=20), y0 + rng.gen_range(-20..=20))
        };
        let boundary = [corner(rng, -200, -150), corner(rng, 200, -150), corner(rng, 0, 200)];
        let mut zetas = BTreeSet::new();
        while zetas.len() < interior + 3 {
            zetas.insert(Rational::new(rng.gen_range(-1000..=1000), rng.gen_range(1..=9)));
        }
        let zetas: Vec<Rational> = zetas.into_iter().collect();
        for (k, p) in boundary.into_iter().enumerate() {
            pts.push(LabeledPoint::new(k + 1, p, zetas[k].clone()));
        }
        for k in 0..interior {
            let x = Rational::new(rng.gen_range(-600..=600), rng.gen_range(1..=8));
            let y = Rational::new(rng.gen_range(-500..=500), rng.gen_range(1..=8));
            pts.push(LabeledPoint::new(k + 4, Point::new(x, y), zetas[k + 3].clone()));
        }
        let Ok(config) = Configuration::new(pts, [1, 2, 3]) else {
            continue;
        };
        if flipbraid::validate_general_position(&config).is_ok() {
            return config;
        }
    }
}
