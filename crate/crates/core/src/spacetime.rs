//! Flat-spacetime layouts, light-speed schedules and the hull condition on
//! the claimed position.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Relative slack applied to every timing comparison.
pub const TIME_TOL: f64 = 1e-12;

/// A point in space, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub const ORIGIN: Position = Position { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::InvalidGeometry(format!("non-finite position ({x}, {y}, {z})")));
        }
        Ok(Self { x, y, z })
    }

    pub fn distance(&self, other: &Position) -> f64 {
        self.sub(other).norm()
    }

    fn sub(&self, o: &Position) -> Position {
        Position { x: self.x - o.x, y: self.y - o.y, z: self.z - o.z }
    }

    fn add_scaled(&self, o: &Position, s: f64) -> Position {
        Position { x: self.x + s * o.x, y: self.y + s * o.y, z: self.z + s * o.z }
    }

    fn dot(&self, o: &Position) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Verifiers, the claimed position, the restricted radius and signal speed.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    verifiers: Vec<Position>,
    receiver: Position,
    l: f64,
    c: f64,
    latency: f64,
    cheaters: Vec<Position>,
}

impl Geometry {
    pub fn new(verifiers: Vec<Position>, receiver: Position, l: f64, c: f64) -> Result<Self> {
        if verifiers.is_empty() {
            return Err(Error::InvalidGeometry("no verifiers".into()));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::InvalidGeometry(format!("restricted radius must be positive, got {l}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidGeometry(format!("signal speed must be positive, got {c}")));
        }
        Ok(Self { verifiers, receiver, l, c, latency: 0.0, cheaters: Vec::new() })
    }

    /// Two verifiers at `(±d, 0, 0)` with the receiver at the origin.
    pub fn collinear(d: f64, l: f64, c: f64) -> Result<Self> {
        Self::new(vec![Position::new(-d, 0.0, 0.0)?, Position::new(d, 0.0, 0.0)?], Position::ORIGIN, l, c)
    }

    /// `n` verifiers on a circle of radius `d` around the receiver (the
    /// equilateral triangle for `n = 3`).
    pub fn regular(n: usize, d: f64, l: f64, c: f64) -> Result<Self> {
        if n == 2 {
            return Self::collinear(d, l, c);
        }
        let verifiers = (0..n)
            .map(|k| {
                let a = PI / 2.0 + 2.0 * PI * k as f64 / n as f64;
                Position::new(d * a.cos(), d * a.sin(), 0.0)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(verifiers, Position::ORIGIN, l, c)
    }

    pub fn equilateral(d: f64, l: f64, c: f64) -> Result<Self> {
        Self::regular(3, d, l, c)
    }

    /// Places the cheaters explicitly; each must stay outside the open ball.
    pub fn with_cheaters(mut self, cheaters: Vec<Position>) -> Result<Self> {
        for (k, b) in cheaters.iter().enumerate() {
            let distance = b.distance(&self.receiver);
            if distance < self.l * (1.0 - TIME_TOL) {
                return Err(Error::CheaterInsideRestrictedArea { cheater: k, distance, radius: self.l });
            }
        }
        self.cheaters = cheaters;
        Ok(self)
    }

    /// One cheater per verifier on the segment `V_i–P`, at distance `l` from `P`.
    pub fn with_default_cheaters(self) -> Result<Self> {
        let cheaters = self
            .verifiers
            .iter()
            .map(|v| {
                let dir = v.sub(&self.receiver);
                let r = dir.norm();
                if r <= self.l {
                    return Err(Error::InvalidGeometry(format!("verifier at {v} lies within the restricted area")));
                }
                Ok(self.receiver.add_scaled(&dir, self.l / r))
            })
            .collect::<Result<Vec<_>>>()?;
        self.with_cheaters(cheaters)
    }

    /// Uniform processing delay added at every party that turns a message around.
    pub fn with_latency(mut self, latency: f64) -> Result<Self> {
        if !(latency >= 0.0 && latency.is_finite()) {
            return Err(Error::InvalidGeometry(format!("latency must be non-negative, got {latency}")));
        }
        self.latency = latency;
        Ok(self)
    }

    pub fn verifiers(&self) -> &[Position] {
        &self.verifiers
    }

    pub fn receiver(&self) -> Position {
        self.receiver
    }

    pub fn radius(&self) -> f64 {
        self.l
    }

    pub fn speed(&self) -> f64 {
        self.c
    }

    pub fn latency(&self) -> f64 {
        self.latency
    }

    pub fn cheaters(&self) -> &[Position] {
        &self.cheaters
    }

    pub fn num_verifiers(&self) -> usize {
        self.verifiers.len()
    }

    /// True when every verifier lies on one line.
    pub fn is_collinear(&self) -> bool {
        hull_frame(&self.verifiers).map(|(_, basis)| basis.len() <= 1).unwrap_or(true)
    }
}

/// Arrival of each verifier's response and the deadline comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleReport {
    pub arrivals: Vec<f64>,
    pub completion: f64,
    pub deadline: f64,
    pub meets_deadline: bool,
}

impl ScheduleReport {
    fn new(arrivals: Vec<f64>, deadline: f64) -> Self {
        let completion = arrivals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { meets_deadline: meets_deadline(completion, deadline), arrivals, completion, deadline }
    }

    /// `deadline − completion`.
    pub fn margin(&self) -> f64 {
        self.deadline - self.completion
    }
}

/// Arrival exactly at the deadline is accepted.
pub fn meets_deadline(completion: f64, deadline: f64) -> bool {
    completion <= deadline + TIME_TOL * deadline.abs().max(1.0)
}

/// All verifiers transmit at `t = 0`; `P` answers once the last piece arrives.
pub fn honest_completion(geometry: &Geometry) -> ScheduleReport {
    let p = geometry.receiver;
    let t_in = geometry.verifiers.iter().map(|v| v.distance(&p)).fold(0.0, f64::max) / geometry.c + geometry.latency;
    let arrivals: Vec<f64> = geometry.verifiers.iter().map(|v| t_in + v.distance(&p) / geometry.c).collect();
    let completion = arrivals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ScheduleReport::new(arrivals, completion)
}

/// Directed classical messages `from → to` between cheaters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangePlan {
    edges: Vec<(usize, usize)>,
}

impl ExchangePlan {
    pub fn new(edges: Vec<(usize, usize)>) -> Self {
        Self { edges }
    }

    /// Every cheater messages every other cheater.
    pub fn all_to_all(n: usize) -> Self {
        Self { edges: (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect() }
    }

    /// No classical exchange.
    pub fn none() -> Self {
        Self { edges: Vec::new() }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
}

/// Per-cheater event times of an attack schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheaterTiming {
    /// Own verifier's signal intercepted.
    pub intercept: f64,
    /// All incoming classical messages received and processed.
    pub ready: f64,
    /// Reply reaches the cheater's own verifier.
    pub arrival: f64,
}

/// Intercept, exchange, reply timeline for the placed cheaters.
pub fn cheat_timeline(geometry: &Geometry, plan: &ExchangePlan) -> Result<Vec<CheaterTiming>> {
    let n = geometry.verifiers.len();
    if geometry.cheaters.len() != n {
        return Err(Error::InvalidGeometry(format!(
            "{} cheaters placed for {n} verifiers",
            geometry.cheaters.len()
        )));
    }
    for &(i, j) in &plan.edges {
        if i >= n || j >= n {
            return Err(Error::InvalidGeometry(format!("exchange edge {i}->{j} out of range")));
        }
    }
    let c = geometry.c;
    let b = &geometry.cheaters;
    let intercept: Vec<f64> = (0..n).map(|i| geometry.verifiers[i].distance(&b[i]) / c).collect();
    Ok((0..n)
        .map(|i| {
            let incoming = plan
                .edges
                .iter()
                .filter(|&&(_, to)| to == i)
                .map(|&(from, _)| intercept[from] + b[from].distance(&b[i]) / c)
                .fold(intercept[i], f64::max);
            let ready = incoming + geometry.latency;
            CheaterTiming { intercept: intercept[i], ready, arrival: ready + b[i].distance(&geometry.verifiers[i]) / c }
        })
        .collect())
}

/// Attack schedule measured against the honest deadline.
pub fn cheat_completion(geometry: &Geometry, plan: &ExchangePlan) -> Result<ScheduleReport> {
    let timeline = cheat_timeline(geometry, plan)?;
    let deadline = honest_completion(geometry).completion;
    Ok(ScheduleReport::new(timeline.iter().map(|t| t.arrival).collect(), deadline))
}

/// Outcome of the hull test on the claimed position.
#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    /// An interior point that is no farther from any verifier than `P`.
    pub witness: Option<Position>,
    /// `max_i (|V_i − Q| − |V_i − P|) / c` at the best grid point found.
    pub witness_margin: Option<f64>,
}

/// Origin and orthonormal basis of the verifiers' affine hull.
fn hull_frame(points: &[Position]) -> Result<(Position, Vec<Position>)> {
    let origin = points[0];
    let scale = points.iter().map(|p| p.distance(&origin)).fold(0.0, f64::max);
    let mut basis: Vec<Position> = Vec::new();
    for p in points {
        let mut v = p.sub(&origin);
        for e in &basis {
            v = v.add_scaled(e, -v.dot(e));
        }
        let r = v.norm();
        if r > 1e-9 * scale && basis.len() < 3 {
            basis.push(Position { x: v.x / r, y: v.y / r, z: v.z / r });
        }
    }
    if basis.is_empty() {
        return Err(Error::InvalidGeometry("all verifiers coincide".into()));
    }
    Ok((origin, basis))
}

/// Supporting hyperplanes `n·w ≥ offset` of a full-dimensional point set in
/// `k ≤ 3` coordinates.
fn facets(points: &[[f64; 3]], k: usize, tol: f64) -> Vec<([f64; 3], f64)> {
    let mut out = Vec::new();
    let m = points.len();
    let mut consider = |normal: [f64; 3], anchor: [f64; 3]| {
        let len = (normal[0] * normal[0] + normal[1] * normal[1] + normal[2] * normal[2]).sqrt();
        if len < tol {
            return;
        }
        let n = [normal[0] / len, normal[1] / len, normal[2] / len];
        let side = |w: &[f64; 3]| (0..3).map(|d| n[d] * (w[d] - anchor[d])).sum::<f64>();
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        for w in points {
            let s = side(w);
            lo = lo.min(s);
            hi = hi.max(s);
        }
        let offset: f64 = (0..3).map(|d| n[d] * anchor[d]).sum();
        if lo >= -tol {
            out.push((n, offset));
        } else if hi <= tol {
            out.push(([-n[0], -n[1], -n[2]], -offset));
        }
    };
    match k {
        1 => {
            for p in points {
                consider([1.0, 0.0, 0.0], *p);
            }
        }
        2 => {
            for i in 0..m {
                for j in i + 1..m {
                    let d = [points[j][0] - points[i][0], points[j][1] - points[i][1]];
                    consider([-d[1], d[0], 0.0], points[i]);
                }
            }
        }
        _ => {
            for i in 0..m {
                for j in i + 1..m {
                    for l in j + 1..m {
                        let u: [f64; 3] = core::array::from_fn(|d| points[j][d] - points[i][d]);
                        let v: [f64; 3] = core::array::from_fn(|d| points[l][d] - points[i][d]);
                        let cross = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
                        consider(cross, points[i]);
                    }
                }
            }
        }
    }
    out
}

fn strictly_inside(w: &[f64; 3], facets: &[([f64; 3], f64)], tol: f64) -> bool {
    facets.iter().all(|(n, off)| n[0] * w[0] + n[1] * w[1] + n[2] * w[2] - off > tol)
}

/// Points per axis of the witness grid.
pub const WITNESS_GRID: usize = 201;

/// Whether `P` lies in the relative interior of the verifiers' convex hull;
/// if not, a grid search looks for an interior point that dominates `P`.
pub fn feasibility_check(geometry: &Geometry) -> Result<Feasibility> {
    feasibility_check_with_grid(geometry, WITNESS_GRID)
}

/// Verifier hull in its own affine coordinates.
struct HullView {
    origin: Position,
    basis: Vec<Position>,
    points: Vec<[f64; 3]>,
    facets: Vec<([f64; 3], f64)>,
    scale: f64,
    tol: f64,
}

impl HullView {
    fn new(verifiers: &[Position]) -> Result<Self> {
        let (origin, basis) = hull_frame(verifiers)?;
        let scale = verifiers.iter().map(|p| p.distance(&origin)).fold(0.0, f64::max);
        let tol = 1e-9 * scale;
        let mut view = Self { origin, basis, points: Vec::new(), facets: Vec::new(), scale, tol };
        view.points = verifiers.iter().map(|v| view.coords(v)).collect();
        view.facets = facets(&view.points, view.basis.len(), tol);
        Ok(view)
    }

    fn coords(&self, p: &Position) -> [f64; 3] {
        let d = p.sub(&self.origin);
        core::array::from_fn(|j| if j < self.basis.len() { d.dot(&self.basis[j]) } else { 0.0 })
    }

    fn embed(&self, w: &[f64; 3]) -> Position {
        self.basis.iter().enumerate().fold(self.origin, |acc, (j, e)| acc.add_scaled(e, w[j]))
    }

    fn contains_strictly(&self, p: &Position) -> bool {
        let w = self.coords(p);
        self.embed(&w).distance(p) <= self.tol && strictly_inside(&w, &self.facets, self.tol)
    }
}

/// Whether the receiver lies in the relative interior of the verifiers' hull.
pub fn receiver_in_hull(geometry: &Geometry) -> Result<bool> {
    if geometry.verifiers.len() < 2 {
        return Err(Error::UnsupportedStations { n: geometry.verifiers.len() });
    }
    Ok(HullView::new(&geometry.verifiers)?.contains_strictly(&geometry.receiver))
}

pub fn feasibility_check_with_grid(geometry: &Geometry, grid: usize) -> Result<Feasibility> {
    let verifiers = &geometry.verifiers;
    if verifiers.len() < 2 {
        return Err(Error::UnsupportedStations { n: verifiers.len() });
    }
    if grid < 3 {
        return Err(Error::InvalidArgument(format!("witness grid needs at least 3 points per axis, got {grid}")));
    }
    let view = HullView::new(verifiers)?;
    let p = geometry.receiver;
    if view.contains_strictly(&p) {
        return Ok(Feasibility { feasible: true, witness: None, witness_margin: None });
    }
    let (k, points, hull, scale, tol) = (view.basis.len(), &view.points, &view.facets, view.scale, view.tol);
    let embed = |w: &[f64; 3]| view.embed(w);

    let reference: Vec<f64> = verifiers.iter().map(|v| v.distance(&p)).collect();
    let score = |w: &[f64; 3]| -> f64 {
        let q = embed(w);
        verifiers.iter().zip(&reference).map(|(v, r)| v.distance(&q) - r).fold(f64::NEG_INFINITY, f64::max)
    };
    let mut lo = [0.0f64; 3];
    let mut hi = [0.0f64; 3];
    for d in 0..k {
        lo[d] = points.iter().map(|w| w[d]).fold(f64::INFINITY, f64::min);
        hi[d] = points.iter().map(|w| w[d]).fold(f64::NEG_INFINITY, f64::max);
    }
    let mut best: Option<([f64; 3], f64)> = None;
    for _pass in 0..2 {
        let step: [f64; 3] = core::array::from_fn(|d| if d < k { (hi[d] - lo[d]) / (grid - 1) as f64 } else { 0.0 });
        let counts: [usize; 3] = core::array::from_fn(|d| if d < k { grid } else { 1 });
        let mut pass_best = best;
        for i in 0..counts[0] {
            for j in 0..counts[1] {
                for l in 0..counts[2] {
                    let w = [lo[0] + i as f64 * step[0], lo[1] + j as f64 * step[1], lo[2] + l as f64 * step[2]];
                    if !strictly_inside(&w, hull, tol) {
                        continue;
                    }
                    let s = score(&w);
                    if pass_best.map_or(true, |(_, b)| s < b) {
                        pass_best = Some((w, s));
                    }
                }
            }
        }
        best = pass_best;
        let Some((w, _)) = best else { break };
        for d in 0..k {
            lo[d] = w[d] - 2.0 * step[d];
            hi[d] = w[d] + 2.0 * step[d];
        }
    }
    let witness_margin = best.map(|(_, s)| s / geometry.c);
    let witness = best.filter(|&(_, s)| s <= TIME_TOL * scale).map(|(w, _)| embed(&w));
    Ok(Feasibility { feasible: false, witness, witness_margin })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pos(x: f64, y: f64) -> Position {
        Position::new(x, y, 0.0).unwrap()
    }

    #[test]
    fn honest_two_station_deadline() {
        let g = Geometry::collinear(1.0, 0.1, 1.0).unwrap();
        assert_eq!(honest_completion(&g).completion, 2.0);
        let far = Geometry::collinear(15_000.0, 1.0, 3.0e8).unwrap();
        assert!((honest_completion(&far).completion - 1e-4).abs() < 1e-16);
    }

    #[test]
    fn honest_triangle_deadline() {
        let g = Geometry::equilateral(1.0, 0.1, 1.0).unwrap();
        assert!((honest_completion(&g).completion - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_station_cheat_hits_deadline_exactly() {
        let g = Geometry::collinear(1.0, 0.1, 1.0).unwrap().with_default_cheaters().unwrap();
        let t = cheat_timeline(&g, &ExchangePlan::all_to_all(2)).unwrap();
        assert!((t[0].ready - 1.1).abs() < 1e-15);
        let r = cheat_completion(&g, &ExchangePlan::all_to_all(2)).unwrap();
        assert!((r.completion - 2.0).abs() < 1e-15 && r.meets_deadline);
    }

    #[test]
    fn triangle_cheat_beats_deadline() {
        let g = Geometry::equilateral(1.0, 0.1, 1.0).unwrap().with_default_cheaters().unwrap();
        let t = cheat_timeline(&g, &ExchangePlan::all_to_all(3)).unwrap();
        let s3 = 3f64.sqrt();
        assert!((t[0].ready - (1.0 + (s3 - 1.0) * 0.1)).abs() < 1e-12);
        let r = cheat_completion(&g, &ExchangePlan::all_to_all(3)).unwrap();
        assert!((r.completion - (2.0 + (s3 - 2.0) * 0.1)).abs() < 1e-12);
        assert!(r.completion < r.deadline);
    }

    #[test]
    fn restricted_area_enforced() {
        let g = Geometry::collinear(1.0, 0.1, 1.0).unwrap();
        let err = g.clone().with_cheaters(vec![pos(0.05, 0.0), pos(0.5, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::CheaterInsideRestrictedArea { cheater: 0, .. }));
        assert!(g.with_cheaters(vec![pos(-0.1, 0.0), pos(0.1, 0.0)]).is_ok());
        assert!(Geometry::collinear(1.0, 0.0, 1.0).is_err());
        assert!(Geometry::collinear(1.0, 0.1, -1.0).is_err());
    }

    #[test]
    fn latency_shifts_both_schedules() {
        let g = Geometry::collinear(1.0, 0.1, 1.0).unwrap().with_default_cheaters().unwrap().with_latency(0.01).unwrap();
        assert!((honest_completion(&g).completion - 2.01).abs() < 1e-15);
        assert!(cheat_completion(&g, &ExchangePlan::all_to_all(2)).unwrap().meets_deadline);
    }

    #[test]
    fn feasibility_inside_and_outside() {
        let g = Geometry::collinear(1.0, 0.1, 1.0).unwrap();
        assert!(feasibility_check(&g).unwrap().feasible);
        let tri = vec![pos(0.0, 1.0), pos(-1.0, -0.5), pos(1.0, -0.5)];
        let out = Geometry::new(tri.clone(), pos(0.0, -1.0), 0.1, 1.0).unwrap();
        let f = feasibility_check(&out).unwrap();
        assert!(!f.feasible);
        let w = f.witness.unwrap();
        for v in &tri {
            assert!(v.distance(&w) <= v.distance(&pos(0.0, -1.0)));
        }
        let vertex = Geometry::new(tri.clone(), tri[0], 0.1, 1.0).unwrap();
        let f = feasibility_check_with_grid(&vertex, 41).unwrap();
        assert!(!f.feasible && f.witness.is_none());
        let coincident = Geometry::new(vec![pos(1.0, 1.0), pos(1.0, 1.0)], pos(0.0, 0.0), 0.1, 1.0).unwrap();
        assert!(feasibility_check(&coincident).is_err());
    }

    #[test]
    fn feasibility_in_three_dimensions() {
        let tet = vec![
            Position::new(1.0, 1.0, 1.0).unwrap(),
            Position::new(1.0, -1.0, -1.0).unwrap(),
            Position::new(-1.0, 1.0, -1.0).unwrap(),
            Position::new(-1.0, -1.0, 1.0).unwrap(),
        ];
        let inside = Geometry::new(tet.clone(), Position::ORIGIN, 0.1, 1.0).unwrap();
        assert!(feasibility_check(&inside).unwrap().feasible);
        let outside = Geometry::new(tet, Position::new(2.0, 2.0, 2.0).unwrap(), 0.1, 1.0).unwrap();
        let f = feasibility_check_with_grid(&outside, 41).unwrap();
        assert!(!f.feasible && f.witness.is_some());
    }
}
