//! Best-first branch and bound over pairs of boundary arcs of a planar unit
//! sphere. Arcs are dyadic refinements of a base angle grid; every arc
//! carries a primal hull (enclosing the arc) and a dual hull (enclosing the
//! norming functionals of its points), from which problems derive bounds.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::f64::consts::TAU;

use crate::config::Resolution;
use crate::normcore::plane::{dual_hull, grid_dir, primal_hull, sphere_point, sphere_point_dir, Hull, SpherePoint, P2};
use crate::normcore::NormedSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Sense {
    Min,
    Max,
}

pub(crate) type ArcKey = (u8, u64);

#[derive(Clone, Copy, Debug)]
pub(crate) struct ArcData {
    pub a: SpherePoint,
    pub b: SpherePoint,
    pub primal: Hull,
    pub dual: Hull,
    /// Largest norm of a primal hull vertex, pad included.
    pub max_norm: f64,
}

/// A feasible point with its objective value.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Candidate {
    pub value: f64,
    pub x: P2,
    pub y: P2,
    pub f: Option<P2>,
    pub theta: (f64, f64),
}

pub(crate) trait Problem {
    fn sense(&self) -> Sense;
    /// Optimistic bound over the cell, `None` if the cell has no feasible pair.
    fn bound(&self, x: &ArcData, y: &ArcData) -> Option<f64>;
    fn value(&self, x: &SpherePoint, y: &SpherePoint) -> Option<Candidate>;
    /// Signed feasibility margin (`>= 0` feasible) for problems with an
    /// inequality constraint; edges across which it changes sign are bisected.
    fn margin(&self, _x: &SpherePoint, _y: &SpherePoint) -> Option<f64> {
        None
    }
    /// Extra feasible candidates generated from a single `x`.
    fn probe_x(&self, _x: &SpherePoint) -> Vec<Candidate> {
        Vec::new()
    }
    /// Range known a priori to contain the value.
    fn range(&self) -> (f64, f64);
}

/// Which part of the torus of angle pairs must be searched.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Domain {
    pub x_half: bool,
    pub y_half: bool,
}

/// Early exit once the enclosure is on one side of a threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Goal {
    pub hi_below: Option<f64>,
    pub lo_above: Option<f64>,
}

#[derive(Clone, Debug)]
pub(crate) struct Outcome {
    pub lo: f64,
    pub hi: f64,
    pub best: Option<Candidate>,
    pub cells: usize,
    pub depth: u8,
    pub exhausted: bool,
    pub fallback_hulls: bool,
}

pub(crate) struct Sphere<'s> {
    pub space: &'s NormedSpace,
    m0: u64,
    lip: f64,
    nodes: HashMap<ArcKey, SpherePoint>,
    arcs: HashMap<ArcKey, ArcData>,
    fallback: bool,
}

impl<'s> Sphere<'s> {
    pub fn new(space: &'s NormedSpace, m0: u64) -> Sphere<'s> {
        Sphere { space, m0, lip: space.sphere_lipschitz(), nodes: HashMap::new(), arcs: HashMap::new(), fallback: false }
    }

    fn count(&self, level: u8) -> u64 {
        self.m0 << level
    }

    /// Node `k` of level `level`; the node at `2π` repeats node 0 with its
    /// angle kept at `2π`.
    pub fn node(&mut self, level: u8, k: u64) -> SpherePoint {
        let theta = TAU * k as f64 / self.count(level) as f64;
        let (mut l, mut i) = (level, k % self.count(level));
        while l > 0 && i % 2 == 0 {
            l -= 1;
            i /= 2;
        }
        let p = self.base_node(l, i);
        SpherePoint { theta, ..p }
    }

    fn base_node(&mut self, l: u8, i: u64) -> SpherePoint {
        if let Some(p) = self.nodes.get(&(l, i)) {
            return *p;
        }
        let count = self.count(l);
        let p = if 2 * i >= count {
            let q = self.base_node(l, i - count / 2);
            q.antipode(TAU * i as f64 / count as f64)
        } else {
            sphere_point_dir(self.space, grid_dir(i, count), TAU * i as f64 / count as f64)
        };
        self.nodes.insert((l, i), p);
        p
    }

    pub fn arc(&mut self, key: ArcKey) -> ArcData {
        if let Some(a) = self.arcs.get(&key) {
            return *a;
        }
        let a = self.node(key.0, key.1);
        let b = self.node(key.0, key.1 + 1);
        let primal = primal_hull(&a, &b, self.lip);
        let dual = dual_hull(&a, &b, self.lip);
        if primal.pad > 0.0 || dual.pad > 0.0 {
            self.fallback = true;
        }
        let max_norm = primal.verts().iter().map(|v| self.space.norm(v)).fold(1.0f64, f64::max) + primal.pad;
        let d = ArcData { a, b, primal, dual, max_norm };
        self.arcs.insert(key, d);
        d
    }
}

#[derive(Clone, Copy)]
struct Cell {
    prio: f64,
    bound: f64,
    x: ArcKey,
    y: ArcKey,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.prio
            .total_cmp(&other.prio)
            .then_with(|| other.x.cmp(&self.x))
            .then_with(|| other.y.cmp(&self.y))
    }
}

fn children(k: ArcKey, max_level: u8) -> Vec<ArcKey> {
    if k.0 >= max_level {
        vec![k]
    } else {
        vec![(k.0 + 1, 2 * k.1), (k.0 + 1, 2 * k.1 + 1)]
    }
}

pub(crate) struct Search<'p, P: Problem> {
    problem: &'p P,
    sense: Sense,
    best: Option<Candidate>,
    probed_x: HashSet<u64>,
}

impl<'p, P: Problem> Search<'p, P> {
    fn better(&self, a: f64, b: f64) -> bool {
        match self.sense {
            Sense::Min => a < b,
            Sense::Max => a > b,
        }
    }

    fn incumbent(&self) -> f64 {
        match (&self.best, self.sense) {
            (Some(c), _) => c.value,
            (None, Sense::Min) => f64::INFINITY,
            (None, Sense::Max) => f64::NEG_INFINITY,
        }
    }

    fn offer(&mut self, c: Candidate) {
        if !c.value.is_finite() {
            return;
        }
        let take = match &self.best {
            None => true,
            Some(b) => self.better(c.value, b.value),
        };
        if take {
            self.best = Some(c);
        }
    }

    fn offer_point(&mut self, x: &SpherePoint, y: &SpherePoint) {
        if let Some(c) = self.problem.value(x, y) {
            self.offer(c);
        }
        if self.probed_x.insert(x.theta.to_bits()) {
            for c in self.problem.probe_x(x) {
                self.offer(c);
            }
        }
    }

    /// Evaluate the corners of a cell and bisect edges across which the
    /// constraint margin changes sign.
    fn probe(&mut self, sphere: &mut Sphere, xk: ArcKey, yk: ArcKey) {
        let ax = sphere.arc(xk);
        let ay = sphere.arc(yk);
        let corners = [(ax.a, ay.a), (ax.b, ay.a), (ax.a, ay.b), (ax.b, ay.b)];
        for (x, y) in &corners {
            self.offer_point(x, y);
        }
        if self.problem.margin(&ax.a, &ay.a).is_none() {
            return;
        }
        let space = sphere.space;
        let edges = [(0usize, 1usize, true), (2, 3, true), (0, 2, false), (1, 3, false)];
        for (i, j, along_x) in edges {
            let (p, q) = (corners[i], corners[j]);
            let (mp, mq) = (self.problem.margin(&p.0, &p.1).unwrap(), self.problem.margin(&q.0, &q.1).unwrap());
            if (mp >= 0.0) == (mq >= 0.0) {
                continue;
            }
            let (mut good, mut bad) = if mp >= 0.0 { (p, q) } else { (q, p) };
            for _ in 0..36 {
                let mid = if along_x {
                    (sphere_point(space, 0.5 * (good.0.theta + bad.0.theta)), good.1)
                } else {
                    (good.0, sphere_point(space, 0.5 * (good.1.theta + bad.1.theta)))
                };
                if self.problem.margin(&mid.0, &mid.1).unwrap() >= 0.0 {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            if let Some(c) = self.problem.value(&good.0, &good.1) {
                self.offer(c);
            }
        }
    }

    /// Coordinate search around the incumbent in angle space.
    fn polish(&mut self, space: &NormedSpace, step: f64, iters: usize) {
        let Some(start) = self.best.clone() else { return };
        let (mut tx, mut ty) = start.theta;
        let mut step = step;
        for _ in 0..iters {
            let mut moved = false;
            for (dx, dy) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let x = sphere_point(space, tx + dx);
                let y = sphere_point(space, ty + dy);
                if let Some(c) = self.problem.value(&x, &y) {
                    if self.better(c.value, self.incumbent()) {
                        tx += dx;
                        ty += dy;
                        self.offer(c);
                        moved = true;
                        break;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
    }
}

pub(crate) fn search<P: Problem>(space: &NormedSpace, problem: &P, domain: Domain, res: &Resolution, goal: Goal) -> Outcome {
    let m0 = res.angles.clamp(8, 256) as u64;
    let max_level = res.refine_depth.min(40) as u8;
    let mut sphere = Sphere::new(space, m0);
    let sense = problem.sense();
    let mut s = Search { problem, sense, best: None, probed_x: HashSet::new() };
    let sign = if sense == Sense::Min { -1.0 } else { 1.0 };
    let nx = if domain.x_half { m0 / 2 } else { m0 };
    let ny = if domain.y_half { m0 / 2 } else { m0 };
    let mut initial = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let (xk, yk) = ((0u8, i), (0u8, j));
            s.probe(&mut sphere, xk, yk);
            let (ax, ay) = (sphere.arc(xk), sphere.arc(yk));
            if let Some(b) = problem.bound(&ax, &ay) {
                initial.push(Cell { prio: sign * b, bound: b, x: xk, y: yk });
            }
        }
    }
    let mut heap: BinaryHeap<Cell> = initial.into_iter().collect();
    // Best bound among cells discarded for being within the gap or for
    // having reached the depth limit.
    let mut dropped = f64::NAN;
    let worst = |a: f64, b: f64| -> f64 {
        if a.is_nan() {
            b
        } else if sense == Sense::Min {
            a.min(b)
        } else {
            a.max(b)
        }
    };
    let mut cells = 0usize;
    let mut depth = 0u8;
    let mut exhausted = false;
    let mut top = f64::NAN;
    // A cell is negligible once it cannot move the enclosure by more than the
    // gap, unless it still blocks the goal threshold.
    let negligible = |b: f64, inc: f64| match sense {
        Sense::Min => b >= inc - res.gap(inc) && !goal.lo_above.is_some_and(|t| b <= t && inc > t),
        Sense::Max => b <= inc + res.gap(inc) && !goal.hi_below.is_some_and(|t| b >= t && inc < t),
    };
    while let Some(c) = heap.pop() {
        let inc = s.incumbent();
        if negligible(c.bound, inc) {
            top = c.bound;
            break;
        }
        let (lo_now, hi_now) = match sense {
            Sense::Min => (worst(dropped, c.bound), inc),
            Sense::Max => (inc, worst(dropped, c.bound)),
        };
        let stop_goal = goal.hi_below.is_some_and(|t| hi_now < t) || goal.lo_above.is_some_and(|t| lo_now > t);
        if stop_goal {
            top = c.bound;
            break;
        }
        if cells >= res.max_cells {
            exhausted = true;
            top = c.bound;
            break;
        }
        if c.x.0 >= max_level && c.y.0 >= max_level {
            dropped = worst(dropped, c.bound);
            continue;
        }
        cells += 1;
        depth = depth.max(c.x.0.max(c.y.0));
        s.probe(&mut sphere, c.x, c.y);
        for xk in children(c.x, max_level) {
            for yk in children(c.y, max_level) {
                let (ax, ay) = (sphere.arc(xk), sphere.arc(yk));
                let Some(b) = problem.bound(&ax, &ay) else { continue };
                if !negligible(b, s.incumbent()) {
                    heap.push(Cell { prio: sign * b, bound: b, x: xk, y: yk });
                } else {
                    dropped = worst(dropped, b);
                }
            }
        }
    }
    let step = TAU / (m0 << depth.min(30)) as f64;
    s.polish(space, step, res.polish_iters);
    let inc = s.incumbent();
    let mut frontier = worst(dropped, top);
    if frontier.is_nan() {
        frontier = inc;
    }
    let (lo_r, hi_r) = problem.range();
    let (lo, hi) = match sense {
        Sense::Min => (frontier.min(inc).max(lo_r), inc.clamp(lo_r, hi_r)),
        Sense::Max => (inc.clamp(lo_r, hi_r), frontier.max(inc).min(hi_r)),
    };
    Outcome { lo, hi, best: s.best, cells, depth, exhausted, fallback_hulls: sphere.fallback }
}

/// Max over primal hull vertex pairs of `g(a, b)`.
pub(crate) fn vertex_max(x: &ArcData, y: &ArcData, mut g: impl FnMut(P2, P2) -> f64) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for &a in x.primal.verts() {
        for &b in y.primal.verts() {
            m = m.max(g(a, b));
        }
    }
    m
}
