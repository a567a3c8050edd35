//! Planar Hammersley-type processes in the unit square.
//!
//! Each step a uniform point `p` arrives. The particle closest to `p` inside
//! the model's region anchored at `p` (if any) is removed, then `p` is added.
//!
//! * Model I: half-plane strictly above the line through `p` with slope `m`.
//! * Model II: strictly outside the origin-centred circle through `p`.
//! * Model III: the closed rectangle `[u, 1] x [v, 1]` minus `p` itself.
//!
//! Queries are answered either by a linear scan (the reference) or by an
//! expanding-ring search over a uniform grid; both return the same particle,
//! tie-break included.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lineproc::{validate_checkpoints, ProcessError};
use crate::randstream::StreamRng;

/// Slack applied to grid geometry so floating-point cell assignment can never
/// make a lower bound exceed a true distance.
const GEOM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// Deletion region anchored at `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    HalfPlaneAbove { anchor: Point, slope: f64 },
    OutsideOriginCircle { anchor: Point },
    DominanceRect { anchor: Point },
}

impl Region {
    pub fn anchor(&self) -> Point {
        match *self {
            Region::HalfPlaneAbove { anchor, .. }
            | Region::OutsideOriginCircle { anchor }
            | Region::DominanceRect { anchor } => anchor,
        }
    }

    #[inline]
    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Region::HalfPlaneAbove { anchor, slope } => p.y > slope * (p.x - anchor.x) + anchor.y,
            Region::OutsideOriginCircle { anchor } => {
                p.x * p.x + p.y * p.y > anchor.x * anchor.x + anchor.y * anchor.y
            }
            Region::DominanceRect { anchor } => {
                p.x >= anchor.x && p.y >= anchor.y && p.x <= 1.0 && p.y <= 1.0 && p != anchor
            }
        }
    }

    /// Axis-aligned box known to contain the region's part of the unit square.
    fn bounding_box(&self) -> [f64; 4] {
        match *self {
            Region::DominanceRect { anchor } => [anchor.x, 1.0, anchor.y, 1.0],
            _ => [0.0, 1.0, 0.0, 1.0],
        }
    }

    /// Conservative test: `false` only if no point of the (slightly enlarged)
    /// box `[x0, x1] x [y0, y1]` can lie in the region.
    #[inline]
    fn may_intersect(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> bool {
        let (x0, x1, y0, y1) = (x0 - GEOM_EPS, x1 + GEOM_EPS, y0 - GEOM_EPS, y1 + GEOM_EPS);
        match *self {
            Region::HalfPlaneAbove { anchor, slope } => {
                // max of y - slope * x over the box
                let x = if slope >= 0.0 { x0 } else { x1 };
                y1 - slope * (x - anchor.x) - anchor.y > -GEOM_EPS
            }
            Region::OutsideOriginCircle { anchor } => {
                let fx = x0.abs().max(x1.abs());
                let fy = y0.abs().max(y1.abs());
                fx * fx + fy * fy >= anchor.x * anchor.x + anchor.y * anchor.y - GEOM_EPS
            }
            Region::DominanceRect { anchor } => x1 >= anchor.x && y1 >= anchor.y,
        }
    }
}

/// Which planar model to run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum PlaneModel {
    /// Model I with slope `m`.
    HalfPlane { slope: f64 },
    /// Model II.
    Circle,
    /// Model III.
    Dominance,
}

impl PlaneModel {
    pub fn region(&self, anchor: Point) -> Region {
        match *self {
            PlaneModel::HalfPlane { slope } => Region::HalfPlaneAbove { anchor, slope },
            PlaneModel::Circle => Region::OutsideOriginCircle { anchor },
            PlaneModel::Dominance => Region::DominanceRect { anchor },
        }
    }
}

/// Distance used to pick the "closest" particle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    #[default]
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl Metric {
    /// Monotone surrogate of the distance for offset `(dx, dy)`: squared for
    /// Euclidean, exact for the others. Non-decreasing in `|dx|` and `|dy|`.
    #[inline]
    pub fn key(self, dx: f64, dy: f64) -> f64 {
        match self {
            Metric::Euclidean => dx * dx + dy * dy,
            Metric::Manhattan => dx.abs() + dy.abs(),
            Metric::Chebyshev => dx.abs().max(dy.abs()),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Manhattan => "manhattan",
            Metric::Chebyshev => "chebyshev",
        })
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "manhattan" => Ok(Metric::Manhattan),
            "chebyshev" => Ok(Metric::Chebyshev),
            other => Err(format!("unknown metric {other:?}")),
        }
    }
}

/// Candidate ordering: distance key, then smaller x, then smaller y.
#[inline]
fn better(key: f64, p: Point, best: &Option<(f64, Point, usize)>) -> bool {
    match best {
        None => true,
        Some((bk, bp, _)) => {
            key.total_cmp(bk)
                .then(p.x.total_cmp(&bp.x))
                .then(p.y.total_cmp(&bp.y))
                == Ordering::Less
        }
    }
}

fn nearest_index_naive(particles: &[Point], anchor: Point, region: &Region, metric: Metric) -> Option<usize> {
    let mut best = None;
    for (i, &p) in particles.iter().enumerate() {
        if region.contains(p) {
            let key = metric.key(p.x - anchor.x, p.y - anchor.y);
            if better(key, p, &best) {
                best = Some((key, p, i));
            }
        }
    }
    best.map(|b| b.2)
}

/// Reference query: closest qualifying particle by linear scan.
pub fn nearest_in_region_naive(
    particles: &[Point],
    anchor: Point,
    region: &Region,
    metric: Metric,
) -> Option<Point> {
    nearest_index_naive(particles, anchor, region, metric).map(|i| particles[i])
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AuditError {
    #[error("grid holds {indexed} entries for {particles} particles")]
    CountMismatch { indexed: usize, particles: usize },
    #[error("particle {0} indexed more than once")]
    Duplicate(usize),
    #[error("particle {0} filed under the wrong cell")]
    WrongCell(usize),
    #[error("dangling index {0}")]
    Dangling(usize),
    #[error("particles {0} and {1} coincide")]
    Coincident(usize, usize),
}

/// `g x g` buckets of particle indices.
#[derive(Debug, Clone)]
struct GridIndex {
    g: usize,
    cell: f64,
    buckets: Vec<Vec<u32>>,
    built_for: usize,
}

impl GridIndex {
    fn build(points: &[Point]) -> Self {
        let g = ((points.len() as f64).sqrt().ceil() as usize).max(1);
        let mut grid = Self {
            g,
            cell: 1.0 / g as f64,
            buckets: vec![Vec::new(); g * g],
            built_for: points.len(),
        };
        for (i, &p) in points.iter().enumerate() {
            let c = grid.cell_of(p);
            grid.buckets[c].push(i as u32);
        }
        grid
    }

    #[inline]
    fn axis_cell(&self, v: f64) -> usize {
        ((v * self.g as f64) as usize).min(self.g - 1)
    }

    #[inline]
    fn cell_of(&self, p: Point) -> usize {
        self.axis_cell(p.y) * self.g + self.axis_cell(p.x)
    }

    fn needs_rebuild(&self, len: usize) -> bool {
        len >= 4 * self.built_for.max(1) || (self.built_for >= 16 && len <= self.built_for / 4)
    }

    fn remove(&mut self, cell: usize, idx: u32) {
        let bucket = &mut self.buckets[cell];
        let pos = bucket.iter().position(|&i| i == idx).expect("grid out of sync");
        bucket.swap_remove(pos);
    }

    fn relabel(&mut self, cell: usize, from: u32, to: u32) {
        let slot = self.buckets[cell]
            .iter_mut()
            .find(|i| **i == from)
            .expect("grid out of sync");
        *slot = to;
    }

    /// Expanding Chebyshev rings of cells around the anchor's cell, clipped to
    /// the region's bounding box. A ring is skipped as soon as its lower bound
    /// strictly exceeds the best key, so equal-key candidates are never missed.
    fn nearest(&self, points: &[Point], anchor: Point, region: &Region, metric: Metric) -> Option<usize> {
        let g = self.g as isize;
        let h = self.cell;
        let [bx0, bx1, by0, by1] = region.bounding_box();
        let clip = |lo: f64, hi: f64| {
            let a = (((lo - GEOM_EPS).max(0.0) * self.g as f64) as isize).min(g - 1);
            let b = (((hi + GEOM_EPS).min(1.0) * self.g as f64) as isize).min(g - 1);
            (a, b)
        };
        let (ilo, ihi) = clip(bx0, bx1);
        let (jlo, jhi) = clip(by0, by1);
        if ilo > ihi || jlo > jhi {
            return None;
        }
        let ci = self.axis_cell(anchor.x.clamp(0.0, 1.0)) as isize;
        let cj = self.axis_cell(anchor.y.clamp(0.0, 1.0)) as isize;
        let max_ring = (ci - ilo).max(ihi - ci).max(cj - jlo).max(jhi - cj);

        let mut best: Option<(f64, Point, usize)> = None;
        for r in 0..=max_ring {
            if r > 0 {
                if let Some((bk, _, _)) = best {
                    let gap = ((ci + r) as f64 * h - anchor.x)
                        .min(anchor.x - (ci - r + 1) as f64 * h)
                        .min((cj + r) as f64 * h - anchor.y)
                        .min(anchor.y - (cj - r + 1) as f64 * h);
                    let gap = (gap - GEOM_EPS).max(0.0);
                    if metric.key(gap, 0.0) > bk {
                        break;
                    }
                }
            }
            let (i0, i1) = ((ci - r).max(ilo), (ci + r).min(ihi));
            let (j0, j1) = ((cj - r).max(jlo), (cj + r).min(jhi));
            if i0 > i1 || j0 > j1 {
                continue;
            }
            for j in j0..=j1 {
                if (j - cj).abs() == r {
                    for i in i0..=i1 {
                        self.scan_cell(points, anchor, region, metric, i, j, &mut best);
                    }
                } else {
                    // interior rows of the ring only touch its two side columns
                    if (i0..=i1).contains(&(ci - r)) {
                        self.scan_cell(points, anchor, region, metric, ci - r, j, &mut best);
                    }
                    if r > 0 && (i0..=i1).contains(&(ci + r)) {
                        self.scan_cell(points, anchor, region, metric, ci + r, j, &mut best);
                    }
                }
            }
        }
        best.map(|b| b.2)
    }

    #[inline]
    #[allow(clippy::too_many_arguments)]
    fn scan_cell(
        &self,
        points: &[Point],
        anchor: Point,
        region: &Region,
        metric: Metric,
        i: isize,
        j: isize,
        best: &mut Option<(f64, Point, usize)>,
    ) {
        let bucket = &self.buckets[j as usize * self.g + i as usize];
        if bucket.is_empty() {
            return;
        }
        let h = self.cell;
        let (x0, x1) = (i as f64 * h, (i + 1) as f64 * h);
        let (y0, y1) = (j as f64 * h, (j + 1) as f64 * h);
        if let Some((bk, _, _)) = best {
            let gx = ((x0 - anchor.x).max(anchor.x - x1) - GEOM_EPS).max(0.0);
            let gy = ((y0 - anchor.y).max(anchor.y - y1) - GEOM_EPS).max(0.0);
            if metric.key(gx, gy) > *bk {
                return;
            }
        }
        if !region.may_intersect(x0, x1, y0, y1) {
            return;
        }
        for &idx in bucket {
            let p = points[idx as usize];
            if region.contains(p) {
                let key = metric.key(p.x - anchor.x, p.y - anchor.y);
                if better(key, p, best) {
                    *best = Some((key, p, idx as usize));
                }
            }
        }
    }
}

/// Live particles plus an optional grid index over them.
#[derive(Debug, Clone)]
pub struct PlanarState {
    points: Vec<Point>,
    grid: Option<GridIndex>,
    metric: Metric,
}

impl PlanarState {
    pub fn new(use_grid: bool, metric: Metric) -> Self {
        Self {
            points: Vec::new(),
            grid: use_grid.then(|| GridIndex::build(&[])),
            metric,
        }
    }

    pub fn with_grid() -> Self {
        Self::new(true, Metric::Euclidean)
    }

    pub fn naive() -> Self {
        Self::new(false, Metric::Euclidean)
    }

    /// Builds a state from an existing particle set.
    pub fn from_points(points: Vec<Point>, use_grid: bool, metric: Metric) -> Self {
        let grid = use_grid.then(|| GridIndex::build(&points));
        Self { points, grid, metric }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn particles(&self) -> &[Point] {
        &self.points
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn has_grid(&self) -> bool {
        self.grid.is_some()
    }

    /// Current grid side length `g`, if indexed.
    pub fn grid_side(&self) -> Option<usize> {
        self.grid.as_ref().map(|g| g.g)
    }

    fn nearest_index(&self, anchor: Point, region: &Region) -> Option<usize> {
        match &self.grid {
            Some(grid) => grid.nearest(&self.points, anchor, region, self.metric),
            None => nearest_index_naive(&self.points, anchor, region, self.metric),
        }
    }

    /// Closest qualifying particle using whichever path this state is
    /// configured for.
    pub fn nearest_in_region(&self, anchor: Point, region: &Region) -> Option<Point> {
        self.nearest_index(anchor, region).map(|i| self.points[i])
    }

    /// Grid-accelerated query. Falls back to the scan when no index exists.
    pub fn nearest_in_region_grid(&self, anchor: Point, region: &Region) -> Option<Point> {
        self.nearest_in_region(anchor, region)
    }

    pub fn insert(&mut self, p: Point) {
        let idx = self.points.len();
        self.points.push(p);
        if let Some(grid) = &mut self.grid {
            let c = grid.cell_of(p);
            grid.buckets[c].push(idx as u32);
        }
        self.maybe_rebuild();
    }

    fn remove_at(&mut self, idx: usize) -> Point {
        let last = self.points.len() - 1;
        if let Some(grid) = &mut self.grid {
            let removed_cell = grid.cell_of(self.points[idx]);
            grid.remove(removed_cell, idx as u32);
            if idx != last {
                let moved_cell = grid.cell_of(self.points[last]);
                grid.relabel(moved_cell, last as u32, idx as u32);
            }
        }
        let p = self.points.swap_remove(idx);
        self.maybe_rebuild();
        p
    }

    fn maybe_rebuild(&mut self) {
        if let Some(grid) = &self.grid {
            if grid.needs_rebuild(self.points.len()) {
                self.grid = Some(GridIndex::build(&self.points));
            }
        }
    }

    /// One model step at `p`: remove the closest particle in the model's region
    /// anchored at `p`, then insert `p`. Returns the removed particle.
    pub fn step(&mut self, model: PlaneModel, p: Point) -> Option<Point> {
        let region = model.region(p);
        let removed = self.nearest_index(p, &region).map(|i| self.remove_at(i));
        self.insert(p);
        removed
    }

    /// Checks that the grid holds exactly the particle set, each particle in
    /// its own cell, and that particles are pairwise distinct.
    pub fn audit(&self) -> Result<(), AuditError> {
        let mut sorted: Vec<(usize, Point)> = self.points.iter().copied().enumerate().collect();
        sorted.sort_by(|a, b| a.1.x.total_cmp(&b.1.x).then(a.1.y.total_cmp(&b.1.y)));
        if let Some(w) = sorted.windows(2).find(|w| w[0].1 == w[1].1) {
            return Err(AuditError::Coincident(w[0].0, w[1].0));
        }
        let Some(grid) = &self.grid else {
            return Ok(());
        };
        let indexed: usize = grid.buckets.iter().map(Vec::len).sum();
        if indexed != self.points.len() {
            return Err(AuditError::CountMismatch {
                indexed,
                particles: self.points.len(),
            });
        }
        let mut seen = vec![false; self.points.len()];
        for (cell, bucket) in grid.buckets.iter().enumerate() {
            for &idx in bucket {
                let idx = idx as usize;
                let Some(&p) = self.points.get(idx) else {
                    return Err(AuditError::Dangling(idx));
                };
                if std::mem::replace(&mut seen[idx], true) {
                    return Err(AuditError::Duplicate(idx));
                }
                if grid.cell_of(p) != cell {
                    return Err(AuditError::WrongCell(idx));
                }
            }
        }
        Ok(())
    }
}

/// One planar trajectory, recording the particle count at each checkpoint.
pub fn run_plane_trace(
    model: PlaneModel,
    checkpoints: &[u64],
    rng: &mut StreamRng,
    use_grid: bool,
    metric: Metric,
) -> Result<Vec<(u64, usize)>, ProcessError> {
    validate_checkpoints(checkpoints)?;
    let mut state = PlanarState::new(use_grid, metric);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut n = 0;
    for &target in checkpoints {
        while n < target {
            state.step(model, rng.uniform_square().into());
            n += 1;
        }
        out.push((n, state.len()));
    }
    Ok(out)
}
