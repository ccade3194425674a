//! Scans of λ-space: gap and index on grids, ε-sublevel sets of the gap,
//! connected components, ray crossings and spectral flow.

use std::collections::HashMap;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localizer::Localizer;
use crate::tuple::ProbePoint;

/// One varying axis of a scan grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    /// Zero-based λ coordinate.
    pub index: usize,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }
}

/// A rectangular grid over some λ axes with the others held fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub d: usize,
    pub axes: Vec<Axis>,
    /// Values of all `d` coordinates; entries on varying axes are ignored.
    pub fixed: Vec<f64>,
}

/// Name of λ coordinate `j` (zero-based): `x1 … xd`, or `E` for the last
/// coordinate of a lattice tuple.
pub fn axis_name(j: usize, d: usize, energy_last: bool) -> String {
    if energy_last && j + 1 == d {
        "E".to_string()
    } else {
        format!("x{}", j + 1)
    }
}

fn parse_axis_name(name: &str, d: usize) -> Result<usize> {
    let name = name.trim();
    if name == "E" {
        return Ok(d - 1);
    }
    let idx = name
        .strip_prefix('x')
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&j| (1..=d).contains(&j))
        .ok_or_else(|| Error::InvalidArgument(format!("unknown axis `{name}`: expected x1..x{d} or E")))?;
    Ok(idx - 1)
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::InvalidArgument(format!("cannot parse {what} `{}` as a number", s.trim())))
}

impl ScanGrid {
    /// Parses `"x1=-3:3:121,x2=-3:3:121"` and `"x3=0,E=0"`.
    pub fn parse(d: usize, grid: &str, fixed: &str) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("grid over a zero-dimensional λ-space".into()));
        }
        let mut axes = Vec::new();
        for spec in grid.split(',').filter(|s| !s.trim().is_empty()) {
            let (name, range) = spec
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("grid axis `{spec}` is not of the form name=min:max:count")))?;
            let parts: Vec<&str> = range.split(':').collect();
            if parts.len() != 3 {
                return Err(Error::InvalidArgument(format!(
                    "grid axis `{spec}` is not of the form name=min:max:count"
                )));
            }
            let count = parts[2]
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("point count `{}` is not an integer", parts[2].trim())))?;
            axes.push(Axis {
                index: parse_axis_name(name, d)?,
                min: parse_f64(parts[0], "axis minimum")?,
                max: parse_f64(parts[1], "axis maximum")?,
                count,
            });
        }
        let mut fixed_vals = vec![0.0; d];
        for spec in fixed.split(',').filter(|s| !s.trim().is_empty()) {
            let (name, v) = spec
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("fixed value `{spec}` is not of the form name=value")))?;
            let j = parse_axis_name(name, d)?;
            if axes.iter().any(|a| a.index == j) {
                return Err(Error::InvalidArgument(format!("axis `{}` is both varying and fixed", name.trim())));
            }
            fixed_vals[j] = parse_f64(v, "fixed value")?;
        }
        Self::new(d, axes, fixed_vals)
    }

    pub fn new(d: usize, axes: Vec<Axis>, fixed: Vec<f64>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidArgument("grid has no varying axis".into()));
        }
        if fixed.len() != d {
            return Err(Error::DimensionMismatch(format!("{} fixed values for d = {d}", fixed.len())));
        }
        let mut seen = vec![false; d];
        for a in &axes {
            if a.index >= d {
                return Err(Error::InvalidArgument(format!("axis {} outside 1..{d}", a.index + 1)));
            }
            if seen[a.index] {
                return Err(Error::InvalidArgument(format!("axis x{} given twice", a.index + 1)));
            }
            seen[a.index] = true;
            if a.count < 2 {
                return Err(Error::InvalidArgument(format!("axis x{} needs at least 2 points", a.index + 1)));
            }
            if !(a.max > a.min) {
                return Err(Error::InvalidArgument(format!("axis x{} has an empty range", a.index + 1)));
            }
        }
        Ok(Self { d, axes, fixed })
    }

    /// A line or box with the same range and count on each listed axis.
    pub fn uniform(d: usize, axes: &[usize], min: f64, max: f64, count: usize) -> Result<Self> {
        Self::new(
            d,
            axes.iter().map(|&index| Axis { index, min, max, count }).collect(),
            vec![0.0; d],
        )
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    /// Multi-index of flat point `p`; the last axis varies fastest.
    pub fn multi_index(&self, mut p: usize) -> Vec<usize> {
        let mut idx = vec![0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            idx[k] = p % a.count;
            p /= a.count;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.axes).fold(0, |acc, (&i, a)| acc * a.count + i)
    }

    pub fn point(&self, p: usize) -> ProbePoint {
        let mut coords = self.fixed.clone();
        for (a, i) in self.axes.iter().zip(self.multi_index(p)) {
            coords[a.index] = a.value(i);
        }
        ProbePoint::new(coords)
    }

    /// Coordinates of flat point `p` restricted to the varying axes.
    pub fn varying_coords(&self, p: usize) -> Vec<f64> {
        self.axes.iter().zip(self.multi_index(p)).map(|(a, i)| a.value(i)).collect()
    }

    /// Largest step among the varying axes.
    pub fn max_step(&self) -> f64 {
        self.axes.iter().map(Axis::step).fold(0.0, f64::max)
    }

    /// `1.5 × step`: the gap is 1-Lipschitz in λ, so every true zero lies within
    /// half a diagonal of some grid point whose gap is at most this.
    pub fn default_eps(&self) -> f64 {
        1.5 * self.max_step()
    }

    /// `2 × step × sqrt(number of varying axes)`.
    pub fn default_radius(&self) -> f64 {
        2.0 * self.max_step() * (self.axes.len() as f64).sqrt()
    }
}

/// Descriptive metadata carried alongside scan output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanMeta {
    pub model: String,
    pub rep: String,
    pub kappas: Vec<f64>,
    pub seconds: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub grid: ScanGrid,
    /// NaN where the evaluation failed.
    pub gap: Vec<f64>,
    /// `None` where singular, failed, or not requested.
    pub index: Option<Vec<Option<i64>>>,
    /// `(flat point, message)` for every failed evaluation.
    pub failures: Vec<(usize, String)>,
    pub meta: ScanMeta,
}

/// Gap and (optional) index at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub flat: usize,
    pub lambda: ProbePoint,
    pub gap: f64,
    pub index: Option<i64>,
    pub error: Option<String>,
}

fn evaluate_point(loc: &Localizer<'_>, grid: &ScanGrid, p: usize, with_index: bool) -> ScanPoint {
    let lambda = grid.point(p);
    let outcome = if with_index {
        loc.report(&lambda, 0).map(|r| (r.gap, r.index))
    } else {
        loc.gap(&lambda).map(|g| (g, None))
    };
    match outcome {
        Ok((gap, index)) => ScanPoint { flat: p, lambda, gap, index, error: None },
        Err(e) => ScanPoint { flat: p, lambda, gap: f64::NAN, index: None, error: Some(e.to_string()) },
    }
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

/// Evaluates every grid point. Output order is the flat grid order regardless
/// of scheduling; failures are recorded per point and never abort the scan.
pub fn scan(loc: &Localizer<'_>, grid: &ScanGrid, with_index: bool, threads: Option<usize>) -> Result<ScanResult> {
    if grid.d != loc.tuple().d() {
        return Err(Error::DimensionMismatch(format!(
            "grid is over {} coordinates, tuple has {} matrices",
            grid.d,
            loc.tuple().d()
        )));
    }
    let start = Instant::now();
    let points: Vec<ScanPoint> = with_pool(threads, || {
        (0..grid.len())
            .into_par_iter()
            .map(|p| evaluate_point(loc, grid, p, with_index))
            .collect()
    });
    let failures: Vec<(usize, String)> = points
        .iter()
        .filter_map(|p| p.error.clone().map(|e| (p.flat, e)))
        .collect();
    Ok(ScanResult {
        grid: grid.clone(),
        gap: points.iter().map(|p| p.gap).collect(),
        index: with_index.then(|| points.iter().map(|p| p.index).collect()),
        meta: ScanMeta {
            model: loc.tuple().label().to_string(),
            rep: format!("{:?} d={}", loc.rep().construction(), loc.rep().d()),
            kappas: Vec::new(),
            seconds: start.elapsed().as_secs_f64(),
            failures: failures.len(),
        },
        failures,
    })
}

/// Streams a scan slab by slab (one slab per value of the first axis), so
/// that memory stays bounded for scans over three or more axes. `sink` is
/// called with each slab's points in flat order. Returns the failure count.
pub fn scan_streaming(
    loc: &Localizer<'_>,
    grid: &ScanGrid,
    with_index: bool,
    threads: Option<usize>,
    mut sink: impl FnMut(&[ScanPoint]) -> Result<()>,
) -> Result<usize> {
    let slab = grid.len() / grid.axes[0].count;
    let mut failures = 0;
    for s in 0..grid.axes[0].count {
        let range = s * slab..(s + 1) * slab;
        let points: Vec<ScanPoint> = with_pool(threads, || {
            range
                .into_par_iter()
                .map(|p| evaluate_point(loc, grid, p, with_index))
                .collect()
        });
        failures += points.iter().filter(|p| p.error.is_some()).count();
        sink(&points)?;
    }
    Ok(failures)
}

/// Flat indices of grid points with `gap ≤ eps`. Failed (NaN) points are excluded.
pub fn zero_set(result: &ScanResult, eps: f64) -> Vec<usize> {
    result
        .gap
        .iter()
        .enumerate()
        .filter(|(_, g)| **g <= eps)
        .map(|(p, _)| p)
        .collect()
}

/// Coordinates (varying axes only) of the given flat points.
pub fn point_cloud(result: &ScanResult, points: &[usize]) -> Vec<Vec<f64>> {
    points.iter().map(|&p| result.grid.varying_coords(p)).collect()
}

/// Connected components of a point cloud under the radius graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Components {
    pub count: usize,
    /// Component label of each input point, labels ordered by first appearance.
    pub labels: Vec<usize>,
    /// Sizes in label order.
    pub sizes: Vec<usize>,
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Links points at Euclidean distance `≤ radius` and counts components.
/// Candidate pairs come from a hash grid with cell size `radius`.
pub fn component_count(points: &[Vec<f64>], radius: f64) -> Result<Components> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("linking radius must be positive, got {radius}")));
    }
    let n = points.len();
    if n == 0 {
        return Ok(Components { count: 0, labels: Vec::new(), sizes: Vec::new() });
    }
    let dim = points[0].len();
    let key = |p: &[f64]| -> Vec<i64> { p.iter().map(|x| (x / radius).floor() as i64).collect() };
    let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        cells.entry(key(p)).or_default().push(i);
    }
    let r2 = radius * radius;
    let mut uf = UnionFind::new(n);
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(dim as u32))
        .map(|mut c| {
            (0..dim)
                .map(|_| {
                    let o = (c % 3) as i64 - 1;
                    c /= 3;
                    o
                })
                .collect()
        })
        .collect();
    for (i, p) in points.iter().enumerate() {
        let k = key(p);
        for off in &offsets {
            let nk: Vec<i64> = k.iter().zip(off).map(|(a, b)| a + b).collect();
            if let Some(members) = cells.get(&nk) {
                for &j in members {
                    if j > i {
                        let d2: f64 = p.iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                        if d2 <= r2 * (1.0 + 1e-12) {
                            uf.union(i, j);
                        }
                    }
                }
            }
        }
    }
    let mut label_of_root: HashMap<usize, usize> = HashMap::new();
    let mut labels = Vec::with_capacity(n);
    let mut sizes = Vec::new();
    for i in 0..n {
        let root = uf.find(i);
        let next = label_of_root.len();
        let l = *label_of_root.entry(root).or_insert(next);
        if l == sizes.len() {
            sizes.push(0);
        }
        sizes[l] += 1;
        labels.push(l);
    }
    Ok(Components { count: sizes.len(), labels, sizes })
}

/// Outcome of marching along one ray.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayResult {
    pub direction: Vec<f64>,
    pub crossings: usize,
    /// Grid parameters `t` at the start of each run of `gap ≤ eps`.
    pub run_starts: Vec<f64>,
    /// Number of localizer evaluations actually performed.
    pub evaluations: usize,
}

/// Counts maximal runs of grid points `t = 0, step, 2·step, … ≤ t_max` along
/// `origin + t·direction` with `gap ≤ eps`.
///
/// Because the gap is 1-Lipschitz in λ, a point with gap `g > eps` certifies
/// that every grid point within distance `g - eps` also has gap above `eps`;
/// those points are skipped without evaluation. The count equals that of
/// evaluating every grid point.
pub fn ray_crossings(
    loc: &Localizer<'_>,
    origin: &ProbePoint,
    direction: &[f64],
    t_max: f64,
    step: f64,
    eps: f64,
) -> Result<RayResult> {
    let d = loc.tuple().d();
    origin.check_dim(d)?;
    if direction.len() != d {
        return Err(Error::DimensionMismatch(format!("direction has {} entries, expected {d}", direction.len())));
    }
    let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("direction must be a unit vector, has norm {norm}")));
    }
    if !(step > 0.0) || !(eps > 0.0) || !(t_max >= 0.0) {
        return Err(Error::InvalidArgument("ray step, eps and t_max must be positive".into()));
    }
    let n_steps = (t_max / step + 1e-9).floor() as usize;
    let at = |i: usize| -> ProbePoint {
        let t = i as f64 * step;
        ProbePoint::new(origin.coords().iter().zip(direction).map(|(o, u)| o + t * u).collect())
    };
    let mut evaluations = 0;
    let g0 = loc.gap(&at(0))?;
    evaluations += 1;
    if g0 <= eps {
        return Err(Error::RayStartsOnSpectrum { gap: g0, eps });
    }
    let mut crossings = 0;
    let mut run_starts = Vec::new();
    let mut in_run = false;
    let mut i = 0usize;
    let mut g = g0;
    loop {
        if g <= eps {
            if !in_run {
                crossings += 1;
                run_starts.push(i as f64 * step);
            }
            in_run = true;
        } else {
            in_run = false;
        }
        let skip = if g > eps {
            (((g - eps) / step) * (1.0 - 1e-12)).ceil().max(1.0) as usize
        } else {
            1
        };
        i += skip;
        if i > n_steps {
            break;
        }
        g = loc.gap(&at(i))?;
        evaluations += 1;
    }
    Ok(RayResult { direction: direction.to_vec(), crossings, run_starts, evaluations })
}

/// The `k` eigenvalues nearest zero at `steps` equally spaced points from
/// `start` to `end`. Failures are kept per step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowStep {
    pub t: f64,
    pub lambda: Vec<f64>,
    pub eigs: Vec<f64>,
    pub error: Option<String>,
}

pub fn spectral_flow(
    loc: &Localizer<'_>,
    start: &ProbePoint,
    end: &ProbePoint,
    steps: usize,
    k: usize,
    threads: Option<usize>,
) -> Result<Vec<FlowStep>> {
    let d = loc.tuple().d();
    start.check_dim(d)?;
    end.check_dim(d)?;
    if steps < 2 {
        return Err(Error::InvalidArgument("spectral flow needs at least 2 steps".into()));
    }
    Ok(with_pool(threads, || {
        (0..steps)
            .into_par_iter()
            .map(|s| {
                let t = s as f64 / (steps - 1) as f64;
                let lambda: Vec<f64> = start
                    .coords()
                    .iter()
                    .zip(end.coords())
                    .map(|(a, b)| a + t * (b - a))
                    .collect();
                match loc.eig_window(&ProbePoint::new(lambda.clone()), k) {
                    Ok(eigs) => FlowStep { t, lambda, eigs, error: None },
                    Err(e) => FlowStep { t, lambda, eigs: Vec::new(), error: Some(e.to_string()) },
                }
            })
            .collect()
    }))
}

/// Connected regions (grid adjacency) of points with `gap > eps`, and whether
/// the index is constant on each. Returns `(region count, all constant)`.
pub fn index_regions(result: &ScanResult, eps: f64) -> (usize, bool) {
    let Some(index) = &result.index else { return (0, true) };
    let grid = &result.grid;
    let n = grid.len();
    let mut region = vec![usize::MAX; n];
    let mut count = 0;
    let mut constant = true;
    for seed in 0..n {
        if region[seed] != usize::MAX || !(result.gap[seed] > eps) {
            continue;
        }
        let value = index[seed];
        let mut stack = vec![seed];
        region[seed] = count;
        while let Some(p) = stack.pop() {
            if index[p] != value {
                constant = false;
            }
            let idx = grid.multi_index(p);
            for k in 0..idx.len() {
                for delta in [-1i64, 1] {
                    let v = idx[k] as i64 + delta;
                    if v < 0 || v >= grid.axes[k].count as i64 {
                        continue;
                    }
                    let mut nb = idx.clone();
                    nb[k] = v as usize;
                    let q = grid.flat_index(&nb);
                    if region[q] == usize::MAX && result.gap[q] > eps {
                        region[q] = count;
                        stack.push(q);
                    }
                }
            }
        }
        count += 1;
    }
    (count, constant)
}

/// Writes `λ_1 … λ_d, gap, index` rows. Floats use the shortest
/// round-trip representation, so equal inputs give byte-identical files.
pub fn write_csv_header(w: &mut impl Write, d: usize, energy_last: bool) -> std::io::Result<()> {
    let names: Vec<String> = (0..d).map(|j| axis_name(j, d, energy_last)).collect();
    writeln!(w, "{},gap,index", names.join(","))
}

pub fn write_csv_rows(w: &mut impl Write, points: &[ScanPoint]) -> std::io::Result<()> {
    for p in points {
        for v in p.lambda.coords() {
            write!(w, "{v},")?;
        }
        match p.index {
            Some(i) => writeln!(w, "{},{i}", p.gap)?,
            None => writeln!(w, "{},", p.gap)?,
        }
    }
    Ok(())
}

impl ScanResult {
    pub fn points(&self) -> Vec<ScanPoint> {
        (0..self.grid.len())
            .map(|p| ScanPoint {
                flat: p,
                lambda: self.grid.point(p),
                gap: self.gap[p],
                index: self.index.as_ref().and_then(|v| v[p]),
                error: None,
            })
            .collect()
    }

    pub fn write_csv(&self, w: &mut impl Write, energy_last: bool) -> std::io::Result<()> {
        write_csv_header(w, self.grid.d, energy_last)?;
        write_csv_rows(w, &self.points())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = ScanGrid::parse(5, "x1=-3:3:121, x2=-1:1:3", "x3=0,x4=0.5,E=0.25").unwrap();
        assert_eq!(g.len(), 363);
        assert_eq!(g.fixed, vec![0.0, 0.0, 0.0, 0.5, 0.25]);
        assert_eq!(g.point(1).coords(), &[-3.0, 0.0, 0.0, 0.5, 0.25]);
        assert_eq!(g.point(362).coords(), &[3.0, 1.0, 0.0, 0.5, 0.25]);
        assert!(ScanGrid::parse(3, "x1=bad", "").is_err());
        assert!(ScanGrid::parse(3, "x4=0:1:3", "").is_err());
        assert!(ScanGrid::parse(3, "x1=0:1:1", "").is_err());
        assert!(ScanGrid::parse(3, "x1=1:0:5", "").is_err());
    }

    #[test]
    fn flat_and_multi_index_round_trip() {
        let g = ScanGrid::parse(3, "x1=0:1:4,x3=0:1:5", "").unwrap();
        for p in 0..g.len() {
            assert_eq!(g.flat_index(&g.multi_index(p)), p);
        }
    }

    #[test]
    fn two_separated_clusters() {
        let mut pts = Vec::new();
        for i in 0..5 {
            pts.push(vec![i as f64 * 0.1, 0.0]);
            pts.push(vec![10.0 + i as f64 * 0.1, 0.0]);
        }
        let c = component_count(&pts, 0.15).unwrap();
        assert_eq!(c.count, 2);
        assert_eq!(c.sizes, vec![5, 5]);
        assert_eq!(component_count(&[], 1.0).unwrap().count, 0);
        assert!(component_count(&pts, 0.0).is_err());
    }

    #[test]
    fn linking_is_inclusive_at_the_radius() {
        let pts = vec![vec![0.0], vec![0.3], vec![0.6]];
        assert_eq!(component_count(&pts, 0.3).unwrap().count, 1);
        assert_eq!(component_count(&pts, 0.29).unwrap().count, 3);
    }
}
