//! Parameter sweeps with continuity-tracked eigenvalue sheets, the reciprocal
//! winding number, and CSV/JSON export.

mod export;
mod winding;

pub use export::{export, format_number, read_json, write_csv, write_json, ExportFormat};
pub use winding::{winding_number, WindingResult, MIN_WINDING_SAMPLES};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assign::min_cost_assignment;
use crate::ep::{cluster_tol, ep_trajectories, linspace, scan_for_eps, EpRecord, ScanConfig, TrajectoryCrossing, TrajectoryGrid};
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, Axis, ChainParams};
use crate::spectral::eigenvalues;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisRange {
    pub axis: Axis,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisRange {
    pub fn new(axis: Axis, min: f64, max: f64, steps: usize) -> Result<Self> {
        let r = AxisRange { axis, min, max, steps };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min {
            return Err(Error::InvalidConfig(format!(
                "{} range [{}, {}] must be finite and ordered",
                self.axis, self.min, self.max
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidConfig(format!(
                "{} sweep needs at least 2 steps, got {}",
                self.axis, self.steps
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.steps)
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.steps - 1) as f64
    }
}

/// Energies at one grid point, index `i` of `re`/`im` being sheet `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub g: f64,
    pub a: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl SweepPoint {
    fn new(g: f64, a: f64, energies: &[Complex64]) -> Self {
        SweepPoint {
            g,
            a,
            re: energies.iter().map(|z| z.re).collect(),
            im: energies.iter().map(|z| z.im).collect(),
        }
    }

    pub fn energies(&self) -> Vec<Complex64> {
        self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    /// Parameters held fixed; swept entries are overwritten per point.
    pub params: ChainParams,
    /// One axis for a line sweep; `[g, a]` for a plane sweep.
    pub axes: Vec<AxisRange>,
    /// Row-major with `a` outer and `g` inner.
    pub points: Vec<SweepPoint>,
    pub ep_annotations: Vec<EpRecord>,
    /// Meeting points of EP trajectories (plane sweeps only).
    #[serde(default)]
    pub ep_crossings: Vec<TrajectoryCrossing>,
}

impl SweepGrid {
    pub fn n(&self) -> usize {
        self.params.n
    }

    /// Number of points along the inner (fastest) axis.
    pub fn row_len(&self) -> usize {
        self.axes[0].steps
    }

    pub fn rows(&self) -> impl Iterator<Item = &[SweepPoint]> {
        self.points.chunks(self.row_len())
    }

    /// Points with the given sheet index, in grid order.
    pub fn sheet(&self, index: usize) -> Vec<Complex64> {
        self.points
            .iter()
            .map(|p| Complex64::new(p.re[index], p.im[index]))
            .collect()
    }
}

/// Assigns the eigenvalues `next` to the sheets whose previous values are
/// `prev`, minimising the total distance. Returns `perm` with sheet `i`
/// taking `next[perm[i]]`; exact ties keep the previous sheet order.
pub fn track_step(prev: &[Complex64], next: &[Complex64]) -> Vec<usize> {
    let cost: Vec<Vec<f64>> = prev
        .iter()
        .map(|x| next.iter().map(|y| (x - y).norm()).collect())
        .collect();
    min_cost_assignment(&cost)
}

fn reorder(values: &[Complex64], perm: &[usize]) -> Vec<Complex64> {
    perm.iter().map(|&j| values[j]).collect()
}

fn spectra(template: &ChainParams, coords: &[(f64, f64)]) -> Result<Vec<Vec<Complex64>>> {
    coords
        .par_iter()
        .map(|&(g, a)| {
            let p = template.with_g(g).with_a(a);
            Ok(eigenvalues(&build_hamiltonian(&p)?)?.eigenvalues)
        })
        .collect()
}

/// Spectra along one axis, with sheets continued by optimal assignment from
/// the sorted spectrum at the first point, and the EPs found on that line.
pub fn sweep_1d(template: &ChainParams, range: &AxisRange) -> Result<SweepGrid> {
    template.validate()?;
    range.validate()?;
    let coords: Vec<(f64, f64)> = range
        .values()
        .into_iter()
        .map(|x| {
            let p = template.with(range.axis, x);
            (p.g, p.a)
        })
        .collect();
    let raw = spectra(template, &coords)?;
    let mut points = Vec::with_capacity(raw.len());
    let mut prev: Vec<Complex64> = raw[0].clone();
    for (k, e) in raw.iter().enumerate() {
        if k > 0 {
            prev = reorder(e, &track_step(&prev, e));
        }
        points.push(SweepPoint::new(coords[k].0, coords[k].1, &prev));
    }
    let scan = ScanConfig::new(range.axis, range.min, range.max, range.steps)?;
    Ok(SweepGrid {
        params: *template,
        axes: vec![*range],
        points,
        ep_annotations: scan_for_eps(template, &scan)?,
        ep_crossings: Vec::new(),
    })
}

/// Spectra on a `(g, a)` grid. Each row along `g` is tracked as in
/// [`sweep_1d`]; the first point of each row is stitched to the first point
/// of the previous row by the same assignment. EP records of every row and the
/// meeting points of their trajectories are attached.
pub fn sweep_2d(template: &ChainParams, g: (f64, f64, usize), a: (f64, f64, usize)) -> Result<SweepGrid> {
    template.validate()?;
    let g_axis = AxisRange::new(Axis::G, g.0, g.1, g.2)?;
    let a_axis = if a.2 == 1 && a.0 == a.1 && a.0.is_finite() {
        AxisRange { axis: Axis::A, min: a.0, max: a.1, steps: 1 }
    } else {
        AxisRange::new(Axis::A, a.0, a.1, a.2)?
    };
    let gs = g_axis.values();
    let a_vals = if a_axis.steps == 1 { vec![a_axis.min] } else { a_axis.values() };
    let coords: Vec<(f64, f64)> = a_vals
        .iter()
        .flat_map(|&av| gs.iter().map(move |&gv| (gv, av)))
        .collect();
    let raw = spectra(template, &coords)?;
    let row = gs.len();
    let mut points: Vec<SweepPoint> = Vec::with_capacity(raw.len());
    let mut row_start: Vec<Complex64> = raw[0].clone();
    for r in 0..a_vals.len() {
        let base = r * row;
        if r > 0 {
            row_start = reorder(&raw[base], &track_step(&row_start, &raw[base]));
        }
        let mut prev = row_start.clone();
        for k in 0..row {
            if k > 0 {
                prev = reorder(&raw[base + k], &track_step(&prev, &raw[base + k]));
            }
            points.push(SweepPoint::new(coords[base + k].0, coords[base + k].1, &prev));
        }
    }
    let traj = ep_trajectories(
        template,
        &TrajectoryGrid::new((g_axis.min, g_axis.max, g_axis.steps), (a_axis.min, a_axis.max, a_vals.len())),
    )?;
    Ok(SweepGrid {
        params: *template,
        axes: vec![g_axis, a_axis],
        points,
        ep_annotations: traj.rows.into_iter().flatten().collect(),
        ep_crossings: traj.crossings,
    })
}

/// Number of distinct real parts (within the cluster tolerance) at a point,
/// and whether one of them is zero. Real parts within the tolerance of zero
/// all count as the zero layer.
pub fn re_layers(point: &SweepPoint) -> (usize, bool) {
    let tol = cluster_tol(&point.energies());
    let mut re: Vec<f64> = point.re.iter().map(|&r| if r.abs() < tol { 0.0 } else { r }).collect();
    re.sort_by(f64::total_cmp);
    let mut distinct = usize::from(!re.is_empty());
    for w in re.windows(2) {
        if w[1] - w[0] >= tol {
            distinct += 1;
        }
    }
    (distinct, re.iter().any(|r| r.abs() < tol))
}

/// Most `Re E` layers seen at a point where a zero sheet (a purely imaginary
/// pair) coexists with nonzero real parts: the zero sheet plus every signed
/// sheet that has not merged with its partner.
pub fn principal_sheet_count(grid: &SweepGrid) -> usize {
    grid.points
        .iter()
        .map(re_layers)
        .filter(|&(d, zero)| zero && d > 1)
        .map(|(d, _)| d)
        .max()
        .unwrap_or(0)
}

/// Most frequent number of `Re E` layers over the points that are not purely
/// imaginary; ties go to the smaller count.
pub fn dominant_layer_count(grid: &SweepGrid) -> usize {
    let mut counts = std::collections::BTreeMap::<usize, usize>::new();
    for p in &grid.points {
        let (d, zero) = re_layers(p);
        if !(zero && d == 1) {
            *counts.entry(d).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)))
        .map_or(0, |(k, _)| k)
}

/// For every pair of neighbouring points along the inner axis, the largest
/// ratio of a sheet's jump to that sheet's distance from the nearest other
/// eigenvalue at either point.
pub fn continuity_ratios(grid: &SweepGrid) -> Vec<f64> {
    let mut out = Vec::new();
    for row in grid.rows() {
        for w in row.windows(2) {
            let (x, y) = (w[0].energies(), w[1].energies());
            let worst = (0..x.len())
                .map(|i| {
                    let gap = nearest_other(&x, i).min(nearest_other(&y, i));
                    let jump = (x[i] - y[i]).norm();
                    if gap > 0.0 { jump / gap } else { f64::INFINITY }
                })
                .fold(0.0, f64::max);
            out.push(worst);
        }
    }
    out
}

fn nearest_other(v: &[Complex64], i: usize) -> f64 {
    (0..v.len())
        .filter(|&j| j != i)
        .map(|j| (v[i] - v[j]).norm())
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::multiset_distance;

    fn chain(v: f64, w: f64, g: f64, a: f64, n: usize) -> ChainParams {
        ChainParams::new(v, w, g, a, n).unwrap()
    }

    #[test]
    fn zero_hopping_gives_zero_sheets() {
        let grid = sweep_1d(&chain(0.0, 0.0, 0.0, 0.0, 4), &AxisRange::new(Axis::A, 0.0, 0.0, 5).unwrap()).unwrap();
        for p in &grid.points {
            assert!(p.re.iter().chain(&p.im).all(|&x| x == 0.0));
        }
    }

    #[test]
    fn sheets_reorder_raw_spectrum() {
        let t = chain(0.1, 1.0, 0.0, 0.2, 4);
        let grid = sweep_1d(&t, &AxisRange::new(Axis::G, -2.0, 2.0, 81).unwrap()).unwrap();
        for p in &grid.points {
            let raw = eigenvalues(&build_hamiltonian(&t.with_g(p.g).with_a(p.a)).unwrap()).unwrap().eigenvalues;
            assert_eq!(multiset_distance(&raw, &p.energies()), 0.0);
        }
    }

    #[test]
    fn tracking_follows_crossing_lines() {
        // Sorting by real part would swap the labels of two crossing lines.
        let prev = [Complex64::new(-0.1, 1.0), Complex64::new(0.1, -1.0)];
        let next = [Complex64::new(-0.1, -1.0), Complex64::new(0.1, 1.0)];
        assert_eq!(track_step(&prev, &next), vec![1, 0]);
        assert_eq!(track_step(&prev, &prev), vec![0, 1]);
    }

    #[test]
    fn single_row_plane_equals_line() {
        let t = chain(1.0, 0.1, 0.0, 0.3, 4);
        let line = sweep_1d(&t, &AxisRange::new(Axis::G, -2.0, 2.0, 41).unwrap()).unwrap();
        let plane = sweep_2d(&t, (-2.0, 2.0, 41), (0.3, 0.3, 1)).unwrap();
        assert_eq!(line.points, plane.points);
        assert_eq!(line.ep_annotations, plane.ep_annotations);
    }

    #[test]
    fn plane_slice_matches_line() {
        let t = chain(1.0, 0.1, 0.0, 0.0, 6);
        let plane = sweep_2d(&t, (-2.0, 2.0, 41), (0.0, 0.7, 3)).unwrap();
        let line = sweep_1d(&t.with_a(0.35), &AxisRange::new(Axis::G, -2.0, 2.0, 41).unwrap()).unwrap();
        let slice = &plane.points[41..82];
        for (p, q) in slice.iter().zip(&line.points) {
            assert_eq!((p.g, p.a), (q.g, q.a));
            assert_eq!(multiset_distance(&p.energies(), &q.energies()), 0.0);
        }
        assert!(line.ep_annotations.iter().all(|r| plane.ep_annotations.contains(r)));
    }

    #[test]
    fn principal_sheets_of_four_site_plane() {
        let grid = sweep_2d(&chain(1.0, 0.1, 0.0, 0.0, 4), (-2.0, 2.0, 81), (0.0, 1.0, 21)).unwrap();
        assert_eq!(principal_sheet_count(&grid), 3);
        assert_eq!(dominant_layer_count(&grid), 3);
    }

    #[test]
    fn small_real_pair_counts_as_zero_layer() {
        let point = SweepPoint { g: 0.0, a: 0.0, re: vec![-0.99, -0.001, 0.001, 0.99], im: vec![0.0; 4] };
        assert_eq!(re_layers(&point), (3, true));
        let line = AxisRange::new(Axis::G, -2.0, 2.0, 801).unwrap();
        let grid = sweep_1d(&chain(0.1, 1.0, 0.0, 0.0, 4), &line).unwrap();
        assert_eq!(principal_sheet_count(&grid), 3);
    }

    #[test]
    fn six_site_plane_has_five_principal_sheets() {
        let grid = sweep_2d(&chain(1.0, 0.1, 0.0, 0.0, 6), (-2.0, 2.0, 81), (0.0, 1.0, 21)).unwrap();
        assert_eq!(principal_sheet_count(&grid), 5);
    }

    #[test]
    fn rejects_short_axis() {
        assert!(AxisRange::new(Axis::G, 0.0, 1.0, 1).is_err());
        assert!(AxisRange::new(Axis::G, 1.0, 0.0, 5).is_err());
        assert!(sweep_2d(&chain(1.0, 0.1, 0.0, 0.0, 4), (0.0, 1.0, 1), (0.0, 1.0, 3)).is_err());
    }
}
