use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closedform::{classify_point, DEFAULT_CLASSIFY_TOL};
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, Axis, ChainParams};
use crate::spectral::{coalescence_measure_with_tol, eigenvalues, normalized_discriminant};

use super::order::{order_estimate, OrderFitOptions};
use super::{centroid, classify_degeneracy, cluster_tol, clusters, min_pair_distance, spread_near, EpRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub axis: Axis,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    /// A refined point has `|normalised discriminant|` below this.
    pub refine_tol: f64,
    /// Axis perturbed when fitting the splitting order.
    pub order_axis: Axis,
    /// Nested sub-grid levels used to separate nearby zeros.
    pub subdivision_depth: usize,
    /// Samples per sub-grid level.
    pub subdivision_samples: usize,
}

impl ScanConfig {
    pub fn new(axis: Axis, min: f64, max: f64, steps: usize) -> Result<Self> {
        let cfg = ScanConfig {
            axis,
            min,
            max,
            steps,
            refine_tol: 1e-12,
            order_axis: Axis::G,
            subdivision_depth: 2,
            subdivision_samples: 24,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min {
            return Err(Error::InvalidConfig(format!(
                "scan range [{}, {}] must be finite and ordered",
                self.min, self.max
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidConfig(format!("scan needs at least 2 steps, got {}", self.steps)));
        }
        if self.subdivision_samples < 4 {
            return Err(Error::InvalidConfig("subdivision needs at least 4 samples".into()));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.steps - 1) as f64
    }
}

pub(crate) fn linspace(min: f64, max: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![min];
    }
    let h = (max - min) / (steps - 1) as f64;
    (0..steps)
        .map(|i| if i == steps - 1 { max } else { min + h * i as f64 })
        .collect()
}

struct Probe<'a> {
    p: &'a ChainParams,
    axis: Axis,
}

impl Probe<'_> {
    fn disc(&self, x: f64) -> f64 {
        match build_hamiltonian(&self.p.with(self.axis, x)) {
            Ok(h) => normalized_discriminant(&h),
            Err(_) => f64::NAN,
        }
    }

    fn dmin(&self, x: f64) -> f64 {
        build_hamiltonian(&self.p.with(self.axis, x))
            .ok()
            .and_then(|h| eigenvalues(&h).ok())
            .map_or(f64::INFINITY, |s| min_pair_distance(&s.eigenvalues))
    }
}

/// Brackets that may hold a discriminant zero: sign changes, exact zeros, and
/// local minima of `|D|`, each narrowed by nested sub-grids.
fn brackets(probe: &Probe, xs: &[f64], ds: &[f64], depth: usize, samples: usize, out: &mut Vec<(f64, f64)>) {
    let n = xs.len();
    let mut raw = Vec::new();
    for i in 0..n {
        if ds[i] == 0.0 {
            raw.push((i.saturating_sub(1), (i + 1).min(n - 1)));
        }
    }
    for i in 0..n - 1 {
        if ds[i] * ds[i + 1] < 0.0 {
            raw.push((i, i + 1));
        }
    }
    for i in 1..n.saturating_sub(1) {
        let (l, m, r) = (ds[i - 1].abs(), ds[i].abs(), ds[i + 1].abs());
        if m != 0.0 && m < l && m <= r {
            raw.push((i - 1, i + 1));
        }
    }
    for (lo, hi) in raw {
        if depth == 0 || xs[hi] - xs[lo] <= 1e-12 * (1.0 + xs[lo].abs()) {
            out.push((xs[lo], xs[hi]));
            continue;
        }
        let (a, b) = (xs[lo.saturating_sub(1)], xs[(hi + 1).min(n - 1)]);
        let sub = linspace(a, b, samples);
        let sd: Vec<f64> = sub.par_iter().map(|&x| probe.disc(x)).collect();
        brackets(probe, &sub, &sd, depth - 1, samples, out);
    }
}

fn merge(mut br: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    br.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in br {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= 4.0 * f64::EPSILON * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    let (xm, fm) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    [(lo, f(lo)), (hi, f(hi)), (xm, fm)]
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0
}

/// Cluster diameter at the point must fall this far below its value a small
/// step away; rules out avoided crossings.
const SHARPNESS: f64 = 0.1;

fn sharp_clusters(probe: &Probe, x: f64) -> Result<Vec<Vec<usize>>> {
    let e = eigenvalues(&build_hamiltonian(&probe.p.with(probe.axis, x))?)?.eigenvalues;
    let tol = cluster_tol(&e);
    let h = 1e-6 * (1.0 + x.abs());
    let side: Vec<Vec<_>> = [x - h, x + h]
        .iter()
        .map(|&y| -> Result<_> { Ok(eigenvalues(&build_hamiltonian(&probe.p.with(probe.axis, y))?)?.eigenvalues) })
        .collect::<Result<_>>()?;
    Ok(clusters(&e, tol)
        .into_iter()
        .filter(|g| g.len() >= 2)
        .filter(|g| {
            let c = centroid(&e, g);
            let here = spread_near(&e, c, g.len());
            let away = side.iter().map(|s| spread_near(s, c, g.len())).fold(f64::INFINITY, f64::min);
            here <= SHARPNESS * away
        })
        .collect())
}

fn records_at(p: &ChainParams, cfg: &ScanConfig, x: f64, disc: f64) -> Result<Vec<EpRecord>> {
    let probe = Probe { p, axis: cfg.axis };
    let groups = sharp_clusters(&probe, x)?;
    build_records(&p.with(cfg.axis, x), groups, cfg.order_axis, disc, cfg.refine_tol)
}

fn build_records(
    q: &ChainParams,
    groups: Vec<Vec<usize>>,
    order_axis: Axis,
    disc: f64,
    refine_tol: f64,
) -> Result<Vec<EpRecord>> {
    let h = build_hamiltonian(q)?;
    let e = eigenvalues(&h)?.eigenvalues;
    let tol = cluster_tol(&e);
    let case_label = if q.n == 4 {
        Some(classify_point(q, DEFAULT_CLASSIFY_TOL)?)
    } else {
        None
    };
    let mut out = Vec::new();
    for group in groups {
        let energy = centroid(&e, &group);
        let (i, j) = closest_pair(&e, &group);
        let coalescence = coalescence_measure_with_tol(&h, (e[i], e[j]), tol)?;
        let order = order_estimate(q, order_axis, &OrderFitOptions::default().with_target(energy)).ok();
        out.push(EpRecord {
            g: q.g,
            a: q.a,
            energy,
            multiplicity: group.len(),
            order_estimate: order,
            case_label,
            coalescence,
            kind: classify_degeneracy(coalescence, order.as_ref(), q.n),
            refined: disc.abs() < refine_tol,
            discriminant: disc,
        });
    }
    Ok(out)
}

/// Records for every eigenvalue cluster at a single parameter point, without
/// the sharpness test a scan applies. `refined` uses the 1e-12 discriminant
/// tolerance.
pub fn classify_at(p: &ChainParams, order_axis: Axis) -> Result<Vec<EpRecord>> {
    p.validate()?;
    let h = build_hamiltonian(p)?;
    let e = eigenvalues(&h)?.eigenvalues;
    let groups = clusters(&e, cluster_tol(&e)).into_iter().filter(|g| g.len() >= 2).collect();
    build_records(p, groups, order_axis, normalized_discriminant(&h), 1e-12)
}

fn closest_pair(e: &[num_complex::Complex64], group: &[usize]) -> (usize, usize) {
    let mut best = (group[0], group[1], f64::INFINITY);
    for (k, &i) in group.iter().enumerate() {
        for &j in &group[k + 1..] {
            let d = (e[i] - e[j]).norm();
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    (best.0, best.1)
}

/// Locates degeneracies of the spectrum along `cfg.axis`, holding the other
/// parameters of `p` fixed.
///
/// The normalised discriminant is sampled on the grid; sign changes, exact
/// zeros and local minima of `|D|` are narrowed on nested sub-grids, and each
/// final bracket is refined by golden-section minimisation of the smallest
/// eigenvalue distance. Every eigenvalue cluster that is sharp at the refined
/// point becomes a record carrying its coalescence measure, fitted splitting
/// order, and classification. Records are sorted by axis value, then energy.
pub fn scan_for_eps(p: &ChainParams, cfg: &ScanConfig) -> Result<Vec<EpRecord>> {
    p.validate()?;
    cfg.validate()?;
    let probe = Probe { p, axis: cfg.axis };
    let xs = linspace(cfg.min, cfg.max, cfg.steps);
    let ds: Vec<f64> = xs.par_iter().map(|&x| probe.disc(x)).collect();
    let mut br = Vec::new();
    brackets(&probe, &xs, &ds, cfg.subdivision_depth, cfg.subdivision_samples, &mut br);
    let br = merge(br);

    let mut points: Vec<(f64, f64)> = br
        .par_iter()
        .map(|&(lo, hi)| {
            let x = if lo == hi { lo } else { golden_min(|x| probe.dmin(x), lo, hi) };
            (x, probe.dmin(x))
        })
        .collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut unique: Vec<(f64, f64)> = Vec::new();
    for (x, d) in points {
        match unique.last_mut() {
            Some(last) if (x - last.0).abs() <= 1e-7 * (1.0 + x.abs()) => {
                if d < last.1 {
                    *last = (x, d);
                }
            }
            _ => unique.push((x, d)),
        }
    }

    let per_point: Vec<Vec<EpRecord>> = unique
        .par_iter()
        .map(|&(x, _)| records_at(p, cfg, x, probe.disc(x)))
        .collect::<Result<_>>()?;
    let mut records: Vec<EpRecord> = per_point.into_iter().flatten().collect();
    records.sort_by(|r, s| {
        let (x, y) = (r.g.total_cmp(&s.g), r.a.total_cmp(&s.a));
        let key = if cfg.axis == Axis::G { x.then(y) } else { y.then(x) };
        key.then(r.energy.re.total_cmp(&s.energy.re))
            .then(r.energy.im.total_cmp(&s.energy.im))
    });
    Ok(records)
}
