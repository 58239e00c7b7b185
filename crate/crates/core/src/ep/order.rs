use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, Axis, ChainParams};
use crate::spectral::eigenvalues;

use super::{centroid, cluster_tol, clusters, spread_near, EXPONENT_MATCH};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderEstimate {
    /// Least-squares slope of `log(splitting)` against `log(ε)`.
    pub exponent: f64,
    /// `round(1 / exponent)`.
    pub order: usize,
    /// Number of `ε` samples above the noise floor used in the fit.
    pub points: usize,
}

impl OrderEstimate {
    pub fn matches(&self) -> bool {
        self.order >= 1 && (self.exponent - 1.0 / self.order as f64).abs() < EXPONENT_MATCH
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFitOptions {
    pub eps_min: f64,
    pub eps_max: f64,
    pub points: usize,
    /// Splittings below this are discarded.
    pub noise_floor: f64,
    /// Energy of the cluster to follow; without it the tightest pair is used.
    pub target: Option<Complex64>,
}

impl Default for OrderFitOptions {
    fn default() -> Self {
        OrderFitOptions {
            eps_min: 1e-9,
            eps_max: 1e-3,
            points: 13,
            noise_floor: 1e-11,
            target: None,
        }
    }
}

impl OrderFitOptions {
    pub fn with_target(mut self, target: Complex64) -> Self {
        self.target = Some(target);
        self
    }
}

/// Fits the splitting exponent of the eigenvalue cluster at `p` under
/// `axis -> axis + ε`.
///
/// For a cluster of `k >= 2` eigenvalues the splitting is the largest pairwise
/// distance among the `k` eigenvalues nearest the unperturbed centroid. When
/// only a single eigenvalue is followed (a target away from any cluster) the
/// splitting is its displacement, so a regular point gives exponent 1.
pub fn order_estimate(p: &ChainParams, axis: Axis, opts: &OrderFitOptions) -> Result<OrderEstimate> {
    if !(opts.eps_min > 0.0 && opts.eps_max > opts.eps_min) || opts.points < 3 {
        return Err(Error::InvalidConfig("need 0 < eps_min < eps_max and at least 3 points".into()));
    }
    if (opts.eps_max / opts.eps_min).log10() < 3.0 - 1e-9 {
        return Err(Error::InvalidConfig("ε range must span at least three decades".into()));
    }
    let base = eigenvalues(&build_hamiltonian(p)?)?.eigenvalues;
    let tol = cluster_tol(&base);
    let groups = clusters(&base, tol);

    let (center, k) = match opts.target {
        Some(t) => {
            let nearest = (0..base.len())
                .min_by(|&i, &j| (base[i] - t).norm().total_cmp(&(base[j] - t).norm()))
                .unwrap();
            let group = groups.iter().find(|g| g.contains(&nearest)).unwrap();
            (centroid(&base, group), group.len())
        }
        None => {
            let mut multi: Vec<&Vec<usize>> = groups.iter().filter(|g| g.len() >= 2).collect();
            if multi.is_empty() {
                return Err(Error::AmbiguousCluster);
            }
            multi.sort_by(|a, b| {
                let sa = spread_near(&base, centroid(&base, a), a.len());
                let sb = spread_near(&base, centroid(&base, b), b.len());
                sa.total_cmp(&sb)
            });
            (centroid(&base, multi[0]), multi[0].len())
        }
    };
    let anchor = if k == 1 {
        *base
            .iter()
            .min_by(|a, b| (*a - center).norm().total_cmp(&(*b - center).norm()))
            .unwrap()
    } else {
        center
    };

    let x0 = p.get(axis);
    let ratio = (opts.eps_max / opts.eps_min).ln();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..opts.points {
        let eps = opts.eps_min * (ratio * i as f64 / (opts.points - 1) as f64).exp();
        let e = eigenvalues(&build_hamiltonian(&p.with(axis, x0 + eps))?)?.eigenvalues;
        let split = if k == 1 {
            e.iter().map(|z| (z - anchor).norm()).fold(f64::INFINITY, f64::min)
        } else {
            spread_near(&e, center, k)
        };
        if split > opts.noise_floor && split.is_finite() {
            xs.push(eps.ln());
            ys.push(split.ln());
        }
    }
    if xs.len() < 3 {
        return Err(Error::OrderFit(format!(
            "only {} of {} samples above the noise floor",
            xs.len(),
            opts.points
        )));
    }
    let span = (xs[xs.len() - 1] - xs[0]) / std::f64::consts::LN_10;
    if span < 3.0 - 1e-9 {
        return Err(Error::OrderFit(format!(
            "usable samples span {span:.2} decades, need 3"
        )));
    }
    let slope = least_squares_slope(&xs, &ys);
    if !(slope > 0.0) {
        return Err(Error::OrderFit(format!("splitting does not shrink with ε (slope {slope})")));
    }
    Ok(OrderEstimate {
        exponent: slope,
        order: (1.0 / slope).round().max(1.0) as usize,
        points: xs.len(),
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
