//! Locating, ordering, and classifying spectral degeneracies.

mod order;
mod scan;
mod trajectory;

pub use order::{order_estimate, OrderEstimate, OrderFitOptions};
pub use scan::{classify_at, scan_for_eps, ScanConfig};
pub(crate) use scan::linspace;
pub use trajectory::{ep_trajectories, TrajectoryCrossing, TrajectoryGrid, TrajectorySet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::closedform::Case;
use crate::error::Result;
use crate::model::{build_hamiltonian, ChainParams};
use crate::spectral::{coalescence_measure_with_tol, eigenvalues, max_abs};

/// Coalescence below this marks an exceptional point.
pub const EP_MEASURE: f64 = 0.1;
/// Coalescence above this marks a diabolic point.
pub const DP_MEASURE: f64 = 0.9;
/// Largest allowed `|exponent - 1/order|` for an order match.
pub const EXPONENT_MATCH: f64 = 0.05;

/// Eigenvalues within this distance are grouped into one cluster.
pub fn cluster_tol(values: &[Complex64]) -> f64 {
    1e-3 * (1.0 + max_abs(values))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegeneracyKind {
    /// Eigenvectors coalesce and the splitting follows `ε^(1/k)` with `k >= 2`.
    Exceptional,
    /// Independent eigenvectors.
    Diabolic,
    /// Coalescence measure inside the guard band.
    Indeterminate,
    /// Eigenvectors coalesce but the splitting is not a `1/k` power with
    /// `k >= 2` (for example a linear crossing of a defective pair).
    Crossing,
}

impl std::fmt::Display for DegeneracyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DegeneracyKind::Exceptional => "EP",
            DegeneracyKind::Diabolic => "DP",
            DegeneracyKind::Indeterminate => "indeterminate",
            DegeneracyKind::Crossing => "crossing",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpRecord {
    pub g: f64,
    pub a: f64,
    /// Centroid of the coalescing cluster.
    pub energy: Complex64,
    /// Number of eigenvalues in the cluster.
    pub multiplicity: usize,
    pub order_estimate: Option<OrderEstimate>,
    /// Four-site class, `None` for other lengths.
    pub case_label: Option<Case>,
    pub coalescence: f64,
    pub kind: DegeneracyKind,
    /// Normalised discriminant reached the refinement tolerance.
    pub refined: bool,
    pub discriminant: f64,
}

impl EpRecord {
    pub fn is_ep(&self) -> bool {
        self.kind == DegeneracyKind::Exceptional
    }

    pub fn order(&self) -> Option<usize> {
        self.order_estimate.map(|o| o.order)
    }
}

/// Thresholds the coalescence measure alone.
pub fn kind_from_measure(measure: f64) -> DegeneracyKind {
    if measure > DP_MEASURE {
        DegeneracyKind::Diabolic
    } else if measure >= EP_MEASURE {
        DegeneracyKind::Indeterminate
    } else {
        DegeneracyKind::Exceptional
    }
}

/// Combines the coalescence measure with the fitted splitting order.
pub fn classify_degeneracy(measure: f64, order: Option<&OrderEstimate>, n: usize) -> DegeneracyKind {
    match kind_from_measure(measure) {
        DegeneracyKind::Exceptional => match order {
            Some(o) if o.matches() && o.order >= 2 && o.order <= n => DegeneracyKind::Exceptional,
            _ => DegeneracyKind::Crossing,
        },
        other => other,
    }
}

/// EP, DP, or indeterminate for a candidate pair, from the coalescence measure
/// with the cluster tolerance as degeneracy precondition.
pub fn ep_vs_dp(p: &ChainParams, pair: (Complex64, Complex64)) -> Result<DegeneracyKind> {
    let h = build_hamiltonian(p)?;
    let spec = eigenvalues(&h)?;
    let m = coalescence_measure_with_tol(&h, pair, cluster_tol(&spec.eigenvalues))?;
    Ok(kind_from_measure(m))
}

/// Single-linkage clusters of `values` under `tol`, each sorted by index,
/// listed by smallest member.
pub fn clusters(values: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() < tol {
                let (ri, rj) = (root(&mut label, i), root(&mut label, j));
                if ri != rj {
                    label[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index_of = vec![usize::MAX; n];
    for i in 0..n {
        let r = root(&mut label, i);
        if index_of[r] == usize::MAX {
            index_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[index_of[r]].push(i);
    }
    groups
}

pub(crate) fn centroid(values: &[Complex64], idx: &[usize]) -> Complex64 {
    idx.iter().map(|&i| values[i]).sum::<Complex64>() / idx.len() as f64
}

/// Largest pairwise distance among the `k` values nearest `center`.
pub(crate) fn spread_near(values: &[Complex64], center: Complex64, k: usize) -> f64 {
    let mut by_dist: Vec<Complex64> = values.to_vec();
    by_dist.sort_by(|a, b| (a - center).norm().total_cmp(&(b - center).norm()));
    let near = &by_dist[..k.min(by_dist.len())];
    let mut m = 0.0f64;
    for i in 0..near.len() {
        for j in i + 1..near.len() {
            m = m.max((near[i] - near[j]).norm());
        }
    }
    m
}

pub(crate) fn min_pair_distance(values: &[Complex64]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            m = m.min((values[i] - values[j]).norm());
        }
    }
    m
}
