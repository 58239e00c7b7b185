use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closedform::{case_iib_loci, QuarticPoint};
use crate::error::{Error, Result};
use crate::model::{Axis, ChainParams};

use super::scan::{linspace, scan_for_eps, ScanConfig};
use super::{EpRecord, EP_MEASURE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryGrid {
    pub g_min: f64,
    pub g_max: f64,
    pub g_steps: usize,
    pub a_min: f64,
    pub a_max: f64,
    pub a_steps: usize,
    /// Largest `g` jump, in `g` grid steps, allowed between linked records.
    pub link_radius_steps: f64,
}

impl TrajectoryGrid {
    pub fn new(g: (f64, f64, usize), a: (f64, f64, usize)) -> Self {
        TrajectoryGrid {
            g_min: g.0,
            g_max: g.1,
            g_steps: g.2,
            a_min: a.0,
            a_max: a.1,
            a_steps: a.2,
            link_radius_steps: 3.0,
        }
    }

    pub fn g_step(&self) -> f64 {
        if self.g_steps > 1 {
            (self.g_max - self.g_min) / (self.g_steps - 1) as f64
        } else {
            0.0
        }
    }

    pub fn a_step(&self) -> f64 {
        if self.a_steps > 1 {
            (self.a_max - self.a_min) / (self.a_steps - 1) as f64
        } else {
            0.0
        }
    }

    pub fn a_values(&self) -> Vec<f64> {
        match self.a_steps {
            0 => Vec::new(),
            n => linspace(self.a_min, self.a_max, n),
        }
    }
}

/// Two trajectories meeting: a candidate higher-order point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryCrossing {
    pub a: f64,
    pub g: f64,
    pub polylines: (usize, usize),
    /// `true` when the two curves change sides, `false` for a tangential touch.
    pub transversal: bool,
    /// Nearest closed-form fourth-order point (four-site chains only) within
    /// two grid steps.
    pub quartic_match: Option<QuarticPoint>,
    pub match_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySet {
    /// All scan records, one list per `a` row.
    pub rows: Vec<Vec<EpRecord>>,
    pub polylines: Vec<Vec<EpRecord>>,
    pub crossings: Vec<TrajectoryCrossing>,
}

/// Scans every `a` row along `g`, links coalescing records (measure below the
/// EP threshold) between adjacent rows by nearest neighbour, and reports
/// where distinct polylines meet.
pub fn ep_trajectories(template: &ChainParams, grid: &TrajectoryGrid) -> Result<TrajectorySet> {
    template.validate()?;
    let a_vals = grid.a_values();
    if a_vals.is_empty() || grid.g_steps == 0 {
        return Ok(TrajectorySet { rows: Vec::new(), polylines: Vec::new(), crossings: Vec::new() });
    }
    if grid.g_steps < 2 {
        return Err(Error::InvalidConfig("trajectory grid needs at least 2 g steps".into()));
    }
    let cfg = ScanConfig::new(Axis::G, grid.g_min, grid.g_max, grid.g_steps)?;
    let rows: Vec<Vec<EpRecord>> = a_vals
        .par_iter()
        .map(|&a| scan_for_eps(&template.with_a(a), &cfg))
        .collect::<Result<_>>()?;

    let dg = grid.g_step();
    let radius = grid.link_radius_steps * dg;
    // Each polyline holds (row, record).
    let mut lines: Vec<Vec<(usize, EpRecord)>> = Vec::new();
    for (r, recs) in rows.iter().enumerate() {
        let recs: Vec<&EpRecord> = recs.iter().filter(|x| x.coalescence < EP_MEASURE).collect();
        let active: Vec<usize> = (0..lines.len())
            .filter(|&l| r > 0 && lines[l].last().map(|x| x.0) == Some(r - 1))
            .collect();
        let mut pairs = Vec::new();
        for &l in &active {
            let last = &lines[l].last().unwrap().1;
            for (k, rec) in recs.iter().enumerate() {
                let d = (rec.g - last.g).abs();
                if d <= radius {
                    let cost = d / dg.max(f64::MIN_POSITIVE) + (rec.energy - last.energy).norm();
                    pairs.push((cost, l, k));
                }
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        let mut line_used = vec![false; lines.len()];
        let mut rec_used = vec![false; recs.len()];
        for (_, l, k) in pairs {
            if !line_used[l] && !rec_used[k] {
                line_used[l] = true;
                rec_used[k] = true;
                lines[l].push((r, recs[k].clone()));
            }
        }
        for (k, rec) in recs.iter().enumerate() {
            if !rec_used[k] {
                lines.push(vec![(r, (*rec).clone())]);
            }
        }
    }

    let quartic = if template.n == 4 {
        case_iib_loci(template.v, template.w)
    } else {
        Vec::new()
    };
    let da = grid.a_step();
    let match_radius = 2.0 * da.max(dg);
    let mut crossings = Vec::new();
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            crossings.extend(meet(&lines[i], &lines[j], (i, j), dg, &a_vals));
        }
    }
    for c in crossings.iter_mut() {
        if let Some(q) = quartic
            .iter()
            .min_by(|x, y| dist(x, c).total_cmp(&dist(y, c)))
        {
            let d = dist(q, c);
            if d <= match_radius {
                c.quartic_match = Some(*q);
                c.match_distance = Some(d);
            }
        }
    }
    crossings.sort_by(|x, y| x.a.total_cmp(&y.a).then(x.g.total_cmp(&y.g)));
    let mut deduped: Vec<TrajectoryCrossing> = Vec::new();
    for c in crossings {
        let dup = deduped
            .iter()
            .any(|d| (d.a - c.a).abs() <= da.max(1e-12) && (d.g - c.g).abs() <= dg);
        if !dup {
            deduped.push(c);
        }
    }

    Ok(TrajectorySet {
        rows,
        polylines: lines
            .into_iter()
            .map(|l| l.into_iter().map(|(_, r)| r).collect())
            .collect(),
        crossings: deduped,
    })
}

fn dist(q: &QuarticPoint, c: &TrajectoryCrossing) -> f64 {
    (q.a - c.a).hypot(q.g - c.g)
}

fn meet(
    p: &[(usize, EpRecord)],
    q: &[(usize, EpRecord)],
    ids: (usize, usize),
    dg: f64,
    a_vals: &[f64],
) -> Vec<TrajectoryCrossing> {
    let gp: BTreeMap<usize, f64> = p.iter().map(|(r, x)| (*r, x.g)).collect();
    let common: Vec<(usize, f64, f64)> = q
        .iter()
        .filter_map(|(r, x)| gp.get(r).map(|g| (*r, *g, x.g)))
        .collect();
    if common.is_empty() || common.iter().all(|(_, a, b)| (a - b).abs() < 1e-9) {
        return Vec::new();
    }
    let mk = |a: f64, g: f64, transversal: bool| TrajectoryCrossing {
        a,
        g,
        polylines: ids,
        transversal,
        quartic_match: None,
        match_distance: None,
    };
    let delta: Vec<f64> = common.iter().map(|(_, a, b)| a - b).collect();
    let mut out = Vec::new();
    for k in 0..common.len() {
        let (r, g1, g2) = common[k];
        if k + 1 < common.len() && common[k + 1].0 == r + 1 && delta[k] * delta[k + 1] < 0.0 {
            let t = delta[k] / (delta[k] - delta[k + 1]);
            let a = a_vals[r] + t * (a_vals[r + 1] - a_vals[r]);
            let g = g1 + t * (common[k + 1].1 - g1);
            out.push(mk(a, g, true));
            continue;
        }
        let m = delta[k].abs();
        let left = if k > 0 { delta[k - 1].abs() } else { f64::INFINITY };
        let right = if k + 1 < common.len() { delta[k + 1].abs() } else { f64::INFINITY };
        let sign_change_near = (k > 0 && delta[k - 1] * delta[k] < 0.0)
            || (k + 1 < common.len() && delta[k] * delta[k + 1] < 0.0);
        if m <= dg && m <= left && m <= right && !sign_change_near {
            out.push(mk(a_vals[r], 0.5 * (g1 + g2), false));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_grid() {
        let p = ChainParams::new(1.0, 0.1, 0.0, 0.0, 4).unwrap();
        let grid = TrajectoryGrid::new((-2.0, 2.0, 101), (0.0, 1.0, 0));
        let t = ep_trajectories(&p, &grid).unwrap();
        assert!(t.polylines.is_empty() && t.crossings.is_empty());
    }

    #[test]
    fn single_row_matches_scan() {
        let p = ChainParams::new(1.0, 0.1, 0.0, 0.3, 4).unwrap();
        let grid = TrajectoryGrid::new((-2.0, 2.0, 201), (0.3, 0.3, 1));
        let t = ep_trajectories(&p, &grid).unwrap();
        let direct = scan_for_eps(&p, &ScanConfig::new(Axis::G, -2.0, 2.0, 201).unwrap()).unwrap();
        assert_eq!(t.rows[0], direct);
    }
}
