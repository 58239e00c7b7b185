use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_WINDING_SAMPLES: usize = 16;

const LABEL_NOTE: &str = "winding counts turns of d(k) = (v + w cos k, w sin k) about the origin, \
which is nonzero for |w| > |v|; which of the two gapped phases is called topological depends on \
whether the end links carry v or w, so no phase label is attached";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub winding: i64,
    pub samples: usize,
    /// Distance of the accumulated angle from the nearest multiple of 2π.
    pub closure_defect: f64,
    pub total_angle: f64,
    pub note: String,
}

/// Winding of the reciprocal Bloch vector `d(k) = (v + w cos k, w sin k)`
/// over `k ∈ [0, 2π)` sampled at `samples` points.
pub fn winding_number(v: f64, w: f64, samples: usize) -> Result<WindingResult> {
    if !(v.is_finite() && w.is_finite()) {
        return Err(Error::InvalidParams(format!("v = {v}, w = {w} must be finite")));
    }
    if samples < MIN_WINDING_SAMPLES {
        return Err(Error::InvalidConfig(format!(
            "winding needs at least {MIN_WINDING_SAMPLES} samples, got {samples}"
        )));
    }
    if (v.abs() - w.abs()).abs() <= 1e-12 {
        return Err(Error::GapClosing(v.abs()));
    }
    let angle = |j: usize| {
        let k = TAU * (j % samples) as f64 / samples as f64;
        (w * k.sin()).atan2(v + w * k.cos())
    };
    let mut total = 0.0;
    let mut prev = angle(0);
    for j in 1..=samples {
        let cur = angle(j);
        let mut d = cur - prev;
        d -= TAU * (d / TAU).round();
        total += d;
        prev = cur;
    }
    let turns = (total / TAU).round();
    Ok(WindingResult {
        winding: turns as i64,
        samples,
        closure_defect: (total - turns * TAU).abs(),
        total_angle: total,
        note: LABEL_NOTE.to_string(),
    })
}
