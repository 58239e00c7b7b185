//! Time evolution `ψ(t + Δt) = exp(-i H Δt) ψ(t)` and edge localisation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ep::clusters;
use crate::error::{Error, Result};
use crate::linalg::{inner, norm2, CMatrix, ComplexLu};
use crate::model::{build_hamiltonian, ChainParams, TridiagonalHamiltonian};
use crate::spectral::{degeneracy_tol, eigensystem, residual};

/// Largest `||H||_inf Δt` used when the step is chosen automatically.
pub const MAX_NORM_STEP: f64 = 0.5;
/// Edge-mass change below which a renormalised run counts as converged.
pub const CONVERGENCE_TOL: f64 = 1e-10;
pub const MAX_CONVERGENCE_STEPS: usize = 10_000;
/// Eigenvector condition number above which the series propagator is used.
pub const MAX_SPECTRAL_CONDITION: f64 = 1e6;
/// Per-step error budget of the propagator.
pub const STEP_ERROR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
    pub normalized: bool,
}

impl StateVector {
    /// Wraps `amplitudes`, scaling to unit norm when `normalize` is set.
    pub fn new(amplitudes: Vec<Complex64>, normalize: bool) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidParams("empty state".into()));
        }
        let mut s = StateVector { amplitudes, normalized: false };
        if normalize {
            s.normalize()?;
        }
        Ok(s)
    }

    /// Equal weight on every site, normalised.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(1.0, 0.0); n], true)
    }

    /// All weight on `site` (1-indexed).
    pub fn delta(n: usize, site: usize) -> Result<Self> {
        if site == 0 || site > n {
            return Err(Error::InvalidParams(format!("site {site} outside 1..={n}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        amps[site - 1] = Complex64::new(1.0, 0.0);
        Self::new(amps, true)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.amplitudes)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let nrm = self.norm();
        if !(nrm > 0.0 && nrm.is_finite()) {
            return Err(Error::InvalidParams(format!("cannot normalise a state of norm {nrm}")));
        }
        for z in self.amplitudes.iter_mut() {
            *z /= nrm;
        }
        self.normalized = true;
        Ok(())
    }

    /// `<ψ|H|ψ> / <ψ|ψ>`.
    pub fn energy(&self, h: &TridiagonalHamiltonian) -> Complex64 {
        inner(&self.amplitudes, &h.apply(&self.amplitudes)) / self.norm().powi(2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Left,
    Right,
}

impl std::str::FromStr for End {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(End::Left),
            "right" => Ok(End::Right),
            other => Err(Error::InvalidConfig(format!("unknown side {other:?}"))),
        }
    }
}

/// Fraction of `|ψ|^2` on the `k` sites nearest `end`.
pub fn edge_mass(psi: &StateVector, k: usize, end: End) -> Result<f64> {
    let n = psi.dim();
    if k == 0 || k > n {
        return Err(Error::InvalidParams(format!("edge width {k} outside 1..={n}")));
    }
    let w: Vec<f64> = psi.amplitudes.iter().map(|z| z.norm_sqr()).collect();
    let total: f64 = w.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::InvalidParams(format!("state has squared norm {total}")));
    }
    let part: f64 = match end {
        End::Left => w[..k].iter().sum(),
        End::Right => w[n - k..].iter().sum(),
    };
    Ok((part / total).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PropagatorMethod {
    /// `V exp(-iΛΔt) V^-1` from the eigendecomposition.
    Spectral,
    /// Scaled and squared truncated Taylor series.
    Series,
}

#[derive(Debug, Clone)]
pub struct Propagator {
    matrix: CMatrix,
    pub method: PropagatorMethod,
    pub dt: f64,
}

impl Propagator {
    /// Spectral propagator when the eigenvectors are well conditioned and the
    /// spectrum has no degenerate cluster, series propagator otherwise.
    pub fn new(h: &TridiagonalHamiltonian, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParams(format!("time step {dt} must be positive")));
        }
        if let Some(matrix) = spectral_exp(h, dt) {
            return Ok(Propagator { matrix, method: PropagatorMethod::Spectral, dt });
        }
        Ok(Propagator {
            matrix: series_exp(h, dt)?,
            method: PropagatorMethod::Series,
            dt,
        })
    }

    /// Forces the series propagator.
    pub fn series(h: &TridiagonalHamiltonian, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParams(format!("time step {dt} must be positive")));
        }
        Ok(Propagator {
            matrix: series_exp(h, dt)?,
            method: PropagatorMethod::Series,
            dt,
        })
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        self.matrix.mul_vec(psi)
    }
}

fn spectral_exp(h: &TridiagonalHamiltonian, dt: f64) -> Option<CMatrix> {
    let spec = eigensystem(h).ok()?;
    let lambdas = &spec.eigenvalues;
    if clusters(lambdas, degeneracy_tol(lambdas)).iter().any(|c| c.len() > 1) {
        return None;
    }
    let vecs = spec.right_vectors?;
    let v = CMatrix::from_columns(&vecs);
    let lu = ComplexLu::factor(v.clone(), 0.0);
    if lu.floored > 0 {
        return None;
    }
    let vinv = lu.inverse();
    let cond = v.norm_1() * vinv.norm_1();
    if !(cond.is_finite() && cond < MAX_SPECTRAL_CONDITION) {
        return None;
    }
    let worst = lambdas
        .iter()
        .zip(&vecs)
        .map(|(&l, x)| residual(h, l, x))
        .fold(0.0, f64::max);
    if worst * cond * dt > STEP_ERROR {
        return None;
    }
    let n = h.dim();
    let mut d = CMatrix::zeros(n);
    for (k, &l) in lambdas.iter().enumerate() {
        d[(k, k)] = (Complex64::new(0.0, -dt) * l).exp();
    }
    let u = v.mul(&d).mul(&vinv);
    u.is_finite().then_some(u)
}

fn series_exp(h: &TridiagonalHamiltonian, dt: f64) -> Result<CMatrix> {
    let n = h.dim();
    let a = CMatrix::from_tridiagonal(h).scale(Complex64::new(0.0, -dt));
    let norm = a.norm_1();
    let mut squarings = 0u32;
    while norm / 2f64.powi(squarings as i32) > MAX_NORM_STEP {
        squarings += 1;
        if squarings > 1000 {
            return Err(Error::Propagator(format!("cannot scale ||HΔt|| = {norm}")));
        }
    }
    let b = a.scale(Complex64::new(0.5f64.powi(squarings as i32), 0.0));
    let bn = b.norm_1();
    let mut sum = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    let mut converged = false;
    for k in 1..=60 {
        term = term.mul(&b).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
        // Tail bound for ||B|| / (k + 1) < 1.
        let r = bn / (k + 1) as f64;
        let tail = term.norm_1() * r / (1.0 - r);
        if tail <= f64::EPSILON * sum.norm_1() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Propagator("Taylor series did not converge".into()));
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    if !sum.is_finite() {
        return Err(Error::Propagator("series propagator overflowed".into()));
    }
    Ok(sum)
}

/// Step count giving `||H||_inf Δt <= 0.5` for a run of length `t_total`.
pub fn default_steps(p: &ChainParams, t_total: f64) -> Result<usize> {
    let h = build_hamiltonian(p)?;
    Ok(((h.norm_inf() * t_total / MAX_NORM_STEP).ceil() as usize).max(1))
}

/// Trajectory `ψ0, ψ(Δt), ..., ψ(t_total)` with `Δt = t_total / steps`.
pub fn evolve(
    p: &ChainParams,
    psi0: &StateVector,
    t_total: f64,
    steps: usize,
    renormalize: bool,
) -> Result<Vec<StateVector>> {
    if steps == 0 {
        return Err(Error::InvalidParams("need at least one step".into()));
    }
    if !(t_total.is_finite() && t_total > 0.0) {
        return Err(Error::InvalidParams(format!("total time {t_total} must be positive")));
    }
    let h = build_hamiltonian(p)?;
    if psi0.dim() != h.dim() {
        return Err(Error::InvalidParams(format!(
            "state has {} sites, chain has {}",
            psi0.dim(),
            h.dim()
        )));
    }
    let u = Propagator::new(&h, t_total / steps as f64)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(psi0.clone());
    let mut psi = psi0.clone();
    for _ in 0..steps {
        let mut next = StateVector { amplitudes: u.apply(&psi.amplitudes), normalized: false };
        if renormalize {
            next.normalize().map_err(|_| Error::Propagator("state vanished or overflowed".into()))?;
        } else if next.amplitudes.iter().any(|z| !z.is_finite()) {
            return Err(Error::Propagator("state overflowed; enable renormalisation".into()));
        }
        out.push(next.clone());
        psi = next;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunnelResult {
    pub state: StateVector,
    pub edge_mass: f64,
    pub steps: usize,
    pub dt: f64,
    pub time: f64,
    /// `false` if the step cap was hit first.
    pub converged: bool,
    pub method: PropagatorMethod,
}

/// Renormalised evolution until `edge_mass(k, end)` changes by less than
/// [`CONVERGENCE_TOL`] between steps, capped at [`MAX_CONVERGENCE_STEPS`].
/// Without an explicit `dt` the step is `0.5 / ||H||_inf`.
pub fn evolve_until_converged(
    p: &ChainParams,
    psi0: &StateVector,
    k: usize,
    end: End,
    dt: Option<f64>,
) -> Result<FunnelResult> {
    let h = build_hamiltonian(p)?;
    if psi0.dim() != h.dim() {
        return Err(Error::InvalidParams(format!(
            "state has {} sites, chain has {}",
            psi0.dim(),
            h.dim()
        )));
    }
    let dt = dt.unwrap_or(MAX_NORM_STEP / h.norm_inf().max(f64::MIN_POSITIVE));
    let u = Propagator::new(&h, dt)?;
    let mut psi = psi0.clone();
    psi.normalize()?;
    let mut mass = edge_mass(&psi, k, end)?;
    for step in 1..=MAX_CONVERGENCE_STEPS {
        let mut next = StateVector { amplitudes: u.apply(&psi.amplitudes), normalized: false };
        next.normalize().map_err(|_| Error::Propagator("state vanished or overflowed".into()))?;
        let m = edge_mass(&next, k, end)?;
        let done = (m - mass).abs() < CONVERGENCE_TOL;
        psi = next;
        mass = m;
        if done || step == MAX_CONVERGENCE_STEPS {
            return Ok(FunnelResult {
                state: psi,
                edge_mass: mass,
                steps: step,
                dt,
                time: dt * step as f64,
                converged: done,
                method: u.method,
            });
        }
    }
    unreachable!("loop returns on its last iteration")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(v: f64, w: f64, g: f64, a: f64, n: usize) -> ChainParams {
        ChainParams::new(v, w, g, a, n).unwrap()
    }

    #[test]
    fn edge_mass_basics() {
        let u = StateVector::uniform(6).unwrap();
        assert!((edge_mass(&u, 6, End::Left).unwrap() - 1.0).abs() < 1e-15);
        assert!((edge_mass(&u, 3, End::Right).unwrap() - 0.5).abs() < 1e-15);
        let d = StateVector::delta(6, 1).unwrap();
        assert_eq!(edge_mass(&d, 1, End::Left).unwrap(), 1.0);
        assert_eq!(edge_mass(&d, 1, End::Right).unwrap(), 0.0);
        assert!(edge_mass(&d, 0, End::Left).is_err());
        assert!(edge_mass(&d, 7, End::Left).is_err());
    }

    #[test]
    fn normalised_state_has_unit_norm() {
        let s = StateVector::new(vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)], true).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!(StateVector::new(vec![Complex64::new(0.0, 0.0)], true).is_err());
    }

    #[test]
    fn methods_agree() {
        let h = build_hamiltonian(&chain(1.0, 0.4, 0.3, 0.1, 6)).unwrap();
        let a = Propagator::new(&h, 0.2).unwrap();
        let b = Propagator::series(&h, 0.2).unwrap();
        assert_eq!(a.method, PropagatorMethod::Spectral);
        let psi = StateVector::uniform(6).unwrap().amplitudes;
        let (x, y) = (a.apply(&psi), b.apply(&psi));
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).norm() < 1e-10);
        }
    }

    #[test]
    fn exceptional_point_uses_series() {
        // One-way first link with a gradient: a defective pair at zero.
        let h = build_hamiltonian(&chain(1.0, 0.1, 1.0, 0.3, 4)).unwrap();
        assert_eq!(Propagator::new(&h, 0.1).unwrap().method, PropagatorMethod::Series);
    }

    #[test]
    fn series_matches_two_site_closed_form() {
        // H = [[0, s], [t, 0]] gives exp(-iHτ) = cos(ωτ) I - i sin(ωτ) H / ω, ω = √(st).
        let (s, t, tau) = (2.0, 0.5, 3.7);
        let h = TridiagonalHamiltonian::from_bands(vec![s], vec![t]).unwrap();
        let u = Propagator::series(&h, tau).unwrap();
        let om: f64 = (s * t).sqrt();
        let x = u.apply(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert!((x[0] - Complex64::new((om * tau).cos(), 0.0)).norm() < 1e-12);
        assert!((x[1] - Complex64::new(0.0, -(om * tau).sin() * t / om)).norm() < 1e-12);
    }

    #[test]
    fn hermitian_evolution_is_unitary() {
        let p = chain(1.0, 0.3, 0.0, 0.05, 8);
        let h = build_hamiltonian(&p).unwrap();
        let psi0 = StateVector::delta(8, 2).unwrap();
        let traj = evolve(&p, &psi0, 200.0, 1000, false).unwrap();
        assert_eq!(traj.len(), 1001);
        let e0 = psi0.energy(&h);
        for s in &traj {
            assert!((s.norm() - 1.0).abs() < 1e-9);
            assert!((s.energy(&h) - e0).norm() <= 1e-8 * e0.norm().max(1.0));
        }
    }

    #[test]
    fn renormalised_steps_stay_normalised() {
        let traj = evolve(&chain(1.0, 0.1, 0.9, 0.0, 8), &StateVector::uniform(8).unwrap(), 50.0, 200, true).unwrap();
        for s in &traj[1..] {
            assert!(s.normalized && (s.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = chain(1.0, 0.1, 0.0, 0.0, 4);
        let s = StateVector::uniform(4).unwrap();
        assert!(evolve(&p, &s, 1.0, 0, false).is_err());
        assert!(evolve(&p, &s, -1.0, 10, false).is_err());
        assert!(evolve(&p, &StateVector::uniform(3).unwrap(), 1.0, 10, false).is_err());
    }

    #[test]
    fn one_way_end_link_funnels_left() {
        // g = v: the first link only carries amplitude from site 2 to site 1.
        let p = chain(1.0, 0.1, 1.0, 0.0, 4);
        let r = evolve_until_converged(&p, &StateVector::uniform(4).unwrap(), 2, End::Left, None).unwrap();
        assert!(r.edge_mass > 0.5, "{r:?}");
    }

    #[test]
    fn late_state_settles_on_dominant_mode() {
        // Every link product is negative, so the spectrum is purely imaginary
        // with a single fastest-growing mode.
        let p = chain(1.0, 1.0, 1.5, 0.0, 4);
        let r = evolve_until_converged(&p, &StateVector::uniform(4).unwrap(), 1, End::Left, None).unwrap();
        assert!(r.converged, "{r:?}");
        let traj = evolve(&p, &r.state, r.dt * 2.0, 2, true).unwrap();
        let (x, y) = (&traj[1].amplitudes, &traj[2].amplitudes);
        let c = inner(x, y);
        let off: Vec<Complex64> = y.iter().zip(x).map(|(b, a)| b - c * a).collect();
        assert!(norm2(&off) < 1e-8);
    }

    #[test]
    fn default_step_bound() {
        let p = chain(1.0, 0.1, 0.9, 0.0, 8);
        let h = build_hamiltonian(&p).unwrap();
        let steps = default_steps(&p, 10.0).unwrap();
        assert!(h.norm_inf() * 10.0 / steps as f64 <= MAX_NORM_STEP);
    }
}
