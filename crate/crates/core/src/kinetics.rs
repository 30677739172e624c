//! Rate-equation kinetics of a donor/acceptor pair with forward and reverse
//! transfer and finite excited-state lifetimes, and the effective transfer
//! rate extracted from any population trajectory.
//!
//! ```text
//! d/dt [D*] = −(1/τ_D + k_F)[D*] + k_F^r [A*] + I_r
//! d/dt [A*] =  k_F [D*] − (1/τ_A + k_F^r)[A*]
//! ```

use crate::dynamics::PopulationTrajectory;
use crate::error::{Error, Result};

/// Excited-state lifetime; `Infinite` means no decay channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lifetime {
    Finite(f64),
    Infinite,
}

impl Lifetime {
    pub fn new(tau: f64) -> Result<Self> {
        if tau == f64::INFINITY {
            Ok(Lifetime::Infinite)
        } else if tau > 0.0 && tau.is_finite() {
            Ok(Lifetime::Finite(tau))
        } else {
            Err(Error::domain(format!("lifetime must be positive, got {tau}")))
        }
    }

    pub fn decay_rate(self) -> f64 {
        match self {
            Lifetime::Finite(t) => 1.0 / t,
            Lifetime::Infinite => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticRates {
    /// Forward transfer rate, 1/fs.
    pub k_f: f64,
    /// Reverse transfer rate, 1/fs.
    pub k_r: f64,
    pub tau_d: Lifetime,
    pub tau_a: Lifetime,
    /// Weak continuous irradiation rate (steady-state analysis only).
    pub i_r: f64,
}

impl KineticRates {
    pub fn new(k_f: f64, k_r: f64, tau_d: Lifetime, tau_a: Lifetime) -> Result<Self> {
        if !(k_f >= 0.0 && k_r >= 0.0 && k_f.is_finite() && k_r.is_finite()) {
            return Err(Error::domain("transfer rates must be finite and nonnegative"));
        }
        Ok(Self { k_f, k_r, tau_d, tau_a, i_r: 1.0 })
    }

    pub fn with_irradiation(mut self, i_r: f64) -> Self {
        self.i_r = i_r;
        self
    }

    fn gammas(&self) -> (f64, f64) {
        (self.tau_d.decay_rate(), self.tau_a.decay_rate())
    }
}

/// Effective transfer rate k_eff = P_A(∞)/τ_RET.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveRate {
    pub tau_ret: f64,
    pub k_eff: f64,
    pub p_a_inf: f64,
}

/// (A, B) of the bi-exponential solution.
pub fn biexp_coefficients(rates: &KineticRates) -> Result<(f64, f64)> {
    if rates.k_f == 0.0 {
        return Err(Error::DegenerateKinetics("k_F = 0".into()));
    }
    let (gd, ga) = rates.gammas();
    let rho = rates.k_r / rates.k_f;
    let a = 0.5 * (1.0 - rho + (gd - ga) / rates.k_f);
    Ok((a, (a * a + rho).sqrt()))
}

/// Eigenvalues (λ₊, λ₋) of the rate matrix, λ₊ ≥ λ₋.
pub fn biexp_eigenvalues(rates: &KineticRates) -> (f64, f64) {
    let (gd, ga) = rates.gammas();
    let mean = -0.5 * (rates.k_f + rates.k_r + gd + ga);
    match biexp_coefficients(rates) {
        Ok((_, b)) => (mean + rates.k_f * b, mean - rates.k_f * b),
        Err(_) => {
            let (x, y) = (-gd, -(rates.k_r + ga));
            (x.max(y), x.min(y))
        }
    }
}

/// Fast-transfer (k_F, k_F^r ≫ 1/τ) approximations to (λ₊, λ₋, B).
pub fn biexp_fast_transfer(rates: &KineticRates) -> (f64, f64, f64) {
    let (gd, ga) = rates.gammas();
    let (kf, kr) = (rates.k_f, rates.k_r);
    let s = kf + kr;
    let lp = -(kf * ga + kr * gd) / s;
    let lm = -s - (kf * gd + kr * ga) / s;
    let b = 0.5 * (1.0 + kr / kf) + (kf - kr) / (2.0 * s) * (gd - ga) / kf;
    (lp, lm, b)
}

/// ([D*](t), [A*](t)) after a pulse creating [D*](0) = d0.
pub fn biexp_solution(rates: &KineticRates, d0: f64, t: f64) -> Result<(f64, f64)> {
    let (a, b) = biexp_coefficients(rates)?;
    if b == 0.0 {
        return Err(Error::DegenerateKinetics("B = 0: repeated eigenvalue".into()));
    }
    let (lp, lm) = biexp_eigenvalues(rates);
    let (ep, em) = ((lp * t).exp(), (lm * t).exp());
    let s = d0 / (2.0 * b);
    Ok((s * ((b - a) * ep + (a + b) * em), s * (ep - em)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub d: f64,
    pub a: f64,
    pub efficiency: f64,
}

/// Steady state under weak irradiation I_r and the transfer efficiency
/// E = k_Fτ_D/(k_Fτ_D + k_F^rτ_A + 1).
pub fn steady_state_with_reverse(rates: &KineticRates) -> Result<SteadyState> {
    let (gd, ga) = rates.gammas();
    let (kf, kr) = (rates.k_f, rates.k_r);
    let det = kf * ga + kr * gd + gd * ga;
    if det == 0.0 {
        return Err(Error::DegenerateKinetics("no decay channel: steady state is unbounded".into()));
    }
    let efficiency = if ga == 0.0 {
        // τ_A → ∞: E = k_Fτ_D/(k_Fτ_D + 1) if k_F^r = 0, else 0
        if kr == 0.0 { kf / (kf + gd) } else { 0.0 }
    } else {
        kf * ga / det
    };
    Ok(SteadyState {
        d: rates.i_r * (kr + ga) / det,
        a: rates.i_r * kf / det,
        efficiency,
    })
}

/// Long-time [D*]/[A*] ratio of the pulse solution and the detailed-balance
/// target k_F^r/k_F.
pub fn detailed_balance_check(rates: &KineticRates) -> Result<(f64, f64)> {
    let (a, b) = biexp_coefficients(rates)?;
    Ok((b - a, rates.k_r / rates.k_f))
}

/// Plateau ratio P_D(∞)/P_A(∞) of a trajectory.
pub fn detailed_balance_ratio(traj: &PopulationTrajectory) -> f64 {
    traj.plateau.p_d / traj.plateau.p_a
}

/// τ_RET is the first time at which P_D − P_A·P_D(∞)/P_A(∞) falls to 1/e,
/// linearly interpolated between samples.
pub fn effective_rate_from_samples(t: &[f64], p_d: &[f64], p_a: &[f64], p_d_inf: f64, p_a_inf: f64) -> Result<EffectiveRate> {
    if !(p_a_inf > 0.0) {
        return Err(Error::domain("P_A(inf) must be positive"));
    }
    let ratio = p_d_inf / p_a_inf;
    let target = (-1.0f64).exp();
    let s = |i: usize| p_d[i] - p_a[i] * ratio;
    for i in 1..t.len() {
        let (s0, s1) = (s(i - 1), s(i));
        if s1 <= target && s0 > target {
            let tau = t[i - 1] + (t[i] - t[i - 1]) * (s0 - target) / (s0 - s1);
            return Ok(EffectiveRate { tau_ret: tau, k_eff: p_a_inf / tau, p_a_inf });
        }
    }
    Err(Error::NoCrossing { t_max: *t.last().unwrap_or(&0.0) })
}

/// Effective rate of a trajectory with a converged plateau.
pub fn effective_rate(traj: &PopulationTrajectory) -> Result<EffectiveRate> {
    if !traj.plateau.converged {
        return Err(Error::PlateauNotConverged);
    }
    effective_rate_from_samples(&traj.t_grid, &traj.p_d, &traj.p_a, traj.plateau.p_d, traj.plateau.p_a)
}
