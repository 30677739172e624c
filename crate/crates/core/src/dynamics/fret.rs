use num_complex::Complex64;

use super::kernel::{interp_real, Correlation, DynamicsOptions, PairKernel};
use super::trajectory::{Method, PopulationTrajectory, RateTrajectory};
use crate::error::{Error, Result};
use crate::model::constants::HBAR;
use crate::model::{BathSpec, DimerSpec, Site};
use crate::ode::{integrate, OdeOptions};

/// Relative distance to the stationary rate below which a kernel counts as
/// converged.
const RATE_TOL: f64 = 1e-3;

/// Nonequilibrium FRET rate kernels after sudden donor excitation, on the
/// kernel grid up to `t_max` (stationary values past the memory horizon).
///
/// ```text
/// k_f(t) = (2J²w²/ħ²) Re ∫₀^t dτ e^{iΔ̃τ/ħ} (e^{φ(τ)} − 1) e^{i[χ(t) − χ(t−τ)]}
/// k_b(t) = (2J²w²/ħ²) Re ∫₀^t dτ e^{−iΔ̃τ/ħ} (e^{φ(τ)} − 1) e^{i[χ_A(t) − χ_A(t−τ)]}
/// ```
///
/// with Δ̃ = (E_D − λ_D) − (E_A − λ_A). The backward kernel is the forward
/// one with the roles of donor and acceptor exchanged. The zero-phonon (elastic) part w² of
/// e^{φ−φ(0)} is excluded: it never decays for super-Ohmic baths and
/// describes coherent mixing rather than transfer.
pub fn neq_fret_rate(dimer: &DimerSpec, kernel: &PairKernel, t_max: f64) -> Result<RateTrajectory> {
    if !(t_max > 0.0) {
        return Err(Error::domain("t_max must be positive"));
    }
    let dt = dimer.gap() - kernel.lambda_d + kernel.lambda_a;
    let j = dimer.coupling();
    let pref = 2.0 * j * j / (HBAR * HBAR);
    let fwd = kernel.memory_integral(Correlation::Plus, 1.0, -1.0, -dt / HBAR);
    let bwd = kernel.memory_integral_for(Site::Acceptor, Correlation::Plus, 1.0, -1.0, dt / HBAR);
    let h = kernel.h;
    let n = (t_max / h).round() as usize + 1;
    let t_grid: Vec<f64> = (0..n).map(|k| k as f64 * h).collect();
    let pick = |m: &[Complex64], inf: Complex64, k: usize| pref * if k < m.len() { m[k].re } else { inf.re };
    let k_forward: Vec<f64> = (0..n).map(|k| pick(&fwd.values, fwd.stationary, k)).collect();
    let k_backward: Vec<f64> = (0..n).map(|k| pick(&bwd.values, bwd.stationary, k)).collect();
    let (kf_inf, kb_inf) = (pref * fwd.stationary.re, pref * bwd.stationary.re);
    let near = |k: f64, inf: f64| (k - inf).abs() <= RATE_TOL * inf.abs().max(f64::MIN_POSITIVE);
    let converged = j == 0.0 || (near(k_forward[n - 1], kf_inf) && near(k_backward[n - 1], kb_inf));
    Ok(RateTrajectory {
        t_grid,
        k_forward,
        k_backward,
        k_forward_inf: kf_inf,
        k_backward_inf: kb_inf,
        converged,
    })
}

/// Builds the bath tables and evaluates [`neq_fret_rate`].
pub fn neq_fret_rate_for(dimer: &DimerSpec, bath: &BathSpec, t_max: f64, opts: &DynamicsOptions) -> Result<RateTrajectory> {
    let kernel = PairKernel::build(bath, opts)?;
    neq_fret_rate(dimer, &kernel, t_max)
}

/// Solves dP_D/dt = −k_f(t)P_D + k_b(t)P_A with P_D(0) = 1, P_A = 1 − P_D.
/// Rates past the end of `rates` are the stationary values.
pub fn propagate_fret(rates: &RateTrajectory, t_max: f64, opts: &DynamicsOptions) -> Result<PopulationTrajectory> {
    let h = rates.t_grid[1] - rates.t_grid[0];
    let end = *rates.t_grid.last().unwrap();
    let rate_at = |t: f64| -> (f64, f64) {
        if t >= end {
            (rates.k_forward_inf, rates.k_backward_inf)
        } else {
            (interp_real(&rates.k_forward, h, t), interp_real(&rates.k_backward, h, t))
        }
    };
    let n = (t_max / opts.report_dt).round() as usize + 1;
    let times: Vec<f64> = (0..n).map(|k| k as f64 * opts.report_dt).collect();
    let ode = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        h_init: opts.dt.min(opts.h_max) * 0.5,
        h_max: opts.h_max,
        ..Default::default()
    };
    let ys = integrate(
        |t, y: &[f64; 1]| {
            let (kf, kb) = rate_at(t);
            [-kf * y[0] + kb * (1.0 - y[0])]
        },
        0.0,
        [1.0],
        &times,
        &ode,
    )?;
    let p_d: Vec<f64> = ys.iter().map(|y| y[0]).collect();
    let p_a = p_d.iter().map(|p| 1.0 - p).collect();
    let mut traj = PopulationTrajectory::new(Method::Fret, times, p_d, p_a);
    let total = rates.k_forward_inf + rates.k_backward_inf;
    if total > 0.0 {
        let pd = rates.k_backward_inf / total;
        traj.set_stationary(pd, 1.0 - pd);
    } else {
        traj.set_stationary(1.0, 0.0);
    }
    Ok(traj)
}
