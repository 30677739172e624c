use std::io::Write;

use num_complex::Complex64;

use crate::error::Result;

/// Trailing fraction of a trajectory inspected by [`plateau_value`].
pub const PLATEAU_WINDOW_FRACTION: f64 = 0.25;
/// Maximum spread of P_D inside the window for a converged plateau.
pub const PLATEAU_TOL: f64 = 1e-3;
/// Allowed population overshoot before a trajectory is flagged.
pub const POSITIVITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Fret,
    Cret,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Fret => "FRET",
            Method::Cret => "CRET",
        }
    }
}

/// Frame in which CRET coherences are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    #[default]
    Polaron,
    /// Mean-field back-transformation ρ_DA ≈ ρ̃_DA·w·e^{−iχ(t)}. Populations
    /// are the same in both frames.
    Original,
}

/// Long-time populations. `converged` says the values can be trusted as
/// the t → ∞ limit; `settled` says the trajectory itself has reached them
/// (P_D within [`PLATEAU_TOL`] over the trailing window).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub p_d: f64,
    pub p_a: f64,
    pub converged: bool,
    pub settled: bool,
}

/// Time-dependent forward/backward FRET rates.
#[derive(Debug, Clone)]
pub struct RateTrajectory {
    pub t_grid: Vec<f64>,
    pub k_forward: Vec<f64>,
    pub k_backward: Vec<f64>,
    /// Stationary (t → ∞) values.
    pub k_forward_inf: f64,
    pub k_backward_inf: f64,
    /// Whether both kernels are within 1e−3 (relative) of their stationary
    /// values at the end of the grid.
    pub converged: bool,
}

impl RateTrajectory {
    /// The same kernels for a coupling scaled by `factor` (rates scale as J²).
    pub fn scaled(&self, factor: f64) -> Self {
        let f2 = factor * factor;
        Self {
            t_grid: self.t_grid.clone(),
            k_forward: self.k_forward.iter().map(|k| k * f2).collect(),
            k_backward: self.k_backward.iter().map(|k| k * f2).collect(),
            k_forward_inf: self.k_forward_inf * f2,
            k_backward_inf: self.k_backward_inf * f2,
            converged: self.converged,
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t_fs,k_forward_per_fs,k_backward_per_fs")?;
        for i in 0..self.t_grid.len() {
            writeln!(w, "{},{},{}", self.t_grid[i], self.k_forward[i], self.k_backward[i])?;
        }
        Ok(())
    }
}

/// Excited-state populations of donor and acceptor after sudden donor
/// excitation at t = 0.
#[derive(Debug, Clone)]
pub struct PopulationTrajectory {
    pub method: Method,
    pub t_grid: Vec<f64>,
    pub p_d: Vec<f64>,
    pub p_a: Vec<f64>,
    /// ρ_DA in the polaron frame (CRET only).
    pub coherence: Option<Vec<Complex64>>,
    /// ρ_DA back-transformed to the site frame (CRET only).
    pub coherence_original: Option<Vec<Complex64>>,
    pub plateau: Plateau,
    /// Set when a population left [0, 1] by more than [`POSITIVITY_TOL`] or
    /// the density matrix lost positivity by more than 1e−3.
    pub positivity_violated: bool,
}

impl PopulationTrajectory {
    pub(crate) fn new(method: Method, t_grid: Vec<f64>, p_d: Vec<f64>, p_a: Vec<f64>) -> Self {
        let positivity_violated = p_d
            .iter()
            .chain(&p_a)
            .any(|&p| p < -POSITIVITY_TOL || p > 1.0 + POSITIVITY_TOL);
        let mut traj = Self {
            method,
            t_grid,
            p_d,
            p_a,
            coherence: None,
            coherence_original: None,
            plateau: Plateau { p_d: f64::NAN, p_a: f64::NAN, converged: false, settled: false },
            positivity_violated,
        };
        traj.plateau = plateau_value(&traj);
        traj
    }

    pub fn t_max(&self) -> f64 {
        *self.t_grid.last().unwrap_or(&0.0)
    }

    /// Replaces the windowed plateau by the stationary state of the
    /// long-time (constant) generator, which is exact for the propagated
    /// equation whether or not the horizon reached it.
    pub(crate) fn set_stationary(&mut self, p_d_inf: f64, p_a_inf: f64) {
        let start = window_start(self.t_grid.len());
        let settled = self.p_d[start..]
            .iter()
            .all(|p| (p - p_d_inf).abs() < PLATEAU_TOL);
        let valid = p_d_inf.is_finite() && (-POSITIVITY_TOL..=1.0 + POSITIVITY_TOL).contains(&p_d_inf);
        self.plateau = Plateau {
            p_d: p_d_inf,
            p_a: p_a_inf,
            converged: valid,
            settled,
        };
    }

    pub fn write_csv<W: Write>(&self, mut w: W, frame: Frame) -> Result<()> {
        writeln!(w, "t_fs,P_D,P_A,coh_re,coh_im")?;
        let coh = match frame {
            Frame::Polaron => self.coherence.as_ref(),
            Frame::Original => self.coherence_original.as_ref(),
        };
        for i in 0..self.t_grid.len() {
            match coh {
                Some(c) => writeln!(w, "{},{},{},{},{}", self.t_grid[i], self.p_d[i], self.p_a[i], c[i].re, c[i].im)?,
                None => writeln!(w, "{},{},{},,", self.t_grid[i], self.p_d[i], self.p_a[i])?,
            }
        }
        Ok(())
    }
}

fn window_start(n: usize) -> usize {
    let len = ((n as f64 * PLATEAU_WINDOW_FRACTION).ceil() as usize).clamp(1, n.max(1));
    n - len
}

/// Long-time populations as the mean over the trailing window, converged
/// when P_D varies by less than [`PLATEAU_TOL`] inside it. Oscillations that
/// persist with larger amplitude leave the flag unset.
pub fn plateau_value(traj: &PopulationTrajectory) -> Plateau {
    let n = traj.t_grid.len();
    if n == 0 {
        return Plateau { p_d: f64::NAN, p_a: f64::NAN, converged: false, settled: false };
    }
    let start = window_start(n);
    let win = &traj.p_d[start..];
    let (lo, hi) = win
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    let m = win.len() as f64;
    let ok = n > 1 && hi - lo < PLATEAU_TOL;
    Plateau {
        p_d: win.iter().sum::<f64>() / m,
        p_a: traj.p_a[start..].iter().sum::<f64>() / m,
        converged: ok,
        settled: ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(f: impl Fn(f64) -> f64) -> PopulationTrajectory {
        let t: Vec<f64> = (0..=4000).map(|k| k as f64 * 0.5).collect();
        let pd: Vec<f64> = t.iter().map(|&t| f(t)).collect();
        let pa = pd.iter().map(|p| 1.0 - p).collect();
        PopulationTrajectory::new(Method::Fret, t, pd, pa)
    }

    #[test]
    fn constant_plateau() {
        let p = traj(|_| 0.3).plateau;
        assert!(p.converged);
        assert!((p.p_d - 0.3).abs() < 1e-14);
    }

    #[test]
    fn ramp_does_not_converge() {
        assert!(!traj(|t| 1.0 - t / 4000.0).plateau.converged);
    }

    #[test]
    fn biexponential_plateau() {
        let (kf, kb) = (0.01, 0.004);
        let p = traj(|t| (kb + kf * (-(kf + kb) * t).exp()) / (kf + kb)).plateau;
        assert!(p.converged);
        assert!((p.p_a - kf / (kf + kb)).abs() < 1e-9);
    }

    #[test]
    fn csv_has_empty_coherence_for_fret() {
        let mut buf = Vec::new();
        traj(|_| 1.0).write_csv(&mut buf, Frame::Polaron).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("t_fs,P_D,P_A,coh_re,coh_im\n0,1,0,,\n"));
    }
}
