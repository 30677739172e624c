use num_complex::Complex64;

use super::kernel::{lagrange4, Correlation, DynamicsOptions, PairKernel};
use super::trajectory::{Method, PopulationTrajectory};
use crate::error::{Error, Result};
use crate::linalg::{solve4, symmetric_eigen_2x2};
use crate::model::constants::HBAR;
use crate::model::{BathSpec, DimerSpec};
use crate::ode::{integrate, OdeOptions};

type Mat = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);
/// Loss of density-matrix positivity tolerated before a CRET trajectory is flagged.
const CRET_POSITIVITY_TOL: f64 = 1e-3;

fn mul(a: &Mat, b: &Mat) -> Mat {
    let mut c = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn sub(a: &Mat, b: &Mat) -> Mat {
    [[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]]
}

fn comm(a: &Mat, b: &Mat) -> Mat {
    sub(&mul(a, b), &mul(b, a))
}

fn dagger(a: &Mat) -> Mat {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// s₁ = |D⟩⟨A|, s₂ = |A⟩⟨D|.
fn jump(alpha: usize) -> Mat {
    let mut s = [[ZERO; 2]; 2];
    if alpha == 0 {
        s[0][1] = Complex64::new(1.0, 0.0);
    } else {
        s[1][0] = Complex64::new(1.0, 0.0);
    }
    s
}

/// Second-order time-convolutionless generator of the polaron-frame
/// donor/acceptor density matrix.
///
/// In the full polaron frame the system Hamiltonian is
/// H̃ = (E_D−λ_D)|D⟩⟨D| + (E_A−λ_A)|A⟩⟨A| + Jw(|D⟩⟨A| + |A⟩⟨D|) and the
/// residual coupling J(Θ − w)|D⟩⟨A| + h.c. is treated to second order. The
/// bath starts in equilibrium with the ground state, so while the donor bath
/// relaxes the displacement operators carry the phase χ(t): the coherent
/// coupling becomes Jw e^{±iχ(t)} and the memory kernels pick up
/// e^{iσ_α χ(t)} e^{iσ_β χ(t−s)}.
///
/// ```text
/// dρ/dt = −(i/ħ)[H_eff(t), ρ] − (J²/ħ²) Σ_α ([s_α, M_α ρ] − [s_α, ρ M_ᾱ†])
/// M_α(t) = Σ_β ∫₀^t ds e^{iσ_αχ(t)} e^{iσ_βχ(t−s)} c_αβ(s) s̃_β(−s)
/// ```
///
/// with c₁₁ = c₂₂ = w²(e^{−φ} − 1), c₁₂ = c₂₁ = w²(e^{φ} − 1).
#[derive(Debug, Clone)]
pub struct CretGenerator {
    h: f64,
    e_d: f64,
    e_a: f64,
    jw: f64,
    j2: f64,
    chi: Vec<f64>,
    /// M₁ and M₂ in the site basis, row-major, on the kernel grid.
    m: Vec<[Complex64; 8]>,
    m_inf: [Complex64; 8],
}

impl CretGenerator {
    pub fn new(dimer: &DimerSpec, kernel: &PairKernel) -> Self {
        let e_d = dimer.e_d - kernel.lambda_d;
        let e_a = dimer.e_a - kernel.lambda_a;
        let j = dimer.coupling();
        let jw = j * kernel.dressing();
        let (eps, u) = symmetric_eigen_2x2(e_d, jw, e_a);
        let n = kernel.len();
        let mut m = vec![[ZERO; 8]; n];
        let mut m_inf = [ZERO; 8];
        let sigma = [1.0, -1.0];
        for alpha in 0..2 {
            let mut eig_tables: Vec<(usize, usize, f64, Vec<Complex64>, Complex64)> = Vec::new();
            for beta in 0..2 {
                let corr = if alpha == beta { Correlation::Minus } else { Correlation::Plus };
                // (Uᵀ s_β U)_{mn}
                let s = jump(beta);
                for mm in 0..2 {
                    for nn in 0..2 {
                        let mut coeff = 0.0;
                        for p in 0..2 {
                            for q in 0..2 {
                                coeff += u[p][mm] * s[p][q].re * u[q][nn];
                            }
                        }
                        if coeff == 0.0 {
                            continue;
                        }
                        let nu = (eps[mm] - eps[nn]) / HBAR;
                        let mi = kernel.memory_integral(corr, sigma[alpha], sigma[beta], nu);
                        eig_tables.push((mm, nn, coeff, mi.values, mi.stationary));
                    }
                }
            }
            // back to the site basis: U E_mn Uᵀ has entries U[i][m]·U[j][n]
            let base = 4 * alpha;
            for (mm, nn, coeff, values, stat) in &eig_tables {
                for i in 0..2 {
                    for jj in 0..2 {
                        let w = coeff * u[i][*mm] * u[jj][*nn];
                        if w == 0.0 {
                            continue;
                        }
                        for (k, v) in values.iter().enumerate() {
                            m[k][base + 2 * i + jj] += v * w;
                        }
                        m_inf[base + 2 * i + jj] += stat * w;
                    }
                }
            }
        }
        Self {
            h: kernel.h,
            e_d,
            e_a,
            jw,
            j2: j * j,
            chi: kernel.chi().to_vec(),
            m,
            m_inf,
        }
    }

    fn horizon(&self) -> f64 {
        self.h * (self.m.len() - 1) as f64
    }

    fn at(&self, t: f64) -> (f64, [Complex64; 8]) {
        if t >= self.horizon() {
            return (0.0, self.m_inf);
        }
        let (i, w) = lagrange4(self.m.len(), self.h, t);
        let mut out = [ZERO; 8];
        for (r, wr) in w.iter().enumerate() {
            let row = &self.m[i + r];
            for c in 0..8 {
                out[c] += row[c] * wr;
            }
        }
        let chi = self.chi[i] * w[0] + self.chi[i + 1] * w[1] + self.chi[i + 2] * w[2] + self.chi[i + 3] * w[3];
        (chi, out)
    }

    fn apply(&self, chi: f64, m: &[Complex64; 8], y: &[f64; 4]) -> [f64; 4] {
        let rho: Mat = [
            [Complex64::new(y[0], 0.0), Complex64::new(y[2], y[3])],
            [Complex64::new(y[2], -y[3]), Complex64::new(y[1], 0.0)],
        ];
        let c = Complex64::from_polar(self.jw, chi);
        let h: Mat = [[Complex64::new(self.e_d, 0.0), c], [c.conj(), Complex64::new(self.e_a, 0.0)]];
        let mut d = comm(&h, &rho);
        for row in d.iter_mut() {
            for v in row.iter_mut() {
                *v *= -I / HBAR;
            }
        }
        let mats: [Mat; 2] = [[[m[0], m[1]], [m[2], m[3]]], [[m[4], m[5]], [m[6], m[7]]]];
        let pref = self.j2 / (HBAR * HBAR);
        for alpha in 0..2 {
            let s = jump(alpha);
            let ma = &mats[alpha];
            let mbar_dag = dagger(&mats[1 - alpha]);
            let t1 = comm(&s, &mul(ma, &rho));
            let t2 = comm(&s, &mul(&rho, &mbar_dag));
            let term = sub(&t1, &t2);
            for i in 0..2 {
                for j in 0..2 {
                    d[i][j] -= term[i][j] * pref;
                }
            }
        }
        [d[0][0].re, d[1][1].re, d[0][1].re, d[0][1].im]
    }

    /// dρ/dt for ρ packed as (ρ_DD, ρ_AA, Re ρ_DA, Im ρ_DA).
    pub fn rhs(&self, t: f64, y: &[f64; 4]) -> [f64; 4] {
        let (chi, m) = self.at(t);
        self.apply(chi, &m, y)
    }

    /// Null vector of the long-time (constant) generator with unit trace,
    /// as (P_D, P_A, ρ_DA).
    pub fn stationary_state(&self) -> Option<(f64, f64, Complex64)> {
        let mut a = [[0.0; 4]; 4];
        for col in 0..4 {
            let mut e = [0.0; 4];
            e[col] = 1.0;
            let v = self.apply(0.0, &self.m_inf, &e);
            for row in 0..4 {
                a[row][col] = v[row];
            }
        }
        // the ρ_AA equation is redundant with trace conservation
        a[1] = [1.0, 1.0, 0.0, 0.0];
        let x = solve4(a, [0.0, 1.0, 0.0, 0.0])?;
        Some((x[0], x[1], Complex64::new(x[2], x[3])))
    }
}

/// Propagates the polaron-frame density matrix from ρ(0) = |D⟩⟨D| to
/// `t_max` and reports populations and coherences on the reporting grid.
/// Populations are the same in the polaron and site frames.
pub fn cret_propagate(dimer: &DimerSpec, kernel: &PairKernel, t_max: f64, opts: &DynamicsOptions) -> Result<PopulationTrajectory> {
    if !(t_max > 0.0) {
        return Err(Error::domain("t_max must be positive"));
    }
    let gen = CretGenerator::new(dimer, kernel);
    let n = (t_max / opts.report_dt).round() as usize + 1;
    let times: Vec<f64> = (0..n).map(|k| k as f64 * opts.report_dt).collect();
    let ode = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        h_init: opts.dt.min(opts.h_max) * 0.5,
        h_max: opts.h_max,
        ..Default::default()
    };
    let ys = integrate(|t, y: &[f64; 4]| gen.rhs(t, y), 0.0, [1.0, 0.0, 0.0, 0.0], &times, &ode)?;
    let p_d: Vec<f64> = ys.iter().map(|y| y[0]).collect();
    let p_a: Vec<f64> = ys.iter().map(|y| y[1]).collect();
    let coh: Vec<Complex64> = ys.iter().map(|y| Complex64::new(y[2], y[3])).collect();
    let w = kernel.dressing();
    let coh_orig = times
        .iter()
        .zip(&coh)
        .map(|(&t, c)| c * Complex64::from_polar(w, -kernel.chi_at(t)))
        .collect();
    let lost_positivity = ys
        .iter()
        .any(|y| y[0] * y[1] - (y[2] * y[2] + y[3] * y[3]) < -CRET_POSITIVITY_TOL);
    let mut traj = PopulationTrajectory::new(Method::Cret, times, p_d, p_a);
    traj.positivity_violated |= lost_positivity;
    traj.coherence = Some(coh);
    traj.coherence_original = Some(coh_orig);
    if dimer.coupling() == 0.0 {
        traj.set_stationary(1.0, 0.0);
    } else {
        match gen.stationary_state() {
            Some((pd, pa, _)) => traj.set_stationary(pd, pa),
            None => traj.plateau.converged = false,
        }
    }
    Ok(traj)
}

/// Builds the bath tables and runs [`cret_propagate`].
pub fn cret_propagate_for(dimer: &DimerSpec, bath: &BathSpec, t_max: f64, opts: &DynamicsOptions) -> Result<PopulationTrajectory> {
    let kernel = PairKernel::build(bath, opts)?;
    cret_propagate(dimer, &kernel, t_max, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{neq_fret_rate, propagate_fret};

    #[test]
    fn decoupled_sites() {
        let bath = BathSpec::new(2.0, 2.0, 1000.0, 300.0).unwrap();
        let opts = DynamicsOptions { memory: 300.0, ..Default::default() };
        let d = DimerSpec::from_gap(800.0, 0.0, 1.0).unwrap();
        let tr = cret_propagate_for(&d, &bath, 400.0, &opts).unwrap();
        assert!(tr.p_d.iter().all(|&p| (p - 1.0).abs() < 1e-15));
    }

    #[test]
    fn trace_and_hermiticity_are_preserved() {
        let bath = BathSpec::new(2.0, 2.0, 1000.0, 300.0).unwrap();
        let opts = DynamicsOptions { memory: 1000.0, ..Default::default() };
        let kernel = PairKernel::build(&bath, &opts).unwrap();
        let d = DimerSpec::from_gap(800.0, 5.0, 0.3).unwrap();
        let tr = cret_propagate(&d, &kernel, 1500.0, &opts).unwrap();
        for (a, b) in tr.p_d.iter().zip(&tr.p_a) {
            assert!((a + b - 1.0).abs() < 1e-9);
        }
        assert!(!tr.positivity_violated);
    }

    #[test]
    fn weak_coupling_reduces_to_fret() {
        // CRET and nonequilibrium FRET differ only through coherent mixing of
        // order (Jw/Δ̃)², so the deviation vanishes as J²
        let bath = BathSpec::new(2.0, 2.0, 1000.0, 300.0).unwrap();
        let opts = DynamicsOptions { memory: 1500.0, ..Default::default() };
        let kernel = PairKernel::build(&bath, &opts).unwrap();
        let t_max = 2000.0;
        let deviation = |r: f64| {
            let d = DimerSpec::from_gap(800.0, 5.0, r).unwrap();
            let cret = cret_propagate(&d, &kernel, t_max, &opts).unwrap();
            let rates = neq_fret_rate(&d, &kernel, t_max).unwrap();
            let fret = propagate_fret(&rates, t_max, &opts).unwrap();
            let dev = cret
                .p_d
                .iter()
                .zip(&fret.p_d)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let plateau = (cret.plateau.p_a - fret.plateau.p_a).abs();
            (dev, plateau, d.coupling())
        };
        let (dev1, pl1, j1) = deviation(0.8);
        let (dev2, pl2, j2) = deviation(1.2);
        assert!(dev2 < 5e-5, "{dev2}");
        let expected = (j1 / j2).powi(2);
        assert!((dev1 / dev2 / expected - 1.0).abs() < 0.1, "{dev1} {dev2}");
        assert!((pl1 / pl2 / expected - 1.0).abs() < 0.1, "{pl1} {pl2}");
    }
}
