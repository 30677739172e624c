//! Golden-rule transfer rates from spectral overlap, Förster radii, the
//! radiative lifetime, the coupling at the Förster radius and the
//! steady-state transfer efficiencies.
//!
//! Spectra are unit-area densities per cm⁻¹ ([`SpectrumTable`]). For such
//! densities the golden-rule rate is k = (2πJ²/ħ)∫l_D(ε)i_A(ε)dε, which is
//! J²/(ħ²c)∫L̃Ĩ dν̃ in CGS. The spectroscopic formulas are evaluated in CGS
//! with dipoles in Debye; results are returned in nm, ns and cm⁻¹.

use std::f64::consts::{LN_10, PI};
use std::io::BufRead;

use crate::bath::{SpectrumKind, SpectrumTable};
use crate::error::{Error, Result};
use crate::model::constants::{
    C_CGS, C_CM_PER_FS, DEBYE_CGS, ERG_PER_WAVENUMBER, FS_PER_NS, HBAR, HBAR_CGS, N_A, NM_PER_CM,
};
use crate::quadrature::trapezoid;

/// Result of an overlap-based rate. `disjoint` is set when the two spectra
/// share no support, in which case `value` is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    pub value: f64,
    pub disjoint: bool,
}

/// ∫l_D(ε) i_A(ε) dε in cm, including the zero-phonon lines.
///
/// Two zero-phonon lines at different energies do not overlap. Two lines at
/// the same energy give an infinite rate and are rejected.
pub fn spectral_overlap(l_d: &SpectrumTable, i_a: &SpectrumTable) -> Result<Overlap> {
    let mut value = 0.0;
    let mut touched = false;
    if let (Some(zd), Some(za)) = (l_d.zero_phonon, i_a.zero_phonon) {
        let tol = 1e-9 * (1.0 + zd.position.abs());
        if (zd.position - za.position).abs() < tol {
            return Err(Error::domain("zero-phonon lines coincide: golden-rule rate diverges"));
        }
    }
    let (lo, hi) = (l_d.omega_grid[0], *l_d.omega_grid.last().unwrap());
    let (alo, ahi) = (i_a.omega_grid[0], *i_a.omega_grid.last().unwrap());
    if lo < ahi && alo < hi {
        touched = true;
        let prod: Vec<f64> = l_d
            .omega_grid
            .iter()
            .zip(&l_d.values)
            .map(|(&e, &v)| v * i_a.sideband_at(e))
            .collect();
        value += trapezoid(&prod, l_d.spacing());
    }
    if let Some(z) = l_d.zero_phonon {
        if z.position >= alo && z.position <= ahi {
            touched = true;
            value += z.weight * i_a.sideband_at(z.position);
        }
    }
    if let Some(z) = i_a.zero_phonon {
        if z.position >= lo && z.position <= hi {
            touched = true;
            value += z.weight * l_d.sideband_at(z.position);
        }
    }
    Ok(Overlap { value, disjoint: !touched })
}

/// Golden-rule rate (1/fs) for coupling J (cm⁻¹) from normalized donor
/// emission and acceptor absorption densities: k = (2πJ²/ħ)∫l_D i_A dε.
pub fn fgr_rate_overlap(j: f64, l_d: &SpectrumTable, i_a: &SpectrumTable) -> Result<Overlap> {
    let o = spectral_overlap(l_d, i_a)?;
    Ok(Overlap {
        value: 2.0 * PI * j * j / HBAR * o.value,
        disjoint: o.disjoint,
    })
}

/// Same rate in wavenumber form, k = 4π²c J̃²∫L̃_D Ĩ_A dν̃ with J̃ = J/(2πcħ)
/// in cm⁻¹ and c in cm/fs.
pub fn fgr_rate_wavenumber(j_tilde: f64, l_d: &SpectrumTable, i_a: &SpectrumTable) -> Result<Overlap> {
    let o = spectral_overlap(l_d, i_a)?;
    Ok(Overlap {
        value: 4.0 * PI * PI * C_CM_PER_FS * j_tilde * j_tilde * o.value,
        disjoint: o.disjoint,
    })
}

/// J̃ = J/(2πcħ). Numerically equal to J when J is given in cm⁻¹.
pub fn wavenumber_coupling(j: f64) -> f64 {
    j / (2.0 * PI * C_CM_PER_FS * HBAR)
}

/// k_F = (1/τ_D)(R₀/R)⁶ in 1/fs, τ_D in ns.
pub fn fret_rate_standard(tau_d_ns: f64, r_over_r0: f64) -> Result<f64> {
    if !(tau_d_ns > 0.0) || !(r_over_r0 > 0.0) {
        return Err(Error::domain("fret_rate_standard needs tau_D > 0 and R/R0 > 0"));
    }
    Ok(1.0 / (tau_d_ns * FS_PER_NS) / r_over_r0.powi(6))
}

/// ⟨κ²⟩ for isotropically and independently oriented dipoles. Never applied
/// implicitly: κ fluctuating on the transfer time scale is outside the
/// theory behind the Förster formulas.
pub fn kappa_sq_isotropic() -> f64 {
    2.0 / 3.0
}

/// A sampled curve that is not a probability density (e.g. a molar
/// extinction coefficient in M⁻¹cm⁻¹ on a wavenumber grid in cm⁻¹).
#[derive(Debug, Clone)]
pub struct SampledCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl SampledCurve {
    fn at(&self, x: f64) -> f64 {
        let n = self.grid.len();
        if n < 2 || x < self.grid[0] || x > self.grid[n - 1] {
            return 0.0;
        }
        let h = self.grid[1] - self.grid[0];
        let s = (x - self.grid[0]) / h;
        let i = (s.floor() as usize).min(n - 2);
        let f = s - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }
}

/// Molar extinction ε_A(ν̃) = 8π³N_A ν̃ μ_A² i_A(ν̃)/(3000 ln10 hc n_r′)
/// from a normalized absorption density. The sideband is sampled; a
/// zero-phonon line cannot be represented and is rejected.
pub fn extinction_from_absorption(i_a: &SpectrumTable, mu_a_debye: f64, n_r_prime: f64) -> Result<SampledCurve> {
    if i_a.zero_phonon.is_some_and(|z| z.weight > 0.0) {
        return Err(Error::domain("extinction curve cannot carry a zero-phonon delta"));
    }
    let mu = mu_a_debye * DEBYE_CGS;
    let pref = 8.0 * PI.powi(3) * N_A * mu * mu / (3000.0 * LN_10 * ERG_PER_WAVENUMBER * n_r_prime);
    Ok(SampledCurve {
        grid: i_a.omega_grid.clone(),
        values: i_a.omega_grid.iter().zip(&i_a.values).map(|(&nu, &v)| pref * nu * v).collect(),
    })
}

/// Normalized fluorescence spectrum f_D(ν̃) ∝ ν̃³ l_D(ν̃).
pub fn fluorescence_from_emission(l_d: &SpectrumTable) -> Result<SpectrumTable> {
    let third = l_d.integrate_with(|nu| nu.powi(3));
    if !(third > 0.0) {
        return Err(Error::domain("emission spectrum has no positive-frequency weight"));
    }
    Ok(SpectrumTable {
        omega_grid: l_d.omega_grid.clone(),
        values: l_d.omega_grid.iter().zip(&l_d.values).map(|(&nu, &v)| nu.powi(3) * v / third).collect(),
        kind: SpectrumKind::DonorEmission,
        zero_phonon: l_d.zero_phonon.map(|mut z| {
            z.weight *= z.position.powi(3) / third;
            z
        }),
    })
}

/// ∫f_D(ν̃) ε_A(ν̃) ν̃⁻⁴ dν̃ in M⁻¹cm³.
pub fn spectroscopic_overlap(f_d: &SpectrumTable, eps_a: &SampledCurve) -> f64 {
    f_d.integrate_with(|nu| if nu > 0.0 { eps_a.at(nu) / nu.powi(4) } else { 0.0 })
}

fn positive_overlap(x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::domain("overlap integral must be positive"))
    }
}

/// Förster radius from the fluorescence spectrum and molar extinction:
/// R₀⁶ = 9000 ln10 κ² ∫f_D ε_A ν̃⁻⁴ dν̃/(128π⁵N_A n_r⁴). Returns R₀ in nm.
pub fn forster_radius_spectroscopic(f_d: &SpectrumTable, eps_a: &SampledCurve, kappa_sq: f64, n_r: f64) -> Result<f64> {
    let x = positive_overlap(spectroscopic_overlap(f_d, eps_a))?;
    let r6 = 9000.0 * LN_10 * kappa_sq * x / (128.0 * PI.powi(5) * N_A * n_r.powi(4));
    Ok(r6.powf(1.0 / 6.0) * NM_PER_CM)
}

/// Förster radius from lineshapes and a measured donor lifetime:
/// R₀⁶ = τ_D μ_D²μ_A²κ² ∫L̃_D Ĩ_A dν̃/(ħ²c n_r⁴). Returns R₀ in nm.
pub fn forster_radius_lineshape(
    tau_d_ns: f64,
    mu_d_debye: f64,
    mu_a_debye: f64,
    kappa: f64,
    n_r: f64,
    l_d: &SpectrumTable,
    i_a: &SpectrumTable,
) -> Result<f64> {
    let s = positive_overlap(spectral_overlap(l_d, i_a)?.value)?;
    let (md, ma) = (mu_d_debye * DEBYE_CGS, mu_a_debye * DEBYE_CGS);
    let tau = tau_d_ns * 1e-9;
    let r6 = tau * md * md * ma * ma * kappa * kappa * s / (HBAR_CGS * HBAR_CGS * C_CGS * n_r.powi(4));
    Ok(r6.powf(1.0 / 6.0) * NM_PER_CM)
}

/// Förster radius with τ_D purely radiative:
/// R₀⁶ = 3μ_A²κ²∫L̃_DĨ_A/(32π³ħc n_r⁴ n_r′ ∫ν̃³L̃_D). Returns R₀ in nm.
pub fn forster_radius_radiative(
    mu_a_debye: f64,
    kappa: f64,
    n_r: f64,
    n_r_prime: f64,
    l_d: &SpectrumTable,
    i_a: &SpectrumTable,
) -> Result<f64> {
    let s = positive_overlap(spectral_overlap(l_d, i_a)?.value)?;
    let t = positive_overlap(l_d.integrate_with(|nu| nu.powi(3)))?;
    let ma = mu_a_debye * DEBYE_CGS;
    let r6 = 3.0 * ma * ma * kappa * kappa * s / (32.0 * PI.powi(3) * HBAR_CGS * C_CGS * n_r.powi(4) * n_r_prime * t);
    Ok(r6.powf(1.0 / 6.0) * NM_PER_CM)
}

/// Radiative lifetime in ns: 1/τ_D = (32π³n_r′μ_D²/3ħ)∫ν̃³L̃_D dν̃.
pub fn radiative_lifetime(mu_d_debye: f64, n_r_prime: f64, l_d: &SpectrumTable) -> Result<f64> {
    let t = positive_overlap(l_d.integrate_with(|nu| nu.powi(3)))?;
    let md = mu_d_debye * DEBYE_CGS;
    let rate = 32.0 * PI.powi(3) * n_r_prime * md * md * t / (3.0 * HBAR_CGS);
    Ok(1e9 / rate)
}

/// J₀ = μ_Dμ_A|κ|/(n_r²R₀³) in cm⁻¹, R₀ in nm.
pub fn j0_from_radius(mu_d_debye: f64, mu_a_debye: f64, kappa: f64, n_r: f64, r0_nm: f64) -> f64 {
    let r0 = r0_nm / NM_PER_CM;
    mu_d_debye * mu_a_debye * DEBYE_CGS * DEBYE_CGS * kappa.abs() / (n_r * n_r * r0.powi(3)) / ERG_PER_WAVENUMBER
}

/// J₀ = μ_Dμ_A[128π⁵N_A/(9000 ln10 ∫f_Dε_Aν̃⁻⁴dν̃)]^{1/2} in cm⁻¹.
pub fn j0_from_extinction(mu_d_debye: f64, mu_a_debye: f64, f_d: &SpectrumTable, eps_a: &SampledCurve) -> Result<f64> {
    let x = positive_overlap(spectroscopic_overlap(f_d, eps_a))?;
    let mm = mu_d_debye * mu_a_debye * DEBYE_CGS * DEBYE_CGS;
    Ok(mm * (128.0 * PI.powi(5) * N_A / (9000.0 * LN_10 * x)).sqrt() / ERG_PER_WAVENUMBER)
}

/// J₀ = μ_D[32π³ħc n_r′ ∫ν̃³L̃_D/(3∫L̃_DĨ_A)]^{1/2} in cm⁻¹ (radiative τ_D).
pub fn j0_from_lineshapes(mu_d_debye: f64, n_r_prime: f64, l_d: &SpectrumTable, i_a: &SpectrumTable) -> Result<f64> {
    let s = positive_overlap(spectral_overlap(l_d, i_a)?.value)?;
    let t = positive_overlap(l_d.integrate_with(|nu| nu.powi(3)))?;
    let md = mu_d_debye * DEBYE_CGS;
    Ok(md * (32.0 * PI.powi(3) * HBAR_CGS * C_CGS * n_r_prime * t / (3.0 * s)).sqrt() / ERG_PER_WAVENUMBER)
}

/// E = k_F/(k_F + 1/τ_D), k_F in 1/fs, τ_D in ns.
pub fn efficiency_forward(k_f: f64, tau_d_ns: f64) -> f64 {
    let g = 1.0 / (tau_d_ns * FS_PER_NS);
    k_f / (k_f + g)
}

/// E = 1/(1 + (R/R₀)⁶).
pub fn efficiency_distance(r_over_r0: f64) -> f64 {
    1.0 / (1.0 + r_over_r0.powi(6))
}

/// E = 1 − τ_DF/τ_D.
pub fn efficiency_from_lifetimes(tau_df: f64, tau_d: f64) -> f64 {
    1.0 - tau_df / tau_d
}

/// Steady excited-donor concentrations without and with transfer under
/// weak irradiation: (I_r[D]τ_D, I_r[D]/(k_F + 1/τ_D)). Rates in 1/fs,
/// τ_D in ns; I_r in 1/fs.
pub fn steady_state_populations(i_r: f64, d_conc: f64, tau_d_ns: f64, k_f: f64) -> (f64, f64) {
    let tau = tau_d_ns * FS_PER_NS;
    (i_r * d_conc * tau, i_r * d_conc / (k_f + 1.0 / tau))
}

/// Reads a two-column (wavenumber in cm⁻¹, density) CSV on a uniform grid.
/// Lines starting with '#' and a non-numeric header are skipped. Returns the
/// normalized table and the raw integral.
pub fn read_spectrum_csv<R: BufRead>(reader: R, kind: SpectrumKind) -> Result<(SpectrumTable, f64)> {
    let mut grid = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split([',', ';', '\t', ' ']).filter(|s| !s.is_empty());
        let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
            return Err(Error::parse(format!("line {}", lineno + 1), "expected two columns"));
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                grid.push(x);
                values.push(y);
            }
            _ if grid.is_empty() => continue,
            _ => return Err(Error::parse(format!("line {}", lineno + 1), "non-numeric value")),
        }
    }
    SpectrumTable::from_samples(grid, values, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::ZeroPhononLine;
    use crate::quadrature::composite_gauss_legendre;
    use approx::assert_relative_eq;

    // grids are multiples of a common step so different spectra share nodes
    fn gaussian(center: f64, sigma: f64, kind: SpectrumKind) -> SpectrumTable {
        let h = if sigma >= 100.0 { 5.0 } else { sigma / 50.0 };
        let k0 = ((center - 12.0 * sigma) / h).floor() as i64;
        let k1 = ((center + 12.0 * sigma) / h).ceil() as i64;
        let grid: Vec<f64> = (k0..=k1).map(|k| k as f64 * h).collect();
        let vals = grid
            .iter()
            .map(|&e| (-(e - center).powi(2) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt()))
            .collect();
        SpectrumTable::from_samples(grid, vals, kind).unwrap().0
    }

    #[test]
    fn gaussian_overlap_rate() {
        let sigma = 300.0;
        let l = gaussian(15000.0, sigma, SpectrumKind::DonorEmission);
        let i = gaussian(15000.0, sigma, SpectrumKind::AcceptorAbsorption);
        let j = 40.0;
        let k = fgr_rate_overlap(j, &l, &i).unwrap();
        assert!(!k.disjoint);
        let want = 2.0 * PI * j * j / HBAR / (2.0 * sigma * PI.sqrt());
        assert_relative_eq!(k.value, want, max_relative = 1e-10);
        let k2 = fgr_rate_overlap(2.0 * j, &l, &i).unwrap().value;
        assert_relative_eq!(k2, 4.0 * k.value, max_relative = 1e-14);
        let kw = fgr_rate_wavenumber(wavenumber_coupling(j), &l, &i).unwrap().value;
        assert_relative_eq!(kw, k.value, max_relative = 1e-10);
        assert_eq!(fgr_rate_wavenumber(0.0, &l, &i).unwrap().value, 0.0);
    }

    #[test]
    fn disjoint_spectra() {
        let l = gaussian(10000.0, 100.0, SpectrumKind::DonorEmission);
        let i = gaussian(20000.0, 100.0, SpectrumKind::AcceptorAbsorption);
        let k = fgr_rate_overlap(40.0, &l, &i).unwrap();
        assert!(k.disjoint);
        assert_eq!(k.value, 0.0);
    }

    #[test]
    fn zero_phonon_lines() {
        let mut l = gaussian(15000.0, 200.0, SpectrumKind::DonorEmission);
        let mut i = gaussian(15400.0, 200.0, SpectrumKind::AcceptorAbsorption);
        for v in &mut l.values {
            *v *= 0.5;
        }
        for v in &mut i.values {
            *v *= 0.5;
        }
        l.zero_phonon = Some(ZeroPhononLine { position: 15100.0, weight: 0.5 });
        i.zero_phonon = Some(ZeroPhononLine { position: 15300.0, weight: 0.5 });
        let o = spectral_overlap(&l, &i).unwrap().value;
        let sb = spectral_overlap(
            &SpectrumTable { zero_phonon: None, ..l.clone() },
            &SpectrumTable { zero_phonon: None, ..i.clone() },
        )
        .unwrap()
        .value;
        let want = sb + 0.5 * i.sideband_at(15100.0) + 0.5 * l.sideband_at(15300.0);
        assert_relative_eq!(o, want, max_relative = 1e-14);
        i.zero_phonon = Some(ZeroPhononLine { position: 15100.0, weight: 0.5 });
        assert!(spectral_overlap(&l, &i).is_err());
    }

    #[test]
    fn standard_rate_and_efficiencies() {
        assert_relative_eq!(fret_rate_standard(0.261, 1.0).unwrap(), 1.0 / 0.261e6, max_relative = 1e-14);
        let k = fret_rate_standard(0.261, 0.5).unwrap() * FS_PER_NS;
        assert_relative_eq!(k, 64.0 / 0.261, max_relative = 1e-12);
        assert!((k - 245.2).abs() < 0.1);
        assert_relative_eq!(fret_rate_standard(0.261, 2.0).unwrap(), 1.0 / (64.0 * 0.261e6), max_relative = 1e-14);
        for &r in &[0.3, 0.8, 1.7] {
            let c = fret_rate_standard(1.0, r).unwrap() * r.powi(6);
            assert_relative_eq!(c, 1e-6, max_relative = 1e-13);
        }
        assert_eq!(efficiency_forward(1.0 / 2e6, 2.0), 0.5);
        assert_eq!(efficiency_forward(0.0, 2.0), 0.0);
        for &r in &[0.2, 1.0, 2.0] {
            let e = efficiency_forward(fret_rate_standard(3.0, r).unwrap(), 3.0);
            assert_relative_eq!(e, efficiency_distance(r), max_relative = 1e-14);
        }
        assert_eq!(efficiency_distance(1.0), 0.5);
        assert_relative_eq!(efficiency_distance(2.0), 1.0 / 65.0, max_relative = 1e-15);
        assert!((efficiency_distance(1e-3) - 1.0).abs() < 1e-15);
        assert_eq!(efficiency_from_lifetimes(3.0, 3.0), 0.0);
        assert_eq!(efficiency_from_lifetimes(1.5, 3.0), 0.5);
        let (kf, td) = (2.3e-7, 4.0);
        let tdf = 1.0 / (1.0 / (td * FS_PER_NS) + kf) / FS_PER_NS;
        assert_relative_eq!(efficiency_from_lifetimes(tdf, td), efficiency_forward(kf, td), max_relative = 1e-12);
        assert_eq!(kappa_sq_isotropic(), 2.0 / 3.0);
    }

    #[test]
    fn steady_state_matches_ode() {
        use crate::ode::{integrate, OdeOptions};
        let (ir, d, td, kf) = (1e-9, 2.0, 1e-3, 5e-4);
        let (s0, s) = steady_state_populations(ir, d, td, kf);
        assert_relative_eq!(1.0 - s / s0, efficiency_forward(kf, td), max_relative = 1e-12);
        let (a, b) = steady_state_populations(ir, d, td, 0.0);
        assert_relative_eq!(a, b, max_relative = 1e-15);
        let tau = td * FS_PER_NS;
        let t_end = 50.0 * tau.max(1.0 / kf);
        let ys = integrate(
            |_, y: &[f64; 2]| [ir * d - y[0] / tau, ir * d - (1.0 / tau + kf) * y[1]],
            0.0,
            [0.0, 0.0],
            &[t_end],
            &OdeOptions { rtol: 1e-12, atol: 1e-20, ..Default::default() },
        )
        .unwrap();
        assert!((ys[0][0] - s0).abs() / s0 <= 1e-8);
        assert!((ys[0][1] - s).abs() / s <= 1e-8);
    }

    #[test]
    fn radii_and_couplings_are_consistent() {
        let l = gaussian(16000.0, 500.0, SpectrumKind::DonorEmission);
        let i = gaussian(16600.0, 600.0, SpectrumKind::AcceptorAbsorption);
        let (mu_d, mu_a, kappa, n, np) = (5.0, 7.0, 1.2, 1.4, 1.6);
        let tau = radiative_lifetime(mu_d, np, &l).unwrap();
        let r1 = forster_radius_lineshape(tau, mu_d, mu_a, kappa, n, &l, &i).unwrap();
        let r2 = forster_radius_radiative(mu_a, kappa, n, np, &l, &i).unwrap();
        assert_relative_eq!(r1, r2, max_relative = 1e-8);
        let f = fluorescence_from_emission(&l).unwrap();
        let eps = extinction_from_absorption(&i, mu_a, np).unwrap();
        let r3 = forster_radius_spectroscopic(&f, &eps, kappa * kappa, n).unwrap();
        assert_relative_eq!(r1, r3, max_relative = 1e-8);
        let j1 = j0_from_radius(mu_d, mu_a, kappa, n, r1);
        let j2 = j0_from_extinction(mu_d, mu_a, &f, &eps).unwrap();
        let j3 = j0_from_lineshapes(mu_d, np, &l, &i).unwrap();
        assert_relative_eq!(j1, j3, max_relative = 1e-8);
        assert_relative_eq!(j2, j3, max_relative = 1e-8);
        // J0 reproduces k_F = 1/τ_D at R = R0
        let k = fgr_rate_overlap(j1, &l, &i).unwrap().value;
        assert_relative_eq!(k, 1.0 / (tau * FS_PER_NS), max_relative = 1e-8);
        // scalings
        let r4 = forster_radius_spectroscopic(&f, &eps, 4.0 * kappa * kappa, n).unwrap();
        assert_relative_eq!(r4 / r3, 4f64.powf(1.0 / 6.0), max_relative = 1e-12);
        let r5 = forster_radius_lineshape(tau, mu_d, 2.0 * mu_a, kappa, n, &l, &i).unwrap();
        assert_relative_eq!(r5 / r1, 2f64.powf(1.0 / 3.0), max_relative = 1e-12);
        let t2 = radiative_lifetime(2.0 * mu_d, np, &l).unwrap();
        assert_relative_eq!(t2, tau / 4.0, max_relative = 1e-12);
        assert_eq!(j0_from_radius(mu_d, mu_a, 0.0, n, r1), 0.0);
        assert_relative_eq!(j0_from_radius(3.0, 3.0, -2.0, 1.0, 2.0), j0_from_radius(3.0, 3.0, 2.0, 1.0, 2.0));
    }

    #[test]
    fn spectroscopic_radius_vs_direct_quadrature() {
        let (c_d, s_d, c_a, s_a) = (16000.0, 500.0, 16600.0, 600.0);
        let l = gaussian(c_d, s_d, SpectrumKind::DonorEmission);
        let i = gaussian(c_a, s_a, SpectrumKind::AcceptorAbsorption);
        let f = fluorescence_from_emission(&l).unwrap();
        let eps = extinction_from_absorption(&i, 6.0, 1.0).unwrap();
        let g = |x: f64, c: f64, s: f64| (-(x - c).powi(2) / (2.0 * s * s)).exp() / (s * (2.0 * PI).sqrt());
        // analytic third moment of a Gaussian: c³ + 3cs²
        let third = c_d.powi(3) + 3.0 * c_d * s_d * s_d;
        let mu = 6.0 * DEBYE_CGS;
        let pe = 8.0 * PI.powi(3) * N_A * mu * mu / (3000.0 * LN_10 * ERG_PER_WAVENUMBER);
        let x = composite_gauss_legendre(
            |nu| nu.powi(3) * g(nu, c_d, s_d) / third * pe * nu * g(nu, c_a, s_a) / nu.powi(4),
            10000.0,
            23000.0,
            400,
        );
        let want = (9000.0 * LN_10 * 0.5 * x / (128.0 * PI.powi(5) * N_A * 1.3f64.powi(4))).powf(1.0 / 6.0) * NM_PER_CM;
        let got = forster_radius_spectroscopic(&f, &eps, 0.5, 1.3).unwrap();
        assert_relative_eq!(got, want, max_relative = 1e-6);
        let empty = SampledCurve { grid: eps.grid.clone(), values: vec![0.0; eps.grid.len()] };
        assert!(forster_radius_spectroscopic(&f, &empty, 0.5, 1.3).is_err());
    }

    #[test]
    fn radiative_lifetime_of_narrow_line() {
        let a = gaussian(10000.0, 1.0, SpectrumKind::DonorEmission);
        let b = gaussian(20000.0, 1.0, SpectrumKind::DonorEmission);
        let ta = radiative_lifetime(4.0, 1.0, &a).unwrap();
        let tb = radiative_lifetime(4.0, 1.0, &b).unwrap();
        assert_relative_eq!(ta / tb, 8.0, max_relative = 1e-6);
    }

    #[test]
    fn csv_ingestion_reports_raw_area() {
        let text = "# synthetic\nnu,density\n0,0\n1,2\n2,2\n3,0\n";
        let (t, raw) = read_spectrum_csv(text.as_bytes(), SpectrumKind::AcceptorAbsorption).unwrap();
        assert_eq!(raw, 4.0);
        assert_eq!(t.values, vec![0.0, 0.5, 0.5, 0.0]);
        assert!(read_spectrum_csv("1,2\n2,x\n".as_bytes(), SpectrumKind::AcceptorAbsorption).is_err());
    }
}
