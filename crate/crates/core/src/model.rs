//! Physical constants and the static model: dimer electronic parameters,
//! per-site super-Ohmic baths and transition-dipole geometry.

use crate::error::{Error, Result};

/// Constants in the working unit system (cm⁻¹, fs, K) plus the CGS values
/// needed by the spectroscopic Förster-radius formulas.
pub mod constants {
    use std::f64::consts::PI;

    /// Speed of light in cm/fs.
    pub const C_CM_PER_FS: f64 = 2.997_924_58e-5;
    /// ħ in cm⁻¹·fs, i.e. 1/(2πc).
    pub const HBAR: f64 = 1.0 / (2.0 * PI * C_CM_PER_FS);
    /// Boltzmann constant in cm⁻¹/K.
    pub const KB: f64 = 0.695_034_800_4;
    /// Avogadro's number, 1/mol.
    pub const N_A: f64 = 6.022_140_76e23;

    /// ħ in erg·s.
    pub const HBAR_CGS: f64 = 1.054_571_817e-27;
    /// Planck constant in erg·s.
    pub const H_CGS: f64 = 6.626_070_15e-27;
    /// Speed of light in cm/s.
    pub const C_CGS: f64 = 2.997_924_58e10;
    /// One Debye in esu·cm.
    pub const DEBYE_CGS: f64 = 1.0e-18;
    /// Energy of one wavenumber in erg (hc · 1 cm⁻¹).
    pub const ERG_PER_WAVENUMBER: f64 = H_CGS * C_CGS;
    /// Nanometres per centimetre.
    pub const NM_PER_CM: f64 = 1.0e7;
    /// Femtoseconds per nanosecond.
    pub const FS_PER_NS: f64 = 1.0e6;
}

use constants::{HBAR, KB};

/// Which chromophore a quantity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Site {
    Donor,
    Acceptor,
}

impl Site {
    pub fn tag(self) -> &'static str {
        match self {
            Site::Donor => "D",
            Site::Acceptor => "A",
        }
    }
}

/// Electronic parameters of the donor–acceptor pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerSpec {
    /// Donor excitation energy, cm⁻¹.
    pub e_d: f64,
    /// Acceptor excitation energy, cm⁻¹.
    pub e_a: f64,
    /// Coupling at `R = R₀`, cm⁻¹.
    pub j0: f64,
    /// Distance in units of the Förster radius.
    pub r_over_r0: f64,
}

impl DimerSpec {
    pub fn new(e_d: f64, e_a: f64, j0: f64, r_over_r0: f64) -> Result<Self> {
        if !(r_over_r0 > 0.0) || !r_over_r0.is_finite() {
            return Err(Error::domain(format!(
                "R/R0 must be positive and finite, got {r_over_r0}"
            )));
        }
        if !(e_d.is_finite() && e_a.is_finite() && j0.is_finite()) {
            return Err(Error::domain("dimer energies must be finite"));
        }
        Ok(Self {
            e_d,
            e_a,
            j0,
            r_over_r0,
        })
    }

    /// Dimer with `E_A = 0` and `E_D = ΔE`; only the gap matters for transfer.
    pub fn from_gap(delta_e: f64, j0: f64, r_over_r0: f64) -> Result<Self> {
        Self::new(delta_e, 0.0, j0, r_over_r0)
    }

    pub fn gap(&self) -> f64 {
        self.e_d - self.e_a
    }

    /// Coupling at the configured distance.
    pub fn coupling(&self) -> f64 {
        // validated at construction
        self.j0 / self.r_over_r0.powi(3)
    }
}

/// Transition-dipole coupling at distance ratio `r = R/R₀`: `J₀/r³`.
pub fn coupling_at_distance(j0: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(format!("R/R0 must be positive, got {r}")));
    }
    Ok(j0 / (r * r * r))
}

/// Super-Ohmic bath of a single site:
/// 𝒥(ω) = πħ (η/3!) ω³/ω_c² e^{−ω/ω_c}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteBath {
    /// Dimensionless coupling strength η.
    pub eta: f64,
    /// Cutoff ħω_c in cm⁻¹.
    pub omega_c: f64,
    /// Temperature in K.
    pub temperature: f64,
}

impl SiteBath {
    pub fn new(eta: f64, omega_c: f64, temperature: f64) -> Result<Self> {
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::domain(format!("eta must be >= 0, got {eta}")));
        }
        if !(omega_c > 0.0) || !omega_c.is_finite() {
            return Err(Error::domain(format!("omega_c must be > 0, got {omega_c}")));
        }
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::domain(format!(
                "temperature must be > 0, got {temperature}"
            )));
        }
        Ok(Self {
            eta,
            omega_c,
            temperature,
        })
    }

    /// Reorganization energy ħηω_c/3, cm⁻¹.
    pub fn reorganization_energy(&self) -> f64 {
        reorganization_energy(self.eta, self.omega_c)
    }

    /// βħω_c/2, the argument scale of coth in the dimensionless frequency x = ω/ω_c.
    pub fn kappa(&self) -> f64 {
        self.omega_c / (2.0 * KB * self.temperature)
    }

    /// ω_c in rad/fs.
    pub fn cutoff_rate(&self) -> f64 {
        self.omega_c / HBAR
    }

    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        spectral_density(omega, self.eta, self.omega_c)
    }
}

/// Baths of both sites. Donor and acceptor share cutoff and temperature and
/// have no common modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpec {
    pub eta_d: f64,
    pub eta_a: f64,
    pub omega_c: f64,
    pub temperature: f64,
}

impl BathSpec {
    pub fn new(eta_d: f64, eta_a: f64, omega_c: f64, temperature: f64) -> Result<Self> {
        SiteBath::new(eta_d, omega_c, temperature)?;
        SiteBath::new(eta_a, omega_c, temperature)?;
        Ok(Self {
            eta_d,
            eta_a,
            omega_c,
            temperature,
        })
    }

    pub fn site(&self, site: Site) -> SiteBath {
        let eta = match site {
            Site::Donor => self.eta_d,
            Site::Acceptor => self.eta_a,
        };
        SiteBath {
            eta,
            omega_c: self.omega_c,
            temperature: self.temperature,
        }
    }

    pub fn donor(&self) -> SiteBath {
        self.site(Site::Donor)
    }

    pub fn acceptor(&self) -> SiteBath {
        self.site(Site::Acceptor)
    }
}

/// 𝒥(ω) for the super-Ohmic form, with `omega` given as ħω in cm⁻¹.
///
/// The πħ prefactor is kept: since ħω is used as the variable the result is
/// π(η/6)(ω³/ω_c²)e^{−ω/ω_c} in cm⁻¹, which is numerically 𝒥(ω). Consumers
/// divide by π (and by ħ when converting to time units) themselves.
pub fn spectral_density(omega: f64, eta: f64, omega_c: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::domain(format!("omega must be >= 0, got {omega}")));
    }
    let x = omega / omega_c;
    Ok(std::f64::consts::PI * eta / 6.0 * omega * x * x * (-x).exp())
}

/// ħηω_c/3 in cm⁻¹.
pub fn reorganization_energy(eta: f64, omega_c: f64) -> f64 {
    eta * omega_c / 3.0
}

/// Transition dipoles of the pair and the refractive indices entering the
/// coupling (`n_r`) and the emission rate (`n_r_prime`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleGeometry {
    /// Debye.
    pub mu_d: f64,
    /// Debye.
    pub mu_a: f64,
    pub theta_d: f64,
    pub phi_d: f64,
    pub theta_a: f64,
    pub phi_a: f64,
    pub n_r: f64,
    pub n_r_prime: f64,
}

impl DipoleGeometry {
    pub fn orientation_factor(&self) -> f64 {
        orientation_factor(self.theta_d, self.phi_d, self.theta_a, self.phi_a)
    }
}

/// κ = sinθ_D sinθ_A cos(φ_D−φ_A) − 2 cosθ_D cosθ_A, angles in radians,
/// with the inter-dipole axis along z.
pub fn orientation_factor(theta_d: f64, phi_d: f64, theta_a: f64, phi_a: f64) -> f64 {
    theta_d.sin() * theta_a.sin() * (phi_d - phi_a).cos()
        - 2.0 * theta_d.cos() * theta_a.cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::composite_gauss_legendre;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn hbar_and_kb_values() {
        assert_relative_eq!(constants::HBAR, 5308.837_459, max_relative = 1e-9);
        assert_relative_eq!(constants::KB, 0.695_035, max_relative = 1e-6);
    }

    #[test]
    fn coupling_examples() {
        assert_relative_eq!(coupling_at_distance(5.0, 0.2).unwrap(), 625.0, max_relative = 1e-12);
        assert_relative_eq!(coupling_at_distance(5.0, 0.25).unwrap(), 320.0, max_relative = 1e-12);
        assert_relative_eq!(coupling_at_distance(5.0, 0.5).unwrap(), 40.0, max_relative = 1e-12);
        assert_eq!(coupling_at_distance(7.5, 1.0).unwrap(), 7.5);
        assert!(coupling_at_distance(5.0, 0.0).is_err());
        assert!(coupling_at_distance(5.0, -1.0).is_err());
        assert!(DimerSpec::new(1.0, 0.0, 5.0, 0.0).is_err());
    }

    #[test]
    fn spectral_density_shape() {
        let (eta, wc) = (2.0, 1000.0);
        assert_eq!(spectral_density(0.0, eta, wc).unwrap(), 0.0);
        assert!(spectral_density(-1.0, eta, wc).is_err());
        let at_wc = spectral_density(wc, eta, wc).unwrap();
        assert_relative_eq!(at_wc, PI * eta / 6.0 * wc * (-1.0f64).exp(), max_relative = 1e-14);

        // golden-section search for the maximum
        let f = |w: f64| spectral_density(w, eta, wc).unwrap();
        let (mut a, mut b) = (0.0, 20.0 * wc);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        assert_relative_eq!(0.5 * (a + b), 3.0 * wc, max_relative = 1e-6);
    }

    #[test]
    fn reorganization_matches_quadrature() {
        for &(eta, wc) in &[(2.0, 1000.0), (5.0, 400.0), (0.7, 123.0)] {
            let lam = reorganization_energy(eta, wc);
            let q = composite_gauss_legendre(
                |w| spectral_density(w, eta, wc).unwrap() / w / PI,
                0.0,
                60.0 * wc,
                240,
            );
            assert_relative_eq!(q, lam, max_relative = 1e-8);
        }
        assert_relative_eq!(reorganization_energy(2.0, 1000.0), 666.666_666_666_7, max_relative = 1e-12);
        assert_relative_eq!(reorganization_energy(5.0, 400.0), 666.666_666_666_7, max_relative = 1e-12);
        assert_eq!(reorganization_energy(0.0, 400.0), 0.0);
    }

    #[test]
    fn orientation_examples() {
        assert_relative_eq!(orientation_factor(0.0, 0.0, 0.0, 0.0), -2.0);
        assert!(orientation_factor(FRAC_PI_2, 0.3, 0.0, 1.1).abs() < 1e-15);
        assert_relative_eq!(orientation_factor(FRAC_PI_2, 0.4, FRAC_PI_2, 0.4), 1.0);
    }

    #[test]
    fn bath_validation() {
        assert!(SiteBath::new(-1.0, 100.0, 300.0).is_err());
        assert!(SiteBath::new(1.0, 0.0, 300.0).is_err());
        assert!(SiteBath::new(1.0, 100.0, 0.0).is_err());
        let b = BathSpec::new(2.0, 3.0, 1000.0, 300.0).unwrap();
        assert_eq!(b.acceptor().eta, 3.0);
        assert_relative_eq!(b.donor().reorganization_energy(), 2000.0 / 3.0);
    }

    proptest! {
        #[test]
        fn kappa_is_bounded(td in 0.0..PI, pd in 0.0..2.0 * PI, ta in 0.0..PI, pa in 0.0..2.0 * PI) {
            let k = orientation_factor(td, pd, ta, pa);
            prop_assert!(k.abs() <= 2.0 + 1e-12);
        }

        #[test]
        fn coupling_times_cube_recovers_j0(j0 in -100.0..100.0f64, r in 1e-3..10.0f64) {
            let j = coupling_at_distance(j0, r).unwrap();
            prop_assert!((j * r * r * r - j0).abs() <= 1e-12 * j0.abs().max(1e-300));
        }

        #[test]
        fn spectral_density_nonnegative_unimodal(w1 in 0.0..3000.0f64, dw in 0.0..3000.0f64) {
            let (eta, wc) = (5.0, 400.0);
            let a = spectral_density(w1, eta, wc).unwrap();
            prop_assert!(a >= 0.0);
            // increasing below 3ω_c, decreasing above
            let b = spectral_density(w1 + dw, eta, wc).unwrap();
            if w1 + dw <= 3.0 * wc { prop_assert!(b >= a); }
            if w1 >= 3.0 * wc { prop_assert!(b <= a); }
        }
    }
}
