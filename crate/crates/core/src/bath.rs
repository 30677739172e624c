//! Bath response of a single site: the correlation function C(t), the
//! complex lineshape function g(t), emission/absorption spectra and the
//! polaron dressing factor.
//!
//! Everything is built from the dimensionless frequency integral
//!
//! ```text
//! φ(t) = (η/6) ∫₀^∞ dx x e^{−x} [coth(κx) cos(a x) − i sin(a x)],   a = ω_c t, κ = βħω_c/2
//! ```
//!
//! which is (1/πħ)∫dω 𝒥(ω)/ω² [coth(βħω/2) cos ωt − i sin ωt]. In terms of φ,
//! g(t) = φ(0) − φ(t) − iλt/ħ, C(t) = −φ''(t) and the site dressing factor
//! is w = e^{−φ(0)/2}.
//!
//! The integrals run over x ∈ [0, 40] (the neglected tail is below 1e−15)
//! with 16-point Gauss–Legendre panels narrow enough to resolve cos(ax).

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::constants::HBAR;
use crate::model::{BathSpec, Site, SiteBath};
use crate::quadrature::{composite_nodes, filon_integral, trapezoid};

/// Upper limit of the dimensionless frequency integrals.
pub const X_MAX: f64 = 40.0;
/// Below κx = 1e−3, x·coth(κx) is evaluated by its series.
const SERIES_CUTOFF: f64 = 1e-3;
/// Absolute tolerance of single-point quadratures, relative to the integrand scale.
const POINT_TOL: f64 = 1e-11;

/// x·coth(κx), finite at x = 0.
fn x_coth(x: f64, kappa: f64) -> f64 {
    let y = kappa * x;
    if y < SERIES_CUTOFF {
        1.0 / kappa + kappa * x * x / 3.0
    } else {
        x / y.tanh()
    }
}

fn panels_for(a: f64) -> usize {
    let width = if a > 10.0 { 10.0 / a } else { 1.0 };
    (X_MAX / width).ceil() as usize
}

/// The moment ∫x^p e^{−x}[x coth(κx) cos(ax) − i x sin(ax)] dx and its
/// a-derivative, at a given panel count.
fn moment_with(p: i32, a: f64, kappa: f64, panels: usize) -> (Complex64, Complex64) {
    let (nodes, weights) = composite_nodes(0.0, X_MAX, panels);
    let mut m = Complex64::default();
    let mut dm = Complex64::default();
    for (&x, &w) in nodes.iter().zip(&weights) {
        let base = w * x.powi(p) * (-x).exp();
        let xc = x_coth(x, kappa);
        let (s, c) = (a * x).sin_cos();
        m += Complex64::new(base * xc * c, -base * x * s);
        dm += Complex64::new(-base * x * xc * s, -base * x * x * c);
    }
    (m, dm)
}

fn moment(p: i32, a: f64, kappa: f64) -> Result<(Complex64, Complex64)> {
    let panels = panels_for(a.abs());
    let (m1, d1) = moment_with(p, a, kappa, panels);
    let (m2, d2) = moment_with(p, a, kappa, 2 * panels);
    let scale = 1.0 + 1.0 / kappa;
    let err = (m1 - m2).norm().max((d1 - d2).norm());
    if err > POINT_TOL * scale * 10f64.powi(p.max(0)) {
        return Err(Error::Accuracy {
            achieved: err / scale,
            requested: POINT_TOL,
        });
    }
    Ok((m2, d2))
}

impl SiteBath {
    /// φ(t) (dimensionless), for any real t; φ(−t) = φ(t)*.
    pub fn phi(&self, t: f64) -> Result<Complex64> {
        let a = self.cutoff_rate() * t.abs();
        let (m, _) = moment(0, a, self.kappa())?;
        let v = m * (self.eta / 6.0);
        Ok(if t < 0.0 { v.conj() } else { v })
    }

    /// dφ/dt in 1/fs, t ≥ 0.
    pub fn phi_dot(&self, t: f64) -> Result<Complex64> {
        let a = self.cutoff_rate() * t;
        let (_, dm) = moment(0, a, self.kappa())?;
        Ok(dm * (self.eta / 6.0 * self.cutoff_rate()))
    }

    /// Bath correlation function
    /// C(t) = (1/πħ)∫₀^∞dω 𝒥(ω)[coth(βħω/2)cos ωt − i sin ωt] in fs⁻²,
    /// extended to negative times by C(−t) = C(t)*.
    pub fn bath_correlation(&self, t: f64) -> Result<Complex64> {
        let a = self.cutoff_rate() * t.abs();
        let (m, _) = moment(2, a, self.kappa())?;
        let wc = self.cutoff_rate();
        let v = m * (self.eta / 6.0 * wc * wc);
        Ok(if t < 0.0 { v.conj() } else { v })
    }

    /// Lineshape function g(t) = (1/πħ)∫dω 𝒥/ω² [coth(1 − cos ωt) + i(sin ωt − ωt)].
    pub fn lineshape_g(&self, t: f64) -> Result<Complex64> {
        if t < 0.0 {
            return Err(Error::domain(format!("lineshape_g needs t >= 0, got {t}")));
        }
        let phi0 = self.phi(0.0)?;
        let phi = self.phi(t)?;
        Ok(phi0 - phi - Complex64::new(0.0, self.reorganization_energy() * t / HBAR))
    }

    /// Thermal expectation of the site displacement operator,
    /// w = exp[−(1/2πħ)∫dω (𝒥/ω²) coth(βħω/2)].
    pub fn dressing(&self) -> Result<f64> {
        Ok((-0.5 * self.phi(0.0)?.re).exp())
    }
}

/// Product of donor and acceptor dressing factors, w = w_D·w_A ∈ (0, 1].
///
/// The super-Ohmic 𝒥/ω² is integrable at ω → 0, so the result is always
/// finite for the baths representable by [`SiteBath`].
pub fn polaron_dressing(bath: &BathSpec) -> Result<f64> {
    Ok(bath.donor().dressing()? * bath.acceptor().dressing()?)
}

/// φ(t) and φ′(t) of one site tabulated on t_k = k·h.
#[derive(Debug, Clone)]
pub struct BathTable {
    pub site: SiteBath,
    pub h: f64,
    pub phi: Vec<Complex64>,
    pub phi_dot: Vec<Complex64>,
}

impl BathTable {
    /// Tabulates on [0, horizon]. Rows are computed in parallel chunks; the
    /// result does not depend on the number of worker threads.
    pub fn build(site: SiteBath, h: f64, horizon: f64) -> Result<Self> {
        if !(h > 0.0) || !(horizon > h) {
            return Err(Error::domain("bath table needs 0 < h < horizon"));
        }
        let n = (horizon / h).round() as usize + 1;
        const CHUNK: usize = 128;
        let chunks: Vec<usize> = (0..n).step_by(CHUNK).collect();
        let kappa = site.kappa();
        let wc = site.cutoff_rate();
        let pref = site.eta / 6.0;
        let parts: Vec<(Vec<Complex64>, Vec<Complex64>)> = chunks
            .par_iter()
            .map(|&k0| {
                let k1 = (k0 + CHUNK).min(n);
                let len = k1 - k0;
                let a0 = wc * h * k0 as f64;
                let da = wc * h;
                let a_max = wc * h * (k1 - 1) as f64;
                let (nodes, weights) = composite_nodes(0.0, X_MAX, panels_for(a_max));
                let mut phi = vec![Complex64::default(); len];
                let mut dphi = vec![Complex64::default(); len];
                for (&x, &w) in nodes.iter().zip(&weights) {
                    let e = w * (-x).exp();
                    let re_amp = e * x_coth(x, kappa);
                    let im_amp = e * x;
                    let mut z = Complex64::from_polar(1.0, a0 * x);
                    let r = Complex64::from_polar(1.0, da * x);
                    for j in 0..len {
                        // z = e^{i a x}
                        phi[j] += Complex64::new(re_amp * z.re, -im_amp * z.im);
                        dphi[j] += Complex64::new(-re_amp * x * z.im, -im_amp * x * z.re);
                        z *= r;
                    }
                }
                for v in &mut phi {
                    *v *= pref;
                }
                for v in &mut dphi {
                    *v *= pref * wc;
                }
                (phi, dphi)
            })
            .collect();
        let mut phi = Vec::with_capacity(n);
        let mut phi_dot = Vec::with_capacity(n);
        for (p, d) in parts {
            phi.extend(p);
            phi_dot.extend(d);
        }
        Ok(Self {
            site,
            h,
            phi,
            phi_dot,
        })
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.h * (self.len() - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.h * k as f64
    }

    /// w_j = e^{−φ(0)/2}.
    pub fn dressing(&self) -> f64 {
        (-0.5 * self.phi[0].re).exp()
    }

    /// χ(t) = −2 Im φ(t): the phase acquired by the displacement operator of
    /// a bath released from the ground-state equilibrium.
    pub fn chi(&self) -> Vec<f64> {
        self.phi.iter().map(|p| -2.0 * p.im).collect()
    }

    pub fn lineshape_table(&self, site: Site) -> LineshapeTable {
        let lam = self.site.reorganization_energy();
        let phi0 = self.phi[0];
        let t_grid: Vec<f64> = (0..self.len()).map(|k| self.time(k)).collect();
        let g_values = self
            .phi
            .iter()
            .zip(&t_grid)
            .map(|(p, &t)| phi0 - p - Complex64::new(0.0, lam * t / HBAR))
            .collect();
        LineshapeTable {
            t_grid,
            g_values,
            site,
            temperature: self.site.temperature,
        }
    }
}

/// Sampled g(t) of one site.
#[derive(Debug, Clone)]
pub struct LineshapeTable {
    pub t_grid: Vec<f64>,
    pub g_values: Vec<Complex64>,
    pub site: Site,
    pub temperature: f64,
}

impl LineshapeTable {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# lineshape g(t) site={} temperature_K={}", self.site.tag(), self.temperature)?;
        writeln!(w, "t_fs,re,im")?;
        for (t, g) in self.t_grid.iter().zip(&self.g_values) {
            writeln!(w, "{},{},{}", t, g.re, g.im)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    DonorEmission,
    AcceptorAbsorption,
}

/// Sharp zero-phonon line carried separately from the sampled sideband.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroPhononLine {
    /// cm⁻¹.
    pub position: f64,
    pub weight: f64,
}

/// Normalized lineshape density on an energy grid (values in 1/cm⁻¹) plus an
/// optional zero-phonon delta line. Sideband integral + ZPL weight = 1.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    pub omega_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub kind: SpectrumKind,
    pub zero_phonon: Option<ZeroPhononLine>,
}

impl SpectrumTable {
    /// Builds a table from raw samples on a uniform grid, normalizing to unit
    /// area. Returns the table and the raw integral.
    pub fn from_samples(omega_grid: Vec<f64>, values: Vec<f64>, kind: SpectrumKind) -> Result<(Self, f64)> {
        if omega_grid.len() != values.len() || omega_grid.len() < 2 {
            return Err(Error::domain("spectrum needs >= 2 samples of matching length"));
        }
        let h = omega_grid[1] - omega_grid[0];
        if !(h > 0.0) {
            return Err(Error::domain("spectrum grid must be strictly increasing"));
        }
        for pair in omega_grid.windows(2) {
            if ((pair[1] - pair[0]) - h).abs() > 1e-6 * h {
                return Err(Error::domain("spectrum grid must be uniform"));
            }
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::domain("spectrum values must be finite and nonnegative"));
        }
        let raw = trapezoid(&values, h);
        if !(raw > 0.0) {
            return Err(Error::domain("spectrum has zero area"));
        }
        let values = values.into_iter().map(|v| v / raw).collect();
        Ok((
            Self {
                omega_grid,
                values,
                kind,
                zero_phonon: None,
            },
            raw,
        ))
    }

    pub fn spacing(&self) -> f64 {
        self.omega_grid[1] - self.omega_grid[0]
    }

    /// Sideband area + ZPL weight.
    pub fn total_weight(&self) -> f64 {
        trapezoid(&self.values, self.spacing()) + self.zero_phonon.map_or(0.0, |z| z.weight)
    }

    /// First moment ∫ε ρ(ε) dε including the zero-phonon line.
    pub fn first_moment(&self) -> f64 {
        let weighted: Vec<f64> = self
            .omega_grid
            .iter()
            .zip(&self.values)
            .map(|(e, v)| e * v)
            .collect();
        trapezoid(&weighted, self.spacing()) + self.zero_phonon.map_or(0.0, |z| z.weight * z.position)
    }

    /// Integral of ρ(ε)·f(ε) including the zero-phonon line.
    pub fn integrate_with<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let weighted: Vec<f64> = self
            .omega_grid
            .iter()
            .zip(&self.values)
            .map(|(&e, v)| f(e) * v)
            .collect();
        trapezoid(&weighted, self.spacing()) + self.zero_phonon.map_or(0.0, |z| z.weight * f(z.position))
    }

    /// Sideband density at ε by cubic interpolation, zero outside the grid.
    pub fn sideband_at(&self, e: f64) -> f64 {
        let n = self.omega_grid.len();
        let h = self.spacing();
        let x = (e - self.omega_grid[0]) / h;
        if x < 0.0 || x > (n - 1) as f64 {
            return 0.0;
        }
        let i = (x.floor() as usize).min(n - 2);
        let s = x - i as f64;
        let get = |k: isize| -> f64 {
            if k < 0 || k as usize >= n {
                0.0
            } else {
                self.values[k as usize]
            }
        };
        let (p0, p1, p2, p3) = (get(i as isize - 1), get(i as isize), get(i as isize + 1), get(i as isize + 2));
        // Catmull–Rom
        let v = p1
            + 0.5 * s * (p2 - p0 + s * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + s * (3.0 * (p1 - p2) + p3 - p0)));
        v.max(0.0)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let kind = match self.kind {
            SpectrumKind::DonorEmission => "donor-emission",
            SpectrumKind::AcceptorAbsorption => "acceptor-absorption",
        };
        match self.zero_phonon {
            Some(z) => writeln!(w, "# spectrum kind={kind} zpl_position_cm1={} zpl_weight={}", z.position, z.weight)?,
            None => writeln!(w, "# spectrum kind={kind}")?,
        }
        writeln!(w, "omega_cm1,re,im")?;
        for (e, v) in self.omega_grid.iter().zip(&self.values) {
            writeln!(w, "{},{},0", e, v)?;
        }
        Ok(())
    }
}

/// Grid and horizon controls for lineshape generation.
#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    /// Grid spacing in units of ħω_c.
    pub spacing_over_wc: f64,
    /// Half width of the grid around the zero-phonon position, in units of ħω_c.
    pub half_width_over_wc: f64,
    /// Extra half width in units of k_BT (anti-Stokes side).
    pub thermal_widths: f64,
    /// Time step of the underlying φ table, fs.
    pub dt: f64,
    /// Horizon of the φ table, fs.
    pub horizon: f64,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            spacing_over_wc: 0.01,
            half_width_over_wc: 30.0,
            thermal_widths: 30.0,
            dt: 0.25,
            horizon: 4000.0,
        }
    }
}

fn lineshape_from_table(table: &BathTable, energy: f64, kind: SpectrumKind, opts: &SpectrumOptions) -> Result<SpectrumTable> {
    let site = table.site;
    if site.eta == 0.0 {
        return Err(Error::DegenerateLineshape(
            "eta = 0 gives a bare delta line at the site energy".into(),
        ));
    }
    let lam = site.reorganization_energy();
    let w2 = (-table.phi[0].re).exp();
    let e0 = energy - lam;
    // sideband kernel e^{φ} − 1 (absorption) or e^{φ*} − 1 (emission)
    let (vals, ders): (Vec<Complex64>, Vec<Complex64>) = table
        .phi
        .iter()
        .zip(&table.phi_dot)
        .map(|(p, d)| {
            let (p, d) = match kind {
                SpectrumKind::AcceptorAbsorption => (*p, *d),
                SpectrumKind::DonorEmission => (p.conj(), d.conj()),
            };
            let e = p.exp();
            (e - 1.0, e * d)
        })
        .unzip();
    let de = opts.spacing_over_wc * site.omega_c;
    let kt = crate::model::constants::KB * site.temperature;
    let half = opts.half_width_over_wc * site.omega_c + opts.thermal_widths * kt;
    let m = (half / de).ceil() as i64;
    let grid: Vec<f64> = (-m..=m).map(|k| e0 + k as f64 * de).collect();
    let pref = w2 / (std::f64::consts::PI * HBAR);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&e| {
            // ∫₀^∞ e^{i(ε−ε₀)t/ħ} f(t) dt, i.e. ν = −(ε−ε₀)/ħ in the e^{−iνt} convention
            let nu = -(e - e0) / HBAR;
            (pref * filon_integral(&vals, &ders, table.h, nu).re).max(0.0)
        })
        .collect();
    Ok(SpectrumTable {
        omega_grid: grid,
        values,
        kind,
        zero_phonon: Some(ZeroPhononLine { position: e0, weight: w2 }),
    })
}

/// Donor emission lineshape L(ω) ∝ ∫dt e^{i(ω−E_D/ħ+2λ_D/ħ)t − g_D*(t)},
/// normalized per cm⁻¹.
pub fn donor_emission_lineshape(bath: &SiteBath, e_d: f64, opts: &SpectrumOptions) -> Result<SpectrumTable> {
    if bath.eta == 0.0 {
        return Err(Error::DegenerateLineshape(
            "eta = 0 gives a bare delta line at the site energy".into(),
        ));
    }
    let table = BathTable::build(*bath, opts.dt, opts.horizon)?;
    lineshape_from_table(&table, e_d, SpectrumKind::DonorEmission, opts)
}

/// Acceptor absorption lineshape I(ω) ∝ ∫dt e^{i(ω−E_A/ħ)t − g_A(t)},
/// normalized per cm⁻¹.
pub fn acceptor_absorption_lineshape(bath: &SiteBath, e_a: f64, opts: &SpectrumOptions) -> Result<SpectrumTable> {
    if bath.eta == 0.0 {
        return Err(Error::DegenerateLineshape(
            "eta = 0 gives a bare delta line at the site energy".into(),
        ));
    }
    let table = BathTable::build(*bath, opts.dt, opts.horizon)?;
    lineshape_from_table(&table, e_a, SpectrumKind::AcceptorAbsorption, opts)
}

/// Both spectra from prebuilt tables (avoids re-tabulating φ).
pub fn spectra_from_tables(
    donor: &BathTable,
    e_d: f64,
    acceptor: &BathTable,
    e_a: f64,
    opts: &SpectrumOptions,
) -> Result<(SpectrumTable, SpectrumTable)> {
    Ok((
        lineshape_from_table(donor, e_d, SpectrumKind::DonorEmission, opts)?,
        lineshape_from_table(acceptor, e_a, SpectrumKind::AcceptorAbsorption, opts)?,
    ))
}
