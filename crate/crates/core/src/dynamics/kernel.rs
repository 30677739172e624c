use num_complex::Complex64;

use crate::bath::BathTable;
use crate::error::{Error, Result};
use crate::model::{BathSpec, Site};
use crate::quadrature::{causal_convolution, cumulative_filon};

/// Numerical controls shared by the FRET and CRET propagators.
#[derive(Debug, Clone, Copy)]
pub struct DynamicsOptions {
    /// Step of the bath and memory-kernel tables, fs.
    pub dt: f64,
    /// Memory horizon: tables run to this time and the generator is taken
    /// as stationary afterwards, fs.
    pub memory: f64,
    /// Spacing of the reported trajectory, fs.
    pub report_dt: f64,
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the integrator step, fs.
    pub h_max: f64,
}

impl Default for DynamicsOptions {
    fn default() -> Self {
        Self {
            dt: 0.25,
            memory: 4000.0,
            report_dt: 0.25,
            rtol: 1e-10,
            atol: 1e-12,
            h_max: 0.5,
        }
    }
}

/// Which connected correlation function of the polaron displacement
/// operators enters a memory integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correlation {
    /// c₊(s) = w²(e^{φ(s)} − 1)
    Plus,
    /// c₋(s) = w²(e^{−φ(s)} − 1)
    Minus,
}

/// Bath quantities of a donor/acceptor pair on the table grid, shared by
/// every coupling strength and energy gap with the same baths.
///
/// φ = φ_D + φ_A is the combined bath response, w² = e^{−Re φ(0)} the
/// squared pair dressing, and χ(t) = −2 Im φ_D(t) the phase that the
/// displacement operators pick up while the donor bath relaxes from the
/// ground-state equilibrium it started in. χ_A is the same phase for a
/// freshly excited acceptor.
#[derive(Debug, Clone)]
pub struct PairKernel {
    pub bath: BathSpec,
    pub h: f64,
    pub w2: f64,
    pub lambda_d: f64,
    pub lambda_a: f64,
    c_plus: Vec<Complex64>,
    c_plus_dot: Vec<Complex64>,
    c_minus: Vec<Complex64>,
    c_minus_dot: Vec<Complex64>,
    chi: Vec<f64>,
    chi_dot: Vec<f64>,
    chi_a: Vec<f64>,
    chi_a_dot: Vec<f64>,
}

impl PairKernel {
    pub fn build(bath: &BathSpec, opts: &DynamicsOptions) -> Result<Self> {
        if !(opts.memory > 10.0 * opts.dt) {
            return Err(Error::domain("memory horizon must span at least ten table steps"));
        }
        let donor = BathTable::build(bath.donor(), opts.dt, opts.memory)?;
        let acceptor = if bath.eta_a == bath.eta_d {
            donor.clone()
        } else {
            BathTable::build(bath.acceptor(), opts.dt, opts.memory)?
        };
        let n = donor.len();
        let phi: Vec<Complex64> = (0..n).map(|k| donor.phi[k] + acceptor.phi[k]).collect();
        let dphi: Vec<Complex64> = (0..n).map(|k| donor.phi_dot[k] + acceptor.phi_dot[k]).collect();
        let w2 = (-phi[0].re).exp();
        let mut c_plus = Vec::with_capacity(n);
        let mut c_plus_dot = Vec::with_capacity(n);
        let mut c_minus = Vec::with_capacity(n);
        let mut c_minus_dot = Vec::with_capacity(n);
        for k in 0..n {
            let ep = phi[k].exp();
            let em = (-phi[k]).exp();
            c_plus.push(w2 * (ep - 1.0));
            c_plus_dot.push(w2 * ep * dphi[k]);
            c_minus.push(w2 * (em - 1.0));
            c_minus_dot.push(-w2 * em * dphi[k]);
        }
        Ok(Self {
            bath: *bath,
            h: opts.dt,
            w2,
            lambda_d: bath.donor().reorganization_energy(),
            lambda_a: bath.acceptor().reorganization_energy(),
            c_plus,
            c_plus_dot,
            c_minus,
            c_minus_dot,
            chi: donor.phi.iter().map(|p| -2.0 * p.im).collect(),
            chi_dot: donor.phi_dot.iter().map(|p| -2.0 * p.im).collect(),
            chi_a: acceptor.phi.iter().map(|p| -2.0 * p.im).collect(),
            chi_a_dot: acceptor.phi_dot.iter().map(|p| -2.0 * p.im).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.chi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chi.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.h * (self.len() - 1) as f64
    }

    pub fn dressing(&self) -> f64 {
        self.w2.sqrt()
    }

    pub fn chi(&self) -> &[f64] {
        &self.chi
    }

    /// χ(t) by cubic interpolation; zero past the table.
    pub fn chi_at(&self, t: f64) -> f64 {
        if t >= self.horizon() {
            return 0.0;
        }
        interp_real(&self.chi, self.h, t)
    }

    fn correlation(&self, c: Correlation) -> (&[Complex64], &[Complex64]) {
        match c {
            Correlation::Plus => (&self.c_plus, &self.c_plus_dot),
            Correlation::Minus => (&self.c_minus, &self.c_minus_dot),
        }
    }

    /// I(t) = e^{iσ_out χ(t)} ∫₀^t c(s) e^{−iνs} e^{iσ_in χ(t−s)} ds on the
    /// table grid, together with the stationary value ∫₀^∞ c(s) e^{−iνs} ds.
    ///
    /// The χ-free part is a cumulative Hermite–Filon integral; the remainder
    /// ∫c(s)e^{−iνs}(e^{iσ_in χ(t−s)} − 1)ds is a causal FFT convolution with
    /// endpoint-corrected trapezoid weights. Past the table the algebraic
    /// tail c ∝ s⁻² of the super-Ohmic response is integrated analytically.
    pub fn memory_integral(&self, c: Correlation, sigma_out: f64, sigma_in: f64, nu: f64) -> MemoryIntegral {
        self.memory_integral_for(Site::Donor, c, sigma_out, sigma_in, nu)
    }

    /// [`memory_integral`](Self::memory_integral) with the relaxation phase
    /// of either site.
    pub fn memory_integral_for(&self, site: Site, c: Correlation, sigma_out: f64, sigma_in: f64, nu: f64) -> MemoryIntegral {
        let (chi, chi_dot) = match site {
            Site::Donor => (&self.chi, &self.chi_dot),
            Site::Acceptor => (&self.chi_a, &self.chi_a_dot),
        };
        let (vals, ders) = self.correlation(c);
        let h = self.h;
        let n = self.len();
        let cum = cumulative_filon(vals, ders, h, nu);
        let a: Vec<Complex64> = (0..n)
            .map(|k| vals[k] * Complex64::from_polar(1.0, -nu * h * k as f64))
            .collect();
        let b: Vec<Complex64> = chi
            .iter()
            .map(|&x| Complex64::from_polar(1.0, sigma_in * x) - 1.0)
            .collect();
        let conv = causal_convolution(&a, &b, h);
        // trapezoid end correction −h²/12·[f′(t) − f′(0)], f(s) = a(s)b(t−s)
        let a0 = a[0];
        let da0 = ders[0] - Complex64::new(0.0, nu) * vals[0];
        let db0 = Complex64::new(0.0, sigma_in * chi_dot[0]);
        let values = (0..n)
            .map(|k| {
                let bk = b[k];
                let dbk = Complex64::new(0.0, sigma_in * chi_dot[k]) * Complex64::from_polar(1.0, sigma_in * chi[k]);
                let f_end = -a[k] * db0;
                let f_start = da0 * bk - a0 * dbk;
                let corrected = if k == 0 { conv[0] } else { conv[k] - h * h / 12.0 * (f_end - f_start) };
                Complex64::from_polar(1.0, sigma_out * chi[k]) * (cum[k] + corrected)
            })
            .collect();
        let s = self.horizon();
        let tail = vals[n - 1] * s * tail_factor(nu * s);
        MemoryIntegral {
            h,
            values,
            stationary: cum[n - 1] + tail,
        }
    }
}

/// A memory integral tabulated on the kernel grid plus its t → ∞ value.
#[derive(Debug, Clone)]
pub struct MemoryIntegral {
    pub h: f64,
    pub values: Vec<Complex64>,
    pub stationary: Complex64,
}

impl MemoryIntegral {
    pub fn at(&self, t: f64) -> Complex64 {
        if t >= self.h * (self.values.len() - 1) as f64 {
            return self.stationary;
        }
        interp_complex(&self.values, self.h, t)
    }
}

/// Four-point Lagrange weights and base index for t on a grid of step h.
pub(crate) fn lagrange4(n: usize, h: f64, t: f64) -> (usize, [f64; 4]) {
    let x = (t / h).max(0.0);
    let i = (x.floor() as usize).clamp(1, n.saturating_sub(3).max(1));
    let s = x - i as f64;
    // nodes at −1, 0, 1, 2 relative to i
    let w = [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ];
    (i - 1, w)
}

pub(crate) fn interp_complex(v: &[Complex64], h: f64, t: f64) -> Complex64 {
    let (i, w) = lagrange4(v.len(), h, t);
    v[i] * w[0] + v[i + 1] * w[1] + v[i + 2] * w[2] + v[i + 3] * w[3]
}

pub(crate) fn interp_real(v: &[f64], h: f64, t: f64) -> f64 {
    let (i, w) = lagrange4(v.len(), h, t);
    v[i] * w[0] + v[i + 1] * w[1] + v[i + 2] * w[2] + v[i + 3] * w[3]
}

/// T(x) = ∫₁^∞ e^{−ixu} u⁻² du, so that ∫_S^∞ (S/s)² e^{−iνs} ds = S·T(νS).
pub(crate) fn tail_factor(x: f64) -> Complex64 {
    if x == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    if x.abs() >= 20.0 {
        // asymptotic series e^{−ix} Σ (−1)^k (k+1)!/(ix)^{k+1}
        let ix = Complex64::new(0.0, x);
        let mut term = 1.0 / ix;
        let mut sum = term;
        for k in 1..12 {
            term *= -(k as f64 + 1.0) / ix;
            sum += term;
        }
        return Complex64::from_polar(1.0, -x) * sum;
    }
    // E₂(ix) = e^{−ix} − ix E₁(ix), E₁(ix) = −Ci|x| + i sgn(x)(Si|x| − π/2)
    let y = x.abs();
    let (ci, si) = cos_sin_integrals(y);
    let e1 = Complex64::new(-ci, x.signum() * (si - std::f64::consts::FRAC_PI_2));
    Complex64::from_polar(1.0, -x) - Complex64::new(0.0, x) * e1
}

/// (Ci(x), Si(x)) by their power series, adequate for 0 < x ≤ 20.
fn cos_sin_integrals(x: f64) -> (f64, f64) {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let x2 = x * x;
    let mut ci = EULER_GAMMA + x.ln();
    let mut si = 0.0;
    // cos term: (−x²)^k/(2k·(2k)!), sin term: (−1)^k x^{2k+1}/((2k+1)(2k+1)!)
    let mut pc = 1.0; // (−x²)^k/(2k)!
    let mut ps = x; // (−1)^k x^{2k+1}/(2k+1)!
    si += ps;
    for k in 1..200 {
        let kk = k as f64;
        pc *= -x2 / ((2.0 * kk - 1.0) * (2.0 * kk));
        ps *= -x2 / ((2.0 * kk) * (2.0 * kk + 1.0));
        let tc = pc / (2.0 * kk);
        let ts = ps / (2.0 * kk + 1.0);
        ci += tc;
        si += ts;
        if tc.abs() < 1e-17 && ts.abs() < 1e-17 && kk > x {
            break;
        }
    }
    (ci, si)
}
