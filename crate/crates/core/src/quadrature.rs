//! Quadrature helpers: Gauss–Legendre panels, uniform-grid rules, an
//! oscillation-exact Hermite–Filon rule and FFT-based causal convolution.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::sync::OnceLock;

/// Gauss–Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Cached 16-point rule.
pub fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// ∫_a^b f with `panels` equal 16-point Gauss–Legendre panels.
pub fn composite_gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gl16();
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(w) {
            s += wi * f(mid + 0.5 * h * xi);
        }
        total += 0.5 * h * s;
    }
    total
}

/// Nodes and weights of a composite 16-point rule on [a, b].
pub fn composite_nodes(a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gl16();
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * 16);
    let mut weights = Vec::with_capacity(panels * 16);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(w) {
            nodes.push(mid + 0.5 * h * xi);
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

/// Trapezoid rule for uniformly spaced samples.
pub fn trapezoid<T>(values: &[T], h: f64) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
{
    match values.len() {
        0 | 1 => T::default(),
        n => {
            let mut s = (values[0] + values[n - 1]) * 0.5;
            for v in &values[1..n - 1] {
                s = s + *v;
            }
            s * h
        }
    }
}

/// Composite Simpson rule for uniformly spaced samples; an odd number of
/// intervals closes with Simpson's 3/8 rule on the last three.
pub fn simpson<T>(values: &[T], h: f64) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
{
    let n = values.len();
    if n < 3 {
        return trapezoid(values, h);
    }
    let intervals = n - 1;
    let (even_end, tail) = if intervals % 2 == 0 {
        (n - 1, false)
    } else if intervals >= 3 {
        (n - 4, true)
    } else {
        return trapezoid(values, h);
    };
    let mut s = T::default();
    let mut i = 0;
    while i + 2 <= even_end {
        s = s + (values[i] + values[i + 1] * 4.0 + values[i + 2]) * (h / 3.0);
        i += 2;
    }
    if tail {
        let k = n - 4;
        s = s + (values[k] + values[k + 1] * 3.0 + values[k + 2] * 3.0 + values[k + 3])
            * (3.0 * h / 8.0);
    }
    s
}

/// Interval weights for ∫₀^h p(u) e^{−iνu} du where p is the cubic Hermite
/// interpolant of (f₀, f₀′, f₁, f₁′). Exact in ν, so grids only need to
/// resolve the smooth factor.
#[derive(Debug, Clone, Copy)]
pub struct HermiteFilon {
    pub f0: Complex64,
    pub d0: Complex64,
    pub f1: Complex64,
    pub d1: Complex64,
}

impl HermiteFilon {
    pub fn new(nu: f64, h: f64) -> Self {
        let (x, w) = gl16();
        let mut out = HermiteFilon {
            f0: Complex64::default(),
            d0: Complex64::default(),
            f1: Complex64::default(),
            d1: Complex64::default(),
        };
        // 16 points integrate degree-31 polynomials; the phase over one
        // interval is small for every grid used here (|ν|h ≲ 2).
        let sub = 1 + ((nu * h).abs() / 2.0).ceil() as usize;
        let hs = h / sub as f64;
        for k in 0..sub {
            for (xi, wi) in x.iter().zip(w) {
                let u = (k as f64 + 0.5 * (xi + 1.0)) * hs;
                let s = u / h;
                let e = Complex64::from_polar(0.5 * hs * wi, -nu * u);
                let s2 = s * s;
                let s3 = s2 * s;
                out.f0 += e * (2.0 * s3 - 3.0 * s2 + 1.0);
                out.d0 += e * (h * (s3 - 2.0 * s2 + s));
                out.f1 += e * (-2.0 * s3 + 3.0 * s2);
                out.d1 += e * (h * (s3 - s2));
            }
        }
        out
    }
}

/// Running integral F_k = ∫₀^{t_k} f(s) e^{−iνs} ds on the uniform grid t_k = k h,
/// from samples of f and f′.
pub fn cumulative_filon(values: &[Complex64], derivs: &[Complex64], h: f64, nu: f64) -> Vec<Complex64> {
    assert_eq!(values.len(), derivs.len());
    let n = values.len();
    let mut out = vec![Complex64::default(); n];
    if n == 0 {
        return out;
    }
    let w = HermiteFilon::new(nu, h);
    let step = Complex64::from_polar(1.0, -nu * h);
    let mut phase = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::default();
    for k in 0..n - 1 {
        if k % 256 == 0 {
            phase = Complex64::from_polar(1.0, -nu * h * k as f64);
        }
        let piece = w.f0 * values[k] + w.d0 * derivs[k] + w.f1 * values[k + 1] + w.d1 * derivs[k + 1];
        acc += phase * piece;
        out[k + 1] = acc;
        phase *= step;
    }
    out
}

/// ∫₀^∞ f(s) e^{−iνs} ds for a sampled f that is negligible past the last sample.
pub fn filon_integral(values: &[Complex64], derivs: &[Complex64], h: f64, nu: f64) -> Complex64 {
    let w = HermiteFilon::new(nu, h);
    let step = Complex64::from_polar(1.0, -nu * h);
    let mut phase = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::default();
    for k in 0..values.len().saturating_sub(1) {
        if k % 256 == 0 {
            phase = Complex64::from_polar(1.0, -nu * h * k as f64);
        }
        acc += phase
            * (w.f0 * values[k] + w.d0 * derivs[k] + w.f1 * values[k + 1] + w.d1 * derivs[k + 1]);
        phase *= step;
    }
    acc
}

/// Causal convolution (a ⋆ b)_k = ∫₀^{t_k} a(s) b(t_k − s) ds by the
/// trapezoid rule, evaluated with FFTs.
pub fn causal_convolution(a: &[Complex64], b: &[Complex64], h: f64) -> Vec<Complex64> {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let size = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut fa = vec![Complex64::default(); size];
    let mut fb = vec![Complex64::default(); size];
    fa[..n].copy_from_slice(a);
    fb[..n].copy_from_slice(b);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    inv.process(&mut fa);
    let scale = h / size as f64;
    (0..n)
        .map(|k| {
            // full sum minus half of the two endpoint terms
            let ends = 0.5 * (a[0] * b[k] + a[k] * b[0]);
            if k == 0 {
                Complex64::default()
            } else {
                fa[k] * scale - ends * h
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = w.iter().sum();
        assert_relative_eq!(s, 2.0, max_relative = 1e-14);
        let s30: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert_relative_eq!(s30, 2.0 / 31.0, max_relative = 1e-12);
        let (x1, w1) = gauss_legendre(1);
        assert_eq!((x1[0], w1[0]), (0.0, 2.0));
    }

    #[test]
    fn uniform_rules() {
        let h = 0.01;
        let v: Vec<f64> = (0..=101).map(|k| (k as f64 * h).sin()).collect();
        let exact = 1.0 - (1.01f64).cos();
        assert_relative_eq!(simpson(&v, h), exact, max_relative = 1e-9);
        assert_relative_eq!(trapezoid(&v, h), exact, max_relative = 1e-4);
        let v2: Vec<f64> = (0..=100).map(|k| (k as f64 * h).sin()).collect();
        assert_relative_eq!(simpson(&v2, h), 1.0 - 1f64.cos(), max_relative = 1e-9);
    }

    #[test]
    fn filon_handles_fast_oscillation() {
        // ∫₀^∞ e^{−s} e^{−iνs} ds = 1/(1 + iν)
        let h = 0.05;
        let n = 1200;
        let vals: Vec<Complex64> = (0..n).map(|k| Complex64::new((-(k as f64) * h).exp(), 0.0)).collect();
        let ders: Vec<Complex64> = vals.iter().map(|v| -v).collect();
        for &nu in &[0.0, 3.0, 40.0, -25.0] {
            let got = filon_integral(&vals, &ders, h, nu);
            let exact = Complex64::new(1.0, 0.0) / Complex64::new(1.0, nu);
            assert!((got - exact).norm() < 1e-8 * exact.norm(), "nu={nu}: {got} vs {exact}");
        }
        let cum = cumulative_filon(&vals, &ders, h, 2.0);
        let t = (n - 1) as f64 * h;
        let exact = (Complex64::new(1.0, 0.0) - Complex64::new(-t, -2.0 * t).exp()) / Complex64::new(1.0, 2.0);
        assert!((cum[n - 1] - exact).norm() < 1e-8);
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let h = 0.1;
        let n = 300;
        let a: Vec<Complex64> = (0..n).map(|k| Complex64::new((-(k as f64) * h).exp(), 0.1)).collect();
        let b: Vec<Complex64> = (0..n).map(|k| Complex64::new(0.0, (k as f64 * h).sin())).collect();
        let conv = causal_convolution(&a, &b, h);
        for &k in &[0usize, 1, 7, 150, 299] {
            let seg: Vec<Complex64> = (0..=k).map(|j| a[j] * b[k - j]).collect();
            let direct = trapezoid(&seg, h);
            assert!((conv[k] - direct).norm() < 1e-10, "k={k}");
        }
    }
}
