//! Oscillatory integrals with the Klein-Gordon phase `t sqrt(l^2 + kappa^2) - x l`.
//!
//! Compactly supported amplitudes are integrated on panels of at most a quarter
//! oscillation period. Symbol tails on `[lower, inf)` are handled in one of two ways:
//! an Abel taper `e^{-eps l}` with Richardson extrapolation in `eps`, or direct
//! marching to a cut-off followed by a two-term integration-by-parts remainder.

use crate::error::{Error, Result};
use num_complex::Complex64;
use once_cell::sync::Lazy;
use serde::Serialize;
use std::f64::consts::PI;

const GL_ORDER: usize = 15;

// Gauss-Legendre nodes and weights on [-1, 1] by Newton's method on P_15
static GAUSS: Lazy<([f64; GL_ORDER], [f64; GL_ORDER])> = Lazy::new(|| {
    let n = GL_ORDER;
    let mut x = [0.0; GL_ORDER];
    let mut w = [0.0; GL_ORDER];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
});

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre() -> (&'static [f64; GL_ORDER], &'static [f64; GL_ORDER]) {
    (&GAUSS.0, &GAUSS.1)
}

/// Phase `t phi(l)` with `phi(l) = sqrt(l^2 + kappa^2) - (x/t) l`.
///
/// Stores `x` rather than the ratio so that `t = 0` is representable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseSpec {
    pub kappa: f64,
    pub t: f64,
    pub x: f64,
}

impl PhaseSpec {
    pub fn new(kappa: f64, t: f64, x: f64) -> Result<Self> {
        if !(kappa > 0.0) || !t.is_finite() || !x.is_finite() {
            return Err(Error::InvalidParam(format!("phase (kappa, t, x) = ({kappa}, {t}, {x})")));
        }
        Ok(Self { kappa, t, x })
    }

    /// `x/t`, undefined at `t = 0`.
    pub fn ratio(&self) -> Option<f64> {
        (self.t != 0.0).then(|| self.x / self.t)
    }

    pub fn value(&self, l: f64) -> f64 {
        self.t * l.hypot(self.kappa) - self.x * l
    }

    pub fn derivative(&self, l: f64) -> f64 {
        self.t * l / l.hypot(self.kappa) - self.x
    }

    pub fn second_derivative(&self, l: f64) -> f64 {
        self.t * phase_second_derivative(self.kappa, l)
    }

    /// Limit of the derivative as `l -> inf`.
    pub fn asymptotic_frequency(&self) -> f64 {
        self.t - self.x
    }
}

/// `phi''(l) = kappa^2 (l^2 + kappa^2)^{-3/2}`.
pub fn phase_second_derivative(kappa: f64, l: f64) -> f64 {
    kappa * kappa / (l * l + kappa * kappa).powf(1.5)
}

/// The unique zero of `phi'`, `kappa (x/t) (1 - x^2/t^2)^{-1/2}`.
pub fn stationary_point(kappa: f64, x: f64, t: f64) -> Result<f64> {
    if !(x.abs() < t.abs()) {
        return Err(Error::Domain(format!("stationary point needs |x| < |t|, got x = {x}, t = {t}")));
    }
    let q = x / t;
    Ok(kappa * q / (1.0 - q * q).sqrt())
}

/// Minimum of `|phi'(l)|` over `|l| >= kappa` for `|x/t| = ratio`.
pub fn min_phase_slope_off_core(ratio: f64) -> f64 {
    // phi' = l/sqrt(l^2+kappa^2) - ratio is monotone, extremes at |l| = kappa
    (std::f64::consts::FRAC_1_SQRT_2 - ratio.abs()).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Integral {
    pub value: Complex64,
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadOptions {
    /// Relative tolerance against `int |a|`.
    pub tol: f64,
    /// Extra oscillation frequency carried by the amplitude itself.
    pub amp_freq: f64,
    /// Largest panel width regardless of oscillation.
    pub max_width: f64,
    pub max_doublings: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { tol: 1e-10, amp_freq: 0.0, max_width: 0.25, max_doublings: 4 }
    }
}

fn panel_sum<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let (x, w) = gauss_legendre();
    let m = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for i in 0..GL_ORDER {
        let v = f(m + h * x[i]);
        s += v * w[i];
        abs += v.norm() * w[i];
    }
    (s * h, abs * h)
}

fn split_points(lo: f64, hi: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut pts = vec![lo];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&b| b > lo && b < hi).collect();
    inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
    inner.dedup();
    pts.extend(inner);
    pts.push(hi);
    pts
}

/// `int_lo^hi a(l) e^{i t phi(l)} dl` for an amplitude supported in `[lo, hi]`.
///
/// Panels are aligned with `breakpoints` and are at most a quarter period wide,
/// using `max |t phi'| <= |t| + |x|`; the error estimate compares the panel
/// count `m` with `2m`, doubling further until `tol * int |a|` is met.
pub fn integrate_compact<F>(amp: F, lo: f64, hi: f64, breakpoints: &[f64], phase: &PhaseSpec, opts: &QuadOptions) -> Result<Integral>
where
    F: Fn(f64) -> Complex64,
{
    if !(hi >= lo) {
        return Err(Error::InvalidParam(format!("support [{lo}, {hi}]")));
    }
    if hi == lo {
        return Ok(Integral { value: Complex64::new(0.0, 0.0), err: 0.0 });
    }
    let f = |l: f64| amp(l) * Complex64::from_polar(1.0, phase.value(l));
    let freq = phase.t.abs() + phase.x.abs() + opts.amp_freq;
    let width = if freq > 0.0 { (PI / (2.0 * freq)).min(opts.max_width) } else { opts.max_width };
    let pts = split_points(lo, hi, breakpoints);
    let counts: Vec<usize> = pts.windows(2).map(|s| ((s[1] - s[0]) / width).ceil().max(1.0) as usize).collect();
    let run = |mult: usize| -> (Complex64, f64) {
        let mut s = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        for (seg, &m) in pts.windows(2).zip(&counts) {
            let m = m * mult;
            let h = (seg[1] - seg[0]) / m as f64;
            for k in 0..m {
                let a = seg[0] + h * k as f64;
                let b = if k + 1 == m { seg[1] } else { a + h };
                let (v, av) = panel_sum(&f, a, b);
                s += v;
                abs += av;
            }
        }
        (s, abs)
    };
    let (mut coarse, _) = run(1);
    let mut mult = 2;
    for _ in 0..=opts.max_doublings {
        let (fine, abs) = run(mult);
        let err = (fine - coarse).norm();
        let target = opts.tol * abs.max(f64::MIN_POSITIVE);
        if err <= target || abs == 0.0 {
            return Ok(Integral { value: fine, err });
        }
        coarse = fine;
        mult *= 2;
    }
    let (fine, abs) = run(mult);
    Err(Error::ToleranceNotMet { err: (fine - coarse).norm(), target: opts.tol * abs })
}

/// Description of a symbol amplitude on `[lower, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolSpec {
    pub lower: f64,
    /// Real part of the symbol order: `|a(l)| ~ l^order`.
    pub order: f64,
    pub breakpoints: Vec<f64>,
    /// Oscillation frequency hidden in the amplitude (zero for a genuine symbol).
    pub amp_freq: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailOptions {
    pub tol: f64,
    pub max_panels: usize,
}

impl Default for TailOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_panels: 4_000_000 }
    }
}

/// Halving taper sequence used by the Richardson scheme, before frequency scaling.
pub const TAPER_SEQUENCE: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

struct Marcher<'a> {
    phase: &'a PhaseSpec,
    amp_freq: f64,
    breaks: Vec<f64>,
}

impl Marcher<'_> {
    fn width(&self, a: f64, cap: f64) -> f64 {
        let smooth = (0.2 * a.abs()).max(0.5).min(cap);
        let mut h = smooth;
        for _ in 0..3 {
            let w = self.phase.derivative(a).abs().max(self.phase.derivative(a + h).abs()) + self.amp_freq;
            if w > 0.0 {
                h = smooth.min(PI / (2.0 * w));
            }
        }
        h
    }

    fn next(&self, a: f64, cap: f64) -> f64 {
        let mut b = a + self.width(a, cap);
        if let Some(&bp) = self.breaks.iter().find(|&&bp| bp > a) {
            if bp < b {
                b = bp;
            }
        }
        b
    }

    fn past_breaks(&self, b: f64) -> bool {
        self.breaks.last().map_or(true, |&l| b >= l)
    }
}

/// `int_lower^inf a(l) e^{i t phi(l)} dl` for a symbol amplitude.
///
/// With `taper_eps > 0` the Abel-regularized values at `eps_j = taper_eps 2^{-j} s`
/// (`j = 0..3`, `s = min(1, |omega|/8)` with `omega` the smallest asymptotic frequency)
/// are extrapolated to `eps = 0` by a Richardson tableau of order two; the last
/// increment is the error proxy. With `taper_eps = 0` the integral is marched to a
/// cut-off and the remainder is replaced by two integration-by-parts terms, which
/// requires a non-oscillatory amplitude (`amp_freq = 0`).
pub fn integrate_symbol_tail<F>(amp: F, sym: &SymbolSpec, phase: &PhaseSpec, taper_eps: f64, opts: &TailOptions) -> Result<Integral>
where
    F: Fn(f64) -> Complex64,
{
    if taper_eps < 0.0 || !taper_eps.is_finite() {
        return Err(Error::InvalidParam(format!("taper eps = {taper_eps}")));
    }
    let mut breaks: Vec<f64> = sym.breakpoints.iter().copied().filter(|&b| b > sym.lower).collect();
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = Marcher { phase, amp_freq: sym.amp_freq, breaks };
    if taper_eps > 0.0 {
        tail_taper(&amp, sym, phase, taper_eps, opts, &m)
    } else {
        if sym.amp_freq != 0.0 {
            return Err(Error::InvalidParam("untapered tails need a non-oscillatory amplitude".into()));
        }
        tail_asymptotic(&amp, sym, phase, opts, &m)
    }
}

fn tail_asymptotic<F>(amp: &F, sym: &SymbolSpec, phase: &PhaseSpec, opts: &TailOptions, m: &Marcher) -> Result<Integral>
where
    F: Fn(f64) -> Complex64,
{
    let f = |l: f64| amp(l) * Complex64::from_polar(1.0, phase.value(l));
    let d = sym.order;
    let mut a = sym.lower;
    let mut fine = Complex64::new(0.0, 0.0);
    let mut coarse = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let mut panels = 0usize;
    loop {
        let b = m.next(a, f64::INFINITY);
        let mid = 0.5 * (a + b);
        let (c1, abs) = panel_sum(&f, a, b);
        let (h1, _) = panel_sum(&f, a, mid);
        let (h2, _) = panel_sum(&f, mid, b);
        coarse += c1;
        fine += h1 + h2;
        scale += abs;
        panels += 1;
        a = b;
        if !m.past_breaks(b) {
            continue;
        }
        let ab = amp(b);
        let target = 0.1 * opts.tol * scale.max(f64::MIN_POSITIVE);
        let w = phase.derivative(b);
        let beta = w.abs() * b;
        if ab.norm() == 0.0 && d < -1.0 {
            return Ok(Integral { value: fine, err: (fine - coarse).norm() });
        }
        if beta >= 20.0 {
            let rem = ab.norm() * (1.0 + d.abs()) * (2.0 + d.abs()) / (b * b * w.abs().powi(3));
            if rem <= target {
                // tail = e^{i theta} (i a/theta' - (a/theta')'/theta') at the cut-off
                let db = 1e-3 * b;
                let da = (amp(b + db) - amp(b - db)) / (2.0 * db);
                let w2 = phase.second_derivative(b);
                let g = da / w - ab * (w2 / (w * w));
                let tail = Complex64::from_polar(1.0, phase.value(b)) * (Complex64::i() * ab / w - g / w);
                return Ok(Integral { value: fine + tail, err: (fine - coarse).norm() + rem });
            }
        } else if d < -1.0 {
            let rem = ab.norm() * b / (-d - 1.0);
            if rem <= target {
                return Ok(Integral { value: fine, err: (fine - coarse).norm() + rem });
            }
        }
        if panels > opts.max_panels {
            return Err(Error::NonConvergence { what: "symbol tail marching", cap: opts.max_panels });
        }
    }
}

fn tail_taper<F>(amp: &F, sym: &SymbolSpec, phase: &PhaseSpec, taper_eps: f64, opts: &TailOptions, m: &Marcher) -> Result<Integral>
where
    F: Fn(f64) -> Complex64,
{
    let w0 = phase.asymptotic_frequency();
    let omega = (w0 - sym.amp_freq).abs().min((w0 + sym.amp_freq).abs());
    let s = (omega / 8.0).clamp(1e-4, 1.0);
    let eps: Vec<f64> = (0..4).map(|j| taper_eps * s / f64::powi(2.0, j)).collect();
    let eps_min = eps[3];
    let end = sym.lower + 36.0 / eps_min;
    let (x, wgl) = gauss_legendre();
    let mut fine = [Complex64::new(0.0, 0.0); 4];
    let mut coarse = [Complex64::new(0.0, 0.0); 4];
    let mut scale = 0.0;
    let scale_end = 4.0 * sym.lower.abs() + 4.0;
    let mut a = sym.lower;
    let mut panels = 0usize;
    // one amplitude evaluation per node feeds all four tapers
    let acc = |lo: f64, hi: f64, out: &mut [Complex64; 4]| -> f64 {
        let mid = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let mut abs = 0.0;
        for i in 0..GL_ORDER {
            let l = mid + h * x[i];
            let v = amp(l) * Complex64::from_polar(1.0, phase.value(l)) * (wgl[i] * h);
            abs += v.norm();
            let q = (-eps_min * (l - sym.lower)).exp();
            let q2 = q * q;
            let q4 = q2 * q2;
            out[3] += v * q;
            out[2] += v * q2;
            out[1] += v * q4;
            out[0] += v * (q4 * q4);
        }
        abs
    };
    while a < end {
        let b = m.next(a, 0.5 / eps_min).min(end);
        let mid = 0.5 * (a + b);
        let abs = acc(a, b, &mut coarse);
        acc(a, mid, &mut fine);
        acc(mid, b, &mut fine);
        if a < scale_end {
            scale += abs;
        }
        a = b;
        panels += 1;
        if panels > opts.max_panels {
            return Err(Error::NonConvergence { what: "tapered tail", cap: opts.max_panels });
        }
    }
    // taper measured from `lower`: same eps -> 0 limit as e^{-eps l}
    let quad_err = (0..4).map(|j| (fine[j] - coarse[j]).norm()).fold(0.0, f64::max);
    let mut t = [[Complex64::new(0.0, 0.0); 3]; 4];
    for i in 0..4 {
        t[i][0] = fine[i];
    }
    for j in 1..3 {
        let f = f64::powi(2.0, j as i32) - 1.0;
        for i in j..4 {
            t[i][j] = t[i][j - 1] + (t[i][j - 1] - t[i - 1][j - 1]) / f;
        }
    }
    let noise = 10.0 * opts.tol * scale.max(f64::MIN_POSITIVE) + 10.0 * quad_err;
    let d: Vec<f64> = (1..4).map(|i| (t[i][0] - t[i - 1][0]).norm()).collect();
    if (d[1] > d[0] && d[1] > noise) || (d[2] > d[1] && d[2] > noise) {
        return Err(Error::Extrapolation(format!("increments {:.3e}, {:.3e}, {:.3e}", d[0], d[1], d[2])));
    }
    let value = t[3][2];
    let err = (t[3][2] - t[2][2]).norm() + quad_err;
    Ok(Integral { value, err })
}

/// Least-squares fit of `log value` against `log t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub abscissae: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
}

pub fn fit_decay(abscissae: &[f64], values: &[f64]) -> Result<DecayFit> {
    if abscissae.len() != values.len() || abscissae.len() < 4 {
        return Err(Error::Degenerate(format!("need at least 4 paired samples, got {}", abscissae.len().min(values.len()))));
    }
    if abscissae.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Degenerate("abscissae must be strictly increasing".into()));
    }
    if values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) || abscissae[0] <= 0.0 {
        return Err(Error::Degenerate("values and abscissae must be positive".into()));
    }
    let xs: Vec<f64> = abscissae.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("zero variance in log t".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let slope_stderr = (ssr / (k - 2.0) / sxx).sqrt();
    Ok(DecayFit { abscissae: abscissae.to_vec(), values: values.to_vec(), slope, slope_stderr, intercept })
}

/// Quintic smoothstep `10u^3 - 15u^4 + 6u^5` clamped to `[0, 1]`.
pub fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
}

/// Window equal to one on `[-inner, inner]`, zero outside `[-outer, outer]`.
pub fn window(l: f64, inner: f64, outer: f64) -> f64 {
    1.0 - smoothstep((l.abs() - inner) / (outer - inner))
}
