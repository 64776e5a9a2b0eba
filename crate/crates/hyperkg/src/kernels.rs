//! Wave kernels `w_t^0` and `w~_t^inf` of `D~^{-sigma} e^{itD}` with `D = sqrt(-Delta - rho^2 + kappa^2)`,
//! dispersive proxies built on them, and a radial spectral propagator.
//!
//! The spectral integrals are even in `lambda` and are evaluated on `[0, inf)` with a factor 2.
//! The low-frequency part is compactly supported. The high-frequency part is split, for `r` away
//! from zero, into the two Harish-Chandra halves `c(-l)^{-1} Phi_l` and `c(l)^{-1} Phi_{-l}`, whose
//! amplitudes are non-oscillating symbols with phases `t sqrt(l^2 + kappa^2) +- r l`.

use crate::error::{Error, Result};
use crate::oscillatory::{integrate_compact, integrate_symbol_tail, window, PhaseSpec, QuadOptions, SymbolSpec, TailOptions};
use crate::specfun::{c_inverse, hc_sum, phi_h3, phi_zero, plancherel_density, rgamma, spherical_phi_tol, ModelParams, COEFF_CAP};
use num_complex::Complex64;
use serde::Serialize;

/// Below this radius the Harish-Chandra halves are only used past `8 / tanh r`.
pub const HC_RADIUS: f64 = 0.25;
/// Truncation radius of Kunze-Stein integrals.
pub const KS_RMAX: f64 = 40.0;

/// Even partition of unity `chi_0 + chi_inf = 1`, switching on `[kappa, kappa + 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffPair {
    pub kappa: f64,
}

impl CutoffPair {
    pub fn chi0(&self, l: f64) -> f64 {
        window(l, self.kappa, self.kappa + 1.0)
    }
    pub fn chi_inf(&self, l: f64) -> f64 {
        1.0 - self.chi0(l)
    }
}

pub fn cutoffs(p: &ModelParams) -> CutoffPair {
    CutoffPair { kappa: p.kappa() }
}

/// Spectral weight `(l^2 + kappa^2)^{-sigma_d/2} (l^2 + kappa~^2)^{-sigma/2}`.
///
/// `sigma_d = 0` is the single-order case. With `analytic_family` the high-frequency
/// part carries `e^{s^2} / Gamma((n+1)/2 - s)` for the total order `s = sigma + sigma_d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaSpec {
    pub sigma: Complex64,
    pub sigma_d: Complex64,
    pub analytic_family: bool,
}

impl SigmaSpec {
    pub fn real(sigma: f64) -> Self {
        Self { sigma: Complex64::new(sigma, 0.0), sigma_d: Complex64::new(0.0, 0.0), analytic_family: false }
    }

    pub fn analytic(sigma: Complex64) -> Self {
        Self { sigma, sigma_d: Complex64::new(0.0, 0.0), analytic_family: true }
    }

    /// Orders `sigma_d` on `D` and `sigma` on `D~`.
    pub fn split(sigma_d: Complex64, sigma: Complex64, analytic_family: bool) -> Self {
        Self { sigma, sigma_d, analytic_family }
    }

    pub fn total(&self) -> Complex64 {
        self.sigma + self.sigma_d
    }

    pub fn validate(&self, p: &ModelParams) -> Result<()> {
        let re = self.total().re;
        let top = (p.n() as f64 + 1.0) / 2.0;
        if !re.is_finite() || !self.total().im.is_finite() {
            return Err(Error::InvalidParam("non-finite sigma".into()));
        }
        if self.analytic_family && !(0.0..=top).contains(&re) {
            return Err(Error::InvalidParam(format!("analytic family needs 0 <= Re sigma <= {top}, got {re}")));
        }
        Ok(())
    }

    fn weight(&self, p: &ModelParams, l: f64) -> Complex64 {
        let a = (l * l + p.kappa_tilde() * p.kappa_tilde()).ln();
        let b = (l * l + p.kappa() * p.kappa()).ln();
        (-(self.sigma * a + self.sigma_d * b) * 0.5).exp()
    }

    fn prefactor(&self, p: &ModelParams) -> Complex64 {
        if !self.analytic_family {
            return Complex64::new(1.0, 0.0);
        }
        let s = self.total();
        (s * s).exp() * rgamma(Complex64::new((p.n() as f64 + 1.0) / 2.0, 0.0) - s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSample {
    pub t: f64,
    pub r: f64,
    pub value: Complex64,
    pub err: f64,
}

/// How the high-frequency integral is organised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TailMethod {
    /// Harish-Chandra halves for `r >= HC_RADIUS` and past `8/tanh r` below it, untapered
    /// where the symbol allows, tapered otherwise.
    Auto,
    /// Halves for `r >= 1`, a tapered integral of `phi_l(r)` itself below; everything tapered.
    Taper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelOptions {
    pub tol: f64,
    pub taper_eps: f64,
    pub method: TailMethod,
    /// Use `sin(l r)/(l sinh r)` for the spherical function (n = 3 only), always integrating
    /// `phi` directly.
    pub closed_form_h3: bool,
    pub max_panels: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self { tol: 1e-10, taper_eps: 0.2, method: TailMethod::Auto, closed_form_h3: false, max_panels: 400_000 }
    }
}

fn check_point(t: f64, r: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::InvalidParam(format!("t = {t}")));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius r = {r} must be finite and nonnegative")));
    }
    Ok(())
}

fn phi_value(p: &ModelParams, l: f64, r: f64, opts: &KernelOptions) -> Complex64 {
    if opts.closed_form_h3 {
        return phi_h3(Complex64::new(l, 0.0), r);
    }
    spherical_phi_tol(p, Complex64::new(l, 0.0), r, 1e-13).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
}

fn check_h3(p: &ModelParams, opts: &KernelOptions) -> Result<()> {
    if opts.closed_form_h3 && p.n() != 3 {
        return Err(Error::InvalidParam("the closed-form spherical function exists for n = 3 only".into()));
    }
    Ok(())
}

fn finite(v: Complex64, what: &str) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Accuracy(format!("{what}: non-finite spectral integrand")))
    }
}

/// Low-frequency kernel `2 int_0^{kappa+1} chi_0 |c|^{-2} w(l) phi_l(r) e^{it sqrt(l^2+kappa^2)} dl`.
pub fn kernel_w0(p: &ModelParams, sig: &SigmaSpec, t: f64, r: f64) -> Result<KernelSample> {
    kernel_w0_with(p, sig, t, r, &KernelOptions::default())
}

pub fn kernel_w0_with(p: &ModelParams, sig: &SigmaSpec, t: f64, r: f64, opts: &KernelOptions) -> Result<KernelSample> {
    check_point(t, r)?;
    check_h3(p, opts)?;
    sig.validate(p)?;
    let cut = cutoffs(p);
    let amp = |l: f64| sig.weight(p, l) * phi_value(p, l, r, opts) * (2.0 * cut.chi0(l) * plancherel_density(p, l));
    let ph = PhaseSpec::new(p.kappa(), t, 0.0)?;
    let q = QuadOptions { tol: opts.tol, amp_freq: r, ..QuadOptions::default() };
    let v = integrate_compact(amp, 0.0, p.kappa() + 1.0, &[p.kappa()], &ph, &q)?;
    Ok(KernelSample { t, r, value: finite(v.value, "w0")?, err: v.err })
}

/// High-frequency kernel `2 pre int_0^inf chi_inf |c|^{-2} w(l) phi_l(r) e^{it sqrt(l^2+kappa^2)} dl`.
pub fn kernel_winf(p: &ModelParams, sig: &SigmaSpec, t: f64, r: f64) -> Result<KernelSample> {
    kernel_winf_with(p, sig, t, r, &KernelOptions::default())
}

pub fn kernel_winf_with(p: &ModelParams, sig: &SigmaSpec, t: f64, r: f64, opts: &KernelOptions) -> Result<KernelSample> {
    check_point(t, r)?;
    check_h3(p, opts)?;
    sig.validate(p)?;
    let pre = sig.prefactor(p);
    if pre == Complex64::new(0.0, 0.0) {
        return Ok(KernelSample { t, r, value: pre, err: 0.0 });
    }
    let kap = p.kappa();
    let cut = cutoffs(p);
    let tail_opts = TailOptions { tol: opts.tol, max_panels: opts.max_panels };
    let rho = p.rho();
    let re_sigma = sig.total().re;
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;

    let use_direct = opts.closed_form_h3 || r == 0.0 || (opts.method == TailMethod::Taper && r < 1.0);
    if use_direct {
        // phi_l(r) inside the amplitude: oscillates at frequency r unless r = 0
        let amp = |l: f64| sig.weight(p, l) * phi_value(p, l, r, opts) * (2.0 * cut.chi_inf(l) * plancherel_density(p, l));
        let sym = SymbolSpec { lower: kap, order: 2.0 * rho - re_sigma - if r > 0.0 { rho } else { 0.0 }, breakpoints: vec![kap + 1.0], amp_freq: r };
        let ph = PhaseSpec::new(kap, t, 0.0)?;
        let v = tail(&amp, &sym, &ph, opts, &tail_opts)?;
        value += v.0;
        err += v.1;
    } else {
        let split_at = if r >= HC_RADIUS || opts.method == TailMethod::Taper { kap } else { (8.0 / r.tanh()).max(kap + 1.0) };
        if split_at > kap {
            let amp = |l: f64| sig.weight(p, l) * phi_value(p, l, r, opts) * (2.0 * cut.chi_inf(l) * plancherel_density(p, l));
            let ph = PhaseSpec::new(kap, t, 0.0)?;
            let q = QuadOptions { tol: opts.tol, amp_freq: r, max_width: 0.25, max_doublings: 4 };
            let v = integrate_compact(amp, kap, split_at, &[kap + 1.0], &ph, &q)?;
            value += v.value;
            err += v.err;
        }
        let cap = if r >= 1.0 { COEFF_CAP } else { 1 << 17 };
        let ln_sinh = (2.0 * r.sinh()).ln();
        for sign in [1.0, -1.0] {
            // c(-sign l)^{-1} (2 sinh r)^{-rho} sum_k Gamma_k(sign l) e^{-2kr}; e^{i sign l r} is in the phase
            let amp = |l: f64| {
                let s = Complex64::new(0.0, sign * l);
                let sum = hc_sum(rho, s, r, 1e-14, cap).map(|v| v.0).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                let ci = c_inverse(p, Complex64::new(-sign * l, 0.0));
                sig.weight(p, l) * ci * sum * (2.0 * cut.chi_inf(l) * (-rho * ln_sinh).exp())
            };
            let sym = SymbolSpec {
                lower: split_at,
                order: rho - re_sigma,
                breakpoints: if split_at < kap + 1.0 { vec![kap + 1.0] } else { vec![] },
                amp_freq: 0.0,
            };
            let ph = PhaseSpec::new(kap, t, -sign * r)?;
            let v = tail(&amp, &sym, &ph, opts, &tail_opts)?;
            value += v.0;
            err += v.1;
        }
    }
    let value = finite(value * pre, "w_inf")?;
    Ok(KernelSample { t, r, value, err: err * pre.norm() })
}

fn tail<F: Fn(f64) -> Complex64>(amp: &F, sym: &SymbolSpec, ph: &PhaseSpec, opts: &KernelOptions, tail_opts: &TailOptions) -> Result<(Complex64, f64)> {
    let w0 = ph.asymptotic_frequency();
    let omega = (w0 - sym.amp_freq).abs().min((w0 + sym.amp_freq).abs());
    if sym.order >= -1.0 && omega <= 1e-12 * (ph.t.abs() + ph.x.abs() + sym.amp_freq) {
        return Err(Error::Domain(format!("light cone r = |t| = {}: the kernel is singular for this order", ph.t.abs())));
    }
    let tapered = || integrate_symbol_tail(amp, sym, ph, opts.taper_eps, tail_opts).map(|v| (v.value, v.err));
    if opts.method == TailMethod::Taper || sym.amp_freq != 0.0 || opts.closed_form_h3 {
        return tapered();
    }
    match integrate_symbol_tail(amp, sym, ph, 0.0, tail_opts) {
        Ok(v) => Ok((v.value, v.err)),
        Err(Error::NonConvergence { .. }) => tapered(),
        Err(e) => Err(e),
    }
}

/// `w = w^0 + w~^inf`; the analytic-family prefactor only multiplies the second part.
pub fn kernel_w(p: &ModelParams, sig: &SigmaSpec, t: f64, r: f64) -> Result<KernelSample> {
    kernel_w_with(p, sig, t, r, &KernelOptions::default())
}

pub fn kernel_w_with(p: &ModelParams, sig: &SigmaSpec, t: f64, r: f64, opts: &KernelOptions) -> Result<KernelSample> {
    let a = kernel_w0_with(p, sig, t, r, opts)?;
    let b = kernel_winf_with(p, sig, t, r, opts)?;
    Ok(KernelSample { t, r, value: a.value + b.value, err: a.err + b.err })
}

/// Kunze-Stein integral `{int_0^rmax (sinh r)^{n-1} |k(r)|^{q/2} phi_0(r) dr}^{2/q}` with tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KunzeStein {
    pub value: f64,
    /// Bound on the omitted `int_rmax^inf`, before the `2/q` power.
    pub tail_bound: f64,
}

/// `radii` must be uniform with an even number of intervals (Simpson); `kernel` holds `|k(r)|`.
///
/// The tail assumes `|k| <= C phi_0` beyond the last sample, giving an integrand decaying like
/// `e^{-(q/2-1) rho r}` times a polynomial.
pub fn kunze_stein_rhs(p: &ModelParams, q: f64, radii: &[f64], kernel: &[f64], tol: f64) -> Result<KunzeStein> {
    if !(q > 2.0) || !q.is_finite() {
        return Err(Error::InvalidParam(format!("Kunze-Stein exponent q = {q} must exceed 2")));
    }
    let m = radii.len();
    if m != kernel.len() || m < 3 || (m - 1) % 2 != 0 {
        return Err(Error::InvalidParam("need an odd number (>= 3) of paired samples".into()));
    }
    let h = (radii[m - 1] - radii[0]) / (m - 1) as f64;
    if !(h > 0.0) || radii.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0)) {
        return Err(Error::InvalidParam("radii must be uniformly spaced and increasing".into()));
    }
    let n1 = p.n() as f64 - 1.0;
    let mut f = Vec::with_capacity(m);
    for (&r, &k) in radii.iter().zip(kernel) {
        f.push(r.sinh().powf(n1) * k.abs().powf(q / 2.0) * phi_zero(p, r)?);
    }
    let mut s = f[0] + f[m - 1];
    for (i, v) in f.iter().enumerate().take(m - 1).skip(1) {
        s += v * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let integral = s * h / 3.0;
    let rate = (q / 2.0 - 1.0) * p.rho();
    let rmax = radii[m - 1];
    // the (1 + r)^{q/2+1} factor of the envelope slows the decay; bound it by halving the rate
    let tail_bound = f[m - 1] * 2.0 / rate * (1.0 + (q / 2.0 + 1.0) / (rate * (1.0 + rmax)));
    if tail_bound > tol * integral.max(f64::MIN_POSITIVE) && integral > 0.0 {
        return Err(Error::ToleranceNotMet { err: tail_bound, target: tol * integral });
    }
    Ok(KunzeStein { value: integral.powf(2.0 / q), tail_bound })
}

/// Uniform grid with an even number of intervals of width at most `h`.
pub fn simpson_grid(a: f64, b: f64, h: f64) -> Vec<f64> {
    let mut m = ((b - a) / h).ceil().max(2.0) as usize;
    if m % 2 == 1 {
        m += 1;
    }
    (0..=m).map(|i| a + (b - a) * i as f64 / m as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersiveRow {
    pub t: f64,
    /// Kunze-Stein integral of `w^0` on `r <= t/2` (large t) or of the full kernel (small t).
    pub ks_inner: f64,
    /// Kunze-Stein integral of `w^0` on `t/2 <= r <= 40`.
    pub ks_outer: f64,
    /// `sup_r |w~^inf|` over the coarse radial grid.
    pub sup_inf: f64,
    pub combined: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersiveReport {
    pub n: u32,
    pub q: f64,
    pub large: Vec<DispersiveRow>,
    pub small: Vec<DispersiveRow>,
    pub large_slope: Option<f64>,
    pub ks_slope: Option<f64>,
    pub small_slope: Option<f64>,
}

/// Radial step used by the dispersive proxies.
pub const PROXY_DR: f64 = 0.25;

/// `sup_{r <= t/2} |w^0_t(r)| / ((1+r) phi_0(r))` on the grid `r = 0, PROXY_DR, ...`.
pub fn w0_envelope_sup(p: &ModelParams, sig: &SigmaSpec, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParam(format!("t = {t} must be positive")));
    }
    let mut best = 0.0f64;
    let mut k = 0;
    loop {
        let r = PROXY_DR * k as f64;
        if r > t / 2.0 + 1e-12 {
            return Ok(best);
        }
        let w = kernel_w0(p, sig, t, r)?.value.norm();
        best = best.max(w / ((1.0 + r) * phi_zero(p, r)?));
        k += 1;
    }
}

/// Proxies for `||W_t||_{q' -> q}`: for `t > 2` the three pieces of the large-time argument,
/// for `0 < t <= 2` the interpolated sup-norm `(sup_{r<=3} |w~^inf|)^{1-2/q}`.
pub fn dispersive_report(p: &ModelParams, q: f64, sig: &SigmaSpec, t_grid: &[f64]) -> Result<DispersiveReport> {
    if !(q > 2.0) || !q.is_finite() {
        return Err(Error::InvalidParam(format!("q = {q} must satisfy 2 < q < inf")));
    }
    let need = (p.n() as f64 + 1.0) * (0.5 - 1.0 / q);
    if sig.total().re < need - 1e-12 {
        return Err(Error::InvalidParam(format!("Re sigma must be at least {need}")));
    }
    let opts = KernelOptions::default();
    let mut large = Vec::new();
    let mut small = Vec::new();
    for &t in t_grid {
        if !(t > 0.0) {
            return Err(Error::InvalidParam(format!("t = {t} must be positive")));
        }
        if t > 2.0 {
            let inner = simpson_grid(0.0, t / 2.0, PROXY_DR);
            let k_in: Vec<f64> = inner.iter().map(|&r| kernel_w0_with(p, sig, t, r, &opts).map(|s| s.value.norm())).collect::<Result<_>>()?;
            let ks_inner = kunze_stein_rhs(p, q, &inner, &k_in, f64::INFINITY)?.value;
            let ks_outer = if t / 2.0 < KS_RMAX {
                let outer = simpson_grid(t / 2.0, KS_RMAX, PROXY_DR);
                let k_out: Vec<f64> = outer.iter().map(|&r| kernel_w0_with(p, sig, t, r, &opts).map(|s| s.value.norm())).collect::<Result<_>>()?;
                kunze_stein_rhs(p, q, &outer, &k_out, f64::INFINITY)?.value
            } else {
                0.0
            };
            let mut sup_inf = 0.0f64;
            let mut r = 0.0;
            while r <= t + 3.0 {
                sup_inf = sup_inf.max(kernel_winf_with(p, sig, t, r, &opts)?.value.norm());
                r += 1.0;
            }
            large.push(DispersiveRow { t, ks_inner, ks_outer, sup_inf, combined: ks_inner + ks_outer + sup_inf });
        } else {
            let mut sup_inf = 0.0f64;
            for k in 0..=12 {
                let r = 0.25 * k as f64;
                sup_inf = sup_inf.max(kernel_winf_with(p, sig, t, r, &opts)?.value.norm());
            }
            let proxy = sup_inf.powf(1.0 - 2.0 / q);
            small.push(DispersiveRow { t, ks_inner: 0.0, ks_outer: 0.0, sup_inf, combined: proxy });
        }
    }
    let slope = |rows: &[DispersiveRow], pick: fn(&DispersiveRow) -> f64| -> Option<f64> {
        let mut rows: Vec<&DispersiveRow> = rows.iter().collect();
        rows.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
        let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
        let vs: Vec<f64> = rows.iter().map(|r| pick(r)).collect();
        crate::oscillatory::fit_decay(&ts, &vs).ok().map(|f| f.slope)
    };
    Ok(DispersiveReport {
        n: p.n(),
        q,
        large_slope: slope(&large, |r| r.combined),
        ks_slope: slope(&large, |r| r.ks_inner),
        small_slope: slope(&small, |r| r.combined),
        large,
        small,
    })
}

/// Radial solution of the homogeneous Klein-Gordon equation and its spectral energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Propagated {
    pub t: f64,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub u_t: Vec<f64>,
    pub energy: f64,
}

fn spectral_nodes(lambda_max: f64) -> Vec<(f64, f64)> {
    let (x, w) = crate::oscillatory::gauss_legendre();
    let panels = (lambda_max / 0.1).ceil().max(1.0) as usize;
    let h = lambda_max / panels as f64;
    let mut out = Vec::with_capacity(panels * x.len());
    for k in 0..panels {
        let m = h * (k as f64 + 0.5);
        for i in 0..x.len() {
            out.push((m + 0.5 * h * x[i], 0.5 * h * w[i]));
        }
    }
    out
}

/// `u(t, r) = int_0^L |c|^{-2} [cos(tE) f(l) + sin(tE)/E g(l)] phi_l(r) dl`, `E = sqrt(l^2 + kappa^2)`,
/// with `u_t` by the spectral derivative and `E(t) = int |c|^{-2} [E^2 |f_t|^2 + |g_t|^2] dl`.
///
/// `f_hat` and `g_hat` are taken to vanish beyond `lambda_max`.
pub fn radial_propagate<F, G>(p: &ModelParams, f_hat: F, g_hat: G, lambda_max: f64, t: f64, r_grid: &[f64]) -> Result<Propagated>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if !(lambda_max > 0.0) || !lambda_max.is_finite() || !t.is_finite() {
        return Err(Error::InvalidParam(format!("lambda_max = {lambda_max}, t = {t}")));
    }
    let nodes = spectral_nodes(lambda_max);
    let kap = p.kappa();
    let mut ft = Vec::with_capacity(nodes.len());
    let mut gt = Vec::with_capacity(nodes.len());
    let mut energy = 0.0;
    for &(l, w) in &nodes {
        let e = l.hypot(kap);
        let (s, c) = (t * e).sin_cos();
        let (f, g) = (f_hat(l), g_hat(l));
        let a = c * f + s / e * g;
        let b = -e * s * f + c * g;
        let dens = plancherel_density(p, l) * w;
        energy += dens * (e * e * a * a + b * b);
        ft.push(a * dens);
        gt.push(b * dens);
    }
    let mut u = Vec::with_capacity(r_grid.len());
    let mut u_t = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        check_point(t, r)?;
        let (mut su, mut sv) = (0.0, 0.0);
        for (k, &(l, _)) in nodes.iter().enumerate() {
            let ph = spherical_phi_tol(p, Complex64::new(l, 0.0), r, 1e-13)?.re;
            su += ft[k] * ph;
            sv += gt[k] * ph;
        }
        u.push(su);
        u_t.push(sv);
    }
    Ok(Propagated { t, r: r_grid.to_vec(), u, u_t, energy })
}

/// Inverse spherical transform `int_0^L |c|^{-2} f(l) phi_l(r) dl` on the propagator's nodes.
pub fn inverse_transform<F: Fn(f64) -> f64>(p: &ModelParams, f_hat: F, lambda_max: f64, r_grid: &[f64]) -> Result<Vec<f64>> {
    let nodes = spectral_nodes(lambda_max);
    r_grid
        .iter()
        .map(|&r| {
            let mut s = 0.0;
            for &(l, w) in &nodes {
                s += w * plancherel_density(p, l) * f_hat(l) * spherical_phi_tol(p, Complex64::new(l, 0.0), r, 1e-13)?.re;
            }
            Ok(s)
        })
        .collect()
}
