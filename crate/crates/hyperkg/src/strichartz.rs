//! Exponent geometry of Strichartz estimates and of the small-data global existence theory
//! for `u_tt - Delta u - rho^2 u + kappa^2 u = F(u)`, `|F(u)| ~ |u|^gamma`.
//!
//! Points are stored as reciprocals `(1/p, 1/q, 1/p~, 1/q~)`. Equalities and closed
//! boundaries are tested with absolute tolerance [`TOL`]; open boundaries exclude a band of
//! the same width.

use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

pub const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentPoint {
    pub inv_p: f64,
    pub inv_q: f64,
    pub inv_pt: f64,
    pub inv_qt: f64,
}

impl ExponentPoint {
    pub fn new(inv_p: f64, inv_q: f64, inv_pt: f64, inv_qt: f64) -> Self {
        Self { inv_p, inv_q, inv_pt, inv_qt }
    }
}

/// One inequality `margin >= 0` (closed) or `margin > 0` (open).
#[derive(Clone, Copy)]
struct Term {
    margin: f64,
    strict: bool,
}

impl Term {
    fn closed(margin: f64) -> Self {
        Self { margin, strict: false }
    }
    fn open(margin: f64) -> Self {
        Self { margin, strict: true }
    }
    fn holds(&self) -> bool {
        if self.strict {
            self.margin > TOL
        } else {
            self.margin >= -TOL
        }
    }
}

fn all_hold(terms: &[Term]) -> bool {
    terms.iter().all(Term::holds)
}

fn min_margin(terms: &[Term]) -> f64 {
    terms.iter().map(|t| t.margin).fold(f64::INFINITY, f64::min)
}

fn half_n1(n: usize) -> f64 {
    (n as f64 - 1.0) / 2.0
}

/// Euclidean Strauss exponent.
pub fn strauss_gamma0(n: usize) -> f64 {
    let a = 0.5 + 1.0 / (n as f64 - 1.0);
    a + (a * a + 2.0 / (n as f64 - 1.0)).sqrt()
}

fn triangle_terms(n: usize, inv_p: f64, inv_q: f64) -> [Term; 5] {
    let edge = inv_p - half_n1(n) * (0.5 - inv_q);
    [
        Term::open(inv_p),
        Term::closed(0.5 - inv_p),
        Term::open(inv_q),
        Term::open(0.5 - inv_q),
        // the limiting edge is excluded in dimension 2
        if n == 2 { Term::open(edge) } else { Term::closed(edge) },
    ]
}

fn is_endpoint(inv_p: f64, inv_q: f64) -> bool {
    inv_p.abs() <= TOL && (inv_q - 0.5).abs() <= TOL
}

/// Admissibility of `(p, q)`: the triangle `1/p >= (n-1)/2 (1/2 - 1/q)` in
/// `(0,1/2] x (0,1/2)`, plus the isolated point `(0, 1/2)`. Strict edge for `n = 2`.
pub fn is_admissible(n: usize, inv_p: f64, inv_q: f64) -> bool {
    if n < 2 {
        return false;
    }
    is_endpoint(inv_p, inv_q) || all_hold(&triangle_terms(n, inv_p, inv_q))
}

/// Sobolev order `sigma(p,q)` required by the generalized Strichartz estimate.
pub fn sigma_pq(n: usize, inv_p: f64, inv_q: f64) -> Result<f64> {
    let in_square = (inv_p >= -TOL && inv_p <= 0.5 + TOL && inv_q > TOL && inv_q < 0.5 - TOL)
        || is_endpoint(inv_p, inv_q);
    if !in_square {
        return Err(Error::Domain(format!("(1/p, 1/q) = ({inv_p}, {inv_q}) is outside the square")));
    }
    let d = 0.5 - inv_q;
    Ok((n as f64 + 1.0) / 2.0 * d + (half_n1(n) * d - inv_p).max(0.0))
}

/// `H^{sigma1, q1} -> H^{sigma2, q2}`: `sigma1 - sigma2 >= n/q1 - n/q2 >= 0`.
pub fn sobolev_embeds(n: usize, sigma1: f64, q1: f64, sigma2: f64, q2: f64) -> bool {
    let d = n as f64 / q1 - n as f64 / q2;
    d >= -TOL && sigma1 - sigma2 >= d - TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPowers {
    pub n: usize,
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma_conf: f64,
    /// Not defined in dimension 2.
    pub gamma3: Option<f64>,
    pub gamma4: Option<f64>,
}

pub fn critical_powers(n: usize) -> Result<CriticalPowers> {
    if n < 2 {
        return Err(Error::InvalidParam(format!("dimension {n} < 2")));
    }
    let nf = n as f64;
    let m = nf - 1.0;
    let (gamma3, gamma4) = match n {
        2 => (None, None),
        3..=5 => {
            let b = (6.0 - nf) / 2.0 + 2.0 / m;
            let g3 = ((nf + 6.0) / 2.0 + 2.0 / m + (4.0 * nf + b * b).sqrt()) / nf;
            (Some(g3), Some(1.0 + 4.0 / (nf - 2.0)))
        }
        _ => {
            let g3 = 1.0 + 2.0 / (m / 2.0 - 1.0 / m);
            let b = (nf - 3.0) / 2.0 + 3.0 / (nf + 1.0);
            let g4 = m / 2.0 + 3.0 / (nf + 1.0) - (b * b - 4.0 * m / (nf + 1.0)).sqrt();
            (Some(g3), Some(g4))
        }
    };
    Ok(CriticalPowers {
        n,
        gamma0: strauss_gamma0(n),
        gamma1: 1.0 + 3.0 / nf,
        gamma2: 1.0 + 2.0 / (m / 2.0 + 2.0 / m),
        gamma_conf: 1.0 + 4.0 / m,
        gamma3,
        gamma4,
    })
}

/// `(sigma_1, sigma_2, sigma_3)` at `gamma`.
pub fn regularity_curves(n: usize, gamma: f64) -> Result<(f64, f64, f64)> {
    let nf = n as f64;
    let shift = (nf + 1.0) / (2.0 * nf);
    if gamma == 1.0 {
        return Err(Error::Pole { func: "sigma_2, sigma_3", at: "gamma = 1".into() });
    }
    if gamma == shift {
        return Err(Error::Pole { func: "sigma_1", at: format!("gamma = {shift}") });
    }
    let s1 = (nf + 1.0) / 4.0 - (nf + 1.0) * (nf + 5.0) / (8.0 * nf) / (gamma - shift);
    let s2 = (nf + 1.0) / 4.0 - 1.0 / (gamma - 1.0);
    let s3 = nf / 2.0 - 2.0 / (gamma - 1.0);
    Ok((s1, s2, s3))
}

/// The two-dimensional curve `3/4 - 3/(2 gamma)`, which comes from `q > gamma`.
pub fn sigma1_tilde(gamma: f64) -> f64 {
    0.75 - 1.5 / gamma
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    NearOne,
    /// `sigma_1`, or `sigma~_1` in dimension 2.
    Sigma1,
    Sigma2,
    Sigma3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub gamma: f64,
    pub n: usize,
    pub branch: Branch,
    pub sigma_min: f64,
    /// The infimum is not attained: any `sigma > sigma_min` works.
    pub infimum_open: bool,
    pub witness: ExponentPoint,
    pub oracle_sigma: Option<f64>,
    pub oracle_gap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SmallConditions {
    pub a: bool,
    pub a_tilde: bool,
    pub b: bool,
    pub c: bool,
    pub d_i: bool,
    pub d_ii: bool,
    pub e: bool,
}

impl SmallConditions {
    pub fn all(&self) -> bool {
        self.a && self.a_tilde && self.b && self.c && self.d_i && self.d_ii && self.e
    }
}

fn dii_coef(n: usize, gamma: f64) -> f64 {
    let nf = n as f64;
    2.0 * nf / (nf - 1.0) * gamma - (nf + 1.0) / (nf - 1.0)
}

fn small_terms(n: usize, gamma: f64, x: &ExponentPoint) -> [Term; 4] {
    let nf = n as f64;
    [
        Term::closed(x.inv_q + x.inv_qt - (nf - 1.0) / (nf + 1.0)),
        Term::closed(gamma * x.inv_q + x.inv_qt - 1.0),
        Term::closed((nf + 1.0) / (nf - 1.0) - dii_coef(n, gamma) * x.inv_q - x.inv_qt),
        Term::open(1.0 / gamma - x.inv_q),
    ]
}

/// Conditions for `1 < gamma <= gamma_conf`, with `sigma`, `sigma~` at their lower bounds.
pub fn conditions_small(n: usize, gamma: f64, x: &ExponentPoint) -> SmallConditions {
    let [b, d_i, d_ii, e] = small_terms(n, gamma, x);
    SmallConditions {
        a: is_admissible(n, x.inv_p, x.inv_q),
        a_tilde: is_admissible(n, x.inv_pt, x.inv_qt),
        b: b.holds(),
        c: (gamma * x.inv_p + x.inv_pt - 1.0).abs() <= TOL,
        d_i: d_i.holds(),
        d_ii: d_ii.holds(),
        e: e.holds(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LargeConditions {
    pub a: bool,
    pub a_tilde: bool,
    pub c: bool,
    pub d_i: bool,
    pub d_ii: bool,
    pub e: bool,
    /// `1/p + 1/p~ + 1 >= n (1 - 1/q - 1/q~)`
    pub firstcondition: bool,
    /// `1/p + 1/p~ + 1 >= (gamma - 1) n/q`
    pub secondcondition: bool,
}

impl LargeConditions {
    /// The reduced system. The two named intermediate conditions are implied by it.
    pub fn all(&self) -> bool {
        self.a && self.a_tilde && self.c && self.d_i && self.d_ii && self.e
    }
}

fn square_terms(n: usize, inv_p: f64, inv_q: f64) -> [Term; 5] {
    [
        Term::closed(inv_p),
        Term::closed(0.5 - inv_p),
        Term::open(inv_q),
        Term::closed(0.5 - inv_q),
        Term::closed(half_n1(n) * (0.5 - inv_q) - inv_p),
    ]
}

fn large_terms(n: usize, gamma: f64, x: &ExponentPoint) -> [Term; 3] {
    let nf = n as f64;
    [
        Term::closed(gamma * x.inv_q + x.inv_qt - 1.0),
        Term::closed(2.0 / (gamma - 1.0) - x.inv_p - nf * x.inv_q),
        Term::open(1.0 / gamma - x.inv_q),
    ]
}

/// Conditions for `gamma_conf <= gamma <= gamma_4`, with `sigma`, `sigma~` at their lower bounds.
pub fn conditions_large(n: usize, gamma: f64, x: &ExponentPoint) -> LargeConditions {
    let nf = n as f64;
    let [d_i, d_ii, e] = large_terms(n, gamma, x);
    let lhs = x.inv_p + x.inv_pt + 1.0;
    LargeConditions {
        a: all_hold(&square_terms(n, x.inv_p, x.inv_q)),
        a_tilde: all_hold(&square_terms(n, x.inv_pt, x.inv_qt)),
        c: (gamma * x.inv_p + x.inv_pt - 1.0).abs() <= TOL,
        d_i: d_i.holds(),
        d_ii: d_ii.holds(),
        e: e.holds(),
        firstcondition: Term::closed(lhs - nf * (1.0 - x.inv_q - x.inv_qt)).holds(),
        secondcondition: Term::closed(lhs - (gamma - 1.0) * nf * x.inv_q).holds(),
    }
}

/// Common point of the three lines bounding the small-power sector.
pub fn vertex_q1(n: usize, gamma: f64) -> (f64, f64) {
    let nf = n as f64;
    let iq = 2.0 / (nf + 1.0) / (gamma - 1.0);
    (iq, (nf - 1.0) / (nf + 1.0) - iq)
}

/// Intersection of `1/p + (n-1)/2 1/q = (n-1)/4` with `1/p + n/q = 2/(gamma-1)`.
pub fn vertex_p2q2(n: usize, gamma: f64) -> (f64, f64) {
    let nf = n as f64;
    let g = 2.0 / (gamma - 1.0);
    ((nf - 1.0) / (nf + 1.0) * (nf / 2.0 - g), (2.0 * g - (nf - 1.0) / 2.0) / (nf + 1.0))
}

/// Vertices `(1/q2, 1/q~2)` and `(1/q3, 1/q~3)` of the large-power convex region.
pub fn vertices_q2q3(n: usize, gamma: f64) -> (f64, f64, f64, f64) {
    let nf = n as f64;
    let g = 4.0 / (nf + 1.0) / (gamma - 1.0);
    let q2 = g - 0.5 * (nf - 1.0) / (nf + 1.0);
    let qt2 = nf / (nf + 1.0) * gamma - g + 0.5 - 2.0 / (nf - 1.0) - 4.0 / (nf + 1.0);
    let q3 = g - 0.5 * (nf + 3.0) / (nf + 1.0) / gamma;
    let qt3 = 1.5 * (nf - 1.0) / (nf + 1.0) - g;
    (q2, qt2, q3, qt3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Regime {
    Small,
    Large,
}

fn regime(p: &CriticalPowers, gamma: f64) -> Regime {
    if gamma <= p.gamma_conf {
        Regime::Small
    } else {
        Regime::Large
    }
}

fn check_gamma(n: usize, gamma: f64) -> Result<CriticalPowers> {
    let p = critical_powers(n)?;
    if !(gamma > 1.0) {
        return Err(Error::InvalidParam(format!("gamma = {gamma} must exceed 1")));
    }
    if let Some(g4) = p.gamma4 {
        if gamma > g4 + TOL {
            return Err(Error::OutOfRange { gamma, gamma4: g4 });
        }
    }
    Ok(p)
}

/// Largest displacement of a witness from the optimum, in units of `1/q`.
const OPEN_OFFSET: f64 = 1e-3;
const WITNESS_SAMPLES: usize = 4001;

/// Best `1/q~` for fixed `(1/p, 1/q)`: the midpoint of the feasible interval, with its width.
fn best_qt(lo: f64, hi: f64) -> Option<(f64, f64)> {
    (hi >= lo - TOL).then(|| (0.5 * (lo + hi), hi - lo))
}

/// A feasible point with `1/q = inv_q`, scanning `1/p` and centering `1/q~`.
fn small_witness(n: usize, gamma: f64, inv_q: f64) -> Option<ExponentPoint> {
    let nf = n as f64;
    let lo_p = (half_n1(n) * (0.5 - inv_q)).max(0.5 / gamma);
    let hi_p = (1.0 / gamma).min(0.5);
    let mut best: Option<(f64, ExponentPoint)> = None;
    for k in 0..WITNESS_SAMPLES {
        let inv_p = lo_p + (hi_p - lo_p) * k as f64 / (WITNESS_SAMPLES - 1) as f64;
        let inv_pt = 1.0 - gamma * inv_p;
        let lo = (1.0 - gamma * inv_q)
            .max((nf - 1.0) / (nf + 1.0) - inv_q)
            .max(0.5 - inv_pt / half_n1(n))
            .max(0.0);
        let hi = ((nf + 1.0) / (nf - 1.0) - dii_coef(n, gamma) * inv_q).min(0.5);
        let Some((inv_qt, width)) = best_qt(lo, hi) else { continue };
        let x = ExponentPoint::new(inv_p, inv_q, inv_pt, inv_qt);
        if !conditions_small(n, gamma, &x).all() {
            continue;
        }
        let slack = width.min(min_margin(&triangle_terms(n, inv_p, inv_q))).min(min_margin(&triangle_terms(n, inv_pt, inv_qt)));
        if best.map_or(true, |(s, _)| slack > s) {
            best = Some((slack, x));
        }
    }
    best.map(|(_, x)| x)
}

/// A feasible point on `1/p + n/q = budget`, scanning `1/p` and centering `1/q~`.
fn large_witness(n: usize, gamma: f64, budget: f64) -> Option<ExponentPoint> {
    let nf = n as f64;
    let lo_p = 0.5 / gamma;
    let hi_p = (1.0 / gamma).min(0.5);
    let mut best: Option<(f64, ExponentPoint)> = None;
    // near gamma_conf the feasible set collapses onto the vertex (1/p_2, 1/q_2)
    let vertex = vertex_p2q2(n, gamma).0.clamp(lo_p, hi_p);
    let grid = (0..WITNESS_SAMPLES).map(|k| lo_p + (hi_p - lo_p) * k as f64 / (WITNESS_SAMPLES - 1) as f64);
    for inv_p in grid.chain(std::iter::once(vertex)) {
        let inv_q = (budget - inv_p) / nf;
        let inv_pt = 1.0 - gamma * inv_p;
        let lo = (1.0 - gamma * inv_q).max(0.0);
        let hi = (0.5 - inv_pt / half_n1(n)).min(0.5);
        let Some((inv_qt, width)) = best_qt(lo, hi) else { continue };
        let x = ExponentPoint::new(inv_p, inv_q, inv_pt, inv_qt);
        if !conditions_large(n, gamma, &x).all() {
            continue;
        }
        let slack = width.min(min_margin(&square_terms(n, inv_p, inv_q)));
        if best.map_or(true, |(s, _)| slack > s) {
            best = Some((slack, x));
        }
    }
    best.map(|(_, x)| x)
}

/// Minimal Sobolev regularity of small data for global existence at power `gamma`.
///
/// Dimension 2 uses its own ladder `0+`, `sigma~_1+`, `sigma_2`, `sigma_3+` with breaks at 2, 3, 5
/// and no upper limit on `gamma`.
pub fn min_regularity(n: usize, gamma: f64) -> Result<RegularityReport> {
    let p = check_gamma(n, gamma)?;
    let (s1, s2, s3) = regularity_curves(n, gamma)?;
    let (branch, sigma_min, infimum_open) = if n == 2 {
        if gamma <= 2.0 {
            (Branch::NearOne, 0.0, true)
        } else if gamma <= 3.0 {
            (Branch::Sigma1, sigma1_tilde(gamma), true)
        } else if gamma < 5.0 {
            (Branch::Sigma2, s2, false)
        } else {
            (Branch::Sigma3, s3, true)
        }
    } else if gamma <= p.gamma1 {
        (Branch::NearOne, 0.0, true)
    } else if gamma <= p.gamma2 {
        (Branch::Sigma1, s1, false)
    } else if gamma <= p.gamma_conf {
        (Branch::Sigma2, s2, false)
    } else {
        (Branch::Sigma3, s3, false)
    };
    let nf = n as f64;
    // Next to a branch join the optimum can sit inside a tolerance band, so the witness is
    // moved inward by the smallest offset that clears it. Open infima always start displaced.
    let cap = OPEN_OFFSET.min((gamma - 1.0) / 16.0);
    let offsets: &[f64] = if infimum_open { &[1.0, 0.1, 0.01] } else { &[0.0, 1e-6, 1e-4, 1e-2, 1.0] };
    let witness = offsets
        .iter()
        .find_map(|f| {
            let off = f * cap;
            match regime(&p, gamma) {
                Regime::Small => small_witness(n, gamma, 0.5 - 2.0 * sigma_min / (nf + 1.0) - off),
                Regime::Large => large_witness(n, gamma, nf / 2.0 - sigma_min - nf * off),
            }
        })
        .ok_or_else(|| Error::Degenerate(format!("no witness found for n = {n}, gamma = {gamma}")))?;
    Ok(RegularityReport { gamma, n, branch, sigma_min, infimum_open, witness, oracle_sigma: None, oracle_gap: None })
}

/// [`min_regularity`] together with the grid oracle.
pub fn min_regularity_checked(n: usize, gamma: f64, resolution: f64) -> Result<RegularityReport> {
    let mut report = min_regularity(n, gamma)?;
    let (sigma, _) = oracle_min_sigma(n, gamma, resolution)?;
    report.oracle_sigma = Some(sigma);
    report.oracle_gap = Some((sigma - report.sigma_min).abs());
    Ok(report)
}

/// Agreement tolerance between the closed form and the oracle at a grid step.
pub fn oracle_tolerance(n: usize, resolution: f64) -> f64 {
    2.0 * (n as f64 + 1.0) / 2.0 * resolution
}

/// Brute-force minimum of `sigma` over the reciprocal grid `(k + 1/2) h`, `h = resolution`.
///
/// `1/p~` is not gridded: it is solved from `gamma/p + 1/p~ = 1`. Below `gamma_conf` the
/// objective is `(n+1)/2 (1/2 - 1/q)` under the small-power conditions, above it
/// `n (1/2 - 1/q) - 1/p` under the large-power ones.
pub fn oracle_min_sigma(n: usize, gamma: f64, resolution: f64) -> Result<(f64, ExponentPoint)> {
    let p = check_gamma(n, gamma)?;
    let steps = (0.5 / resolution).round();
    if !(resolution > 0.0) || steps < 1.0 || (steps * resolution - 0.5).abs() > 1e-12 {
        return Err(Error::InvalidParam(format!("resolution {resolution} does not divide 1/2")));
    }
    let steps = steps as usize;
    let node = |k: usize| (k as f64 + 0.5) * resolution;
    let nf = n as f64;
    let reg = regime(&p, gamma);
    let best = (0..steps)
        .into_par_iter()
        .filter_map(|ip| {
            let inv_p = node(ip);
            let inv_pt = 1.0 - gamma * inv_p;
            let mut local: Option<(f64, ExponentPoint)> = None;
            for iq in 0..steps {
                let inv_q = node(iq);
                let sigma = match reg {
                    Regime::Small => (nf + 1.0) / 2.0 * (0.5 - inv_q),
                    Regime::Large => nf * (0.5 - inv_q) - inv_p,
                };
                if local.map_or(false, |(s, _)| s <= sigma) {
                    continue;
                }
                let hit = (0..steps).map(node).map(|inv_qt| ExponentPoint::new(inv_p, inv_q, inv_pt, inv_qt)).find(|x| match reg {
                    Regime::Small => conditions_small(n, gamma, x).all(),
                    Regime::Large => conditions_large(n, gamma, x).all(),
                });
                if let Some(x) = hit {
                    local = Some((sigma, x));
                }
            }
            local
        })
        .reduce_with(|a, b| if b.0 < a.0 || (b.0 == a.0 && key(&b.1) < key(&a.1)) { b } else { a });
    best.ok_or(Error::Infeasible)
}

fn key(x: &ExponentPoint) -> (u64, u64, u64) {
    (x.inv_p.to_bits(), x.inv_q.to_bits(), x.inv_qt.to_bits())
}
