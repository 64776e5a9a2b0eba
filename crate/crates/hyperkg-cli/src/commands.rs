use crate::output::{self, num, Format, Output, Table};
use crate::{Cli, Command, FigureId, Part, Regime, RunArgs};
use hyperkg::kernels::{dispersive_report, kernel_w0_with, kernel_w_with, kernel_winf_with, w0_envelope_sup, KernelOptions, SigmaSpec};
use hyperkg::oscillatory::fit_decay;
use hyperkg::specfun::{envelope, phi_zero, spherical_phi_tol};
use hyperkg::strichartz::{critical_powers, is_admissible, min_regularity, min_regularity_checked, regularity_curves, sigma_pq, Branch};
use hyperkg::{acceptance, Complex64, ModelParams};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] hyperkg::Error),
    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Model(hyperkg::Error::OutOfRange { .. }) => 4,
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

type Res<T> = Result<T, CliError>;

/// Validated model parameters plus output settings.
pub struct RunConfig {
    pub params: ModelParams,
    pub tol: f64,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_args(a: &RunArgs) -> Res<Self> {
        let rho = (a.n as f64 - 1.0) / 2.0;
        let params = ModelParams::new(a.n, a.kappa, a.kappa_tilde.unwrap_or(rho + 1.0))?;
        if !(a.tol > 0.0 && a.tol < 1.0) {
            return Err(CliError::Usage(format!("--tol {} must lie in (0, 1)", a.tol)));
        }
        Ok(Self { params, tol: a.tol, format: a.format })
    }

    fn n(&self) -> usize {
        self.params.n() as usize
    }

    fn default_sigma(&self) -> f64 {
        (self.params.n() as f64 + 1.0) / 2.0 + 1.0
    }
}

pub fn dispatch(cli: &Cli) -> Res<ExitCode> {
    if cli.seed_check {
        return seed_check(&cli.run);
    }
    let Some(cmd) = &cli.command else {
        return Err(CliError::Usage("no subcommand given (see --help)".into()));
    };
    let cfg = RunConfig::from_args(&cli.run)?;
    let mut code = ExitCode::SUCCESS;
    let out = match cmd {
        Command::Spherical { lambda, lambda_im, r } => spherical(&cfg, Complex64::new(*lambda, *lambda_im), &r.0)?,
        Command::Kernel { part, sigma, sigma_im, analytic, t, r } => {
            let s = Complex64::new(sigma.unwrap_or(cfg.default_sigma()), *sigma_im);
            let sig = if *analytic { SigmaSpec::analytic(s) } else { SigmaSpec::split(Complex64::new(0.0, 0.0), s, false) };
            kernel(&cfg, *part, &sig, *t, &r.0)?
        }
        Command::Decay { regime, q, sigma, t } => {
            let ts = match (t, regime) {
                (Some(g), _) => g.0.clone(),
                (None, Regime::Large) => vec![8.0, 16.0, 32.0, 64.0],
                (None, Regime::Small) => vec![2.0, 1.0, 0.5, 0.25, 0.125],
            };
            decay(&cfg, *regime, *q, sigma.unwrap_or(cfg.default_sigma()), &ts)?
        }
        Command::Exponents { ns, check_table } => {
            let (out, ok) = exponents(ns, *check_table)?;
            if !ok {
                code = ExitCode::from(3);
            }
            out
        }
        Command::Regularity { gamma, oracle, resolution } => {
            let rep = if *oracle { min_regularity_checked(cfg.n(), *gamma, *resolution)? } else { min_regularity(cfg.n(), *gamma)? };
            Output::Report(serde_json::to_value(rep).expect("report serializes"))
        }
        Command::Admissible { inv_p, inv_q } => admissible(cfg.n(), *inv_p, *inv_q),
        Command::Figure { id, samples } => figure(cfg.n(), *id, *samples)?,
    };
    emit(&out, &cfg.format, cli.run.out.as_deref())?;
    Ok(code)
}

fn emit(out: &Output, format: &Option<Format>, path: Option<&std::path::Path>) -> Res<()> {
    let fmt = format.unwrap_or(match out {
        Output::Table(_) => Format::Csv,
        Output::Report(_) => Format::Json,
    });
    let (text, meta) = output::render(out, fmt);
    if let Some(m) = meta {
        eprint!("{m}");
    }
    output::write(&text, path)?;
    Ok(())
}

fn seed_check(run: &RunArgs) -> Res<ExitCode> {
    let outcomes = acceptance::run(&[]);
    let ok = outcomes.iter().all(|o| o.passed);
    let text = match run.format {
        Some(Format::Json) => output::json_text(&serde_json::to_value(&outcomes).expect("outcomes serialize")),
        _ => outcomes.iter().map(|o| format!("{o}\n")).collect(),
    };
    output::write(&text, run.out.as_deref())?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(5) })
}

fn spherical(cfg: &RunConfig, lambda: Complex64, radii: &[f64]) -> Res<Output> {
    let p = &cfg.params;
    let rows = radii
        .par_iter()
        .map(|&r| {
            let v = spherical_phi_tol(p, lambda, r, cfg.tol)?;
            Ok(vec![r, v.re, v.im, phi_zero(p, r)?, envelope(p, r)])
        })
        .collect::<hyperkg::Result<Vec<_>>>()?;
    // best constant C with phi_0 <= C (1+r) e^{-rho r} on this grid
    let c = rows.iter().map(|row| row[3] / row[4]).fold(0.0, f64::max);
    let mut t = Table::new(&["r", "re", "im", "phi0", "envelope"]);
    t.rows = rows;
    t.meta("n", p.n());
    t.meta("lambda_re", num(lambda.re));
    t.meta("lambda_im", num(lambda.im));
    t.meta("envelope_constant", num(c));
    let holds = rows_bound(&t.rows, c);
    t.meta("envelope_bound_holds", holds);
    Ok(Output::Table(t))
}

/// `|phi_l| <= C (1+r) e^{-rho r}` on every row.
fn rows_bound(rows: &[Vec<f64>], c: f64) -> bool {
    rows.iter().all(|row| row[1].hypot(row[2]) <= c * row[4] * (1.0 + 1e-12) + 1e-300)
}

fn kernel(cfg: &RunConfig, part: Part, sig: &SigmaSpec, t: f64, radii: &[f64]) -> Res<Output> {
    let p = &cfg.params;
    let opts = KernelOptions { tol: cfg.tol, ..KernelOptions::default() };
    let rows = radii
        .par_iter()
        .map(|&r| {
            let s = match part {
                Part::W0 => kernel_w0_with(p, sig, t, r, &opts),
                Part::Winf => kernel_winf_with(p, sig, t, r, &opts),
                Part::Sum => kernel_w_with(p, sig, t, r, &opts),
            }?;
            Ok(vec![s.t, s.r, s.value.re, s.value.im, s.value.norm(), s.err])
        })
        .collect::<hyperkg::Result<Vec<_>>>()?;
    let mut tab = Table::new(&["t", "r", "re", "im", "abs", "err"]);
    tab.rows = rows;
    tab.meta("n", p.n());
    tab.meta("part", format!("{part:?}").to_lowercase());
    Ok(Output::Table(tab))
}

fn slope_of(ts: &[f64], vals: &[f64]) -> Option<f64> {
    let mut pairs: Vec<(f64, f64)> = ts.iter().cloned().zip(vals.iter().cloned()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (t, v): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    fit_decay(&t, &v).ok().map(|f| f.slope)
}

fn verdict(quantity: &str, values: &[f64], slope: Option<f64>, expected: f64, tolerance: f64) -> Value {
    let pass = slope.map(|s| (s - expected).abs() <= tolerance).unwrap_or(false);
    json!({
        "quantity": quantity,
        "values": values.iter().map(|&v| num(v)).collect::<Vec<_>>(),
        "slope": slope.map(num).unwrap_or(Value::Null),
        "expected": num(expected),
        "tolerance": num(tolerance),
        "pass": pass,
    })
}

fn decay(cfg: &RunConfig, regime: Regime, q: f64, sigma: f64, ts: &[f64]) -> Res<Output> {
    let p = &cfg.params;
    let nf = p.n() as f64;
    let sig = SigmaSpec::real(sigma);
    let in_regime = |t: f64| match regime {
        Regime::Large => t > 2.0,
        Regime::Small => t > 0.0 && t <= 2.0,
    };
    if let Some(t) = ts.iter().find(|&&t| !in_regime(t)) {
        return Err(CliError::Usage(format!("t = {t} is outside the {regime:?} regime (t > 2 is large)")));
    }
    let rep = dispersive_report(p, q, &sig, ts)?;
    let mut out = json!({
        "n": p.n(),
        "q": num(q),
        "sigma": num(sigma),
        "t": ts.iter().map(|&t| num(t)).collect::<Vec<_>>(),
        "log_correction": regime == Regime::Small && p.n() == 2,
    });
    let m = out.as_object_mut().expect("object");
    match regime {
        Regime::Large => {
            let sups = ts.iter().map(|&t| w0_envelope_sup(p, &sig, t)).collect::<hyperkg::Result<Vec<_>>>()?;
            m.insert("regime".into(), json!("large"));
            m.insert("rows".into(), serde_json::to_value(&rep.large).expect("rows serialize"));
            m.insert("kernel".into(), verdict("sup_{r<=t/2} |w0|/((1+r) phi0)", &sups, slope_of(ts, &sups), -1.5, 0.15));
            let ks: Vec<f64> = rep.large.iter().map(|r| r.ks_inner).collect();
            m.insert("kunze_stein".into(), verdict("Kunze-Stein integral of w0 on r <= t/2", &ks, rep.ks_slope, -1.5, 0.2));
            let comb: Vec<f64> = rep.large.iter().map(|r| r.combined).collect();
            m.insert("combined".into(), verdict("inner + outer + sup |w~inf|", &comb, rep.large_slope, -1.5, 0.2));
        }
        Regime::Small => {
            let opts = KernelOptions { tol: cfg.tol, ..KernelOptions::default() };
            let vals = ts.iter().map(|&t| kernel_winf_with(p, &sig, t, 1.0, &opts).map(|s| s.value.norm())).collect::<hyperkg::Result<Vec<_>>>()?;
            m.insert("regime".into(), json!("small"));
            m.insert("rows".into(), serde_json::to_value(&rep.small).expect("rows serialize"));
            m.insert("kernel".into(), verdict("|w~inf(t, r=1)|", &vals, slope_of(ts, &vals), -(nf - 1.0) / 2.0, 0.15));
            if p.n() == 2 {
                let corrected: Vec<f64> = ts.iter().zip(&vals).map(|(&t, &v)| v / (1.0 - t.ln())).collect();
                m.insert("kernel_log_corrected".into(), verdict("|w~inf(t, r=1)| / (1 - log t)", &corrected, slope_of(ts, &corrected), -0.5, 0.15));
            }
            let prox: Vec<f64> = rep.small.iter().map(|r| r.combined).collect();
            m.insert("proxy".into(), verdict("(sup_{r<=3} |w~inf|)^{1-2/q}", &prox, rep.small_slope, -(nf - 1.0) * (0.5 - 1.0 / q), 0.2));
        }
    }
    Ok(Output::Report(out))
}

fn opt(x: Option<f64>) -> f64 {
    x.unwrap_or(f64::NAN)
}

fn exponents(ns: &[usize], check: bool) -> Res<(Output, bool)> {
    let mut t = Table::new(&["n", "gamma0", "gamma1", "gamma2", "gamma_conf", "gamma3", "gamma4"]);
    for &n in ns {
        let c = critical_powers(n)?;
        t.rows.push(vec![n as f64, c.gamma0, c.gamma1, c.gamma2, c.gamma_conf, opt(c.gamma3), opt(c.gamma4)]);
    }
    let mut ok = true;
    if check {
        let dev = acceptance::table_deviation()?;
        ok = dev <= 1e-9;
        t.meta("table_max_deviation", num(dev));
        t.meta("table_matches", ok);
    }
    Ok((Output::Table(t), ok))
}

fn admissible(n: usize, inv_p: f64, inv_q: f64) -> Output {
    let sigma = sigma_pq(n, inv_p, inv_q).ok();
    Output::Report(json!({
        "n": n,
        "inv_p": num(inv_p),
        "inv_q": num(inv_q),
        "admissible": is_admissible(n, inv_p, inv_q),
        "sigma": sigma.map(num).unwrap_or(Value::Null),
    }))
}

fn branch_code(b: Branch) -> f64 {
    match b {
        Branch::NearOne => 0.0,
        Branch::Sigma1 => 1.0,
        Branch::Sigma2 => 2.0,
        Branch::Sigma3 => 3.0,
    }
}

/// Powers in `(1, top]` at `samples` equal steps, merged with the critical powers below `top`.
fn gamma_samples(marks: &[f64], top: f64, samples: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (1..=samples.max(1)).map(|k| 1.0 + (top - 1.0) * k as f64 / samples.max(1) as f64).collect();
    g.extend(marks.iter().filter(|&&m| m > 1.0 && m < top));
    g.sort_by(f64::total_cmp);
    g.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    g
}

fn figure(n: usize, id: FigureId, samples: usize) -> Res<Output> {
    let c = critical_powers(n)?;
    let nf = n as f64;
    // in dimension 2 the ladder joins sit at 2, 3 and gamma_conf = 5
    let mut marks = if n == 2 { vec![2.0, 3.0, c.gamma_conf] } else { vec![c.gamma1, c.gamma2, c.gamma_conf] };
    marks.extend(c.gamma3);
    marks.extend(c.gamma4);
    // beyond gamma_conf = 5 in dimension 2 the ladder stays on its last branch
    let top = c.gamma4.unwrap_or(8.0);
    let mut t;
    match id {
        FigureId::Admissibility => {
            t = Table::new(&["inv_p", "inv_q", "edge_included"]);
            if n == 2 {
                t.rows = vec![vec![0.0, 0.5, 0.0], vec![0.5, 0.5, 1.0], vec![0.5, 0.0, 0.0], vec![0.25, 0.0, 0.0]];
            } else {
                t.rows = vec![vec![0.0, 0.5, 0.0], vec![0.5, 0.5, 1.0], vec![0.5, 0.5 - 1.0 / (nf - 1.0), 1.0]];
            }
            t.meta("closed_polygon", true);
            t.meta("edge_included", "edge from this vertex to the next");
            t.meta("isolated_point", json!([0.0, 0.5]));
        }
        FigureId::Lwp => {
            t = Table::new(&["gamma", "sigma1", "sigma2", "sigma3"]);
            for g in gamma_samples(&marks, top, samples) {
                let (a, b, s) = regularity_curves(n, g).unwrap_or((f64::NAN, f64::NAN, f64::NAN));
                t.rows.push(vec![g, a, b, s]);
            }
            t.meta("display_only", true);
        }
        FigureId::Gwp => {
            t = Table::new(&["gamma", "sigma_min", "branch", "infimum_open"]);
            let rows = gamma_samples(&marks, top, samples)
                .par_iter()
                .map(|&g| {
                    let r = min_regularity(n, g)?;
                    Ok(vec![g, r.sigma_min, branch_code(r.branch), if r.infimum_open { 1.0 } else { 0.0 }])
                })
                .collect::<hyperkg::Result<Vec<_>>>()?;
            t.rows = rows;
            t.meta("branch_codes", "0 near_one, 1 sigma1, 2 sigma2, 3 sigma3");
        }
    }
    t.meta("n", n);
    t.meta("joins", marks.iter().map(|&m| num(m)).collect::<Vec<_>>());
    t.meta("gamma1", num(c.gamma1));
    t.meta("gamma2", num(c.gamma2));
    t.meta("gamma_conf", num(c.gamma_conf));
    t.meta("gamma3", c.gamma3.map(num).unwrap_or(Value::Null));
    t.meta("gamma4", c.gamma4.map(num).unwrap_or(Value::Null));
    Ok(Output::Table(t))
}
