//! Subcommand implementations. Each returns `Ok(passed)`; errors map to
//! exit codes through [`error_code`].

use crate::config::{parse_gauge, parse_scheme, BoundarySection, MinimizeConfig, StartSection};
use crate::{Cli, Command, FlatnessArgs, Functional, MinimizeArgs};
use anyhow::{bail, Context, Result};
use csdual::chern_simons::{cs_action, cs_gradient, cs_report, cubic_demo, flatness_residual};
use csdual::dual_quadratic::{dual_action, dual_gradient, evaluate, QuadDualProblem};
use csdual::gradcheck::{check_gradient, DEFAULT_STEPS};
use csdual::lie::verify_identities;
use csdual::pointwise::{
    g_quadratic_closed, g_sup_oracle, scan_rows, certify_bounds, witness_lower_bound, GParams,
    OracleOptions,
};
use csdual::snapshot;
use csdual::tilde::{minimize, tilde_action, tilde_gradient};
use csdual::{BoundaryField, BoxGrid, CoeffField, Mat3, RunReport, Scheme};
use serde_json::{json, Value};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub fn run(cli: &Cli) -> Result<bool> {
    let scheme = parse_scheme(&cli.scheme)?;
    match &cli.command {
        Command::AlgebraVerify => emit(&verify_identities()),
        Command::CsEval { field } => cs_eval(field, scheme),
        Command::CsCubicDemo { n, t, tol, json } => cs_cubic_demo(*n, t, *tol, *json, scheme),
        Command::Flatness(args) => flatness(args, scheme),
        Command::DualEval { lambda, abar, ab, k } => {
            dual_eval(lambda, abar.as_deref(), ab.as_deref(), *k, scheme)
        }
        Command::DualGradcheck {
            functional,
            n,
            seed,
            directions,
            tol,
            alpha,
        } => gradcheck(*functional, *n, *seed, *directions, *tol, *alpha, scheme),
        Command::GEval { lambda, mu, alpha, ell } => g_eval(lambda, mu, *alpha, *ell),
        Command::GScan {
            alpha,
            samples,
            seed,
            csv,
            quartic,
        } => g_scan(*alpha, *samples, *seed, csv.as_deref(), *quartic),
        Command::DualMinimize(args) => dual_minimize(args, scheme),
        Command::FieldInfo { file } => field_info(file),
        Command::FieldExport { file, out } => field_export(file, out.as_deref(), scheme),
    }
}

/// 1 for numerical failures of a well-posed run, 2 for bad input.
pub fn error_code(err: &anyhow::Error) -> u8 {
    use csdual::Error as E;
    match err.downcast_ref::<E>() {
        Some(
            E::SingularK { .. }
            | E::InfiniteValue { .. }
            | E::LineSearchFailure { .. }
            | E::ConventionError { .. }
            | E::NotUnitary { .. },
        ) => 1,
        _ => 2,
    }
}

fn emit(rep: &RunReport) -> Result<bool> {
    let mut out = std::io::stdout().lock();
    ignore_broken_pipe(writeln!(out, "{}", rep.to_json()))?;
    Ok(rep.passed)
}

fn ignore_broken_pipe(r: std::io::Result<()>) -> std::io::Result<()> {
    match r {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other,
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn unit_grid(n: usize, scheme: Option<Scheme>) -> Result<BoxGrid> {
    let (o, e) = ([0.0; 3], [1.0; 3]);
    Ok(match scheme {
        Some(s) => BoxGrid::with_scheme(o, e, [n; 3], s)?,
        None => BoxGrid::new(o, e, [n; 3])?,
    })
}

fn load(path: &Path, scheme: Option<Scheme>) -> Result<CoeffField> {
    snapshot::load(path, scheme).with_context(|| format!("cannot load snapshot {}", path.display()))
}

fn save(path: &Path, field: &CoeffField) -> Result<()> {
    snapshot::save(path, field).with_context(|| format!("cannot write snapshot {}", path.display()))
}

fn cs_eval(path: &Path, scheme: Option<Scheme>) -> Result<bool> {
    let a = load(path, scheme)?;
    let mut rep = RunReport::new("cs-eval");
    let r = cs_report(&a);
    rep.set("action", r.action);
    rep.set("residual_linf", r.residual_linf);
    rep.set("residual_l2", r.residual_l2);
    rep.set("scheme", a.grid.scheme.name());
    emit(&rep)
}

fn cs_cubic_demo(n: usize, ts: &[f64], tol: f64, as_json: bool, scheme: Option<Scheme>) -> Result<bool> {
    if !(tol > 0.0) {
        bail!("--tol must be positive");
    }
    let grid = unit_grid(n, scheme)?;
    let demo = cubic_demo(&grid, ts).context("need at least four distinct sample points")?;
    let mut rep = RunReport::new("cs-cubic-demo");
    rep.check_le("cubic_coefficient_relative_error", demo.relative_error, tol);
    rep.set("n", n);
    rep.set("cubic_coefficient", demo.fit.coeffs[3]);
    rep.set("predicted", demo.predicted_t3);
    rep.set("coefficients", demo.fit.coeffs.to_vec());
    rep.set("fit_residual", demo.fit.residual);
    rep.set(
        "samples",
        demo.samples.iter().map(|(t, s)| json!([t, s])).collect::<Vec<_>>(),
    );
    if as_json {
        return emit(&rep);
    }
    let mut text = String::from("t,action\n");
    for (t, s) in &demo.samples {
        text += &format!("{t},{s}\n");
    }
    text += &format!("# cubic_coefficient,{}\n", demo.fit.coeffs[3]);
    text += &format!("# predicted,{}\n", demo.predicted_t3);
    text += &format!("# relative_error,{}\n", demo.relative_error);
    ignore_broken_pipe(std::io::stdout().lock().write_all(text.as_bytes()))?;
    Ok(rep.passed)
}

fn flatness(args: &FlatnessArgs, scheme: Option<Scheme>) -> Result<bool> {
    let (a, source) = match (&args.field, &args.gauge) {
        (Some(p), _) => (load(p, scheme)?, json!({ "snapshot": p.display().to_string() })),
        (None, Some(spec)) => {
            let g = parse_gauge(spec)?;
            let grid = unit_grid(args.n, scheme)?;
            (g.field(&grid)?, json!({ "gauge": spec, "n": args.n }))
        }
        (None, None) => bail!("one of --field or --gauge is required"),
    };
    let r = flatness_residual(&a);
    let mut rep = RunReport::new("flatness");
    let interior = r.linf_interior();
    if let Some(tol) = args.tol {
        rep.check_le("residual_interior_linf", interior, tol);
    }
    rep.set("source", source);
    rep.set("scheme", a.grid.scheme.name());
    rep.set("residual_linf", r.linf());
    rep.set("residual_interior_linf", interior);
    rep.set("residual_l2", r.l2());
    if let Some(p) = &args.out {
        save(p, &r)?;
    }
    if let Some(p) = &args.save_field {
        save(p, &a)?;
    }
    emit(&rep)
}

fn dual_eval(
    lambda: &Path,
    abar: Option<&Path>,
    ab: Option<&Path>,
    k: Option<f64>,
    scheme: Option<Scheme>,
) -> Result<bool> {
    let lam = load(lambda, scheme)?;
    let grid = lam.grid;
    let abar = match abar {
        Some(p) => load(p, Some(grid.scheme))?,
        None => CoeffField::zeros(grid),
    };
    let ab = match ab {
        Some(p) => BoundaryField::trace(&load(p, Some(grid.scheme))?),
        None => BoundaryField::zeros(grid),
    };
    let k = k.unwrap_or_else(|| QuadDualProblem::default_k(&lam));
    let prob = QuadDualProblem::new(abar, ab, k)?;
    let ev = evaluate(&lam, &prob)?;
    let mut rep = RunReport::new("dual-eval");
    rep.set("k", k);
    rep.set("S", ev.value);
    for (key, v) in to_value(&ev).as_object().expect("struct").iter() {
        if key != "value" {
            rep.set(key.clone(), v.clone());
        }
    }
    emit(&rep)
}

fn gradcheck(
    functional: Functional,
    n: usize,
    seed: u64,
    directions: usize,
    tol: f64,
    alpha: f64,
    scheme: Option<Scheme>,
) -> Result<bool> {
    if directions == 0 || !(tol > 0.0) {
        bail!("--directions and --tol must be positive");
    }
    let grid = unit_grid(n, scheme)?;
    let dir_seed = seed.wrapping_add(1000);
    let field = |amp: f64, k: u64| CoeffField::random_smooth(grid, amp, seed.wrapping_mul(16).wrapping_add(k));
    let check = match functional {
        Functional::Cs => {
            let a = field(0.5, 1);
            check_gradient(cs_action, &a, &cs_gradient(&a), directions, dir_seed, &DEFAULT_STEPS, true)
        }
        Functional::Dual => {
            let lam = field(0.1, 3);
            let prob = QuadDualProblem::new(
                field(0.3, 1),
                BoundaryField::trace(&field(0.3, 2)),
                QuadDualProblem::default_k(&lam),
            )?;
            let g = dual_gradient(&lam, &prob)?;
            check_gradient(
                |l| dual_action(l, &prob).unwrap_or(f64::NAN),
                &lam,
                &g,
                directions,
                dir_seed,
                &DEFAULT_STEPS,
                false,
            )
        }
        Functional::Tilde => {
            let params = GParams::certified(alpha)?;
            let ab = BoundaryField::trace(&field(0.3, 2));
            let lam = field(0.05, 3);
            let g = tilde_gradient(&lam, &params, &ab)?;
            check_gradient(
                |l| tilde_action(l, &params, &ab).unwrap_or(f64::NAN),
                &lam,
                &g,
                directions,
                dir_seed,
                &DEFAULT_STEPS,
                false,
            )
        }
    };
    let mut rep = RunReport::new("dual-gradcheck");
    rep.check_le("max_relative_error", check.max_rel_error, tol);
    rep.set("functional", format!("{functional:?}").to_lowercase());
    rep.set("n", n);
    rep.set("seed", seed);
    rep.set("check", to_value(&check));
    emit(&rep)
}

fn mat9(v: &[f64], name: &str) -> Result<Mat3> {
    if v.len() != 9 {
        bail!("--{name} needs exactly 9 values, got {}", v.len());
    }
    if v.iter().any(|x| !x.is_finite()) {
        bail!("--{name} has non-finite entries");
    }
    Ok(Mat3::from_row_slice(v))
}

fn params_for(alpha: f64, ell: Option<f64>) -> Result<GParams> {
    Ok(match ell {
        Some(l) => GParams::new(alpha, l)?,
        None => GParams::certified(alpha)?,
    })
}

fn g_eval(lambda: &[f64], mu: &[f64], alpha: f64, ell: Option<f64>) -> Result<bool> {
    let lam = mat9(lambda, "lambda")?;
    let mu = mat9(mu, "mu")?;
    let params = params_for(alpha, ell)?;
    let g = if params.alpha == 2.0 {
        g_quadratic_closed(&lam, &mu, params.ell)
    } else {
        g_sup_oracle(&lam, &mu, &params, &OracleOptions::default())
    };
    let mut rep = RunReport::new("g-eval");
    let tol = OracleOptions::default().tol;
    rep.push("converged", g.stationarity, tol, g.converged, None);
    rep.set("alpha", params.alpha);
    rep.set("ell", params.ell);
    rep.set("g", to_value(&g));
    rep.set("witness_lower_bound", witness_lower_bound(&lam, &mu, &params));
    rep.set("bound", params.bound(&lam, &mu));
    emit(&rep)
}

fn g_scan(alpha: f64, samples: usize, seed: u64, csv: Option<&Path>, quartic: bool) -> Result<bool> {
    if samples == 0 {
        bail!("--samples must be positive");
    }
    let params = if quartic {
        if alpha != 4.0 {
            bail!("--quartic requires --alpha 4");
        }
        GParams::quartic_sharp()
    } else {
        GParams::certified(alpha)?
    };
    let rep = certify_bounds(&params, samples, seed)?;
    if let Some(path) = csv {
        let mut w = BufWriter::new(File::create(path).with_context(|| format!("cannot write {}", path.display()))?);
        writeln!(w, "lambda_norm,mu_norm,g,bound,slack")?;
        for r in scan_rows(&params, samples, seed) {
            writeln!(w, "{},{},{},{},{}", r[0], r[1], r[2], r[3], r[4])?;
        }
        w.flush()?;
    }
    emit(&rep)
}

fn dual_minimize(args: &MinimizeArgs, scheme: Option<Scheme>) -> Result<bool> {
    let mut cfg = MinimizeConfig::load(&args.config)?;
    if let Some(n) = args.n {
        cfg.grid.n = n;
    }
    if let Some(a) = args.alpha {
        cfg.functional.alpha = a;
    }
    if args.ell.is_some() {
        cfg.functional.ell = args.ell;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(m) = args.max_iters {
        cfg.solver.max_iters = Some(m);
    }
    if let Some(o) = &args.out {
        cfg.output.dir = o.clone();
    }
    if scheme.is_some() {
        cfg.grid.scheme = scheme.map(|s| s.name().to_string()).unwrap_or_default();
    }
    cfg.validate()?;

    let n = [cfg.grid.n; 3];
    let grid = match cfg.scheme()? {
        Some(s) => BoxGrid::with_scheme(cfg.grid.origin, cfg.grid.extent, n, s)?,
        None => BoxGrid::new(cfg.grid.origin, cfg.grid.extent, n)?,
    };
    let params = params_for(cfg.functional.alpha, cfg.functional.ell)?;
    let opts = cfg.solver.options();
    opts.validate(&params)?;

    let ab = match &cfg.boundary {
        BoundarySection::Zero => BoundaryField::zeros(grid),
        BoundarySection::PureGauge { factors } => {
            let g = crate::config::gauge_from_specs(factors)?;
            BoundaryField::trace(&g.field(&grid)?)
        }
        BoundarySection::Snapshot { path } => {
            let f = load(path, Some(grid.scheme))?;
            grid.ensure_same(&f.grid)?;
            BoundaryField::trace(&f)
        }
    };
    let lam0 = match &cfg.start {
        StartSection::Zero => CoeffField::zeros(grid),
        StartSection::Random { amplitude } => CoeffField::random_smooth(grid, *amplitude, cfg.seed),
        StartSection::Snapshot { path } => {
            let f = load(path, Some(grid.scheme))?;
            grid.ensure_same(&f.grid)?;
            f
        }
    };

    let (lam, report) = minimize(&lam0, &params, &ab, &opts)?;
    let astar = csdual::tilde::recover_primal(&lam, &params)?;

    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    save(&dir.join("lambda.csdf"), &lam)?;
    save(&dir.join("astar.csdf"), &astar)?;
    let mut w = BufWriter::new(File::create(dir.join("history.csv"))?);
    writeln!(w, "iter,value,grad_linf")?;
    for h in &report.history {
        writeln!(w, "{},{},{}", h.iter, h.value, h.grad_linf)?;
    }
    w.flush()?;

    let mut rep = RunReport::new("dual-minimize");
    rep.push(
        "converged",
        report.final_projected_grad_linf,
        opts.grad_tol.max(opts.rel_grad_tol * report.initial_grad_linf),
        report.converged,
        Some(format!("{:?}", report.stop_reason)),
    );
    rep.push("monotone", 0.0, 0.0, report.monotone, None);
    let mut summary = to_value(&report);
    summary.as_object_mut().expect("struct").remove("history");
    rep.set("minimize", summary);
    rep.set("options", to_value(&opts));
    rep.set(
        "problem",
        json!({
            "n": cfg.grid.n,
            "extent": cfg.grid.extent,
            "origin": cfg.grid.origin,
            "scheme": grid.scheme.name(),
            "alpha": params.alpha,
            "ell": params.ell,
            "seed": cfg.seed,
        }),
    );
    std::fs::write(dir.join("report.json"), rep.to_json() + "\n")?;
    emit(&rep)
}

fn field_info(path: &Path) -> Result<bool> {
    let hdr = snapshot::load_header(path).with_context(|| format!("cannot read {}", path.display()))?;
    let f = load(path, None)?;
    let mut rep = RunReport::new("field-info");
    rep.set("header", to_value(&hdr));
    rep.set("nodes", f.grid.len());
    rep.set("linf", f.linf());
    rep.set("l2", f.l2());
    emit(&rep)
}

fn field_export(path: &Path, out: Option<&Path>, scheme: Option<Scheme>) -> Result<bool> {
    let f = load(path, scheme)?;
    match out {
        Some(p) => snapshot::write_csv(BufWriter::new(File::create(p)?), &f)?,
        None => match snapshot::write_csv(std::io::stdout().lock(), &f) {
            Err(csdual::Error::Io(m)) if m.contains("Broken pipe") => {}
            r => r?,
        },
    }
    Ok(true)
}
