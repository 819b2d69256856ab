use std::io::Write;
use std::path::Path;

use bandedge::analysis::{min, settling_time};
use bandedge::kernels::laplace_by_quadrature;
use bandedge::polyroots::{build_cubic, build_quintic, find_roots, ComplexPolynomial};
use bandedge::volterra::{self, SolverConfig};
use bandedge::{
    build_root_system, solve_closed_form, steady_state_value, AmplitudeTrace, Error, KernelSpec,
    SystemParams, TimeGrid,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use crate::args::{
    FormatArg, KernelArg, MethodArg, ParamArgs, SweepArgs, SweepParam, TraceArgs, ValidateArgs,
};
use crate::config::{format_name, method_name, resolve_params, RunConfig};
use crate::table::{gnuplot_script, write_atomic, Table};
use crate::CliError;

fn volterra_trace(params: &SystemParams, grid: TimeGrid) -> Result<AmplitudeTrace, Error> {
    volterra::solve_perturbative(
        params,
        &KernelSpec::from_params(params),
        &SolverConfig::perturbative(grid),
    )
}

/// Evaluate the configured method(s) on the configured grid.
pub fn compute_table(cfg: &RunConfig) -> Result<Table, CliError> {
    if let Some(w) = cfg.params.perturbative_warning() {
        log::warn!("{w}");
    }
    let p = &cfg.params;
    Ok(match cfg.method {
        MethodArg::ClosedForm => Table::single(p, &solve_closed_form(p, &cfg.grid)?),
        MethodArg::Volterra => Table::single(p, &volterra_trace(p, cfg.grid)?),
        MethodArg::Both => {
            let closed = solve_closed_form(p, &cfg.grid)?;
            let oracle = volterra_trace(p, cfg.grid)?;
            Table::both(p, &closed, &oracle)
        }
    })
}

fn render(cfg: &RunConfig, table: &Table) -> Result<String, CliError> {
    table.render(cfg.format, method_name(cfg.method), &cfg.params, &cfg.grid)
}

pub fn trace(args: &TraceArgs) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&args.params, &args.output, args.output_path.clone())?;
    if args.gnuplot.is_some() && (cfg.output_path.is_none() || cfg.format != FormatArg::Csv) {
        return Err(CliError::config("--gnuplot needs a csv --output file"));
    }
    let table = compute_table(&cfg)?;
    let text = render(&cfg, &table)?;
    match &cfg.output_path {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))?;
        }
    }
    if let (Some(script), Some(data)) = (&args.gnuplot, &cfg.output_path) {
        write_atomic(
            script,
            gnuplot_script(data, cfg.method == MethodArg::Both).as_bytes(),
        )?;
    }
    Ok(())
}

pub fn parse_values(s: &str) -> Result<Vec<f64>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("--values: cannot parse `{}`", v.trim())))
        })
        .collect()
}

fn with_value(mut p: SystemParams, which: SweepParam, v: f64) -> SystemParams {
    match which {
        SweepParam::Gamma => p.gamma = v,
        SweepParam::Delta => p.delta = v,
        SweepParam::DeltaG => p.delta_g = v,
        SweepParam::Omega => p.omega_rabi = v,
    }
    p
}

/// Per-value summary written to the sweep index.
#[derive(Debug, Clone)]
struct SweepEntry {
    file: String,
    max_abs_b1: f64,
    min_neg_im_chi: f64,
    settling_time: Option<f64>,
}

fn sweep_one(base: &RunConfig, dir: &Path, file: String) -> Result<SweepEntry, CliError> {
    base.params.validate()?;
    let table = compute_table(base)?;
    let text = render(base, &table)?;
    write_atomic(&dir.join(&file), text.as_bytes())?;
    let re = table.column("re_b1").unwrap();
    let im = table.column("im_b1").unwrap();
    let b1: Vec<Complex64> = re
        .iter()
        .zip(im)
        .map(|(r, i)| Complex64::new(*r, *i))
        .collect();
    let settling = steady_state_value(&base.params).ok().map(|ss| {
        let dist: Vec<f64> = b1.iter().map(|b| (b - ss).norm()).collect();
        settling_time(&base.grid, &dist)
    });
    Ok(SweepEntry {
        file,
        max_abs_b1: b1.iter().map(|b| b.norm()).fold(0.0, f64::max),
        min_neg_im_chi: min(table.column("neg_im_chi").unwrap()),
        settling_time: settling,
    })
}

pub const INDEX_HEADER: &str =
    "index,param,value,file,status,max_abs_b1,min_neg_im_chi,settling_time";

/// Returns whether every value succeeded.
pub fn sweep(args: &SweepArgs) -> Result<bool, CliError> {
    let values = parse_values(&args.values)?;
    let base = RunConfig::resolve(&args.params, &args.output, None)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    let ext = format_name(base.format);
    let name = args.param.name();
    let results: Vec<Result<SweepEntry, CliError>> = pool.install(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| {
                let cfg = RunConfig {
                    params: with_value(base.params, args.param, v),
                    ..base.clone()
                };
                sweep_one(&cfg, &args.out_dir, format!("{name}_{i:03}.{ext}"))
            })
            .collect()
    });

    let mut index = String::from(INDEX_HEADER);
    index.push('\n');
    let mut ok = true;
    for (i, (v, r)) in values.iter().zip(&results).enumerate() {
        match r {
            Ok(e) => {
                let settle = e
                    .settling_time
                    .map_or(String::new(), |t| format!("{t:.16e}"));
                index.push_str(&format!(
                    "{i},{name},{v},{},ok,{:.16e},{:.16e},{settle}\n",
                    e.file, e.max_abs_b1, e.min_neg_im_chi
                ));
            }
            Err(err) => {
                ok = false;
                err.report_with(Some((name, *v)));
                index.push_str(&format!("{i},{name},{v},,{},,,\n", err.kind));
            }
        }
    }
    write_atomic(&args.out_dir.join("index.csv"), index.as_bytes())?;
    Ok(ok)
}

/// One line of the validation report.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    /// true when the value must stay below the tolerance, false when above.
    pub upper: bool,
}

impl Check {
    pub fn below(name: &str, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            upper: true,
        }
    }

    pub fn above(name: &str, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            upper: false,
        }
    }

    pub fn passed(&self) -> bool {
        if self.upper {
            self.value <= self.tolerance
        } else {
            self.value >= self.tolerance
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<28} {:>12.4e} {} {:.1e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            if self.upper { "<=" } else { ">=" },
            self.tolerance
        )
    }
}

fn relative_oracle_error(p: &SystemParams, grid: TimeGrid) -> Result<f64, CliError> {
    let closed = solve_closed_form(p, &grid)?;
    let oracle = volterra_trace(p, grid)?;
    Ok(closed.max_abs_diff(&oracle) / closed.max_abs_b1().max(f64::MIN_POSITIVE))
}

/// `b1(t) = (Omega / D)(1 - e^{iDt})` with `D = delta + i(gamma + gamma_flat)/2`.
pub fn relaxation(p: &SystemParams, gamma_flat: f64, t: f64) -> Complex64 {
    let d = Complex64::new(p.delta, 0.5 * (p.gamma + gamma_flat));
    p.omega_rabi / d * (1.0 - (Complex64::i() * d * t).exp())
}

fn validation_grid(
    t_max: f64,
    steps: Option<usize>,
    step: Option<f64>,
    default_h: f64,
) -> Result<TimeGrid, CliError> {
    Ok(match (step, steps) {
        (Some(h), _) => TimeGrid::with_step(t_max, h)?,
        (None, Some(n)) => TimeGrid::new(t_max, n)?,
        (None, None) => TimeGrid::with_step(t_max, default_h)?,
    })
}

pub fn validate(args: &ValidateArgs) -> Result<Vec<Check>, CliError> {
    let r = resolve_params(&args.params)?;
    let p = r.params;
    let default_h = match args.kernel {
        KernelArg::InverseSqrt => 0.005,
        KernelArg::MarkovianFlat => 0.001,
    };
    let grid = validation_grid(r.t_max, r.steps, args.step, default_h)?;
    SolverConfig::perturbative(grid).validate()?;

    let mut checks = Vec::new();
    match args.kernel {
        KernelArg::InverseSqrt => {
            let coarse = relative_oracle_error(&p, grid)?;
            checks.push(Check::below("oracle_max_rel_error", coarse, 5e-3));
            let fine = relative_oracle_error(&p, TimeGrid::new(grid.t_max, 2 * grid.n_steps)?)?;
            checks.push(Check::above("oracle_halving_ratio", coarse / fine, 2.5));

            let dp = p.delta_g - p.delta;
            let spec = KernelSpec::from_params(&p);
            let mut worst: f64 = 0.0;
            for s in [
                Complex64::new(0.5, 0.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(2.0, -0.5),
            ] {
                let exact = spec.kernel_laplace(s)?;
                let q = laplace_by_quadrature(p.beta, dp, s, 200.0);
                worst = worst.max((q - exact).norm() / exact.norm());
            }
            checks.push(Check::below("kernel_laplace_rel_error", worst, 1e-6));
        }
        KernelArg::MarkovianFlat => {
            if !(args.gamma_flat >= 0.0 && args.gamma_flat.is_finite()) {
                return Err(CliError::config("--gamma-flat must be finite and >= 0"));
            }
            let spec = KernelSpec::MarkovianFlat {
                gamma_flat: args.gamma_flat,
            };
            let amp = volterra::solve_perturbative(&p, &spec, &SolverConfig::perturbative(grid))?;
            let err = grid
                .times()
                .zip(&amp.b1)
                .map(|(t, b)| (b - relaxation(&p, args.gamma_flat, t)).norm())
                .fold(0.0, f64::max);
            checks.push(Check::below("markov_max_abs_error", err, 1e-8));
        }
    }
    Ok(checks)
}

fn pair(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

/// Largest coefficient difference between the quintic and `(x^2 - i delta') * cubic`.
pub fn factorization_error(p: &SystemParams) -> f64 {
    let dp = p.delta_g - p.delta;
    let quad = ComplexPolynomial::new(vec![
        Complex64::new(0.0, -dp),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ])
    .expect("monic");
    let product = quad.mul(&build_cubic(p));
    build_quintic(p)
        .coefficients()
        .iter()
        .zip(product.coefficients())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

pub fn roots(args: &ParamArgs) -> Result<serde_json::Value, CliError> {
    let p = resolve_params(args)?.params;
    let found = find_roots(&build_quintic(&p))?;
    let sum: Complex64 = found.roots.iter().sum();
    let dp = p.delta_g - p.delta;
    let system = match build_root_system(&p) {
        Ok(rs) => Some(rs),
        Err(Error::DegenerateRoots { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let entries: Vec<serde_json::Value> = (0..found.roots.len())
        .map(|k| {
            let x = found.roots[k];
            let mut e = json!({
                "x": pair(x),
                "x_squared": pair(x * x),
                "residual": found.residuals[k],
            });
            if let Some(rs) = &system {
                e["y"] = pair(rs.y[k]);
                e["alpha"] = pair(rs.alpha[k]);
                e["contributing"] = json!(rs.contributing[k]);
            }
            e
        })
        .collect();
    Ok(json!({
        "params": p,
        "delta_prime": dp,
        "roots": entries,
        "sum_of_roots": pair(sum),
        "sum_of_roots_abs": sum.norm(),
        "worst_residual": found.worst_residual(),
        "factorization_error": factorization_error(&p),
        "initial_value_defect": system.as_ref().map(|rs| rs.initial_value_defect().norm()),
        "contributing_count": system.as_ref().map(|rs| rs.contributing_count()),
        // coincident zero roots carry no weight and are not a degeneracy
        "degenerate": system.is_none(),
    }))
}
