use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use bandedge::{Method, SystemParams, TimeGrid};

use crate::args::{FormatArg, MethodArg, OutputArgs, ParamArgs};
use crate::CliError;

/// Fully resolved settings for one trace.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: SystemParams,
    pub grid: TimeGrid,
    pub method: MethodArg,
    pub output_path: Option<PathBuf>,
    pub format: FormatArg,
}

const KEYS: [&str; 9] = [
    "beta",
    "gamma",
    "delta",
    "delta_g",
    "omega",
    "chi_prefactor",
    "t_max",
    "steps",
    "method",
];

/// Parse a flat `key = value` file. Blank lines and `#` comments are skipped;
/// `-` in keys is read as `_`.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::config(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let key = key.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::config(format!(
                "config line {}: unknown key `{key}`",
                lineno + 1
            )));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

fn number<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    map.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| CliError::config(format!("config key `{key}`: cannot parse `{v}`")))
        })
        .transpose()
}

fn load(path: Option<&Path>) -> Result<BTreeMap<String, String>, CliError> {
    match path {
        None => Ok(BTreeMap::new()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                CliError::config(format!("cannot read config {}: {e}", p.display()))
            })?;
            parse_config(&text)
        }
    }
}

/// Parameters after merging defaults, config file and flags.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub params: SystemParams,
    pub t_max: f64,
    /// Only set when given by a flag or the config file.
    pub steps: Option<usize>,
    pub method: Option<MethodArg>,
}

impl Resolved {
    pub fn grid(&self) -> Result<TimeGrid, CliError> {
        Ok(TimeGrid::new(
            self.t_max,
            self.steps.unwrap_or(TimeGrid::default().n_steps),
        )?)
    }
}

/// Merge defaults, config file and flags (in increasing precedence) and
/// validate the physical parameters.
pub fn resolve_params(args: &ParamArgs) -> Result<Resolved, CliError> {
    let file = load(args.config.as_deref())?;
    let d = SystemParams::default();
    let pick = |flag: Option<f64>, key: &str, default: f64| -> Result<f64, CliError> {
        Ok(match flag {
            Some(v) => v,
            None => number(&file, key)?.unwrap_or(default),
        })
    };
    let params = SystemParams {
        beta: pick(args.beta, "beta", d.beta)?,
        gamma: pick(args.gamma, "gamma", d.gamma)?,
        delta: pick(args.delta, "delta", d.delta)?,
        delta_g: pick(args.delta_g, "delta_g", d.delta_g)?,
        omega_rabi: pick(args.omega, "omega", d.omega_rabi)?,
        chi_prefactor: pick(args.chi_prefactor, "chi_prefactor", d.chi_prefactor)?,
    };
    params.validate()?;
    let t_max = pick(args.t_max, "t_max", TimeGrid::default().t_max)?;
    let steps = match args.steps {
        Some(n) => Some(n),
        None => number(&file, "steps")?,
    };
    let method = match file.get("method") {
        None => None,
        Some(m) => Some(
            <MethodArg as clap::ValueEnum>::from_str(m, true).map_err(|_| {
                CliError::config(format!("config key `method`: unknown method `{m}`"))
            })?,
        ),
    };
    Ok(Resolved {
        params,
        t_max,
        steps,
        method,
    })
}

/// Format from the file extension, if it names one we write.
fn format_from_extension(path: &Path) -> Option<FormatArg> {
    match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
        "csv" => Some(FormatArg::Csv),
        "json" => Some(FormatArg::Json),
        _ => None,
    }
}

pub fn resolve_format(flag: Option<FormatArg>, path: Option<&Path>) -> Result<FormatArg, CliError> {
    let ext = path.and_then(format_from_extension);
    match (flag, ext) {
        (Some(f), Some(e)) if f != e => Err(CliError::config(format!(
            "--format {} does not match output file {}",
            format_name(f),
            path.unwrap().display()
        ))),
        (Some(f), _) => Ok(f),
        (None, Some(e)) => Ok(e),
        (None, None) => Ok(FormatArg::Csv),
    }
}

pub fn format_name(f: FormatArg) -> &'static str {
    match f {
        FormatArg::Csv => "csv",
        FormatArg::Json => "json",
    }
}

pub fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::ClosedForm => Method::ClosedForm.as_str(),
        MethodArg::Volterra => Method::VolterraPerturbative.as_str(),
        MethodArg::Both => "both",
    }
}

impl RunConfig {
    pub fn resolve(
        params: &ParamArgs,
        output: &OutputArgs,
        output_path: Option<PathBuf>,
    ) -> Result<Self, CliError> {
        let r = resolve_params(params)?;
        let method = output.method.or(r.method).unwrap_or(MethodArg::ClosedForm);
        let format = resolve_format(output.format, output_path.as_deref())?;
        Ok(RunConfig {
            params: r.params,
            grid: r.grid()?,
            method,
            output_path,
            format,
        })
    }
}
