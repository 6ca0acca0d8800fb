use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Arg, ArgAction, ArgMatches, Command};
use serde_json::{json, Value};

use crate::params::CommandKind;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A linear grid `start..=stop` with `points` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    fn parse(what: &str, vals: &[String]) -> Result<Self, CliError> {
        let num = |s: &String| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Config(format!("{what}: `{s}` is not a finite number")))
        };
        let points = vals[2]
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("{what}: `{}` is not a point count", vals[2])))?;
        let g = Grid { start: num(&vals[0])?, stop: num(&vals[1])?, points };
        if g.points < 2 {
            return Err(CliError::Config(format!("{what}: need at least 2 points")));
        }
        Ok(g)
    }

    pub fn values(&self) -> Vec<f64> {
        cvtri::numeric::linspace(self.start, self.stop, self.points)
    }

    fn to_json(self) -> Value {
        json!({ "start": self.start, "stop": self.stop, "points": self.points })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: String,
    pub grid: Grid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    /// Every parameter of the command, defaults filled in.
    pub params: BTreeMap<String, f64>,
    pub sweep: Option<Sweep>,
    pub omega_grid: Option<Grid>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub seed: u64,
    /// Worker threads; does not affect results.
    pub threads: Option<usize>,
}

impl RunConfig {
    /// Defaults for `command`.
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            params: command.params().iter().map(|p| (p.key.to_string(), p.default)).collect(),
            sweep: None,
            omega_grid: command.default_omega_grid().map(|(start, stop, points)| Grid { start, stop, points }),
            format: Format::Csv,
            output: None,
            seed: 0,
            threads: None,
        }
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<(), CliError> {
        let key = key.replace('_', "-");
        match self.params.get_mut(&key) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(CliError::Config(format!("unknown parameter `{key}` for {}", self.command))),
        }
    }

    pub fn param(&self, key: &str) -> f64 {
        self.params[key]
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (k, v) in &self.params {
            if !v.is_finite() {
                return Err(CliError::Config(format!("parameter `{k}` must be finite")));
            }
        }
        if let Some(s) = &self.sweep {
            if !self.command.sweepable() {
                return Err(CliError::Config(format!("{} does not take a sweep", self.command)));
            }
            if !self.params.contains_key(&s.axis) {
                return Err(CliError::Config(format!("unknown sweep axis `{}` for {}", s.axis, self.command)));
            }
        }
        if self.omega_grid.is_some() && self.command.default_omega_grid().is_none() {
            return Err(CliError::Config(format!("{} does not take a frequency grid", self.command)));
        }
        if self.threads == Some(0) {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        Ok(())
    }

    /// Values of the swept parameter, or its single configured value.
    pub fn sweep_values(&self) -> (String, Vec<f64>) {
        match &self.sweep {
            Some(s) => (s.axis.clone(), s.grid.values()),
            None => {
                let axis = self.command.params()[0].key.to_string();
                let v = self.param(&axis);
                (axis, vec![v])
            }
        }
    }

    /// Configuration echo for output headers. Excludes the thread count and
    /// output path, which do not affect results.
    pub fn echo(&self) -> Value {
        json!({
            "command": self.command.name(),
            "parameters": self.params,
            "sweep": self.sweep.as_ref().map(|s| json!({ "axis": s.axis, "grid": s.grid.to_json() })),
            "omega_grid": self.omega_grid.map(Grid::to_json),
            "seed": if self.command.uses_seed() { Some(self.seed) } else { None },
            "format": self.format.name(),
        })
    }
}

fn cli() -> Command {
    let mut root = Command::new("cvtri")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Continuous-variable tripartite entanglement sweeps")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for kind in CommandKind::ALL {
        let mut sub = Command::new(kind.name()).about(kind.about()).allow_negative_numbers(true);
        for p in kind.params() {
            sub = sub.arg(
                Arg::new(p.key)
                    .long(p.key)
                    .value_name("VALUE")
                    .value_parser(clap::value_parser!(f64))
                    .help(format!("{} [default: {}]", p.help, p.default)),
            );
        }
        if kind.sweepable() {
            sub = sub.arg(
                Arg::new("sweep")
                    .long("sweep")
                    .num_args(4)
                    .value_names(["AXIS", "START", "STOP", "POINTS"])
                    .help("sweep one parameter over a linear grid"),
            );
        }
        if let Some((a, b, n)) = kind.default_omega_grid() {
            sub = sub.arg(
                Arg::new("omega-grid")
                    .long("omega-grid")
                    .num_args(3)
                    .value_names(["START", "STOP", "POINTS"])
                    .help(format!("frequency grid [default: {a} {b} {n}]")),
            );
        }
        if kind.uses_seed() {
            sub = sub.arg(
                Arg::new("seed").long("seed").value_parser(clap::value_parser!(u64)).help("RNG seed [default: 0]"),
            );
        }
        sub = sub
            .arg(Arg::new("config").long("config").value_name("FILE").help("flat JSON file of parameters"))
            .arg(Arg::new("output").long("output").short('o').value_name("PATH").help("output file (default stdout)"))
            .arg(
                Arg::new("format")
                    .long("format")
                    .value_parser(["csv", "json"])
                    .default_value("csv")
                    .action(ArgAction::Set),
            )
            .arg(
                Arg::new("threads")
                    .long("threads")
                    .value_parser(clap::value_parser!(usize))
                    .help("worker threads (results do not depend on it)"),
            );
        root = root.subcommand(sub);
    }
    root
}

/// Merges a flat JSON object into `cfg`. Keys are parameter names or `seed`.
pub fn apply_config_file(cfg: &mut RunConfig, text: &str) -> Result<(), CliError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Config(format!("config file: {e}")))?;
    let obj = doc.as_object().ok_or_else(|| CliError::Config("config file must hold a JSON object".into()))?;
    for (key, val) in obj {
        if key == "seed" {
            if !cfg.command.uses_seed() {
                return Err(CliError::Config(format!("{} does not take a seed", cfg.command)));
            }
            cfg.seed = val.as_u64().ok_or_else(|| CliError::Config("seed must be a non-negative integer".into()))?;
            continue;
        }
        let v = val.as_f64().ok_or_else(|| CliError::Config(format!("config key `{key}` must be a number")))?;
        cfg.set(key, v)?;
    }
    Ok(())
}

fn from_matches(kind: CommandKind, m: &ArgMatches) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::new(kind);
    if let Some(path) = m.get_one::<String>("config") {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("reading {path}: {e}")))?;
        apply_config_file(&mut cfg, &text)?;
    }
    for p in kind.params() {
        if let Some(v) = m.get_one::<f64>(p.key) {
            cfg.set(p.key, *v)?;
        }
    }
    if kind.sweepable() {
        if let Some(vals) = m.get_many::<String>("sweep") {
            let vals: Vec<String> = vals.cloned().collect();
            let grid = Grid::parse("--sweep", &vals[1..])?;
            cfg.sweep = Some(Sweep { axis: vals[0].replace('_', "-"), grid });
        }
    }
    if kind.default_omega_grid().is_some() {
        if let Some(vals) = m.get_many::<String>("omega-grid") {
            let vals: Vec<String> = vals.cloned().collect();
            cfg.omega_grid = Some(Grid::parse("--omega-grid", &vals)?);
        }
    }
    if kind.uses_seed() {
        if let Some(s) = m.get_one::<u64>("seed") {
            cfg.seed = *s;
        }
    }
    cfg.output = m.get_one::<String>("output").map(PathBuf::from);
    cfg.format = match m.get_one::<String>("format").map(String::as_str) {
        Some("json") => Format::Json,
        _ => Format::Csv,
    };
    cfg.threads = m.get_one::<usize>("threads").copied();
    cfg.validate()?;
    Ok(cfg)
}

/// What the command line asked for.
pub enum Parsed {
    Run(RunConfig),
    /// Help or version text; print it and exit successfully.
    Info(String),
}

pub fn parse_args<I, T>(args: I) -> Result<Parsed, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Parsed::Info(e.to_string())),
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => Err(CliError::Config(e.to_string())),
                _ => Err(CliError::Config(e.to_string())),
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let kind = CommandKind::from_name(name).expect("registered subcommand");
    from_matches(kind, sub).map(Parsed::Run)
}
