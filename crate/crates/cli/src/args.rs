//! Argument parsing: subcommand flags, `--config` files and per-key
//! validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Arg, Command};
use lslab::harness::Family;
use lslab::io::parse_config;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Gen,
    Solve,
    Phase,
    Adaptivity,
    Clique,
}

impl Subcommand {
    pub const ALL: [Subcommand; 5] =
        [Subcommand::Gen, Subcommand::Solve, Subcommand::Phase, Subcommand::Adaptivity, Subcommand::Clique];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Gen => "gen",
            Subcommand::Solve => "solve",
            Subcommand::Phase => "phase",
            Subcommand::Adaptivity => "adaptivity",
            Subcommand::Clique => "clique",
        }
    }

    fn about(self) -> &'static str {
        match self {
            Subcommand::Gen => "Generate a synthetic instance with its ground truth",
            Subcommand::Solve => "Solve one problem read from a matrix bundle",
            Subcommand::Phase => "Run a seeded phase-transition grid",
            Subcommand::Adaptivity => "Compare glasso and lvglasso across hidden-variable counts",
            Subcommand::Clique => "Plant a clique, solve the relaxation and score the estimate",
        }
    }

    /// Keys accepted on the command line and in config files.
    pub fn keys(self) -> Vec<Key> {
        let mut keys: Vec<Key> = match self {
            Subcommand::Gen => vec![
                Key::new("family", Kind::Text, "latent | lowrank | clique | video"),
                Key::new("p", Kind::Int, "observed variables (latent)"),
                Key::new("h", Kind::Int, "hidden variables (latent)"),
                Key::new("degree", Kind::Int, "maximum degree of the conditional graph (latent)"),
                Key::new("strength", Kind::Float, "edge strength (latent)"),
                Key::new("samples", Kind::Int, "sample count for an empirical covariance (latent)"),
                Key::new("n1", Kind::Int, "rows (lowrank, video)"),
                Key::new("n2", Kind::Int, "columns (lowrank, video)"),
                Key::new("rank", Kind::Int, "rank of the low-rank part (lowrank)"),
                Key::new("sparsity", Kind::Float, "corruption density (lowrank)"),
                Key::new("rate", Kind::Float, "observation rate (lowrank, video)"),
                Key::new("density", Kind::Float, "innovation density in the transform domain (video)"),
                Key::new("n", Kind::Int, "vertices (clique)"),
                Key::new("k", Kind::Int, "planted clique size (clique)"),
            ],
            Subcommand::Solve => vec![
                Key::new("problem", Kind::Text, "glasso | lvglasso | rpca | regression | clique | cslps"),
                Key::new("input", Kind::Path, "matrix bundle with the problem data"),
                Key::new("lambda", Kind::Float, "regularization weight"),
                Key::new("gamma", Kind::Float, "trace-to-l1 weight ratio (lvglasso)"),
                Key::new("k", Kind::Int, "clique size (clique)"),
                Key::new("eps", Kind::Float, "measurement noise radius (cslps)"),
                Key::new("mode", Kind::Text, "single | background (cslps)"),
                Key::new("w", Kind::Text, "left transform: haar | dct | identity (cslps)"),
                Key::new("f", Kind::Text, "right transform: haar | dct | identity (cslps)"),
                Key::new("penalize_diagonal", Kind::Bool, "include the diagonal in the l1 penalty (glasso, lvglasso)"),
            ],
            Subcommand::Phase => {
                let mut k = vec![
                    Key::new("family", Kind::Text, "clique | completion | rpca | glasso"),
                    Key::new("trials", Kind::Int, "trials per cell"),
                ];
                for (name, kind) in PHASE_PARAMS {
                    k.push(Key::new(name, *kind, "family parameter; a comma list makes it a grid axis"));
                }
                k
            }
            Subcommand::Adaptivity => vec![
                Key::new("p", Kind::Int, "observed variables"),
                Key::new("degree", Kind::Int, "maximum degree of the conditional graph"),
                Key::new("strength", Kind::Float, "edge strength"),
                Key::new("h", Kind::IntList, "hidden-variable counts; must include 0"),
                Key::new("n", Kind::IntList, "sample sizes"),
                Key::new("trials", Kind::Int, "trials per cell"),
                Key::new("lambdas", Kind::FloatList, "lambda grid"),
                Key::new("gammas", Kind::FloatList, "gamma grid"),
            ],
            Subcommand::Clique => vec![
                Key::new("n", Kind::Int, "vertices"),
                Key::new("k", Kind::Int, "planted clique size"),
                Key::new("lambda", Kind::Float, "l1 weight (default 1/sqrt(n))"),
            ],
        };
        if self != Subcommand::Gen {
            keys.extend([
                Key::new("rho", Kind::Float, "initial ADMM penalty"),
                Key::new("max_iters", Kind::Int, "iteration cap"),
                Key::new("eps_abs", Kind::Float, "absolute stopping tolerance"),
                Key::new("eps_rel", Kind::Float, "relative stopping tolerance"),
            ]);
        }
        keys.extend([
            Key::new("seed", Kind::Int, "base seed (default 0)"),
            Key::new("out", Kind::Path, "output directory (default lslab-out)"),
        ]);
        keys
    }

    /// Keys without which the subcommand cannot run.
    fn required(self) -> &'static [&'static str] {
        match self {
            Subcommand::Gen => &["family"],
            Subcommand::Solve => &["problem", "input"],
            Subcommand::Phase => &["family"],
            Subcommand::Adaptivity => &["p", "degree", "h", "n"],
            Subcommand::Clique => &["n", "k"],
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const PHASE_PARAMS: &[(&str, Kind)] = &[
    ("n", Kind::IntList),
    ("k", Kind::IntList),
    ("rank", Kind::IntList),
    ("rate", Kind::FloatList),
    ("sparsity", Kind::FloatList),
    ("p", Kind::IntList),
    ("degree", Kind::IntList),
    ("samples", Kind::IntList),
    ("strength", Kind::FloatList),
    ("lambda", Kind::FloatList),
];

/// Keys that only make sense for one value of `family` / `problem`.
fn applicable(sub: Subcommand, choice: &str) -> Option<&'static [&'static str]> {
    let keys: &'static [&'static str] = match (sub, choice) {
        (Subcommand::Gen, "latent") => &["p", "h", "degree", "strength", "samples"],
        (Subcommand::Gen, "lowrank") => &["n1", "n2", "rank", "sparsity", "rate"],
        (Subcommand::Gen, "clique") => &["n", "k"],
        (Subcommand::Gen, "video") => &["n1", "n2", "density", "rate"],
        (Subcommand::Solve, "glasso") => &["lambda", "penalize_diagonal"],
        (Subcommand::Solve, "lvglasso") => &["lambda", "gamma", "penalize_diagonal"],
        (Subcommand::Solve, "rpca") | (Subcommand::Solve, "regression") => &["lambda"],
        (Subcommand::Solve, "clique") => &["lambda", "k"],
        (Subcommand::Solve, "cslps") => &["lambda", "eps", "mode", "w", "f"],
        _ => return None,
    };
    Some(keys)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Int,
    Float,
    Bool,
    Text,
    Path,
    IntList,
    FloatList,
}

impl Kind {
    fn expected(self) -> &'static str {
        match self {
            Kind::Int => "a nonnegative integer",
            Kind::Float => "a number",
            Kind::Bool => "true or false",
            Kind::Text | Kind::Path => "a string",
            Kind::IntList => "a comma-separated list of nonnegative integers",
            Kind::FloatList => "a comma-separated list of numbers",
        }
    }

    fn accepts(self, value: &str) -> bool {
        let list = |ok: fn(&str) -> bool| !value.is_empty() && value.split(',').all(|v| ok(v.trim()));
        match self {
            Kind::Int => value.parse::<u64>().is_ok(),
            Kind::Float => value.parse::<f64>().is_ok_and(f64::is_finite),
            Kind::Bool => matches!(value, "true" | "false"),
            Kind::Text | Kind::Path => !value.is_empty(),
            Kind::IntList => list(|v| v.parse::<u64>().is_ok()),
            Kind::FloatList => list(|v| v.parse::<f64>().is_ok_and(f64::is_finite)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub help: &'static str,
}

impl Key {
    const fn new(name: &'static str, kind: Kind, help: &'static str) -> Self {
        Self { name, kind, help }
    }
}

/// Validated invocation. `params` excludes `seed` and `out`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn has(&self, key: &str) -> bool {
        self.params.contains_key(key)
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    /// Values were type-checked during parsing, so these only fail on keys
    /// that are absent.
    fn parsed<T: FromStr>(&self, key: &str) -> Option<T> {
        self.params.get(key).map(|v| v.parse().ok().expect("validated while parsing"))
    }

    pub fn int(&self, key: &str) -> Option<usize> {
        self.parsed::<u64>(key).map(|v| v as usize)
    }

    pub fn int_or(&self, key: &str, default: usize) -> usize {
        self.int(key).unwrap_or(default)
    }

    pub fn float(&self, key: &str) -> Option<f64> {
        self.parsed(key)
    }

    pub fn float_or(&self, key: &str, default: f64) -> f64 {
        self.float(key).unwrap_or(default)
    }

    pub fn flag(&self, key: &str) -> bool {
        self.parsed(key).unwrap_or(false)
    }

    pub fn floats(&self, key: &str) -> Option<Vec<f64>> {
        self.params.get(key).map(|v| v.split(',').map(|x| x.trim().parse().expect("validated while parsing")).collect())
    }

    pub fn ints(&self, key: &str) -> Option<Vec<usize>> {
        self.params
            .get(key)
            .map(|v| v.split(',').map(|x| x.trim().parse::<u64>().expect("validated while parsing") as usize).collect())
    }

    pub fn require_float(&self, key: &str) -> Result<f64, CliError> {
        self.float(key).ok_or_else(|| CliError::MissingRequired(key.into()))
    }

    pub fn require_int(&self, key: &str) -> Result<usize, CliError> {
        self.int(key).ok_or_else(|| CliError::MissingRequired(key.into()))
    }

    /// `seed`, `out` and every parameter, sorted by key.
    pub fn entries(&self) -> Vec<(String, String)> {
        let mut all = self.params.clone();
        all.insert("seed".into(), self.seed.to_string());
        all.insert("out".into(), self.out.display().to_string());
        all.into_iter().collect()
    }
}

fn command() -> Command {
    let mut cmd = Command::new("lslab")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Low-rank + sparse decomposition solvers and recovery experiments")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for sub in Subcommand::ALL {
        let mut sc = Command::new(sub.name()).about(sub.about()).arg(
            Arg::new("config").long("config").value_name("FILE").help("key=value file; flags override its entries"),
        );
        for key in sub.keys() {
            sc = sc.arg(Arg::new(key.name).long(key.name).value_name("VALUE").help(key.help));
        }
        cmd = cmd.subcommand(sc);
    }
    cmd
}

fn from_clap(err: clap::Error) -> CliError {
    match err.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            CliError::Help(err.render().to_string())
        }
        ErrorKind::UnknownArgument => match err.get(ContextKind::InvalidArg) {
            Some(ContextValue::String(arg)) => {
                CliError::UnknownFlag(arg.trim_start_matches('-').split('=').next().unwrap_or(arg).to_string())
            }
            _ => CliError::Usage(err.render().to_string()),
        },
        ErrorKind::InvalidSubcommand => match err.get(ContextKind::InvalidSubcommand) {
            Some(ContextValue::String(name)) => CliError::UnknownSubcommand(name.clone()),
            _ => CliError::Usage(err.render().to_string()),
        },
        _ => CliError::Usage(err.render().to_string()),
    }
}

/// Parses `argv` (without the program name).
pub fn parse_args<S: AsRef<str>>(argv: &[S]) -> Result<RunConfig, CliError> {
    let args = std::iter::once("lslab").chain(argv.iter().map(AsRef::as_ref));
    let matches = command().try_get_matches_from(args).map_err(from_clap)?;
    let (name, sub_matches) = matches.subcommand().expect("subcommand is required");
    let sub = Subcommand::ALL.into_iter().find(|s| s.name() == name).expect("registered subcommand");
    let keys = sub.keys();

    let mut values: BTreeMap<String, String> = BTreeMap::new();
    if let Some(path) = sub_matches.get_one::<String>("config") {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        let entries = parse_config(&text).map_err(|source| CliError::Config { path: path.into(), source })?;
        for (k, v) in entries {
            if !keys.iter().any(|key| key.name == k) {
                return Err(CliError::UnknownFlag(k));
            }
            values.insert(k, v);
        }
    }
    for key in &keys {
        if let Some(v) = sub_matches.get_one::<String>(key.name) {
            values.insert(key.name.to_string(), v.clone());
        }
    }

    for key in &keys {
        if let Some(v) = values.get(key.name) {
            if !key.kind.accepts(v) {
                return Err(CliError::TypeError {
                    key: key.name.into(),
                    value: v.clone(),
                    expected: key.kind.expected(),
                });
            }
        }
    }
    check_choices(sub, &values)?;
    for req in sub.required() {
        if !values.contains_key(*req) {
            return Err(CliError::MissingRequired(req.to_string()));
        }
    }

    let seed = values.remove("seed").map(|v| v.parse().expect("validated")).unwrap_or(0);
    let out = values.remove("out").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("lslab-out"));
    Ok(RunConfig { subcommand: sub, params: values, seed, out })
}

/// Family / problem names and the keys that depend on them.
fn check_choices(sub: Subcommand, values: &BTreeMap<String, String>) -> Result<(), CliError> {
    let choice_key = match sub {
        Subcommand::Gen | Subcommand::Phase => "family",
        Subcommand::Solve => "problem",
        _ => return Ok(()),
    };
    let Some(choice) = values.get(choice_key).map(String::as_str) else {
        return Ok(());
    };
    let unknown = || CliError::UnknownFamily { key: choice_key.into(), value: choice.into() };
    let (dependent, allowed): (Vec<&str>, Vec<&str>) = match sub {
        Subcommand::Phase => {
            let family = Family::from_str(choice).map_err(|_| unknown())?;
            (PHASE_PARAMS.iter().map(|(k, _)| *k).collect(), family.parameters().iter().map(|(k, _)| *k).collect())
        }
        _ => {
            let allowed = applicable(sub, choice).ok_or_else(unknown)?;
            let dependent = sub.keys().iter().map(|k| k.name).filter(|k| !SHARED.contains(k)).collect();
            (dependent, allowed.to_vec())
        }
    };
    for k in values.keys() {
        if dependent.contains(&k.as_str()) && !allowed.contains(&k.as_str()) {
            return Err(CliError::Inapplicable { key: k.clone(), choice: choice.into() });
        }
    }
    let needed: &[&str] = match (sub, choice) {
        (Subcommand::Solve, "glasso" | "regression" | "cslps") => &["lambda"],
        (Subcommand::Solve, "lvglasso") => &["lambda", "gamma"],
        (Subcommand::Solve, "clique") => &["lambda", "k"],
        _ => &[],
    };
    match needed.iter().find(|k| !values.contains_key(**k)) {
        Some(k) => Err(CliError::MissingRequired(k.to_string())),
        None => Ok(()),
    }
}

/// Keys that never depend on the chosen family or problem.
const SHARED: [&str; 9] = ["family", "problem", "input", "seed", "out", "rho", "max_iters", "eps_abs", "eps_rel"];
