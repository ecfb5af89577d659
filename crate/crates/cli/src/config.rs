//! Flag/file merging and the canonical experiment configuration.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use ssa_core::matrix_io::{Generator, MatrixSource, ProblemSpec, RhsSpec};
use ssa_core::{Method, SketchKind, Strategy};

use crate::args::{Command, RunArgs};
use crate::CliError;

/// Keys accepted in a `--config` TOML file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    matrix: Option<Vec<PathBuf>>,
    generate: Option<Vec<String>>,
    rhs: Option<String>,
    seed: Option<u64>,
    m: Option<usize>,
    k: Option<usize>,
    s: Option<usize>,
    methods: Option<Vec<String>>,
    strategy: Option<Vec<String>>,
    sketch: Option<String>,
    cond_threshold: Option<f64>,
    cond_check_stride: Option<usize>,
    tol: Option<f64>,
    resid_stride: Option<usize>,
    ignore_cond: Option<bool>,
    trials: Option<usize>,
    rows: Option<usize>,
    decay_steps: Option<usize>,
    out: Option<PathBuf>,
    decay_out: Option<PathBuf>,
    metrics_out: Option<PathBuf>,
}

/// Fully resolved settings of one run. Serialized as JSON into the first CSV
/// line; parsing that JSON back yields an identical value. Output paths are
/// not part of the echo, so the CSV bytes do not depend on where they go.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: String,
    pub matrix: Vec<PathBuf>,
    pub generate: Vec<String>,
    pub rhs: String,
    pub seed: u64,
    pub m: usize,
    pub k: usize,
    /// `None`: 2m (2(m+1) for sgmres).
    pub s: Option<usize>,
    pub methods: Vec<String>,
    pub sketch: String,
    pub cond_threshold: f64,
    pub cond_check_stride: usize,
    pub tol: f64,
    pub resid_stride: usize,
    pub ignore_cond: bool,
    pub trials: usize,
    pub rows: usize,
    pub decay_steps: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub decay_out: Option<PathBuf>,
    #[serde(skip)]
    pub metrics_out: Option<PathBuf>,
}

/// What a method name resolves to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Gmres,
    Arnoldi(Method),
}

/// A method name with an optional per-method dimension cap (`name@cap`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MethodSpec {
    pub kind: MethodKind,
    pub cap: Option<usize>,
}

impl MethodSpec {
    /// Iterations allowed: `m`, or fewer when the cap (a basis dimension,
    /// i.e. iterations + 1) is smaller. Zero means only the start vector.
    pub fn m_max(&self, m: usize) -> usize {
        self.cap.map_or(m, |c| (c - 1).min(m))
    }

    pub fn is_sketched(&self) -> bool {
        matches!(self.kind, MethodKind::Arnoldi(m) if m.is_sketched())
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MethodKind::Gmres => f.write_str("gmres")?,
            MethodKind::Arnoldi(m) => write!(f, "{m}")?,
        }
        if let Some(c) = self.cap {
            write!(f, "@{c}")?;
        }
        Ok(())
    }
}

impl FromStr for MethodSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (name, cap) = match s.split_once('@') {
            Some((n, c)) => {
                let c: usize = c.parse().map_err(|_| CliError::usage(format!("invalid cap in method '{s}'")))?;
                if c == 0 {
                    return Err(CliError::usage(format!("cap must be positive in method '{s}'")));
                }
                (n, Some(c))
            }
            None => (s, None),
        };
        let kind = if name == "gmres" {
            MethodKind::Gmres
        } else {
            MethodKind::Arnoldi(name.parse().map_err(|e| CliError::usage(format!("{e}")))?)
        };
        Ok(MethodSpec { kind, cap })
    }
}

fn default_methods(command: &str) -> Vec<&'static str> {
    match command {
        "build-basis" => vec!["truncated", "ssa-pinv"],
        "sgmres" => vec!["gmres", "ssa-pinv"],
        "perf-profile" => vec!["truncated", "ssa-pinv", "ssa-omp", "ssa-sp", "ssa-greedy", "ssa-corr"],
        "select-demo" => Strategy::ALL.iter().map(|s| s.name()).collect(),
        _ => vec![],
    }
}

fn read_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

impl ExperimentConfig {
    /// Merges flags over the optional config file over per-command defaults,
    /// then validates and canonicalizes every name.
    pub fn resolve(command: &Command) -> Result<Self, CliError> {
        let name = command.name();
        let a: &RunArgs = command.args();
        let file = match &a.config {
            Some(p) => read_file_config(p)?,
            None => FileConfig::default(),
        };
        fn pick<T: Clone>(flag: &Option<T>, file: Option<T>, default: T) -> T {
            flag.clone().or(file).unwrap_or(default)
        }
        fn pick_list<T: Clone>(flag: &[T], file: Option<Vec<T>>) -> Vec<T> {
            if flag.is_empty() {
                file.unwrap_or_default()
            } else {
                flag.to_vec()
            }
        }
        let methods = pick_list(&a.methods, file.methods);
        let strategies = pick_list(&a.strategy, file.strategy);
        let cfg = ExperimentConfig {
            command: name.to_string(),
            matrix: pick_list(&a.matrix, file.matrix),
            generate: pick_list(&a.generate, file.generate),
            rhs: pick(&a.rhs, file.rhs, "gaussian".into()),
            seed: pick(&a.seed, file.seed, 1),
            m: pick(&a.m, file.m, if name == "bounds-demo" { 10 } else { 100 }),
            k: pick(&a.k, file.k, if name == "select-demo" { 1 } else { 5 }),
            s: a.s.or(file.s),
            methods: Self::merge_methods(name, methods, strategies)?,
            sketch: pick(&a.sketch, file.sketch, "srht".into()),
            cond_threshold: pick(&a.cond_threshold, file.cond_threshold, if name == "sgmres" { 1e15 } else { 1e12 }),
            cond_check_stride: pick(&a.cond_check_stride, file.cond_check_stride, 5),
            tol: pick(&a.tol, file.tol, 1e-8),
            resid_stride: pick(&a.resid_stride, file.resid_stride, 10),
            ignore_cond: a.ignore_cond || file.ignore_cond.unwrap_or(false),
            trials: pick(&a.trials, file.trials, 100),
            rows: pick(&a.rows, file.rows, 100),
            decay_steps: pick(&a.decay_steps, file.decay_steps, 200),
            out: a.out.clone().or(file.out),
            decay_out: a.decay_out.clone().or(file.decay_out),
            metrics_out: a.metrics_out.clone().or(file.metrics_out),
        };
        cfg.canonical()
    }

    fn merge_methods(command: &str, methods: Vec<String>, strategies: Vec<String>) -> Result<Vec<String>, CliError> {
        if command == "select-demo" {
            // Strategies only; `--methods` may also name them.
            let mut out: Vec<String> = methods.into_iter().chain(strategies).collect();
            if out.is_empty() {
                out = default_methods(command).into_iter().map(String::from).collect();
            }
            return Ok(out);
        }
        let mut out = methods;
        out.extend(strategies.into_iter().map(|s| format!("ssa-{s}")));
        if out.is_empty() {
            out = default_methods(command).into_iter().map(String::from).collect();
        }
        Ok(out)
    }

    fn canonical(mut self) -> Result<Self, CliError> {
        let usage = |m: String| Err(CliError::usage(m));
        if self.command == "select-demo" {
            let mut names = Vec::new();
            for s in &self.methods {
                let st: Strategy = s.parse().map_err(|e| CliError::usage(format!("{e}")))?;
                names.push(st.name().to_string());
            }
            self.methods = names;
        } else if self.command != "bounds-demo" {
            let specs = self.method_specs()?;
            if self.command != "sgmres" && specs.iter().any(|m| m.kind == MethodKind::Gmres) {
                return usage("method 'gmres' is only available in sgmres".into());
            }
            let mut names: Vec<String> = Vec::new();
            for s in specs {
                let n = s.to_string();
                if names.contains(&n) {
                    return usage(format!("method '{n}' listed twice"));
                }
                names.push(n);
            }
            self.methods = names;
        } else {
            self.methods.clear();
        }
        let mut gens = Vec::new();
        for g in &self.generate {
            let g: Generator = g.parse().map_err(|e| CliError::usage(format!("{e}")))?;
            gens.push(g.to_string());
        }
        self.generate = gens;
        self.rhs = self.rhs.parse::<RhsSpec>().map_err(|e| CliError::usage(format!("{e}")))?.to_string();
        self.sketch = self.sketch.parse::<SketchKind>().map_err(|e| CliError::usage(format!("{e}")))?.to_string();

        if self.m == 0 || self.k == 0 {
            return usage("m and k must be positive".into());
        }
        if self.s == Some(0) {
            return usage("s must be positive".into());
        }
        if !(self.cond_threshold.is_finite() && self.cond_threshold > 1.0) {
            return usage(format!("cond threshold must be finite and > 1 (got {})", self.cond_threshold));
        }
        if self.cond_check_stride == 0 {
            return usage("cond check stride must be positive".into());
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return usage(format!("tol must be positive (got {})", self.tol));
        }
        if self.rows == 0 || self.trials == 0 {
            return usage("rows and trials must be positive".into());
        }
        Ok(self)
    }

    pub fn method_specs(&self) -> Result<Vec<MethodSpec>, CliError> {
        self.methods.iter().map(|m| m.parse()).collect()
    }

    pub fn strategies(&self) -> Vec<Strategy> {
        self.methods.iter().filter_map(|s| s.parse().ok()).collect()
    }

    pub fn sketch_kind(&self) -> SketchKind {
        self.sketch.parse().expect("canonical sketch kind")
    }

    /// Matrix files first, then generated matrices, each with the shared rhs.
    pub fn problems(&self) -> Vec<ProblemSpec> {
        let rhs: RhsSpec = self.rhs.parse().expect("canonical rhs");
        let files = self.matrix.iter().map(|p| MatrixSource::File(p.clone()));
        let gens = self.generate.iter().map(|g| MatrixSource::Generated(g.parse().expect("canonical generator")));
        files.chain(gens).map(|source| ProblemSpec { source, rhs: rhs.clone() }).collect()
    }

    pub fn single_problem(&self) -> Result<ProblemSpec, CliError> {
        let mut p = self.problems();
        match p.len() {
            1 => Ok(p.remove(0)),
            0 => Err(CliError::usage(format!("{} needs --matrix or --generate", self.command))),
            n => Err(CliError::usage(format!("{} takes one problem, got {n}", self.command))),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// Reads the configuration back from a CSV produced by this tool.
    pub fn from_csv_comment(line: &str) -> Result<Self, CliError> {
        let json = line
            .strip_prefix("# config: ")
            .ok_or_else(|| CliError::usage("missing '# config: ' prefix".to_string()))?;
        serde_json::from_str(json).map_err(|e| CliError::usage(format!("bad config line: {e}")))
    }
}
