//! Flat `key = value` configuration.
//!
//! One assignment per line, `#` starts a comment, later assignments to the
//! same key win. Command-line flags are applied as extra assignments after
//! the file, so they override it.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use gentropy::registration::ALLOWED_BINS;
use gentropy::{EntropySpec, Family};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    Threshold,
    Register,
    Cluster,
}

impl Experiment {
    pub const ALL: [Experiment; 3] = [Experiment::Threshold, Experiment::Register, Experiment::Cluster];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Threshold => "threshold",
            Experiment::Register => "register",
            Experiment::Cluster => "cluster",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
}

/// Whether wall-clock times are recorded. `Off` writes `NA` in their place
/// so report trees are byte-identical across runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timing {
    Wall,
    Off,
}

/// Thresholding uses either the gray histogram or the (gray, local mean)
/// histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    OneD,
    TwoD,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::OneD => "1d",
            Variant::TwoD => "2d",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdConfig {
    pub width: usize,
    pub height: usize,
    pub mu: (f64, f64),
    pub sigma: f64,
    pub split: f64,
    pub window: usize,
    pub variants: Vec<Variant>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegisterConfig {
    pub size: usize,
    pub shift: (i64, i64),
    pub noise: f64,
    pub window: i64,
    pub bins: Vec<usize>,
    /// Radians.
    pub rotations: Vec<f64>,
    pub refine: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterConfig {
    pub size: usize,
    pub k: usize,
    pub noise: f64,
    pub coords: bool,
    pub sigma_scales: Vec<f64>,
    pub max_sweeps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiments: Vec<Experiment>,
    pub families: Vec<EntropySpec>,
    pub seeds: Vec<u64>,
    pub jobs: Option<usize>,
    pub out: PathBuf,
    pub format: Format,
    pub timing: Timing,
    pub threshold: ThresholdConfig,
    pub register: RegisterConfig,
    pub cluster: ClusterConfig,
}

/// Every recognized key with its default value.
pub const DEFAULTS: &[(&str, &str)] = &[
    ("experiment", "all"),
    ("families", "shannon,renyi:2,tsallis:2"),
    ("orders", ""),
    ("seed", "7"),
    ("jobs", "0"),
    ("out", "bench-out"),
    ("format", "csv"),
    ("timing", "wall"),
    ("threshold.width", "128"),
    ("threshold.height", "128"),
    ("threshold.mu", "64,192"),
    ("threshold.sigma", "15"),
    ("threshold.split", "0.5"),
    ("threshold.window", "3"),
    ("threshold.variants", "1d,2d"),
    ("register.size", "128"),
    ("register.shift", "5,-3"),
    ("register.noise", "10"),
    ("register.window", "16"),
    ("register.bins", "64"),
    ("register.rotations", "0"),
    ("register.refine", "true"),
    ("cluster.size", "32"),
    ("cluster.k", "2"),
    ("cluster.noise", "12"),
    ("cluster.coords", "false"),
    ("cluster.sigma_scale", "1"),
    ("cluster.max_sweeps", "50"),
];

/// Ordered assignments collected from a file and then from flags.
#[derive(Debug, Clone, Default)]
pub struct Assignments {
    values: BTreeMap<String, String>,
}

impl Assignments {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut out = Assignments::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`, got `{raw}`", n + 1)))?;
            out.set(key.trim(), value.trim())
                .map_err(|e| CliError::Config(format!("line {}: {e}", n + 1)))?;
        }
        Ok(out)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if !DEFAULTS.iter().any(|(k, _)| *k == key) {
            return Err(CliError::Config(format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    fn get(&self, key: &str) -> &str {
        self.values
            .get(key)
            .map(String::as_str)
            .or_else(|| DEFAULTS.iter().find(|(k, _)| *k == key).map(|(_, v)| *v))
            .expect("key is listed in DEFAULTS")
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: fmt::Display,
    {
        let raw = self.get(key);
        raw.parse().map_err(|e| CliError::Config(format!("`{key} = {raw}`: {e}")))
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        let raw = self.get(key);
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|e| CliError::Config(format!("`{key}` item `{s}`: {e}"))))
            .collect()
    }

    fn pair<T: FromStr + Copy>(&self, key: &str) -> Result<(T, T), CliError>
    where
        T::Err: fmt::Display,
    {
        match self.list::<T>(key)?.as_slice() {
            &[a, b] => Ok((a, b)),
            _ => Err(CliError::Config(format!("`{key}` needs exactly two comma-separated values"))),
        }
    }

    pub fn build(&self) -> Result<ExperimentConfig, CliError> {
        let experiments = match self.get("experiment") {
            "all" => Experiment::ALL.to_vec(),
            "threshold" => vec![Experiment::Threshold],
            "register" => vec![Experiment::Register],
            "cluster" => vec![Experiment::Cluster],
            other => return Err(CliError::Config(format!("unknown experiment `{other}`"))),
        };
        let families = expand_orders(self.list("families")?, &self.list::<f64>("orders")?)?;
        let seeds: Vec<u64> = self.list("seed")?;
        if seeds.is_empty() {
            return Err(CliError::Config("at least one seed is required".into()));
        }
        let jobs = match self.parsed::<usize>("jobs")? {
            0 => None,
            n => Some(n),
        };
        let format = match self.get("format") {
            "csv" => Format::Csv,
            "markdown" | "md" => Format::Markdown,
            other => return Err(CliError::Config(format!("unknown format `{other}`"))),
        };
        let timing = match self.get("timing") {
            "wall" => Timing::Wall,
            "off" => Timing::Off,
            other => return Err(CliError::Config(format!("timing must be `wall` or `off`, got `{other}`"))),
        };
        let variants = self
            .list::<String>("threshold.variants")?
            .iter()
            .map(|v| match v.as_str() {
                "1d" => Ok(Variant::OneD),
                "2d" => Ok(Variant::TwoD),
                other => Err(CliError::Config(format!("unknown threshold variant `{other}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let cfg = ExperimentConfig {
            experiments,
            families,
            seeds,
            jobs,
            out: PathBuf::from(self.get("out")),
            format,
            timing,
            threshold: ThresholdConfig {
                width: self.parsed("threshold.width")?,
                height: self.parsed("threshold.height")?,
                mu: self.pair("threshold.mu")?,
                sigma: self.parsed("threshold.sigma")?,
                split: self.parsed("threshold.split")?,
                window: self.parsed("threshold.window")?,
                variants,
            },
            register: RegisterConfig {
                size: self.parsed("register.size")?,
                shift: self.pair("register.shift")?,
                noise: self.parsed("register.noise")?,
                window: self.parsed("register.window")?,
                bins: self.list("register.bins")?,
                rotations: self.list("register.rotations")?,
                refine: self.parsed("register.refine")?,
            },
            cluster: ClusterConfig {
                size: self.parsed("cluster.size")?,
                k: self.parsed("cluster.k")?,
                noise: self.parsed("cluster.noise")?,
                coords: self.parsed("cluster.coords")?,
                sigma_scales: self.list("cluster.sigma_scale")?,
                max_sweeps: self.parsed("cluster.max_sweeps")?,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Replaces the order of every parametric family by each listed order.
fn expand_orders(families: Vec<EntropySpec>, orders: &[f64]) -> Result<Vec<EntropySpec>, CliError> {
    if orders.is_empty() {
        return Ok(families);
    }
    let mut out: Vec<EntropySpec> = Vec::new();
    for spec in families {
        let expanded = match spec.family() {
            Family::Shannon => vec![spec],
            family => orders
                .iter()
                .map(|&o| EntropySpec::new(family, o).map_err(|e| CliError::Config(e.to_string())))
                .collect::<Result<_, _>>()?,
        };
        for s in expanded {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

fn require(ok: bool, message: impl FnOnce() -> String) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(message()))
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<(), CliError> {
        require(!self.families.is_empty(), || "at least one entropy family is required".into())?;
        let t = &self.threshold;
        require(t.width >= 8 && t.height >= 8, || "threshold image must be at least 8x8".into())?;
        require(t.window >= 3 && t.window % 2 == 1 && t.window <= t.width.min(t.height), || {
            format!("threshold.window must be odd, >= 3 and fit the image, got {}", t.window)
        })?;
        require(!t.variants.is_empty(), || "threshold.variants is empty".into())?;
        let r = &self.register;
        require(r.size >= 16, || "register.size must be at least 16".into())?;
        require(r.window >= 0, || "register.window must be nonnegative".into())?;
        require(r.shift.0.unsigned_abs() < r.size as u64 && r.shift.1.unsigned_abs() < r.size as u64, || {
            format!("register.shift {:?} does not fit a {} image", r.shift, r.size)
        })?;
        require(r.noise >= 0.0 && r.noise.is_finite(), || "register.noise must be nonnegative".into())?;
        require(!r.bins.is_empty() && r.bins.iter().all(|b| ALLOWED_BINS.contains(b)), || {
            format!("register.bins must be drawn from {ALLOWED_BINS:?}")
        })?;
        require(!r.rotations.is_empty(), || "register.rotations is empty".into())?;
        let c = &self.cluster;
        require(c.size >= 8, || "cluster.size must be at least 8".into())?;
        require((2..=8).contains(&c.k), || format!("cluster.k must lie in 2..=8, got {}", c.k))?;
        require(c.noise >= 0.0 && c.noise.is_finite(), || "cluster.noise must be nonnegative".into())?;
        require(!c.sigma_scales.is_empty() && c.sigma_scales.iter().all(|s| *s > 0.0 && s.is_finite()), || {
            "cluster.sigma_scale values must be positive".into()
        })?;
        Ok(())
    }
}
