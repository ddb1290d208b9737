//! Run configuration: flags, an optional `key=value` file, and defaults, in that order of precedence.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context};
use clap::ValueEnum;
use kronecker_nc::algebra::{FoliationParams, Mode};
use kronecker_nc::exact::parse_rational;
use serde::Serialize;

use crate::GlobalArgs;

pub const DEFAULT_THETA: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    Exact,
    Numeric,
}

/// Where `a` and `b` come from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Slope {
    Pythagorean { p: i64, q: i64 },
    Explicit { a: String, b: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub slope: Slope,
    pub theta: f64,
    #[serde(rename = "N")]
    pub n: i64,
    pub tol: f64,
    pub rmax: Option<f64>,
    pub format: Option<Format>,
    pub mode: RunMode,
    pub seed: u64,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn parse<T: FromStr>(key: &str, v: &str) -> anyhow::Result<T>
where
    T::Err: std::fmt::Display,
{
    v.trim()
        .parse::<T>()
        .map_err(|e| anyhow!("invalid value `{v}` for `{key}`: {e}"))
}

fn parse_pair(v: &str) -> anyhow::Result<(i64, i64)> {
    let (p, q) = v
        .split_once(',')
        .ok_or_else(|| anyhow!("expected `p,q`, got `{v}`"))?;
    Ok((parse("pyth", p)?, parse("pyth", q)?))
}

/// `key=value` lines; blank lines and `#` comments are ignored.
pub fn read_config_file(path: &Path) -> anyhow::Result<BTreeMap<String, String>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key=value", no + 1))?;
        let key = k.trim().trim_start_matches("--").to_string();
        const KEYS: [&str; 11] = [
            "a", "b", "pyth", "theta", "N", "tol", "rmax", "format", "mode", "seed", "out",
        ];
        if !KEYS.contains(&key.as_str()) {
            bail!("line {}: unknown key `{key}`", no + 1);
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

impl RunConfig {
    pub fn resolve(args: &GlobalArgs) -> anyhow::Result<Self> {
        let file = match &args.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        let get = |k: &str| file.get(k).map(String::as_str);

        let a = args.a.clone().or_else(|| get("a").map(str::to_string));
        let b = args.b.clone().or_else(|| get("b").map(str::to_string));
        let pyth = match &args.pyth {
            Some(v) => Some(parse_pair(v)?),
            None => get("pyth").map(parse_pair).transpose()?,
        };
        let slope = match (a, b, pyth) {
            (Some(a), Some(b), None) => Slope::Explicit { a, b },
            (None, None, Some((p, q))) => Slope::Pythagorean { p, q },
            (None, None, None) => Slope::Pythagorean { p: 3, q: 4 },
            (Some(_), None, _) | (None, Some(_), _) => bail!("--a and --b must be given together"),
            (Some(_), Some(_), Some(_)) => bail!("give either --a/--b or --pyth, not both"),
        };
        let pick = |flag: Option<String>, key: &str| flag.or_else(|| get(key).map(str::to_string));
        let theta = match pick(args.theta.map(|x| x.to_string()), "theta") {
            Some(v) => parse("theta", &v)?,
            None => DEFAULT_THETA,
        };
        let n = match pick(args.n.map(|x| x.to_string()), "N") {
            Some(v) => parse("N", &v)?,
            None => 3,
        };
        let tol = match pick(args.tol.map(|x| x.to_string()), "tol") {
            Some(v) => parse("tol", &v)?,
            None => 1e-10,
        };
        let rmax = pick(args.rmax.map(|x| x.to_string()), "rmax")
            .map(|v| parse("rmax", &v))
            .transpose()?;
        let format = match (args.format, get("format")) {
            (Some(f), _) => Some(f),
            (None, Some(v)) => Some(Format::from_str(v, true).map_err(|e| anyhow!("format: {e}"))?),
            (None, None) => None,
        };
        let mode = match (args.mode, get("mode")) {
            (Some(m), _) => m,
            (None, Some(v)) => RunMode::from_str(v, true).map_err(|e| anyhow!("mode: {e}"))?,
            (None, None) => RunMode::Exact,
        };
        let seed = match pick(args.seed.map(|x| x.to_string()), "seed") {
            Some(v) => parse("seed", &v)?,
            None => 7,
        };
        let out = args.out.clone().or_else(|| get("out").map(PathBuf::from));

        let cfg = Self {
            slope,
            theta,
            n,
            tol,
            rmax,
            format,
            mode,
            seed,
            out,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> anyhow::Result<()> {
        if self.n < 0 {
            bail!("N must be non-negative");
        }
        if !(self.tol >= 0.0) {
            bail!("tol must be non-negative");
        }
        if !self.theta.is_finite() {
            bail!("theta must be finite");
        }
        if let Some(r) = self.rmax {
            if !(r >= 10.0) {
                bail!("rmax must be at least 10");
            }
        }
        let p = self.params()?;
        if self.mode == RunMode::Exact && p.exact().is_none() {
            bail!("--mode exact needs rational a, b (for instance a Pythagorean pair)");
        }
        Ok(())
    }

    /// Foliation parameters; `a² + b² = 1` is enforced by the constructors.
    pub fn params(&self) -> anyhow::Result<FoliationParams> {
        let p = match &self.slope {
            Slope::Pythagorean { p, q } => FoliationParams::pythagorean(*p, *q)?,
            // decimals like 0.6 are exact rationals; fall back to floats when a² + b² = 1 only approximately
            Slope::Explicit { a, b } => match (parse_rational(a), parse_rational(b)) {
                (Ok(ra), Ok(rb)) => match FoliationParams::rational(ra, rb) {
                    Ok(p) => p,
                    Err(_) => FoliationParams::numeric(parse("a", a)?, parse("b", b)?)?,
                },
                _ => FoliationParams::numeric(parse("a", a)?, parse("b", b)?)?,
            },
        };
        Ok(match self.mode {
            RunMode::Exact => p,
            RunMode::Numeric => p.with_mode(Mode::Numeric)?,
        })
    }
}
