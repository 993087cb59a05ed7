//! `key = value` configuration files and run configuration.
//!
//! The same tiny format backs both the CLI (`--config` files overridden by
//! flags) and the verification suite's threshold file; every output file
//! echoes the effective configuration in its header so any artifact can be
//! reproduced from its own metadata.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{Context, Result, bail};

/// Ordered `key -> value` pairs from a config file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeyValues {
    map: BTreeMap<String, String>,
}

impl KeyValues {
    /// Parses `key = value` lines; `#` starts a comment, blank lines are
    /// skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("line {}: expected `key = value`, got `{raw}`", lineno + 1);
            };
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(KeyValues { map })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.map.insert(key.to_string(), value.to_string());
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        self.require(key)?
            .parse()
            .with_context(|| format!("config key `{key}` is not a number"))
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        self.require(key)?
            .parse()
            .with_context(|| format!("config key `{key}` is not an integer"))
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.require(key)?
            .parse()
            .with_context(|| format!("config key `{key}` is not an integer"))
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .with_context(|| format!("missing config key `{key}`"))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Effective run configuration of a CLI command.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub n: usize,
    pub t: f64,
    pub z: Vec<f64>,
    /// Complex parameter point (`re,im` on the command line); consumed by
    /// the moment-region scan of `constants`.
    pub z_complex: Option<(f64, f64)>,
    pub two_z: f64,
    pub replicates: usize,
    pub format: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 20_260_810,
            n: 1_000,
            t: 1.0,
            z: vec![1.0],
            z_complex: None,
            two_z: 1.0,
            replicates: 1_000,
            format: OutputFormat::Csv,
        }
    }
}

impl RunConfig {
    /// Applies `key = value` pairs over the defaults. Known keys:
    /// `seed`, `n`, `t`, `z`, `two_z`, `replicates`, `format`.
    pub fn apply(&mut self, kv: &KeyValues) -> Result<()> {
        for (k, v) in kv.iter() {
            match k {
                "seed" => self.seed = v.parse().context("seed")?,
                "n" => self.n = v.parse().context("n")?,
                "t" => self.t = v.parse().context("t")?,
                "z" => self.set_z(v)?,
                "two_z" => self.two_z = v.parse().context("two_z")?,
                "replicates" => self.replicates = v.parse().context("replicates")?,
                "format" => {
                    self.format = match v {
                        "csv" => OutputFormat::Csv,
                        "json" => OutputFormat::Json,
                        other => bail!("unknown format `{other}` (csv|json)"),
                    }
                }
                other => bail!("unknown config key `{other}`"),
            }
        }
        Ok(())
    }

    /// Sets the martingale parameter from its textual form: a value, a
    /// `start:stop:step` grid, or a complex `re,im` point.
    pub fn set_z(&mut self, text: &str) -> Result<()> {
        if let Some((re, im)) = text.split_once(',') {
            self.z_complex = Some((re.trim().parse()?, im.trim().parse()?));
        } else {
            self.z = parse_grid(text)?;
        }
        Ok(())
    }

    /// `# key=value` header lines describing this configuration.
    pub fn echo_header(&self, command: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# bstlab {command}");
        let _ = writeln!(s, "# seed={}", self.seed);
        let _ = writeln!(s, "# n={}", self.n);
        let _ = writeln!(s, "# t={}", self.t);
        let zs: Vec<String> = self.z.iter().map(|z| z.to_string()).collect();
        let _ = writeln!(s, "# z={}", zs.join(","));
        let _ = writeln!(s, "# two_z={}", self.two_z);
        let _ = writeln!(s, "# replicates={}", self.replicates);
        s
    }
}

/// Parses a parameter grid: a single value `x` or `start:stop:step`
/// (inclusive of `stop` up to rounding).
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    if let Some((start, rest)) = s.split_once(':') {
        let (stop, step) = rest
            .split_once(':')
            .context("grid must be start:stop:step")?;
        let (start, stop, step): (f64, f64, f64) =
            (start.trim().parse()?, stop.trim().parse()?, step.trim().parse()?);
        if step <= 0.0 || stop < start {
            bail!("grid requires step > 0 and stop >= start");
        }
        let mut out = Vec::new();
        let mut x = start;
        while x <= stop + 1e-12 {
            out.push(x);
            x += step;
        }
        Ok(out)
    } else {
        Ok(vec![s.trim().parse()?])
    }
}
