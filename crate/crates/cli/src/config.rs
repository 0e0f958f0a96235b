//! Run configuration: a flat `key = value` text format shared by config
//! files, command-line overrides and the metadata sidecar.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Cavity,
    Metamaterial,
    Manufactured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Hdg,
    Cg,
}

/// Mesh family. `Mapped` shears grid lines onto slanted interfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshPattern {
    Mirrored,
    Uniform,
    Mapped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

/// The line `axis = value`, sampled at `samples` evenly spaced points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slice {
    pub axis: Axis,
    pub value: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub methods: Vec<Method>,
    pub k: usize,
    pub levels: Vec<usize>,
    pub sigma_plus: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub pattern: MeshPattern,
    pub out: PathBuf,
    pub quadrature: Option<usize>,
    pub slice: Option<Slice>,
    /// Barycentric lattice order for field samples.
    pub lattice: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::Cavity,
            methods: vec![Method::Hdg],
            k: 1,
            levels: vec![8, 16, 32],
            sigma_plus: 1.0,
            kappa: -1.001,
            gamma: 1.0,
            pattern: MeshPattern::Mirrored,
            out: PathBuf::from("out"),
            quadrature: None,
            slice: None,
            lattice: 3,
        }
    }
}

fn bad(key: &str, value: &str, expected: &str) -> CliError {
    CliError::new("cli", format!("invalid value `{value}` for `{key}` (expected {expected})"))
}

fn parse_num<T: FromStr>(key: &str, value: &str, expected: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| bad(key, value, expected))
}

fn parse_list<T: FromStr>(key: &str, value: &str, expected: &str) -> Result<Vec<T>, CliError> {
    value.split(',').map(|s| parse_num(key, s.trim(), expected)).collect()
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key {
            "experiment" => self.experiment = value.parse()?,
            "method" => {
                let mut methods = value.split(',').map(|s| s.trim().parse()).collect::<Result<Vec<Method>, _>>()?;
                methods.sort();
                methods.dedup();
                self.methods = methods;
            }
            "k" => self.k = parse_num(key, value, "a nonnegative integer")?,
            "levels" => self.levels = parse_list(key, value, "comma-separated positive integers")?,
            "sigma_plus" => self.sigma_plus = parse_num(key, value, "a number")?,
            "kappa" => self.kappa = parse_num(key, value, "a number")?,
            "gamma" => self.gamma = parse_num(key, value, "a number")?,
            "pattern" => self.pattern = value.parse()?,
            "out" => self.out = PathBuf::from(value),
            "quadrature" => {
                self.quadrature = match value {
                    "default" | "" => None,
                    v => Some(parse_num(key, v, "an integer or `default`")?),
                }
            }
            "slice" => {
                self.slice = match value {
                    "none" | "" => None,
                    v => {
                        let (axis, at) = v.split_once('=').ok_or_else(|| bad(key, v, "x1=<c>, x2=<c> or none"))?;
                        let axis = match axis.trim() {
                            "x1" | "x" => Axis::X1,
                            "x2" | "y" => Axis::X2,
                            _ => return Err(bad(key, v, "x1=<c>, x2=<c> or none")),
                        };
                        let samples = self.slice.map_or(101, |s| s.samples);
                        Some(Slice { axis, value: parse_num(key, at.trim(), "a number")?, samples })
                    }
                }
            }
            "slice_samples" => {
                let n = parse_num(key, value, "an integer")?;
                match &mut self.slice {
                    Some(s) => s.samples = n,
                    None => return Err(CliError::new("cli", "`slice_samples` given without `slice`")),
                }
            }
            "lattice" => self.lattice = parse_num(key, value, "a positive integer")?,
            _ => return Err(CliError::new("cli", format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a config text on top of `self`. Blank lines and `#` comments
    /// are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::new("cli", format!("line {}: expected `key = value`", i + 1)))?;
            self.set(key.trim(), value).map_err(|e| CliError::new("cli", format!("line {}: {}", i + 1, e.message)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut config = Self::default();
        config.apply_text(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: String| Err(CliError::new("cli", m));
        if self.levels.is_empty() || self.levels.contains(&0) {
            return fail("levels must be a nonempty list of positive integers".into());
        }
        if self.levels.windows(2).any(|w| w[1] <= w[0]) {
            return fail(format!("levels must be strictly increasing, got {:?}", self.levels));
        }
        if self.methods.is_empty() {
            return fail("at least one method is required".into());
        }
        if self.methods.contains(&Method::Cg) && self.k == 0 {
            return fail("cg requires k >= 1".into());
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return fail(format!("gamma must be positive, got {}", self.gamma));
        }
        if let Some(s) = self.slice {
            if s.samples < 2 {
                return fail("slice_samples must be at least 2".into());
            }
        }
        if self.lattice == 0 {
            return fail("lattice must be positive".into());
        }
        Ok(())
    }

    /// Renders every field in the config text format; [`RunConfig::from_text`]
    /// reads it back to an equal value.
    pub fn to_text(&self) -> String {
        let methods: Vec<String> = self.methods.iter().map(|m| m.to_string()).collect();
        let levels: Vec<String> = self.levels.iter().map(|n| n.to_string()).collect();
        let mut s = String::new();
        let mut put = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        put("experiment", self.experiment.to_string());
        put("method", methods.join(","));
        put("k", self.k.to_string());
        put("levels", levels.join(","));
        put("sigma_plus", format!("{:?}", self.sigma_plus));
        put("kappa", format!("{:?}", self.kappa));
        put("gamma", format!("{:?}", self.gamma));
        put("pattern", self.pattern.to_string());
        put("out", self.out.display().to_string());
        put("quadrature", self.quadrature.map_or("default".into(), |q| q.to_string()));
        match self.slice {
            Some(sl) => {
                let axis = match sl.axis {
                    Axis::X1 => "x1",
                    Axis::X2 => "x2",
                };
                put("slice", format!("{axis}={:?}", sl.value));
                put("slice_samples", sl.samples.to_string());
            }
            None => put("slice", "none".into()),
        }
        put("lattice", self.lattice.to_string());
        s
    }
}

macro_rules! keyword_enum {
    ($ty:ident, $what:literal, $($variant:ident => $name:literal $(| $alias:literal)*),+) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($ty::$variant => $name),+ })
            }
        }

        impl FromStr for $ty {
            type Err = CliError;

            fn from_str(s: &str) -> Result<Self, CliError> {
                match s {
                    $($name $(| $alias)* => Ok($ty::$variant),)+
                    _ => Err(CliError::new("cli", format!(concat!("unknown ", $what, " `{}`"), s))),
                }
            }
        }
    };
}

keyword_enum!(Experiment, "experiment", Cavity => "cavity", Metamaterial => "metamaterial", Manufactured => "manufactured");
keyword_enum!(Method, "method", Hdg => "hdg", Cg => "cg");
keyword_enum!(MeshPattern, "mesh pattern", Mirrored => "mirrored" | "symmetric", Uniform => "uniform" | "nonsymmetric", Mapped => "mapped");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn text_round_trip() {
        let c = RunConfig {
            experiment: Experiment::Metamaterial,
            methods: vec![Method::Hdg, Method::Cg],
            k: 3,
            levels: vec![4, 8],
            kappa: -1.6,
            sigma_plus: 0.1 + 0.2,
            pattern: MeshPattern::Mapped,
            quadrature: Some(9),
            slice: Some(Slice { axis: Axis::X2, value: 1.0, samples: 51 }),
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::from_text(&c.to_text()).unwrap(), c);
        let d = RunConfig::default();
        assert_eq!(RunConfig::from_text(&d.to_text()).unwrap(), d);
    }

    #[test]
    fn comments_and_unknown_keys() {
        let c = RunConfig::from_text("# note\n\nk = 2\n").unwrap();
        assert_eq!(c.k, 2);
        let e = RunConfig::from_text("k = 2\nfoo = 1\n").unwrap_err();
        assert!(e.to_string().contains("line 2"));
    }

    #[test]
    fn invariants_rejected() {
        assert!(RunConfig::from_text("levels = 16,8").is_err());
        assert!(RunConfig::from_text("levels = 8,8").is_err());
        assert!(RunConfig::from_text("method = hdg,cg\nk = 0").is_err());
        assert!(RunConfig::from_text("method = hdg\nk = 0").is_ok());
        assert!(RunConfig::from_text("pattern = diagonal").is_err());
        assert!(RunConfig::from_text("slice_samples = 3").is_err());
    }
}
