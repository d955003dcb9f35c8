//! Key-value overrides from an INI file and the command line.
//!
//! Keys in `[defaults]` apply to every experiment; a section named after a
//! preset (`[fig4]`) applies to that preset only. Command-line values win.

use std::path::{Path, PathBuf};

use gdaam::anderson::MixingMode;
use gdaam::optimizers::Method;
use ini::Ini;

use crate::error::{BenchError, Result};
use crate::experiment::{ExperimentSpec, MomentumPreset, ProblemSpec};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<usize>,
    pub kappa: Option<f64>,
    pub methods: Option<Vec<Method>>,
    pub eta: Option<f64>,
    pub p: Option<usize>,
    pub mode: Option<MixingMode>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub momentum: Option<MomentumPreset>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

fn parse<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| BenchError::Config(format!("bad value `{raw}` for `{key}`")))
}

pub fn parse_list<T: std::str::FromStr>(key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse(key, s)).collect()
}

pub fn parse_mode(raw: &str) -> Result<MixingMode> {
    match raw.trim() {
        "restart" => Ok(MixingMode::Restart),
        "sliding" => Ok(MixingMode::Sliding),
        other => Err(BenchError::Config(format!("unknown mixing mode `{other}`"))),
    }
}

pub fn parse_methods(raw: &str) -> Result<Vec<Method>> {
    raw.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<Method>().map_err(BenchError::from))
        .collect()
}

impl Overrides {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = Some(parse(key, value)?),
            "kappa" => self.kappa = Some(parse(key, value)?),
            "methods" | "method" => self.methods = Some(parse_methods(value)?),
            "eta" => self.eta = Some(parse(key, value)?),
            "p" => self.p = Some(parse(key, value)?),
            "mode" => self.mode = Some(parse_mode(value)?),
            "tol" => self.tol = Some(parse(key, value)?),
            "max_iters" | "max-iters" => self.max_iters = Some(parse(key, value)?),
            "seeds" | "seed" => self.seeds = Some(parse_list(key, value)?),
            "momentum" => self.momentum = Some(value.trim().parse()?),
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "jobs" => self.jobs = Some(parse(key, value)?),
            other => return Err(BenchError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Fields set in `other` replace those in `self`.
    pub fn merged(mut self, other: &Overrides) -> Overrides {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(n, kappa, methods, eta, p, mode, tol, max_iters, seeds, momentum, out, jobs);
        self
    }

    pub fn apply(&self, spec: &mut ExperimentSpec) {
        match &mut spec.problem {
            ProblemSpec::Bilinear { n, kappa } => {
                if let Some(v) = self.n {
                    *n = v;
                }
                if let Some(k) = self.kappa {
                    *kappa = Some(k);
                }
            }
            ProblemSpec::BilinearQuadratic { n, .. } => {
                if let Some(v) = self.n {
                    *n = v;
                }
            }
            ProblemSpec::Scalar(_) => {}
        }
        if let Some(m) = &self.methods {
            spec.methods = m.clone();
        }
        if let Some(v) = self.eta {
            spec.eta = v;
        }
        if let Some(v) = self.p {
            spec.p = v;
        }
        if let Some(v) = self.mode {
            spec.mode = v;
        }
        if let Some(v) = self.tol {
            spec.tol = v;
        }
        if let Some(v) = self.max_iters {
            spec.max_iters = v;
        }
        if let Some(v) = &self.seeds {
            spec.seeds = v.clone();
        }
        if let Some(v) = self.momentum {
            spec.momentum = v;
        }
    }
}

/// Overrides for `section` from INI text: `[defaults]` first, then the
/// section itself.
pub fn overrides_from_ini(text: &str, section: Option<&str>) -> Result<Overrides> {
    let ini = Ini::load_from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
    let mut out = Overrides::default();
    for name in std::iter::once("defaults").chain(section) {
        if let Some(props) = ini.section(Some(name)) {
            for (k, v) in props.iter() {
                out.set(k, v)?;
            }
        }
    }
    Ok(out)
}

pub fn load_overrides(path: &Path, section: Option<&str>) -> Result<Overrides> {
    overrides_from_ini(&std::fs::read_to_string(path)?, section)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "[defaults]\nmax_iters = 500\nseeds = 1,2\n\n[fig4]\nn = 50\nmethods = eg, alt-gda-am\n";

    #[test]
    fn sections_layer() {
        let base = overrides_from_ini(TEXT, None).unwrap();
        assert_eq!(base.max_iters, Some(500));
        assert_eq!(base.n, None);
        let fig4 = overrides_from_ini(TEXT, Some("fig4")).unwrap();
        assert_eq!(fig4.n, Some(50));
        assert_eq!(fig4.seeds, Some(vec![1, 2]));
        assert_eq!(fig4.methods, Some(vec![Method::Eg, Method::AltGdaAm]));
    }

    #[test]
    fn cli_values_win() {
        let file = overrides_from_ini(TEXT, Some("fig4")).unwrap();
        let cli = Overrides {
            n: Some(10),
            ..Default::default()
        };
        let merged = file.merged(&cli);
        assert_eq!((merged.n, merged.max_iters), (Some(10), Some(500)));

        let mut spec = ExperimentSpec::new("x", ProblemSpec::Bilinear { n: 100, kappa: None }, vec![Method::Og]);
        merged.apply(&mut spec);
        assert_eq!(spec.problem, ProblemSpec::Bilinear { n: 10, kappa: None });
        assert_eq!(spec.methods, vec![Method::Eg, Method::AltGdaAm]);
        assert_eq!(spec.seeds, vec![1, 2]);
    }

    #[test]
    fn bad_keys_and_values() {
        assert!(overrides_from_ini("[defaults]\ncolour = red\n", None).is_err());
        assert!(overrides_from_ini("[defaults]\np = ten\n", None).is_err());
        assert!(overrides_from_ini("[defaults]\nmode = lifo\n", None).is_err());
    }
}
