//! Experiment configuration from flags and `key=value` files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::bandit::{Algo, ArmModel, InitMode, MeanUpdate, RewardRange, RunConfig, Schedule};
use crate::error::{input_err, Error, Result};
use crate::matroid::MatroidSpec;

/// How arm means are given: explicit values or a generator evaluated per `K`.
#[derive(Debug, Clone, PartialEq)]
pub enum MeansSpec {
    List(Vec<f64>),
    /// `linear:HI:LO`, evenly spaced from `HI` down to `LO`.
    Linear { hi: f64, lo: f64 },
    /// `const:V`
    Const(f64),
    /// `twolevel:HI:LO:NHI`, the first `NHI` arms at `HI`, the rest at `LO`.
    TwoLevel { hi: f64, lo: f64, n_hi: usize },
}

impl MeansSpec {
    pub fn generate(&self, k: usize) -> Result<Vec<f64>> {
        Ok(match self {
            MeansSpec::List(v) => {
                if v.len() != k {
                    return Err(input_err!("means: expected {k} values, got {}", v.len()));
                }
                v.clone()
            }
            MeansSpec::Linear { hi, lo } => (0..k)
                .map(|i| if k == 1 { *hi } else { let t = i as f64 / (k - 1) as f64; hi * (1.0 - t) + lo * t })
                .collect(),
            MeansSpec::Const(v) => vec![*v; k],
            MeansSpec::TwoLevel { hi, lo, n_hi } => (0..k).map(|i| if i < *n_hi { *hi } else { *lo }).collect(),
        })
    }
}

impl FromStr for MeansSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |x: &str| -> Result<f64> { x.trim().parse::<f64>().map_err(|_| input_err!("means: '{x}' is not a number")) };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["linear", hi, lo] => Ok(MeansSpec::Linear { hi: num(hi)?, lo: num(lo)? }),
            ["const", v] => Ok(MeansSpec::Const(num(v)?)),
            ["twolevel", hi, lo, n] => Ok(MeansSpec::TwoLevel {
                hi: num(hi)?,
                lo: num(lo)?,
                n_hi: n.trim().parse().map_err(|_| input_err!("means: '{n}' is not a count"))?,
            }),
            [single] => {
                let v = single
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|x| !x.is_empty())
                    .map(num)
                    .collect::<Result<Vec<_>>>()?;
                if v.is_empty() {
                    return Err(input_err!("means: empty list"));
                }
                Ok(MeansSpec::List(v))
            }
            _ => Err(input_err!("means: cannot parse '{s}' (list, linear:HI:LO, const:V, twolevel:HI:LO:NHI)")),
        }
    }
}

/// Reward distribution family used for every arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArmFamily {
    TwoPoint,
    Gaussian { sigma: f64 },
}

impl FromStr for ArmFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "twopoint" {
            return Ok(ArmFamily::TwoPoint);
        }
        if let Some(sigma) = s.strip_prefix("gaussian:") {
            let sigma: f64 = sigma.parse().map_err(|_| input_err!("arms: bad sigma '{sigma}'"))?;
            return Ok(ArmFamily::Gaussian { sigma });
        }
        Err(input_err!("arms: unknown family '{s}' (twopoint, gaussian:SIGMA)"))
    }
}

/// Raw, unvalidated settings; every field optional so that files and flags
/// can be layered.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub matroid: Option<String>,
    pub algo: Option<String>,
    pub horizon: Option<String>,
    pub m: Option<String>,
    pub epsilon: Option<String>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub means: Option<String>,
    pub seed: Option<String>,
    pub seeds: Option<String>,
    pub schedule: Option<String>,
    pub out: Option<String>,
    pub arms: Option<String>,
    pub init_mode: Option<String>,
    pub mean_update: Option<String>,
}

impl RawConfig {
    /// Parses `key=value` lines; `#` starts a comment.
    pub fn parse_file_contents(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| input_err!("config line {}: expected key=value", i + 1))?;
            let value = value.trim();
            let value = match value.strip_prefix('"').and_then(|v| v.strip_suffix('"')) {
                Some(inner) if !inner.contains('"') => inner,
                _ => value,
            };
            map.insert(key.trim().to_string(), value.to_string());
        }
        let mut raw = RawConfig::default();
        for (key, value) in map {
            let slot = match key.as_str() {
                "matroid" => &mut raw.matroid,
                "algo" => &mut raw.algo,
                "T" => &mut raw.horizon,
                "m" => &mut raw.m,
                "epsilon" => &mut raw.epsilon,
                "a" => &mut raw.a,
                "b" => &mut raw.b,
                "means" => &mut raw.means,
                "seed" => &mut raw.seed,
                "seeds" => &mut raw.seeds,
                "schedule" => &mut raw.schedule,
                "out" => &mut raw.out,
                "arms" => &mut raw.arms,
                "init-mode" => &mut raw.init_mode,
                "mean-update" => &mut raw.mean_update,
                other => return Err(input_err!("config: unknown key '{other}'")),
            };
            *slot = Some(value);
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse_file_contents(&text)
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: RawConfig) -> RawConfig {
        RawConfig {
            matroid: self.matroid.or(base.matroid),
            algo: self.algo.or(base.algo),
            horizon: self.horizon.or(base.horizon),
            m: self.m.or(base.m),
            epsilon: self.epsilon.or(base.epsilon),
            a: self.a.or(base.a),
            b: self.b.or(base.b),
            means: self.means.or(base.means),
            seed: self.seed.or(base.seed),
            seeds: self.seeds.or(base.seeds),
            schedule: self.schedule.or(base.schedule),
            out: self.out.or(base.out),
            arms: self.arms.or(base.arms),
            init_mode: self.init_mode.or(base.init_mode),
            mean_update: self.mean_update.or(base.mean_update),
        }
    }
}

/// Validated experiment settings.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub matroid: MatroidSpec,
    pub algo: Algo,
    pub horizon: u64,
    pub m: u32,
    pub epsilon: Option<f64>,
    pub range: RewardRange,
    pub means: MeansSpec,
    pub arms: ArmFamily,
    pub seed: u64,
    pub seeds: Option<usize>,
    pub schedule: Schedule,
    pub out: Option<PathBuf>,
    pub init_mode: InitMode,
    pub mean_update: MeanUpdate,
}

fn field<T: FromStr>(name: &str, value: &Option<String>) -> Result<Option<T>> {
    value
        .as_deref()
        .map(|v| v.trim().parse::<T>().map_err(|_| input_err!("{name}: cannot parse '{v}'")))
        .transpose()
}

impl ExperimentConfig {
    /// Validates without the `T >= K` check (used by the scaling sweep, which
    /// picks `K` itself).
    pub fn from_raw_unchecked_horizon(raw: &RawConfig) -> Result<Self> {
        let matroid: MatroidSpec = raw
            .matroid
            .as_deref()
            .ok_or_else(|| input_err!("matroid: required"))?
            .parse()
            .map_err(|e: Error| input_err!("matroid: {e}"))?;
        let algo: Algo = raw.algo.as_deref().unwrap_or("fastercucb").parse().map_err(|e: Error| input_err!("algo: {e}"))?;
        let horizon: u64 = field("T", &raw.horizon)?.ok_or_else(|| input_err!("T: required"))?;
        if horizon == 0 {
            return Err(input_err!("T: must be positive"));
        }
        let m: u32 = field("m", &raw.m)?.unwrap_or(1);
        if m == 0 {
            return Err(input_err!("m: must be at least 1"));
        }
        let epsilon: Option<f64> = field("epsilon", &raw.epsilon)?;
        if let Some(e) = epsilon {
            if !(e > 0.0 && e < 1.0) {
                return Err(input_err!("epsilon: must lie in (0, 1), got {e}"));
            }
        }
        let a: f64 = field("a", &raw.a)?.unwrap_or(0.1);
        let b: f64 = field("b", &raw.b)?.unwrap_or(0.9);
        let range = RewardRange::new(a, b).map_err(|e| input_err!("a/b: {e}"))?;
        let default_means = format!("linear:{b}:{a}");
        let means: MeansSpec = raw.means.as_deref().unwrap_or(&default_means).parse()?;
        let arms: ArmFamily = raw.arms.as_deref().unwrap_or("twopoint").parse()?;
        let seed: u64 = field("seed", &raw.seed)?.unwrap_or(0);
        let seeds: Option<usize> = field("seeds", &raw.seeds)?;
        if seeds == Some(0) {
            return Err(input_err!("seeds: must be at least 1"));
        }
        let schedule: Schedule = raw.schedule.as_deref().unwrap_or("pow2").parse().map_err(|e: Error| input_err!("schedule: {e}"))?;
        let init_mode = match raw.init_mode.as_deref().unwrap_or("coverage") {
            "coverage" => InitMode::Coverage,
            "per-arm" => InitMode::PerArm,
            other => return Err(input_err!("init-mode: unknown '{other}' (coverage, per-arm)")),
        };
        let mean_update = match raw.mean_update.as_deref().unwrap_or("running") {
            "running" => MeanUpdate::Running,
            "round-indexed" => MeanUpdate::RoundIndexed,
            other => return Err(input_err!("mean-update: unknown '{other}' (running, round-indexed)")),
        };
        if algo == Algo::LazyHeap && matroid.kind() != crate::matroid::MatroidKind::Uniform {
            return Err(input_err!("algo: lazyheap requires a uniform matroid"));
        }
        let cfg = Self {
            matroid,
            algo,
            horizon,
            m,
            epsilon,
            range,
            means,
            arms,
            seed,
            seeds,
            schedule,
            out: raw.out.as_ref().map(PathBuf::from),
            init_mode,
            mean_update,
        };
        cfg.arm_models_for(cfg.matroid.ground_size())?;
        Ok(cfg)
    }

    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let cfg = Self::from_raw_unchecked_horizon(raw)?;
        let k = cfg.matroid.ground_size();
        if cfg.horizon < k as u64 {
            return Err(input_err!("T: T = {} is smaller than K = {k}", cfg.horizon));
        }
        Ok(cfg)
    }

    pub fn arm_models_for(&self, k: usize) -> Result<Vec<ArmModel>> {
        let means = self.means.generate(k)?;
        means
            .iter()
            .enumerate()
            .map(|(i, &mu)| {
                if !self.range.contains(mu) {
                    return Err(input_err!("means: arm {i} has mean {mu} outside [{}, {}]", self.range.a, self.range.b));
                }
                match self.arms {
                    ArmFamily::TwoPoint => ArmModel::two_point(mu, self.range),
                    ArmFamily::Gaussian { sigma } => ArmModel::truncated_gaussian(mu, sigma, self.range),
                }
            })
            .collect()
    }

    pub fn run_config(&self, seed: u64) -> Result<RunConfig> {
        self.run_config_for(self.matroid.clone(), seed)
    }

    pub fn run_config_for(&self, matroid: MatroidSpec, seed: u64) -> Result<RunConfig> {
        let arms = self.arm_models_for(matroid.ground_size())?;
        let mut rc = RunConfig::new(matroid, self.algo, self.horizon, self.range, arms, seed);
        rc.m = self.m;
        rc.epsilon = self.epsilon;
        rc.schedule = self.schedule;
        rc.init_mode = self.init_mode;
        rc.mean_update = self.mean_update;
        Ok(rc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(pairs: &[(&str, &str)]) -> RawConfig {
        let text: String = pairs.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        RawConfig::parse_file_contents(&text).unwrap()
    }

    #[test]
    fn valid_example() {
        let r = raw(&[("matroid", "uniform 8 3"), ("algo", "fastercucb"), ("T", "100000"), ("m", "1"), ("a", "0.1"), ("b", "0.9"), ("seed", "7")]);
        let c = ExperimentConfig::from_raw(&r).unwrap();
        assert_eq!(c.horizon, 100_000);
        assert_eq!(c.matroid.rank(), 3);
        assert_eq!(c.seed, 7);
    }

    #[test]
    fn horizon_below_k_rejected() {
        let r = raw(&[("matroid", "uniform 8 3"), ("T", "5")]);
        let e = ExperimentConfig::from_raw(&r).unwrap_err().to_string();
        assert!(e.contains("T"), "{e}");
        assert!(ExperimentConfig::from_raw_unchecked_horizon(&r).is_ok());
    }

    #[test]
    fn lazyheap_needs_uniform() {
        let r = raw(&[("matroid", "graphical 3 \"0,1;1,2;0,2\""), ("T", "100"), ("algo", "lazyheap")]);
        let e = ExperimentConfig::from_raw(&r).unwrap_err().to_string();
        assert!(e.contains("lazyheap requires a uniform matroid"), "{e}");
    }

    #[test]
    fn means_generators() {
        assert_eq!("linear:0.9:0.1".parse::<MeansSpec>().unwrap().generate(3).unwrap(), vec![0.9, 0.5, 0.1]);
        assert_eq!("const:0.4".parse::<MeansSpec>().unwrap().generate(2).unwrap(), vec![0.4, 0.4]);
        assert_eq!("twolevel:0.8:0.3:1".parse::<MeansSpec>().unwrap().generate(3).unwrap(), vec![0.8, 0.3, 0.3]);
        assert_eq!("0.5, 0.6".parse::<MeansSpec>().unwrap(), MeansSpec::List(vec![0.5, 0.6]));
        assert!("0.5,x".parse::<MeansSpec>().is_err());
        assert!(MeansSpec::List(vec![0.5]).generate(2).is_err());
    }

    #[test]
    fn quoted_values() {
        let r = RawConfig::parse_file_contents("matroid=\"uniform 4 2\"\nT=10\n").unwrap();
        assert_eq!(r.matroid.as_deref(), Some("uniform 4 2"));
        let r = RawConfig::parse_file_contents("matroid=graphical 3 \"0,1;1,2\"  # path\n").unwrap();
        assert_eq!(r.matroid.as_deref(), Some("graphical 3 \"0,1;1,2\""));
    }

    #[test]
    fn flags_win_over_file() {
        let file = raw(&[("matroid", "uniform 4 2"), ("T", "100"), ("seed", "1")]);
        let flags = RawConfig {
            seed: Some("9".into()),
            ..Default::default()
        };
        let c = ExperimentConfig::from_raw(&flags.over(file)).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.horizon, 100);
    }

    #[test]
    fn field_errors_name_the_field() {
        for (pairs, name) in [
            (vec![("matroid", "uniform 4 2"), ("T", "abc")], "T"),
            (vec![("matroid", "uniform 4 2"), ("T", "100"), ("epsilon", "1.5")], "epsilon"),
            (vec![("matroid", "uniform 4 2"), ("T", "100"), ("means", "0.5,0.5,0.5,2.0")], "means"),
            (vec![("matroid", "uniform 4 2"), ("T", "100"), ("m", "0")], "m"),
            (vec![("T", "100")], "matroid"),
        ] {
            let e = ExperimentConfig::from_raw(&raw(&pairs)).unwrap_err().to_string();
            assert!(e.contains(name), "{e}");
        }
        assert!(RawConfig::parse_file_contents("bogus=1").is_err());
        assert!(RawConfig::parse_file_contents("novalue").is_err());
    }
}
