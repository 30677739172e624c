use std::fmt::Write as _;
use std::path::PathBuf;

use crate::dynamics::{DynamicsOptions, Frame, Method};
use crate::error::{Error, Result};
use crate::model::BathSpec;

/// Named parameter sets. Both use T = 300 K and J₀ = 5 cm⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// η = 2, ħω_c = 1000 cm⁻¹.
    Case1,
    /// η = 5, ħω_c = 400 cm⁻¹.
    Case2,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Case1 => "case1",
            Preset::Case2 => "case2",
        }
    }

    /// (η, ħω_c, T, J₀)
    pub fn values(self) -> (f64, f64, f64, f64) {
        match self {
            Preset::Case1 => (2.0, 1000.0, 300.0, 5.0),
            Preset::Case2 => (5.0, 400.0, 300.0, 5.0),
        }
    }
}

/// Distances `R/R₀` to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum DistanceGrid {
    /// `count` equally spaced points from `min` to `max` inclusive.
    Linear { min: f64, max: f64, count: usize },
    /// Explicit strictly increasing list.
    List(Vec<f64>),
}

impl DistanceGrid {
    pub fn points(&self) -> Vec<f64> {
        match self {
            DistanceGrid::Linear { min, max, count } => {
                let n = (*count - 1) as f64;
                (0..*count)
                    .map(|i| if i + 1 == *count { *max } else { min + (max - min) * i as f64 / n })
                    .collect()
            }
            DistanceGrid::List(v) => v.clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            DistanceGrid::Linear { count, .. } => *count,
            DistanceGrid::List(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Option<Preset>,
    pub eta_d: f64,
    pub eta_a: f64,
    /// ħω_c, cm⁻¹.
    pub omega_c: f64,
    /// K.
    pub temperature: f64,
    /// E_D − E_A values, cm⁻¹.
    pub delta_e: Vec<f64>,
    /// Coupling at R = R₀, cm⁻¹.
    pub j0: f64,
    pub grid: DistanceGrid,
    pub methods: Vec<Method>,
    /// Initial propagation horizon, fs. Sweeps double it until the 1/e
    /// criterion is crossed, up to `t_cap`.
    pub t_max: f64,
    pub t_cap: f64,
    pub report_dt: f64,
    /// Kernel table step, fs.
    pub dt: f64,
    /// Memory horizon, fs.
    pub memory: f64,
    /// Donor lifetime for efficiency curves, ns. Deduced from the sweep at
    /// R/R₀ = 1/2 when absent.
    pub tau_d_ns: Option<f64>,
    pub strict: bool,
    /// Add the exponential comparison columns to population files.
    pub fig3: bool,
    pub frame: Frame,
    pub out_dir: PathBuf,
    /// Worker threads for sweeps; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn bath(&self) -> Result<BathSpec> {
        BathSpec::new(self.eta_d, self.eta_a, self.omega_c, self.temperature)
    }

    pub fn dynamics_options(&self) -> DynamicsOptions {
        DynamicsOptions {
            dt: self.dt,
            memory: self.memory,
            report_dt: self.report_dt,
            ..Default::default()
        }
    }

    /// One-line summary of every setting that affects the numbers (output
    /// directory and worker count excluded).
    pub fn describe(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        if let Some(p) = self.preset {
            let _ = write!(s, "preset={} ", p.name());
        }
        let _ = write!(
            s,
            "eta_d={} eta_a={} omega_c={} temperature={} j0={} dE={} ",
            self.eta_d,
            self.eta_a,
            self.omega_c,
            self.temperature,
            self.j0,
            list(&self.delta_e)
        );
        match &self.grid {
            DistanceGrid::Linear { min, max, count } => {
                let _ = write!(s, "r_min={min} r_max={max} r_count={count} ");
            }
            DistanceGrid::List(v) => {
                let _ = write!(s, "r={} ", list(v));
            }
        }
        let methods: Vec<&str> = self.methods.iter().map(|m| m.tag()).collect();
        let _ = write!(
            s,
            "methods={} t_max={} t_cap={} report_dt={} dt={} memory={}",
            methods.join(","),
            self.t_max,
            self.t_cap,
            self.report_dt,
            self.dt,
            self.memory
        );
        if let Some(t) = self.tau_d_ns {
            let _ = write!(s, " tau_d={t}");
        }
        let frame = match self.frame {
            Frame::Polaron => "polaron",
            Frame::Original => "original",
        };
        let _ = write!(s, " strict={} fig3={} frame={}", self.strict, self.fig3, frame);
        s
    }
}

pub const KEYS: &[&str] = &[
    "preset", "eta", "eta_d", "eta_a", "omega_c", "temperature", "j0", "dE", "r", "r_min", "r_max", "r_count",
    "methods", "t_max", "t_cap", "report_dt", "dt", "memory", "tau_d", "strict", "fig3", "frame", "out_dir",
];

#[derive(Default)]
struct Partial {
    preset: Option<Preset>,
    eta_d: Option<f64>,
    eta_a: Option<f64>,
    omega_c: Option<f64>,
    temperature: Option<f64>,
    j0: Option<f64>,
    delta_e: Option<Vec<f64>>,
    r_list: Option<Vec<f64>>,
    r_min: Option<f64>,
    r_max: Option<f64>,
    r_count: Option<usize>,
    methods: Option<Vec<Method>>,
    t_max: Option<f64>,
    t_cap: Option<f64>,
    report_dt: Option<f64>,
    dt: Option<f64>,
    memory: Option<f64>,
    tau_d: Option<f64>,
    strict: Option<bool>,
    fig3: Option<bool>,
    frame: Option<Frame>,
    out_dir: Option<PathBuf>,
}

fn num(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .trim()
        .parse()
        .map_err(|_| Error::parse(key, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(Error::parse(key, format!("`{v}` is not finite")));
    }
    Ok(x)
}

fn positive(key: &str, v: &str) -> Result<f64> {
    let x = num(key, v)?;
    if x <= 0.0 {
        return Err(Error::parse(key, format!("must be positive, got {x}")));
    }
    Ok(x)
}

fn non_negative(key: &str, v: &str) -> Result<f64> {
    let x = num(key, v)?;
    if x < 0.0 {
        return Err(Error::parse(key, format!("must be non-negative, got {x}")));
    }
    Ok(x)
}

fn num_list(key: &str, v: &str) -> Result<Vec<f64>> {
    let out = v
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| num(key, s))
        .collect::<Result<Vec<_>>>()?;
    if out.is_empty() {
        return Err(Error::parse(key, "empty list"));
    }
    Ok(out)
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(Error::parse(key, format!("`{v}` is not a boolean"))),
    }
}

impl Partial {
    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "preset" => {
                self.preset = Some(match v.trim().to_ascii_lowercase().as_str() {
                    "case1" | "i" => Preset::Case1,
                    "case2" | "ii" => Preset::Case2,
                    _ => return Err(Error::parse(key, format!("unknown preset `{v}` (case1, case2)"))),
                })
            }
            "eta" => {
                let x = non_negative(key, v)?;
                self.eta_d = Some(x);
                self.eta_a = Some(x);
            }
            "eta_d" => self.eta_d = Some(non_negative(key, v)?),
            "eta_a" => self.eta_a = Some(non_negative(key, v)?),
            "omega_c" => self.omega_c = Some(positive(key, v)?),
            "temperature" => self.temperature = Some(positive(key, v)?),
            "j0" => self.j0 = Some(num(key, v)?),
            "dE" => self.delta_e = Some(num_list(key, v)?),
            "r" => {
                let list = num_list(key, v)?;
                if list[0] <= 0.0 || list.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::parse(key, "distances must be positive and strictly increasing"));
                }
                self.r_list = Some(list);
            }
            "r_min" => self.r_min = Some(positive(key, v)?),
            "r_max" => self.r_max = Some(positive(key, v)?),
            "r_count" => {
                let n: usize = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(key, format!("`{v}` is not a count")))?;
                if n < 2 {
                    return Err(Error::parse(key, format!("need at least 2 points, got {n}")));
                }
                self.r_count = Some(n);
            }
            "methods" => {
                let mut ms = Vec::new();
                for m in v.split(',').map(|s| s.trim().to_ascii_lowercase()) {
                    let m = match m.as_str() {
                        "cret" => Method::Cret,
                        "fret" => Method::Fret,
                        _ => return Err(Error::parse(key, format!("unknown method `{m}` (cret, fret)"))),
                    };
                    if !ms.contains(&m) {
                        ms.push(m);
                    }
                }
                ms.sort_by_key(|m| match m {
                    Method::Cret => 0,
                    Method::Fret => 1,
                });
                self.methods = Some(ms);
            }
            "t_max" => self.t_max = Some(positive(key, v)?),
            "t_cap" => self.t_cap = Some(positive(key, v)?),
            "report_dt" => self.report_dt = Some(positive(key, v)?),
            "dt" => self.dt = Some(positive(key, v)?),
            "memory" => self.memory = Some(positive(key, v)?),
            "tau_d" => self.tau_d = Some(positive(key, v)?),
            "strict" => self.strict = Some(boolean(key, v)?),
            "fig3" => self.fig3 = Some(boolean(key, v)?),
            "frame" => {
                self.frame = Some(match v.trim().to_ascii_lowercase().as_str() {
                    "polaron" => Frame::Polaron,
                    "original" => Frame::Original,
                    _ => return Err(Error::parse(key, format!("unknown frame `{v}` (polaron, original)"))),
                })
            }
            "out_dir" => self.out_dir = Some(PathBuf::from(v.trim())),
            _ => return Err(Error::parse(key, "unknown key")),
        }
        Ok(())
    }

    fn resolve(self) -> Result<RunConfig> {
        let preset = self.preset.map(Preset::values);
        let need = |key: &str, v: Option<f64>, from_preset: Option<f64>| {
            v.or(from_preset)
                .ok_or_else(|| Error::parse(key, "required (set it or choose a preset)"))
        };
        let eta_d = need("eta_d", self.eta_d, preset.map(|p| p.0))?;
        let eta_a = need("eta_a", self.eta_a, preset.map(|p| p.0))?;
        let omega_c = need("omega_c", self.omega_c, preset.map(|p| p.1))?;
        let temperature = need("temperature", self.temperature, preset.map(|p| p.2))?;
        let j0 = need("j0", self.j0, preset.map(|p| p.3))?;
        let delta_e = self.delta_e.ok_or_else(|| Error::parse("dE", "required"))?;

        let grid = match self.r_list {
            Some(list) => {
                if self.r_min.is_some() || self.r_max.is_some() || self.r_count.is_some() {
                    return Err(Error::parse("r", "give either an explicit list or r_min/r_max/r_count"));
                }
                DistanceGrid::List(list)
            }
            None => {
                let min = self.r_min.unwrap_or(0.2);
                let max = self.r_max.unwrap_or(0.5);
                if max <= min {
                    return Err(Error::parse("r_max", format!("must exceed r_min = {min}, got {max}")));
                }
                DistanceGrid::Linear { min, max, count: self.r_count.unwrap_or(1000) }
            }
        };
        let t_max = self.t_max.unwrap_or(2000.0);
        let t_cap = self.t_cap.unwrap_or(16000.0_f64.max(t_max));
        if t_cap < t_max {
            return Err(Error::parse("t_cap", format!("must be at least t_max = {t_max}, got {t_cap}")));
        }
        let dt = self.dt.unwrap_or(0.25);
        let report_dt = self.report_dt.unwrap_or(0.5);
        let memory = self.memory.unwrap_or(4000.0);
        if memory < 4.0 * dt {
            return Err(Error::parse("memory", format!("must cover at least four steps of dt = {dt}")));
        }
        Ok(RunConfig {
            preset: self.preset,
            eta_d,
            eta_a,
            omega_c,
            temperature,
            delta_e,
            j0,
            grid,
            methods: self.methods.unwrap_or_else(|| vec![Method::Cret, Method::Fret]),
            t_max,
            t_cap,
            report_dt,
            dt,
            memory,
            tau_d_ns: self.tau_d,
            strict: self.strict.unwrap_or(false),
            fig3: self.fig3.unwrap_or(false),
            frame: self.frame.unwrap_or_default(),
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from(".")),
            workers: None,
        })
    }
}

/// Resolves a configuration from key/value pairs applied in order, so later
/// pairs override earlier ones and explicit keys override the preset.
pub fn parse_config<K: AsRef<str>, V: AsRef<str>>(pairs: &[(K, V)]) -> Result<RunConfig> {
    let mut p = Partial::default();
    for (k, v) in pairs {
        p.set(k.as_ref().trim(), v.as_ref())?;
    }
    p.resolve()
}

/// Splits flat `key = value` text into pairs. Blank lines and lines starting
/// with `#` are skipped.
pub fn config_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(format!("line {}", i + 1), format!("expected key=value, got `{line}`")))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// [`parse_config`] over the contents of a config file.
pub fn parse_config_text(text: &str) -> Result<RunConfig> {
    parse_config(&config_pairs(text)?)
}

/// Worker count from `RETSIM_WORKERS`, if set to a positive integer.
pub fn workers_from_env() -> Result<Option<usize>> {
    match std::env::var("RETSIM_WORKERS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::parse("RETSIM_WORKERS", format!("`{v}` is not a positive integer"))),
        },
        Err(_) => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_case1() {
        let c = parse_config(&[("preset", "case1"), ("dE", "800")]).unwrap();
        assert_eq!((c.eta_d, c.eta_a, c.omega_c, c.temperature, c.j0), (2.0, 2.0, 1000.0, 300.0, 5.0));
        assert_eq!(c.delta_e, vec![800.0]);
        assert_eq!(c.grid.len(), 1000);
        let r = c.grid.points();
        assert_eq!((r[0], r[999]), (0.2, 0.5));
    }

    #[test]
    fn explicit_overrides_preset() {
        let c = parse_config(&[("preset", "case2"), ("omega_c", "500"), ("dE", "400,800")]).unwrap();
        assert_eq!((c.eta_d, c.omega_c), (5.0, 500.0));
        assert_eq!(c.delta_e, vec![400.0, 800.0]);
    }

    #[test]
    fn empty_config_is_an_error() {
        let empty: [(&str, &str); 0] = [];
        assert!(matches!(parse_config(&empty), Err(Error::Parse { .. })));
    }

    #[test]
    fn malformed_number_names_key() {
        match parse_config(&[("preset", "case1"), ("dE", "8x0")]) {
            Err(Error::Parse { key, .. }) => assert_eq!(key, "dE"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_and_out_of_range_keys() {
        for (k, v) in [("colour", "red"), ("temperature", "-3"), ("r_count", "1"), ("r", "0.5,0.3")] {
            match parse_config(&[("preset", "case1"), ("dE", "800"), (k, v)]) {
                Err(Error::Parse { key, .. }) => assert_eq!(key, k),
                other => panic!("{k}: {other:?}"),
            }
        }
    }

    #[test]
    fn text_roundtrip() {
        let c = parse_config_text("# comment\npreset = case1\ndE = 800\nr = 0.2, 0.5\nstrict=true\n").unwrap();
        assert_eq!(c.grid, DistanceGrid::List(vec![0.2, 0.5]));
        assert!(c.strict);
        assert!(parse_config_text("preset case1").is_err());
    }

    #[test]
    fn describe_excludes_io_settings() {
        let mut a = parse_config(&[("preset", "case1"), ("dE", "800")]).unwrap();
        let b = a.clone();
        a.out_dir = "/elsewhere".into();
        a.workers = Some(8);
        assert_eq!(a.describe(), b.describe());
        assert!(a.describe().contains("preset=case1"));
    }
}
