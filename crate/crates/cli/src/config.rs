//! Run configuration: a flat `key = value` file, overridden by command-line
//! flags of the same name in kebab-case.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use kaon_core::kaon::{Constants, Kinematics, TimeConvention};
use kaon_core::protocols::{GeneralSource, Mode};
use kaon_core::{PairBasisVector, RetainPolicy, SingleKaon, C64};

use crate::CliError;

/// Every accepted key, in echo order.
pub const KEYS: &[&str] = &[
    "mode",
    "alpha_re",
    "alpha_im",
    "beta_re",
    "beta_im",
    "c1_re",
    "c1_im",
    "c2_re",
    "c2_im",
    "w1_k0_re",
    "w1_k0_im",
    "w1_k0bar_re",
    "w1_k0bar_im",
    "w2_k0_re",
    "w2_k0_im",
    "w2_k0bar_re",
    "w2_k0bar_im",
    "gamma_l",
    "delta_m",
    "epsilon_re",
    "epsilon_im",
    "gamma_a",
    "gamma_b",
    "gamma_c",
    "gamma_d",
    "t_z",
    "t_x",
    "t_m_start",
    "t_m_stop",
    "t_m_steps",
    "n_runs",
    "seed",
    "retain",
    "time_convention",
    "out_dir",
    "workers",
];

const TELEPORT_KEYS: &[&str] = &["alpha_re", "alpha_im", "beta_re", "beta_im"];
const GENERAL_KEYS: &[&str] = &[
    "c1_re",
    "c1_im",
    "c2_re",
    "c2_im",
    "w1_k0_re",
    "w1_k0_im",
    "w1_k0bar_re",
    "w1_k0bar_im",
    "w2_k0_re",
    "w2_k0_im",
    "w2_k0bar_re",
    "w2_k0bar_im",
];

pub const DEFAULT_OUT_DIR: &str = "kaon-out";
pub const DEFAULT_STEPS: u32 = 5;
/// Default span of the measurement-time grid, τ_S.
pub const DEFAULT_SPAN: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    Teleport,
    Swap,
    General,
    Verify,
}

impl RunMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RunMode::Teleport => "teleport",
            RunMode::Swap => "swap",
            RunMode::General => "general",
            RunMode::Verify => "verify",
        }
    }
}

impl FromStr for RunMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "teleport" => Ok(RunMode::Teleport),
            "swap" => Ok(RunMode::Swap),
            "general" => Ok(RunMode::General),
            "verify" => Ok(RunMode::Verify),
            other => Err(format!("unknown mode `{other}` (expected teleport|swap|general|verify)")),
        }
    }
}

/// Measurement times `start, …, stop` in `steps` equal intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub steps: u32,
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / f64::from(self.steps - 1);
        (0..self.steps).map(|i| if i + 1 == self.steps { self.stop } else { self.start + h * f64::from(i) }).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: RunMode,
    /// The protocol, `None` in verify mode.
    pub protocol: Option<Mode>,
    pub constants: Constants,
    pub kin: Kinematics,
    pub grid: TimeGrid,
    pub n_runs: u64,
    pub seed: u64,
    pub retain: RetainPolicy,
    pub out_dir: PathBuf,
    /// `None` uses every available core.
    pub workers: Option<usize>,
}

fn config_err(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("key `{key}`: {msg}"))
}

/// Parse `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_entries(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!("line {}: expected `key = value`, got `{}`", n + 1, raw.trim())));
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(config_err(k, format!("unknown key (line {})", n + 1)));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(config_err(k, format!("given twice (line {})", n + 1)));
        }
    }
    Ok(out)
}

struct Entries<'a>(&'a BTreeMap<String, String>);

impl Entries<'_> {
    fn has(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.0
            .get(key)
            .map(|v| match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                Ok(x) => Err(config_err(key, format!("must be finite, got {x}"))),
                Err(_) => Err(config_err(key, format!("expected a number, got `{v}`"))),
            })
            .transpose()
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn parsed<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, CliError> {
        self.0
            .get(key)
            .map(|v| v.parse::<T>().map_err(|_| config_err(key, format!("expected {what}, got `{v}`"))))
            .transpose()
    }

    /// `<prefix>_re` and `<prefix>_im`; `None` if neither is given.
    fn complex(&self, prefix: &str) -> Result<Option<C64>, CliError> {
        let (re, im) = (format!("{prefix}_re"), format!("{prefix}_im"));
        if !self.has(&re) && !self.has(&im) {
            return Ok(None);
        }
        Ok(Some(C64::new(self.f64_or(&re, 0.0)?, self.f64_or(&im, 0.0)?)))
    }

    fn required_complex(&self, prefix: &str, mode: RunMode) -> Result<C64, CliError> {
        self.complex(prefix)?
            .ok_or_else(|| config_err(&format!("{prefix}_re"), format!("required in {} mode (give {prefix}_re and/or {prefix}_im)", mode.as_str())))
    }
}

fn parse_retain(v: &str) -> Result<RetainPolicy, CliError> {
    if v == "none" {
        return Ok(RetainPolicy { keep: [false; 4] });
    }
    let mut kept = Vec::new();
    for part in v.split(',').map(str::trim) {
        let phi = PairBasisVector::ALL
            .into_iter()
            .find(|p| p.name() == part)
            .ok_or_else(|| config_err("retain", format!("unknown outcome `{part}` (expected a comma list of phi1..phi4, or none)")))?;
        kept.push(phi);
    }
    Ok(RetainPolicy::only(&kept))
}

fn retain_text(r: &RetainPolicy) -> String {
    let names: Vec<_> = r.kept().map(PairBasisVector::name).collect();
    if names.is_empty() {
        "none".into()
    } else {
        names.join(",")
    }
}

impl RunConfig {
    /// Build and validate a configuration. `cli_mode` is the positional mode;
    /// when the entries also carry `mode` the two must agree.
    pub fn from_entries(entries: &BTreeMap<String, String>, cli_mode: Option<RunMode>) -> Result<Self, CliError> {
        for k in entries.keys() {
            if !KEYS.contains(&k.as_str()) {
                return Err(config_err(k, "unknown key"));
            }
        }
        let e = Entries(entries);
        let file_mode = e.parsed::<RunMode>("mode", "teleport|swap|general|verify")?;
        let mode = match (cli_mode, file_mode) {
            (Some(a), Some(b)) if a != b => {
                return Err(config_err("mode", format!("config says `{}` but the command line says `{}`", b.as_str(), a.as_str())))
            }
            (Some(m), _) | (None, Some(m)) => m,
            (None, None) => return Err(config_err("mode", "missing")),
        };

        for (keys, owner) in [(TELEPORT_KEYS, RunMode::Teleport), (GENERAL_KEYS, RunMode::General)] {
            if mode != owner {
                if let Some(k) = keys.iter().find(|k| e.has(k)) {
                    return Err(config_err(k, format!("only used in {} mode, not {}", owner.as_str(), mode.as_str())));
                }
            }
        }

        let eps = e.complex("epsilon")?.unwrap_or_default();
        let paper = Constants::paper();
        let constants = Constants {
            gamma_l: e.f64_or("gamma_l", paper.gamma_l)?,
            delta_m: e.f64_or("delta_m", paper.delta_m)?,
            epsilon: eps,
            ..paper
        };
        if let Err(err) = constants.validate() {
            let key = if !(constants.gamma_l > 0.0 && constants.gamma_l < 1.0) {
                "gamma_l"
            } else if !constants.delta_m.is_finite() {
                "delta_m"
            } else {
                "epsilon_re"
            };
            return Err(config_err(key, err));
        }

        // unset partners of a Lorentz-factor pair follow each other
        let pair = |x: &str, y: &str| -> Result<(f64, f64), CliError> {
            match (e.f64(x)?, e.f64(y)?) {
                (Some(a), Some(b)) => Ok((a, b)),
                (Some(a), None) => Ok((a, a)),
                (None, Some(b)) => Ok((b, b)),
                (None, None) => Ok((1.0, 1.0)),
            }
        };
        let (gamma_a, gamma_b) = pair("gamma_a", "gamma_b")?;
        let (gamma_c, gamma_d) = pair("gamma_c", "gamma_d")?;
        for (k, g) in [("gamma_a", gamma_a), ("gamma_b", gamma_b), ("gamma_c", gamma_c), ("gamma_d", gamma_d)] {
            if g < 1.0 {
                return Err(config_err(k, format!("Lorentz factor must be >= 1, got {g}")));
            }
        }
        let running = mode != RunMode::Verify;
        let t_x = match e.f64("t_x")? {
            Some(t) => t,
            None if running => return Err(config_err("t_x", format!("required in {} mode", mode.as_str()))),
            None => 0.0,
        };
        let t_z = e.f64_or("t_z", 0.0)?;
        if t_z < 0.0 {
            return Err(config_err("t_z", format!("must be >= 0 (the a-b pair is created at 0), got {t_z}")));
        }
        if t_x < t_z {
            return Err(config_err("t_x", format!("collision time {t_x} precedes the source emission t_z = {t_z}")));
        }
        let convention = e.parsed::<TimeConvention>("time_convention", "paper|standard")?.unwrap_or_default();
        let kin = Kinematics { gamma_a, gamma_b, gamma_c, gamma_d, t_z, t_x, convention };
        kin.validate().map_err(|err| config_err("t_x", err))?;

        let start = e.f64_or("t_m_start", t_x)?;
        let stop = e.f64_or("t_m_stop", start + DEFAULT_SPAN)?;
        let steps = e.parsed::<u32>("t_m_steps", "a positive integer")?.unwrap_or(DEFAULT_STEPS);
        if start < t_x {
            return Err(config_err("t_m_start", format!("measurement at {start} precedes the collision t_x = {t_x}")));
        }
        if stop < start {
            return Err(config_err("t_m_stop", format!("must be >= t_m_start = {start}, got {stop}")));
        }
        if steps == 0 {
            return Err(config_err("t_m_steps", "must be at least 1"));
        }

        let n_runs = match e.parsed::<u64>("n_runs", "a positive integer")? {
            Some(0) => return Err(config_err("n_runs", "must be at least 1")),
            Some(n) => n,
            None if running => return Err(config_err("n_runs", format!("required in {} mode", mode.as_str()))),
            None => 0,
        };
        let seed = match e.parsed::<u64>("seed", "an unsigned 64-bit integer")? {
            Some(s) => s,
            None if running => return Err(config_err("seed", format!("required in {} mode", mode.as_str()))),
            None => 0,
        };
        let retain = e.0.get("retain").map(|v| parse_retain(v)).transpose()?.unwrap_or_default();
        let out_dir = PathBuf::from(e.0.get("out_dir").map_or(DEFAULT_OUT_DIR, String::as_str));
        let workers = match e.0.get("workers").map(String::as_str) {
            None | Some("max") => None,
            Some(v) => match v.parse::<usize>() {
                Ok(0) | Err(_) => return Err(config_err("workers", format!("expected a positive integer or `max`, got `{v}`"))),
                Ok(w) => Some(w),
            },
        };

        let protocol = match mode {
            RunMode::Verify => None,
            RunMode::Swap => Some(Mode::Swap),
            RunMode::Teleport => {
                let alpha = e.required_complex("alpha", mode)?;
                let beta = e.required_complex("beta", mode)?;
                let n2 = alpha.norm_sqr() + beta.norm_sqr();
                if (n2 - 1.0).abs() > kaon_core::analytic::NORM_TOL {
                    return Err(config_err("alpha_re", format!("normalization rule |alpha|^2 + |beta|^2 = 1 violated: got {n2}")));
                }
                Some(Mode::Teleport { alpha, beta })
            }
            RunMode::General => {
                let c1 = e.required_complex("c1", mode)?;
                let c2 = e.required_complex("c2", mode)?;
                let w = |name: &str| -> Result<SingleKaon, CliError> {
                    let f = e.complex(&format!("{name}_k0"))?;
                    let g = e.complex(&format!("{name}_k0bar"))?;
                    if f.is_none() && g.is_none() {
                        return Err(config_err(&format!("{name}_k0_re"), format!("required in general mode (give {name}_k0_* and/or {name}_k0bar_*)")));
                    }
                    let k = SingleKaon::new(f.unwrap_or_default(), g.unwrap_or_default());
                    if (k.survival() - 1.0).abs() > kaon_core::analytic::NORM_TOL {
                        return Err(config_err(&format!("{name}_k0_re"), format!("{name} must be normalized, norm^2 = {}", k.survival())));
                    }
                    Ok(k)
                };
                let src = GeneralSource { c1, w1: w("w1")?, c2, w2: w("w2")? };
                if (c1.norm_sqr() + c2.norm_sqr() - 1.0).abs() > kaon_core::analytic::NORM_TOL {
                    return Err(config_err("c1_re", format!("normalization rule |c1|^2 + |c2|^2 = 1 violated: got {}", c1.norm_sqr() + c2.norm_sqr())));
                }
                Some(Mode::General(src))
            }
        };

        Ok(RunConfig {
            mode,
            protocol,
            constants,
            kin,
            grid: TimeGrid { start, stop, steps },
            n_runs,
            seed,
            retain,
            out_dir,
            workers,
        })
    }

    pub fn parse(text: &str, cli_mode: Option<RunMode>) -> Result<Self, CliError> {
        Self::from_entries(&parse_entries(text)?, cli_mode)
    }

    /// Every relevant key with its resolved value. The output parses back to
    /// an identical configuration.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut out: Vec<(&'static str, String)> = vec![("mode", self.mode.as_str().into())];
        let mut cx = |re: &'static str, im: &'static str, z: C64| {
            out.push((re, z.re.to_string()));
            out.push((im, z.im.to_string()));
        };
        match self.protocol {
            Some(Mode::Teleport { alpha, beta }) => {
                cx("alpha_re", "alpha_im", alpha);
                cx("beta_re", "beta_im", beta);
            }
            Some(Mode::General(s)) => {
                cx("c1_re", "c1_im", s.c1);
                cx("c2_re", "c2_im", s.c2);
                cx("w1_k0_re", "w1_k0_im", s.w1.f);
                cx("w1_k0bar_re", "w1_k0bar_im", s.w1.g);
                cx("w2_k0_re", "w2_k0_im", s.w2.f);
                cx("w2_k0bar_re", "w2_k0bar_im", s.w2.g);
            }
            Some(Mode::Swap) | None => {}
        }
        let k = &self.constants;
        let kin = &self.kin;
        let g = &self.grid;
        out.extend([
            ("gamma_l", k.gamma_l.to_string()),
            ("delta_m", k.delta_m.to_string()),
            ("epsilon_re", k.epsilon.re.to_string()),
            ("epsilon_im", k.epsilon.im.to_string()),
            ("gamma_a", kin.gamma_a.to_string()),
            ("gamma_b", kin.gamma_b.to_string()),
            ("gamma_c", kin.gamma_c.to_string()),
            ("gamma_d", kin.gamma_d.to_string()),
            ("t_z", kin.t_z.to_string()),
            ("t_x", kin.t_x.to_string()),
            ("t_m_start", g.start.to_string()),
            ("t_m_stop", g.stop.to_string()),
            ("t_m_steps", g.steps.to_string()),
            ("n_runs", self.n_runs.to_string()),
            ("seed", self.seed.to_string()),
            ("retain", retain_text(&self.retain)),
            ("time_convention", kin.convention.as_str().into()),
            ("out_dir", self.out_dir.display().to_string()),
            ("workers", self.workers.map_or("max".into(), |w| w.to_string())),
        ]);
        out
    }

    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// The protocol setup for run modes.
    pub fn setup(&self) -> Option<kaon_core::ProtocolSetup> {
        self.protocol.map(|mode| kaon_core::ProtocolSetup { mode, kin: self.kin, constants: self.constants })
    }
}
