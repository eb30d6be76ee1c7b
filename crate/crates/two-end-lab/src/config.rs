//! Flat key=value run configuration.
//!
//! One `key=value` per line, `#` comments, no sections: runs stay diffable.
//! Unknown keys are rejected with the offending line number.

use crate::error::{Error, Result};
use std::f64::consts::SQRT_2;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Solve,
    Continue,
    Reduced,
    Probe,
    Verify,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Solve => "solve",
            Mode::Continue => "continue",
            Mode::Reduced => "reduced",
            Mode::Probe => "probe",
            Mode::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ansatz {
    Catenoid,
    Toda,
}

impl Ansatz {
    pub fn as_str(&self) -> &'static str {
        match self {
            Ansatz::Catenoid => "catenoid",
            Ansatz::Toda => "toda",
        }
    }
}

/// Validated run configuration with documented defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    // grid
    pub domain_r: f64,
    pub domain_z: f64,
    pub spacing: f64,
    // ansatz
    pub ansatz: Ansatz,
    pub k: f64,
    pub b: f64,
    pub epsilon: f64,
    // solver
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    // continuation
    pub direction: i32,
    pub step_initial: f64,
    pub step_min: f64,
    pub step_max: f64,
    pub k_floor: f64,
    pub max_points: usize,
    pub dump_fields: bool,
    // probe
    pub k_target: f64,
    pub trials: usize,
    pub r_end: f64,
    pub i2_amplitude: f64,
    // reduced
    pub p0: f64,
    pub slope0: f64,
    pub r0: f64,
    // misc
    pub out: String,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::Verify,
            domain_r: 60.0,
            domain_z: 60.0,
            spacing: 0.1,
            ansatz: Ansatz::Catenoid,
            k: 6.0,
            b: 0.0,
            epsilon: 0.1,
            newton_tol: 1e-10,
            newton_max_iter: 40,
            direction: -1,
            step_initial: 0.5,
            step_min: 1e-4,
            step_max: 4.0,
            k_floor: 1.5,
            max_points: 12,
            dump_fields: false,
            k_target: 0.5,
            trials: 50,
            r_end: 1e6,
            i2_amplitude: 0.0,
            p0: 2.0,
            slope0: 0.0,
            r0: 1.0,
            out: "out".into(),
            seed: 0,
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

/// Parse and validate a flat key=value config text.
pub fn validate_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut mode_given = false;
    let mut seen: Vec<String> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected key=value, got `{content}`")))?;
        let key = key.trim();
        let value = value.trim();
        if seen.iter().any(|k| k == key) {
            return Err(parse_err(line, format!("duplicate key `{key}`")));
        }
        seen.push(key.to_string());
        let f = |what: &str| -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| parse_err(line, format!("{what}: expected a number, got `{value}`")))
        };
        let u = |what: &str| -> Result<usize> {
            value
                .parse::<usize>()
                .map_err(|_| parse_err(line, format!("{what}: expected an integer, got `{value}`")))
        };
        match key {
            "mode" => {
                cfg.mode = match value {
                    "solve" => Mode::Solve,
                    "continue" => Mode::Continue,
                    "reduced" => Mode::Reduced,
                    "probe" => Mode::Probe,
                    "verify" => Mode::Verify,
                    _ => {
                        return Err(parse_err(
                            line,
                            format!(
                                "mode must be solve|continue|reduced|probe|verify, got `{value}`"
                            ),
                        ))
                    }
                };
                mode_given = true;
            }
            "domain_r" => cfg.domain_r = f("domain_r")?,
            "domain_z" => cfg.domain_z = f("domain_z")?,
            "spacing" => cfg.spacing = f("spacing")?,
            "ansatz" => {
                cfg.ansatz = match value {
                    "catenoid" => Ansatz::Catenoid,
                    "toda" => Ansatz::Toda,
                    _ => {
                        return Err(parse_err(
                            line,
                            format!("ansatz must be catenoid|toda, got `{value}`"),
                        ))
                    }
                }
            }
            "k" => cfg.k = f("k")?,
            "b" => cfg.b = f("b")?,
            "epsilon" => cfg.epsilon = f("epsilon")?,
            "newton_tol" => cfg.newton_tol = f("newton_tol")?,
            "newton_max_iter" => cfg.newton_max_iter = u("newton_max_iter")?,
            "direction" => {
                cfg.direction = match value {
                    "1" | "+1" => 1,
                    "-1" => -1,
                    _ => {
                        return Err(parse_err(
                            line,
                            format!("direction must be +1 or -1, got `{value}`"),
                        ))
                    }
                }
            }
            "step_initial" => cfg.step_initial = f("step_initial")?,
            "step_min" => cfg.step_min = f("step_min")?,
            "step_max" => cfg.step_max = f("step_max")?,
            "k_floor" => cfg.k_floor = f("k_floor")?,
            "max_points" => cfg.max_points = u("max_points")?,
            "dump_fields" => {
                cfg.dump_fields = match value {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    _ => {
                        return Err(parse_err(
                            line,
                            format!("dump_fields must be true|false, got `{value}`"),
                        ))
                    }
                }
            }
            "k_target" => cfg.k_target = f("k_target")?,
            "trials" => cfg.trials = u("trials")?,
            "r_end" => cfg.r_end = f("r_end")?,
            "i2_amplitude" => cfg.i2_amplitude = f("i2_amplitude")?,
            "p0" => cfg.p0 = f("p0")?,
            "slope0" => cfg.slope0 = f("slope0")?,
            "r0" => cfg.r0 = f("r0")?,
            "out" => cfg.out = value.to_string(),
            "seed" => {
                cfg.seed = value.parse::<u64>().map_err(|_| {
                    parse_err(line, format!("seed: expected an integer, got `{value}`"))
                })?
            }
            _ => return Err(parse_err(line, format!("unknown key `{key}`"))),
        }
    }
    if !mode_given {
        return Err(parse_err(0, "mode required"));
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    let bad = |msg: String| Err(parse_err(0, msg));
    if !(cfg.spacing > 0.0 && cfg.spacing <= 0.25) {
        return bad(format!(
            "spacing must lie in (0, 0.25] to resolve the interface (got {})",
            cfg.spacing
        ));
    }
    if !(cfg.domain_r > 0.0 && cfg.domain_z > 0.0) {
        return bad("domain extents must be positive".into());
    }
    for (name, v) in [
        ("newton_tol", cfg.newton_tol),
        ("step_initial", cfg.step_initial),
        ("step_min", cfg.step_min),
        ("step_max", cfg.step_max),
    ] {
        if !(v > 0.0) {
            return bad(format!("{name} must be positive (got {v})"));
        }
    }
    if matches!(cfg.mode, Mode::Solve | Mode::Continue)
        && cfg.ansatz == Ansatz::Catenoid
        && !(cfg.k > SQRT_2)
    {
        return bad(format!(
            "catenoid growth rate must exceed sqrt(2) ~ 1.41421 (got k = {})",
            cfg.k
        ));
    }
    if cfg.mode == Mode::Probe {
        if !(cfg.k_target > 0.0 && cfg.k_target <= SQRT_2 / 2.0 + 1e-12) {
            return bad(format!(
                "probe target must lie in (0, sqrt(2)/2] (got {})",
                cfg.k_target
            ));
        }
        if cfg.trials == 0 {
            return bad("probe needs trials >= 1".into());
        }
    }
    if cfg.mode == Mode::Reduced && !(cfg.r0 > 0.0 && cfg.r_end > cfg.r0 && cfg.p0 > 0.0) {
        return bad("reduced mode needs r0 > 0, r_end > r0, p0 > 0".into());
    }
    Ok(())
}

impl RunConfig {
    /// Emit the effective configuration; parsing it back yields an identical
    /// RunConfig.
    pub fn emit(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "mode={}", self.mode.as_str());
        let _ = writeln!(s, "domain_r={}", self.domain_r);
        let _ = writeln!(s, "domain_z={}", self.domain_z);
        let _ = writeln!(s, "spacing={}", self.spacing);
        let _ = writeln!(s, "ansatz={}", self.ansatz.as_str());
        let _ = writeln!(s, "k={}", self.k);
        let _ = writeln!(s, "b={}", self.b);
        let _ = writeln!(s, "epsilon={}", self.epsilon);
        let _ = writeln!(s, "newton_tol={}", self.newton_tol);
        let _ = writeln!(s, "newton_max_iter={}", self.newton_max_iter);
        let _ = writeln!(s, "direction={}", self.direction);
        let _ = writeln!(s, "step_initial={}", self.step_initial);
        let _ = writeln!(s, "step_min={}", self.step_min);
        let _ = writeln!(s, "step_max={}", self.step_max);
        let _ = writeln!(s, "k_floor={}", self.k_floor);
        let _ = writeln!(s, "max_points={}", self.max_points);
        let _ = writeln!(s, "dump_fields={}", self.dump_fields);
        let _ = writeln!(s, "k_target={}", self.k_target);
        let _ = writeln!(s, "trials={}", self.trials);
        let _ = writeln!(s, "r_end={}", self.r_end);
        let _ = writeln!(s, "i2_amplitude={}", self.i2_amplitude);
        let _ = writeln!(s, "p0={}", self.p0);
        let _ = writeln!(s, "slope0={}", self.slope0);
        let _ = writeln!(s, "r0={}", self.r0);
        let _ = writeln!(s, "out={}", self.out);
        let _ = writeln!(s, "seed={}", self.seed);
        s
    }
}
