use mono_spectrum::oracle::{DIM_CAP_DEFAULT, DIM_CAP_MAX};
use mono_spectrum::{EVAL_M_CAP, ORBIT_M_DEFAULT, ORBIT_M_MAX};
use serde::Serialize;

pub const ENV_VAR: &str = "MONO_SPECTRUM_CAPS";

/// Size limits for evaluation, explicit orbits and exhaustive enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub eval_m: usize,
    pub orbit_m: usize,
    pub dim: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { eval_m: EVAL_M_CAP, orbit_m: ORBIT_M_DEFAULT, dim: DIM_CAP_DEFAULT }
    }
}

impl Caps {
    /// Applies `eval_m=20,orbit_m=6,dim=30` style overrides.
    pub fn with_env(mut self, text: &str) -> Result<Self, String> {
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("{ENV_VAR}: expected key=value, got {item:?}"))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| format!("{ENV_VAR}: {key} needs an integer, got {value:?}"))?;
            match key.trim() {
                "eval_m" => self.eval_m = value,
                "orbit_m" => self.orbit_m = value,
                "dim" => self.dim = value,
                other => return Err(format!("{ENV_VAR}: unknown cap {other:?} (eval_m, orbit_m, dim)")),
            }
        }
        Ok(self)
    }

    pub fn check(self) -> Result<Self, String> {
        let limits = [("eval_m", self.eval_m, EVAL_M_CAP), ("orbit_m", self.orbit_m, ORBIT_M_MAX), ("dim", self.dim, DIM_CAP_MAX)];
        for (name, v, max) in limits {
            if v > max {
                return Err(format!("cap {name} = {v} is above the hard limit {max}"));
            }
        }
        Ok(self)
    }
}
