use std::fs;

use mono_spectrum::templates::TemplateSpec;
use mono_spectrum::{CodeSpec, Monomial, Poly};

use crate::CliError;

/// Variable labelling used on the command line.
#[derive(Clone, Copy, Debug)]
pub struct Labels {
    pub one_based: bool,
}

impl Labels {
    pub fn poly(self, text: &str, m: usize) -> Result<Poly, CliError> {
        if !self.one_based {
            return Poly::parse(text, m).map_err(|e| hint(e.to_string(), m));
        }
        // Parse with one spare variable, then drop x0.
        let wide = Poly::parse(text, m + 1).map_err(|e| CliError::Usage(e.to_string()))?;
        if wide.terms().any(|t| t.contains_var(0)) {
            return Err(CliError::Usage("x0 is not a variable with --one-based".into()));
        }
        Poly::from_masks(m, wide.terms().map(|t| t.mask() >> 1)).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn monomial(self, text: &str, m: usize) -> Result<Monomial, CliError> {
        let p = self.poly(text, m)?;
        match p.terms().collect::<Vec<_>>()[..] {
            [f] => Ok(f),
            _ => Err(CliError::Usage(format!("{text:?} is not a single monomial"))),
        }
    }
}

fn hint(msg: String, m: usize) -> CliError {
    if msg.contains("does not fit") {
        CliError::Usage(format!("{msg}; variables are x0..x{} (use --one-based for x1..x{m})", m.saturating_sub(1)))
    } else {
        CliError::Usage(msg)
    }
}

/// Inline JSON when the argument starts with `{`, a file path otherwise.
fn json_text(arg: &str) -> Result<String, CliError> {
    if arg.trim_start().starts_with('{') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| CliError::Usage(format!("cannot read {arg:?}: {e}")))
}

pub fn code_spec(arg: &str) -> Result<CodeSpec, CliError> {
    CodeSpec::from_json(&json_text(arg)?).map_err(|e| {
        CliError::Usage(format!("bad code spec ({e}); expected {{\"rm\": [r, m]}} or {{\"m\": m, \"monomials\": [...]}}"))
    })
}

pub fn template_spec(arg: &str) -> Result<TemplateSpec, CliError> {
    TemplateSpec::from_json(&json_text(arg)?).map_err(|e| CliError::Usage(format!("bad template spec: {e}")))
}
