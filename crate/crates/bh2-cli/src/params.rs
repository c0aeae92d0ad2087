//! Parameter resolution shared by the subcommands: either the reduced
//! flag set (--c --delta --n), the physical one (--epsilon --j --u --v
//! --n), or a JSON file with exactly one of the two key sets.

use crate::CliError;
use bh2::model::{ParamSet, PhysicalParams, ReducedParams};
use std::path::Path;

/// Fully resolved parameters; `physical` is present only when the caller
/// supplied the physical set.
#[derive(Debug, Clone, Copy)]
pub struct Resolved {
    pub reduced: ReducedParams,
    pub physical: Option<PhysicalParams>,
}

pub struct RawParams {
    pub c: Option<f64>,
    pub delta: Option<f64>,
    pub n: Option<u32>,
    pub epsilon: Option<f64>,
    pub j: Option<f64>,
    pub u: Option<f64>,
    pub v: Option<f64>,
}

impl RawParams {
    pub fn resolve(&self, file: Option<&Path>) -> Result<Resolved, CliError> {
        let any_flag = self.c.is_some()
            || self.delta.is_some()
            || self.epsilon.is_some()
            || self.j.is_some()
            || self.u.is_some()
            || self.v.is_some();
        if let Some(path) = file {
            if any_flag || self.n.is_some() {
                return Err(CliError::Param(
                    "--params cannot be combined with parameter flags".into(),
                ));
            }
            let text = std::fs::read_to_string(path)?;
            let set = ParamSet::from_json(&text)
                .map_err(|e| CliError::Param(format!("{}: {e}", path.display())))?;
            return Ok(Resolved { reduced: set.reduced()?, physical: set.physical() });
        }
        let n = self
            .n
            .ok_or_else(|| CliError::Param("missing --n".into()))?;
        let reduced_given = self.c.is_some() || self.delta.is_some();
        let physical_given = self.epsilon.is_some()
            || self.j.is_some()
            || self.u.is_some()
            || self.v.is_some();
        match (reduced_given, physical_given) {
            (true, true) => Err(CliError::Param(
                "reduced (--c --delta) and physical (--epsilon --j --u --v) flags are mutually exclusive".into(),
            )),
            (true, false) => {
                let c = self.c.ok_or_else(|| CliError::Param("missing --c".into()))?;
                let delta = self
                    .delta
                    .ok_or_else(|| CliError::Param("missing --delta".into()))?;
                Ok(Resolved {
                    reduced: ReducedParams::new_signed(c, delta, n)?,
                    physical: None,
                })
            }
            (false, true) => {
                let epsilon = self
                    .epsilon
                    .ok_or_else(|| CliError::Param("missing --epsilon".into()))?;
                let j = self.j.ok_or_else(|| CliError::Param("missing --j".into()))?;
                let u = self.u.ok_or_else(|| CliError::Param("missing --u".into()))?;
                let v = self.v.ok_or_else(|| CliError::Param("missing --v".into()))?;
                let physical = PhysicalParams::new(epsilon, j, u, v, n)?;
                Ok(Resolved { reduced: physical.reduce()?, physical: Some(physical) })
            }
            (false, false) => Err(CliError::Param(
                "supply --c --delta --n, or --epsilon --j --u --v --n, or --params FILE".into(),
            )),
        }
    }
}
