//! Parameter sweeps over one axis, comparing the closed-form estimators
//! against exact diagonalization at every grid point.
//!
//! Exact values always come from the exact module; per-point failures are
//! recorded as rows with a status and never abort the sweep. Grid points
//! run sequentially in grid order, so identical specs produce
//! byte-identical CSV output.

use crate::records::{xi_of, ErrorRecord, RecordStatus};
use crate::CliError;
use bh2::approx::{self, FormulaId};
use bh2::exact::{build_tridiagonal, eigen_spectrum};
use bh2::model::{PhysicalParams, ReducedParams};
use serde::Deserialize;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum Axis {
    #[serde(rename = "c")]
    C,
    #[serde(rename = "c2")]
    C2,
    #[serde(rename = "N")]
    N,
    #[serde(rename = "U")]
    U,
    #[serde(rename = "delta")]
    Delta,
}

impl Axis {
    pub fn label(&self) -> &'static str {
        match self {
            Axis::C => "c",
            Axis::C2 => "c2",
            Axis::N => "N",
            Axis::U => "U",
            Axis::Delta => "delta",
        }
    }
}

/// Either an explicit step or a point count over [start, stop].
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum RangeSpec {
    Step { start: f64, stop: f64, step: f64 },
    Count { start: f64, stop: f64, count: usize },
}

impl RangeSpec {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        match *self {
            RangeSpec::Step { start, stop, step } => {
                if step <= 0.0 || stop < start {
                    return Err(CliError::Param("range step must be positive and stop >= start".into()));
                }
                let mut out = Vec::new();
                let mut k = 0usize;
                loop {
                    let v = start + step * k as f64;
                    if v > stop + 1e-9 * step {
                        break;
                    }
                    out.push(v);
                    k += 1;
                    if k > 1_000_000 {
                        return Err(CliError::Param("range has more than 1e6 points".into()));
                    }
                }
                if out.is_empty() {
                    return Err(CliError::Param("range is empty".into()));
                }
                Ok(out)
            }
            RangeSpec::Count { start, stop, count } => {
                if count < 1 || stop < start {
                    return Err(CliError::Param("range count must be >= 1 and stop >= start".into()));
                }
                if count == 1 {
                    return Ok(vec![start]);
                }
                let h = (stop - start) / (count - 1) as f64;
                Ok((0..count).map(|k| start + h * k as f64).collect())
            }
        }
    }
}

/// Fixed values for the non-swept parameters. Supply the reduced keys
/// (c, delta, N) or the physical ones (epsilon, J, U, V, N), minus the
/// swept axis; sweeping c/c2/delta over a physical set derives the
/// dependent physical parameter at each point.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedParams {
    pub epsilon: Option<f64>,
    #[serde(rename = "J")]
    pub j: Option<f64>,
    #[serde(rename = "U")]
    pub u: Option<f64>,
    #[serde(rename = "V")]
    pub v: Option<f64>,
    pub c: Option<f64>,
    pub delta: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Axis,
    pub range: RangeSpec,
    pub fixed: FixedParams,
    pub formulas: Vec<String>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Param(format!("sweep spec: {e}")))
    }

    pub fn formula_ids(&self) -> Result<Vec<FormulaId>, CliError> {
        let mut out = Vec::new();
        for name in &self.formulas {
            let id = FormulaId::parse(name)
                .ok_or_else(|| CliError::Param(format!("unknown formula {name}")))?;
            out.push(id);
        }
        if out.is_empty() {
            return Err(CliError::Param("no formulas requested".into()));
        }
        Ok(out)
    }

    fn check_axis_not_fixed(&self) -> Result<(), CliError> {
        let clash = match self.axis {
            Axis::C | Axis::C2 => self.fixed.c.is_some() || self.fixed.u.is_some(),
            Axis::N => self.fixed.n.is_some(),
            Axis::U => self.fixed.u.is_some(),
            Axis::Delta => self.fixed.delta.is_some() || self.fixed.epsilon.is_some(),
        };
        if clash {
            return Err(CliError::Param(format!(
                "swept axis {} is also present in fixed",
                self.axis.label()
            )));
        }
        Ok(())
    }

    /// Resolve the full parameter set at one axis value.
    pub fn resolve_point(
        &self,
        value: f64,
    ) -> Result<(ReducedParams, Option<PhysicalParams>), String> {
        let f = &self.fixed;
        let physical_base = f.j.is_some() || f.v.is_some() || f.epsilon.is_some() || f.u.is_some();
        let n = match self.axis {
            Axis::N => {
                let rounded = value.round();
                if (value - rounded).abs() > 1e-9 || rounded < 1.0 {
                    return Err(format!("axis value {value} is not a valid particle count"));
                }
                rounded as u32
            }
            _ => f.n.ok_or("fixed.N is required")?,
        };
        let build_physical = |epsilon: f64, j: f64, u: f64, v: f64| -> Result<_, String> {
            let p = PhysicalParams::new(epsilon, j, u, v, n).map_err(|e| e.to_string())?;
            let r = p.reduce().map_err(|e| e.to_string())?;
            Ok((r, Some(p)))
        };
        match self.axis {
            Axis::U => {
                let epsilon = f.epsilon.ok_or("fixed.epsilon is required for a U sweep")?;
                let j = f.j.ok_or("fixed.J is required for a U sweep")?;
                let v = f.v.ok_or("fixed.V is required for a U sweep")?;
                build_physical(epsilon, j, value, v)
            }
            Axis::C | Axis::C2 => {
                let c = if self.axis == Axis::C {
                    value
                } else {
                    if value <= 0.0 {
                        return Err(format!("c2 value {value} must be positive"));
                    }
                    value.sqrt()
                };
                if physical_base {
                    // derive U from c^2 = (U - V)/J
                    let epsilon = f.epsilon.ok_or("fixed.epsilon is required")?;
                    let j = f.j.ok_or("fixed.J is required")?;
                    let v = f.v.ok_or("fixed.V is required")?;
                    build_physical(epsilon, j, v + c * c * j, v)
                } else {
                    let delta = f.delta.ok_or("fixed.delta is required")?;
                    let r = ReducedParams::new_signed(c, delta, n).map_err(|e| e.to_string())?;
                    Ok((r, None))
                }
            }
            Axis::Delta => {
                if physical_base {
                    // derive epsilon from delta = 2 eps / J
                    let j = f.j.ok_or("fixed.J is required")?;
                    let u = f.u.ok_or("fixed.U is required")?;
                    let v = f.v.ok_or("fixed.V is required")?;
                    build_physical(value * j / 2.0, j, u, v)
                } else {
                    let c = f.c.ok_or("fixed.c is required")?;
                    let r = ReducedParams::new_signed(c, value, n).map_err(|e| e.to_string())?;
                    Ok((r, None))
                }
            }
            Axis::N => {
                if physical_base {
                    let epsilon = f.epsilon.ok_or("fixed.epsilon is required")?;
                    let j = f.j.ok_or("fixed.J is required")?;
                    let u = f.u.ok_or("fixed.U is required")?;
                    let v = f.v.ok_or("fixed.V is required")?;
                    build_physical(epsilon, j, u, v)
                } else {
                    let c = f.c.ok_or("fixed.c is required")?;
                    let delta = f.delta.ok_or("fixed.delta is required")?;
                    let r = ReducedParams::new_signed(c, delta, n).map_err(|e| e.to_string())?;
                    Ok((r, None))
                }
            }
        }
    }
}

/// Run the sweep: one record per grid point per formula, in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ErrorRecord>, CliError> {
    spec.check_axis_not_fixed()?;
    let formulas = spec.formula_ids()?;
    let values = spec.range.values()?;
    let mut records = Vec::with_capacity(values.len() * formulas.len());
    for &value in &values {
        match spec.resolve_point(value) {
            Ok((reduced, physical)) => {
                point_records(spec, value, reduced, physical, &formulas, &mut records);
            }
            Err(msg) => {
                for &formula in &formulas {
                    records.push(ErrorRecord {
                        axis: spec.axis.label().into(),
                        axis_value: value,
                        c: f64::NAN,
                        delta: f64::NAN,
                        n: 0,
                        physical: None,
                        formula,
                        approx_value: f64::NAN,
                        exact_value: f64::NAN,
                        xi: None,
                        status: RecordStatus::Error(sanitize(&msg)),
                    });
                }
            }
        }
    }
    Ok(records)
}

fn point_records(
    spec: &SweepSpec,
    value: f64,
    reduced: ReducedParams,
    physical: Option<PhysicalParams>,
    formulas: &[FormulaId],
    records: &mut Vec<ErrorRecord>,
) {
    let exact = eigen_spectrum(&build_tridiagonal(&reduced), false);
    for &formula in formulas {
        let mut rec = ErrorRecord {
            axis: spec.axis.label().into(),
            axis_value: value,
            c: reduced.c(),
            delta: reduced.delta(),
            n: reduced.n(),
            physical,
            formula,
            approx_value: f64::NAN,
            exact_value: f64::NAN,
            xi: None,
            status: RecordStatus::Ok,
        };
        let outcome = (|| -> Result<(f64, f64), String> {
            if !formula.is_reduced() && physical.is_none() {
                return Err("physical_params_required".into());
            }
            let est = approx::evaluate(formula, &reduced, physical.as_ref())
                .map_err(|e| sanitize(&e.to_string()))?;
            let spectrum = exact.as_ref().map_err(|e| sanitize(&e.to_string()))?;
            let e_reduced = spectrum.energies[formula.sigma()];
            let exact_value = if formula.is_reduced() {
                e_reduced
            } else {
                physical.unwrap().map_energy_to_physical(e_reduced)
            };
            Ok((est.value, exact_value))
        })();
        match outcome {
            Ok((approx_value, exact_value)) => {
                let (xi, status) = xi_of(approx_value, exact_value);
                rec.approx_value = approx_value;
                rec.exact_value = exact_value;
                rec.xi = xi;
                rec.status = status;
            }
            Err(kind) => rec.status = RecordStatus::Error(kind),
        }
        records.push(rec);
    }
}

/// Status labels go into an unquoted CSV column.
fn sanitize(s: &str) -> String {
    s.chars()
        .map(|ch| if ch.is_alphanumeric() { ch } else { '_' })
        .collect()
}

pub fn write_csv<W: Write>(records: &[ErrorRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{}", ErrorRecord::csv_header())?;
    for rec in records {
        writeln!(w, "{}", rec.to_csv_row())?;
    }
    Ok(())
}
