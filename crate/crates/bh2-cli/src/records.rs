//! Error records: one row per (grid point, formula) with the relative
//! error xi = (approx - exact)/exact.

use bh2::approx::FormulaId;
use bh2::fmt_g17;
use bh2::model::PhysicalParams;

/// Threshold below which the exact value makes xi meaningless.
pub const XI_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum RecordStatus {
    Ok,
    /// |exact| under the floor; xi left empty.
    XiUndefined,
    /// Per-point failure; the sweep keeps going.
    Error(String),
}

impl RecordStatus {
    pub fn label(&self) -> String {
        match self {
            RecordStatus::Ok => "ok".into(),
            RecordStatus::XiUndefined => "xi_undefined".into(),
            RecordStatus::Error(kind) => format!("error:{kind}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ErrorRecord {
    pub axis: String,
    pub axis_value: f64,
    pub c: f64,
    pub delta: f64,
    pub n: u32,
    pub physical: Option<PhysicalParams>,
    pub formula: FormulaId,
    pub approx_value: f64,
    pub exact_value: f64,
    pub xi: Option<f64>,
    pub status: RecordStatus,
}

impl ErrorRecord {
    pub fn csv_header() -> &'static str {
        "axis,axis_value,c,delta,N,epsilon,J,U,V,formula,approx,exact,xi,status"
    }

    pub fn to_csv_row(&self) -> String {
        let phys = match &self.physical {
            Some(p) => format!(
                "{},{},{},{}",
                fmt_g17(p.epsilon),
                fmt_g17(p.j),
                fmt_g17(p.u),
                fmt_g17(p.v)
            ),
            None => ",,,".into(),
        };
        let xi = self.xi.map(fmt_g17).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.axis,
            fmt_g17(self.axis_value),
            fmt_g17(self.c),
            fmt_g17(self.delta),
            self.n,
            phys,
            self.formula.name(),
            fmt_g17(self.approx_value),
            fmt_g17(self.exact_value),
            xi,
            self.status.label()
        )
    }
}

/// Compute xi, or flag it undefined when the exact value sits at zero.
pub fn xi_of(approx: f64, exact: f64) -> (Option<f64>, RecordStatus) {
    if exact.abs() < XI_FLOOR {
        (None, RecordStatus::XiUndefined)
    } else {
        (Some((approx - exact) / exact), RecordStatus::Ok)
    }
}
