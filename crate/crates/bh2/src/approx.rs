//! Closed-form energy estimators for the ground and first-excited states,
//! in both parameterizations, with validity-regime flags.
//!
//! Out-of-regime evaluation returns a value with a false flag rather than
//! erroring; breakdown studies deliberately evaluate the formulas beyond
//! their regimes. `lambda_linear` is the exception: its numerator changes
//! sign at the boundary and the linearization loses meaning.

use crate::model::{PhysicalParams, ReducedParams};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error("denominator {0:e} is degenerate")]
    DegenerateDenominator(f64),
    #[error("c^2 = {c2} is outside the validity region (requires c^2 < delta = {delta})")]
    RegimeViolation { c2: f64, delta: f64 },
}

/// Identifier of a closed-form estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FormulaId {
    /// Ground state, reduced parameters (the printed N+1 numerator).
    GRed,
    /// Ground state, reduced parameters, telescoped variant (N numerator).
    GRedTelescoped,
    /// Ground state, physical parameters.
    GPhys,
    /// First excited, reduced, small-coupling regime c^2 < delta.
    E1RedSmall,
    /// First excited, physical, small-coupling regime.
    E1PhysSmall,
    /// First excited, reduced, large-coupling regime c^2 > delta.
    E1RedLarge,
    /// First excited, physical, large-coupling regime.
    E1PhysLarge,
}

impl FormulaId {
    pub const ALL: [FormulaId; 7] = [
        FormulaId::GRed,
        FormulaId::GRedTelescoped,
        FormulaId::GPhys,
        FormulaId::E1RedSmall,
        FormulaId::E1PhysSmall,
        FormulaId::E1RedLarge,
        FormulaId::E1PhysLarge,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FormulaId::GRed => "G_RED",
            FormulaId::GRedTelescoped => "G_RED_TELESCOPED",
            FormulaId::GPhys => "G_PHYS",
            FormulaId::E1RedSmall => "E1_RED_SMALL",
            FormulaId::E1PhysSmall => "E1_PHYS_SMALL",
            FormulaId::E1RedLarge => "E1_RED_LARGE",
            FormulaId::E1PhysLarge => "E1_PHYS_LARGE",
        }
    }

    pub fn parse(s: &str) -> Option<FormulaId> {
        Self::ALL.iter().copied().find(|f| f.name() == s)
    }

    /// True for formulas that estimate the reduced spectrum; physical
    /// formulas estimate the mapped spectrum.
    pub fn is_reduced(&self) -> bool {
        matches!(
            self,
            FormulaId::GRed
                | FormulaId::GRedTelescoped
                | FormulaId::E1RedSmall
                | FormulaId::E1RedLarge
        )
    }

    /// Which eigenvalue (0 or 1) the formula approximates.
    pub fn sigma(&self) -> usize {
        match self {
            FormulaId::GRed | FormulaId::GRedTelescoped | FormulaId::GPhys => 0,
            _ => 1,
        }
    }
}

impl std::fmt::Display for FormulaId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyEstimate {
    pub value: f64,
    pub formula_id: FormulaId,
    pub in_validity_regime: bool,
}

/// Regime of the first-excited formulas relative to c^2 = delta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    SmallC,
    LargeC,
    Boundary,
}

/// Classify c^2 against delta with a guard band of 1e-9 * max(1, delta).
pub fn regime(r: &ReducedParams) -> Regime {
    let guard = 1e-9 * r.delta().abs().max(1.0);
    let gap = r.c2() - r.delta();
    if gap < -guard {
        Regime::SmallC
    } else if gap > guard {
        Regime::LargeC
    } else {
        Regime::Boundary
    }
}

fn checked_div(num: f64, den: f64) -> Result<f64, ApproxError> {
    if den.abs() < 1e-12 {
        return Err(ApproxError::DegenerateDenominator(den));
    }
    Ok(num / den)
}

/// Ground-state estimate -(N+1)/(c^2 (N-1) + delta).
pub fn ground_energy_reduced(r: &ReducedParams) -> Result<EnergyEstimate, ApproxError> {
    let n = f64::from(r.n());
    let value = checked_div(-(n + 1.0), r.c2() * (n - 1.0) + r.delta())?;
    Ok(EnergyEstimate {
        value,
        formula_id: FormulaId::GRed,
        in_validity_regime: r.c2() > 0.01,
    })
}

/// The telescoped variant -N/(c^2 (N-1) + delta), which is what the
/// equidistant roots produce exactly through the energy product.
pub fn ground_energy_reduced_telescoped(
    r: &ReducedParams,
) -> Result<EnergyEstimate, ApproxError> {
    let n = f64::from(r.n());
    let value = checked_div(-n, r.c2() * (n - 1.0) + r.delta())?;
    Ok(EnergyEstimate {
        value,
        formula_id: FormulaId::GRedTelescoped,
        in_validity_regime: r.c2() > 0.01,
    })
}

/// Ground-state estimate in physical parameters.
pub fn ground_energy_physical(p: &PhysicalParams) -> Result<EnergyEstimate, ApproxError> {
    let n = f64::from(p.n);
    let value = checked_div(p.j * p.j * (n + 1.0), (p.u - p.v) * (n - 1.0) + 2.0 * p.epsilon)?
        + 0.5 * p.u * n * (n - 1.0)
        + p.epsilon * n;
    let c2 = if p.j != 0.0 { (p.u - p.v) / p.j } else { f64::NAN };
    Ok(EnergyEstimate {
        value,
        formula_id: FormulaId::GPhys,
        in_validity_regime: c2 > 0.01,
    })
}

/// First-excited estimate c^2(N-1) - N/(c^2(N-2)+delta) + delta,
/// valid for c^2 < delta.
pub fn first_excited_reduced_small_c(r: &ReducedParams) -> Result<EnergyEstimate, ApproxError> {
    let n = f64::from(r.n());
    let value = r.c2() * (n - 1.0) - checked_div(n, r.c2() * (n - 2.0) + r.delta())? + r.delta();
    Ok(EnergyEstimate {
        value,
        formula_id: FormulaId::E1RedSmall,
        in_validity_regime: r.c2() < r.delta(),
    })
}

/// First-excited small-coupling estimate in physical parameters,
/// valid for U - V < 2ε.
pub fn first_excited_physical_small_c(
    p: &PhysicalParams,
) -> Result<EnergyEstimate, ApproxError> {
    let n = f64::from(p.n);
    let value = p.epsilon * (n - 2.0) - (p.u - p.v) * (n - 1.0)
        + 0.5 * p.u * n * (n - 1.0)
        + checked_div(p.j * p.j * n, (p.u - p.v) * (n - 2.0) + 2.0 * p.epsilon)?;
    Ok(EnergyEstimate {
        value,
        formula_id: FormulaId::E1PhysSmall,
        in_validity_regime: p.u - p.v < 2.0 * p.epsilon,
    })
}

/// First-excited estimate delta*N - (N+1)/(c^2(N-1)+delta), the ground
/// formula shifted by the cluster offset; valid for c^2 > delta.
pub fn first_excited_reduced_large_c(r: &ReducedParams) -> Result<EnergyEstimate, ApproxError> {
    let n = f64::from(r.n());
    let value = r.delta() * n - checked_div(n + 1.0, r.c2() * (n - 1.0) + r.delta())?;
    Ok(EnergyEstimate {
        value,
        formula_id: FormulaId::E1RedLarge,
        in_validity_regime: r.c2() > r.delta(),
    })
}

/// First-excited large-coupling estimate in physical parameters,
/// valid for U - V > 2ε; differs from the ground formula only in the
/// sign of the εN term.
pub fn first_excited_physical_large_c(
    p: &PhysicalParams,
) -> Result<EnergyEstimate, ApproxError> {
    let n = f64::from(p.n);
    let value = checked_div(p.j * p.j * (n + 1.0), (p.u - p.v) * (n - 1.0) + 2.0 * p.epsilon)?
        + 0.5 * p.u * n * (n - 1.0)
        - p.epsilon * n;
    Ok(EnergyEstimate {
        value,
        formula_id: FormulaId::E1PhysLarge,
        in_validity_regime: p.u - p.v > 2.0 * p.epsilon,
    })
}

/// Linearized excitation root (delta - c^2) / ((c^2(N-2)+delta)(c^2(N-1)+delta) c - c).
pub fn lambda_linear(r: &ReducedParams) -> Result<f64, ApproxError> {
    if r.c2() >= r.delta() {
        return Err(ApproxError::RegimeViolation { c2: r.c2(), delta: r.delta() });
    }
    let n = f64::from(r.n());
    let den = (r.c2() * (n - 2.0) + r.delta()) * (r.c2() * (n - 1.0) + r.delta()) * r.c() - r.c();
    checked_div(r.delta() - r.c2(), den)
}

/// Evaluate a formula by id against the matching parameter set.
pub fn evaluate(
    id: FormulaId,
    reduced: &ReducedParams,
    physical: Option<&PhysicalParams>,
) -> Result<EnergyEstimate, ApproxError> {
    match id {
        FormulaId::GRed => ground_energy_reduced(reduced),
        FormulaId::GRedTelescoped => ground_energy_reduced_telescoped(reduced),
        FormulaId::GPhys => ground_energy_physical(physical.expect("physical params required")),
        FormulaId::E1RedSmall => first_excited_reduced_small_c(reduced),
        FormulaId::E1PhysSmall => {
            first_excited_physical_small_c(physical.expect("physical params required"))
        }
        FormulaId::E1RedLarge => first_excited_reduced_large_c(reduced),
        FormulaId::E1PhysLarge => {
            first_excited_physical_large_c(physical.expect("physical params required"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(c: f64, delta: f64, n: u32) -> ReducedParams {
        ReducedParams::new(c, delta, n).unwrap()
    }

    #[test]
    fn ground_reduced_values() {
        let e = ground_energy_reduced(&rp(0.3, 0.5, 15)).unwrap();
        assert!((e.value - (-16.0 / 1.76)).abs() < 1e-12);
        let e = ground_energy_reduced(&rp(1.0, 0.5, 100)).unwrap();
        assert!((e.value - (-101.0 / 99.5)).abs() < 1e-12);
        assert!(e.in_validity_regime);
        assert!(!ground_energy_reduced(&rp(0.05, 0.5, 100)).unwrap().in_validity_regime);
    }

    #[test]
    fn ground_physical_value() {
        let p = PhysicalParams::new(-0.25, -1.0, -0.4, 0.0, 100).unwrap();
        let e = ground_energy_physical(&p).unwrap();
        assert!((e.value - (101.0 / (-40.1) - 1980.0 - 25.0)).abs() < 1e-10);
    }

    #[test]
    fn physical_matches_mapped_reduced() {
        let p = PhysicalParams::new(-0.25, -1.0, -0.4, 0.0, 100).unwrap();
        let r = p.reduce().unwrap();
        let red = ground_energy_reduced(&r).unwrap().value;
        let phys = ground_energy_physical(&p).unwrap().value;
        let mapped = p.map_energy_to_physical(red);
        assert!((phys - mapped).abs() <= 1e-12 * phys.abs());
    }

    #[test]
    fn first_excited_small_c_value() {
        let e = first_excited_reduced_small_c(&rp(0.5, 1.0, 100)).unwrap();
        assert!((e.value - 21.8284313725_f64).abs() < 1e-9);
        assert!(e.in_validity_regime);
        assert!(!first_excited_reduced_small_c(&rp(1.5, 1.0, 100)).unwrap().in_validity_regime);
    }

    #[test]
    fn first_excited_large_c_value_and_shift_relation() {
        let r = rp(1.0, 0.5, 100);
        let e = first_excited_reduced_large_c(&r).unwrap();
        assert!((e.value - 48.9849246231_f64).abs() < 1e-9);
        // exactly the ground value shifted by delta*N
        let g = ground_energy_reduced(&r).unwrap();
        assert_eq!(e.value, 0.5 * 100.0 + g.value);
    }

    #[test]
    fn large_c_physical_regime_flag() {
        let p = PhysicalParams::new(-0.25, -1.0, -1.0, 0.0, 100).unwrap();
        let e = first_excited_physical_large_c(&p).unwrap();
        assert!(!e.in_validity_regime); // -1 > -0.5 is false
        assert!(e.value.is_finite());
        // differs from the ground formula only in the epsilon N sign
        let g = ground_energy_physical(&p).unwrap();
        assert!((e.value - (g.value - 2.0 * p.epsilon * 100.0)).abs() < 1e-9);
    }

    #[test]
    fn small_c_physical_regime_flag() {
        let p = PhysicalParams::new(-0.25, -1.0, -0.4, 0.0, 100).unwrap();
        let e = first_excited_physical_small_c(&p).unwrap();
        assert!(!e.in_validity_regime); // -0.4 < -0.5 is false
    }

    #[test]
    fn lambda_linear_value_and_signs() {
        let lam = lambda_linear(&rp(0.5, 1.0, 100)).unwrap();
        assert!((lam - 0.0022879).abs() < 1e-7);
        assert!(lam > 0.0);
        assert!(matches!(
            lambda_linear(&rp(1.0, 1.0, 100)),
            Err(ApproxError::RegimeViolation { .. })
        ));
        for n in [2u32, 5, 20, 200] {
            let lam = lambda_linear(&rp(0.3, 1.0, n)).unwrap();
            assert!(lam > 0.0, "n = {n}: {lam}");
        }
    }

    #[test]
    fn regime_classification() {
        assert_eq!(regime(&rp(0.5, 1.0, 5)), Regime::SmallC);
        assert_eq!(regime(&rp(1.2, 1.0, 5)), Regime::LargeC);
        assert_eq!(regime(&rp(1.0, 1.0, 5)), Regime::Boundary);
    }

    #[test]
    fn regime_flags_partition() {
        for (c, delta) in [(0.3, 0.5), (1.3, 0.5), (0.9, 1.0), (2.0, 0.7)] {
            let r = rp(c, delta, 30);
            let small = first_excited_reduced_small_c(&r).unwrap();
            let large = first_excited_reduced_large_c(&r).unwrap();
            assert!(small.in_validity_regime ^ large.in_validity_regime);
        }
    }

    #[test]
    fn degenerate_denominator_detected() {
        // c^2 (N-1) + delta == 0 only reachable through signed delta
        let r = ReducedParams::new_signed(0.5, -0.25, 2).unwrap();
        assert!(matches!(
            ground_energy_reduced(&r),
            Err(ApproxError::DegenerateDenominator(_))
        ));
    }
}
