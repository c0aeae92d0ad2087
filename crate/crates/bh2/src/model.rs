//! Model parameters and the physical/reduced mapping.
//!
//! The physical Hamiltonian carries a bias `epsilon`, tunneling `j`,
//! on-site interaction `u` and inter-site interaction `v` for `n` bosons
//! on two modes. The reduced form trades those for a dimensionless
//! interaction `c` (stored as the square root, so `c*c` is the rescaled
//! coupling) and detuning `delta = 2ε/J`. Energies map back through
//! `map_energy_to_physical`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("tunneling J must be nonzero for the reduced mapping")]
    ZeroTunneling,
    #[error("(U-V)/J = {0} is not positive; the attractive mapping requires c^2 > 0")]
    NonAttractive(f64),
    #[error("particle count must be at least 1")]
    InvalidCount,
    #[error("parameter {0} is not finite")]
    NonFinite(&'static str),
    #[error("c must be positive, got {0}")]
    NonPositiveCoupling(f64),
    #[error("delta must be nonnegative in the standard convention, got {0} (use new_signed)")]
    NegativeDelta(f64),
}

/// Parameters of the physical two-mode Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub epsilon: f64,
    pub j: f64,
    pub u: f64,
    pub v: f64,
    pub n: u32,
}

impl PhysicalParams {
    pub fn new(epsilon: f64, j: f64, u: f64, v: f64, n: u32) -> Result<Self, ModelError> {
        for (name, x) in [("epsilon", epsilon), ("J", j), ("U", u), ("V", v)] {
            if !x.is_finite() {
                return Err(ModelError::NonFinite(name));
            }
        }
        if n < 1 {
            return Err(ModelError::InvalidCount);
        }
        Ok(Self { epsilon, j, u, v, n })
    }

    /// True in the attractive regime U - V < 0, the scope of the Bethe and
    /// approximation modules.
    pub fn is_attractive(&self) -> bool {
        self.u - self.v < 0.0
    }

    /// Map to the reduced parameters: c = sqrt((U-V)/J), delta = 2ε/J.
    ///
    /// The paper's convention takes ε and J negative so that delta >= 0;
    /// any signs with (U-V)/J > 0 are accepted and the computed delta sign
    /// is preserved.
    pub fn reduce(&self) -> Result<ReducedParams, ModelError> {
        if self.j == 0.0 {
            return Err(ModelError::ZeroTunneling);
        }
        let c2 = (self.u - self.v) / self.j;
        if c2 <= 0.0 {
            return Err(ModelError::NonAttractive(c2));
        }
        let delta = 2.0 * self.epsilon / self.j;
        ReducedParams::new_signed(c2.sqrt(), delta, self.n)
    }

    /// Map a reduced eigenvalue E back to the physical energy:
    /// `-J*E + (U/2) N (N-1) + ε N`.
    pub fn map_energy_to_physical(&self, e: f64) -> f64 {
        let n = f64::from(self.n);
        -self.j * e + 0.5 * self.u * n * (n - 1.0) + self.epsilon * n
    }

    /// The spectral symmetry images: parameter sets whose sorted spectrum
    /// equals the original (`Same`) or its negation in reversed order
    /// (`Negated`).
    pub fn symmetry_images(&self) -> Vec<(PhysicalParams, SymmetrySign)> {
        vec![
            (
                PhysicalParams { epsilon: -self.epsilon, ..*self },
                SymmetrySign::Same,
            ),
            (PhysicalParams { j: -self.j, ..*self }, SymmetrySign::Same),
            (
                PhysicalParams { u: -self.u, v: -self.v, ..*self },
                SymmetrySign::Negated,
            ),
        ]
    }
}

/// Sign relating the sorted spectrum of a symmetry image to the original.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetrySign {
    Same,
    Negated,
}

/// Parameters of the reduced Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    c: f64,
    delta: f64,
    n: u32,
}

impl ReducedParams {
    /// Standard constructor: c > 0, delta >= 0, n >= 1.
    pub fn new(c: f64, delta: f64, n: u32) -> Result<Self, ModelError> {
        let p = Self::new_signed(c, delta, n)?;
        if delta < 0.0 {
            return Err(ModelError::NegativeDelta(delta));
        }
        Ok(p)
    }

    /// Constructor admitting negative delta, needed for shift-transform
    /// targets (c, -delta).
    pub fn new_signed(c: f64, delta: f64, n: u32) -> Result<Self, ModelError> {
        if !c.is_finite() {
            return Err(ModelError::NonFinite("c"));
        }
        if !delta.is_finite() {
            return Err(ModelError::NonFinite("delta"));
        }
        if c <= 0.0 {
            return Err(ModelError::NonPositiveCoupling(c));
        }
        if n < 1 {
            return Err(ModelError::InvalidCount);
        }
        Ok(Self { c, delta, n })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// The rescaled interaction strength c^2.
    pub fn c2(&self) -> f64 {
        self.c * self.c
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn n_usize(&self) -> usize {
        self.n as usize
    }
}

/// A parameter file holds exactly one of the two key sets:
/// `{"epsilon","J","U","V","N"}` or `{"c","delta","N"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamSet {
    Physical {
        epsilon: f64,
        #[serde(rename = "J")]
        j: f64,
        #[serde(rename = "U")]
        u: f64,
        #[serde(rename = "V")]
        v: f64,
        #[serde(rename = "N")]
        n: u32,
    },
    Reduced {
        c: f64,
        delta: f64,
        #[serde(rename = "N")]
        n: u32,
    },
}

impl ParamSet {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn physical(&self) -> Option<PhysicalParams> {
        match *self {
            ParamSet::Physical { epsilon, j, u, v, n } => {
                PhysicalParams::new(epsilon, j, u, v, n).ok()
            }
            ParamSet::Reduced { .. } => None,
        }
    }

    /// Reduced parameters, mapping physical ones through `reduce`.
    pub fn reduced(&self) -> Result<ReducedParams, ModelError> {
        match *self {
            ParamSet::Physical { epsilon, j, u, v, n } => {
                PhysicalParams::new(epsilon, j, u, v, n)?.reduce()
            }
            ParamSet::Reduced { c, delta, n } => ReducedParams::new_signed(c, delta, n),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_fig5_parameters() {
        let p = PhysicalParams::new(-0.25, -1.0, -0.4, 0.0, 500).unwrap();
        let r = p.reduce().unwrap();
        assert!((r.c() - 0.4_f64.sqrt()).abs() < 1e-15);
        assert!((r.delta() - 0.5).abs() < 1e-15);
        assert_eq!(r.n(), 500);
    }

    #[test]
    fn reduce_unit_coupling() {
        let r = PhysicalParams::new(-0.5, -1.0, -1.0, 0.0, 15)
            .unwrap()
            .reduce()
            .unwrap();
        assert_eq!(r.c(), 1.0);
        assert_eq!(r.delta(), 1.0);
    }

    #[test]
    fn reduce_zero_bias() {
        let r = PhysicalParams::new(0.0, -1.0, -0.09, 0.0, 15)
            .unwrap()
            .reduce()
            .unwrap();
        assert!((r.c() - 0.3).abs() < 1e-15);
        assert_eq!(r.delta(), 0.0);
    }

    #[test]
    fn reduce_rejects_bad_parameters() {
        let p = PhysicalParams::new(0.0, 0.0, -1.0, 0.0, 3).unwrap();
        assert_eq!(p.reduce().unwrap_err(), ModelError::ZeroTunneling);
        let p = PhysicalParams::new(0.0, -1.0, 1.0, 0.0, 3).unwrap();
        assert!(matches!(p.reduce().unwrap_err(), ModelError::NonAttractive(_)));
    }

    #[test]
    fn map_energy_examples() {
        let p = PhysicalParams::new(0.0, -1.0, 0.0, 0.0, 5).unwrap();
        assert_eq!(p.map_energy_to_physical(0.0), 0.0);

        let p = PhysicalParams::new(0.0, -1.0, -0.09, 0.0, 15).unwrap();
        let e = -9.0909090909_f64;
        let expect = e + (-0.045) * 210.0;
        assert!((p.map_energy_to_physical(e) - expect).abs() < 1e-12);

        // with J = -1 and zero offsets the map is the identity
        let p = PhysicalParams::new(0.0, -1.0, 0.0, 0.0, 7).unwrap();
        assert_eq!(p.map_energy_to_physical(2.5), 2.5);
    }

    #[test]
    fn symmetry_image_list() {
        let p = PhysicalParams::new(1.0, 2.0, 3.0, 4.0, 9).unwrap();
        let images = p.symmetry_images();
        assert_eq!(images.len(), 3);
        assert_eq!(images[0].0.epsilon, -1.0);
        assert_eq!(images[0].1, SymmetrySign::Same);
        assert_eq!(images[1].0.j, -2.0);
        assert_eq!(images[2].0.u, -3.0);
        assert_eq!(images[2].0.v, -4.0);
        assert_eq!(images[2].1, SymmetrySign::Negated);
    }

    #[test]
    fn reduced_params_validation() {
        assert!(ReducedParams::new(0.5, 0.0, 1).is_ok());
        assert!(ReducedParams::new(0.0, 0.0, 1).is_err());
        assert!(ReducedParams::new(0.5, -0.1, 1).is_err());
        assert!(ReducedParams::new_signed(0.5, -0.1, 1).is_ok());
        assert!(ReducedParams::new(0.5, 0.0, 0).is_err());
    }

    #[test]
    fn param_file_key_sets() {
        let phys: ParamSet =
            ParamSet::from_json(r#"{"epsilon":-0.25,"J":-1.0,"U":-0.4,"V":0.0,"N":100}"#).unwrap();
        assert!(phys.physical().is_some());
        let red: ParamSet = ParamSet::from_json(r#"{"c":0.3,"delta":0.5,"N":15}"#).unwrap();
        assert!(red.physical().is_none());
        assert_eq!(red.reduced().unwrap().n(), 15);
        // mixed or incomplete key sets are rejected
        assert!(ParamSet::from_json(r#"{"c":0.3,"J":-1.0,"N":15}"#).is_err());
        assert!(ParamSet::from_json(r#"{"epsilon":-0.25,"J":-1.0,"N":100}"#).is_err());
    }
}
