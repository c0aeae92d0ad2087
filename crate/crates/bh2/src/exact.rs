//! Exact diagonalization of the reduced Hamiltonian.
//!
//! The reduced Hamiltonian is real symmetric tridiagonal in the number
//! basis, so the solver is an implicit-shift QL iteration working directly
//! on the two diagonals. Eigenvalues only is O(N^2); accumulating
//! eigenvectors is O(N^3) and opt-in.

use crate::model::{PhysicalParams, ReducedParams};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("QL iteration failed to converge for eigenvalue index {0}")]
    ConvergenceFailure(usize),
    #[error("state index {index} outside 0..={max}")]
    IndexOutOfRange { index: u32, max: u32 },
}

/// The (N+1)x(N+1) symmetric tridiagonal matrix of the reduced Hamiltonian
/// in the mode-b occupation basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    /// diag[n] = delta*n + c^2*n*(N-n), n = 0..=N
    pub diag: Vec<f64>,
    /// offdiag[n] = sqrt((n+1)(N-n)) couples n and n+1, n = 0..N
    pub offdiag: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Sum of the diagonal; equals the eigenvalue sum.
    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// Frobenius norm, used to scale residual tolerances.
    pub fn frobenius_norm(&self) -> f64 {
        let d: f64 = self.diag.iter().map(|x| x * x).sum();
        let e: f64 = self.offdiag.iter().map(|x| 2.0 * x * x).sum();
        (d + e).sqrt()
    }
}

/// Build the tridiagonal matrix for the reduced parameters.
pub fn build_tridiagonal(r: &ReducedParams) -> TridiagonalMatrix {
    let n = r.n_usize();
    let (c2, delta) = (r.c2(), r.delta());
    let nf = n as f64;
    let diag = (0..=n)
        .map(|k| {
            let kf = k as f64;
            delta * kf + c2 * kf * (nf - kf)
        })
        .collect();
    let offdiag = (0..n)
        .map(|k| ((k as f64 + 1.0) * (nf - k as f64)).sqrt())
        .collect();
    TridiagonalMatrix { diag, offdiag }
}

/// Eigenvalues (ascending) and, optionally, orthonormal eigenvectors.
///
/// `amplitudes[sigma]` is the sigma-th eigenvector over the occupation
/// basis of the tridiagonal matrix, unit norm, sign fixed so the
/// largest-magnitude component is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub energies: Vec<f64>,
    pub amplitudes: Option<Vec<Vec<f64>>>,
}

impl Spectrum {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// Write `sigma,energy` CSV rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "sigma,energy")?;
        for (sigma, e) in self.energies.iter().enumerate() {
            writeln!(w, "{sigma},{}", crate::fmt_g17(*e))?;
        }
        Ok(())
    }
}

/// Diagonalize by implicit-shift QL; `want_vectors` accumulates the
/// rotations into eigenvectors.
pub fn eigen_spectrum(
    m: &TridiagonalMatrix,
    want_vectors: bool,
) -> Result<Spectrum, ExactError> {
    let n = m.dim();
    let mut d = m.diag.clone();
    // workspace with a trailing zero entry
    let mut e = vec![0.0f64; n];
    e[..n - 1].copy_from_slice(&m.offdiag);
    let mut z = if want_vectors {
        let mut id = vec![0.0f64; n * n];
        for k in 0..n {
            id[k * n + k] = 1.0;
        }
        Some(id)
    } else {
        None
    };

    ql_implicit(&mut d, &mut e, z.as_deref_mut(), n).map_err(ExactError::ConvergenceFailure)?;

    // ascending order, reproducible vector signs
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let energies: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let amplitudes = z.map(|z| {
        order
            .iter()
            .map(|&col| {
                let mut v: Vec<f64> = (0..n).map(|row| z[row * n + col]).collect();
                let mut imax = 0;
                for (i, x) in v.iter().enumerate() {
                    if x.abs() > v[imax].abs() {
                        imax = i;
                    }
                }
                if v[imax] < 0.0 {
                    for x in &mut v {
                        *x = -*x;
                    }
                }
                v
            })
            .collect()
    });
    Ok(Spectrum { energies, amplitudes })
}

/// Classic implicit-shift QL sweep on (d, e); z, when present, is a dense
/// row-major matrix whose columns accumulate the rotations.
fn ql_implicit(
    d: &mut [f64],
    e: &mut [f64],
    mut z: Option<&mut [f64]>,
    n: usize,
) -> Result<(), usize> {
    const MAX_ITER: usize = 50;
    let eps = f64::EPSILON;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_ITER {
                return Err(l);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut underflow_restart = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow_restart = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
            }
            if underflow_restart {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Spectrum of the noninteracting model (U = V = 0):
/// sqrt(ε^2 + J^2) * (2σ - N).
pub fn free_spectrum(p: &PhysicalParams, sigma: u32) -> Result<f64, ExactError> {
    if sigma > p.n {
        return Err(ExactError::IndexOutOfRange { index: sigma, max: p.n });
    }
    let amp = p.epsilon.hypot(p.j);
    Ok(amp * (2.0 * f64::from(sigma) - f64::from(p.n)))
}

/// Eigenvalue (N-n)(delta + c^2 n) of the zero-tunneling Hamiltonian.
pub fn zero_tunneling_spectrum(r: &ReducedParams, n: u32) -> Result<f64, ExactError> {
    if n > r.n() {
        return Err(ExactError::IndexOutOfRange { index: n, max: r.n() });
    }
    let nf = f64::from(n);
    Ok((f64::from(r.n()) - nf) * (r.delta() + r.c2() * nf))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rp(c: f64, delta: f64, n: u32) -> ReducedParams {
        ReducedParams::new(c, delta, n).unwrap()
    }

    #[test]
    fn tridiagonal_entries() {
        let m = build_tridiagonal(&rp(1.0, 0.5, 2));
        assert_eq!(m.diag, vec![0.0, 1.5, 1.0]);
        assert!((m.offdiag[0] - 2.0_f64.sqrt()).abs() < 1e-15);
        assert!((m.offdiag[1] - 2.0_f64.sqrt()).abs() < 1e-15);

        let m = build_tridiagonal(&rp(3.0, 0.25, 1));
        assert_eq!(m.diag, vec![0.0, 0.25]);
        assert_eq!(m.offdiag, vec![1.0]);

        let m = build_tridiagonal(&rp(0.3, 0.5, 15));
        assert!((m.diag[1] - 1.76).abs() < 1e-15);
    }

    #[test]
    fn two_by_two_analytic() {
        let s = eigen_spectrum(&build_tridiagonal(&rp(1.0, 0.0, 1)), false).unwrap();
        assert!((s.energies[0] + 1.0).abs() < 1e-14);
        assert!((s.energies[1] - 1.0).abs() < 1e-14);

        let s = eigen_spectrum(&build_tridiagonal(&rp(1.0, 0.5, 1)), false).unwrap();
        let root = 1.0625_f64.sqrt();
        assert!((s.energies[0] - (0.25 - root)).abs() < 1e-14);
        assert!((s.energies[1] - (0.25 + root)).abs() < 1e-14);
    }

    #[test]
    fn three_by_three_against_frozen_characteristic_roots() {
        // roots of the characteristic cubic of diag [0, 1.5, 1], off [sqrt2, sqrt2],
        // computed independently at 40 digits
        let expect = [
            -1.1565972630107495774,
            0.55807601336570583423,
            3.0985212496450437431,
        ];
        let s = eigen_spectrum(&build_tridiagonal(&rp(1.0, 0.5, 2)), false).unwrap();
        for (a, b) in s.energies.iter().zip(expect) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn trace_identity_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let c = rng.gen_range(0.05..2.5);
            let delta = rng.gen_range(0.0..2.0);
            let n = rng.gen_range(1..120);
            let m = build_tridiagonal(&rp(c, delta, n));
            let s = eigen_spectrum(&m, false).unwrap();
            let sum: f64 = s.energies.iter().sum();
            let tr = m.trace();
            assert!((sum - tr).abs() <= 1e-9 * tr.abs().max(1.0));
        }
    }

    #[test]
    fn eigenvector_rows_satisfy_matrix_equation() {
        let m = build_tridiagonal(&rp(0.7, 0.3, 12));
        let s = eigen_spectrum(&m, true).unwrap();
        let amps = s.amplitudes.as_ref().unwrap();
        let scale = m.frobenius_norm();
        let dim = m.dim();
        for (sigma, v) in amps.iter().enumerate() {
            let energy = s.energies[sigma];
            for k in 0..dim {
                let mut hv = m.diag[k] * v[k];
                if k > 0 {
                    hv += m.offdiag[k - 1] * v[k - 1];
                }
                if k + 1 < dim {
                    hv += m.offdiag[k] * v[k + 1];
                }
                assert!((hv - energy * v[k]).abs() <= 1e-9 * scale);
            }
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn vector_sign_convention_is_deterministic() {
        let m = build_tridiagonal(&rp(0.9, 0.2, 9));
        let a = eigen_spectrum(&m, true).unwrap();
        let b = eigen_spectrum(&m, true).unwrap();
        assert_eq!(a.amplitudes, b.amplitudes);
        for v in a.amplitudes.unwrap() {
            let mut imax = 0;
            for (i, x) in v.iter().enumerate() {
                if x.abs() > v[imax].abs() {
                    imax = i;
                }
            }
            assert!(v[imax] > 0.0);
        }
    }

    #[test]
    fn free_spectrum_values() {
        let p = PhysicalParams::new(0.0, -1.0, 0.0, 0.0, 4).unwrap();
        assert_eq!(free_spectrum(&p, 2).unwrap(), 0.0);
        let p = PhysicalParams::new(3.0, 4.0, 0.0, 0.0, 1).unwrap();
        assert_eq!(free_spectrum(&p, 1).unwrap(), 5.0);
        let p = PhysicalParams::new(0.25, 1.0, 0.0, 0.0, 100).unwrap();
        assert!((free_spectrum(&p, 0).unwrap() + 100.0 * 1.0625_f64.sqrt()).abs() < 1e-12);
        assert!(free_spectrum(&p, 101).is_err());
    }

    #[test]
    fn zero_tunneling_values() {
        let r = rp(2.0, 1.0, 3);
        assert_eq!(zero_tunneling_spectrum(&r, 3).unwrap(), 0.0);
        assert_eq!(zero_tunneling_spectrum(&r, 0).unwrap(), 3.0);
        assert_eq!(zero_tunneling_spectrum(&r, 1).unwrap(), 10.0);
        assert!(zero_tunneling_spectrum(&r, 4).is_err());
    }

    #[test]
    fn csv_export_shape() {
        let s = eigen_spectrum(&build_tridiagonal(&rp(1.0, 0.5, 2)), false).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "sigma,energy");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,"));
    }
}
