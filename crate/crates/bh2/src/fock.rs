//! Fock-space expansion of Bethe bra/ket vectors and expectation values.
//!
//! Ket coefficients live on the basis |k>_a ⊗ |N-k>_b (k = occupation of
//! mode a); the bra expansion is indexed the same way but is not the
//! conjugate of the ket. Coefficient sums are evaluated in double-double
//! arithmetic up to N = 15 (they cancel heavily) and in log-magnitude form
//! with sign tracking above that, up to the size guard of 30.

use crate::bethe::{self, BetheState, SolverOptions};
use crate::dd::Dd;
use crate::exact::TridiagonalMatrix;
use crate::model::ReducedParams;
use nalgebra::DMatrix;
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{FromPrimitive, ToPrimitive};
use std::io::Write;
use thiserror::Error;

/// Expansions refuse above this particle count; the coefficient dynamic
/// range grows factorially.
pub const SIZE_GUARD: u32 = 30;

/// Largest N evaluated on the double-double direct path. The log-domain
/// path exists as an overflow fallback: its plain-f64 magnitude sums lose
/// the cancellation digits, so the direct path is preferred whenever the
/// term magnitudes fit the double range.
const DIRECT_LIMIT: u32 = SIZE_GUARD;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("N = {n} exceeds the expansion size guard {guard}")]
    SizeGuard { n: u32, guard: u32 },
    #[error("expansion coefficient overflowed the double range")]
    NumericalOverflow,
    #[error("state norm <Psi|Psi> is numerically zero")]
    ZeroNorm,
    #[error("stirling index M = {0} out of range (M >= 1)")]
    InvalidIndex(u32),
    #[error(transparent)]
    Bethe(#[from] bethe::BetheError),
}

/// Elementary symmetric functions e_m of a root set, e[0] = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricFunctions {
    pub e: Vec<f64>,
}

/// Stable one-root-at-a-time build of the elementary symmetric functions.
/// Imaginary residues of conjugate-closed inputs are truncated.
pub fn elem_sym(roots: &[Complex64]) -> SymmetricFunctions {
    let n = roots.len();
    let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for &r in roots {
        for m in (1..=n).rev() {
            e[m] = e[m] + r * e[m - 1];
        }
    }
    SymmetricFunctions { e: e.into_iter().map(|z| z.re).collect() }
}

/// D(M, k) from the recurrence D(M,k) = k D(M-1,k) + D(M-1,k-1) with
/// D(1,1) = 1 and D(M,k) = 0 for k > M, in exact integer arithmetic.
/// These are the Stirling numbers of the second kind.
pub fn stirling_d(m: u32, k: u32) -> Result<BigUint, FockError> {
    if m < 1 {
        return Err(FockError::InvalidIndex(m));
    }
    if k > m {
        return Ok(BigUint::from(0u32));
    }
    let tri = stirling_triangle(m as usize);
    Ok(tri[m as usize][k as usize].clone())
}

/// Rows 0..=max of the recurrence triangle; row 0 is the convention
/// D(0,0) = 1 used by the expansion sums.
fn stirling_triangle(max: usize) -> Vec<Vec<BigUint>> {
    let mut tri: Vec<Vec<BigUint>> = Vec::with_capacity(max + 1);
    tri.push(vec![BigUint::from(1u32)]);
    for m in 1..=max {
        let mut row = vec![BigUint::from(0u32); m + 1];
        for k in 1..=m {
            let a = if k <= m - 1 { tri[m - 1][k].clone() * k } else { BigUint::from(0u32) };
            let b = tri[m - 1][k - 1].clone();
            row[k] = a + b;
        }
        tri.push(row);
    }
    tri
}

/// Split a big integer into a double-double pair (exact up to ~106 bits).
fn biguint_to_dd(b: &BigUint) -> Dd {
    let hi = b.to_f64().unwrap_or(f64::INFINITY);
    if !hi.is_finite() {
        return Dd { hi, lo: 0.0 };
    }
    let hi_big = BigInt::from_f64(hi).expect("integral double");
    let lo = (BigInt::from(b.clone()) - hi_big).to_f64().unwrap_or(0.0);
    Dd { hi, lo }
}

/// Which side of the pairing a coefficient vector represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Ket,
    Bra,
}

/// Coefficients over |k>_a ⊗ |N-k>_b (or the dual basis for bras).
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub side: Side,
    pub coeffs: Vec<f64>,
    pub params: ReducedParams,
}

impl FockVector {
    /// Write `k,coefficient` CSV rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,coefficient")?;
        for (k, v) in self.coeffs.iter().enumerate() {
            writeln!(w, "{k},{}", crate::fmt_g17(*v))?;
        }
        Ok(())
    }
}

fn guard(n: u32) -> Result<(), FockError> {
    if n > SIZE_GUARD {
        return Err(FockError::SizeGuard { n, guard: SIZE_GUARD });
    }
    Ok(())
}

/// Elementary symmetric functions in double-double arithmetic. Real roots
/// contribute linear factors; conjugate pairs are folded into real
/// quadratic factors so the build stays real.
fn elem_sym_dd(roots: &[Complex64]) -> Vec<Dd> {
    let n = roots.len();
    let mut e = vec![Dd::ZERO; n + 1];
    e[0] = Dd::ONE;
    let mut used = vec![false; n];
    let mut filled = 0usize;
    for i in 0..n {
        if used[i] {
            continue;
        }
        let z = roots[i];
        if z.im.abs() <= 1e-9 * z.norm().max(1e-300) {
            // linear factor
            for m in (1..=filled + 1).rev() {
                e[m] = e[m].add(e[m - 1].mul_f64(z.re));
            }
            filled += 1;
            used[i] = true;
        } else {
            // find the conjugate partner
            let mut best = None;
            let mut best_d = f64::INFINITY;
            for (j, w) in roots.iter().enumerate() {
                if j != i && !used[j] {
                    let d = (w - z.conj()).norm();
                    if d < best_d {
                        best_d = d;
                        best = Some(j);
                    }
                }
            }
            let j = best.expect("conjugate-closed root set");
            let sum = z.re + roots[j].re;
            let prod = (z * roots[j]).re;
            // adding two roots with sum s and product p:
            // e'_k = e_k + s e_{k-1} + p e_{k-2}
            let mut next = vec![Dd::ZERO; n + 1];
            for m in 0..=filled {
                next[m] = next[m].add(e[m]);
                next[m + 1] = next[m + 1].add(e[m].mul_f64(sum));
                next[m + 2] = next[m + 2].add(e[m].mul_f64(prod));
            }
            // shift: coefficient of lambda-products => e ordering; the
            // quadratic above multiplies the generating polynomial
            for m in 0..=n {
                e[m] = next[m];
            }
            filled += 2;
            used[i] = true;
            used[j] = true;
        }
    }
    e
}

/// Ket expansion of a Bethe state over |k>_a ⊗ |N-k>_b.
pub fn ket_expansion(s: &BetheState) -> Result<FockVector, FockError> {
    expansion(s, Side::Ket)
}

/// Bra expansion of a Bethe state over the dual basis, same index
/// convention. Not the conjugate of the ket.
pub fn bra_expansion(s: &BetheState) -> Result<FockVector, FockError> {
    expansion(s, Side::Bra)
}

fn expansion(s: &BetheState, side: Side) -> Result<FockVector, FockError> {
    let n = s.params.n();
    guard(n)?;
    let mut coeffs = if n <= DIRECT_LIMIT {
        expansion_direct(s, side)?
    } else {
        expansion_log(s, side)?
    };
    if coeffs.iter().any(|x| !x.is_finite()) {
        // intermediate overflow: retry in log-magnitude form
        coeffs = expansion_log(s, side)?;
    }
    if coeffs.iter().any(|x| !x.is_finite()) {
        return Err(FockError::NumericalOverflow);
    }
    Ok(FockVector { side, coeffs, params: s.params })
}

/// Double-double evaluation of the coefficient sums.
fn expansion_direct(s: &BetheState, side: Side) -> Result<Vec<f64>, FockError> {
    let n = s.params.n_usize();
    let c = s.params.c();
    let delta = s.params.delta();
    let e = elem_sym_dd(&s.roots);
    let tri = stirling_triangle(n);
    let d_dd: Vec<Vec<Dd>> = tri
        .iter()
        .map(|row| row.iter().map(biguint_to_dd).collect())
        .collect();
    // exact binomials (fit in u128 far beyond the size guard)
    let mut binom = vec![vec![0f64; n + 1]; n + 1];
    for (i, row) in binom.iter_mut().enumerate() {
        let mut b: u128 = 1;
        for (l, slot) in row.iter_mut().enumerate().take(i + 1) {
            *slot = b as f64;
            b = b * (i as u128 - l as u128) / (l as u128 + 1);
        }
    }
    let mut sqrt_fact = Vec::with_capacity(n + 1);
    let mut fact = Dd::ONE;
    sqrt_fact.push(Dd::ONE);
    for k in 1..=n {
        fact = fact.mul_f64(k as f64);
        sqrt_fact.push(fact.sqrt());
    }
    let c_dd = Dd::from_f64(c);
    let delta_dd = Dd::from_f64(delta);

    let mut out = Vec::with_capacity(n + 1);
    match side {
        Side::Ket => {
            for k in 0..=n {
                let mut acc = Dd::ZERO;
                for m in 0..=n {
                    for l in k..=(n - m) {
                        let dpow = n - m - l;
                        if delta == 0.0 && dpow > 0 {
                            continue;
                        }
                        let cpow = -(n as i32) + m as i32 + 2 * l as i32 - 2 * k as i32;
                        let mut term = d_dd[l][k].mul_f64(binom[n - m][l]);
                        term = term.mul(e[m]);
                        if dpow > 0 {
                            term = term.mul(delta_dd.powi(dpow as i32));
                        }
                        term = term.mul(c_dd.powi(cpow));
                        acc = acc.add(term);
                    }
                }
                let pref = sqrt_fact[k].mul(sqrt_fact[n - k]);
                out.push(pref.mul(acc).to_f64());
            }
        }
        Side::Bra => {
            for j in 0..=n {
                let mut acc = Dd::ZERO;
                for m in 0..=j {
                    let cpow = 2 * j as i32 - n as i32 - m as i32;
                    let mut term = d_dd[n - m][n - j].mul(e[m]);
                    term = term.mul(c_dd.powi(cpow));
                    acc = acc.add(term);
                }
                let pref = sqrt_fact[j].mul(sqrt_fact[n - j]);
                out.push(pref.mul(acc).to_f64());
            }
        }
    }
    Ok(out)
}

/// Log-magnitude evaluation with sign tracking; lower precision but
/// overflow-safe for the upper size range.
fn expansion_log(s: &BetheState, side: Side) -> Result<Vec<f64>, FockError> {
    let n = s.params.n_usize();
    let c = s.params.c();
    let delta = s.params.delta();
    let sym = elem_sym(&s.roots);
    let tri = stirling_triangle(n);
    let ln_d: Vec<Vec<f64>> = tri
        .iter()
        .map(|row| {
            row.iter()
                .map(|b| {
                    let v = b.to_f64().unwrap_or(f64::INFINITY);
                    if v == 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        v.ln()
                    }
                })
                .collect()
        })
        .collect();
    let mut ln_fact = vec![0.0f64; n + 1];
    for k in 1..=n {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let ln_binom = |i: usize, l: usize| ln_fact[i] - ln_fact[l] - ln_fact[i - l];
    let ln_c = c.ln();
    let ln_abs_delta = if delta != 0.0 { delta.abs().ln() } else { f64::NEG_INFINITY };

    let mut out = Vec::with_capacity(n + 1);
    let mut terms: Vec<(f64, f64)> = Vec::new();
    for idx in 0..=n {
        terms.clear();
        match side {
            Side::Ket => {
                let k = idx;
                for m in 0..=n {
                    if sym.e[m] == 0.0 {
                        continue;
                    }
                    for l in k..=(n - m) {
                        let dpow = (n - m - l) as f64;
                        if delta == 0.0 && dpow > 0.0 {
                            continue;
                        }
                        if ln_d[l][k] == f64::NEG_INFINITY {
                            continue;
                        }
                        let cpow = -(n as f64) + m as f64 + 2.0 * l as f64 - 2.0 * k as f64;
                        let ln_t = 0.5 * (ln_fact[k] + ln_fact[n - k])
                            + ln_d[l][k]
                            + ln_binom(n - m, l)
                            + if dpow > 0.0 { dpow * ln_abs_delta } else { 0.0 }
                            + cpow * ln_c
                            + sym.e[m].abs().ln();
                        let dsign = if delta < 0.0 && (dpow as i64) % 2 == 1 { -1.0 } else { 1.0 };
                        terms.push((ln_t, sym.e[m].signum() * dsign));
                    }
                }
            }
            Side::Bra => {
                let j = idx;
                for m in 0..=j {
                    if sym.e[m] == 0.0 || ln_d[n - m][n - j] == f64::NEG_INFINITY {
                        continue;
                    }
                    let cpow = 2.0 * j as f64 - n as f64 - m as f64;
                    let ln_t = 0.5 * (ln_fact[j] + ln_fact[n - j])
                        + ln_d[n - m][n - j]
                        + cpow * ln_c
                        + sym.e[m].abs().ln();
                    terms.push((ln_t, sym.e[m].signum()));
                }
            }
        }
        if terms.is_empty() {
            out.push(0.0);
            continue;
        }
        let mstar = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0f64;
        for &(ln_t, sign) in &terms {
            sum += sign * (ln_t - mstar).exp();
        }
        if sum == 0.0 {
            out.push(0.0);
            continue;
        }
        let ln_val = mstar + sum.abs().ln();
        if ln_val > 709.0 {
            return Err(FockError::NumericalOverflow);
        }
        out.push(sum.signum() * ln_val.exp());
    }
    Ok(out)
}

/// Observables over the occupation basis |k>_a ⊗ |N-k>_b.
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    /// Occupation of mode a (diagonal k).
    NumberA,
    /// Occupation of mode b (diagonal N-k).
    NumberB,
    /// Total particle number (diagonal N).
    NumberTotal,
    /// Hop a -> b: the operator a b†, transferring one quantum out of
    /// mode a.
    ABDag,
    /// Hop b -> a: the operator a† b.
    ADagB,
    /// The product n_a n_b (diagonal k (N-k)).
    NaNb,
    /// Caller-supplied (N+1)x(N+1) matrix over the same basis.
    Matrix(DMatrix<f64>),
}

impl Observable {
    /// The reduced Hamiltonian as a dense observable over the
    /// a-occupation basis (row/column k pairs with b-occupation N-k).
    pub fn hamiltonian(m: &TridiagonalMatrix) -> Observable {
        let dim = m.dim();
        let n = dim - 1;
        let mut h = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            h[(k, k)] = m.diag[n - k];
        }
        for k in 0..n {
            let v = m.offdiag[n - k - 1];
            h[(k, k + 1)] = v;
            h[(k + 1, k)] = v;
        }
        Observable::Matrix(h)
    }

    pub fn parse(name: &str) -> Option<Observable> {
        match name {
            "n_a" => Some(Observable::NumberA),
            "n_b" => Some(Observable::NumberB),
            "n_total" => Some(Observable::NumberTotal),
            "ab_dag" => Some(Observable::ABDag),
            "adag_b" => Some(Observable::ADagB),
            "na_nb" => Some(Observable::NaNb),
            _ => None,
        }
    }

    /// Apply to a ket coefficient vector.
    fn apply(&self, ket: &[f64]) -> Vec<f64> {
        let dim = ket.len();
        let n = (dim - 1) as f64;
        match self {
            Observable::NumberA => ket
                .iter()
                .enumerate()
                .map(|(k, v)| k as f64 * v)
                .collect(),
            Observable::NumberB => ket
                .iter()
                .enumerate()
                .map(|(k, v)| (n - k as f64) * v)
                .collect(),
            Observable::NumberTotal => ket.iter().map(|v| n * v).collect(),
            Observable::NaNb => ket
                .iter()
                .enumerate()
                .map(|(k, v)| k as f64 * (n - k as f64) * v)
                .collect(),
            Observable::ABDag => {
                // |k> -> sqrt(k (N-k+1)) |k-1>
                let mut out = vec![0.0; dim];
                for k in 1..dim {
                    out[k - 1] = (k as f64 * (n - k as f64 + 1.0)).sqrt() * ket[k];
                }
                out
            }
            Observable::ADagB => {
                // |k> -> sqrt((k+1)(N-k)) |k+1>
                let mut out = vec![0.0; dim];
                for k in 0..dim - 1 {
                    out[k + 1] = ((k as f64 + 1.0) * (n - k as f64)).sqrt() * ket[k];
                }
                out
            }
            Observable::Matrix(m) => {
                let v = nalgebra::DVector::from_column_slice(ket);
                (m * v).iter().copied().collect()
            }
        }
    }
}

/// Expectation <Psi|A|Psi> / <Psi|Psi> from the bra/ket expansions,
/// scale-normalized before pairing.
pub fn expectation(s: &BetheState, obs: &Observable) -> Result<f64, FockError> {
    let ket = ket_expansion(s)?;
    let bra = bra_expansion(s)?;
    expectation_from_vectors(&bra, &ket, obs)
}

pub fn expectation_from_vectors(
    bra: &FockVector,
    ket: &FockVector,
    obs: &Observable,
) -> Result<f64, FockError> {
    let ks = ket.coeffs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let bs = bra.coeffs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if ks == 0.0 || bs == 0.0 {
        return Err(FockError::ZeroNorm);
    }
    let kn: Vec<f64> = ket.coeffs.iter().map(|x| x / ks).collect();
    let bn: Vec<f64> = bra.coeffs.iter().map(|x| x / bs).collect();
    let den: f64 = bn.iter().zip(&kn).map(|(b, k)| b * k).sum();
    if den.abs() < 1e-300 {
        return Err(FockError::ZeroNorm);
    }
    let ak = obs.apply(&kn);
    let num: f64 = bn.iter().zip(&ak).map(|(b, k)| b * k).sum();
    Ok(num / den)
}

/// Rayleigh quotient v^T A v / v^T v of a plain coefficient vector over
/// the a-occupation basis (used against exact eigenvectors).
pub fn vector_expectation(obs: &Observable, v: &[f64]) -> f64 {
    let den: f64 = v.iter().map(|x| x * x).sum();
    let av = obs.apply(v);
    let num: f64 = v.iter().zip(&av).map(|(b, k)| b * k).sum();
    num / den
}

/// Evaluate an observable with equidistant-seed roots and with solved
/// roots: (approximate-root value, solved-root value).
pub fn expectation_with_approx_roots(
    r: &ReducedParams,
    obs: &Observable,
    opts: &SolverOptions,
) -> Result<(f64, f64), FockError> {
    guard(r.n())?;
    let seed: Vec<Complex64> = bethe::equidistant_init(r)
        .into_iter()
        .map(|x| Complex64::new(x, 0.0))
        .collect();
    let approx_state = BetheState::from_roots(seed, 0, *r)?;
    let approx_value = expectation(&approx_state, obs)?;
    let solved = bethe::solve_ground(r, opts)?;
    let solved_value = expectation(&solved, obs)?;
    Ok((approx_value, solved_value))
}
