//! Independent oracles for the Fock machinery: the closed-form nested-sum
//! coefficients, brute-force symmetric functions, and direct symbolic
//! application of the creation-operator strings on the vacuum.

use bh2::bethe::BetheState;
use bh2::fock::{bra_expansion, elem_sym, ket_expansion, stirling_d};
use bh2::model::ReducedParams;
use bh2::oracles::{stirling_closed_form, symbolic_bra, symbolic_ket};
use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn recurrence_matches_closed_form_up_to_8() {
    for m in 1..=8u32 {
        for k in 0..=m {
            let rec = stirling_d(m, k).unwrap();
            let closed = BigUint::from(stirling_closed_form(m, k));
            assert_eq!(rec, closed, "D({m},{k})");
        }
    }
}

#[test]
fn elem_sym_matches_subset_sums() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [3usize, 7, 12] {
        let roots: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-4.0..3.0), 0.0))
            .collect();
        let fast = elem_sym(&roots);
        // brute force over all subsets
        let mut brute = vec![0.0f64; n + 1];
        brute[0] = 1.0;
        for mask in 1u32..(1 << n) {
            let mut prod = Complex64::new(1.0, 0.0);
            let mut size = 0usize;
            for (i, root) in roots.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    prod *= root;
                    size += 1;
                }
            }
            brute[size] += prod.re;
        }
        for m in 0..=n {
            let scale = brute[m].abs().max(1.0);
            assert!(
                (fast.e[m] - brute[m]).abs() <= 1e-10 * scale,
                "n={n} m={m}: {} vs {}",
                fast.e[m],
                brute[m]
            );
        }
    }
}

#[test]
fn expansions_match_symbolic_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..10 {
        let n = rng.gen_range(1..=6u32);
        let c = rng.gen_range(0.3..2.0);
        let delta = if case % 3 == 0 { 0.0 } else { rng.gen_range(0.0..1.5) };
        let r = ReducedParams::new(c, delta, n).unwrap();
        // arbitrary distinct real roots (the expansion is root-agnostic)
        let mut roots: Vec<Complex64> = Vec::new();
        while roots.len() < n as usize {
            let x = rng.gen_range(-5.0..3.0);
            if roots.iter().all(|z: &Complex64| (z.re - x).abs() > 0.3) && x.abs() > 0.05 {
                roots.push(Complex64::new(x, 0.0));
            }
        }
        let state = BetheState::from_roots(roots.clone(), 0, r).unwrap();
        let ket = ket_expansion(&state).unwrap();
        let oracle_ket = symbolic_ket(&roots, c, delta);
        for (k, (a, b)) in ket.coeffs.iter().zip(&oracle_ket).enumerate() {
            assert!(
                (a - b).abs() <= 1e-12 * b.abs().max(1e-12),
                "case {case} ket component {k}: {a} vs {b}"
            );
        }
        let bra = bra_expansion(&state).unwrap();
        let oracle_bra = symbolic_bra(&roots, c);
        for (j, (a, b)) in bra.coeffs.iter().zip(&oracle_bra).enumerate() {
            assert!(
                (a - b).abs() <= 1e-12 * b.abs().max(1e-12),
                "case {case} bra component {j}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn expansions_match_symbolic_oracle_with_conjugate_pair() {
    // a conjugate-closed complex set exercises the paired symmetric
    // functions
    let roots = vec![
        Complex64::new(-1.2, 0.7),
        Complex64::new(-1.2, -0.7),
        Complex64::new(-3.0, 0.0),
        Complex64::new(0.8, 0.0),
    ];
    let r = ReducedParams::new(0.9, 0.4, 4).unwrap();
    let state = BetheState::from_roots(roots.clone(), 2, r).unwrap();
    let ket = ket_expansion(&state).unwrap();
    let oracle = symbolic_ket(&roots, 0.9, 0.4);
    for (a, b) in ket.coeffs.iter().zip(&oracle) {
        assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-12), "{a} vs {b}");
    }
}
