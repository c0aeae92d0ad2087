//! Spectrum-level invariants: the reduce/map round trip, the spectral
//! symmetry identities, and the free-tunneling limit.

use bh2::exact::{build_tridiagonal, eigen_spectrum, free_spectrum};
use bh2::model::{PhysicalParams, SymmetrySign};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn physical_spectrum(p: &PhysicalParams) -> Vec<f64> {
    let r = p.reduce().expect("attractive parameters");
    let s = eigen_spectrum(&build_tridiagonal(&r), false).unwrap();
    let mut out: Vec<f64> = s
        .energies
        .iter()
        .map(|&e| p.map_energy_to_physical(e))
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Spectrum through an arbitrary-sign parameter set, built from the dense
/// physical matrix directly (works for repulsive images too).
fn dense_physical_spectrum(p: &PhysicalParams) -> Vec<f64> {
    let n = p.n as usize;
    let nf = n as f64;
    let dim = n + 1;
    let mut m = nalgebra::DMatrix::<f64>::zeros(dim, dim);
    for k in 0..dim {
        let kf = k as f64;
        m[(k, k)] = p.epsilon * (nf - 2.0 * kf) + (p.u - p.v) * kf * (kf - nf)
            + 0.5 * p.u * nf * (nf - 1.0);
    }
    for k in 0..n {
        let kf = k as f64;
        let v = -p.j * ((kf + 1.0) * (nf - kf)).sqrt();
        m[(k, k + 1)] = v;
        m[(k + 1, k)] = v;
    }
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

#[test]
fn reduced_route_reproduces_dense_physical_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..12 {
        let n = rng.gen_range(1..=50u32);
        let j = -rng.gen_range(0.2..2.0);
        let u = -rng.gen_range(0.05..2.0);
        let epsilon = -rng.gen_range(0.0..1.0);
        let p = PhysicalParams::new(epsilon, j, u, 0.0, n).unwrap();
        let via_reduced = physical_spectrum(&p);
        let dense = dense_physical_spectrum(&p);
        for (a, b) in via_reduced.iter().zip(&dense) {
            assert!(
                (a - b).abs() <= 1e-10 * b.abs().max(1.0),
                "N={n}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn symmetry_identities_on_sorted_spectra() {
    let mut rng = ChaCha8Rng::seed_from_u64(57);
    for _ in 0..20 {
        let n = rng.gen_range(1..=50u32);
        let p = PhysicalParams::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.2..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
            rng.gen_range(-1.5..1.5),
            rng.gen_range(-0.5..0.5),
            n,
        )
        .unwrap();
        let base = dense_physical_spectrum(&p);
        let scale = base.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for (image, sign) in p.symmetry_images() {
            let img = dense_physical_spectrum(&image);
            match sign {
                SymmetrySign::Same => {
                    for (a, b) in base.iter().zip(&img) {
                        assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
                    }
                }
                SymmetrySign::Negated => {
                    for (a, b) in base.iter().zip(img.iter().rev()) {
                        assert!((a + b).abs() <= 1e-10 * scale, "{a} vs -{b}");
                    }
                }
            }
        }
    }
}

#[test]
fn free_limit_matches_closed_form() {
    // U = V = 0 realized through a tiny attractive coupling in the
    // reduced route, compared against the closed form
    for &(epsilon, j, n) in &[(-0.3, -1.0, 12u32), (0.0, -0.7, 30), (-1.0, -2.0, 5)] {
        let p0 = PhysicalParams::new(epsilon, j, 0.0, 0.0, n).unwrap();
        let dense = dense_physical_spectrum(&p0);
        for sigma in 0..=n {
            let f = free_spectrum(&p0, sigma).unwrap();
            assert!(
                (dense[sigma as usize] - f).abs() <= 1e-9 * f.abs().max(1.0),
                "sigma={sigma}: {} vs {f}",
                dense[sigma as usize]
            );
        }
    }
}

#[test]
fn eigen_spectrum_scales_to_large_n() {
    // the QL solver must reach the sweep sizes quickly; N = 2000 here
    let p = PhysicalParams::new(-0.25, -1.0, -0.4, 0.0, 2000).unwrap();
    let r = p.reduce().unwrap();
    let m = build_tridiagonal(&r);
    let start = std::time::Instant::now();
    let s = eigen_spectrum(&m, false).unwrap();
    assert!(start.elapsed().as_secs_f64() < 30.0);
    let sum: f64 = s.energies.iter().sum();
    assert!((sum - m.trace()).abs() <= 1e-9 * m.trace().abs());
}
