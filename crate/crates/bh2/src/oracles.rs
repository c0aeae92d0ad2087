//! Test-support oracles, independent of the implementation paths they
//! check: brute-force closed forms and direct symbolic application of the
//! creation-operator strings on the vacuum. Used by the test suites; not
//! part of the numerical API.

use num_complex::Complex64;

/// Closed-form nested sum for the expansion coefficients:
/// D(M,k) = Σ over n_1..n_{k-1} ≥ 0 with Σ n_i ≤ M-k of
/// k^{n_1} (k-1)^{n_2} ... 2^{n_{k-1}}.
pub fn stirling_closed_form(m: u32, k: u32) -> u128 {
    if k > m {
        return 0;
    }
    if k == 0 {
        return u128::from(m == 0);
    }
    fn rec(level: u32, k: u32, remaining: u32) -> u128 {
        if level == k {
            return 1;
        }
        let base = u128::from(k + 1 - level);
        let mut total = 0u128;
        let mut pow = 1u128;
        for n in 0..=remaining {
            total += pow * rec(level + 1, k, remaining - n);
            pow *= base;
        }
        total
    }
    rec(1, k, m - k)
}

/// Naive one-root-at-a-time elementary symmetric functions (real parts),
/// local to the oracle so it shares nothing with the checked module.
fn elem_sym_naive(roots: &[Complex64]) -> Vec<f64> {
    let n = roots.len();
    let mut e = vec![Complex64::new(0.0, 0.0); n + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for &r in roots {
        for m in (1..=n).rev() {
            e[m] = e[m] + r * e[m - 1];
        }
    }
    e.into_iter().map(|z| z.re).collect()
}

/// Dense two-mode state indexed by (a-occupation, b-occupation).
#[derive(Clone)]
pub struct TwoModeState {
    dim: usize,
    amp: Vec<f64>,
}

impl TwoModeState {
    pub fn vacuum(dim: usize) -> Self {
        let mut amp = vec![0.0; dim * dim];
        amp[0] = 1.0;
        TwoModeState { dim, amp }
    }

    fn zero(dim: usize) -> Self {
        TwoModeState { dim, amp: vec![0.0; dim * dim] }
    }

    pub fn at(&self, ka: usize, kb: usize) -> f64 {
        self.amp[ka * self.dim + kb]
    }

    fn add(&mut self, ka: usize, kb: usize, value: f64) {
        self.amp[ka * self.dim + kb] += value;
    }

    fn scaled(&self, s: f64) -> Self {
        TwoModeState { dim: self.dim, amp: self.amp.iter().map(|x| x * s).collect() }
    }

    fn accumulate(&mut self, other: &Self) {
        for (a, b) in self.amp.iter_mut().zip(&other.amp) {
            *a += b;
        }
    }
}

/// One application of X = (Δ/c) b† + c n_a b† + (1/c) a†.
fn apply_x(state: &TwoModeState, c: f64, delta: f64) -> TwoModeState {
    let mut out = TwoModeState::zero(state.dim);
    for ka in 0..state.dim {
        for kb in 0..state.dim {
            let amp = state.at(ka, kb);
            if amp == 0.0 {
                continue;
            }
            if kb + 1 < state.dim {
                let lift = ((kb + 1) as f64).sqrt();
                out.add(ka, kb + 1, (delta / c + c * ka as f64) * lift * amp);
            }
            if ka + 1 < state.dim {
                out.add(ka + 1, kb, ((ka + 1) as f64).sqrt() / c * amp);
            }
        }
    }
    out
}

/// One application of Y† = (1/c) b† + c a† b† b.
fn apply_y_dag(state: &TwoModeState, c: f64) -> TwoModeState {
    let mut out = TwoModeState::zero(state.dim);
    for ka in 0..state.dim {
        for kb in 0..state.dim {
            let amp = state.at(ka, kb);
            if amp == 0.0 {
                continue;
            }
            if kb + 1 < state.dim {
                out.add(ka, kb + 1, ((kb + 1) as f64).sqrt() / c * amp);
            }
            if ka + 1 < state.dim {
                out.add(ka + 1, kb, c * kb as f64 * ((ka + 1) as f64).sqrt() * amp);
            }
        }
    }
    out
}

fn apply_bdag_power(state: &TwoModeState, m: usize) -> TwoModeState {
    let mut cur = state.clone();
    for _ in 0..m {
        let mut out = TwoModeState::zero(cur.dim);
        for ka in 0..cur.dim {
            for kb in 0..cur.dim - 1 {
                let amp = cur.at(ka, kb);
                if amp != 0.0 {
                    out.add(ka, kb + 1, ((kb + 1) as f64).sqrt() * amp);
                }
            }
        }
        cur = out;
    }
    cur
}

fn apply_adag_power(state: &TwoModeState, m: usize) -> TwoModeState {
    let mut cur = state.clone();
    for _ in 0..m {
        let mut out = TwoModeState::zero(cur.dim);
        for ka in 0..cur.dim - 1 {
            for kb in 0..cur.dim {
                let amp = cur.at(ka, kb);
                if amp != 0.0 {
                    out.add(ka + 1, kb, ((ka + 1) as f64).sqrt() * amp);
                }
            }
        }
        cur = out;
    }
    cur
}

/// Symbolic ket: Σ_m e_m (b†)^m X^{N-m} |0,0>, read at ka + kb = N,
/// indexed by the a-occupation.
pub fn symbolic_ket(roots: &[Complex64], c: f64, delta: f64) -> Vec<f64> {
    let n = roots.len();
    let e = elem_sym_naive(roots);
    let dim = n + 2;
    let mut total = TwoModeState::zero(dim);
    for m in 0..=n {
        let mut state = TwoModeState::vacuum(dim);
        for _ in 0..(n - m) {
            state = apply_x(&state, c, delta);
        }
        state = apply_bdag_power(&state, m);
        total.accumulate(&state.scaled(e[m]));
    }
    (0..=n).map(|k| total.at(k, n - k)).collect()
}

/// Symbolic bra via the adjoint string Σ_m e_m (Y†)^{N-m} (a†)^m |0,0>,
/// indexed by the a-occupation of the dual basis.
pub fn symbolic_bra(roots: &[Complex64], c: f64) -> Vec<f64> {
    let n = roots.len();
    let e = elem_sym_naive(roots);
    let dim = n + 2;
    let mut total = TwoModeState::zero(dim);
    for m in 0..=n {
        let mut state = TwoModeState::vacuum(dim);
        state = apply_adag_power(&state, m);
        for _ in 0..(n - m) {
            state = apply_y_dag(&state, c);
        }
        total.accumulate(&state.scaled(e[m]));
    }
    (0..=n).map(|j| total.at(j, n - j)).collect()
}
