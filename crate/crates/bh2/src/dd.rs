//! Minimal double-double arithmetic for the Fock expansion sums.
//!
//! The expansion coefficients are alternating sums whose cancellation can
//! eat ten or more digits in plain f64; carrying ~106 bits through the
//! term products and the accumulation keeps the survivors accurate.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = quick_two_sum(s, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(Dd { hi: -other.hi, lo: -other.lo })
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, other: f64) -> Dd {
        self.mul(Dd::from_f64(other))
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r2 = r.sub(other.mul_f64(q2));
        let q3 = r2.hi / other.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }

    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 {
            return Dd::ZERO;
        }
        let s = self.hi.sqrt();
        // one Newton step in double-double
        let s_dd = Dd::from_f64(s);
        let r = self.sub(s_dd.mul(s_dd));
        s_dd.add(Dd { hi: r.hi / (2.0 * s), lo: r.lo / (2.0 * s) })
    }

    /// Integer power by repeated multiplication (exponents stay tiny here).
    pub fn powi(self, n: i32) -> Dd {
        if n == 0 {
            return Dd::ONE;
        }
        let mut base = if n < 0 { Dd::ONE.div(self) } else { self };
        let mut k = n.unsigned_abs();
        let mut acc = Dd::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            k >>= 1;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representation_beats_f64() {
        // (1 + 2^-60) - 1 survives in double-double
        let one = Dd::ONE;
        let tiny = Dd::from_f64(2.0f64.powi(-60));
        let x = one.add(tiny).sub(one);
        assert_eq!(x.to_f64(), 2.0f64.powi(-60));
    }

    #[test]
    fn factorial_30_accuracy() {
        let mut f = Dd::ONE;
        for k in 1..=30 {
            f = f.mul_f64(k as f64);
        }
        // 30! = 265252859812191058636308480000000
        let exact_hi = 2.6525285981219107e32;
        assert!((f.to_f64() - exact_hi).abs() / exact_hi < 1e-25);
    }

    #[test]
    fn division_and_sqrt() {
        let a = Dd::from_f64(2.0);
        let r = a.sqrt();
        let back = r.mul(r);
        assert!((back.to_f64() - 2.0).abs() < 1e-30);
        let d = Dd::from_f64(1.0).div(Dd::from_f64(3.0));
        assert!((d.mul_f64(3.0).to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn powi_matches_repeated_multiplication() {
        let x = Dd::from_f64(0.7);
        let mut acc = Dd::ONE;
        for _ in 0..9 {
            acc = acc.mul(x);
        }
        assert!((x.powi(9).to_f64() - acc.to_f64()).abs() < 1e-25);
        assert!((x.powi(-3).to_f64() - 1.0 / 0.343).abs() < 1e-14);
    }
}
