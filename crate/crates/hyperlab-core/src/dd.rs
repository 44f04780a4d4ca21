//! Minimal double-double arithmetic (Dekker/Knuth error-free transforms).
//! Used to re-expand line restrictions and polish roots when the plain f64
//! coefficient representation is too ill-conditioned: a root cluster at
//! distance R with spacing g costs a factor ~ (R/g)^(d-1) in accuracy,
//! which overruns f64 for tight clusters even at degree 6.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

/// Exact product: hi + lo = a * b. Relies on fused multiply-add, which
/// `f64::mul_add` guarantees (single rounding) even in software.
#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(a: f64) -> Dd {
        Dd { hi: a, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let s = two_sum(self.hi, other.hi);
        let t = two_sum(self.lo, other.lo);
        let mut r = quick_two_sum(s.hi, s.lo + t.hi);
        r = quick_two_sum(r.hi, r.lo + t.lo);
        r
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let mut p = two_prod(self.hi, other.hi);
        p.lo += self.hi * other.lo + self.lo * other.hi;
        quick_two_sum(p.hi, p.lo)
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Dd {
        let mut p = two_prod(self.hi, b);
        p.lo += self.lo * b;
        quick_two_sum(p.hi, p.lo)
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q0 = self.hi / other.hi;
        let r = self.add(other.mul_f64(q0).neg());
        let q1 = r.to_f64() / other.hi;
        quick_two_sum(q0, q1)
    }
}

/// Evaluate a polynomial with double-double coefficients (ascending) at an
/// f64 point, returning value and derivative.
pub(crate) fn horner_with_deriv(coeffs_asc: &[Dd], t: f64) -> (Dd, Dd) {
    let mut val = Dd::ZERO;
    let mut der = Dd::ZERO;
    for &c in coeffs_asc.iter().rev() {
        der = der.mul_f64(t).add(val);
        val = val.mul_f64(t).add(c);
    }
    (val, der)
}
