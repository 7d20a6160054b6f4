//! Exact scalar arithmetic over the ring generated by ω = e^(i2π/3), √3,
//! and 1/3.
//!
//! Every amplitude appearing in a ternary gate or state is a value
//! `(a + b·ω + c·√3 + d·√3·ω) / 3^k` with integer coefficients, so gate
//! identities are decided by exact equality instead of floating-point
//! tolerances. The only rewrites needed for closure under `+` and `×` are
//! ω² = −1 − ω and √3·√3 = 3.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub};

use num_rational::Ratio;

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[inline]
fn cadd(x: i128, y: i128) -> i128 {
    x.checked_add(y)
        .expect("exact amplitude coefficient overflow")
}

#[inline]
fn cmul(x: i128, y: i128) -> i128 {
    x.checked_mul(y)
        .expect("exact amplitude coefficient overflow")
}

#[inline]
fn pow3(k: u32) -> i128 {
    3i128
        .checked_pow(k)
        .expect("exact amplitude denominator overflow")
}

/// One exact complex amplitude `(a + b·ω + c·√3 + d·√3·ω) / 3^k`.
///
/// Values are kept in canonical form: either `k = 0`, or not all of
/// `a, b, c, d` are divisible by 3. Equality, hashing, and ordering all
/// operate on that canonical tuple.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExactAmplitude {
    a: i128,
    b: i128,
    c: i128,
    d: i128,
    k: u32,
}

impl ExactAmplitude {
    /// Builds an amplitude from raw coefficients and reduces it to
    /// canonical form.
    pub fn new(a: i128, b: i128, c: i128, d: i128, k: u32) -> Self {
        Self { a, b, c, d, k }.canonicalize()
    }

    pub fn zero() -> Self {
        Self {
            a: 0,
            b: 0,
            c: 0,
            d: 0,
            k: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i128) -> Self {
        Self {
            a: n,
            b: 0,
            c: 0,
            d: 0,
            k: 0,
        }
        .canonicalize()
    }

    /// ω = e^(i2π/3), the primitive cube root of unity.
    pub fn omega() -> Self {
        Self {
            a: 0,
            b: 1,
            c: 0,
            d: 0,
            k: 0,
        }
    }

    /// ω^n with the exponent reduced mod 3 (ω³ = 1).
    pub fn omega_pow(n: i64) -> Self {
        match n.rem_euclid(3) {
            0 => Self::one(),
            1 => Self::omega(),
            // ω² = −1 − ω
            _ => Self {
                a: -1,
                b: -1,
                c: 0,
                d: 0,
                k: 0,
            },
        }
    }

    pub fn sqrt3() -> Self {
        Self {
            a: 0,
            b: 0,
            c: 1,
            d: 0,
            k: 0,
        }
    }

    /// 1/√3 = √3/3, the Chrestenson normalization factor.
    pub fn inv_sqrt3() -> Self {
        Self {
            a: 0,
            b: 0,
            c: 1,
            d: 0,
            k: 1,
        }
    }

    /// Raw canonical coefficients `(a, b, c, d, k)`.
    pub fn coefficients(&self) -> (i128, i128, i128, i128, u32) {
        (self.a, self.b, self.c, self.d, self.k)
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0 && self.c == 0 && self.d == 0
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// True when the value is real, i.e. fixed by conjugation.
    pub fn is_real(&self) -> bool {
        self.b == 0 && self.d == 0
    }

    fn canonicalize(mut self) -> Self {
        if self.is_zero() {
            self.k = 0;
            return self;
        }
        while self.k > 0 && self.a % 3 == 0 && self.b % 3 == 0 && self.c % 3 == 0 && self.d % 3 == 0
        {
            self.a /= 3;
            self.b /= 3;
            self.c /= 3;
            self.d /= 3;
            self.k -= 1;
        }
        self
    }

    /// Rescales the numerator so the value is expressed over 3^k.
    /// Requires `k >= self.k`.
    fn with_denom_exp(&self, k: u32) -> Self {
        let f = pow3(k - self.k);
        Self {
            a: cmul(self.a, f),
            b: cmul(self.b, f),
            c: cmul(self.c, f),
            d: cmul(self.d, f),
            k,
        }
    }

    /// Complex conjugate: ω ↦ ω² = −1 − ω on both the 1-part and the
    /// √3-part.
    pub fn conj(&self) -> Self {
        Self {
            a: cadd(self.a, -self.b),
            b: -self.b,
            c: cadd(self.c, -self.d),
            d: -self.d,
            k: self.k,
        }
        .canonicalize()
    }

    /// |x|² = x·x̄, always a real element of the ring.
    pub fn norm_sqr(&self) -> Self {
        let n = *self * self.conj();
        debug_assert!(n.is_real());
        n
    }

    /// The value as a rational number, when it is one (b = c = d = 0).
    pub fn to_rational(&self) -> Option<Ratio<i128>> {
        if self.b == 0 && self.c == 0 && self.d == 0 {
            Some(Ratio::new(self.a, pow3(self.k)))
        } else {
            None
        }
    }

    /// Floating-point evaluation with ω = exp(i·2π/3). Display and
    /// cross-checking only; equality decisions always use exact form.
    pub fn to_float(&self) -> (f64, f64) {
        let scale = 3f64.powi(self.k as i32);
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        let re = (a - b / 2.0 + SQRT3 * (c - d / 2.0)) / scale;
        let im = (SQRT3 * b / 2.0 + 1.5 * d) / scale;
        (re, im)
    }
}

impl Add for ExactAmplitude {
    type Output = ExactAmplitude;
    fn add(self, rhs: ExactAmplitude) -> ExactAmplitude {
        let k = self.k.max(rhs.k);
        let x = self.with_denom_exp(k);
        let y = rhs.with_denom_exp(k);
        ExactAmplitude {
            a: cadd(x.a, y.a),
            b: cadd(x.b, y.b),
            c: cadd(x.c, y.c),
            d: cadd(x.d, y.d),
            k,
        }
        .canonicalize()
    }
}

impl AddAssign for ExactAmplitude {
    fn add_assign(&mut self, rhs: ExactAmplitude) {
        *self = *self + rhs;
    }
}

impl Neg for ExactAmplitude {
    type Output = ExactAmplitude;
    fn neg(self) -> ExactAmplitude {
        ExactAmplitude {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
            k: self.k,
        }
    }
}

impl Sub for ExactAmplitude {
    type Output = ExactAmplitude;
    fn sub(self, rhs: ExactAmplitude) -> ExactAmplitude {
        self + (-rhs)
    }
}

impl Mul for ExactAmplitude {
    type Output = ExactAmplitude;
    fn mul(self, rhs: ExactAmplitude) -> ExactAmplitude {
        if self.is_zero() || rhs.is_zero() {
            return ExactAmplitude::zero();
        }
        let (a1, b1, c1, d1) = (self.a, self.b, self.c, self.d);
        let (a2, b2, c2, d2) = (rhs.a, rhs.b, rhs.c, rhs.d);
        // (a1 + b1ω + √3(c1 + d1ω))·(a2 + b2ω + √3(c2 + d2ω)) with
        // ω² = −1 − ω and √3² = 3.
        let bb = cadd(cmul(b1, b2), cmul(3, cmul(d1, d2)));
        let bd = cadd(cmul(b1, d2), cmul(d1, b2));
        let a = cadd(cadd(cmul(a1, a2), cmul(3, cmul(c1, c2))), -bb);
        let b = cadd(
            cadd(
                cadd(cmul(a1, b2), cmul(b1, a2)),
                cmul(3, cadd(cmul(c1, d2), cmul(d1, c2))),
            ),
            -bb,
        );
        let c = cadd(cadd(cmul(a1, c2), cmul(c1, a2)), -bd);
        let d = cadd(
            cadd(
                cadd(cmul(a1, d2), cmul(d1, a2)),
                cadd(cmul(b1, c2), cmul(c1, b2)),
            ),
            -bd,
        );
        ExactAmplitude {
            a,
            b,
            c,
            d,
            k: self.k + rhs.k,
        }
        .canonicalize()
    }
}

impl MulAssign for ExactAmplitude {
    fn mul_assign(&mut self, rhs: ExactAmplitude) {
        *self = *self * rhs;
    }
}

impl fmt::Display for ExactAmplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut body = String::new();
        let mut first = true;
        for (coeff, sym) in [
            (self.a, ""),
            (self.b, "w"),
            (self.c, "r3"),
            (self.d, "r3*w"),
        ] {
            if coeff == 0 {
                continue;
            }
            let mag = coeff.unsigned_abs();
            if first {
                if coeff < 0 {
                    body.push('-');
                }
                first = false;
            } else if coeff < 0 {
                body.push_str(" - ");
            } else {
                body.push_str(" + ");
            }
            if mag != 1 || sym.is_empty() {
                body.push_str(&mag.to_string());
                if !sym.is_empty() {
                    body.push('*');
                }
            }
            body.push_str(sym);
        }
        if self.k == 0 {
            write!(f, "{body}")
        } else {
            let multi_term = body.contains(" + ") || body.contains(" - ");
            let denom = if self.k == 1 {
                "3".to_string()
            } else {
                format!("3^{}", self.k)
            };
            if multi_term {
                write!(f, "({body})/{denom}")
            } else {
                write!(f, "{body}/{denom}")
            }
        }
    }
}

impl fmt::Debug for ExactAmplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
