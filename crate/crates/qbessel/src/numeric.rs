//! Compensated summation, first-order error tracking and the numeric
//! abstraction used by the elevated-precision oracles.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{Float, FromPrimitive};

/// Scalar usable by the generic oracle evaluators.
pub trait Real: Float + FromPrimitive + Debug + Send + Sync + 'static {
    fn from_f64_exact(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 converts")
    }

    /// Quotient with one residual correction step. The double-double `/` of
    /// twofloat 0.8 is only f64-accurate; the correction restores full width.
    fn quot(self, rhs: Self) -> Self {
        let q1 = self / rhs;
        q1 + (self - q1 * rhs) / rhs
    }
}

impl<T: Float + FromPrimitive + Debug + Send + Sync + 'static> Real for T {}

/// `x^n` by binary powering with [`Real::quot`] for `n < 0`; twofloat's own
/// `powi` is only f64-accurate.
pub fn ipow<T: Real>(x: T, n: i32) -> T {
    let mut base = x;
    let mut e = n.unsigned_abs();
    let mut acc = T::one();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    if n < 0 {
        T::one().quot(acc)
    } else {
        acc
    }
}

/// Double-double scalar (about 32 significant digits).
pub type Extended = twofloat::TwoFloat;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Componentwise compensated sum of complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(items: I) -> f64 {
    let mut acc = Neumaier::new();
    for x in items {
        acc.add(x);
    }
    acc.value()
}

/// A value with an absolute bound on the truncation error it carries.
///
/// Products and sums propagate the bound to first order plus the cross term,
/// so `|exact - value| <= err` is preserved whenever it holds for the inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounded {
    pub value: Complex64,
    pub err: f64,
}

impl Bounded {
    pub fn new(value: Complex64, err: f64) -> Self {
        Self { value, err }
    }

    pub fn exact(value: Complex64) -> Self {
        Self { value, err: 0.0 }
    }

    pub fn real(value: f64) -> Self {
        Self::exact(Complex64::new(value, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn scale(self, c: Complex64) -> Self {
        Self {
            value: self.value * c,
            err: self.err * c.norm(),
        }
    }

    pub fn scale_real(self, c: f64) -> Self {
        Self {
            value: self.value * c,
            err: self.err * c.abs(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.value.norm()
    }
}

impl Mul for Bounded {
    type Output = Bounded;
    fn mul(self, rhs: Bounded) -> Bounded {
        Bounded {
            value: self.value * rhs.value,
            err: self.value.norm() * rhs.err + rhs.value.norm() * self.err + self.err * rhs.err,
        }
    }
}

impl Add for Bounded {
    type Output = Bounded;
    fn add(self, rhs: Bounded) -> Bounded {
        Bounded {
            value: self.value + rhs.value,
            err: self.err + rhs.err,
        }
    }
}

impl Sub for Bounded {
    type Output = Bounded;
    fn sub(self, rhs: Bounded) -> Bounded {
        Bounded {
            value: self.value - rhs.value,
            err: self.err + rhs.err,
        }
    }
}

impl Neg for Bounded {
    type Output = Bounded;
    fn neg(self) -> Bounded {
        Bounded {
            value: -self.value,
            err: self.err,
        }
    }
}

/// Compensated accumulator for [`Bounded`] terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct BoundedSum {
    sum: ComplexSum,
    err: f64,
}

impl BoundedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, b: Bounded) {
        self.sum.add(b.value);
        self.err += b.err;
    }

    pub fn value(&self) -> Bounded {
        Bounded::new(self.sum.value(), self.err)
    }
}
