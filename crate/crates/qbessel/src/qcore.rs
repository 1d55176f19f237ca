//! q-shifted factorials.
//!
//! `(a;q)_n = (1-a)(1-aq)...(1-aq^{n-1})` for `n >= 0`,
//! `(a;q)_{-n} = 1/(aq^{-n};q)_n`, and `(a;q)_inf` as a truncated product
//! with an explicit tail bound.
//!
//! Parameters that live on the q-lattice are carried as [`QParam`]
//! (`coeff * q^exp`), so a factor `1 - q^{e+k}` with `e + k = 0` is exactly
//! zero instead of a rounding residue. Terminating series and vanishing
//! radicands depend on that.

use num_complex::Complex64;

use crate::error::{domain, QError, Result};

/// Largest admissible base for infinite products and series unless overridden.
pub const DEFAULT_Q_MAX: f64 = 0.99;

/// The deformation parameter, validated to lie in `(0, q_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QBase {
    q: f64,
}

impl QBase {
    pub fn new(q: f64) -> Result<Self> {
        Self::with_max(q, DEFAULT_Q_MAX)
    }

    pub fn with_max(q: f64, q_max: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0 && q <= q_max) {
            return Err(domain(format!("q out of range (0, {q_max}]: got {q}")));
        }
        Ok(Self { q })
    }

    pub fn value(self) -> f64 {
        self.q
    }

    /// `q^e` for a real exponent.
    pub fn pow(self, e: f64) -> f64 {
        self.q.powf(e)
    }
}

/// Index of a q-shifted factorial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PochIndex {
    NonNegative(u64),
    Negative(u64),
    Infinity,
}

impl From<i64> for PochIndex {
    fn from(n: i64) -> Self {
        if n >= 0 {
            PochIndex::NonNegative(n as u64)
        } else {
            PochIndex::Negative(n.unsigned_abs())
        }
    }
}

/// Stopping rules and error budget for infinite sums and products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub eps_term: f64,
    pub eps_tail: f64,
    pub max_terms: usize,
    pub stall_window: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            eps_term: 1e-17,
            eps_tail: 1e-14,
            max_terms: 10_000,
            stall_window: 3,
        }
    }
}

impl TruncationPolicy {
    pub fn new(eps_term: f64, eps_tail: f64, max_terms: usize, stall_window: usize) -> Result<Self> {
        let p = Self {
            eps_term,
            eps_tail,
            max_terms,
            stall_window,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_term > 0.0 && self.eps_tail > 0.0) {
            return Err(domain("eps_term and eps_tail must be positive"));
        }
        if self.max_terms < 1 || self.stall_window < 1 {
            return Err(domain("max_terms and stall_window must be at least 1"));
        }
        Ok(())
    }

    /// The same policy with both epsilons divided by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            eps_term: self.eps_term / factor,
            eps_tail: self.eps_tail / factor,
            ..*self
        }
    }
}

/// A parameter of the form `coeff * q^exp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParam {
    pub coeff: Complex64,
    pub exp: f64,
}

impl QParam {
    pub const ZERO: QParam = QParam {
        coeff: Complex64 { re: 0.0, im: 0.0 },
        exp: 0.0,
    };

    pub fn value(c: Complex64) -> Self {
        Self { coeff: c, exp: 0.0 }
    }

    pub fn real(c: f64) -> Self {
        Self::value(Complex64::new(c, 0.0))
    }

    /// `q^e`.
    pub fn qpow(e: f64) -> Self {
        Self {
            coeff: Complex64::new(1.0, 0.0),
            exp: e,
        }
    }

    /// `c * q^e`.
    pub fn scaled(c: f64, e: f64) -> Self {
        Self {
            coeff: Complex64::new(c, 0.0),
            exp: e,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff == Complex64::new(0.0, 0.0)
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        if self.exp == 0.0 || self.is_zero() {
            self.coeff
        } else {
            self.coeff * q.powf(self.exp)
        }
    }

    /// Multiply by `q^e`.
    pub fn shift(self, e: f64) -> Self {
        Self {
            coeff: self.coeff,
            exp: self.exp + e,
        }
    }

    pub fn times(self, other: QParam) -> Self {
        Self {
            coeff: self.coeff * other.coeff,
            exp: self.exp + other.exp,
        }
    }

    pub fn over(self, other: QParam) -> Self {
        Self {
            coeff: self.coeff / other.coeff,
            exp: self.exp - other.exp,
        }
    }

    pub fn scale(self, c: Complex64) -> Self {
        Self {
            coeff: self.coeff * c,
            exp: self.exp,
        }
    }

    /// `1 - coeff * q^{exp + k}`, exactly zero when the exponent cancels.
    pub fn factor(&self, q: f64, k: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        if self.is_zero() {
            return one;
        }
        let e = self.exp + k;
        if e == 0.0 {
            one - self.coeff
        } else {
            one - self.coeff * q.powf(e)
        }
    }

    /// `|coeff| * q^exp`.
    pub fn modulus(&self, q: f64) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.coeff.norm() * q.powf(self.exp)
        }
    }

    /// `Some(n)` when the parameter is exactly `q^{-n}` with `n >= 0`.
    pub fn terminating_index(&self) -> Option<u64> {
        if self.coeff == Complex64::new(1.0, 0.0) && self.exp <= 0.0 && self.exp.fract() == 0.0 {
            Some((-self.exp) as u64)
        } else {
            None
        }
    }
}

impl From<f64> for QParam {
    fn from(c: f64) -> Self {
        QParam::real(c)
    }
}

impl From<Complex64> for QParam {
    fn from(c: Complex64) -> Self {
        QParam::value(c)
    }
}

/// An infinite product truncated after `factors_used` factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductResult {
    pub value: Complex64,
    pub factors_used: usize,
    /// Absolute bound on `|exact - value|`.
    pub tail_bound: f64,
}

fn finite_product(n: u64, mut factor: impl FnMut(u64) -> Complex64) -> Result<Complex64> {
    let mut p = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let f = factor(k);
        if f == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        p *= f;
    }
    if !(p.re.is_finite() && p.im.is_finite()) {
        return Err(QError::Overflow(format!(
            "finite product of length {n} is not representable"
        )));
    }
    Ok(p)
}

fn invert(p: Complex64, what: &str) -> Result<Complex64> {
    if p == Complex64::new(0.0, 0.0) {
        return Err(QError::ZeroDivisor(format!(
            "negative-index factorial {what} hits a vanishing factor"
        )));
    }
    Ok(p.inv())
}

/// `(a;base)_n` for any real base and finite or infinite index.
pub fn qpochhammer(a: Complex64, base: f64, n: PochIndex, policy: &TruncationPolicy) -> Result<Complex64> {
    match n {
        PochIndex::NonNegative(n) => {
            if base.abs() > 1.0 && n as usize > policy.max_terms {
                return Err(QError::Overflow(format!("index {n} exceeds max_terms with |base| > 1")));
            }
            finite_product(n, |k| Complex64::new(1.0, 0.0) - a * base.powi(k as i32))
        }
        PochIndex::Negative(m) => {
            if base == 0.0 {
                return Err(domain("negative index requires a nonzero base"));
            }
            for j in 1..=m {
                if a == Complex64::new(base.powi(j as i32), 0.0) {
                    return Err(QError::ZeroDivisor(format!(
                        "a = base^{j} makes (a base^-{j}; base) vanish"
                    )));
                }
            }
            if base.abs() < 1.0 && m as usize > policy.max_terms {
                return Err(QError::Overflow(format!("index -{m} exceeds max_terms")));
            }
            let p = finite_product(m, |k| Complex64::new(1.0, 0.0) - a * base.powi(k as i32 - m as i32))?;
            invert(p, &format!("(a;base)_-{m}"))
        }
        PochIndex::Infinity => {
            if !(base > 0.0 && base < 1.0) {
                return Err(domain(format!("infinite product requires base in (0,1), got {base}")));
            }
            Ok(infinite_product(
                |k| Complex64::new(1.0, 0.0) - a * base.powi(k as i32),
                a.norm(),
                base,
                policy,
            )?
            .value)
        }
    }
}

/// `(a;base)_inf` with its tail bound.
pub fn qpochhammer_inf(a: Complex64, base: f64, policy: &TruncationPolicy) -> Result<ProductResult> {
    if !(base > 0.0 && base < 1.0) {
        return Err(domain(format!("infinite product requires base in (0,1), got {base}")));
    }
    infinite_product(
        |k| Complex64::new(1.0, 0.0) - a * base.powi(k as i32),
        a.norm(),
        base,
        policy,
    )
}

/// `(a_1,...,a_r;base)_n`.
pub fn qpochhammer_multi(
    params: &[Complex64],
    base: f64,
    n: PochIndex,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    if params.is_empty() {
        return Err(domain("parameter list must be nonempty"));
    }
    let mut p = Complex64::new(1.0, 0.0);
    for &a in params {
        p *= qpochhammer(a, base, n, policy)?;
    }
    Ok(p)
}

fn infinite_product(
    mut factor: impl FnMut(usize) -> Complex64,
    a_abs: f64,
    q: f64,
    policy: &TruncationPolicy,
) -> Result<ProductResult> {
    let one = Complex64::new(1.0, 0.0);
    let mut p = one;
    let mut small = 0usize;
    let mut k = 0usize;
    loop {
        if k >= policy.max_terms {
            return Err(QError::BudgetExceeded(format!(
                "infinite product not settled after {k} factors"
            )));
        }
        let f = factor(k);
        k += 1;
        if f == Complex64::new(0.0, 0.0) {
            return Ok(ProductResult {
                value: f,
                factors_used: k,
                tail_bound: 0.0,
            });
        }
        p *= f;
        if (f - one).norm() < policy.eps_term {
            small += 1;
        } else {
            small = 0;
        }
        if small >= policy.stall_window {
            break;
        }
    }
    if !(p.re.is_finite() && p.im.is_finite()) {
        return Err(QError::Overflow("infinite product is not representable".into()));
    }
    // Remaining factors satisfy |1 - a q^j| in [1 - s_j, 1 + s_j] with s_j = |a| q^j,
    // so the relative tail error is at most exp(sum_{j >= k} s_j) - 1.
    let s = a_abs * q.powi(k as i32) / (1.0 - q);
    Ok(ProductResult {
        value: p,
        factors_used: k,
        tail_bound: p.norm() * s.exp_m1(),
    })
}

/// `(a;q)_inf` for a lattice parameter.
pub fn qpoch_inf(a: QParam, q: QBase, policy: &TruncationPolicy) -> Result<ProductResult> {
    let qv = q.value();
    infinite_product(|k| a.factor(qv, k as f64), a.modulus(qv), qv, policy)
}

/// `(a;q)_n` for a lattice parameter and any integer `n`.
pub fn qpoch(a: QParam, q: QBase, n: i64) -> Result<Complex64> {
    poch_dir(a, q.value(), 1.0, n)
}

/// `(a;q^{-1})_n` for a lattice parameter and any integer `n`.
pub fn qpoch_inv(a: QParam, q: QBase, n: i64) -> Result<Complex64> {
    poch_dir(a, q.value(), -1.0, n)
}

fn poch_dir(a: QParam, q: f64, dir: f64, n: i64) -> Result<Complex64> {
    if n >= 0 {
        finite_product(n as u64, |k| a.factor(q, dir * k as f64))
    } else {
        let m = n.unsigned_abs();
        let shifted = a.shift(-dir * m as f64);
        let p = finite_product(m, |k| shifted.factor(q, dir * k as f64))?;
        invert(p, &format!("with index {n}"))
    }
}

/// Real part of [`qpoch`]; lattice parameters with real coefficients give real values.
pub fn qpoch_re(a: QParam, q: QBase, n: i64) -> Result<f64> {
    Ok(qpoch(a, q, n)?.re)
}

pub fn qpoch_inv_re(a: QParam, q: QBase, n: i64) -> Result<f64> {
    Ok(qpoch_inv(a, q, n)?.re)
}

pub fn qpoch_inf_re(a: QParam, q: QBase, policy: &TruncationPolicy) -> Result<f64> {
    Ok(qpoch_inf(a, q, policy)?.value.re)
}
