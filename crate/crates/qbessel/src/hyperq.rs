//! Basic hypergeometric series.
//!
//! ```text
//! rφs(a_1..a_r; b_1..b_s; q, z) = Σ_k (a_1..a_r;q)_k / (b_1..b_s, q;q)_k
//!                                  * ((-1)^k q^{k(k-1)/2})^{1+s-r} z^k
//! ```
//!
//! Terms are generated from the ratio `term_{k+1}/term_k`. A numerator
//! parameter `q^{-n}` cuts the sum exactly after `k = n`.
//!
//! The regularized 1φ1, `(b;q)_inf * 1φ1(a; b; q, z)`, is entire in `b` and is
//! summed directly as `Σ_k (a;q)_k (bq^k;q)_inf / (q;q)_k (-1)^k q^{k(k-1)/2} z^k`.
//! For `|z| > 1` it is better evaluated through the swap
//! `(b;q)_inf 1φ1(a; b; q, z) = (z;q)_inf 1φ1(az/b; z; q, b)`.

use num_complex::Complex64;

use crate::error::{domain, QError, Result};
use crate::numeric::{Bounded, ComplexSum};
use crate::qcore::{qpoch, qpoch_inf, QBase, QParam, TruncationPolicy};

/// One r-phi-s instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiSpec {
    pub numerator: Vec<QParam>,
    pub denominator: Vec<QParam>,
    pub q: QBase,
    pub z: Complex64,
}

impl PhiSpec {
    pub fn new(numerator: Vec<QParam>, denominator: Vec<QParam>, q: QBase, z: impl Into<Complex64>) -> Self {
        Self {
            numerator,
            denominator,
            q,
            z: z.into(),
        }
    }
}

/// Value of a truncated or terminated series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: Complex64,
    pub terms_used: usize,
    pub tail_bound: f64,
    /// True when a vanishing numerator factor ended the sum.
    pub terminated: bool,
}

impl SeriesResult {
    pub fn bounded(&self) -> Bounded {
        Bounded::new(self.value, self.tail_bound)
    }

    fn scaled(self, c: Complex64, extra_rel: f64) -> Self {
        let value = self.value * c;
        Self {
            value,
            tail_bound: self.tail_bound * c.norm() + value.norm() * extra_rel,
            ..self
        }
    }
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Sum an r-phi-s series.
pub fn eval_phi(spec: &PhiSpec, policy: &TruncationPolicy) -> Result<SeriesResult> {
    policy.validate()?;
    let q = spec.q.value();
    let r = spec.numerator.len() as i32;
    let s = spec.denominator.len() as i32;
    let p = 1 + s - r;
    let terminating = spec.numerator.iter().any(|a| a.terminating_index().is_some());
    let zabs = spec.z.norm();
    if !terminating && zabs != 0.0 {
        if p < 0 {
            return Err(QError::DivergenceError(format!(
                "{r}phi{s} without a terminating parameter diverges for z != 0"
            )));
        }
        if p == 0 && zabs >= 1.0 {
            return Err(QError::DivergenceError(format!("{r}phi{s} needs |z| < 1, got {zabs}")));
        }
    }

    let mut sum = ComplexSum::new();
    let mut term = Complex64::new(1.0, 0.0);
    sum.add(term);
    let mut used = 1usize;
    let mut run_max: f64 = 1.0;
    let mut small = 0usize;
    let mut k = 0usize;
    loop {
        let kf = k as f64;
        let mut num = Complex64::new(1.0, 0.0);
        for a in &spec.numerator {
            let f = a.factor(q, kf);
            if f == Complex64::new(0.0, 0.0) {
                return Ok(SeriesResult {
                    value: sum.value(),
                    terms_used: used,
                    tail_bound: 0.0,
                    terminated: true,
                });
            }
            num *= f;
        }
        let mut den = Complex64::new(1.0 - q.powi(k as i32 + 1), 0.0);
        for b in &spec.denominator {
            let g = b.factor(q, kf);
            if g == Complex64::new(0.0, 0.0) {
                return Err(QError::PoleError(format!(
                    "denominator factor vanishes at k = {k} before the series terminates"
                )));
            }
            den *= g;
        }
        let conv = (-q.powi(k as i32)).powi(p);
        term = term * num / den * conv * spec.z;
        if !finite(term) {
            return Err(QError::Overflow(format!("term {} is not representable", k + 1)));
        }
        if term == Complex64::new(0.0, 0.0) {
            return Ok(SeriesResult {
                value: sum.value(),
                terms_used: used,
                tail_bound: 0.0,
                terminated: false,
            });
        }
        sum.add(term);
        used += 1;
        k += 1;
        run_max = run_max.max(sum.value().norm());
        if term.norm() < policy.eps_term * run_max {
            small += 1;
        } else {
            small = 0;
        }
        if !terminating && small >= policy.stall_window {
            if let Some(rho) = ratio_bound(spec, k, p) {
                if rho < 1.0 {
                    return Ok(SeriesResult {
                        value: sum.value(),
                        terms_used: used,
                        tail_bound: term.norm() * rho / (1.0 - rho),
                        terminated: false,
                    });
                }
            }
        }
        if used >= policy.max_terms {
            return Err(QError::BudgetExceeded(format!("no stop after {used} terms")));
        }
    }
}

/// Upper bound on `|term_{j+1}/term_j|` for every `j >= k`.
fn ratio_bound(spec: &PhiSpec, k: usize, p: i32) -> Option<f64> {
    let q = spec.q.value();
    let qk = q.powi(k as i32);
    let mut rho = spec.z.norm() * qk.powi(p) / (1.0 - q * qk);
    for a in &spec.numerator {
        rho *= 1.0 + a.modulus(q) * qk;
    }
    for b in &spec.denominator {
        let m = b.modulus(q) * qk;
        if m >= 1.0 {
            return None;
        }
        rho /= 1.0 - m;
    }
    Some(rho)
}

/// `1φ1(a; b; q, z)`.
pub fn phi11(
    a: impl Into<QParam>,
    b: impl Into<QParam>,
    q: QBase,
    z: impl Into<QParam>,
    policy: &TruncationPolicy,
) -> Result<SeriesResult> {
    let z = z.into().eval(q.value());
    eval_phi(&PhiSpec::new(vec![a.into()], vec![b.into()], q, z), policy)
}

/// `(b;q)_inf * 1φ1(a; b; q, z)` summed term by term; defined for every `b`.
pub fn phi11_regularized(
    a: impl Into<QParam>,
    b: impl Into<QParam>,
    q: QBase,
    z: impl Into<QParam>,
    policy: &TruncationPolicy,
) -> Result<SeriesResult> {
    policy.validate()?;
    let a = a.into();
    let b = b.into();
    let zv = z.into().eval(q.value());
    let qv = q.value();
    let zero = Complex64::new(0.0, 0.0);

    // term_k = A_k * P_k * C_k with A_k = (a;q)_k/(q;q)_k, P_k = (bq^k;q)_inf,
    // C_k = (-1)^k q^{k(k-1)/2} z^k.
    let mut a_k = Complex64::new(1.0, 0.0);
    let mut c_k = Complex64::new(1.0, 0.0);
    let first = qpoch_inf(b, q, policy)?;
    let mut p_k = first.value;
    let mut p_rel = if p_k == zero {
        0.0
    } else {
        first.tail_bound / p_k.norm()
    };
    let mut sum = ComplexSum::new();
    let mut product_err = 0.0;
    let mut used = 0usize;
    let mut run_max: f64 = 1.0;
    let mut small = 0usize;
    let mut k = 0usize;
    loop {
        let t = if p_k == zero { zero } else { a_k * p_k * c_k };
        if !finite(t) {
            return Err(QError::Overflow(format!(
                "regularized 1phi1 term {k} is not representable"
            )));
        }
        sum.add(t);
        product_err += t.norm() * p_rel;
        used += 1;
        let total = sum.value();
        run_max = run_max.max(total.norm());
        if total != zero && t.norm() < policy.eps_term * run_max {
            small += 1;
        } else {
            small = 0;
        }

        let kf = k as f64;
        let fa = a.factor(qv, kf);
        if fa == zero {
            return Ok(SeriesResult {
                value: total,
                terms_used: used,
                tail_bound: product_err,
                terminated: true,
            });
        }
        if small >= policy.stall_window && p_k != zero {
            // |term_{j+1}/term_j| = |1-aq^j| |q^j z| / ((1-q^{j+1}) |1-bq^j|), decreasing for j >= k
            let qk = qv.powi(k as i32);
            let bq = b.modulus(qv) * qk;
            if bq < 1.0 {
                let rho = (1.0 + a.modulus(qv) * qk) / ((1.0 - bq) * (1.0 - qv * qk)) * qk * zv.norm();
                if rho < 1.0 {
                    return Ok(SeriesResult {
                        value: total,
                        terms_used: used,
                        tail_bound: product_err + t.norm() * rho / (1.0 - rho),
                        terminated: false,
                    });
                }
            }
        }
        if used >= policy.max_terms {
            return Err(QError::BudgetExceeded(format!("no stop after {used} terms")));
        }
        a_k = a_k * fa / (1.0 - qv.powi(k as i32 + 1));
        c_k = c_k * (-qv.powi(k as i32)) * zv;
        if c_k == zero || a_k == zero {
            return Ok(SeriesResult {
                value: total,
                terms_used: used,
                tail_bound: product_err,
                terminated: false,
            });
        }
        if p_k != zero {
            p_k /= b.factor(qv, kf);
        } else {
            let next = qpoch_inf(b.shift(kf + 1.0), q, policy)?;
            p_k = next.value;
            p_rel = if p_k == zero { 0.0 } else { next.tail_bound / p_k.norm() };
        }
        k += 1;
    }
}

/// Regularized 1φ1 through the route that avoids cancellation for large `|z|`.
pub fn phi11_regularized_stable(
    a: impl Into<QParam>,
    b: impl Into<QParam>,
    q: QBase,
    z: impl Into<QParam>,
    policy: &TruncationPolicy,
) -> Result<SeriesResult> {
    let (a, b, z) = (a.into(), b.into(), z.into());
    let qv = q.value();
    let (bn, zn) = (b.modulus(qv), z.modulus(qv));
    if zn > 1.0 && !b.is_zero() && bn < zn {
        phi11_regularized(a.times(z).over(b), z, q, b, policy)
    } else {
        phi11_regularized(a, b, q, z, policy)
    }
}

/// `1φ1(a; b; q, z)` choosing the swapped route when `|z| > 1`.
pub fn phi11_stable(
    a: impl Into<QParam>,
    b: impl Into<QParam>,
    q: QBase,
    z: impl Into<QParam>,
    policy: &TruncationPolicy,
) -> Result<SeriesResult> {
    let (a, b, z) = (a.into(), b.into(), z.into());
    let qv = q.value();
    if z.modulus(qv) <= 1.0 || b.is_zero() || b.modulus(qv) >= z.modulus(qv) {
        return phi11(a, b, q, z, policy);
    }
    let norm = qpoch_inf(b, q, policy)?;
    if norm.value == Complex64::new(0.0, 0.0) {
        return Err(QError::PoleError("denominator parameter lies on q^{-m}".into()));
    }
    let reg = phi11_regularized_stable(a, b, q, z, policy)?;
    let rel = norm.tail_bound / norm.value.norm();
    Ok(reg.scaled(norm.value.inv(), rel))
}

/// `(-z)^n q^{n(n-1)/2} (a;q)_n (q^{1+n};q)_inf 1φ1(aq^n; q^{1+n}; q, q^n z)`.
///
/// Equals `(q^{1-n};q)_inf 1φ1(a; q^{1-n}; q, z)` for every integer `n`.
pub fn phi11_shifted(
    n: i64,
    a: impl Into<QParam>,
    z: impl Into<QParam>,
    q: QBase,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    Ok(phi11_shifted_bounded(n, a, z, q, policy)?.value)
}

/// [`phi11_shifted`] with the truncation bound of its series factor.
pub fn phi11_shifted_bounded(
    n: i64,
    a: impl Into<QParam>,
    z: impl Into<QParam>,
    q: QBase,
    policy: &TruncationPolicy,
) -> Result<Bounded> {
    let (a, z) = (a.into(), z.into());
    let qv = q.value();
    let zv = z.eval(qv);
    if n < 0 && zv == Complex64::new(0.0, 0.0) {
        return Err(domain("z = 0 with a negative shift"));
    }
    let nf = n as f64;
    let pre = (-zv).powi(n as i32) * qv.powf(nf * (nf - 1.0) / 2.0) * qpoch(a, q, n)?;
    if !finite(pre) {
        return Err(QError::Overflow("shift prefactor is not representable".into()));
    }
    let series = phi11_regularized_stable(a.shift(nf), QParam::qpow(1.0 + nf), q, z.shift(nf), policy)?;
    Ok(series.bounded().scale(pre))
}

/// `|z|^n q^{n(n-1)/2} (-q, -|a|, -|z|; q)_inf`, the bound on [`phi11_shifted`] for `n >= 0`.
pub fn phi11_shifted_bound(
    n: i64,
    a: impl Into<QParam>,
    z: impl Into<QParam>,
    q: QBase,
    policy: &TruncationPolicy,
) -> Result<f64> {
    if n < 0 {
        return Err(domain("the shift bound holds for n >= 0"));
    }
    let qv = q.value();
    let (a, z) = (a.into(), z.into());
    let nf = n as f64;
    let prod = qpoch_inf(QParam::scaled(-1.0, 1.0), q, policy)?.value.re
        * qpoch_inf(QParam::real(-a.modulus(qv)), q, policy)?.value.re
        * qpoch_inf(QParam::real(-z.modulus(qv)), q, policy)?.value.re;
    Ok(z.modulus(qv).powi(n as i32) * qv.powf(nf * (nf - 1.0) / 2.0) * prod)
}
