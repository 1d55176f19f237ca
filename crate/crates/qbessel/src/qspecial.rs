//! Little q-Bessel functions and the polynomial families that converge to them.
//!
//! * `J_α(z;q) = z^α (q^{α+1};q)_inf/(q;q)_inf · 1φ1(0; q^{α+1}; q, z)`
//! * `j_α(z;q) = 1φ1(0; q^{α+1}; q, z)`
//! * `p_n(x; q^α, q^β; q) = 2φ1(q^{-n}, q^{α+β+n+1}; q^{α+1}; q, x)`; the
//!   usual normalization evaluates this at `qx` (see [`little_q_jacobi_standard`])
//! * `K_z(x; t, N; q) = 3φ2(q^{-z}, x, 0; tq, q^{-N}; q, q)`
//! * big q-Bessel `1φ1(1/x; a; q, -λax)`

use num_complex::Complex64;

use crate::error::{domain, QError, Result};
use crate::hyperq::{eval_phi, phi11, phi11_stable, PhiSpec, SeriesResult};
use crate::numeric::{ipow, Extended, Real};
use crate::qcore::{qpoch, qpoch_inf, qpoch_inv, QBase, QParam, TruncationPolicy};

fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > -1.0) {
        return Err(domain(format!("order must exceed -1, got {alpha}")));
    }
    Ok(())
}

fn real_of(z: Complex64, what: &str) -> Result<f64> {
    if z.im != 0.0 {
        return Err(domain(format!("{what} is not real: {z}")));
    }
    Ok(z.re)
}

/// Normalized little q-Bessel function `j_α(z;q)`.
///
/// Arguments with `|z| > 1` are summed through the swapped series, which is
/// free of cancellation on the negative lattice `z = q^{-n}`.
pub fn little_q_bessel_j(
    alpha: f64,
    z: impl Into<QParam>,
    q: QBase,
    policy: &TruncationPolicy,
) -> Result<SeriesResult> {
    check_order(alpha)?;
    phi11_stable(QParam::ZERO, QParam::qpow(alpha + 1.0), q, z, policy)
}

/// `j_α(q^n;q)` on the lattice.
pub fn little_q_bessel_j_lattice(alpha: f64, n: i64, q: QBase, policy: &TruncationPolicy) -> Result<SeriesResult> {
    little_q_bessel_j(alpha, QParam::qpow(n as f64), q, policy)
}

/// Jackson's third q-Bessel function `J_α(z;q)`.
#[allow(non_snake_case)]
pub fn little_q_bessel_J(alpha: f64, z: Complex64, q: QBase, policy: &TruncationPolicy) -> Result<Complex64> {
    check_order(alpha)?;
    let power = if alpha.fract() == 0.0 {
        z.powi(alpha as i32)
    } else if z.im == 0.0 && z.re > 0.0 {
        Complex64::new(z.re.powf(alpha), 0.0)
    } else if z == Complex64::new(0.0, 0.0) && alpha > 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        return Err(QError::BranchError(format!(
            "z^{alpha} needs z on the positive real axis, got {z}"
        )));
    };
    let num = qpoch_inf(QParam::qpow(alpha + 1.0), q, policy)?.value;
    let den = qpoch_inf(QParam::qpow(1.0), q, policy)?.value;
    let j = little_q_bessel_j(alpha, z, q, policy)?.value;
    Ok(power * num / den * j)
}

/// Little q-Jacobi polynomial `2φ1(q^{-n}, q^{α+β+n+1}; q^{α+1}; q, x)`.
pub fn little_q_jacobi(n: u32, x: impl Into<QParam>, a_exp: f64, b_exp: f64, q: QBase) -> Result<Complex64> {
    let x = x.into();
    let nf = n as f64;
    let spec = PhiSpec::new(
        vec![QParam::qpow(-nf), QParam::qpow(a_exp + b_exp + nf + 1.0)],
        vec![QParam::qpow(a_exp + 1.0)],
        q,
        x.eval(q.value()),
    );
    let policy = TruncationPolicy {
        max_terms: n as usize + 2,
        ..TruncationPolicy::default()
    };
    Ok(eval_phi(&spec, &policy)?.value)
}

/// Little q-Jacobi polynomial in the normalization orthogonal on `{q^k}`:
/// `2φ1(q^{-n}, q^{α+β+n+1}; q^{α+1}; q, qx)`.
pub fn little_q_jacobi_standard(n: u32, x: impl Into<QParam>, a_exp: f64, b_exp: f64, q: QBase) -> Result<Complex64> {
    little_q_jacobi(n, x.into().shift(1.0), a_exp, b_exp, q)
}

fn check_krawtchouk(z: i64, t: f64, n_big: i64, q: QBase) -> Result<()> {
    if z < 0 || z > n_big {
        return Err(domain(format!("Krawtchouk degree {z} outside [0, {n_big}]")));
    }
    let tq = t * q.value();
    if !(tq > 0.0 && tq < 1.0) {
        return Err(domain(format!("tq = {tq} outside (0,1)")));
    }
    Ok(())
}

/// Affine q-Krawtchouk polynomial `K_z(x_arg; t, N; q)`, with `x_arg = q^{-x}`.
pub fn affine_q_krawtchouk(z: i64, x_arg: impl Into<QParam>, t: f64, n_big: i64, q: QBase) -> Result<Complex64> {
    check_krawtchouk(z, t, n_big, q)?;
    let spec = PhiSpec::new(
        vec![QParam::qpow(-(z as f64)), x_arg.into(), QParam::ZERO],
        vec![QParam::scaled(t, 1.0), QParam::qpow(-(n_big as f64))],
        q,
        q.value(),
    );
    let policy = TruncationPolicy {
        max_terms: z as usize + 2,
        ..TruncationPolicy::default()
    };
    Ok(eval_phi(&spec, &policy)?.value)
}

/// `K_z(q^{-x}; t, N; q)` for integer `x`, summed by term ratios in any
/// [`Real`] backend. For `x` near `N` the terms exceed the value by many
/// orders of magnitude, so exact sums over the whole lattice want
/// [`Extended`](crate::numeric::Extended).
pub fn affine_q_krawtchouk_lattice<T: Real>(z: i64, x: i64, t: T, n_big: i64, q: T) -> Result<T> {
    let tq = t * q;
    if z < 0 || z > n_big {
        return Err(domain(format!("Krawtchouk degree {z} outside [0, {n_big}]")));
    }
    if !(tq > T::zero() && tq < T::one()) {
        return Err(domain(format!("tq = {tq:?} outside (0,1)")));
    }
    let one = T::one();
    let mut term = one;
    let mut sum = one;
    for k in 0..z {
        let num = (one - ipow(q, (k - z) as i32)) * (one - ipow(q, (k - x) as i32));
        if num == T::zero() {
            break;
        }
        let den = (one - tq * ipow(q, k as i32)) * (one - ipow(q, (k - n_big) as i32)) * (one - ipow(q, k as i32 + 1));
        term = (term * num * q).quot(den);
        sum = sum + term;
    }
    Ok(sum)
}

/// Hat-normalized Krawtchouk polynomial at the argument `q^{x-N}`.
pub fn krawtchouk_hat(z: i64, x: i64, t: f64, n_big: i64, q: QBase) -> Result<f64> {
    krawtchouk_hat_arg(z, QParam::qpow((x - n_big) as f64), t, n_big, q)
}

/// `(-1)^z (tq)^{-z/2} sqrt((q^N;q^{-1})_z (tq;q)_z / (q;q)_z) K_z(arg; t, N; q)`,
/// and zero for a degree outside `[0, N]`.
pub fn krawtchouk_hat_arg(z: i64, arg: QParam, t: f64, n_big: i64, q: QBase) -> Result<f64> {
    if z < 0 || z > n_big {
        return Ok(0.0);
    }
    check_krawtchouk(z, t, n_big, q)?;
    let tq = t * q.value();
    let rad =
        qpoch_inv(QParam::qpow(n_big as f64), q, z)? * qpoch(QParam::real(tq), q, z)? / qpoch(QParam::qpow(1.0), q, z)?;
    let rad = real_of(rad, "Krawtchouk radicand")?;
    if rad < 0.0 {
        return Err(QError::NegativeRadicand(format!("Krawtchouk normalization {rad}")));
    }
    let k = if arg.coeff == Complex64::new(1.0, 0.0) && arg.exp.fract() == 0.0 && arg.exp.abs() < 1e6 {
        // lattice points: terms grow like q^{-zx} while the value stays O(1)
        let v = affine_q_krawtchouk_lattice(z, -arg.exp as i64, Extended::from(t), n_big, Extended::from(q.value()))?;
        v.hi() + v.lo()
    } else {
        real_of(affine_q_krawtchouk(z, arg, t, n_big, q)?, "Krawtchouk value")?
    };
    let sign = if z % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * tq.powf(-(z as f64) / 2.0) * rad.sqrt() * k)
}

/// Big q-Bessel function `1φ1(1/x; a; q, -λax)`.
pub fn big_q_bessel(
    lambda: Complex64,
    x: Complex64,
    a: impl Into<QParam>,
    q: QBase,
    policy: &TruncationPolicy,
) -> Result<SeriesResult> {
    if x == Complex64::new(0.0, 0.0) {
        return Err(domain("big q-Bessel needs x != 0"));
    }
    let a = a.into();
    let arg = -lambda * a.eval(q.value()) * x;
    phi11(QParam::value(x.inv()), a, q, QParam::value(arg), policy)
}

/// `r^{(ν)}_{l,m}(x;q)`: `(xq;q)_{l-m}^{1/2} p_m(x; q^ν, q^{l-m})` for `l >= m`,
/// `(x;q^{-1})_{m-l}^{1/2} p_l(xq^{l-m}; q^ν, q^{m-l})` for `l < m`, with the
/// standard little q-Jacobi normalization.
pub fn r_poly(l: u32, m: u32, nu: f64, x: impl Into<QParam>, q: QBase) -> Result<f64> {
    let x = x.into();
    let (rad, p) = if l >= m {
        let d = (l - m) as i64;
        (
            qpoch(x.shift(1.0), q, d)?,
            little_q_jacobi_standard(m, x, nu, d as f64, q)?,
        )
    } else {
        let d = (m - l) as i64;
        (
            qpoch_inv(x, q, d)?,
            little_q_jacobi_standard(l, x.shift(-(d as f64)), nu, d as f64, q)?,
        )
    };
    let rad = real_of(rad, "r-polynomial radicand")?;
    if rad < 0.0 {
        return Err(QError::NegativeRadicand(format!("r_({l},{m}) radicand {rad}")));
    }
    Ok(rad.sqrt() * real_of(p, "r-polynomial value")?)
}

/// `c^{(ν)}_{l,m}(q) = q^{m(ν+1)} (1-q^{ν+1})/(1-q^{ν+l+m+1}) (q;q)_l (q;q)_m / ((q^{ν+1};q)_l (q^{ν+1};q)_m)`.
pub fn c_norm(l: u32, m: u32, nu: f64, q: QBase) -> Result<f64> {
    check_order(nu)?;
    let qv = q.value();
    let (l, m) = (l as i64, m as i64);
    let b = QParam::qpow(nu + 1.0);
    let one = QParam::qpow(1.0);
    let ratio = qpoch(one, q, l)? * qpoch(one, q, m)? / (qpoch(b, q, l)? * qpoch(b, q, m)?);
    Ok(
        qv.powf(m as f64 * (nu + 1.0)) * (1.0 - qv.powf(nu + 1.0)) / (1.0 - qv.powf(nu + (l + m) as f64 + 1.0))
            * ratio.re,
    )
}

/// `c^{(ν)}_{l,m;r,s} = (1-q^{ν+r+s+1})/(1-q^{ν+1}) c^{(ν)}_{l,m} / (c^{(ν+r+s)}_{l-r,m-s} c^{(ν-1)}_{r,s})`.
pub fn c_addition_lm(l: u32, m: u32, r: u32, s: u32, nu: f64, q: QBase) -> Result<f64> {
    if r > l || s > m {
        return Err(domain(format!("need r <= l and s <= m, got l={l} m={m} r={r} s={s}")));
    }
    let qv = q.value();
    let rs = (r + s) as f64;
    Ok(
        (1.0 - qv.powf(nu + rs + 1.0)) / (1.0 - qv.powf(nu + 1.0)) * c_norm(l, m, nu, q)?
            / (c_norm(l - r, m - s, nu + rs, q)? * c_norm(r, s, nu - 1.0, q)?),
    )
}

/// Diagonal coefficient `c^{(ν)}_{l,l;r,s}`.
pub fn c_addition(l: u32, r: u32, s: u32, nu: f64, q: QBase) -> Result<f64> {
    c_addition_lm(l, l, r, s, nu, q)
}
