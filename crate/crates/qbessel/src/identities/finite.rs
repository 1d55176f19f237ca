//! Finite and rapidly convergent identities, the limit transitions evaluated
//! at a single index, and the pointwise bounds.

use num_complex::Complex64;

use super::report::Args;
use crate::error::{domain, Result};
use crate::hyperq::{phi11, phi11_regularized, phi11_shifted_bounded, phi11_stable};
use crate::numeric::{ipow, Bounded, BoundedSum, Extended, Real};
use crate::qcore::{qpoch, qpoch_inf, qpoch_inv, QBase, QParam, TruncationPolicy};
use crate::qspecial::{
    affine_q_krawtchouk, affine_q_krawtchouk_lattice, big_q_bessel, c_addition, c_addition_lm, krawtchouk_hat_arg,
    little_q_bessel_j, little_q_jacobi, little_q_jacobi_standard, r_poly,
};

pub(crate) type Sides = (Bounded, Bounded);

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn inf(a: QParam, q: QBase, policy: &TruncationPolicy) -> Result<Bounded> {
    let p = qpoch_inf(a, q, policy)?;
    Ok(Bounded::new(p.value, p.tail_bound))
}

fn pochr(a: QParam, q: QBase, n: i64) -> Result<f64> {
    Ok(qpoch(a, q, n)?.re)
}

fn pochr_inv(a: QParam, q: QBase, n: i64) -> Result<f64> {
    Ok(qpoch_inv(a, q, n)?.re)
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0) {
        return Err(domain(format!("nu must be positive, got {nu}")));
    }
    Ok(())
}

fn check_t(t: f64, q: QBase) -> Result<()> {
    if !(t > 0.0 && t * q.value() < 1.0) {
        return Err(domain(format!("t must lie in (0, 1/q), got {t}")));
    }
    Ok(())
}

pub(crate) fn prop21(a: &Args, policy: &TruncationPolicy) -> Result<Sides> {
    let q = a.q()?;
    let n = a.int("n")?;
    if n.abs() > 60 {
        return Err(domain(format!("|n| <= 60 required, got {n}")));
    }
    let av = QParam::value(a.complex("a")?);
    let z = QParam::value(a.complex("z")?);
    let lhs = phi11_regularized(av, QParam::qpow(1.0 - n as f64), q, z, policy)?.bounded();
    let rhs = phi11_shifted_bounded(n, av, z, q, policy)?;
    Ok((lhs, rhs))
}

pub(crate) fn transform27(a: &Args, policy: &TruncationPolicy) -> Result<Sides> {
    let q = a.q()?;
    let (av, w, z) = (a.complex("a")?, a.complex("w")?, a.complex("z")?);
    if w == c(0.0) {
        return Err(domain("w must be nonzero"));
    }
    let lhs = inf(QParam::value(w), q, policy)? * phi11(av, w, q, z, policy)?.bounded();
    let rhs = inf(QParam::value(z), q, policy)? * phi11(av * z / w, z, q, w, policy)?.bounded();
    Ok((lhs, rhs))
}

pub(crate) fn jacobi_orth(a: &Args, policy: &TruncationPolicy) -> Result<Sides> {
    let q = a.q()?;
    let (m, n) = (a.nonneg("m")?, a.nonneg("n")?);
    let (al, be) = (a.real("alpha")?, a.real("beta")?);
    if !(al > -1.0 && be > -1.0) {
        return Err(domain("alpha and beta must exceed -1"));
    }
    let qv = q.value();
    let pre = inf(QParam::qpow(al + 1.0), q, policy)?.value * inf(QParam::qpow(be + 1.0), q, policy)?.value
        / (inf(QParam::qpow(al + be + 2.0), q, policy)?.value * inf(QParam::qpow(1.0), q, policy)?.value);
    let rho = qv.powf(al + 1.0);
    let mut sum = BoundedSum::new();
    let mut small = 0;
    let mut prev = f64::NAN;
    let mut k = 0usize;
    let tail = loop {
        if k >= policy.max_terms {
            return Err(crate::QError::BudgetExceeded(format!(
                "orthogonality sum exceeded {k} terms"
            )));
        }
        let x = QParam::qpow(k as f64);
        let w = qv.powf(k as f64 * (al + 1.0)) * inf(QParam::qpow(k as f64 + 1.0), q, policy)?.value
            / inf(QParam::qpow(be + k as f64 + 1.0), q, policy)?.value;
        let term = little_q_jacobi_standard(m, x, al, be, q)? * little_q_jacobi_standard(n, x, al, be, q)? * w;
        sum.add(Bounded::exact(term));
        let mag = term.norm();
        if k > m.max(n) as usize && mag <= policy.eps_term * sum.value().norm().max(1.0) {
            small += 1;
        } else {
            small = 0;
        }
        if small >= policy.stall_window {
            let ratio = if prev > 0.0 { (mag / prev).max(rho) } else { rho };
            break if ratio < 1.0 {
                2.0 * mag * ratio / (1.0 - ratio)
            } else {
                f64::INFINITY
            };
        }
        prev = mag;
        k += 1;
    };
    let total = sum.value();
    let lhs = Bounded::new(total.value * pre, (total.err + tail) * pre.norm());
    let rhs = if m == n {
        let nn = n as i64;
        let h = qv.powf(n as f64 * (al + 1.0))
            * (1.0 - qv.powf(al + be + 1.0))
            * pochr(QParam::qpow(be + 1.0), q, nn)?
            * pochr(QParam::qpow(1.0), q, nn)?
            / ((1.0 - qv.powf(al + be + 2.0 * n as f64 + 1.0))
                * pochr(QParam::qpow(al + 1.0), q, nn)?
                * pochr(QParam::qpow(al + be + 1.0), q, nn)?);
        Bounded::real(h)
    } else {
        Bounded::zero()
    };
    Ok((lhs, rhs))
}

pub(crate) fn krawtchouk_orth(a: &Args) -> Result<Sides> {
    let q = a.q()?;
    let (n, m, nb) = (a.int("n")?, a.int("m")?, a.int("N")?);
    let t = a.real("t")?;
    check_t(t, q)?;
    if nb < 0 || !(0..=nb).contains(&n) || !(0..=nb).contains(&m) {
        return Err(domain(format!("need 0 <= n, m <= N, got n={n} m={m} N={nb}")));
    }
    // terms reach |K| * 1e9 near x = N; the exact sum runs in double-double
    let qe = Extended::from(q.value());
    let te = Extended::from(t);
    let tq = te * qe;
    let poch = |a: Extended, k: i64| {
        (0..k).fold(Extended::from(1.0), |p, j| {
            p * (Extended::from(1.0) - a * ipow(qe, j as i32))
        })
    };
    let mut sum = Extended::from(0.0);
    for x in 0..=nb {
        let w = (poch(tq, x) * poch(qe, nb)).quot(poch(qe, x) * poch(qe, nb - x) * ipow(tq, x as i32));
        let kn = affine_q_krawtchouk_lattice(n, x, te, nb, qe)?;
        let km = affine_q_krawtchouk_lattice(m, x, te, nb, qe)?;
        sum += kn * km * w;
    }
    let rhs = if n == m {
        (ipow(tq, (n - nb) as i32) * poch(qe, n) * poch(qe, nb - n)).quot(poch(tq, n) * poch(qe, nb))
    } else {
        Extended::from(0.0)
    };
    let f = |v: Extended| v.hi() + v.lo();
    Ok((Bounded::real(f(sum)), Bounded::real(f(rhs))))
}

struct AdditionArgs {
    q: QBase,
    nu: f64,
    t: f64,
    z: i64,
    n_big: i64,
    x: f64,
}

fn addition_args(a: &Args) -> Result<AdditionArgs> {
    let q = a.q()?;
    let (nu, t) = (a.real("nu")?, a.real("t")?);
    check_nu(nu)?;
    check_t(t, q)?;
    let (z, n_big) = (a.int("z")?, a.int("N")?);
    if z < 0 || z > n_big {
        return Err(domain(format!("need 0 <= z <= N, got z={z} N={n_big}")));
    }
    Ok(AdditionArgs {
        q,
        nu,
        t,
        z,
        n_big,
        x: a.real("x")?,
    })
}

/// Floris–Koelink addition formula for the r-polynomials.
pub(crate) fn floris_koelink(a: &Args) -> Result<Sides> {
    let AdditionArgs { q, nu, t, z, n_big, x } = addition_args(a)?;
    let (l, m) = (a.nonneg("l")?, a.nonneg("m")?);
    if z + l as i64 > n_big {
        return Err(domain("need z + l <= N"));
    }
    let qv = q.value();
    let d = l as i64 - m as i64;
    let rad = (t * qv).powi(-(d as i32)) * pochr(QParam::qpow(x - d as f64 + 1.0), q, d)?
        / pochr(QParam::qpow((n_big - d + 1) as f64), q, d)?;
    if rad < 0.0 {
        return Err(crate::QError::NegativeRadicand(format!(
            "Floris–Koelink prefactor {rad}"
        )));
    }
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    let arg = QParam::qpow(x - n_big as f64);
    let lhs = sign
        * rad.sqrt()
        * r_poly(l, m, nu, QParam::qpow(x - d as f64), q)?
        * krawtchouk_hat_arg(z, arg, t, n_big - d, q)?;
    let mut rhs = BoundedSum::new();
    let zf = z as f64;
    for r in 0..=l {
        for s in 0..=m {
            let nrs = nu + (r + s) as f64;
            let r1 = r_poly(l - r, m - s, nrs, QParam::qpow(zf), q)?;
            if r1 == 0.0 {
                continue;
            }
            let r2 = r_poly(l - r, m - s, nrs, QParam::scaled(t, zf), q)?;
            let r3 = r_poly(r, s, nu - 1.0, QParam::qpow((n_big - d - z) as f64), q)?;
            let kh = krawtchouk_hat_arg(z + d + s as i64 - r as i64, arg, t, n_big, q)?;
            let sgn = if (r + s) % 2 == 0 { 1.0 } else { -1.0 };
            let pre = c_addition_lm(l, m, r, s, nu, q)?
                * sgn
                * t.powf((r + s) as f64 / 2.0)
                * qv.powf((r as f64 - s as f64) / 2.0)
                * qv.powf(zf * (r + s) as f64);
            rhs.add(Bounded::real(pre * r1 * r2 * r3 * kh));
        }
    }
    Ok((Bounded::real(lhs), rhs.value()))
}

fn pstd(n: u32, x: QParam, a_exp: f64, b_exp: f64, q: QBase) -> Result<f64> {
    Ok(little_q_jacobi_standard(n, x, a_exp, b_exp, q)?.re)
}

/// Little q-Jacobi addition formula obtained from the Floris–Koelink formula.
pub(crate) fn jacobi_addition(a: &Args) -> Result<Sides> {
    let AdditionArgs { q, nu, t, z, n_big, x } = addition_args(a)?;
    let l = a.nonneg("l")?;
    if z + l as i64 > n_big {
        return Err(domain("need z + l <= N"));
    }
    let qv = q.value();
    let arg = QParam::qpow(x - n_big as f64);
    let lhs = pstd(l, QParam::qpow(x), nu, 0.0, q)? * krawtchouk_hat_arg(z, arg, t, n_big, q)?;
    let zf = z as f64;
    let nz = (n_big - z) as f64;
    let mut rhs = BoundedSum::new();
    for r in 0..=l {
        for s in 0..=r {
            let d = (r - s) as i64;
            let df = d as f64;
            let nrs = nu + (r + s) as f64;
            let sgn = if d % 2 == 0 { 1.0 } else { -1.0 };
            let common = c_addition(l, r, s, nu, q)?
                * sgn
                * t.powf((r + s) as f64 / 2.0)
                * qv.powf(df / 2.0)
                * qv.powf(zf * (r + s) as f64);
            if r != s {
                let vanish = pochr_inv(QParam::qpow(zf), q, d)?;
                if vanish != 0.0 {
                    let rad = vanish * pochr_inv(QParam::scaled(t, zf), q, d)? * pochr(QParam::qpow(nz + 1.0), q, d)?;
                    let term = common
                        * sqrt_checked(rad)?
                        * pstd(l - r, QParam::qpow(zf - df), nrs, df, q)?
                        * pstd(l - r, QParam::scaled(t, zf - df), nrs, df, q)?
                        * pstd(s, QParam::qpow(nz), nu - 1.0, df, q)?
                        * krawtchouk_hat_arg(z - d, arg, t, n_big, q)?;
                    rhs.add(Bounded::real(term));
                }
            }
            let rad = pochr(QParam::qpow(zf + 1.0), q, d)?
                * pochr(QParam::scaled(t, zf + 1.0), q, d)?
                * pochr_inv(QParam::qpow(nz), q, d)?;
            let term = common
                * qv.powf(((r * r) as f64) - ((s * s) as f64))
                * sqrt_checked(rad)?
                * pstd(l - r, QParam::qpow(zf), nrs, df, q)?
                * pstd(l - r, QParam::scaled(t, zf), nrs, df, q)?
                * pstd(s, QParam::qpow(nz - df), nu - 1.0, df, q)?
                * krawtchouk_hat_arg(z + d, arg, t, n_big, q)?;
            rhs.add(Bounded::real(term));
        }
    }
    Ok((Bounded::real(lhs), rhs.value()))
}

pub(crate) fn sqrt_checked(rad: f64) -> Result<f64> {
    if rad < 0.0 {
        return Err(crate::QError::NegativeRadicand(format!("radicand {rad}")));
    }
    Ok(rad.sqrt())
}

/// `p_n(q^n x) -> j_α(x)`: the approximant at index `n` against the limit.
pub(crate) fn limit_jacobi_bessel(a: &Args, n: u32, policy: &TruncationPolicy) -> Result<Sides> {
    let q = a.q()?;
    let (al, be) = (a.real("alpha")?, a.real("beta")?);
    if !(al > -1.0 && be > -1.0) {
        return Err(domain("alpha and beta must exceed -1"));
    }
    let x = a.complex("x")?;
    let lhs = little_q_jacobi(n, QParam::value(x).shift(n as f64), al, be, q)?;
    let rhs = little_q_bessel_j(al, x, q, policy)?.bounded();
    Ok((Bounded::exact(lhs), rhs))
}

/// Normalized `K_{z+m}(q^{x-N}; t, N+m)` against the big q-Bessel limit.
pub(crate) fn limit_krawtchouk(a: &Args, m: i64, printed: bool, policy: &TruncationPolicy) -> Result<Sides> {
    let q = a.q()?;
    let (z, nb) = (a.int("z")?, a.int("N")?);
    let t = a.real("t")?;
    let x = a.real("x")?;
    check_t(t, q)?;
    if z < 0 || z > nb || m < 0 {
        return Err(domain(format!("need 0 <= z <= N and m >= 0, got z={z} N={nb} m={m}")));
    }
    let norm_exp = if printed { -(nb + m) } else { nb + m } as f64;
    let norm = qpoch_inv(QParam::qpow(norm_exp), q, z + m)?;
    let k = affine_q_krawtchouk(z + m, QParam::qpow(x - nb as f64), t, nb + m, q)?;
    let qv = q.value();
    let target = big_q_bessel(
        c(-qv.powf((nb - z + 1) as f64)),
        c(qv.powf(x - nb as f64 - 1.0) / t),
        QParam::scaled(t, 1.0),
        q,
        policy,
    )?;
    Ok((Bounded::exact(norm * k), target.bounded()))
}

/// Two-sided bound `(q^α;q)_inf <= (q^α;q)_n <= (-q^α;q)_inf`, as `(lo, mid, hi)`.
pub(crate) fn bound24(a: &Args, policy: &TruncationPolicy) -> Result<(Bounded, Bounded, Bounded)> {
    let q = a.q()?;
    let al = a.real("alpha")?;
    let n = a.nonneg("n")?;
    if !(al > 0.0) {
        return Err(domain("alpha must be positive"));
    }
    let lo = inf(QParam::qpow(al), q, policy)?;
    let mid = Bounded::exact(qpoch(QParam::qpow(al), q, n as i64)?);
    let hi = inf(QParam::scaled(-1.0, al), q, policy)?;
    Ok((lo, mid, hi))
}

pub(crate) fn bound25(a: &Args) -> Result<Sides> {
    let q = a.q()?;
    let (m, n) = (a.nonneg("m")?, a.nonneg("n")?);
    let qv = q.value();
    let (mf, nf) = (m as f64, n as f64);
    let lhs = (qpoch(QParam::qpow(-mf), q, n as i64)? * qv.powf(nf * mf)).norm();
    Ok((Bounded::real(lhs), Bounded::real(qv.powf(nf * (nf - 1.0) / 2.0))))
}

pub(crate) fn bound_lemma42(a: &Args, policy: &TruncationPolicy) -> Result<Sides> {
    let q = a.q()?;
    let nu = a.real("nu")?;
    check_nu(nu)?;
    let (nb, z, r, s) = (a.int("N")?, a.int("z")?, a.nonneg("r")?, a.nonneg("s")?);
    if s > r || z < 0 || z > nb {
        return Err(domain("need s <= r and 0 <= z <= N"));
    }
    let qv = q.value();
    let lhs = pstd(s, QParam::qpow((nb - z) as f64), nu - 1.0, (r - s) as f64, q)?.abs();
    let num = inf(QParam::scaled(-1.0, 1.0), q, policy)?.value.re
        * inf(QParam::scaled(-1.0, nu), q, policy)?.value.re
        * inf(QParam::scaled(-1.0, (z - nb) as f64), q, policy)?.value.re;
    let qnu = inf(QParam::qpow(nu), q, policy)?.value.re;
    let den = inf(QParam::qpow(1.0), q, policy)?.value.re * qnu * qnu;
    let sf = s as f64;
    let rhs = num / den * qv.powf(sf * (nb - z) as f64) * qv.powf(-sf * (sf - 1.0) / 2.0);
    Ok((Bounded::real(lhs), Bounded::real(rhs)))
}

pub(crate) fn bound_prop32(a: &Args, policy: &TruncationPolicy) -> Result<Sides> {
    let q = a.q()?;
    let (z, nb) = (a.int("z")?, a.int("N")?);
    let (t, x) = (a.real("t")?, a.real("x")?);
    check_t(t, q)?;
    let lhs = affine_q_krawtchouk(z, QParam::qpow(x - nb as f64), t, nb, q)?.norm();
    let series = phi11_stable(
        QParam::scaled(-t, (nb as f64) - x + 1.0),
        QParam::scaled(t, 1.0),
        q,
        QParam::scaled(-1.0, x - z as f64 + 1.0),
        policy,
    )?;
    let qq = qpoch_inf(QParam::qpow(1.0), q, policy)?.value.re;
    Ok((Bounded::real(lhs), series.bounded().scale_real(1.0 / qq)))
}
