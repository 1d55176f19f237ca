//! Addition formulas for the little q-Bessel functions: the general-shift
//! theorem, its `l = 0` corollary and the `N -> inf` version, each as printed
//! and in corrected form.
//!
//! The corrected forms use `L = l + 1`, where `l` is the shift in the printed
//! left-hand side `1φ1(0; q^{ν+1}; q, q^{x-l})`, and
//!
//! ```text
//! base(r,s) = q^{(z-L)(r+s) + s(r+s+1)} C_ν(r,s)
//! C_ν(r,s)  = (q^ν)_r (q^ν)_s (1-q^{ν+r+s}) / ((q)_r (q)_s (1-q^ν) (q^{ν+1})_{r+s}^2)
//! ```

use super::report::Args;
use crate::error::{domain, QError, Result};
use crate::hyperq::phi11_stable;
use crate::numeric::{Bounded, BoundedSum, Neumaier};
use crate::qcore::{qpoch, qpoch_inv, QBase, QParam, TruncationPolicy};
use crate::qspecial::{little_q_bessel_j, little_q_jacobi};

use super::finite::{sqrt_checked, Sides};

/// Hard cap on the outer summation index.
const MAX_OUTER: u32 = 2000;

/// `Σ_{r >= r0} block(r)`, stopped once `stall_window` consecutive blocks have
/// absolute mass below `eps_tail` relative to the running sum and the masses
/// decay; the remainder is estimated from the last mass ratio.
pub(crate) fn outer_sum(
    r0: u32,
    policy: &TruncationPolicy,
    mut block: impl FnMut(u32) -> Result<(Bounded, f64)>,
) -> Result<(Bounded, u32)> {
    let mut sum = BoundedSum::new();
    let mut prev = f64::NAN;
    let mut small = 0;
    let cap = MAX_OUTER.min(policy.max_terms as u32);
    for r in r0..cap {
        let (b, mass) = block(r)?;
        sum.add(b);
        let scale = sum.value().norm().max(1e-300);
        let ratio = if mass == 0.0 { 0.0 } else { mass / prev };
        if mass <= policy.eps_tail * scale && ratio < 1.0 {
            small += 1;
        } else {
            small = 0;
        }
        if small >= policy.stall_window {
            let mut total = sum.value();
            total.err += if ratio == 0.0 {
                0.0
            } else {
                mass * ratio / (1.0 - ratio)
            };
            return Ok((total, r + 1 - r0));
        }
        prev = mass;
    }
    Err(QError::BudgetExceeded(format!(
        "outer sum did not settle within {cap} blocks"
    )))
}

struct Ctx<'a> {
    q: QBase,
    policy: &'a TruncationPolicy,
}

impl Ctx<'_> {
    fn j(&self, nu: f64, arg: QParam) -> Result<Bounded> {
        Ok(little_q_bessel_j(nu, arg, self.q, self.policy)?.bounded())
    }

    fn pow(&self, e: f64) -> f64 {
        self.q.value().powf(e)
    }

    fn poch(&self, a: QParam, n: i64) -> Result<f64> {
        Ok(qpoch(a, self.q, n)?.re)
    }

    fn poch_inv(&self, a: QParam, n: i64) -> Result<f64> {
        Ok(qpoch_inv(a, self.q, n)?.re)
    }

    fn c_nu(&self, nu: f64, r: u32, s: u32) -> Result<f64> {
        let (ri, si) = (r as i64, s as i64);
        let qn = QParam::qpow(nu);
        let one = QParam::qpow(1.0);
        let p = self.poch(QParam::qpow(nu + 1.0), ri + si)?;
        Ok(
            self.poch(qn, ri)? * self.poch(qn, si)? * (1.0 - self.pow(nu + (r + s) as f64))
                / (self.poch(one, ri)? * self.poch(one, si)? * (1.0 - self.pow(nu)) * p * p),
        )
    }

    /// `q^e p_s(q^x; q^a, q^b)` (standard little q-Jacobi), summed with every
    /// term carrying the power of `q` so that neither factor overflows alone.
    fn jacobi_times_pow(&self, s: u32, x: f64, a: f64, b: f64, e: f64) -> Result<f64> {
        let q = self.q.value();
        let ln_q = q.ln();
        let mut ln_t = e * ln_q;
        let mut sign = 1.0;
        let mut sum = Neumaier::new();
        sum.add(ln_t.exp());
        for k in 0..s as i32 {
            let kf = k as f64;
            let ratio = (1.0 - q.powf(kf - s as f64)) * (1.0 - q.powf(a + b + s as f64 + 1.0 + kf))
                / ((1.0 - q.powf(a + 1.0 + kf)) * (1.0 - q.powi(k + 1)));
            if ratio == 0.0 {
                break;
            }
            if ratio < 0.0 {
                sign = -sign;
            }
            ln_t += ratio.abs().ln() + (x + 1.0) * ln_q;
            let term = sign * ln_t.exp();
            if !term.is_finite() {
                return Err(QError::Overflow(format!("scaled Jacobi term {k} is not representable")));
            }
            sum.add(term);
        }
        Ok(sum.value())
    }

    fn cf(&self, nu: f64, r: u32, s: u32) -> Result<f64> {
        let (ri, si) = (r as i64, s as i64);
        let qn = QParam::qpow(nu);
        let one = QParam::qpow(1.0);
        Ok(self.poch(qn, ri)? * self.poch(qn, si)? / (self.poch(one, ri)? * self.poch(one, si)?))
    }
}

struct KrawArgs {
    nu: f64,
    t: f64,
    x: f64,
    z: i64,
    n_big: i64,
    l: i64,
}

fn kraw_args(a: &Args, l_default: Option<i64>) -> Result<KrawArgs> {
    let q = a.q()?;
    let (nu, t, x) = (a.real("nu")?, a.real("t")?, a.real("x")?);
    if !(nu > 0.0) {
        return Err(domain(format!("nu must be positive, got {nu}")));
    }
    if !(t > 0.0 && t * q.value() < 1.0) {
        return Err(domain(format!("t must lie in (0, 1/q), got {t}")));
    }
    let (z, n_big) = (a.int("z")?, a.int("N")?);
    if z < 0 || z > n_big {
        return Err(domain(format!("need 0 <= z <= N, got z={z} N={n_big}")));
    }
    let l = match l_default {
        Some(v) => a.int_or("l", v)?,
        None => a.int("l")?,
    };
    Ok(KrawArgs { nu, t, x, z, n_big, l })
}

/// `1φ1(tq^{N-x+1}; tq; q, q^e)`.
fn big_f(ctx: &Ctx, k: &KrawArgs, e: f64) -> Result<Bounded> {
    Ok(phi11_stable(
        QParam::scaled(k.t, (k.n_big as f64) - k.x + 1.0),
        QParam::scaled(k.t, 1.0),
        ctx.q,
        QParam::qpow(e),
        ctx.policy,
    )?
    .bounded())
}

/// General-shift addition formula with finite `N`. `l` is the printed shift.
pub(crate) fn theorem41_corrected(a: &Args, l_default: Option<i64>, policy: &TruncationPolicy) -> Result<Sides> {
    let ctx = Ctx { q: a.q()?, policy };
    let k = kraw_args(a, l_default)?;
    let (nu, t, z, nb) = (k.nu, k.t, k.z, k.n_big);
    if !(t * ctx.pow((z - k.l) as f64) < 1.0) {
        return Err(domain("the corrected addition formula needs t q^{z-l} < 1"));
    }
    if k.x.fract() != 0.0 || k.x > nb as f64 {
        return Err(domain(format!(
            "the corrected addition formula needs an integer x <= N, got x={}",
            k.x
        )));
    }
    let big_l = (k.l + 1) as f64;
    let zf = z as f64;
    let nz = (nb - z) as f64;
    let qn = QParam::qpow(nb as f64);
    let pz = ctx.poch_inv(qn, z)?;
    let rho = |d: i64| -> Result<f64> { sqrt_checked(pz / ctx.poch_inv(qn, z + d)?) };
    let lhs = ctx.j(nu, QParam::qpow(k.x - big_l + 1.0))? * big_f(&ctx, &k, k.x - zf + 1.0)?;
    let (rhs, _) = outer_sum(0, policy, |r| {
        let mut block = BoundedSum::new();
        let mut mass = 0.0;
        for s in 0..=r {
            let d = (r - s) as i64;
            let df = d as f64;
            let (rf, sf) = (r as f64, s as f64);
            let nrs = nu + rf + sf;
            let base_exp = (zf - big_l) * (rf + sf) + sf * (rf + sf + 1.0);
            let c = ctx.c_nu(nu, r, s)?;
            if r > s {
                let rad = ctx.poch(QParam::qpow(nz + 1.0), d)?;
                let coeff = c * t.powi(r as i32) * sqrt_checked(rad)? * rho(-d)?;
                let e = zf - big_l + sf + 1.0;
                let p = ctx.jacobi_times_pow(s, nz, nu - 1.0, df, base_exp + df)?;
                let term = (ctx.j(nrs, QParam::qpow(e))? * ctx.j(nrs, QParam::scaled(t, e))?).scale_real(coeff * p)
                    * big_f(&ctx, &k, k.x - zf - sf + rf + 1.0)?;
                mass += term.norm();
                block.add(term);
            }
            if d <= nb - z {
                let rad = ctx.poch_inv(QParam::qpow(nz), d)?;
                let coeff = c * t.powi(s as i32) * sqrt_checked(rad)? * rho(d)?;
                if coeff == 0.0 {
                    continue;
                }
                let e = zf - big_l + rf + 1.0;
                let p = ctx.jacobi_times_pow(s, nz - df, nu - 1.0, df, base_exp + rf * rf - sf * sf)?;
                let term = (ctx.j(nrs, QParam::qpow(e))? * ctx.j(nrs, QParam::scaled(t, e))?).scale_real(coeff * p)
                    * big_f(&ctx, &k, k.x - zf - rf + sf + 1.0)?;
                mass += term.norm();
                block.add(term);
            }
        }
        Ok((block.value(), mass))
    })?;
    Ok((lhs, rhs))
}

/// The general-shift display evaluated verbatim (`l = 0` gives the corollary).
pub(crate) fn theorem41_printed(a: &Args, l_default: Option<i64>, policy: &TruncationPolicy) -> Result<Sides> {
    let ctx = Ctx { q: a.q()?, policy };
    let k = kraw_args(a, l_default)?;
    let (nu, t, z, nb, l) = (k.nu, k.t, k.z, k.n_big, k.l as f64);
    let zf = z as f64;
    let nz = (nb - z) as f64;
    let qn = QParam::qpow(nb as f64);
    let pz = ctx.poch_inv(qn, z)?;
    let lhs = ctx.j(nu, QParam::qpow(k.x - l))? * big_f(&ctx, &k, k.x - zf + 1.0)?;
    let tq = t * ctx.q.value();
    let (rhs, _) = outer_sum(1, policy, |r| {
        let mut block = BoundedSum::new();
        let mut mass = 0.0;
        for s in 0..=r {
            let d = (r - s) as i64;
            let df = d as f64;
            let (rf, sf) = (r as f64, s as f64);
            let nrs = nu + rf + sf;
            let cf = ctx.cf(nu, r, s)?;
            let tail = ctx.poch_inv(qn, z - d)?;
            if r != s {
                let rad = ctx.poch(QParam::qpow(nz + 1.0), d)? * pz / tail;
                let coeff = ctx.pow((rf + sf) * (zf + sf - l + 1.0)) * t.powi(r as i32) * sqrt_checked(rad)? * cf;
                let e = zf + sf - l;
                let p = little_q_jacobi(s, QParam::qpow(nz), nu - 1.0, df, ctx.q)?.re;
                let term = (ctx.j(nrs, QParam::qpow(e))? * ctx.j(nrs, QParam::scaled(t, e))?).scale_real(coeff * p)
                    * big_f(&ctx, &k, k.x - zf - sf + rf + 1.0)?;
                mass += term.norm();
                block.add(term);
            }
            let rad = ctx.poch_inv(QParam::qpow(nz), d)? * pz / tail;
            let coeff = ctx.pow((sf + rf) * (zf + rf - l)) * tq.powi(s as i32) * sqrt_checked(rad)? * cf;
            if coeff == 0.0 {
                continue;
            }
            let e = zf + rf - l;
            let p = little_q_jacobi(s, QParam::qpow(nz - df), nu - 1.0, df, ctx.q)?.re;
            let term = (ctx.j(nrs, QParam::qpow(e))? * ctx.j(nrs, QParam::scaled(t, e))?).scale_real(coeff * p)
                * big_f(&ctx, &k, k.x - zf - rf + sf + 1.0)?;
            mass += term.norm();
            block.add(term);
        }
        Ok((block.value(), mass))
    })?;
    Ok((lhs, rhs))
}

struct InfArgs {
    nu: f64,
    mu: f64,
    x: f64,
    z: f64,
}

fn inf_args(a: &Args) -> Result<InfArgs> {
    let (nu, mu) = (a.real("nu")?, a.real("mu")?);
    if !(nu > 0.0 && mu > -1.0) {
        return Err(domain("need nu > 0 and mu > -1"));
    }
    Ok(InfArgs {
        nu,
        mu,
        x: a.real("x")?,
        z: a.int("z")? as f64,
    })
}

/// Addition formula after `N -> inf`, with `t = q^μ`.
pub(crate) fn n_infinity_corrected(a: &Args, policy: &TruncationPolicy) -> Result<Sides> {
    let ctx = Ctx { q: a.q()?, policy };
    let InfArgs { nu, mu, x, z } = inf_args(a)?;
    let l = a.int_or("l", 0)? as f64;
    if !(z - l + mu > 0.0) {
        return Err(domain("the corrected N -> inf formula needs z - l + mu > 0"));
    }
    if x.fract() != 0.0 {
        return Err(domain(format!(
            "the corrected N -> inf formula needs an integer x, got {x}"
        )));
    }
    let big_l = l + 1.0;
    let lhs = ctx.j(nu, QParam::qpow(x - big_l + 1.0))? * ctx.j(mu, QParam::qpow(x - z + 1.0))?;
    let (rhs, _) = outer_sum(0, policy, |r| {
        let mut block = BoundedSum::new();
        let mut mass = 0.0;
        for s in 0..=r {
            let (rf, sf) = (r as f64, s as f64);
            let nrs = nu + rf + sf;
            let base = ctx.pow((z - big_l) * (rf + sf) + sf * (rf + sf + 1.0)) * ctx.c_nu(nu, r, s)?;
            if r > s {
                let e = z - big_l + sf + 1.0;
                let term = (ctx.j(nrs, QParam::qpow(e))? * ctx.j(nrs, QParam::qpow(e + mu))?)
                    .scale_real(base * ctx.pow(rf - sf + mu * rf))
                    * ctx.j(mu, QParam::qpow(x - z - sf + rf + 1.0))?;
                mass += term.norm();
                block.add(term);
            }
            let e = z - big_l + rf + 1.0;
            let term = (ctx.j(nrs, QParam::qpow(e))? * ctx.j(nrs, QParam::qpow(e + mu))?)
                .scale_real(base * ctx.pow(rf * rf - sf * sf + mu * sf))
                * ctx.j(mu, QParam::qpow(x - z - rf + sf + 1.0))?;
            mass += term.norm();
            block.add(term);
        }
        Ok((block.value(), mass))
    })?;
    Ok((lhs, rhs))
}

/// The `N -> inf` display evaluated verbatim.
pub(crate) fn n_infinity_printed(a: &Args, policy: &TruncationPolicy) -> Result<Sides> {
    let ctx = Ctx { q: a.q()?, policy };
    let InfArgs { nu, mu, x, z } = inf_args(a)?;
    let lhs = ctx.j(nu, QParam::qpow(x))? * ctx.j(mu, QParam::qpow(x - z + 1.0))?;
    let (rhs, _) = outer_sum(1, policy, |r| {
        let mut block = BoundedSum::new();
        let mut mass = 0.0;
        for s in 0..=r {
            let (rf, sf) = (r as f64, s as f64);
            let nrs = nu + rf + sf;
            let cf = ctx.cf(nu, r, s)?;
            if r != s {
                let e = z + sf;
                let term = (ctx.j(nrs, QParam::qpow(e))? * ctx.j(nrs, QParam::qpow(e + mu))?)
                    .scale_real(ctx.pow((rf + sf) * (z + sf + 1.0) + mu * rf) * cf)
                    * ctx.j(mu, QParam::qpow(x - z - sf + rf + 1.0))?;
                mass += term.norm();
                block.add(term);
            }
            let e = z + rf;
            let term = (ctx.j(nrs, QParam::qpow(e))? * ctx.j(nrs, QParam::qpow(e + mu))?)
                .scale_real(ctx.pow((sf + rf) * (z + rf) + sf * (1.0 + mu)) * cf)
                * ctx.j(mu, QParam::qpow(x - z - rf - sf + 1.0))?;
            mass += term.norm();
            block.add(term);
        }
        Ok((block.value(), mass))
    })?;
    Ok((lhs, rhs))
}
