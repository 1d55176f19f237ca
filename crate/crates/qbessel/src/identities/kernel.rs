//! The product-formula kernel
//!
//! ```text
//! Δ_ν(x,y,z) = (1-q^ν)/(q;q)_inf Σ_{N >= max(x,z)} B_N^2 q^{ν(N-x) + (1+y-x)(z-x)}
//!              / ((q;q)_{N-z} (q^N;q^{-1})_x (q^{N+1}, q^{1+N+y-x-z};q)_inf)
//! B_N = (q^{1+y-x};q)_inf 1φ1(q^{1+N+y-x-z}; q^{1+y-x}; q, q^{1+z-x})
//! ```
//!
//! for lattice points `q^x, q^y, q^z` with `x >= 0`, its symmetry and
//! positivity diagnostics, and the reconstruction `Σ_z Δ_ν(x,y,z) j_ν(q^z) = j_ν(q^x) j_ν(q^y)`.

use std::collections::HashMap;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{Args, Form, IdentityId, IdentityReport, Params};
use crate::error::{domain, QError, Result};
use crate::hyperq::phi11_regularized_stable;
use crate::numeric::{Bounded, BoundedSum};
use crate::qcore::{qpoch, qpoch_inf, qpoch_inv, QBase, QParam, TruncationPolicy};
use crate::qspecial::little_q_bessel_j;

/// Number of leading zero terms after which the kernel is taken to vanish.
const ZERO_RUN: usize = 200;

/// One kernel value with its truncation data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub n_terms: usize,
    pub tail_bound: f64,
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu > 0.0) {
        return Err(domain(format!("nu must be positive, got {nu}")));
    }
    Ok(())
}

/// `Δ_ν(q^x, q^y, q^z; q)`.
pub fn kernel_delta(nu: f64, x: i64, y: i64, z: i64, q: QBase, policy: &TruncationPolicy) -> Result<KernelValue> {
    check_nu(nu)?;
    if x < 0 {
        return Err(domain(format!("the kernel sum needs x >= 0, got x = {x}")));
    }
    let qv = q.value();
    let b = QParam::qpow((1 + y - x) as f64);
    let w = QParam::qpow((1 + z - x) as f64);
    let n0 = x.max(z);
    let mut sum = BoundedSum::new();
    let mut small = 0;
    let mut prev = f64::NAN;
    let mut k = 0usize;
    loop {
        if k >= policy.max_terms {
            return Err(QError::BudgetExceeded(format!("kernel sum exceeded {k} terms")));
        }
        let n = n0 + k as i64;
        let a = QParam::qpow((1 + n + y - x - z) as f64);
        let den = qpoch(QParam::qpow(1.0), q, n - z)?.re
            * qpoch_inv(QParam::qpow(n as f64), q, x)?.re
            * qpoch_inf(QParam::qpow((n + 1) as f64), q, policy)?.value.re
            * qpoch_inf(a, q, policy)?.value.re;
        let mut mag = 0.0;
        if den != 0.0 {
            let br = phi11_regularized_stable(a, b, q, w, policy)?.bounded();
            let weight = qv.powf(nu * (n - x) as f64 + ((1 + y - x) * (z - x)) as f64) / den;
            let term = (br * br).scale_real(weight);
            mag = term.norm();
            sum.add(term);
        }
        k += 1;
        let total = sum.value().norm();
        if total == 0.0 {
            if k >= ZERO_RUN {
                return Ok(KernelValue {
                    value: 0.0,
                    n_terms: k,
                    tail_bound: 0.0,
                });
            }
            continue;
        }
        if mag <= policy.eps_term * total {
            small += 1;
        } else {
            small = 0;
        }
        if small >= policy.stall_window {
            let ratio = if prev > 0.0 {
                (mag / prev).max(qv.powf(nu))
            } else {
                qv.powf(nu)
            };
            let tail = if ratio < 1.0 {
                2.0 * mag * ratio / (1.0 - ratio)
            } else {
                f64::INFINITY
            };
            let pre = (1.0 - qv.powf(nu)) / qpoch_inf(QParam::qpow(1.0), q, policy)?.value.re;
            let s = sum.value();
            return Ok(KernelValue {
                value: s.value.re * pre,
                n_terms: k,
                tail_bound: (s.err + tail) * pre,
            });
        }
        prev = mag;
    }
}

/// One grid cell of a [`KernelTable`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelCell {
    pub x: i64,
    pub y: i64,
    pub z: i64,
    pub delta: f64,
    /// Largest relative symmetry defect against the permuted cells present in the grid.
    pub sym_residual: f64,
}

/// Kernel values on a box with symmetry and positivity diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelTable {
    pub nu: f64,
    pub q: f64,
    pub x_range: (i64, i64),
    pub y_range: (i64, i64),
    pub z_range: (i64, i64),
    pub grid: Vec<KernelCell>,
    pub symmetry_residual_max: f64,
    pub min_value: f64,
    /// Largest number of N-terms used by any cell.
    pub n_sum_terms: usize,
    /// Largest truncation bound of any cell.
    pub tail_bound_max: f64,
}

pub(crate) fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Kernel table over `x_range × y_range × z_range`, filled in parallel and
/// ordered by `(x, y, z)`.
///
/// Each cell's `sym_residual` compares `q^{(ν+1)x}Δ(x,y,z)` with
/// `q^{(ν+1)z}Δ(z,y,x)` and `Δ(x,y,z)` with `Δ(y,x,z)` whenever the permuted
/// cell lies in the grid.
pub fn kernel_table(
    nu: f64,
    x_range: RangeInclusive<i64>,
    y_range: RangeInclusive<i64>,
    z_range: RangeInclusive<i64>,
    q: QBase,
    policy: &TruncationPolicy,
) -> Result<KernelTable> {
    check_nu(nu)?;
    if x_range.is_empty() || y_range.is_empty() || z_range.is_empty() {
        return Err(domain("kernel ranges must be nonempty"));
    }
    let mut points = Vec::new();
    for x in x_range.clone() {
        for y in y_range.clone() {
            for z in z_range.clone() {
                points.push((x, y, z));
            }
        }
    }
    let values: Vec<KernelValue> = points
        .par_iter()
        .map(|&(x, y, z)| kernel_delta(nu, x, y, z, q, policy))
        .collect::<Result<_>>()?;
    let lookup: HashMap<(i64, i64, i64), f64> = points.iter().copied().zip(values.iter().map(|v| v.value)).collect();
    let qv = q.value();
    let weight = |e: i64| qv.powf((nu + 1.0) * e as f64);
    let grid: Vec<KernelCell> = points
        .iter()
        .zip(&values)
        .map(|(&(x, y, z), v)| {
            let mut sym: f64 = 0.0;
            if let Some(&d) = lookup.get(&(z, y, x)) {
                sym = sym.max(rel_diff(weight(x) * v.value, weight(z) * d));
            }
            if let Some(&d) = lookup.get(&(y, x, z)) {
                sym = sym.max(rel_diff(v.value, d));
            }
            KernelCell {
                x,
                y,
                z,
                delta: v.value,
                sym_residual: sym,
            }
        })
        .collect();
    Ok(KernelTable {
        nu,
        q: qv,
        x_range: (*x_range.start(), *x_range.end()),
        y_range: (*y_range.start(), *y_range.end()),
        z_range: (*z_range.start(), *z_range.end()),
        symmetry_residual_max: grid.iter().map(|c| c.sym_residual).fold(0.0, f64::max),
        min_value: grid.iter().map(|c| c.delta).fold(f64::INFINITY, f64::min),
        n_sum_terms: values.iter().map(|v| v.n_terms).max().unwrap_or(0),
        tail_bound_max: values.iter().map(|v| v.tail_bound).fold(0.0, f64::max),
        grid,
    })
}

fn product_params(nu: f64, x: i64, y: i64, q: QBase) -> Params {
    let mut p = Params::new();
    p.insert("nu".into(), nu);
    p.insert("x".into(), x as f64);
    p.insert("y".into(), y as f64);
    p.insert("q".into(), q.value());
    p
}

fn ordered(x: i64, y: i64) -> Result<(i64, i64)> {
    match (x >= 0, y >= 0) {
        (true, _) => Ok((x, y)),
        (false, true) => Ok((y, x)),
        _ => Err(domain("the product formula needs x >= 0 or y >= 0")),
    }
}

fn summand(nu: f64, x: i64, y: i64, z: i64, q: QBase, policy: &TruncationPolicy) -> Result<Bounded> {
    let d = kernel_delta(nu, x, y, z, q, policy)?;
    let j = little_q_bessel_j(nu, QParam::qpow(z as f64), q, policy)?.bounded();
    Ok(j.scale_real(d.value) + Bounded::new(Complex64::new(0.0, 0.0), d.tail_bound * j.norm()))
}

fn product_lhs(nu: f64, x: i64, y: i64, q: QBase, policy: &TruncationPolicy) -> Result<Bounded> {
    let jx = little_q_bessel_j(nu, QParam::qpow(x as f64), q, policy)?.bounded();
    let jy = little_q_bessel_j(nu, QParam::qpow(y as f64), q, policy)?.bounded();
    Ok(jx * jy)
}

/// Geometric remainder estimate from the last two terms at one end.
fn end_tail(last: f64, before: f64) -> f64 {
    if last == 0.0 {
        return 0.0;
    }
    let ratio = last / before;
    if ratio < 1.0 {
        last * ratio / (1.0 - ratio)
    } else {
        f64::INFINITY
    }
}

/// Reconstruction over the fixed window `z_lo..=z_hi`. The tail budget adds
/// a geometric estimate of the omitted terms at both ends.
#[allow(clippy::too_many_arguments)]
pub fn product_expand(
    nu: f64,
    x: i64,
    y: i64,
    q: QBase,
    z_lo: i64,
    z_hi: i64,
    policy: &TruncationPolicy,
    tol: f64,
) -> Result<IdentityReport> {
    check_nu(nu)?;
    if z_lo > z_hi {
        return Err(domain("z_lo must not exceed z_hi"));
    }
    let (x, y) = ordered(x, y)?;
    let lhs = product_lhs(nu, x, y, q, policy)?;
    let terms: Vec<Bounded> = (z_lo..=z_hi)
        .into_par_iter()
        .map(|z| summand(nu, x, y, z, q, policy))
        .collect::<Result<_>>()?;
    let mut sum = BoundedSum::new();
    for t in &terms {
        sum.add(*t);
    }
    let mut rhs = sum.value();
    let n = terms.len();
    if n >= 2 {
        rhs.err += end_tail(terms[0].norm(), terms[1].norm());
        rhs.err += end_tail(terms[n - 1].norm(), terms[n - 2].norm());
    } else {
        rhs.err = f64::INFINITY;
    }
    let mut params = product_params(nu, x, y, q);
    params.insert("z_lo".into(), z_lo as f64);
    params.insert("z_hi".into(), z_hi as f64);
    Ok(IdentityReport::equality(
        IdentityId::ProductFormula52,
        Form::Corrected,
        params,
        lhs,
        rhs,
        tol,
    ))
}

/// Reconstruction with the z-window grown outward from `min(x, y)` until
/// `stall_window` consecutive terms at each end fall below `eps_term · |lhs|`.
pub fn product_expand_auto(
    nu: f64,
    x: i64,
    y: i64,
    q: QBase,
    policy: &TruncationPolicy,
    tol: f64,
) -> Result<IdentityReport> {
    check_nu(nu)?;
    let (x, y) = ordered(x, y)?;
    let lhs = product_lhs(nu, x, y, q, policy)?;
    let thresh = policy.eps_term * lhs.norm().max(f64::MIN_POSITIVE);
    let centre = x.min(y);
    let mut sum = BoundedSum::new();
    sum.add(summand(nu, x, y, centre, q, policy)?);
    let mut ends = [(centre, 0usize, f64::NAN, f64::NAN, false); 2];
    let steps = [1i64, -1];
    let limit = policy.max_terms.min(4000) as i64;
    while !(ends[0].4 && ends[1].4) {
        for (side, step) in steps.iter().enumerate() {
            let e = &mut ends[side];
            if e.4 {
                continue;
            }
            e.0 += step;
            if (e.0 - centre).abs() > limit {
                return Err(QError::BudgetExceeded("bilateral z-sum did not settle".into()));
            }
            let t = summand(nu, x, y, e.0, q, policy)?;
            let mag = t.norm();
            sum.add(t);
            e.1 = if mag <= thresh { e.1 + 1 } else { 0 };
            e.3 = e.2;
            e.2 = mag;
            if e.1 >= policy.stall_window {
                e.4 = true;
            }
        }
    }
    let mut rhs = sum.value();
    for e in &ends {
        rhs.err += end_tail(e.2, e.3);
    }
    let mut params = product_params(nu, x, y, q);
    params.insert("z_lo".into(), ends[1].0 as f64);
    params.insert("z_hi".into(), ends[0].0 as f64);
    Ok(IdentityReport::equality(
        IdentityId::ProductFormula52,
        Form::Corrected,
        params,
        lhs,
        rhs,
        tol,
    ))
}

pub(crate) fn symmetry(a: &Args, form: Form, policy: &TruncationPolicy) -> Result<(Bounded, Bounded)> {
    let q = a.q()?;
    let nu = a.real("nu")?;
    let (x, y, z) = (a.int("x")?, a.int("y")?, a.int("z")?);
    let swap = a.int_or("swap", 0)?;
    let qv = q.value();
    let w = |e: i64| qv.powf((nu + 1.0) * e as f64);
    let d = |x, y, z| -> Result<Bounded> {
        let k = kernel_delta(nu, x, y, z, q, policy)?;
        Ok(Bounded::new(Complex64::new(k.value, 0.0), k.tail_bound))
    };
    match (swap, form) {
        (0, _) => Ok((d(x, y, z)?.scale_real(w(x)), d(z, y, x)?.scale_real(w(z)))),
        (1, Form::Corrected) => Ok((d(x, y, z)?, d(y, x, z)?)),
        (1, Form::Printed) => Ok((d(x, y, z)?.scale_real(w(x)), d(y, x, z)?.scale_real(w(y)))),
        _ => Err(domain(format!("swap must be 0 (x<->z) or 1 (x<->y), got {swap}"))),
    }
}

pub(crate) fn positivity(a: &Args, policy: &TruncationPolicy) -> Result<Bounded> {
    let q = a.q()?;
    let k = kernel_delta(a.real("nu")?, a.int("x")?, a.int("y")?, a.int("z")?, q, policy)?;
    Ok(Bounded::new(Complex64::new(k.value, 0.0), k.tail_bound))
}

/// The x-sum product display for `1φ1` evaluated verbatim, with the x-sum
/// cut at `x >= -window`.
pub(crate) fn prop51(a: &Args, policy: &TruncationPolicy) -> Result<(Bounded, Bounded)> {
    let q = a.q()?;
    let qv = q.value();
    let nu = a.real("nu")?;
    check_nu(nu)?;
    let t = a.real("t")?;
    if !(t > 0.0 && t * qv < 1.0) {
        return Err(domain(format!("t must lie in (0, 1/q), got {t}")));
    }
    let (m, z, k, y) = (a.int("m")?, a.int("z")?, a.int("k")?, a.int("y")?);
    let window = a.int_or("window", 10)?;
    let blocks = a.int_or("n_blocks", 20)?;
    if z < 0 || k < 0 || window < 0 || blocks < 1 {
        return Err(domain("need z >= 0, k >= 0, window >= 0 and n_blocks >= 1"));
    }
    let j = |arg: QParam| -> Result<Bounded> { Ok(little_q_bessel_j(nu, arg, q, policy)?.bounded()) };
    let f = |a_exp: f64, w_exp: f64| -> Result<Bounded> {
        Ok(crate::hyperq::phi11_stable(
            QParam::scaled(t, a_exp),
            QParam::scaled(t, 1.0),
            q,
            QParam::qpow(w_exp),
            policy,
        )?
        .bounded())
    };
    let zm = (z - m) as f64;
    let lhs = j(QParam::qpow(zm))? * j(QParam::scaled(t, zm))?;
    let tq = QParam::real(t * qv);
    let one = QParam::qpow(1.0);
    let pre = (1.0 - qv.powf(nu)) * qpoch_inf(tq, q, policy)?.value.re / qpoch_inf(one, q, policy)?.value.re;
    let mut outer = BoundedSum::new();
    let mut small = 0;
    let n0 = z + k;
    let mut n = n0;
    let mut tail = 0.0;
    loop {
        let nf = n as f64;
        let den_n = qpoch_inv(QParam::qpow(nf), q, z + k)?.re.sqrt()
            * qpoch_inv(QParam::qpow(nf - k as f64), q, z)?.re.sqrt()
            * qpoch_inf(QParam::qpow(nf + 1.0), q, policy)?.value.re.sqrt()
            * qpoch_inf(QParam::qpow(nf - k as f64 + 1.0), q, policy)?.value.re.sqrt();
        let mut block = BoundedSum::new();
        let mut mass = 0.0;
        for x in -window..=n {
            let d = n - x;
            let (xf, df) = (x as f64, d as f64);
            let c = qpoch(tq, q, d)?.re / qpoch(one, q, d)?.re
                * qv.powf(nu * (n - z - k) as f64 + ((x - z) * (1 + y - x)) as f64)
                / den_n;
            let term = (f(1.0 + df - k as f64, 1.0 + xf - z as f64)? * f(1.0 + df, 1.0 + xf - (z + k) as f64)?)
                .scale_real(c)
                * j(QParam::qpow(xf - (k + m) as f64))?;
            mass += term.norm();
            block.add(term);
        }
        outer.add(block.value());
        let total = outer.value().norm();
        if mass <= policy.eps_term * total.max(f64::MIN_POSITIVE) {
            small += 1;
        } else {
            small = 0;
        }
        if small >= policy.stall_window {
            break;
        }
        if n - n0 + 1 >= blocks {
            // unsettled: the last block stands in for the remainder
            tail = mass;
            break;
        }
        n += 1;
    }
    let rhs = outer.value();
    Ok((lhs, Bounded::new(rhs.value, rhs.err + tail).scale_real(pre)))
}
