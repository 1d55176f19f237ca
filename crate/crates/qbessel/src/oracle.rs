//! Brute-force evaluators used as test oracles.
//!
//! Every term is rebuilt from its defining products (no term ratios, no
//! stopping heuristics, fixed term counts), generic over [`Real`] so the same
//! code runs in `f64` or in double-double [`Extended`](crate::numeric::Extended).
//! Powers with real exponents are passed in as base values (e.g. `q^α`), so an
//! oracle and the library see bit-identical parameters.

use crate::numeric::Real;

/// `(a;q)_n` by direct multiplication; negative `n` via `1/(aq^n;q)_{-n}`.
pub fn poch<T: Real>(a: T, q: T, n: i64) -> T {
    if n >= 0 {
        let mut p = T::one();
        let mut qk = T::one();
        for _ in 0..n {
            p = p * (T::one() - a * qk);
            qk = qk * q;
        }
        p
    } else {
        let m = -n;
        T::one().quot(poch(a.quot(q.powi(m as i32)), q, m))
    }
}

/// `(a;q)_inf` truncated after `factors` factors.
pub fn poch_inf<T: Real>(a: T, q: T, factors: usize) -> T {
    poch(a, q, factors as i64)
}

/// `Σ_{k<terms}` of the r-phi-s summand, each summand rebuilt from scratch.
pub fn phi<T: Real>(num: &[T], den: &[T], q: T, z: T, terms: usize) -> T {
    let p = 1 + den.len() as i32 - num.len() as i32;
    let mut total = T::zero();
    let mut zk = T::one();
    for k in 0..terms as i64 {
        let mut t = T::one();
        for &a in num {
            t = t * poch(a, q, k);
        }
        for &b in den {
            t = t.quot(poch(b, q, k));
        }
        t = t.quot(poch(q, q, k));
        let sign = if (k * p as i64) % 2 == 0 { T::one() } else { -T::one() };
        let conv = q.powi((k * (k - 1) / 2) as i32).powi(p);
        total = total + t * sign * conv * zk;
        zk = zk * z;
    }
    total
}

/// `Σ_{k<terms} (a;q)_k (bq^k;q)_inf / (q;q)_k (-1)^k q^{k(k-1)/2} z^k`.
pub fn phi11_regularized<T: Real>(a: T, b: T, q: T, z: T, terms: usize, factors: usize) -> T {
    let mut total = T::zero();
    let mut zk = T::one();
    for k in 0..terms as i64 {
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        total = total
            + (poch(a, q, k) * poch_inf(b * q.powi(k as i32), q, factors)).quot(poch(q, q, k))
                * sign
                * q.powi((k * (k - 1) / 2) as i32)
                * zk;
        zk = zk * z;
    }
    total
}

/// `j_α(z;q)` from its series with `b = q^{α+1}` supplied.
pub fn bessel_j<T: Real>(b: T, q: T, z: T, terms: usize) -> T {
    phi(&[T::zero()], &[b], q, z, terms)
}

/// Verbatim little q-Jacobi `2φ1(q^{-n}, abq^{n+1}; aq; q, x)` with `a = q^α`, `b = q^β`.
pub fn jacobi<T: Real>(n: u32, x: T, a: T, b: T, q: T) -> T {
    let n = n as i32;
    phi(
        &[T::one().quot(q.powi(n)), a * b * q.powi(n + 1)],
        &[a * q],
        q,
        x,
        n as usize + 1,
    )
}

/// `3φ2(q^{-z}, x_arg, 0; tq, q^{-N}; q, q)`.
pub fn krawtchouk<T: Real>(z: u32, x_arg: T, t: T, n_big: i32, q: T) -> T {
    phi(
        &[T::one().quot(q.powi(z as i32)), x_arg, T::zero()],
        &[t * q, T::one().quot(q.powi(n_big))],
        q,
        q,
        z as usize + 1,
    )
}
