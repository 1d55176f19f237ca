//! Library routes against the brute-force evaluators in double-double and
//! against reference values computed independently at 40 digits.

#![allow(clippy::excessive_precision)]

use num_complex::Complex64;
use num_traits::ToPrimitive;
use qbessel::hyperq::{phi11, phi11_regularized, phi11_regularized_stable};
use qbessel::numeric::{Extended, Real};
use qbessel::oracle;
use qbessel::qcore::{qpoch, qpoch_inf, qpochhammer, PochIndex, QBase, QParam, TruncationPolicy};
use qbessel::qspecial::{affine_q_krawtchouk, little_q_bessel_j, little_q_jacobi};

fn ext(x: f64) -> Extended {
    Extended::from(x)
}

/// Integer power by repeated multiplication (twofloat's `powi` is only f64-accurate).
fn ext_powi(x: f64, n: i32) -> Extended {
    let mut p = ext(1.0);
    for _ in 0..n.unsigned_abs() {
        p *= ext(x);
    }
    if n < 0 {
        ext(1.0).quot(p)
    } else {
        p
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn policy() -> TruncationPolicy {
    TruncationPolicy::default()
}

#[test]
fn frozen_reference_values() {
    let q = QBase::new(0.5).unwrap();
    let p = policy();
    let cases: [(f64, QParam, f64); 4] = [
        (1.5, QParam::real(0.25), 0.4956542969341957052616373),
        (0.5, QParam::real(2.0), 0.0879432196890281106828575),
        (2.0, QParam::qpow(-3.0), 4.575688777666165121892812e-6),
        (0.3, QParam::real(1.0), -0.3286070185019112317483006),
    ];
    for (alpha, z, want) in cases {
        let got = little_q_bessel_j(alpha, z, q, &p).unwrap().value.re;
        assert!(rel(got, want) < 1e-13, "j_{alpha}: {got} vs {want}");
    }
    let inf = qpoch_inf(QParam::real(0.3), q, &p).unwrap().value.re;
    assert!(rel(inf, 0.5101178266339875718322722) < 1e-14);
    let neg = qpoch(QParam::real(0.7), q, -5).unwrap().re;
    assert!(rel(neg, -0.001383234227367410913076233) < 1e-14);
    let reg = phi11_regularized(0.2, QParam::qpow(-2.0), q, 0.5, &p).unwrap().value.re;
    assert!(rel(reg, -0.00823443765042423639370218) < 1e-13);
    let reg = phi11_regularized(0.2, QParam::qpow(3.0), q, 0.5, &p).unwrap().value.re;
    assert!(rel(reg, 0.2617726720330269771947171) < 1e-13);
}

#[test]
fn pochhammer_against_extended_products() {
    for &qv in &[0.3, 0.5, 0.9] {
        let base = QBase::new(qv).unwrap();
        for &a in &[-1.7, -0.4, 0.35, 0.95, 1.9] {
            for n in -8i64..=8 {
                let got = qpoch(QParam::real(a), base, n).unwrap().re;
                let want = oracle::poch(ext(a), ext(qv), n).to_f64().unwrap();
                assert!(rel(got, want) < 1e-13, "q={qv} a={a} n={n}: {got} vs {want}");
            }
            let got = qpochhammer(Complex64::new(a, 0.0), qv, PochIndex::Infinity, &policy())
                .unwrap()
                .re;
            let want = oracle::poch_inf(ext(a), ext(qv), 2000).to_f64().unwrap();
            assert!(rel(got, want) < 1e-13, "q={qv} a={a} inf");
        }
    }
}

#[test]
fn regularized_phi11_against_extended_series() {
    for &qv in &[0.3, 0.5, 0.7] {
        let q = QBase::new(qv).unwrap();
        for &(a, b_exp, z) in &[(0.2, 1.0, 0.5), (-0.6, -3.0, 0.8), (1.4, 2.5, -0.9), (0.5, 0.0, 3.0)] {
            let got = phi11_regularized(a, QParam::qpow(b_exp), q, z, &policy())
                .unwrap()
                .value
                .re;
            // lattice exponents are exact in the library, so rebuild them exactly here
            let b = if b_exp.fract() == 0.0 {
                ext_powi(qv, b_exp as i32)
            } else {
                ext(qv.powf(b_exp))
            };
            let want = oracle::phi11_regularized(ext(a), b, ext(qv), ext(z), 200, 400)
                .to_f64()
                .unwrap();
            assert!(
                (got - want).abs() < 1e-14 * want.abs().max(1.0),
                "q={qv} a={a} b=q^{b_exp} z={z}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn stable_route_agrees_with_plain_route_where_both_are_accurate() {
    let q = QBase::new(0.5).unwrap();
    for &(a, b, z) in &[(0.2, 0.3, 1.5), (0.1, 0.05, 4.0), (-0.3, 0.2, 2.5)] {
        let plain = phi11_regularized(a, b, q, z, &policy()).unwrap().value.re;
        let stable = phi11_regularized_stable(a, b, q, z, &policy()).unwrap().value.re;
        assert!(
            (plain - stable).abs() < 1e-12 * plain.abs().max(1.0),
            "{a} {b} {z}: {plain} {stable}"
        );
    }
}

#[test]
fn plain_phi11_against_extended_series() {
    let q = QBase::new(0.5).unwrap();
    for &(a, b, z) in &[(0.2, 0.4, 0.5), (1.3, -0.7, 2.0), (0.0, 0.25, -1.5)] {
        let got = phi11(a, b, q, z, &policy()).unwrap().value.re;
        let want = oracle::phi(&[ext(a)], &[ext(b)], ext(0.5), ext(z), 120)
            .to_f64()
            .unwrap();
        assert!(rel(got, want) < 1e-13, "{a} {b} {z}");
    }
}

#[test]
fn bessel_j_against_extended_series() {
    for &qv in &[0.3, 0.5, 0.9] {
        let q = QBase::new(qv).unwrap();
        for &alpha in &[0.3, 1.5, 3.0] {
            for &z in &[0.0, 0.1, 0.8, 1.0] {
                let got = little_q_bessel_j(alpha, z, q, &policy()).unwrap().value.re;
                let b = ext(qv.powf(alpha + 1.0));
                let want = oracle::bessel_j(b, ext(qv), ext(z), 400).to_f64().unwrap();
                // sum of |terms|: rounding in f64 is relative to this, not to the value
                let cond = oracle::bessel_j(b, ext(qv), ext(-z), 400).to_f64().unwrap();
                assert!(
                    (got - want).abs() < 1e-15 * cond.max(1.0) * 10.0,
                    "q={qv} alpha={alpha} z={z}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn negative_lattice_bessel_matches_extended_plain_series() {
    // the plain series cancels badly for q^{-n}; double-double absorbs it
    let q = QBase::new(0.5).unwrap();
    for n in 1..=4 {
        let got = little_q_bessel_j(1.5, QParam::qpow(-(n as f64)), q, &policy())
            .unwrap()
            .value
            .re;
        let z = ext(2.0).powi(n);
        let want = oracle::bessel_j(ext(0.5f64.powf(2.5)), ext(0.5), z, 200)
            .to_f64()
            .unwrap();
        assert!(
            (got - want).abs() < 1e-12 * want.abs().max(1e-3),
            "n={n}: {got} vs {want}"
        );
    }
}

#[test]
fn polynomials_against_extended_sums() {
    let q = QBase::new(0.5).unwrap();
    let (a, b) = (0.3, 0.7);
    for n in 0..=6u32 {
        for &x in &[0.0, 0.125, 0.4, 1.0] {
            let got = little_q_jacobi(n, QParam::real(x), a, b, q).unwrap().re;
            let want = oracle::jacobi(n, ext(x), ext(0.5f64.powf(a)), ext(0.5f64.powf(b)), ext(0.5))
                .to_f64()
                .unwrap();
            assert!((got - want).abs() < 1e-12 * want.abs().max(1.0), "p_{n}({x})");
        }
    }
    for n_big in 1..=6i64 {
        for z in 0..=n_big {
            for x in 0..=n_big {
                let got = affine_q_krawtchouk(z, QParam::qpow(-(x as f64)), 0.5, n_big, q)
                    .unwrap()
                    .re;
                let want = oracle::krawtchouk(z as u32, ext(2.0).powi(x as i32), ext(0.5), n_big as i32, ext(0.5))
                    .to_f64()
                    .unwrap();
                assert!((got - want).abs() < 1e-11 * want.abs().max(1.0), "K_{z}({x}) N={n_big}");
            }
        }
    }
}
