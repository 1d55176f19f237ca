//! Function registry for `eval`. Arguments are plain values unless noted;
//! Krawtchouk and kernel arguments are lattice exponents.

use num_complex::Complex64;
use serde::Serialize;

use qbessel::hyperq::{phi11, phi11_regularized, SeriesResult};
use qbessel::identities::{kernel_delta, Params};
use qbessel::qcore::{qpochhammer, PochIndex, QBase, QParam, TruncationPolicy};
use qbessel::qspecial;
use qbessel::QError;

pub const FUNCTIONS: &[(&str, &str)] = &[
    ("little_q_bessel_j", "alpha, z [z_im]"),
    ("little_q_bessel_J", "alpha, z [z_im]"),
    ("qpochhammer", "a [a_im], n (integer or inf)"),
    ("phi11", "a, b, z"),
    ("phi11_regularized", "a, b, z"),
    ("little_q_jacobi", "n, x, alpha, beta"),
    ("little_q_jacobi_standard", "n, x, alpha, beta"),
    ("affine_q_krawtchouk", "z, x (argument q^-x), t, N"),
    ("krawtchouk_hat", "z, x (argument q^(x-N)), t, N"),
    ("big_q_bessel", "lambda, x, a"),
    ("r_poly", "l, m, nu, x"),
    ("c_norm", "l, m, nu"),
    ("c_addition", "l, m, r, s, nu"),
    ("kernel_delta", "nu, x, y, z (lattice)"),
];

#[derive(Debug, Serialize)]
pub struct EvalOutput {
    pub function: String,
    pub params: Params,
    pub value: Complex64,
    pub terms_used: Option<usize>,
    pub tail_bound: Option<f64>,
}

struct P<'a>(&'a Params);

impl P<'_> {
    fn real(&self, k: &str) -> Result<f64, QError> {
        self.0
            .get(k)
            .copied()
            .ok_or_else(|| QError::DomainError(format!("missing parameter '{k}'")))
    }

    fn complex(&self, k: &str) -> Result<Complex64, QError> {
        Ok(Complex64::new(
            self.real(k)?,
            self.0.get(&format!("{k}_im")).copied().unwrap_or(0.0),
        ))
    }

    fn int(&self, k: &str) -> Result<i64, QError> {
        let v = self.real(k)?;
        if v.fract() != 0.0 || v.abs() > 1e9 {
            return Err(QError::DomainError(format!(
                "parameter '{k}' must be an integer, got {v}"
            )));
        }
        Ok(v as i64)
    }

    fn uint(&self, k: &str) -> Result<u32, QError> {
        let v = self.int(k)?;
        u32::try_from(v).map_err(|_| QError::DomainError(format!("parameter '{k}' must be >= 0, got {v}")))
    }
}

fn series(r: SeriesResult) -> (Complex64, Option<usize>, Option<f64>) {
    (r.value, Some(r.terms_used), Some(r.tail_bound))
}

fn exact(v: Complex64) -> (Complex64, Option<usize>, Option<f64>) {
    (v, None, None)
}

fn real(v: f64) -> (Complex64, Option<usize>, Option<f64>) {
    exact(Complex64::new(v, 0.0))
}

pub fn evaluate(name: &str, params: &Params, q: QBase, policy: &TruncationPolicy) -> Result<EvalOutput, QError> {
    let p = P(params);
    let (value, terms_used, tail_bound) = match name {
        "little_q_bessel_j" => series(qspecial::little_q_bessel_j(
            p.real("alpha")?,
            QParam::value(p.complex("z")?),
            q,
            policy,
        )?),
        "little_q_bessel_J" => exact(qspecial::little_q_bessel_J(
            p.real("alpha")?,
            p.complex("z")?,
            q,
            policy,
        )?),
        "qpochhammer" => {
            let n = p.real("n")?;
            let index = if n.is_infinite() && n > 0.0 {
                PochIndex::Infinity
            } else {
                PochIndex::from(p.int("n")?)
            };
            exact(qpochhammer(p.complex("a")?, q.value(), index, policy)?)
        }
        "phi11" => series(phi11(
            QParam::value(p.complex("a")?),
            QParam::value(p.complex("b")?),
            q,
            QParam::value(p.complex("z")?),
            policy,
        )?),
        "phi11_regularized" => series(phi11_regularized(
            QParam::value(p.complex("a")?),
            QParam::value(p.complex("b")?),
            q,
            QParam::value(p.complex("z")?),
            policy,
        )?),
        "little_q_jacobi" => exact(qspecial::little_q_jacobi(
            p.uint("n")?,
            QParam::value(p.complex("x")?),
            p.real("alpha")?,
            p.real("beta")?,
            q,
        )?),
        "little_q_jacobi_standard" => exact(qspecial::little_q_jacobi_standard(
            p.uint("n")?,
            QParam::value(p.complex("x")?),
            p.real("alpha")?,
            p.real("beta")?,
            q,
        )?),
        "affine_q_krawtchouk" => exact(qspecial::affine_q_krawtchouk(
            p.int("z")?,
            QParam::qpow(-p.real("x")?),
            p.real("t")?,
            p.int("N")?,
            q,
        )?),
        "krawtchouk_hat" => real(qspecial::krawtchouk_hat(
            p.int("z")?,
            p.int("x")?,
            p.real("t")?,
            p.int("N")?,
            q,
        )?),
        "big_q_bessel" => series(qspecial::big_q_bessel(
            p.complex("lambda")?,
            p.complex("x")?,
            QParam::value(p.complex("a")?),
            q,
            policy,
        )?),
        "r_poly" => real(qspecial::r_poly(
            p.uint("l")?,
            p.uint("m")?,
            p.real("nu")?,
            QParam::value(p.complex("x")?),
            q,
        )?),
        "c_norm" => real(qspecial::c_norm(p.uint("l")?, p.uint("m")?, p.real("nu")?, q)?),
        "c_addition" => real(qspecial::c_addition_lm(
            p.uint("l")?,
            p.uint("m")?,
            p.uint("r")?,
            p.uint("s")?,
            p.real("nu")?,
            q,
        )?),
        "kernel_delta" => {
            let d = kernel_delta(p.real("nu")?, p.int("x")?, p.int("y")?, p.int("z")?, q, policy)?;
            (Complex64::new(d.value, 0.0), Some(d.n_terms), Some(d.tail_bound))
        }
        _ => {
            let known: Vec<&str> = FUNCTIONS.iter().map(|f| f.0).collect();
            return Err(QError::DomainError(format!(
                "unknown function '{name}' (known: {})",
                known.join(", ")
            )));
        }
    };
    Ok(EvalOutput {
        function: name.to_string(),
        params: params.clone(),
        value,
        terms_used,
        tail_bound,
    })
}
