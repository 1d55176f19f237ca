use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, QError, Result};
use crate::numeric::Bounded;
use crate::qcore::QBase;

/// Every identity, limit and bound the harness can certify.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    Prop21,
    Transform27,
    JacobiOrth,
    KrawtchoukOrth,
    LimitJacobiBessel,
    LimitKrawtchoukBigBessel,
    FlorisKoelinkAddition,
    JacobiAddition,
    Theorem41,
    Corollary43,
    AdditionNInfinity,
    Prop51,
    ProductFormula52,
    KernelSymmetry,
    KernelPositivity,
    Bound24,
    Bound25,
    BoundLemma42,
    BoundProp32,
}

impl IdentityId {
    pub const ALL: [IdentityId; 19] = [
        IdentityId::Prop21,
        IdentityId::Transform27,
        IdentityId::JacobiOrth,
        IdentityId::KrawtchoukOrth,
        IdentityId::LimitJacobiBessel,
        IdentityId::LimitKrawtchoukBigBessel,
        IdentityId::FlorisKoelinkAddition,
        IdentityId::JacobiAddition,
        IdentityId::Theorem41,
        IdentityId::Corollary43,
        IdentityId::AdditionNInfinity,
        IdentityId::Prop51,
        IdentityId::ProductFormula52,
        IdentityId::KernelSymmetry,
        IdentityId::KernelPositivity,
        IdentityId::Bound24,
        IdentityId::Bound25,
        IdentityId::BoundLemma42,
        IdentityId::BoundProp32,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Prop21 => "prop21",
            IdentityId::Transform27 => "transform27",
            IdentityId::JacobiOrth => "jacobi_orth",
            IdentityId::KrawtchoukOrth => "krawtchouk_orth",
            IdentityId::LimitJacobiBessel => "limit_jacobi_bessel",
            IdentityId::LimitKrawtchoukBigBessel => "limit_krawtchouk_big_bessel",
            IdentityId::FlorisKoelinkAddition => "floris_koelink_addition",
            IdentityId::JacobiAddition => "jacobi_addition",
            IdentityId::Theorem41 => "theorem41",
            IdentityId::Corollary43 => "corollary43",
            IdentityId::AdditionNInfinity => "addition_n_infinity",
            IdentityId::Prop51 => "prop51",
            IdentityId::ProductFormula52 => "product_formula52",
            IdentityId::KernelSymmetry => "kernel_symmetry",
            IdentityId::KernelPositivity => "kernel_positivity",
            IdentityId::Bound24 => "bound24",
            IdentityId::Bound25 => "bound25",
            IdentityId::BoundLemma42 => "bound_lemma42",
            IdentityId::BoundProp32 => "bound_prop32",
        }
    }

    /// The form used when none is requested.
    pub fn default_form(self) -> Form {
        match self {
            IdentityId::Theorem41 | IdentityId::AdditionNInfinity | IdentityId::Prop51 => Form::Printed,
            _ => Form::Corrected,
        }
    }

    /// Identities whose displayed statement is evaluated verbatim by default
    /// and whose residuals are recorded rather than asserted.
    pub fn as_printed(self) -> bool {
        self.default_form() == Form::Printed
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = QError;

    /// Case-insensitive; `-` and `_` are ignored, and `prop31`, `prop32`,
    /// `theorem52` are accepted for the limit and product checks.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| *c != '_' && *c != '-')
            .flat_map(char::to_lowercase)
            .collect();
        let alias = match key.as_str() {
            "prop31" => Some(IdentityId::LimitJacobiBessel),
            "prop32" => Some(IdentityId::LimitKrawtchoukBigBessel),
            "theorem52" | "prop52" | "productformula" => Some(IdentityId::ProductFormula52),
            "theorem41" | "thm41" => Some(IdentityId::Theorem41),
            "corollary43" | "cor43" => Some(IdentityId::Corollary43),
            _ => None,
        };
        if let Some(id) = alias {
            return Ok(id);
        }
        IdentityId::ALL
            .into_iter()
            .find(|id| id.name().replace('_', "") == key)
            .ok_or_else(|| domain(format!("unknown identity '{s}'")))
    }
}

/// Which statement of an identity is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// The display exactly as printed.
    Printed,
    /// The statement after the corrections recorded in the project notes.
    Corrected,
}

impl FromStr for Form {
    type Err = QError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "printed" => Ok(Form::Printed),
            "corrected" => Ok(Form::Corrected),
            _ => Err(domain(format!("unknown form '{s}' (printed | corrected)"))),
        }
    }
}

pub type Params = BTreeMap<String, f64>;

/// Outcome of one identity instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    #[serde(rename = "identity")]
    pub id: IdentityId,
    pub form: Form,
    pub params: Params,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_residual: f64,
    /// `abs_residual / max(|lhs|, |rhs|, 1)`.
    pub rel_residual: f64,
    /// Accumulated truncation bound of both sides.
    pub tail_budget: f64,
    pub pass: bool,
}

impl IdentityReport {
    /// Report for an equality `lhs = rhs`.
    pub fn equality(id: IdentityId, form: Form, params: Params, lhs: Bounded, rhs: Bounded, tol: f64) -> Self {
        let abs = (lhs.value - rhs.value).norm();
        Self::build(id, form, params, lhs, rhs, abs, tol)
    }

    /// Report for an inequality `lhs <= rhs`; the residual is the excess.
    pub fn inequality(id: IdentityId, form: Form, params: Params, lhs: Bounded, rhs: Bounded, tol: f64) -> Self {
        let excess = (lhs.value.re - rhs.value.re).max(0.0);
        Self::build(id, form, params, lhs, rhs, excess, tol)
    }

    fn build(id: IdentityId, form: Form, params: Params, lhs: Bounded, rhs: Bounded, abs: f64, tol: f64) -> Self {
        let scale = lhs.norm().max(rhs.norm()).max(1.0);
        let rel = abs / scale;
        let tail = lhs.err + rhs.err;
        let pass = rel <= tol && tail / scale <= tol / 10.0;
        Self {
            id,
            form,
            params,
            lhs: lhs.value,
            rhs: rhs.value,
            abs_residual: abs,
            rel_residual: rel,
            tail_budget: tail,
            pass,
        }
    }
}

/// Residuals of a limit transition along an increasing index sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub id: IdentityId,
    pub form: Form,
    pub index_values: Vec<i64>,
    pub residuals: Vec<f64>,
    pub target: Complex64,
    /// Residuals are non-increasing over the last half of the indices.
    pub monotone_tail: bool,
}

impl LimitReport {
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(f64::NAN)
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.residuals.windows(2).all(|w| w[1] < w[0])
    }
}

pub(crate) fn monotone_tail(residuals: &[f64]) -> bool {
    let start = residuals.len().saturating_sub(1) / 2;
    residuals[start..].windows(2).all(|w| w[1] <= w[0])
}

/// Typed access to a parameter map.
pub(crate) struct Args<'a> {
    pub params: &'a Params,
}

impl<'a> Args<'a> {
    pub fn new(params: &'a Params) -> Self {
        Self { params }
    }

    pub fn real(&self, key: &str) -> Result<f64> {
        let v = *self
            .params
            .get(key)
            .ok_or_else(|| domain(format!("missing parameter '{key}'")))?;
        if !v.is_finite() {
            return Err(domain(format!("parameter '{key}' is not finite")));
        }
        Ok(v)
    }

    pub fn real_or(&self, key: &str, default: f64) -> Result<f64> {
        if self.params.contains_key(key) {
            self.real(key)
        } else {
            Ok(default)
        }
    }

    pub fn int(&self, key: &str) -> Result<i64> {
        let v = self.real(key)?;
        if v.fract() != 0.0 || v.abs() > 1e9 {
            return Err(domain(format!("parameter '{key}' must be an integer, got {v}")));
        }
        Ok(v as i64)
    }

    pub fn int_or(&self, key: &str, default: i64) -> Result<i64> {
        if self.params.contains_key(key) {
            self.int(key)
        } else {
            Ok(default)
        }
    }

    pub fn nonneg(&self, key: &str) -> Result<u32> {
        let v = self.int(key)?;
        u32::try_from(v).map_err(|_| domain(format!("parameter '{key}' must be >= 0, got {v}")))
    }

    pub fn nonneg_or(&self, key: &str, default: u32) -> Result<u32> {
        if self.params.contains_key(key) {
            self.nonneg(key)
        } else {
            Ok(default)
        }
    }

    pub fn complex(&self, key: &str) -> Result<Complex64> {
        Ok(Complex64::new(
            self.real(key)?,
            self.real_or(&format!("{key}_im"), 0.0)?,
        ))
    }

    pub fn q(&self) -> Result<QBase> {
        QBase::new(self.real("q")?)
    }
}
