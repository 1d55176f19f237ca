//! Verification harness: both sides of every identity, limit transition and
//! bound, evaluated through separate code paths and compared in an
//! [`IdentityReport`].
//!
//! Parameters are passed by name (see [`parameter_names`]). Lattice
//! parameters (`x`, `y`, `z`, `N`, `l`, `m`, ...) are exponents: the function
//! argument is `q^x`. Complex inputs take an optional `<name>_im` part.

mod addition;
mod finite;
mod kernel;
mod limits;
mod report;
mod sweep;

pub use kernel::{
    kernel_delta, kernel_table, product_expand, product_expand_auto, KernelCell, KernelTable, KernelValue,
};
pub use limits::{run_limit_check, run_limit_check_form};
pub use report::{Form, IdentityId, IdentityReport, LimitReport, Params};
pub use sweep::{sample_params, sweep};

use crate::error::{domain, Result};
use crate::numeric::Bounded;
use crate::qcore::TruncationPolicy;
use report::Args;

/// Names of the parameters each identity reads; `q` is always required.
/// Bracketed names are optional.
pub fn parameter_names(id: IdentityId) -> &'static str {
    match id {
        IdentityId::Prop21 => "n, a, z",
        IdentityId::Transform27 => "a, w, z",
        IdentityId::JacobiOrth => "m, n, alpha, beta",
        IdentityId::KrawtchoukOrth => "n, m, t, N",
        IdentityId::LimitJacobiBessel => "alpha, beta, x, [n=25]",
        IdentityId::LimitKrawtchoukBigBessel => "z, N, t, x, [m=20]",
        IdentityId::FlorisKoelinkAddition => "l, m, z, N, x, nu, t",
        IdentityId::JacobiAddition => "l, z, N, x, nu, t",
        IdentityId::Theorem41 => "l, x, z, N, nu, t",
        IdentityId::Corollary43 => "x, z, N, nu, t",
        IdentityId::AdditionNInfinity => "x, z, nu, mu, [l=0]",
        IdentityId::Prop51 => "m, z, k, y, nu, t, [window=10], [n_blocks=20]",
        IdentityId::ProductFormula52 => "x, y, nu, [z_lo, z_hi]",
        IdentityId::KernelSymmetry => "x, y, z, nu, [swap=0]",
        IdentityId::KernelPositivity => "x, y, z, nu",
        IdentityId::Bound24 => "alpha, n",
        IdentityId::Bound25 => "m, n",
        IdentityId::BoundLemma42 => "nu, N, z, r, s",
        IdentityId::BoundProp32 => "z, N, t, x",
    }
}

/// Checks one identity instance in its default form.
pub fn check_identity(id: IdentityId, params: &Params, policy: &TruncationPolicy, tol: f64) -> Result<IdentityReport> {
    check_identity_form(id, id.default_form(), params, policy, tol)
}

/// Checks one identity instance in the requested form.
///
/// Only the general-shift theorem, its corollary, the `N -> inf` formula, the
/// Krawtchouk limit and the x↔y kernel symmetry differ between the printed
/// and the corrected form; the other identities ignore `form`, except the
/// x-sum product display, which exists only as printed.
pub fn check_identity_form(
    id: IdentityId,
    form: Form,
    params: &Params,
    policy: &TruncationPolicy,
    tol: f64,
) -> Result<IdentityReport> {
    policy.validate()?;
    if !(tol > 0.0) {
        return Err(domain("tol must be positive"));
    }
    let a = Args::new(params);
    let printed = form == Form::Printed;
    let eq = |(lhs, rhs): (Bounded, Bounded)| IdentityReport::equality(id, form, params.clone(), lhs, rhs, tol);
    let ineq = |(lhs, rhs): (Bounded, Bounded)| IdentityReport::inequality(id, form, params.clone(), lhs, rhs, tol);
    Ok(match id {
        IdentityId::Prop21 => eq(finite::prop21(&a, policy)?),
        IdentityId::Transform27 => eq(finite::transform27(&a, policy)?),
        IdentityId::JacobiOrth => eq(finite::jacobi_orth(&a, policy)?),
        IdentityId::KrawtchoukOrth => eq(finite::krawtchouk_orth(&a)?),
        IdentityId::LimitJacobiBessel => eq(finite::limit_jacobi_bessel(&a, a.nonneg_or("n", 25)?, policy)?),
        IdentityId::LimitKrawtchoukBigBessel => eq(finite::limit_krawtchouk(&a, a.int_or("m", 20)?, printed, policy)?),
        IdentityId::FlorisKoelinkAddition => eq(finite::floris_koelink(&a)?),
        IdentityId::JacobiAddition => eq(finite::jacobi_addition(&a)?),
        IdentityId::Theorem41 if printed => eq(addition::theorem41_printed(&a, None, policy)?),
        IdentityId::Theorem41 => eq(addition::theorem41_corrected(&a, None, policy)?),
        IdentityId::Corollary43 => {
            if params.contains_key("l") {
                return Err(domain("the corollary has no shift parameter l; use theorem41"));
            }
            if printed {
                eq(addition::theorem41_printed(&a, Some(0), policy)?)
            } else {
                eq(addition::theorem41_corrected(&a, Some(0), policy)?)
            }
        }
        IdentityId::AdditionNInfinity if printed => eq(addition::n_infinity_printed(&a, policy)?),
        IdentityId::AdditionNInfinity => eq(addition::n_infinity_corrected(&a, policy)?),
        IdentityId::Prop51 => {
            if !printed {
                return Err(domain("the x-sum product display is available only as printed"));
            }
            eq(kernel::prop51(&a, policy)?)
        }
        IdentityId::ProductFormula52 => {
            let q = a.q()?;
            let (nu, x, y) = (a.real("nu")?, a.int("x")?, a.int("y")?);
            let mut r = if params.contains_key("z_lo") || params.contains_key("z_hi") {
                kernel::product_expand(nu, x, y, q, a.int("z_lo")?, a.int("z_hi")?, policy, tol)?
            } else {
                kernel::product_expand_auto(nu, x, y, q, policy, tol)?
            };
            r.form = form;
            r
        }
        IdentityId::KernelSymmetry => eq(kernel::symmetry(&a, form, policy)?),
        IdentityId::KernelPositivity => {
            let d = kernel::positivity(&a, policy)?;
            IdentityReport {
                lhs: d.value,
                ..ineq((-d, Bounded::zero()))
            }
        }
        IdentityId::Bound24 => {
            let (lo, mid, hi) = finite::bound24(&a, policy)?;
            let low = ineq((lo, mid));
            let high = ineq((mid, hi));
            let worst = if low.abs_residual > high.abs_residual {
                low
            } else {
                high
            };
            IdentityReport {
                lhs: mid.value,
                rhs: hi.value,
                ..worst
            }
        }
        IdentityId::Bound25 => ineq(finite::bound25(&a)?),
        IdentityId::BoundLemma42 => ineq(finite::bound_lemma42(&a, policy)?),
        IdentityId::BoundProp32 => ineq(finite::bound_prop32(&a, policy)?),
    })
}
