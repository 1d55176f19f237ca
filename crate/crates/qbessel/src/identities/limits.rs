use super::finite::{limit_jacobi_bessel, limit_krawtchouk};
use super::report::{monotone_tail, Args, Form, IdentityId, LimitReport, Params};
use crate::error::{domain, Result};
use crate::qcore::TruncationPolicy;

/// Residuals of a limit transition at each index, in the default form.
pub fn run_limit_check(
    id: IdentityId,
    params: &Params,
    indices: &[i64],
    policy: &TruncationPolicy,
) -> Result<LimitReport> {
    run_limit_check_form(id, Form::Corrected, params, indices, policy)
}

/// As [`run_limit_check`]; `Form::Printed` selects the printed normalizer of
/// the Krawtchouk limit.
///
/// Parameters: `alpha, beta, x, q` (Jacobi to Bessel, `x` the function
/// argument) or `z, N, t, x, q` (Krawtchouk to big q-Bessel, `x` the lattice
/// exponent).
pub fn run_limit_check_form(
    id: IdentityId,
    form: Form,
    params: &Params,
    indices: &[i64],
    policy: &TruncationPolicy,
) -> Result<LimitReport> {
    if indices.is_empty() {
        return Err(domain("at least one index is required"));
    }
    if indices.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("indices must be strictly increasing"));
    }
    let args = Args::new(params);
    let mut residuals = Vec::with_capacity(indices.len());
    let mut target = None;
    for &n in indices {
        let (approx, limit) = match id {
            IdentityId::LimitJacobiBessel => {
                let n = u32::try_from(n).map_err(|_| domain(format!("index must be >= 0, got {n}")))?;
                limit_jacobi_bessel(&args, n, policy)?
            }
            IdentityId::LimitKrawtchoukBigBessel => limit_krawtchouk(&args, n, form == Form::Printed, policy)?,
            _ => return Err(domain(format!("{id} is not a limit transition"))),
        };
        residuals.push((approx.value - limit.value).norm());
        target = Some(limit.value);
    }
    Ok(LimitReport {
        id,
        form,
        index_values: indices.to_vec(),
        monotone_tail: monotone_tail(&residuals),
        residuals,
        target: target.expect("nonempty indices"),
    })
}
