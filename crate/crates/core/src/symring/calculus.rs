use super::{Expr, SymError};

/// Potential `phi` with `d phi / d v^k = omega[k]` for a closed 1-form, with
/// zero additive constant at the integration base. Every component is checked.
pub fn integrate_gradient(omega: &[Expr]) -> Result<Expr, SymError> {
    let mut phi = Expr::zero();
    for (k, w) in omega.iter().enumerate() {
        let remainder = w - &phi.diff(k);
        if remainder.is_zero() {
            continue;
        }
        phi += &remainder.antiderivative(k)?;
    }
    for (k, w) in omega.iter().enumerate() {
        let r = w - &phi.diff(k);
        if !r.is_zero() {
            return Err(SymError::NotClosed(format!(
                "component {} leaves {}",
                k + 1,
                r
            )));
        }
    }
    Ok(phi)
}
