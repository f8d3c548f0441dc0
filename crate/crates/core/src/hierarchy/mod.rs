//! Principal hierarchy: deformed flat coordinates, R-matrices, two-point
//! functions and flow right-hand sides.

pub mod checks;
mod dump;
mod flows;
pub mod numeric;
mod omega;

use num_traits::Zero;

use crate::frobenius::{FrobeniusData, QMatrix, StructureTensor};
use crate::symring::{fmt_q, integrate_gradient, Expr, SymError, Q};

pub use dump::{dump_flows, dump_omega, dump_r, dump_theta};
pub use flows::{flow_commutator, flows, FlowTable};
pub use omega::{build_omega, check_tau_symmetry, OmegaTable};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HierError {
    #[error("gradient of theta[{alpha},{p}] component {beta} is not integrable: {source}")]
    NotIntegrable {
        alpha: usize,
        p: usize,
        beta: usize,
        source: SymError,
    },
    #[error(
        "homogeneity defect of theta[{alpha},{p}] component {beta} is not constant: {residual}"
    )]
    Inconsistent {
        alpha: usize,
        p: usize,
        beta: usize,
        residual: String,
    },
    #[error("order {requested} exceeds the built order {built}")]
    OrderExceeded { requested: usize, built: usize },
    #[error("Omega recurrence inconsistent at {at}: {residual}")]
    Recurrence { at: String, residual: String },
    #[error(transparent)]
    Sym(#[from] SymError),
}

/// `theta[p][a] = theta_{a,p}` for `p <= order`, the gradients one order
/// further, and the R-matrices found on the way.
#[derive(Clone, Debug)]
pub struct ThetaTable {
    pub order: usize,
    pub n: usize,
    pub theta: Vec<Vec<Expr>>,
    /// `grad[p][a][b] = d theta_{a,p} / d v^b` for `p <= order + 1`.
    pub grad: Vec<Vec<Vec<Expr>>>,
    /// `r[k-1][e][a] = (R_k)^e_a` for `k = 1..=order+1`.
    pub r: Vec<QMatrix>,
    /// Integration constants left free by homogeneity and set to zero.
    pub normalization_choices: Vec<String>,
}

impl ThetaTable {
    pub fn theta(&self, a: usize, p: usize) -> &Expr {
        &self.theta[p][a]
    }

    /// `theta` as an optional grid for the generic checks.
    pub fn grid(&self) -> Vec<Vec<Option<Expr>>> {
        self.theta
            .iter()
            .map(|row| row.iter().cloned().map(Some).collect())
            .collect()
    }

    /// `R_k`, zero when `k` is out of range or nonpositive.
    pub fn r_matrix(&self, k: i64) -> QMatrix {
        if k >= 1 && (k as usize) <= self.r.len() {
            self.r[k as usize - 1].clone()
        } else {
            vec![vec![Q::zero(); self.n]; self.n]
        }
    }

    /// Number of nonzero R-matrices from the top (the `m` of `R_1..R_m`).
    pub fn r_count(&self) -> usize {
        self.r
            .iter()
            .rposition(|m| m.iter().flatten().any(|x| !x.is_zero()))
            .map_or(0, |i| i + 1)
    }
}

/// Builds `theta_{a,p}` for `p <= order`.
///
/// Gradients are integrated order by order from `d_g xi_b = c^l_{bg} xi'_l`;
/// their constants and `R_p` follow from the homogeneity condition, and
/// `theta_{a,p}` is the unity component of the next gradient.
pub fn build_theta(m: &FrobeniusData, order: usize) -> Result<ThetaTable, HierError> {
    let st = m.structure_tensor();
    build_theta_with(m, &st, order)
}

pub fn build_theta_with(
    m: &FrobeniusData,
    st: &StructureTensor,
    order: usize,
) -> Result<ThetaTable, HierError> {
    let e = &m.euler;
    let n = e.n;
    let top = order + 1;
    let mut grad: Vec<Vec<Vec<Expr>>> = Vec::with_capacity(top + 1);
    grad.push(
        (0..n)
            .map(|a| (0..n).map(|b| e.eta_expr(a, b)).collect())
            .collect(),
    );
    let mut r: Vec<QMatrix> = Vec::new();
    let mut choices = Vec::new();

    for p in 1..=top {
        let pq = Q::from_integer((p as i64).into());
        let mut rp = vec![vec![Q::zero(); n]; n];
        let mut level = Vec::with_capacity(n);
        for a in 0..n {
            let prev = &grad[p - 1][a];
            let mut xi0 = Vec::with_capacity(n);
            for b in 0..n {
                let omega: Vec<Expr> = (0..n)
                    .map(|g| {
                        let mut s = Expr::zero();
                        for l in 0..n {
                            let c = &st.c_mixed[l][b][g];
                            if !c.is_zero() && !prev[l].is_zero() {
                                s += &(c * &prev[l]);
                            }
                        }
                        s
                    })
                    .collect();
                let x = integrate_gradient(&omega).map_err(|source| HierError::NotIntegrable {
                    alpha: a + 1,
                    p,
                    beta: b + 1,
                    source,
                })?;
                xi0.push(x);
            }
            let mut xi = Vec::with_capacity(n);
            for b in 0..n {
                let s = &pq + &e.mu[a] + &e.mu[b];
                let mut phi = &e.euler_apply(&xi0[b]) - &xi0[b].scale(&s);
                for k in 1..p {
                    for (eps, row) in r[k - 1].iter().enumerate() {
                        if !row[a].is_zero() {
                            phi -= &grad[p - k][eps][b].scale(&row[a]);
                        }
                    }
                }
                let Some(phi) = phi.as_constant().or_else(|| phi.is_zero().then(Q::zero)) else {
                    return Err(HierError::Inconsistent {
                        alpha: a + 1,
                        p,
                        beta: b + 1,
                        residual: phi.to_string(),
                    });
                };
                if s.is_zero() {
                    // Resonant: the constant is free and the defect feeds R_p.
                    if !phi.is_zero() {
                        for (eps, row) in rp.iter_mut().enumerate() {
                            let w = &e.eta_inv[eps][b];
                            if !w.is_zero() {
                                row[a] += w * &phi;
                            }
                        }
                    }
                    choices.push(format!(
                        "d theta[{},{}]/d v{} constant set to 0 (resonant)",
                        a + 1,
                        p,
                        b + 1
                    ));
                    xi.push(xi0[b].clone());
                } else if phi.is_zero() {
                    xi.push(xi0[b].clone());
                } else {
                    xi.push(&xi0[b] + &Expr::constant(phi / s));
                }
            }
            level.push(xi);
        }
        grad.push(level);
        r.push(rp);
    }

    let u = e.unity;
    let theta: Vec<Vec<Expr>> = (0..=order)
        .map(|p| (0..n).map(|a| grad[p + 1][a][u].clone()).collect())
        .collect();
    Ok(ThetaTable {
        order,
        n,
        theta,
        grad,
        r,
        normalization_choices: choices,
    })
}

/// Printed `(R_k)^e_a = x` entries that are nonzero.
pub fn r_entries(t: &ThetaTable) -> Vec<(usize, usize, usize, Q)> {
    let mut out = Vec::new();
    for (k, m) in t.r.iter().enumerate() {
        for (eps, row) in m.iter().enumerate() {
            for (a, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    out.push((k + 1, eps + 1, a + 1, x.clone()));
                }
            }
        }
    }
    out
}

pub fn format_r_entry(k: usize, eps: usize, a: usize, x: &Q) -> String {
    format!("(R{k})^{eps}_{a} = {}", fmt_q(x))
}
