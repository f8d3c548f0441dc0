use std::collections::BTreeMap;

use num_traits::Zero;

use super::{delta, rho, Kind, SymmetryError, SymmetryMap};
use crate::frobenius::{sign, QMatrix};
use crate::hierarchy::{OmegaTable, ThetaTable};
use crate::symring::{integrate_gradient, Expr, Q};

/// Hierarchy data of the hatted manifold, as functions of `v`.
#[derive(Clone, Debug)]
pub struct HattedTables {
    /// `theta[p][a]` for `p <= order`.
    pub order: usize,
    pub theta: Vec<Vec<Expr>>,
    /// `r[k-1] = Rhat_k`.
    pub r: Vec<QMatrix>,
    /// Entries with `p + q <= omega_order`.
    pub omega_order: usize,
    pub omega: BTreeMap<(usize, usize, usize, usize), Expr>,
    pub normalization_choices: Vec<String>,
}

impl HattedTables {
    pub fn grid(&self) -> Vec<Vec<Option<Expr>>> {
        self.theta
            .iter()
            .map(|row| row.iter().cloned().map(Some).collect())
            .collect()
    }

    pub fn r_matrix(&self, k: i64) -> QMatrix {
        let n = self.theta[0].len();
        if k >= 1 && (k as usize) <= self.r.len() {
            self.r[k as usize - 1].clone()
        } else {
            vec![vec![Q::zero(); n]; n]
        }
    }

    pub fn omega(&self, a: usize, p: usize, b: usize, q: usize) -> Option<&Expr> {
        self.omega.get(&(a, p, b, q))
    }
}

/// Hatted spectrum of the type-2 symmetry.
pub fn hatted_mu(mu: &[Q]) -> Vec<Q> {
    let n = mu.len();
    (0..n)
        .map(|a| &mu[rho(n, a)] - Q::from_integer(delta(n, a).into()))
        .collect()
}

/// `(Rhat_k)^a_b = (-1)^{k + [a=n] + [b=n]} (R_{k+delta(a)-delta(b)})^{rho(a)}_{rho(b)}`
/// with `R_l = 0` for `l <= 0`.
pub fn hatted_r(n: usize, r: &dyn Fn(i64) -> QMatrix, k: i64) -> QMatrix {
    let mut out = vec![vec![Q::zero(); n]; n];
    for (a, row) in out.iter_mut().enumerate() {
        for (b, x) in row.iter_mut().enumerate() {
            let l = k + delta(n, a) - delta(n, b);
            if l <= 0 {
                continue;
            }
            let v = &r(l)[rho(n, a)][rho(n, b)];
            if v.is_zero() {
                continue;
            }
            let e = k + i64::from(a == n - 1) + i64::from(b == n - 1);
            *x = v * sign(e);
        }
    }
    out
}

pub fn hatted_tables(
    s: &SymmetryMap,
    t: &ThetaTable,
    o: &OmegaTable,
) -> Result<HattedTables, SymmetryError> {
    match s.kind {
        Kind::Type1(kappa) => type1_tables(s, kappa, t, o),
        Kind::Type2 => type2_tables(s, t, o),
    }
}

fn type1_tables(
    s: &SymmetryMap,
    kappa: usize,
    t: &ThetaTable,
    o: &OmegaTable,
) -> Result<HattedTables, SymmetryError> {
    let n = t.n;
    let chart = s.chart();
    let e = &s.target_euler;
    let mut theta = Vec::with_capacity(t.order + 1);
    for p in 0..=t.order {
        let mut row = Vec::with_capacity(n);
        for a in 0..n {
            // d thetahat = sum_b (d_b theta_{a,p}) d vhat^b, pulled back to v.
            let omega: Vec<Expr> = (0..n)
                .map(|k| {
                    let mut acc = Expr::zero();
                    for b in 0..n {
                        let g = &t.grad[p][a][b];
                        let j = s.jac.get(b, k);
                        if !g.is_zero() && !j.is_zero() {
                            acc += &(g * j);
                        }
                    }
                    acc
                })
                .collect();
            let base = integrate_gradient(&omega)?;
            let want = if p == 0 {
                chart.lowered(e, a)
            } else {
                t.grad[p + 1][a][kappa].clone()
            };
            let k = &want - &base;
            if k.as_constant().is_none() && !k.is_zero() {
                return Err(SymmetryError::Inconsistent {
                    alpha: a + 1,
                    p,
                    residual: k.to_string(),
                });
            }
            row.push(&base + &k);
        }
        theta.push(row);
    }
    let omega = o
        .entries()
        .map(|(a, p, b, q, x)| ((a, p, b, q), x.clone()))
        .collect();
    Ok(HattedTables {
        order: t.order,
        theta,
        r: t.r.clone(),
        omega_order: o.order,
        omega,
        normalization_choices: t.normalization_choices.clone(),
    })
}

fn type2_tables(
    s: &SymmetryMap,
    t: &ThetaTable,
    o: &OmegaTable,
) -> Result<HattedTables, SymmetryError> {
    let n = t.n;
    if t.order < 2 {
        return Err(SymmetryError::OrderTooSmall {
            have: t.order,
            need: 2,
        });
    }
    let order = t.order - 1;
    let inv_vn = s.vhat[n - 1].clone();
    // theta_{n,-1} = 1 so that thetahat_{1,0} = 1 / v^n fits the general rule.
    let th = |a: usize, p: i64| -> Expr {
        if p < 0 {
            if a == n - 1 {
                Expr::one()
            } else {
                Expr::zero()
            }
        } else {
            t.theta(a, p as usize).clone()
        }
    };
    let sg = |k: i64| Expr::constant(sign(k));
    let theta: Vec<Vec<Expr>> = (0..=order)
        .map(|p| {
            (0..n)
                .map(|a| {
                    let pp = p as i64 - delta(n, a);
                    let e = p as i64 + i64::from(a == n - 1);
                    &(&sg(e) * &th(rho(n, a), pp)) * &inv_vn
                })
                .collect()
        })
        .collect();
    let r_src = |k: i64| t.r_matrix(k);
    let r = (1..=t.r.len() as i64)
        .map(|k| hatted_r(n, &r_src, k))
        .collect();

    let omega_order = t.order - 2;
    let om = |a: usize, p: i64, b: usize, q: i64| -> Expr {
        if p < 0 || q < 0 {
            Expr::zero()
        } else {
            o.get(a, p as usize, b, q as usize)
                .expect("within the source table")
                .clone()
        }
    };
    let mut omega = BTreeMap::new();
    for a in 0..n {
        for b in 0..n {
            for p in 0..=omega_order {
                for q in 0..=omega_order - p {
                    let (ra, rb) = (rho(n, a), rho(n, b));
                    let (pa, qb) = (p as i64 - delta(n, a), q as i64 - delta(n, b));
                    let e = (p + q + 1) as i64 + i64::from(a == n - 1) + i64::from(b == n - 1);
                    let inner = &om(ra, pa, rb, qb) - &(&(&inv_vn * &th(ra, pa)) * &th(rb, qb));
                    omega.insert((a, p, b, q), &sg(e) * &inner);
                }
            }
        }
    }
    Ok(HattedTables {
        order,
        theta,
        r,
        omega_order,
        omega,
        normalization_choices: t.normalization_choices.clone(),
    })
}
