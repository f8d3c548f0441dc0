use num_traits::Zero;

use super::{HierError, ThetaTable};
use crate::frobenius::EulerData;
use crate::symring::{Expr, SymError, Var};

/// `rhs[b][q][a]`: the right side of `d v^a / d t^{b,q}`.
#[derive(Clone, Debug)]
pub struct FlowTable {
    pub n: usize,
    pub max_q: usize,
    pub rhs: Vec<Vec<Vec<Expr>>>,
}

impl FlowTable {
    pub fn flow(&self, b: usize, q: usize) -> Result<&[Expr], HierError> {
        if q > self.max_q {
            return Err(HierError::OrderExceeded {
                requested: q,
                built: self.max_q,
            });
        }
        Ok(&self.rhs[b][q])
    }
}

/// `rhs(a; b, q) = eta^{ag} d_x (d theta_{b,q+1} / d v^g)` for `q <= order`.
pub fn flows(t: &ThetaTable, e: &EulerData) -> Result<FlowTable, HierError> {
    let n = t.n;
    let mut rhs = vec![vec![Vec::with_capacity(n); t.order + 1]; n];
    for (b, per_b) in rhs.iter_mut().enumerate() {
        for (q, per_q) in per_b.iter_mut().enumerate() {
            let grad = &t.grad[q + 1][b];
            let dx: Vec<Expr> = grad
                .iter()
                .map(Expr::total_x)
                .collect::<Result<_, SymError>>()?;
            for a in 0..n {
                let mut s = Expr::zero();
                for (g, d) in dx.iter().enumerate() {
                    let w = &e.eta_inv[a][g];
                    if !w.is_zero() {
                        s += &d.scale(w);
                    }
                }
                per_q.push(s);
            }
        }
    }
    Ok(FlowTable {
        n,
        max_q: t.order,
        rhs,
    })
}

/// Lie bracket of two evolutionary fields whose components depend on `v` and
/// `v_x`: `D_X Y - D_Y X`, with `D_X f = f_v X + f_{v_x} d_x X`.
pub fn flow_commutator(x: &[Expr], y: &[Expr]) -> Result<Vec<Expr>, SymError> {
    let n = x.len();
    let xx: Vec<Expr> = x.iter().map(Expr::total_x).collect::<Result<_, _>>()?;
    let yx: Vec<Expr> = y.iter().map(Expr::total_x).collect::<Result<_, _>>()?;
    let apply = |f: &Expr, dir: &[Expr], dir_x: &[Expr]| -> Expr {
        let mut s = Expr::zero();
        for g in 0..n {
            if !dir[g].is_zero() {
                s += &(&f.diff(g) * &dir[g]);
            }
            let fj = f.diff_symbol(Var::Jet1(g));
            if !fj.is_zero() {
                s += &(&fj * &dir_x[g]);
            }
        }
        s
    };
    Ok((0..n)
        .map(|a| &apply(&y[a], x, &xx) - &apply(&x[a], y, &yx))
        .collect())
}
