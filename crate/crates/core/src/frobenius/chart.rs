use num_traits::Zero;

use super::EulerData;
use crate::symring::{Expr, Matrix};

/// Flat coordinates expressed in the working variables `v`, with the partial
/// derivatives they induce. The identity chart has `coords[k] = v^k`.
#[derive(Clone, Debug)]
pub struct Chart {
    pub coords: Vec<Expr>,
    /// `inv_jac[l][k] = dv^l / d(coords^k)`; `None` for the identity chart.
    pub inv_jac: Option<Matrix>,
}

impl Chart {
    pub fn identity(n: usize) -> Self {
        Chart {
            coords: (0..n).map(Expr::coord).collect(),
            inv_jac: None,
        }
    }

    pub fn new(coords: Vec<Expr>, inv_jac: Matrix) -> Self {
        Chart {
            coords,
            inv_jac: Some(inv_jac),
        }
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    /// Partial derivative along the k-th chart coordinate.
    pub fn d(&self, e: &Expr, k: usize) -> Expr {
        match &self.inv_jac {
            None => e.diff(k),
            Some(j) => {
                let mut out = Expr::zero();
                for l in 0..self.n() {
                    let f = j.get(l, k);
                    if !f.is_zero() {
                        let de = e.diff(l);
                        if !de.is_zero() {
                            out += &(f * &de);
                        }
                    }
                }
                out
            }
        }
    }

    pub fn gradient(&self, e: &Expr) -> Vec<Expr> {
        (0..self.n()).map(|k| self.d(e, k)).collect()
    }

    /// Euler field of `data` written in this chart.
    pub fn euler(&self, data: &EulerData, e: &Expr) -> Expr {
        let mut out = Expr::zero();
        for a in 0..self.n() {
            let comp = &self.coords[a].scale(&data.degree(a)) + &Expr::constant(data.r[a].clone());
            if !comp.is_zero() {
                let de = self.d(e, a);
                if !de.is_zero() {
                    out += &(&comp * &de);
                }
            }
        }
        out
    }

    /// `eta_ab x^b` in chart coordinates.
    pub fn lowered(&self, data: &EulerData, a: usize) -> Expr {
        let mut out = Expr::zero();
        for b in 0..self.n() {
            if !data.eta[a][b].is_zero() {
                out += &self.coords[b].scale(&data.eta[a][b]);
            }
        }
        out
    }
}
