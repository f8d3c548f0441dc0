use num_traits::Zero;

use super::{HierError, ThetaTable};
use crate::frobenius::EulerData;
use crate::report::Check;
use crate::symring::Expr;

/// `omega[(a, p, b, q)]` for `p + q <= order`, stored densely.
#[derive(Clone, Debug)]
pub struct OmegaTable {
    pub order: usize,
    pub n: usize,
    data: Vec<Expr>,
}

impl OmegaTable {
    fn index(&self, a: usize, p: usize, b: usize, q: usize) -> usize {
        let s = self.order + 1;
        ((a * s + p) * self.n + b) * s + q
    }

    /// `Omega_{a,p;b,q}`, or `None` outside `p + q <= order`.
    pub fn get(&self, a: usize, p: usize, b: usize, q: usize) -> Option<&Expr> {
        if p + q > self.order || a >= self.n || b >= self.n {
            return None;
        }
        Some(&self.data[self.index(a, p, b, q)])
    }

    /// Entries in deterministic order: `(a, p, b, q, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, usize, &Expr)> {
        let (n, s) = (self.n, self.order);
        (0..n).flat_map(move |a| {
            (0..=s).flat_map(move |p| {
                (0..n).flat_map(move |b| {
                    (0..=s - p).map(move |q| (a, p, b, q, self.get(a, p, b, q).unwrap()))
                })
            })
        })
    }
}

/// `N_{p,q} = grad theta_{a,p} . eta^-1 . grad theta_{b,q} - [p=q=0] eta_ab`.
fn pairing(t: &ThetaTable, e: &EulerData, a: usize, p: usize, b: usize, q: usize) -> Expr {
    let n = t.n;
    let (x, y) = (&t.grad[p][a], &t.grad[q][b]);
    let mut s = Expr::zero();
    for g in 0..n {
        if x[g].is_zero() {
            continue;
        }
        for k in 0..n {
            let w = &e.eta_inv[g][k];
            if !w.is_zero() && !y[k].is_zero() {
                s += &(&x[g] * &y[k]).scale(w);
            }
        }
    }
    if p == 0 && q == 0 {
        s -= &e.eta_expr(a, b);
    }
    s
}

fn sign(j: usize) -> Expr {
    if j.is_multiple_of(2) {
        Expr::one()
    } else {
        -Expr::one()
    }
}

/// Solves `Omega_{p-1,q} + Omega_{p,q-1} = N_{p,q}` by peeling off the first
/// index, and checks each entry against peeling off the second.
pub fn build_omega(t: &ThetaTable, e: &EulerData) -> Result<OmegaTable, HierError> {
    build(t, e)
}

fn build(t: &ThetaTable, e: &EulerData) -> Result<OmegaTable, HierError> {
    let (n, s) = (t.n, t.order);
    let mut table = OmegaTable {
        order: s,
        n,
        data: vec![Expr::zero(); n * n * (s + 1) * (s + 1)],
    };
    let np = |a, p, b, q| pairing(t, e, a, p, b, q);
    for a in 0..n {
        for b in 0..n {
            for p in 0..=s {
                for q in 0..=s - p {
                    let mut first = Expr::zero();
                    for j in 0..=q {
                        first += &(&sign(j) * &np(a, p + 1 + j, b, q - j));
                    }
                    let mut second = Expr::zero();
                    for j in 0..=p {
                        second += &(&sign(j) * &np(a, p - j, b, q + 1 + j));
                    }
                    let diff = &first - &second;
                    if !diff.is_zero() {
                        return Err(HierError::Recurrence {
                            at: format!("({},{};{},{})", a + 1, p, b + 1, q),
                            residual: diff.to_string(),
                        });
                    }
                    let i = table.index(a, p, b, q);
                    table.data[i] = first;
                }
            }
        }
    }
    Ok(table)
}

/// `Omega_{a,p;b,q} = Omega_{b,q;a,p}` over every stored pair. The two sides
/// come from different alternating sums of the pairings.
pub fn check_tau_symmetry(o: &OmegaTable) -> Check {
    for (a, p, b, q, x) in o.entries() {
        let y = o.get(b, q, a, p).expect("same shape");
        let d = x - y;
        if !d.is_zero() {
            return Check::exact(
                "tau_symmetry",
                Some((format!("({},{};{},{})", a + 1, p, b + 1, q), d.to_string())),
            );
        }
    }
    Check::pass("tau_symmetry")
}
