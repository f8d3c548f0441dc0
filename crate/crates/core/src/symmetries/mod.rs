//! Type-1 and type-2 symmetries of the WDVV equations, acting on Frobenius
//! data, on the principal hierarchy and on its time variables.
//!
//! Hatted objects are stored as functions of the source coordinates `v`;
//! closed forms in the hatted coordinates are produced only when the
//! coordinate change can be inverted inside the expression ring.

mod hatted;
pub mod identities;

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::frobenius::{Chart, EulerData, FrobError, FrobeniusData, StructureTensor};
use crate::symring::{integrate_gradient, Expr, Matrix, SymError, Q};

pub use hatted::{hatted_mu, hatted_r, hatted_tables, HattedTables};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymmetryError {
    #[error("kappa = {0} is out of range")]
    BadIndex(usize),
    #[error("c^a_(b,kappa) is singular: the type-1 symmetry at kappa = {0} is not defined")]
    SingularType1(usize),
    #[error("type-2 symmetry does not apply: {}", .0.join("; "))]
    Ineligible(Vec<String>),
    #[error("quasi-homogeneity residue of the source is unavailable")]
    NoResidue,
    #[error("hierarchy order {have} is too small, need at least {need}")]
    OrderTooSmall { have: usize, need: usize },
    #[error("hatted theta[{alpha},{p}] is inconsistent: {residual}")]
    Inconsistent {
        alpha: usize,
        p: usize,
        residual: String,
    },
    #[error(transparent)]
    Frob(#[from] FrobError),
    #[error(transparent)]
    Sym(#[from] SymError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// 0-based `kappa`.
    Type1(usize),
    Type2,
}

/// Image of a hatted time `t^^{a,p}` in the source variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeImage {
    /// `sign * t^{index,order}`.
    Time {
        sign: i8,
        index: usize,
        order: usize,
    },
    /// The source spatial variable `x`.
    Space,
    /// The hatted spatial variable, fixed by the reciprocal transformation.
    HatSpace,
}

#[derive(Clone, Debug)]
pub struct SymmetryMap {
    pub kind: Kind,
    pub source: FrobeniusData,
    /// `vhat[a]` as a function of `v`.
    pub vhat: Vec<Expr>,
    /// `jac[a][b] = d vhat^a / d v^b`.
    pub jac: Matrix,
    /// `jac_inv[a][b] = d v^a / d vhat^b`.
    pub jac_inv: Matrix,
    /// `d^2 Fhat / d vhat^a d vhat^b` as functions of `v`.
    pub fhat_hessian: Matrix,
    /// `Fhat(v)` itself when it has a parametric expression (type-2).
    pub fhat_param: Option<Expr>,
    /// `v^k` as functions of the hatted coordinates, when expressible.
    pub inverse: Option<Vec<Expr>>,
    /// `Fhat` in hatted coordinates, up to quadratic terms, when expressible.
    pub fhat_closed: Option<Expr>,
    pub target_euler: EulerData,
    /// Hatted Frobenius data when `fhat_closed` exists.
    pub target: Option<FrobeniusData>,
}

fn jacobian(vhat: &[Expr]) -> Matrix {
    let n = vhat.len();
    Matrix::from_fn(n, n, |a, b| vhat[a].diff(b))
}

/// Solves `w^a = vhat^a(v)` for `v` when every component is a single-variable
/// affine function or `exp(v^k)`.
fn invert_simple(vhat: &[Expr]) -> Option<Vec<Expr>> {
    let n = vhat.len();
    let mut out: Vec<Option<Expr>> = vec![None; n];
    for (a, e) in vhat.iter().enumerate() {
        let cs = e.coords();
        if cs.len() != 1 {
            return None;
        }
        let k = *cs.iter().next().unwrap();
        if out[k].is_some() {
            return None;
        }
        let w = Expr::coord(a);
        if *e == Expr::exp_of(k) {
            out[k] = Some(Expr::log_of(a));
            continue;
        }
        let slope = e.diff(k).as_constant()?;
        if slope.is_zero() {
            return None;
        }
        let rest = (e - &Expr::coord(k).scale(&slope)).as_constant()?;
        out[k] = Some((&w - &Expr::constant(rest)).scale(&slope.recip()));
    }
    out.into_iter().collect()
}

fn substitute_all(e: &Expr, images: &[Expr]) -> Result<Expr, SymError> {
    let map: BTreeMap<usize, Expr> = images.iter().cloned().enumerate().collect();
    e.substitute(&map)
}

/// Integrates a symmetric Hessian twice with zero constants.
fn potential_from_hessian(h: &[Vec<Expr>]) -> Result<Expr, SymError> {
    let first: Vec<Expr> = h
        .iter()
        .map(|row| integrate_gradient(row))
        .collect::<Result<_, _>>()?;
    integrate_gradient(&first)
}

impl SymmetryMap {
    pub fn n(&self) -> usize {
        self.vhat.len()
    }

    /// Partial derivatives along the hatted coordinates, acting on functions of `v`.
    pub fn chart(&self) -> Chart {
        Chart::new(self.vhat.clone(), self.jac_inv.clone())
    }

    /// `chat_{abc}` as functions of `v`, from third hatted derivatives of `Fhat`.
    pub fn hatted_structure(&self) -> StructureTensor {
        let n = self.n();
        let chart = self.chart();
        let mut c = vec![vec![vec![Expr::zero(); n]; n]; n];
        for a in 0..n {
            for b in a..n {
                for g in b..n {
                    let e = chart.d(self.fhat_hessian.get(a, b), g);
                    for (i, j, k) in [
                        (a, b, g),
                        (a, g, b),
                        (b, a, g),
                        (b, g, a),
                        (g, a, b),
                        (g, b, a),
                    ] {
                        c[i][j][k] = e.clone();
                    }
                }
            }
        }
        StructureTensor::from_lower(c, &self.target_euler.eta_inv)
    }

    /// Index of the hatted unity coordinate.
    pub fn hatted_unity(&self) -> usize {
        self.target_euler.unity
    }

    /// Relabeling of hatted times.
    pub fn time_image(&self, a: usize, p: usize) -> TimeImage {
        let n = self.n();
        match self.kind {
            Kind::Type1(_) => {
                if a == 0 && p == 0 {
                    TimeImage::Space
                } else {
                    TimeImage::Time {
                        sign: 1,
                        index: a,
                        order: p,
                    }
                }
            }
            Kind::Type2 => {
                let sgn = |k: usize| if k.is_multiple_of(2) { 1 } else { -1 };
                if a == 0 {
                    if p == 0 {
                        TimeImage::HatSpace
                    } else {
                        TimeImage::Time {
                            sign: sgn(p),
                            index: n - 1,
                            order: p - 1,
                        }
                    }
                } else if a == n - 1 {
                    TimeImage::Time {
                        sign: sgn(p + 1),
                        index: 0,
                        order: p + 1,
                    }
                } else {
                    TimeImage::Time {
                        sign: sgn(p),
                        index: a,
                        order: p,
                    }
                }
            }
        }
    }
}

/// `vhat^a = eta^{ag} d_g d_kappa F`.
pub fn apply_type1(m: &FrobeniusData, kappa: usize) -> Result<SymmetryMap, SymmetryError> {
    let e = &m.euler;
    let n = e.n;
    if kappa >= n {
        return Err(SymmetryError::BadIndex(kappa + 1));
    }
    let h = m.hessian();
    let vhat: Vec<Expr> = (0..n)
        .map(|a| {
            let mut s = Expr::zero();
            for g in 0..n {
                if !e.eta_inv[a][g].is_zero() {
                    s += &h.get(g, kappa).scale(&e.eta_inv[a][g]);
                }
            }
            s
        })
        .collect();
    let jac = jacobian(&vhat);
    let jac_inv = jac
        .inverse()
        .map_err(|_| SymmetryError::SingularType1(kappa + 1))?;
    let res = m.residue.as_ref().ok_or(SymmetryError::NoResidue)?;
    let r_hat: Vec<Q> = (0..n)
        .map(|a| {
            (0..n).fold(Q::zero(), |acc, x| {
                acc + &res.a[kappa][x] * &e.eta_inv[x][a]
            })
        })
        .collect();
    let d_hat = -Q::from_integer(2.into()) * &e.mu[kappa];
    let target_euler = EulerData::new(e.eta.clone(), d_hat, e.mu.clone(), r_hat, kappa)?;

    let inverse = invert_simple(&vhat);
    let fhat_closed = match &inverse {
        Some(inv) => {
            let hw: Result<Vec<Vec<Expr>>, SymError> = (0..n)
                .map(|a| (0..n).map(|b| substitute_all(h.get(a, b), inv)).collect())
                .collect();
            hw.and_then(|hw| potential_from_hessian(&hw)).ok()
        }
        None => None,
    };
    let target = match &fhat_closed {
        Some(f) => Some(FrobeniusData::new(
            format!("{}^type1({})", m.name, kappa + 1),
            f.clone(),
            target_euler.clone(),
        )?),
        None => None,
    };
    Ok(SymmetryMap {
        kind: Kind::Type1(kappa),
        source: m.clone(),
        vhat,
        jac,
        jac_inv,
        fhat_hessian: h,
        fhat_param: None,
        inverse,
        fhat_closed,
        target_euler,
        target,
    })
}

/// Coordinates of the involution `vhat^1 = -eta(v,v)/(2 v^n)`,
/// `vhat^a = v^a / v^n`, `vhat^n = 1 / v^n`, written in the symbols `v`.
pub fn type2_coordinates(e: &EulerData) -> Vec<Expr> {
    let n = e.n;
    let vn = Expr::coord(n - 1);
    let inv_vn = vn.recip().expect("v^n is a nonzero symbol");
    let mut quad = Expr::zero();
    for s in 0..n {
        for g in 0..n {
            if !e.eta[s][g].is_zero() {
                quad += &(&Expr::coord(s) * &Expr::coord(g)).scale(&e.eta[s][g]);
            }
        }
    }
    (0..n)
        .map(|a| {
            if a == 0 {
                (&quad * &inv_vn).scale(&Q::new((-1).into(), 2.into()))
            } else if a == n - 1 {
                inv_vn.clone()
            } else {
                &Expr::coord(a) * &inv_vn
            }
        })
        .collect()
}

/// `(v^n)^-2 (-F + 1/2 eta(v,v) v^1)`.
pub fn type2_potential(m: &FrobeniusData) -> Expr {
    let e = &m.euler;
    let n = e.n;
    let vn = Expr::coord(n - 1);
    let mut quad = Expr::zero();
    for s in 0..n {
        for g in 0..n {
            if !e.eta[s][g].is_zero() {
                quad += &(&Expr::coord(s) * &Expr::coord(g)).scale(&e.eta[s][g]);
            }
        }
    }
    let inner = &(&quad * &Expr::coord(0)).scale(&Q::new(1.into(), 2.into())) - &m.f;
    (&inner / &vn.pow(2).expect("power")).expect("v^n is a nonzero symbol")
}

/// `mu^_1 = mu_n - 1`, `mu^_n = mu_1 + 1`, `d^ = 2 - d`, `r^ = 0`.
pub fn type2_euler(e: &EulerData) -> Result<EulerData, FrobError> {
    let n = e.n;
    let mu_hat = hatted_mu(&e.mu);
    EulerData::new(
        e.eta.clone(),
        Q::from_integer(2.into()) - &e.d,
        mu_hat,
        vec![Q::zero(); n],
        0,
    )
}

pub fn apply_type2(m: &FrobeniusData) -> Result<SymmetryMap, SymmetryError> {
    let elig = m.check_type2_eligibility();
    if !elig.eligible {
        return Err(SymmetryError::Ineligible(elig.reasons));
    }
    let e = &m.euler;
    let n = e.n;
    let vhat = type2_coordinates(e);
    let jac = jacobian(&vhat);
    let jac_inv = jac.inverse()?;
    let fhat = type2_potential(m);
    let chart = Chart::new(vhat.clone(), jac_inv.clone());
    let first: Vec<Expr> = (0..n).map(|a| chart.d(&fhat, a)).collect();
    let fhat_hessian = Matrix::from_fn(n, n, |a, b| chart.d(&first[a], b));
    let target_euler = type2_euler(e)?;
    // The map is an involution, so the same formulas give v in terms of vhat.
    let inverse = vhat.clone();
    let fhat_closed = substitute_all(&fhat, &inverse).ok();
    let target = match &fhat_closed {
        Some(f) => Some(FrobeniusData::new(
            format!("{}^type2", m.name),
            f.clone(),
            target_euler.clone(),
        )?),
        None => None,
    };
    Ok(SymmetryMap {
        kind: Kind::Type2,
        source: m.clone(),
        vhat,
        jac,
        jac_inv,
        fhat_hessian,
        fhat_param: Some(fhat),
        inverse: Some(inverse),
        fhat_closed,
        target_euler,
        target,
    })
}

/// `e` with every `v^k` replaced by `vhat^k(v)`: a function of the hatted
/// coordinates pulled back to `v`.
pub fn pull_back(s: &SymmetryMap, e: &Expr) -> Result<Expr, SymError> {
    substitute_all(e, &s.vhat)
}

/// `e` (a function of `v`) rewritten in the hatted coordinates.
pub fn push_forward(s: &SymmetryMap, e: &Expr) -> Result<Option<Expr>, SymError> {
    match &s.inverse {
        Some(inv) => substitute_all(e, inv).map(Some),
        None => Ok(None),
    }
}

pub(crate) fn delta(n: usize, a: usize) -> i64 {
    match a {
        0 => 1,
        _ if a == n - 1 => -1,
        _ => 0,
    }
}

pub(crate) fn rho(n: usize, a: usize) -> usize {
    match delta(n, a) {
        1 => n - 1,
        -1 => 0,
        _ => a,
    }
}
