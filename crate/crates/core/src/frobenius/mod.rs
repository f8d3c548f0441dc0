//! WDVV solutions with quasi-homogeneity data: axiom checks, structure
//! constants, intersection form and linear coordinate changes.

mod chart;
mod manifest;
pub mod qmat;
mod registry;

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::report::Check;
use crate::symring::{fmt_q, Expr, Matrix, SymError, Var, Q};

pub use chart::Chart;
pub use manifest::{parse_manifest, ManifestError};
pub use qmat::QMatrix;
pub use registry::{bundled, bundled_names, bundled_source};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrobError {
    #[error("manifold file: {0}")]
    Manifest(#[from] ManifestError),
    #[error("{0}")]
    Shape(String),
    #[error("metric is singular")]
    SingularMetric,
    #[error("matrix is singular")]
    Singular,
    #[error("unity direction is not preserved")]
    UnityNotPreserved,
    #[error("change mixes coordinates of different degree")]
    EulerNotDiagonal,
    #[error("intersection form is degenerate")]
    DegenerateIntersectionForm,
    #[error(transparent)]
    Sym(#[from] SymError),
}

/// Constant data of the quasi-homogeneity defect
/// `E(F) - (3-d)F = 1/2 A_ab v^a v^b + B_a v^a + C`.
#[derive(Clone, Debug, PartialEq)]
pub struct Residue {
    pub a: QMatrix,
    pub b: Vec<Q>,
    pub c: Q,
}

impl Residue {
    pub fn zero(n: usize) -> Self {
        Residue {
            a: vec![vec![Q::zero(); n]; n],
            b: vec![Q::zero(); n],
            c: Q::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero()
            && self.b.iter().all(Zero::is_zero)
            && self.a.iter().flatten().all(Zero::is_zero)
    }
}

/// Flat metric and Euler data, shared by source manifolds and hatted targets.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerData {
    pub n: usize,
    pub eta: QMatrix,
    pub eta_inv: QMatrix,
    pub d: Q,
    pub mu: Vec<Q>,
    pub r: Vec<Q>,
    /// 0-based index of the unity coordinate.
    pub unity: usize,
}

impl EulerData {
    pub fn new(eta: QMatrix, d: Q, mu: Vec<Q>, r: Vec<Q>, unity: usize) -> Result<Self, FrobError> {
        let n = eta.len();
        if n == 0 || n > crate::symring::MAX_COORDS {
            return Err(FrobError::Shape(format!(
                "dimension {n} out of range 1..=9"
            )));
        }
        if eta.iter().any(|row| row.len() != n) {
            return Err(FrobError::Shape("eta must be square".into()));
        }
        if mu.len() != n || r.len() != n {
            return Err(FrobError::Shape(format!(
                "mu and r need {n} entries, got {} and {}",
                mu.len(),
                r.len()
            )));
        }
        if unity >= n {
            return Err(FrobError::Shape(format!(
                "unity index {} out of range",
                unity + 1
            )));
        }
        if !qmat::is_symmetric(&eta) {
            return Err(FrobError::Shape("eta must be symmetric".into()));
        }
        let eta_inv = qmat::inverse(&eta).ok_or(FrobError::SingularMetric)?;
        Ok(EulerData {
            n,
            eta,
            eta_inv,
            d,
            mu,
            r,
            unity,
        })
    }

    /// Degree `1 - d/2 - mu_a` of the coordinate `v^a`.
    pub fn degree(&self, a: usize) -> Q {
        Q::one() - &self.d / Q::from_integer(2.into()) - &self.mu[a]
    }

    /// Components `E^a = (1 - d/2 - mu_a) v^a + r_a`.
    pub fn euler_components(&self) -> Vec<Expr> {
        (0..self.n)
            .map(|a| &Expr::coord(a).scale(&self.degree(a)) + &Expr::constant(self.r[a].clone()))
            .collect()
    }

    /// `E(e) = E^a d_a e`.
    pub fn euler_apply(&self, e: &Expr) -> Expr {
        self.euler_with(e, |x, a| x.diff(a))
    }

    /// Euler field acting through a supplied partial-derivative operator,
    /// with components taken in the same coordinates as that operator.
    pub fn euler_with(&self, e: &Expr, deriv: impl Fn(&Expr, usize) -> Expr) -> Expr {
        let comps = self.euler_components();
        let mut out = Expr::zero();
        for (a, ea) in comps.iter().enumerate() {
            if !ea.is_zero() {
                out += &(ea * &deriv(e, a));
            }
        }
        out
    }

    pub fn eta_expr(&self, a: usize, b: usize) -> Expr {
        Expr::constant(self.eta[a][b].clone())
    }

    pub fn eta_inv_expr(&self, a: usize, b: usize) -> Expr {
        Expr::constant(self.eta_inv[a][b].clone())
    }

    /// `eta_ab v^b`.
    pub fn lowered_coord(&self, a: usize) -> Expr {
        let mut out = Expr::zero();
        for b in 0..self.n {
            if !self.eta[a][b].is_zero() {
                out += &Expr::coord(b).scale(&self.eta[a][b]);
            }
        }
        out
    }

    /// `mu_unity = -d/2` and `(mu_a + mu_b) eta_ab = 0`.
    pub fn spectrum_checks(&self) -> Vec<Check> {
        let half_d = &self.d / Q::from_integer(2.into());
        let unity_ok = self.mu[self.unity] == -half_d.clone();
        let unity = if unity_ok {
            Check::pass("mu_unity")
        } else {
            Check::fail(
                "mu_unity",
                format!(
                    "mu_{} = {} but -d/2 = {}",
                    self.unity + 1,
                    fmt_q(&self.mu[self.unity]),
                    fmt_q(&-half_d)
                ),
            )
        };
        let mut anti = None;
        'outer: for a in 0..self.n {
            for b in 0..self.n {
                let v = (&self.mu[a] + &self.mu[b]) * &self.eta[a][b];
                if !v.is_zero() {
                    anti = Some((format!("(a,b) = ({},{})", a + 1, b + 1), fmt_q(&v)));
                    break 'outer;
                }
            }
        }
        vec![unity, Check::exact("mu_antisymmetry", anti)]
    }
}

/// A WDVV potential with its flat metric and Euler data.
#[derive(Clone, Debug)]
pub struct FrobeniusData {
    pub name: String,
    pub f: Expr,
    pub euler: EulerData,
    /// Quasi-homogeneity defect data; `None` when the defect is not quadratic.
    pub residue: Option<Residue>,
    /// Optional genus-one G-functions (source, and target in hatted symbols).
    pub g: Option<Expr>,
    pub ghat: Option<Expr>,
}

/// Third derivatives `c_abc` and mixed `c^a_bc = eta^ad c_dbc`.
#[derive(Clone, Debug)]
pub struct StructureTensor {
    pub n: usize,
    pub c: Vec<Vec<Vec<Expr>>>,
    pub c_mixed: Vec<Vec<Vec<Expr>>>,
}

impl StructureTensor {
    /// `c_abc` for any totally symmetric lowered table.
    pub fn from_lower(c: Vec<Vec<Vec<Expr>>>, eta_inv: &QMatrix) -> Self {
        let n = c.len();
        let c_mixed = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        (0..n)
                            .map(|g| {
                                let mut s = Expr::zero();
                                for d in 0..n {
                                    if !eta_inv[a][d].is_zero() {
                                        s += &c[d][b][g].scale(&eta_inv[a][d]);
                                    }
                                }
                                s
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        StructureTensor { n, c, c_mixed }
    }

    /// The matrix `(c^a_{b k})_{a,b}` of multiplication by the k-th basis vector.
    pub fn multiplication(&self, k: usize) -> Matrix {
        Matrix::from_fn(self.n, self.n, |a, b| self.c_mixed[a][b][k].clone())
    }
}

/// Contravariant intersection form and its contravariant connection symbols.
#[derive(Clone, Debug)]
pub struct IntersectionData {
    pub g_upper: Matrix,
    pub g_lower: Matrix,
    /// `gamma[a][b][c] = Gamma^{ab}_c`.
    pub gamma: Vec<Vec<Vec<Expr>>>,
}

/// Type-2 applicability summary.
#[derive(Clone, Debug, Serialize)]
pub struct Eligibility {
    pub eligible: bool,
    pub reasons: Vec<String>,
}

impl FrobeniusData {
    pub fn new(name: impl Into<String>, f: Expr, euler: EulerData) -> Result<Self, FrobError> {
        let n = euler.n;
        for v in f.vars() {
            if v.is_jet() {
                return Err(FrobError::Shape(format!(
                    "potential contains jet symbol {v}"
                )));
            }
            if v.coord() >= n {
                return Err(FrobError::Shape(format!("potential uses {v} but n = {n}")));
            }
        }
        let residue = quasi_residue(&f, &euler).ok();
        Ok(FrobeniusData {
            name: name.into(),
            f,
            euler,
            residue,
            g: None,
            ghat: None,
        })
    }

    pub fn n(&self) -> usize {
        self.euler.n
    }

    pub fn structure_tensor(&self) -> StructureTensor {
        let n = self.n();
        let first: Vec<Expr> = (0..n).map(|a| self.f.diff(a)).collect();
        let mut second = vec![vec![Expr::zero(); n]; n];
        for a in 0..n {
            for b in a..n {
                let e = first[a].diff(b);
                second[a][b] = e.clone();
                second[b][a] = e;
            }
        }
        let mut c = vec![vec![vec![Expr::zero(); n]; n]; n];
        for a in 0..n {
            for b in a..n {
                for g in b..n {
                    let e = second[a][b].diff(g);
                    for (i, j, k) in perms(a, b, g) {
                        c[i][j][k] = e.clone();
                    }
                }
            }
        }
        StructureTensor::from_lower(c, &self.euler.eta_inv)
    }

    /// Hessian `d_a d_b F`.
    pub fn hessian(&self) -> Matrix {
        let n = self.n();
        let first: Vec<Expr> = (0..n).map(|a| self.f.diff(a)).collect();
        Matrix::from_fn(n, n, |a, b| first[a].diff(b))
    }

    /// Metric constancy and associativity, with the first failing tuple.
    pub fn check_wdvv(&self) -> Vec<Check> {
        let st = self.structure_tensor();
        vec![eta_check(&st, &self.euler), associativity_check(&st)]
    }

    pub fn check_quasihomogeneity(&self) -> Check {
        match quasi_residue(&self.f, &self.euler) {
            Ok(res) => Check::pass("quasihomogeneity").with_detail(format_residue(&res)),
            Err(defect) => Check {
                residual: Some(defect.to_string()),
                ..Check::fail(
                    "quasihomogeneity",
                    "E(F) - (3-d)F is not a polynomial of degree at most 2",
                )
            },
        }
    }

    /// Every axiom check in order: metric, associativity, unity spectrum,
    /// antisymmetry and quasi-homogeneity.
    pub fn check_all(&self) -> Vec<Check> {
        let mut out = self.check_wdvv();
        out.extend(self.euler.spectrum_checks());
        out.push(self.check_quasihomogeneity());
        out
    }

    pub fn intersection_form(&self) -> Result<IntersectionData, FrobError> {
        let st = self.structure_tensor();
        let g_upper = intersection_upper(&st, &self.euler.euler_components(), &self.euler.eta_inv);
        contravariant_connection(g_upper, |e, k| e.diff(k))
    }

    pub fn check_type2_eligibility(&self) -> Eligibility {
        let e = &self.euler;
        let n = e.n;
        let mut reasons = Vec::new();
        if n < 2 {
            reasons.push("n < 2".to_string());
        }
        if e.unity != 0 {
            reasons.push(format!("unity is v{}, not v1", e.unity + 1));
        }
        let antidiag = (0..n).all(|a| {
            (0..n).all(|b| {
                let want = if a + b + 1 == n { Q::one() } else { Q::zero() };
                e.eta[a][b] == want
            })
        });
        if !antidiag {
            reasons.push("eta is not antidiagonal with unit entries".to_string());
        }
        for a in 0..n {
            if !e.r[a].is_zero() {
                reasons.push(format!("r_{} = {} != 0", a + 1, fmt_q(&e.r[a])));
            }
        }
        if e.d == Q::from_integer(2.into()) {
            match &self.residue {
                Some(res) if !res.b[0].is_zero() => {
                    reasons.push(format!("d = 2 with B_1 = {} != 0", fmt_q(&res.b[0])))
                }
                None => reasons.push("quasi-homogeneity residue unavailable".to_string()),
                _ => {}
            }
        }
        Eligibility {
            eligible: reasons.is_empty(),
            reasons,
        }
    }

    /// New flat coordinates `w = L v`.
    pub fn linear_change(&self, l: &QMatrix) -> Result<FrobeniusData, FrobError> {
        let e = &self.euler;
        let n = e.n;
        if l.len() != n || l.iter().any(|row| row.len() != n) {
            return Err(FrobError::Shape(format!("L must be {n}x{n}")));
        }
        let linv = qmat::inverse(l).ok_or(FrobError::Singular)?;
        let u = e.unity;
        let s = l[u][u].clone();
        if s.is_zero() || (0..n).any(|j| j != u && !l[j][u].is_zero()) {
            return Err(FrobError::UnityNotPreserved);
        }
        for j in 0..n {
            for k in 0..n {
                if !l[j][k].is_zero() && e.mu[j] != e.mu[k] {
                    return Err(FrobError::EulerNotDiagonal);
                }
            }
        }
        let mut map = BTreeMap::new();
        for k in 0..n {
            let mut img = Expr::zero();
            for j in 0..n {
                if !linv[k][j].is_zero() {
                    img += &Expr::coord(j).scale(&linv[k][j]);
                }
            }
            map.insert(k, img);
        }
        let f = self.f.substitute(&map)?;
        let mut eta = qmat::mul(&qmat::mul(&qmat::transpose(&linv), &e.eta), &linv);
        if !s.is_one() {
            let inv = s.recip();
            for row in eta.iter_mut() {
                for x in row.iter_mut() {
                    *x = &*x * &inv;
                }
            }
        }
        let r: Vec<Q> = (0..n)
            .map(|j| (0..n).fold(Q::zero(), |acc, k| acc + &l[j][k] * &e.r[k]))
            .collect();
        let euler = EulerData::new(eta, e.d.clone(), e.mu.clone(), r, u)?;
        let mut out = FrobeniusData::new(self.name.clone(), f, euler)?;
        out.g = self.g.as_ref().map(|g| g.substitute(&map)).transpose()?;
        Ok(out)
    }
}

fn perms(a: usize, b: usize, c: usize) -> [(usize, usize, usize); 6] {
    [
        (a, b, c),
        (a, c, b),
        (b, a, c),
        (b, c, a),
        (c, a, b),
        (c, b, a),
    ]
}

fn eta_check(st: &StructureTensor, e: &EulerData) -> Check {
    let u = e.unity;
    for a in 0..st.n {
        for b in 0..st.n {
            let diff = &st.c[u][a][b] - &e.eta_expr(a, b);
            if !diff.is_zero() {
                return Check::exact(
                    "eta_constant",
                    Some((
                        format!(
                            "eta_{}{} = d^3F/dv{}dv{}dv{} = {}",
                            a + 1,
                            b + 1,
                            u + 1,
                            a + 1,
                            b + 1,
                            st.c[u][a][b]
                        ),
                        diff.to_string(),
                    )),
                );
            }
        }
    }
    Check::pass("eta_constant")
}

fn associativity_check(st: &StructureTensor) -> Check {
    let n = st.n;
    let cm = &st.c_mixed;
    for a in 0..n {
        for b in 0..n {
            for g in 0..n {
                for nu in 0..n {
                    let mut res = Expr::zero();
                    for l in 0..n {
                        res += &(&cm[l][a][b] * &cm[nu][l][g]);
                        res -= &(&cm[l][g][b] * &cm[nu][l][a]);
                    }
                    if !res.is_zero() {
                        return Check::exact(
                            "associativity",
                            Some((
                                format!("(a,b,c,d) = ({},{},{},{})", a + 1, b + 1, g + 1, nu + 1),
                                res.to_string(),
                            )),
                        );
                    }
                }
            }
        }
    }
    Check::pass("associativity")
}

/// Extracts `(A, B, C)` or returns the non-quadratic defect.
pub fn quasi_residue(f: &Expr, e: &EulerData) -> Result<Residue, Expr> {
    let three_minus_d = Q::from_integer(3.into()) - &e.d;
    let defect = &e.euler_apply(f) - &f.scale(&three_minus_d);
    if !defect.is_polynomial()
        || defect.has_generators()
        || defect.has_jets()
        || defect.numer().total_degree() > 2
    {
        return Err(defect);
    }
    let n = e.n;
    let mut res = Residue::zero(n);
    for (m, c) in defect.numer().terms() {
        let f: Vec<(Var, u32)> = m.factors().collect();
        match f.as_slice() {
            [] => res.c = c.clone(),
            [(Var::Coord(a), 1)] => res.b[*a] = c.clone(),
            [(Var::Coord(a), 2)] => res.a[*a][*a] = c * Q::from_integer(2.into()),
            [(Var::Coord(a), 1), (Var::Coord(b), 1)] => {
                res.a[*a][*b] = c.clone();
                res.a[*b][*a] = c.clone();
            }
            _ => return Err(defect.clone()),
        }
    }
    Ok(res)
}

pub fn format_residue(r: &Residue) -> String {
    let mut parts = Vec::new();
    for (a, row) in r.a.iter().enumerate() {
        for (b, x) in row.iter().enumerate() {
            if b >= a && !x.is_zero() {
                parts.push(format!("A_{}{} = {}", a + 1, b + 1, fmt_q(x)));
            }
        }
    }
    for (a, x) in r.b.iter().enumerate() {
        if !x.is_zero() {
            parts.push(format!("B_{} = {}", a + 1, fmt_q(x)));
        }
    }
    if !r.c.is_zero() {
        parts.push(format!("C = {}", fmt_q(&r.c)));
    }
    if parts.is_empty() {
        "A = B = C = 0".to_string()
    } else {
        parts.join(", ")
    }
}

/// `g^ab = E^c c^ab_c` with `c^ab_c = eta^ad c^b_dc`.
pub fn intersection_upper(st: &StructureTensor, euler: &[Expr], eta_inv: &QMatrix) -> Matrix {
    let n = st.n;
    Matrix::from_fn(n, n, |a, b| {
        let mut s = Expr::zero();
        for g in 0..n {
            if euler[g].is_zero() {
                continue;
            }
            let mut cab = Expr::zero();
            for d in 0..n {
                if !eta_inv[a][d].is_zero() {
                    cab += &st.c_mixed[b][d][g].scale(&eta_inv[a][d]);
                }
            }
            s += &(&euler[g] * &cab);
        }
        s
    })
}

/// `Gamma^{ab}_c = -g^{ax} Gamma^b_{xc}` with the Levi-Civita symbols of
/// `g_ab = (g^ab)^-1`, using `deriv(e, k)` as the k-th partial derivative.
pub fn contravariant_connection(
    g_upper: Matrix,
    deriv: impl Fn(&Expr, usize) -> Expr,
) -> Result<IntersectionData, FrobError> {
    let n = g_upper.rows();
    let g_lower = g_upper
        .inverse()
        .map_err(|_| FrobError::DegenerateIntersectionForm)?;
    // dg[k][a][b] = d_k g_ab
    let dg: Vec<Vec<Vec<Expr>>> = (0..n)
        .map(|k| {
            (0..n)
                .map(|a| (0..n).map(|b| deriv(g_lower.get(a, b), k)).collect())
                .collect()
        })
        .collect();
    let half = Q::new(1.into(), 2.into());
    // lc[b][x][c] = Gamma^b_{xc}
    let lc: Vec<Vec<Vec<Expr>>> = (0..n)
        .map(|b| {
            (0..n)
                .map(|x| {
                    (0..n)
                        .map(|c| {
                            let mut s = Expr::zero();
                            for l in 0..n {
                                let t = &(&dg[x][l][c] + &dg[c][l][x]) - &dg[l][x][c];
                                if !t.is_zero() {
                                    s += &(g_upper.get(b, l) * &t);
                                }
                            }
                            s.scale(&half)
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let gamma = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    (0..n)
                        .map(|c| {
                            let mut s = Expr::zero();
                            for x in 0..n {
                                s -= &(g_upper.get(a, x) * &lc[b][x][c]);
                            }
                            s
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(IntersectionData {
        g_upper,
        g_lower,
        gamma,
    })
}

/// Sign helper: `(-1)^k`.
pub fn sign(k: i64) -> Q {
    if k.rem_euclid(2) == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// True when `q` is a nonnegative integer.
pub fn is_nonneg_integer(q: &Q) -> bool {
    q.is_integer() && !q.is_negative()
}
