use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use num_traits::{One, ToPrimitive, Zero};

use super::monomial::Monomial;
use super::poly::{q_to_f64, Poly};
use super::var::{Var, MAX_COORDS};
use super::{SymError, Q};

/// Element of the differential field of rational functions in coordinates,
/// `exp`/`log` generators and jets, kept as a reduced fraction with a monic
/// denominator. Equal values have equal representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

/// Result of [`Expr::evaluate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Number {
    Exact(Q),
    Float(f64),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(q) => q_to_f64(q),
            Number::Float(x) => *x,
        }
    }
}

/// Assignment of values to coordinate and jet symbols.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Point<T> {
    pub coords: Vec<T>,
    pub jet1: Vec<T>,
    pub jet2: Vec<T>,
}

impl<T> Point<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Point {
            coords,
            jet1: Vec::new(),
            jet2: Vec::new(),
        }
    }

    pub fn with_jets(coords: Vec<T>, jet1: Vec<T>) -> Self {
        Point {
            coords,
            jet1,
            jet2: Vec::new(),
        }
    }

    fn get(&self, v: Var) -> Option<&T> {
        match v {
            Var::Coord(k) | Var::Exp(k) | Var::Log(k) => self.coords.get(k),
            Var::Jet1(k) => self.jet1.get(k),
            Var::Jet2(k) => self.jet2.get(k),
        }
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Expr {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Q::from_integer(n.into()))
    }

    pub fn rational(n: i64, d: i64) -> Self {
        Self::constant(Q::new(n.into(), d.into()))
    }

    pub fn var(v: Var) -> Self {
        Expr {
            num: Poly::var(v),
            den: Poly::one(),
        }
    }

    /// Coordinate `v{k+1}`.
    pub fn coord(k: usize) -> Self {
        Self::var(Var::Coord(k))
    }

    pub fn exp_of(k: usize) -> Self {
        Self::var(Var::Exp(k))
    }

    pub fn log_of(k: usize) -> Self {
        Self::var(Var::Log(k))
    }

    pub fn jet(k: usize) -> Self {
        Self::var(Var::Jet1(k))
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr {
            num: p,
            den: Poly::one(),
        }
    }

    /// Builds `num / den` in normal form. Panics if `den` is zero.
    pub fn from_parts(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = den.as_constant() {
            return Expr {
                num: num.scale(&c.recip()),
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading_coeff();
        if lc.is_one() {
            Expr { num, den }
        } else {
            let inv = lc.recip();
            Expr {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut s = self.num.vars();
        s.extend(self.den.vars());
        s
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn has_jets(&self) -> bool {
        self.vars().iter().any(|v| v.is_jet())
    }

    pub fn has_generators(&self) -> bool {
        self.vars().iter().any(|v| v.is_generator())
    }

    /// Coordinates the expression depends on, directly or through generators.
    pub fn coords(&self) -> BTreeSet<usize> {
        self.vars()
            .into_iter()
            .filter(|v| !v.is_jet())
            .map(Var::coord)
            .collect()
    }

    pub fn recip(&self) -> Result<Expr, SymError> {
        if self.is_zero() {
            return Err(SymError::DivisionByZero);
        }
        Ok(Expr::from_parts(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: i32) -> Result<Expr, SymError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let k = e.unsigned_abs();
        Ok(Expr {
            num: base.num.pow(k),
            den: base.den.pow(k),
        })
    }

    pub fn scale(&self, c: &Q) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Partial derivative with respect to coordinate `k` (0-based), applying the
    /// chain rule through `exp(vk)` and `log(vk)`.
    pub fn diff(&self, k: usize) -> Expr {
        assert!(k < MAX_COORDS, "coordinate index out of range");
        let (an, bn) = coord_partial(&self.num, k);
        if self.den.is_one() {
            if bn.is_zero() {
                return Expr::from_poly(an);
            }
            let v = Poly::var(Var::Coord(k));
            return Expr::from_parts(&(&an * &v) + &bn, v);
        }
        let (ad, bd) = coord_partial(&self.den, k);
        let a = &(&an * &self.den) - &(&self.num * &ad);
        let b = &(&bn * &self.den) - &(&self.num * &bd);
        let d2 = &self.den * &self.den;
        if b.is_zero() {
            return Expr::from_parts(a, d2);
        }
        let v = Poly::var(Var::Coord(k));
        Expr::from_parts(&(&a * &v) + &b, &d2 * &v)
    }

    /// Checked variant of [`Expr::diff`].
    pub fn try_diff(&self, k: usize) -> Result<Expr, SymError> {
        if k >= MAX_COORDS {
            return Err(SymError::InvalidIndex(k));
        }
        Ok(self.diff(k))
    }

    /// Formal derivative with respect to an independent symbol (used for jets).
    pub fn diff_symbol(&self, v: Var) -> Expr {
        let nv = self.num.partial(v);
        let dv = self.den.partial(v);
        if dv.is_zero() {
            return Expr::from_parts(nv, self.den.clone());
        }
        Expr::from_parts(
            &(&nv * &self.den) - &(&self.num * &dv),
            &self.den * &self.den,
        )
    }

    /// Total x-derivative: `sum_g de/dv^g v^g_x + sum_g de/dv^g_x v^g_xx`.
    pub fn total_x(&self) -> Result<Expr, SymError> {
        let vars = self.vars();
        if vars.iter().any(|v| matches!(v, Var::Jet2(_))) {
            return Err(SymError::JetDepth);
        }
        let mut out = Expr::zero();
        for k in self.coords() {
            out += &(&self.diff(k) * &Expr::var(Var::Jet1(k)));
        }
        for v in vars {
            if let Var::Jet1(k) = v {
                out += &(&self.diff_symbol(v) * &Expr::var(Var::Jet2(k)));
            }
        }
        Ok(out)
    }

    /// Composes with the coordinate map `v^k -> map[k]` (unmapped coordinates
    /// are left unchanged). Generators are rewritten only when the image has an
    /// exact generator representation.
    pub fn substitute(&self, map: &BTreeMap<usize, Expr>) -> Result<Expr, SymError> {
        let mut images: BTreeMap<Var, Expr> = BTreeMap::new();
        for v in self.vars() {
            let k = v.coord();
            let Some(img) = map.get(&k) else { continue };
            let e = match v {
                Var::Coord(_) => img.clone(),
                Var::Exp(_) => exp_image(img)?,
                Var::Log(_) => log_image(img)?,
                Var::Jet1(_) | Var::Jet2(_) => {
                    return Err(SymError::Inexpressible(format!(
                        "jet symbol {v} under a coordinate change"
                    )))
                }
            };
            images.insert(v, e);
        }
        if images.is_empty() {
            return Ok(self.clone());
        }
        let n = subst_poly(&self.num, &images)?;
        let d = subst_poly(&self.den, &images)?;
        &n / &d
    }

    /// Evaluates at `p`: exactly when the expression has no generators,
    /// otherwise in floating point.
    pub fn evaluate(&self, p: &Point<Q>) -> Result<Number, SymError> {
        if self.has_generators() {
            let fp = Point {
                coords: p.coords.iter().map(q_to_f64).collect(),
                jet1: p.jet1.iter().map(q_to_f64).collect(),
                jet2: p.jet2.iter().map(q_to_f64).collect(),
            };
            return self.eval_f64(&fp).map(Number::Float);
        }
        self.eval_exact(p).map(Number::Exact)
    }

    pub fn eval_exact(&self, p: &Point<Q>) -> Result<Q, SymError> {
        let ev = |poly: &Poly| -> Result<Q, SymError> {
            let mut acc = Q::zero();
            for (m, c) in poly.terms() {
                let mut t = c.clone();
                for (v, e) in m.factors() {
                    if v.is_generator() {
                        return Err(SymError::NeedsFloat);
                    }
                    let x = p
                        .get(v)
                        .ok_or_else(|| SymError::MissingSymbol(v.to_string()))?;
                    t *= num_traits::pow(x.clone(), e as usize);
                }
                acc += t;
            }
            Ok(acc)
        };
        let d = ev(&self.den)?;
        if d.is_zero() {
            return Err(SymError::Pole);
        }
        Ok(ev(&self.num)? / d)
    }

    pub fn eval_f64(&self, p: &Point<f64>) -> Result<f64, SymError> {
        for v in self.vars() {
            if p.get(v).is_none() {
                return Err(SymError::MissingSymbol(v.to_string()));
            }
        }
        let lookup = |v: Var| -> f64 {
            let x = *p.get(v).unwrap();
            match v {
                Var::Exp(_) => x.exp(),
                Var::Log(_) => x.ln(),
                _ => x,
            }
        };
        let d = self.den.eval_f64(&lookup);
        if d == 0.0 || !d.is_finite() {
            return Err(SymError::Pole);
        }
        Ok(self.num.eval_f64(&lookup) / d)
    }

    /// An antiderivative in `v^k` with zero additive constant.
    ///
    /// The integrand must be a Laurent polynomial in `v^k` (coefficients free
    /// of `v^k`) times powers of either `exp(v^k)` or `log(v^k)`.
    pub fn antiderivative(&self, k: usize) -> Result<Expr, SymError> {
        let x = Var::Coord(k);
        let ex = Var::Exp(k);
        let lx = Var::Log(k);
        // den = rest * v^s * exp(v)^a with rest free of the integration symbols.
        let mut dm: Option<Monomial> = None;
        for (m, _) in self.den.terms() {
            dm = Some(match dm {
                None => m.clone(),
                Some(g) => g.gcd(m),
            });
        }
        let dm = dm.unwrap_or_else(Monomial::one);
        let s = dm.exponent(x);
        let a = dm.exponent(ex);
        let strip = Monomial::var_pow(x, s).mul(&Monomial::var_pow(ex, a));
        let rest = self
            .den
            .div_exact(&Poly::monomial(strip, Q::one()))
            .expect("monomial factor divides");
        if rest.contains_var(x) || rest.contains_var(ex) || rest.contains_var(lx) {
            return Err(SymError::NotIntegrable(format!(
                "denominator {} depends on v{} beyond a monomial factor",
                self.den,
                k + 1
            )));
        }
        let log_declared = self.contains_var(lx);
        // Group numerator terms by their (v, exp, log) pattern so each
        // elementary integral is computed once.
        let mut groups: BTreeMap<(i64, i64, i64), Poly> = BTreeMap::new();
        for (m, c) in self.num.terms() {
            let (ep, r1) = m.split(x);
            let (ee, r2) = r1.split(ex);
            let (el, other) = r2.split(lx);
            let key = (ep as i64 - s as i64, ee as i64 - a as i64, el as i64);
            let g = groups.entry(key).or_insert_with(Poly::zero);
            *g = &*g + &Poly::monomial(other, c.clone());
        }
        let mut out = Expr::zero();
        for ((pw, epow, el), coef) in groups {
            let piece = integrate_term(pw, epow, el, k, log_declared)?;
            out += &(&piece * &Expr::from_poly(coef));
        }
        if rest.is_one() {
            Ok(out)
        } else {
            &out / &Expr::from_poly(rest)
        }
    }

    /// Largest absolute value of the numerator/denominator degree; a cheap size measure.
    pub fn size(&self) -> usize {
        self.num.len() + self.den.len()
    }
}

/// `d/dv^k` of a polynomial split as `A + B / v^k`.
fn coord_partial(p: &Poly, k: usize) -> (Poly, Poly) {
    let mut a = p.partial(Var::Coord(k));
    let pe = p.partial(Var::Exp(k));
    if !pe.is_zero() {
        a = &a + &(&pe * &Poly::var(Var::Exp(k)));
    }
    let b = p.partial(Var::Log(k));
    (a, b)
}

/// Integrates `v^pw * exp(v)^epow * log(v)^el` in `v = v^k`.
fn integrate_term(
    pw: i64,
    epow: i64,
    el: i64,
    k: usize,
    log_declared: bool,
) -> Result<Expr, SymError> {
    let v = Expr::coord(k);
    let mono = |p: i64, ep: i64, l: i64| -> Expr {
        let mut t = v.pow(p as i32).expect("nonzero base");
        if ep != 0 {
            t = &t * &Expr::exp_of(k).pow(ep as i32).expect("nonzero base");
        }
        if l != 0 {
            t = &t * &Expr::log_of(k).pow(l as i32).expect("nonzero base");
        }
        t
    };
    let bad = || {
        SymError::NotIntegrable(format!(
            "v{}^{} * exp(v{})^{} * log(v{})^{}",
            k + 1,
            pw,
            k + 1,
            epow,
            k + 1,
            el
        ))
    };
    if epow != 0 && el != 0 {
        return Err(bad());
    }
    if epow != 0 {
        // int v^m E^b = v^m E^b / b - m/b int v^(m-1) E^b
        if pw < 0 {
            return Err(bad());
        }
        let b = Q::from_integer(epow.into());
        let mut out = Expr::zero();
        let mut coef = b.recip();
        let mut m = pw;
        loop {
            out += &mono(m, epow, 0).scale(&coef);
            if m == 0 {
                break;
            }
            coef = -coef * Q::from_integer(m.into()) / &b;
            m -= 1;
        }
        return Ok(out);
    }
    if el == 0 {
        if pw == -1 {
            if !log_declared {
                return Err(bad());
            }
            return Ok(Expr::log_of(k));
        }
        return Ok(mono(pw + 1, 0, 0).scale(&Q::new(1.into(), (pw + 1).into())));
    }
    if pw == -1 {
        return Ok(mono(0, 0, el + 1).scale(&Q::new(1.into(), (el + 1).into())));
    }
    // int v^m L^j = v^(m+1) L^j/(m+1) - j/(m+1) int v^m L^(j-1)
    let m1 = Q::from_integer((pw + 1).into());
    let head = mono(pw + 1, 0, el).scale(&m1.recip());
    let tail = integrate_term(pw, 0, el - 1, k, true)?;
    Ok(&head - &tail.scale(&(Q::from_integer(el.into()) / &m1)))
}

fn exp_image(img: &Expr) -> Result<Expr, SymError> {
    if img.is_zero() {
        return Ok(Expr::one());
    }
    let bad = || SymError::Inexpressible(format!("exp({img}) has no generator form"));
    if !img.is_polynomial() || !img.num.is_monomial() {
        return Err(bad());
    }
    let (m, c) = img.num.leading().unwrap();
    let factors: Vec<(Var, u32)> = m.factors().collect();
    if factors.len() != 1 || factors[0].1 != 1 || !c.is_integer() {
        return Err(bad());
    }
    let n = c.to_integer().to_i32().ok_or_else(bad)?;
    match factors[0].0 {
        Var::Coord(j) if n.abs() == 1 => Expr::exp_of(j).pow(n),
        Var::Log(j) => Expr::coord(j).pow(n),
        _ => Err(bad()),
    }
}

fn log_image(img: &Expr) -> Result<Expr, SymError> {
    let bad = || SymError::Inexpressible(format!("log({img}) has no generator form"));
    if !img.num.is_monomial() || !img.den.is_monomial() {
        return Err(bad());
    }
    let (nm, nc) = img.num.leading().unwrap();
    let (dm, _) = img.den.leading().unwrap();
    if !nc.is_one() {
        return Err(bad());
    }
    let mut out = Expr::zero();
    for (sign, m) in [(1i64, nm), (-1i64, dm)] {
        for (v, e) in m.factors() {
            let w = Q::from_integer((sign * e as i64).into());
            match v {
                Var::Coord(j) => out += &Expr::log_of(j).scale(&w),
                Var::Exp(j) => out += &Expr::coord(j).scale(&w),
                _ => return Err(bad()),
            }
        }
    }
    Ok(out)
}

fn subst_poly(p: &Poly, images: &BTreeMap<Var, Expr>) -> Result<Expr, SymError> {
    let mut powers: BTreeMap<(Var, u32), Expr> = BTreeMap::new();
    let mut acc = Expr::zero();
    for (m, c) in p.terms() {
        let mut t = Expr::constant(c.clone());
        let mut plain = Monomial::one();
        for (v, e) in m.factors() {
            match images.get(&v) {
                None => plain = plain.with_power(v, e),
                Some(img) => {
                    let pw = match powers.get(&(v, e)) {
                        Some(x) => x.clone(),
                        None => {
                            let x = img.pow(e as i32)?;
                            powers.insert((v, e), x.clone());
                            x
                        }
                    };
                    t = &t * &pw;
                }
            }
        }
        if !plain.is_one() {
            t = &t * &Expr::from_poly(Poly::monomial(plain, Q::one()));
        }
        acc += &t;
    }
    Ok(acc)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.len() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        let simple_den = self.den.is_monomial() && {
            let (m, _) = self.den.leading().unwrap();
            m.factors().count() == 1
        };
        if simple_den {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return Expr::from_poly(&self.num + &rhs.num);
            }
            return Expr::from_parts(&self.num + &rhs.num, self.den.clone());
        }
        if self.den.is_one() {
            return Expr::from_parts(&(&self.num * &rhs.den) + &rhs.num, rhs.den.clone());
        }
        if rhs.den.is_one() {
            return Expr::from_parts(&self.num + &(&rhs.num * &self.den), self.den.clone());
        }
        let g = self.den.gcd(&rhs.den);
        let a = self.den.div_exact(&g).unwrap();
        let b = rhs.den.div_exact(&g).unwrap();
        Expr::from_parts(&(&self.num * &b) + &(&rhs.num * &a), &(&a * &b) * &g)
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Expr::from_poly(&self.num * &rhs.num);
        }
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = rhs.den.div_exact(&g1).unwrap();
        let n2 = rhs.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let lc = den.leading_coeff();
        if lc.is_one() {
            Expr { num, den }
        } else {
            let inv = lc.recip();
            Expr {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }
}

impl<'a> Div<&'a Expr> for &'a Expr {
    type Output = Result<Expr, SymError>;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Expr) -> Result<Expr, SymError> {
        Ok(self * &rhs.recip()?)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        *self = &*self - rhs;
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                $tr::$m(&self, &rhs)
            }
        }
        impl<'a> $tr<&'a Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                $tr::$m(&self, rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Q> for Expr {
    fn from(q: Q) -> Self {
        Expr::constant(q)
    }
}
