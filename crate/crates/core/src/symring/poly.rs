use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::var::Var;
use super::Q;

/// Sparse multivariate polynomial over exact rationals.
///
/// Terms are kept in a `BTreeMap` keyed by [`Monomial`], so iteration is in
/// ascending graded-lex order and the leading term is the last entry.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Monomial::var(v), Q::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
            || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    pub fn as_constant(&self) -> Option<Q> {
        if self.terms.is_empty() {
            return Some(Q::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.is_one() {
                return Some(c.clone());
            }
        }
        None
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn leading(&self) -> Option<(&Monomial, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Q {
        self.leading()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative treating every generator as independent.
    pub fn partial(&self, v: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(v);
            if e > 0 {
                out.add_term(rest.with_power(v, e - 1), c * Q::from_integer(e.into()));
            }
        }
        out
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.vars()).collect()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Coefficients of `self` as a polynomial in `v`, index = degree.
    pub fn to_univariate(&self, v: Var) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.split(v);
            out[e as usize].add_term(rest, c.clone());
        }
        out
    }

    pub fn from_univariate(coeffs: &[Poly], v: Var) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                out.add_term(m.with_power(v, e as u32), a.clone());
            }
        }
        out
    }

    /// Scales so the leading coefficient is one (zero stays zero).
    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        if d.is_monomial() {
            let (dm, dc) = d.leading().unwrap();
            let inv = dc.recip();
            let mut terms = BTreeMap::new();
            for (m, c) in &self.terms {
                terms.insert(m.div(dm)?, c * &inv);
            }
            return Some(Poly { terms });
        }
        let (dm, dc) = d.leading().unwrap();
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut r = self.clone();
        let mut q = Poly::zero();
        while let Some((rm, rc)) = r.leading() {
            let t = rm.div(&dm)?;
            let c = rc / &dc;
            r = &r - &d.mul_monomial(&t, &c);
            q.add_term(t, c);
        }
        Some(q)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Poly::one();
        }
        if self.is_monomial() || other.is_monomial() {
            let (mono, poly) = if self.is_monomial() {
                (self, other)
            } else {
                (other, self)
            };
            let mut g = mono.leading().unwrap().0.clone();
            for m in poly.terms.keys() {
                if g.is_one() {
                    break;
                }
                g = g.gcd(m);
            }
            return Poly::monomial(g, Q::one());
        }
        if self.monic() == other.monic() {
            return self.monic();
        }

        let va = self.vars();
        let vb = other.vars();
        // A variable present in only one argument cannot occur in the gcd, so the
        // gcd with the other argument runs over its coefficients in that variable.
        if let Some(&y) = va.difference(&vb).next() {
            return gcd_over_coeffs(other, self, y);
        }
        if let Some(&y) = vb.difference(&va).next() {
            return gcd_over_coeffs(self, other, y);
        }
        let x = va
            .iter()
            .copied()
            .min_by_key(|&v| self.degree_in(v).max(other.degree_in(v)))
            .unwrap();

        let (ca, pa) = self.content_split(x);
        let (cb, pb) = other.content_split(x);
        let cg = ca.gcd(&cb);
        let g = prs_gcd(pa, pb, x);
        (&cg * &g).monic()
    }

    /// Splits into (content w.r.t. `x`, primitive part w.r.t. `x`).
    fn content_split(&self, x: Var) -> (Poly, Poly) {
        let coeffs = self.to_univariate(x);
        let content = content_of(&coeffs);
        let pp: Vec<Poly> = coeffs
            .iter()
            .map(|c| c.div_exact(&content).expect("content divides coefficients"))
            .collect();
        (content, Poly::from_univariate(&pp, x))
    }

    pub fn eval_f64(&self, values: &dyn Fn(Var) -> f64) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = q_to_f64(c);
            for (v, e) in m.factors() {
                t *= values(v).powi(e as i32);
            }
            acc += t;
        }
        acc
    }
}

fn gcd_over_coeffs(base: &Poly, p: &Poly, y: Var) -> Poly {
    let mut g = base.monic();
    for c in p.to_univariate(y) {
        if c.is_zero() {
            continue;
        }
        g = g.gcd(&c);
        if g.is_constant() {
            return Poly::one();
        }
    }
    g
}

fn content_of(coeffs: &[Poly]) -> Poly {
    let mut acc = Poly::zero();
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        acc = acc.gcd(c);
        if acc.is_one() {
            break;
        }
    }
    if acc.is_zero() {
        Poly::one()
    } else {
        acc
    }
}

/// Gcd of two polynomials primitive in `x`, by primitive pseudo-remainder sequences.
fn prs_gcd(a: Poly, b: Poly, x: Var) -> Poly {
    let (mut f, mut g) = if a.degree_in(x) >= b.degree_in(x) {
        (a.to_univariate(x), b.to_univariate(x))
    } else {
        (b.to_univariate(x), a.to_univariate(x))
    };
    loop {
        if g.len() == 1 {
            return Poly::one();
        }
        let r = pseudo_rem(&f, &g);
        if r.iter().all(Poly::is_zero) {
            return Poly::from_univariate(&g, x);
        }
        let content = content_of(&r);
        let mut r: Vec<Poly> = r
            .iter()
            .map(|c| c.div_exact(&content).expect("content divides coefficients"))
            .collect();
        // Strip the numeric scale too so rational coefficients stay small.
        let inv = r.last().unwrap().leading_coeff().recip();
        if !inv.is_one() {
            r = r.iter().map(|c| c.scale(&inv)).collect();
        }
        f = g;
        g = r;
    }
}

/// Pseudo-remainder of univariate polynomials with polynomial coefficients,
/// up to a nonzero factor; trailing zero coefficients are trimmed.
fn pseudo_rem(f: &[Poly], g: &[Poly]) -> Vec<Poly> {
    let n = g.len() - 1;
    let lc = &g[n];
    let mut r: Vec<Poly> = f.to_vec();
    trim(&mut r);
    while r.len() > n && !(r.len() == 1 && r[0].is_zero()) {
        let t = r.len() - 1;
        let c = r[t].clone();
        let shift = t - n;
        let mut next: Vec<Poly> = r.iter().map(|a| a * lc).collect();
        for (i, gi) in g.iter().enumerate() {
            next[i + shift] = &next[i + shift] - &(gi * &c);
        }
        next.pop();
        r = next;
        trim(&mut r);
    }
    r
}

fn trim(r: &mut Vec<Poly>) {
    while r.len() > 1 && r.last().unwrap().is_zero() {
        r.pop();
    }
}

pub fn q_to_f64(q: &Q) -> f64 {
    use num_traits::ToPrimitive;
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => q.to_f64().unwrap_or(f64::NAN),
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let (big, small) = if self.terms.len() >= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl std::fmt::Display for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{}", fmt_q(&a))?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_q(&a))?;
            }
        }
        Ok(())
    }
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}

pub fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(k: usize) -> Poly {
        Poly::var(Var::Coord(k))
    }

    fn c(n: i64) -> Poly {
        Poly::constant(Q::from_integer(n.into()))
    }

    #[test]
    fn exact_division() {
        let a = &(&v(0) + &v(1)) * &(&v(0) - &v(1));
        let b = &v(0) + &v(1);
        assert_eq!(a.div_exact(&b).unwrap(), &v(0) - &v(1));
        assert!(a.div_exact(&(&v(0) + &c(1))).is_none());
    }

    #[test]
    fn gcd_of_products() {
        let common = &(&v(0) * &v(1)) + &c(3);
        let a = &common * &(&v(0) + &c(2));
        let b = &common * &(&(&v(1) * &v(1)) - &v(2));
        assert_eq!(a.gcd(&b), common.monic());
    }

    #[test]
    fn gcd_coprime() {
        let a = &v(0) + &v(1);
        let b = &v(0) - &v(1);
        assert!(a.gcd(&b).is_one());
    }

    #[test]
    fn gcd_with_generators() {
        let e = Poly::var(Var::Exp(1));
        let common = &e + &v(0);
        let a = &common * &common;
        let b = &common * &v(1);
        assert_eq!(a.gcd(&b), common.monic());
    }
}
