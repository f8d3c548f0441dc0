use super::expr::{Expr, Point};
use super::poly::{q_to_f64, Poly};
use super::var::{Var, NUM_VARS};
use super::SymError;

/// An [`Expr`] flattened for repeated floating-point evaluation.
#[derive(Clone, Debug)]
pub struct Compiled {
    num: Vec<Term>,
    den: Vec<Term>,
    used: Vec<Var>,
}

#[derive(Clone, Debug)]
struct Term {
    coeff: f64,
    factors: Vec<(u8, i32)>,
}

fn flatten(p: &Poly) -> Vec<Term> {
    p.terms()
        .map(|(m, c)| Term {
            coeff: q_to_f64(c),
            factors: m.factors().map(|(v, e)| (v.index(), e as i32)).collect(),
        })
        .collect()
}

fn eval_terms(terms: &[Term], vals: &[f64; NUM_VARS]) -> f64 {
    terms
        .iter()
        .map(|t| {
            t.factors
                .iter()
                .fold(t.coeff, |acc, &(i, e)| acc * vals[i as usize].powi(e))
        })
        .sum()
}

impl Compiled {
    pub fn new(e: &Expr) -> Self {
        Compiled {
            num: flatten(e.numer()),
            den: flatten(e.denom()),
            used: e.vars().into_iter().collect(),
        }
    }

    pub fn eval(&self, p: &Point<f64>) -> Result<f64, SymError> {
        let mut vals = [0.0; NUM_VARS];
        for &v in &self.used {
            let x = match v {
                Var::Coord(k) | Var::Exp(k) | Var::Log(k) => p.coords.get(k),
                Var::Jet1(k) => p.jet1.get(k),
                Var::Jet2(k) => p.jet2.get(k),
            }
            .copied()
            .ok_or_else(|| SymError::MissingSymbol(v.to_string()))?;
            vals[v.index() as usize] = match v {
                Var::Exp(_) => x.exp(),
                Var::Log(_) => x.ln(),
                _ => x,
            };
        }
        let d = eval_terms(&self.den, &vals);
        if d == 0.0 || !d.is_finite() {
            return Err(SymError::Pole);
        }
        Ok(eval_terms(&self.num, &vals) / d)
    }

    /// Evaluates at coordinates only (no jets).
    pub fn at(&self, coords: &[f64]) -> Result<f64, SymError> {
        self.eval(&Point::new(coords.to_vec()))
    }
}
