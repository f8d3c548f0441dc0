use std::fmt;

/// Maximum number of coordinate symbols `v1..v9`.
pub const MAX_COORDS: usize = 9;

/// Total number of ring generators (coordinates, exp, log, first jets, second jets).
pub const NUM_VARS: usize = 5 * MAX_COORDS;

/// A generator of the polynomial ring underlying [`super::Expr`].
///
/// Coordinates are 0-based (`Coord(0)` prints as `v1`). The declaration order
/// below fixes the monomial order used everywhere in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Coord(usize),
    Exp(usize),
    Log(usize),
    Jet1(usize),
    Jet2(usize),
}

impl Var {
    pub fn index(self) -> u8 {
        let (block, k) = match self {
            Var::Coord(k) => (0, k),
            Var::Exp(k) => (1, k),
            Var::Log(k) => (2, k),
            Var::Jet1(k) => (3, k),
            Var::Jet2(k) => (4, k),
        };
        debug_assert!(k < MAX_COORDS);
        (block * MAX_COORDS + k) as u8
    }

    pub fn from_index(i: u8) -> Var {
        let i = i as usize;
        let k = i % MAX_COORDS;
        match i / MAX_COORDS {
            0 => Var::Coord(k),
            1 => Var::Exp(k),
            2 => Var::Log(k),
            3 => Var::Jet1(k),
            _ => Var::Jet2(k),
        }
    }

    /// The coordinate this symbol is attached to.
    pub fn coord(self) -> usize {
        match self {
            Var::Coord(k) | Var::Exp(k) | Var::Log(k) | Var::Jet1(k) | Var::Jet2(k) => k,
        }
    }

    pub fn is_jet(self) -> bool {
        matches!(self, Var::Jet1(_) | Var::Jet2(_))
    }

    pub fn is_generator(self) -> bool {
        matches!(self, Var::Exp(_) | Var::Log(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Var::Coord(k) => write!(f, "v{}", k + 1),
            Var::Exp(k) => write!(f, "exp(v{})", k + 1),
            Var::Log(k) => write!(f, "log(v{})", k + 1),
            Var::Jet1(k) => write!(f, "v{}_x", k + 1),
            Var::Jet2(k) => write!(f, "v{}_xx", k + 1),
        }
    }
}
