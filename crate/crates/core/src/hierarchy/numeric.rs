//! Method-of-lines integration of evolutionary flows on a periodic grid,
//! used to test that two flows commute.

use crate::report::Check;
use crate::symring::{Compiled, Expr, Point, SymError};

/// Periodic samples `u[a][i]` of each component on `[0, length)`.
#[derive(Clone, Debug)]
pub struct PeriodicState {
    pub length: f64,
    pub u: Vec<Vec<f64>>,
}

impl PeriodicState {
    /// `v^a(x) = base[a] + amp * sin(2 pi x / length + a + 1)`.
    pub fn sine(base: &[f64], amp: f64, points: usize, length: f64) -> Self {
        let u = base
            .iter()
            .enumerate()
            .map(|(a, b)| {
                (0..points)
                    .map(|i| {
                        let x = length * i as f64 / points as f64;
                        b + amp * (std::f64::consts::TAU * x / length + a as f64 + 1.0).sin()
                    })
                    .collect()
            })
            .collect();
        PeriodicState { length, u }
    }

    fn dx(&self) -> f64 {
        self.length / self.u[0].len() as f64
    }

    pub fn max_diff(&self, other: &PeriodicState) -> f64 {
        self.u
            .iter()
            .flatten()
            .zip(other.u.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Sixth-order central first derivative with periodic wrap.
pub fn derivative6(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len() as isize;
    let at = |i: isize| f[i.rem_euclid(n) as usize];
    (0..n)
        .map(|i| {
            (-at(i - 3) + 9.0 * at(i - 2) - 45.0 * at(i - 1) + 45.0 * at(i + 1) - 9.0 * at(i + 2)
                + at(i + 3))
                / (60.0 * h)
        })
        .collect()
}

/// A compiled flow `u_t = X(u, u_x)`.
#[derive(Clone, Debug)]
pub struct Field {
    comps: Vec<Compiled>,
}

impl Field {
    pub fn new(rhs: &[Expr]) -> Self {
        Field {
            comps: rhs.iter().map(Compiled::new).collect(),
        }
    }

    fn eval(&self, u: &[Vec<f64>], h: f64) -> Result<Vec<Vec<f64>>, SymError> {
        let ux: Vec<Vec<f64>> = u.iter().map(|c| derivative6(c, h)).collect();
        let m = u[0].len();
        let mut out = vec![vec![0.0; m]; u.len()];
        for i in 0..m {
            let p = Point::with_jets(
                u.iter().map(|c| c[i]).collect(),
                ux.iter().map(|c| c[i]).collect(),
            );
            for (a, f) in self.comps.iter().enumerate() {
                out[a][i] = f.eval(&p)?;
            }
        }
        Ok(out)
    }

    /// Advances by time `s` in `steps` classical RK4 steps.
    pub fn advance(
        &self,
        st: &PeriodicState,
        s: f64,
        steps: usize,
    ) -> Result<PeriodicState, SymError> {
        let h = st.dx();
        let dt = s / steps as f64;
        let axpy = |u: &[Vec<f64>], k: &[Vec<f64>], c: f64| -> Vec<Vec<f64>> {
            u.iter()
                .zip(k)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + c * y).collect())
                .collect()
        };
        let mut u = st.u.clone();
        for _ in 0..steps {
            let k1 = self.eval(&u, h)?;
            let k2 = self.eval(&axpy(&u, &k1, dt / 2.0), h)?;
            let k3 = self.eval(&axpy(&u, &k2, dt / 2.0), h)?;
            let k4 = self.eval(&axpy(&u, &k3, dt), h)?;
            for a in 0..u.len() {
                for i in 0..u[a].len() {
                    u[a][i] += dt / 6.0 * (k1[a][i] + 2.0 * k2[a][i] + 2.0 * k3[a][i] + k4[a][i]);
                }
            }
        }
        Ok(PeriodicState {
            length: st.length,
            u,
        })
    }
}

/// Commutation defects `|Y_s X_s u - X_s Y_s u|` for steps `s`, `s / 2` on
/// the base grid and for step `s` on the doubled grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Commutation {
    pub step: f64,
    pub points: usize,
    pub defect: f64,
    pub defect_half_step: f64,
    pub defect_fine_grid: f64,
    /// `defect / defect_half_step`: 4 while a step^2 term dominates.
    pub step_ratio: f64,
    /// `defect / defect_fine_grid`: large when that term is discretization error.
    pub grid_ratio: f64,
}

/// Below this the defect is roundoff and the ratios carry no information.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

impl Commutation {
    pub fn vacuous(&self) -> bool {
        self.defect < ROUNDOFF_FLOOR
    }

    /// Passes when the defect is third order in the step, or when its
    /// second-order part vanishes under grid refinement (at least like
    /// `dx^4`), or when it is at roundoff level.
    pub fn check(&self, name: &str) -> Check {
        let ok = self.vacuous() || self.step_ratio >= 6.0 || self.grid_ratio >= 16.0;
        let mut c = Check::numeric(name, self.defect, f64::INFINITY)
            .with_grid(self.points)
            .with_richardson(vec![self.step_ratio, self.grid_ratio])
            .require(ok, "second-order commutation defect survives refinement");
        if self.vacuous() {
            c = c.with_detail("defect at roundoff level");
        }
        c
    }
}

fn defect(
    x: &Field,
    y: &Field,
    st: &PeriodicState,
    s: f64,
    substeps: usize,
) -> Result<f64, SymError> {
    let xy = y.advance(&x.advance(st, s, substeps)?, s, substeps)?;
    let yx = x.advance(&y.advance(st, s, substeps)?, s, substeps)?;
    Ok(xy.max_diff(&yx))
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        f64::INFINITY
    }
}

/// Composes the flows in both orders; `init(points)` samples the initial data.
pub fn commutation(
    x: &[Expr],
    y: &[Expr],
    init: &dyn Fn(usize) -> PeriodicState,
    points: usize,
    s: f64,
    substeps: usize,
) -> Result<Commutation, SymError> {
    let (fx, fy) = (Field::new(x), Field::new(y));
    let coarse = init(points);
    let d0 = defect(&fx, &fy, &coarse, s, substeps)?;
    let d1 = defect(&fx, &fy, &coarse, s / 2.0, substeps)?;
    let d2 = defect(&fx, &fy, &init(2 * points), s, substeps)?;
    Ok(Commutation {
        step: s,
        points,
        defect: d0,
        defect_half_step: d1,
        defect_fine_grid: d2,
        step_ratio: ratio(d0, d1),
        grid_ratio: ratio(d0, d2),
    })
}
