//! Genus-zero solutions of the principal hierarchy by the hodograph method,
//! their tau functions, and numeric checks of how the symmetries act on them.

mod grid;
mod props;

use std::collections::BTreeMap;
use std::fmt;

use crate::frobenius::FrobeniusData;
use crate::hierarchy::{flows, FlowTable, HierError, OmegaTable, ThetaTable};
use crate::report::Check;
use crate::symring::{det_f64, q_to_f64, solve_f64, Compiled, Expr, Point, SymError};

pub use grid::{parse_grid, GridSpec};
pub use props::{verify_prop1, verify_prop2, verify_prop3, verify_string_covariance, HattedFrame};

/// `(alpha, p)`, 0-based `alpha`. `(0, 0)` is the spatial variable `x`.
pub type TimeIndex = (usize, usize);

pub const NEWTON_TOL: f64 = 1e-10;
pub const STEPS: [f64; 2] = [1e-3, 5e-4];
pub const RICHARDSON_RANGE: (f64, f64) = (3.5, 4.5);
/// Residuals below this are dominated by rounding and carry no order information.
pub const RICHARDSON_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("Newton iteration did not converge at {at} (residual {residual:e})")]
    Diverged { at: String, residual: f64 },
    #[error("singular hodograph Jacobian at {at}")]
    Singular { at: String },
    #[error("time {0} is beyond the built order")]
    OutOfRange(String),
    #[error("hatted direction {0} has no image within the built order")]
    NoImage(String),
    #[error(transparent)]
    Hier(#[from] HierError),
    #[error(transparent)]
    Sym(#[from] SymError),
}

pub fn time_label((a, p): TimeIndex) -> String {
    if (a, p) == (0, 0) {
        "x".to_string()
    } else {
        format!("t{}.{}", a + 1, p)
    }
}

/// A point in the (finitely supported) time space.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimePoint {
    pub times: BTreeMap<TimeIndex, f64>,
}

impl TimePoint {
    pub fn new() -> Self {
        TimePoint::default()
    }

    pub fn at_x(x: f64) -> Self {
        TimePoint::new().with((0, 0), x)
    }

    pub fn with(mut self, i: TimeIndex, value: f64) -> Self {
        self.times.insert(i, value);
        self
    }

    pub fn get(&self, i: TimeIndex) -> f64 {
        self.times.get(&i).copied().unwrap_or(0.0)
    }

    pub fn x(&self) -> f64 {
        self.get((0, 0))
    }

    /// `self + h * dir`.
    pub fn moved(&self, dir: &[(TimeIndex, f64)], h: f64) -> Self {
        let mut out = self.clone();
        for &(i, c) in dir {
            *out.times.entry(i).or_insert(0.0) += h * c;
        }
        out
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .times
            .iter()
            .map(|(&i, v)| format!("{}={v}", time_label(i)))
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// The shift of the topological solution, `c^{1,1} = 1`.
pub fn topological_shift() -> BTreeMap<TimeIndex, f64> {
    BTreeMap::from([((0, 1), 1.0)])
}

/// The family `sum t~^{b,q} d_g theta_{b,q}(v) = 0` with `t~ = t - c`, and
/// its quadratic tau function.
pub struct HodographSolution {
    pub name: String,
    pub n: usize,
    pub order: usize,
    pub shift: BTreeMap<TimeIndex, f64>,
    pub seed: Vec<f64>,
    pub eta: Vec<Vec<f64>>,
    pub eta_inv: Vec<Vec<f64>>,
    theta: Vec<Vec<Compiled>>,
    grad: Vec<Vec<Vec<Compiled>>>,
    hess: Vec<Vec<Vec<Vec<Compiled>>>>,
    omega: BTreeMap<(usize, usize, usize, usize), Compiled>,
    omega_order: usize,
    flows: Vec<Vec<Vec<Compiled>>>,
}

impl HodographSolution {
    /// Compiles the tables needed for times up to `t.order`.
    pub fn new(
        m: &FrobeniusData,
        t: &ThetaTable,
        o: &OmegaTable,
        seed: Vec<f64>,
    ) -> Result<Self, SolveError> {
        let e = &m.euler;
        let n = e.n;
        let compile_row = |row: &[Expr]| row.iter().map(Compiled::new).collect::<Vec<_>>();
        let theta = (0..=t.order).map(|p| compile_row(&t.theta[p])).collect();
        let grad = (0..=t.order)
            .map(|p| (0..n).map(|a| compile_row(&t.grad[p][a])).collect())
            .collect();
        let hess = (0..=t.order)
            .map(|p| {
                (0..n)
                    .map(|a| {
                        (0..n)
                            .map(|g| {
                                (0..n)
                                    .map(|d| Compiled::new(&t.grad[p][a][g].diff(d)))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let omega = o
            .entries()
            .map(|(a, p, b, q, x)| ((a, p, b, q), Compiled::new(x)))
            .collect();
        let ft: FlowTable = flows(t, e)?;
        let flows = ft
            .rhs
            .iter()
            .map(|per_b| per_b.iter().map(|r| compile_row(r)).collect())
            .collect();
        let to_f = |m: &Vec<Vec<crate::symring::Q>>| -> Vec<Vec<f64>> {
            m.iter().map(|r| r.iter().map(q_to_f64).collect()).collect()
        };
        Ok(HodographSolution {
            name: m.name.clone(),
            n,
            order: t.order,
            shift: topological_shift(),
            seed,
            eta: to_f(&e.eta),
            eta_inv: to_f(&e.eta_inv),
            theta,
            grad,
            hess,
            omega,
            omega_order: o.order,
            flows,
        })
    }

    pub fn omega_order(&self) -> usize {
        self.omega_order
    }

    pub fn with_shift(mut self, shift: BTreeMap<TimeIndex, f64>) -> Self {
        self.shift = shift;
        self
    }

    /// Shifted times `t~ = t - c` with nonzero entries.
    pub fn tilde(&self, t: &TimePoint) -> BTreeMap<TimeIndex, f64> {
        let mut out = t.times.clone();
        for (&i, &c) in &self.shift {
            *out.entry(i).or_insert(0.0) -= c;
        }
        out.retain(|_, v| *v != 0.0);
        out
    }

    fn check_range(&self, t: &BTreeMap<TimeIndex, f64>) -> Result<(), SolveError> {
        for &(a, p) in t.keys() {
            if a >= self.n || p > self.order {
                return Err(SolveError::OutOfRange(time_label((a, p))));
            }
        }
        Ok(())
    }

    /// Left side of the hodograph system at `v`.
    pub fn hodograph_residual(&self, t: &TimePoint, v: &[f64]) -> Result<Vec<f64>, SolveError> {
        let tt = self.tilde(t);
        self.check_range(&tt)?;
        let mut f = vec![0.0; self.n];
        for (&(b, q), &c) in &tt {
            for (g, fg) in f.iter_mut().enumerate() {
                *fg += c * self.grad[q][b][g].at(v)?;
            }
        }
        Ok(f)
    }

    fn jacobian(
        &self,
        tt: &BTreeMap<TimeIndex, f64>,
        v: &[f64],
    ) -> Result<Vec<Vec<f64>>, SolveError> {
        let n = self.n;
        let mut j = vec![vec![0.0; n]; n];
        for (&(b, q), &c) in tt {
            for (g, row) in j.iter_mut().enumerate() {
                for (d, x) in row.iter_mut().enumerate() {
                    *x += c * self.hess[q][b][g][d].at(v)?;
                }
            }
        }
        Ok(j)
    }

    pub fn solve(&self, t: &TimePoint) -> Result<Vec<f64>, SolveError> {
        self.solve_from(t, &self.seed)
    }

    /// Newton iteration from `seed`.
    pub fn solve_from(&self, t: &TimePoint, seed: &[f64]) -> Result<Vec<f64>, SolveError> {
        let tt = self.tilde(t);
        self.check_range(&tt)?;
        let mut v = seed.to_vec();
        let norm = |x: &[f64]| x.iter().fold(0.0f64, |m, y| m.max(y.abs()));
        let mut polish = 0;
        for _ in 0..60 {
            let f = self.hodograph_residual(t, &v)?;
            let j = self.jacobian(&tt, &v)?;
            let scale = j.iter().flatten().fold(0.0f64, |m, y| m.max(y.abs()));
            if scale == 0.0 || det_f64(&j).abs() < 1e-12 * scale.powi(self.n as i32) {
                return Err(SolveError::Singular { at: t.to_string() });
            }
            let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
            let dv =
                solve_f64(&j, &rhs).ok_or_else(|| SolveError::Singular { at: t.to_string() })?;
            for (vi, d) in v.iter_mut().zip(&dv) {
                *vi += d;
            }
            if !v.iter().all(|x| x.is_finite()) {
                break;
            }
            if norm(&dv) <= 1e-15 * (1.0 + norm(&v)) {
                polish += 1;
                if polish >= 2 {
                    break;
                }
            }
        }
        let residual = norm(
            &self
                .hodograph_residual(t, &v)
                .unwrap_or_else(|_| vec![f64::NAN]),
        );
        if residual < NEWTON_TOL {
            Ok(v)
        } else {
            Err(SolveError::Diverged {
                at: t.to_string(),
                residual,
            })
        }
    }

    pub fn theta_at(&self, (a, p): TimeIndex, v: &[f64]) -> Result<f64, SolveError> {
        if p > self.order {
            return Err(SolveError::OutOfRange(time_label((a, p))));
        }
        Ok(self.theta[p][a].at(v)?)
    }

    pub fn omega_at(
        &self,
        (a, p): TimeIndex,
        (b, q): TimeIndex,
        v: &[f64],
    ) -> Result<f64, SolveError> {
        let c = self.omega.get(&(a, p, b, q)).ok_or_else(|| {
            SolveError::OutOfRange(format!(
                "omega[{};{}] (order {})",
                time_label((a, p)),
                time_label((b, q)),
                self.omega_order
            ))
        })?;
        Ok(c.at(v)?)
    }

    /// `1/2 sum t~ t~ Omega(v)`.
    pub fn log_tau_at(&self, t: &TimePoint, v: &[f64]) -> Result<f64, SolveError> {
        let tt = self.tilde(t);
        let mut s = 0.0;
        for (&i, &x) in &tt {
            for (&j, &y) in &tt {
                s += x * y * self.omega_at(i, j, v)?;
            }
        }
        Ok(0.5 * s)
    }

    pub fn log_tau(&self, t: &TimePoint) -> Result<f64, SolveError> {
        let v = self.solve(t)?;
        self.log_tau_at(t, &v)
    }

    /// `d log tau / d t^i = sum_j t~^j Omega_{i;j}(v)`.
    pub fn dlog_tau_at(&self, t: &TimePoint, v: &[f64], i: TimeIndex) -> Result<f64, SolveError> {
        let mut s = 0.0;
        for (&j, &y) in &self.tilde(t) {
            s += y * self.omega_at(i, j, v)?;
        }
        Ok(s)
    }

    pub fn dlog_tau(&self, t: &TimePoint, i: TimeIndex) -> Result<f64, SolveError> {
        let v = self.solve(t)?;
        self.dlog_tau_at(t, &v, i)
    }

    /// Flow right-hand side `rhs(a; b,q)` at `(v, v_x)`.
    pub fn flow_rhs(
        &self,
        (b, q): TimeIndex,
        v: &[f64],
        vx: &[f64],
    ) -> Result<Vec<f64>, SolveError> {
        let per = self
            .flows
            .get(b)
            .and_then(|x| x.get(q))
            .ok_or_else(|| SolveError::OutOfRange(time_label((b, q))))?;
        let pt = Point::with_jets(v.to_vec(), vx.to_vec());
        per.iter().map(|c| Ok(c.eval(&pt)?)).collect()
    }

    /// `A_{-1}` with time coefficients `coeff` (raw or shifted times).
    pub fn string_operator(
        &self,
        t: &TimePoint,
        coeff: &BTreeMap<TimeIndex, f64>,
    ) -> Result<f64, SolveError> {
        let v = self.solve(t)?;
        let mut s = 0.0;
        for (&(a, p), &c) in coeff {
            if p >= 1 && c != 0.0 {
                s += c * self.dlog_tau_at(t, &v, (a, p - 1))?;
            }
        }
        for (&(a, p), &x) in coeff {
            for (&(b, q), &y) in coeff {
                if p == 0 && q == 0 {
                    s += 0.5 * self.eta[a][b] * x * y;
                }
            }
        }
        Ok(s)
    }
}

/// Central difference of `f` along `dir` at step `h`.
pub fn central<F>(f: &F, t: &TimePoint, dir: &[(TimeIndex, f64)], h: f64) -> Result<f64, SolveError>
where
    F: Fn(&TimePoint) -> Result<f64, SolveError>,
{
    Ok((f(&t.moved(dir, h))? - f(&t.moved(dir, -h))?) / (2.0 * h))
}

/// Richardson-extrapolated central difference, fourth order.
pub fn central4<F>(
    f: &F,
    t: &TimePoint,
    dir: &[(TimeIndex, f64)],
    h: f64,
) -> Result<f64, SolveError>
where
    F: Fn(&TimePoint) -> Result<f64, SolveError>,
{
    let a = central(f, t, dir, h)?;
    let b = central(f, t, dir, h / 2.0)?;
    Ok((4.0 * b - a) / 3.0)
}

pub fn unit(i: TimeIndex) -> Vec<(TimeIndex, f64)> {
    vec![(i, 1.0)]
}

/// Runs `residual(h)` (a max over the grid) at both steps. The residual is
/// the one at the finer step; the ratio must confirm second order unless both
/// are below the rounding floor.
pub fn richardson_check<F>(name: &str, tol: f64, points: usize, residual: F) -> Check
where
    F: Fn(f64) -> Result<f64, SolveError>,
{
    let (r1, r2) = match (residual(STEPS[0]), residual(STEPS[1])) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Check::fail(name, e.to_string()).with_grid(points),
    };
    let c = Check::numeric(name, r2, tol).with_grid(points);
    if r1 < RICHARDSON_FLOOR && r2 < RICHARDSON_FLOOR {
        return c.with_detail("below rounding floor; order not measured");
    }
    let ratio = r1 / r2;
    let ok = (RICHARDSON_RANGE.0..=RICHARDSON_RANGE.1).contains(&ratio);
    c.with_richardson(vec![ratio]).require(
        ok,
        &format!("Richardson ratio {ratio:.3} outside [3.5, 4.5]"),
    )
}

/// Max over the grid of `f` at each point.
pub fn grid_max<F>(grid: &[TimePoint], f: F) -> Result<f64, SolveError>
where
    F: Fn(&TimePoint) -> Result<f64, SolveError>,
{
    let mut m = 0.0f64;
    for t in grid {
        let r = f(t)?;
        if !r.is_finite() {
            return Ok(f64::INFINITY);
        }
        m = m.max(r);
    }
    Ok(m)
}

/// `max_a |d v^a/d t^{b,q} - rhs(a; b,q)|` at one point, with both derivatives
/// by central differences of step `h`.
pub fn pde_residual(
    s: &HodographSolution,
    flow: TimeIndex,
    t: &TimePoint,
    h: f64,
) -> Result<f64, SolveError> {
    let v = s.solve(t)?;
    let vp = s.solve_from(&t.moved(&unit(flow), h), &v)?;
    let vm = s.solve_from(&t.moved(&unit(flow), -h), &v)?;
    let xp = s.solve_from(&t.moved(&unit((0, 0)), h), &v)?;
    let xm = s.solve_from(&t.moved(&unit((0, 0)), -h), &v)?;
    let vx: Vec<f64> = xp
        .iter()
        .zip(&xm)
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect();
    let rhs = s.flow_rhs(flow, &v, &vx)?;
    let mut r = 0.0f64;
    for a in 0..s.n {
        r = r.max(((vp[a] - vm[a]) / (2.0 * h) - rhs[a]).abs());
    }
    Ok(r)
}

pub fn check_pde_residual(
    s: &HodographSolution,
    flow: TimeIndex,
    grid: &[TimePoint],
    tol: f64,
) -> Check {
    richardson_check(
        &format!("pde_residual[{}]", time_label(flow)),
        tol,
        grid.len(),
        |h| grid_max(grid, |t| pde_residual(s, flow, t, h)),
    )
}

/// Second differences of `log tau` and differences of the analytic first
/// derivative against `Omega` for every pair in `dirs`.
pub fn check_tau_contract(
    s: &HodographSolution,
    dirs: &[TimeIndex],
    grid: &[TimePoint],
) -> Vec<Check> {
    let f = |t: &TimePoint| s.log_tau(t);
    let first = richardson_check("tau_first_derivative", 1e-6, grid.len(), |h| {
        grid_max(grid, |t| {
            let v = s.solve(t)?;
            let mut r = 0.0f64;
            for &i in dirs {
                let d = central(&f, t, &unit(i), h)?;
                r = r.max((d - s.dlog_tau_at(t, &v, i)?).abs());
            }
            Ok(r)
        })
    });
    let second = richardson_check("tau_second_derivative", 1e-5, grid.len(), |h| {
        grid_max(grid, |t| {
            let v = s.solve(t)?;
            let mut r = 0.0f64;
            for (k, &i) in dirs.iter().enumerate() {
                for &j in &dirs[k..] {
                    let d = if i == j {
                        (f(&t.moved(&unit(i), h))? - 2.0 * f(t)? + f(&t.moved(&unit(i), -h))?)
                            / (h * h)
                    } else {
                        let g = |a: f64, b: f64| f(&t.moved(&unit(i), a).moved(&unit(j), b));
                        (g(h, h)? - g(h, -h)? - g(-h, h)? + g(-h, -h)?) / (4.0 * h * h)
                    };
                    r = r.max((d - s.omega_at(i, j, &v)?).abs());
                }
            }
            Ok(r)
        })
    });
    let theta = richardson_check("tau_x_derivative_theta", 1e-6, grid.len(), |h| {
        grid_max(grid, |t| {
            let v = s.solve(t)?;
            let mut r = 0.0f64;
            for &i in dirs {
                let g = |t: &TimePoint| s.dlog_tau(t, i);
                let d = central(&g, t, &unit((0, 0)), h)?;
                r = r.max((d - s.theta_at(i, &v)?).abs());
            }
            Ok(r)
        })
    });
    vec![first, second, theta]
}

/// String equation of the topological solution: `A_{-1}(t - c) = 0`.
pub fn check_string_equation(s: &HodographSolution, grid: &[TimePoint], tol: f64) -> Check {
    let r = grid_max(grid, |t| Ok(s.string_operator(t, &s.tilde(t))?.abs()));
    match r {
        Ok(r) => Check::numeric("string_equation", r, tol).with_grid(grid.len()),
        Err(e) => Check::fail("string_equation", e.to_string()),
    }
}
