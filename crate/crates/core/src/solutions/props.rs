use std::collections::BTreeMap;

use super::{
    central, central4, grid_max, richardson_check, time_label, unit, HodographSolution, SolveError,
    TimeIndex, TimePoint, STEPS,
};
use crate::report::Check;
use crate::symmetries::{HattedTables, Kind, SymmetryMap, TimeImage};
use crate::symring::{q_to_f64, Compiled};

type Dir = Vec<(TimeIndex, f64)>;

/// Hatted hierarchy data along a source solution, with the hatted vector
/// fields realised as directions in the source time space.
pub struct HattedFrame<'a> {
    pub s: &'a HodographSolution,
    pub map: &'a SymmetryMap,
    pub tables: &'a HattedTables,
    n: usize,
    unity: usize,
    vhat: Vec<Compiled>,
    /// `[q][b][g] = d thetahat_{b,q} / d vhat^g`.
    theta_hat_grad: Vec<Vec<Vec<Compiled>>>,
    omega_hat: BTreeMap<(usize, usize, usize, usize), Compiled>,
    eta_hat: Vec<Vec<f64>>,
    eta_hat_inv: Vec<Vec<f64>>,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

impl<'a> HattedFrame<'a> {
    pub fn new(s: &'a HodographSolution, map: &'a SymmetryMap, tables: &'a HattedTables) -> Self {
        let n = map.n();
        let chart = map.chart();
        let theta_hat_grad = tables
            .theta
            .iter()
            .map(|row| {
                row.iter()
                    .map(|th| (0..n).map(|g| Compiled::new(&chart.d(th, g))).collect())
                    .collect()
            })
            .collect();
        let to_f = |m: &Vec<Vec<crate::symring::Q>>| -> Vec<Vec<f64>> {
            m.iter().map(|r| r.iter().map(q_to_f64).collect()).collect()
        };
        HattedFrame {
            s,
            map,
            tables,
            n,
            unity: map.hatted_unity(),
            vhat: map.vhat.iter().map(Compiled::new).collect(),
            theta_hat_grad,
            omega_hat: tables
                .omega
                .iter()
                .map(|(&k, e)| (k, Compiled::new(e)))
                .collect(),
            eta_hat: to_f(&map.target_euler.eta),
            eta_hat_inv: to_f(&map.target_euler.eta_inv),
        }
    }

    fn is_type2(&self) -> bool {
        matches!(self.map.kind, Kind::Type2)
    }

    /// The hatted spatial direction index `(unity, 0)`.
    pub fn space(&self) -> TimeIndex {
        (self.unity, 0)
    }

    /// `d/d that^{a,p}` at `t` as a direction in source times.
    pub fn direction(&self, v: &[f64], i: TimeIndex) -> Result<Dir, SolveError> {
        let vn = v[self.n - 1];
        match self.map.time_image(i.0, i.1) {
            TimeImage::Space => Ok(unit((0, 0))),
            TimeImage::HatSpace => Ok(vec![((0, 0), -1.0 / vn)]),
            TimeImage::Time { sign, index, order } => {
                if order > self.s.order {
                    return Err(SolveError::NoImage(time_label(i)));
                }
                let sg = f64::from(sign);
                if self.is_type2() {
                    let th = self.s.theta_at((index, order), v)?;
                    Ok(vec![((index, order), sg), ((0, 0), -sg * th / vn)])
                } else {
                    Ok(vec![((index, order), sg)])
                }
            }
        }
    }

    /// Value of `that^{a,p}` at `t`.
    pub fn hatted_time(&self, t: &TimePoint, v: &[f64], i: TimeIndex) -> Result<f64, SolveError> {
        Ok(match self.map.time_image(i.0, i.1) {
            TimeImage::Space => t.x(),
            TimeImage::HatSpace => -self.s.dlog_tau_at(t, v, (0, 0))?,
            TimeImage::Time { sign, index, order } => f64::from(sign) * t.get((index, order)),
        })
    }

    pub fn log_tau_hat(&self, t: &TimePoint) -> Result<f64, SolveError> {
        let v = self.s.solve(t)?;
        let lt = self.s.log_tau_at(t, &v)?;
        if self.is_type2() {
            Ok(t.x() * self.s.dlog_tau_at(t, &v, (0, 0))? - lt)
        } else {
            Ok(lt)
        }
    }

    /// Shift of the transformed topological solution.
    pub fn transported_shift(&self) -> BTreeMap<TimeIndex, f64> {
        match self.map.kind {
            Kind::Type1(_) => BTreeMap::from([((0, 1), 1.0)]),
            Kind::Type2 => BTreeMap::from([((self.n - 1, 0), -1.0)]),
        }
    }

    /// Hatted indices `(a, p)` with `p <= max_p` whose directions exist.
    pub fn directions_upto(&self, max_p: usize) -> Vec<TimeIndex> {
        let v = self.s.seed.clone();
        (0..=max_p)
            .flat_map(|p| (0..self.n).map(move |a| (a, p)))
            .filter(|&i| self.direction(&v, i).is_ok())
            .collect()
    }

    /// Hatted directions up to `max_p` along which `log tau` stays within the
    /// source Omega order.
    pub fn tau_directions(&self, max_p: usize) -> Vec<TimeIndex> {
        let active = self.s.shift.keys().map(|i| i.1).max().unwrap_or(0);
        self.directions_upto(max_p)
            .into_iter()
            .filter(|&(a, p)| match self.map.time_image(a, p) {
                TimeImage::Time { order, .. } => order + order.max(active) <= self.s.omega_order(),
                _ => true,
            })
            .collect()
    }

    /// Hatted flows checkable with the built hatted order.
    pub fn flows(&self) -> Vec<TimeIndex> {
        let top = self.tables.order.saturating_sub(1);
        self.directions_upto(top)
            .into_iter()
            .filter(|&i| i != self.space())
            .collect()
    }

    fn vhat_at(&self, v: &[f64]) -> Result<Vec<f64>, SolveError> {
        self.vhat.iter().map(|c| Ok(c.at(v)?)).collect()
    }

    /// `max_a |D_{b,q} vhat^a - etahat^{ag} D_xhat (d thetahat_{b,q+1} / d vhat^g)|`.
    pub fn flow_residual(&self, flow: TimeIndex, t: &TimePoint, h: f64) -> Result<f64, SolveError> {
        let s = self.s;
        let v = s.solve(t)?;
        let d = self.direction(&v, flow)?;
        let dx = self.direction(&v, self.space())?;
        let at = |dir: &Dir, step: f64| s.solve_from(&t.moved(dir, step), &v);
        let (lp, lm) = (self.vhat_at(&at(&d, h)?)?, self.vhat_at(&at(&d, -h)?)?);
        let (xp, xm) = (at(&dx, h)?, at(&dx, -h)?);
        let (b, q) = flow;
        let grads = self
            .theta_hat_grad
            .get(q + 1)
            .ok_or_else(|| SolveError::NoImage(time_label(flow)))?;
        let mut dg = vec![0.0; self.n];
        for (g, x) in dg.iter_mut().enumerate() {
            *x = (grads[b][g].at(&xp)? - grads[b][g].at(&xm)?) / (2.0 * h);
        }
        let mut r = 0.0f64;
        for a in 0..self.n {
            let lhs = (lp[a] - lm[a]) / (2.0 * h);
            let rhs: f64 = (0..self.n).map(|g| self.eta_hat_inv[a][g] * dg[g]).sum();
            r = r.max((lhs - rhs).abs());
        }
        Ok(r)
    }

    fn flow_checks(&self, grid: &[TimePoint], tol: f64) -> Vec<Check> {
        self.flows()
            .into_iter()
            .map(|f| {
                richardson_check(
                    &format!("hatted_flow[{}]", time_label(f)),
                    tol,
                    grid.len(),
                    |h| grid_max(grid, |t| self.flow_residual(f, t, h)),
                )
            })
            .collect()
    }

    /// `D_i log tauhat` with coefficients frozen at `t`.
    fn d_log_tau_hat(&self, t: &TimePoint, i: TimeIndex, h: f64) -> Result<f64, SolveError> {
        let v = self.s.solve(t)?;
        let d = self.direction(&v, i)?;
        central(&|p: &TimePoint| self.log_tau_hat(p), t, &d, h)
    }

    fn d4_log_tau_hat(&self, t: &TimePoint, i: TimeIndex, h: f64) -> Result<f64, SolveError> {
        let v = self.s.solve(t)?;
        let d = self.direction(&v, i)?;
        central4(&|p: &TimePoint| self.log_tau_hat(p), t, &d, h)
    }

    /// `Ahat_{-1}` at hatted times shifted by `shift`.
    pub fn string_operator_hat(
        &self,
        t: &TimePoint,
        shift: &BTreeMap<TimeIndex, f64>,
    ) -> Result<f64, SolveError> {
        let v = self.s.solve(t)?;
        let top = self.s.order + 1;
        let mut times = BTreeMap::new();
        for p in 0..=top {
            for a in 0..self.n {
                let i = (a, p);
                let val = match self.map.time_image(a, p) {
                    TimeImage::Time { order, .. } if order > self.s.order => 0.0,
                    _ => self.hatted_time(t, &v, i)?,
                } - shift.get(&i).copied().unwrap_or(0.0);
                if val != 0.0 {
                    times.insert(i, val);
                }
            }
        }
        let mut s = 0.0;
        for (&(a, p), &c) in &times {
            if p >= 1 {
                s += c * self.d4_log_tau_hat(t, (a, p - 1), STEPS[0])?;
            }
        }
        for (&(a, p), &x) in &times {
            for (&(b, q), &y) in &times {
                if p == 0 && q == 0 {
                    s += 0.5 * self.eta_hat[a][b] * x * y;
                }
            }
        }
        Ok(s)
    }
}

/// Hatted flows of a type-1 map along a source solution, the spatial flow,
/// and `log tauhat = log tau` under the relabeling.
pub fn verify_prop1(f: &HattedFrame, grid: &[TimePoint]) -> Vec<Check> {
    let mut out = f.flow_checks(grid, 1e-6);
    let sp = f.space();
    let spatial = grid_max(grid, |t| {
        let v = f.s.solve(t)?;
        let g = |p: &TimePoint| f.vhat_at(&f.s.solve_from(p, &v)?);
        let d = unit(sp);
        let dxh = f.direction(&v, sp)?;
        let h = STEPS[0];
        let (a, b) = (g(&t.moved(&d, h))?, g(&t.moved(&d, -h))?);
        let (c, e) = (g(&t.moved(&dxh, h))?, g(&t.moved(&dxh, -h))?);
        Ok((0..f.n)
            .map(|k| ((a[k] - b[k]) - (c[k] - e[k])).abs() / (2.0 * h))
            .fold(0.0, f64::max))
    });
    out.push(match spatial {
        Ok(r) => Check::numeric(format!("hatted_flow[{}]", time_label(sp)), r, 1e-8)
            .with_grid(grid.len()),
        Err(e) => Check::fail("hatted_spatial_flow", e.to_string()),
    });
    let shift = f.transported_shift();
    let mut failure = None;
    for t in grid {
        let r = (|| -> Result<f64, SolveError> {
            let v = f.s.solve(t)?;
            let mut times = BTreeMap::new();
            for &i in t.times.keys() {
                times.insert(i, f.hatted_time(t, &v, i)?);
            }
            for (&i, &c) in &shift {
                *times.entry(i).or_insert(0.0) -= c;
            }
            let mut lt = 0.0;
            for (&i, &x) in &times {
                for (&j, &y) in &times {
                    if x != 0.0 && y != 0.0 {
                        let w = f
                            .omega_hat
                            .get(&(i.0, i.1, j.0, j.1))
                            .ok_or_else(|| SolveError::NoImage(time_label(i)))?;
                        lt += x * y * w.at(&v)?;
                    }
                }
            }
            Ok(0.5 * lt - f.s.log_tau_at(t, &v)?)
        })();
        match r {
            Ok(0.0) => {}
            Ok(d) => {
                failure = Some((t.to_string(), format!("{d:e}")));
                break;
            }
            Err(e) => {
                failure = Some((t.to_string(), e.to_string()));
                break;
            }
        }
    }
    out.push(Check::exact("tau_hat_equals_tau", failure).with_grid(grid.len()));
    out
}

/// Hatted flows of the type-2 map as reciprocal-transformed fields, and the
/// differential of `xhat = -d_x log tau`.
pub fn verify_prop2(f: &HattedFrame, grid: &[TimePoint]) -> Vec<Check> {
    let mut out = f.flow_checks(grid, 1e-6);
    let s = f.s;
    let sources: Vec<TimeIndex> = f
        .tau_directions(f.tables.omega_order)
        .into_iter()
        .filter_map(|i| match f.map.time_image(i.0, i.1) {
            TimeImage::Time { index, order, .. } => Some((index, order)),
            _ => None,
        })
        .collect();
    let xhat = |t: &TimePoint| Ok(-s.dlog_tau(t, (0, 0))?);
    out.push(richardson_check(
        "xhat_differential",
        1e-6,
        grid.len(),
        |h| {
            grid_max(grid, |t| {
                let v = s.solve(t)?;
                let mut r = 0.0f64;
                for &i in &sources {
                    let d = central(&xhat, t, &unit(i), h)?;
                    r = r.max((d + s.theta_at(i, &v)?).abs());
                }
                Ok(r)
            })
        },
    ));
    let dxx = grid_max(grid, |t| {
        let v = s.solve(t)?;
        let d = central4(&xhat, t, &unit((0, 0)), STEPS[0])?;
        Ok((d + v[f.n - 1]).abs())
    });
    out.push(match dxx {
        Ok(r) => Check::numeric("xhat_x_derivative", r, 1e-8).with_grid(grid.len()),
        Err(e) => Check::fail("xhat_x_derivative", e.to_string()),
    });
    out
}

/// Second derivatives of the Legendre-transformed tau function, the mixed
/// x-hat derivatives and the involution.
pub fn verify_prop3(f: &HattedFrame, grid: &[TimePoint]) -> Vec<Check> {
    let s = f.s;
    let mut out = Vec::new();
    let order = f.tables.omega_order;
    let dirs = f.tau_directions(order);
    let pairs: Vec<(TimeIndex, TimeIndex)> = dirs
        .iter()
        .enumerate()
        .flat_map(|(k, &i)| dirs[k..].iter().map(move |&j| (i, j)))
        .filter(|&(i, j)| i.1 + j.1 <= order)
        .collect();
    out.push(richardson_check(
        "tau_hat_second_derivative",
        1e-5,
        grid.len(),
        |h| {
            grid_max(grid, |t| {
                let v = s.solve(t)?;
                let mut r = 0.0f64;
                for &(i, j) in &pairs {
                    let dj = f.direction(&v, i)?;
                    let inner = |p: &TimePoint| f.d_log_tau_hat(p, j, h);
                    let d = central(&inner, t, &dj, h)?;
                    let w = f
                        .omega_hat
                        .get(&(i.0, i.1, j.0, j.1))
                        .ok_or_else(|| SolveError::NoImage(time_label(i)))?
                        .at(&v)?;
                    r = r.max((d - w).abs());
                }
                Ok(r)
            })
        },
    ));
    let dx_log = |t: &TimePoint| s.dlog_tau(t, (0, 0));
    let sp = f.space();
    out.push(richardson_check(
        "lemma_mixed_derivatives",
        1e-6,
        grid.len(),
        |h| {
            grid_max(grid, |t| {
                let v = s.solve(t)?;
                let mut r = 0.0f64;
                for &i in dirs.iter().filter(|&&i| i != sp) {
                    r = r.max(central(&dx_log, t, &f.direction(&v, i)?, h)?.abs());
                }
                Ok(r)
            })
        },
    ));
    let lemma = grid_max(grid, |t| {
        let v = s.solve(t)?;
        Ok((central4(&dx_log, t, &f.direction(&v, sp)?, STEPS[0])? + 1.0).abs())
    });
    out.push(match lemma {
        Ok(r) => Check::numeric("lemma_xhat_x", r, 1e-8).with_grid(grid.len()),
        Err(e) => Check::fail("lemma_xhat_x", e.to_string()),
    });
    let inv = grid_max(grid, |t| {
        let v = s.solve(t)?;
        let d = f.d4_log_tau_hat(t, sp, STEPS[0])?;
        let xhat = -s.dlog_tau_at(t, &v, (0, 0))?;
        let back = xhat * d - f.log_tau_hat(t)?;
        Ok(rel(-d, t.x()).max(rel(back, s.log_tau_at(t, &v)?)))
    });
    out.push(match inv {
        Ok(r) => Check::numeric("legendre_involution", r, 1e-8).with_grid(grid.len()),
        Err(e) => Check::fail("legendre_involution", e.to_string()),
    });
    out
}

/// `Ahat_{-1}(that; tauhat) = A_{-1}(t; tau)`, and for the topological
/// solution the vanishing of both sides at the shifted times.
pub fn verify_string_covariance(f: &HattedFrame, grid: &[TimePoint]) -> Vec<Check> {
    let s = f.s;
    let mut out = Vec::new();
    let cov = grid_max(grid, |t| {
        let a = s.string_operator(t, &t.times)?;
        let ah = f.string_operator_hat(t, &BTreeMap::new())?;
        Ok((a - ah).abs())
    });
    out.push(match cov {
        Ok(r) => Check::numeric("string_covariance", r, 1e-6).with_grid(grid.len()),
        Err(e) => Check::fail("string_covariance", e.to_string()),
    });
    if s.shift == super::topological_shift() {
        let src = grid_max(grid, |t| Ok(s.string_operator(t, &s.tilde(t))?.abs()));
        out.push(match src {
            Ok(r) => Check::numeric("string_equation", r, 1e-8).with_grid(grid.len()),
            Err(e) => Check::fail("string_equation", e.to_string()),
        });
        let shift = f.transported_shift();
        let hat = grid_max(grid, |t| Ok(f.string_operator_hat(t, &shift)?.abs()));
        out.push(match hat {
            Ok(r) => Check::numeric("string_equation_hat", r, 1e-6).with_grid(grid.len()),
            Err(e) => Check::fail("string_equation_hat", e.to_string()),
        });
    }
    out
}
