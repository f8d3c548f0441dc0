//! Exact verification of the transformation rules of both symmetries.

use num_traits::Zero;

use super::{apply_type1, apply_type2, pull_back, HattedTables, Kind, SymmetryMap};
use crate::frobenius::{contravariant_connection, intersection_upper, QMatrix};
use crate::hierarchy::checks::{
    check_bilinear, check_homogeneity, check_normalization, check_r_properties, check_recursion,
    check_unity_descent,
};
use crate::report::Check;
use crate::symring::{Expr, Matrix, Q};

fn first_failure(name: &str, residuals: impl IntoIterator<Item = (String, Expr)>) -> Check {
    for (at, r) in residuals {
        if !r.is_zero() {
            return Check::exact(name, Some((at, r.to_string())));
        }
    }
    Check::pass(name)
}

fn vn_pow(s: &SymmetryMap, k: i32) -> Expr {
    Expr::coord(s.n() - 1)
        .pow(k)
        .expect("v^n is a nonzero symbol")
}

/// Jacobian inverse, unity axiom of the hatted product, and the round trip
/// (type-1 at the old unity, or type-2 applied twice).
pub fn map_checks(s: &SymmetryMap) -> Vec<Check> {
    let n = s.n();
    let mut out = Vec::new();
    let prod = s.jac.mul(&s.jac_inv);
    out.push(first_failure(
        "jacobian_inverse",
        (0..n).flat_map(|a| {
            let prod = &prod;
            (0..n).map(move |b| {
                let want = if a == b { Expr::one() } else { Expr::zero() };
                (format!("({},{})", a + 1, b + 1), prod.get(a, b) - &want)
            })
        }),
    ));

    let st = s.hatted_structure();
    let u = s.hatted_unity();
    out.push(first_failure(
        "hatted_unity",
        (0..n).flat_map(|a| {
            let st = &st;
            (0..n).map(move |b| {
                let want = if a == b { Expr::one() } else { Expr::zero() };
                (
                    format!("chat^{}_({},{})", a + 1, u + 1, b + 1),
                    &st.c_mixed[a][u][b] - &want,
                )
            })
        }),
    ));

    if let Some(target) = &s.target {
        // Third derivatives of the closed form, pulled back, against the
        // parametric chain-rule route.
        let tst = target.structure_tensor();
        let mut res = Vec::new();
        for a in 0..n {
            for b in a..n {
                for g in b..n {
                    match pull_back(s, &tst.c[a][b][g]) {
                        Ok(x) => res.push((
                            format!("chat_{}{}{}", a + 1, b + 1, g + 1),
                            &x - &st.c[a][b][g],
                        )),
                        Err(e) => {
                            out.push(Check::fail("closed_form_structure", e.to_string()));
                            return out;
                        }
                    }
                }
            }
        }
        out.push(first_failure("closed_form_structure", res));
        for c in target.check_all() {
            out.push(Check {
                name: format!("target_{}", c.name),
                ..c
            });
        }
    }

    match s.kind {
        Kind::Type1(_) => {
            let e = &s.source.euler;
            let res = (0..n).map(|a| {
                let mut x = Expr::zero();
                for g in 0..n {
                    if !e.eta_inv[a][g].is_zero() {
                        x += &s.fhat_hessian.get(g, 0).scale(&e.eta_inv[a][g]);
                    }
                }
                (format!("v{}", a + 1), &x - &Expr::coord(a))
            });
            out.push(first_failure("type1_round_trip", res));
            if let Some(target) = &s.target {
                match apply_type1(target, 0) {
                    Ok(back) => {
                        let res: Vec<(String, Expr)> = back
                            .vhat
                            .iter()
                            .enumerate()
                            .map(|(a, x)| {
                                let y = pull_back(s, x).unwrap_or_else(|_| x.clone());
                                (format!("v{}", a + 1), &y - &Expr::coord(a))
                            })
                            .collect();
                        out.push(first_failure("type1_round_trip_closed", res));
                    }
                    Err(e) => out.push(Check::fail("type1_round_trip_closed", e.to_string())),
                }
            }
        }
        Kind::Type2 => {
            let res: Vec<(String, Expr)> = s
                .vhat
                .iter()
                .enumerate()
                .map(|(a, x)| {
                    let y = pull_back(s, x).expect("rational map");
                    (format!("v{}", a + 1), &y - &Expr::coord(a))
                })
                .collect();
            out.push(first_failure("type2_involution", res));
            if let Some(target) = &s.target {
                match apply_type2(target) {
                    Ok(back) => {
                        let f2 = back.fhat_closed.clone().unwrap_or_else(Expr::zero);
                        let diff = &f2 - &s.source.f;
                        let mut res = Vec::new();
                        for a in 0..n {
                            for b in a..n {
                                for g in b..n {
                                    res.push((
                                        format!("d{}d{}d{}", a + 1, b + 1, g + 1),
                                        diff.diff(a).diff(b).diff(g),
                                    ));
                                }
                            }
                        }
                        out.push(first_failure("type2_involution_potential", res));
                    }
                    Err(e) => out.push(Check::fail("type2_involution_potential", e.to_string())),
                }
            }
        }
    }
    out
}

/// Hierarchy relations of the hatted manifold through the hatted derivatives,
/// plus the Omega-hat consistency checks.
pub fn hatted_checks(s: &SymmetryMap, h: &HattedTables) -> Vec<Check> {
    let n = s.n();
    let chart = s.chart();
    let e = &s.target_euler;
    let st = s.hatted_structure();
    let grid = h.grid();
    let r = |k: i64| h.r_matrix(k);
    let u = e.unity;
    let shift = |a: usize, p: usize| {
        if p == 0 {
            e.eta_expr(a, u)
        } else {
            Expr::zero()
        }
    };
    let mut out = vec![
        check_normalization(&chart, e, &grid),
        check_recursion(&chart, &st.c_mixed, &grid),
        check_homogeneity(&chart, e, &grid, &r),
        check_bilinear(&chart, e, &grid, h.order),
        check_unity_descent(&chart, &grid, u, &shift),
    ];
    out.extend(check_r_properties(e, &r, h.r.len()));

    let mut col = Vec::new();
    let mut sym = Vec::new();
    for (&(a, p, b, q), x) in &h.omega {
        if b == u && q == 0 && p <= h.order {
            col.push((format!("({},{})", a + 1, p), x - &h.theta[p][a]));
        }
        if let Some(y) = h.omega(b, q, a, p) {
            sym.push((format!("({},{};{},{})", a + 1, p, b + 1, q), x - y));
        }
    }
    out.push(first_failure("omega_hat_unity_column", col));
    out.push(first_failure("omega_hat_symmetry", sym));

    // Omega-hat_{p-1,q} + Omega-hat_{p,q-1} = gradhat theta-hat . eta^-1 . gradhat theta-hat.
    let grads: Vec<Vec<Vec<Expr>>> = h
        .theta
        .iter()
        .map(|row| row.iter().map(|t| chart.gradient(t)).collect())
        .collect();
    let mut rec = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for p in 0..=h.order {
                for q in 0..=h.order {
                    if p + q == 0 || p + q > h.omega_order + 1 {
                        continue;
                    }
                    let mut lhs = Expr::zero();
                    if p >= 1 {
                        lhs += h.omega(a, p - 1, b, q).unwrap();
                    }
                    if q >= 1 {
                        lhs += h.omega(a, p, b, q - 1).unwrap();
                    }
                    let mut rhs = Expr::zero();
                    for g in 0..n {
                        for k in 0..n {
                            let w = &e.eta_inv[g][k];
                            if !w.is_zero() {
                                rhs += &(&grads[p][a][g] * &grads[q][b][k]).scale(w);
                            }
                        }
                    }
                    rec.push((format!("({},{};{},{})", a + 1, p, b + 1, q), &lhs - &rhs));
                }
            }
        }
    }
    out.push(first_failure("omega_hat_recurrence", rec));
    out
}

/// The eta/c identities of the type-2 symmetry and the hatted metric.
pub fn eta_c_identities(s: &SymmetryMap) -> Vec<Check> {
    let n = s.n();
    let src = s.source.structure_tensor();
    let hat = s.hatted_structure();
    let ji = &s.jac_inv;
    let eta = &s.source.euler.eta;
    let neg_vn2 = -vn_pow(s, -2);

    let mut id1 = Vec::new();
    for a in 0..n {
        for b in a..n {
            for g in b..n {
                let mut rhs = Expr::zero();
                for l in 0..n {
                    for m in 0..n {
                        let lm = ji.get(l, a) * ji.get(m, b);
                        if lm.is_zero() {
                            continue;
                        }
                        for v in 0..n {
                            let c = &src.c[l][m][v];
                            if !c.is_zero() && !ji.get(v, g).is_zero() {
                                rhs += &(&(&lm * ji.get(v, g)) * c);
                            }
                        }
                    }
                }
                let rhs = &neg_vn2 * &rhs;
                id1.push((
                    format!("chat_{}{}{}", a + 1, b + 1, g + 1),
                    &hat.c[a][b][g] - &rhs,
                ));
            }
        }
    }

    let vn2 = vn_pow(s, -2);
    let mut id2 = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let mut rhs = Expr::zero();
            for l in 0..n {
                for m in 0..n {
                    if !eta[l][m].is_zero() {
                        rhs += &(ji.get(l, a) * ji.get(m, b)).scale(&eta[l][m]);
                    }
                }
            }
            let rhs = &vn2 * &rhs;
            id2.push((
                format!("eta_{}{}", a + 1, b + 1),
                &Expr::constant(eta[a][b].clone()) - &rhs,
            ));
        }
    }

    let chart = s.chart();
    let vn = Expr::coord(n - 1);
    let mut id3 = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for m in 0..n {
                let mut lhs = Expr::zero();
                if a == n - 1 {
                    lhs -= &(&vn * ji.get(m, b));
                }
                if b == n - 1 {
                    lhs -= &(&vn * ji.get(m, a));
                }
                let mut rhs = chart.d(ji.get(m, b), a);
                if m == 0 && !eta[a][b].is_zero() {
                    rhs += &vn.scale(&eta[a][b]);
                }
                id3.push((
                    format!("(a,b,mu) = ({},{},{})", a + 1, b + 1, m + 1),
                    &lhs - &rhs,
                ));
            }
        }
    }

    let u = s.hatted_unity();
    let unity_eta = (0..n).flat_map(|a| {
        let hat = &hat;
        (0..n).map(move |b| {
            (
                format!("chat_{}{}{}", u + 1, a + 1, b + 1),
                &hat.c[u][a][b] - &Expr::constant(eta[a][b].clone()),
            )
        })
    });

    vec![
        first_failure("identity_chat", id1),
        first_failure("identity_eta", id2),
        first_failure("identity_second_derivatives", id3),
        first_failure("eta_hat_from_unity", unity_eta.collect::<Vec<_>>()),
    ]
}

fn quadratic_pullback(form: &Matrix, jac: &Matrix) -> Matrix {
    jac.transpose().mul(form).mul(jac)
}

fn qmat_expr(m: &QMatrix) -> Matrix {
    Matrix::from_fn(m.len(), m.len(), |a, b| Expr::constant(m[a][b].clone()))
}

fn matrix_diff(name: &str, a: &Matrix, b: &Matrix) -> Check {
    let n = a.rows();
    first_failure(
        name,
        (0..n).flat_map(|i| {
            (0..n).map(move |j| (format!("({},{})", i + 1, j + 1), a.get(i, j) - b.get(i, j)))
        }),
    )
}

/// Transformation rules of the flat metric and the intersection form.
pub fn metric_rules(s: &SymmetryMap) -> Vec<Check> {
    let n = s.n();
    let src_e = &s.source.euler;
    let src_st = s.source.structure_tensor();
    let g = match s.source.intersection_form() {
        Ok(g) => g,
        Err(e) => return vec![Check::fail("intersection_form", e.to_string())],
    };
    let chart = s.chart();
    let hat_st = s.hatted_structure();
    let he = &s.target_euler;
    let hat_euler: Vec<Expr> = (0..n)
        .map(|a| &s.vhat[a].scale(&he.degree(a)) + &Expr::constant(he.r[a].clone()))
        .collect();
    let ghat_upper = intersection_upper(&hat_st, &hat_euler, &he.eta_inv);
    let ghat = match contravariant_connection(ghat_upper, |e, k| chart.d(e, k)) {
        Ok(x) => x,
        Err(e) => return vec![Check::fail("hatted_intersection_form", e.to_string())],
    };

    match s.kind {
        Kind::Type1(kappa) => {
            let eta_same = if he.eta_inv == src_e.eta_inv {
                Check::pass("eta_hat_upper")
            } else {
                Check::fail("eta_hat_upper", "eta^ab differs")
            };
            let mut gam = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let mut rhs = Expr::zero();
                        for x in 0..n {
                            let k = &src_st.c_mixed[x][kappa][c];
                            if !k.is_zero() {
                                rhs += &(k * &ghat.gamma[a][b][x]);
                            }
                        }
                        gam.push((
                            format!("Gamma^{}{}_{}", a + 1, b + 1, c + 1),
                            &g.gamma[a][b][c] - &rhs,
                        ));
                    }
                }
            }
            vec![
                eta_same,
                matrix_diff("g_hat_upper", &ghat.g_upper, &g.g_upper),
                first_failure("connection_rule", gam),
            ]
        }
        Kind::Type2 => {
            let eta = qmat_expr(&src_e.eta);
            let vn2 = vn_pow(s, -2);
            let eta_rhs = eta.scale(&vn2);
            let eta_lhs = quadratic_pullback(&qmat_expr(&he.eta), &s.jac);
            let g_rhs = g.g_lower.scale(&-vn2);
            let g_lhs = quadratic_pullback(&ghat.g_lower, &s.jac);
            vec![
                matrix_diff("eta_form_pullback", &eta_lhs, &eta_rhs),
                matrix_diff("g_form_pullback", &g_lhs, &g_rhs),
            ]
        }
    }
}

/// `det(chat_abc vhat^c_xhat) (v^n)^n = det(c_abc v^c_x)` with
/// `vhat^c_xhat = -(1/v^n) (d vhat^c / d v^l) v^l_x`.
pub fn genus1_identity(s: &SymmetryMap) -> Check {
    let n = s.n();
    if s.kind != Kind::Type2 {
        return Check::fail("genus1_determinant", "only defined for the type-2 symmetry");
    }
    let src = s.source.structure_tensor();
    let hat = s.hatted_structure();
    let inv_vn = s.vhat[n - 1].clone();
    let vx_hat: Vec<Expr> = (0..n)
        .map(|g| {
            let mut acc = Expr::zero();
            for l in 0..n {
                acc += &(s.jac.get(g, l) * &Expr::jet(l));
            }
            -(&inv_vn * &acc)
        })
        .collect();
    let contract = |c: &Vec<Vec<Vec<Expr>>>, jets: &[Expr]| {
        Matrix::from_fn(n, n, |a, b| {
            let mut acc = Expr::zero();
            for (g, j) in jets.iter().enumerate() {
                if !c[a][b][g].is_zero() {
                    acc += &(&c[a][b][g] * j);
                }
            }
            acc
        })
    };
    let jets: Vec<Expr> = (0..n).map(Expr::jet).collect();
    let lhs = &contract(&hat.c, &vx_hat).det() * &vn_pow(s, n as i32);
    let rhs = contract(&src.c, &jets).det();
    let d = &lhs - &rhs;
    if d.is_zero() {
        Check::pass("genus1_determinant")
    } else {
        Check::exact("genus1_determinant", Some(("det".into(), d.to_string())))
    }
}

/// `Ghat(vhat) = G(v) + (n/24 - 1/2) log v^n`, with `Ghat` written in the
/// hatted symbols.
pub fn g_function_rule(s: &SymmetryMap, g: &Expr, ghat: &Expr) -> Check {
    let n = s.n();
    let lhs = match pull_back(s, ghat) {
        Ok(x) => x,
        Err(e) => return Check::fail("g_function_rule", e.to_string()),
    };
    let coef = Q::new((n as i64).into(), 24.into()) - Q::new(1.into(), 2.into());
    let rhs = g + &Expr::log_of(n - 1).scale(&coef);
    let d = &lhs - &rhs;
    if d.is_zero() {
        Check::pass("g_function_rule")
    } else {
        Check::exact(
            "g_function_rule",
            Some(("Ghat - G - (n/24-1/2) log v^n".into(), d.to_string())),
        )
    }
}
