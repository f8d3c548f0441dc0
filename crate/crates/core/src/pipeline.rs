//! Report assembly shared by the command line and the browser demo.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::frobenius::{FrobError, FrobeniusData};
use crate::hierarchy::checks::source_checks;
use crate::hierarchy::{
    build_omega, build_theta, dump_flows, dump_omega, dump_r, dump_theta, OmegaTable, ThetaTable,
};
use crate::report::Check;
use crate::solutions::{
    check_pde_residual, check_string_equation, check_tau_contract, verify_prop1, verify_prop2,
    verify_prop3, verify_string_covariance, GridSpec, HattedFrame, HodographSolution, TimeIndex,
    TimePoint,
};
use crate::symmetries::identities::{
    eta_c_identities, g_function_rule, genus1_identity, hatted_checks, map_checks, metric_rules,
};
use crate::symmetries::{
    apply_type1, apply_type2, hatted_tables, HattedTables, SymmetryError, SymmetryMap,
};
use crate::symring::fmt_q;

pub const SCHEMA: &str = "wdvv-kit/report-v1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error("input error: {0}")]
    Input(String),
    #[error("ineligible: {0}")]
    Ineligible(String),
    #[error("{0}")]
    Math(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Math(_) => 1,
            RunError::Input(_) => 2,
            RunError::Ineligible(_) => 3,
        }
    }
}

impl From<FrobError> for RunError {
    fn from(e: FrobError) -> Self {
        RunError::Input(e.to_string())
    }
}

impl From<SymmetryError> for RunError {
    fn from(e: SymmetryError) -> Self {
        match e {
            SymmetryError::Ineligible(r) => RunError::Ineligible(r.join("; ")),
            SymmetryError::BadIndex(_) | SymmetryError::OrderTooSmall { .. } => {
                RunError::Input(e.to_string())
            }
            other => RunError::Math(other.to_string()),
        }
    }
}

/// Requested symmetry; `kappa` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Type1 { kappa: usize },
    Type2,
}

impl Symmetry {
    pub fn label(&self) -> String {
        match self {
            Symmetry::Type1 { kappa } => format!("type1(kappa={kappa})"),
            Symmetry::Type2 => "type2".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Selection {
    Map,
    EtaC,
    Metrics,
    Genus1,
    Gfun,
    Prop1,
    Prop2,
    Prop3,
    String,
}

impl Selection {
    pub const ALL: [Selection; 9] = [
        Selection::Map,
        Selection::EtaC,
        Selection::Metrics,
        Selection::Genus1,
        Selection::Gfun,
        Selection::Prop1,
        Selection::Prop2,
        Selection::Prop3,
        Selection::String,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Selection::Map => "map",
            Selection::EtaC => "eta_c",
            Selection::Metrics => "metrics",
            Selection::Genus1 => "genus1",
            Selection::Gfun => "gfun",
            Selection::Prop1 => "prop1",
            Selection::Prop2 => "prop2",
            Selection::Prop3 => "prop3",
            Selection::String => "string",
        }
    }

    pub fn from_name(s: &str) -> Option<Selection> {
        Selection::ALL.into_iter().find(|x| x.name() == s)
    }

    /// Whether the selection makes sense for `sym`.
    pub fn applies(&self, sym: Symmetry) -> bool {
        let t2 = sym == Symmetry::Type2;
        match self {
            Selection::Prop1 => !t2,
            Selection::EtaC
            | Selection::Genus1
            | Selection::Gfun
            | Selection::Prop2
            | Selection::Prop3 => t2,
            _ => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Section {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Section {
    pub fn new(name: &str, checks: Vec<Check>) -> Self {
        Section {
            name: name.to_string(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub manifold: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    pub passed: bool,
    pub notes: Vec<String>,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(command: &str, manifold: &str) -> Self {
        Report {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            manifold: manifold.to_string(),
            order: None,
            symmetry: None,
            grid: None,
            passed: true,
            notes: Vec::new(),
            sections: Vec::new(),
        }
    }

    pub fn push(&mut self, s: Section) {
        self.passed &= s.passed;
        self.sections.push(s);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "# {} {}: {verdict}\n", self.command, self.manifold);
        let _ = writeln!(s, "- schema: `{}`", self.schema);
        if let Some(o) = self.order {
            let _ = writeln!(s, "- order: {o}");
        }
        if let Some(x) = &self.symmetry {
            let _ = writeln!(s, "- symmetry: {x}");
        }
        if let Some(g) = &self.grid {
            let _ = writeln!(s, "- grid: `{g}`");
        }
        for n in &self.notes {
            let _ = writeln!(s, "- note: {n}");
        }
        for sec in &self.sections {
            let v = if sec.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "\n## {} ({v})\n", sec.name);
            let _ = writeln!(
                s,
                "| check | result | max residual | tolerance | grid | Richardson | detail |"
            );
            let _ = writeln!(s, "|---|---|---|---|---|---|---|");
            for c in &sec.checks {
                let opt = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.3e}"));
                let rich: Vec<String> = c.richardson.iter().map(|r| format!("{r:.4}")).collect();
                let mut detail = c.detail.clone().unwrap_or_default();
                if let Some(r) = &c.residual {
                    detail = format!("{detail} residual `{r}`").trim().to_string();
                }
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} | {} |",
                    c.name,
                    if c.passed { "pass" } else { "FAIL" },
                    opt(c.max_residual),
                    opt(c.tolerance),
                    c.grid_points.map_or(String::new(), |g| g.to_string()),
                    rich.join(", "),
                    detail.replace('|', "\\|"),
                );
            }
        }
        s
    }
}

/// Axiom checks, with type-2 eligibility as a note.
pub fn run_check(m: &FrobeniusData) -> Report {
    let mut r = Report::new("check", &m.name);
    r.push(Section::new("axioms", m.check_all()));
    let el = m.check_type2_eligibility();
    r.notes.push(if el.eligible {
        "type-2: eligible".to_string()
    } else {
        format!("type-2: ineligible: {}", el.reasons.join("; "))
    });
    r
}

fn require_axioms(m: &FrobeniusData) -> Result<(), RunError> {
    if let Some(c) = m.check_all().into_iter().find(|c| !c.passed) {
        let at = c.detail.unwrap_or_default();
        let res = c.residual.unwrap_or_default();
        return Err(RunError::Math(format!(
            "axiom check {} failed at {at}: {res}",
            c.name
        )));
    }
    Ok(())
}

pub fn build_tables(m: &FrobeniusData, order: usize) -> Result<(ThetaTable, OmegaTable), RunError> {
    if order == 0 {
        return Err(RunError::Input("order must be at least 1".into()));
    }
    require_axioms(m)?;
    let t = build_theta(m, order).map_err(|e| RunError::Math(e.to_string()))?;
    let o = build_omega(&t, &m.euler).map_err(|e| RunError::Math(e.to_string()))?;
    Ok((t, o))
}

/// Text dumps of a hierarchy build.
#[derive(Clone, Debug, PartialEq)]
pub struct Dumps {
    pub theta: String,
    pub r: String,
    pub omega: String,
    pub flows: String,
}

pub fn run_hierarchy(m: &FrobeniusData, order: usize) -> Result<(Report, Dumps), RunError> {
    let (t, o) = build_tables(m, order)?;
    let f = crate::hierarchy::flows(&t, &m.euler).map_err(|e| RunError::Math(e.to_string()))?;
    let dumps = Dumps {
        theta: dump_theta(&t),
        r: dump_r(&t),
        omega: dump_omega(&o),
        flows: dump_flows(&f),
    };
    let mut r = Report::new("hierarchy", &m.name);
    r.order = Some(order);
    r.push(Section::new(
        "hierarchy",
        source_checks(m, &t, &o, order.min(2)),
    ));
    r.notes.extend(t.normalization_choices.iter().cloned());
    Ok((r, dumps))
}

pub fn apply(m: &FrobeniusData, sym: Symmetry) -> Result<SymmetryMap, RunError> {
    require_axioms(m)?;
    Ok(match sym {
        Symmetry::Type1 { kappa } => {
            if kappa == 0 || kappa > m.n() {
                return Err(RunError::Input(format!(
                    "kappa must be in 1..={}, got {kappa}",
                    m.n()
                )));
            }
            apply_type1(m, kappa - 1)?
        }
        Symmetry::Type2 => apply_type2(m)?,
    })
}

/// Human-readable description of the hatted manifold.
pub fn describe_map(s: &SymmetryMap, h: Option<&HattedTables>) -> String {
    let mut out = String::new();
    for (a, e) in s.vhat.iter().enumerate() {
        let _ = writeln!(out, "vhat{} = {e}", a + 1);
    }
    match (&s.fhat_closed, &s.fhat_param) {
        (Some(f), _) => {
            let _ = writeln!(out, "Fhat = {f}");
        }
        (None, Some(f)) => {
            let _ = writeln!(out, "Fhat(v) = {f}");
        }
        (None, None) => {
            for a in 0..s.n() {
                for b in a..s.n() {
                    let _ = writeln!(
                        out,
                        "d2Fhat[{},{}](v) = {}",
                        a + 1,
                        b + 1,
                        s.fhat_hessian.get(a, b)
                    );
                }
            }
        }
    }
    let e = &s.target_euler;
    let qs = |v: &[crate::symring::Q]| v.iter().map(fmt_q).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "d = {}", fmt_q(&e.d));
    let _ = writeln!(out, "mu = {}", qs(&e.mu));
    let _ = writeln!(out, "r = {}", qs(&e.r));
    let _ = writeln!(out, "unity = v{}", e.unity + 1);
    if let Some(h) = h {
        let mut any = false;
        for (k, mat) in h.r.iter().enumerate() {
            for (a, row) in mat.iter().enumerate() {
                for (b, x) in row.iter().enumerate() {
                    if !num_traits::Zero::is_zero(x) {
                        any = true;
                        let _ = writeln!(out, "(Rhat{})^{}_{} = {}", k + 1, a + 1, b + 1, fmt_q(x));
                    }
                }
            }
        }
        if !any {
            let _ = writeln!(out, "Rhat = 0");
        }
        for (p, row) in h.theta.iter().enumerate() {
            for (a, th) in row.iter().enumerate() {
                let _ = writeln!(out, "thetahat[{},{}](v) = {th}", a + 1, p);
            }
        }
    }
    out
}

pub fn run_transform(
    m: &FrobeniusData,
    sym: Symmetry,
    order: usize,
) -> Result<(Report, String), RunError> {
    let s = apply(m, sym)?;
    let (t, o) = build_tables(m, order)?;
    let h = hatted_tables(&s, &t, &o).map_err(RunError::from)?;
    let mut r = Report::new("transform", &m.name);
    r.order = Some(order);
    r.symmetry = Some(sym.label());
    r.push(Section::new("map", map_checks(&s)));
    r.push(Section::new("hatted_hierarchy", hatted_checks(&s, &h)));
    r.notes.extend(h.normalization_choices.iter().cloned());
    Ok((r, describe_map(&s, Some(&h))))
}

/// Default grid, varying `x`, `t^{n,0}` and `t^{1,1}`. Type-2 needs
/// `v^n != 0`, so it is centred at `x = 0.5`, `t^{a,0} = 1` for `a >= 2`;
/// type-1 is centred at the origin.
pub fn default_grid(n: usize, sym: Symmetry) -> GridSpec {
    let center = match sym {
        Symmetry::Type1 { .. } => vec![((0, 0), 0.0)],
        Symmetry::Type2 => {
            let mut c = vec![((0, 0), 0.5)];
            c.extend((1..n).map(|a| ((a, 0), 1.0)));
            c
        }
    };
    let mut axes = vec![(0, 0)];
    if n >= 2 {
        axes.push((n - 1, 0));
    }
    axes.push((0, 1));
    GridSpec::new(&center, &axes, 0.01, 3)
}

/// Newton seed at the grid centre: `v^a ~ t^{a,0}`.
pub fn seed_for(n: usize, g: &GridSpec) -> Vec<f64> {
    (0..n)
        .map(|a| g.center.get(&(a, 0)).copied().unwrap_or(0.0))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyRequest {
    pub order: usize,
    pub symmetry: Symmetry,
    pub selection: Vec<Selection>,
    pub grid: Option<GridSpec>,
}

/// Everything a verification section needs, built once.
pub struct VerifyContext {
    pub manifold: FrobeniusData,
    pub request: VerifyRequest,
    pub theta: ThetaTable,
    pub omega: OmegaTable,
    pub map: SymmetryMap,
    pub hatted: HattedTables,
    pub solution: HodographSolution,
    pub grid_spec: GridSpec,
    pub grid: Vec<TimePoint>,
    pub notes: Vec<String>,
}

impl VerifyContext {
    pub fn new(m: &FrobeniusData, req: VerifyRequest) -> Result<Self, RunError> {
        for sel in &req.selection {
            if !sel.applies(req.symmetry) {
                return Err(RunError::Ineligible(format!(
                    "{} does not apply to {}",
                    sel.name(),
                    req.symmetry.label()
                )));
            }
            if *sel == Selection::Gfun && (m.g.is_none() || m.ghat.is_none()) {
                return Err(RunError::Ineligible(
                    "gfun needs G and Ghat in the manifold file".into(),
                ));
            }
        }
        let map = apply(m, req.symmetry)?;
        let (theta, omega) = build_tables(m, req.order)?;
        let hatted = hatted_tables(&map, &theta, &omega).map_err(RunError::from)?;
        let grid_spec = req
            .grid
            .clone()
            .unwrap_or_else(|| default_grid(m.n(), req.symmetry));
        for &(a, p) in grid_spec.center.keys().chain(&grid_spec.axes) {
            if a >= m.n() || p > req.order {
                return Err(RunError::Input(format!(
                    "grid time ({},{}) outside n = {} or order {}",
                    a + 1,
                    p,
                    m.n(),
                    req.order
                )));
            }
        }
        let solution = HodographSolution::new(m, &theta, &omega, seed_for(m.n(), &grid_spec))
            .map_err(|e| RunError::Math(e.to_string()))?;
        let grid = grid_spec.points();
        let mut notes = vec![
            "log tau is the quadratic Omega-form representative; tau is fixed only up to exp(linear)".to_string(),
        ];
        notes.extend(hatted.normalization_choices.iter().cloned());
        Ok(VerifyContext {
            manifold: m.clone(),
            request: req,
            theta,
            omega,
            map,
            hatted,
            solution,
            grid_spec,
            grid,
            notes,
        })
    }

    fn frame(&self) -> HattedFrame<'_> {
        HattedFrame::new(&self.solution, &self.map, &self.hatted)
    }

    /// Flows and tau contract of the source solution on the grid.
    pub fn solution_section(&self) -> Section {
        let n = self.manifold.n();
        let top = self.request.order.saturating_sub(1).min(2);
        let mut checks = Vec::new();
        for q in 0..=top {
            for b in 0..n {
                checks.push(check_pde_residual(&self.solution, (b, q), &self.grid, 1e-6));
            }
        }
        let dirs: Vec<TimeIndex> = (0..=1.min(self.omega.order / 2))
            .flat_map(|p| (0..n).map(move |a| (a, p)))
            .collect();
        checks.extend(check_tau_contract(&self.solution, &dirs, &self.grid));
        checks.push(check_string_equation(&self.solution, &self.grid, 1e-8));
        Section::new("solution", checks)
    }

    pub fn section(&self, sel: Selection) -> Section {
        let s = &self.map;
        let checks = match sel {
            Selection::Map => {
                let mut c = map_checks(s);
                c.extend(hatted_checks(s, &self.hatted));
                c
            }
            Selection::EtaC => eta_c_identities(s),
            Selection::Metrics => metric_rules(s),
            Selection::Genus1 => vec![genus1_identity(s)],
            Selection::Gfun => match (&self.manifold.g, &self.manifold.ghat) {
                (Some(g), Some(gh)) => vec![g_function_rule(s, g, gh)],
                _ => vec![Check::fail("g_function_rule", "G or Ghat missing")],
            },
            Selection::Prop1 => verify_prop1(&self.frame(), &self.grid),
            Selection::Prop2 => verify_prop2(&self.frame(), &self.grid),
            Selection::Prop3 => verify_prop3(&self.frame(), &self.grid),
            Selection::String => verify_string_covariance(&self.frame(), &self.grid),
        };
        Section::new(sel.name(), checks)
    }

    pub fn report(&self, sections: Vec<Section>) -> Report {
        let mut r = Report::new("verify", &self.manifold.name);
        r.order = Some(self.request.order);
        r.symmetry = Some(self.request.symmetry.label());
        r.grid = Some(self.grid_spec.describe());
        r.notes = self.notes.clone();
        for s in sections {
            r.push(s);
        }
        r
    }
}

/// Every selection applicable to `sym` (gfun only with G data).
pub fn all_selections(m: &FrobeniusData, sym: Symmetry) -> Vec<Selection> {
    Selection::ALL
        .into_iter()
        .filter(|s| s.applies(sym))
        .filter(|s| *s != Selection::Gfun || (m.g.is_some() && m.ghat.is_some()))
        .collect()
}

/// Sequential verification run.
pub fn run_verify(m: &FrobeniusData, req: VerifyRequest) -> Result<Report, RunError> {
    let ctx = VerifyContext::new(m, req)?;
    let mut sections = vec![ctx.solution_section()];
    sections.extend(ctx.request.selection.iter().map(|&s| ctx.section(s)));
    Ok(ctx.report(sections))
}

/// Named bundled examples with one-line summaries.
pub fn examples() -> BTreeMap<&'static str, String> {
    crate::frobenius::bundled_names()
        .into_iter()
        .map(|n| {
            let src = crate::frobenius::bundled_source(n).unwrap_or_default();
            let first = src
                .lines()
                .find_map(|l| l.strip_prefix('#').map(|x| x.trim().to_string()))
                .unwrap_or_default();
            (n, first)
        })
        .collect()
}
