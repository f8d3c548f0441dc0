//! Browser bindings: axiom check, hierarchy dump and symmetry verification
//! on a manifold file pasted into the page.

use wasm_bindgen::prelude::*;

use wdvv_core::frobenius::{bundled_names, bundled_source, parse_manifest, FrobeniusData};
use wdvv_core::pipeline::{
    all_selections, run_check, run_hierarchy, run_transform, run_verify, Symmetry, VerifyRequest,
};

/// Orders above this take too long for an interactive page.
pub const MAX_ORDER: usize = 6;

fn manifold(src: &str) -> Result<FrobeniusData, String> {
    parse_manifest(src).map_err(|e| e.to_string())
}

fn order_ok(order: usize) -> Result<usize, String> {
    if (1..=MAX_ORDER).contains(&order) {
        Ok(order)
    } else {
        Err(format!("order must be between 1 and {MAX_ORDER}"))
    }
}

fn symmetry(kind: &str, kappa: usize) -> Result<Symmetry, String> {
    match kind {
        "type1" => Ok(Symmetry::Type1 { kappa }),
        "type2" => Ok(Symmetry::Type2),
        other => Err(format!("unknown symmetry `{other}`")),
    }
}

#[wasm_bindgen]
pub fn examples() -> Vec<String> {
    bundled_names().into_iter().map(String::from).collect()
}

#[wasm_bindgen]
pub fn example_source(name: &str) -> Option<String> {
    bundled_source(name).map(String::from)
}

/// Axiom report as markdown.
#[wasm_bindgen]
pub fn check(src: &str) -> Result<String, String> {
    Ok(run_check(&manifold(src)?).to_markdown())
}

/// Theta, R, Omega and flow dumps up to `order`.
#[wasm_bindgen]
pub fn hierarchy(src: &str, order: usize) -> Result<String, String> {
    let (_, d) = run_hierarchy(&manifold(src)?, order_ok(order)?).map_err(|e| e.to_string())?;
    Ok(format!("{}\n{}\n{}\n{}", d.theta, d.r, d.omega, d.flows))
}

/// Hatted manifold followed by every applicable verification, as markdown.
#[wasm_bindgen]
pub fn verify(src: &str, kind: &str, kappa: usize, order: usize) -> Result<String, String> {
    let m = manifold(src)?;
    let sym = symmetry(kind, kappa)?;
    let order = order_ok(order)?;
    let (_, text) = run_transform(&m, sym, order).map_err(|e| e.to_string())?;
    let req = VerifyRequest {
        order,
        symmetry: sym,
        selection: all_selections(&m, sym),
        grid: None,
    };
    let report = run_verify(&m, req).map_err(|e| e.to_string())?;
    Ok(format!("```\n{text}```\n\n{}", report.to_markdown()))
}
