//! Browser bindings for three operations on exact kernels: unrolling a
//! model, uniformizing a row, and composing two stochastic matrices. Each
//! binding wraps a plain function so the logic is testable off the browser.

use mksys_core::knight::uniformize;
use mksys_core::model::{canonical_json, tables_json, ModelFile};
use mksys_core::rational::{format_q, parse_q};
use mksys_core::{FiniteObject, Q, StochKernel};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Rows separated by newlines or `;`, entries by spaces or commas.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<Q>>, String> {
    text.split(['\n', ';'])
        .map(str::trim)
        .filter(|r| !r.is_empty())
        .map(|r| {
            r.split([' ', ',', '\t'])
                .filter(|x| !x.is_empty())
                .map(|x| parse_q(x).map_err(|e| e.to_string()))
                .collect()
        })
        .collect()
}

fn matrix_kernel(rows: Vec<Vec<Q>>, dom_name: &str, cod_name: &str) -> Result<StochKernel, String> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return Err(format!("{dom_name} -> {cod_name}: the matrix is empty"));
    }
    StochKernel::from_dense(FiniteObject::range(n), FiniteObject::range(m), rows).map_err(|e| e.to_string())
}

fn render(k: &StochKernel) -> Vec<Vec<String>> {
    (0..k.dom().size()).map(|i| k.dense_row(i).iter().map(format_q).collect()).collect()
}

/// The joint tables of a model's run, as JSON.
pub fn unroll(model: &str, horizon: usize) -> Result<String, String> {
    let model = ModelFile::parse(model).map_err(|e| e.to_string())?;
    let issues = model.check();
    if let Some(i) = issues.first() {
        return Err(format!("{}: {}", i.entity, i.error));
    }
    let tables = model.unroll_tables(Some(horizon)).map_err(|e| e.to_string())?;
    let system = model.run_system().map_err(|e| e.to_string())?;
    Ok(canonical_json(&tables_json(system, horizon, &tables)))
}

/// Breakpoints of the inverse-CDF partition of one distribution.
pub fn uniformize_row(row: &str) -> Result<String, String> {
    let rows = parse_matrix(row)?;
    if rows.len() != 1 {
        return Err(format!("expected one row, found {}", rows.len()));
    }
    let k = matrix_kernel(rows, "*", "X")?;
    let p = uniformize(&k);
    let cell = &p.cells[0];
    let intervals: Vec<_> = (0..cell.len())
        .map(|j| json!({ "target": j, "from": format_q(&cell.breakpoints[j]), "to": format_q(&cell.breakpoints[j + 1]) }))
        .collect();
    Ok(canonical_json(&json!({ "breakpoints": cell.breakpoints.iter().map(format_q).collect::<Vec<_>>(), "intervals": intervals })))
}

/// The product `f ; g` of two stochastic matrices.
pub fn compose(f: &str, g: &str) -> Result<String, String> {
    let f = matrix_kernel(parse_matrix(f)?, "X", "Y")?;
    let g = parse_matrix(g)?;
    if g.len() != f.cod().size() {
        return Err(format!("f has {} columns but g has {} rows", f.cod().size(), g.len()));
    }
    let g = matrix_kernel(g, "Y", "Z")?;
    let fg = f.compose(&g).map_err(|e| e.to_string())?;
    Ok(canonical_json(&json!({ "rows": render(&fg) })))
}

#[wasm_bindgen(js_name = unrollModel)]
pub fn unroll_model(model: &str, horizon: usize) -> Result<String, JsError> {
    unroll(model, horizon).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = uniformizeRow)]
pub fn uniformize_row_js(row: &str) -> Result<String, JsError> {
    uniformize_row(row).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = composeKernels)]
pub fn compose_kernels(f: &str, g: &str) -> Result<String, JsError> {
    compose(f, g).map_err(|e| JsError::new(&e))
}

/// The bundled example model, so the page has something to start from.
#[wasm_bindgen(js_name = exampleModel)]
pub fn example_model() -> String {
    include_str!("../../cli/models/chain.json").to_string()
}
