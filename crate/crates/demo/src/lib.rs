//! WebAssembly bindings for the browser demo. Every entry point takes
//! plain strings and returns a JSON document.

use branchlab::induction::{block_decomposition_of, descend};
use branchlab::subgroups::{parse_subgroup, Budgets};
use branchlab::wreath::{GroupDef, Portrait};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn group(spec: &str) -> Result<GroupDef, String> {
    GroupDef::builtin(spec).map_err(|e| e.to_string())
}

/// Normal form, triviality, order and first-level data of a word.
pub fn word_info(group_spec: &str, word: &str) -> Result<String, String> {
    let g = group(group_spec)?;
    let w = g.parse_word(word).map_err(|e| e.to_string())?;
    let budgets = Budgets::default();
    let sections: Vec<String> = (0..g.degree()).map(|i| g.render(&g.section1(&w, i))).collect();
    Ok(json!({
        "reduced": g.render(&g.reduce(&w)),
        "trivial": g.is_trivial(&w, budgets.closure_cap),
        "order": g.element_order(&w, 256, budgets.closure_cap),
        "root_perm": g.root_perm(&w),
        "sections": sections,
    })
    .to_string())
}

/// Portrait of a word down to `depth`, as a list of vertices.
pub fn portrait(group_spec: &str, word: &str, depth: usize) -> Result<String, String> {
    let g = group(group_spec)?;
    let w = g.parse_word(word).map_err(|e| e.to_string())?;
    let p = Portrait::from_word(&g, &w).expanded(&g, depth.min(6));
    serde_json::to_string(&p.view(&g)).map_err(|e| e.to_string())
}

/// Transversal certificate and block decomposition of a subgroup given
/// by generator words or block JSON.
pub fn analyze(group_spec: &str, subgroup: &str, max_depth: usize) -> Result<String, String> {
    let g = group(group_spec)?;
    let h = parse_subgroup(&g, subgroup).map_err(|e| e.to_string())?;
    let budgets = Budgets {
        max_depth: max_depth.min(5),
        ..Budgets::default()
    };
    let cert = descend(&h, &budgets);
    let blocks = block_decomposition_of(&cert).ok();
    Ok(json!({ "certificate": cert, "blocks": blocks }).to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = wordInfo)]
pub fn word_info_js(group_spec: &str, word: &str) -> Result<String, JsValue> {
    js(word_info(group_spec, word))
}

#[wasm_bindgen(js_name = portrait)]
pub fn portrait_js(group_spec: &str, word: &str, depth: usize) -> Result<String, JsValue> {
    js(portrait(group_spec, word, depth))
}

#[wasm_bindgen(js_name = analyze)]
pub fn analyze_js(group_spec: &str, subgroup: &str, max_depth: usize) -> Result<String, JsValue> {
    js(analyze(group_spec, subgroup, max_depth))
}
