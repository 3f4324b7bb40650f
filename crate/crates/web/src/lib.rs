//! Browser bindings. Every export returns JSON text; the page in `www/`
//! draws the matrices as grids of phase colours.

use butson::analysis::verify_butson;
use butson::canonical::canonical_form;
use butson::equivalence::aut_group_size;
use butson::format::parse_matrix;
use butson::search::{classify, SearchOptions};
use butson::{Error, LogMatrix, VanishingSet};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest order the page may classify; bigger cells take minutes.
pub const MAX_CLASSIFY_ORDER: usize = 8;
/// Members listed by [`vanishing_json`]; the count is always exact.
pub const MAX_LISTED_MEMBERS: usize = 256;

#[derive(Serialize)]
struct Matrix {
    n: usize,
    q: u8,
    rows: Vec<Vec<u8>>,
}

impl From<&LogMatrix> for Matrix {
    fn from(m: &LogMatrix) -> Self {
        Matrix {
            n: m.ncols(),
            q: m.q(),
            rows: m.to_rows(),
        }
    }
}

#[derive(Serialize)]
struct ClassEntry {
    matrix: Matrix,
    aut: u64,
}

#[derive(Serialize)]
struct Classification {
    n: usize,
    q: u32,
    tree: Vec<u64>,
    classes: Vec<ClassEntry>,
}

#[derive(Serialize)]
struct Orthogonality {
    n: usize,
    q: u32,
    count: usize,
    members: Vec<Vec<u8>>,
}

#[derive(Serialize)]
struct Inspection {
    input: Matrix,
    butson: bool,
    canonical: Matrix,
    aut: Option<u64>,
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

pub fn classify_json(n: usize, q: u32) -> Result<String, Error> {
    if n > MAX_CLASSIFY_ORDER {
        return Err(Error::Precondition(format!(
            "the demo classifies orders up to {MAX_CLASSIFY_ORDER}"
        )));
    }
    let mut opts = SearchOptions::new(n, q);
    opts.jobs = 1;
    let r = classify(&opts)?;
    let classes = r
        .representatives
        .iter()
        .zip(&r.aut_sizes)
        .map(|(m, &aut)| ClassEntry {
            matrix: m.into(),
            aut,
        })
        .collect();
    Ok(json(&Classification {
        n,
        q,
        tree: r.stats.counts,
        classes,
    }))
}

pub fn vanishing_json(n: usize, q: u32) -> Result<String, Error> {
    let set = VanishingSet::generate(n, q)?;
    Ok(json(&Orthogonality {
        n,
        q,
        count: set.len(),
        members: set.members().iter().take(MAX_LISTED_MEMBERS).cloned().collect(),
    }))
}

pub fn inspect_json(text: &str) -> Result<String, Error> {
    let m = parse_matrix(text)?;
    let butson = m.is_square() && verify_butson(&m);
    let aut = if butson { Some(aut_group_size(&m)?) } else { None };
    Ok(json(&Inspection {
        input: (&m).into(),
        butson,
        canonical: (&canonical_form(&m)).into(),
        aut,
    }))
}

fn js(r: Result<String, Error>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn classify_small(n: usize, q: u32) -> Result<String, JsError> {
    js(classify_json(n, q))
}

#[wasm_bindgen]
pub fn orthogonality_set(n: usize, q: u32) -> Result<String, JsError> {
    js(vanishing_json(n, q))
}

#[wasm_bindgen]
pub fn inspect(text: &str) -> Result<String, JsError> {
    js(inspect_json(text))
}
