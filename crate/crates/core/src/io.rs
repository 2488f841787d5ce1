//! Reading and writing the plain-text complex format.
//!
//! One record per line, `simplex v0 v1 ... vk [weight]`. A trailing token that
//! is not a non-negative integer is the weight, so integral weights are
//! written with a decimal point (`2.0`). Lines starting with `#` are comments.
//! Every record is added together with its faces; a weight given on a record
//! applies to that simplex only.

use std::collections::HashMap;
use std::path::Path;

use crate::complex::{Simplex, WeightedComplex};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_complex_str(text: &str) -> Result<WeightedComplex> {
    let mut facets = Vec::new();
    let mut weights: HashMap<Simplex, (f64, usize)> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens[0] != "simplex" {
            return Err(parse_err(line_no, format!("expected `simplex`, found `{}`", tokens[0])));
        }
        tokens.remove(0);
        let mut weight = None;
        if let Some(last) = tokens.last() {
            if last.parse::<u64>().is_err() {
                let w: f64 = last
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("invalid token `{last}`")))?;
                if !(w > 0.0) || !w.is_finite() {
                    return Err(parse_err(line_no, format!("non-positive weight {last}")));
                }
                weight = Some(w);
                tokens.pop();
            }
        }
        if tokens.is_empty() {
            return Err(parse_err(line_no, "simplex has no vertices"));
        }
        let vertices = tokens
            .iter()
            .map(|t| {
                t.parse::<u64>()
                    .map_err(|_| parse_err(line_no, format!("invalid vertex id `{t}`")))
            })
            .collect::<Result<Vec<u64>>>()?;
        let simplex = Simplex::new(vertices.clone()).map_err(|e| parse_err(line_no, e.to_string()))?;
        if let Some(w) = weight {
            match weights.get(&simplex) {
                Some(&(prev, prev_line)) if prev != w => {
                    return Err(parse_err(
                        line_no,
                        format!("weight {w} for {simplex} conflicts with {prev} on line {prev_line}"),
                    ));
                }
                _ => {
                    weights.insert(simplex, (w, line_no));
                }
            }
        }
        facets.push(vertices);
    }
    WeightedComplex::from_facets(
        facets,
        weights
            .into_iter()
            .map(|(s, (w, _))| (s.vertices().to_vec(), w)),
    )
}

pub fn parse_complex(path: impl AsRef<Path>) -> Result<WeightedComplex> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_complex_str(&text)
}

/// Every simplex with its weight, in a form [`parse_complex_str`] reads back
/// exactly.
pub fn write_complex(k: &WeightedComplex) -> String {
    let mut out = String::new();
    for p in 0..=k.dim() {
        for (s, w) in k.simplices(p).iter().zip(k.weights(p)) {
            out.push_str(&format!("simplex {s} {w:?}\n"));
        }
    }
    out
}
