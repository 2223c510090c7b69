#![allow(dead_code)]

pub mod lp;

use std::path::PathBuf;

use uctmc_core::checker::MeasureSet;
use uctmc_core::model::{parse_model, ParametricCtmc, Valuation};
use uctmc_core::scalar::f64_to_rational;

pub fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

pub fn load_model(file: &str) -> ParametricCtmc {
    let text = std::fs::read_to_string(models_dir().join(file)).unwrap();
    parse_model(&text).unwrap()
}

pub fn load_measures(file: &str) -> MeasureSet {
    let text = std::fs::read_to_string(models_dir().join(file)).unwrap();
    MeasureSet::from_json(&text).unwrap()
}

pub fn valuation(values: &[f64]) -> Valuation {
    values
        .iter()
        .map(|&v| f64_to_rational(v).unwrap())
        .collect()
}

/// SIR model with an arbitrary initial population, same rules as the
/// shipped files.
pub fn sir(s: i64, i: i64) -> ParametricCtmc {
    let text = std::fs::read_to_string(models_dir().join("sir20.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let pop = s + i;
    let vars = doc["variables"].as_array_mut().unwrap();
    for (v, init) in vars.iter_mut().zip([s, i, 0]) {
        v["init"] = init.into();
        v["max"] = pop.into();
    }
    parse_model(&doc.to_string()).unwrap()
}

/// Dense `exp(a)` by scaling and squaring with a Taylor series.
pub fn expm(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let norm = a
        .iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let scale = 2f64.powi(s);
    let b: Vec<Vec<f64>> = a
        .iter()
        .map(|r| r.iter().map(|x| x / scale).collect())
        .collect();
    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..30 {
        term = matmul(&term, &b);
        for r in term.iter_mut() {
            for x in r.iter_mut() {
                *x /= k as f64;
            }
        }
        for i in 0..n {
            for j in 0..n {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        result = matmul(&result, &result);
    }
    result
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] != 0.0 {
                for j in 0..n {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

/// Row vector `pi * exp(q t)`, with the rows of `absorbing` states zeroed.
pub fn propagate(q: &[Vec<f64>], absorbing: &[bool], pi: &[f64], t: f64) -> Vec<f64> {
    let n = q.len();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if absorbing[i] { 0.0 } else { q[i][j] * t })
                .collect()
        })
        .collect();
    let e = expm(&a);
    (0..n)
        .map(|j| (0..n).map(|i| pi[i] * e[i][j]).sum())
        .collect()
}
