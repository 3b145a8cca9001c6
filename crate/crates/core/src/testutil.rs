//! Helpers shared by unit tests.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::algebra::MPoly;
use crate::bundled;
use crate::expr::Expr;
use crate::model::{parse_model, KalmanModelSpec, Model, ModelSpec};

pub fn spectral(name: &str) -> ModelSpec {
    spectral_text(bundled::source(name).unwrap())
}

pub fn spectral_text(text: &str) -> ModelSpec {
    match parse_model(text).unwrap() {
        Model::Spectral(s) => s,
        Model::Kalman(_) => panic!("expected spectral form"),
    }
}

pub fn kalman(name: &str) -> KalmanModelSpec {
    match parse_model(bundled::source(name).unwrap()).unwrap() {
        Model::Kalman(k) => k,
        Model::Spectral(_) => panic!("expected Kalman form"),
    }
}

pub fn poly(text: &str, names: &[String]) -> MPoly {
    Expr::parse(text).unwrap().to_mpoly(names).unwrap()
}

pub fn polys(texts: &[&str], names: &[String]) -> Vec<MPoly> {
    texts.iter().map(|t| poly(t, names)).collect()
}

pub fn show(p: &MPoly, names: &[String]) -> String {
    p.display(names).to_string()
}

pub fn kalman_text(text: &str) -> KalmanModelSpec {
    match parse_model(text).unwrap() {
        Model::Kalman(k) => k,
        Model::Spectral(_) => panic!("expected Kalman form"),
    }
}
