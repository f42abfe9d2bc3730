//! Chidamber-Kemerer object-oriented metrics with a focus on LCOM cohesion.
//!
//! The pipeline is: [`frontend`] turns source files or class-model documents
//! into [`model::ClassModel`]s, [`model::build_corpus`] links them,
//! [`metrics`] computes one [`metrics::MetricsRecord`] per class, and
//! [`stats`] summarizes a system the way cohesion studies report it.

pub mod cli;
pub mod frontend;
pub mod metrics;
pub mod model;
pub mod stats;

/// Serializes a real rounded to four decimal places.
pub(crate) fn round4<S: serde::Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_to(*value, 4))
}

/// Serializes a real rounded to one decimal place.
pub(crate) fn round1<S: serde::Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_to(*value, 1))
}

pub fn round_to(value: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (value * scale).round() / scale
}
