//! Spectra of discrete Schrödinger operators `H = Δ + W − Q` on periodic
//! graphs with a guided potential `Q`: periodic along `d` directions and
//! finitely supported across the remaining ones.
//!
//! The pipeline is graph document → [`graph::CylinderModel`] → fiber
//! matrices ([`floquet`]) → spectra ([`spectra`]) → checks ([`theorems`]) →
//! reports ([`report`], [`svg`]). [`cli`] ties it together.

pub mod cli;
pub mod error;
pub mod floquet;
pub mod graph;
pub mod lattice;
pub mod numerics;
pub mod report;
pub mod spectra;
pub mod svg;
pub mod theorems;

pub use error::{Error, Result};
