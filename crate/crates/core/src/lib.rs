//! Semicontraction analysis of Kuramoto-Sakaguchi oscillator networks.

pub mod certificate;
pub mod cli;
pub mod reduction;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod io;
pub mod seminorm;
pub mod sync;
pub mod torus;

pub use error::{Error, Result};
