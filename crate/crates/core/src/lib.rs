//! Numerical verification of the hyperconvex Levi-flat quotient
//! `X = 𝔻×𝔻/Γ` of the bidisk by a genus-2 Fuchsian group acting by
//! `γ·(z, w) = (γz, conj(γ conj w))`.

pub mod calculus;
pub mod cli;
pub mod ergodic;
pub mod error;
pub mod fuchsian;
pub mod hardy;
pub mod mc;
pub mod moebius;
pub mod report;
pub mod suites;
pub mod tube;

pub use error::{Error, Result};
