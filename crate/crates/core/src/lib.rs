//! Nonlinear membrane finite elements with variationally consistent
//! wrinkling models.

pub mod benchmarks;
pub mod case;
pub mod cli;
pub mod constitutive;
pub mod fem;
pub mod io;
pub mod probes;
pub mod run;
pub mod solver;
pub mod sparse;
pub mod tensor2d;
