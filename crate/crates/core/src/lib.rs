//! Quantum-noise projections for degenerate four-wave mixing in a pumped
//! four-level atomic vapor.

pub mod atomvapor;
pub mod constants;
pub mod fwmcoupling;
pub mod mcoracle;
pub mod quantumnoise;
pub mod sweep;
