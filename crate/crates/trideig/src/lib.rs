//! Everything around the `trideig-core` solvers that needs the standard
//! library: plain-text matrix files ([`io`]), test-matrix generators
//! ([`gen`]), and the accuracy/flop benchmark harness ([`bench`]). The
//! `trideig` binary built from this crate is the command-line driver over
//! all of it.

pub mod bench;
pub mod gen;
pub mod io;
