//! Lower bounds for the growth exponent of difference sets relative to sumsets.
//!
//! The crate is organised bottom-up:
//!
//! * [`wcount`] counts and enumerates bounded simplex sets
//!   `W(m, L, B) = { x in N^m : sum x_i <= L, x_i <= B }`.
//! * [`construct`] maps those sets to integers with a carry-free digit map and
//!   checks sumset/difference-set counting identities exactly.
//! * [`ratefn`] evaluates the Cramér rate function of the uniform law on `{0..B}`.
//! * [`optimize`] maximizes the asymptotic exponent bound over `(a, r, B)`.
//! * [`cli`] wires everything to a command-line interface.

pub mod cli;
pub mod construct;
mod error;
pub mod onedim;
pub mod optimize;
pub mod ratefn;
pub mod wcount;

pub use error::{Error, Result};
