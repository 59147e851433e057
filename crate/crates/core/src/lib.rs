//! Zero-error distributed compression of the binary arithmetic sum
//! `f(x, y) = x + y` over `{0,1}`-valued sources: explicit k-shot codes,
//! conflict-graph converse quantities, closed-form capacities and the
//! network cut-set bound on the equivalent two-encoder network.

pub mod bitspace;
pub mod capacity;
pub mod cli;
pub mod codec;
pub mod coloring;
pub mod error;
pub mod nfc;
pub mod reproduce;

pub use error::{Error, Result};
