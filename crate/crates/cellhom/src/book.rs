//! Doc-test bindings for the guide chapters under `book/src`: every code
//! block in the book compiles and runs with `cargo test --doc`, keeping the
//! book and the library in sync.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/tensors.md")]
pub mod tensors {}

#[doc = include_str!("../../../book/src/cells.md")]
pub mod cells {}

#[doc = include_str!("../../../book/src/microsymmetry.md")]
pub mod microsymmetry {}

#[doc = include_str!("../../../book/src/homogenization.md")]
pub mod homogenization {}

#[doc = include_str!("../../../book/src/classes.md")]
pub mod classes {}

#[doc = include_str!("../../../book/src/transport.md")]
pub mod transport {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
