//! The guide in `book/src`, compiled as doc-tests.

#[doc = include_str!("../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../book/src/lattices.md")]
pub mod lattices {}
#[doc = include_str!("../../book/src/root-data.md")]
pub mod root_data {}
#[doc = include_str!("../../book/src/quadratic-forms.md")]
pub mod quadratic_forms {}
#[doc = include_str!("../../book/src/extensions.md")]
pub mod extensions {}
#[doc = include_str!("../../book/src/bd-square.md")]
pub mod bd_square {}
#[doc = include_str!("../../book/src/symbols.md")]
pub mod symbols {}
#[doc = include_str!("../../book/src/doubling.md")]
pub mod doubling {}
#[doc = include_str!("../../book/src/cli.md")]
pub mod cli {}
