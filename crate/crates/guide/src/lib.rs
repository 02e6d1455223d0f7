//! The book's code listings, compiled and run as doc-tests. One module per
//! chapter so a failure points at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/graphs.md")]
pub mod graphs {}
#[doc = include_str!("../../../book/src/modularize.md")]
pub mod modularize {}
#[doc = include_str!("../../../book/src/consensus.md")]
pub mod consensus {}
#[doc = include_str!("../../../book/src/smells.md")]
pub mod smells {}
#[doc = include_str!("../../../book/src/cochange.md")]
pub mod cochange {}
#[doc = include_str!("../../../book/src/evolution.md")]
pub mod evolution {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
