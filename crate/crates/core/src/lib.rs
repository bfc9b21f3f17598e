//! Symbolic engine for mu-prolongations, mu-symmetries and
//! mu-conservation laws of variational problems.

pub mod corpus;
pub mod dsl;
pub mod expr;
pub mod jet;
pub mod matrix;
pub mod mu;
pub mod noether;
pub mod oracle;
pub mod prolong;

// mdbook cannot compile snippets against a crate, so each chapter is pulled in
// as a doc comment and `cargo test --doc` runs its code blocks.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/expressions.md")]
    mod expressions {}
    #[doc = include_str!("../../../book/src/jets.md")]
    mod jets {}
    #[doc = include_str!("../../../book/src/mu-forms.md")]
    mod mu_forms {}
    #[doc = include_str!("../../../book/src/prolongation.md")]
    mod prolongation {}
    #[doc = include_str!("../../../book/src/noether.md")]
    mod noether {}
    #[doc = include_str!("../../../book/src/dsl.md")]
    mod dsl {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
