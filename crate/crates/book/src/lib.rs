//! Compiles the guide's Rust snippets as doctests.

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/intro.md")]
    pub mod intro {}
    #[doc = include_str!("../../../book/src/density.md")]
    pub mod density {}
    #[doc = include_str!("../../../book/src/intervals.md")]
    pub mod intervals {}
    #[doc = include_str!("../../../book/src/shuffle.md")]
    pub mod shuffle {}
    #[doc = include_str!("../../../book/src/covering.md")]
    pub mod covering {}
    #[doc = include_str!("../../../book/src/adversary.md")]
    pub mod adversary {}
    #[doc = include_str!("../../../book/src/dsl.md")]
    pub mod dsl {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
