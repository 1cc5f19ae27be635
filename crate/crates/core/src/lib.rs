#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod efficiency;
pub mod error;
pub mod export;
pub mod geometry;
pub mod materials;
pub mod propagation;
pub mod special;
pub mod transmission;

pub use error::{Error, ErrorKind, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/materials.md")]
    mod materials {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/transmission.md")]
    mod transmission {}
    #[doc = include_str!("../../../book/src/efficiency.md")]
    mod efficiency {}
    #[doc = include_str!("../../../book/src/propagation.md")]
    mod propagation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
