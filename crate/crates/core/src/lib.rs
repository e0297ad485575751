pub mod asymptotic;
pub mod borel;
pub mod continuation;
pub mod error;
pub mod mp;
pub mod pade;
pub mod pipelines;
pub mod reference;
pub mod series;
pub mod singularity;
pub mod stokes;

pub use error::{Error, Result};
pub use mp::PrecisionContext;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/precision.md")]
    pub mod precision {}
    #[doc = include_str!("../../../book/src/transseries.md")]
    pub mod transseries {}
    #[doc = include_str!("../../../book/src/stokes.md")]
    pub mod stokes {}
    #[doc = include_str!("../../../book/src/asymptotics.md")]
    pub mod asymptotics {}
    #[doc = include_str!("../../../book/src/continuation.md")]
    pub mod continuation {}
    #[doc = include_str!("../../../book/src/singularities.md")]
    pub mod singularities {}
    #[doc = include_str!("../../../book/src/pade.md")]
    pub mod pade {}
    #[doc = include_str!("../../../book/src/borel.md")]
    pub mod borel {}
    #[doc = include_str!("../../../book/src/reference.md")]
    pub mod reference {}
}
