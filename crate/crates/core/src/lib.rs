#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod ml;
pub mod mmse;
pub mod oracle;
pub mod prior;
pub mod quad;
pub mod sweep;
pub mod verify;

pub use algebra::{Hermitian2, QubitState};
pub use dynamics::{FieldState, FockCutoff, Scenario};
pub use error::{Error, Result};
pub use prior::{Prior, PriorKind, QuadratureRule};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/mmse.md")]
    mod mmse {}
    #[doc = include_str!("../../../book/src/ml.md")]
    mod ml {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
