//! Compiles every chapter of the guide as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/harmonics.md")]
pub mod harmonics {}
#[doc = include_str!("../../../book/src/cubature.md")]
pub mod cubature {}
#[doc = include_str!("../../../book/src/splines.md")]
pub mod splines {}
#[doc = include_str!("../../../book/src/funk.md")]
pub mod funk {}
#[doc = include_str!("../../../book/src/so3.md")]
pub mod so3 {}
#[doc = include_str!("../../../book/src/frames.md")]
pub mod frames {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
