//! The guide under `book/src`, compiled so that every Rust snippet in it runs
//! as a doctest against the current library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/link_estimator.md")]
pub mod link_estimator {}

#[doc = include_str!("../../../book/src/cusum_statistic.md")]
pub mod cusum_statistic {}

#[doc = include_str!("../../../book/src/kolmogorov_law.md")]
pub mod kolmogorov_law {}

#[doc = include_str!("../../../book/src/bootstrap.md")]
pub mod bootstrap {}

#[doc = include_str!("../../../book/src/simulation.md")]
pub mod simulation {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
