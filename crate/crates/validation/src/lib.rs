//! Independent reference implementations used to validate eqwalk.

pub mod dense;
