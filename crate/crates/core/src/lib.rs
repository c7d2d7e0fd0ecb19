//! Electric discrete-time quantum walks on the 1D and 2D lattices and the
//! spectral tools that explain their trapping.

pub mod coin;
pub mod error;
pub mod evolve;
pub mod field;
pub mod observe;
pub mod rational;
pub mod spectrum;
pub mod state;

pub use coin::{CoinOperator, Ordering};
pub use error::{Result, WalkError};
pub use evolve::{run, Observer, Walk, WalkSpec, Walker};
pub use field::FieldPhase;
pub use observe::{WidthSeries, Widths};
pub use state::{WalkState, WalkState1D, WalkState2D};
