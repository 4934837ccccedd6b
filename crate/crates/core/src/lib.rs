//! Closed-form evaluation and numerical verification of a monotone Sobolev
//! map of finite distortion `h: R^3 -> R^3` whose nontrivial fibers are
//! circles, figure-eights and arcs.
//!
//! The crate is `no_std` compatible (it needs `alloc`). The default `std`
//! feature turns on rayon-parallel Monte Carlo strata; results are
//! bit-identical with and without it because every stratum owns its own
//! seeded generator and strata are reduced in index order.
//!
//! Modules:
//!
//! * [`coords`]: cylindrical/Cartesian charts, region tags, square tori.
//! * [`bingmap`]: the map itself, its differential, Jacobian, distortion,
//!   fibers and numerical inverse.
//! * [`exterior`]: exterior algebra in dimension 3, pullbacks and
//!   pushforwards, Monte Carlo checks of the form estimates.
//! * [`quadrature`]: singular Monte Carlo integration of the distortion,
//!   trend fitting, preimage connectivity, box counting.
//! * [`thresholds`]: exact critical exponents.

#![cfg_attr(not(feature = "std"), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod bingmap;
pub mod coords;
mod error;
pub mod exterior;
pub mod linalg;
mod map;
pub mod quadrature;
pub mod sampling;
pub mod thresholds;

pub use error::{Error, Result};
pub use map::{Identity, SmoothMap, SquareFirstCoordinate};

pub use coords::{CartPoint, CylPoint};
pub use linalg::Mat3;

/// Crate version, echoed in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
