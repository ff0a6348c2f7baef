//! Exact cohomology rings of iterated blowups of `P^3`, and the linear maps
//! induced on them by pseudo-isomorphisms.
//!
//! ```
//! use blowup_cohomology::blowup::standard_x;
//! use blowup_cohomology::map::standard_jx;
//!
//! let x = standard_x();
//! let e0 = x.h11_basis_class("E0").unwrap();
//! assert_eq!(x.cube(&e0).unwrap().to_string(), "1");
//! assert!((standard_jx().m11() * standard_jx().m11()).is_identity());
//! ```

pub mod analysis;
pub mod blowup;
pub mod error;
pub mod expr;
pub mod io;
pub mod linalg;
pub mod map;
pub mod rat;
pub mod report;
pub mod ring;

pub use error::{Error, Result};
pub use linalg::{kernel_basis, mat_inverse, solve_linear, RatMatrix, Solution};
pub use map::{PseudoIsoModel, ResolutionData};
pub use rat::Rat;
pub use ring::{H11Class, H22Class, VarietyModel};
