//! Qualitative-quantitative discrepancy (QQD) for experimental designs that
//! mix categorical and numeric factors.
//!
//! The criterion core is generic over [`Scalar`]: `f64` for everyday use,
//! `f32` when memory matters, and exact [`Rational`] arithmetic for lattice
//! designs, where the closed form, quadratic form, balance form and the
//! balance-pattern bound are all rational.
//!
//! ```
//! use qqd::{CriterionConfig, Design, DesignSpec};
//!
//! let spec = DesignSpec::new(4, 1, 2, vec![4, 2, 2]).unwrap();
//! let d: qqd::Design64 = Design::from_level_rows(spec, &[vec![0, 0, 1], vec![1, 1, 0], vec![2, 0, 0], vec![3, 1, 1]]).unwrap();
//! let v = qqd::discrepancy::qqd_squared(&d, &CriterionConfig::default());
//! assert!((v - 0.1706).abs() < 5e-5);
//! ```

pub mod balance;
pub mod bounds;
pub mod config;
pub mod design;
pub mod discrepancy;
pub mod error;
pub mod fixtures;
pub mod kernel;
pub mod pair_cache;
pub mod reproduce;
pub mod scalar;
pub mod search;

pub use config::CriterionConfig;
pub use design::{Design, DesignSpec};
pub use error::{Error, Result};
pub use scalar::{FloatScalar, Scalar};

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;
pub type Design64 = Design<f64>;
pub type Design32 = Design<f32>;
pub type ExactDesign = Design<Rational>;
pub type Config64 = CriterionConfig<f64>;
pub type ExactConfig = CriterionConfig<Rational>;
