//! Exact construction and verification of quadratic Lie conformal algebras
//! built from Gel'fand-Dorfman data.
//!
//! Scalars live in ℚ(i) and every check is exact. The main entry points are
//! [`families::make_family`] for the built-in families,
//! [`conformal::quadratic_from_gd`] for arbitrary GD data, and the checkers in
//! [`gd`], [`conformal`], [`coeff`] and [`analysis`], all of which return a
//! [`Report`].

pub mod analysis;
pub mod basis;
pub mod coeff;
pub mod conformal;
pub mod delta;
pub mod error;
pub mod families;
pub mod gd;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod table;
pub mod window;

pub use basis::{BasisIndex, Element};
pub use conformal::{quadratic_from_gd, BracketPoly, ConformalAlgebra, PolyElement, Var};
pub use delta::{DeltaGroup, DeltaVector};
pub use error::{Error, Result};
pub use families::{make_family, Built, FamilyKind, FamilyParams, GroupHom, SkewForm};
pub use gd::GdStructure;
pub use report::{Report, Status};
pub use scalar::Scalar;
pub use table::Table;
pub use window::Window;
