//! Exact counts of plane curves of degree `d` with one node and one further
//! singularity of type `A1`–`A6`, `D4`–`D6` or `E6`, through generic points
//! and lines.
//!
//! Counts are polynomials in `d` with exact rational coefficients. They come
//! from a recursion over lifted spaces whose coefficients are re-derived
//! independently from Chern class data, and whose base cases are one-point
//! counts shipped as a JSON table.
//!
//! ```
//! use curvecount::{BaseTable, Evaluator, Sing};
//!
//! let base = BaseTable::shipped();
//! let mut ev = Evaluator::new(&base);
//! let binodal = ev.final_count(Sing::A1, 0).unwrap();
//! assert_eq!(binodal.poly.to_string(), "9d^4 - 36d^3 + 12d^2 + 81d - 66");
//! assert_eq!(ev.unordered_binodal(0).unwrap().eval_to_int(3), Some(21.into()));
//! ```

pub mod basecases;
pub mod cli;
pub mod cohomring;
pub mod deriver;
mod error;
pub mod exactpoly;
pub mod recursion;

pub use basecases::BaseTable;
pub use error::{Error, Result};
pub use exactpoly::Polynomial;
pub use recursion::{CountKey, Evaluator, Sing, Target};
