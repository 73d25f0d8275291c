//! The spin factor Jordan superalgebra, its inner structure algebra, the
//! three-graded TKK Lie superalgebra with exact structure constants, and
//! the realizations `π_λ`, `π_C` and the explicit isomorphism onto the
//! differential-operator model of `osp(p,q|2n)`.

pub mod jordan;
pub mod rep;
pub mod tkk;

pub use jordan::JordanElement;
pub use rep::RepParams;
pub use tkk::{TkkAlgebra, TkkElement};
