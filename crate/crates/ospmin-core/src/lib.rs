//! Exact symbolic kernel for the Schrödinger model of the minimal
//! representation of `osp(p,q|2n)`.
//!
//! Everything in this crate computes over the scalar ring `Q(i)[√π, 1/√π]`
//! with arbitrary-precision rationals; there is no floating point on any
//! identity-checking path.  The only numeric code lives in [`numeric`],
//! which provides independent double-precision oracles (Bessel evaluation,
//! adaptive quadrature, generating-function coefficient extraction) used to
//! cross-check closed forms.
//!
//! The layers, bottom to top:
//!
//! * [`scalar`] — the coefficient ring, Gamma and Pochhammer evaluation.
//! * [`superpoly`] — supercommutative polynomials in `p+q-2` even and `2n`
//!   odd variables with the orthosymplectic metric, the operators `R²`, `E`,
//!   `Δ`, and reduction modulo the ideal `⟨R²⟩`.
//! * [`operators`] — normally ordered differential operators with
//!   polynomial coefficients: composition, supercommutators, application,
//!   formal adjoints.
//! * [`liealg`] — the spin factor Jordan superalgebra, its TKK Lie
//!   superalgebra, and the representations `π_λ` and `π_C` by differential
//!   operators.
//! * [`harmonics`] — spherical harmonics as exact Laplacian kernels, the
//!   dimension formula, the Fischer decomposition, raising/lowering maps.
//! * [`radial`] — the Bessel-symbol module spanned by `|X|^m K̂_k`,
//!   generalized Laguerre functions, Gegenbauer polynomials, and the radial
//!   calculus for applying differential operators to `poly × radial`
//!   elements on the orbit.
//! * [`minrep`] — the module `W` generated by the K-Bessel symbol: basis,
//!   exact action, decomposition coefficients, the intertwiner into a
//!   tensor product of harmonic spaces, Gelfand–Kirillov growth.
//! * [`orbitfunc`] — the orbit functional in exact closed form and the
//!   sesquilinear form on `W`, with skew-symmetry and Gram checks.
//! * [`fourier`] — the Fourier-conjugated operator table, kernel-of-Δ
//!   criterion and formal adjoints.
//! * [`suites`] — the flat catalog of named verification checks consumed
//!   by the CLI harness.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod context;
pub mod fourier;
pub mod harmonics;
pub mod liealg;
pub mod linalg;
pub mod minrep;
pub mod numeric;
pub mod operators;
pub mod orbitfunc;
pub mod radial;
pub mod scalar;
pub mod suites;
pub mod superpoly;

pub use context::Context;
pub use scalar::{ExactScalar, Rat};
pub use superpoly::{ModelParams, SuperPolynomial};
