//! Precomputed per-triple state shared by the verification suites.
//! Everything is built once, up front, and then only read — suites may
//! run over `&Context` from several threads.

use alloc::string::String;

use crate::liealg::tkk::TkkAlgebra;
use crate::minrep::WBasis;
use crate::superpoly::ModelParams;

pub struct Context {
    pub params: ModelParams,
    pub alg: TkkAlgebra,
    /// Basis of `W_{≤ j_max}` when a module-level suite was requested and
    /// the hypotheses hold; `Err` keeps the reason for skip reporting.
    pub wbasis: Result<WBasis, String>,
}

impl Context {
    pub fn new(params: ModelParams, need_w: bool, j_max: i64) -> Context {
        let alg = TkkAlgebra::new(&params);
        let wbasis = if need_w {
            WBasis::build(&params, j_max)
        } else {
            Err(String::from("module basis not requested"))
        };
        Context { params, alg, wbasis }
    }
}
