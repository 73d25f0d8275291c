//! Conjugation of the representation by the formal symbol exchange
//! `∂_k ↦ i x_k`, `x_k ↦ i ∂_k`: the conjugated table, the kernel-of-Δ
//! invariance criterion, formal adjoints of both realizations, and the
//! critical quadratic-ideal constant.
//!
//! No function-level transform is implemented: the exchange acts on
//! operator words, which is all the downstream identities use.

use alloc::string::String;
use alloc::vec::Vec;

use crate::liealg::rep::{jvar, pi_lambda, RepParams};
use crate::liealg::tkk::{TkkAlgebra, TkkElement};
use crate::operators::{euler_op, laplacian_op, r2_op, DifferentialOperator};
use crate::scalar::{rat, ratq, ExactScalar, Rat};
use crate::superpoly::{Metric, ModelParams, SuperPolynomial};

/// Apply the symbol exchange `x_v ↦ i ∂_v`, `∂_v ↦ i x_v` (in dual pairs)
/// to a normally ordered operator and renormalize the order.
pub fn symbol_exchange(metric: &Metric, op: &DifferentialOperator) -> DifferentialOperator {
    let i_unit = ExactScalar::i();
    let sub_x = |v: usize| DifferentialOperator::partial_lower(metric, v).scale(&i_unit);
    let sub_d = |v: usize| {
        // ∂^v = Σ_k β^{vk} ∂_k  ↦  i Σ_k β^{vk} x_k
        let mut poly = SuperPolynomial::zero();
        for k in 0..metric.n_vars() {
            let c = metric.beta_inv(v, k);
            if c != 0 {
                poly = poly.add(
                    &SuperPolynomial::var(metric, k).scale(&ExactScalar::from_int(c)),
                );
            }
        }
        DifferentialOperator::mult(metric, &poly).scale(&i_unit)
    };
    op.substitute_generators(metric, &sub_x, &sub_d)
}

/// The conjugated representation `π̂_λ(X)`: the symbol exchange applied to
/// `π_{-λ-2M}(X)`.
pub fn pi_hat(alg: &TkkAlgebra, x: &TkkElement, lambda: &Rat) -> DifferentialOperator {
    let params = &alg.params;
    let metric = params.metric();
    let dual = RepParams::new(-lambda - rat(2 * params.superdim()));
    symbol_exchange(&metric, &pi_lambda(alg, x, &dual))
}

/// Closed forms of the conjugated table for a raising basis element:
/// `-x_k (2E - λ) + R² ∂_k`.
pub fn pi_hat_raising_closed_form(
    params: &ModelParams,
    k: usize,
    lambda: &Rat,
) -> DifferentialOperator {
    let metric = params.metric();
    let v = jvar(params, k);
    let xk = DifferentialOperator::mult(&metric, &SuperPolynomial::var(&metric, v));
    let e2 = euler_op(&metric)
        .scale(&ExactScalar::from_int(2))
        .sub(&DifferentialOperator::scalar(
            &metric,
            ExactScalar::from_rat(lambda.clone()),
        ));
    let first = xk.compose(&metric, &e2).neg();
    let second = r2_op(&metric)
        .compose(&metric, &DifferentialOperator::partial_lower(&metric, v));
    first.add(&second)
}

/// Critical constant of the quadratic two-sided ideal:
/// `μ^c = -(p+q-4-2n)/(4(p+q-1-2n))`.
pub fn mu_c(params: &ModelParams) -> Result<Rat, String> {
    let den = params.p + params.q - 1 - 2 * params.n;
    if den == 0 {
        return Err(String::from("critical constant undefined: denominator vanishes"));
    }
    Ok(ratq(-(params.p + params.q - 4 - 2 * params.n), 1) / rat(4 * den))
}

/// The conjugated operator table at a given `λ`, with the critical
/// constant, for reporting.
pub struct FourierRepTable {
    pub lambda: Rat,
    pub raising: Vec<DifferentialOperator>,
    pub lowering: Vec<DifferentialOperator>,
    pub scaling: DifferentialOperator,
    pub mu_c: Rat,
}

impl FourierRepTable {
    pub fn new(alg: &TkkAlgebra, lambda: &Rat) -> Result<FourierRepTable, String> {
        let dj = alg.dim_j();
        let raising = (0..dj)
            .map(|k| pi_hat(alg, &TkkElement::basis(alg, alg.index_eplus(k)), lambda))
            .collect();
        let lowering = (0..dj)
            .map(|k| pi_hat(alg, &TkkElement::basis(alg, alg.index_eminus(k)), lambda))
            .collect();
        let scaling = pi_hat(
            alg,
            &TkkElement::basis(alg, alg.index_istr(alg.le_istr_index())),
            lambda,
        );
        Ok(FourierRepTable {
            lambda: lambda.clone(),
            raising,
            lowering,
            scaling,
            mu_c: mu_c(&alg.params)?,
        })
    }
}

/// Defect of the kernel-of-Δ commutator identity:
/// `[Δ, π̂_λ(ē_k)] - (2(λ-2+M) ∂_k - 4 x_k Δ)`.
pub fn ker_delta_defect(
    alg: &TkkAlgebra,
    k: usize,
    lambda: &Rat,
) -> DifferentialOperator {
    let params = &alg.params;
    let metric = params.metric();
    let op = pi_hat(alg, &TkkElement::basis(alg, alg.index_eplus(k)), lambda);
    let com = laplacian_op(&metric).supercommutator(&metric, &op);
    let v = jvar(params, k);
    let m = params.superdim();
    let expect = DifferentialOperator::partial_lower(&metric, v)
        .scale(&ExactScalar::from_rat((lambda - rat(2) + rat(m)) * rat(2)))
        .sub(
            &DifferentialOperator::mult(&metric, &SuperPolynomial::var(&metric, v))
                .compose(&metric, &laplacian_op(&metric))
                .scale(&ExactScalar::from_int(4)),
        );
    com.sub(&expect)
}

/// True when the commutator `[Δ, π̂_λ(ē_k)]` annihilates the kernel of Δ,
/// i.e. when its `∂_k`-part vanishes.
pub fn preserves_ker_delta(alg: &TkkAlgebra, k: usize, lambda: &Rat) -> bool {
    // the residual against the tangential part -4x_kΔ must vanish
    let params = &alg.params;
    let metric = params.metric();
    let op = pi_hat(alg, &TkkElement::basis(alg, alg.index_eplus(k)), lambda);
    let com = laplacian_op(&metric).supercommutator(&metric, &op);
    let tangential = DifferentialOperator::mult(&metric, &SuperPolynomial::var(&metric, jvar(params, k)))
        .compose(&metric, &laplacian_op(&metric))
        .scale(&ExactScalar::from_int(-4));
    com.sub(&tangential).is_zero()
}

/// Defect of the adjoint identity `π_λ(X)* + π_{-λ-2M}(X)` for a basis
/// element, and the same for the conjugated realization.
pub fn adjoint_defect(
    alg: &TkkAlgebra,
    idx: usize,
    lambda: &Rat,
    hat: bool,
) -> DifferentialOperator {
    let params = &alg.params;
    let metric = params.metric();
    let x = TkkElement::basis(alg, idx);
    let dual = -lambda - rat(2 * params.superdim());
    if hat {
        let lhs = pi_hat(alg, &x, lambda).formal_adjoint(&metric);
        let rhs = pi_hat(alg, &x, &dual).neg();
        lhs.sub(&rhs)
    } else {
        let lhs = pi_lambda(alg, &x, &RepParams::new(lambda.clone())).formal_adjoint(&metric);
        let rhs = pi_lambda(alg, &x, &RepParams::new(dual)).neg();
        lhs.sub(&rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (ModelParams, TkkAlgebra) {
        let params = ModelParams::new(4, 4, 1).unwrap();
        (params, TkkAlgebra::new(&params))
    }

    #[test]
    fn conjugated_table_matches_closed_forms() {
        let (params, alg) = setup();
        let metric = params.metric();
        let lam = ratq(5, 2);
        // lowering: e_k⁻ ↦ ∂_k
        for k in 0..alg.dim_j() {
            let op = pi_hat(&alg, &TkkElement::basis(&alg, alg.index_eminus(k)), &lam);
            assert_eq!(
                op,
                DifferentialOperator::partial_lower(&metric, jvar(&params, k))
            );
        }
        // scaling: L_e ↦ -λ/2 + E
        let le = pi_hat(
            &alg,
            &TkkElement::basis(&alg, alg.index_istr(alg.le_istr_index())),
            &lam,
        );
        let expect = euler_op(&metric).sub(&DifferentialOperator::scalar(
            &metric,
            ExactScalar::from_rat(&lam / rat(2)),
        ));
        assert_eq!(le, expect);
        // raising: ē_k ↦ -x_k(2E-λ) + R²∂_k
        for k in 0..alg.dim_j() {
            let op = pi_hat(&alg, &TkkElement::basis(&alg, alg.index_eplus(k)), &lam);
            assert_eq!(op, pi_hat_raising_closed_form(&params, k, &lam));
        }
    }

    #[test]
    fn conjugation_is_a_homomorphism_on_sampled_pairs() {
        let (params, alg) = setup();
        let lam = rat(2 - params.superdim());
        let metric = params.metric();
        let picks = [
            alg.index_eplus(0),
            alg.index_eplus(2),
            alg.index_istr(alg.le_istr_index()),
            alg.index_istr(3),
            alg.index_eminus(1),
            alg.index_eminus(alg.dim_j() - 1),
        ];
        for &i in &picks {
            for &j in &picks {
                let bi = TkkElement::basis(&alg, i);
                let bj = TkkElement::basis(&alg, j);
                let lhs = pi_hat(&alg, &bi, &lam).supercommutator(&metric, &pi_hat(&alg, &bj, &lam));
                let rhs = pi_hat(&alg, &alg.bracket(&bi, &bj), &lam);
                assert_eq!(lhs, rhs, "π̂ defect at ({}, {})", alg.render_name(i), alg.render_name(j));
            }
        }
    }

    #[test]
    fn kernel_criterion_holds_exactly_at_critical_lambda() {
        let (params, alg) = setup();
        let m = params.superdim();
        for k in 0..alg.dim_j() {
            // the commutator identity holds at every λ
            for lam in [rat(2 - m), rat(0), rat(1)] {
                assert!(ker_delta_defect(&alg, k, &lam).is_zero());
            }
            assert!(preserves_ker_delta(&alg, k, &rat(2 - m)));
            assert!(!preserves_ker_delta(&alg, k, &rat(3 - m)));
            assert!(!preserves_ker_delta(&alg, k, &rat(0)));
        }
        // lowering and rotation parts always preserve the kernel
        let metric = params.metric();
        for k in 0..alg.dim_j() {
            let op = pi_hat(&alg, &TkkElement::basis(&alg, alg.index_eminus(k)), &rat(0));
            assert!(laplacian_op(&metric).supercommutator(&metric, &op).is_zero());
        }
    }

    #[test]
    fn adjoints_match_the_dual_parameter() {
        let (params, alg) = setup();
        for lam in [rat(2 - params.superdim()), rat(0), ratq(3, 2)] {
            for idx in 0..alg.dim() {
                let d = adjoint_defect(&alg, idx, &lam, false);
                assert!(d.is_zero(), "adjoint defect at {}", alg.render_name(idx));
                let d = adjoint_defect(&alg, idx, &lam, true);
                assert!(d.is_zero(), "hat adjoint defect at {}", alg.render_name(idx));
            }
        }
    }

    #[test]
    fn critical_constant() {
        let (params, _) = setup();
        // -(p+q-4-2n)/(4(p+q-1-2n)) at (4,4,1): -(2)/(4·5) = -1/10
        assert_eq!(mu_c(&params).unwrap(), ratq(-1, 10));
    }
}
