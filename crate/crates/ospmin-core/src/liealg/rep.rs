//! Realizations of the TKK algebra by differential operators: the family
//! `π_λ` on the model space (with its Bessel operators), the quotient
//! action modulo `⟨R²⟩`, and the explicit isomorphism onto the rotation
//! model of `osp(p,q|2n)` in `p+q` even and `2n` odd variables.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use super::jordan::{dim_j, parity, Endo};
use super::tkk::{IstrName, TkkAlgebra, TkkElement, TkkName};
use crate::operators::{bessel_op, lij_op, DifferentialOperator};
use crate::scalar::{rat, ExactScalar, Rat};
use crate::superpoly::{reduce_mod_r2, Metric, ModelParams, SuperPolynomial};

/// Character parameter of the representation (the value of `λ(2L_e)`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RepParams {
    pub lambda: Rat,
}

impl RepParams {
    pub fn new(lambda: Rat) -> Self {
        RepParams { lambda }
    }

    /// The critical character `λ = 2 - M` at which the representation
    /// descends to the orbit.
    pub fn critical(params: &ModelParams) -> Self {
        RepParams { lambda: rat(2 - params.superdim()) }
    }
}

/// Model-space variable carrying the `J`-basis direction `e_k`: the unit
/// goes to the last minus-signed variable, the vector part keeps its order.
pub fn jvar(params: &ModelParams, k: usize) -> usize {
    let dj = dim_j(params);
    debug_assert!(k < dj);
    let m = params.m() as usize;
    if k == 0 {
        m - 1
    } else if k <= m - 1 {
        k - 1
    } else {
        k
    }
}

/// The linear vector field `Σ_{a,b} M[a][b] · x_a ∂^b` transported to
/// model-space variables.
fn vector_field(params: &ModelParams, metric: &Metric, m: &Endo) -> DifferentialOperator {
    let dj = dim_j(params);
    let mut out = DifferentialOperator::zero();
    for a in 0..dj {
        for b in 0..dj {
            if m.mat[a][b].is_zero() {
                continue;
            }
            let x = DifferentialOperator::mult(
                metric,
                &SuperPolynomial::var(metric, jvar(params, a)),
            );
            let d = DifferentialOperator::partial_plain(metric, jvar(params, b));
            out = out.add(
                &x.compose(metric, &d)
                    .scale(&ExactScalar::from_rat(m.mat[a][b].clone())),
            );
        }
    }
    out
}

/// `π_λ` of a single istr basis element: the vector field of its action on
/// `J⁻` plus `λ/2` times its `L_e`-component.
fn pi_istr(alg: &TkkAlgebra, metric: &Metric, a: usize, lambda: &Rat) -> DifferentialOperator {
    let elem = &alg.istr[a];
    let mut op = vector_field(&alg.params, metric, &elem.minus_action);
    if !elem.le_coeff.is_zero() {
        let c = &elem.le_coeff * lambda / rat(2);
        op = op.add(&DifferentialOperator::scalar(metric, ExactScalar::from_rat(c)));
    }
    op
}

/// The Bessel operator `B_λ(e_k)` for a `J`-basis direction.
pub fn bessel_operator(params: &ModelParams, k: usize, rp: &RepParams) -> DifferentialOperator {
    bessel_op(&params.metric(), &rp.lambda, jvar(params, k))
}

/// The representation `π_λ` on the model space:
/// `e_k⁻ ↦ -i x_k`, istr by vector fields with `L_e ↦ λ/2 - E`,
/// `ē_k ↦ -i B_λ(e_k)`.
pub fn pi_lambda(alg: &TkkAlgebra, x: &TkkElement, rp: &RepParams) -> DifferentialOperator {
    let params = &alg.params;
    let metric = params.metric();
    let mut out = DifferentialOperator::zero();
    let minus_i = -&ExactScalar::i();
    for (idx, c) in x.coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let factor = ExactScalar::from_rat(c.clone());
        let op = match alg.name(idx) {
            TkkName::Eminus(k) => DifferentialOperator::mult(
                &metric,
                &SuperPolynomial::var(&metric, jvar(params, k)),
            )
            .scale(&minus_i),
            TkkName::Istr(a) => pi_istr(alg, &metric, a, &rp.lambda),
            TkkName::Eplus(k) => bessel_operator(params, k, rp).scale(&minus_i),
        };
        out = out.add(&op.scale(&factor));
    }
    out
}

/// Apply the quotient representation `π_C` (at `λ = 2-M`) to a polynomial
/// representative and reduce to the canonical form modulo `⟨R²⟩`.
pub fn pi_c_apply(alg: &TkkAlgebra, x: &TkkElement, f: &SuperPolynomial) -> SuperPolynomial {
    let metric = alg.params.metric();
    let op = pi_lambda(alg, x, &RepParams::critical(&alg.params));
    reduce_mod_r2(&metric, &op.apply(&metric, f))
}

/// Residue of `[B_λ(e_k), R²]` with all coefficients reduced modulo
/// `⟨R²⟩`; it vanishes exactly at the critical `λ`.
pub fn tangentiality_residue(
    params: &ModelParams,
    k: usize,
    rp: &RepParams,
) -> DifferentialOperator {
    let metric = params.metric();
    let b = bessel_operator(params, k, rp);
    let r2 = crate::operators::r2_op(&metric);
    let com = b.supercommutator(&metric, &r2);
    let mut out = DifferentialOperator::zero();
    for (d, c) in com.terms() {
        out.add_term(d.clone(), reduce_mod_r2(&metric, c));
    }
    out
}

/// Ambient space of the rotation model: one plus-signed variable, the
/// vector-part block, the unit direction, one extra minus-signed variable,
/// then the odd pairs.
pub fn ambient_metric(params: &ModelParams) -> Metric {
    let mut signs = vec![1i8];
    signs.extend(vec![1i8; (params.p - 1) as usize]);
    signs.extend(vec![-1i8; (params.q - 2) as usize]);
    signs.push(-1); // unit direction
    signs.push(-1); // added minus direction
    Metric::new(signs, params.n as usize)
}

/// Ambient variable carrying the `J`-direction `e_k`.
fn amb(params: &ModelParams, k: usize) -> usize {
    let pq = (params.p + params.q) as usize;
    if k == 0 {
        pq - 2
    } else if k <= pq - 3 {
        k
    } else {
        // odd direction: two even slots were inserted
        k + 2
    }
}

const AMB_PLUS: usize = 0; // index of the added plus-signed variable

fn amb_minus(params: &ModelParams) -> usize {
    (params.p + params.q - 1) as usize
}

/// The explicit isomorphism of the TKK algebra onto rotation generators of
/// `osp(p,q|2n)` in the ambient space:
/// `ē_k ↦ L_{k̃,b} - L_{k̃,a}`, `e_k⁻ ↦ L_{k̃,b} + L_{k̃,a}`,
/// `L_e ↦ L_{a,b}`, `L_{e_i} ↦ L_{ĩ,c}`, `[L_{e_i},L_{e_j}] ↦ L_{ĩ,j̃}`,
/// where `a, b` are the added plus/minus directions and `c` carries the
/// unit.
pub fn tkk_to_osp_iso(alg: &TkkAlgebra, x: &TkkElement) -> DifferentialOperator {
    let params = &alg.params;
    let metric = ambient_metric(params);
    let a0 = AMB_PLUS;
    let b0 = amb_minus(params);
    let c0 = amb(params, 0);
    let mut out = DifferentialOperator::zero();
    for (idx, c) in x.coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let op = match alg.name(idx) {
            TkkName::Eplus(k) => {
                let v = amb(params, k);
                lij_op(&metric, v, b0).sub(&lij_op(&metric, v, a0))
            }
            TkkName::Eminus(k) => {
                let v = amb(params, k);
                lij_op(&metric, v, b0).add(&lij_op(&metric, v, a0))
            }
            TkkName::Istr(a) => match alg.istr[a].name {
                IstrName::Le => lij_op(&metric, a0, b0),
                IstrName::Lij(i, 0) => lij_op(&metric, amb(params, i), c0),
                IstrName::Lij(i, j) => lij_op(&metric, amb(params, i), amb(params, j)),
            },
        };
        out = out.add(&op.scale(&ExactScalar::from_rat(c.clone())));
    }
    out
}

/// Check that the isomorphism preserves the bracket of two basis elements.
pub fn iso_preserves_bracket(alg: &TkkAlgebra, i: usize, j: usize) -> bool {
    let metric = ambient_metric(&alg.params);
    let bi = TkkElement::basis(alg, i);
    let bj = TkkElement::basis(alg, j);
    let lhs = tkk_to_osp_iso(alg, &bi).supercommutator(&metric, &tkk_to_osp_iso(alg, &bj));
    let rhs = tkk_to_osp_iso(alg, &alg.bracket(&bi, &bj));
    lhs == rhs
}

/// Homomorphism defect `[π(X), π(Y)] - π([X,Y])` for basis elements.
pub fn pi_homomorphism_defect(
    alg: &TkkAlgebra,
    i: usize,
    j: usize,
    rp: &RepParams,
) -> DifferentialOperator {
    let metric = alg.params.metric();
    let bi = TkkElement::basis(alg, i);
    let bj = TkkElement::basis(alg, j);
    let lhs = pi_lambda(alg, &bi, rp).supercommutator(&metric, &pi_lambda(alg, &bj, rp));
    let rhs = pi_lambda(alg, &alg.bracket(&bi, &bj), rp);
    lhs.sub(&rhs)
}

/// istr elements lying in `k₀ = osp(p-1|2n) ⊕ so(q-1)`: both indices on
/// the x/θ side, or both on the y side (the unit direction is a y).
pub fn is_k0(alg: &TkkAlgebra, a: usize) -> bool {
    let params = &alg.params;
    let x_side = |i: usize| -> bool {
        (1 <= i && i <= (params.p - 1) as usize) || i >= (params.p + params.q - 2) as usize
    };
    match alg.istr[a].name {
        IstrName::Le => false,
        IstrName::Lij(i, j) => x_side(i) == x_side(j),
    }
}

/// Parity of the J-direction `e_k` (re-exported for rep users).
pub fn j_parity(params: &ModelParams, k: usize) -> u8 {
    parity(params, k)
}

/// `λ` values exercised by the homomorphism checks.
pub fn standard_lambdas(params: &ModelParams) -> Vec<Rat> {
    vec![rat(2 - params.superdim()), rat(0), rat(1)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{euler_op, r2_op};
    use crate::scalar::ratq;
    use crate::superpoly::monomials_of_degree;

    fn setup() -> (ModelParams, TkkAlgebra) {
        let params = ModelParams::new(4, 4, 1).unwrap();
        let alg = TkkAlgebra::new(&params);
        (params, alg)
    }

    #[test]
    fn table_entries_match_their_closed_forms() {
        let (params, alg) = setup();
        let metric = params.metric();
        let rp = RepParams::new(rat(7));
        // L_e ↦ λ/2 - E
        let le = TkkElement::basis(&alg, alg.index_istr(alg.le_istr_index()));
        let expect = DifferentialOperator::scalar(&metric, ExactScalar::from_rat(ratq(7, 2)))
            .sub(&euler_op(&metric));
        assert_eq!(pi_lambda(&alg, &le, &rp), expect);
        // e_k⁻ ↦ -i x_k
        for k in 0..alg.dim_j() {
            let em = TkkElement::basis(&alg, alg.index_eminus(k));
            let expect = DifferentialOperator::mult(
                &metric,
                &SuperPolynomial::var(&metric, jvar(&params, k)),
            )
            .scale(&-&ExactScalar::i());
            assert_eq!(pi_lambda(&alg, &em, &rp), expect);
        }
        // ē_k ↦ -i ((-λ+2E)∂_k - x_k Δ)
        for k in 0..alg.dim_j() {
            let ep = TkkElement::basis(&alg, alg.index_eplus(k));
            let expect = bessel_operator(&params, k, &rp).scale(&-&ExactScalar::i());
            assert_eq!(pi_lambda(&alg, &ep, &rp), expect);
        }
    }

    #[test]
    fn pi_is_a_homomorphism_on_sampled_pairs() {
        let (params, alg) = setup();
        let rp = RepParams::critical(&params);
        let picks: Vec<usize> = vec![
            alg.index_eplus(0),
            alg.index_eplus(1),
            alg.index_eplus(alg.dim_j() - 1),
            alg.index_istr(alg.le_istr_index()),
            alg.index_istr(1),
            alg.index_istr(alg.dim_istr() - 1),
            alg.index_eminus(0),
            alg.index_eminus(2),
            alg.index_eminus(alg.dim_j() - 1),
        ];
        for &i in &picks {
            for &j in &picks {
                assert!(
                    pi_homomorphism_defect(&alg, i, j, &rp).is_zero(),
                    "π defect at ({}, {})",
                    alg.render_name(i),
                    alg.render_name(j)
                );
            }
        }
    }

    #[test]
    fn tangentiality_residue_vanishes_exactly_at_critical_lambda() {
        let (params, _alg) = setup();
        let metric = params.metric();
        let m = params.superdim();
        for k in 0..dim_j(&params) {
            let crit = RepParams::critical(&params);
            assert!(tangentiality_residue(&params, k, &crit).is_zero());
            for off in [-1i64, 1] {
                let rp = RepParams::new(rat(2 - m + off));
                let res = tangentiality_residue(&params, k, &rp);
                // the residue is (-2λ+4-2M)·x_k = -2·off·x_k
                let expect = DifferentialOperator::mult(
                    &metric,
                    &SuperPolynomial::var(&metric, jvar(&params, k)),
                )
                .scale(&ExactScalar::from_int(-2 * off));
                assert_eq!(res, expect, "residue mismatch at k={k}, off={off}");
            }
        }
    }

    #[test]
    fn commutator_with_r2_matches_the_closed_form() {
        let (params, _alg) = setup();
        let metric = params.metric();
        let m = params.superdim();
        let lam = 5i64;
        let rp = RepParams::new(rat(lam));
        for k in 0..dim_j(&params) {
            let b = bessel_operator(&params, k, &rp);
            let com = b.supercommutator(&metric, &r2_op(&metric));
            // x_k(-2λ+4-2M) + 4R²∂_k
            let xk = DifferentialOperator::mult(
                &metric,
                &SuperPolynomial::var(&metric, jvar(&params, k)),
            );
            let expect = xk.scale(&ExactScalar::from_int(-2 * lam + 4 - 2 * m)).add(
                &r2_op(&metric)
                    .compose(
                        &metric,
                        &DifferentialOperator::partial_lower(&metric, jvar(&params, k)),
                    )
                    .scale(&ExactScalar::from_int(4)),
            );
            assert_eq!(com, expect);
        }
    }

    #[test]
    fn quotient_action_is_well_defined_on_the_ideal() {
        let (params, alg) = setup();
        let metric = params.metric();
        let r2 = crate::superpoly::r_squared(&metric);
        for idx in 0..alg.dim() {
            let x = TkkElement::basis(&alg, idx);
            for d in 0..=1u32 {
                for m in monomials_of_degree(&metric, d) {
                    let mut f = SuperPolynomial::zero();
                    f.add_term(m, ExactScalar::one());
                    let out = pi_c_apply(&alg, &x, &r2.mul(&f));
                    assert!(out.is_zero(), "π_C not tangential at {}", alg.render_name(idx));
                }
            }
        }
        // L_e acts on 1 by (2-M)/2
        let le = TkkElement::basis(&alg, alg.index_istr(alg.le_istr_index()));
        let one = SuperPolynomial::one(&metric);
        assert_eq!(
            pi_c_apply(&alg, &le, &one),
            one.scale(&ExactScalar::from_rat(ratq(2 - params.superdim(), 2)))
        );
    }

    #[test]
    fn iso_preserves_brackets_on_representative_pairs() {
        let (_, alg) = setup();
        let picks: Vec<usize> = vec![
            alg.index_eplus(0),
            alg.index_eplus(1),
            alg.index_eplus(alg.dim_j() - 1),
            alg.index_istr(alg.le_istr_index()),
            alg.index_istr(2),
            alg.index_istr(alg.dim_istr() - 1),
            alg.index_eminus(0),
            alg.index_eminus(1),
            alg.index_eminus(alg.dim_j() - 2),
        ];
        for &i in &picks {
            for &j in &picks {
                assert!(
                    iso_preserves_bracket(&alg, i, j),
                    "iso defect at ({}, {})",
                    alg.render_name(i),
                    alg.render_name(j)
                );
            }
        }
    }
}
