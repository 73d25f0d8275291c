//! The module `W` generated by the K-Bessel symbol on the orbit: explicit
//! basis `φ_k ψ_l Λ^{μ+2k,ν+2l}_{2,j-k}(|X|)`, exact action of the quotient
//! representation with zero-residual re-expansion, closed-form checks of
//! the raising/lowering coefficients, the intertwiner onto a tensor
//! product of harmonic spaces, and the Gelfand–Kirillov growth count.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::harmonics::{
    dim_formula, harmonic_basis, lower_harmonic, raise_harmonic, Block, BlockKind,
};
use crate::liealg::rep::{pi_lambda, RepParams};
use crate::liealg::tkk::{TkkAlgebra, TkkElement};
use crate::operators::DifferentialOperator;
use crate::radial::{laguerre_based, MixedElement};
use crate::scalar::{pochhammer, rat, ratq, ExactScalar, Rat};
use crate::superpoly::{Metric, ModelParams, Monomial, SuperPolynomial};

/// Coordinate key of a canonical mixed element.
pub type CoordKey = (Monomial, i64, i64);

/// One basis element `φ_k ψ_l Λ^{μ+2k,ν+2l}_{2,j-k}` of `W_j`.
#[derive(Clone, Debug)]
pub struct WBasisElement {
    pub j: i64,
    pub k: i64,
    pub l: i64,
    /// Index of `φ` within `H_k` of the μ-block, and of `ψ` within `H_l`
    /// of the ν-block.
    pub phi_idx: usize,
    pub psi_idx: usize,
    pub parity: u8,
    pub mixed: MixedElement,
}

/// Exact incremental echelon form of the basis columns: reduces any
/// canonical mixed element to coordinates over the basis with a mandatory
/// zero residual.
struct Reducer {
    /// (pivot key, normalized vector, expansion over the original basis)
    rows: Vec<(CoordKey, BTreeMap<CoordKey, ExactScalar>, Vec<ExactScalar>)>,
    n_basis: usize,
}

impl Reducer {
    fn new() -> Self {
        Reducer { rows: Vec::new(), n_basis: 0 }
    }

    fn reduce_in_place(
        &self,
        v: &mut BTreeMap<CoordKey, ExactScalar>,
        expansion: &mut Vec<ExactScalar>,
    ) {
        for (pivot, row, exp) in &self.rows {
            let Some(c) = v.get(pivot).cloned() else { continue };
            if c.is_zero() {
                continue;
            }
            for (key, rc) in row {
                let delta = &c * rc;
                let cur = v.remove(key).unwrap_or_else(ExactScalar::zero);
                let next = &cur - &delta;
                if !next.is_zero() {
                    v.insert(key.clone(), next);
                }
            }
            for (i, e) in exp.iter().enumerate() {
                if !e.is_zero() {
                    let delta = &c * e;
                    expansion[i] = &expansion[i] + &delta;
                }
            }
        }
        v.retain(|_, c| !c.is_zero());
    }

    fn insert_basis_vector(&mut self, coords: BTreeMap<CoordKey, ExactScalar>) {
        let idx = self.n_basis;
        self.n_basis += 1;
        let mut v = coords;
        let mut exp = vec![ExactScalar::zero(); self.n_basis];
        self.reduce_in_place(&mut v, &mut exp);
        // exp currently holds the combination of earlier basis vectors that
        // was subtracted; the new vector contributes itself
        for row in &mut self.rows {
            row.2.resize(self.n_basis, ExactScalar::zero());
        }
        let Some((pivot, pc)) = v.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            panic!("basis vectors must be linearly independent");
        };
        let inv = pc;
        let row: BTreeMap<CoordKey, ExactScalar> = v
            .iter()
            .map(|(k, c)| (k.clone(), c.div_monomial(&inv).expect("monomial pivot")))
            .collect();
        // expansion of the normalized row over the original basis:
        // row = (e_idx - Σ exp) / inv
        let mut row_exp = vec![ExactScalar::zero(); self.n_basis];
        for (i, e) in exp.iter().enumerate() {
            if !e.is_zero() {
                row_exp[i] = (-e).div_monomial(&inv).expect("monomial pivot");
            }
        }
        row_exp[idx] = ExactScalar::one().div_monomial(&inv).expect("monomial pivot");
        self.rows.push((pivot, row, row_exp));
        // keep rows sorted by pivot for deterministic reduction order
        self.rows.sort_by(|a, b| a.0.cmp(&b.0));
    }

    /// Coordinates of `v` over the basis; `Err` carries the residual size.
    fn expand(&self, coords: BTreeMap<CoordKey, ExactScalar>) -> Result<Vec<ExactScalar>, String> {
        let mut v = coords;
        let mut exp = vec![ExactScalar::zero(); self.n_basis];
        self.reduce_in_place(&mut v, &mut exp);
        if !v.is_empty() {
            return Err(alloc::format!(
                "nonzero residual with {} coordinates outside the basis span",
                v.len()
            ));
        }
        Ok(exp)
    }
}

/// The basis of `W_{≤ j_max}` with its expansion machinery.
pub struct WBasis {
    pub params: ModelParams,
    pub j_max: i64,
    pub elements: Vec<WBasisElement>,
    /// Harmonic bases per (μ-block degree) and (ν-block degree).
    pub mu_harmonics: Vec<Vec<SuperPolynomial>>,
    pub nu_harmonics: Vec<Vec<SuperPolynomial>>,
    reducer: Reducer,
}

/// `l` ranges over `0 ..= (μ-ν)/2 + j` in the even case.
pub fn l_range_max(params: &ModelParams, j: i64) -> i64 {
    (params.mu() - params.nu()) / 2 + j
}

/// Embed a block polynomial into the model space.
pub fn embed_block(params: &ModelParams, block_is_x: bool, f: &SuperPolynomial) -> SuperPolynomial {
    let metric = params.metric();
    let mut out = SuperPolynomial::zero();
    for (m, c) in f.terms() {
        let mut mono = Monomial::unit(metric.n_even());
        if block_is_x {
            for (v, e) in m.even.iter().enumerate() {
                mono.even[v] = *e;
            }
            mono.odd = m.odd;
        } else {
            for (v, e) in m.even.iter().enumerate() {
                mono.even[params.n_x() + v] = *e;
            }
        }
        out.add_term(mono, c.clone());
    }
    out
}

/// Model-space variable of a block variable.
pub fn block_var_to_model(params: &ModelParams, block_is_x: bool, v: usize, block: &Block) -> usize {
    if block_is_x {
        if v < block.metric.n_even() {
            v
        } else {
            params.m() as usize + (v - block.metric.n_even())
        }
    } else {
        params.n_x() + v
    }
}

impl WBasis {
    /// Construct the basis for `j ≤ j_max`.  Requires `p+q` even and
    /// `ν ∉ -2N`.
    pub fn build(params: &ModelParams, j_max: i64) -> Result<WBasis, String> {
        if (params.p + params.q) % 2 != 0 {
            return Err(String::from(
                "p+q odd: the module is not locally finite, no basis is constructed",
            ));
        }
        let nu = params.nu();
        if nu <= 0 && nu % 2 == 0 {
            return Err(alloc::format!("ν = {nu} lies in -2N"));
        }
        let mu_block = Block::mu_block(params);
        let nu_block = Block::nu_block(params);
        let base = ratq(nu, 2);
        let k_cap = j_max;
        let l_cap = l_range_max(params, j_max);
        let mu_harmonics: Vec<Vec<SuperPolynomial>> = (0..=k_cap)
            .map(|k| harmonic_basis(&mu_block, k).elements)
            .collect();
        let nu_harmonics: Vec<Vec<SuperPolynomial>> = (0..=l_cap)
            .map(|l| harmonic_basis(&nu_block, l).elements)
            .collect();
        let mut elements = Vec::new();
        let mut reducer = Reducer::new();
        for j in 0..=j_max {
            for k in 0..=j {
                for l in 0..=l_range_max(params, j) {
                    let lam = laguerre_based(
                        &rat(params.mu() + 2 * k),
                        &rat(nu + 2 * l),
                        j - k,
                        &base,
                    )?;
                    for (phi_idx, phi) in mu_harmonics[k as usize].iter().enumerate() {
                        for (psi_idx, psi) in nu_harmonics[l as usize].iter().enumerate() {
                            let poly = embed_block(params, params.mu_block_is_x(), phi).mul(
                                &embed_block(params, !params.mu_block_is_x(), psi),
                            );
                            let mixed = MixedElement::from_radial(params, &lam.expansion)
                                .mul_poly_left(&poly);
                            let parity = mixed.parity().unwrap_or(0);
                            reducer.insert_basis_vector(mixed.coords());
                            elements.push(WBasisElement {
                                j,
                                k,
                                l,
                                phi_idx,
                                psi_idx,
                                parity,
                                mixed,
                            });
                        }
                    }
                }
            }
        }
        Ok(WBasis {
            params: *params,
            j_max,
            elements,
            mu_harmonics,
            nu_harmonics,
            reducer,
        })
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn dim_wj(&self, j: i64) -> usize {
        self.elements.iter().filter(|e| e.j == j).count()
    }

    /// Expand a canonical mixed element exactly over the basis.
    pub fn expand(&self, v: &MixedElement) -> Result<Vec<ExactScalar>, String> {
        self.reducer.expand(v.coords())
    }

    /// Apply a TKK element through the quotient representation and
    /// re-expand; fails loudly on nonzero residual (e.g. exceeded
    /// truncation headroom).
    pub fn act(
        &self,
        alg: &TkkAlgebra,
        x: &TkkElement,
        coords: &[ExactScalar],
    ) -> Result<Vec<ExactScalar>, String> {
        let rp = RepParams::critical(&self.params);
        let op = pi_lambda(alg, x, &rp);
        let mut image = MixedElement::zero(&self.params, ratq(self.params.nu(), 2));
        for (i, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            image = image.add(&self.elements[i].mixed.apply_operator(&op).scale(c));
        }
        self.expand(&image)
    }

    /// Apply and expand a single operator image of one basis element.
    pub fn act_on_basis(
        &self,
        op: &DifferentialOperator,
        idx: usize,
    ) -> Result<Vec<ExactScalar>, String> {
        self.expand(&self.elements[idx].mixed.apply_operator(op))
    }
}

/// Combinatorial dimension of `W_j` (no basis construction): the even
/// branch uses the finite `l`-range; the odd branch is truncated to the
/// same range and flagged.
pub fn w_dim(params: &ModelParams, j: i64) -> (i128, bool) {
    let mu_block = Block::mu_block(params);
    let nu_block = Block::nu_block(params);
    let truncated = (params.p + params.q) % 2 != 0;
    let lmax = (params.mu() - params.nu()).div_euclid(2) + j;
    let mut acc: i128 = 0;
    for k in 0..=j {
        let dk = dim_formula(mu_block.metric.n_even() as i64, mu_block.metric.n_odd() as i64, k);
        for l in 0..=lmax {
            let dl =
                dim_formula(nu_block.metric.n_even() as i64, nu_block.metric.n_odd() as i64, l);
            acc += dk * dl;
        }
    }
    (acc, truncated)
}

/// Growth degree of `k ↦ Σ_{j≤k} dim W_j` extracted by exact finite
/// differences over the polynomial range.
pub fn gk_dimension(params: &ModelParams, k_max: i64) -> Result<(i64, bool), String> {
    let k_lo = 2 * params.n + 4;
    if k_max < k_lo + 3 {
        return Err(alloc::format!("k_max = {k_max} too small; need at least {}", k_lo + 3));
    }
    let mut truncated = false;
    let mut cum: i128 = 0;
    let mut values = Vec::new();
    for j in 0..=k_max {
        let (d, t) = w_dim(params, j);
        truncated |= t;
        cum += d;
        if j >= k_lo {
            values.push(cum);
        }
    }
    // finite differences until the row vanishes identically
    let mut row = values;
    let mut degree = 0i64;
    loop {
        if row.iter().all(|v| *v == 0) {
            return Ok((degree - 1, truncated));
        }
        if row.len() < 2 {
            return Err(String::from("differences did not stabilize; raise k_max"));
        }
        row = row.windows(2).map(|w| w[1] - w[0]).collect();
        degree += 1;
    }
}

/// The raising/lowering operators `B±_i` paired with a block variable: the
/// μ-block carries `B⁺`, the ν-block `B⁻`.
pub fn b_plus_op(params: &ModelParams, i: usize) -> DifferentialOperator {
    let metric = params.metric();
    let rp = RepParams::critical(params);
    let block = Block::mu_block(params);
    let v = block_var_to_model(params, params.mu_block_is_x(), i, &block);
    let b = crate::operators::bessel_op(&metric, &rp.lambda, v);
    let zi = DifferentialOperator::mult(&metric, &SuperPolynomial::var(&metric, v));
    match block.kind {
        BlockKind::PlusOdd => b.sub(&zi),
        BlockKind::Minus => b.add(&zi),
    }
}

pub fn b_minus_op(params: &ModelParams, i: usize) -> DifferentialOperator {
    let metric = params.metric();
    let rp = RepParams::critical(params);
    let block = Block::nu_block(params);
    let v = block_var_to_model(params, !params.mu_block_is_x(), i, &block);
    let b = crate::operators::bessel_op(&metric, &rp.lambda, v);
    let zi = DifferentialOperator::mult(&metric, &SuperPolynomial::var(&metric, v));
    match block.kind {
        BlockKind::PlusOdd => b.sub(&zi),
        BlockKind::Minus => b.add(&zi),
    }
}

/// Build the cell element `φ ψ Λ^{μ+2k,ν+2l}_{2,j-k}` as a mixed element.
pub fn cell_element(
    params: &ModelParams,
    j: i64,
    k: i64,
    l: i64,
    phi: &SuperPolynomial,
    psi: &SuperPolynomial,
) -> Result<MixedElement, String> {
    let base = ratq(params.nu(), 2);
    let lam = laguerre_based(&rat(params.mu() + 2 * k), &rat(params.nu() + 2 * l), j - k, &base)?;
    let poly = embed_block(params, params.mu_block_is_x(), phi)
        .mul(&embed_block(params, !params.mu_block_is_x(), psi));
    Ok(MixedElement::from_radial(params, &lam.expansion).mul_poly_left(&poly))
}

/// Defect of the `B⁺` raising identity on the cell `(j,k,l)` for block
/// variable `i` and given harmonics:
/// `B⁺_i(φψΛ) - (j+μ+k+1) φ⁺ψΛ↑ - 4(j-k+1) φ⁻ψΛ↓`.
pub fn bessel_plus_defect(
    params: &ModelParams,
    j: i64,
    k: i64,
    l: i64,
    i: usize,
    phi: &SuperPolynomial,
    psi: &SuperPolynomial,
) -> Result<MixedElement, String> {
    let mu_block = Block::mu_block(params);
    if params.nu() + 2 * l == 0 {
        return Err(String::from("hypothesis ν+2l ≠ 0 fails"));
    }
    let lhs = cell_element(params, j, k, l, phi, psi)?.apply_operator(&b_plus_op(params, i));
    let mut rhs = MixedElement::zero(params, ratq(params.nu(), 2));
    let phi_up = raise_harmonic(&mu_block, phi, k, i)?;
    if !phi_up.is_zero() && j - (k + 1) >= 0 {
        let c = ExactScalar::from_int(j + params.mu() + k + 1);
        rhs = rhs.add(&cell_element(params, j, k + 1, l, &phi_up, psi)?.scale(&c));
    }
    let phi_dn = lower_harmonic(&mu_block, phi, k, i)?;
    if !phi_dn.is_zero() {
        let c = ExactScalar::from_int(4 * (j - k + 1));
        rhs = rhs.add(&cell_element(params, j, k - 1, l, &phi_dn, psi)?.scale(&c));
    }
    Ok(lhs.sub(&rhs))
}

/// Defect of the `B⁻` identity on the cell `(j,k,l)`:
/// `B⁻_i(φψΛ) + (j+(μ-ν)/2-l) φψ⁺Λ→ + 4(j+(μ+ν)/2+l) φψ⁻Λ←`.
pub fn bessel_minus_defect(
    params: &ModelParams,
    j: i64,
    k: i64,
    l: i64,
    i: usize,
    phi: &SuperPolynomial,
    psi: &SuperPolynomial,
) -> Result<MixedElement, String> {
    let nu_block = Block::nu_block(params);
    if params.nu() + 2 * l == 0 {
        return Err(String::from("hypothesis ν+2l ≠ 0 fails"));
    }
    let lhs = cell_element(params, j, k, l, phi, psi)?.apply_operator(&b_minus_op(params, i));
    let mu = params.mu();
    let nu = params.nu();
    let mut rhs = MixedElement::zero(params, ratq(nu, 2));
    let psi_up = raise_harmonic(&nu_block, psi, l, i)?;
    if !psi_up.is_zero() {
        let c = ExactScalar::from_rat(rat(j) + ratq(mu - nu, 2) - rat(l));
        rhs = rhs.sub(&cell_element(params, j, k, l + 1, phi, &psi_up)?.scale(&c));
    }
    let psi_dn = lower_harmonic(&nu_block, psi, l, i)?;
    if !psi_dn.is_zero() {
        let c = ExactScalar::from_rat((rat(j) + ratq(mu + nu, 2) + rat(l)) * rat(4));
        rhs = rhs.sub(&cell_element(params, j, k, l - 1, phi, &psi_dn)?.scale(&c));
    }
    Ok(lhs.sub(&rhs))
}

/// Defect of the degree-shift action on a cell:
/// `π_λ(-L_e)(φψΛ^{μ+2k,ν+2l}_{2,j-k})` against
/// `(j-k+1)(j+k+μ+1)/(2j+μ+1) · Λ(j+1)-cell
///  - (j+l+(μ+ν)/2)(j-l+(μ-ν)/2)/(2j+μ+1) · Λ(j-1)-cell`.
pub fn le_action_defect(
    alg: &TkkAlgebra,
    j: i64,
    k: i64,
    l: i64,
    phi: &SuperPolynomial,
    psi: &SuperPolynomial,
) -> Result<MixedElement, String> {
    let params = &alg.params;
    let mu = params.mu();
    if 2 * j + mu + 1 == 0 {
        return Err(String::from("degree-shift denominator vanishes"));
    }
    let rp = RepParams::critical(params);
    let le = TkkElement::basis(alg, alg.index_istr(alg.le_istr_index()));
    let op = pi_lambda(alg, &le.neg(), &rp);
    let lhs = cell_element(params, j, k, l, phi, psi)?.apply_operator(&op);
    let den = rat(2 * j + mu + 1);
    let c_up = (rat(j - k + 1) * rat(j + k + mu + 1)) / den.clone();
    let c_dn = ((rat(j + l) + ratq(params.mu() + params.nu(), 2))
        * (rat(j - l) + ratq(params.mu() - params.nu(), 2)))
        / den;
    let mut rhs = cell_element(params, j + 1, k, l, phi, psi)?
        .scale(&ExactScalar::from_rat(c_up));
    if j - 1 >= k {
        rhs = rhs.sub(
            &cell_element(params, j - 1, k, l, phi, psi)?.scale(&ExactScalar::from_rat(c_dn)),
        );
    }
    Ok(lhs.sub(&rhs))
}

/// The intertwiner target: both blocks extended by one even variable and
/// merged into a single space (μ-block evens, extension `s₀`, ν-block
/// evens, extension `t₀`, then the odd pairs).
pub struct PhiIso {
    pub params: ModelParams,
    pub metric: Metric,
    /// Model variable index of a μ-block variable (evens then odds).
    pub mu_vars: Vec<usize>,
    pub nu_vars: Vec<usize>,
    pub s0: usize,
    pub t0: usize,
}

impl PhiIso {
    pub fn new(params: &ModelParams) -> PhiIso {
        let mu_block = Block::mu_block(params);
        let nu_block = Block::nu_block(params);
        let ne_mu = mu_block.metric.n_even();
        let ne_nu = nu_block.metric.n_even();
        let mut signs = mu_block.metric.even_signs.clone();
        signs.push(match mu_block.kind {
            BlockKind::PlusOdd => 1,
            BlockKind::Minus => -1,
        });
        signs.extend(nu_block.metric.even_signs.clone());
        signs.push(match nu_block.kind {
            BlockKind::PlusOdd => 1,
            BlockKind::Minus => -1,
        });
        let metric = Metric::new(signs, params.n as usize);
        let n_even = metric.n_even();
        let mut mu_vars: Vec<usize> = (0..ne_mu).collect();
        let mut nu_vars: Vec<usize> = (ne_mu + 1..ne_mu + 1 + ne_nu).collect();
        // odd variables attach to whichever block carries them
        let odd: Vec<usize> = (n_even..n_even + metric.n_odd()).collect();
        match mu_block.kind {
            BlockKind::PlusOdd => mu_vars.extend(odd),
            BlockKind::Minus => nu_vars.extend(odd),
        }
        PhiIso {
            params: *params,
            metric,
            mu_vars,
            nu_vars,
            s0: ne_mu,
            t0: ne_mu + 1 + ne_nu,
        }
    }

    fn embed(&self, block_vars: &[usize], extension: usize, f: &SuperPolynomial) -> SuperPolynomial {
        let _ = extension;
        let ne = self.metric.n_even();
        let mut out = SuperPolynomial::zero();
        for (m, c) in f.terms() {
            let mut mono = Monomial::unit(ne);
            for (v, e) in m.even.iter().enumerate() {
                mono.even[block_vars[v]] = *e;
            }
            // odd indices coincide between block and target
            mono.odd = m.odd;
            out.add_term(mono, c.clone());
        }
        out
    }

    /// `S²` (resp. `T²`): the positive quadratic of a block plus its
    /// extension variable.
    fn radius_squared(&self, block_vars: &[usize], extension: usize, kind: BlockKind) -> SuperPolynomial {
        let mut acc = SuperPolynomial::zero();
        for &v in block_vars.iter().chain(core::iter::once(&extension)) {
            if v < self.metric.n_even() {
                let x = SuperPolynomial::var(&self.metric, v);
                acc = acc.add(&x.mul(&x));
            }
        }
        if let BlockKind::PlusOdd = kind {
            // odd contribution θ² enters the plus radius
            acc = acc.add(&crate::superpoly::theta_squared(&self.metric));
        }
        acc
    }

    /// Image of the cell `φ_k ψ_l Λ^{μ+2k,ν+2l}_{2,j-k}`:
    /// `c_k d_l φψ S^{j-k} T^{j-l+(μ-ν)/2} C̃^{k+(μ+1)/2}_{j-k}(s₀/S)
    ///  C̃^{l+(ν+1)/2}_{j-l+(μ-ν)/2}(t₀/T)`.
    pub fn apply_cell(
        &self,
        j: i64,
        k: i64,
        l: i64,
        phi: &SuperPolynomial,
        psi: &SuperPolynomial,
    ) -> Result<SuperPolynomial, String> {
        let params = &self.params;
        let mu = params.mu();
        let nu = params.nu();
        let mu_block = Block::mu_block(params);
        let nu_block = Block::nu_block(params);
        // c_k = (-4i)^k / (μ+j+1)_k,  d_l = (4i)^l / (-j-(μ-ν)/2)_l
        let mut ck = ExactScalar::one();
        for _ in 0..k {
            ck = &ck * &(&ExactScalar::from_int(-4) * &ExactScalar::i());
        }
        let den = pochhammer(&rat(mu + j + 1), k as u32);
        if den.is_zero() {
            return Err(String::from("c_k denominator vanishes"));
        }
        ck = ck.scale_rat(&(Rat::from_integer(1.into()) / den));
        let mut dl = ExactScalar::one();
        for _ in 0..l {
            dl = &dl * &(&ExactScalar::from_int(4) * &ExactScalar::i());
        }
        let den = pochhammer(&(rat(-j) - ratq(mu - nu, 2)), l as u32);
        if den.is_zero() {
            return Err(String::from("d_l denominator vanishes"));
        }
        dl = dl.scale_rat(&(Rat::from_integer(1.into()) / den));

        let s_sq = self.radius_squared(&self.mu_vars, self.s0, mu_block.kind);
        let t_sq = self.radius_squared(&self.nu_vars, self.t0, nu_block.kind);
        let deg_s = j - k;
        let deg_t = j - l + (mu - nu) / 2;
        let cg_s = crate::radial::gegenbauer(&(rat(k) + ratq(mu + 1, 2)), deg_s)?;
        let cg_t = crate::radial::gegenbauer(&(rat(l) + ratq(nu + 1, 2)), deg_t)?;
        let gs = crate::radial::gegenbauer_homogeneous(&self.metric, &cg_s, deg_s, self.s0, &s_sq);
        let gt = crate::radial::gegenbauer_homogeneous(&self.metric, &cg_t, deg_t, self.t0, &t_sq);
        let phi_e = self.embed(&self.mu_vars, self.s0, phi);
        let psi_e = self.embed(&self.nu_vars, self.t0, psi);
        Ok(phi_e
            .mul(&psi_e)
            .mul(&gs)
            .mul(&gt)
            .scale(&(&ck * &dl)))
    }

    /// Laplacian over a subset of variables of the combined space.
    pub fn block_laplacian(&self, vars: &[usize], extension: usize, f: &SuperPolynomial) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero();
        let all: Vec<usize> = vars.iter().copied().chain(core::iter::once(extension)).collect();
        for &i in &all {
            for &jv in &all {
                let c = self.metric.beta_inv(jv, i);
                if c != 0 {
                    let d = f.partial_lower(&self.metric, i).partial_lower(&self.metric, jv);
                    out = if c > 0 { out.add(&d) } else { out.sub(&d) };
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p441() -> ModelParams {
        ModelParams::new(4, 4, 1).unwrap()
    }

    #[test]
    fn w0_dimension_and_content() {
        let params = p441();
        // dim W₀ = Σ_{l≤1} dim H₀(R³)·dim H_l(R^{3|2}) = 1 + 5
        let (d0, trunc) = w_dim(&params, 0);
        assert_eq!(d0, 6);
        assert!(!trunc);
        // cross-check via the tensor form: dim H₀(R⁴)·dim H₁(R^{4|2}) = 1·6
        assert_eq!(dim_formula(4, 0, 0) * dim_formula(4, 2, 1), 6);
        let wb = WBasis::build(&params, 1).unwrap();
        assert_eq!(wb.dim_wj(0), 6);
        // the (k,l) = (0,0) element is Λ^{μ,ν}_{2,0} = K̃_{ν/2}/Γ((μ+2)/2)
        let e0 = wb
            .elements
            .iter()
            .find(|e| e.j == 0 && e.k == 0 && e.l == 0)
            .unwrap();
        let lam = crate::radial::laguerre(&rat(1), &rat(-1), 0).unwrap();
        assert_eq!(e0.mixed, MixedElement::from_radial(&params, &lam.expansion));
    }

    #[test]
    fn basis_rejects_bad_hypotheses() {
        // p+q odd
        let p = ModelParams::new(3, 4, 0).unwrap();
        assert!(WBasis::build(&p, 0).is_err());
        // ν ∈ -2N at (3,5,0)
        let p = ModelParams::new(3, 5, 0).unwrap();
        assert!(WBasis::build(&p, 0).is_err());
    }

    #[test]
    fn expansion_round_trip_is_exact() {
        let params = p441();
        let wb = WBasis::build(&params, 1).unwrap();
        for (i, e) in wb.elements.iter().enumerate() {
            let coords = wb.expand(&e.mixed).unwrap();
            for (j, c) in coords.iter().enumerate() {
                if i == j {
                    assert!(c.is_one(), "diagonal coordinate must be 1");
                } else {
                    assert!(c.is_zero());
                }
            }
        }
        // a combination expands to its coefficients
        let v = wb.elements[0]
            .mixed
            .scale(&ExactScalar::from_int(3))
            .add(&wb.elements[4].mixed.scale(&ExactScalar::i()));
        let coords = wb.expand(&v).unwrap();
        assert_eq!(coords[0], ExactScalar::from_int(3));
        assert_eq!(coords[4], ExactScalar::i());
    }

    #[test]
    fn bessel_raising_identity_on_low_cells() {
        let params = p441();
        let mu_block = Block::mu_block(&params);
        let nu_block = Block::nu_block(&params);
        let mu_h: Vec<_> = (0..=2).map(|k| harmonic_basis(&mu_block, k).elements).collect();
        let nu_h: Vec<_> = (0..=2).map(|l| harmonic_basis(&nu_block, l).elements).collect();
        for (j, k, l) in [(0, 0, 0), (1, 0, 1), (1, 1, 0), (2, 1, 1)] {
            if params.nu() + 2 * l == 0 {
                continue;
            }
            for i in 0..mu_block.metric.n_vars() {
                for phi in mu_h[k as usize].iter().take(2) {
                    for psi in nu_h[l as usize].iter().take(2) {
                        let d = bessel_plus_defect(&params, j, k, l, i, phi, psi).unwrap();
                        assert!(d.is_zero(), "B⁺ defect at (j,k,l,i)=({j},{k},{l},{i})");
                    }
                }
            }
            for i in 0..nu_block.metric.n_vars() {
                for phi in mu_h[k as usize].iter().take(2) {
                    for psi in nu_h[l as usize].iter().take(2) {
                        let d = bessel_minus_defect(&params, j, k, l, i, phi, psi).unwrap();
                        assert!(d.is_zero(), "B⁻ defect at (j,k,l,i)=({j},{k},{l},{i})");
                    }
                }
            }
        }
    }

    #[test]
    fn degree_shift_coefficients() {
        let params = p441();
        let alg = TkkAlgebra::new(&params);
        let mu_block = Block::mu_block(&params);
        let nu_block = Block::nu_block(&params);
        let mu_h: Vec<_> = (0..=1).map(|k| harmonic_basis(&mu_block, k).elements).collect();
        let nu_h: Vec<_> = (0..=2).map(|l| harmonic_basis(&nu_block, l).elements).collect();
        for (j, k, l) in [(0i64, 0i64, 0i64), (0, 0, 1), (1, 0, 0), (1, 1, 1), (1, 0, 2)] {
            for phi in mu_h[k as usize].iter().take(2) {
                for psi in nu_h[l as usize].iter().take(2) {
                    let d = le_action_defect(&alg, j, k, l, phi, psi).unwrap();
                    assert!(d.is_zero(), "L_e defect at (j,k,l)=({j},{k},{l})");
                }
            }
        }
    }

    #[test]
    fn action_stays_within_one_degree_step() {
        let params = p441();
        let alg = TkkAlgebra::new(&params);
        let wb = WBasis::build(&params, 2).unwrap();
        // a spread of generators: L_e, a k₀ rotation, a multiplication, a
        // Bessel element
        let picks = vec![
            alg.index_istr(alg.le_istr_index()),
            alg.index_istr(1),
            alg.index_eminus(0),
            alg.index_eminus(2),
            alg.index_eplus(1),
        ];
        for &xi in &picks {
            let x = TkkElement::basis(&alg, xi);
            for (idx, e) in wb.elements.iter().enumerate() {
                if e.j > 1 {
                    continue; // keep one unit of headroom
                }
                let mut coords = vec![ExactScalar::zero(); wb.dim()];
                coords[idx] = ExactScalar::one();
                let img = wb.act(&alg, &x, &coords).unwrap();
                for (t, c) in img.iter().enumerate() {
                    if !c.is_zero() {
                        let dj = (wb.elements[t].j - e.j).abs();
                        assert!(dj <= 1, "action moved degree by {dj}");
                    }
                }
            }
        }
    }

    #[test]
    fn gk_growth_degree() {
        for (p, q, n) in [(4i64, 4, 1), (3, 5, 0)] {
            let params = ModelParams::new(p, q, n).unwrap();
            let (deg, _) = gk_dimension(&params, 2 * n + 14).unwrap();
            assert_eq!(deg, p + q - 3, "growth degree at ({p},{q},{n})");
        }
    }

    #[test]
    fn intertwiner_dimensions_and_harmonicity() {
        let params = p441();
        let iso = PhiIso::new(&params);
        let mu_block = Block::mu_block(&params);
        let nu_block = Block::nu_block(&params);
        for j in 0..=1i64 {
            // dim W_j = dim H_j(R^{μ+3}) · dim H_{(μ-ν)/2+j}(R^{ν+3})
            let (dw, _) = w_dim(&params, j);
            let ext_mu = mu_block.extended();
            let ext_nu = nu_block.extended();
            let lhs = dim_formula(
                ext_mu.metric.n_even() as i64,
                ext_mu.metric.n_odd() as i64,
                j,
            ) * dim_formula(
                ext_nu.metric.n_even() as i64,
                ext_nu.metric.n_odd() as i64,
                (params.mu() - params.nu()) / 2 + j,
            );
            assert_eq!(dw, lhs, "tensor dimension identity at j={j}");
            // images are harmonic in both extended blocks
            let mu_h: Vec<_> = (0..=j).map(|k| harmonic_basis(&mu_block, k).elements).collect();
            let nu_h: Vec<_> =
                (0..=l_range_max(&params, j)).map(|l| harmonic_basis(&nu_block, l).elements).collect();
            for k in 0..=j {
                for l in 0..=l_range_max(&params, j) {
                    for phi in mu_h[k as usize].iter().take(2) {
                        for psi in nu_h[l as usize].iter().take(2) {
                            let img = iso.apply_cell(j, k, l, phi, psi).unwrap();
                            assert!(
                                iso.block_laplacian(&iso.mu_vars, iso.s0, &img).is_zero(),
                                "μ-block harmonicity fails at (j,k,l)=({j},{k},{l})"
                            );
                            assert!(
                                iso.block_laplacian(&iso.nu_vars, iso.t0, &img).is_zero(),
                                "ν-block harmonicity fails at (j,k,l)=({j},{k},{l})"
                            );
                        }
                    }
                }
            }
        }
    }
}
