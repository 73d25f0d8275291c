//! Spherical harmonics `H_k` as exact kernels of the block Laplacian on
//! homogeneous superpolynomials, the closed-form dimension count, the
//! Fischer decomposition check, and the degree raising/lowering maps that
//! pair a harmonic with a linear coordinate.

use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::linalg::{kernel_rat, normalize_primitive, rank_rat};
use crate::scalar::{rat, ExactScalar, Rat};
use crate::superpoly::{monomials_of_degree, r_squared, Metric, ModelParams, SuperPolynomial};

/// Which block a harmonic family lives on; the minus-signed block carries
/// an extra sign in its raising map.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BlockKind {
    /// Plus-signed even variables together with the odd ones.
    PlusOdd,
    /// Minus-signed even variables only.
    Minus,
}

/// A harmonic block: the variable space plus its raising/lowering sign
/// convention.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Block {
    pub metric: Metric,
    pub kind: BlockKind,
}

impl Block {
    /// The x/θ block `R^{p-1|2n}`.
    pub fn x_theta(params: &ModelParams) -> Block {
        Block {
            metric: Metric::new(alloc::vec![1i8; (params.p - 1) as usize], params.n as usize),
            kind: BlockKind::PlusOdd,
        }
    }

    /// The y block `R^{q-1}`.
    pub fn y(params: &ModelParams) -> Block {
        Block {
            metric: Metric::new(alloc::vec![-1i8; (params.q - 1) as usize], 0),
            kind: BlockKind::Minus,
        }
    }

    /// The block carrying `μ` (the larger label).
    pub fn mu_block(params: &ModelParams) -> Block {
        if params.mu_block_is_x() {
            Block::x_theta(params)
        } else {
            Block::y(params)
        }
    }

    /// The block carrying `ν`.
    pub fn nu_block(params: &ModelParams) -> Block {
        if params.mu_block_is_x() {
            Block::y(params)
        } else {
            Block::x_theta(params)
        }
    }

    /// Extend by one even variable of the block's sign (the `s₀`/`t₀`
    /// directions of the intertwiner target).
    pub fn extended(&self) -> Block {
        let mut signs = self.metric.even_signs.clone();
        signs.push(match self.kind {
            BlockKind::PlusOdd => 1,
            BlockKind::Minus => -1,
        });
        Block { metric: Metric::new(signs, self.metric.odd_pairs), kind: self.kind }
    }

    /// Index of the extension variable in [`Block::extended`].
    pub fn extension_var(&self) -> usize {
        self.metric.n_even()
    }

    /// Superdimension label: second parameter in the dimension formula.
    pub fn superdim(&self) -> i64 {
        self.metric.superdim()
    }

    /// Raising/lowering denominator `sdim - 2 + 2k`.
    pub fn denominator(&self, k: i64) -> i64 {
        self.superdim() - 2 + 2 * k
    }
}

/// Binomial coefficient, zero outside the Pascal triangle.
pub fn binom(a: i64, b: i64) -> i128 {
    if b < 0 || a < b {
        return 0;
    }
    let mut acc: i128 = 1;
    for i in 0..b {
        acc = acc * (a - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// Closed-form dimension of `H_k(R^{m|2n})` for `m ≥ 1`:
/// two alternating sums of products of binomials.
pub fn dim_formula(m: i64, two_n: i64, k: i64) -> i128 {
    if k < 0 {
        return 0;
    }
    let mut first: i128 = 0;
    for i in 0..=core::cmp::min(k, two_n) {
        first += binom(two_n, i) * binom(k - i + m - 1, m - 1);
    }
    let mut second: i128 = 0;
    if k >= 2 {
        for i in 0..=core::cmp::min(k - 2, two_n) {
            second += binom(two_n, i) * binom(k - i + m - 3, m - 1);
        }
    }
    first - second
}

/// Dimension of the full polynomial space `P_k(R^{m|2n})`.
pub fn dim_poly(m: i64, two_n: i64, k: i64) -> i128 {
    let mut acc: i128 = 0;
    for i in 0..=core::cmp::min(k, two_n) {
        acc += binom(two_n, i) * binom(k - i + m - 1, m - 1);
    }
    acc
}

/// A degree-`k` harmonic basis of a block, deterministic via reduced
/// echelon kernel computation in graded-lex monomial order.
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    pub degree: i64,
    pub elements: Vec<SuperPolynomial>,
}

fn coeff_as_rat(c: &ExactScalar) -> Rat {
    if c.is_zero() {
        return Rat::zero();
    }
    let (g, k) = c.as_monomial().expect("rational coefficient");
    assert_eq!(k, 0, "rational coefficient");
    assert!(g.im.is_zero(), "rational coefficient");
    g.re.clone()
}

/// Exact kernel basis of the block Laplacian on `P_k`.
pub fn harmonic_basis(block: &Block, k: i64) -> HarmonicBasis {
    let metric = &block.metric;
    let monos = monomials_of_degree(metric, k as u32);
    let kernel = if k < 2 {
        // every monomial of degree 0 or 1 is harmonic
        (0..monos.len())
            .map(|i| {
                let mut v = alloc::vec![Rat::zero(); monos.len()];
                v[i] = Rat::from_integer(1.into());
                v
            })
            .collect::<Vec<_>>()
    } else {
        let lower = monomials_of_degree(metric, (k - 2) as u32);
        let mut images: Vec<Vec<Rat>> = Vec::new();
        for mono in &monos {
            let mut f = SuperPolynomial::zero();
            f.add_term(mono.clone(), ExactScalar::one());
            let lf = f.laplacian(metric);
            let mut col = alloc::vec![Rat::zero(); lower.len()];
            for (m, c) in lf.terms() {
                let pos = lower.binary_search(m).expect("degree k-2 monomial");
                col[pos] = coeff_as_rat(c);
            }
            images.push(col);
        }
        // equations indexed by target monomials
        let rows: Vec<Vec<Rat>> = (0..lower.len())
            .map(|r| images.iter().map(|col| col[r].clone()).collect())
            .collect();
        kernel_rat(&rows, monos.len())
    };
    let elements = kernel
        .into_iter()
        .map(|mut v| {
            normalize_primitive(&mut v);
            let mut f = SuperPolynomial::zero();
            for (i, c) in v.into_iter().enumerate() {
                if !c.is_zero() {
                    f.add_term(monos[i].clone(), ExactScalar::from_rat(c));
                }
            }
            f
        })
        .collect();
    HarmonicBasis { degree: k, elements }
}

/// Report of a Fischer decomposition check at one degree.
#[derive(Clone, Debug)]
pub struct FischerReport {
    pub degree: i64,
    pub dim_poly: i128,
    pub dim_sum: i128,
    pub spanning_rank: usize,
    pub pass: bool,
    pub skipped: Option<String>,
}

/// Verify `dim P_k = Σ_j dim H_{k-2j}` and that `{R^{2j} h}` spans `P_k`,
/// under the hypothesis `m - 2n ∉ -2N`.
pub fn fischer_check(block: &Block, k: i64) -> FischerReport {
    let metric = &block.metric;
    let sdim = block.superdim();
    if sdim <= 0 && sdim % 2 == 0 {
        return FischerReport {
            degree: k,
            dim_poly: 0,
            dim_sum: 0,
            spanning_rank: 0,
            pass: false,
            skipped: Some(alloc::format!(
                "superdimension {sdim} lies in -2N; decomposition hypothesis fails"
            )),
        };
    }
    let m = metric.n_even() as i64;
    let two_n = metric.n_odd() as i64;
    let dp = dim_poly(m, two_n, k);
    let mut dim_sum: i128 = 0;
    let mut j = 0;
    while k - 2 * j >= 0 {
        dim_sum += dim_formula(m, two_n, k - 2 * j);
        j += 1;
    }
    // spanning: coordinates of R^{2j}·h over the monomials of degree k
    let monos = monomials_of_degree(metric, k as u32);
    let r2 = r_squared(metric);
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut j = 0;
    while k - 2 * j >= 0 {
        let hb = harmonic_basis(block, k - 2 * j);
        let mut r2j = SuperPolynomial::one(metric);
        for _ in 0..j {
            r2j = r2j.mul(&r2);
        }
        for h in &hb.elements {
            let f = r2j.mul(h);
            let mut row = alloc::vec![Rat::zero(); monos.len()];
            for (m_, c) in f.terms() {
                let pos = monos.binary_search(m_).expect("degree k monomial");
                row[pos] = coeff_as_rat(c);
            }
            rows.push(row);
        }
        j += 1;
    }
    let rank = rank_rat(rows);
    FischerReport {
        degree: k,
        dim_poly: dp,
        dim_sum,
        spanning_rank: rank,
        pass: dp == dim_sum && rank as i128 == dp,
        skipped: None,
    }
}

/// Raising map: combines a degree-`k` harmonic with the coordinate `z_i`
/// to land in `H_{k+1}`.  For `k ≥ 1` the denominator must not vanish.
pub fn raise_harmonic(
    block: &Block,
    phi: &SuperPolynomial,
    k: i64,
    i: usize,
) -> Result<SuperPolynomial, String> {
    let metric = &block.metric;
    let zi = SuperPolynomial::var(metric, i);
    let dphi = phi.partial_lower(metric, i);
    let correction = if dphi.is_zero() {
        SuperPolynomial::zero()
    } else {
        let den = block.denominator(k);
        if den == 0 {
            return Err(alloc::format!("vanishing denominator at degree {k}"));
        }
        match block.kind {
            BlockKind::PlusOdd => {
                // (s²+θ²)/den · ∂φ;  s²+θ² is the block R²
                r_squared(metric)
                    .mul(&dphi)
                    .scale(&ExactScalar::from_rat(rat(1) / rat(den)))
            }
            BlockKind::Minus => {
                // t²/den · ∂φ;  t² = -R² of the block
                r_squared(metric)
                    .neg()
                    .mul(&dphi)
                    .scale(&ExactScalar::from_rat(rat(1) / rat(den)))
            }
        }
    };
    let out = match block.kind {
        BlockKind::PlusOdd => zi.mul(phi).sub(&correction),
        BlockKind::Minus => zi.mul(phi).neg().sub(&correction),
    };
    Ok(out)
}

/// Lowering map into `H_{k-1}`; zero on degree-0 harmonics.
pub fn lower_harmonic(
    block: &Block,
    phi: &SuperPolynomial,
    k: i64,
    i: usize,
) -> Result<SuperPolynomial, String> {
    let metric = &block.metric;
    let dphi = phi.partial_lower(metric, i);
    if dphi.is_zero() {
        return Ok(SuperPolynomial::zero());
    }
    let den = block.denominator(k);
    if den == 0 {
        return Err(alloc::format!("vanishing denominator at degree {k}"));
    }
    Ok(dphi.scale(&ExactScalar::from_rat(rat(1) / rat(den))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_formula_examples() {
        // classical R³: 2k+1
        for k in 0..8 {
            assert_eq!(dim_formula(3, 0, k), (2 * k + 1) as i128);
        }
        // R^{6|2} at k = 2
        assert_eq!(dim_formula(6, 2, 2), 33);
        // (3,2,1): C(2,0)C(3,2) + C(2,1)C(2,2) = 3 + 2
        assert_eq!(dim_formula(3, 2, 1), 5);
        // n = 0 collapse: C(k+m-1, m-1) - C(k+m-3, m-1)
        for m in 2..6i64 {
            for k in 0..6i64 {
                let expect = binom(k + m - 1, m - 1) - binom(k + m - 3, m - 1);
                assert_eq!(dim_formula(m, 0, k), expect);
            }
        }
    }

    #[test]
    fn kernel_rank_matches_the_formula() {
        let p441 = ModelParams::new(4, 4, 1).unwrap();
        let p641 = ModelParams::new(6, 4, 1).unwrap();
        for block in [
            Block::x_theta(&p441),
            Block::y(&p441),
            Block::x_theta(&p641),
        ] {
            let m = block.metric.n_even() as i64;
            let two_n = block.metric.n_odd() as i64;
            for k in 0..=4i64 {
                let hb = harmonic_basis(&block, k);
                assert_eq!(
                    hb.elements.len() as i128,
                    dim_formula(m, two_n, k),
                    "rank mismatch at m={m}, 2n={two_n}, k={k}"
                );
                for h in &hb.elements {
                    assert!(h.laplacian(&block.metric).is_zero());
                    assert!(h.terms().all(|(mo, _)| mo.degree() as i64 == k));
                }
            }
        }
    }

    #[test]
    fn degree_one_harmonics_are_all_monomials() {
        let p = ModelParams::new(4, 4, 1).unwrap();
        let hb = harmonic_basis(&Block::x_theta(&p), 1);
        assert_eq!(hb.elements.len(), 5);
    }

    #[test]
    fn fischer_decomposition_holds() {
        // R^{6|2} at degree 2: dim P₂ = 34 = 33 + 1
        let block = Block {
            metric: Metric::new(alloc::vec![1i8; 6], 1),
            kind: BlockKind::PlusOdd,
        };
        let rep = fischer_check(&block, 2);
        assert!(rep.pass);
        assert_eq!(rep.dim_poly, 34);
        assert_eq!(rep.dim_sum, 33 + 1);
        // classical R³ at k = 3: 7 + 3 = 10
        let b3 = Block { metric: Metric::new(alloc::vec![1i8; 3], 0), kind: BlockKind::PlusOdd };
        let rep = fischer_check(&b3, 3);
        assert!(rep.pass);
        assert_eq!(rep.dim_poly, 10);
        assert_eq!(rep.dim_sum, 7 + 3);
        // degree zero is trivially spanning
        let rep = fischer_check(&b3, 0);
        assert!(rep.pass);
    }

    #[test]
    fn raising_and_lowering_stay_harmonic() {
        let p = ModelParams::new(4, 4, 1).unwrap();
        for block in [Block::x_theta(&p), Block::y(&p)] {
            for k in 0..=3i64 {
                let hb = harmonic_basis(&block, k);
                for phi in hb.elements.iter().take(4) {
                    for i in 0..block.metric.n_vars() {
                        let up = raise_harmonic(&block, phi, k, i).unwrap();
                        assert!(up.laplacian(&block.metric).is_zero());
                        let down = lower_harmonic(&block, phi, k, i).unwrap();
                        assert!(down.laplacian(&block.metric).is_zero());
                    }
                }
            }
        }
        // raise of the constant keeps only the coordinate term
        let block = Block::x_theta(&p);
        let one = SuperPolynomial::one(&block.metric);
        let up = raise_harmonic(&block, &one, 0, 0).unwrap();
        assert_eq!(up, SuperPolynomial::var(&block.metric, 0));
        assert!(lower_harmonic(&block, &one, 0, 0).unwrap().is_zero());
    }

    #[test]
    fn osp_block_action_preserves_harmonics() {
        // the testable surrogate for irreducibility: block rotations map
        // H_k into H_k
        let p = ModelParams::new(4, 4, 1).unwrap();
        let block = Block::x_theta(&p);
        let hb = harmonic_basis(&block, 2);
        for (_, _, l) in crate::operators::osp_generators(&block.metric) {
            for phi in &hb.elements {
                let img = l.apply(&block.metric, phi);
                assert!(img.laplacian(&block.metric).is_zero());
            }
        }
    }
}
