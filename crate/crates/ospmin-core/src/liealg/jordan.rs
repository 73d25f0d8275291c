//! The spin factor Jordan superalgebra `J = R·e ⊕ V` with
//! `(λe+u)(μe+v) = (λμ + ⟨u,v⟩)e + λv + μu`, where `V` carries a
//! supersymmetric form of even signature `(p-1, q-2)` and `2n` odd
//! symplectic directions.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::scalar::{rat, Rat};
use crate::superpoly::{Metric, ModelParams};

/// Element `λe + u`, coordinates over the homogeneous basis
/// `(e_0 = e, e_1, …, e_{p+q-3+2n})`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JordanElement {
    pub coords: Vec<Rat>,
}

/// Dimension of `J` as a plain vector space.
pub fn dim_j(params: &ModelParams) -> usize {
    (params.p + params.q - 2 + 2 * params.n) as usize
}

/// Dimension of `V = J / R·e`.
pub fn dim_v(params: &ModelParams) -> usize {
    dim_j(params) - 1
}

/// The form on `V`: `p-1` plus signs, `q-2` minus signs, `n` odd pairs.
pub fn v_metric(params: &ModelParams) -> Metric {
    let mut signs = vec![1i8; (params.p - 1) as usize];
    signs.extend(vec![-1i8; (params.q - 2) as usize]);
    Metric::new(signs, params.n as usize)
}

/// Parity of the basis element `e_i` of `J`.
pub fn parity(params: &ModelParams, i: usize) -> u8 {
    if i == 0 {
        0
    } else if i - 1 < v_metric(params).n_even() {
        0
    } else {
        1
    }
}

/// The extended form on `J`: `β_{00} = -1`, `β_{0i} = 0`, `β_{ij} = β̃_{ij}`.
pub fn beta_j(params: &ModelParams, i: usize, j: usize) -> Rat {
    if i == 0 || j == 0 {
        if i == 0 && j == 0 {
            rat(-1)
        } else {
            Rat::zero()
        }
    } else {
        rat(v_metric(params).beta(i - 1, j - 1))
    }
}

impl JordanElement {
    pub fn zero(params: &ModelParams) -> Self {
        JordanElement { coords: vec![Rat::zero(); dim_j(params)] }
    }

    pub fn basis(params: &ModelParams, i: usize) -> Self {
        let mut z = JordanElement::zero(params);
        z.coords[i] = Rat::one();
        z
    }

    pub fn unit(params: &ModelParams) -> Self {
        JordanElement::basis(params, 0)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        JordanElement { coords: self.coords.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        JordanElement {
            coords: self
                .coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }
}

/// Product of basis elements: `e_0` is the unit, `e_i e_j = β̃_{ij} e_0`.
pub fn mul_basis(params: &ModelParams, i: usize, j: usize) -> JordanElement {
    if i == 0 {
        JordanElement::basis(params, j)
    } else if j == 0 {
        JordanElement::basis(params, i)
    } else {
        JordanElement::unit(params).scale(&rat(v_metric(params).beta(i - 1, j - 1)))
    }
}

/// The spin factor product, bilinear over the structure constants.
pub fn jordan_mul(params: &ModelParams, a: &JordanElement, b: &JordanElement) -> JordanElement {
    let mut out = JordanElement::zero(params);
    for (i, ai) in a.coords.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.coords.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            let prod = mul_basis(params, i, j).scale(&(ai * bj));
            out = out.add(&prod);
        }
    }
    out
}

/// A parity-homogeneous endomorphism of `J` in matrix form
/// (`A(e_j) = Σ_i mat[i][j] e_i`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Endo {
    pub parity: u8,
    pub mat: Vec<Vec<Rat>>,
}

impl Endo {
    pub fn zero(dim: usize, parity: u8) -> Self {
        Endo { parity, mat: vec![vec![Rat::zero(); dim]; dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut e = Endo::zero(dim, 0);
        for i in 0..dim {
            e.mat[i][i] = Rat::one();
        }
        e
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        let dim = self.mat.len();
        let mut out = vec![Rat::zero(); dim];
        for j in 0..dim {
            if v[j].is_zero() {
                continue;
            }
            for i in 0..dim {
                if !self.mat[i][j].is_zero() {
                    out[i] = &out[i] + &(&self.mat[i][j] * &v[j]);
                }
            }
        }
        out
    }

    pub fn compose(&self, other: &Endo) -> Endo {
        let dim = self.mat.len();
        let mut out = Endo::zero(dim, (self.parity + other.parity) % 2);
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = Rat::zero();
                for k in 0..dim {
                    if !self.mat[i][k].is_zero() && !other.mat[k][j].is_zero() {
                        acc += &self.mat[i][k] * &other.mat[k][j];
                    }
                }
                out.mat[i][j] = acc;
            }
        }
        out
    }

    pub fn add(&self, other: &Endo) -> Endo {
        debug_assert_eq!(self.parity, other.parity);
        let dim = self.mat.len();
        let mut out = Endo::zero(dim, self.parity);
        for i in 0..dim {
            for j in 0..dim {
                out.mat[i][j] = &self.mat[i][j] + &other.mat[i][j];
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Endo {
        Endo {
            parity: self.parity,
            mat: self
                .mat
                .iter()
                .map(|row| row.iter().map(|x| x * c).collect())
                .collect(),
        }
    }

    pub fn neg(&self) -> Endo {
        self.scale(&rat(-1))
    }

    pub fn is_zero(&self) -> bool {
        self.mat.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }

    /// Supercommutator `[A,B] = AB - (-1)^{|A||B|} BA`.
    pub fn supercommutator(&self, other: &Endo) -> Endo {
        let ab = self.compose(other);
        let ba = other.compose(self);
        let sgn = if self.parity * other.parity == 1 { Rat::one() } else { -Rat::one() };
        let dim = ab.mat.len();
        let mut out = Endo::zero(dim, (self.parity + other.parity) % 2);
        for i in 0..dim {
            for j in 0..dim {
                out.mat[i][j] = &ab.mat[i][j] + &(&sgn * &ba.mat[i][j]);
            }
        }
        out
    }

    pub fn flatten(&self) -> Vec<Rat> {
        self.mat.iter().flat_map(|r| r.iter().cloned()).collect()
    }
}

/// Left multiplication operator `L_x` for a basis element `x = e_i`.
pub fn l_basis(params: &ModelParams, i: usize) -> Endo {
    let dim = dim_j(params);
    let mut out = Endo::zero(dim, parity(params, i));
    for j in 0..dim {
        let prod = mul_basis(params, i, j);
        for (k, c) in prod.coords.iter().enumerate() {
            out.mat[k][j] = c.clone();
        }
    }
    out
}

/// Left multiplication by an arbitrary element (must be parity homogeneous
/// for the stated parity to be meaningful).
pub fn l_of(params: &ModelParams, x: &JordanElement, parity_of_x: u8) -> Endo {
    let dim = dim_j(params);
    let mut out = Endo::zero(dim, parity_of_x);
    for (i, c) in x.coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let li = l_basis(params, i).scale(c);
        out = out.add(&li);
    }
    out
}

/// Graded Jordan identity in operator form on basis elements:
/// `(-1)^{|x||z|}[L_x, L_{yz}] + (-1)^{|y||x|}[L_y, L_{zx}] + (-1)^{|z||y|}[L_z, L_{xy}] = 0`.
pub fn jordan_identity_holds(params: &ModelParams, x: usize, y: usize, z: usize) -> bool {
    let px = parity(params, x);
    let py = parity(params, y);
    let pz = parity(params, z);
    let lx = l_basis(params, x);
    let ly = l_basis(params, y);
    let lz = l_basis(params, z);
    let lyz = l_of(params, &mul_basis(params, y, z), (py + pz) % 2);
    let lzx = l_of(params, &mul_basis(params, z, x), (pz + px) % 2);
    let lxy = l_of(params, &mul_basis(params, x, y), (px + py) % 2);
    let mut t1 = lx.supercommutator(&lyz);
    if px * pz == 1 {
        t1 = t1.neg();
    }
    let mut t2 = ly.supercommutator(&lzx);
    if py * px == 1 {
        t2 = t2.neg();
    }
    let mut t3 = lz.supercommutator(&lxy);
    if pz * py == 1 {
        t3 = t3.neg();
    }
    // parities of the three summands agree, so plain addition is fine
    let dim = dim_j(params);
    let mut sum = Endo::zero(dim, (px + py + pz) % 2);
    sum = sum.add(&Endo { parity: sum.parity, mat: t1.mat });
    sum = sum.add(&Endo { parity: sum.parity, mat: t2.mat });
    sum = sum.add(&Endo { parity: sum.parity, mat: t3.mat });
    sum.is_zero()
}

/// Graded skewness with respect to the extended form:
/// `⟨A u, v⟩ + (-1)^{|A||u|} ⟨u, A v⟩ = 0` on all basis pairs.
pub fn is_beta_skew(params: &ModelParams, a: &Endo) -> bool {
    let dim = dim_j(params);
    for u in 0..dim {
        for v in 0..dim {
            // ⟨A e_u, e_v⟩ = Σ_k mat[k][u] β_{kv}
            let mut lhs = Rat::zero();
            for k in 0..dim {
                if !a.mat[k][u].is_zero() {
                    lhs += &a.mat[k][u] * &beta_j(params, k, v);
                }
            }
            let mut rhs = Rat::zero();
            for k in 0..dim {
                if !a.mat[k][v].is_zero() {
                    rhs += &beta_j(params, u, k) * &a.mat[k][v];
                }
            }
            let sign = if a.parity * parity(params, u) == 1 { rat(-1) } else { rat(1) };
            if lhs + sign * rhs != Rat::zero() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratq;

    fn pr() -> ModelParams {
        ModelParams::new(4, 4, 1).unwrap()
    }

    #[test]
    fn unit_acts_as_identity() {
        let p = pr();
        for i in 0..dim_j(&p) {
            let u = JordanElement::basis(&p, i);
            assert_eq!(jordan_mul(&p, &JordanElement::unit(&p), &u), u);
            assert_eq!(jordan_mul(&p, &u, &JordanElement::unit(&p)), u);
        }
    }

    #[test]
    fn product_of_vector_parts_lands_on_the_unit() {
        let p = pr();
        let u = JordanElement::basis(&p, 1);
        let v = JordanElement::basis(&p, 2);
        let prod = jordan_mul(&p, &u, &v);
        // ⟨e_1, e_2⟩ = 0 for the diagonal form
        assert!(prod.is_zero());
        let sq = jordan_mul(&p, &u, &u);
        assert_eq!(sq, JordanElement::unit(&p));
    }

    #[test]
    fn idempotents_in_the_spin_factor() {
        let p = pr();
        // c = ½e + x with ⟨x,x⟩ = ¼  is idempotent
        let mut c = JordanElement::unit(&p).scale(&ratq(1, 2));
        c.coords[1] = ratq(1, 2);
        assert_eq!(jordan_mul(&p, &c, &c), c);
        // and (½e+x, ½e-x) is a Jordan frame
        let mut c2 = JordanElement::unit(&p).scale(&ratq(1, 2));
        c2.coords[1] = ratq(-1, 2);
        assert!(jordan_mul(&p, &c, &c2).is_zero());
        assert_eq!(c.add(&c2), JordanElement::unit(&p));
        // λ ≠ ½ and x ≠ 0 is not
        let mut bad = JordanElement::unit(&p).scale(&ratq(1, 3));
        bad.coords[1] = ratq(1, 2);
        assert_ne!(jordan_mul(&p, &bad, &bad), bad);
    }

    #[test]
    fn jordan_identity_on_all_basis_triples() {
        for (p, q, n) in [(4, 4, 1), (3, 5, 0)] {
            let params = ModelParams::new(p, q, n).unwrap();
            let d = dim_j(&params);
            for x in 0..d {
                for y in 0..d {
                    for z in 0..d {
                        assert!(
                            jordan_identity_holds(&params, x, y, z),
                            "jordan identity fails at ({x},{y},{z}) for ({p},{q},{n})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn multiplications_by_vectors_are_beta_skew_but_le_is_not() {
        let p = pr();
        for i in 1..dim_j(&p) {
            assert!(is_beta_skew(&p, &l_basis(&p, i)), "L_e{i} must be skew");
        }
        for i in 1..dim_j(&p) {
            for j in 1..dim_j(&p) {
                let c = l_basis(&p, i).supercommutator(&l_basis(&p, j));
                assert!(is_beta_skew(&p, &c));
            }
        }
        assert!(!is_beta_skew(&p, &l_basis(&p, 0)));
    }
}
