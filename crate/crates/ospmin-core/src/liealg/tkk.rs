//! The TKK Lie superalgebra `g = J⁺ ⊕ istr(J) ⊕ J⁻` of the spin factor,
//! with structure constants generated from the Jordan product and a basis
//! of `istr(J)` selected by exact rank computation from the spanning set
//! `{L_{e_i}} ∪ {[L_{e_i}, L_{e_j}]}`.
//!
//! The `J⁺` coordinates are taken over the adapted basis `ē_k` with
//! `ē_0 = -e_0` and `ē_k = e_k` otherwise; this makes every downstream
//! table uniform in `k`.  Bracket rows are stored sparsely: the Jacobi
//! sweep touches every basis triple.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use super::jordan::{self, dim_j, l_basis, parity, Endo};
use crate::linalg::rref_rat;
use crate::scalar::{rat, Rat};
use crate::superpoly::ModelParams;

/// Name of an inner-structure basis element: `Le` is multiplication by the
/// unit; `Lij(i,0)` is `L_{e_i}` (it rotates `e_i` into the unit
/// direction); `Lij(i,j)` is the inner derivation `[L_{e_i}, L_{e_j}]`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IstrName {
    Le,
    Lij(usize, usize),
}

impl IstrName {
    pub fn render(&self) -> String {
        match self {
            IstrName::Le => String::from("Le"),
            IstrName::Lij(i, j) => alloc::format!("Lij({i},{j})"),
        }
    }
}

/// One basis element of `istr(J)` with its matrix on `J`.
#[derive(Clone, Debug)]
pub struct IstrBasisElem {
    pub name: IstrName,
    pub endo: Endo,
    /// Action on `J⁻`: `-L_a + D` for the unit decomposition `A = L_a + D`.
    pub minus_action: Endo,
    /// Coefficient of `L_e` in the decomposition `istr = osp(J) ⊕ R·L_e`.
    pub le_coeff: Rat,
}

/// Basis index into the full TKK algebra.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TkkName {
    /// `ē_k ∈ J⁺` (with `ē_0 = -e_0`).
    Eplus(usize),
    /// Inner structure element.
    Istr(usize),
    /// `e_k ∈ J⁻`.
    Eminus(usize),
}

/// Sparse coordinate vector over the TKK basis.
pub type Sparse = Vec<(usize, Rat)>;

fn sparse_add_into(acc: &mut Vec<Rat>, s: &Sparse, f: &Rat) {
    for (idx, c) in s {
        acc[*idx] = &acc[*idx] + &(c * f);
    }
}

/// Element in coordinates over the TKK basis `[ē_0.., istr.., e_0..]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TkkElement {
    pub coords: Vec<Rat>,
}

impl TkkElement {
    pub fn zero(alg: &TkkAlgebra) -> Self {
        TkkElement { coords: vec![Rat::zero(); alg.dim()] }
    }

    pub fn basis(alg: &TkkAlgebra, idx: usize) -> Self {
        let mut z = TkkElement::zero(alg);
        z.coords[idx] = Rat::one();
        z
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        TkkElement {
            coords: self
                .coords
                .iter()
                .zip(other.coords.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        TkkElement { coords: self.coords.iter().map(|x| x * c).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat(-1))
    }
}

/// Exact solver for coordinates over a fixed independent column family.
struct Expressor {
    pivot_rows: Vec<usize>,
    /// Inverse of the square submatrix on the pivot rows.
    inv: Vec<Vec<Rat>>,
    cols: Vec<Vec<Rat>>,
}

impl Expressor {
    fn new(cols: Vec<Vec<Rat>>) -> Self {
        let ncols = cols.len();
        let nrows = cols[0].len();
        // find pivot rows via RREF of the transposed column matrix
        let mut m: Vec<Vec<Rat>> = (0..nrows)
            .map(|r| cols.iter().map(|c| c[r].clone()).collect())
            .collect();
        // rref over rows: track original row indices through pivoting
        let mut tagged: Vec<(usize, Vec<Rat>)> = m.drain(..).enumerate().collect();
        let mut pivot_rows = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            let Some(pr) = (r..tagged.len()).find(|&i| !tagged[i].1[c].is_zero()) else {
                continue;
            };
            tagged.swap(r, pr);
            let inv = tagged[r].1[c].clone();
            for cc in 0..ncols {
                let v = &tagged[r].1[cc] / &inv;
                tagged[r].1[cc] = v;
            }
            for i in 0..tagged.len() {
                if i != r && !tagged[i].1[c].is_zero() {
                    let f = tagged[i].1[c].clone();
                    for cc in 0..ncols {
                        let v = &tagged[i].1[cc] - &(&f * &tagged[r].1[cc]);
                        tagged[i].1[cc] = v;
                    }
                }
            }
            pivot_rows.push(tagged[r].0);
            r += 1;
        }
        assert_eq!(pivot_rows.len(), ncols, "columns must be independent");
        // invert the square submatrix B[i][j] = cols[j][pivot_rows[i]]
        let nsq = ncols;
        let mut aug: Vec<Vec<Rat>> = (0..nsq)
            .map(|i| {
                let mut row: Vec<Rat> =
                    (0..nsq).map(|j| cols[j][pivot_rows[i]].clone()).collect();
                for k in 0..nsq {
                    row.push(if k == i { Rat::one() } else { Rat::zero() });
                }
                row
            })
            .collect();
        let piv = rref_rat(&mut aug);
        assert_eq!(piv.len(), nsq, "pivot submatrix must be invertible");
        let inv: Vec<Vec<Rat>> = (0..nsq)
            .map(|i| aug[i][nsq..].to_vec())
            .collect();
        Expressor { pivot_rows, inv, cols }
    }

    /// Coordinates of `target` over the columns; verifies exactness.
    fn express(&self, target: &[Rat]) -> Vec<Rat> {
        let n = self.cols.len();
        let mut sol = vec![Rat::zero(); n];
        for (i, &pr) in self.pivot_rows.iter().enumerate() {
            if target[pr].is_zero() {
                continue;
            }
            for (j, s) in sol.iter_mut().enumerate() {
                if !self.inv[j][i].is_zero() {
                    *s = &*s + &(&self.inv[j][i] * &target[pr]);
                }
            }
        }
        // exactness: reconstruct and compare
        let mut recon = vec![Rat::zero(); target.len()];
        for (j, c) in sol.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (r, v) in self.cols[j].iter().enumerate() {
                if !v.is_zero() {
                    recon[r] = &recon[r] + &(v * c);
                }
            }
        }
        assert_eq!(recon, target, "target must lie in the istr span");
        sol
    }
}

/// The TKK algebra with its precomputed structure constants.
pub struct TkkAlgebra {
    pub params: ModelParams,
    pub istr: Vec<IstrBasisElem>,
    /// `brackets[i][j]` = sparse coordinates of `[basis_i, basis_j]`.
    brackets: Vec<Vec<Sparse>>,
    parities: Vec<u8>,
}

impl TkkAlgebra {
    pub fn dim_j(&self) -> usize {
        dim_j(&self.params)
    }

    pub fn dim_istr(&self) -> usize {
        self.istr.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.dim_j() + self.dim_istr()
    }

    pub fn name(&self, idx: usize) -> TkkName {
        let dj = self.dim_j();
        if idx < dj {
            TkkName::Eplus(idx)
        } else if idx < dj + self.dim_istr() {
            TkkName::Istr(idx - dj)
        } else {
            TkkName::Eminus(idx - dj - self.dim_istr())
        }
    }

    pub fn render_name(&self, idx: usize) -> String {
        match self.name(idx) {
            TkkName::Eplus(k) => alloc::format!("Eplus({k})"),
            TkkName::Istr(a) => self.istr[a].name.render(),
            TkkName::Eminus(k) => alloc::format!("Eminus({k})"),
        }
    }

    pub fn parity(&self, idx: usize) -> u8 {
        self.parities[idx]
    }

    pub fn index_eplus(&self, k: usize) -> usize {
        k
    }

    pub fn index_istr(&self, a: usize) -> usize {
        self.dim_j() + a
    }

    pub fn index_eminus(&self, k: usize) -> usize {
        self.dim_j() + self.dim_istr() + k
    }

    /// Index of `L_e` in the istr basis.
    pub fn le_istr_index(&self) -> usize {
        self.istr
            .iter()
            .position(|e| matches!(e.name, IstrName::Le))
            .expect("istr basis contains L_e")
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> &Sparse {
        &self.brackets[i][j]
    }

    /// Bilinear extension of the bracket.
    pub fn bracket(&self, a: &TkkElement, b: &TkkElement) -> TkkElement {
        let mut out = TkkElement::zero(self);
        for (i, ca) in a.coords.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (j, cb) in b.coords.iter().enumerate() {
                if cb.is_zero() {
                    continue;
                }
                let f = ca * cb;
                sparse_add_into(&mut out.coords, &self.brackets[i][j], &f);
            }
        }
        out
    }

    /// Construct the algebra and its structure constants.
    pub fn new(params: &ModelParams) -> Self {
        let dj = dim_j(params);
        // spanning set of istr(J): L_{e_0} = id, L_{e_i}, [L_{e_i}, L_{e_j}]
        let mut candidates: Vec<(IstrName, Endo)> = Vec::new();
        candidates.push((IstrName::Le, Endo::identity(dj)));
        for i in 1..dj {
            candidates.push((IstrName::Lij(i, 0), l_basis(params, i)));
        }
        for i in 1..dj {
            for j in i..dj {
                let c = l_basis(params, i).supercommutator(&l_basis(params, j));
                if !c.is_zero() {
                    candidates.push((IstrName::Lij(i, j), c));
                }
            }
        }
        // prune to a maximal independent subset by exact rank growth
        let mut istr: Vec<IstrBasisElem> = Vec::new();
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        for (name, endo) in candidates {
            rows.push(endo.flatten());
            let new_rank = crate::linalg::rank_rat(rows.clone());
            if new_rank == istr.len() + 1 {
                // unit decomposition A = L_a + D with a = A(e_0)
                let mut e0 = vec![Rat::zero(); dj];
                e0[0] = Rat::one();
                let a_img = endo.apply(&e0);
                let a_elem = jordan::JordanElement { coords: a_img.clone() };
                let la = jordan::l_of(params, &a_elem, endo.parity);
                // action on J⁻: -L_a + D = A - 2 L_a
                let minus_action = endo.add(&la.scale(&rat(-2)));
                istr.push(IstrBasisElem {
                    name,
                    le_coeff: a_img[0].clone(),
                    endo,
                    minus_action,
                });
            } else {
                rows.pop();
            }
        }
        let dim_istr = istr.len();
        let dim = 2 * dj + dim_istr;

        let mut parities = Vec::with_capacity(dim);
        for k in 0..dj {
            parities.push(parity(params, k));
        }
        for e in &istr {
            parities.push(e.endo.parity);
        }
        for k in 0..dj {
            parities.push(parity(params, k));
        }

        let expressor = Expressor::new(istr.iter().map(|e| e.endo.flatten()).collect());
        let eps = |k: usize| if k == 0 { rat(-1) } else { rat(1) };
        let to_sparse = |v: Vec<Rat>, offset: usize| -> Sparse {
            v.into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i + offset, c))
                .collect()
        };

        // [ē_k, e_l] as istr coordinates, for all pairs
        let mut plus_minus: Vec<Vec<Sparse>> = vec![vec![Vec::new(); dj]; dj];
        for k in 0..dj {
            for l in 0..dj {
                let prod = jordan::mul_basis(params, k, l);
                let pk = parity(params, k);
                let pl = parity(params, l);
                let lprod = jordan::l_of(params, &prod, (pk + pl) % 2);
                let com = l_basis(params, k).supercommutator(&l_basis(params, l));
                let total = lprod.scale(&rat(2)).add(&com.scale(&rat(2))).scale(&eps(k));
                plus_minus[k][l] = to_sparse(expressor.express(&total.flatten()), dj);
            }
        }

        let mut brackets: Vec<Vec<Sparse>> = vec![vec![Vec::new(); dim]; dim];
        let name_of = |idx: usize| -> TkkName {
            if idx < dj {
                TkkName::Eplus(idx)
            } else if idx < dj + dim_istr {
                TkkName::Istr(idx - dj)
            } else {
                TkkName::Eminus(idx - dj - dim_istr)
            }
        };
        for i in 0..dim {
            for j in 0..dim {
                let sign_swap = if parities[i] * parities[j] == 1 { rat(1) } else { rat(-1) };
                let row: Sparse = match (name_of(i), name_of(j)) {
                    (TkkName::Eplus(_), TkkName::Eplus(_)) => Vec::new(),
                    (TkkName::Eminus(_), TkkName::Eminus(_)) => Vec::new(),
                    (TkkName::Eplus(k), TkkName::Eminus(l)) => plus_minus[k][l].clone(),
                    (TkkName::Eminus(l), TkkName::Eplus(k)) => plus_minus[k][l]
                        .iter()
                        .map(|(t, c)| (*t, c * &sign_swap))
                        .collect(),
                    (TkkName::Istr(a), TkkName::Eplus(k)) => {
                        let img = istr[a].endo.apply(&unit_vec(dj, k));
                        img.into_iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(t, c)| (t, c * eps(k) * eps(t)))
                            .collect()
                    }
                    (TkkName::Eplus(k), TkkName::Istr(a)) => {
                        let img = istr[a].endo.apply(&unit_vec(dj, k));
                        img.into_iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(t, c)| (t, c * eps(k) * eps(t) * sign_swap.clone()))
                            .collect()
                    }
                    (TkkName::Istr(a), TkkName::Eminus(l)) => {
                        let img = istr[a].minus_action.apply(&unit_vec(dj, l));
                        img.into_iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(t, c)| (t + dj + dim_istr, c))
                            .collect()
                    }
                    (TkkName::Eminus(l), TkkName::Istr(a)) => {
                        let img = istr[a].minus_action.apply(&unit_vec(dj, l));
                        img.into_iter()
                            .enumerate()
                            .filter(|(_, c)| !c.is_zero())
                            .map(|(t, c)| (t + dj + dim_istr, c * sign_swap.clone()))
                            .collect()
                    }
                    (TkkName::Istr(a), TkkName::Istr(b)) => {
                        let com = istr[a].endo.supercommutator(&istr[b].endo);
                        to_sparse(expressor.express(&com.flatten()), dj)
                    }
                };
                brackets[i][j] = row;
            }
        }

        TkkAlgebra { params: *params, istr, brackets, parities }
    }

    /// Super-Jacobi defect `(-1)^{|x||z|}[x,[y,z]] + cyclic` on basis
    /// triples; zero for a Lie superalgebra.
    pub fn jacobi_defect(&self, x: usize, y: usize, z: usize) -> Vec<Rat> {
        let mut acc = vec![Rat::zero(); self.dim()];
        let px = self.parity(x) as i32;
        let py = self.parity(y) as i32;
        let pz = self.parity(z) as i32;
        let sgn = |s: i32| if s % 2 == 1 { rat(-1) } else { rat(1) };
        // [x,[y,z]]
        let f1 = sgn(px * pz);
        for (t, c) in &self.brackets[y][z] {
            let f = &f1 * c;
            sparse_add_into(&mut acc, &self.brackets[x][*t], &f);
        }
        let f2 = sgn(py * px);
        for (t, c) in &self.brackets[z][x] {
            let f = &f2 * c;
            sparse_add_into(&mut acc, &self.brackets[y][*t], &f);
        }
        let f3 = sgn(pz * py);
        for (t, c) in &self.brackets[x][y] {
            let f = &f3 * c;
            sparse_add_into(&mut acc, &self.brackets[z][*t], &f);
        }
        acc
    }

    /// Super-antisymmetry defect `[x,y] + (-1)^{|x||y|}[y,x]`.
    pub fn antisymmetry_defect(&self, x: usize, y: usize) -> Vec<Rat> {
        let mut acc = vec![Rat::zero(); self.dim()];
        sparse_add_into(&mut acc, &self.brackets[x][y], &Rat::one());
        let s = if self.parity(x) * self.parity(y) == 1 { rat(-1) } else { rat(1) };
        sparse_add_into(&mut acc, &self.brackets[y][x], &s);
        acc
    }
}

fn unit_vec(dim: usize, k: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); dim];
    v[k] = Rat::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn istr_dimension_matches_osp_plus_center() {
        for (p, q, n) in [(4i64, 4, 1), (3, 5, 0)] {
            let params = ModelParams::new(p, q, n).unwrap();
            let alg = TkkAlgebra::new(&params);
            let m = p + q - 2;
            let expect = m * (m - 1) / 2 + n * (2 * n + 1) + m * 2 * n + 1;
            assert_eq!(alg.dim_istr() as i64, expect, "istr dim at ({p},{q},{n})");
        }
    }

    #[test]
    fn graded_pieces_bracket_correctly() {
        let params = ModelParams::new(4, 4, 1).unwrap();
        let alg = TkkAlgebra::new(&params);
        let dj = alg.dim_j();
        for k in 0..dj {
            for l in 0..dj {
                assert!(alg.bracket_basis(alg.index_eplus(k), alg.index_eplus(l)).is_empty());
                assert!(alg.bracket_basis(alg.index_eminus(k), alg.index_eminus(l)).is_empty());
            }
        }
        // [L_e, e_k⁻] = -e_k⁻ and [L_e, ē_k] = ē_k
        let le = alg.index_istr(alg.le_istr_index());
        for k in 0..dj {
            let bm = alg.bracket_basis(le, alg.index_eminus(k));
            assert_eq!(bm, &vec![(alg.index_eminus(k), rat(-1))]);
            let bp = alg.bracket_basis(le, alg.index_eplus(k));
            assert_eq!(bp, &vec![(alg.index_eplus(k), rat(1))]);
        }
    }

    #[test]
    fn super_jacobi_on_all_basis_triples() {
        let params = ModelParams::new(4, 4, 1).unwrap();
        let alg = TkkAlgebra::new(&params);
        let d = alg.dim();
        for x in 0..d {
            for y in 0..d {
                assert!(
                    alg.antisymmetry_defect(x, y).iter().all(|c| c.is_zero()),
                    "antisymmetry fails at ({}, {})",
                    alg.render_name(x),
                    alg.render_name(y)
                );
            }
        }
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    assert!(
                        alg.jacobi_defect(x, y, z).iter().all(|c| c.is_zero()),
                        "jacobi fails at ({}, {}, {})",
                        alg.render_name(x),
                        alg.render_name(y),
                        alg.render_name(z)
                    );
                }
            }
        }
    }

    #[test]
    fn spot_check_plus_minus_bracket() {
        let params = ModelParams::new(4, 4, 1).unwrap();
        let alg = TkkAlgebra::new(&params);
        // [ē_1, e_1⁻] = 2 β̃_{11} L_e = 2 L_e  (e_1·e_1 = e, inner part zero)
        let b = alg.bracket_basis(alg.index_eplus(1), alg.index_eminus(1));
        let le = alg.index_istr(alg.le_istr_index());
        assert_eq!(b, &vec![(le, rat(2))]);
        // super-Jacobi sample on (ē_1, e_1⁻, L_e)
        assert!(alg
            .jacobi_defect(alg.index_eplus(1), alg.index_eminus(1), le)
            .iter()
            .all(|c| c.is_zero()));
    }
}
