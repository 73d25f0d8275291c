//! Supercommutative polynomials in even and odd (Grassmann) variables over
//! an orthosymplectic metric, together with the multiplication operator
//! `R²`, the Euler operator `E`, the Laplacian `Δ`, and canonical reduction
//! modulo the ideal `⟨R²⟩`.
//!
//! A variable space is described by a [`Metric`]: a list of `±1` signs for
//! the even variables followed by `n` symplectic pairs of odd variables.
//! The model space for `osp(p,q|2n)` has `p-1` plus-signed variables
//! (`x_i`), `q-1` minus-signed variables (`y_j`) and `2n` odd variables
//! (`θ_k`); the same polynomial type also serves the harmonic blocks and
//! the extended spaces used by the intertwiner, which is why the metric is
//! passed explicitly where it matters.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::scalar::{rat, ExactScalar};

/// Orthosymplectic variable space: even variables with diagonal signs
/// `±1`, then `odd_pairs` symplectic pairs `(θ_i, θ_{n+i})` with
/// `β(θ_i, θ_{n+i}) = 1 = -β(θ_{n+i}, θ_i)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Metric {
    pub even_signs: Vec<i8>,
    pub odd_pairs: usize,
}

impl Metric {
    pub fn new(even_signs: Vec<i8>, odd_pairs: usize) -> Self {
        assert!(even_signs.iter().all(|s| *s == 1 || *s == -1));
        Metric { even_signs, odd_pairs }
    }

    pub fn n_even(&self) -> usize {
        self.even_signs.len()
    }

    pub fn n_odd(&self) -> usize {
        2 * self.odd_pairs
    }

    pub fn n_vars(&self) -> usize {
        self.n_even() + self.n_odd()
    }

    /// Superdimension: even count minus odd count.
    pub fn superdim(&self) -> i64 {
        self.n_even() as i64 - self.n_odd() as i64
    }

    pub fn is_odd_var(&self, v: usize) -> bool {
        v >= self.n_even()
    }

    /// Lowered metric component `β_{ij}`.
    pub fn beta(&self, i: usize, j: usize) -> i64 {
        let ne = self.n_even();
        if i < ne || j < ne {
            if i == j && i < ne {
                self.even_signs[i] as i64
            } else {
                0
            }
        } else {
            let (a, b, n) = (i - ne, j - ne, self.odd_pairs);
            if a + n == b {
                1
            } else if b + n == a {
                -1
            } else {
                0
            }
        }
    }

    /// Raised metric component `β^{ij}`, the matrix inverse of `β_{ij}`.
    pub fn beta_inv(&self, i: usize, j: usize) -> i64 {
        let ne = self.n_even();
        if i < ne || j < ne {
            self.beta(i, j)
        } else {
            -self.beta(i, j)
        }
    }

    /// Indices `j` with `β_{ij} ≠ 0` (at most one for this metric shape).
    pub fn lower_partner(&self, i: usize) -> (usize, i64) {
        let ne = self.n_even();
        if i < ne {
            (i, self.even_signs[i] as i64)
        } else {
            let (a, n) = (i - ne, self.odd_pairs);
            if a < n {
                (ne + a + n, 1)
            } else {
                (ne + a - n, -1)
            }
        }
    }

    /// Check the defining invariants: even block symmetric, odd block
    /// antisymmetric, and `Σ_j β_{ij} β^{jk} = δ_{ik}`.
    pub fn validate(&self) -> bool {
        let nv = self.n_vars();
        let ne = self.n_even();
        for i in 0..nv {
            for k in 0..nv {
                let mut acc = 0i64;
                for j in 0..nv {
                    acc += self.beta(i, j) * self.beta_inv(j, k);
                }
                if acc != if i == k { 1 } else { 0 } {
                    return false;
                }
                let sign = if i >= ne && k >= ne { -1 } else { 1 };
                if self.beta(i, k) != sign * self.beta(k, i) {
                    return false;
                }
                if (i < ne) != (k < ne) && self.beta(i, k) != 0 {
                    return false;
                }
            }
        }
        true
    }
}

/// Model parameters for `osp(p,q|2n)` with `p, q ≥ 2`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub struct ModelParams {
    pub p: i64,
    pub q: i64,
    pub n: i64,
}

impl ModelParams {
    pub fn new(p: i64, q: i64, n: i64) -> Result<Self, String> {
        if p < 2 || q < 2 || n < 0 {
            return Err(alloc::format!("require p ≥ 2, q ≥ 2, n ≥ 0; got ({p},{q},{n})"));
        }
        Ok(ModelParams { p, q, n })
    }

    /// Even variable count `m = p + q - 2`.
    pub fn m(&self) -> i64 {
        self.p + self.q - 2
    }

    /// Superdimension `M = p + q - 2 - 2n`.
    pub fn superdim(&self) -> i64 {
        self.m() - 2 * self.n
    }

    pub fn mu(&self) -> i64 {
        core::cmp::max(self.p - 2 * self.n - 3, self.q - 3)
    }

    pub fn nu(&self) -> i64 {
        core::cmp::min(self.p - 2 * self.n - 3, self.q - 3)
    }

    /// True when `p - 2n ≥ q`, i.e. the x/θ block carries `μ`.
    pub fn mu_block_is_x(&self) -> bool {
        self.p - 2 * self.n >= self.q
    }

    /// The representation-space metric: `p-1` x's (+1), `q-1` y's (-1),
    /// `n` odd pairs.
    pub fn metric(&self) -> Metric {
        let mut signs = vec![1i8; (self.p - 1) as usize];
        signs.extend(vec![-1i8; (self.q - 1) as usize]);
        Metric::new(signs, self.n as usize)
    }

    pub fn n_x(&self) -> usize {
        (self.p - 1) as usize
    }

    pub fn n_y(&self) -> usize {
        (self.q - 1) as usize
    }

    /// Variable index of `x_i` (1-based `i`).
    pub fn x(&self, i: usize) -> usize {
        debug_assert!(1 <= i && i <= self.n_x());
        i - 1
    }

    /// Variable index of `y_j` (1-based `j`).
    pub fn y(&self, j: usize) -> usize {
        debug_assert!(1 <= j && j <= self.n_y());
        self.n_x() + j - 1
    }

    /// Variable index of `θ_k` (1-based `k`).
    pub fn theta(&self, k: usize) -> usize {
        debug_assert!(1 <= k && k <= 2 * self.n as usize);
        self.n_x() + self.n_y() + k - 1
    }
}

/// Exponent vector: arbitrary even exponents plus a bitmask of odd
/// variables (odd exponents are at most one).
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Monomial {
    pub even: Vec<u8>,
    pub odd: u64,
}

impl Monomial {
    pub fn unit(n_even: usize) -> Self {
        Monomial { even: vec![0; n_even], odd: 0 }
    }

    pub fn var(n_even: usize, v: usize) -> Self {
        let mut m = Monomial::unit(n_even);
        if v < n_even {
            m.even[v] = 1;
        } else {
            m.odd = 1u64 << (v - n_even);
        }
        m
    }

    pub fn degree(&self) -> u32 {
        self.even.iter().map(|e| *e as u32).sum::<u32>() + self.odd.count_ones()
    }

    pub fn parity(&self) -> u8 {
        (self.odd.count_ones() % 2) as u8
    }

    pub fn even_exp(&self, v: usize) -> u8 {
        self.even[v]
    }

    pub fn has_odd(&self, k: usize) -> bool {
        self.odd >> k & 1 == 1
    }

    /// Product with Koszul sign; `None` when an odd variable squares to 0.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, i64)> {
        debug_assert_eq!(self.even.len(), other.even.len());
        if self.odd & other.odd != 0 {
            return None;
        }
        let mut inversions = 0u32;
        let mut b = other.odd;
        while b != 0 {
            let j = b.trailing_zeros();
            // odd factors of `self` with index above j must move past θ_j
            inversions += (self.odd >> (j + 1)).count_ones();
            b &= b - 1;
        }
        let even = self
            .even
            .iter()
            .zip(other.even.iter())
            .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
            .collect();
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        Some((Monomial { even, odd: self.odd | other.odd }, sign))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.even.cmp(&self.even))
            .then_with(|| self.odd.cmp(&other.odd))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A supercommutative polynomial: canonical map from monomials to nonzero
/// scalars.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SuperPolynomial {
    terms: BTreeMap<Monomial, ExactScalar>,
}

impl SuperPolynomial {
    pub fn zero() -> Self {
        SuperPolynomial { terms: BTreeMap::new() }
    }

    pub fn constant(metric: &Metric, c: ExactScalar) -> Self {
        let mut p = SuperPolynomial::zero();
        p.add_term(Monomial::unit(metric.n_even()), c);
        p
    }

    pub fn one(metric: &Metric) -> Self {
        SuperPolynomial::constant(metric, ExactScalar::one())
    }

    pub fn var(metric: &Metric, v: usize) -> Self {
        debug_assert!(v < metric.n_vars());
        let mut p = SuperPolynomial::zero();
        p.add_term(Monomial::var(metric.n_even(), v), ExactScalar::one());
        p
    }

    /// Raised-index coordinate `x^v = Σ_i x_i β^{iv}`.
    pub fn var_raised(metric: &Metric, v: usize) -> Self {
        let mut p = SuperPolynomial::zero();
        for i in 0..metric.n_vars() {
            let c = metric.beta_inv(i, v);
            if c != 0 {
                p.add_term(
                    Monomial::var(metric.n_even(), i),
                    ExactScalar::from_int(c),
                );
            }
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ExactScalar)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Monomial, c: ExactScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &SuperPolynomial) -> SuperPolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &SuperPolynomial) -> SuperPolynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> SuperPolynomial {
        SuperPolynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &ExactScalar) -> SuperPolynomial {
        if c.is_zero() {
            return SuperPolynomial::zero();
        }
        let mut out = SuperPolynomial::zero();
        for (m, co) in &self.terms {
            out.add_term(m.clone(), co * c);
        }
        out
    }

    /// Supercommutative product with Koszul signs.
    pub fn mul(&self, other: &SuperPolynomial) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, sign)) = ma.mul(mb) {
                    let mut c = ca * cb;
                    if sign < 0 {
                        c = -c;
                    }
                    out.add_term(m, c);
                }
            }
        }
        out
    }

    /// Conjugate the coefficients; variables (including odd ones) are fixed.
    pub fn conj(&self) -> SuperPolynomial {
        SuperPolynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect(),
        }
    }

    /// True when every term has the same parity; returns it.
    pub fn homogeneous_parity(&self) -> Option<u8> {
        let mut it = self.terms.keys();
        let first = it.next()?.parity();
        if it.all(|m| m.parity() == first) {
            Some(first)
        } else {
            None
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Plain partial derivative `∂^v` (dual to the coordinate `x_v`),
    /// a graded derivation acting from the left.
    pub fn partial_plain(&self, metric: &Metric, v: usize) -> SuperPolynomial {
        let ne = metric.n_even();
        let mut out = SuperPolynomial::zero();
        for (m, c) in &self.terms {
            if v < ne {
                let e = m.even[v];
                if e == 0 {
                    continue;
                }
                let mut m2 = m.clone();
                m2.even[v] = e - 1;
                out.add_term(m2, c.scale_rat(&rat(e as i64)));
            } else {
                let k = v - ne;
                if !m.has_odd(k) {
                    continue;
                }
                // sign: pass the derivation over the lower-index odd factors
                let before = (m.odd & ((1u64 << k) - 1)).count_ones();
                let mut m2 = m.clone();
                m2.odd &= !(1u64 << k);
                let c2 = if before % 2 == 0 { c.clone() } else { -c };
                out.add_term(m2, c2);
            }
        }
        out
    }

    /// Lowered partial derivative `∂_v = Σ_i ∂^i β_{vi}`.
    pub fn partial_lower(&self, metric: &Metric, v: usize) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero();
        for i in 0..metric.n_vars() {
            let c = metric.beta(v, i);
            if c != 0 {
                let mut d = self.partial_plain(metric, i);
                if c < 0 {
                    d = d.neg();
                }
                out = out.add(&d);
            }
        }
        out
    }

    /// Euler operator: multiplies each monomial by its total degree.
    pub fn euler(&self) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.scale_rat(&rat(m.degree() as i64)));
        }
        out
    }

    /// Laplacian `Δ = Σ_{ij} β^{ij} ∂_i ∂_j`.
    pub fn laplacian(&self, metric: &Metric) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero();
        for i in 0..metric.n_vars() {
            let inner = self.partial_lower(metric, i);
            if inner.is_zero() {
                continue;
            }
            for j in 0..metric.n_vars() {
                let c = metric.beta_inv(j, i);
                if c != 0 {
                    let mut d = inner.partial_lower(metric, j);
                    if c < 0 {
                        d = d.neg();
                    }
                    out = out.add(&d);
                }
            }
        }
        out
    }

    pub fn render(&self, metric: &Metric, names: &dyn Fn(usize) -> String) -> String {
        use core::fmt::Write;
        if self.is_zero() {
            return String::from("0");
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                out.push_str(" + ");
            }
            write!(out, "[{}]", c.pretty()).unwrap();
            for v in 0..metric.n_even() {
                let e = m.even[v];
                if e == 1 {
                    write!(out, "·{}", names(v)).unwrap();
                } else if e > 1 {
                    write!(out, "·{}^{}", names(v), e).unwrap();
                }
            }
            for k in 0..metric.n_odd() {
                if m.has_odd(k) {
                    write!(out, "·{}", names(metric.n_even() + k)).unwrap();
                }
            }
        }
        out
    }

    /// Default variable naming `x1.. y1.. th1..` for the model space.
    pub fn to_string_model(&self, params: &ModelParams) -> String {
        let nx = params.n_x();
        let ny = params.n_y();
        self.render(&params.metric(), &move |v: usize| {
            if v < nx {
                alloc::format!("x{}", v + 1)
            } else if v < nx + ny {
                alloc::format!("y{}", v - nx + 1)
            } else {
                alloc::format!("th{}", v - nx - ny + 1)
            }
        })
    }
}

impl fmt::Display for SuperPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "[{}]·e{:?}o{:b}", c.pretty(), m.even, m.odd)?;
        }
        Ok(())
    }
}

/// `R² = Σ_{ij} β^{ij} x_i x_j` as a polynomial.
pub fn r_squared(metric: &Metric) -> SuperPolynomial {
    let mut out = SuperPolynomial::zero();
    for i in 0..metric.n_vars() {
        for j in 0..metric.n_vars() {
            let c = metric.beta_inv(i, j);
            if c != 0 {
                let xi = SuperPolynomial::var(metric, i);
                let xj = SuperPolynomial::var(metric, j);
                out = out.add(&xi.mul(&xj).scale(&ExactScalar::from_int(c)));
            }
        }
    }
    out
}

/// `θ² = Σ_i θ^i θ_i`, the odd part of `R²`.
pub fn theta_squared(metric: &Metric) -> SuperPolynomial {
    let ne = metric.n_even();
    let mut out = SuperPolynomial::zero();
    for k in 0..metric.n_odd() {
        let v = ne + k;
        let raised = SuperPolynomial::var_raised(metric, v);
        out = out.add(&raised.mul(&SuperPolynomial::var(metric, v)));
    }
    out
}

/// Canonical representative of `f + ⟨R²⟩`: rewrites the square of the last
/// minus-signed even variable via `R² = 0` until no such square remains.
pub fn reduce_mod_r2(metric: &Metric, f: &SuperPolynomial) -> SuperPolynomial {
    let last_y = metric
        .even_signs
        .iter()
        .rposition(|s| *s == -1)
        .expect("reduction requires a minus-signed even variable");
    // y_last² = Σ_{+} x_i² - Σ_{-, j≠last} y_j² + θ²
    let mut replacement = SuperPolynomial::zero();
    for (v, s) in metric.even_signs.iter().enumerate() {
        if v == last_y {
            continue;
        }
        let sq = SuperPolynomial::var(metric, v).mul(&SuperPolynomial::var(metric, v));
        replacement = if *s == 1 { replacement.add(&sq) } else { replacement.sub(&sq) };
    }
    replacement = replacement.add(&theta_squared(metric));

    let mut out = SuperPolynomial::zero();
    let mut work: Vec<(Monomial, ExactScalar)> =
        f.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
    while let Some((m, c)) = work.pop() {
        if m.even[last_y] >= 2 {
            let mut m2 = m.clone();
            m2.even[last_y] -= 2;
            let mut rest = SuperPolynomial::zero();
            rest.add_term(m2, c);
            let expanded = rest.mul(&replacement);
            for (mm, cc) in expanded.terms {
                work.push((mm, cc));
            }
        } else {
            out.add_term(m, c);
        }
    }
    out
}

/// All monomials of exact total degree `d` in the given space.
pub fn monomials_of_degree(metric: &Metric, d: u32) -> Vec<Monomial> {
    let ne = metric.n_even();
    let nodd = metric.n_odd();
    let mut out = Vec::new();
    let odd_masks: Vec<(u64, u32)> = (0u64..(1u64 << nodd))
        .map(|mask| (mask, mask.count_ones()))
        .collect();
    fn even_parts(ne: usize, d: u32, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == ne {
            if d == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if cur.len() == ne - 1 {
            if d <= u8::MAX as u32 {
                cur.push(d as u8);
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for e in 0..=d {
            cur.push(e as u8);
            even_parts(ne, d - e, cur, out);
            cur.pop();
        }
    }
    for (mask, odd_deg) in odd_masks {
        if odd_deg > d {
            continue;
        }
        let mut evens = Vec::new();
        if ne == 0 {
            if d == odd_deg {
                out.push(Monomial { even: Vec::new(), odd: mask });
            }
            continue;
        }
        even_parts(ne, d - odd_deg, &mut Vec::new(), &mut evens);
        for e in evens {
            out.push(Monomial { even: e, odd: mask });
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratq;
    use proptest::prelude::*;

    fn params441() -> ModelParams {
        ModelParams::new(4, 4, 1).unwrap()
    }

    #[test]
    fn metric_invariants_hold() {
        for (p, q, n) in [(4, 4, 1), (6, 4, 1), (3, 5, 0), (2, 2, 2)] {
            let m = ModelParams::new(p, q, n).unwrap().metric();
            assert!(m.validate());
        }
    }

    #[test]
    fn odd_variables_anticommute_and_square_to_zero() {
        let pr = params441();
        let me = pr.metric();
        let t1 = SuperPolynomial::var(&me, pr.theta(1));
        let t2 = SuperPolynomial::var(&me, pr.theta(2));
        assert_eq!(t1.mul(&t2), t2.mul(&t1).neg());
        assert!(t1.mul(&t1).is_zero());
        let x1 = SuperPolynomial::var(&me, pr.x(1));
        let x2 = SuperPolynomial::var(&me, pr.x(2));
        assert_eq!(x1.mul(&x2), x2.mul(&x1));
        // odd variables commute with even ones
        assert_eq!(x1.mul(&t1), t1.mul(&x1));
    }

    #[test]
    fn graded_leibniz_signs_on_partials() {
        let pr = params441();
        let me = pr.metric();
        let t1 = SuperPolynomial::var(&me, pr.theta(1));
        let t2 = SuperPolynomial::var(&me, pr.theta(2));
        let prod = t1.mul(&t2);
        assert_eq!(prod.partial_plain(&me, pr.theta(1)), t2);
        // ∂^{θ₂}(θ₁θ₂) = -θ₁, cross-checked on the reordered product
        let d = prod.partial_plain(&me, pr.theta(2));
        assert_eq!(d, t1.neg());
        let reordered = t2.mul(&t1).neg();
        assert_eq!(reordered.partial_plain(&me, pr.theta(2)), t1.neg());
        // ∂^{x₁}(x₁²) = 2x₁
        let x1 = SuperPolynomial::var(&me, pr.x(1));
        assert_eq!(
            x1.mul(&x1).partial_plain(&me, pr.x(1)),
            x1.scale(&ExactScalar::from_int(2))
        );
    }

    #[test]
    fn laplacian_of_squares() {
        let pr = params441();
        let me = pr.metric();
        let x1 = SuperPolynomial::var(&me, pr.x(1));
        assert_eq!(
            x1.mul(&x1).laplacian(&me),
            SuperPolynomial::constant(&me, ExactScalar::from_int(2))
        );
        let y1 = SuperPolynomial::var(&me, pr.y(1));
        assert_eq!(
            y1.mul(&y1).laplacian(&me),
            SuperPolynomial::constant(&me, ExactScalar::from_int(-2))
        );
        // Δ(R²) = 2M
        let r2 = r_squared(&me);
        assert_eq!(
            r2.laplacian(&me),
            SuperPolynomial::constant(&me, ExactScalar::from_int(2 * pr.superdim()))
        );
        // Δ(θ²) = -4n, twice: by direct expansion and as 2M - 2(p-1) - 2(q-1)
        let th2 = theta_squared(&me);
        assert_eq!(
            th2.laplacian(&me),
            SuperPolynomial::constant(&me, ExactScalar::from_int(-4 * pr.n))
        );
        let residual = 2 * pr.superdim() - 2 * (pr.p - 1) - 2 * (pr.q - 1);
        assert_eq!(residual, -4 * pr.n);
    }

    #[test]
    fn r_squared_is_s2_minus_t2_plus_theta2() {
        let pr = params441();
        let me = pr.metric();
        let mut expect = SuperPolynomial::zero();
        for i in 1..=pr.n_x() {
            let x = SuperPolynomial::var(&me, pr.x(i));
            expect = expect.add(&x.mul(&x));
        }
        for j in 1..=pr.n_y() {
            let y = SuperPolynomial::var(&me, pr.y(j));
            expect = expect.sub(&y.mul(&y));
        }
        expect = expect.add(&theta_squared(&me));
        assert_eq!(r_squared(&me), expect);
    }

    #[test]
    fn reduction_kills_the_generator() {
        let pr = params441();
        let me = pr.metric();
        let r2 = r_squared(&me);
        assert!(reduce_mod_r2(&me, &r2).is_zero());
        let x1 = SuperPolynomial::var(&me, pr.x(1));
        let prod = r2.mul(&x1);
        assert!(reduce_mod_r2(&me, &prod).is_zero());
        // y_{q-1}² rewrites to s² - Σ_{j<q-1} y_j² + θ²
        let ylast = SuperPolynomial::var(&me, pr.y(pr.n_y()));
        let reduced = reduce_mod_r2(&me, &ylast.mul(&ylast));
        let mut expect = SuperPolynomial::zero();
        for i in 1..=pr.n_x() {
            let x = SuperPolynomial::var(&me, pr.x(i));
            expect = expect.add(&x.mul(&x));
        }
        for j in 1..pr.n_y() {
            let y = SuperPolynomial::var(&me, pr.y(j));
            expect = expect.sub(&y.mul(&y));
        }
        expect = expect.add(&theta_squared(&me));
        assert_eq!(reduced, expect);
        // already-reduced inputs pass through
        let x1y1 = x1.mul(&SuperPolynomial::var(&me, pr.y(1)));
        assert_eq!(reduce_mod_r2(&me, &x1y1), x1y1);
        // idempotent
        assert_eq!(reduce_mod_r2(&me, &reduced), reduced);
    }

    #[test]
    fn euler_counts_total_degree() {
        let pr = params441();
        let me = pr.metric();
        let x1 = SuperPolynomial::var(&me, pr.x(1));
        let t1 = SuperPolynomial::var(&me, pr.theta(1));
        let f = x1.mul(&x1).mul(&t1);
        assert_eq!(f.euler(), f.scale(&ExactScalar::from_int(3)));
        // E agrees with Σ x^i ∂_i term by term
        let mut via_ops = SuperPolynomial::zero();
        for v in 0..me.n_vars() {
            let xi = SuperPolynomial::var_raised(&me, v);
            via_ops = via_ops.add(&xi.mul(&f.partial_lower(&me, v)));
        }
        assert_eq!(via_ops, f.euler());
    }

    #[test]
    fn monomial_enumeration_counts() {
        let pr = params441();
        let me = pr.metric();
        // dim P_2(R^{6|2}) = C(7,5) + 6·2 + 1 = 34
        assert_eq!(monomials_of_degree(&me, 2).len(), 34);
        assert_eq!(monomials_of_degree(&me, 0).len(), 1);
        assert_eq!(monomials_of_degree(&me, 1).len(), 8);
    }

    fn arb_poly(pr: ModelParams, maxdeg: u32) -> impl Strategy<Value = SuperPolynomial> {
        let me = pr.metric();
        let nv = me.n_vars();
        proptest::collection::vec(
            (proptest::collection::vec(0..nv, 0..=maxdeg as usize), -6i64..7, 0u8..2),
            0..5,
        )
        .prop_map(move |spec| {
            let me = pr.metric();
            let mut acc = SuperPolynomial::zero();
            for (vars, num, im) in spec {
                let mut term = SuperPolynomial::constant(
                    &me,
                    if im == 0 {
                        ExactScalar::from_rat(ratq(num, 3))
                    } else {
                        &ExactScalar::from_rat(ratq(num, 2)) * &ExactScalar::i()
                    },
                );
                for v in vars {
                    term = term.mul(&SuperPolynomial::var(&me, v));
                }
                acc = acc.add(&term);
            }
            acc
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn multiplication_is_associative(
            a in arb_poly(ModelParams::new(4, 4, 1).unwrap(), 2),
            b in arb_poly(ModelParams::new(4, 4, 1).unwrap(), 2),
            c in arb_poly(ModelParams::new(4, 4, 1).unwrap(), 2),
        ) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        }

        #[test]
        fn partials_graded_commute(
            a in arb_poly(ModelParams::new(4, 4, 1).unwrap(), 3),
            i in 0usize..8,
            j in 0usize..8,
        ) {
            let me = ModelParams::new(4, 4, 1).unwrap().metric();
            let ij = a.partial_plain(&me, i).partial_plain(&me, j);
            let ji = a.partial_plain(&me, j).partial_plain(&me, i);
            let sign = me.is_odd_var(i) && me.is_odd_var(j);
            prop_assert_eq!(ij, if sign { ji.neg() } else { ji });
        }

        #[test]
        fn reduction_is_an_algebra_morphism(
            a in arb_poly(ModelParams::new(4, 4, 1).unwrap(), 2),
            b in arb_poly(ModelParams::new(4, 4, 1).unwrap(), 2),
        ) {
            let me = ModelParams::new(4, 4, 1).unwrap().metric();
            let lhs = reduce_mod_r2(&me, &a.mul(&b));
            let rhs = reduce_mod_r2(
                &me,
                &reduce_mod_r2(&me, &a).mul(&reduce_mod_r2(&me, &b)),
            );
            prop_assert_eq!(lhs, rhs);
        }
    }
}
