//! Differential operators with superpolynomial coefficients in canonical
//! normal order: every multiplication stands to the left of every
//! derivative.  Two operators are equal iff their normal forms coincide,
//! which turns operator identities into exact coefficient comparisons.
//!
//! Derivative monomials are stored over the plain derivations `∂^v` (dual
//! to the coordinates); lowered-index derivatives `∂_v = Σ_i ∂^i β_{vi}`
//! are provided as building blocks.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::scalar::{ExactScalar, Rat};
use crate::superpoly::{monomials_of_degree, r_squared, Metric, Monomial, SuperPolynomial};

/// Normally ordered differential operator: map from derivative monomials to
/// polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct DifferentialOperator {
    terms: BTreeMap<Monomial, SuperPolynomial>,
}

impl DifferentialOperator {
    pub fn zero() -> Self {
        DifferentialOperator { terms: BTreeMap::new() }
    }

    /// Multiplication operator by `f`.
    pub fn mult(metric: &Metric, f: &SuperPolynomial) -> Self {
        let mut op = DifferentialOperator::zero();
        op.add_term(Monomial::unit(metric.n_even()), f.clone());
        op
    }

    pub fn identity(metric: &Metric) -> Self {
        DifferentialOperator::scalar(metric, ExactScalar::one())
    }

    pub fn scalar(metric: &Metric, c: ExactScalar) -> Self {
        DifferentialOperator::mult(metric, &SuperPolynomial::constant(metric, c))
    }

    /// Plain derivative `∂^v`.
    pub fn partial_plain(metric: &Metric, v: usize) -> Self {
        let mut op = DifferentialOperator::zero();
        op.add_term(
            Monomial::var(metric.n_even(), v),
            SuperPolynomial::one(metric),
        );
        op
    }

    /// Lowered derivative `∂_v = Σ_i ∂^i β_{vi}`.
    pub fn partial_lower(metric: &Metric, v: usize) -> Self {
        let (i, c) = metric.lower_partner(v);
        let mut op = DifferentialOperator::partial_plain(metric, i);
        if c < 0 {
            op = op.neg();
        }
        op
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &SuperPolynomial)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, deriv: Monomial, coef: SuperPolynomial) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(deriv) {
            alloc::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coef);
            }
            alloc::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().add(&coef);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.add_term(d.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        DifferentialOperator {
            terms: self.terms.iter().map(|(d, c)| (d.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        if c.is_zero() {
            return DifferentialOperator::zero();
        }
        let mut out = DifferentialOperator::zero();
        for (d, co) in &self.terms {
            out.add_term(d.clone(), co.scale(c));
        }
        out
    }

    /// Apply a derivative monomial to a polynomial (rightmost symbol acts
    /// first; the canonical word lists variables in ascending order).
    fn apply_deriv(metric: &Metric, deriv: &Monomial, f: &SuperPolynomial) -> SuperPolynomial {
        let ne = metric.n_even();
        let mut g = f.clone();
        // odd derivatives, descending so the rightmost acts first
        for k in (0..metric.n_odd()).rev() {
            if deriv.has_odd(k) {
                g = g.partial_plain(metric, ne + k);
                if g.is_zero() {
                    return g;
                }
            }
        }
        for v in (0..ne).rev() {
            for _ in 0..deriv.even[v] {
                g = g.partial_plain(metric, v);
                if g.is_zero() {
                    return g;
                }
            }
        }
        g
    }

    /// Apply the operator to a polynomial.
    pub fn apply(&self, metric: &Metric, f: &SuperPolynomial) -> SuperPolynomial {
        let mut out = SuperPolynomial::zero();
        for (deriv, coef) in &self.terms {
            let df = Self::apply_deriv(metric, deriv, f);
            if !df.is_zero() {
                out = out.add(&coef.mul(&df));
            }
        }
        out
    }

    /// Operator composition `self ∘ other` (apply `other` first), brought
    /// to normal order.
    pub fn compose(&self, metric: &Metric, other: &Self) -> Self {
        let mut out = DifferentialOperator::zero();
        for (da, ca) in &self.terms {
            for (db, cb) in &other.terms {
                Self::compose_term(metric, ca, da, cb, db, &mut out);
            }
        }
        out
    }

    /// Normal-order `ca·∂^{da} ∘ cb·∂^{db}` into `out`.
    fn compose_term(
        metric: &Metric,
        ca: &SuperPolynomial,
        da: &Monomial,
        cb: &SuperPolynomial,
        db: &Monomial,
        out: &mut DifferentialOperator,
    ) {
        let ne = metric.n_even();
        // word of single derivatives in da, canonical ascending order
        let mut word: Vec<usize> = Vec::new();
        for v in 0..ne {
            for _ in 0..da.even[v] {
                word.push(v);
            }
        }
        for k in 0..metric.n_odd() {
            if da.has_odd(k) {
                word.push(ne + k);
            }
        }
        // move the word past cb from the right end of the word inward
        let mut acc: Vec<(SuperPolynomial, Monomial)> = alloc::vec![(cb.clone(), db.clone())];
        for &v in word.iter().rev() {
            let vmono = Monomial::var(ne, v);
            let v_odd = metric.is_odd_var(v);
            let mut next: Vec<(SuperPolynomial, Monomial)> = Vec::new();
            for (poly, deriv) in acc {
                // ∂^v ∘ (P·∂^d) = (∂^v P)·∂^d ± P·∂^{v+d}
                let dp = poly.partial_plain(metric, v);
                if !dp.is_zero() {
                    next.push((dp, deriv.clone()));
                }
                if let Some((dd, sign)) = vmono.mul(&deriv) {
                    let mut passed = SuperPolynomial::zero();
                    for (m, c) in poly.terms() {
                        let flip = v_odd && m.parity() == 1;
                        let c2 = if flip { -c } else { c.clone() };
                        passed.add_term(m.clone(), c2);
                    }
                    if sign < 0 {
                        passed = passed.neg();
                    }
                    if !passed.is_zero() {
                        next.push((passed, dd));
                    }
                }
            }
            acc = next;
        }
        for (poly, deriv) in acc {
            // prepend the left coefficient
            out.add_term(deriv, ca.mul(&poly));
        }
    }

    /// Split into (even, odd) parity parts.
    pub fn parity_split(&self) -> (Self, Self) {
        let mut even = DifferentialOperator::zero();
        let mut odd = DifferentialOperator::zero();
        for (d, c) in &self.terms {
            for (m, co) in c.terms() {
                let parity = (m.parity() + d.parity()) % 2;
                let mut poly = SuperPolynomial::zero();
                poly.add_term(m.clone(), co.clone());
                if parity == 0 {
                    even.add_term(d.clone(), poly);
                } else {
                    odd.add_term(d.clone(), poly);
                }
            }
        }
        (even, odd)
    }

    /// Parity if homogeneous.
    pub fn parity(&self) -> Option<u8> {
        let (e, o) = self.parity_split();
        match (e.is_zero(), o.is_zero()) {
            (true, true) | (false, true) => Some(0),
            (true, false) => Some(1),
            (false, false) => None,
        }
    }

    /// Supercommutator `[A,B] = AB - (-1)^{|A||B|}BA`, extended bilinearly
    /// over parity parts.
    pub fn supercommutator(&self, metric: &Metric, other: &Self) -> Self {
        let (ae, ao) = self.parity_split();
        let (be, bo) = other.parity_split();
        let mut out = DifferentialOperator::zero();
        for (a, pa) in [(&ae, 0u8), (&ao, 1u8)] {
            if a.is_zero() {
                continue;
            }
            for (b, pb) in [(&be, 0u8), (&bo, 1u8)] {
                if b.is_zero() {
                    continue;
                }
                let ab = a.compose(metric, b);
                let ba = b.compose(metric, a);
                // AB - (-1)^{|A||B|} BA
                let signed_ba = if pa * pb == 1 { ba.neg() } else { ba };
                out = out.add(&ab.sub(&signed_ba));
            }
        }
        out
    }

    /// Formal adjoint with respect to the graded pairing: coefficients are
    /// conjugated, `x_v* = x_v`, `(∂^v)* = -∂^v`, products reverse with
    /// Koszul signs.
    pub fn formal_adjoint(&self, metric: &Metric) -> Self {
        let ne = metric.n_even();
        let mut out = DifferentialOperator::zero();
        for (deriv, coef) in &self.terms {
            let d_op = {
                let mut op = DifferentialOperator::zero();
                op.add_term(deriv.clone(), SuperPolynomial::one(metric));
                op
            };
            let s = deriv.odd.count_ones() as i64;
            let d_total: i64 =
                deriv.even.iter().map(|e| *e as i64).sum::<i64>() + s;
            for (m, c) in coef.terms() {
                let r = m.odd.count_ones() as i64;
                let mut mono_poly = SuperPolynomial::zero();
                mono_poly.add_term(m.clone(), c.conj());
                let m_op = DifferentialOperator::mult(metric, &mono_poly);
                let mut term = d_op.compose(metric, &m_op);
                let sign = (r * s + d_total) % 2;
                if sign == 1 {
                    term = term.neg();
                }
                out = out.add(&term);
            }
        }
        let _ = ne;
        out
    }

    /// Rewrite each generator through the supplied substitution and
    /// recompose in word order: coefficients map through `map_scalar`,
    /// every coordinate factor `x_v` through `sub_x`, every plain
    /// derivative `∂^v` through `sub_d`.
    pub fn substitute_generators(
        &self,
        metric: &Metric,
        sub_x: &dyn Fn(usize) -> DifferentialOperator,
        sub_d: &dyn Fn(usize) -> DifferentialOperator,
    ) -> Self {
        let ne = metric.n_even();
        let mut out = DifferentialOperator::zero();
        for (deriv, coef) in &self.terms {
            for (m, c) in coef.terms() {
                let mut word: Vec<DifferentialOperator> = Vec::new();
                for v in 0..ne {
                    for _ in 0..m.even[v] {
                        word.push(sub_x(v));
                    }
                }
                for k in 0..metric.n_odd() {
                    if m.has_odd(k) {
                        word.push(sub_x(ne + k));
                    }
                }
                for v in 0..ne {
                    for _ in 0..deriv.even[v] {
                        word.push(sub_d(v));
                    }
                }
                for k in 0..metric.n_odd() {
                    if deriv.has_odd(k) {
                        word.push(sub_d(ne + k));
                    }
                }
                let mut acc = DifferentialOperator::scalar(metric, c.clone());
                for w in word {
                    acc = acc.compose(metric, &w);
                }
                out = out.add(&acc);
            }
        }
        out
    }

    /// Deterministic rendering: `coef · ∂-monomial`, sorted by derivative
    /// exponent.
    pub fn render(&self, metric: &Metric) -> String {
        use core::fmt::Write;
        if self.is_zero() {
            return String::from("0");
        }
        let mut out = String::new();
        for (idx, (d, c)) in self.terms.iter().enumerate() {
            if idx > 0 {
                out.push_str("  +  ");
            }
            write!(out, "({})", c.render(metric, &|v| alloc::format!("z{v}"))).unwrap();
            for v in 0..metric.n_even() {
                let e = d.even[v];
                if e == 1 {
                    write!(out, "·D{v}").unwrap();
                } else if e > 1 {
                    write!(out, "·D{v}^{e}").unwrap();
                }
            }
            for k in 0..metric.n_odd() {
                if d.has_odd(k) {
                    write!(out, "·D{}", metric.n_even() + k).unwrap();
                }
            }
        }
        out
    }
}

/// The Euler operator `E = Σ_v x_v ∂^v`.
pub fn euler_op(metric: &Metric) -> DifferentialOperator {
    let mut op = DifferentialOperator::zero();
    for v in 0..metric.n_vars() {
        let x = DifferentialOperator::mult(metric, &SuperPolynomial::var(metric, v));
        op = op.add(&x.compose(metric, &DifferentialOperator::partial_plain(metric, v)));
    }
    op
}

/// The Laplacian `Δ = Σ_{ij} β^{ij} ∂_i ∂_j`.
pub fn laplacian_op(metric: &Metric) -> DifferentialOperator {
    let mut op = DifferentialOperator::zero();
    for i in 0..metric.n_vars() {
        for j in 0..metric.n_vars() {
            let c = metric.beta_inv(i, j);
            if c != 0 {
                let di = DifferentialOperator::partial_lower(metric, i);
                let dj = DifferentialOperator::partial_lower(metric, j);
                op = op.add(
                    &di.compose(metric, &dj)
                        .scale(&ExactScalar::from_int(c)),
                );
            }
        }
    }
    op
}

/// Multiplication by `R²`.
pub fn r2_op(metric: &Metric) -> DifferentialOperator {
    DifferentialOperator::mult(metric, &r_squared(metric))
}

/// Orthosymplectic generator `L_{ij} = x_i ∂_j - (-1)^{|i||j|} x_j ∂_i`
/// (for `i = j` odd this is `2 x_i ∂_i`).
pub fn lij_op(metric: &Metric, i: usize, j: usize) -> DifferentialOperator {
    let xi = DifferentialOperator::mult(metric, &SuperPolynomial::var(metric, i));
    let xj = DifferentialOperator::mult(metric, &SuperPolynomial::var(metric, j));
    let di = DifferentialOperator::partial_lower(metric, i);
    let dj = DifferentialOperator::partial_lower(metric, j);
    let first = xi.compose(metric, &dj);
    let mut second = xj.compose(metric, &di);
    if metric.is_odd_var(i) && metric.is_odd_var(j) {
        second = second.neg();
    }
    first.sub(&second)
}

/// All generators of `osp` on the given space: `L_{ij}` for `i < j` and the
/// diagonal odd generators `L_{ii} = 2 x_i ∂_i`.
pub fn osp_generators(metric: &Metric) -> Vec<(usize, usize, DifferentialOperator)> {
    let nv = metric.n_vars();
    let mut out = Vec::new();
    for i in 0..nv {
        for j in i..nv {
            if i == j {
                if metric.is_odd_var(i) {
                    out.push((i, i, lij_op(metric, i, i)));
                }
            } else {
                out.push((i, j, lij_op(metric, i, j)));
            }
        }
    }
    out
}

/// The Bessel operator `B_λ(e_k) = (-λ + 2E) ∂_k - x_k Δ` with lowered
/// index `k`.
pub fn bessel_op(metric: &Metric, lambda: &Rat, k: usize) -> DifferentialOperator {
    let e2 = euler_op(metric).scale(&ExactScalar::from_int(2));
    let pre = e2.add(&DifferentialOperator::scalar(
        metric,
        ExactScalar::from_rat(-lambda.clone()),
    ));
    let dk = DifferentialOperator::partial_lower(metric, k);
    let first = pre.compose(metric, &dk);
    let xk = DifferentialOperator::mult(metric, &SuperPolynomial::var(metric, k));
    let second = xk.compose(metric, &laplacian_op(metric));
    first.sub(&second)
}

/// Check `A f = B f` for every monomial `f` of degree ≤ `maxdeg`.
pub fn agree_on_low_degree(
    metric: &Metric,
    a: &DifferentialOperator,
    b: &DifferentialOperator,
    maxdeg: u32,
) -> bool {
    for d in 0..=maxdeg {
        for m in monomials_of_degree(metric, d) {
            let mut f = SuperPolynomial::zero();
            f.add_term(m, ExactScalar::one());
            if a.apply(metric, &f) != b.apply(metric, &f) {
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
    use crate::superpoly::ModelParams;
    use proptest::prelude::*;

    fn pr() -> ModelParams {
        ModelParams::new(4, 4, 1).unwrap()
    }

    #[test]
    fn weyl_relations() {
        let me = pr().metric();
        // [∂^{x₁}, x₁] = 1
        let d = DifferentialOperator::partial_plain(&me, 0);
        let x = DifferentialOperator::mult(&me, &SuperPolynomial::var(&me, 0));
        let c = d.supercommutator(&me, &x);
        assert_eq!(c, DifferentialOperator::identity(&me));
        // [∂^{θ₁}, θ₁] = 1 (both odd: anticommutator form)
        let p = pr();
        let dth = DifferentialOperator::partial_plain(&me, p.theta(1));
        let th = DifferentialOperator::mult(&me, &SuperPolynomial::var(&me, p.theta(1)));
        assert_eq!(dth.supercommutator(&me, &th), DifferentialOperator::identity(&me));
    }

    #[test]
    fn sl2_commutators_in_normal_form() {
        for (p, q, n) in [(4, 4, 1), (6, 4, 1), (3, 5, 0)] {
            let params = ModelParams::new(p, q, n).unwrap();
            let me = params.metric();
            let delta = laplacian_op(&me);
            let r2 = r2_op(&me);
            let e = euler_op(&me);
            let big_m = ExactScalar::from_int(params.superdim());
            // [Δ, R²] = 4E + 2M
            let lhs = delta.supercommutator(&me, &r2);
            let rhs = e
                .scale(&ExactScalar::from_int(4))
                .add(&DifferentialOperator::scalar(&me, &big_m * &ExactScalar::from_int(2)));
            assert_eq!(lhs, rhs);
            // [Δ, E] = 2Δ
            assert_eq!(
                delta.supercommutator(&me, &e),
                delta.scale(&ExactScalar::from_int(2))
            );
            // [R², E] = -2R²
            assert_eq!(
                r2.supercommutator(&me, &e),
                r2.scale(&ExactScalar::from_int(-2))
            );
        }
    }

    #[test]
    fn osp_generators_commute_with_the_sl2_triple() {
        let params = pr();
        let me = params.metric();
        let delta = laplacian_op(&me);
        let r2 = r2_op(&me);
        let e = euler_op(&me);
        for (_, _, l) in osp_generators(&me) {
            assert!(l.supercommutator(&me, &delta).is_zero());
            assert!(l.supercommutator(&me, &e).is_zero());
            assert!(l.supercommutator(&me, &r2).is_zero());
        }
    }

    #[test]
    fn apply_agrees_with_composition() {
        let params = pr();
        let me = params.metric();
        let delta = laplacian_op(&me);
        let r2 = r2_op(&me);
        let both = delta.compose(&me, &r2);
        for d in 0..=4 {
            for m in monomials_of_degree(&me, d) {
                let mut f = SuperPolynomial::zero();
                f.add_term(m, ExactScalar::one());
                assert_eq!(
                    both.apply(&me, &f),
                    delta.apply(&me, &r2.apply(&me, &f))
                );
            }
        }
    }

    #[test]
    fn adjoint_of_basic_operators() {
        let params = pr();
        let me = params.metric();
        // adjoint(∂_{x₁}) = -∂_{x₁}
        let d = DifferentialOperator::partial_lower(&me, 0);
        assert_eq!(d.formal_adjoint(&me), d.neg());
        // adjoint(x₁) = x₁
        let x = DifferentialOperator::mult(&me, &SuperPolynomial::var(&me, 0));
        assert_eq!(x.formal_adjoint(&me), x);
        // adjoint(E) = -E - M
        let e = euler_op(&me);
        let expect = e.neg().sub(&DifferentialOperator::scalar(
            &me,
            ExactScalar::from_int(params.superdim()),
        ));
        assert_eq!(e.formal_adjoint(&me), expect);
        // antilinearity: adjoint(i·x₁) = -i·x₁
        let ix = x.scale(&ExactScalar::i());
        assert_eq!(ix.formal_adjoint(&me), x.scale(&-&ExactScalar::i()));
    }

    fn arb_op(maxdeg: u32) -> impl Strategy<Value = DifferentialOperator> {
        let params = pr();
        let me = params.metric();
        let nv = me.n_vars();
        proptest::collection::vec(
            (
                proptest::collection::vec(0..nv, 0..=maxdeg as usize),
                proptest::collection::vec(0..nv, 0..3usize),
                -5i64..6,
            ),
            1..4,
        )
        .prop_map(move |spec| {
            let params = pr();
            let me = params.metric();
            let mut acc = DifferentialOperator::zero();
            for (xs, ds, c) in spec {
                let mut term =
                    DifferentialOperator::scalar(&me, ExactScalar::from_rat(ratq(c, 2)));
                for v in xs {
                    term = term.compose(
                        &me,
                        &DifferentialOperator::mult(&me, &SuperPolynomial::var(&me, v)),
                    );
                }
                for v in ds {
                    term = term.compose(&me, &DifferentialOperator::partial_plain(&me, v));
                }
                acc = acc.add(&term);
            }
            acc
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn composition_is_associative(a in arb_op(2), b in arb_op(2), c in arb_op(2)) {
            let me = pr().metric();
            prop_assert_eq!(
                a.compose(&me, &b.compose(&me, &c)),
                a.compose(&me, &b).compose(&me, &c)
            );
        }

        #[test]
        fn apply_respects_composition(a in arb_op(2), b in arb_op(2)) {
            let me = pr().metric();
            let ab = a.compose(&me, &b);
            for d in 0..=3u32 {
                for m in monomials_of_degree(&me, d) {
                    let mut f = SuperPolynomial::zero();
                    f.add_term(m, ExactScalar::one());
                    prop_assert_eq!(
                        ab.apply(&me, &f),
                        a.apply(&me, &b.apply(&me, &f))
                    );
                }
            }
        }

        #[test]
        fn adjoint_is_an_involution(a in arb_op(2)) {
            let me = pr().metric();
            prop_assert_eq!(a.formal_adjoint(&me).formal_adjoint(&me), a);
        }

        #[test]
        fn super_jacobi_identity(a in arb_op(1), b in arb_op(1), c in arb_op(1)) {
            let me = pr().metric();
            // restrict to homogeneous parts so parities are defined
            let (ae, ao) = a.parity_split();
            let (be, bo) = b.parity_split();
            let (ce, co) = c.parity_split();
            for (x, px) in [(&ae, 0i32), (&ao, 1)] {
                for (y, py) in [(&be, 0i32), (&bo, 1)] {
                    for (z, pz) in [(&ce, 0i32), (&co, 1)] {
                        if x.is_zero() || y.is_zero() || z.is_zero() {
                            continue;
                        }
                        // (-1)^{|x||z|}[x,[y,z]] + cyclic = 0
                        let t1 = x.supercommutator(&me, &y.supercommutator(&me, z));
                        let t1 = if (px * pz) % 2 == 1 { t1.neg() } else { t1 };
                        let t2 = y.supercommutator(&me, &z.supercommutator(&me, x));
                        let t2 = if (py * px) % 2 == 1 { t2.neg() } else { t2 };
                        let t3 = z.supercommutator(&me, &x.supercommutator(&me, y));
                        let t3 = if (pz * py) % 2 == 1 { t3.neg() } else { t3 };
                        prop_assert!(t1.add(&t2).add(&t3).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn bessel_operator_kills_constants_and_commutes_with_itself() {
        let params = pr();
        let me = params.metric();
        let lam = ratq(2 - params.superdim(), 1);
        let one = SuperPolynomial::one(&me);
        for k in 0..me.n_vars() {
            let b = bessel_op(&me, &lam, k);
            assert!(b.apply(&me, &one).is_zero());
        }
        for j in 0..me.n_vars() {
            for k in 0..me.n_vars() {
                let bj = bessel_op(&me, &lam, j);
                let bk = bessel_op(&me, &lam, k);
                let c = bj.supercommutator(&me, &bk);
                assert!(c.is_zero(), "Bessel operators must supercommute");
                assert!(agree_on_low_degree(&me, &c, &DifferentialOperator::zero(), 3));
            }
        }
    }
}
