//! The orbit functional in exact closed form.
//!
//! Integration proceeds through bipolar coordinates: a nilpotent algebra
//! morphism rescales the even coordinates by `(1+η)` and `(1+ξ)`, the
//! measure contributes `(1+η)^{p-3}(1+ξ)^{q-3} ρ^{p+q-5}`, the restriction
//! to `s = t = ρ` Taylor-expands every radial symbol in its `θ²`
//! correction, the Berezin integral extracts the top odd coefficient, and
//! the angular and radial factors reduce to Gamma closed forms.  The whole
//! pipeline stays in the exact scalar ring; divergent inputs are rejected
//! term by term by the convergence predicate.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::operators::DifferentialOperator;
use crate::radial::MixedElement;
use crate::scalar::{gamma_half, pochhammer, rat, ratq, ExactScalar, Rat};
use crate::superpoly::{theta_squared, Metric, ModelParams, Monomial, SuperPolynomial};

/// Radial factor `|X|^{xpow} · Π K̃_{orders[i]}(|X|)`, at most two symbols.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct RadFactor {
    pub xpow: i64,
    pub orders: Vec<Rat>,
}

impl RadFactor {
    fn sorted(mut self) -> Self {
        self.orders.sort();
        self
    }

    /// Derivative with respect to `|X|²`: `(1/2|X|) d/d|X|`.
    fn half_deriv(&self) -> Vec<(Rat, RadFactor)> {
        let mut out = Vec::new();
        if self.xpow != 0 {
            out.push((
                ratq(self.xpow, 2),
                RadFactor { xpow: self.xpow - 2, orders: self.orders.clone() },
            ));
        }
        for i in 0..self.orders.len() {
            let mut orders = self.orders.clone();
            orders[i] = &orders[i] + rat(1);
            out.push((
                ratq(-1, 4),
                RadFactor { xpow: self.xpow, orders }.sorted(),
            ));
        }
        out
    }
}

/// Integration-domain representation of a function on the punctured model
/// space: polynomial × even powers of the two radii × radial factor.  No
/// quotient reduction is applied here; the functional itself kills the
/// ideal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrbitFn {
    pub params: ModelParams,
    terms: BTreeMap<(Monomial, i64, i64, RadFactor), ExactScalar>,
}

impl OrbitFn {
    pub fn zero(params: &ModelParams) -> Self {
        OrbitFn { params: *params, terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Monomial, i64, i64, RadFactor), &ExactScalar)> {
        self.terms.iter()
    }

    fn push(&mut self, mono: Monomial, s_pow: i64, t_pow: i64, rad: RadFactor, c: ExactScalar) {
        if c.is_zero() {
            return;
        }
        debug_assert!(s_pow % 2 == 0 && t_pow % 2 == 0);
        debug_assert!(rad.orders.len() <= 2);
        let key = (mono, s_pow, t_pow, rad);
        match self.terms.entry(key) {
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

    pub fn from_mixed(f: &MixedElement) -> Self {
        let mut out = OrbitFn::zero(&f.params);
        for (mono, r) in f.terms() {
            for ((e, k), c) in r.terms() {
                let rad = RadFactor { xpow: *e, orders: alloc::vec![&r.beta0 + rat(*k)] };
                out.push(mono.clone(), 0, 0, rad, c.clone());
            }
        }
        out
    }

    /// Integrand of the pairing: `conj(f) · g`.
    pub fn pairing_integrand(f: &MixedElement, g: &MixedElement) -> Self {
        let fc = f.conj();
        let mut out = OrbitFn::zero(&f.params);
        for (m1, r1) in fc.terms() {
            for (m2, r2) in g.terms() {
                let Some((mono, sign)) = m1.mul(m2) else { continue };
                for ((e1, k1), c1) in r1.terms() {
                    for ((e2, k2), c2) in r2.terms() {
                        let rad = RadFactor {
                            xpow: e1 + e2,
                            orders: alloc::vec![&r1.beta0 + rat(*k1), &r2.beta0 + rat(*k2)],
                        }
                        .sorted();
                        let mut c = c1 * c2;
                        if sign < 0 {
                            c = -c;
                        }
                        out.push(mono.clone(), 0, 0, rad, c);
                    }
                }
            }
        }
        out
    }

    /// Product of two integration-domain functions (the total number of
    /// radial symbols per term must stay ≤ 2).
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = OrbitFn::zero(&self.params);
        for ((m1, s1, t1, r1), c1) in &self.terms {
            for ((m2, s2, t2, r2), c2) in &other.terms {
                let Some((mono, sign)) = m1.mul(m2) else { continue };
                let mut orders = r1.orders.clone();
                orders.extend(r2.orders.iter().cloned());
                assert!(orders.len() <= 2, "more than two radial symbols in a product");
                let rad = RadFactor { xpow: r1.xpow + r2.xpow, orders }.sorted();
                let mut c = c1 * c2;
                if sign < 0 {
                    c = -c;
                }
                out.push(mono, s1 + s2, t1 + t2, rad, c);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((m, s, t, r), c) in &other.terms {
            out.push(m.clone(), *s, *t, r.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-&ExactScalar::one()))
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        let mut out = OrbitFn::zero(&self.params);
        for ((m, s, t, r), co) in &self.terms {
            out.push(m.clone(), *s, *t, r.clone(), co * c);
        }
        out
    }

    /// Multiply by `s^{2a} t^{2b}`.
    pub fn mul_radii(&self, s_pow: i64, t_pow: i64) -> Self {
        let mut out = OrbitFn::zero(&self.params);
        for ((m, s, t, r), c) in &self.terms {
            out.push(m.clone(), s + s_pow, t + t_pow, r.clone(), c.clone());
        }
        out
    }

    /// Left multiplication by a polynomial.
    pub fn mul_poly_left(&self, f: &SuperPolynomial) -> Self {
        let mut out = OrbitFn::zero(&self.params);
        for ((m, s, t, r), c) in &self.terms {
            let mut mono_poly = SuperPolynomial::zero();
            mono_poly.add_term(m.clone(), ExactScalar::one());
            for (mm, cc) in f.mul(&mono_poly).terms() {
                out.push(mm.clone(), *s, *t, r.clone(), cc * c);
            }
        }
        out
    }

    /// Plain partial derivative `∂^v` including the radii and the radial
    /// chain rule.
    pub fn partial_plain(&self, v: usize) -> Self {
        let metric = self.params.metric();
        let ne = metric.n_even();
        let nx = self.params.n_x();
        let mut out = OrbitFn::zero(&self.params);
        for ((m, s_pow, t_pow), group) in self.group_by_radii() {
            for (rad, c) in &group {
                let mut mono_poly = SuperPolynomial::zero();
                mono_poly.add_term(m.clone(), c.clone());
                // polynomial Leibniz
                for (mm, cc) in mono_poly.partial_plain(&metric, v).terms() {
                    out.push(mm.clone(), s_pow, t_pow, rad.clone(), cc.clone());
                }
                // radius powers: ∂^{x_v} s^{2a} = 2a x_v s^{2a-2}, etc.
                if v < nx && s_pow != 0 {
                    let xv = SuperPolynomial::var(&metric, v);
                    for (mm, cc) in mono_poly.mul(&xv).terms() {
                        out.push(
                            mm.clone(),
                            s_pow - 2,
                            t_pow,
                            rad.clone(),
                            cc.scale_rat(&rat(s_pow)),
                        );
                    }
                } else if v >= nx && v < ne && t_pow != 0 {
                    let yv = SuperPolynomial::var(&metric, v);
                    for (mm, cc) in mono_poly.mul(&yv).terms() {
                        out.push(
                            mm.clone(),
                            s_pow,
                            t_pow - 2,
                            rad.clone(),
                            cc.scale_rat(&rat(t_pow)),
                        );
                    }
                }
                // radial chain rule: ∂^v h = g_v · (d/d|X|²) h
                let g_v = if v < ne {
                    SuperPolynomial::var(&metric, v)
                } else {
                    SuperPolynomial::var_raised(&metric, v).neg()
                };
                let sign_flip = metric.is_odd_var(v) && m.parity() == 1;
                for (mm, cc) in mono_poly.mul(&g_v).terms() {
                    let c2 = if sign_flip { -cc } else { cc.clone() };
                    for (w, rad2) in rad.half_deriv() {
                        out.push(mm.clone(), s_pow, t_pow, rad2, c2.scale_rat(&w));
                    }
                }
            }
        }
        out
    }

    fn group_by_radii(&self) -> Vec<((Monomial, i64, i64), Vec<(RadFactor, ExactScalar)>)> {
        let mut out: BTreeMap<(Monomial, i64, i64), Vec<(RadFactor, ExactScalar)>> =
            BTreeMap::new();
        for ((m, s, t, r), c) in &self.terms {
            out.entry((m.clone(), *s, *t))
                .or_default()
                .push((r.clone(), c.clone()));
        }
        out.into_iter().collect()
    }

    pub fn partial_lower(&self, v: usize) -> Self {
        let metric = self.params.metric();
        let (i, c) = metric.lower_partner(v);
        let d = self.partial_plain(i);
        if c < 0 {
            d.scale(&-&ExactScalar::one())
        } else {
            d
        }
    }

    /// Apply a normally ordered differential operator.
    pub fn apply_operator(&self, op: &DifferentialOperator) -> Self {
        let metric = self.params.metric();
        let ne = metric.n_even();
        let mut out = OrbitFn::zero(&self.params);
        for (deriv, coef) in op.terms() {
            let mut g = self.clone();
            for k in (0..metric.n_odd()).rev() {
                if deriv.has_odd(k) {
                    g = g.partial_plain(ne + k);
                }
            }
            for v in (0..ne).rev() {
                for _ in 0..deriv.even_exp(v) {
                    g = g.partial_plain(v);
                }
            }
            out = out.add(&g.mul_poly_left(coef));
        }
        out
    }

    /// `s ∂_s` (Euler operator in the s-radius alone).
    pub fn s_euler(&self) -> Self {
        let nx = self.params.n_x();
        let mut out = OrbitFn::zero(&self.params);
        for ((m, s_pow, t_pow, rad), c) in &self.terms {
            let xdeg: i64 = (0..nx).map(|v| m.even[v] as i64).sum();
            let w = rat(xdeg + s_pow);
            out.push(m.clone(), *s_pow, *t_pow, rad.clone(), c.scale_rat(&w));
            // s∂_s h(|X|) = s² · (d/d|X|²) h
            for (w2, rad2) in rad.half_deriv() {
                out.push(m.clone(), s_pow + 2, *t_pow, rad2, c.scale_rat(&w2));
            }
        }
        out
    }

    /// `t ∂_t`.
    pub fn t_euler(&self) -> Self {
        let nx = self.params.n_x();
        let ne = self.params.metric().n_even();
        let mut out = OrbitFn::zero(&self.params);
        for ((m, s_pow, t_pow, rad), c) in &self.terms {
            let ydeg: i64 = (nx..ne).map(|v| m.even[v] as i64).sum();
            let w = rat(ydeg + t_pow);
            out.push(m.clone(), *s_pow, *t_pow, rad.clone(), c.scale_rat(&w));
            for (w2, rad2) in rad.half_deriv() {
                out.push(m.clone(), *s_pow, t_pow + 2, rad2, c.scale_rat(&w2));
            }
        }
        out
    }

    /// The algebra morphism of the bipolar expansion: every even
    /// coordinate factor is rescaled, `φ^♯(x) = (1+η)x`,
    /// `φ^♯(y) = (1+ξ)y`, odd variables and radial symbols are fixed.
    /// The nilpotent weights are expanded into `θ²`-powers immediately.
    pub fn phi_sharp(&self) -> Self {
        let params = &self.params;
        let metric = params.metric();
        let nx = params.n_x();
        let ne = metric.n_even();
        let n = params.n;
        let th2 = theta_squared(&metric);
        let mut out = OrbitFn::zero(params);
        for ((m, s_pow, t_pow, rad), c) in &self.terms {
            let xdeg: i64 = (0..nx).map(|v| m.even[v] as i64).sum();
            let ydeg: i64 = (nx..ne).map(|v| m.even[v] as i64).sum();
            let c_eta = xdeg + s_pow;
            let c_xi = ydeg + t_pow;
            for i in 0..=n {
                let wi = pochhammer(&ratq(-c_eta, 2), i as u32)
                    / (factorial(i) * rat(2).pow(i as i32));
                if wi.is_zero() {
                    continue;
                }
                for jj in 0..=n {
                    let mut wj = pochhammer(&ratq(-c_xi, 2), jj as u32)
                        / (factorial(jj) * rat(2).pow(jj as i32));
                    if jj % 2 == 1 {
                        wj = -wj;
                    }
                    if wj.is_zero() {
                        continue;
                    }
                    let mut th_pow = SuperPolynomial::one(&metric);
                    for _ in 0..(i + jj) {
                        th_pow = th_pow.mul(&th2);
                    }
                    if th_pow.is_zero() {
                        continue;
                    }
                    let mut mono_poly = SuperPolynomial::zero();
                    mono_poly.add_term(m.clone(), c.scale_rat(&(wi.clone() * wj)));
                    for (mm, cc) in mono_poly.mul(&th_pow).terms() {
                        out.push(
                            mm.clone(),
                            s_pow - 2 * i,
                            t_pow - 2 * jj,
                            rad.clone(),
                            cc.clone(),
                        );
                    }
                }
            }
        }
        out
    }
}

fn factorial(n: i64) -> Rat {
    let mut acc = Rat::one();
    for i in 1..=n {
        acc *= rat(i);
    }
    acc
}

/// `∫_{S^{d-1}} Π ω_i^{a_i} dω`: zero unless all exponents are even, else
/// `2 Π Γ((a_i+1)/2) / Γ(Σ (a_i+1)/2)`.
pub fn sphere_moment(d: usize, exps: &[u8]) -> Result<ExactScalar, String> {
    assert_eq!(exps.len(), d);
    if d == 0 {
        return Ok(ExactScalar::one());
    }
    if exps.iter().any(|a| a % 2 == 1) {
        return Ok(ExactScalar::zero());
    }
    let mut num = ExactScalar::from_int(2);
    let mut total = Rat::zero();
    for a in exps {
        let arg = ratq(*a as i64 + 1, 2);
        num = &num * &gamma_half(&arg).map_err(|e| alloc::format!("{e}"))?;
        total += arg;
    }
    let den = gamma_half(&total).map_err(|e| alloc::format!("{e}"))?;
    num.div_monomial(&den).map_err(|e| alloc::format!("{e}"))
}

/// Convergence predicate for `∫₀^∞ ρ^{σ-1} K̃_α K̃_β dρ`.
pub fn pair_moment_converges(sigma: i64, alpha: &Rat, beta: &Rat) -> bool {
    let mx = |r: &Rat| if r > &Rat::zero() { r.clone() * rat(2) } else { Rat::zero() };
    rat(sigma) > mx(alpha) + mx(beta)
}

/// Closed form
/// `∫₀^∞ ρ^{σ-1} K̃_α K̃_β dρ
///  = 2^{σ-3} Γ(σ/2) Γ((σ-2α)/2) Γ((σ-2β)/2) Γ((σ-2α-2β)/2) / Γ(σ-α-β)`.
pub fn radial_moment(sigma: i64, alpha: &Rat, beta: &Rat) -> Result<ExactScalar, String> {
    if !pair_moment_converges(sigma, alpha, beta) {
        return Err(alloc::format!(
            "divergent radial moment: σ={sigma}, α={alpha}, β={beta}"
        ));
    }
    let g = |r: Rat| gamma_half(&r).map_err(|e| alloc::format!("{e}"));
    let s = rat(sigma);
    let num = &(&(&g(&s / rat(2))? * &g((&s - &(alpha * rat(2))) / rat(2))?)
        * &g((&s - &(beta * rat(2))) / rat(2))?)
        * &g((&s - &(alpha * rat(2)) - &(beta * rat(2))) / rat(2))?;
    let den = g(&s - alpha - beta)?;
    let pow2 = pow2_rat(sigma - 3);
    (&num * &ExactScalar::from_rat(pow2))
        .div_monomial(&den)
        .map_err(|e| alloc::format!("{e}"))
}

/// Closed form for a single factor:
/// `∫₀^∞ ρ^{σ-1} K̃_α dρ = 2^{σ-2} Γ(σ/2) Γ((σ-2α)/2)`.
pub fn radial_moment_single(sigma: i64, alpha: &Rat) -> Result<ExactScalar, String> {
    let conv = rat(sigma) > Rat::zero() && rat(sigma) > alpha * rat(2);
    if !conv {
        return Err(alloc::format!("divergent radial moment: σ={sigma}, α={alpha}"));
    }
    let g = |r: Rat| gamma_half(&r).map_err(|e| alloc::format!("{e}"));
    let s = rat(sigma);
    let num = &g(&s / rat(2))? * &g((&s - &(alpha * rat(2))) / rat(2))?;
    Ok(&num * &ExactScalar::from_rat(pow2_rat(sigma - 2)))
}

fn pow2_rat(e: i64) -> Rat {
    if e >= 0 {
        rat(2).pow(e as i32)
    } else {
        Rat::one() / rat(2).pow((-e) as i32)
    }
}

/// Berezin integral of the odd part: coefficient of the full odd monomial
/// `θ_1 ⋯ θ_{2n}` (in ascending index order).
pub fn berezin(metric: &Metric, f: &SuperPolynomial) -> ExactScalar {
    let nodd = metric.n_odd();
    let full: u64 = if nodd == 0 { 0 } else { (1u64 << nodd) - 1 };
    let mut acc = ExactScalar::zero();
    for (m, c) in f.terms() {
        if m.odd == full && m.even.iter().all(|e| *e == 0) {
            acc += c;
        }
    }
    acc
}

/// Exact value of the functional on a single raw term
/// `mono · s^{s_pow} t^{t_pow} · rad`: the bipolar rescaling weights, the
/// measure weights, the radial Taylor restriction, the Berezin
/// extraction, and the angular and radial moments.
fn term_integral(
    params: &ModelParams,
    odd_norm: &ExactScalar,
    m: &Monomial,
    s_pow: i64,
    t_pow: i64,
    rad: &RadFactor,
) -> Result<ExactScalar, String> {
    let metric = params.metric();
    let n = params.n;
    let nx = params.n_x();
    let ny = params.n_y();
    let th2 = theta_squared(&metric);
    let x_exps: Vec<u8> = (0..nx).map(|v| m.even[v]).collect();
    let y_exps: Vec<u8> = (0..ny).map(|v| m.even[nx + v]).collect();
    let sp = sphere_moment(nx, &x_exps)?;
    if sp.is_zero() {
        return Ok(ExactScalar::zero());
    }
    let sq = sphere_moment(ny, &y_exps)?;
    if sq.is_zero() {
        return Ok(ExactScalar::zero());
    }
    let xdeg: i64 = x_exps.iter().map(|e| *e as i64).sum();
    let ydeg: i64 = y_exps.iter().map(|e| *e as i64).sum();
    // bipolar rescaling combined with the measure weights:
    // (1+η)^{p-3+xdeg+s_pow} (1+ξ)^{q-3+ydeg+t_pow}
    let c_eta = params.p - 3 + xdeg + s_pow;
    let c_xi = params.q - 3 + ydeg + t_pow;
    let mut acc = ExactScalar::zero();
    for i in 0..=n {
        let wi =
            pochhammer(&ratq(-c_eta, 2), i as u32) / (factorial(i) * rat(2).pow(i as i32));
        if wi.is_zero() {
            continue;
        }
        for jj in 0..=n {
            let mut wj =
                pochhammer(&ratq(-c_xi, 2), jj as u32) / (factorial(jj) * rat(2).pow(jj as i32));
            if jj % 2 == 1 {
                wj = -wj;
            }
            if wj.is_zero() {
                continue;
            }
            // radial Taylor restriction: Σ_r (θ²/2)^r / r! · (d/d|X|²)^r
            let mut layers: Vec<(Rat, RadFactor)> = alloc::vec![(Rat::one(), rad.clone())];
            for r in 0..=n {
                for (wr, rad_r) in &layers {
                    let w = wi.clone() * wj.clone() * wr / (factorial(r) * pow2_rat(r));
                    if w.is_zero() {
                        continue;
                    }
                    let tot_theta_sq = i + jj + r;
                    // θ-part: the monomial's odd piece times (θ²)^{i+jj+r}
                    let mut th_piece = SuperPolynomial::zero();
                    let mut m_odd = Monomial::unit(metric.n_even());
                    m_odd.odd = m.odd;
                    th_piece.add_term(m_odd, ExactScalar::one());
                    for _ in 0..tot_theta_sq {
                        th_piece = th_piece.mul(&th2);
                    }
                    let bz = berezin(&metric, &th_piece);
                    if bz.is_zero() {
                        continue;
                    }
                    let rho_pow = xdeg + ydeg + s_pow + t_pow - 2 * i - 2 * jj + rad_r.xpow;
                    let sigma = params.p + params.q - 4 + rho_pow;
                    let moment = match rad_r.orders.len() {
                        2 => radial_moment(sigma, &rad_r.orders[0], &rad_r.orders[1])?,
                        1 => radial_moment_single(sigma, &rad_r.orders[0])?,
                        _ => {
                            return Err(String::from(
                                "term without radial decay: the integral diverges",
                            ))
                        }
                    };
                    let mut term = ExactScalar::from_rat(w * ratq(1, 2));
                    term = &term * &bz;
                    term = &term * &sp;
                    term = &term * &sq;
                    term = &term * &moment;
                    term = term.div_monomial(odd_norm).map_err(|e| alloc::format!("{e}"))?;
                    acc += &term;
                }
                let mut next = Vec::new();
                for (wr, rad_r) in &layers {
                    for (w2, rad2) in rad_r.half_deriv() {
                        next.push((wr * &w2, rad2));
                    }
                }
                layers = next;
                if layers.is_empty() {
                    break;
                }
            }
        }
    }
    Ok(acc)
}

fn theta_norm(params: &ModelParams) -> ExactScalar {
    let metric = params.metric();
    let th2 = theta_squared(&metric);
    let mut p = SuperPolynomial::one(&metric);
    for _ in 0..params.n {
        p = p.mul(&th2);
    }
    berezin(&metric, &p)
}

/// The orbit functional: exact value of `∫ f` over the punctured cone.
///
/// The odd volume is normalized against the square norm of the odd
/// coordinates: the raw top-coefficient extraction is divided by
/// `∫_B (θ²)^n`, so that the full power of `θ²` integrates to one.  This
/// is the normalization under which the closed form for the pairing of
/// the bare K-Bessel symbol holds (checked against independent
/// quadrature in the classical case and against the closed form for
/// `n ≤ 3`).
pub fn orbit_integral(f: &OrbitFn) -> Result<ExactScalar, String> {
    let odd_norm = theta_norm(&f.params);
    let mut acc = ExactScalar::zero();
    for ((m, s_pow, t_pow, rad), c) in &f.terms {
        let v = term_integral(&f.params, &odd_norm, m, *s_pow, *t_pow, rad)?;
        acc += &(c * &v);
    }
    Ok(acc)
}

/// Memoizing evaluator for repeated pairings: the functional is linear, so
/// each distinct raw term is integrated once and reused.
pub struct OrbitCache {
    params: ModelParams,
    odd_norm: ExactScalar,
    memo: BTreeMap<(Monomial, i64, i64, RadFactor), Result<ExactScalar, String>>,
}

impl OrbitCache {
    pub fn new(params: &ModelParams) -> OrbitCache {
        OrbitCache { params: *params, odd_norm: theta_norm(params), memo: BTreeMap::new() }
    }

    pub fn integral(&mut self, f: &OrbitFn) -> Result<ExactScalar, String> {
        debug_assert_eq!(f.params, self.params);
        let mut acc = ExactScalar::zero();
        for ((m, s_pow, t_pow, rad), c) in &f.terms {
            let key = (m.clone(), *s_pow, *t_pow, rad.clone());
            let v = match self.memo.get(&key) {
                Some(v) => v.clone(),
                None => {
                    let v = term_integral(&self.params, &self.odd_norm, m, *s_pow, *t_pow, rad);
                    self.memo.insert(key, v.clone());
                    v
                }
            };
            acc += &(c * &v?);
        }
        Ok(acc)
    }

    pub fn pairing(&mut self, f: &MixedElement, g: &MixedElement) -> Result<ExactScalar, String> {
        self.integral(&OrbitFn::pairing_integrand(f, g))
    }
}

/// Sesquilinear pairing `⟨f, g⟩ = ∫ conj(f) · g` on mixed elements.
pub fn sesquilinear(f: &MixedElement, g: &MixedElement) -> Result<ExactScalar, String> {
    orbit_integral(&OrbitFn::pairing_integrand(f, g))
}

/// The closed-form value of the pairing of the bare K-Bessel symbol with
/// itself:
/// `2^{μ+ν}/n! · ((3-p)/2)_n · π^{(p+q-2)/2}/(Γ((p-1)/2)Γ((q-1)/2))
///  · Γ((μ-ν)/2+1)Γ((μ+ν)/2+1)Γ(μ/2+1)² / Γ(μ+2)`.
pub fn knu_pairing_closed_form(params: &ModelParams) -> Result<ExactScalar, String> {
    let mu = params.mu();
    let nu = params.nu();
    let g = |r: Rat| gamma_half(&r).map_err(|e: crate::scalar::ScalarError| alloc::format!("{e}"));
    let mut acc = ExactScalar::from_rat(
        pow2_rat(mu + nu) * pochhammer(&ratq(3 - params.p, 2), params.n as u32)
            / factorial(params.n),
    );
    acc = &acc * &ExactScalar::monomial(crate::scalar::Gaussian::one(), params.p + params.q - 2);
    acc = acc
        .div_monomial(&g(ratq(params.p - 1, 2))?)
        .map_err(|e| alloc::format!("{e}"))?;
    acc = acc
        .div_monomial(&g(ratq(params.q - 1, 2))?)
        .map_err(|e| alloc::format!("{e}"))?;
    acc = &acc * &g(ratq(mu - nu, 2) + rat(1))?;
    acc = &acc * &g(ratq(mu + nu, 2) + rat(1))?;
    let gmu = g(ratq(mu, 2) + rat(1))?;
    acc = &acc * &(&gmu * &gmu);
    acc.div_monomial(&g(rat(mu + 2))?).map_err(|e| alloc::format!("{e}"))
}

/// Direct quadruple-sum evaluation of the combinatorial factor
/// `Σ(p,q,n)` over `i+j+k+l = n`, and its closed form `2ⁿ/n!((3-p)/2)_n`.
pub fn sigma_factor_direct(params: &ModelParams) -> Rat {
    let n = params.n;
    let mu = ratq(params.mu(), 1);
    let nu = ratq(params.nu(), 1);
    let mut acc = Rat::zero();
    for i in 0..=n {
        for j in 0..=n {
            for k in 0..=n {
                if i + j + k > n {
                    continue;
                }
                let l = n - i - j - k;
                let sign = if (i + j + k) % 2 == 0 { Rat::one() } else { -Rat::one() };
                let term = sign
                    * pochhammer(&ratq(3 - params.q, 2), k as u32)
                    * pochhammer(&ratq(3 - params.p, 2), l as u32)
                    * pochhammer(&(&mu / rat(2) + rat(1)), i as u32)
                    * pochhammer(&(&mu / rat(2) + rat(1)), j as u32)
                    * pochhammer(&(&(&mu + &nu) / rat(2) + rat(1)), (i + j) as u32)
                    / (factorial(i) * factorial(j) * factorial(k) * factorial(l))
                    / pochhammer(&(&mu + rat(2)), (i + j) as u32);
                acc += term;
            }
        }
    }
    acc
}

pub fn sigma_factor_closed(params: &ModelParams) -> Rat {
    pow2_rat(params.n) * pochhammer(&ratq(3 - params.p, 2), params.n as u32)
        / factorial(params.n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric;
    use crate::radial::RadialElement;

    fn p441() -> ModelParams {
        ModelParams::new(4, 4, 1).unwrap()
    }

    fn knu(params: &ModelParams) -> MixedElement {
        MixedElement::from_radial(params, &RadialElement::khat(ratq(params.nu(), 2), 0, 0))
    }

    #[test]
    fn sphere_moments() {
        // full area: 2π^{d/2}/Γ(d/2)
        for d in 1..=5usize {
            let area = sphere_moment(d, &alloc::vec![0u8; d]).unwrap();
            let expect = (&ExactScalar::from_int(2)
                * &ExactScalar::monomial(crate::scalar::Gaussian::one(), d as i64))
                .div_monomial(&gamma_half(&ratq(d as i64, 2)).unwrap())
                .unwrap();
            assert_eq!(area, expect);
        }
        // odd exponent kills the moment
        assert!(sphere_moment(3, &[1, 0, 0]).unwrap().is_zero());
        // second moment is area/d
        for d in 2..=5usize {
            let mut exps = alloc::vec![0u8; d];
            exps[0] = 2;
            let second = sphere_moment(d, &exps).unwrap();
            let area = sphere_moment(d, &alloc::vec![0u8; d]).unwrap();
            assert_eq!(
                second.scale_rat(&rat(d as i64)),
                area,
                "second moment at d={d}"
            );
        }
    }

    #[test]
    fn radial_moment_values_and_divergence() {
        // (σ,α,β) = (2,0,0): (1/2)Γ(1)⁴/Γ(2) = 1/2
        let v = radial_moment(2, &Rat::zero(), &Rat::zero()).unwrap();
        assert_eq!(v, ExactScalar::from_rat(ratq(1, 2)));
        let numeric = numeric::radial_moment_quadrature(2.0, 0.0, 0.0);
        assert!((numeric - 0.5).abs() < 1e-9);
        // σ = 4, α = β = 0: 2·Γ(2)²Γ(2)²/Γ(4) = 2/6 = 1/3
        let v = radial_moment(4, &Rat::zero(), &Rat::zero()).unwrap();
        assert_eq!(v, ExactScalar::from_rat(ratq(1, 3)));
        let q = numeric::radial_moment_quadrature(4.0, 0.0, 0.0);
        assert!((q - 1.0 / 3.0).abs() < 1e-9);
        // below threshold: divergence error
        assert!(radial_moment(2, &rat(1), &Rat::zero()).is_err());
        assert!(radial_moment_single(1, &rat(1)).is_err());
    }

    #[test]
    fn berezin_convention() {
        let params = p441();
        let metric = params.metric();
        let t1 = SuperPolynomial::var(&metric, params.theta(1));
        let t2 = SuperPolynomial::var(&metric, params.theta(2));
        assert_eq!(berezin(&metric, &t1.mul(&t2)), ExactScalar::one());
        assert_eq!(berezin(&metric, &t2.mul(&t1)), ExactScalar::from_int(-1));
        assert!(berezin(&metric, &t1).is_zero());
    }

    #[test]
    fn functional_kills_the_ideal() {
        let params = p441();
        let metric = params.metric();
        let f = knu(&params);
        // R²·f integrates to zero
        let r2f = OrbitFn::from_mixed(&f).mul_poly_left(&crate::superpoly::r_squared(&metric));
        let fsq = OrbitFn::pairing_integrand(&f, &f);
        let r2fsq = fsq.mul_poly_left(&crate::superpoly::r_squared(&metric));
        assert!(orbit_integral(&r2fsq).unwrap().is_zero());
        let _ = r2f;
    }

    #[test]
    fn knu_pairing_matches_the_closed_form() {
        for (p, q, n) in [(4i64, 4, 1), (6, 4, 1), (3, 5, 0)] {
            let params = ModelParams::new(p, q, n).unwrap();
            let f = knu(&params);
            let val = sesquilinear(&f, &f).unwrap();
            let closed = knu_pairing_closed_form(&params).unwrap();
            assert_eq!(val, closed, "pairing mismatch at ({p},{q},{n})");
            assert!(!val.is_zero());
        }
    }

    #[test]
    fn sigma_factor_simplification() {
        for (p, q, n) in [(4i64, 4, 0), (4, 4, 1), (4, 4, 2), (4, 4, 3), (6, 4, 1), (6, 4, 3)] {
            let params = ModelParams::new(p, q, n).unwrap();
            assert_eq!(
                sigma_factor_direct(&params),
                sigma_factor_closed(&params),
                "Σ factor at ({p},{q},{n})"
            );
        }
    }

    #[test]
    fn phi_sharp_is_a_morphism() {
        let params = p441();
        let metric = params.metric();
        let f = OrbitFn::from_mixed(&knu(&params))
            .mul_poly_left(&SuperPolynomial::var(&metric, params.x(1)));
        let g = OrbitFn::from_mixed(&knu(&params))
            .mul_poly_left(&SuperPolynomial::var(&metric, params.y(2)));
        let lhs = f.mul(&g).phi_sharp();
        let rhs = f.phi_sharp().mul(&g.phi_sharp());
        assert_eq!(lhs, rhs);
        // radial symbols are fixed points
        let k = OrbitFn::from_mixed(&knu(&params));
        assert_eq!(k.phi_sharp(), k);
    }

    #[test]
    fn integral_symmetry_with_respect_to_bessel_operators() {
        // property (4): ∫ (B_λ f) g = (-1)^{|f||k|} ∫ f (B_λ g) at the
        // critical λ, on a sample pair
        let params = p441();
        let metric = params.metric();
        let rp = crate::liealg::rep::RepParams::critical(&params);
        let f = knu(&params);
        let x1sq = SuperPolynomial::var(&metric, params.x(1))
            .mul(&SuperPolynomial::var(&metric, params.x(1)));
        let g = knu(&params).mul_poly_left(&x1sq);
        for k in [params.x(1), params.y(1), params.theta(1)] {
            let b = crate::operators::bessel_op(&metric, &rp.lambda, k);
            let bf = f.apply_operator(&b);
            let bg = g.apply_operator(&b);
            let lhs = orbit_integral(&OrbitFn::pairing_integrand(&bf.conj(), &g)).unwrap();
            let rhs = orbit_integral(&OrbitFn::pairing_integrand(&f.conj(), &bg)).unwrap();
            // f is even, so no sign
            assert_eq!(lhs, rhs, "symmetry fails for variable {k}");
        }
    }

    #[test]
    fn euler_property_of_the_functional() {
        // ∫ (E + M - 2) f = 0
        let params = p441();
        let metric = params.metric();
        let f = knu(&params);
        let pair = OrbitFn::pairing_integrand(&f, &f);
        let e_app = pair.apply_operator(&crate::operators::euler_op(&metric));
        let m = params.superdim();
        let total = e_app.add(&pair.scale(&ExactScalar::from_int(m - 2)));
        assert!(orbit_integral(&total).unwrap().is_zero());
    }
}
