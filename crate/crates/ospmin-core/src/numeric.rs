//! Double-precision oracles, kept strictly independent of the exact
//! symbol calculus: renormalized Bessel evaluation, adaptive quadrature
//! for the radial moment integrals, and Taylor-node extraction of
//! generating-function coefficients for the Laguerre family.

use alloc::string::String;
use alloc::vec::Vec;

use crate::radial::RadialElement;
use crate::scalar::Rat;
use num_traits::ToPrimitive;

const PI: f64 = core::f64::consts::PI;

pub fn rat_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Renormalized I-Bessel `Ĩ_α(z) = Σ (z²/4)^n / (n! Γ(n+α+1))`, entire in
/// `z` (the series is even, so negative arguments are fine).
pub fn itilde(alpha: f64, z: f64) -> f64 {
    let w = z * z / 4.0;
    let mut term = 1.0 / libm::tgamma(alpha + 1.0);
    if !term.is_finite() {
        // at a pole of Γ the n = 0 term vanishes; start from n = 1
        term = 0.0;
    }
    let mut sum = term;
    let mut prev = 1.0 / libm::tgamma(alpha + 1.0);
    if !prev.is_finite() {
        prev = 0.0;
    }
    let mut n = 1u32;
    loop {
        // recurrence on 1/(n! Γ(n+α+1)) needs care across Γ poles; fall
        // back to direct evaluation per term
        let g = libm::tgamma(n as f64 + alpha + 1.0);
        let mut t = if g.is_finite() && g != 0.0 { 1.0 / g } else { 0.0 };
        for i in 1..=n {
            t /= i as f64;
        }
        let term_n = t * libm::pow(w, n as f64);
        sum += term_n;
        if libm::fabs(term_n) < 1e-18 * (1.0 + libm::fabs(sum)) && n > 4 {
            break;
        }
        if n > 400 {
            break;
        }
        n += 1;
        let _ = prev;
        prev = term_n;
    }
    sum
}

/// Adaptive Simpson quadrature.
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adapt(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    floor: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || libm::fabs(delta) <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        let half = (tol / 2.0).max(floor);
        adapt(f, a, m, fa, flm, fm, left, half, floor, depth - 1)
            + adapt(f, m, b, fm, frm, fb, right, half, floor, depth - 1)
    }
}

/// Adaptive Simpson on `[a, b]` with absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    adapt(f, a, b, fa, fm, fb, whole, tol, tol * 1e-4, 36)
}

/// Adaptive Simpson with the tolerance scaled to the integral's own size.
pub fn integrate_rel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    let scale = libm::fabs(whole).max(1e-30);
    let tol = rel_tol * scale;
    adapt(f, a, b, fa, fm, fb, whole, tol, 2e-16 * scale, 26)
}

/// `K_α(x)` by the cosh integral representation
/// `∫₀^∞ e^{-x cosh t} cosh(αt) dt` on a fixed composite Simpson grid;
/// used in the mid range where neither the closed form, the integer
/// series, nor the asymptotic expansion applies.
fn k_bessel_integral(alpha: f64, x: f64) -> f64 {
    let target = 700.0_f64;
    let ch = (target / x).max(2.0);
    let t_max = libm::acosh(ch) + 1.0;
    let n = 1_500usize; // even
    let h = t_max / n as f64;
    let f = |t: f64| libm::exp(-x * libm::cosh(t)) * libm::cosh(alpha * t);
    let mut acc = f(0.0) + f(t_max);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `K_m(x)` for integer order by the ascending series for `K₀`, the
/// derivative relation `K₁ = -K₀'`, and the upward recurrence.
fn k_integer_series(m: u32, x: f64) -> f64 {
    let w = x * x / 4.0;
    let lg = libm::log(x / 2.0) + EULER_GAMMA;
    // I₀ and Σ (x²/4)^k H_k/(k!)², plus the pieces for K₀'
    let mut i0 = 1.0;
    let mut s_h = 0.0;
    let mut s_h_deriv = 0.0; // Σ k (x²/4)^{k-1} H_k/(k!)² · (x/2)
    let mut i1 = 0.0;
    let mut wk = 1.0; // (x²/4)^k
    let mut kfact2 = 1.0; // (k!)²
    let mut hk = 0.0;
    for k in 1..=60u32 {
        let kf = k as f64;
        wk *= w;
        kfact2 *= kf * kf;
        hk += 1.0 / kf;
        i0 += wk / kfact2;
        s_h += wk * hk / kfact2;
        s_h_deriv += kf * (wk / w) * hk / kfact2 * (x / 2.0);
        if wk / kfact2 < 1e-19 * i0 {
            break;
        }
    }
    // I₁ = (x/2) Σ (x²/4)^k / (k!(k+1)!)
    let mut term = x / 2.0;
    let mut k = 0u32;
    loop {
        i1 += term;
        k += 1;
        term *= w / (k as f64 * (k as f64 + 1.0));
        if term < 1e-19 * i1.max(1.0) || k > 80 {
            break;
        }
    }
    let k0 = -lg * i0 + s_h;
    if m == 0 {
        return k0;
    }
    // K₁ = -K₀' = (1/x)I₀ + lg·I₁ - s_h_deriv
    let k1 = i0 / x + lg * i1 - s_h_deriv;
    if m == 1 {
        return k1;
    }
    let mut prev = k0;
    let mut cur = k1;
    for mm in 1..m {
        let next = prev + (2.0 * mm as f64 / x) * cur;
        prev = cur;
        cur = next;
    }
    cur
}

/// Large-argument asymptotic expansion of `K_α`.
fn k_bessel_asymptotic(alpha: f64, x: f64) -> f64 {
    let mu = 4.0 * alpha * alpha;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=14u32 {
        let kf = k as f64;
        term *= (mu - (2.0 * kf - 1.0) * (2.0 * kf - 1.0)) / (kf * 8.0 * x);
        sum += term;
        if libm::fabs(term) < 1e-17 {
            break;
        }
    }
    libm::sqrt(PI / (2.0 * x)) * libm::exp(-x) * sum
}

/// `K_{m+1/2}(x)` in closed form.
fn k_half_integer(m: u32, x: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..=m {
        let mut c = 1.0;
        // (m+k)! / (k! (m-k)!)
        for i in 1..=(m + k) {
            c *= i as f64;
        }
        for i in 1..=k {
            c /= i as f64;
        }
        for i in 1..=(m - k) {
            c /= i as f64;
        }
        sum += c / libm::pow(2.0 * x, k as f64);
    }
    libm::sqrt(PI / (2.0 * x)) * libm::exp(-x) * sum
}

/// `K_α(x)` for real order, `x > 0`.
pub fn k_bessel(alpha: f64, x: f64) -> f64 {
    let a = libm::fabs(alpha); // K is even in the order
    let half = a - libm::floor(a);
    if libm::fabs(half - 0.5) < 1e-12 && a < 60.0 {
        return k_half_integer(libm::floor(a) as u32, x);
    }
    if x > 30.0 {
        return k_bessel_asymptotic(a, x);
    }
    if libm::fabs(a - libm::round(a)) < 1e-12 && a < 40.0 && x <= 8.0 {
        return k_integer_series(libm::round(a) as u32, x);
    }
    k_bessel_integral(a, x)
}

/// Renormalized `K̃_α(x) = (x/2)^{-α} K_α(x)`.
pub fn ktilde(alpha: f64, x: f64) -> f64 {
    libm::pow(x / 2.0, -alpha) * k_bessel(alpha, x)
}

/// Evaluate an exact radial symbol at a point, with the symbols read as
/// genuine Bessel functions.
pub fn eval_radial(r: &RadialElement, x: f64) -> f64 {
    let beta0 = rat_f64(&r.beta0);
    let mut acc = 0.0;
    for ((m, k), c) in r.terms() {
        acc += c.to_f64() * libm::pow(x, *m as f64) * ktilde(beta0 + *k as f64, x);
    }
    acc
}

/// Quadrature value of `∫₀^∞ ρ^{σ-1} K̃_α(ρ) K̃_β(ρ) dρ` under the
/// substitution `ρ = e^u` (the integrand then decays exponentially on
/// both ends of the convergent region).
pub fn radial_moment_quadrature(sigma: f64, alpha: f64, beta: f64) -> f64 {
    let decay_low = sigma - 2.0 * alpha.max(0.0) - 2.0 * beta.max(0.0);
    assert!(decay_low > 0.0, "quadrature outside the convergent region");
    // e^{σu}·K̃K̃: lower tail ~ e^{decay_low·u}, upper tail ~ e^{-2e^u}
    let u_lo = (-40.0 / decay_low).max(-600.0);
    let u_hi = 3.7;
    let f = move |u: f64| {
        let rho = libm::exp(u);
        libm::exp(sigma * u) * ktilde(alpha, rho) * ktilde(beta, rho)
    };
    integrate_rel(&f, u_lo, u_hi, 1e-11)
}

/// Same, for a single Bessel factor.
pub fn radial_moment_single_quadrature(sigma: f64, alpha: f64) -> f64 {
    let decay_low = sigma - 2.0 * alpha.max(0.0);
    assert!(decay_low > 0.0, "quadrature outside the convergent region");
    let u_lo = (-40.0 / decay_low).max(-600.0);
    let u_hi = 3.9;
    let f = move |u: f64| {
        let rho = libm::exp(u);
        libm::exp(sigma * u) * ktilde(alpha, rho)
    };
    integrate_rel(&f, u_lo, u_hi, 1e-11)
}

/// Generating-function value
/// `G(t,x) = (1-t)^{-(μ+ν+2)/2} Ĩ_{μ/2}(tx/(1-t)) K̃_{ν/2}(x/(1-t))`.
pub fn laguerre_generating(mu: f64, nu: f64, t: f64, x: f64) -> f64 {
    let om = 1.0 - t;
    libm::pow(om, -(mu + nu + 2.0) / 2.0)
        * itilde(mu / 2.0, t * x / om)
        * ktilde(nu / 2.0, x / om)
}

/// Taylor-coefficient extraction of `Λ^{μ,ν}_{2,j}(x)` from the generating
/// function: fit a degree-`t_truncation` polynomial through symmetric
/// nodes `t ∈ [-h, h]` and read the `j`-th coefficient.
pub fn laguerre_numeric_oracle(
    mu: f64,
    nu: f64,
    j: usize,
    x: f64,
    t_truncation: usize,
) -> Result<f64, String> {
    if x <= 0.0 {
        return Err(String::from("x must be positive"));
    }
    let deg = t_truncation.max(j + 6);
    let h = 0.18;
    let n_nodes = deg + 1;
    // nodes in the scaled variable v = t/h
    let mut nodes = Vec::with_capacity(n_nodes);
    for i in 0..n_nodes {
        let v = -1.0 + 2.0 * i as f64 / (n_nodes - 1) as f64;
        nodes.push(v);
    }
    // Vandermonde solve for d_k = c_k h^k
    let mut a: Vec<Vec<f64>> = nodes
        .iter()
        .map(|v| {
            let mut row = Vec::with_capacity(n_nodes + 1);
            let mut p = 1.0;
            for _ in 0..n_nodes {
                row.push(p);
                p *= v;
            }
            let g = laguerre_generating(mu, nu, h * v, x);
            if !g.is_finite() {
                row.push(f64::NAN);
            } else {
                row.push(g);
            }
            row
        })
        .collect();
    if a.iter().any(|r| r.iter().any(|v| !v.is_finite())) {
        return Err(String::from("overflow or underflow in the generating function"));
    }
    // Gaussian elimination with partial pivoting
    let n = n_nodes;
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&i, &j2| {
                libm::fabs(a[i][c])
                    .partial_cmp(&libm::fabs(a[j2][c]))
                    .unwrap()
            })
            .unwrap();
        a.swap(c, piv);
        if a[c][c] == 0.0 {
            return Err(String::from("singular Vandermonde system"));
        }
        for r in 0..n {
            if r != c && a[r][c] != 0.0 {
                let f = a[r][c] / a[c][c];
                for cc in c..=n {
                    a[r][cc] -= f * a[c][cc];
                }
            }
        }
    }
    let d_j = a[j][n] / a[j][j];
    Ok(d_j / libm::pow(h, j as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratq};

    #[test]
    fn bessel_routes_agree() {
        // closed-form half-integer orders against the integral
        // representation
        for (a, x) in [(0.5, 0.7), (1.5, 2.0), (2.5, 1.3), (0.5, 6.0)] {
            let closed = k_half_integer((a - 0.5) as u32, x);
            let integral = k_bessel_integral(a, x);
            assert!(
                libm::fabs(closed - integral) <= 1e-11 * libm::fabs(closed),
                "K mismatch at α={a}, x={x}: {closed} vs {integral}"
            );
        }
        // K_{1/2}(x) = sqrt(π/2x) e^{-x}
        let x = 1.7;
        let expect = libm::sqrt(PI / (2.0 * x)) * libm::exp(-x);
        assert!(libm::fabs(k_bessel(0.5, x) - expect) < 1e-13);
    }

    #[test]
    fn both_kinds_satisfy_the_bessel_ode() {
        // z²u'' + (2α+1)z u' - z²u = 0, via central differences
        let h = 1e-4;
        for alpha in [0.5, -0.5, 1.0, 0.0, 1.5] {
            for z in [0.8, 1.5, 3.0] {
                for f in [&itilde as &dyn Fn(f64, f64) -> f64, &ktilde] {
                    let u = f(alpha, z);
                    let up = (f(alpha, z + h) - f(alpha, z - h)) / (2.0 * h);
                    let upp = (f(alpha, z + h) - 2.0 * u + f(alpha, z - h)) / (h * h);
                    let res = z * z * upp + (2.0 * alpha + 1.0) * z * up - z * z * u;
                    assert!(
                        libm::fabs(res) < 2e-4 * (1.0 + libm::fabs(u) * z * z),
                        "ODE residual {res} at α={alpha}, z={z}"
                    );
                }
            }
        }
    }

    #[test]
    fn moment_quadrature_on_a_known_value() {
        // ∫ ρ K̃₀² dρ = (1/2)Γ(1)⁴/Γ(2) = 1/2
        let v = radial_moment_quadrature(2.0, 0.0, 0.0);
        assert!(libm::fabs(v - 0.5) < 1e-9, "got {v}");
    }

    #[test]
    fn generating_function_reproduces_the_base_coefficient() {
        // t⁰ coefficient: K̃_{ν/2}(x)/Γ((μ+2)/2)
        for (mu, nu) in [(1.0, -1.0), (2.0, 0.0), (1.0, 1.0)] {
            for x in [0.5, 1.0, 2.0] {
                let c0 = laguerre_numeric_oracle(mu, nu, 0, x, 12).unwrap();
                let expect = ktilde(nu / 2.0, x) / libm::tgamma((mu + 2.0) / 2.0);
                assert!(
                    libm::fabs(c0 - expect) <= 1e-10 * libm::fabs(expect),
                    "c₀ mismatch at μ={mu}, ν={nu}, x={x}: {c0} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn oracle_matches_the_exact_expansion() {
        // the exact Λ^{1,-1}_{2,1} evaluated with numeric K̃ against the
        // generating-function extraction; Λ^{1,-1}_{2,1} = (1-x)e^{-x} has
        // a genuine zero at x = 1, so errors are measured against the
        // function scale over the grid
        let lam = crate::radial::laguerre(&rat(1), &rat(-1), 1).unwrap();
        let xs = [0.5, 1.0, 2.0];
        let scale = xs
            .iter()
            .map(|&x| libm::fabs(eval_radial(&lam.expansion, x)))
            .fold(0.0, f64::max);
        for x in xs {
            let exact = eval_radial(&lam.expansion, x);
            let oracle = laguerre_numeric_oracle(1.0, -1.0, 1, x, 12).unwrap();
            assert!(
                libm::fabs(exact - oracle) <= 1e-8 * scale.max(libm::fabs(exact)),
                "Λ mismatch at x={x}: exact {exact} vs oracle {oracle}"
            );
            // cross-check against the elementary closed form (1-x)e^{-x}
            let elem = (1.0 - x) * libm::exp(-x);
            assert!(libm::fabs(exact - elem) < 1e-12);
        }
        let _ = ratq(1, 2);
    }
}
