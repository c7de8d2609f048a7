//! Exact limiting conditional arrival rates.
//!
//! Server 1's marginal decays geometrically with ratio `alpha = rho^(1+s)`;
//! server 2's marginal, sampled once per period of `s` states, decays with
//! the same ratio but with a phase-dependent amplitude `A(r)`. The amplitudes
//! come from `s + 1` roots inside the disc `|beta| < alpha` of two
//! characteristic equations and an `s`-dimensional linear system.
//!
//! Root finding is done in the scaled variable `x = beta / alpha`, which keeps
//! the polynomials well conditioned when `alpha` is tiny.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::linalg::{poly_add, poly_mul, poly_pow, poly_roots, poly_scale, CMatrix};
use crate::Complex;

/// Roots with `|beta| < alpha (1 - ROOT_TOL)` qualify.
const ROOT_TOL: f64 = 1e-10;
/// Largest imaginary residue tolerated on an assembled `A(r)`.
const IMAG_TOL: f64 = 1e-9;

fn c(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

fn check(rho: f64, s: u32) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(domain("load must lie in (0, 1)"));
    }
    if s == 0 {
        return Err(domain("s must be a positive integer"));
    }
    Ok(())
}

/// `rho^(1+s)`, the geometric decay rate of both marginals.
pub fn alpha(rho: f64, s: u32) -> f64 {
    rho.powi(s as i32 + 1)
}

/// Ratio `ipos(alpha, beta, r) / ipos(alpha, beta, 0)`.
pub fn ipos_ratio(alpha: f64, beta: Complex, r: u32, rho: f64, s: u32) -> Result<Complex> {
    if r >= s {
        return Err(domain(format!("phase {r} outside 0..{s}")));
    }
    if alpha == 0.0 || beta == c(0.0) {
        return Err(domain("ipos needs nonzero alpha and beta"));
    }
    let sf = f64::from(s);
    let x = beta / alpha;
    let base = (x * (1.0 + sf) * (rho + 1.0) - x * x * (1.0 + sf) * rho - 1.0) / (x * sf);
    Ok(base.powi(r as i32))
}

/// The two roots `g+`, `g-` of `s g^2 - ((1+s)(rho+1) - beta) g + (1+s) rho = 0`.
pub fn g_pm(beta: Complex, rho: f64, s: u32) -> (Complex, Complex) {
    let sf = f64::from(s);
    let b = (1.0 + sf) * (rho + 1.0) - beta;
    let disc = (b * b - 4.0 * sf * (1.0 + sf) * rho).sqrt();
    ((b + disc) / (2.0 * sf), (b - disc) / (2.0 * sf))
}

/// `F(alpha, beta, x) = beta - (1+s)(rho+1) + s x + (beta/alpha)(1+s) rho x^(s-1)`.
pub fn f_func(alpha: f64, beta: Complex, x: Complex, rho: f64, s: u32) -> Complex {
    let sf = f64::from(s);
    beta - (1.0 + sf) * (rho + 1.0) + x * sf + beta / alpha * (1.0 + sf) * rho * x.powi(s as i32 - 1)
}

/// `(1+s) rho x^-1 ((beta/alpha) x^s - 1)`; equals [`f_func`] at `x = g+-(beta)`.
pub fn f_func_on_roots(alpha: f64, beta: Complex, x: Complex, rho: f64, s: u32) -> Result<Complex> {
    if x == c(0.0) {
        return Err(domain("x must be nonzero"));
    }
    let sf = f64::from(s);
    Ok((1.0 + sf) * rho / x * (beta / alpha * x.powi(s as i32) - 1.0))
}

/// Ratio `ineg(alpha, beta, r) / ineg(alpha, beta, 0)`.
pub fn ineg_ratio(alpha: f64, beta: Complex, r: u32, rho: f64, s: u32) -> Result<Complex> {
    if r >= s {
        return Err(domain(format!("phase {r} outside 0..{s}")));
    }
    let (gp, gm) = g_pm(beta, rho, s);
    let fp = f_func(alpha, beta, gp, rho, s);
    let fm = f_func(alpha, beta, gm, rho, s);
    let den = fm - fp;
    if den.norm() <= 1e-14 * fm.norm().max(fp.norm()).max(1.0) {
        return Err(Error::DoubleRoot);
    }
    let r = r as i32;
    Ok((fm * gp.powi(r) - fp * gm.powi(r)) / den)
}

fn ipos_vector(alpha: f64, beta: Complex, rho: f64, s: u32) -> Result<Vec<Complex>> {
    (0..s).map(|r| ipos_ratio(alpha, beta, r, rho, s)).collect()
}

fn ineg_vector(alpha: f64, beta: Complex, rho: f64, s: u32) -> Result<Vec<Complex>> {
    (0..s).map(|r| ineg_ratio(alpha, beta, r, rho, s)).collect()
}

/// The positive-branch characteristic polynomial in `x = beta / alpha`,
/// ascending coefficients:
/// `(x(1+s)(rho+1) - x^2(1+s)rho - 1)^s - alpha s^s x^(s+1)`.
pub fn positive_polynomial(rho: f64, s: u32) -> Vec<f64> {
    let sf = f64::from(s);
    let a = alpha(rho, s);
    let quad = [-1.0, (1.0 + sf) * (rho + 1.0), -(1.0 + sf) * rho];
    let mut mono = vec![0.0; s as usize + 2];
    mono[s as usize + 1] = a * sf.powi(s as i32);
    poly_add(&poly_pow(&quad, s), &poly_scale(&mono, -1.0))
}

/// Power sum `g+^k + g-^k` as a polynomial in `beta`, by Newton's identity.
pub fn power_sum_polynomial(rho: f64, s: u32, k: u32) -> Vec<f64> {
    let sf = f64::from(s);
    let e1 = [(1.0 + sf) * (rho + 1.0) / sf, -1.0 / sf];
    let e2 = (1.0 + sf) * rho / sf;
    let mut prev = vec![2.0];
    if k == 0 {
        return prev;
    }
    let mut cur = e1.to_vec();
    for _ in 1..k {
        let next = poly_add(&poly_mul(&e1, &cur), &poly_scale(&prev, -e2));
        prev = core::mem::replace(&mut cur, next);
    }
    cur
}

/// The negative-branch characteristic polynomial in `x = beta / alpha`,
/// divided by `alpha^2`: `s^s + x^2 ((1+s)rho)^s - x s^s p_s(alpha x)`.
pub fn negative_polynomial(rho: f64, s: u32) -> Vec<f64> {
    let sf = f64::from(s);
    let a = alpha(rho, s);
    let ss = sf.powi(s as i32);
    let ps = power_sum_polynomial(rho, s, s);
    let ps_scaled: Vec<f64> = ps.iter().enumerate().map(|(i, v)| v * a.powi(i as i32)).collect();
    let mut poly = poly_scale(&poly_mul(&[0.0, 1.0], &ps_scaled), -ss);
    poly = poly_add(&poly, &[ss, 0.0, ((1.0 + sf) * rho).powi(s as i32)]);
    poly
}

fn roots_in_disc(poly: &[f64], expected: usize, alpha: f64) -> Result<Vec<Complex>> {
    let roots = poly_roots(poly)?;
    let mut inside: Vec<Complex> = roots
        .iter()
        .copied()
        .filter(|x| x.norm() < 1.0 - ROOT_TOL)
        .map(|x| x * alpha)
        .collect();
    if inside.len() != expected {
        return Err(Error::RootCount {
            expected,
            candidates: roots.into_iter().map(|x| x * alpha).collect(),
        });
    }
    inside.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.arg().total_cmp(&b.arg())));
    Ok(inside)
}

/// The `s` roots `beta_1..beta_s` with `|beta| < alpha`, sorted by modulus
/// then argument.
pub fn inner_roots_pos(rho: f64, s: u32) -> Result<Vec<Complex>> {
    check(rho, s)?;
    roots_in_disc(&positive_polynomial(rho, s), s as usize, alpha(rho, s))
}

/// The single root `beta_{s+1}` with `|beta| < alpha` of the negative branch.
pub fn inner_root_neg(rho: f64, s: u32) -> Result<Complex> {
    check(rho, s)?;
    Ok(roots_in_disc(&negative_polynomial(rho, s), 1, alpha(rho, s))?[0])
}

fn invert(m: &CMatrix) -> Result<CMatrix> {
    let n = m.dim();
    let mut inv = CMatrix::zeros(n);
    for j in 0..n {
        let mut e = vec![c(0.0); n];
        e[j] = c(1.0);
        let col = m.solve(&e)?;
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Ok(inv)
}

/// Solves for the coefficients `c_hat` and the boundary vector `h`.
pub fn solve_coefficients(
    rho: f64,
    s: u32,
    betas: &[Complex],
    beta_neg: Complex,
) -> Result<(Vec<Complex>, Vec<Complex>)> {
    check(rho, s)?;
    if betas.len() != s as usize {
        return Err(domain("need exactly s positive-branch roots"));
    }
    let n = s as usize;
    let sf = f64::from(s);
    let a = alpha(rho, s);
    let lam = (1.0 + sf) * rho;
    let id = CMatrix::identity(n);
    let m_top_right = CMatrix::unit(n, 0, n - 1);
    let m_bottom_left = CMatrix::unit(n, n - 1, 0);
    let lo = CMatrix::lower_shift(n);

    let w = invert(&m_top_right.scale(c(0.5 * lam)).add(&id.scale(c(a))))?;
    let tail = id
        .scale(c(-(1.0 + sf) * (rho + 1.0)))
        .add(&lo.transpose().scale(c(sf)))
        .add(&lo.scale(c(lam)))
        .mul(&w)
        .scale(c(a * a));
    let head = id.scale(c(lam)).add(&m_bottom_left.scale(c(a * sf)));

    let ipos: Vec<Vec<Complex>> = betas
        .iter()
        .map(|&b| ipos_vector(a, b, rho, s))
        .collect::<Result<_>>()?;
    let mut sys = CMatrix::zeros(n);
    for (i, (&b, v)) in betas.iter().zip(&ipos).enumerate() {
        let col = head.scale(b).add(&tail).mul_vec(v);
        for r in 0..n {
            sys[(r, i)] = col[r];
        }
    }
    let ineg = ineg_vector(a, beta_neg, rho, s)?;
    let rhs: Vec<Complex> = m_top_right
        .scale(c(lam))
        .add(&id.scale(c(a)))
        .mul_vec(&ineg)
        .into_iter()
        .map(|v| -beta_neg * v)
        .collect();
    let c_hat = sys.solve(&rhs).map_err(|_| Error::Singular("coefficient system"))?;

    let mut acc = vec![c(0.0); n];
    for (ci, v) in c_hat.iter().zip(&ipos) {
        for r in 0..n {
            acc[r] += ci * v[r];
        }
    }
    let h = w.mul_vec(&acc).into_iter().map(|v| v * a).collect();
    Ok((c_hat, h))
}

/// Everything the limiting rates are assembled from.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectralData {
    pub rho: f64,
    pub s: u32,
    pub alpha: f64,
    pub betas: Vec<Complex>,
    pub beta_neg: Complex,
    pub c_hat: Vec<Complex>,
    pub h: Vec<Complex>,
    /// Phase amplitudes `A(0..s)`.
    pub a: Vec<f64>,
}

impl SpectralData {
    pub fn new(rho: f64, s: u32) -> Result<Self> {
        check(rho, s)?;
        let betas = inner_roots_pos(rho, s)?;
        let beta_neg = inner_root_neg(rho, s)?;
        let (c_hat, h) = solve_coefficients(rho, s, &betas, beta_neg)?;
        let mut data = SpectralData {
            rho,
            s,
            alpha: alpha(rho, s),
            betas,
            beta_neg,
            c_hat,
            h,
            a: Vec::new(),
        };
        data.a = (0..s).map(|r| data.a_of_r(r)).collect::<Result<_>>()?;
        Ok(data)
    }

    /// The assembled, complex value of `A(r)` before the reality check.
    pub fn a_complex(&self, r: u32) -> Result<Complex> {
        let (rho, s, a) = (self.rho, self.s, self.alpha);
        let mut total = self
            .h
            .get(r as usize)
            .copied()
            .ok_or_else(|| domain("phase out of range"))?;
        for (ci, &b) in self.c_hat.iter().zip(&self.betas) {
            total += ci * b / (a - b) * ipos_ratio(a, b, r, rho, s)?;
        }
        let bn = self.beta_neg;
        total += bn / (1.0 - bn) * ineg_ratio(a, bn, r, rho, s)?;
        Ok(total)
    }

    /// `A(r)`, asserted real and positive.
    pub fn a_of_r(&self, r: u32) -> Result<f64> {
        let z = self.a_complex(r)?;
        if z.im.abs() > IMAG_TOL * z.re.abs().max(1.0) {
            return Err(Error::Numerical(format!("A({r}) has imaginary part {:e}", z.im)));
        }
        if !(z.re > 0.0) {
            return Err(Error::Numerical(format!("A({r}) = {:e} is not positive", z.re)));
        }
        Ok(z.re)
    }

    pub fn limiting_rates(&self) -> LimitingRates {
        let sf = f64::from(self.s);
        let n = self.s as usize;
        let mut lam2: Vec<f64> = (0..n.saturating_sub(1))
            .map(|r| sf * self.a[r + 1] / self.a[r])
            .collect();
        lam2.push(sf * self.alpha * self.a[0] / self.a[n - 1]);
        LimitingRates { lam1: self.alpha, lam2 }
    }
}

/// `lim lambda_1(n)` and `lim lambda_2(s n + r)` for `r = 0..s`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LimitingRates {
    pub lam1: f64,
    pub lam2: Vec<f64>,
}

pub fn limiting_rates(rho: f64, s: u32) -> Result<LimitingRates> {
    Ok(SpectralData::new(rho, s)?.limiting_rates())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex, b: Complex, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    /// Independent root finder: Durand-Kerner on the monic polynomial.
    fn durand_kerner(p: &[f64]) -> Vec<Complex> {
        let n = p.len() - 1;
        let lead = p[n];
        let monic: Vec<f64> = p.iter().map(|v| v / lead).collect();
        let eval = |z: Complex| monic.iter().rev().fold(c(0.0), |acc, &v| acc * z + v);
        let seed = Complex::new(0.4, 0.9);
        let mut z: Vec<Complex> = (0..n).map(|k| seed.powi(k as i32)).collect();
        for _ in 0..2000 {
            let prev = z.clone();
            for i in 0..n {
                let mut den = c(1.0);
                for j in 0..n {
                    if i != j {
                        den *= z[i] - z[j];
                    }
                }
                let step = eval(z[i]) / den;
                z[i] -= step;
            }
            if z.iter().zip(&prev).all(|(a, b)| (a - b).norm() < 1e-15) {
                break;
            }
        }
        z
    }

    #[test]
    fn ratios_start_at_one() {
        let (rho, s) = (0.7, 2);
        let a = alpha(rho, s);
        for b in inner_roots_pos(rho, s).unwrap() {
            assert!(close(ipos_ratio(a, b, 0, rho, s).unwrap(), c(1.0), 1e-15));
        }
        let bn = inner_root_neg(rho, s).unwrap();
        assert!(close(ineg_ratio(a, bn, 0, rho, s).unwrap(), c(1.0), 1e-12));
        assert!(ipos_ratio(a, bn, 2, rho, s).is_err());
        assert!(close(
            ineg_ratio(alpha(0.5, 1), c(0.01), 0, 0.5, 1).unwrap(),
            c(1.0),
            1e-12
        ));
    }

    #[test]
    fn ipos_base_modulus() {
        // |base| = |beta|^(1/s) on the positive-branch roots.
        for s in [2, 3, 4] {
            let rho = 0.7;
            let a = alpha(rho, s);
            for b in inner_roots_pos(rho, s).unwrap() {
                let base = ipos_ratio(a, b, 1, rho, s).unwrap();
                assert!((base.norm() - b.norm().powf(1.0 / f64::from(s))).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn g_pm_vieta_and_double_root() {
        for (s, rho, b) in [(1, 0.5, c(0.1)), (3, 0.8, Complex::new(0.2, -0.4)), (4, 0.3, c(7.0))] {
            let sf = f64::from(s);
            let (gp, gm) = g_pm(b, rho, s);
            assert!(close(gp + gm, ((1.0 + sf) * (rho + 1.0) - b) / sf, 1e-12));
            assert!(close(gp * gm, c((1.0 + sf) * rho / sf), 1e-12));
        }
        let (s, rho) = (2u32, 0.6);
        let sf = f64::from(s);
        let b = c((1.0 + sf) * (rho + 1.0) - 2.0 * (sf * (1.0 + sf) * rho).sqrt());
        let (gp, gm) = g_pm(b, rho, s);
        assert!((gp - gm).norm() < 1e-7);
        assert_eq!(ineg_ratio(alpha(rho, s), b, 1, rho, s), Err(Error::DoubleRoot));
        // s = 1, rho = 0.5, beta = 0.1 by direct substitution.
        let (gp, gm) = g_pm(c(0.1), 0.5, 1);
        let d = (2.9f64 * 2.9 - 4.0 * 2.0 * 0.5).sqrt();
        assert!(close(gp, c((2.9 + d) / 2.0), 1e-14));
        assert!(close(gm, c((2.9 - d) / 2.0), 1e-14));
    }

    #[test]
    fn f_forms_agree_on_quadratic_roots() {
        for (s, rho, b) in [(2, 0.7, Complex::new(0.05, 0.02)), (4, 0.9, c(0.3)), (1, 0.4, c(0.01))] {
            let a = alpha(rho, s);
            let (gp, gm) = g_pm(b, rho, s);
            for x in [gp, gm] {
                let f1 = f_func(a, b, x, rho, s);
                let f2 = f_func_on_roots(a, b, x, rho, s).unwrap();
                assert!(close(f1, f2, 1e-10), "{f1} vs {f2}");
            }
        }
        let (a, rho) = (alpha(0.5, 1), 0.5);
        let b = c(0.1);
        let expect = b - 2.0 * (rho + 1.0) + c(3.0) + b / a * 2.0 * rho;
        assert!(close(f_func(a, b, c(3.0), rho, 1), expect, 1e-14));
    }

    #[test]
    fn power_sum_matches_direct() {
        for (s, rho, b) in [
            (2, 0.7, Complex::new(0.3, 0.1)),
            (4, 0.4, c(-0.2)),
            (3, 0.95, Complex::new(1.1, -0.6)),
        ] {
            let (gp, gm) = g_pm(b, rho, s);
            for k in 0..=6 {
                let p = power_sum_polynomial(rho, s, k);
                let val = p.iter().rev().fold(c(0.0), |acc, &v| acc * b + v);
                assert!(close(val, gp.powi(k as i32) + gm.powi(k as i32), 1e-12));
            }
        }
    }

    #[test]
    fn s1_positive_root_closed_form() {
        for rho in [0.3, 0.6, 0.9] {
            let a = alpha(rho, 1);
            // -1 + 2(rho+1) x - (2 rho + alpha) x^2 = 0, smaller root.
            let qa = 2.0 * rho + a;
            let qb = 2.0 * (rho + 1.0);
            let x = (qb - (qb * qb - 4.0 * qa).sqrt()) / (2.0 * qa);
            let got = inner_roots_pos(rho, 1).unwrap();
            assert_eq!(got.len(), 1);
            assert!(close(got[0], c(a * x), 1e-12));
        }
    }

    #[test]
    fn roots_agree_with_independent_scan() {
        for s in [2u32, 3, 4] {
            for rho in [0.4, 0.7, 0.9] {
                let a = alpha(rho, s);
                for (poly, found) in [
                    (positive_polynomial(rho, s), inner_roots_pos(rho, s).unwrap()),
                    (negative_polynomial(rho, s), vec![inner_root_neg(rho, s).unwrap()]),
                ] {
                    let scan: Vec<Complex> = durand_kerner(&poly)
                        .into_iter()
                        .filter(|x| x.norm() < 1.0)
                        .map(|x| x * a)
                        .collect();
                    assert_eq!(scan.len(), found.len(), "s={s} rho={rho}");
                    for b in &found {
                        assert!(scan.iter().any(|z| (z - b).norm() < 1e-9 * a));
                    }
                }
            }
        }
    }

    #[test]
    fn root_disc_counts_over_grid() {
        for s in 1..=5u32 {
            for k in 0..=13 {
                let rho = 0.3 + 0.05 * f64::from(k);
                assert_eq!(inner_roots_pos(rho, s).unwrap().len(), s as usize);
                assert!(inner_root_neg(rho, s).unwrap().norm() < alpha(rho, s));
            }
        }
    }

    #[test]
    fn roots_vanish_in_light_traffic() {
        for s in [1u32, 2, 4] {
            let mut last = f64::INFINITY;
            for rho in [0.3, 0.1, 0.03, 0.01] {
                let a = alpha(rho, s);
                let bn = inner_root_neg(rho, s).unwrap().norm();
                assert!(bn < last);
                last = bn;
                let ratio = inner_roots_pos(rho, s)
                    .unwrap()
                    .iter()
                    .map(|b| b.norm() / a)
                    .fold(0.0, f64::max);
                assert!(ratio < 1.0);
            }
        }
    }

    #[test]
    fn s1_system_by_hand() {
        // For s = 1 every matrix is a scalar (the shift matrix vanishes):
        // W = 1/(rho + alpha), c = -b2 (2 rho + alpha) / (b1 (2 rho + alpha) - 2 alpha^2 (rho+1) W),
        // h = alpha W c.
        let rho = 0.6;
        let a = alpha(rho, 1);
        let b1 = inner_roots_pos(rho, 1).unwrap()[0];
        let b2 = inner_root_neg(rho, 1).unwrap();
        let w = 1.0 / (rho + a);
        let coef = b1 * (2.0 * rho + a) - 2.0 * a * a * (rho + 1.0) * w;
        let expect_c = -b2 * (2.0 * rho + a) / coef;
        let (chat, h) = solve_coefficients(rho, 1, &[b1], b2).unwrap();
        assert!(close(chat[0], expect_c, 1e-12));
        assert!(close(h[0], expect_c * a * w, 1e-12));
    }

    #[test]
    fn h_satisfies_its_equation() {
        for s in [2u32, 3, 4] {
            let rho = 0.7;
            let d = SpectralData::new(rho, s).unwrap();
            let n = s as usize;
            let lam = (1.0 + f64::from(s)) * rho;
            let m = CMatrix::unit(n, 0, n - 1)
                .scale(c(0.5 * lam))
                .add(&CMatrix::identity(n).scale(c(d.alpha)));
            let lhs = m.mul_vec(&d.h);
            let mut rhs = vec![c(0.0); n];
            for (ci, &b) in d.c_hat.iter().zip(&d.betas) {
                for r in 0..n {
                    rhs[r] += ci * ipos_ratio(d.alpha, b, r as u32, rho, s).unwrap() * d.alpha;
                }
            }
            for (l, r) in lhs.iter().zip(&rhs) {
                assert!((l - r).norm() < 1e-10 * r.norm().max(1e-300).max(d.alpha));
            }
        }
    }

    #[test]
    fn amplitudes_real_positive_and_telescoping() {
        for s in 1..=5u32 {
            for k in 0..=13 {
                let rho = 0.3 + 0.05 * f64::from(k);
                let d = SpectralData::new(rho, s).unwrap();
                for r in 0..s {
                    let z = d.a_complex(r).unwrap();
                    assert!(z.re > 0.0 && z.im.abs() < 1e-9 * z.re.max(1.0));
                }
                let lim = d.limiting_rates();
                assert!(lim.lam2.iter().all(|v| *v > 0.0));
                let prod: f64 = lim.lam2.iter().product();
                let expect = f64::from(s).powi(s as i32) * d.alpha;
                assert!((prod - expect).abs() <= 1e-10 * expect, "s={s} rho={rho}");
            }
        }
    }

    #[test]
    fn s1_limits_coincide() {
        for rho in [0.2, 0.5, 0.9] {
            let lim = limiting_rates(rho, 1).unwrap();
            assert!((lim.lam1 - rho * rho).abs() < 1e-15);
            assert!((lim.lam2[0] - lim.lam1).abs() < 1e-14);
        }
        let lim = limiting_rates(0.7, 4).unwrap();
        assert!((lim.lam1 - 0.16807).abs() < 1e-12);
        assert_eq!(lim.lam2.len(), 4);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(limiting_rates(1.0, 2).is_err());
        assert!(limiting_rates(0.5, 0).is_err());
        assert!(limiting_rates(0.0, 2).is_err());
    }
}
