//! Exponential sums with polynomial coefficients and the comparison of their
//! norms on an interval against a subset of it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::bandlimited::{panel_width_for, Exponent, DEFAULT_RESOLUTION};
use crate::bounds::{lemma3_bound, nazarov_remez_bounds, BoundConstants, PowerBound};
use crate::error::{Error, Result};
use crate::quadrature::{grid_sup, power_integral};

/// `r(x) = Σ_k e^{iλ_k x} P_k(x - origin)`, each `P_k` given by its
/// coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpSum {
    origin: f64,
    terms: Vec<(f64, Vec<Complex64>)>,
}

impl ExpSum {
    pub fn new(origin: f64, terms: Vec<(f64, Vec<Complex64>)>) -> Result<Self> {
        if terms.is_empty() || terms.iter().any(|(_, c)| c.is_empty()) {
            return Err(Error::InvalidArgument("exponential sum needs nonempty terms".into()));
        }
        Ok(Self { origin, terms })
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn terms(&self) -> &[(f64, Vec<Complex64>)] {
        &self.terms
    }

    /// Number of exponentials `n`.
    pub fn count(&self) -> u32 {
        self.terms.len() as u32
    }

    /// Coefficient budget `m`: polynomials have degree below `m`.
    pub fn order(&self) -> u32 {
        self.terms.iter().map(|(_, c)| c.len()).max().unwrap_or(0) as u32
    }

    /// Highest degree with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, c)| c.iter().rposition(|z| z.norm() > 0.0).unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let y = x - self.origin;
        self.terms
            .iter()
            .map(|(lambda, coeffs)| {
                let poly = coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * y + c);
                Complex64::cis(lambda * x) * poly
            })
            .sum()
    }

    fn panel_width(&self, interval: (f64, f64)) -> f64 {
        let top = self.terms.iter().map(|(l, _)| l.abs()).fold(0.0, f64::max);
        let degree_cap = (interval.1 - interval.0) / (1.0 + self.degree() as f64 / 8.0);
        panel_width_for(top, DEFAULT_RESOLUTION).min(degree_cap / DEFAULT_RESOLUTION)
    }

    pub fn norm_on(&self, pieces: &[(f64, f64)], p: Exponent, width: f64) -> f64 {
        match p {
            Exponent::Finite(pv) => {
                power_integral(pieces, pv, width, |x| self.eval(x).norm()).powf(1.0 / pv)
            }
            Exponent::Infinity => grid_sup(pieces, width, |x| self.eval(x).norm()).1,
        }
    }
}

/// Random sum with `n` frequencies uniform in `[-λ_max, λ_max]` and standard
/// complex normal coefficients of degree below `m`.
pub fn random_exp_sum(n: u32, m: u32, origin: f64, lambda_max: f64, seed: u64) -> Result<ExpSum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms = (0..n)
        .map(|_| {
            let lambda = rng.gen_range(-lambda_max..=lambda_max);
            let coeffs = (0..m)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect();
            (lambda, coeffs)
        })
        .collect();
    ExpSum::new(origin, terms)
}

/// Chebyshev polynomial of the given degree mapped onto `[lo, hi]`, as a
/// single zero-frequency term with origin `lo`. It is bounded by 1 on the
/// window and grows as fast as any polynomial outside it.
pub fn chebyshev_instance(degree: usize, window: (f64, f64)) -> Result<ExpSum> {
    let (lo, hi) = window;
    if !(hi > lo) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let w = hi - lo;
    // u = (2y - w)/w
    let u = [-1.0, 2.0 / w];
    let mut prev = vec![1.0];
    let mut cur = vec![u[0], u[1]];
    if degree == 0 {
        cur = prev.clone();
    }
    for _ in 1..degree.max(1) {
        let mut next = vec![0.0; cur.len() + 1];
        for (i, &c) in cur.iter().enumerate() {
            next[i] += 2.0 * u[0] * c;
            next[i + 1] += 2.0 * u[1] * c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    ExpSum::new(lo, vec![(0.0, cur.into_iter().map(|c| Complex64::new(c, 0.0)).collect())])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpSumCheck {
    /// `‖r‖_{L^p(I)} / ‖r‖_{L^p(E)}`.
    pub ratio: f64,
    pub length_ratio: f64,
    /// `(C|I|/|E|)^{nm - (p-1)/p}`.
    pub bound: PowerBound,
    pub holds: bool,
    /// `(4|I|/|E|)^{deg}` for a single polynomial (zero frequency).
    pub remez: Option<PowerBound>,
}

impl ExpSumCheck {
    pub fn remez_holds(&self) -> Option<bool> {
        self.remez.map(|r| self.ratio.ln() <= r.ln() + 1e-9)
    }
}

/// Compares norms of `r` on `interval` and on the subset `set ⊂ interval`.
pub fn exp_sum_verifier(
    r: &ExpSum,
    interval: (f64, f64),
    set: &[(f64, f64)],
    p: Exponent,
    k: &BoundConstants,
) -> Result<ExpSumCheck> {
    let (lo, hi) = interval;
    if !(hi > lo) {
        return Err(Error::InvalidInterval { lo, hi });
    }
    let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    if set.iter().any(|&(a, b)| a < lo - slack || b > hi + slack || b < a) {
        return Err(Error::InvalidArgument("set must lie inside the interval".into()));
    }
    let meas: f64 = set.iter().map(|&(a, b)| b - a).sum();
    if !(meas > 0.0) {
        return Err(Error::EmptySet);
    }
    let width = r.panel_width(interval);
    let on_set = r.norm_on(set, p, width);
    if !(on_set > 0.0) {
        return Err(Error::ZeroFunction);
    }
    let ratio = r.norm_on(&[interval], p, width) / on_set;
    let len = hi - lo;
    let bound = lemma3_bound(len, meas, r.count(), r.order(), p, k)?;
    let single_polynomial = r.terms.len() == 1 && r.terms[0].0 == 0.0;
    let remez = if single_polynomial {
        Some(nazarov_remez_bounds(len, meas, r.degree() as u32, k)?.1)
    } else {
        None
    };
    Ok(ExpSumCheck {
        ratio,
        length_ratio: len / meas,
        bound,
        holds: ratio.ln() <= bound.ln(),
        remez,
    })
}

/// `2^{j/2}` for `j = 0..=18`.
pub const CONSTANT_GRID: [f64; 19] = {
    let mut grid = [0.0; 19];
    let mut j = 0;
    let mut v = 1.0;
    while j < 19 {
        grid[j] = if j % 2 == 0 { v } else { v * std::f64::consts::SQRT_2 };
        if j % 2 == 1 {
            v *= 2.0;
        }
        j += 1;
    }
    grid
};

/// Smallest grid constant `C` with `ratio <= (C · length_ratio)^exponent` on
/// every sample `(length_ratio, ratio)`.
pub fn minimal_constant(samples: &[(f64, f64)], exponent: f64) -> Option<f64> {
    CONSTANT_GRID.iter().copied().find(|&c| {
        samples
            .iter()
            .all(|&(len_ratio, ratio)| ratio.ln() <= exponent * (c * len_ratio).ln() + 1e-12)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const P1: Exponent = Exponent::Finite(1.0);
    const P2: Exponent = Exponent::Finite(2.0);

    #[test]
    fn grid_values() {
        assert_eq!(CONSTANT_GRID[0], 1.0);
        assert_relative_eq!(CONSTANT_GRID[1], 2f64.sqrt());
        assert_eq!(CONSTANT_GRID[18], 512.0);
        for (j, c) in CONSTANT_GRID.iter().enumerate() {
            assert_relative_eq!(*c, 2f64.powf(j as f64 / 2.0), max_relative = 1e-15);
        }
    }

    #[test]
    fn pure_exponential_ratios() {
        let k = BoundConstants::default();
        let r = ExpSum::new(0.0, vec![(3.0, vec![Complex64::new(1.0, 0.0)])]).unwrap();
        let e = [(0.0, 0.25)];
        let one = exp_sum_verifier(&r, (0.0, 1.0), &e, P1, &k).unwrap();
        assert_relative_eq!(one.ratio, 4.0, max_relative = 1e-12);
        let two = exp_sum_verifier(&r, (0.0, 1.0), &e, P2, &k).unwrap();
        assert_relative_eq!(two.ratio, 2.0, max_relative = 1e-12);
        let inf = exp_sum_verifier(&r, (0.0, 1.0), &e, Exponent::Infinity, &k).unwrap();
        assert_relative_eq!(inf.ratio, 1.0, max_relative = 1e-12);
        assert!(one.holds && two.holds && inf.holds);
        assert!(one.remez.is_none());
    }

    #[test]
    fn chebyshev_sup_ratio() {
        // |T_d| <= 1 on E and T_d(u) at the far end of I = [0, 1]
        for degree in 0..6 {
            let rho = 0.25;
            let r = chebyshev_instance(degree, (0.0, rho)).unwrap();
            for i in 0..=20 {
                let x = rho * i as f64 / 20.0;
                assert!(r.eval(x).norm() <= 1.0 + 1e-12);
            }
            let u: f64 = 2.0 / rho - 1.0;
            let expected = ((u + (u * u - 1.0).sqrt()).powi(degree as i32)
                + (u - (u * u - 1.0).sqrt()).powi(degree as i32))
                / 2.0;
            assert_relative_eq!(r.eval(1.0).re, expected, max_relative = 1e-10);
            let check = exp_sum_verifier(&r, (0.0, 1.0), &[(0.0, rho)], Exponent::Infinity, &BoundConstants::default())
                .unwrap();
            assert_relative_eq!(check.ratio, expected, max_relative = 1e-9);
            assert_eq!(check.remez_holds(), Some(true));
        }
    }

    #[test]
    fn random_sums_respect_bound() {
        let k = BoundConstants::default();
        for seed in 0..10 {
            let r = random_exp_sum(2, 2, 0.0, 10.0, seed).unwrap();
            for p in [P1, P2, Exponent::Infinity] {
                let check = exp_sum_verifier(&r, (0.0, 1.0), &[(0.0, 0.3)], p, &k).unwrap();
                assert!(check.holds);
            }
        }
    }

    #[test]
    fn minimal_constant_search() {
        assert_eq!(minimal_constant(&[(2.0, 2.0)], 1.0), Some(1.0));
        assert_eq!(minimal_constant(&[(2.0, 4.0)], 1.0), Some(2.0));
        assert_eq!(minimal_constant(&[(1.0, 1e6)], 1.0), None);
    }

    #[test]
    fn rejects_bad_sets() {
        let k = BoundConstants::default();
        let r = chebyshev_instance(2, (0.0, 1.0)).unwrap();
        assert!(matches!(exp_sum_verifier(&r, (0.0, 1.0), &[(0.5, 0.5)], P1, &k), Err(Error::EmptySet)));
        assert!(exp_sum_verifier(&r, (0.0, 1.0), &[(0.5, 1.5)], P1, &k).is_err());
    }
}
