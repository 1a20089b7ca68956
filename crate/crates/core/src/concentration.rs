//! Exact optimal `p = 2` constants through the concentration operator.
//!
//! For a fixed finite spectrum `{2π m_j / L}`, the smallest possible value of
//! `‖f‖²_{L²(E)} / ‖f‖²_{L²(torus)}` is the smallest eigenvalue of the Gram
//! matrix `G_jk = (1/L) ∫_E e^{i 2π (m_j - m_k) x / L} dx`, attained at the
//! corresponding eigenvector. This is the oracle the `p = 2` bounds are
//! measured against.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::bandlimited::{BandSpec, Exponent, TrigPoly};
use crate::bounds::{theorem1_bound, theorem2_bound, BoundConstants, PowerBound};
use crate::eigen::{hermitian_jacobi, ComplexMatrix};
use crate::error::{Error, Result};
use crate::precise::precise_min_eigenvalue;
use crate::sets::IntervalSet;

/// Largest matrix the dense solver accepts.
pub const MAX_DENSE: usize = 2048;

/// Jacobi stopping rule: off-diagonal Frobenius mass relative to `‖G‖_F`.
pub const JACOBI_TOLERANCE: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub freqs: Vec<i64>,
    pub period: f64,
    /// `|E ∩ [0, L)| / L`.
    pub fraction: f64,
    pub entries: ComplexMatrix,
}

/// `∫_lo^hi e^{iκx} dx`, written as `e^{iκ mid} · 2 sin(κh/2)/κ` so that short
/// intervals do not cancel.
fn character_integral(kappa: f64, lo: f64, hi: f64) -> Complex64 {
    let h = hi - lo;
    if kappa == 0.0 {
        return Complex64::new(h, 0.0);
    }
    let mid = 0.5 * (lo + hi);
    Complex64::cis(kappa * mid) * (2.0 * (0.5 * kappa * h).sin() / kappa)
}

pub fn gram_matrix(freqs: &[i64], set: &IntervalSet, period: f64) -> Result<GramMatrix> {
    let mut sorted = freqs.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateFrequency(w[0]));
    }
    if freqs.is_empty() {
        return Err(Error::InvalidArgument("no frequencies".into()));
    }
    let torus = set.on_torus(period)?;
    let pieces = torus.intervals();
    let mut cache: HashMap<i64, Complex64> = HashMap::new();
    let mut entry = |delta: i64| -> Complex64 {
        *cache.entry(delta).or_insert_with(|| {
            let kappa = 2.0 * PI * delta as f64 / period;
            pieces.iter().map(|&(lo, hi)| character_integral(kappa, lo, hi)).sum::<Complex64>()
                / period
        })
    };
    let n = freqs.len();
    let mut entries = ComplexMatrix::zeros(n);
    for j in 0..n {
        for k in j..n {
            let g = entry(freqs[j] - freqs[k]);
            if j == k {
                entries.set(j, j, Complex64::new(g.re, 0.0));
            } else {
                entries.set(j, k, g);
                entries.set(k, j, g.conj());
            }
        }
    }
    Ok(GramMatrix { freqs: freqs.to_vec(), period, fraction: torus.measure() / period, entries })
}

/// Smallest concentration ratio and a function attaining it.
#[derive(Debug, Clone)]
pub struct Concentration {
    pub lambda_min: f64,
    /// Unit eigenvector `v` of `λ_min`. The minimiser is
    /// `Σ conj(v_j) e^{i 2π m_j x / L}`, since `∫_E |f|² = L vᴴ G v` for
    /// `c = conj(v)`.
    pub witness: Vec<Complex64>,
    /// `‖G v - λ v‖₂`.
    pub residual: f64,
    /// All eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub gram: GramMatrix,
}

impl Concentration {
    pub fn witness_poly(&self) -> Result<TrigPoly> {
        TrigPoly::new(
            self.gram.period,
            self.gram.freqs.iter().copied().zip(self.witness.iter().map(|v| v.conj())).collect(),
        )
    }
}

pub fn min_concentration(freqs: &[i64], set: &IntervalSet, period: f64) -> Result<Concentration> {
    if freqs.len() > MAX_DENSE {
        return Err(Error::SizeLimit { n: freqs.len(), max: MAX_DENSE });
    }
    let gram = gram_matrix(freqs, set, period)?;
    let eig = hermitian_jacobi(&gram.entries, JACOBI_TOLERANCE)?;
    let lambda_min = eig.values[0];
    let witness = eig.vectors[0].clone();
    let gv = gram.entries.mul_vec(&witness);
    let residual =
        gv.iter().zip(&witness).map(|(x, y)| (x - y * lambda_min).norm_sqr()).sum::<f64>().sqrt();
    Ok(Concentration { lambda_min, witness, residual, eigenvalues: eig.values, gram })
}

/// Below this the double-precision `λ_min` is recomputed in MPFR.
pub const RESOLUTION_FLOOR: f64 = 1e-8;

/// `λ_min` with the working precision that resolved it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedMin {
    pub lambda_min: f64,
    pub log10_lambda_min: f64,
    /// 53 for the double-precision solve.
    pub bits: u32,
}

/// Smallest Gram eigenvalue, escalating to extended precision when the
/// double-precision value is below [`RESOLUTION_FLOOR`].
pub fn resolved_min_concentration(freqs: &[i64], set: &IntervalSet, period: f64) -> Result<ResolvedMin> {
    let dense = min_concentration(freqs, set, period)?;
    if dense.lambda_min >= RESOLUTION_FLOOR {
        return Ok(ResolvedMin {
            lambda_min: dense.lambda_min,
            log10_lambda_min: dense.lambda_min.log10(),
            bits: f64::MANTISSA_DIGITS,
        });
    }
    let precise = precise_min_eigenvalue(freqs, set, period)?;
    Ok(ResolvedMin {
        lambda_min: precise.lambda_min,
        log10_lambda_min: precise.log10_lambda_min,
        bits: precise.bits,
    })
}

/// Exact `p = 2` constant against the closed-form lower bound.
#[derive(Debug, Clone, Serialize)]
pub struct SharpnessReport {
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
    pub bands: usize,
    pub n_freqs: usize,
    pub lambda_min: f64,
    /// Working precision of the eigenvalue, in bits.
    pub bits: u32,
    /// `sqrt(lambda_min)`: the best constant in `‖f‖_{L²(E)} >= c ‖f‖₂`.
    pub exact: f64,
    pub log10_exact: f64,
    pub bound: PowerBound,
    /// `log10(exact / bound)`; the ratio itself overflows for most inputs.
    pub log10_margin: f64,
}

impl SharpnessReport {
    pub fn margin(&self) -> f64 {
        10f64.powf(self.log10_margin)
    }

    pub fn holds(&self) -> bool {
        self.log10_margin >= 0.0
    }
}

/// Compares the exact `p = 2` constant of `E` for the lattice spectrum of
/// `spec` with the one-band bound (`n = 1`) or the `n`-band bound.
pub fn sharpness_gap(
    spec: &BandSpec,
    set: &IntervalSet,
    period: f64,
    a: f64,
    k: &BoundConstants,
) -> Result<SharpnessReport> {
    for band in 0..spec.count() {
        if spec.lattice_in_band(band, period).is_empty() {
            return Err(Error::EmptyBand { index: band });
        }
    }
    let freqs = spec.lattice(period);
    let gamma = set.on_torus(period)?.thickness(a)?.gamma;
    if gamma <= 0.0 {
        return Err(Error::InvalidGamma(gamma));
    }
    let resolved = resolved_min_concentration(&freqs, set, period)?;
    let log10_exact = 0.5 * resolved.log10_lambda_min;
    let ab = a * spec.width();
    let p = Exponent::Finite(2.0);
    let bound = match spec.count() {
        1 => theorem1_bound(gamma, ab, p, k)?,
        n => theorem2_bound(gamma, n as u32, ab, p, k)?,
    };
    Ok(SharpnessReport {
        gamma,
        a,
        b: spec.width(),
        bands: spec.count(),
        n_freqs: freqs.len(),
        lambda_min: resolved.lambda_min,
        bits: resolved.bits,
        exact: resolved.lambda_min.max(0.0).sqrt(),
        log10_exact,
        log10_margin: log10_exact - bound.log10(),
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandlimited::{lp_norm, NormQuery};
    use crate::sets::two_sliver_set;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const TAU: f64 = 2.0 * PI;

    #[test]
    fn gram_examples() {
        let e = IntervalSet::normalize(&[(0.0, 1.3)]).unwrap();
        let g = gram_matrix(&[0], &e, 4.0).unwrap();
        assert_relative_eq!(g.entries.get(0, 0).re, 1.3 / 4.0, max_relative = 1e-15);

        let full = IntervalSet::full(3.0).unwrap();
        let g = gram_matrix(&[-2, 0, 1, 5], &full, 3.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((g.entries.get(i, j) - Complex64::new(expected, 0.0)).norm() < 1e-15);
            }
        }

        let half = IntervalSet::normalize(&[(0.0, PI)]).unwrap();
        let g = gram_matrix(&[-1, 0, 1], &half, TAU).unwrap();
        for i in 0..3 {
            assert_relative_eq!(g.entries.get(i, i).re, 0.5, max_relative = 1e-15);
        }
        // G_jk = (1/2π) ∫_0^π e^{i(m_j - m_k)x} dx; m_j - m_k = -1 gives -i/π
        assert!((g.entries.get(0, 1) - Complex64::new(0.0, -1.0 / PI)).norm() < 1e-15);
        assert!((g.entries.get(1, 0) - Complex64::new(0.0, 1.0 / PI)).norm() < 1e-15);
        assert!(g.entries.get(0, 2).norm() < 1e-15);

        assert!(matches!(gram_matrix(&[1, 1], &half, TAU), Err(Error::DuplicateFrequency(1))));
    }

    #[test]
    fn concentration_examples() {
        let e = two_sliver_set(0.3).unwrap();
        let c = min_concentration(&[0], &e, 5.0).unwrap();
        assert_relative_eq!(c.lambda_min, 0.3, max_relative = 1e-12);

        let full = IntervalSet::full(2.0).unwrap();
        let c = min_concentration(&[-3, -1, 0, 4], &full, 2.0).unwrap();
        assert_relative_eq!(c.lambda_min, 1.0, max_relative = 1e-12);

        let half = IntervalSet::normalize(&[(0.0, PI)]).unwrap();
        let c = min_concentration(&[-1, 0, 1], &half, TAU).unwrap();
        // tridiagonal Toeplitz: 1/2 + (2/π) cos(kπ/4), k = 1, 2, 3
        let expected = [0.5 - 2f64.sqrt() / PI, 0.5, 0.5 + 2f64.sqrt() / PI];
        for (got, want) in c.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert!(c.residual <= 1e-10 * c.gram.entries.frobenius());

        let too_many: Vec<i64> = (0..(MAX_DENSE as i64 + 1)).collect();
        assert!(matches!(
            min_concentration(&too_many, &half, TAU),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn gram_invariants() {
        let e = IntervalSet::periodic(&[(0.1, 0.35), (0.6, 0.7), (1.4, 2.2)], 3.0).unwrap();
        let freqs: Vec<i64> = (-9..=9).collect();
        let c = min_concentration(&freqs, &e, 3.0).unwrap();
        assert!(c.gram.entries.hermitian_defect() <= 1e-14);
        let trace: f64 = c.eigenvalues.iter().sum();
        let expected = freqs.len() as f64 * e.measure() / 3.0;
        assert_relative_eq!(trace, expected, max_relative = 1e-10);
        for &lambda in &c.eigenvalues {
            assert!((-1e-12..=1.0 + 1e-12).contains(&lambda));
        }
        let bigger = e.union(&IntervalSet::periodic(&[(2.5, 2.9)], 3.0).unwrap()).unwrap();
        let c2 = min_concentration(&freqs, &bigger, 3.0).unwrap();
        assert!(c2.lambda_min >= c.lambda_min - 1e-12);
    }

    #[test]
    fn witness_rayleigh_quotient_matches_quadrature() {
        let e = IntervalSet::periodic(&[(0.0, 1.1), (2.0, 2.6)], 4.0).unwrap();
        let freqs: Vec<i64> = (-4..=4).collect();
        let c = min_concentration(&freqs, &e, 4.0).unwrap();
        let f = c.witness_poly().unwrap();
        let on_e = lp_norm(&f, &NormQuery::new(2.0, e).unwrap()).unwrap();
        let whole = lp_norm(&f, &NormQuery::new(2.0, IntervalSet::full(4.0).unwrap()).unwrap()).unwrap();
        assert_relative_eq!((on_e / whole).powi(2), c.lambda_min, max_relative = 1e-6);
    }

    #[test]
    fn sharpness_examples() {
        let k = BoundConstants::default();
        let full = IntervalSet::full(1.0).unwrap();
        let spec = BandSpec::centered(4.0 * PI).unwrap();
        let r = sharpness_gap(&spec, &full, 8.0, 1.0, &k).unwrap();
        assert_relative_eq!(r.exact, 1.0, max_relative = 1e-10);
        assert!(r.holds());

        // one lattice frequency: the constant γ_eff^{1/2}
        let e = two_sliver_set(0.4).unwrap();
        let narrow = BandSpec::centered(0.5).unwrap();
        let r = sharpness_gap(&narrow, &e, 4.0, 1.0, &k).unwrap();
        assert_eq!(r.n_freqs, 1);
        assert_relative_eq!(r.exact, 0.4f64.sqrt(), max_relative = 1e-12);
        assert!(r.log10_margin >= 0.0);

        // torus circumference that is not a multiple of the set period
        let e = two_sliver_set(0.2).unwrap();
        let r = sharpness_gap(&spec, &e, 16.0 * PI, 1.0, &k).unwrap();
        assert_eq!(r.n_freqs, 101);
        assert!(r.gamma > 0.0 && r.gamma <= 0.2 + 1e-12);
        assert!(r.holds());
    }

    fn arb_instance() -> impl Strategy<Value = (Vec<i64>, Vec<(f64, f64)>, Vec<(f64, f64)>)> {
        let freqs = proptest::collection::btree_set(-30i64..=30, 1..20).prop_map(|s| s.into_iter().collect());
        let pieces = || proptest::collection::vec((0.0f64..3.0, 0.01f64..0.8).prop_map(|(lo, w)| (lo, lo + w)), 1..4);
        (freqs, pieces(), pieces())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn spectrum_lies_in_unit_interval_with_exact_trace((freqs, e, _) in arb_instance()) {
            let set = IntervalSet::periodic(&e, 3.0).unwrap();
            let c = min_concentration(&freqs, &set, 3.0).unwrap();
            prop_assert!(c.gram.entries.hermitian_defect() <= 1e-14);
            for &lambda in &c.eigenvalues {
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&lambda));
            }
            let trace: f64 = c.eigenvalues.iter().sum();
            let expected = freqs.len() as f64 * set.measure() / 3.0;
            prop_assert!((trace - expected).abs() <= 1e-10 * expected.max(1.0));
        }

        #[test]
        fn enlarging_the_set_never_lowers_the_minimum((freqs, e, extra) in arb_instance()) {
            let set = IntervalSet::periodic(&e, 3.0).unwrap();
            let bigger = set.union(&IntervalSet::periodic(&extra, 3.0).unwrap()).unwrap();
            let small = min_concentration(&freqs, &set, 3.0).unwrap().lambda_min;
            let large = min_concentration(&freqs, &bigger, 3.0).unwrap().lambda_min;
            prop_assert!(large >= small - 1e-12);
        }
    }
}
