//! Band-limited functions modelled as trigonometric polynomials on a circle.
//!
//! A [`TrigPoly`] of period `L` is `f(x) = Σ c_j e^{i ν_j x}` with lattice
//! frequencies `ν_j = 2π m_j / L`. Its spectrum is exact and finite, its
//! derivatives are termwise, and `L^p` norms over interval sets are computed by
//! composite Gauss-Legendre quadrature with panels tied to the top frequency.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quadrature::{grid_sup, power_integral};
use crate::sets::{IntervalSet, MERGE_TOLERANCE};

/// Default oversampling: panels per shortest wavelength.
pub const DEFAULT_RESOLUTION: f64 = 8.0;

/// An `L^p` exponent, `1 <= p <= ∞`.
///
/// The conventions `1/∞ = 0` and `(∞ - 1)/∞ = 1` are used everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    /// `1/p`.
    pub fn recip(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinity => 0.0,
        }
    }

    /// `(p - 1)/p`.
    pub fn conjugate_fraction(self) -> f64 {
        1.0 - self.recip()
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Exponent::Finite(_))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinity),
            other => {
                let p: f64 = other
                    .parse()
                    .map_err(|_| Error::Config(format!("cannot parse exponent {s:?}")))?;
                Exponent::new(p)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => serializer.serialize_f64(*p),
            Exponent::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(p) => Exponent::new(p),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// `n` frequency bands `J_k = [λ_k - b/2, λ_k + b/2]` of common width `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    centers: Vec<f64>,
    width: f64,
}

impl BandSpec {
    pub fn new(centers: Vec<f64>, width: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::InvalidBand("at least one band is required".into()));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidBand(format!("width {width} must be positive")));
        }
        if centers.iter().any(|c| !c.is_finite()) || centers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBand("centers must be finite and strictly increasing".into()));
        }
        Ok(Self { centers, width })
    }

    /// The single band `[-b/2, b/2]`.
    pub fn centered(width: f64) -> Result<Self> {
        Self::new(vec![0.0], width)
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn count(&self) -> usize {
        self.centers.len()
    }

    pub fn band(&self, k: usize) -> (f64, f64) {
        let c = self.centers[k];
        (c - 0.5 * self.width, c + 0.5 * self.width)
    }

    /// Index of the first band containing frequency `nu`.
    pub fn band_of(&self, nu: f64) -> Option<usize> {
        (0..self.count()).find(|&k| self.band(k).contains_freq(nu))
    }

    pub fn contains(&self, nu: f64) -> bool {
        self.band_of(nu).is_some()
    }

    /// Separation `λ_{k+1} - λ_k >= 2b` between consecutive centers.
    pub fn is_separated(&self) -> bool {
        self.centers.windows(2).all(|w| w[1] - w[0] >= 2.0 * self.width * (1.0 - 1e-12))
    }

    /// First pair of overlapping bands, if any.
    pub fn first_overlap(&self) -> Option<(usize, usize)> {
        self.centers
            .windows(2)
            .position(|w| w[1] - w[0] < self.width * (1.0 - 1e-12))
            .map(|k| (k, k + 1))
    }

    /// Lattice indices `m` with `2πm/L` in band `k`.
    pub fn lattice_in_band(&self, k: usize, period: f64) -> Vec<i64> {
        let (lo, hi) = self.band(k);
        let scale = period / (2.0 * PI);
        let first = (lo * scale).floor() as i64 - 1;
        let last = (hi * scale).ceil() as i64 + 1;
        (first..=last).filter(|&m| self.band(k).contains_freq(frequency(m, period))).collect()
    }

    /// All lattice indices in the union of the bands, sorted and distinct.
    pub fn lattice(&self, period: f64) -> Vec<i64> {
        let mut all: Vec<i64> =
            (0..self.count()).flat_map(|k| self.lattice_in_band(k, period)).collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

trait ClosedBand {
    fn contains_freq(self, nu: f64) -> bool;
}

impl ClosedBand for (f64, f64) {
    fn contains_freq(self, nu: f64) -> bool {
        let slack = 1e-12 * self.0.abs().max(self.1.abs()).max(1.0);
        nu >= self.0 - slack && nu <= self.1 + slack
    }
}

/// Angular frequency of lattice index `m` on a circle of circumference `period`.
pub fn frequency(m: i64, period: f64) -> f64 {
    2.0 * PI * m as f64 / period
}

/// A trigonometric polynomial `Σ c_j e^{i 2π m_j x / L}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    period: f64,
    terms: Vec<(i64, Complex64)>,
}

#[derive(Serialize, Deserialize)]
struct RawTrigPoly {
    #[serde(rename = "L")]
    period: f64,
    terms: Vec<(i64, f64, f64)>,
}

impl Serialize for TrigPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawTrigPoly {
            period: self.period,
            terms: self.terms.iter().map(|&(m, c)| (m, c.re, c.im)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TrigPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawTrigPoly::deserialize(deserializer)?;
        let terms = raw.terms.into_iter().map(|(m, re, im)| (m, Complex64::new(re, im))).collect();
        TrigPoly::new(raw.period, terms).map_err(serde::de::Error::custom)
    }
}

impl TrigPoly {
    /// Terms are sorted by frequency; repeated indices are rejected.
    pub fn new(period: f64, mut terms: Vec<(i64, Complex64)>) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidPeriod(period));
        }
        terms.sort_by_key(|t| t.0);
        if let Some(w) = terms.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateFrequency(w[0].0));
        }
        Ok(Self { period, terms })
    }

    /// The constant function `c`.
    pub fn constant(period: f64, c: Complex64) -> Result<Self> {
        Self::new(period, vec![(0, c)])
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn terms(&self) -> &[(i64, Complex64)] {
        &self.terms
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        self.terms.iter().map(|&(m, _)| frequency(m, self.period))
    }

    /// Frequencies carrying a nonzero coefficient.
    pub fn spectrum(&self) -> Vec<f64> {
        self.terms
            .iter()
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .map(|&(m, _)| frequency(m, self.period))
            .collect()
    }

    /// Largest `|ν|` in the spectrum (0 for constants and the zero function).
    pub fn max_frequency(&self) -> f64 {
        self.spectrum().into_iter().map(f64::abs).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.norm() == 0.0)
    }

    pub fn in_band(&self, spec: &BandSpec) -> bool {
        self.spectrum().into_iter().all(|nu| spec.contains(nu))
    }

    /// Terms whose frequency satisfies `keep`.
    pub fn filter<F: Fn(f64) -> bool>(&self, keep: F) -> Self {
        let terms =
            self.terms.iter().copied().filter(|&(m, _)| keep(frequency(m, self.period))).collect();
        Self { period: self.period, terms }
    }

    /// Fills `out` with `c_j e^{i ν_j x}`, one entry per term.
    pub fn term_values(&self, x: f64, out: &mut Vec<Complex64>) {
        out.clear();
        let Some(&(first, _)) = self.terms.first() else {
            return;
        };
        let theta = 2.0 * PI * x / self.period;
        let last = self.terms[self.terms.len() - 1].0;
        let span = (last - first) as usize;
        if span <= 4 * self.terms.len() + 8 {
            // unit-step recurrence over the index range
            let step = Complex64::cis(theta);
            let mut w = Complex64::cis(theta * first as f64);
            let mut current = first;
            for &(m, c) in &self.terms {
                while current < m {
                    w *= step;
                    current += 1;
                }
                out.push(c * w);
            }
        } else {
            out.extend(self.terms.iter().map(|&(m, c)| c * Complex64::cis(theta * m as f64)));
        }
    }

    /// `f(x)`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let mut buf = Vec::with_capacity(self.terms.len());
        self.term_values(x, &mut buf);
        buf.iter().sum()
    }

    /// `f^{(order)}`, termwise: `c_j -> (i ν_j)^order c_j`.
    pub fn derivative(&self, order: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|&(m, c)| {
                let factor = Complex64::new(0.0, frequency(m, self.period)).powu(order);
                (m, c * factor)
            })
            .collect();
        Self { period: self.period, terms }
    }

    /// Panel width used for quadrature of `|f|^p` at the given oversampling.
    pub fn panel_width(&self, resolution: f64) -> f64 {
        panel_width_for(self.max_frequency(), resolution)
    }

    /// The whole circle `[0, L)` as an interval list.
    pub fn torus(&self) -> Vec<(f64, f64)> {
        vec![(0.0, self.period)]
    }

    /// `∫ |f|^p` over an interval list, finite `p`.
    pub fn power_integral(&self, pieces: &[(f64, f64)], p: f64, resolution: f64) -> f64 {
        let width = self.panel_width(resolution);
        power_integral(pieces, p, width, |x| self.eval(x).norm())
    }

    /// `‖f‖_{L^p}` over an interval list.
    pub fn norm_on(&self, pieces: &[(f64, f64)], p: Exponent, resolution: f64) -> Result<f64> {
        if pieces.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(match p {
            Exponent::Finite(p) => self.power_integral(pieces, p, resolution).powf(1.0 / p),
            Exponent::Infinity => {
                grid_sup(pieces, self.panel_width(resolution), |x| self.eval(x).norm()).1
            }
        })
    }

    /// Pointwise sum with another polynomial on the same circle.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if (self.period - other.period).abs() > MERGE_TOLERANCE * self.period {
            return Err(Error::IncompatiblePeriod { set: other.period, torus: self.period });
        }
        let mut terms = self.terms.clone();
        for &(m, c) in &other.terms {
            match terms.binary_search_by_key(&m, |t| t.0) {
                Ok(i) => terms[i].1 += c,
                Err(i) => terms.insert(i, (m, c)),
            }
        }
        Ok(Self { period: self.period, terms })
    }
}

impl Add for &TrigPoly {
    type Output = TrigPoly;

    /// Panics if the periods differ; use [`TrigPoly::try_add`] otherwise.
    fn add(self, other: &TrigPoly) -> TrigPoly {
        self.try_add(other).expect("adding trigonometric polynomials of different periods")
    }
}

impl Mul<Complex64> for &TrigPoly {
    type Output = TrigPoly;

    fn mul(self, s: Complex64) -> TrigPoly {
        TrigPoly {
            period: self.period,
            terms: self.terms.iter().map(|&(m, c)| (m, c * s)).collect(),
        }
    }
}

/// `min(1, 2π/ν_max) / resolution`.
pub fn panel_width_for(max_frequency: f64, resolution: f64) -> f64 {
    let wavelength = if max_frequency > 0.0 { 2.0 * PI / max_frequency } else { 1.0 };
    wavelength.min(1.0) / resolution
}

/// An `L^p(E)` norm request.
#[derive(Debug, Clone, PartialEq)]
pub struct NormQuery {
    pub p: Exponent,
    pub set: IntervalSet,
    pub resolution: f64,
}

impl NormQuery {
    pub fn new(p: f64, set: IntervalSet) -> Result<Self> {
        Ok(Self { p: Exponent::new(p)?, set, resolution: DEFAULT_RESOLUTION })
    }

    pub fn with_exponent(p: Exponent, set: IntervalSet) -> Self {
        Self { p, set, resolution: DEFAULT_RESOLUTION }
    }
}

/// The pieces of `set` to integrate over for a function of period `period`.
/// Periodic sets must tile the circle; bounded sets are used as given.
pub fn pieces_on_circle(set: &IntervalSet, period: f64) -> Result<Vec<(f64, f64)>> {
    let pieces = match set.period() {
        Some(_) => set.tile_onto(period)?.intervals().to_vec(),
        None => set.intervals().to_vec(),
    };
    if pieces.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(pieces)
}

/// `‖f‖_{L^p(E)}`.
pub fn lp_norm(f: &TrigPoly, q: &NormQuery) -> Result<f64> {
    let pieces = pieces_on_circle(&q.set, f.period())?;
    f.norm_on(&pieces, q.p, q.resolution)
}

/// Random polynomial with i.i.d. standard complex normal coefficients on the
/// lattice frequencies of `spec`. When `budget` is smaller than the lattice,
/// a uniformly random subset of that size is used.
pub fn random_bandlimited(
    spec: &BandSpec,
    period: f64,
    budget: Option<usize>,
    seed: u64,
) -> Result<TrigPoly> {
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidPeriod(period));
    }
    for k in 0..spec.count() {
        if spec.lattice_in_band(k, period).is_empty() {
            return Err(Error::EmptyBand { index: k });
        }
    }
    let mut lattice = spec.lattice(period);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if let Some(budget) = budget {
        if budget == 0 {
            return Err(Error::InvalidArgument("degree budget must be positive".into()));
        }
        if budget < lattice.len() {
            let mut chosen: Vec<i64> =
                sample(&mut rng, lattice.len(), budget).into_iter().map(|i| lattice[i]).collect();
            chosen.sort_unstable();
            lattice = chosen;
        }
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let terms = lattice
        .into_iter()
        .map(|m| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            (m, Complex64::new(re * scale, im * scale))
        })
        .collect();
    TrigPoly::new(period, terms)
}

/// `‖f'‖_p / ‖f‖_p` over the whole circle.
pub fn bernstein_ratio(f: &TrigPoly, p: Exponent) -> Result<f64> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let torus = f.torus();
    let base = f.norm_on(&torus, p, DEFAULT_RESOLUTION)?;
    let derived = f.derivative(1).norm_on(&torus, p, DEFAULT_RESOLUTION)?;
    Ok(derived / base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::two_sliver_set;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Parseval on the circle: ∫_0^L |f|^2 = L Σ |c_j|^2.
    fn parseval_l2(f: &TrigPoly) -> f64 {
        (f.period() * f.terms().iter().map(|(_, c)| c.norm_sqr()).sum::<f64>()).sqrt()
    }

    #[test]
    fn eval_examples() {
        let f = TrigPoly::constant(3.0, c(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(f.eval(17.3).re, 1.0, epsilon = 1e-15);
        let l = 2.0 * PI;
        let f = TrigPoly::new(l, vec![(1, c(1.0, 0.0))]).unwrap();
        let v = f.eval(PI);
        assert_abs_diff_eq!(v.re, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
        let f = TrigPoly::new(l, vec![(1, c(1.0, 0.0)), (-1, c(1.0, 0.0))]).unwrap();
        assert_abs_diff_eq!(f.eval(0.0).re, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn sparse_and_dense_evaluation_agree() {
        let sparse =
            TrigPoly::new(5.0, vec![(-400, c(0.3, 1.0)), (2, c(1.0, -0.5)), (700, c(2.0, 0.0))])
                .unwrap();
        for &x in &[0.0, 0.37, 1.9, 4.99] {
            let direct: Complex64 = sparse
                .terms()
                .iter()
                .map(|&(m, c)| c * Complex64::cis(frequency(m, 5.0) * x))
                .sum();
            assert_relative_eq!(sparse.eval(x).re, direct.re, epsilon = 1e-11);
            assert_relative_eq!(sparse.eval(x).im, direct.im, epsilon = 1e-11);
        }
    }

    #[test]
    fn derivative_examples() {
        let f = TrigPoly::new(2.0, vec![(3, c(1.0, 0.0))]).unwrap();
        let nu = frequency(3, 2.0);
        assert_eq!(f.derivative(0), f);
        let d1 = f.derivative(1);
        assert_abs_diff_eq!(d1.terms()[0].1.re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(d1.terms()[0].1.im, nu, max_relative = 1e-15);
        let d2 = f.derivative(2);
        assert_relative_eq!(d2.terms()[0].1.re, -nu * nu, max_relative = 1e-15);
    }

    #[test]
    fn rejects_duplicates() {
        let dup = TrigPoly::new(1.0, vec![(1, c(1.0, 0.0)), (1, c(2.0, 0.0))]);
        assert!(matches!(dup, Err(Error::DuplicateFrequency(1))));
    }

    #[test]
    fn norm_examples() {
        let e = IntervalSet::periodic(&[(0.0, 0.3)], 1.0).unwrap();
        let f = TrigPoly::new(1.0, vec![(4, Complex64::cis(0.7))]).unwrap();
        let q = NormQuery::new(2.0, e.clone()).unwrap();
        assert_relative_eq!(lp_norm(&f, &q).unwrap(), 0.3f64.sqrt(), max_relative = 1e-12);
        let q = NormQuery::with_exponent(Exponent::Infinity, e);
        assert_relative_eq!(lp_norm(&f, &q).unwrap(), 1.0, max_relative = 1e-12);

        let l = 2.0 * PI;
        let f = TrigPoly::new(l, vec![(0, c(1.0, 0.0)), (1, c(1.0, 0.0))]).unwrap();
        let q = NormQuery::new(2.0, IntervalSet::full(l).unwrap()).unwrap();
        assert_relative_eq!(lp_norm(&f, &q).unwrap(), 2.0 * PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn norm_errors() {
        assert!(matches!(NormQuery::new(0.5, two_sliver_set(0.2).unwrap()), Err(Error::InvalidExponent(_))));
        let f = TrigPoly::constant(2.5, c(1.0, 0.0)).unwrap();
        let q = NormQuery::new(2.0, two_sliver_set(0.2).unwrap()).unwrap();
        assert!(matches!(lp_norm(&f, &q), Err(Error::IncompatiblePeriod { .. })));
        assert!(matches!(f.norm_on(&[], Exponent::Infinity, 8.0), Err(Error::EmptySet)));
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::Finite(2.0));
        assert!("0.5".parse::<Exponent>().is_err());
        let p: Exponent = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(p.recip(), 0.0);
        assert_eq!(p.conjugate_fraction(), 1.0);
        let p: Exponent = serde_json::from_str("4").unwrap();
        assert_eq!(p.conjugate_fraction(), 0.75);
    }

    #[test]
    fn random_generator_contract() {
        let l = 8.0;
        // b < 2π/L: only the zero frequency
        let narrow = BandSpec::centered(0.5).unwrap();
        let f = random_bandlimited(&narrow, l, None, 1).unwrap();
        assert_eq!(f.terms().len(), 1);
        assert_eq!(f.terms()[0].0, 0);

        let spec = BandSpec::centered(4.0 * PI).unwrap();
        let a = random_bandlimited(&spec, l, None, 42).unwrap();
        let b = random_bandlimited(&spec, l, None, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.terms().len(), 17);
        assert!(a.in_band(&spec));

        let budgeted = random_bandlimited(&spec, l, Some(5), 3).unwrap();
        assert_eq!(budgeted.terms().len(), 5);
        assert!(budgeted.in_band(&spec));

        let gap = BandSpec::new(vec![0.0, 0.3], 0.1).unwrap();
        assert!(matches!(random_bandlimited(&gap, l, None, 0), Err(Error::EmptyBand { index: 1 })));
    }

    #[test]
    fn bernstein_examples() {
        let f = TrigPoly::new(4.0, vec![(3, c(0.0, 2.0))]).unwrap();
        assert_relative_eq!(
            bernstein_ratio(&f, Exponent::Finite(2.0)).unwrap(),
            frequency(3, 4.0),
            max_relative = 1e-12
        );
        let f = TrigPoly::constant(4.0, c(1.0, 1.0)).unwrap();
        assert_eq!(bernstein_ratio(&f, Exponent::Finite(1.0)).unwrap(), 0.0);
        let zero = TrigPoly::constant(4.0, c(0.0, 0.0)).unwrap();
        assert!(matches!(bernstein_ratio(&zero, Exponent::Finite(1.0)), Err(Error::ZeroFunction)));
    }

    #[test]
    fn bernstein_p2_matches_parseval_oracle() {
        let b = 6.0 * PI;
        let spec = BandSpec::centered(b).unwrap();
        for seed in 0..10 {
            let f = random_bandlimited(&spec, 6.0, None, seed).unwrap();
            let num: f64 = f
                .terms()
                .iter()
                .map(|&(m, c)| (frequency(m, 6.0) * c.norm()).powi(2))
                .sum();
            let den: f64 = f.terms().iter().map(|(_, c)| c.norm_sqr()).sum();
            let oracle = (num / den).sqrt();
            let ratio = bernstein_ratio(&f, Exponent::Finite(2.0)).unwrap();
            assert_relative_eq!(ratio, oracle, max_relative = 1e-9);
            assert!(ratio <= b / 2.0 + 1e-9);
        }
    }

    #[test]
    fn json_format() {
        let f = TrigPoly::new(2.0, vec![(-1, c(0.5, -1.0)), (2, c(1.0, 0.0))]).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"L":2.0,"terms":[[-1,0.5,-1.0],[2,1.0,0.0]]}"#);
        let back: TrigPoly = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<TrigPoly>(r#"{"L":1,"terms":[[1,0,0],[1,1,0]]}"#).is_err());
    }

    fn arb_poly() -> impl Strategy<Value = TrigPoly> {
        (1.0f64..6.0, prop::collection::btree_map(-12i64..12, (-1.0f64..1.0, -1.0f64..1.0), 1..8))
            .prop_map(|(l, terms)| {
                TrigPoly::new(l, terms.into_iter().map(|(m, (re, im))| (m, c(re, im))).collect())
                    .unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn parseval(f in arb_poly()) {
            let l2 = f.norm_on(&f.torus(), Exponent::Finite(2.0), DEFAULT_RESOLUTION).unwrap();
            let oracle = parseval_l2(&f);
            prop_assert!((l2 - oracle).abs() <= 1e-8 * oracle.max(1e-300));
        }

        #[test]
        fn additive_and_monotone_in_the_set(f in arb_poly(), cut in 0.05f64..0.95, p in 1.0f64..4.0) {
            let l = f.period();
            let x = cut * l;
            let left = f.power_integral(&[(0.0, x)], p, DEFAULT_RESOLUTION);
            let right = f.power_integral(&[(x, l)], p, DEFAULT_RESOLUTION);
            let whole = f.power_integral(&[(0.0, x), (x, l)], p, DEFAULT_RESOLUTION);
            prop_assert!((left + right - whole).abs() <= 1e-12 * whole.max(1e-300));
            prop_assert!(left <= whole * (1.0 + 1e-12));
        }

        #[test]
        fn bernstein_bound(f in arb_poly(), pi in 0usize..4) {
            let p = [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Finite(4.0), Exponent::Infinity][pi];
            let ratio = bernstein_ratio(&f, p).unwrap();
            prop_assert!(ratio <= f.max_frequency() * (1.0 + 1e-7) + 1e-9);
        }

        #[test]
        fn derivative_is_linear(f in arb_poly(), g in arb_poly(), order in 0u32..5, re in -2.0f64..2.0) {
            let g = TrigPoly::new(f.period(), g.terms().to_vec()).unwrap();
            let s = c(re, 0.5);
            let lhs = (&(&f * s) + &g).derivative(order);
            let rhs = &(&f.derivative(order) * s) + &g.derivative(order);
            for (&(m1, c1), &(m2, c2)) in lhs.terms().iter().zip(rhs.terms()) {
                prop_assert_eq!(m1, m2);
                prop_assert!((c1 - c2).norm() <= 1e-9 * (1.0 + c1.norm()));
            }
        }
    }
}
