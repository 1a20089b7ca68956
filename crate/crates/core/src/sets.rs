//! Finite unions of intervals on the line or on a circle, and their thickness.
//!
//! A set `E` is *thick* at scale `a` with density `gamma` when every window of
//! length `a` meets `E` in measure at least `gamma * a`. For a periodic set the
//! window measure `t -> |E ∩ (t, t + a)|` is piecewise linear in `t` with kinks
//! only where `t` or `t + a` crosses an interval endpoint, so its minimum over
//! one period is attained at one of finitely many breakpoints and can be
//! computed exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaps narrower than this are closed when intervals are merged.
pub const MERGE_TOLERANCE: f64 = 1e-12;

/// A finite union of disjoint intervals, optionally repeated with a period.
///
/// Intervals are kept sorted, disjoint and non-degenerate. When `period` is
/// set, the intervals describe one fundamental cell `[0, period)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawIntervalSet", into = "RawIntervalSet")]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
    period: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawIntervalSet {
    period: Option<f64>,
    intervals: Vec<[f64; 2]>,
}

impl TryFrom<RawIntervalSet> for IntervalSet {
    type Error = Error;

    fn try_from(raw: RawIntervalSet) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = raw.intervals.iter().map(|iv| (iv[0], iv[1])).collect();
        match raw.period {
            Some(period) => IntervalSet::periodic(&pairs, period),
            None => IntervalSet::normalize(&pairs),
        }
    }
}

impl From<IntervalSet> for RawIntervalSet {
    fn from(set: IntervalSet) -> Self {
        RawIntervalSet {
            period: set.period,
            intervals: set.intervals.iter().map(|&(lo, hi)| [lo, hi]).collect(),
        }
    }
}

/// Result of a thickness computation: `gamma` is the exact minimum of
/// `|E ∩ (t, t + a)| / a` over all window positions `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThicknessCertificate {
    pub a: f64,
    pub gamma: f64,
    /// Left endpoint of a window attaining the minimum.
    pub argmin: f64,
}

fn validate(raw: &[(f64, f64)]) -> Result<()> {
    if raw.is_empty() {
        return Err(Error::EmptySet);
    }
    for &(lo, hi) in raw {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInterval { lo, hi });
        }
    }
    Ok(())
}

/// Sorts and coalesces overlapping or touching intervals.
fn merge(mut pieces: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pieces.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
    for (lo, hi) in pieces {
        match merged.last_mut() {
            Some(last) if lo <= last.1 + MERGE_TOLERANCE => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

fn overlap(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.1.min(b.1) - a.0.max(b.0)).max(0.0)
}

impl IntervalSet {
    /// Builds a non-periodic set from arbitrary intervals.
    pub fn normalize(raw: &[(f64, f64)]) -> Result<Self> {
        validate(raw)?;
        Ok(Self { intervals: merge(raw.to_vec()), period: None })
    }

    /// Builds a periodic set. Intervals may lie anywhere on the line; they are
    /// reduced modulo `period` into the cell `[0, period)`.
    pub fn periodic(raw: &[(f64, f64)], period: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidPeriod(period));
        }
        validate(raw)?;
        let mut pieces = Vec::with_capacity(raw.len() + 1);
        for &(lo, hi) in raw {
            if hi - lo >= period - MERGE_TOLERANCE {
                pieces.push((0.0, period));
                continue;
            }
            let start = lo.rem_euclid(period);
            let end = start + (hi - lo);
            if end <= period {
                pieces.push((start, end));
            } else {
                pieces.push((start, period));
                pieces.push((0.0, end - period));
            }
        }
        pieces.retain(|&(lo, hi)| hi - lo > 0.0);
        if pieces.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut intervals = merge(pieces);
        for iv in &mut intervals {
            iv.1 = iv.1.min(period);
        }
        Ok(Self { intervals, period: Some(period) })
    }

    /// The whole line, as a periodic set with the given period.
    pub fn full(period: f64) -> Result<Self> {
        Self::periodic(&[(0.0, period)], period)
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn is_periodic(&self) -> bool {
        self.period.is_some()
    }

    /// Measure of the set (of one cell when periodic).
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|&(lo, hi)| hi - lo).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        let x = match self.period {
            Some(period) => x.rem_euclid(period),
            None => x,
        };
        self.intervals.iter().any(|&(lo, hi)| lo <= x && x <= hi)
    }

    /// Exact Lebesgue measure of `E ∩ (lo, hi)`. Empty windows measure 0.
    pub fn measure_within(&self, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        let Some(period) = self.period else {
            return self.intervals.iter().map(|&iv| overlap(iv, (lo, hi))).sum();
        };
        let full_periods = ((hi - lo) / period).floor();
        let mut total = full_periods * self.measure();
        let lo = lo + full_periods * period;
        if hi > lo {
            let first = (lo / period).floor() as i64;
            let last = (hi / period).floor() as i64;
            for k in first..=last {
                let shift = k as f64 * period;
                total += self
                    .intervals
                    .iter()
                    .map(|&(a, b)| overlap((a + shift, b + shift), (lo, hi)))
                    .sum::<f64>();
            }
        }
        total.min(hi - lo + full_periods * period).max(0.0)
    }

    /// Exact thickness of a periodic set at window length `a`.
    pub fn thickness(&self, a: f64) -> Result<ThicknessCertificate> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidWindow(a));
        }
        let period = self.period.ok_or(Error::NeedsDomain)?;
        let mut candidates = vec![0.0];
        for &(lo, hi) in &self.intervals {
            for e in [lo, hi] {
                candidates.push(e.rem_euclid(period));
                candidates.push((e - a).rem_euclid(period));
            }
        }
        Ok(self.min_window(a, candidates))
    }

    /// Thickness of a set restricted to windows `(t, t + a)` lying inside
    /// `domain`. This is the only meaningful notion for a bounded set, whose
    /// thickness over the whole line is zero.
    pub fn thickness_over(&self, a: f64, domain: (f64, f64)) -> Result<ThicknessCertificate> {
        if !(a.is_finite() && a > 0.0) || domain.1 - domain.0 < a {
            return Err(Error::InvalidWindow(a));
        }
        let (first, last) = (domain.0, domain.1 - a);
        let mut candidates = vec![first, last];
        let mut push = |t: f64| {
            if t >= first && t <= last {
                candidates.push(t);
            }
        };
        match self.period {
            Some(period) => {
                let k0 = ((first - a) / period).floor() as i64 - 1;
                let k1 = (domain.1 / period).ceil() as i64 + 1;
                for k in k0..=k1 {
                    let shift = k as f64 * period;
                    for &(lo, hi) in &self.intervals {
                        for e in [lo + shift, hi + shift] {
                            push(e);
                            push(e - a);
                        }
                    }
                }
            }
            None => {
                for &(lo, hi) in &self.intervals {
                    for e in [lo, hi] {
                        push(e);
                        push(e - a);
                    }
                }
            }
        }
        Ok(self.min_window(a, candidates))
    }

    fn min_window(&self, a: f64, candidates: Vec<f64>) -> ThicknessCertificate {
        let mut best = ThicknessCertificate { a, gamma: f64::INFINITY, argmin: 0.0 };
        for t in candidates {
            let gamma = self.measure_within(t, t + a) / a;
            if gamma < best.gamma {
                best = ThicknessCertificate { a, gamma, argmin: t };
            }
        }
        best.gamma = best.gamma.clamp(0.0, 1.0);
        best
    }

    /// `E ∩ [lo, hi)` as a non-periodic interval list (periodic sets are
    /// unrolled). May be empty.
    pub fn restrict(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        let clip = |pieces: &mut Vec<(f64, f64)>, a: f64, b: f64| {
            let (l, h) = (a.max(lo), b.min(hi));
            if h > l {
                pieces.push((l, h));
            }
        };
        let mut pieces = Vec::new();
        match self.period {
            Some(period) => {
                let k0 = (lo / period).floor() as i64;
                let k1 = (hi / period).ceil() as i64;
                for k in k0..=k1 {
                    let shift = k as f64 * period;
                    for &(a, b) in &self.intervals {
                        clip(&mut pieces, a + shift, b + shift);
                    }
                }
            }
            None => {
                for &(a, b) in &self.intervals {
                    clip(&mut pieces, a, b);
                }
            }
        }
        merge(pieces)
    }

    /// The set viewed on a circle of circumference `torus`: the restriction to
    /// `[0, torus)`, made `torus`-periodic.
    pub fn on_torus(&self, torus: f64) -> Result<Self> {
        if !(torus.is_finite() && torus > 0.0) {
            return Err(Error::InvalidPeriod(torus));
        }
        let pieces = match self.period {
            None => {
                let (lo, hi) = (self.intervals[0].0, self.intervals[self.intervals.len() - 1].1);
                if lo < -MERGE_TOLERANCE || hi > torus + MERGE_TOLERANCE {
                    return Err(Error::IncompatiblePeriod { set: hi - lo, torus });
                }
                self.intervals.clone()
            }
            Some(_) => self.restrict(0.0, torus),
        };
        if pieces.is_empty() {
            return Err(Error::EmptySet);
        }
        Self::periodic(&pieces, torus)
    }

    /// Like [`IntervalSet::on_torus`], but insists that a periodic set tiles
    /// the torus exactly (the torus period is a multiple of the set period).
    pub fn tile_onto(&self, torus: f64) -> Result<Self> {
        if let Some(period) = self.period {
            let ratio = torus / period;
            if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
                return Err(Error::IncompatiblePeriod { set: period, torus });
            }
        }
        self.on_torus(torus)
    }

    /// Translates the set by `shift`.
    pub fn translate(&self, shift: f64) -> Result<Self> {
        let moved: Vec<_> = self.intervals.iter().map(|&(lo, hi)| (lo + shift, hi + shift)).collect();
        match self.period {
            Some(period) => Self::periodic(&moved, period),
            None => Self::normalize(&moved),
        }
    }

    /// Dilates the set (and its period) by `s > 0`.
    pub fn scale(&self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidArgument(format!("scale factor {s} must be positive")));
        }
        let scaled: Vec<_> = self.intervals.iter().map(|&(lo, hi)| (lo * s, hi * s)).collect();
        match self.period {
            Some(period) => Self::periodic(&scaled, period * s),
            None => Self::normalize(&scaled),
        }
    }

    /// Union with another set of the same kind (same period, or both
    /// non-periodic).
    pub fn union(&self, other: &Self) -> Result<Self> {
        let mut all = self.intervals.clone();
        all.extend_from_slice(&other.intervals);
        match (self.period, other.period) {
            (None, None) => Self::normalize(&all),
            (Some(p), Some(q)) if (p - q).abs() <= MERGE_TOLERANCE * p.max(1.0) => {
                Self::periodic(&all, p)
            }
            (p, q) => Err(Error::IncompatiblePeriod {
                set: p.unwrap_or(f64::NAN),
                torus: q.unwrap_or(f64::NAN),
            }),
        }
    }
}

/// The 1-periodic set made of two slivers of length `gamma / 2` hugging the
/// cell boundary: cell `[0, gamma/2) ∪ (1 - gamma/2, 1)`. Its thickness at
/// `a = 1` is `gamma`.
pub fn two_sliver_set(gamma: f64) -> Result<IntervalSet> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidGamma(gamma));
    }
    IntervalSet::periodic(&[(0.0, gamma / 2.0), (1.0 - gamma / 2.0, 1.0)], 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn normalize_merges_and_sorts() {
        let s = IntervalSet::normalize(&[(0.0, 1.0), (0.5, 2.0)]).unwrap();
        assert_eq!(s.intervals(), &[(0.0, 2.0)]);
        let s = IntervalSet::normalize(&[(3.0, 4.0), (0.0, 1.0)]).unwrap();
        assert_eq!(s.intervals(), &[(0.0, 1.0), (3.0, 4.0)]);
        let s = IntervalSet::normalize(&[(0.0, 1.0), (1.0, 2.0)]).unwrap();
        assert_eq!(s.intervals(), &[(0.0, 2.0)]);
    }

    #[test]
    fn normalize_rejects_bad_input() {
        assert!(matches!(IntervalSet::normalize(&[]), Err(Error::EmptySet)));
        assert!(matches!(
            IntervalSet::normalize(&[(1.0, 1.0)]),
            Err(Error::InvalidInterval { .. })
        ));
        assert!(matches!(
            IntervalSet::normalize(&[(2.0, 1.0)]),
            Err(Error::InvalidInterval { .. })
        ));
    }

    #[test]
    fn periodic_wraps_into_cell() {
        let s = IntervalSet::periodic(&[(0.9, 1.2)], 1.0).unwrap();
        assert_eq!(s.intervals().len(), 2);
        assert_abs_diff_eq!(s.intervals()[0].1, 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(s.intervals()[1].0, 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(s.measure(), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn periodic_window_measures() {
        let e = IntervalSet::periodic(&[(0.0, 0.3)], 1.0).unwrap();
        assert_abs_diff_eq!(e.measure_within(0.0, 1.0), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(e.measure_within(0.3, 0.8), 0.0, epsilon = 1e-15);
        // (0.1, 0.3) in cell 0 plus (1.0, 1.2) in cell 1.
        assert_abs_diff_eq!(e.measure_within(0.1, 1.2), 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(e.measure_within(-7.05, 3.95), 3.3, epsilon = 1e-12);
    }

    #[test]
    fn thickness_examples() {
        let e = IntervalSet::periodic(&[(0.0, 0.3)], 1.0).unwrap();
        assert_abs_diff_eq!(e.thickness(1.0).unwrap().gamma, 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(e.thickness(0.5).unwrap().gamma, 0.0, epsilon = 1e-14);
        let slivers = two_sliver_set(0.2).unwrap();
        assert_abs_diff_eq!(slivers.thickness(1.0).unwrap().gamma, 0.2, epsilon = 1e-14);
        assert!(matches!(e.thickness(0.0), Err(Error::InvalidWindow(_))));
        assert!(matches!(
            IntervalSet::normalize(&[(0.0, 1.0)]).unwrap().thickness(1.0),
            Err(Error::NeedsDomain)
        ));
    }

    #[test]
    fn two_sliver_examples() {
        assert_eq!(two_sliver_set(1.0).unwrap().intervals(), &[(0.0, 1.0)]);
        let s = two_sliver_set(0.2).unwrap();
        assert_eq!(s.intervals().len(), 2);
        assert_abs_diff_eq!(s.intervals()[0].1, 0.1, epsilon = 1e-15);
        assert_abs_diff_eq!(s.intervals()[1].0, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(
            two_sliver_set(0.5).unwrap().thickness(1.0).unwrap().gamma,
            0.5,
            epsilon = 1e-14
        );
        assert!(matches!(two_sliver_set(0.0), Err(Error::InvalidGamma(_))));
        assert!(matches!(two_sliver_set(1.5), Err(Error::InvalidGamma(_))));
    }

    #[test]
    fn bounded_set_thickness_over_domain() {
        let e = IntervalSet::normalize(&[(0.0, 0.5), (1.0, 1.5), (2.0, 2.5)]).unwrap();
        let cert = e.thickness_over(1.0, (0.0, 2.5)).unwrap();
        assert_abs_diff_eq!(cert.gamma, 0.5, epsilon = 1e-14);
        let cert = e.thickness_over(0.5, (0.0, 2.5)).unwrap();
        assert_abs_diff_eq!(cert.gamma, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn torus_views() {
        let e = two_sliver_set(0.2).unwrap();
        let t = e.tile_onto(4.0).unwrap();
        assert_abs_diff_eq!(t.measure(), 0.8, epsilon = 1e-12);
        assert_eq!(t.period(), Some(4.0));
        assert!(e.tile_onto(2.5).is_err());
        let r = e.on_torus(2.5).unwrap();
        assert_abs_diff_eq!(r.measure(), 0.2 + 0.2 + 0.1, epsilon = 1e-12);
    }

    #[test]
    fn translate_wraps() {
        let e = two_sliver_set(0.2).unwrap().translate(-0.5).unwrap();
        assert_eq!(e.intervals().len(), 1);
        assert_abs_diff_eq!(e.intervals()[0].0, 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(e.intervals()[0].1, 0.6, epsilon = 1e-12);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let e = two_sliver_set(0.2).unwrap();
        let text = serde_json::to_string(&e).unwrap();
        assert_eq!(text, r#"{"period":1.0,"intervals":[[0.0,0.1],[0.9,1.0]]}"#);
        let back: IntervalSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
        let bad = serde_json::from_str::<IntervalSet>(r#"{"period":null,"intervals":[[1,0]]}"#);
        assert!(bad.is_err());
    }

    fn arb_cell() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0.0f64..1.0, 0.01f64..0.4), 1..5)
            .prop_map(|v| v.into_iter().map(|(lo, len)| (lo, lo + len)).collect())
    }

    /// Brute-force oracle: dense scan of window positions.
    fn scanned_min(e: &IntervalSet, a: f64) -> f64 {
        let period = e.period().unwrap();
        (0..4000)
            .map(|i| {
                let t = period * i as f64 / 4000.0;
                e.measure_within(t, t + a) / a
            })
            .fold(f64::INFINITY, f64::min)
    }

    proptest! {
        #[test]
        fn thickness_matches_scan(cell in arb_cell(), a in 0.05f64..2.5) {
            let e = IntervalSet::periodic(&cell, 1.0).unwrap();
            let gamma = e.thickness(a).unwrap().gamma;
            let scanned = scanned_min(&e, a);
            prop_assert!(gamma <= scanned + 1e-12);
            // piecewise linear with slope at most 2/a between scan points
            prop_assert!(scanned - gamma <= 2.0 / a * (1.0 / 4000.0) + 1e-12);
        }

        #[test]
        fn thickness_monotone_under_inclusion(c1 in arb_cell(), c2 in arb_cell(), a in 0.05f64..2.0) {
            let e = IntervalSet::periodic(&c1, 1.0).unwrap();
            let f = e.union(&IntervalSet::periodic(&c2, 1.0).unwrap()).unwrap();
            prop_assert!(e.thickness(a).unwrap().gamma <= f.thickness(a).unwrap().gamma + 1e-12);
        }

        #[test]
        fn thickness_scale_covariant(cell in arb_cell(), a in 0.05f64..2.0, s in 0.1f64..10.0) {
            let e = IntervalSet::periodic(&cell, 1.0).unwrap();
            let g1 = e.thickness(a).unwrap().gamma;
            let g2 = e.scale(s).unwrap().thickness(a * s).unwrap().gamma;
            prop_assert!((g1 - g2).abs() <= 1e-9);
        }

        #[test]
        fn thickness_at_period_multiple_is_density(cell in arb_cell(), k in 1u32..5) {
            let e = IntervalSet::periodic(&cell, 1.0).unwrap();
            let gamma = e.thickness(k as f64).unwrap().gamma;
            prop_assert!((gamma - e.measure()).abs() <= 1e-12);
        }

        #[test]
        fn window_measure_additive_and_lipschitz(
            cell in arb_cell(), lo in -3.0f64..3.0, w1 in 0.0f64..2.0, w2 in 0.0f64..2.0, d in -0.5f64..0.5
        ) {
            let e = IntervalSet::periodic(&cell, 1.0).unwrap();
            let whole = e.measure_within(lo, lo + w1 + w2);
            let parts = e.measure_within(lo, lo + w1) + e.measure_within(lo + w1, lo + w1 + w2);
            prop_assert!((whole - parts).abs() <= 1e-12);
            prop_assert!(whole <= w1 + w2 + 1e-12);
            let moved = e.measure_within(lo + d, lo + w1 + w2);
            prop_assert!((moved - whole).abs() <= d.abs() + 1e-12);
        }
    }
}
