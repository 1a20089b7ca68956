//! Verification suites. Each suite turns a parameter grid into a list of
//! checks, one measured quantity against one bound.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{Suite, SuiteGrid};
use super::table::{Cell, ExperimentTable};
use crate::bandlimited::{lp_norm, random_bandlimited, BandSpec, Exponent, NormQuery, TrigPoly};
use crate::bounds::{remark1_bounds, theorem1_bound, BoundConstants, PowerBound};
use crate::concentration::sharpness_gap;
use crate::error::{Error, Result};
use crate::extremal::{exponent_fit, extremal_row, fitted_constant, ExtremalRow};
use crate::proofcheck::{
    band_component, band_component_norms, chebyshev_instance, classify_intervals, demodulate,
    exp_sum_verifier, good_mass_check, growth_bound, growth_envelope, local_estimate_check,
    minimal_constant, random_exp_sum, taylor_split, unit_partition, ClassifierParams, GoodMass,
    IntervalLabel,
};
use crate::sets::{two_sliver_set, IntervalSet};
use crate::stats::fit_line;

/// Slack on the good/bad mass fractions.
pub const MASS_TOLERANCE: f64 = 1e-4;
/// Relative floating-point slack on every comparison.
pub const ROUNDING: f64 = 1e-12;
/// Radius of the growth envelope around a good interval.
pub const GROWTH_RADIUS: f64 = 4.5;

const P1: Exponent = Exponent::Finite(1.0);
const P2: Exponent = Exponent::Finite(2.0);
const INF: Exponent = Exponent::Infinity;

/// Mixes a base seed with grid coordinates (splitmix64).
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut state = base;
    let mut mix = |x: u64| {
        state = state.wrapping_add(x).wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        state = z ^ (z >> 31);
    };
    for &p in parts {
        mix(p);
    }
    mix(0);
    state
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtLeast,
    AtMost,
    /// Reported, not asserted.
    Info,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
            Relation::Info => "info",
        }
    }
}

/// A value with its base-10 logarithm when it is a positive magnitude that
/// may underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub log10: Option<f64>,
}

impl Quantity {
    pub fn magnitude(value: f64) -> Self {
        Self { value, log10: Some(value.log10()) }
    }

    pub fn plain(value: f64) -> Self {
        Self { value, log10: None }
    }

    pub fn log(log10: f64) -> Self {
        Self { value: 10f64.powf(log10), log10: Some(log10) }
    }
}

impl From<PowerBound> for Quantity {
    fn from(b: PowerBound) -> Self {
        Self { value: b.value(), log10: Some(b.log10()) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub case: String,
    pub b: Option<f64>,
    pub gamma: Option<f64>,
    pub p: Option<Exponent>,
    pub seed: Option<u64>,
    pub measured: Quantity,
    pub bound: Option<Quantity>,
    pub relation: Relation,
}

impl Check {
    fn new(suite: Suite, case: impl Into<String>, measured: Quantity, relation: Relation, bound: Option<Quantity>) -> Self {
        Self { suite: suite.name(), case: case.into(), b: None, gamma: None, p: None, seed: None, measured, bound, relation }
    }

    fn at(mut self, b: Option<f64>, gamma: Option<f64>, p: Option<Exponent>, seed: Option<u64>) -> Self {
        self.b = b;
        self.gamma = gamma;
        self.p = p;
        self.seed = seed;
        self
    }

    /// `log10` of measured over bound, oriented so that it is nonnegative
    /// exactly when the check holds.
    pub fn log10_margin(&self) -> Option<f64> {
        let bound = self.bound?;
        let (m, b) = (self.measured.log10?, bound.log10?);
        match self.relation {
            Relation::AtLeast => Some(m - b),
            Relation::AtMost => Some(b - m),
            Relation::Info => None,
        }
    }

    pub fn holds(&self) -> Option<bool> {
        let bound = self.bound?;
        let ok = match (self.measured.log10, bound.log10) {
            (Some(m), Some(b)) if !m.is_nan() && !b.is_nan() => match self.relation {
                Relation::AtLeast => m >= b - ROUNDING,
                Relation::AtMost => m <= b + ROUNDING,
                Relation::Info => return None,
            },
            _ => match self.relation {
                Relation::AtLeast => self.measured.value >= bound.value - ROUNDING * bound.value.abs(),
                Relation::AtMost => self.measured.value <= bound.value + ROUNDING * bound.value.abs(),
                Relation::Info => return None,
            },
        };
        Some(ok)
    }

    pub fn describe(&self) -> String {
        let mut s = format!("{}/{}", self.suite, self.case);
        if let Some(b) = self.b {
            s += &format!(" b={b:.6}");
        }
        if let Some(g) = self.gamma {
            s += &format!(" gamma={g}");
        }
        if let Some(p) = self.p {
            s += &format!(" p={p}");
        }
        if let Some(seed) = self.seed {
            s += &format!(" seed={seed}");
        }
        let bound = self.bound.map_or("-".to_string(), |q| format!("{:e}", q.value));
        format!("{s}: measured {:e} {} bound {bound}", self.measured.value, self.relation.symbol())
    }
}

pub const CHECK_HEADER: [&str; 13] = [
    "suite",
    "case",
    "b",
    "gamma",
    "p",
    "seed",
    "measured",
    "bound",
    "log10_measured",
    "log10_bound",
    "log10_margin",
    "relation",
    "holds",
];

pub fn checks_table(checks: &[Check]) -> ExperimentTable {
    let mut table = ExperimentTable::new(&CHECK_HEADER);
    for c in checks {
        table.push(vec![
            c.suite.into(),
            c.case.clone().into(),
            c.b.into(),
            c.gamma.into(),
            c.p.into(),
            c.seed.into(),
            c.measured.value.into(),
            c.bound.map(|q| q.value).into(),
            c.measured.log10.into(),
            c.bound.and_then(|q| q.log10).into(),
            c.log10_margin().into(),
            c.relation.symbol().into(),
            c.holds().map_or(Cell::Empty, Cell::Bool),
        ]);
    }
    table
}

/// One line per failed check.
pub fn failures(checks: &[Check]) -> Vec<String> {
    checks.iter().filter(|c| c.holds() == Some(false)).map(Check::describe).collect()
}

fn flatten(parts: Vec<Vec<Check>>) -> Vec<Check> {
    parts.into_iter().flatten().collect()
}

/// `‖f‖_{L^p(E)} / ‖f‖_{L^p(torus)}`.
pub fn concentration_ratio(f: &TrigPoly, set: &IntervalSet, p: Exponent) -> Result<f64> {
    let whole = IntervalSet::full(f.period())?;
    let on_set = lp_norm(f, &NormQuery::with_exponent(p, set.clone()))?;
    let total = lp_norm(f, &NormQuery::with_exponent(p, whole))?;
    if !(total > 0.0) {
        return Err(Error::ZeroFunction);
    }
    Ok(on_set / total)
}

/// 1-periodic set of density `gamma` made of `pieces` intervals with random
/// lengths, gaps and offset.
pub fn random_periodic_set(gamma: f64, pieces: usize, seed: u64) -> Result<IntervalSet> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::InvalidGamma(gamma));
    }
    if gamma == 1.0 {
        return IntervalSet::full(1.0);
    }
    let pieces = pieces.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = |total: f64| -> Vec<f64> {
        let w: Vec<f64> = (0..pieces).map(|_| rng.gen_range(0.2..1.0)).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x * total / s).collect()
    };
    let on = weights(gamma);
    let off = weights(1.0 - gamma);
    let mut x = rng.gen_range(0.0..1.0);
    let mut raw = Vec::with_capacity(pieces);
    for (len, gap) in on.into_iter().zip(off) {
        raw.push((x, x + len));
        x += len + gap;
    }
    IntervalSet::periodic(&raw, 1.0)
}

fn default_or<T: Clone>(value: &Option<Vec<T>>, default: &[T]) -> Vec<T> {
    value.clone().unwrap_or_else(|| default.to_vec())
}

/// Runs one suite (not [`Suite::All`]).
pub fn run_suite(suite: Suite, grid: &SuiteGrid, k: &BoundConstants, seed: u64) -> Result<Vec<Check>> {
    match suite {
        Suite::Dominance => dominance(grid, k, seed),
        Suite::Sharpness => sharpness(grid, k),
        Suite::GoodBad => good_bad(grid, k, seed),
        Suite::ExpSum => exp_sum(grid, k, seed),
        Suite::Remark1 => remark1(grid, seed),
        Suite::Taylor => taylor(grid, seed),
        Suite::Extremal => extremal(grid, k),
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::EACH {
                all.extend(run_suite(s, grid, k, seed)?);
            }
            Ok(all)
        }
    }
}

/// Random functions on a torus against the one-band bound, with two-sliver
/// sets at window length 1.
pub fn dominance(grid: &SuiteGrid, k: &BoundConstants, seed: u64) -> Result<Vec<Check>> {
    let bs = default_or(&grid.b_list, &[4.0 * PI, 16.0 * PI, 40.0 * PI]);
    let ps = default_or(&grid.p_list, &[P1, P2, INF]);
    let gammas = default_or(&grid.gamma_list, &[0.1, 0.3, 0.7]);
    let reps = grid.seeds.unwrap_or(8);
    let period = grid.period.unwrap_or(8.0);
    let mut cells = Vec::new();
    for (bi, &b) in bs.iter().enumerate() {
        for (pi, &p) in ps.iter().enumerate() {
            for (gi, &g) in gammas.iter().enumerate() {
                for rep in 0..reps {
                    let s = derive_seed(seed, &[1, bi as u64, pi as u64, gi as u64, rep as u64]);
                    cells.push((b, p, g, s));
                }
            }
        }
    }
    let parts = cells
        .par_iter()
        .map(|&(b, p, g, s)| {
            let f = random_bandlimited(&BandSpec::centered(b)?, period, None, s)?;
            let set = two_sliver_set(g)?;
            let gamma = set.thickness(1.0)?.gamma;
            let ratio = concentration_ratio(&f, &set, p)?;
            let bound = theorem1_bound(gamma, b, p, k)?;
            Ok(vec![Check::new(Suite::Dominance, "theorem1", Quantity::magnitude(ratio), Relation::AtLeast, Some(bound.into()))
                .at(Some(b), Some(g), Some(p), Some(s))])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(flatten(parts))
}

/// Exact `p = 2` constants of two-sliver sets against the one-band bound.
pub fn sharpness(grid: &SuiteGrid, k: &BoundConstants) -> Result<Vec<Check>> {
    let bs = default_or(&grid.b_list, &[4.0 * PI, 16.0 * PI, 32.0 * PI]);
    let gammas = default_or(&grid.gamma_list, &[0.1, 0.3, 0.7]);
    let period = grid.period.unwrap_or(16.0);
    let cells: Vec<(f64, f64)> = bs.iter().flat_map(|&b| gammas.iter().map(move |&g| (b, g))).collect();
    let parts = cells
        .par_iter()
        .map(|&(b, g)| {
            let report = sharpness_gap(&BandSpec::centered(b)?, &two_sliver_set(g)?, period, 1.0, k)?;
            let case = format!("theorem1_p2_n{}", report.n_freqs);
            Ok(vec![Check::new(Suite::Sharpness, case, Quantity::log(report.log10_exact), Relation::AtLeast, Some(report.bound.into()))
                .at(Some(b), Some(g), Some(P2), None)])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(flatten(parts))
}

/// Classification of one random function, with the local estimate and the
/// growth envelope evaluated on its good intervals.
#[derive(Debug, Clone)]
pub struct ClassifiedFunction {
    pub labels: Vec<IntervalLabel>,
    pub mass: GoodMass,
    pub params: ClassifierParams,
    /// Per density: the good interval with the smallest margin, as
    /// `(lhs / local, factor)`.
    pub local: Vec<(f64, f64, PowerBound)>,
    /// Largest growth ratio over good intervals.
    pub growth: f64,
}

pub fn classify_function(
    f: &TrigPoly,
    b: f64,
    p: Exponent,
    gammas: &[f64],
    k: &BoundConstants,
) -> Result<ClassifiedFunction> {
    let params = ClassifierParams::new(p)?;
    let labels = classify_intervals(f, b, &unit_partition(f.period()), &params)?;
    let mass = good_mass_check(&labels)?;
    let good: Vec<(f64, f64)> = labels.iter().filter(|l| !l.bad).map(|l| (l.lo, l.hi)).collect();
    let mut local = Vec::with_capacity(gammas.len());
    for &g in gammas {
        let set = two_sliver_set(g)?;
        let mut worst: Option<(f64, f64, PowerBound)> = None;
        for &iv in &good {
            let est = local_estimate_check(f, &set, iv, b, p, k)?;
            let ratio = est.lhs / est.local;
            let margin = ratio.ln() - est.factor.ln();
            if worst.map_or(true, |(r, _, fac)| margin < r.ln() - fac.ln()) {
                worst = Some((ratio, g, est.factor));
            }
        }
        if let Some((ratio, g, factor)) = worst {
            local.push((g, ratio, factor));
        }
    }
    let mut growth = 0.0f64;
    for &iv in &good {
        growth = growth.max(growth_envelope(f, iv, GROWTH_RADIUS, p)?);
    }
    Ok(ClassifiedFunction { labels, mass, params, local, growth })
}

/// Good/bad interval mass fractions, local estimates and growth envelopes.
pub fn good_bad(grid: &SuiteGrid, k: &BoundConstants, seed: u64) -> Result<Vec<Check>> {
    let bs = default_or(&grid.b_list, &[4.0 * PI, 16.0 * PI]);
    let ps = default_or(&grid.p_list, &[P1, P2]);
    let gammas = default_or(&grid.gamma_list, &[0.1, 0.3, 0.7]);
    let reps = grid.seeds.unwrap_or(100);
    let period = grid.period.unwrap_or(8.0);
    let ps: Vec<Exponent> = ps.into_iter().filter(|p| p.is_finite()).collect();
    let mut cells = Vec::new();
    for (bi, &b) in bs.iter().enumerate() {
        for (pi, &p) in ps.iter().enumerate() {
            for rep in 0..reps {
                cells.push((b, p, derive_seed(seed, &[3, bi as u64, pi as u64, rep as u64])));
            }
        }
    }
    let parts = cells
        .par_iter()
        .map(|&(b, p, s)| {
            let f = random_bandlimited(&BandSpec::centered(b)?, period, None, s)?;
            let c = classify_function(&f, b, p, &gammas, k)?;
            let at = |check: Check, g: Option<f64>| check.at(Some(b), g, Some(p), Some(s));
            let mut out = vec![
                at(
                    Check::new(
                        Suite::GoodBad,
                        "bad_fraction",
                        Quantity::plain(c.mass.bad_fraction),
                        Relation::AtMost,
                        Some(Quantity::plain(c.params.bad_fraction_bound() + MASS_TOLERANCE)),
                    ),
                    None,
                ),
                at(
                    Check::new(
                        Suite::GoodBad,
                        "good_fraction",
                        Quantity::plain(c.mass.good_fraction),
                        Relation::AtLeast,
                        Some(Quantity::plain(0.5 - MASS_TOLERANCE)),
                    ),
                    None,
                ),
            ];
            for &(g, ratio, factor) in &c.local {
                out.push(at(
                    Check::new(Suite::GoodBad, "local_estimate", Quantity::magnitude(ratio), Relation::AtLeast, Some(factor.into())),
                    Some(g),
                ));
            }
            out.push(at(
                Check::new(
                    Suite::GoodBad,
                    "growth_envelope",
                    Quantity::magnitude(c.growth),
                    Relation::AtMost,
                    Some(Quantity::magnitude(growth_bound(b, GROWTH_RADIUS, p, 1.0))),
                ),
                None,
            ));
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(flatten(parts))
}

/// Densities `|E|/|I|` of the exponential-sum grid.
pub const RHO_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
/// Frequencies of random exponential sums lie in `[-LAMBDA_MAX, LAMBDA_MAX]`.
pub const LAMBDA_MAX: f64 = 10.0;

/// Worst `‖r‖_{L^p(I)}/‖r‖_{L^p(E)}` per density over a family of sums,
/// with `I = [0, 1]` and `E = [0, ρ]`.
fn worst_ratios(
    family: &[crate::proofcheck::ExpSum],
    p: Exponent,
    k: &BoundConstants,
) -> Result<Vec<(f64, f64, PowerBound, Option<PowerBound>)>> {
    RHO_GRID
        .iter()
        .map(|&rho| {
            let mut worst = 0.0f64;
            let mut bound = None;
            let mut remez = None;
            for r in family {
                let check = exp_sum_verifier(r, (0.0, 1.0), &[(0.0, rho)], p, k)?;
                worst = worst.max(check.ratio);
                bound = Some(check.bound);
                remez = check.remez;
            }
            Ok((rho, worst, bound.expect("nonempty family"), remez))
        })
        .collect()
}

/// Exponential sums with polynomial coefficients: per-density bound checks,
/// the regression slope of the worst ratio, and the polynomial Remez cell.
pub fn exp_sum(grid: &SuiteGrid, k: &BoundConstants, seed: u64) -> Result<Vec<Check>> {
    let ps = default_or(&grid.p_list, &[P1, P2, INF]);
    let reps = grid.seeds.unwrap_or(20);
    let mut cells = Vec::new();
    for &p in &ps {
        for n in 1..=3u32 {
            for m in 1..=3u32 {
                cells.push((p, n, m));
            }
        }
    }
    let mut parts = cells
        .par_iter()
        .map(|&(p, n, m)| {
            let family = (0..reps)
                .map(|rep| random_exp_sum(n, m, 0.0, LAMBDA_MAX, derive_seed(seed, &[5, n as u64, m as u64, rep as u64])))
                .collect::<Result<Vec<_>>>()?;
            let worst = worst_ratios(&family, p, k)?;
            let case = |name: &str| format!("{name}_n{n}_m{m}");
            let mut out: Vec<Check> = worst
                .iter()
                .map(|&(rho, ratio, bound, _)| {
                    Check::new(Suite::ExpSum, case("lemma3"), Quantity::magnitude(ratio), Relation::AtMost, Some(bound.into()))
                        .at(None, Some(rho), Some(p), None)
                })
                .collect();
            let xs: Vec<f64> = worst.iter().map(|w| (1.0 / w.0).ln()).collect();
            let ys: Vec<f64> = worst.iter().map(|w| w.1.ln()).collect();
            let fit = fit_line(&xs, &ys)?;
            let exponent = (n * m) as f64 - p.conjugate_fraction();
            out.push(
                Check::new(Suite::ExpSum, case("slope"), Quantity::plain(fit.slope), Relation::AtMost, Some(Quantity::plain(exponent + 0.1)))
                    .at(None, None, Some(p), None),
            );
            let samples: Vec<(f64, f64)> = worst.iter().map(|w| (1.0 / w.0, w.1)).collect();
            let c = minimal_constant(&samples, exponent).unwrap_or(f64::INFINITY);
            out.push(
                Check::new(Suite::ExpSum, case("minimal_constant"), Quantity::magnitude(c), Relation::Info, None)
                    .at(None, None, Some(p), None),
            );
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    // single polynomials (zero frequency) in the sup norm
    for degree in 1..=2u32 {
        let mut family = (0..reps)
            .map(|rep| random_exp_sum(1, degree + 1, 0.0, 0.0, derive_seed(seed, &[6, degree as u64, rep as u64])))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Vec::new();
        for &rho in &RHO_GRID {
            family.push(chebyshev_instance(degree as usize, (0.0, rho))?);
            let mut worst = 0.0f64;
            let mut remez = None;
            for r in &family {
                let check = exp_sum_verifier(r, (0.0, 1.0), &[(0.0, rho)], INF, k)?;
                if r.degree() == degree as usize {
                    worst = worst.max(check.ratio);
                    remez = check.remez;
                }
            }
            family.pop();
            let bound = remez.ok_or_else(|| Error::InvalidArgument("no polynomial instance".into()))?;
            out.push(
                Check::new(Suite::ExpSum, format!("remez_degree{degree}"), Quantity::magnitude(worst), Relation::AtMost, Some(bound.into()))
                    .at(None, Some(rho), Some(INF), None),
            );
        }
        parts.push(out);
    }
    Ok(flatten(parts))
}

/// The two elementary regimes: `ab <= 1` and nearly full sets.
pub fn remark1(grid: &SuiteGrid, seed: u64) -> Result<Vec<Check>> {
    let reps = grid.seeds.unwrap_or(8);
    let period = grid.period.unwrap_or(64.0);
    let small_bs = default_or(&grid.b_list, &[0.5, 1.0]);
    let small_gammas = default_or(&grid.gamma_list, &[0.1, 0.3, 0.7]);
    let small_ps = default_or(&grid.p_list, &[P1, P2, INF]);
    let full_bs = default_or(&grid.b_list, &[0.5, 1.0, 4.0 * PI]);
    let full_gammas = default_or(&grid.gamma_list, &[0.9, 0.95, 0.99]);
    let full_ps = default_or(&grid.p_list, &[P1, P2]);

    // (regime, b, gamma, p, random set?, rep)
    let mut cells = Vec::new();
    for (bi, &b) in small_bs.iter().enumerate().filter(|(_, &b)| b <= 1.0) {
        for (gi, &g) in small_gammas.iter().enumerate() {
            for (pi, &p) in small_ps.iter().enumerate() {
                for random_set in [false, true] {
                    for rep in 0..reps {
                        let s = derive_seed(seed, &[7, 0, bi as u64, gi as u64, pi as u64, random_set as u64, rep as u64]);
                        cells.push((0u8, b, g, p, random_set, s));
                    }
                }
            }
        }
    }
    for (bi, &b) in full_bs.iter().enumerate() {
        for (gi, &g) in full_gammas.iter().enumerate() {
            for (pi, &p) in full_ps.iter().enumerate() {
                let Exponent::Finite(pv) = p else { continue };
                if 1.0 - g > 1.0 / (2.0 + pv * b) {
                    continue;
                }
                for random_set in [false, true] {
                    for rep in 0..reps {
                        let s = derive_seed(seed, &[7, 1, bi as u64, gi as u64, pi as u64, random_set as u64, rep as u64]);
                        cells.push((1u8, b, g, p, random_set, s));
                    }
                }
            }
        }
    }
    let parts = cells
        .par_iter()
        .map(|&(regime, b, g, p, random_set, s)| {
            let set = if random_set { random_periodic_set(g, 3, s ^ 0x5EED)? } else { two_sliver_set(g)? };
            let gamma = set.thickness(1.0)?.gamma.min(1.0);
            let f = random_bandlimited(&BandSpec::centered(b)?, period, None, s)?;
            let ratio = concentration_ratio(&f, &set, p)?;
            let bounds = remark1_bounds(gamma, b, p)?;
            let kind = if random_set { "random_set" } else { "two_sliver" };
            let check = if regime == 0 {
                let Some(bound) = bounds.small_ab else { return Ok(vec![]) };
                Check::new(Suite::Remark1, format!("small_ab_{kind}"), Quantity::magnitude(ratio), Relation::AtLeast, Some(Quantity::magnitude(bound)))
            } else {
                if bounds.near_full.is_none() {
                    return Ok(vec![]);
                }
                let pv = p.value();
                Check::new(
                    Suite::Remark1,
                    format!("near_full_{kind}"),
                    Quantity::magnitude(ratio.powf(pv)),
                    Relation::AtLeast,
                    Some(Quantity::magnitude(0.5 - MASS_TOLERANCE)),
                )
            };
            Ok(vec![check.at(Some(b), Some(g), Some(p), Some(s))])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(flatten(parts))
}

/// Taylor splitting of two-band functions: reassembly, remainder bound and
/// band-component norms.
pub fn taylor(grid: &SuiteGrid, seed: u64) -> Result<Vec<Check>> {
    let reps = grid.seeds.unwrap_or(5);
    let period = 4.0;
    let spec = BandSpec::new(vec![-10.0 * PI, 10.0 * PI], 4.0 * PI)?;
    let parts = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let s = derive_seed(seed, &[8, rep as u64]);
            let f = random_bandlimited(&spec, period, None, s)?;
            let comps = (0..spec.count())
                .map(|k| demodulate(&band_component(&f, &spec, k), spec.centers()[k]))
                .collect::<Result<Vec<_>>>()?;
            let mut out = Vec::new();
            for order in [1u32, 2, 4, 8] {
                let split = taylor_split(&comps, spec.centers(), (1.0, 2.0), order)?;
                out.push(
                    Check::new(
                        Suite::Taylor,
                        format!("identity_m{order}"),
                        Quantity::magnitude(split.identity_defect(17)),
                        Relation::AtMost,
                        Some(Quantity::magnitude(1e-8)),
                    )
                    .at(Some(spec.width()), None, None, Some(s)),
                );
                for p in [P1, P2] {
                    let (lhs, rhs) = split.remainder_bound(p.value());
                    out.push(
                        Check::new(
                            Suite::Taylor,
                            format!("remainder_m{order}"),
                            Quantity::magnitude(lhs),
                            Relation::AtMost,
                            Some(Quantity::magnitude(rhs * (1.0 + 1e-9))),
                        )
                        .at(Some(spec.width()), None, Some(p), Some(s)),
                    );
                }
            }
            for (p, cap) in [(P1, 10.0), (P2, 1.0 + 1e-10)] {
                let norms = band_component_norms(&f, &spec, p)?;
                out.push(
                    Check::new(Suite::Taylor, "band_component", Quantity::magnitude(norms.max_ratio), Relation::AtMost, Some(Quantity::magnitude(cap)))
                        .at(Some(spec.width()), None, Some(p), Some(s)),
                );
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(flatten(parts))
}

/// Rows of the extremal grid in `(b, γ, p)` order.
pub fn extremal_rows(bs: &[f64], gammas: &[f64], ps: &[Exponent], k: &BoundConstants) -> Result<Vec<(Exponent, ExtremalRow)>> {
    let mut cells = Vec::new();
    for &b in bs {
        for &g in gammas {
            for &p in ps {
                cells.push((b, g, p));
            }
        }
    }
    cells.par_iter().map(|&(b, g, p)| Ok((p, extremal_row(b, g, p, k)?))).collect()
}

pub const EXTREMAL_SLOPE: f64 = 1.0 / (4.0 * PI);

/// The near-extremal family: one-band bound per cell, monotonicity in `b`,
/// and the slope-of-slopes regression.
pub fn extremal(grid: &SuiteGrid, k: &BoundConstants) -> Result<Vec<Check>> {
    let bs = default_or(&grid.b_list, &[40.0 * PI, 80.0 * PI, 160.0 * PI]);
    let gammas = default_or(&grid.gamma_list, &[0.1, 0.2, 0.4]);
    let ps = default_or(&grid.p_list, &[P2]);
    let rows = extremal_rows(&bs, &gammas, &ps, k)?;
    extremal_checks(&rows, &bs, &gammas, &ps)
}

pub fn extremal_checks(rows: &[(Exponent, ExtremalRow)], bs: &[f64], gammas: &[f64], ps: &[Exponent]) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (p, r) in rows {
        out.push(
            Check::new(Suite::Extremal, "theorem1", Quantity::magnitude(r.ratio), Relation::AtLeast, Some(r.theorem_bound.into()))
                .at(Some(r.b), Some(r.gamma), Some(*p), None),
        );
    }
    for &p in ps {
        let cell: Vec<ExtremalRow> = rows.iter().filter(|(q, _)| *q == p).map(|(_, r)| *r).collect();
        for &g in gammas.iter().filter(|&&g| g < 1.0) {
            let mut line: Vec<&ExtremalRow> = cell.iter().filter(|r| r.gamma == g).collect();
            line.sort_by(|x, y| x.b.total_cmp(&y.b));
            line.dedup_by(|x, y| x.b == y.b);
            for w in line.windows(2) {
                out.push(
                    Check::new(Suite::Extremal, "monotone_in_b", Quantity::magnitude(w[1].ratio), Relation::AtMost, Some(Quantity::magnitude(w[0].ratio)))
                        .at(Some(w[1].b), Some(g), Some(p), None),
                );
            }
        }
        if let Ok(fit) = exponent_fit(&cell) {
            let slope = Quantity::magnitude(fit.trend.slope);
            out.push(
                Check::new(Suite::Extremal, "slope_of_slopes_low", slope, Relation::AtLeast, Some(Quantity::magnitude(EXTREMAL_SLOPE / 4.0)))
                    .at(None, None, Some(p), None),
            );
            out.push(
                Check::new(Suite::Extremal, "slope_of_slopes_high", slope, Relation::AtMost, Some(Quantity::magnitude(EXTREMAL_SLOPE * 4.0)))
                    .at(None, None, Some(p), None),
            );
            out.push(
                Check::new(Suite::Extremal, "slope_r2", Quantity::plain(fit.trend.r2), Relation::AtLeast, Some(Quantity::plain(0.98)))
                    .at(None, None, Some(p), None),
            );
            let top = bs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if let Some(c) = fitted_constant(&cell, top) {
                out.push(
                    Check::new(Suite::Extremal, "fitted_constant_top_b", Quantity::magnitude(c), Relation::Info, None)
                        .at(Some(top), None, Some(p), None),
                );
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_distinct() {
        assert_eq!(derive_seed(1, &[2, 3]), derive_seed(1, &[2, 3]));
        assert_ne!(derive_seed(1, &[2, 3]), derive_seed(1, &[3, 2]));
        assert_ne!(derive_seed(1, &[2]), derive_seed(2, &[2]));
    }

    #[test]
    fn random_sets_have_requested_density() {
        for seed in 0..20 {
            let set = random_periodic_set(0.37, 3, seed).unwrap();
            assert!((set.measure() - 0.37).abs() < 1e-12);
            assert!((set.thickness(1.0).unwrap().gamma - 0.37).abs() < 1e-9);
        }
        assert_eq!(random_periodic_set(1.0, 3, 0).unwrap().measure(), 1.0);
    }

    #[test]
    fn check_orientation() {
        let lower = Check::new(Suite::Dominance, "x", Quantity::magnitude(0.5), Relation::AtLeast, Some(Quantity::log(-300.0)));
        assert_eq!(lower.holds(), Some(true));
        assert!(lower.log10_margin().unwrap() > 0.0);
        let upper = Check::new(Suite::ExpSum, "x", Quantity::plain(-0.2), Relation::AtMost, Some(Quantity::plain(-0.3)));
        assert_eq!(upper.holds(), Some(false));
        assert_eq!(failures(&[lower, upper]).len(), 1);
        let info = Check::new(Suite::ExpSum, "x", Quantity::plain(1.0), Relation::Info, None);
        assert_eq!(info.holds(), None);
    }

    #[test]
    fn small_suites_pass() {
        let k = BoundConstants::default();
        let grid = SuiteGrid { seeds: Some(2), ..SuiteGrid::default() };
        for suite in [Suite::Remark1, Suite::Taylor] {
            let checks = run_suite(suite, &grid, &k, 3).unwrap();
            assert!(!checks.is_empty());
            assert!(failures(&checks).is_empty(), "{:?}", failures(&checks));
        }
        let table = checks_table(&run_suite(Suite::Taylor, &grid, &k, 3).unwrap());
        assert_eq!(table.header().len(), CHECK_HEADER.len());
    }
}
