//! Command dispatch.

use std::f64::consts::PI;

use super::config::{
    grid, grid_or, reals, BoundConfig, BoundKind, ClassifyConfig, Command, ConcentrationConfig, ExperimentConfig,
    ExtremalConfig, ThicknessConfig, VerifyConfig,
};
use super::suites::{self, checks_table, derive_seed, extremal_checks, extremal_rows, failures};
use super::table::{Cell, ExperimentTable};
use crate::bandlimited::{random_bandlimited, BandSpec, Exponent};
use crate::bounds::{
    lemma1_corollary_bound, lemma3_bound, multidim_bound, nazarov_remez_bounds, remark1_bounds, theorem1_bound,
    theorem2_bound, theorem2prime_bound, BoundConstants, MultiDimParams, PowerBound,
};
use crate::concentration::{resolved_min_concentration, sharpness_gap};
use crate::error::{Error, Result};
use crate::extremal::fitted_constant;
use crate::proofcheck::{
    classify_intervals, good_mass_check, local_estimate_check, unit_partition, ClassifierParams,
};
use crate::sets::two_sliver_set;

/// A finished run: the table, plus one line per violated contract.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub table: ExperimentTable,
    pub failures: Vec<String>,
}

impl RunOutcome {
    fn clean(table: ExperimentTable) -> Self {
        Self { table, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.constants.validate()?;
    let k = &config.constants;
    match &config.command {
        Command::Bound(c) => bound(c, k).map(RunOutcome::clean),
        Command::Thickness(c) => thickness(c).map(RunOutcome::clean),
        Command::Concentration(c) => concentration(c, k),
        Command::Verify(c) => verify(c, k, config.seed),
        Command::Extremal(c) => extremal(c, k),
        Command::Classify(c) => classify(c, k, config.seed),
    }
}

const BOUND_HEADER: [&str; 14] = [
    "bound", "gamma", "ab", "p", "n", "m", "len_i", "meas_e", "growth", "d", "base", "exponent", "value",
    "log10_value",
];

#[derive(Default, Clone, Copy)]
struct BoundRow {
    gamma: Option<f64>,
    ab: Option<f64>,
    p: Option<Exponent>,
    n: Option<u32>,
    m: Option<u32>,
    len_i: Option<f64>,
    meas_e: Option<f64>,
    growth: Option<f64>,
    d: Option<usize>,
}

impl BoundRow {
    fn cells(self, name: &str, base: Option<f64>, exponent: Option<f64>, value: f64, log10: f64) -> Vec<Cell> {
        vec![
            name.into(),
            self.gamma.into(),
            self.ab.into(),
            self.p.into(),
            self.n.into(),
            self.m.into(),
            self.len_i.into(),
            self.meas_e.into(),
            self.growth.into(),
            self.d.into(),
            base.into(),
            exponent.into(),
            value.into(),
            log10.into(),
        ]
    }

    fn power(self, name: &str, b: PowerBound) -> Vec<Cell> {
        self.cells(name, Some(b.base), Some(b.exponent), b.value(), b.log10())
    }
}

/// Every requested evaluator over the cartesian product of the grids it
/// uses, in the order the kinds were listed.
fn bound(c: &BoundConfig, k: &BoundConstants) -> Result<ExperimentTable> {
    let kinds = grid_or(&c.bound, "bound", vec![BoundKind::Theorem1])?;
    let mut table = ExperimentTable::new(&BOUND_HEADER);
    let gammas = || grid(&c.gamma, "gamma");
    let abs = || grid(&c.ab, "ab").map(reals);
    let ps = || grid(&c.p, "p");
    let ns = || grid(&c.n, "n");
    let lens = || grid(&c.len_i, "len_i");
    let meas = || grid(&c.meas_e, "meas_e");
    for kind in kinds {
        let name = kind.to_string();
        match kind {
            BoundKind::Theorem1 | BoundKind::Theorem2 | BoundKind::Theorem2prime | BoundKind::Remark1 => {
                let ns = if kind == BoundKind::Theorem1 || kind == BoundKind::Remark1 { vec![1] } else { ns()? };
                for &gamma in &gammas()? {
                    for &ab in &abs()? {
                        for &p in &ps()? {
                            for &n in &ns {
                                let row = BoundRow {
                                    gamma: Some(gamma),
                                    ab: Some(ab),
                                    p: Some(p),
                                    n: (kind == BoundKind::Theorem2 || kind == BoundKind::Theorem2prime).then_some(n),
                                    ..BoundRow::default()
                                };
                                match kind {
                                    BoundKind::Theorem1 => table.push(row.power(&name, theorem1_bound(gamma, ab, p, k)?)),
                                    BoundKind::Theorem2 => table.push(row.power(&name, theorem2_bound(gamma, n, ab, p, k)?)),
                                    BoundKind::Theorem2prime => {
                                        table.push(row.power(&name, theorem2prime_bound(gamma, n, ab, p, k)?))
                                    }
                                    _ => {
                                        let r = remark1_bounds(gamma, ab, p)?;
                                        for (label, v) in [("remark1_small_ab", r.small_ab), ("remark1_near_full", r.near_full)] {
                                            if let Some(v) = v {
                                                table.push(row.cells(label, None, None, v, v.log10()));
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            BoundKind::Lemma1 => {
                let ps: Vec<Option<Exponent>> = match &c.p {
                    Some(_) => ps()?.into_iter().map(Some).collect(),
                    None => vec![None],
                };
                for &meas_e in &meas()? {
                    for &growth in &grid(&c.growth, "growth")? {
                        for &p in &ps {
                            let row = BoundRow { meas_e: Some(meas_e), growth: Some(growth), p, ..BoundRow::default() };
                            table.push(row.power(&name, lemma1_corollary_bound(meas_e, growth, p, k)?));
                        }
                    }
                }
            }
            BoundKind::Lemma3 => {
                for &len_i in &lens()? {
                    for &meas_e in &meas()? {
                        for &n in &ns()? {
                            for &m in &grid(&c.m, "m")? {
                                for &p in &ps()? {
                                    let row = BoundRow {
                                        len_i: Some(len_i),
                                        meas_e: Some(meas_e),
                                        n: Some(n),
                                        m: Some(m),
                                        p: Some(p),
                                        ..BoundRow::default()
                                    };
                                    table.push(row.power(&name, lemma3_bound(len_i, meas_e, n, m, p, k)?));
                                }
                            }
                        }
                    }
                }
            }
            BoundKind::Nazarov | BoundKind::Remez => {
                for &len_i in &lens()? {
                    for &meas_e in &meas()? {
                        for &n in &ns()? {
                            let row = BoundRow { len_i: Some(len_i), meas_e: Some(meas_e), n: Some(n), ..BoundRow::default() };
                            let (nazarov, remez) = nazarov_remez_bounds(len_i, meas_e, n, k)?;
                            table.push(row.power(&name, if kind == BoundKind::Nazarov { nazarov } else { remez }));
                        }
                    }
                }
            }
            BoundKind::Theorem3 | BoundKind::Theorem4 => {
                let products = c
                    .ab_products
                    .clone()
                    .filter(|v| !v.is_empty())
                    .ok_or_else(|| Error::Config("`ab_products` is required for the d-dimensional bounds".into()))?;
                let ns: Vec<Option<u32>> =
                    if kind == BoundKind::Theorem3 { vec![None] } else { ns()?.into_iter().map(Some).collect() };
                for &gamma in &gammas()? {
                    for ab in &products {
                        let params = MultiDimParams::new(ab.clone())?;
                        for &p in &ps()? {
                            for &n in &ns {
                                let row = BoundRow {
                                    gamma: Some(gamma),
                                    ab: Some(params.total()),
                                    p: Some(p),
                                    n,
                                    d: Some(params.dimension()),
                                    ..BoundRow::default()
                                };
                                table.push(row.power(&name, multidim_bound(gamma, &params, p, n, k)?));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(table)
}

fn thickness(c: &ThicknessConfig) -> Result<ExperimentTable> {
    let set = c.set.build()?;
    let mut table = ExperimentTable::new(&["a", "gamma", "argmin"]);
    let windows = reals(c.a.to_vec());
    if windows.is_empty() {
        return Err(Error::Config("`a` must not be empty".into()));
    }
    for a in windows {
        let cert = match c.domain {
            Some(domain) => set.thickness_over(a, domain)?,
            None => set.thickness(a)?,
        };
        table.push(vec![cert.a.into(), cert.gamma.into(), cert.argmin.into()]);
    }
    Ok(table)
}

const CONCENTRATION_HEADER: [&str; 11] = [
    "gamma",
    "b",
    "N",
    "lambda_min",
    "bound",
    "margin",
    "log10_lambda_min",
    "log10_bound",
    "log10_margin",
    "bits",
    "holds",
];

/// Explicit spectrum and set, or a `(γ, b)` grid of two-sliver sets against
/// the one-band (or `n`-band) bound.
fn concentration(c: &ConcentrationConfig, k: &BoundConstants) -> Result<RunOutcome> {
    let mut table = ExperimentTable::new(&CONCENTRATION_HEADER);
    if let Some(freqs) = &c.freqs {
        let set = c.set.as_ref().ok_or_else(|| Error::Config("`E` is required with `freqs`".into()))?.build()?;
        let period = c.period.map_or(2.0 * PI, |r| r.0);
        let r = resolved_min_concentration(freqs, &set, period)?;
        table.push(vec![
            Cell::Empty,
            Cell::Empty,
            freqs.len().into(),
            r.lambda_min.into(),
            Cell::Empty,
            Cell::Empty,
            r.log10_lambda_min.into(),
            Cell::Empty,
            Cell::Empty,
            r.bits.into(),
            Cell::Empty,
        ]);
        return Ok(RunOutcome::clean(table));
    }
    let gammas = grid(&c.gamma, "gamma")?;
    let bs = reals(grid(&c.b, "b")?);
    let period = c.period.map_or(16.0, |r| r.0);
    let a = c.a.unwrap_or(1.0);
    let centers = c.centers.clone().map(reals);
    let mut failed = Vec::new();
    for &gamma in &gammas {
        for &b in &bs {
            let spec = match &centers {
                Some(cs) => BandSpec::new(cs.clone(), b)?,
                None => BandSpec::centered(b)?,
            };
            let set = match &c.set {
                Some(s) => s.build()?,
                None => two_sliver_set(gamma)?,
            };
            let r = sharpness_gap(&spec, &set, period, a, k)?;
            if !r.holds() {
                failed.push(format!(
                    "concentration gamma={gamma} b={b:.6}: log10 sqrt(lambda_min) {} < log10 bound {}",
                    r.log10_exact,
                    r.bound.log10()
                ));
            }
            table.push(vec![
                r.gamma.into(),
                b.into(),
                r.n_freqs.into(),
                r.lambda_min.into(),
                r.bound.value().into(),
                r.margin().into(),
                (2.0 * r.log10_exact).into(),
                r.bound.log10().into(),
                r.log10_margin.into(),
                r.bits.into(),
                r.holds().into(),
            ]);
        }
    }
    Ok(RunOutcome { table, failures: failed })
}

fn verify(c: &VerifyConfig, k: &BoundConstants, seed: u64) -> Result<RunOutcome> {
    let grid = c.grid()?;
    let mut checks = Vec::new();
    for suite in c.suites()? {
        checks.extend(suites::run_suite(suite, &grid, k, seed)?);
    }
    Ok(RunOutcome { table: checks_table(&checks), failures: failures(&checks) })
}

const EXTREMAL_HEADER: [&str; 13] = [
    "b",
    "gamma",
    "p",
    "ratio",
    "theorem_bound",
    "example_bound",
    "margin",
    "m",
    "log10_ratio",
    "log10_theorem_bound",
    "log10_example_bound",
    "fitted_c",
    "holds",
];

fn extremal(c: &ExtremalConfig, k: &BoundConstants) -> Result<RunOutcome> {
    let bs = reals(c.b.to_vec());
    let gammas = c.gamma.to_vec();
    let ps = grid_or(&c.p, "p", vec![Exponent::Finite(2.0)])?;
    if bs.is_empty() || gammas.is_empty() {
        return Err(Error::Config("`b` and `gamma` must not be empty".into()));
    }
    let rows = extremal_rows(&bs, &gammas, &ps, k)?;
    let top = bs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut table = ExperimentTable::new(&EXTREMAL_HEADER);
    for (p, r) in &rows {
        let same_p: Vec<_> = rows.iter().filter(|(q, _)| q == p).map(|(_, r)| *r).collect();
        let c_fit = fitted_constant(&same_p, top).filter(|c| c.is_finite());
        let example = c_fit.map(|c| PowerBound::new(r.gamma / c, r.example_exponent()));
        table.push(vec![
            r.b.into(),
            r.gamma.into(),
            (*p).into(),
            r.ratio.into(),
            r.theorem_bound.value().into(),
            example.map(|e| e.value()).into(),
            r.log10_margin().into(),
            r.m.into(),
            r.ratio.log10().into(),
            r.theorem_bound.log10().into(),
            example.map(|e| e.log10()).into(),
            c_fit.into(),
            (r.log10_margin() >= 0.0).into(),
        ]);
    }
    let checks = extremal_checks(&rows, &bs, &gammas, &ps)?;
    Ok(RunOutcome { table, failures: failures(&checks) })
}

const CLASSIFY_HEADER: [&str; 12] = [
    "seed",
    "lo",
    "hi",
    "bad",
    "alpha",
    "mass",
    "gamma",
    "local_ratio",
    "local_factor",
    "log10_local_ratio",
    "log10_local_factor",
    "local_holds",
];

/// Good/bad labels of unit intervals for random functions, with the local
/// estimate on each good interval.
fn classify(c: &ClassifyConfig, k: &BoundConstants, seed: u64) -> Result<RunOutcome> {
    let b = c.b.0;
    let p = c.p;
    let period = c.period.map_or(8.0, |r| r.0);
    let gamma = c.gamma.unwrap_or(0.3);
    let reps = c.seeds.unwrap_or(1);
    if reps == 0 {
        return Err(Error::Config("`seeds` must be positive".into()));
    }
    let params = ClassifierParams::new(p)?;
    let set = two_sliver_set(gamma)?;
    let mut table = ExperimentTable::new(&CLASSIFY_HEADER);
    let mut failed = Vec::new();
    for rep in 0..reps {
        let s = derive_seed(seed, &[9, rep as u64]);
        let f = random_bandlimited(&BandSpec::centered(b)?, period, None, s)?;
        let labels = classify_intervals(&f, b, &unit_partition(period), &params)?;
        let mass = good_mass_check(&labels)?;
        if mass.bad_fraction > params.bad_fraction_bound() + suites::MASS_TOLERANCE {
            failed.push(format!("classify seed={s}: bad fraction {} exceeds {}", mass.bad_fraction, params.bad_fraction_bound()));
        }
        if mass.good_fraction < 0.5 - suites::MASS_TOLERANCE {
            failed.push(format!("classify seed={s}: good fraction {} below 1/2", mass.good_fraction));
        }
        for l in &labels {
            let mut row: Vec<Cell> =
                vec![s.into(), l.lo.into(), l.hi.into(), l.bad.into(), l.alpha.into(), l.mass.into()];
            if l.bad {
                row.extend(std::iter::repeat(Cell::Empty).take(6));
            } else {
                let est = local_estimate_check(&f, &set, (l.lo, l.hi), b, p, k)?;
                let ratio = est.lhs / est.local;
                if !est.holds {
                    failed.push(format!("classify seed={s} interval [{}, {}]: local estimate fails", l.lo, l.hi));
                }
                row.extend([
                    est.gamma.into(),
                    ratio.into(),
                    est.factor.value().into(),
                    ratio.log10().into(),
                    est.factor.log10().into(),
                    est.holds.into(),
                ]);
            }
            table.push(row);
        }
    }
    Ok(RunOutcome { table, failures: failed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_json(text: &str) -> Result<RunOutcome> {
        run(&ExperimentConfig::from_json(text)?)
    }

    fn real(table: &ExperimentTable, row: usize, col: &str) -> f64 {
        match &table.rows()[row][table.column(col).unwrap()] {
            Cell::Real(v) => *v,
            other => panic!("{col} is {other:?}"),
        }
    }

    #[test]
    fn bound_sup_norm_at_zero_band() {
        let out = run_json(r#"{"command":"bound","gamma":1,"ab":0,"p":"inf"}"#).unwrap();
        assert_eq!(out.table.len(), 1);
        assert!((real(&out.table, 0, "value") - 0.01).abs() < 1e-15);
    }

    #[test]
    fn bound_kinds_cover_their_grids() {
        let out = run_json(
            r#"{"command":"bound","bound":["theorem2","remez","theorem3"],"gamma":[0.5,0.25],"ab":1,"p":[1,"inf"],
                "n":[1,2],"len_i":1,"meas_e":0.5,"ab_products":[[1,2]]}"#,
        )
        .unwrap();
        assert_eq!(out.table.len(), 2 * 2 * 2 + 2 + 2 * 2);
        assert!(run_json(r#"{"command":"bound","bound":"lemma3","len_i":1}"#).is_err());
    }

    #[test]
    fn thickness_of_two_slivers() {
        let out = run_json(r#"{"command":"thickness","set":{"two_sliver":0.2},"a":1}"#).unwrap();
        assert!((real(&out.table, 0, "gamma") - 0.2).abs() < 1e-12);
    }

    #[test]
    fn concentration_three_frequencies() {
        let out = run_json(
            r#"{"command":"concentration","freqs":[-1,0,1],"E":{"period":null,"intervals":[[0,3.141592653589793]]},"L":"2pi"}"#,
        )
        .unwrap();
        let exact = 0.5 - 2f64.sqrt() / PI;
        assert!((real(&out.table, 0, "lambda_min") - exact).abs() < 1e-10);
    }

    #[test]
    fn concentration_grid_reports_margins() {
        let out = run_json(r#"{"command":"concentration","gamma":[0.3],"b":["4pi"],"L":8}"#).unwrap();
        assert!(out.passed());
        assert!(real(&out.table, 0, "log10_margin") > 0.0);
    }

    #[test]
    fn classify_rows_per_interval() {
        let out = run_json(r#"{"command":"classify","b":"4pi","p":2,"L":8,"seeds":2}"#).unwrap();
        assert_eq!(out.table.len(), 16);
        assert!(out.passed(), "{:?}", out.failures);
    }

    #[test]
    fn verify_small_suite_and_bad_constants() {
        let out = run_json(r#"{"command":"verify","suite":"remark1","seeds":1,"L":16}"#).unwrap();
        assert!(out.passed(), "{:?}", out.failures);
        assert!(out.table.len() > 10);
        let bad = ExperimentConfig::from_json(r#"{"command":"verify","constants":{"c_t1":0.5}}"#);
        assert!(matches!(bad, Err(Error::InvalidConstants(_))));
    }
}
