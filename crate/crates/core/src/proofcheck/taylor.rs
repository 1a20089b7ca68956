//! Taylor splitting of a multi-band function on a window.
//!
//! With `f = Σ_k e^{iλ_k x} f_k(x)` and each `f_k` band-limited around zero,
//! expanding every `f_k` to order `m` at the left end `s` of the window gives
//! `f = r + T`, where `r` is an exponential sum with polynomial coefficients
//! and `T` is the integral-form remainder.

use num_complex::Complex64;

use super::expsum::ExpSum;
use crate::bandlimited::{TrigPoly, DEFAULT_RESOLUTION};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, power_integral};

/// Shifts a band component to baseband: `f_k(x) = e^{-iλ x} g(x)`.
///
/// `center` must be a lattice frequency of the torus so that the shifted
/// function is again a trigonometric polynomial on it.
pub fn demodulate(component: &TrigPoly, center: f64) -> Result<TrigPoly> {
    let period = component.period();
    let index = center * period / std::f64::consts::TAU;
    let shift = index.round();
    if (index - shift).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "band center {center} is not a lattice frequency for period {period}"
        )));
    }
    let shift = shift as i64;
    TrigPoly::new(period, component.terms().iter().map(|&(m, c)| (m - shift, c)).collect())
}

#[derive(Debug, Clone)]
pub struct TaylorSplit {
    components: Vec<TrigPoly>,
    centers: Vec<f64>,
    start: f64,
    length: f64,
    order: u32,
    /// `f_k^{(m)}`, used by the integral remainder.
    top_derivatives: Vec<TrigPoly>,
    main: ExpSum,
}

/// Splits `Σ_k e^{iλ_k x} f_k(x)` on `[s, s + a]` with Taylor order `m`.
pub fn taylor_split(
    components: &[TrigPoly],
    centers: &[f64],
    window: (f64, f64),
    order: u32,
) -> Result<TaylorSplit> {
    if order < 1 {
        return Err(Error::InvalidDegree(order as usize));
    }
    if components.is_empty() || components.len() != centers.len() {
        return Err(Error::InvalidArgument(format!(
            "{} components for {} centers",
            components.len(),
            centers.len()
        )));
    }
    let (start, end) = window;
    if !(end > start) {
        return Err(Error::InvalidInterval { lo: start, hi: end });
    }
    let mut terms = Vec::with_capacity(components.len());
    for (fk, &lambda) in components.iter().zip(centers) {
        let mut factorial = 1.0;
        let coeffs = (0..order)
            .map(|j| {
                if j > 0 {
                    factorial *= j as f64;
                }
                fk.derivative(j).eval(start) / factorial
            })
            .collect();
        terms.push((lambda, coeffs));
    }
    Ok(TaylorSplit {
        components: components.to_vec(),
        centers: centers.to_vec(),
        start,
        length: end - start,
        order,
        top_derivatives: components.iter().map(|fk| fk.derivative(order)).collect(),
        main: ExpSum::new(start, terms)?,
    })
}

impl TaylorSplit {
    /// The polynomial-coefficient part `r`.
    pub fn main(&self) -> &ExpSum {
        &self.main
    }

    pub fn window(&self) -> (f64, f64) {
        (self.start, self.start + self.length)
    }

    pub fn eval_full(&self, x: f64) -> Complex64 {
        self.components
            .iter()
            .zip(&self.centers)
            .map(|(fk, &lambda)| Complex64::cis(lambda * x) * fk.eval(x))
            .sum()
    }

    /// `T(x) = Σ_k e^{iλ_k x} / (m-1)! ∫_s^x f_k^{(m)}(t) (x - t)^{m-1} dt`.
    pub fn remainder(&self, x: f64) -> Complex64 {
        if x == self.start {
            return Complex64::new(0.0, 0.0);
        }
        let m = self.order as i32;
        let factorial: f64 = (1..self.order).map(f64::from).product();
        self.top_derivatives
            .iter()
            .zip(&self.centers)
            .map(|(g, &lambda)| {
                let width = g.panel_width(DEFAULT_RESOLUTION).min(self.length);
                let re = integrate(self.start, x, width, |t| (g.eval(t) * (x - t).powi(m - 1)).re);
                let im = integrate(self.start, x, width, |t| (g.eval(t) * (x - t).powi(m - 1)).im);
                Complex64::cis(lambda * x) * Complex64::new(re, im) / factorial
            })
            .sum()
    }

    /// `max |f - r - T|` over `samples` equally spaced points of the window,
    /// relative to `max |f|` there.
    pub fn identity_defect(&self, samples: usize) -> f64 {
        let samples = samples.max(2);
        let mut defect = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..samples {
            let x = self.start + self.length * i as f64 / (samples - 1) as f64;
            let fx = self.eval_full(x);
            scale = scale.max(fx.norm());
            defect = defect.max((fx - self.main.eval(x) - self.remainder(x)).norm());
        }
        if scale > 0.0 {
            defect / scale
        } else {
            defect
        }
    }

    fn panel_width(&self) -> f64 {
        let top = self
            .components
            .iter()
            .zip(&self.centers)
            .map(|(fk, &lambda)| fk.max_frequency() + lambda.abs())
            .fold(0.0f64, f64::max);
        crate::bandlimited::panel_width_for(top, DEFAULT_RESOLUTION).min(self.length / 4.0)
    }

    /// `(∫_I |f - r|^p, n^{p-1} a^{pm} / (m!)^p Σ_k ∫_I |f_k^{(m)}|^p)`.
    pub fn remainder_bound(&self, p: f64) -> (f64, f64) {
        let window = [self.window()];
        let width = self.panel_width();
        let lhs = power_integral(&window, p, width, |x| (self.eval_full(x) - self.main.eval(x)).norm());
        let n = self.components.len() as f64;
        let m = self.order as f64;
        let factorial: f64 = (1..=self.order).map(f64::from).product();
        let sum: f64 = self
            .top_derivatives
            .iter()
            .map(|g| g.power_integral(&window, p, DEFAULT_RESOLUTION))
            .sum();
        let rhs = n.powf(p - 1.0) * self.length.powf(p * m) / factorial.powf(p) * sum;
        (lhs, rhs)
    }
}
