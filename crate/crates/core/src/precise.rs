//! Extended-precision smallest eigenvalue of the concentration operator.
//!
//! For wide bands and sparse sets the smallest eigenvalue drops far below
//! `1e-16 ‖G‖`, where double-precision Jacobi only returns rounding noise.
//! Here the Gram entries are formed in MPFR and the Hermitian Jacobi sweep is
//! repeated at increasing precision until the eigenvalue is resolved.
//!
//! When `E` is periodic with a period `P` dividing the torus length `L`, the
//! entry `G_jk` vanishes unless `m_j ≡ m_k (mod L/P)`, so each residue class
//! is solved separately.

use std::collections::HashMap;

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::sets::IntervalSet;

pub const START_BITS: u32 = 256;
pub const MAX_BITS: u32 = 2048;
/// Largest block the MPFR solver accepts.
pub const MAX_BLOCK: usize = 160;
const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreciseMin {
    /// Rounded to `f64`; zero if it underflows.
    pub lambda_min: f64,
    pub log10_lambda_min: f64,
    pub bits: u32,
    pub blocks: usize,
}

/// Frequencies grouped by residue modulo `L/P` (a single group when `E` has
/// no period tiling the torus).
pub fn residue_blocks(freqs: &[i64], set: &IntervalSet, period: f64) -> Vec<Vec<i64>> {
    let modulus = set
        .period()
        .map(|p| period / p)
        .filter(|q| (q - q.round()).abs() <= 1e-9 && q.round() >= 1.0)
        .map_or(1, |q| q.round() as i64);
    let mut groups: Vec<(i64, Vec<i64>)> = Vec::new();
    for &m in freqs {
        let r = m.rem_euclid(modulus);
        match groups.iter_mut().find(|(key, _)| *key == r) {
            Some((_, g)) => g.push(m),
            None => groups.push((r, vec![m])),
        }
    }
    groups.sort_by_key(|(r, _)| *r);
    groups.into_iter().map(|(_, g)| g).collect()
}

#[derive(Clone)]
struct Cx {
    re: Float,
    im: Float,
}

impl Cx {
    fn zero(bits: u32) -> Self {
        Self { re: Float::new(bits), im: Float::new(bits) }
    }

    fn mul(&self, other: &Cx, bits: u32) -> Cx {
        let re = Float::with_val(bits, &self.re * &other.re) - Float::with_val(bits, &self.im * &other.im);
        let im = Float::with_val(bits, &self.re * &other.im) + Float::with_val(bits, &self.im * &other.re);
        Cx { re, im }
    }

    fn scale(&self, s: &Float, bits: u32) -> Cx {
        Cx { re: Float::with_val(bits, &self.re * s), im: Float::with_val(bits, &self.im * s) }
    }

    fn add(&self, other: &Cx, bits: u32) -> Cx {
        Cx { re: Float::with_val(bits, &self.re + &other.re), im: Float::with_val(bits, &self.im + &other.im) }
    }

    fn conj(&self) -> Cx {
        Cx { re: self.re.clone(), im: Float::with_val(self.im.prec(), -&self.im) }
    }

    fn norm_sqr(&self, bits: u32) -> Float {
        Float::with_val(bits, self.re.square_ref()) + Float::with_val(bits, self.im.square_ref())
    }
}

/// `(1/L) Σ_pieces ∫ e^{iκx} dx` with `κ = 2π Δ / L`.
fn entry(delta: i64, pieces: &[(f64, f64)], period: f64, bits: u32) -> Cx {
    let length = Float::with_val(bits, period);
    let mut sum = Cx::zero(bits);
    if delta == 0 {
        for &(lo, hi) in pieces {
            sum.re += Float::with_val(bits, hi) - Float::with_val(bits, lo);
        }
    } else {
        let pi = Float::with_val(bits, Constant::Pi);
        let kappa = Float::with_val(bits, &pi * 2u32) * delta / &length;
        for &(lo, hi) in pieces {
            let a = Float::with_val(bits, &kappa * lo);
            let b = Float::with_val(bits, &kappa * hi);
            // (e^{iκ hi} - e^{iκ lo}) / (iκ)
            sum.re += (Float::with_val(bits, b.sin_ref()) - Float::with_val(bits, a.sin_ref())) / &kappa;
            sum.im += (Float::with_val(bits, a.cos_ref()) - Float::with_val(bits, b.cos_ref())) / &kappa;
        }
    }
    Cx { re: sum.re / &length, im: sum.im / &length }
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi at `bits`.
fn jacobi_min(mut a: Vec<Cx>, n: usize, bits: u32) -> Result<Float> {
    let idx = |i: usize, j: usize| i * n + j;
    let frob = a.iter().fold(Float::new(bits), |acc, z| acc + z.norm_sqr(bits));
    let target = Float::with_val(bits, &frob >> (2 * (bits - 16)));
    let off = |a: &[Cx]| {
        let mut s = Float::new(bits);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[idx(i, j)].norm_sqr(bits);
                }
            }
        }
        s
    };
    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[idx(p, q)].clone();
                let mag = apq.norm_sqr(bits).sqrt();
                if mag.is_zero() {
                    continue;
                }
                let app = a[idx(p, p)].re.clone();
                let aqq = a[idx(q, q)].re.clone();
                let phase = Cx {
                    re: Float::with_val(bits, &apq.re / &mag),
                    im: Float::with_val(bits, -&apq.im) / &mag,
                };
                let tau = Float::with_val(bits, &aqq - &app) / Float::with_val(bits, &mag * 2u32);
                let root = (Float::with_val(bits, tau.square_ref()) + 1u32).sqrt();
                let t = if tau >= 0 {
                    Float::with_val(bits, 1u32) / (tau + root)
                } else {
                    Float::with_val(bits, -1i32) / (root - tau)
                };
                let c = Float::with_val(bits, 1u32) / (Float::with_val(bits, t.square_ref()) + 1u32).sqrt();
                let s = Float::with_val(bits, &t * &c);
                let neg_s = Float::with_val(bits, -&s);
                let qqp = phase.scale(&neg_s, bits);
                let qqq = phase.scale(&c, bits);
                for k in 0..n {
                    let akp = a[idx(k, p)].clone();
                    let akq = a[idx(k, q)].clone();
                    a[idx(k, p)] = akp.scale(&c, bits).add(&akq.mul(&qqp, bits), bits);
                    a[idx(k, q)] = akp.scale(&s, bits).add(&akq.mul(&qqq, bits), bits);
                }
                let (cqp, cqq) = (qqp.conj(), qqq.conj());
                for k in 0..n {
                    let apk = a[idx(p, k)].clone();
                    let aqk = a[idx(q, k)].clone();
                    a[idx(p, k)] = apk.scale(&c, bits).add(&cqp.mul(&aqk, bits), bits);
                    a[idx(q, k)] = apk.scale(&s, bits).add(&cqq.mul(&aqk, bits), bits);
                }
                let shift = Float::with_val(bits, &t * &mag);
                a[idx(p, q)] = Cx::zero(bits);
                a[idx(q, p)] = Cx::zero(bits);
                a[idx(p, p)] = Cx { re: Float::with_val(bits, &app - &shift), im: Float::new(bits) };
                a[idx(q, q)] = Cx { re: Float::with_val(bits, &aqq + &shift), im: Float::new(bits) };
            }
        }
    }
    let mut min = a[0].re.clone();
    for i in 1..n {
        if a[idx(i, i)].re < min {
            min = a[idx(i, i)].re.clone();
        }
    }
    Ok(min)
}

fn block_min(block: &[i64], pieces: &[(f64, f64)], period: f64, bits: u32) -> Result<(Float, Float)> {
    let n = block.len();
    let mut cache: HashMap<i64, Cx> = HashMap::new();
    let mut a = vec![Cx::zero(bits); n * n];
    for j in 0..n {
        for k in j..n {
            let g = cache
                .entry(block[j] - block[k])
                .or_insert_with(|| entry(block[j] - block[k], pieces, period, bits))
                .clone();
            if j == k {
                a[j * n + j] = Cx { re: g.re, im: Float::new(bits) };
            } else {
                a[k * n + j] = g.conj();
                a[j * n + k] = g;
            }
        }
    }
    let frob = a.iter().fold(Float::new(bits), |acc, z| acc + z.norm_sqr(bits)).sqrt();
    Ok((jacobi_min(a, n, bits)?, frob))
}

/// Smallest Gram eigenvalue, resolved to roughly six significant digits.
pub fn precise_min_eigenvalue(freqs: &[i64], set: &IntervalSet, period: f64) -> Result<PreciseMin> {
    let blocks = residue_blocks(freqs, set, period);
    if let Some(big) = blocks.iter().map(Vec::len).max().filter(|&n| n > MAX_BLOCK) {
        return Err(Error::SizeLimit { n: big, max: MAX_BLOCK });
    }
    let torus = set.on_torus(period)?;
    let pieces = torus.intervals();
    let mut bits = START_BITS;
    loop {
        let mut best: Option<Float> = None;
        let mut resolved = true;
        for block in &blocks {
            let (min, frob) = block_min(block, pieces, period, bits)?;
            // absolute accuracy is a modest multiple of 2^-bits ‖G‖
            let noise = Float::with_val(bits, &frob * (block.len() as u32)) >> (bits - 40);
            if min <= noise {
                resolved = false;
                break;
            }
            if best.as_ref().map_or(true, |b| &min < b) {
                best = Some(min);
            }
        }
        if resolved {
            let min = best.expect("at least one block");
            return Ok(PreciseMin {
                lambda_min: min.to_f64(),
                log10_lambda_min: Float::with_val(bits, min.log10_ref()).to_f64(),
                bits,
                blocks: blocks.len(),
            });
        }
        if bits >= MAX_BITS {
            return Err(Error::NoConvergence(bits as usize));
        }
        bits *= 2;
    }
}
