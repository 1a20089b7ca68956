//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Dense row-major square matrix of complex numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(n: usize, mut f: F) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |a_ij - conj(a_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    sum += self.data[i * self.n + j].norm_sqr();
                }
            }
        }
        sum.sqrt()
    }
}

/// Eigenvalues in ascending order with matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
    pub sweeps: usize,
}

/// Diagonalises a Hermitian matrix by cyclic complex Jacobi rotations until the
/// off-diagonal Frobenius mass falls below `tolerance * ‖A‖_F`.
pub fn hermitian_jacobi(matrix: &ComplexMatrix, tolerance: f64) -> Result<HermitianEigen> {
    let n = matrix.dim();
    let mut a = matrix.clone();
    // enforce exact symmetry of the input
    for i in 0..n {
        let d = a.get(i, i).re;
        a.set(i, i, Complex64::new(d, 0.0));
        for j in (i + 1)..n {
            let avg = 0.5 * (a.get(i, j) + a.get(j, i).conj());
            a.set(i, j, avg);
            a.set(j, i, avg.conj());
        }
    }
    let mut v = ComplexMatrix::from_fn(n, |i, j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0));
    let scale = a.frobenius();
    let target = tolerance * scale;
    let negligible = 1e-30 * scale.max(f64::MIN_POSITIVE);

    let mut sweeps = 0;
    while a.off_diagonal_norm() > target {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let mag = apq.norm();
                if mag <= negligible {
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, mag);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let values = order.iter().map(|&i| a.get(i, i).re).collect();
    let vectors = order.iter().map(|&j| (0..n).map(|i| v.get(i, j)).collect()).collect();
    Ok(HermitianEigen { values, vectors, sweeps })
}

/// Applies `A <- Qᴴ A Q`, `V <- V Q` for the unitary `Q` annihilating `a_pq`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, apq: Complex64, mag: f64) {
    let n = a.dim();
    let app = a.get(p, p).re;
    let aqq = a.get(q, q).re;
    // phase e^{-iφ} on q makes the pivot real, then a real plane rotation
    let phase = (apq / mag).conj();
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let (qpp, qpq) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));
    let (qqp, qqq) = (-s * phase, c * phase);

    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * qpp + akq * qqp);
        a.set(k, q, akp * qpq + akq * qqq);
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, qpp.conj() * apk + qqp.conj() * aqk);
        a.set(q, k, qpq.conj() * apk + qqq.conj() * aqk);
    }
    a.set(p, q, Complex64::new(0.0, 0.0));
    a.set(q, p, Complex64::new(0.0, 0.0));
    a.set(p, p, Complex64::new(app - t * mag, 0.0));
    a.set(q, q, Complex64::new(aqq + t * mag, 0.0));

    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * qpp + vkq * qqp);
        v.set(k, q, vkp * qpq + vkq * qqq);
    }
}
