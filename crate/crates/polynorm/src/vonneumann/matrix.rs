//! Self-contained dense complex matrices and the power-iteration operator
//! norm. Dimensions here are tiny (a few more than the polynomial degree), so
//! plain row-major storage is all that is needed.

use num_complex::Complex64;

use crate::util::seeded_rng;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    d: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(d: usize) -> Self {
        CMatrix {
            d,
            data: vec![Complex64::new(0.0, 0.0); d * d],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = CMatrix::zeros(d);
        for i in 0..d {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Nilpotent forward shift: ones on the first superdiagonal, so
    /// `N e_{j+1} = e_j`, `N^d = 0`, and `‖N‖ = 1`.
    pub fn forward_shift(d: usize) -> Self {
        let mut m = CMatrix::zeros(d);
        for i in 0..d.saturating_sub(1) {
            m[(i, i + 1)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let d = rows.len();
        let mut data = Vec::with_capacity(d * d);
        for row in rows {
            assert_eq!(row.len(), d, "matrix must be square");
            data.extend(row);
        }
        CMatrix { d, data }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.d, other.d);
        let d = self.d;
        let mut out = CMatrix::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.d, other.d);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.d, other.d);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        let mut out = self.clone();
        for a in &mut out.data {
            *a *= c;
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> CMatrix {
        let mut acc = CMatrix::identity(self.d);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.d);
        (0..self.d)
            .map(|i| {
                (0..self.d)
                    .map(|j| self[(i, j)] * v[j])
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn apply_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.d);
        (0..self.d)
            .map(|j| {
                (0..self.d)
                    .map(|i| self[(i, j)].conj() * v[i])
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_strictly_upper_triangular(&self) -> bool {
        (0..self.d).all(|i| (0..=i).all(|j| self[(i, j)] == Complex64::new(0.0, 0.0)))
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.d + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.d + j]
    }
}

/// Largest-singular-value estimate with convergence metadata.
#[derive(Debug, Clone, Copy)]
pub struct OpNorm {
    pub value: f64,
    pub converged: bool,
    pub iters: u32,
}

const OPNORM_MAX_ITERS: u32 = 20_000;
const OPNORM_SEED: u64 = 0x9e3779b97f4a7c15;

/// Largest singular value by power iteration on `M*M` from a seeded random
/// start; stops when successive estimates agree to the relative tolerance.
pub fn opnorm(m: &CMatrix, tol: f64) -> OpNorm {
    opnorm_with_vector(m, tol).0
}

/// As [`opnorm`], also returning the right singular vector estimate.
pub fn opnorm_with_vector(m: &CMatrix, tol: f64) -> (OpNorm, Vec<Complex64>) {
    let d = m.dim();
    if d == 0 || m.frobenius_norm() == 0.0 {
        return (
            OpNorm {
                value: 0.0,
                converged: true,
                iters: 0,
            },
            vec![Complex64::new(0.0, 0.0); d],
        );
    }
    let mut rng = seeded_rng(OPNORM_SEED, 0);
    let mut v: Vec<Complex64> = (0..d)
        .map(|_| crate::util::complex_gaussian(&mut rng))
        .collect();
    normalize(&mut v);
    let mut sigma = 0.0f64;
    for iter in 1..=OPNORM_MAX_ITERS {
        let w = m.apply(&v);
        let new_sigma = norm2(&w);
        let mut u = m.apply_adjoint(&w);
        let unorm = norm2(&u);
        if unorm == 0.0 {
            // v lies in the kernel of M*M; restart once from fresh noise.
            if iter == 1 {
                v = (0..d)
                    .map(|_| crate::util::complex_gaussian(&mut rng))
                    .collect();
                normalize(&mut v);
                continue;
            }
            return (
                OpNorm {
                    value: new_sigma,
                    converged: true,
                    iters: iter,
                },
                v,
            );
        }
        for x in &mut u {
            *x /= unorm;
        }
        let done = (new_sigma - sigma).abs() <= tol * new_sigma.max(f64::MIN_POSITIVE);
        sigma = new_sigma;
        v = u;
        if done && iter > 1 {
            return (
                OpNorm {
                    value: sigma,
                    converged: true,
                    iters: iter,
                },
                v,
            );
        }
    }
    (
        OpNorm {
            value: sigma,
            converged: false,
            iters: OPNORM_MAX_ITERS,
        },
        v,
    )
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) {
    let n = norm2(v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}
