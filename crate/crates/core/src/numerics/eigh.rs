//! Dense Hermitian eigensolver.
//!
//! Householder reduction of a complex Hermitian matrix to a complex
//! tridiagonal one, a diagonal unitary rescaling that makes the off-diagonal
//! real, and the implicit-shift QL iteration (EISPACK `tql2` lineage) on the
//! resulting real symmetric tridiagonal matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

/// Complex Hermitian matrix, stored dense and row-major.
///
/// Entries are only ever written through [`add_diagonal`](Self::add_diagonal)
/// and [`add_coupling`](Self::add_coupling), which update `(i, j)` and
/// `(j, i)` together, so the stored matrix is exactly Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        HermitianMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    /// Builds from a closure evaluated on the upper triangle; the diagonal
    /// keeps only its real part.
    pub fn from_upper(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(f(i, i).re, 0.0);
            for j in i + 1..n {
                let z = f(i, j);
                m.data[i * n + j] = z;
                m.data[j * n + i] = z.conj();
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

    pub fn add_diagonal(&mut self, i: usize, x: f64) {
        self.data[i * self.n + i].re += x;
    }

    /// Adds `z` at `(i, j)` and `conj(z)` at `(j, i)`; for `i == j` this adds
    /// `2 Re z` to the diagonal.
    pub fn add_coupling(&mut self, i: usize, j: usize, z: Complex64) {
        if i == j {
            self.data[i * self.n + i].re += 2.0 * z.re;
        } else {
            self.data[i * self.n + j] += z;
            self.data[j * self.n + i] += z.conj();
        }
    }

    /// Entrywise sum, used for operator splittings.
    pub fn sum(&self, other: &HermitianMatrix) -> HermitianMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        HermitianMatrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest deviation from exact Hermitian symmetry.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

/// Ascending eigenvalues and, on request, orthonormal eigenvectors
/// (`vectors[k]` belongs to `values[k]`).
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<Vec<Complex64>>>,
}

pub fn eigh(a: &HermitianMatrix, want_vectors: bool) -> Result<Eigen> {
    let n = a.dim();
    if n == 0 {
        return Ok(Eigen {
            values: Vec::new(),
            vectors: want_vectors.then(Vec::new),
        });
    }
    let (d, e, basis) = tridiagonalize(a, want_vectors);
    let (values, basis) = tridiagonal_ql(d, e, basis)?;

    let vectors = basis.map(|v| {
        (0..n)
            .map(|k| (0..n).map(|i| v[i * n + k]).collect())
            .collect()
    });
    Ok(Eigen { values, vectors })
}

/// Eigenvalues only.
pub fn eigvalsh(a: &HermitianMatrix) -> Result<Vec<f64>> {
    eigh(a, false).map(|e| e.values)
}

/// Reduces `a` to real symmetric tridiagonal form `(d, e)` with
/// `e[k] = T[k+1][k]`. When requested, also returns the unitary basis
/// (row-major, columns are basis vectors) that carries `T` back to `a`.
fn tridiagonalize(
    a: &HermitianMatrix,
    want_basis: bool,
) -> (Vec<f64>, Vec<f64>, Option<Vec<Complex64>>) {
    let n = a.dim();
    let zero = Complex64::new(0.0, 0.0);
    let mut m = a.data.clone();
    let mut sub = vec![zero; n];
    let mut q: Option<Vec<Complex64>> = want_basis.then(|| {
        let mut q = vec![zero; n * n];
        for i in 0..n {
            q[i * n + i] = Complex64::new(1.0, 0.0);
        }
        q
    });

    let mut p = vec![zero; n];
    for k in 0..n.saturating_sub(2) {
        let lo = k + 1;
        let norm = (lo..n).map(|i| m[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            sub[k] = zero;
            continue;
        }
        let x0 = m[lo * n + k];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;

        let mut v: Vec<Complex64> = (lo..n).map(|i| m[i * n + k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / vnorm2;

        // p = tau * A_sub v, K = tau/2 * v^H p, w = p - K v
        for (ii, i) in (lo..n).enumerate() {
            let row = &m[i * n + lo..i * n + n];
            p[ii] = tau * row.iter().zip(&v).map(|(a, b)| a * b).sum::<Complex64>();
        }
        let vhp: Complex64 = v.iter().zip(&p).map(|(a, b)| a.conj() * b).sum();
        let kk = 0.5 * tau * vhp.re;
        let w: Vec<Complex64> = p[..n - lo]
            .iter()
            .zip(&v)
            .map(|(pi, vi)| pi - vi * kk)
            .collect();

        for (ii, i) in (lo..n).enumerate() {
            let (vi, wi) = (v[ii], w[ii]);
            let row = &mut m[i * n + lo..i * n + n];
            for (jj, r) in row.iter_mut().enumerate() {
                *r -= vi * w[jj].conj() + wi * v[jj].conj();
            }
        }
        for i in lo..n {
            m[i * n + k] = zero;
            m[k * n + i] = zero;
        }
        m[lo * n + k] = alpha;
        m[k * n + lo] = alpha.conj();
        sub[k] = alpha;

        if let Some(q) = q.as_mut() {
            // Q <- Q (I - tau v v^H) on columns lo..n
            for r in 0..n {
                let row = &mut q[r * n + lo..r * n + n];
                let s = tau * row.iter().zip(&v).map(|(a, b)| a * b).sum::<Complex64>();
                for (jj, x) in row.iter_mut().enumerate() {
                    *x -= s * v[jj].conj();
                }
            }
        }
    }
    if n >= 2 {
        sub[n - 2] = m[(n - 1) * n + (n - 2)];
    }

    let d: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();

    // Diagonal unitary D making the off-diagonal real: e'_k = |e_k|.
    let mut e = vec![0.0; n];
    let mut delta = vec![Complex64::new(1.0, 0.0); n];
    for k in 0..n.saturating_sub(1) {
        let r = sub[k].norm();
        e[k] = r;
        delta[k + 1] = if r == 0.0 {
            delta[k]
        } else {
            delta[k] * sub[k] / r
        };
    }
    if let Some(q) = q.as_mut() {
        for r in 0..n {
            for (c, dc) in delta.iter().enumerate() {
                q[r * n + c] *= dc;
            }
        }
    }
    (d, e, q)
}

/// Implicit-shift QL on a real symmetric tridiagonal matrix. Rotations are
/// applied to the columns of `basis` when present. Returns sorted values.
fn tridiagonal_ql(
    mut d: Vec<f64>,
    mut e: Vec<f64>,
    mut basis: Option<Vec<Complex64>>,
) -> Result<(Vec<f64>, Option<Vec<Complex64>>)> {
    let n = d.len();
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_SWEEPS {
                    return Err(Error::ConvergenceFailure {
                        n,
                        iterations: MAX_QL_SWEEPS,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    let r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = basis.as_mut() {
                        for k in 0..n {
                            let a = v[k * n + i];
                            let b = v[k * n + i + 1];
                            v[k * n + i + 1] = a * s + b * c;
                            v[k * n + i] = a * c - b * s;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| d[i]).collect();
    let basis = basis.map(|v| {
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for (new, &old) in order.iter().enumerate() {
            for k in 0..n {
                out[k * n + new] = v[k * n + old];
            }
        }
        out
    });
    Ok((values, basis))
}
