//! Dense complex linear algebra for the small dimensions this crate needs
//! (2, 4, and 4n with n ≤ 4): Hermitian eigendecomposition, general
//! eigenvalues, Takagi factorization of complex symmetric matrices, tensor
//! products and partial traces.
//!
//! Everything is written for matrices no larger than 16×16; a cyclic Jacobi
//! sweep is exact enough and avoids pulling in a LAPACK backend.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default absolute tolerance for structural checks (Hermiticity, symmetry).
pub const STRUCT_TOL: f64 = 1e-10;

/// Square complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::new(0.0, 0.0); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a row-major list of entries; `entries.len()` must be a
    /// perfect square.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        for r in rows {
            if r.len() != dim {
                return Err(Error::Shape {
                    expected: format!("{dim} entries per row"),
                    got: format!("{}", r.len()),
                });
            }
        }
        Ok(Self { dim, data: rows.iter().flatten().copied().collect() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim, "dimension mismatch in matrix product");
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch in matrix-vector product");
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                out[i] += self[(i, j)] * v[j];
            }
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, c: C64) -> CMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= c;
        }
        out
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> CMat {
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(j, i)];
            }
        }
        out
    }

    pub fn conj(&self) -> CMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = a.conj();
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Kronecker product, `self` as the slow (left) factor.
    pub fn kron(&self, other: &CMat) -> CMat {
        let (n, m) = (self.dim, other.dim);
        let mut out = CMat::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise |difference| against another matrix.
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.transpose()) <= tol
    }

    /// ⟨u|M|v⟩ = Σ_ij conj(u_i) M_ij v_j.
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        let n = self.dim;
        assert!(u.len() == n && v.len() == n);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            let ui = u[i].conj();
            if ui.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                acc += ui * self[(i, j)] * v[j];
            }
        }
        acc
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// ⟨a|b⟩ with the physics convention (conjugate-linear in the first slot).
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// |a⟩⟨b| as a matrix.
pub fn outer(a: &[C64], b: &[C64]) -> CMat {
    let n = a.len();
    assert_eq!(n, b.len());
    let mut m = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = a[i] * b[j].conj();
        }
    }
    m
}

/// Result of a Hermitian eigendecomposition: eigenvalues descending with the
/// matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<C64>>,
}

impl HermitianEig {
    /// Σ λ_k |v_k⟩⟨v_k| — used by the reconstruction checks.
    pub fn reassemble(&self) -> CMat {
        let n = self.eigenvalues.len();
        let mut m = CMat::zeros(n);
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            m = m.add(&outer(v, v).scale(C64::new(*lam, 0.0)));
        }
        m
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
///
/// Rejects inputs with ‖H − H†‖_max > 1e-10.
pub fn hermitian_eig(h: &CMat) -> Result<HermitianEig> {
    if !h.is_hermitian(STRUCT_TOL) {
        return Err(Error::ContractViolation(format!(
            "matrix is not Hermitian within {STRUCT_TOL:e}"
        )));
    }
    let n = h.dim();
    let mut a = h.clone();
    // exact Hermitization so the sweep sees a clean input
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let m = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = m;
            a[(j, i)] = m.conj();
        }
    }
    let mut v = CMat::identity(n);
    let scale = a.max_abs().max(1.0);
    let stop = 1e-15 * scale;

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let beta = apq.norm();
                if beta <= stop * 1e-2 {
                    continue;
                }
                let w = apq / beta; // unit phase of the off-diagonal entry
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * beta);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = [[c, s], [-s w̄, c w̄]] acting on columns (p, q)
                let (cc, ss) = (C64::new(c, 0.0), C64::new(s, 0.0));
                let wbar = w.conj();
                // rows: A <- G† A
                for j in 0..n {
                    let rp = a[(p, j)];
                    let rq = a[(q, j)];
                    a[(p, j)] = cc * rp - ss * w * rq;
                    a[(q, j)] = ss * rp + cc * w * rq;
                }
                // columns: A <- A G
                for i in 0..n {
                    let cp = a[(i, p)];
                    let cq = a[(i, q)];
                    a[(i, p)] = cc * cp - ss * wbar * cq;
                    a[(i, q)] = ss * cp + cc * wbar * cq;
                }
                // accumulate eigenvectors: V <- V G
                for i in 0..n {
                    let cp = v[(i, p)];
                    let cq = v[(i, q)];
                    v[(i, p)] = cc * cp - ss * wbar * cq;
                    v[(i, q)] = ss * cp + cc * wbar * cq;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|k| (a[(k, k)].re, (0..n).map(|i| v[(i, k)]).collect()))
        .collect();
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    Ok(HermitianEig {
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        eigenvectors: pairs.into_iter().map(|p| p.1).collect(),
    })
}

/// All eigenvalues of a general square complex matrix, via the
/// Faddeev–LeVerrier characteristic polynomial and a Durand–Kerner solve.
///
/// Accuracy is limited by the conditioning of the characteristic polynomial;
/// fine for the 4×4 concurrence product matrix, not a general-purpose
/// eigensolver.
pub fn general_eigenvalues(m: &CMat) -> Vec<C64> {
    let n = m.dim();
    // characteristic polynomial λ^n + c[0] λ^(n-1) + ... + c[n-1]
    let mut coeffs = Vec::with_capacity(n);
    let mut mk = m.clone();
    let mut ck = -mk.trace();
    coeffs.push(ck);
    for k in 2..=n {
        let mut shifted = mk.clone();
        for i in 0..n {
            shifted[(i, i)] += ck;
        }
        mk = m.mul(&shifted);
        ck = -mk.trace() / (k as f64);
        coeffs.push(ck);
    }
    durand_kerner(&coeffs)
}

/// Roots of the monic polynomial z^n + c[0] z^(n-1) + ... + c[n-1].
fn durand_kerner(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len();
    if n == 0 {
        return Vec::new();
    }
    let radius = 1.0 + coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = C64::new(0.4, 0.9);
    let mut z: Vec<C64> = (0..n)
        .map(|j| C64::new(radius, 0.0) * seed.powu(j as u32 + 1))
        .collect();
    let eval = |x: C64| -> C64 {
        let mut p = C64::new(1.0, 0.0);
        for c in coeffs {
            p = p * x + c;
        }
        p
    };
    for _ in 0..1000 {
        let mut max_step = 0.0f64;
        for j in 0..n {
            let mut denom = C64::new(1.0, 0.0);
            for k in 0..n {
                if k != j {
                    denom *= z[j] - z[k];
                }
            }
            if denom.norm() == 0.0 {
                // coincident iterates: nudge and continue
                z[j] += C64::new(1e-12 * radius, 1e-12 * radius);
                continue;
            }
            let step = eval(z[j]) / denom;
            z[j] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step <= 1e-16 * radius {
            break;
        }
    }
    z
}

/// Takagi factorization of a complex symmetric matrix.
#[derive(Debug, Clone)]
pub struct TakagiFactorization {
    /// Unitary U with S = U · diag(singulars) · Uᵀ.
    pub unitary: CMat,
    /// Nonnegative singular values, descending.
    pub singulars: Vec<f64>,
}

/// Takagi factorization S = U diag(d) Uᵀ of a complex symmetric matrix.
///
/// Computed through the real symmetric embedding M = [[X, Y], [Y, −X]] with
/// S = X + iY: an eigenvector [u; v] of M with eigenvalue d > 0 gives the
/// Takagi column u + iv, for any multiplicity. The zero space is turned into
/// valid columns by a Gram–Schmidt pass that also projects out the
/// i-partners [−v; u]. Degenerate singular values therefore come with an
/// arbitrary orthonormal basis of the degenerate block.
pub fn takagi(s: &CMat) -> Result<TakagiFactorization> {
    if !s.is_symmetric(STRUCT_TOL) {
        return Err(Error::ContractViolation(format!(
            "matrix is not complex symmetric within {STRUCT_TOL:e}"
        )));
    }
    let n = s.dim();
    let mut m = CMat::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            let x = C64::new(s[(i, j)].re, 0.0);
            let y = C64::new(s[(i, j)].im, 0.0);
            m[(i, j)] = x;
            m[(i, j + n)] = y;
            m[(i + n, j)] = y;
            m[(i + n, j + n)] = -x;
        }
    }
    let eig = hermitian_eig(&m)?;
    let scale = s.max_abs().max(1.0);
    let ztol = 1e-12 * scale;

    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut ds: Vec<f64> = Vec::with_capacity(n);
    for (lam, vec) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        if *lam > ztol && cols.len() < n {
            let col: Vec<C64> = (0..n)
                .map(|i| C64::new(vec[i].re, vec[i + n].re))
                .collect();
            cols.push(col);
            ds.push(*lam);
        }
    }

    if cols.len() < n {
        // kernel of M: the 2(n - m_pos) eigenvectors of smallest |eigenvalue|
        let missing = n - cols.len();
        let mut order: Vec<usize> = (0..2 * n).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[i]
                .abs()
                .partial_cmp(&eig.eigenvalues[j].abs())
                .unwrap()
        });
        let mut basis: Vec<Vec<f64>> = order[..2 * missing]
            .iter()
            .map(|&i| eig.eigenvectors[i].iter().map(|c| c.re).collect())
            .collect();
        for _ in 0..missing {
            let x = match basis.first() {
                Some(x) => x.clone(),
                None => {
                    return Err(Error::Internal(
                        "takagi: exhausted kernel basis".into(),
                    ))
                }
            };
            let nrm = x.iter().map(|t| t * t).sum::<f64>().sqrt();
            if nrm < 1e-8 {
                return Err(Error::Internal("takagi: degenerate kernel vector".into()));
            }
            let x: Vec<f64> = x.iter().map(|t| t / nrm).collect();
            // J[u; v] = [-v; u]
            let jx: Vec<f64> = (0..2 * n)
                .map(|i| if i < n { -x[i + n] } else { x[i - n] })
                .collect();
            cols.push((0..n).map(|i| C64::new(x[i], x[i + n])).collect());
            ds.push(0.0);
            let mut next: Vec<Vec<f64>> = Vec::new();
            for y in basis.iter().skip(1) {
                let px: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                let pj: f64 = jx.iter().zip(y).map(|(a, b)| a * b).sum();
                let mut y2: Vec<f64> = y
                    .iter()
                    .enumerate()
                    .map(|(i, t)| t - px * x[i] - pj * jx[i])
                    .collect();
                let ny = y2.iter().map(|t| t * t).sum::<f64>().sqrt();
                if ny > 1e-7 {
                    for t in y2.iter_mut() {
                        *t /= ny;
                    }
                    next.push(y2);
                }
            }
            basis = next;
        }
    }

    let mut u = CMat::zeros(n);
    for (k, col) in cols.iter().enumerate() {
        for i in 0..n {
            u[(i, k)] = col[i];
        }
    }
    // d was taken from descending eigenvalues, zeros appended last
    let fact = TakagiFactorization { unitary: u, singulars: ds };

    let mut d = CMat::zeros(n);
    for (k, &dk) in fact.singulars.iter().enumerate() {
        d[(k, k)] = C64::new(dk, 0.0);
    }
    let res = fact
        .unitary
        .mul(&d)
        .mul(&fact.unitary.transpose())
        .max_abs_diff(s);
    if res > 1e-10 * scale.max(1.0) {
        return Err(Error::Internal(format!(
            "takagi reassembly residual {res:e} exceeds tolerance"
        )));
    }
    Ok(fact)
}

/// Partial trace over the B (fast) index of a 4×4 operator on A⊗B.
pub fn partial_trace_b(p: &CMat) -> Result<CMat> {
    if p.dim() != 4 {
        return Err(Error::Shape { expected: "4x4".into(), got: format!("{0}x{0}", p.dim()) });
    }
    let mut out = CMat::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = p[(2 * i, 2 * j)] + p[(2 * i + 1, 2 * j + 1)];
        }
    }
    Ok(out)
}

/// Partial trace over the A (slow) index of a 4×4 operator on A⊗B.
pub fn partial_trace_a(p: &CMat) -> Result<CMat> {
    if p.dim() != 4 {
        return Err(Error::Shape { expected: "4x4".into(), got: format!("{0}x{0}", p.dim()) });
    }
    let mut out = CMat::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = p[(i, j)] + p[(2 + i, 2 + j)];
        }
    }
    Ok(out)
}
