//! Two-qubit state model: density matrices, subnormalized decomposition
//! members, the MEMS family, spin flip, concurrence, entanglement of
//! formation, and relative-state maps.
//!
//! Basis convention: |i_A j_B⟩ ↔ index 2i+j (B is the fast index).
//! σ_y = [[0, −i], [i, 0]], so the spin flip sends |00⟩ to −|11⟩.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, inner, norm2, outer, takagi, CMat};

/// Validation tolerance for internally constructed density matrices.
pub const INTERNAL_TOL: f64 = 1e-10;
/// Looser tolerance for hand-typed matrices read from files.
pub const FILE_TOL: f64 = 1e-8;
/// Squared-norm threshold below which decomposition members are dropped.
pub const MEMBER_DROP_TOL: f64 = 1e-12;

/// A 4×4 Hermitian, positive-semidefinite, unit-trace operator on A⊗B.
#[derive(Debug, Clone)]
pub struct DensityMatrix4 {
    mat: CMat,
}

impl DensityMatrix4 {
    pub fn new(mat: CMat) -> Result<Self> {
        Self::with_tolerance(mat, INTERNAL_TOL)
    }

    pub fn with_tolerance(mat: CMat, tol: f64) -> Result<Self> {
        if mat.dim() != 4 {
            return Err(Error::Shape {
                expected: "4x4".into(),
                got: format!("{0}x{0}", mat.dim()),
            });
        }
        if !mat.is_hermitian(tol) {
            return Err(Error::ContractViolation(format!(
                "density matrix is not Hermitian within {tol:e}"
            )));
        }
        let tr = mat.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol {
            return Err(Error::ContractViolation(format!(
                "density matrix trace {tr} differs from 1 beyond {tol:e}"
            )));
        }
        let eig = hermitian_eig(&mat)?;
        if let Some(min) = eig.eigenvalues.last() {
            if *min < -tol {
                return Err(Error::ContractViolation(format!(
                    "density matrix has negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(Self { mat })
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn from_pure(v: &SubVector4) -> Result<Self> {
        Self::new(v.projector())
    }

    /// ρ_A ⊗ ρ_B from 2×2 factors (both must be valid single-qubit states).
    pub fn product(rho_a: &CMat, rho_b: &CMat) -> Result<Self> {
        Self::new(rho_a.kron(rho_b))
    }

    pub fn purity(&self) -> f64 {
        self.mat.mul(&self.mat).trace().re
    }
}

/// A subnormalized two-qubit vector |ψ⟩ with 0 < ⟨ψ|ψ⟩ ≤ 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SubVector4 {
    amps: [C64; 4],
}

impl SubVector4 {
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        let n2 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if n2 <= 0.0 || n2 > 1.0 + 1e-12 {
            return Err(Error::ContractViolation(format!(
                "subnormalized vector must have 0 < norm² ≤ 1, got {n2}"
            )));
        }
        Ok(Self { amps })
    }

    /// Construction without the norm window check, for internal intermediate
    /// values (rotated decomposition members stay within the window anyway).
    pub(crate) fn raw(amps: [C64; 4]) -> Self {
        Self { amps }
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.amps
    }

    pub fn norm2(&self) -> f64 {
        norm2(&self.amps)
    }

    pub fn projector(&self) -> CMat {
        outer(&self.amps, &self.amps)
    }

    pub fn scaled(&self, c: C64) -> SubVector4 {
        let mut amps = self.amps;
        for a in amps.iter_mut() {
            *a *= c;
        }
        SubVector4 { amps }
    }

    /// cos·self + sin·other (the real rotations used during equalization).
    pub(crate) fn rotate_with(&self, other: &SubVector4, cos: f64, sin: f64) -> SubVector4 {
        let mut amps = [C64::new(0.0, 0.0); 4];
        for i in 0..4 {
            amps[i] = self.amps[i] * cos + other.amps[i] * sin;
        }
        SubVector4 { amps }
    }

    /// ρ_{A} = Tr_B |ψ⟩⟨ψ| (subnormalized).
    pub fn reduced_a(&self) -> CMat {
        let mut out = CMat::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                out[(i, j)] = self.amps[2 * i] * self.amps[2 * j].conj()
                    + self.amps[2 * i + 1] * self.amps[2 * j + 1].conj();
            }
        }
        out
    }
}

/// The antilinear spin flip v ↦ (σ_y ⊗ σ_y) v*.
pub fn spin_flip(v: &SubVector4) -> SubVector4 {
    let a = v.amps;
    SubVector4 {
        amps: [
            -a[3].conj(),
            a[2].conj(),
            a[1].conj(),
            -a[0].conj(),
        ],
    }
}

/// ⟨v|ṽ⟩, the spin-flip overlap entering concurrence and preconcurrence.
pub fn tilde_overlap(a: &SubVector4, b: &SubVector4) -> C64 {
    inner(&a.amps, &spin_flip(b).amps)
}

/// An ordered list of subnormalized vectors reconstructing some ϱ.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub members: Vec<SubVector4>,
}

impl Decomposition {
    pub fn reconstruct(&self) -> CMat {
        let mut m = CMat::zeros(4);
        for v in &self.members {
            m = m.add(&v.projector());
        }
        m
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.members.iter().map(|v| v.norm2()).collect()
    }
}

/// Parameters of the maximally entangled mixed state family.
#[derive(Debug, Clone, Copy)]
pub struct MemsParams {
    pub x: f64,
    pub g: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub p_zero: f64,
}

impl MemsParams {
    pub fn new(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("MEMS parameter x={x} outside [0, 1]")));
        }
        let g = if x <= 2.0 / 3.0 { 1.0 / 3.0 } else { x / 2.0 };
        Ok(Self {
            x,
            g,
            p_plus: g + x / 2.0,
            p_minus: g - x / 2.0,
            p_zero: 1.0 - 2.0 * g,
        })
    }
}

fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn ci(im: f64) -> C64 {
    C64::new(0.0, im)
}

/// The MEMS density matrix ϱ_x with concurrence x.
pub fn mems_state(x: f64) -> Result<DensityMatrix4> {
    let p = MemsParams::new(x)?;
    let z = cr(0.0);
    let mat = CMat::from_rows(&[
        vec![cr(p.g), z, z, cr(x / 2.0)],
        vec![z, cr(p.p_zero), z, z],
        vec![z, z, z, z],
        vec![cr(x / 2.0), z, z, cr(p.g)],
    ])?;
    DensityMatrix4::new(mat)
}

/// Subnormalized eigenvectors of ϱ_x: iφ⁺, iφ⁰, iφ⁻ in descending weight
/// order, with zero-weight members dropped.
pub fn mems_spectral(x: f64) -> Result<Decomposition> {
    let p = MemsParams::new(x)?;
    let mut members = Vec::new();
    if p.p_plus > MEMBER_DROP_TOL {
        let a = (p.p_plus / 2.0).sqrt();
        members.push(SubVector4::raw([ci(a), cr(0.0), cr(0.0), ci(a)]));
    }
    if p.p_zero > MEMBER_DROP_TOL {
        members.push(SubVector4::raw([
            cr(0.0),
            ci(p.p_zero.sqrt()),
            cr(0.0),
            cr(0.0),
        ]));
    }
    if p.p_minus > MEMBER_DROP_TOL {
        let a = (p.p_minus / 2.0).sqrt();
        members.push(SubVector4::raw([ci(a), cr(0.0), cr(0.0), ci(-a)]));
    }
    Ok(Decomposition { members })
}

/// The MEMS spectral members in the (φ⁺, φ⁻, φ⁰) role order used by the
/// optimal-decomposition construction, including zero-weight entries.
pub(crate) fn mems_eigvecs(p: &MemsParams) -> (SubVector4, SubVector4, SubVector4) {
    let ap = (p.p_plus.max(0.0) / 2.0).sqrt();
    let am = (p.p_minus.max(0.0) / 2.0).sqrt();
    let a0 = p.p_zero.max(0.0).sqrt();
    (
        SubVector4::raw([ci(ap), cr(0.0), cr(0.0), ci(ap)]),
        SubVector4::raw([ci(am), cr(0.0), cr(0.0), ci(-am)]),
        SubVector4::raw([cr(0.0), ci(a0), cr(0.0), cr(0.0)]),
    )
}

/// Spectral decomposition of ϱ into subnormalized eigenvectors √λ_k |e_k⟩,
/// dropping eigenvalues below 1e-12.
pub fn spectral_decomposition(rho: &DensityMatrix4) -> Result<Decomposition> {
    let eig = hermitian_eig(rho.matrix())?;
    let mut members = Vec::new();
    for (lam, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        if *lam > MEMBER_DROP_TOL {
            let s = lam.sqrt();
            let amps = [v[0] * s, v[1] * s, v[2] * s, v[3] * s];
            members.push(SubVector4::raw(amps));
        }
    }
    Ok(Decomposition { members })
}

/// The four λ_k of the concurrence construction, descending and clamped ≥ 0.
#[derive(Debug, Clone, Copy)]
pub struct ConcurrenceSpectrum {
    pub lambdas: [f64; 4],
}

impl ConcurrenceSpectrum {
    pub fn sqrt_lambdas(&self) -> [f64; 4] {
        [
            self.lambdas[0].sqrt(),
            self.lambdas[1].sqrt(),
            self.lambdas[2].sqrt(),
            self.lambdas[3].sqrt(),
        ]
    }
}

/// The Wootters τ matrix ⟨v_i|ṽ_j⟩ over the spectral members of ϱ.
///
/// Its Takagi singular values are the √λ_k of the concurrence formula; this
/// route is rank-exact and avoids the ill-conditioned multiple zero roots of
/// the ϱϱ̃ characteristic polynomial.
pub(crate) fn tau_matrix(members: &[SubVector4]) -> CMat {
    let n = members.len();
    let mut tau = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            tau[(i, j)] = tilde_overlap(&members[i], &members[j]);
        }
    }
    tau
}

/// λ_k (descending) of ϱ (σ_y⊗σ_y) ϱ* (σ_y⊗σ_y), via the τ-matrix Takagi
/// singular values.
pub fn concurrence_spectrum(rho: &DensityMatrix4) -> Result<ConcurrenceSpectrum> {
    let dec = spectral_decomposition(rho)?;
    let tau = tau_matrix(&dec.members);
    let fact = takagi(&tau)?;
    let mut lambdas = [0.0f64; 4];
    for (k, d) in fact.singulars.iter().enumerate().take(4) {
        lambdas[k] = d * d;
    }
    Ok(ConcurrenceSpectrum { lambdas })
}

/// Concurrence C(ϱ) = max{0, √λ₁ − √λ₂ − √λ₃ − √λ₄}.
pub fn concurrence(rho: &DensityMatrix4) -> Result<f64> {
    let d = concurrence_spectrum(rho)?.sqrt_lambdas();
    Ok((d[0] - d[1] - d[2] - d[3]).max(0.0))
}

/// Concurrence of a pure (subnormalized) state: |⟨ψ|ψ̃⟩| / ⟨ψ|ψ⟩.
pub fn concurrence_pure(v: &SubVector4) -> f64 {
    tilde_overlap(v, v).norm() / v.norm2()
}

/// The product matrix ϱ (σ_y⊗σ_y) ϱ* (σ_y⊗σ_y) whose eigenvalues are the
/// λ_k. Kept as the independent cross-check route for `general_eigenvalues`.
pub fn concurrence_product_matrix(rho: &DensityMatrix4) -> CMat {
    let z = cr(0.0);
    let o = cr(1.0);
    let syy = CMat::from_rows(&[
        vec![z, z, z, -o],
        vec![z, z, o, z],
        vec![z, o, z, z],
        vec![-o, z, z, z],
    ])
    .expect("fixed 4x4");
    let flipped = syy.mul(&rho.matrix().conj()).mul(&syy);
    rho.matrix().mul(&flipped)
}

fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// E as a function of C for qubit pairs: h((1 + √(1−C²))/2) with h the
/// binary entropy. (Standard closed form; the concurrence determines E
/// uniquely in this dimension.)
pub fn eof_from_concurrence(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).sqrt()))
}

/// Entanglement of formation of a two-qubit state.
pub fn entanglement_of_formation(rho: &DensityMatrix4) -> Result<f64> {
    Ok(eof_from_concurrence(concurrence(rho)?))
}

/// Entanglement of formation of a pure member (von Neumann entropy of its
/// normalized reduced state).
pub fn eof_pure(v: &SubVector4) -> f64 {
    eof_from_concurrence(concurrence_pure(v))
}

/// The relative operator ϱ(φ) = ⟨φ|ϱ|φ⟩ on H_B; positive with trace ≤ 1.
pub fn relative_operator(rho: &DensityMatrix4, phi: &[C64; 2]) -> Result<CMat> {
    let n2 = norm2(phi);
    if (n2 - 1.0).abs() > 1e-12 {
        return Err(Error::ContractViolation(format!(
            "probe vector must be unit, got norm² = {n2}"
        )));
    }
    let m = rho.matrix();
    let mut out = CMat::zeros(2);
    for j in 0..2 {
        for b in 0..2 {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..2 {
                for a in 0..2 {
                    acc += phi[i].conj() * m[(2 * i + j, 2 * a + b)] * phi[a];
                }
            }
            out[(j, b)] = acc;
        }
    }
    Ok(out)
}

/// The relative state of |ψ⟩ with respect to φ: component j = Σ_i φ_i* ψ_{ij}.
/// Antilinear in φ.
pub fn relative_state(psi: &SubVector4, phi: &[C64; 2]) -> [C64; 2] {
    let a = psi.amplitudes();
    [
        phi[0].conj() * a[0] + phi[1].conj() * a[2],
        phi[0].conj() * a[1] + phi[1].conj() * a[3],
    ]
}

// ---------------------------------------------------------------------------
// Density-matrix text format: 4 lines of 4 whitespace-separated complex
// entries written as `a+bi` / `a-bi` (bare reals also accepted), row-major,
// basis order |00⟩, |01⟩, |10⟩, |11⟩.
// ---------------------------------------------------------------------------

fn parse_complex(token: &str, line: usize, col: usize) -> Result<C64> {
    let t = token.trim();
    if t.is_empty() {
        return Err(Error::Parse { line, col, msg: "empty entry".into() });
    }
    let bad = |msg: String| Error::Parse { line, col, msg };
    if let Some(body) = t.strip_suffix(['i', 'I']) {
        // split at the last +/- that is not a leading sign or exponent sign
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let c = bytes[k] as char;
            if (c == '+' || c == '-')
                && !matches!(bytes[k - 1] as char, 'e' | 'E')
            {
                split = Some(k);
                break;
            }
        }
        match split {
            Some(k) => {
                let re: f64 = body[..k]
                    .parse()
                    .map_err(|_| bad(format!("bad real part in `{t}`")))?;
                let sign = if bytes[k] as char == '-' { -1.0 } else { 1.0 };
                let imag_str = &body[k + 1..];
                let im: f64 = if imag_str.is_empty() {
                    1.0
                } else {
                    imag_str
                        .parse()
                        .map_err(|_| bad(format!("bad imaginary part in `{t}`")))?
                };
                Ok(C64::new(re, sign * im))
            }
            None => {
                // purely imaginary: `bi`
                let im: f64 = if body.is_empty() || body == "+" {
                    1.0
                } else if body == "-" {
                    -1.0
                } else {
                    body.parse()
                        .map_err(|_| bad(format!("bad imaginary entry `{t}`")))?
                };
                Ok(C64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = t.parse().map_err(|_| bad(format!("bad real entry `{t}`")))?;
        Ok(C64::new(re, 0.0))
    }
}

/// Parse the density-matrix text format. Validation uses the looser
/// hand-typed-file tolerance (1e-8).
pub fn parse_density_matrix(text: &str) -> Result<DensityMatrix4> {
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if rows.len() == 4 {
            return Err(Error::Parse {
                line: lineno + 1,
                col: 1,
                msg: "more than 4 matrix rows".into(),
            });
        }
        let mut row = Vec::new();
        for tok in line.split_whitespace() {
            let col = raw.find(tok).map(|p| p + 1).unwrap_or(1);
            row.push(parse_complex(tok, lineno + 1, col)?);
        }
        if row.len() != 4 {
            return Err(Error::Parse {
                line: lineno + 1,
                col: 1,
                msg: format!("expected 4 entries per row, found {}", row.len()),
            });
        }
        rows.push(row);
    }
    if rows.len() != 4 {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            col: 1,
            msg: format!("expected 4 matrix rows, found {}", rows.len()),
        });
    }
    DensityMatrix4::with_tolerance(CMat::from_rows(&rows)?, FILE_TOL)
}

/// Render a matrix in the text format consumed by `parse_density_matrix`.
pub fn format_density_matrix(m: &CMat) -> String {
    let mut out = String::new();
    for i in 0..m.dim() {
        let row: Vec<String> = (0..m.dim())
            .map(|j| {
                let e = m[(i, j)];
                if e.im >= 0.0 {
                    format!("{}+{}i", e.re, e.im)
                } else {
                    format!("{}-{}i", e.re, -e.im)
                }
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
