//! Mach–Zehnder implementation of the decomposition-dependent phases: the
//! ancilla-extended state, the parallel-transport unitary family, and the
//! post-selected interference pattern, together with the closed-form
//! weighted sum it must reproduce.
//!
//! Layout note: the extended state lives on H_e ⊗ H_A ⊗ H_B with the ancilla
//! as the slow index, so the matrix is literally block-diagonal with one
//! 4×4 block |ψ_k⟩⟨ψ_k| per decomposition member.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::geophase::{pure_relative_phase, BlochLoop, NODAL_TOL};
use crate::linalg::CMat;
use crate::states::Decomposition;

/// ρ̃ = Σ_k |e_k⟩⟨e_k| ⊗ |ψ_k⟩⟨ψ_k| on a (4n)-dimensional space.
#[derive(Debug, Clone)]
pub struct AncillaExtendedState {
    mat: CMat,
    n: usize,
}

impl AncillaExtendedState {
    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn ancilla_dim(&self) -> usize {
        self.n
    }

    /// Tr_e ρ̃: sum of the diagonal blocks.
    pub fn trace_out_ancilla(&self) -> CMat {
        let mut out = CMat::zeros(4);
        for k in 0..self.n {
            for i in 0..4 {
                for j in 0..4 {
                    out[(i, j)] += self.mat[(4 * k + i, 4 * k + j)];
                }
            }
        }
        out
    }
}

/// Attach an orthonormal ancilla label to every decomposition member.
pub fn extend_with_ancilla(dec: &Decomposition) -> Result<AncillaExtendedState> {
    let n = dec.len();
    if n == 0 {
        return Err(Error::Domain("empty decomposition".into()));
    }
    let mut mat = CMat::zeros(4 * n);
    for (k, m) in dec.members.iter().enumerate() {
        let block = m.projector();
        for i in 0..4 {
            for j in 0..4 {
                mat[(4 * k + i, 4 * k + j)] = block[(i, j)];
            }
        }
    }
    Ok(AncillaExtendedState { mat, n })
}

/// The 2×2 unitaries u_s with u_s|φ_0⟩ = |φ_s⟩ for a constant-latitude loop,
/// one per loop sample. Other path families are not supported.
pub fn loop_unitary_family(bloch: &BlochLoop) -> Result<Vec<CMat>> {
    let samples = bloch.samples();
    let first = &samples[0];
    if first[1].norm() < 1e-9 {
        return Err(Error::NotImplemented(
            "unitary family undefined at the pole".into(),
        ));
    }
    let mag0 = first[0].norm();
    let mag1 = first[1].norm();
    let mut out = Vec::with_capacity(samples.len());
    for s in samples {
        if (s[0] - first[0]).norm() > 1e-12 || (s[1].norm() - mag1).abs() > 1e-12 {
            return Err(Error::NotImplemented(
                "only constant-latitude loops have a supported unitary family".into(),
            ));
        }
        let _ = mag0;
        let ratio = s[1] / first[1];
        let phase = ratio / ratio.norm();
        let mut u = CMat::zeros(2);
        u[(0, 0)] = C64::new(1.0, 0.0);
        u[(1, 1)] = phase;
        out.push(u);
    }
    Ok(out)
}

/// Accumulated parallel-transport phases θ_k(s_j) on the loop grid, one row
/// per decomposition member, with θ_k(0) = 0:
/// θ̇_k = Im ⟨φ|ρ_{A;k}|φ̇⟩ / ⟨φ|ρ_{A;k}|φ⟩, discretized exactly like
/// `pure_relative_phase` so the two stay consistent term by term.
#[derive(Debug, Clone)]
pub struct ParallelTransportPhases {
    pub theta: Vec<Vec<f64>>,
}

pub fn parallel_transport_phases(
    dec: &Decomposition,
    bloch: &BlochLoop,
) -> Result<ParallelTransportPhases> {
    let samples = bloch.samples();
    let mut theta = Vec::with_capacity(dec.len());
    for (k, m) in dec.members.iter().enumerate() {
        let rho_a = m.reduced_a();
        let mut row = Vec::with_capacity(samples.len());
        row.push(0.0);
        let mut acc = 0.0f64;
        for j in 0..bloch.segments() {
            let a = &samples[j];
            let b = &samples[j + 1];
            let mid = [(a[0] + b[0]) * 0.5, (a[1] + b[1]) * 0.5];
            let nm = (mid[0].norm_sqr() + mid[1].norm_sqr()).sqrt();
            let mid = [mid[0] / nm, mid[1] / nm];
            let den = rho_a.sandwich(&mid, &mid).re;
            if den <= NODAL_TOL {
                return Err(Error::NodalPassage { member: Some(k) });
            }
            let delta = [b[0] - a[0], b[1] - a[1]];
            acc += (rho_a.sandwich(&mid, &delta) / den).im;
            row.push(acc);
        }
        theta.push(row);
    }
    Ok(ParallelTransportPhases { theta })
}

/// Visibility and phase of a post-selected interference pattern.
#[derive(Debug, Clone, Copy)]
pub struct InterferenceResult {
    pub visibility: f64,
    pub phase: f64,
}

/// Evaluate Tr ⟨φ_0| U₁^∥ ρ̃ |φ_0⟩ literally on the (4n)-dimensional
/// matrices, with U₁^∥ = Σ_k e^{iθ_k(1)} u₁† ⊗ 1_B ⊗ |e_k⟩⟨e_k|.
pub fn interference_pattern(
    state: &AncillaExtendedState,
    dec: &Decomposition,
    bloch: &BlochLoop,
) -> Result<InterferenceResult> {
    let n = state.ancilla_dim();
    if n != dec.len() {
        return Err(Error::Shape {
            expected: format!("{} ancilla blocks", dec.len()),
            got: format!("{n}"),
        });
    }
    let us = loop_unitary_family(bloch)?;
    let u_last = us.last().expect("non-empty loop").clone();
    let pt = parallel_transport_phases(dec, bloch)?;

    // U = blockdiag_k e^{iθ_k(1)} (u₁† ⊗ 1_B)
    let u1_dag = u_last.adjoint();
    let id_b = CMat::identity(2);
    let u_block = u1_dag.kron(&id_b);
    let mut u = CMat::zeros(4 * n);
    for (k, row) in pt.theta.iter().enumerate() {
        let phase = C64::from_polar(1.0, *row.last().expect("grid"));
        for i in 0..4 {
            for j in 0..4 {
                u[(4 * k + i, 4 * k + j)] = phase * u_block[(i, j)];
            }
        }
    }

    let m = u.mul(state.matrix());
    // ⟨φ_0| · |φ_0⟩ over the A factor, then trace over B and the ancilla
    let phi0 = &bloch.samples()[0];
    let mut tr = C64::new(0.0, 0.0);
    for k in 0..n {
        for b in 0..2 {
            for ia in 0..2 {
                for ja in 0..2 {
                    tr += phi0[ia].conj()
                        * m[(4 * k + 2 * ia + b, 4 * k + 2 * ja + b)]
                        * phi0[ja];
                }
            }
        }
    }
    let visibility = tr.norm();
    if visibility < NODAL_TOL {
        return Err(Error::UndefinedPhase("zero interference visibility".into()));
    }
    Ok(InterferenceResult { visibility, phase: tr.arg() })
}

/// The closed-form pattern Φ(Σ_k |⟨φ_1|ρ_{A;k}|φ_0⟩| e^{iγ_k}).
///
/// For closed loops the weights equal ⟨φ_0|ρ_{A;k}|φ_0⟩, which differ from
/// the ⟨ψ_k|ψ_k⟩ weights of the first-moment phases.
pub fn interferometric_phase_formula(
    dec: &Decomposition,
    bloch: &BlochLoop,
) -> Result<InterferenceResult> {
    let samples = bloch.samples();
    let phi0 = &samples[0];
    let phi1 = samples.last().unwrap();
    let mut z = C64::new(0.0, 0.0);
    for (k, m) in dec.members.iter().enumerate() {
        let gamma = pure_relative_phase(m, bloch).map_err(|e| match e {
            Error::NodalPassage { .. } => Error::NodalPassage { member: Some(k) },
            other => other,
        })?;
        let w = m.reduced_a().sandwich(phi1, phi0).norm();
        z += C64::from_polar(w, gamma);
    }
    let visibility = z.norm();
    if visibility < NODAL_TOL {
        return Err(Error::UndefinedPhase("zero formula modulus".into()));
    }
    Ok(InterferenceResult { visibility, phase: z.arg() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geophase::base_loop_phase;
    use crate::states::{
        mems_spectral, mems_state, spectral_decomposition, DensityMatrix4, SubVector4,
    };
    use crate::wootters::optimal_decomposition;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn ancilla_extension_recovers_state() {
        let dec = mems_spectral(0.5).unwrap();
        let ext = extend_with_ancilla(&dec).unwrap();
        assert_eq!(ext.matrix().dim(), 12);
        let back = ext.trace_out_ancilla();
        assert!(back.max_abs_diff(mems_state(0.5).unwrap().matrix()) <= 1e-10);
        // block weights are the member norms
        for (k, m) in dec.members.iter().enumerate() {
            let mut tr = c(0.0, 0.0);
            for i in 0..4 {
                tr += ext.matrix()[(4 * k + i, 4 * k + i)];
            }
            assert!((tr.re - m.norm2()).abs() <= 1e-14);
        }
        // hermitian unit trace
        assert!(ext.matrix().is_hermitian(1e-12));
        assert!((ext.matrix().trace().re - 1.0).abs() <= 1e-10);

        // single member: ϱ ⊗ |e⟩⟨e| is just the block itself
        let single = Decomposition { members: vec![dec.members[0].clone()] };
        let ext = extend_with_ancilla(&single).unwrap();
        assert_eq!(ext.matrix().dim(), 4);

        let empty = Decomposition { members: vec![] };
        assert!(extend_with_ancilla(&empty).is_err());
    }

    #[test]
    fn unitary_family_endpoints() {
        let l = BlochLoop::constant_latitude(0.45 * PI, 64).unwrap();
        let us = loop_unitary_family(&l).unwrap();
        assert_eq!(us.len(), 65);
        assert!(us[0].max_abs_diff(&CMat::identity(2)) <= 1e-15);
        assert!(us[64].max_abs_diff(&CMat::identity(2)) <= 1e-15);
        // halfway: diag(1, -1)
        let mid = &us[32];
        assert!((mid[(1, 1)] + c(1.0, 0.0)).norm() <= 1e-12);
        // u_s maps φ_0 to φ_s
        for (u, s) in us.iter().zip(l.samples()) {
            let mapped = u.mul_vec(&[l.samples()[0][0], l.samples()[0][1]]);
            assert!((mapped[0] - s[0]).norm() <= 1e-12);
            assert!((mapped[1] - s[1]).norm() <= 1e-12);
        }

        // non-constant-latitude loops are refused
        let mut samples: Vec<[C64; 2]> = l.samples().to_vec();
        let t = 0.4f64;
        samples[5] = [c(t.cos(), 0.0), c(t.sin(), 0.0)];
        let bad = BlochLoop::from_samples(samples).unwrap();
        assert!(matches!(
            loop_unitary_family(&bad),
            Err(Error::NotImplemented(_))
        ));
    }

    #[test]
    fn parallel_transport_consistency() {
        let l = BlochLoop::constant_latitude(0.45 * PI, 2048).unwrap();
        let dec = mems_spectral(0.5).unwrap();
        let pt = parallel_transport_phases(&dec, &l).unwrap();
        for (k, m) in dec.members.iter().enumerate() {
            assert_eq!(pt.theta[k][0], 0.0);
            let total = *pt.theta[k].last().unwrap();
            let gamma = pure_relative_phase(m, &l).unwrap();
            assert!((total - gamma).abs() <= 1e-12, "θ_k(1) must equal γ_k");
            // member scaling does not change the transported phase
            let scaled = Decomposition { members: vec![m.scaled(c(0.5, 0.0))] };
            let pt2 = parallel_transport_phases(&scaled, &l).unwrap();
            assert!((pt2.theta[0].last().unwrap() - total).abs() <= 1e-12);
        }
    }

    #[test]
    fn simulation_matches_formula_for_mems() {
        let l = BlochLoop::constant_latitude(0.45 * PI, 4096).unwrap();
        for x in [0.2, 0.5, 0.8] {
            for dec in [
                mems_spectral(x).unwrap(),
                Decomposition {
                    members: optimal_decomposition(&mems_state(x).unwrap())
                        .unwrap()
                        .members,
                },
            ] {
                let ext = extend_with_ancilla(&dec).unwrap();
                let sim = interference_pattern(&ext, &dec, &l).unwrap();
                let form = interferometric_phase_formula(&dec, &l).unwrap();
                assert!((sim.phase - form.phase).abs() <= 1e-6);
                assert!((sim.visibility - form.visibility).abs() <= 1e-9);
                assert!(sim.visibility <= 1.0 + 1e-10);
            }
        }
    }

    #[test]
    fn pure_state_interference_gives_member_phase() {
        let l = BlochLoop::constant_latitude(0.45 * PI, 2048).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = SubVector4::raw([c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        let dec = Decomposition { members: vec![bell.clone()] };
        let ext = extend_with_ancilla(&dec).unwrap();
        let sim = interference_pattern(&ext, &dec, &l).unwrap();
        let gamma = pure_relative_phase(&bell, &l).unwrap();
        assert!((sim.phase - gamma).abs() <= 1e-6);
    }

    #[test]
    fn interferometric_weights_differ_from_first_moment_weights() {
        // on MEMS(0.5) the |⟨φ₁|ρ_{A;k}|φ₀⟩| weights are not ⟨ψ_k|ψ_k⟩
        let l = BlochLoop::constant_latitude(0.45 * PI, 1024).unwrap();
        let dec = mems_spectral(0.5).unwrap();
        let phi0 = &l.samples()[0];
        let w0 = dec.members[0].reduced_a().sandwich(phi0, phi0).norm();
        assert!((w0 - dec.members[0].norm2()).abs() > 1e-3);
    }

    #[test]
    fn separable_interference_phase_vanishes() {
        let l = BlochLoop::constant_latitude(0.45 * PI, 2048).unwrap();
        // |0⟩⟨0| ⊗ ρ_B with its natural product decomposition
        let members = vec![
            SubVector4::raw([c(0.6f64.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
            SubVector4::raw([c(0.0, 0.0), c(0.4f64.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
        ];
        let dec = Decomposition { members };
        let ext = extend_with_ancilla(&dec).unwrap();
        let sim = interference_pattern(&ext, &dec, &l).unwrap();
        assert!(sim.phase.abs() <= 1e-9, "separable Γ̃ = {}", sim.phase);
        let form = interferometric_phase_formula(&dec, &l).unwrap();
        assert!(form.phase.abs() <= 1e-9);
    }

    #[test]
    fn trivial_loop_full_visibility() {
        // constant loop at φ_0 with ϱ = |φ_0⟩⟨φ_0| ⊗ |0⟩⟨0|
        let theta: f64 = 0.45 * PI;
        let phi0 = [c((theta / 2.0).cos(), 0.0), c((theta / 2.0).sin(), 0.0)];
        let samples = vec![phi0; 17];
        let l = BlochLoop::from_samples(samples).unwrap();
        let member = SubVector4::raw([phi0[0], c(0.0, 0.0), phi0[1], c(0.0, 0.0)]);
        let dec = Decomposition { members: vec![member] };
        let ext = extend_with_ancilla(&dec).unwrap();
        let sim = interference_pattern(&ext, &dec, &l).unwrap();
        assert!((sim.visibility - 1.0).abs() <= 1e-10);
        assert!(sim.phase.abs() <= 1e-12);
    }

    #[test]
    fn formula_reproduces_gamma_tilde_weights_for_mems() {
        // Γ̃ with spectral weights |⟨φ₁|ρ_{A;k}|φ₀⟩| against a direct sum
        let l = BlochLoop::constant_latitude(0.45 * PI, 4096).unwrap();
        let gl = base_loop_phase(&l).unwrap();
        let dec = mems_spectral(0.5).unwrap();
        let phi0 = &l.samples()[0];
        let mut z = c(0.0, 0.0);
        for m in &dec.members {
            let w = m.reduced_a().sandwich(phi0, phi0).re;
            let gamma = pure_relative_phase(m, &l).unwrap();
            z += C64::from_polar(w, gamma);
        }
        let form = interferometric_phase_formula(&dec, &l).unwrap();
        assert!((form.phase - z.arg()).abs() <= 1e-12);
        // the φ± members carry phase −γ_L
        let g0 = pure_relative_phase(&dec.members[0], &l).unwrap();
        assert!((g0 + gl).abs() <= 1e-9);
    }

    #[test]
    fn mismatched_state_and_decomposition_rejected() {
        let l = BlochLoop::constant_latitude(0.45 * PI, 64).unwrap();
        let dec3 = mems_spectral(0.5).unwrap();
        let dec1 = Decomposition { members: vec![dec3.members[0].clone()] };
        let ext = extend_with_ancilla(&dec3).unwrap();
        assert!(matches!(
            interference_pattern(&ext, &dec1, &l),
            Err(Error::Shape { .. })
        ));
        let _ = spectral_decomposition(&mems_state(0.5).unwrap()).unwrap();
        let _ = DensityMatrix4::from_pure(&dec3.members[0].scaled(c(
            1.0 / dec3.members[0].norm2().sqrt(),
            0.0,
        )));
    }
}
