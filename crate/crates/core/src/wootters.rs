//! Construction of the entanglement-minimizing (optimal) decomposition of an
//! entangled two-qubit state: intermediate decomposition with signed
//! spin-flip overlaps, preconcurrence bookkeeping, and sequential pairwise
//! equalization.
//!
//! The optimal decomposition is not unique in general. Two choices are fixed
//! here to make the output deterministic and to reproduce the published MEMS
//! curves: (1) each intermediate member y_k (k ≥ 2) is sign-aligned against
//! y_1 at the first index attaining max_i |y_1[i]| (the Takagi columns carry
//! a ±1 freedom that changes the induced phase sums); (2) ties among equal
//! preconcurrences are broken toward the lowest index. `enumerate_ties`
//! surfaces the alternatives for degenerate inputs such as Bell-diagonal
//! states.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::takagi;
use crate::states::{
    concurrence, mems_eigvecs, spectral_decomposition, tau_matrix, tilde_overlap,
    DensityMatrix4, MemsParams, SubVector4, MEMBER_DROP_TOL,
};

/// Decomposition {y_k} with diagonal spin-flip overlap structure:
/// ⟨y_1|ỹ_1⟩ = +√λ₁ and ⟨y_k|ỹ_k⟩ = −√λ_k for k ≥ 2.
#[derive(Debug, Clone)]
pub struct IntermediateDecomposition {
    pub members: Vec<SubVector4>,
    /// The signed diagonal ⟨y_k|ỹ_k⟩.
    pub tilde_overlaps: Vec<f64>,
}

/// Decomposition {ζ_k} in which every member's pure-state concurrence equals
/// C(ϱ); realizes the entanglement-of-formation minimum for qubit pairs.
#[derive(Debug, Clone)]
pub struct OptimalDecomposition {
    pub members: Vec<SubVector4>,
    pub concurrence: f64,
}

/// One pairwise equalization step, for reporting.
#[derive(Debug, Clone)]
pub struct EqualizationStep {
    /// Preconcurrences of the still-active members before the rotation,
    /// as (member index, value).
    pub preconcurrences: Vec<(usize, f64)>,
    pub max_index: usize,
    pub min_index: usize,
    pub angle: f64,
    /// Whether several members tied (within 1e-9) for the extremal slot.
    pub tied: bool,
}

impl OptimalDecomposition {
    /// Members with squared norm above the drop threshold.
    pub fn live_members(&self) -> Vec<&SubVector4> {
        self.members
            .iter()
            .filter(|m| m.norm2() > MEMBER_DROP_TOL)
            .collect()
    }
}

/// Preconcurrence c(y) = ⟨y|ỹ⟩ / ⟨y|y⟩ of a phase-fixed member.
///
/// The overlap must already be real (|Im| ≤ 1e-9) — this is what the
/// intermediate construction guarantees.
pub fn preconcurrence(y: &SubVector4) -> Result<f64> {
    let n2 = y.norm2();
    if n2 <= 1e-12 {
        return Err(Error::ContractViolation(
            "preconcurrence of a (near-)zero member".into(),
        ));
    }
    let t = tilde_overlap(y, y);
    if t.im.abs() > 1e-9 {
        return Err(Error::ContractViolation(format!(
            "spin-flip overlap has residual imaginary part {:e}",
            t.im
        )));
    }
    Ok((t.re / n2).clamp(-1.0, 1.0))
}

/// Norm-weighted average preconcurrence Σ_k ⟨y_k|y_k⟩ c(y_k) = Σ_k Re⟨y_k|ỹ_k⟩.
pub fn average_preconcurrence(members: &[SubVector4]) -> f64 {
    members.iter().map(|y| tilde_overlap(y, y).re).sum()
}

/// The intermediate decomposition of an entangled ϱ.
///
/// Built from the spectral members v_i via the Takagi factorization of
/// τ_ij = ⟨v_i|ṽ_j⟩: the rotated members x_k have ⟨x_k|x̃_l⟩ = δ_kl √λ_k,
/// and multiplying x_k (k ≥ 2) by i flips the overlap sign (the spin flip is
/// antilinear), realizing the (+√λ₁, −√λ₂, …) diagonal.
pub fn intermediate_decomposition(rho: &DensityMatrix4) -> Result<IntermediateDecomposition> {
    let spectral = spectral_decomposition(rho)?;
    let members = &spectral.members;
    let n = members.len();
    let tau = tau_matrix(members);
    let fact = takagi(&tau)?;
    let c = fact.singulars[0] - fact.singulars[1..].iter().sum::<f64>();
    if c <= 0.0 {
        return Err(Error::Separable);
    }

    // x_k = Σ_i U_ik v_i
    let mut xs: Vec<SubVector4> = Vec::with_capacity(n);
    for k in 0..n {
        let mut amps = [C64::new(0.0, 0.0); 4];
        for (i, v) in members.iter().enumerate() {
            let u = fact.unitary[(i, k)];
            for (aj, vj) in amps.iter_mut().zip(v.amplitudes()) {
                *aj += u * vj;
            }
        }
        xs.push(SubVector4::raw(amps));
    }

    let mut ys: Vec<SubVector4> = Vec::with_capacity(n);
    ys.push(xs[0].clone());
    for x in xs.iter().skip(1) {
        ys.push(x.scaled(C64::new(0.0, 1.0)));
    }

    // ±1 alignment of y_k against y_1 at the first-of-tied-max component
    let mags: Vec<f64> = ys[0].amplitudes().iter().map(|a| a.norm()).collect();
    let max = mags.iter().fold(0.0f64, |a, &b| a.max(b));
    let j_star = mags
        .iter()
        .position(|&m| m >= max - 1e-9 * max.max(1.0))
        .unwrap_or(0);
    let anchor = ys[0].amplitudes()[j_star];
    for y in ys.iter_mut().skip(1) {
        let comp = y.amplitudes()[j_star];
        if comp.norm() > 1e-9 * y.norm2().sqrt() && (anchor.conj() * comp).re < 0.0 {
            *y = y.scaled(C64::new(-1.0, 0.0));
        }
    }

    let overlaps: Vec<f64> = ys.iter().map(|y| tilde_overlap(y, y).re).collect();
    Ok(IntermediateDecomposition { members: ys, tilde_overlaps: overlaps })
}

/// How to resolve ties among equal extremal preconcurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TieChoice {
    LowestIndex,
    /// Force a specific active-list position for the minimum at one step.
    MinAt { step: usize, position: usize },
}

fn equalize(
    ys: &[SubVector4],
    target: f64,
    tie: TieChoice,
) -> Result<(Vec<SubVector4>, Vec<EqualizationStep>)> {
    let mut members: Vec<SubVector4> = ys.to_vec();
    let mut active: Vec<usize> = (0..members.len()).collect();
    let mut steps = Vec::new();

    for step in 0..members.len().saturating_sub(1) {
        let cs: Vec<(usize, f64)> = active
            .iter()
            .map(|&i| Ok((i, preconcurrence(&members[i])?)))
            .collect::<Result<_>>()?;
        let (mut imax, mut cmax) = (cs[0].0, cs[0].1);
        let (mut imin, mut cmin) = (cs[0].0, cs[0].1);
        for &(i, c) in &cs[1..] {
            if c > cmax + 1e-15 {
                imax = i;
                cmax = c;
            }
            if c < cmin - 1e-15 {
                imin = i;
                cmin = c;
            }
        }
        let tied = cs
            .iter()
            .filter(|&&(i, c)| i != imin && (c - cmin).abs() <= 1e-9)
            .count()
            > 0
            || cs
                .iter()
                .filter(|&&(i, c)| i != imax && (c - cmax).abs() <= 1e-9)
                .count()
                > 0;
        if let TieChoice::MinAt { step: s, position } = tie {
            if s == step {
                let min_candidates: Vec<usize> = cs
                    .iter()
                    .filter(|&&(_, c)| (c - cmin).abs() <= 1e-9)
                    .map(|&(i, _)| i)
                    .collect();
                if position < min_candidates.len() {
                    imin = min_candidates[position];
                }
            }
        }
        if (cmax - cmin).abs() <= 1e-12 || imax == imin {
            break;
        }

        let yi = members[imax].clone();
        let yj = members[imin].clone();
        let f = |beta: f64| -> f64 {
            let z = yi.rotate_with(&yj, beta.cos(), beta.sin());
            tilde_overlap(&z, &z).re - target * z.norm2()
        };
        let f0 = f(0.0);
        let beta = if f0 <= 0.0 {
            // max member already at (or numerically below) the target
            if f0 < -1e-9 {
                return Err(Error::Internal(format!(
                    "equalization bracket lost: f(0) = {f0:e}"
                )));
            }
            0.0
        } else {
            // f(0) ≥ 0 ≥ f(π/2); bisect the sign change
            let (mut lo, mut hi) = (0.0f64, std::f64::consts::FRAC_PI_2);
            if f(hi) > 0.0 {
                return Err(Error::Internal(format!(
                    "equalization bracket lost: f(pi/2) = {:e}",
                    f(hi)
                )));
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) >= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-12 {
                    break;
                }
            }
            0.5 * (lo + hi)
        };

        let (c, s) = (beta.cos(), beta.sin());
        members[imax] = yi.rotate_with(&yj, c, s);
        members[imin] = yi.rotate_with(&yj, -s, c).scaled(C64::new(1.0, 0.0));
        // fixed member leaves the active set
        steps.push(EqualizationStep {
            preconcurrences: cs,
            max_index: imax,
            min_index: imin,
            angle: beta,
            tied,
        });
        active.retain(|&i| i != imax);
    }
    Ok((members, steps))
}

fn finish(members: Vec<SubVector4>, target: f64) -> Result<OptimalDecomposition> {
    for m in &members {
        if m.norm2() > MEMBER_DROP_TOL {
            let c = preconcurrence(m)?;
            if (c - target).abs() > 1e-8 {
                return Err(Error::Internal(format!(
                    "equalization left preconcurrence {c} != C = {target}"
                )));
            }
        }
    }
    let members = members
        .into_iter()
        .filter(|m| m.norm2() > MEMBER_DROP_TOL)
        .collect();
    Ok(OptimalDecomposition { members, concurrence: target })
}

/// The optimal decomposition of an entangled ϱ, with the equalization trace.
pub fn optimal_decomposition_traced(
    rho: &DensityMatrix4,
) -> Result<(OptimalDecomposition, Vec<EqualizationStep>)> {
    let c = concurrence(rho)?;
    if c <= 0.0 {
        return Err(Error::Separable);
    }
    let inter = intermediate_decomposition(rho)?;
    let (members, steps) = equalize(&inter.members, c, TieChoice::LowestIndex)?;
    Ok((finish(members, c)?, steps))
}

/// The optimal decomposition of an entangled ϱ.
pub fn optimal_decomposition(rho: &DensityMatrix4) -> Result<OptimalDecomposition> {
    optimal_decomposition_traced(rho).map(|(d, _)| d)
}

/// Alternative equalization outcomes reachable by resolving a degenerate
/// minimum differently at one step. Returns (description, decomposition)
/// pairs; the first entry is always the default lowest-index outcome.
pub fn enumerate_ties(
    rho: &DensityMatrix4,
) -> Result<Vec<(String, OptimalDecomposition)>> {
    let c = concurrence(rho)?;
    if c <= 0.0 {
        return Err(Error::Separable);
    }
    let inter = intermediate_decomposition(rho)?;
    let (default, steps) = equalize(&inter.members, c, TieChoice::LowestIndex)?;
    let mut out = vec![("default (lowest index)".to_string(), finish(default, c)?)];
    for (snum, step) in steps.iter().enumerate() {
        if !step.tied {
            continue;
        }
        let min_ties = step
            .preconcurrences
            .iter()
            .filter(|(_, cv)| {
                (cv - step
                    .preconcurrences
                    .iter()
                    .map(|(_, w)| *w)
                    .fold(f64::INFINITY, f64::min))
                    .abs()
                    <= 1e-9
            })
            .count();
        for pos in 1..min_ties {
            let (alt, _) =
                equalize(&inter.members, c, TieChoice::MinAt { step: snum, position: pos })?;
            out.push((
                format!("step {snum}: minimum resolved to tied candidate #{pos}"),
                finish(alt, c)?,
            ));
        }
    }
    Ok(out)
}

/// The closed-form MEMS optimal decomposition
/// (ζ₁, ζ₂ = (±sinα φ⁺ ∓ cosα φ⁻ + φ⁰)/√2, ζ₃ = cosα φ⁺ + sinα φ⁻)
/// with cos 2α = f/(6f² − 1), f = x/2 + 1/3 − g(x), α ∈ [0, π/2].
///
/// On x ∈ [2/3, 1] the third member has zero norm and is dropped.
pub fn mems_optimal_decomposition(x: f64) -> Result<OptimalDecomposition> {
    if x <= 0.0 {
        return Err(Error::Domain(
            "MEMS optimal decomposition needs x > 0 (separable shortcut applies at 0)".into(),
        ));
    }
    let p = MemsParams::new(x)?;
    let f = x / 2.0 + 1.0 / 3.0 - p.g;
    let cos2a = (f / (6.0 * f * f - 1.0)).clamp(-1.0, 1.0);
    let sin_a = ((1.0 - cos2a) / 2.0).sqrt();
    let cos_a = ((1.0 + cos2a) / 2.0).sqrt();
    let (phi_p, phi_m, phi_0) = mems_eigvecs(&p);

    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut z1 = [C64::new(0.0, 0.0); 4];
    let mut z2 = [C64::new(0.0, 0.0); 4];
    let mut z3 = [C64::new(0.0, 0.0); 4];
    for i in 0..4 {
        let (vp, vm, v0) = (phi_p.amplitudes()[i], phi_m.amplitudes()[i], phi_0.amplitudes()[i]);
        z1[i] = (vp * sin_a - vm * cos_a + v0) * inv_sqrt2;
        z2[i] = (-vp * sin_a + vm * cos_a + v0) * inv_sqrt2;
        z3[i] = vp * cos_a + vm * sin_a;
    }
    let members: Vec<SubVector4> = [z1, z2, z3]
        .into_iter()
        .map(SubVector4::raw)
        .filter(|m| m.norm2() > MEMBER_DROP_TOL)
        .collect();
    Ok(OptimalDecomposition { members, concurrence: x })
}

/// First-moment phase-factor sum Σ_k ⟨ζ_k|ζ_k⟩ e^{iγ_k} over given member
/// phases — a helper for comparing decompositions in tests and reports.
pub fn weighted_phase_sum(members: &[&SubVector4], gammas: &[f64]) -> C64 {
    members
        .iter()
        .zip(gammas)
        .map(|(m, g)| C64::from_polar(m.norm2(), *g))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner, outer, CMat};
    use crate::states::{concurrence_pure, mems_state};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_entangled(rng: &mut impl Rng) -> DensityMatrix4 {
        loop {
            let rank = 1 + rng.gen::<usize>() % 4;
            let mut m = CMat::zeros(4);
            for _ in 0..rank {
                let mut v = [c(0.0, 0.0); 4];
                for a in v.iter_mut() {
                    *a = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                }
                let w = rng.gen::<f64>() + 0.05;
                let n: f64 = v.iter().map(|x| x.norm_sqr()).sum();
                m = m.add(&outer(&v, &v).scale(c(w / n, 0.0)));
            }
            let tr = m.trace().re;
            let rho = DensityMatrix4::new(m.scale(c(1.0 / tr, 0.0))).unwrap();
            if concurrence(&rho).unwrap() > 1e-3 {
                return rho;
            }
        }
    }

    fn bell_diagonal(weights: [f64; 4]) -> DensityMatrix4 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bells = [
            [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)],
            [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-s, 0.0)],
            [c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)],
        ];
        let mut m = CMat::zeros(4);
        for (w, b) in weights.iter().zip(&bells) {
            m = m.add(&outer(b, b).scale(c(*w, 0.0)));
        }
        DensityMatrix4::new(m).unwrap()
    }

    #[test]
    fn intermediate_pure_entangled() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = SubVector4::raw([c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        let rho = DensityMatrix4::from_pure(&bell).unwrap();
        let inter = intermediate_decomposition(&rho).unwrap();
        assert_eq!(inter.members.len(), 1);
        assert!((inter.tilde_overlaps[0] - 1.0).abs() < 1e-12);
        assert!(
            inter.members[0].projector().max_abs_diff(rho.matrix()) < 1e-12,
            "single member must be the state itself up to phase"
        );
    }

    #[test]
    fn intermediate_bell_diagonal_members_are_bell_states() {
        let rho = bell_diagonal([0.7, 0.1, 0.1, 0.1]);
        let inter = intermediate_decomposition(&rho).unwrap();
        assert_eq!(inter.members.len(), 4);
        assert!((inter.tilde_overlaps[0] - 0.7).abs() < 1e-9);
        for t in &inter.tilde_overlaps[1..] {
            assert!((t + 0.1).abs() < 1e-9);
        }
        // each member is one Bell state up to phase: its normalized projector
        // must be diagonal in the Bell basis with a single unit entry
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bells = [
            [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)],
            [c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-s, 0.0)],
            [c(0.0, 0.0), c(s, 0.0), c(s, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)],
        ];
        for y in &inter.members {
            let overlaps: Vec<f64> = bells
                .iter()
                .map(|b| inner(b, y.amplitudes()).norm() / y.norm2().sqrt())
                .collect();
            let hits = overlaps.iter().filter(|&&o| o > 1.0 - 1e-9).count();
            assert_eq!(hits, 1, "member not a Bell state: overlaps {overlaps:?}");
        }
    }

    #[test]
    fn intermediate_mems_invariants() {
        let rho = mems_state(0.5).unwrap();
        let inter = intermediate_decomposition(&rho).unwrap();
        assert_eq!(inter.members.len(), 3);
        let mut rec = CMat::zeros(4);
        for y in &inter.members {
            rec = rec.add(&y.projector());
        }
        assert!(rec.max_abs_diff(rho.matrix()) <= 1e-10);
        for (i, yi) in inter.members.iter().enumerate() {
            for (j, yj) in inter.members.iter().enumerate() {
                if i != j {
                    assert!(tilde_overlap(yi, yj).norm() <= 1e-9);
                }
            }
        }
        assert!((inter.tilde_overlaps[0] - 7.0 / 12.0).abs() < 1e-9);
    }

    #[test]
    fn intermediate_refuses_separable() {
        let rho = mems_state(0.0).unwrap();
        assert!(matches!(intermediate_decomposition(&rho), Err(Error::Separable)));
    }

    #[test]
    fn preconcurrence_cases() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // i·Bell has preconcurrence +1
        let bell = SubVector4::raw([c(0.0, s), c(0.0, 0.0), c(0.0, 0.0), c(0.0, s)]);
        assert!((preconcurrence(&bell).unwrap() - 1.0).abs() < 1e-12);
        // real Bell has -1
        let bell_r = SubVector4::raw([c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        assert!((preconcurrence(&bell_r).unwrap() + 1.0).abs() < 1e-12);
        // product state: 0
        let prod = SubVector4::raw([c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(preconcurrence(&prod).unwrap().abs() < 1e-15);
        // unfixed phase rejected
        let mixed = SubVector4::raw([c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.8)]);
        assert!(preconcurrence(&mixed).is_err());
    }

    #[test]
    fn average_preconcurrence_is_concurrence_and_orthogonally_invariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for x in [0.3, 0.5, 0.8] {
            let rho = mems_state(x).unwrap();
            let inter = intermediate_decomposition(&rho).unwrap();
            let avg = average_preconcurrence(&inter.members);
            assert!((avg - x).abs() <= 1e-9, "⟨c⟩ = {avg} at x = {x}");

            // random real orthogonal remixing preserves the average
            let n = inter.members.len();
            for _ in 0..100 {
                let mut members = inter.members.clone();
                // compose a few random Givens rotations
                for _ in 0..4 {
                    let i = rng.gen::<usize>() % n;
                    let mut j = rng.gen::<usize>() % n;
                    if i == j {
                        j = (j + 1) % n;
                    }
                    let th = rng.gen::<f64>() * std::f64::consts::PI;
                    let a = members[i].rotate_with(&members[j], th.cos(), th.sin());
                    let b = members[i].rotate_with(&members[j], -th.sin(), th.cos());
                    members[i] = a;
                    members[j] = b;
                }
                let remixed = average_preconcurrence(&members);
                assert!((remixed - avg).abs() <= 1e-9);
            }
        }

        // single pure member: the preconcurrence itself
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = SubVector4::raw([c(0.0, s), c(0.0, 0.0), c(0.0, 0.0), c(0.0, s)]);
        let avg = average_preconcurrence(std::slice::from_ref(&bell));
        assert!((avg - preconcurrence(&bell).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn optimal_mems_members() {
        for x in [0.2, 0.4, 0.6] {
            let opt = optimal_decomposition(&mems_state(x).unwrap()).unwrap();
            assert_eq!(opt.members.len(), 3);
            for m in &opt.members {
                assert!((concurrence_pure(m) - x).abs() <= 1e-9);
            }
            let mut rec = CMat::zeros(4);
            for m in &opt.members {
                rec = rec.add(&m.projector());
            }
            assert!(rec.max_abs_diff(mems_state(x).unwrap().matrix()) <= 1e-9);
        }
    }

    #[test]
    fn optimal_pure_state_is_itself() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = SubVector4::raw([c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)]);
        let rho = DensityMatrix4::from_pure(&bell).unwrap();
        let opt = optimal_decomposition(&rho).unwrap();
        assert_eq!(opt.members.len(), 1);
        assert!(opt.members[0].projector().max_abs_diff(rho.matrix()) <= 1e-10);
    }

    #[test]
    fn optimal_bell_diagonal_with_ties() {
        let rho = bell_diagonal([0.7, 0.1, 0.1, 0.1]);
        let (opt, steps) = optimal_decomposition_traced(&rho).unwrap();
        assert_eq!(opt.members.len(), 4);
        for m in &opt.members {
            assert!((concurrence_pure(m) - 0.4).abs() <= 1e-8);
        }
        assert!(steps.iter().any(|s| s.tied), "Bell-diagonal ties must be flagged");

        let alts = enumerate_ties(&rho).unwrap();
        assert!(alts.len() > 1, "expected alternative tie resolutions");
        for (_, alt) in &alts {
            let mut rec = CMat::zeros(4);
            for m in &alt.members {
                rec = rec.add(&m.projector());
            }
            assert!(rec.max_abs_diff(rho.matrix()) <= 1e-9);
            for m in &alt.members {
                assert!((concurrence_pure(m) - 0.4).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn optimal_random_entangled_suite() {
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        for _ in 0..100 {
            let rho = random_entangled(&mut rng);
            let cval = concurrence(&rho).unwrap();
            let inter = intermediate_decomposition(&rho).unwrap();
            // diagonal overlap structure
            for (i, yi) in inter.members.iter().enumerate() {
                for (j, yj) in inter.members.iter().enumerate() {
                    if i != j {
                        assert!(tilde_overlap(yi, yj).norm() <= 1e-9);
                    }
                }
            }
            assert!((average_preconcurrence(&inter.members) - cval).abs() <= 1e-9);

            let opt = optimal_decomposition(&rho).unwrap();
            assert!(opt.members.len() <= 4);
            let mut rec = CMat::zeros(4);
            for m in &opt.members {
                rec = rec.add(&m.projector());
                assert!((concurrence_pure(m) - cval).abs() <= 1e-8);
            }
            assert!(rec.max_abs_diff(rho.matrix()) <= 1e-9);
        }
    }

    #[test]
    fn mems_closed_form_decomposition() {
        // x in [2/3, 1]: cos2α = −1, ζ₃ drops
        for x in [0.7, 0.9, 1.0] {
            let opt = mems_optimal_decomposition(x).unwrap();
            assert_eq!(opt.members.len(), if x < 1.0 { 2 } else { 2 });
            let mut rec = CMat::zeros(4);
            for m in &opt.members {
                rec = rec.add(&m.projector());
                assert!((concurrence_pure(m) - x).abs() <= 1e-9);
            }
            assert!(rec.max_abs_diff(mems_state(x).unwrap().matrix()) <= 1e-9);
        }
        // x = 1 reconstructs the Bell projector
        let opt = mems_optimal_decomposition(1.0).unwrap();
        let mut rec = CMat::zeros(4);
        for m in &opt.members {
            rec = rec.add(&m.projector());
        }
        assert!(rec.max_abs_diff(mems_state(1.0).unwrap().matrix()) <= 1e-12);

        // x = 0.4: member norms² follow the closed-form weights
        let x = 0.4;
        let f = x / 2.0;
        let nf2 = 9.0 * f * f;
        let total = 6.0 - 4.0 * nf2;
        let opt = mems_optimal_decomposition(x).unwrap();
        let w: Vec<f64> = opt.members.iter().map(|m| m.norm2()).collect();
        assert!((w[0] - (2.0 - nf2) / total).abs() <= 1e-12);
        assert!((w[1] - (2.0 - nf2) / total).abs() <= 1e-12);
        assert!((w[2] - 2.0 * (1.0 - nf2) / total).abs() <= 1e-12);

        assert!(mems_optimal_decomposition(0.0).is_err());
    }

    #[test]
    fn generic_procedure_matches_closed_form_weights() {
        for x in [0.1, 0.25, 0.5, 0.66, 0.75, 0.95] {
            let opt = optimal_decomposition(&mems_state(x).unwrap()).unwrap();
            let closed = mems_optimal_decomposition(x).unwrap();
            let mut a: Vec<f64> = opt.members.iter().map(|m| m.norm2()).collect();
            let mut b: Vec<f64> = closed.members.iter().map(|m| m.norm2()).collect();
            a.sort_by(|x, y| y.partial_cmp(x).unwrap());
            b.sort_by(|x, y| y.partial_cmp(x).unwrap());
            assert_eq!(a.len(), b.len(), "cardinality mismatch at x = {x}");
            for (wa, wb) in a.iter().zip(&b) {
                assert!((wa - wb).abs() <= 1e-9, "weights {wa} vs {wb} at x = {x}");
            }
        }
    }
}
