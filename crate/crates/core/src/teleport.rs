//! Teleportation channels, their composition, and the two relay strategies.
//!
//! Channels are stored as Choi *states* `J = (id ⊗ Λ)|Φ+⟩⟨Φ+|` with trace 1,
//! reference qubit first. The Choi operator is `2J`, and
//! `Λ(X) = 2 Tr_R[(Xᵀ ⊗ I) J]`.
//!
//! Teleportation correction, applied on the receiver's qubit after the
//! sender's Bell measurement of (input, own half):
//!
//! | outcome | correction |
//! |---------|------------|
//! | Ψ−      | I          |
//! | Ψ+      | Z          |
//! | Φ+      | Y          |
//! | Φ−      | X          |

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::entfrac::{
    apply_local, bell_state, singlet_alignment, singlet_fraction_magic, BellLabel, FamilyParams,
};
use crate::error::{Error, Result};
use crate::filter::{apply_tp_filter_ab, apply_tp_filter_bc};
use crate::qcore::paulis::Pauli;
use crate::qcore::{
    embed, hermitian_eigenvalues, partial_trace_matrix, real, tensor_product, ComplexMatrix,
    DensityOperator, PureState, ONE, ZERO,
};
use crate::swap::deterministic_swap;

const PSD_FLOOR: f64 = 1e-9;
const TP_TOL: f64 = 1e-9;

/// Completely positive trace-preserving qubit map, held as its Choi state.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChannel {
    choi: ComplexMatrix,
}

impl QuantumChannel {
    pub fn from_choi(choi: ComplexMatrix) -> Result<Self> {
        if choi.rows() != 4 || choi.cols() != 4 {
            return Err(Error::Dimension(format!(
                "Choi state must be 4x4, got {}x{}",
                choi.rows(),
                choi.cols()
            )));
        }
        if !choi.is_hermitian(1e-10) {
            return Err(Error::Validation {
                invariant: "hermitian",
                detail: format!("Choi state off by {:e}", choi.hermiticity_error()),
            });
        }
        let choi = choi.hermitian_part();
        let min = *hermitian_eigenvalues(&choi)?.last().expect("4 eigenvalues");
        if min < -PSD_FLOOR {
            return Err(Error::Validation {
                invariant: "completely positive",
                detail: format!("Choi state has eigenvalue {min:e}"),
            });
        }
        let reference = partial_trace_matrix(&choi, &[2, 2], &[0])?;
        let dev = reference.max_abs_diff(&ComplexMatrix::real_diag(&[0.5, 0.5]));
        if dev > TP_TOL {
            return Err(Error::Validation {
                invariant: "trace preserving",
                detail: format!("reference marginal deviates from I/2 by {dev:e}"),
            });
        }
        Ok(Self { choi })
    }

    pub fn from_kraus(kraus: &[ComplexMatrix]) -> Result<Self> {
        let phi = bell_state(BellLabel::PhiPlus).projector();
        let mut choi = ComplexMatrix::zeros(4, 4);
        for k in kraus {
            if k.rows() != 2 || k.cols() != 2 {
                return Err(Error::Dimension("Kraus operators must be 2x2".into()));
            }
            let lifted = tensor_product(&ComplexMatrix::identity(2), k);
            choi = &choi + &phi.conjugate_by(&lifted);
        }
        Self::from_choi(choi)
    }

    pub fn identity() -> Self {
        Self {
            choi: bell_state(BellLabel::PhiPlus).projector(),
        }
    }

    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        Self::from_kraus(std::slice::from_ref(u))
    }

    /// `ρ ↦ (1 − λ)ρ + λ I/2`; `λ = 1` is fully depolarizing.
    pub fn depolarizing(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::OutOfRange(format!(
                "depolarizing weight {lambda} not in [0,1]"
            )));
        }
        let phi = bell_state(BellLabel::PhiPlus).projector();
        Self::from_choi(
            &phi.scale_real(1.0 - lambda) + &ComplexMatrix::identity(4).scale_real(lambda / 4.0),
        )
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    /// Action on an arbitrary (not necessarily Hermitian) 2×2 operator.
    pub fn apply_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != 2 || x.cols() != 2 {
            return Err(Error::Dimension("channel input must be 2x2".into()));
        }
        let lifted = tensor_product(&x.transpose(), &ComplexMatrix::identity(2));
        Ok(partial_trace_matrix(&lifted.matmul(&self.choi), &[2, 2], &[1])?.scale_real(2.0))
    }

    pub fn apply(&self, rho: &DensityOperator) -> Result<DensityOperator> {
        crate::qcore::validate_density(&self.apply_operator(rho.matrix())?)
    }
}

/// `second ∘ first`.
pub fn compose(second: &QuantumChannel, first: &QuantumChannel) -> Result<QuantumChannel> {
    let mut out = ComplexMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let mut block = ComplexMatrix::zeros(2, 2);
            for r in 0..2 {
                for c in 0..2 {
                    block[(r, c)] = first.choi[(2 * i + r, 2 * j + c)];
                }
            }
            // Λ₂ is linear, so blocks of the Choi state map through it directly
            let mapped = second
                .apply_operator(&block.scale_real(2.0))?
                .scale_real(0.5);
            for r in 0..2 {
                for c in 0..2 {
                    out[(2 * i + r, 2 * j + c)] = mapped[(r, c)];
                }
            }
        }
    }
    QuantumChannel::from_choi(out)
}

/// `⟨Φ+|J|Φ+⟩`.
pub fn entanglement_fidelity(channel: &QuantumChannel) -> f64 {
    bell_state(BellLabel::PhiPlus).expectation(channel.choi())
}

/// Haar-averaged input/output fidelity, `(2F_e + 1)/3`.
pub fn average_fidelity(channel: &QuantumChannel) -> f64 {
    (2.0 * entanglement_fidelity(channel) + 1.0) / 3.0
}

/// The same average taken over the six Pauli eigenstates.
pub fn pauli_design_average(channel: &QuantumChannel) -> Result<f64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let kets: [[C64; 2]; 6] = [
        [ONE, ZERO],
        [ZERO, ONE],
        [real(h), real(h)],
        [real(h), real(-h)],
        [real(h), C64::new(0.0, h)],
        [real(h), C64::new(0.0, -h)],
    ];
    let mut total = 0.0;
    for k in kets {
        let psi = PureState::new(k.to_vec())?;
        let out = channel.apply_operator(&psi.projector())?;
        total += psi.expectation(&out);
    }
    Ok(total / 6.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignedResource {
    pub state: DensityOperator,
    pub u_a: ComplexMatrix,
    pub u_b: ComplexMatrix,
}

/// Rotate a two-qubit state by local unitaries so that `|Ψ−⟩` is its closest
/// maximally entangled state.
pub fn align_resource(state: &DensityOperator) -> Result<AlignedResource> {
    let (u_a, u_b) = singlet_alignment(state)?;
    Ok(AlignedResource {
        state: apply_local(state, &u_a, &u_b),
        u_a,
        u_b,
    })
}

pub fn teleport_correction(outcome: BellLabel) -> Pauli {
    match outcome {
        BellLabel::PsiMinus => Pauli::I,
        BellLabel::PsiPlus => Pauli::Z,
        BellLabel::PhiPlus => Pauli::Y,
        BellLabel::PhiMinus => Pauli::X,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportationChannel {
    pub channel: QuantumChannel,
    /// Whether `|Ψ−⟩` already attains the resource's singlet fraction. When
    /// false the channel is still exact but falls short of `(2F + 1)/3`.
    pub aligned: bool,
}

/// Standard teleportation through `resource` (sender's half first), simulated
/// on `(R, S, A, B)`: `|Φ+⟩_RS ⊗ ρ_AB`, Bell measurement on `(S, A)`,
/// correction on `B`, sum over outcomes.
pub fn teleportation_channel(resource: &DensityOperator) -> Result<TeleportationChannel> {
    if resource.dim() != 4 {
        return Err(Error::Dimension(format!(
            "resource must be a two-qubit state, got dimension {}",
            resource.dim()
        )));
    }
    let dims = [2, 2, 2, 2];
    let joint = tensor_product(
        &bell_state(BellLabel::PhiPlus).projector(),
        resource.matrix(),
    );
    let mut choi = ComplexMatrix::zeros(4, 4);
    for outcome in BellLabel::ALL {
        let projector = embed(&bell_state(outcome).projector(), &dims, &[1, 2])?;
        let correction = embed(&teleport_correction(outcome).matrix(), &dims, &[3])?;
        let op = correction.matmul(&projector);
        let branch = joint.conjugate_by(&op);
        choi = &choi + &partial_trace_matrix(&branch, &dims, &[0, 3])?;
    }
    let singlet = bell_state(BellLabel::PsiMinus).expectation(resource.matrix());
    let aligned = singlet >= singlet_fraction_magic(resource)? - 1e-9;
    Ok(TeleportationChannel {
        channel: QuantumChannel::from_choi(choi)?,
        aligned,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub p: f64,
    pub a: f64,
    pub fidelity_strategy1: f64,
    pub fidelity_strategy2: f64,
}

/// Filter each link, then teleport A→B and B→C in sequence; the fidelity of
/// the composite channel.
pub fn strategy_one_fidelity(params: &FamilyParams) -> Result<f64> {
    let ab = align_resource(&apply_tp_filter_ab(params)?)?;
    let bc = align_resource(&apply_tp_filter_bc(params)?)?;
    let first = teleportation_channel(&ab.state)?.channel;
    let second = teleportation_channel(&bc.state)?.channel;
    Ok(average_fidelity(&compose(&second, &first)?))
}

/// Deterministic swap at Bob, then a single teleportation A→C.
pub fn strategy_two_fidelity(params: &FamilyParams) -> Result<f64> {
    crate::entfrac::teleport_fidelity_from_f(deterministic_swap(params)?.average_singlet_fraction)
}

pub fn compare_strategies(params: &FamilyParams) -> Result<StrategyReport> {
    Ok(StrategyReport {
        p: params.p(),
        a: params.a(),
        fidelity_strategy1: strategy_one_fidelity(params)?,
        fidelity_strategy2: strategy_two_fidelity(params)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entfrac::{make_rho_ab, make_rho_bc};
    use crate::qcore::random::{random_density, random_isometry};
    use crate::swap::psi_branch_closed;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fam(p: f64, a: f64) -> FamilyParams {
        FamilyParams::new(p, a).unwrap()
    }

    fn random_channel(rng: &mut ChaCha8Rng, kraus_count: usize) -> QuantumChannel {
        let v = random_isometry(rng, 2 * kraus_count, 2);
        let kraus: Vec<ComplexMatrix> = (0..kraus_count)
            .map(|k| {
                let data = (0..4).map(|i| v[(2 * k + i / 2, i % 2)]).collect();
                ComplexMatrix::new(2, 2, data).unwrap()
            })
            .collect();
        QuantumChannel::from_kraus(&kraus).unwrap()
    }

    #[test]
    fn singlet_resource_gives_identity() {
        let singlet = DensityOperator::from_pure(&bell_state(BellLabel::PsiMinus));
        let t = teleportation_channel(&singlet).unwrap();
        assert!(t.aligned);
        assert!(t
            .channel
            .choi()
            .approx_eq(QuantumChannel::identity().choi(), 1e-14));
    }

    #[test]
    fn mixed_resource_gives_full_depolarizing() {
        let t = teleportation_channel(&DensityOperator::maximally_mixed(4)).unwrap();
        assert!(t
            .channel
            .choi()
            .approx_eq(&ComplexMatrix::identity(4).scale_real(0.25), 1e-14));
        assert!((average_fidelity(&t.channel) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn other_bell_resources_are_pauli_channels() {
        for label in [BellLabel::PsiPlus, BellLabel::PhiPlus, BellLabel::PhiMinus] {
            let t = teleportation_channel(&DensityOperator::from_pure(&bell_state(label))).unwrap();
            assert!(!t.aligned);
            assert!(entanglement_fidelity(&t.channel) < 1e-14);
        }
    }

    #[test]
    fn align_resource_examples() {
        let singlet = DensityOperator::from_pure(&bell_state(BellLabel::PsiMinus));
        let r = align_resource(&singlet).unwrap();
        assert!(r.state.matrix().approx_eq(singlet.matrix(), 1e-12));

        let phi = DensityOperator::from_pure(&bell_state(BellLabel::PhiPlus));
        let r = align_resource(&phi).unwrap();
        assert!(r.state.matrix().approx_eq(singlet.matrix(), 1e-12));

        let branch = psi_branch_closed(&fam(0.75, 0.5)).unwrap();
        let r = align_resource(&branch.state).unwrap();
        let overlap = bell_state(BellLabel::PsiMinus).expectation(r.state.matrix());
        assert!((overlap - 0.6).abs() < 1e-9);
    }

    #[test]
    fn aligned_family_reaches_optimal_fidelity() {
        for (a, f) in [(0.5, 0.833333333333), (0.2, 0.783333333333)] {
            let r = align_resource(&make_rho_ab(&fam(0.75, a))).unwrap();
            let t = teleportation_channel(&r.state).unwrap();
            assert!(t.aligned);
            assert!((average_fidelity(&t.channel) - f).abs() < 1e-9);
        }
    }

    #[test]
    fn random_channels_two_design() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for k in 1..=4 {
            for _ in 0..25 {
                let ch = random_channel(&mut rng, k);
                let d = pauli_design_average(&ch).unwrap();
                assert!((d - average_fidelity(&ch)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn composition_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let dep = QuantumChannel::depolarizing(1.0).unwrap();
        for _ in 0..30 {
            let (x, y, z) = (
                random_channel(&mut rng, 2),
                random_channel(&mut rng, 3),
                random_channel(&mut rng, 4),
            );
            let id = QuantumChannel::identity();
            assert!(compose(&id, &x).unwrap().choi().approx_eq(x.choi(), 1e-12));
            assert!(compose(&x, &id).unwrap().choi().approx_eq(x.choi(), 1e-12));
            assert!(compose(&dep, &x)
                .unwrap()
                .choi()
                .approx_eq(dep.choi(), 1e-12));
            let left = compose(&compose(&z, &y).unwrap(), &x).unwrap();
            let right = compose(&z, &compose(&y, &x).unwrap()).unwrap();
            assert!(left.choi().approx_eq(right.choi(), 1e-12));

            let rho = random_density(&mut rng, 2);
            let seq = y.apply(&x.apply(&rho).unwrap()).unwrap();
            let direct = compose(&y, &x).unwrap().apply(&rho).unwrap();
            assert!(seq.matrix().approx_eq(direct.matrix(), 1e-12));
        }
    }

    #[test]
    fn invalid_choi_rejected() {
        assert!(
            QuantumChannel::from_choi(ComplexMatrix::real_diag(&[1.0, 0.0, 0.0, 0.0])).is_err()
        );
        assert!(
            QuantumChannel::from_choi(ComplexMatrix::real_diag(&[0.5, 0.5, 0.5, -0.5])).is_err()
        );
        assert!(QuantumChannel::depolarizing(1.5).is_err());
    }

    #[test]
    fn strategy_spot_values() {
        let q = fam(0.75, 0.5);
        let s2 = strategy_two_fidelity(&q).unwrap();
        assert!((s2 - (2.0 * 0.59375 + 1.0) / 3.0).abs() < 1e-12);
        let s1 = strategy_one_fidelity(&q).unwrap();
        assert!((s1 - s2).abs() < 1e-9, "{s1} vs {s2}");

        let s2 = strategy_two_fidelity(&fam(0.75, 0.2)).unwrap();
        assert!((s2 - (2.0 * 0.5525 + 1.0) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn family_channels_from_both_links_agree() {
        let q = fam(0.75, 0.3);
        let ab = teleportation_channel(&align_resource(&make_rho_ab(&q)).unwrap().state).unwrap();
        let bc = teleportation_channel(&align_resource(&make_rho_bc(&q)).unwrap().state).unwrap();
        assert!((average_fidelity(&ab.channel) - average_fidelity(&bc.channel)).abs() < 1e-12);
    }
}
