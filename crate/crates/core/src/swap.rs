//! Entanglement swapping through a Bell measurement at the middle node.
//!
//! Qubit order of the joint state is `(A, B1, B2, C)`: `ρ_AB ⊗ ρ_BC`. Bob
//! measures `(B1, B2)` in the Bell basis; the conditional state lives on
//! `(A, C)`.
//!
//! Correction table, applied on Charlie's qubit after each outcome so that the
//! family's conditional states take their canonical form:
//!
//! | outcome | U_A | U_C |
//! |---------|-----|-----|
//! | Ψ−      | I   | I   |
//! | Ψ+      | I   | Z   |
//! | Φ−      | I   | X   |
//! | Φ+      | I   | Y   |

use serde::{Deserialize, Serialize};

use crate::entfrac::{
    apply_local, bell_diagonal_state, bell_state, singlet_alignment, singlet_fraction_magic,
    BellLabel, FamilyParams,
};
use crate::error::{Error, Result};
use crate::qcore::paulis::Pauli;
use crate::qcore::{
    embed, partial_trace_matrix, real, tensor_product, validate_density, ComplexMatrix,
    DensityOperator,
};

/// Below this a branch is flagged unusable instead of conditioned on.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-12;
/// Closed-form branches refuse to normalise below this.
pub const DEGENERATE_PROBABILITY: f64 = 1e-15;

const DIMS: [usize; 4] = [2, 2, 2, 2];

#[derive(Debug, Clone, PartialEq)]
pub struct SwapBranch {
    pub outcome: BellLabel,
    pub probability: f64,
    /// Raw conditional state on `(A, C)`, before any correction. `I/4` when
    /// the branch is unusable.
    pub state: DensityOperator,
    pub singlet_fraction: f64,
    pub usable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwapEnsemble {
    /// In [`BellLabel::ALL`] order.
    pub branches: [SwapBranch; 4],
}

impl SwapEnsemble {
    pub fn branch(&self, outcome: BellLabel) -> &SwapBranch {
        self.branches
            .iter()
            .find(|b| b.outcome == outcome)
            .expect("every outcome present")
    }

    pub fn probability_sum(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    /// `Σ_k p_k ρ_k` over usable branches.
    pub fn average_state(&self) -> ComplexMatrix {
        self.branches
            .iter()
            .filter(|b| b.usable)
            .fold(ComplexMatrix::zeros(4, 4), |acc, b| {
                &acc + &b.state.matrix().scale_real(b.probability)
            })
    }

    pub fn max_singlet_fraction(&self) -> f64 {
        self.branches
            .iter()
            .filter(|b| b.usable)
            .map(|b| b.singlet_fraction)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Total probability of the two outcomes sharing a Bell family.
    pub fn psi_probability(&self) -> f64 {
        self.branches
            .iter()
            .filter(|b| b.outcome.is_psi())
            .map(|b| b.probability)
            .sum()
    }
}

fn require_two_qubit(rho: &DensityOperator, name: &str) -> Result<()> {
    if rho.dim() != 4 {
        return Err(Error::Dimension(format!(
            "{name} must be a two-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    Ok(())
}

/// Unnormalised `Tr_{B1B2}[(I ⊗ P_k ⊗ I) ρ_AB ⊗ ρ_BC (I ⊗ P_k ⊗ I)]`.
fn projected_branch(joint: &ComplexMatrix, outcome: BellLabel) -> Result<ComplexMatrix> {
    let projector = embed(&bell_state(outcome).projector(), &DIMS, &[1, 2])?;
    let projected = projector.matmul(joint).matmul(&projector);
    partial_trace_matrix(&projected, &DIMS, &[0, 3])
}

/// Bell measurement on the inner qubits of `ρ_AB ⊗ ρ_BC`, from first
/// principles. Conditional states are returned uncorrected.
pub fn swap_general(rho_ab: &DensityOperator, rho_bc: &DensityOperator) -> Result<SwapEnsemble> {
    require_two_qubit(rho_ab, "rho_ab")?;
    require_two_qubit(rho_bc, "rho_bc")?;
    let joint = tensor_product(rho_ab.matrix(), rho_bc.matrix());

    let mut branches = Vec::with_capacity(4);
    for outcome in BellLabel::ALL {
        let unnormalised = projected_branch(&joint, outcome)?;
        let probability = unnormalised.trace().re.max(0.0);
        let branch = if probability > MIN_BRANCH_PROBABILITY {
            let state = validate_density(&unnormalised.scale_real(1.0 / probability))?;
            let singlet_fraction = singlet_fraction_magic(&state)?;
            SwapBranch {
                outcome,
                probability,
                state,
                singlet_fraction,
                usable: true,
            }
        } else {
            let state = DensityOperator::maximally_mixed(4);
            SwapBranch {
                outcome,
                probability,
                singlet_fraction: singlet_fraction_magic(&state)?,
                state,
                usable: false,
            }
        };
        branches.push(branch);
    }
    let branches: [SwapBranch; 4] = branches.try_into().expect("four outcomes");
    Ok(SwapEnsemble { branches })
}

/// `Tr_{B1B2}(ρ_AB ⊗ ρ_BC) = ρ_A ⊗ ρ_C`: what the outer parties hold if Bob's
/// result is discarded. Computed without any Bell projector.
pub fn unconditional_outer_state(
    rho_ab: &DensityOperator,
    rho_bc: &DensityOperator,
) -> Result<ComplexMatrix> {
    require_two_qubit(rho_ab, "rho_ab")?;
    require_two_qubit(rho_bc, "rho_bc")?;
    let joint = tensor_product(rho_ab.matrix(), rho_bc.matrix());
    partial_trace_matrix(&joint, &DIMS, &[0, 3])
}

/// Conditional state in closed form with its probability and singlet fraction.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedBranch {
    pub state: DensityOperator,
    pub probability: f64,
    pub singlet_fraction: f64,
}

/// Probability of a Ψ± outcome on family inputs, `N = 2p²a(1−a) + 2p(1−p)a`.
pub fn psi_probability(params: &FamilyParams) -> f64 {
    let (p, a) = (params.p(), params.a());
    2.0 * p * p * a * (1.0 - a) + 2.0 * p * (1.0 - p) * a
}

/// Ψ± branch: `(1/N)(2p²a(1−a)|Ψ−⟩⟨Ψ−| + 2p(1−p)a|00⟩⟨00|)`.
pub fn psi_branch_closed(params: &FamilyParams) -> Result<ClosedBranch> {
    let (p, a) = (params.p(), params.a());
    let n = psi_probability(params);
    if n < DEGENERATE_PROBABILITY {
        return Err(Error::DegenerateBranch(n));
    }
    let singlet_w = 2.0 * p * p * a * (1.0 - a);
    let product_w = 2.0 * p * (1.0 - p) * a;
    let mut m = bell_state(BellLabel::PsiMinus)
        .projector()
        .scale_real(singlet_w / n);
    m[(0, 0)] += real(product_w / n);
    Ok(ClosedBranch {
        state: validate_density(&m)?,
        probability: n,
        singlet_fraction: (singlet_w).max(p * (1.0 - p) * a) / n,
    })
}

/// Components of the corrected Φ± branch, unnormalised; they sum to `1 − N`.
fn phi_components(params: &FamilyParams) -> ComplexMatrix {
    let (p, a) = (params.p(), params.a());
    // a|01⟩ − (1−a)|10⟩
    let u = [real(0.0), real(a), real(a - 1.0), real(0.0)];
    let mut m = ComplexMatrix::outer(&u, &u).scale_real(p * p);
    m[(1, 1)] += real((1.0 - p) * (1.0 - p));
    let cross = p * (1.0 - p) * (1.0 - a);
    m[(0, 0)] += real(cross);
    m[(3, 3)] += real(cross);
    m
}

/// Φ± branch, normalised to unit trace, with
/// `F = max{ (1 − 2p + 2p²)/(2(1−N)), (1−a)(1−p)p/(1−N) }`.
pub fn phi_branch_closed(params: &FamilyParams) -> Result<ClosedBranch> {
    let (p, a) = (params.p(), params.a());
    let prob = 1.0 - psi_probability(params);
    if prob < DEGENERATE_PROBABILITY {
        return Err(Error::DegenerateBranch(prob));
    }
    let m = phi_components(params).scale_real(1.0 / prob);
    let f = ((1.0 - 2.0 * p + 2.0 * p * p) / (2.0 * prob)).max((1.0 - a) * (1.0 - p) * p / prob);
    Ok(ClosedBranch {
        state: validate_density(&m)?,
        probability: prob,
        singlet_fraction: f,
    })
}

/// Fixed per-outcome local correction `(U_A, U_C)`.
pub fn correction_table(outcome: BellLabel) -> (Pauli, Pauli) {
    match outcome {
        BellLabel::PsiMinus => (Pauli::I, Pauli::I),
        BellLabel::PsiPlus => (Pauli::I, Pauli::Z),
        BellLabel::PhiMinus => (Pauli::I, Pauli::X),
        BellLabel::PhiPlus => (Pauli::I, Pauli::Y),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedBranch {
    pub u_a: ComplexMatrix,
    pub u_c: ComplexMatrix,
    pub state: DensityOperator,
}

/// Apply the table correction for this branch's outcome.
pub fn canonical_correction(branch: &SwapBranch) -> Result<CorrectedBranch> {
    if branch.probability.is_nan() || branch.probability <= 0.0 {
        return Err(Error::DegenerateBranch(branch.probability));
    }
    let (pa, pc) = correction_table(branch.outcome);
    let (u_a, u_c) = (pa.matrix(), pc.matrix());
    let state = apply_local(&branch.state, &u_a, &u_c);
    Ok(CorrectedBranch { u_a, u_c, state })
}

/// Which conditional branches beat the product-state fallback.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwapRegion {
    /// Only Ψ± outcomes are kept.
    PsiOnly,
    /// Every outcome is kept.
    Both,
    /// Only Φ± outcomes are kept.
    PhiOnly,
    /// Every outcome is replaced by `|01⟩`.
    Neither,
}

pub fn swap_region(params: &FamilyParams) -> Result<SwapRegion> {
    let psi = psi_branch_closed(params)
        .map(|b| b.singlet_fraction > 0.5)
        .unwrap_or(false);
    let phi = phi_branch_closed(params)
        .map(|b| b.singlet_fraction > 0.5)
        .unwrap_or(false);
    Ok(match (psi, phi) {
        (true, true) => SwapRegion::Both,
        (true, false) => SwapRegion::PsiOnly,
        (false, true) => SwapRegion::PhiOnly,
        (false, false) => SwapRegion::Neither,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterministicSwap {
    pub state: DensityOperator,
    pub average_singlet_fraction: f64,
    /// Per outcome (in [`BellLabel::ALL`] order): was the conditional state
    /// kept rather than replaced by `|01⟩`?
    pub kept: [bool; 4],
    pub region: SwapRegion,
}

/// Swap, then keep each conditional state whose singlet fraction exceeds ½
/// (rotated so `|Ψ−⟩` is its best maximally entangled state) and replace the
/// rest with `|01⟩⟨01|`.
pub fn deterministic_swap(params: &FamilyParams) -> Result<DeterministicSwap> {
    let ensemble = swap_general(
        &crate::entfrac::make_rho_ab(params),
        &crate::entfrac::make_rho_bc(params),
    )?;
    let fallback = DensityOperator::basis(4, 1);
    let singlet = bell_state(BellLabel::PsiMinus);

    let mut acc = ComplexMatrix::zeros(4, 4);
    let mut average = 0.0;
    let mut kept = [false; 4];
    for (slot, branch) in kept.iter_mut().zip(&ensemble.branches) {
        if branch.usable && branch.singlet_fraction > 0.5 {
            let mut state = canonical_correction(branch)?.state;
            if singlet.expectation(state.matrix()) < branch.singlet_fraction - 1e-12 {
                let (ua, ub) = singlet_alignment(&state)?;
                state = apply_local(&state, &ua, &ub);
            }
            acc = &acc + &state.matrix().scale_real(branch.probability);
            average += branch.probability * branch.singlet_fraction;
            *slot = true;
        } else {
            acc = &acc + &fallback.matrix().scale_real(branch.probability);
            average += branch.probability * 0.5;
        }
    }
    Ok(DeterministicSwap {
        state: validate_density(&acc)?,
        average_singlet_fraction: average,
        kept,
        region: swap_region(params)?,
    })
}

/// Averaged state of the deterministic swap at a given region, as a closed
/// form (the three piecewise matrices for the `p = 0.75` regions).
pub fn deterministic_swap_closed_state(params: &FamilyParams, region: SwapRegion) -> ComplexMatrix {
    let (p, a) = (params.p(), params.a());
    let mut m = ComplexMatrix::zeros(4, 4);
    let mut set = |i: usize, j: usize, x: f64| m[(i, j)] = real(x);
    match region {
        SwapRegion::PsiOnly => {
            set(0, 0, -2.0 * a * (-1.0 + p) * p);
            set(1, 1, 1.0 + a * (-2.0 + p) * p + a * a * p * p);
            set(1, 2, a * (-1.0 + a) * p * p);
            set(2, 1, a * (-1.0 + a) * p * p);
            set(2, 2, -a * (-1.0 + a) * p * p);
        }
        SwapRegion::Both => {
            set(0, 0, -(1.0 + a) * (-1.0 + p) * p);
            set(1, 1, 1.0 - 2.0 * p + (1.0 + a) * p * p);
            set(1, 2, 2.0 * a * (-1.0 + a) * p * p);
            set(2, 1, 2.0 * a * (-1.0 + a) * p * p);
            set(2, 2, -(-1.0 + a) * p * p);
            set(3, 3, (-1.0 + a) * (-1.0 + p) * p);
        }
        SwapRegion::PhiOnly => {
            set(0, 0, (-1.0 + a) * (-1.0 + p) * p);
            set(1, 1, 1.0 + 2.0 * (-1.0 + a) * p - (-1.0 + a * a) * p * p);
            set(1, 2, a * (-1.0 + a) * p * p);
            set(2, 1, a * (-1.0 + a) * p * p);
            set(2, 2, (-1.0 + a) * (-1.0 + a) * p * p);
            set(3, 3, (-1.0 + a) * (-1.0 + p) * p);
        }
        SwapRegion::Neither => {
            set(1, 1, 1.0);
        }
    }
    m
}

/// Average singlet fraction of the deterministic swap by region, closed form.
pub fn deterministic_swap_closed_f(params: &FamilyParams, region: SwapRegion) -> f64 {
    let (p, a) = (params.p(), params.a());
    match region {
        SwapRegion::PsiOnly => 0.5 - a * a * p * p + a * p * (-1.0 + 2.0 * p),
        SwapRegion::Both => 0.5 - p + (1.0 + 2.0 * a - 2.0 * a * a) * p * p,
        SwapRegion::PhiOnly => 0.5 + (-1.0 + a) * p - (-1.0 + a * a) * p * p,
        SwapRegion::Neither => 0.5,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoGoReport {
    pub max_branch_singlet_fraction: f64,
    pub initial_singlet_fractions: (f64, f64),
}

impl NoGoReport {
    /// How far the best branch exceeds the better input; ≤ 0 when swapping did
    /// not help.
    pub fn gain(&self) -> f64 {
        self.max_branch_singlet_fraction
            - self
                .initial_singlet_fractions
                .0
                .max(self.initial_singlet_fractions.1)
    }
}

/// Swap two Bell-diagonal states and report the best conditional singlet
/// fraction against the two input fractions.
pub fn bell_diagonal_nogo_check(weights_ab: [f64; 4], weights_bc: [f64; 4]) -> Result<NoGoReport> {
    let rho_ab = bell_diagonal_state(weights_ab)?;
    let rho_bc = bell_diagonal_state(weights_bc)?;
    let ensemble = swap_general(&rho_ab, &rho_bc)?;
    Ok(NoGoReport {
        max_branch_singlet_fraction: ensemble.max_singlet_fraction(),
        initial_singlet_fractions: (
            singlet_fraction_magic(&rho_ab)?,
            singlet_fraction_magic(&rho_bc)?,
        ),
    })
}
