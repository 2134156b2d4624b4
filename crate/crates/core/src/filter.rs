//! Optimal trace-preserving local filtering for the state family.
//!
//! One party applies a filter `A` (`A†A ≤ I`). On success the pair is kept; on
//! failure both parties prepare a product state whose singlet fraction is ½.
//! The closed-form optimum is the production path. [`optimal_filter_numeric`]
//! searches over filters directly and is only used to check it.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::entfrac::{
    bell_state, golden_section_max, make_rho_ab, make_rho_bc, singlet_weight, BellLabel,
    FamilyParams, MaxEntParam,
};
use crate::error::{Error, Result};
use crate::qcore::{
    hermitian_eigenvalues, partial_transpose, real, tensor_product, validate_density,
    ComplexMatrix, DensityOperator,
};

const CONTRACTION_TOL: f64 = 1e-12;

/// Single-qubit measurement operator `A` with `A†A ≤ I`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFilter {
    matrix: ComplexMatrix,
}

impl LocalFilter {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != 2 || matrix.cols() != 2 {
            return Err(Error::Dimension(format!(
                "filter must be 2x2, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let ev = hermitian_eigenvalues(&matrix.dagger().matmul(&matrix).hermitian_part())?;
        if ev[0] > 1.0 + CONTRACTION_TOL {
            return Err(Error::InvalidParams(format!(
                "filter is not a contraction: A†A has eigenvalue {}",
                ev[0]
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity() -> Self {
        Self {
            matrix: ComplexMatrix::identity(2),
        }
    }

    pub fn diagonal(d0: f64, d1: f64) -> Result<Self> {
        Self::new(ComplexMatrix::real_diag(&[d0, d1]))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.matrix.approx_eq(&ComplexMatrix::identity(2), tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterRegime {
    Filtering,
    Identity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterSolution {
    /// Optimal average singlet fraction.
    pub f_star: f64,
    pub filter: LocalFilter,
    pub success_probability: f64,
    pub regime: FilterRegime,
}

/// Which qubit of the pair the filter acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterSide {
    First,
    Second,
}

fn lift(filter: &LocalFilter, side: FilterSide) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    match side {
        FilterSide::First => tensor_product(filter.matrix(), &id),
        FilterSide::Second => tensor_product(&id, filter.matrix()),
    }
}

/// Unnormalised success branch `(A ⊗ I) ρ (A ⊗ I)†` or `(I ⊗ A) ρ (I ⊗ A)†`.
pub fn filtered_branch(
    state: &DensityOperator,
    filter: &LocalFilter,
    side: FilterSide,
) -> ComplexMatrix {
    state.matrix().conjugate_by(&lift(filter, side))
}

/// Success branch plus the failure weight placed on a computational basis
/// state.
pub fn apply_tp_filter(
    state: &DensityOperator,
    filter: &LocalFilter,
    side: FilterSide,
    failure_basis_index: usize,
) -> Result<DensityOperator> {
    if state.dim() != 4 {
        return Err(Error::Dimension(format!(
            "filtering needs a two-qubit state, got dimension {}",
            state.dim()
        )));
    }
    let mut m = filtered_branch(state, filter, side);
    let success = m.trace().re;
    m[(failure_basis_index, failure_basis_index)] += real(1.0 - success);
    validate_density(&m)
}

/// `√(a(1−a)) p / (1−p)`; filtering helps exactly when this is below one.
/// Infinite at `p = 1`.
pub fn filter_condition(params: &FamilyParams) -> f64 {
    let (p, a) = (params.p(), params.a());
    if p >= 1.0 {
        return f64::INFINITY;
    }
    (a * (1.0 - a)).sqrt() * p / (1.0 - p)
}

pub fn optimal_filter_closed(params: &FamilyParams) -> FilterSolution {
    let (p, a) = (params.p(), params.a());
    let c = filter_condition(params);
    let (f_star, filter, regime) = if c < 1.0 {
        (
            0.5 + a * (1.0 - a) * p * p / (2.0 * (1.0 - p)),
            LocalFilter::diagonal(c, 1.0).expect("c < 1"),
            FilterRegime::Filtering,
        )
    } else {
        (
            p / 2.0 + (a * (1.0 - a)).sqrt() * p,
            LocalFilter::identity(),
            FilterRegime::Identity,
        )
    };
    let success_probability = filtered_branch(&make_rho_ab(params), &filter, FilterSide::Second)
        .trace()
        .re;
    FilterSolution {
        f_star,
        filter,
        success_probability,
        regime,
    }
}

/// Filtered family state for the `A`–`B` link: filter on Bob's qubit, failure
/// branch `|01⟩⟨01|`.
pub fn apply_tp_filter_ab(params: &FamilyParams) -> Result<DensityOperator> {
    let sol = optimal_filter_closed(params);
    apply_tp_filter(&make_rho_ab(params), &sol.filter, FilterSide::Second, 0b01)
}

/// Filtered family state for the `B`–`C` link: filter on Bob's qubit (the
/// first factor), failure branch `|10⟩⟨10|`.
pub fn apply_tp_filter_bc(params: &FamilyParams) -> Result<DensityOperator> {
    let sol = optimal_filter_closed(params);
    apply_tp_filter(&make_rho_bc(params), &sol.filter, FilterSide::First, 0b10)
}

/// `X = (I ⊗ A)|Φ+⟩⟨Φ+|(I ⊗ A)†`.
pub fn induced_x(filter: &LocalFilter) -> ComplexMatrix {
    let phi = bell_state(BellLabel::PhiPlus);
    let v = lift(filter, FilterSide::Second).apply(phi.amplitudes());
    ComplexMatrix::outer(&v, &v)
}

/// `½ − Tr(X ρ^Γ)`, partial transpose on the second qubit.
pub fn sdp_objective(x: &ComplexMatrix, state: &DensityOperator) -> Result<f64> {
    let gamma = partial_transpose(state.matrix(), (2, 2), 1)?;
    Ok(0.5 - x.matmul(&gamma).trace().re)
}

/// Worst violation of `0 ≤ X ≤ I` and `−I/2 ≤ X^Γ ≤ I/2`; ≤ 0 when feasible.
pub fn sdp_constraint_violation(x: &ComplexMatrix) -> Result<f64> {
    let ev = hermitian_eigenvalues(x)?;
    let evg = hermitian_eigenvalues(&partial_transpose(x, (2, 2), 1)?)?;
    let (xmax, xmin) = (ev[0], ev[3]);
    let (gmax, gmin) = (evg[0], evg[3]);
    Ok([-xmin, xmax - 1.0, -0.5 - gmin, gmax - 0.5]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max))
}

/// The symmetry-reduced operator
///
/// ```text
/// [ x1  0  0 x2 ]
/// [  0  0  0  0 ]
/// [  0  0  0  0 ]
/// [ x5  0  0 x6 ]
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdpCandidate {
    pub x1: f64,
    pub x2: f64,
    pub x5: f64,
    pub x6: f64,
}

impl SdpCandidate {
    /// Read off the reduced entries of the `X` induced by a filter, failing if
    /// it has support outside the reduced pattern.
    pub fn from_filter(filter: &LocalFilter) -> Result<Self> {
        let x = induced_x(filter);
        let pattern = [(0, 0), (0, 3), (3, 0), (3, 3)];
        for i in 0..4 {
            for j in 0..4 {
                let z = x[(i, j)];
                let allowed = pattern.contains(&(i, j));
                if (!allowed && z.norm() > 1e-12) || z.im.abs() > 1e-12 {
                    return Err(Error::Contract(format!(
                        "induced X leaves the reduced form at ({i}, {j}): {z}"
                    )));
                }
            }
        }
        Ok(Self {
            x1: x[(0, 0)].re,
            x2: x[(0, 3)].re,
            x5: x[(3, 0)].re,
            x6: x[(3, 3)].re,
        })
    }

    pub fn assemble(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4, 4);
        m[(0, 0)] = real(self.x1);
        m[(0, 3)] = real(self.x2);
        m[(3, 0)] = real(self.x5);
        m[(3, 3)] = real(self.x6);
        m
    }

    pub fn constraint_violation(&self) -> Result<f64> {
        sdp_constraint_violation(&self.assemble())
    }

    /// Second-largest eigenvalue of `X`; zero for a rank-one candidate.
    pub fn rank_defect(&self) -> Result<f64> {
        Ok(hermitian_eigenvalues(&self.assemble())?[1].abs())
    }

    pub fn objective(&self, state: &DensityOperator) -> Result<f64> {
        sdp_objective(&self.assemble(), state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NumericOptions {
    /// Maximum objective evaluations across both search phases.
    pub budget: usize,
    /// Random restarts of the dense-filter phase.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            budget: 10_000,
            restarts: 6,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericFilterResult {
    pub solution: FilterSolution,
    pub evaluations: usize,
    /// The diagonal refinement settled before the budget ran out.
    pub converged: bool,
    /// Best dense-filter value minus best diagonal value. Positive would mean
    /// the diagonal reduction missed something.
    pub dense_gain: f64,
}

struct Budgeted<'a> {
    state: &'a DensityOperator,
    used: usize,
    budget: usize,
}

impl Budgeted<'_> {
    fn exhausted(&self) -> bool {
        self.used >= self.budget
    }

    /// `q F(filtered) + (1 − q)/2`, filter on the second qubit.
    /// Past the budget every point scores `-inf`, so nothing new is accepted.
    fn value(&mut self, filter: &ComplexMatrix) -> f64 {
        if self.exhausted() {
            return f64::NEG_INFINITY;
        }
        self.used += 1;
        let lifted = tensor_product(&ComplexMatrix::identity(2), filter);
        let branch = self.state.matrix().conjugate_by(&lifted);
        let q = branch.trace().re;
        singlet_weight(&branch) + 0.5 * (1.0 - q)
    }
}

fn dense_filter(x: &[f64; 5]) -> ComplexMatrix {
    let d = ComplexMatrix::real_diag(&[x[0].clamp(0.0, 1.0), x[1].clamp(0.0, 1.0)]);
    d.matmul(&MaxEntParam::new(x[2], x[3], x[4]).unitary())
}

/// Coordinate-wise golden-section ascent inside a box, with the bracket
/// halving every sweep. Returns `(x, value, settled)`.
fn coordinate_ascent<const D: usize>(
    eval: &mut Budgeted<'_>,
    to_filter: impl Fn(&[f64; D]) -> ComplexMatrix,
    bounds: [(f64, f64); D],
    mut x: [f64; D],
    mut half: [f64; D],
    sweeps: usize,
) -> ([f64; D], f64, bool) {
    let mut val = eval.value(&to_filter(&x));
    let mut settled = false;
    for _ in 0..sweeps {
        if eval.exhausted() {
            break;
        }
        let before = val;
        for c in 0..D {
            let lo = (x[c] - half[c]).max(bounds[c].0);
            let hi = (x[c] + half[c]).min(bounds[c].1);
            let (xc, v) = golden_section_max(
                |t| {
                    let mut y = x;
                    y[c] = t;
                    eval.value(&to_filter(&y))
                },
                lo,
                hi,
                25,
            );
            if v > val {
                val = v;
                x[c] = xc;
            }
        }
        for h in &mut half {
            *h *= 0.5;
        }
        if val - before < 1e-15 && half.iter().all(|h| *h < 1e-9) {
            settled = true;
            break;
        }
    }
    (x, val, settled)
}

/// Direct search for the best one-sided filter on the second qubit: a grid
/// plus refinement over diagonal filters, then random-restart refinement over
/// dense filters `diag(s0, s1)·V`, `V ∈ SU(2)`.
pub fn optimal_filter_numeric(
    state: &DensityOperator,
    opts: NumericOptions,
) -> Result<NumericFilterResult> {
    if state.dim() != 4 {
        return Err(Error::Dimension(format!(
            "filtering needs a two-qubit state, got dimension {}",
            state.dim()
        )));
    }
    let mut eval = Budgeted {
        state,
        used: 0,
        budget: opts.budget.max(1),
    };

    // diagonal filters
    let grid = 21;
    let step = 1.0 / (grid - 1) as f64;
    let diag = |x: &[f64; 2]| ComplexMatrix::real_diag(&[x[0], x[1]]);
    let mut scored = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            let x = [i as f64 * step, j as f64 * step];
            scored.push((eval.value(&diag(&x)), x));
        }
    }
    // whole rows of the grid can tie (a zero entry leaves a product state), so
    // refine from a few leaders and from the identity as well
    scored.sort_by(|l, r| r.0.total_cmp(&l.0));
    let mut starts: Vec<([f64; 2], f64)> = scored.iter().take(2).map(|s| (s.1, step)).collect();
    starts.push(([1.0, 1.0], 1.0));
    let (mut x_diag, mut v_diag, mut converged) = ([1.0, 1.0], f64::NEG_INFINITY, false);
    for (start, half) in starts {
        let (x, v, settled) =
            coordinate_ascent(&mut eval, diag, [(0.0, 1.0); 2], start, [half; 2], 60);
        if v > v_diag {
            (x_diag, v_diag, converged) = (x, v, settled);
        }
    }

    // dense filters
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let tau = std::f64::consts::TAU;
    let bounds = [
        (0.0, 1.0),
        (0.0, 1.0),
        (-tau, tau),
        (-2.0 * tau, 2.0 * tau),
        (-2.0 * tau, 2.0 * tau),
    ];
    let mut dense_best = (None, f64::NEG_INFINITY);
    for _ in 0..opts.restarts {
        if eval.exhausted() {
            break;
        }
        let start = [
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..1.0),
            rng.random_range(0.0..std::f64::consts::FRAC_PI_2),
            rng.random_range(0.0..tau),
            rng.random_range(0.0..tau),
        ];
        let (x, v, _) = coordinate_ascent(
            &mut eval,
            dense_filter,
            bounds,
            start,
            [0.25, 0.25, 0.4, 0.8, 0.8],
            12,
        );
        if v > dense_best.1 {
            dense_best = (Some(x), v);
        }
    }

    let dense_gain = dense_best.1 - v_diag;
    let (filter, f_star) = match dense_best.0 {
        Some(x) if dense_best.1 > v_diag => (dense_filter(&x), dense_best.1),
        _ => (diag(&x_diag), v_diag),
    };
    // the search can wander a hair outside the unit ball in floating point
    let filter = LocalFilter::new(filter.clone())
        .or_else(|_| LocalFilter::new(filter.scale(C64::new(1.0 - 1e-12, 0.0))))?;
    let success_probability = filtered_branch(state, &filter, FilterSide::Second)
        .trace()
        .re;
    let regime = if filter.is_identity(1e-6) {
        FilterRegime::Identity
    } else {
        FilterRegime::Filtering
    };
    Ok(NumericFilterResult {
        solution: FilterSolution {
            f_star,
            filter,
            success_probability,
            regime,
        },
        evaluations: eval.used,
        converged,
        dense_gain,
    })
}
