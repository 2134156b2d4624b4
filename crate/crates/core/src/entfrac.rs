//! Singlet fraction of two-qubit states and the amplitude-damped state family.
//!
//! The singlet fraction `F(ρ) = max ⟨Ψ|ρ|Ψ⟩` over maximally entangled `|Ψ⟩`
//! is computed two ways:
//!
//! * [`singlet_fraction_magic`]: in the magic basis every maximally entangled
//!   state is a real unit vector (up to a global phase), so `F` is the top
//!   eigenvalue of `Re M` with `M_ij = ⟨e_i|ρ|e_j⟩`. This is the production
//!   path.
//! * [`singlet_fraction_bruteforce`]: direct maximisation of the overlap over
//!   `(U ⊗ I)|Φ+⟩` with `U ∈ SU(2)`. Slow; it exists to check the first one.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::eigen::max_eigenvalue_sym4;
use crate::qcore::{
    hermitian_eigensystem, real, tensor_product, validate_density, ComplexMatrix, DensityOperator,
    PureState, I, ONE, ZERO,
};

/// The `(p, a)` pair of the mixed-state family: weight `p` on the partially
/// entangled pure state, Schmidt parameter `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyParams {
    p: f64,
    a: f64,
}

impl FamilyParams {
    /// `0 < p ≤ 1`, `0 < a < 1`.
    pub fn new(p: f64, a: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParams(format!("p = {p} outside (0, 1]")));
        }
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::InvalidParams(format!("a = {a} outside (0, 1)")));
        }
        Ok(Self { p, a })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// The same family member with `a ↦ 1 - a`.
    pub fn mirrored(&self) -> Self {
        Self {
            p: self.p,
            a: 1.0 - self.a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellLabel {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellLabel {
    /// Also the order of Bell-diagonal weight vectors.
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
    ];

    pub fn is_psi(self) -> bool {
        matches!(self, BellLabel::PsiPlus | BellLabel::PsiMinus)
    }

    pub fn name(self) -> &'static str {
        match self {
            BellLabel::PsiPlus => "psi+",
            BellLabel::PsiMinus => "psi-",
            BellLabel::PhiPlus => "phi+",
            BellLabel::PhiMinus => "phi-",
        }
    }
}

pub fn bell_state(label: BellLabel) -> PureState {
    let h = real(FRAC_1_SQRT_2);
    let amps = match label {
        BellLabel::PsiPlus => vec![ZERO, h, h, ZERO],
        BellLabel::PsiMinus => vec![ZERO, h, -h, ZERO],
        BellLabel::PhiPlus => vec![h, ZERO, ZERO, h],
        BellLabel::PhiMinus => vec![h, ZERO, ZERO, -h],
    };
    PureState::new(amps).expect("Bell vectors are normalised")
}

/// Magic basis `e1 = |Φ+⟩, e2 = i|Φ−⟩, e3 = i|Ψ+⟩, e4 = |Ψ−⟩`.
pub fn magic_basis() -> [PureState; 4] {
    let times_i = |s: PureState| {
        PureState::new(s.amplitudes().iter().map(|z| z * I).collect()).expect("phase")
    };
    [
        bell_state(BellLabel::PhiPlus),
        times_i(bell_state(BellLabel::PhiMinus)),
        times_i(bell_state(BellLabel::PsiPlus)),
        bell_state(BellLabel::PsiMinus),
    ]
}

/// `Re ⟨e_i|m|e_j⟩`, row-major.
fn magic_real_part(m: &ComplexMatrix) -> [f64; 16] {
    let basis = magic_basis();
    let mut out = [0.0; 16];
    for i in 0..4 {
        for j in 0..4 {
            out[i * 4 + j] = m.sandwich(basis[i].amplitudes(), basis[j].amplitudes()).re;
        }
    }
    // symmetrise away rounding
    for i in 0..4 {
        for j in (i + 1)..4 {
            let s = 0.5 * (out[i * 4 + j] + out[j * 4 + i]);
            out[i * 4 + j] = s;
            out[j * 4 + i] = s;
        }
    }
    out
}

/// Angles of `U = [[e^{iα} cos θ, e^{iβ} sin θ], [−e^{−iβ} sin θ, e^{−iα} cos θ]]`,
/// the `SU(2)` element applied to the first qubit of `|Φ+⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MaxEntParam {
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl MaxEntParam {
    pub fn new(theta: f64, alpha: f64, beta: f64) -> Self {
        Self { theta, alpha, beta }
    }

    pub fn unitary(&self) -> ComplexMatrix {
        let (s, c) = self.theta.sin_cos();
        let ea = C64::from_polar(1.0, self.alpha);
        let eb = C64::from_polar(1.0, self.beta);
        ComplexMatrix::new(2, 2, vec![ea * c, eb * s, -eb.conj() * s, ea.conj() * c]).expect("2x2")
    }
}

pub fn max_ent_state(param: &MaxEntParam) -> PureState {
    let u = param.unitary();
    // (U ⊗ I)|Φ+⟩ has amplitude U[j][i]/√2 on |j i⟩
    let amps = (0..4)
        .map(|idx| u[(idx / 2, idx % 2)] * FRAC_1_SQRT_2)
        .collect();
    PureState::normalized(amps).expect("unitary image is nonzero")
}

fn require_two_qubit(state: &DensityOperator) -> Result<()> {
    if state.dim() != 4 {
        return Err(Error::Dimension(format!(
            "singlet fraction needs a two-qubit state, got dimension {}",
            state.dim()
        )));
    }
    Ok(())
}

pub fn singlet_fraction_magic(state: &DensityOperator) -> Result<f64> {
    require_two_qubit(state)?;
    Ok(singlet_weight(state.matrix()).clamp(0.0, 1.0))
}

/// Top eigenvalue of `Re M` for any positive 4×4 operator. For a subnormalised
/// operator `q ρ` this is `q F(ρ)`.
pub(crate) fn singlet_weight(m: &ComplexMatrix) -> f64 {
    max_eigenvalue_sym4(&magic_real_part(m))
}

/// Grid resolution and refinement sweeps for [`singlet_fraction_bruteforce`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceOptions {
    pub grid: usize,
    pub refine_iters: usize,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        Self {
            grid: 24,
            refine_iters: 200,
        }
    }
}

/// Maximise `⟨Ψ(θ,α,β)|ρ|Ψ(θ,α,β)⟩` by grid search plus coordinate-wise
/// golden-section refinement.
pub fn singlet_fraction_bruteforce(
    state: &DensityOperator,
    opts: BruteForceOptions,
) -> Result<f64> {
    require_two_qubit(state)?;
    let m = state.matrix();
    let overlap = |x: &[f64; 3]| -> f64 {
        let psi = max_ent_state(&MaxEntParam::new(x[0], x[1], x[2]));
        psi.expectation(m)
    };

    let n = opts.grid.max(2);
    let spans = [FRAC_PI_2, 2.0 * PI, 2.0 * PI];
    let steps: Vec<f64> = spans
        .iter()
        .enumerate()
        .map(|(k, s)| {
            if k == 0 {
                s / (n - 1) as f64
            } else {
                s / n as f64
            }
        })
        .collect();

    let mut scored: Vec<(f64, [f64; 3])> = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let x = [
                    i as f64 * steps[0],
                    j as f64 * steps[1],
                    k as f64 * steps[2],
                ];
                scored.push((overlap(&x), x));
            }
        }
    }
    scored.sort_by(|l, r| r.0.total_cmp(&l.0));

    // line searches along the axes and the two phase diagonals; the bracket
    // only shrinks once a sweep stops improving
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let dirs = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.0, s, s],
        [0.0, s, -s],
    ];
    let mut best = f64::NEG_INFINITY;
    for &(start_val, start) in scored.iter().take(4) {
        let mut x = start;
        let mut val = start_val;
        let mut half = steps[0].max(steps[1]);
        for _ in 0..opts.refine_iters {
            let before = val;
            for d in &dirs {
                let (t, v) = golden_section_max(
                    |t| overlap(&[x[0] + t * d[0], x[1] + t * d[1], x[2] + t * d[2]]),
                    -half,
                    half,
                    40,
                );
                if v > val {
                    val = v;
                    x = [x[0] + t * d[0], x[1] + t * d[1], x[2] + t * d[2]];
                }
            }
            if val - before < 1e-14 {
                half *= 0.5;
                if half < 1e-10 {
                    break;
                }
            }
        }
        best = best.max(val);
    }
    Ok(best)
}

/// Golden-section search for a maximum on `[lo, hi]`; returns `(argmax, max)`.
pub(crate) fn golden_section_max(
    mut f: impl FnMut(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    iters: usize,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn family_state(params: &FamilyParams, coherent: [f64; 4]) -> DensityOperator {
    let v: Vec<C64> = coherent.iter().map(|&x| real(x)).collect();
    let mut m = ComplexMatrix::outer(&v, &v).scale_real(params.p);
    m[(0, 0)] += real(1.0 - params.p);
    validate_density(&m).expect("family states are valid by construction")
}

/// `p |v⟩⟨v| + (1 − p)|00⟩⟨00|`, `|v⟩ = √a|01⟩ − √(1−a)|10⟩`.
pub fn make_rho_ab(params: &FamilyParams) -> DensityOperator {
    let (sa, sb) = (params.a.sqrt(), (1.0 - params.a).sqrt());
    family_state(params, [0.0, sa, -sb, 0.0])
}

/// `p |w⟩⟨w| + (1 − p)|00⟩⟨00|`, `|w⟩ = √a|10⟩ − √(1−a)|01⟩`.
pub fn make_rho_bc(params: &FamilyParams) -> DensityOperator {
    let (sa, sb) = (params.a.sqrt(), (1.0 - params.a).sqrt());
    family_state(params, [0.0, -sb, sa, 0.0])
}

/// Closed-form singlet fraction of the family,
/// `max{ p(√a + √(1−a))²/2, (1 − p)/2 }`.
pub fn initial_singlet_fraction(params: &FamilyParams) -> f64 {
    let (p, a) = (params.p, params.a);
    let s = a.sqrt() + (1.0 - a).sqrt();
    (p * s * s / 2.0).max((1.0 - p) / 2.0)
}

/// Optimal teleportation fidelity `(2F + 1)/3`.
pub fn teleport_fidelity_from_f(f: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::OutOfRange(format!(
            "singlet fraction {f} outside [0, 1]"
        )));
    }
    Ok((2.0 * f + 1.0) / 3.0)
}

/// `Σ w_k |Bell_k⟩⟨Bell_k|`, weights in [`BellLabel::ALL`] order.
pub fn bell_diagonal_state(weights: [f64; 4]) -> Result<DensityOperator> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidParams(format!(
            "Bell weights {weights:?} must be nonnegative"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParams(format!(
            "Bell weights {weights:?} sum to {total}"
        )));
    }
    let mut m = ComplexMatrix::zeros(4, 4);
    for (w, label) in weights.iter().zip(BellLabel::ALL) {
        m = &m + &bell_state(label).projector().scale_real(*w);
    }
    validate_density(&m)
}

/// Werner state with singlet weight `w`: `w|Ψ−⟩⟨Ψ−| + (1 − w) I/4`.
pub fn werner_state(w: f64) -> Result<DensityOperator> {
    let rest = (1.0 - w) / 4.0;
    bell_diagonal_state([rest, w + rest, rest, rest])
}

/// Local unitary `U_A ⊗ U_B` taking the optimal maximally entangled state of
/// `state` to `|Ψ−⟩`. Ties in the top eigenvalue go to the lowest-index
/// magic-basis direction.
pub(crate) fn singlet_alignment(state: &DensityOperator) -> Result<(ComplexMatrix, ComplexMatrix)> {
    require_two_qubit(state)?;
    let re = magic_real_part(state.matrix());
    let sym = ComplexMatrix::from_real(4, 4, &re)?;
    let eig = hermitian_eigensystem(&sym)?;
    let top = eig.values[0];
    let degenerate: Vec<usize> = (0..4)
        .filter(|&k| (eig.values[k] - top).abs() <= 1e-12)
        .collect();

    // inside a degenerate top eigenspace, prefer the direction closest to e4 =
    // |Ψ−⟩ (no rotation needed), then e1, e2, e3
    let mut coeffs: Vec<f64> = eig.vector(0).iter().map(|z| z.re).collect();
    if degenerate.len() > 1 {
        for target in [3usize, 0, 1, 2] {
            let mut proj = [0.0; 4];
            for &k in &degenerate {
                let v = eig.vector(k);
                let w = v[target].re;
                for i in 0..4 {
                    proj[i] += w * v[i].re;
                }
            }
            let norm = proj.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-6 {
                coeffs = proj.iter().map(|x| x / norm).collect();
                break;
            }
        }
    }

    let basis = magic_basis();
    let mut psi = [ZERO; 4];
    for (c, e) in coeffs.iter().zip(&basis) {
        for (slot, amp) in psi.iter_mut().zip(e.amplitudes()) {
            *slot += amp * *c;
        }
    }
    // |ψ⟩ = (V ⊗ I)|Φ+⟩ with V[j][i] = √2 ψ_{ji}; |Ψ−⟩ = (W ⊗ I)|Φ+⟩
    let v = ComplexMatrix::new(
        2,
        2,
        psi.iter().map(|z| z * std::f64::consts::SQRT_2).collect(),
    )?;
    let w = ComplexMatrix::new(2, 2, vec![ZERO, ONE, -ONE, ZERO])?;
    let u_a = w.matmul(&v.dagger());
    Ok((u_a, ComplexMatrix::identity(2)))
}

/// Apply `U_A ⊗ U_B` to a two-qubit state.
pub fn apply_local(
    state: &DensityOperator,
    u_a: &ComplexMatrix,
    u_b: &ComplexMatrix,
) -> DensityOperator {
    state.conjugate_by(&tensor_product(u_a, u_b))
}
