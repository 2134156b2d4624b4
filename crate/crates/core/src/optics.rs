//! Fock-space simulation of the linear-optics swapping experiment.
//!
//! Modes `(a, b1, b2, c, b3, b4)`. Two single-photon sources fill `(a, b1)`
//! and `(b2, c)`; beam splitters `b1↔b3` and `b2↔b4` implement amplitude
//! damping, the loss modes are never observed, and a balanced beam splitter
//! on `(b1, b2)` followed by photon counting performs the Bell measurement.
//!
//! Beam-splitter convention: `c1† → √T c1† + √(1−T) c2†`,
//! `c2† → √T c2† − √(1−T) c1†`. With it a lone click in `b1` heralds `Ψ−` and
//! a lone click in `b2` heralds `Ψ+`.
//!
//! Qubits are single-rail: photon number 0 or 1 in a mode.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::entfrac::{singlet_fraction_magic, BellLabel, FamilyParams};
use crate::error::{Error, Result};
use crate::qcore::{real, validate_density, ComplexMatrix, DensityOperator, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    A,
    B1,
    B2,
    C,
    B3,
    B4,
}

impl Mode {
    pub const ALL: [Mode; 6] = [Mode::A, Mode::B1, Mode::B2, Mode::C, Mode::B3, Mode::B4];

    pub fn label(self) -> &'static str {
        match self {
            Mode::A => "a",
            Mode::B1 => "b1",
            Mode::B2 => "b2",
            Mode::C => "c",
            Mode::B3 => "b3",
            Mode::B4 => "b4",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeRegister {
    modes: Vec<Mode>,
    cutoff: u8,
}

impl ModeRegister {
    pub fn new(modes: Vec<Mode>, cutoff: u8) -> Result<Self> {
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::InvalidParams(format!(
                    "mode {} listed twice",
                    m.label()
                )));
            }
        }
        Ok(Self { modes, cutoff })
    }

    /// All six modes, at most two photons.
    pub fn standard() -> Self {
        Self {
            modes: Mode::ALL.to_vec(),
            cutoff: 2,
        }
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn cutoff(&self) -> u8 {
        self.cutoff
    }

    pub fn position(&self, mode: Mode) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| *m == mode)
            .ok_or_else(|| Error::InvalidParams(format!("mode {} not in register", mode.label())))
    }
}

/// Occupation patterns with total photon number at most the cutoff.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    register: ModeRegister,
    states: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl FockBasis {
    pub fn new(register: ModeRegister) -> Self {
        let n = register.modes.len();
        let mut states = Vec::new();
        let mut current = vec![0u8; n];
        fn fill(pos: usize, left: u8, current: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
            if pos == current.len() {
                out.push(current.clone());
                return;
            }
            for k in 0..=left {
                current[pos] = k;
                fill(pos + 1, left - k, current, out);
            }
            current[pos] = 0;
        }
        fill(0, register.cutoff, &mut current, &mut states);
        states.sort_by_key(|s| {
            (
                s.iter().map(|&k| k as u32).sum::<u32>(),
                std::cmp::Reverse(s.clone()),
            )
        });
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Self {
            register,
            states,
            index,
        }
    }

    pub fn register(&self) -> &ModeRegister {
        &self.register
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Vec<u8>] {
        &self.states
    }

    pub fn index_of(&self, occupation: &[u8]) -> Option<usize> {
        self.index.get(occupation).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    basis: Arc<FockBasis>,
    amplitudes: Vec<C64>,
}

impl FockVector {
    pub fn from_terms(basis: Arc<FockBasis>, terms: &[(Vec<u8>, C64)]) -> Result<Self> {
        let mut amplitudes = vec![ZERO; basis.len()];
        for (occ, amp) in terms {
            let i = basis.index_of(occ).ok_or_else(|| Error::Truncation {
                mode: format!("{occ:?}"),
                cutoff: basis.register.cutoff,
            })?;
            amplitudes[i] += amp;
        }
        let v = Self { basis, amplitudes };
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Validation {
                invariant: "unit norm",
                detail: format!("Fock vector norm {norm}"),
            });
        }
        Ok(v)
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, occupation: &[u8]) -> C64 {
        self.basis
            .index_of(occupation)
            .map_or(ZERO, |i| self.amplitudes[i])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Nonzero terms in basis order.
    pub fn support(&self, tol: f64) -> Vec<(&[u8], C64)> {
        self.basis
            .states
            .iter()
            .zip(&self.amplitudes)
            .filter(|(_, z)| z.norm() > tol)
            .map(|(s, z)| (s.as_slice(), *z))
            .collect()
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.basis
            .states
            .iter()
            .zip(&self.amplitudes)
            .map(|(s, z)| z.norm_sqr() * s.iter().map(|&k| k as f64).sum::<f64>())
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterSpec {
    pub first: Mode,
    pub second: Mode,
    pub transmission: f64,
}

impl BeamSplitterSpec {
    pub fn new(first: Mode, second: Mode, transmission: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmission) {
            return Err(Error::OutOfRange(format!(
                "transmission {transmission} not in [0,1]"
            )));
        }
        if first == second {
            return Err(Error::InvalidParams(
                "beam splitter needs two distinct modes".into(),
            ));
        }
        Ok(Self {
            first,
            second,
            transmission,
        })
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Output amplitudes of `|n1, n2⟩` on the two mixed modes, as
/// `(k1, k2, amplitude)`.
fn mix_pair(n1: u32, n2: u32, t: f64) -> Vec<(u32, u32, f64)> {
    let (st, sr) = (t.sqrt(), (1.0 - t).sqrt());
    // (st x + sr y)^n1 (st y − sr x)^n2, x = c1†, y = c2†
    let mut poly = vec![0.0; (n1 + n2 + 1) as usize];
    for i in 0..=n1 {
        let c1 = binomial(n1, i) * st.powi(i as i32) * sr.powi((n1 - i) as i32);
        for j in 0..=n2 {
            let c2 = binomial(n2, j)
                * sr.powi(j as i32)
                * st.powi((n2 - j) as i32)
                * if j % 2 == 1 { -1.0 } else { 1.0 };
            poly[(i + j) as usize] += c1 * c2;
        }
    }
    let norm = (factorial(n1) * factorial(n2)).sqrt();
    poly.iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(k, c)| {
            let k1 = k as u32;
            let k2 = n1 + n2 - k1;
            (k1, k2, c * (factorial(k1) * factorial(k2)).sqrt() / norm)
        })
        .collect()
}

pub fn apply_beam_splitter(state: &FockVector, spec: &BeamSplitterSpec) -> Result<FockVector> {
    let reg = state.basis.register();
    let (i1, i2) = (reg.position(spec.first)?, reg.position(spec.second)?);
    let mut out = vec![ZERO; state.basis.len()];
    for (occ, amp) in state.basis.states.iter().zip(&state.amplitudes) {
        if *amp == ZERO {
            continue;
        }
        for (k1, k2, c) in mix_pair(occ[i1] as u32, occ[i2] as u32, spec.transmission) {
            let mut target = occ.clone();
            target[i1] = k1 as u8;
            target[i2] = k2 as u8;
            let j = state
                .basis
                .index_of(&target)
                .ok_or_else(|| Error::Truncation {
                    mode: format!("{}/{}", spec.first.label(), spec.second.label()),
                    cutoff: reg.cutoff(),
                })?;
            out[j] += amp * c;
        }
    }
    Ok(FockVector {
        basis: Arc::clone(&state.basis),
        amplitudes: out,
    })
}

/// `T = pa / (1 − p(1−a))`.
pub fn loss_transmission(params: &FamilyParams) -> f64 {
    let (p, a) = (params.p(), params.a());
    // exactly 1 at p = 1, but rounding can land a hair above
    (p * a / (1.0 - p * (1.0 - a))).min(1.0)
}

/// Both photon-pair sources, loss modes in vacuum.
pub fn prepare_sources(params: &FamilyParams) -> FockVector {
    let (p, a) = (params.p(), params.a());
    let s = (1.0 - p * (1.0 - a)).sqrt();
    let r = (p * (1.0 - a)).sqrt();
    // (s|0,1⟩ − r|1,0⟩)_{a b1} ⊗ (s|1,0⟩ − r|0,1⟩)_{b2 c}
    let ab = [([0u8, 1u8], s), ([1, 0], -r)];
    let bc = [([1u8, 0u8], s), ([0, 1], -r)];
    let basis = Arc::new(FockBasis::new(ModeRegister::standard()));
    let terms: Vec<(Vec<u8>, C64)> = ab
        .iter()
        .flat_map(|(x, cx)| {
            bc.iter()
                .map(move |(y, cy)| (vec![x[0], x[1], y[0], y[1], 0, 0], real(cx * cy)))
        })
        .collect();
    FockVector::from_terms(basis, &terms).expect("normalised sources")
}

fn loss_splitters(params: &FamilyParams) -> [BeamSplitterSpec; 2] {
    let t = loss_transmission(params);
    [
        BeamSplitterSpec::new(Mode::B1, Mode::B3, t).expect("T in [0,1]"),
        BeamSplitterSpec::new(Mode::B2, Mode::B4, t).expect("T in [0,1]"),
    ]
}

/// Reduced state on the listed modes with every other mode traced out, in
/// the single-rail qubit basis (first listed mode most significant).
fn single_rail_reduction(state: &FockVector, keep: &[Mode]) -> Result<ComplexMatrix> {
    let reg = state.basis.register();
    let keep_idx: Vec<usize> = keep
        .iter()
        .map(|m| reg.position(*m))
        .collect::<Result<_>>()?;
    let dim = 1usize << keep.len();
    // group amplitudes by the occupation of the traced modes
    let mut groups: HashMap<Vec<u8>, Vec<C64>> = HashMap::new();
    for (occ, amp) in state.basis.states.iter().zip(&state.amplitudes) {
        if amp.norm() == 0.0 {
            continue;
        }
        let mut q = 0usize;
        for &i in &keep_idx {
            if occ[i] > 1 {
                return Err(Error::Contract(format!(
                    "mode {} holds {} photons; not a single-rail qubit",
                    reg.modes()[i].label(),
                    occ[i]
                )));
            }
            q = 2 * q + occ[i] as usize;
        }
        let rest: Vec<u8> = (0..occ.len())
            .filter(|i| !keep_idx.contains(i))
            .map(|i| occ[i])
            .collect();
        groups.entry(rest).or_insert_with(|| vec![ZERO; dim])[q] += amp;
    }
    let mut keys: Vec<_> = groups.keys().cloned().collect();
    keys.sort();
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for k in keys {
        let v = &groups[&k];
        rho = &rho + &ComplexMatrix::outer(v, v);
    }
    Ok(rho)
}

/// Sources through both loss beam splitters, loss modes traced out: a
/// 16×16 state on `(a, b1, b2, c)`.
pub fn run_loss_stage(state: &FockVector, params: &FamilyParams) -> Result<DensityOperator> {
    let mut s = state.clone();
    for spec in loss_splitters(params) {
        s = apply_beam_splitter(&s, &spec)?;
    }
    validate_density(&single_rail_reduction(
        &s,
        &[Mode::A, Mode::B1, Mode::B2, Mode::C],
    )?)
}

/// Detector counts `(b1, b2)` that herald a Bell state, and which one.
pub fn herald_label(counts: (u8, u8)) -> Option<BellLabel> {
    match counts {
        (1, 0) => Some(BellLabel::PsiMinus),
        (0, 1) => Some(BellLabel::PsiPlus),
        _ => None,
    }
}

pub const DETECTOR_OUTCOMES: [(u8, u8); 6] = [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2), (1, 1)];

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionEvent {
    pub counts: (u8, u8),
    pub probability: f64,
    /// Normalised state on `(a, c)`; `None` when the event cannot occur.
    pub heralded_state: Option<DensityOperator>,
    pub bell: Option<BellLabel>,
}

impl DetectionEvent {
    pub fn singlet_fraction(&self) -> Result<Option<f64>> {
        self.heralded_state
            .as_ref()
            .map(singlet_fraction_magic)
            .transpose()
    }
}

/// Full experiment: sources, loss, balanced beam splitter on `(b1, b2)`,
/// photon counting on `b1` and `b2`.
pub fn run_heralded_swap(params: &FamilyParams) -> Result<Vec<DetectionEvent>> {
    let mut s = prepare_sources(params);
    for spec in loss_splitters(params) {
        s = apply_beam_splitter(&s, &spec)?;
    }
    s = apply_beam_splitter(&s, &BeamSplitterSpec::new(Mode::B1, Mode::B2, 0.5)?)?;

    let reg = s.basis.register().clone();
    let (ib1, ib2) = (reg.position(Mode::B1)?, reg.position(Mode::B2)?);
    let mut events = Vec::with_capacity(DETECTOR_OUTCOMES.len());
    for counts in DETECTOR_OUTCOMES {
        let projected: Vec<C64> = s
            .basis
            .states
            .iter()
            .zip(&s.amplitudes)
            .map(|(occ, z)| {
                if (occ[ib1], occ[ib2]) == counts {
                    *z
                } else {
                    ZERO
                }
            })
            .collect();
        let branch = FockVector {
            basis: Arc::clone(&s.basis),
            amplitudes: projected,
        };
        let rho = single_rail_reduction(&branch, &[Mode::A, Mode::C])?;
        let probability = rho.trace().re;
        let heralded_state = if probability > 1e-15 {
            Some(validate_density(&rho.scale_real(1.0 / probability))?)
        } else {
            None
        };
        events.push(DetectionEvent {
            counts,
            probability,
            heralded_state,
            bell: herald_label(counts),
        });
    }
    Ok(events)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventSummary {
    pub counts: [u8; 2],
    pub probability: f64,
    pub bell: Option<String>,
    pub singlet_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpticsReport {
    pub p: f64,
    pub a: f64,
    pub transmission: f64,
    pub events: Vec<EventSummary>,
}

pub fn optics_report(params: &FamilyParams) -> Result<OpticsReport> {
    let events = run_heralded_swap(params)?
        .iter()
        .map(|e| {
            Ok(EventSummary {
                counts: [e.counts.0, e.counts.1],
                probability: e.probability,
                bell: e.bell.map(|b| b.name().to_string()),
                singlet_fraction: e.singlet_fraction()?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(OpticsReport {
        p: params.p(),
        a: params.a(),
        transmission: loss_transmission(params),
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entfrac::{make_rho_ab, make_rho_bc};
    use crate::qcore::tensor_product;
    use crate::swap::{psi_branch_closed, psi_probability, swap_general};

    fn fam(p: f64, a: f64) -> FamilyParams {
        FamilyParams::new(p, a).unwrap()
    }

    fn two_mode(occ: [u8; 2]) -> FockVector {
        let basis = Arc::new(FockBasis::new(ModeRegister::standard()));
        FockVector::from_terms(basis, &[(vec![0, occ[0], occ[1], 0, 0, 0], real(1.0))]).unwrap()
    }

    #[test]
    fn basis_size() {
        let b = FockBasis::new(ModeRegister::standard());
        assert_eq!(b.len(), 28);
        assert!(b
            .states()
            .iter()
            .all(|s| s.iter().map(|&k| k as u32).sum::<u32>() <= 2));
        assert!(ModeRegister::new(vec![Mode::A, Mode::A], 2).is_err());
    }

    #[test]
    fn single_photon_splits_evenly() {
        let bs = BeamSplitterSpec::new(Mode::B1, Mode::B2, 0.5).unwrap();
        let out = apply_beam_splitter(&two_mode([1, 0]), &bs).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitude(&[0, 1, 0, 0, 0, 0]) - real(h)).norm() < 1e-15);
        assert!((out.amplitude(&[0, 0, 1, 0, 0, 0]) - real(h)).norm() < 1e-15);
    }

    #[test]
    fn hong_ou_mandel_null() {
        let bs = BeamSplitterSpec::new(Mode::B1, Mode::B2, 0.5).unwrap();
        let out = apply_beam_splitter(&two_mode([1, 1]), &bs).unwrap();
        assert!(out.amplitude(&[0, 1, 1, 0, 0, 0]).norm() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitude(&[0, 2, 0, 0, 0, 0]) - real(-h)).norm() < 1e-12);
        assert!((out.amplitude(&[0, 0, 2, 0, 0, 0]) - real(h)).norm() < 1e-12);
    }

    #[test]
    fn full_transmission_is_identity() {
        let s = prepare_sources(&fam(0.6, 0.3));
        let bs = BeamSplitterSpec::new(Mode::B1, Mode::B3, 1.0).unwrap();
        let out = apply_beam_splitter(&s, &bs).unwrap();
        assert_eq!(out.amplitudes(), s.amplitudes());
    }

    #[test]
    fn beam_splitters_conserve_photons() {
        let basis = Arc::new(FockBasis::new(ModeRegister::standard()));
        for (k, occ) in basis.states().iter().enumerate() {
            let v =
                FockVector::from_terms(Arc::clone(&basis), &[(occ.clone(), real(1.0))]).unwrap();
            for t in [0.0, 0.17, 0.5, 0.93, 1.0] {
                for (m1, m2) in [
                    (Mode::B1, Mode::B2),
                    (Mode::A, Mode::B4),
                    (Mode::C, Mode::B3),
                ] {
                    let out = apply_beam_splitter(&v, &BeamSplitterSpec::new(m1, m2, t).unwrap())
                        .unwrap();
                    assert!((out.norm() - 1.0).abs() < 1e-12, "state {k}");
                    assert!((out.mean_photon_number() - v.mean_photon_number()).abs() < 1e-12);
                    let n = v.mean_photon_number();
                    for (s, _) in out.support(1e-15) {
                        assert_eq!(s.iter().map(|&x| x as f64).sum::<f64>(), n);
                    }
                }
            }
        }
    }

    #[test]
    fn sources() {
        let q = fam(1.0, 0.5);
        let s = prepare_sources(&q);
        assert!((s.norm() - 1.0).abs() < 1e-12);
        assert!((s.mean_photon_number() - 2.0).abs() < 1e-12);
        assert!((s.amplitude(&[0, 1, 1, 0, 0, 0]) - real(0.5)).norm() < 1e-15);
        assert!((s.amplitude(&[1, 0, 0, 1, 0, 0]) - real(0.5)).norm() < 1e-15);
        assert!((s.amplitude(&[0, 1, 0, 1, 0, 0]) - real(-0.5)).norm() < 1e-15);
        assert!((s.amplitude(&[1, 0, 1, 0, 0, 0]) - real(-0.5)).norm() < 1e-15);

        let q = fam(0.75, 0.3);
        let s = prepare_sources(&q);
        let amp_ab = (1.0f64 - 0.75 * 0.7).sqrt();
        // coefficient of |0⟩_a|1⟩_b1 factorises out of the |1⟩_b2|0⟩_c term
        assert!((s.amplitude(&[0, 1, 1, 0, 0, 0]).re - amp_ab * amp_ab).abs() < 1e-15);
    }

    #[test]
    fn transmission_values() {
        assert!((loss_transmission(&fam(0.75, 0.5)) - 0.6).abs() < 1e-15);
        assert!((loss_transmission(&fam(1.0, 0.3)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn loss_stage_reproduces_family() {
        for p in [0.1, 0.5, 0.75, 1.0] {
            for a in [0.05, 0.3, 0.5, 0.8] {
                let q = fam(p, a);
                let rho = run_loss_stage(&prepare_sources(&q), &q).unwrap();
                let expected = tensor_product(make_rho_ab(&q).matrix(), make_rho_bc(&q).matrix());
                assert!(rho.matrix().approx_eq(&expected, 1e-10), "({p},{a})");
            }
        }
    }

    #[test]
    fn heralded_events_match_abstract_swap() {
        for (p, a) in [(0.75, 0.5), (0.75, 0.2), (0.4, 0.7)] {
            let q = fam(p, a);
            let events = run_heralded_swap(&q).unwrap();
            let total: f64 = events.iter().map(|e| e.probability).sum();
            assert!((total - 1.0).abs() < 1e-10);
            let n = psi_probability(&q);
            let ensemble = swap_general(&make_rho_ab(&q), &make_rho_bc(&q)).unwrap();
            let f_psi = psi_branch_closed(&q).unwrap().singlet_fraction;
            let mut rest = 0.0;
            for e in &events {
                match e.bell {
                    Some(label) => {
                        assert!((e.probability - n / 2.0).abs() < 1e-10);
                        assert!((e.singlet_fraction().unwrap().unwrap() - f_psi).abs() < 1e-9);
                        let abstract_state = &ensemble.branch(label).state;
                        assert!(e
                            .heralded_state
                            .as_ref()
                            .unwrap()
                            .matrix()
                            .approx_eq(abstract_state.matrix(), 1e-10));
                    }
                    None => rest += e.probability,
                }
            }
            assert!((rest - (1.0 - n)).abs() < 1e-10);
        }
        let events = run_heralded_swap(&fam(0.75, 0.5)).unwrap();
        assert!((events[1].probability - 0.234375).abs() < 1e-12);
        assert!((events[1].singlet_fraction().unwrap().unwrap() - 0.6).abs() < 1e-9);
    }
}
