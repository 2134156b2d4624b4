//! Parameter sweeps, threshold search and CSV output behind the `swapgain`
//! binary.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::entfrac::{initial_singlet_fraction, FamilyParams};
use crate::error::{Error, Result};
use crate::swap::{phi_branch_closed, psi_branch_closed, psi_probability};
use crate::teleport::{strategy_one_fidelity, strategy_two_fidelity};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const CLASSICAL_TELEPORT_LIMIT: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Figure {
    /// Initial fraction and the Ψ outcomes of the swap.
    Fig1,
    /// Initial fraction and the Φ outcomes of the swap.
    Fig2,
    /// Teleportation fidelity of both relay strategies.
    Fig3,
}

impl Figure {
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Figure::Fig1 => &["a", "F_initial", "F_psi_branch", "prob_psi"],
            Figure::Fig2 => &["a", "F_initial", "F_phi_branch", "prob_phi"],
            Figure::Fig3 => &["a", "f_strategy1", "f_strategy2"],
        }
    }

    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Figure::Fig1),
            2 => Ok(Figure::Fig2),
            3 => Ok(Figure::Fig3),
            _ => Err(Error::InvalidParams(format!(
                "figure must be 1, 2 or 3, got {n}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub figure: Figure,
    pub p: f64,
    pub a_min: f64,
    pub a_max: f64,
    /// Number of intervals; the sweep has `steps + 1` rows, both ends included.
    pub steps: usize,
}

impl SweepConfig {
    pub fn new(figure: Figure, p: f64, a_min: f64, a_max: f64, steps: usize) -> Result<Self> {
        if !(a_min > 0.0 && a_max < 1.0 && a_min < a_max) {
            return Err(Error::InvalidParams(format!(
                "need 0 < a_min < a_max < 1, got [{a_min}, {a_max}]"
            )));
        }
        if steps < 2 {
            return Err(Error::InvalidParams(format!(
                "steps must be at least 2, got {steps}"
            )));
        }
        FamilyParams::new(p, a_min)?;
        Ok(Self {
            figure,
            p,
            a_min,
            a_max,
            steps,
        })
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let h = (self.a_max - self.a_min) / self.steps as f64;
        (0..=self.steps).map(move |i| {
            if i == self.steps {
                self.a_max
            } else {
                self.a_min + i as f64 * h
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureRow {
    pub a: f64,
    /// Values for the figure's columns after `a`.
    pub values: Vec<f64>,
}

pub fn figure_row(figure: Figure, params: &FamilyParams) -> Result<FigureRow> {
    let values = match figure {
        Figure::Fig1 => vec![
            initial_singlet_fraction(params),
            psi_branch_closed(params)?.singlet_fraction,
            psi_probability(params),
        ],
        Figure::Fig2 => vec![
            initial_singlet_fraction(params),
            phi_branch_closed(params)?.singlet_fraction,
            1.0 - psi_probability(params),
        ],
        Figure::Fig3 => vec![
            strategy_one_fidelity(params)?,
            strategy_two_fidelity(params)?,
        ],
    };
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Contract(format!(
            "non-finite value {bad} at a = {}",
            params.a()
        )));
    }
    Ok(FigureRow {
        a: params.a(),
        values,
    })
}

pub fn sweep(config: &SweepConfig) -> Result<Vec<FigureRow>> {
    config
        .grid()
        .map(|a| figure_row(config.figure, &FamilyParams::new(config.p, a)?))
        .collect()
}

/// `%.12g`: twelve significant digits, trailing zeros dropped, exponent form
/// outside `[1e-5, 1e12)`.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let strip = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-5..12).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip(mantissa), sign, exp.abs())
    } else {
        let decimals = (11 - exp).max(0) as usize;
        strip(&format!("{x:.decimals$}"))
    }
}

pub fn render_csv(figure: Figure, rows: &[FigureRow]) -> String {
    let mut lines = Vec::with_capacity(rows.len() + 1);
    lines.push(figure.columns().join(","));
    for row in rows {
        let mut fields = vec![format_sig12(row.a)];
        fields.extend(row.values.iter().map(|v| format_sig12(*v)));
        lines.push(fields.join(","));
    }
    lines.join("\n")
}

pub fn emit_csv(figure: Figure, rows: &[FigureRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidParams("no rows to write".into()));
    }
    std::fs::write(path, render_csv(figure, rows)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThresholdTarget {
    /// Initial singlet fraction reaches ½.
    #[serde(rename = "initial-f-half")]
    InitialFHalf,
    /// Ψ-outcome singlet fraction reaches ½.
    #[serde(rename = "psi-f-half")]
    PsiBranchFHalf,
    /// Φ-outcome singlet fraction reaches ½.
    #[serde(rename = "phi-f-half")]
    PhiBranchFHalf,
    /// Strategy-1 fidelity reaches the classical limit 2/3.
    #[serde(rename = "strategy1-classical")]
    Strategy1Classical,
}

impl ThresholdTarget {
    pub const ALL: [ThresholdTarget; 4] = [
        ThresholdTarget::InitialFHalf,
        ThresholdTarget::PsiBranchFHalf,
        ThresholdTarget::PhiBranchFHalf,
        ThresholdTarget::Strategy1Classical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ThresholdTarget::InitialFHalf => "initial-f-half",
            ThresholdTarget::PsiBranchFHalf => "psi-f-half",
            ThresholdTarget::PhiBranchFHalf => "phi-f-half",
            ThresholdTarget::Strategy1Classical => "strategy1-classical",
        }
    }

    /// Signed distance from the threshold at `params`.
    pub fn evaluate(self, params: &FamilyParams) -> Result<f64> {
        Ok(match self {
            ThresholdTarget::InitialFHalf => initial_singlet_fraction(params) - 0.5,
            ThresholdTarget::PsiBranchFHalf => psi_branch_closed(params)?.singlet_fraction - 0.5,
            ThresholdTarget::PhiBranchFHalf => phi_branch_closed(params)?.singlet_fraction - 0.5,
            ThresholdTarget::Strategy1Classical => {
                strategy_one_fidelity(params)? - CLASSICAL_TELEPORT_LIMIT
            }
        })
    }
}

impl fmt::Display for ThresholdTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ThresholdTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown threshold target {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdQuery {
    pub target: ThresholdTarget,
    pub p: f64,
    pub bracket: (f64, f64),
    pub tolerance: f64,
}

impl ThresholdQuery {
    pub fn new(target: ThresholdTarget, p: f64, lo: f64, hi: f64) -> Self {
        Self {
            target,
            p,
            bracket: (lo, hi),
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub target: ThresholdTarget,
    pub p: f64,
    pub a_star: f64,
    pub tol: f64,
}

/// Bisection until the bracket is no wider than the tolerance; returns its
/// midpoint.
pub fn find_threshold(query: &ThresholdQuery) -> Result<ThresholdResult> {
    let (mut lo, mut hi) = query.bracket;
    if lo.is_nan() || hi.is_nan() || lo >= hi || query.tolerance.is_nan() || query.tolerance <= 0.0
    {
        return Err(Error::InvalidParams(format!(
            "bad bracket [{lo}, {hi}] or tolerance {}",
            query.tolerance
        )));
    }
    let eval = |a: f64| query.target.evaluate(&FamilyParams::new(query.p, a)?);
    let (mut f_lo, f_hi) = (eval(lo)?, eval(hi)?);
    if f_lo.is_nan() || f_hi.is_nan() || f_lo * f_hi > 0.0 {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    while hi - lo > query.tolerance {
        let mid = 0.5 * (lo + hi);
        let f_mid = eval(mid)?;
        if f_mid == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(ThresholdResult {
        target: query.target,
        p: query.p,
        a_star: 0.5 * (lo + hi),
        tol: query.tolerance,
    })
}
