//! Two finite-dimensional counting lemmas: a normalized `S_q` spectrum has at
//! most `ε^{-q}` singular values `>= ε`, and the Hilbert–Schmidt norm of a
//! diagonal–bounded–multiplier composite is controlled by its three factors.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::pqnorm::SingularSpectrum;

/// Accepted deviation of `Σ s_i^q` from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchattenDimBound {
    /// `⌊ε^{-q}⌋`, read as the largest `k` with `k ε^q <= 1` up to the
    /// normalization tolerance.
    pub bound: u64,
    /// `#{i : s_i >= ε}`.
    pub count: usize,
    /// `count · ε^q <= Σ s_i^q`, the constructive form of the bound.
    pub holds: bool,
}

pub fn schatten_dim_bound(spectrum: &SingularSpectrum, eps: f64, q: Exponent) -> Result<SchattenDimBound> {
    if q.is_infinite() {
        return Err(Error::InvalidExponent("the dimension bound needs a finite q".into()));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let qf = q.to_f64();
    let total: f64 = spectrum.values().iter().map(|s| s.powf(qf)).sum();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::Unnormalized(total));
    }
    let eq = eps.powf(qf);
    let raw = (1.0 + NORMALIZATION_TOLERANCE) / eq;
    let bound = if raw >= u64::MAX as f64 { u64::MAX } else { raw.floor() as u64 };
    let count = spectrum.values().iter().filter(|&&s| s >= eps).count();
    let holds = count as u64 <= bound && count as f64 * eq <= total * (1.0 + NORMALIZATION_TOLERANCE);
    Ok(SchattenDimBound { bound, count, holds })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HsCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Discrete model on `m` atoms of mass `1/m`: `T f = (⟨g_n, f⟩)_n`,
/// `S = diag(d) · T · M_ψ`. Compares `‖S‖_HS` with `‖ψ‖_2 · sup_n ‖g_n‖_∞ · ‖d‖_2`.
pub fn hs_composition_bound_check(psi: &[f64], g: &[Vec<f64>], d: &[f64]) -> Result<HsCheck> {
    let m = psi.len();
    if m == 0 {
        return Err(Error::InvalidArgument("psi must be nonempty".into()));
    }
    if d.len() != g.len() {
        return Err(Error::DimensionMismatch { expected: g.len(), found: d.len() });
    }
    if let Some(row) = g.iter().find(|row| row.len() != m) {
        return Err(Error::DimensionMismatch { expected: m, found: row.len() });
    }
    let w = 1.0 / m as f64;
    let hs2: f64 = g
        .iter()
        .zip(d)
        .map(|(row, dn)| dn * dn * w * row.iter().zip(psi).map(|(gi, pi)| gi * gi * pi * pi).sum::<f64>())
        .sum();
    let psi_l2 = (w * psi.iter().map(|p| p * p).sum::<f64>()).sqrt();
    let g_sup = g.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let d_l2 = d.iter().map(|v| v * v).sum::<f64>().sqrt();
    let lhs = hs2.sqrt();
    let rhs = psi_l2 * g_sup * d_l2;
    Ok(HsCheck { lhs, rhs, pass: lhs <= rhs * (1.0 + 1e-9) })
}
