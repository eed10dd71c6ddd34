//! Microwave transition matrix elements, adiabaticity figures `K_ij` and
//! the control-protocol checks built on them.
//!
//! `|t_ij|` is reported in units of `I_c·Φ_w⁽⁰⁾`; only moduli are exposed
//! since eigenvector signs are a convention.

use std::f64::consts::PI;

use crate::circuit::{circulating_current, potential_dfs};
use crate::error::{invalid, Error, Result};
use crate::spectral::{map_points, validate_axis, EigenSpectrum, SweepSpec};

/// Gaps below this (units of `E_J`) are treated as level crossings.
pub const DEGENERACY_FLOOR: f64 = 1e-6;

/// Threshold on `K·|df_s/dt|` below which a ramp counts as adiabatic.
pub const ADIABATIC_THRESHOLD: f64 = 0.1;

/// Minimum `min(|t_12|, |t_02|)/|t_01|` for the pumping stage.
pub const PUMPING_RATIO: f64 = 5.0;

/// Time unit used to turn `K` into nanoseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KConvention {
    /// `h/E_J = 1/ej_freq`.
    #[default]
    Planck,
    /// `ħ/E_J = 1/(2π·ej_freq)`.
    ReducedPlanck,
}

impl KConvention {
    /// Time scale in ns for `E_J/h = ej_freq` GHz.
    pub fn time_scale_ns(self, ej_freq: f64) -> f64 {
        match self {
            Self::Planck => 1.0 / ej_freq,
            Self::ReducedPlanck => 1.0 / (2.0 * PI * ej_freq),
        }
    }
}

fn check_pair(spec: &EigenSpectrum, i: usize, j: usize) -> Result<()> {
    spec.check_index(i)?;
    spec.check_index(j)?;
    if i == j {
        return Err(invalid("j", "transition needs two distinct levels"));
    }
    Ok(())
}

/// `|⟨E_i| cos φ_p sin(πf + φ_q/2) |E_j⟩|`.
pub fn transition_element(spec: &EigenSpectrum, i: usize, j: usize) -> Result<f64> {
    check_pair(spec, i, j)?;
    let f = spec.params.f;
    let current = spec.sample(|p, q| circulating_current(p, q, f));
    Ok(spec.expectation(i, j, &current)?.abs())
}

/// `|⟨E_i| ∂(H/E_J)/∂f_s |E_j⟩|` at fixed `f`.
pub fn flux_coupling(spec: &EigenSpectrum, i: usize, j: usize) -> Result<f64> {
    check_pair(spec, i, j)?;
    let params = spec.params;
    let dh = spec.sample(|_, q| potential_dfs(q, &params));
    Ok(spec.expectation(i, j, &dh)?.abs())
}

/// `K_ij` in ns.
pub fn adiabatic_k(spec: &EigenSpectrum, i: usize, j: usize, convention: KConvention) -> Result<f64> {
    let coupling = flux_coupling(spec, i, j)?;
    if coupling == 0.0 {
        return Ok(0.0);
    }
    let gap = spec.levels[i] - spec.levels[j];
    if gap.abs() < DEGENERACY_FLOOR {
        return Err(Error::DegeneratePair { i, j, gap: gap.abs() });
    }
    Ok(convention.time_scale_ns(spec.params.ej_freq) * coupling / (gap * gap))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateCheck {
    pub product: f64,
    pub adiabatic: bool,
}

/// `K·|df_s/dt|` against `threshold`.
pub fn adiabatic_rate_check(k_ns: f64, df_s_dt: f64, threshold: f64) -> Result<RateCheck> {
    if !(k_ns >= 0.0) {
        return Err(invalid("K", format!("must be >= 0, got {k_ns}")));
    }
    if !(df_s_dt >= 0.0) {
        return Err(invalid("df_s/dt", format!("must be >= 0, got {df_s_dt}")));
    }
    let product = k_ns * df_s_dt;
    Ok(RateCheck {
        product,
        adiabatic: product < threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpingReport {
    /// `min(|t_12|, |t_02|)/|t_01|`; infinite when `t_01` vanishes.
    pub ratio: f64,
    pub pass: bool,
}

/// Checks the `t_01 ≪ t_12, t_02` hierarchy needed for the pump stage.
pub fn pumping_feasibility(t01: f64, t02: f64, t12: f64) -> PumpingReport {
    let strongest_pump = t12.abs().min(t02.abs());
    let ratio = if t01 == 0.0 {
        f64::INFINITY
    } else {
        strongest_pump / t01.abs()
    };
    PumpingReport {
        ratio,
        pass: ratio >= PUMPING_RATIO,
    }
}

/// `(t01_b / t01_a)²`: the factor by which relaxation at setting `a` is
/// shorter than at setting `b`, given `T_1 ∝ 1/|t_01|²`.
pub fn relative_relaxation(t01_a: f64, t01_b: f64) -> Result<f64> {
    if !(t01_a > 0.0) || !(t01_b > 0.0) {
        return Err(invalid("t01", "relaxation scaling needs non-zero matrix elements"));
    }
    Ok((t01_b / t01_a).powi(2))
}

/// `K_ij`, or a marker when the levels cross.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Adiabaticity {
    Finite(f64),
    Crossing,
}

impl Adiabaticity {
    pub fn value(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Crossing => None,
        }
    }
}

fn k_or_crossing(spec: &EigenSpectrum, i: usize, j: usize, c: KConvention) -> Result<Adiabaticity> {
    match adiabatic_k(spec, i, j, c) {
        Ok(v) => Ok(Adiabaticity::Finite(v)),
        Err(Error::DegeneratePair { .. }) => Ok(Adiabaticity::Crossing),
        Err(e) => Err(e),
    }
}

/// One flux point of a transition table.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow {
    pub f: f64,
    pub f_s: f64,
    /// Levels `E_0..E_{k−1}` in units of `E_J`.
    pub levels: Vec<f64>,
    pub t01: f64,
    pub t02: f64,
    pub t12: f64,
    pub k01: Adiabaticity,
    pub k12: Adiabaticity,
}

impl TransitionRow {
    pub fn from_spectrum(spec: &EigenSpectrum, convention: KConvention) -> Result<Self> {
        if spec.k() < 3 {
            return Err(invalid("k", "transition rows need at least three levels"));
        }
        Ok(Self {
            f: spec.params.f,
            f_s: spec.params.f_s,
            levels: spec.levels.clone(),
            t01: transition_element(spec, 0, 1)?,
            t02: transition_element(spec, 0, 2)?,
            t12: transition_element(spec, 1, 2)?,
            k01: k_or_crossing(spec, 0, 1, convention)?,
            k12: k_or_crossing(spec, 1, 2, convention)?,
        })
    }

    /// `E_{i+1} − E_i` for consecutive levels.
    pub fn gaps(&self) -> Vec<f64> {
        self.levels.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn pumping(&self) -> PumpingReport {
        pumping_feasibility(self.t01, self.t02, self.t12)
    }
}

/// Transition data along an `f` axis at one `f_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTable {
    pub f_s: f64,
    pub rows: Vec<TransitionRow>,
}

/// Solves every point of `f_values` and derives its row. Failures stay per
/// point so callers can decide how many to tolerate.
pub fn transition_sweep(
    spec: &SweepSpec,
    f_values: &[f64],
    convention: KConvention,
) -> Result<Vec<Result<TransitionRow>>> {
    validate_axis(f_values)?;
    if spec.k < 3 {
        return Err(invalid("k", "transition sweeps need at least three levels"));
    }
    Ok(map_points(f_values, |f| {
        let s = spec.solve(f)?;
        TransitionRow::from_spectrum(&s, convention).map_err(|e| Error::SweepPoint { f, source: Box::new(e) })
    }))
}

/// All-or-nothing variant of [`transition_sweep`].
pub fn transition_table(spec: &SweepSpec, f_values: &[f64], convention: KConvention) -> Result<TransitionTable> {
    let rows = transition_sweep(spec, f_values, convention)?
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(TransitionTable { f_s: spec.f_s, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{assemble_hamiltonian, CircuitParams, PhaseGrid, SymmetricOperator};
    use crate::spectral::lowest_eigenpairs;

    fn coarse(f: f64, f_s: f64) -> EigenSpectrum {
        let op = assemble_hamiltonian(&CircuitParams::reference(f, f_s), &PhaseGrid::new(40, 80).unwrap()).unwrap();
        lowest_eigenpairs(&op, 4).unwrap()
    }

    #[test]
    fn rate_check_examples() {
        let r = adiabatic_rate_check(0.2, 0.1, ADIABATIC_THRESHOLD).unwrap();
        assert!((r.product - 0.02).abs() < 1e-15 && r.adiabatic);
        let r = adiabatic_rate_check(0.01, 2.0, ADIABATIC_THRESHOLD).unwrap();
        assert!((r.product - 0.02).abs() < 1e-15 && r.adiabatic);
        let r = adiabatic_rate_check(123.0, 0.0, ADIABATIC_THRESHOLD).unwrap();
        assert_eq!(r.product, 0.0);
        assert!(r.adiabatic);
        assert!(!adiabatic_rate_check(2.0, 0.1, ADIABATIC_THRESHOLD).unwrap().adiabatic);
        assert!(adiabatic_rate_check(-1.0, 0.1, ADIABATIC_THRESHOLD).is_err());
    }

    #[test]
    fn pumping_examples() {
        let r = pumping_feasibility(0.01, 0.13, 0.07);
        assert!((r.ratio - 7.0).abs() < 1e-12 && r.pass);
        let r = pumping_feasibility(0.1, 0.1, 0.1);
        assert!((r.ratio - 1.0).abs() < 1e-12 && !r.pass);
        let r = pumping_feasibility(0.0, 0.13, 0.07);
        assert!(r.ratio.is_infinite() && r.pass);
    }

    #[test]
    fn relaxation_examples() {
        let r = relative_relaxation(0.13, 0.01).unwrap();
        assert!((r - 0.0059).abs() < 1e-4);
        assert!((1.0 / r - 169.0).abs() < 1.0);
        assert_eq!(relative_relaxation(0.3, 0.3).unwrap(), 1.0);
        assert!((relative_relaxation(0.1, 0.2).unwrap() - 4.0).abs() < 1e-12);
        assert!(relative_relaxation(0.0, 0.1).is_err());
    }

    #[test]
    fn conventions_differ_by_two_pi() {
        let a = KConvention::Planck.time_scale_ns(400.0);
        let b = KConvention::ReducedPlanck.time_scale_ns(400.0);
        assert!((a / b - 2.0 * PI).abs() < 1e-12);
        assert!((a - 0.0025).abs() < 1e-15);
    }

    #[test]
    fn k_vanishes_at_zero_squid_flux() {
        for f in [0.47, 0.493, 0.51] {
            let s = coarse(f, 0.0);
            assert_eq!(adiabatic_k(&s, 0, 1, KConvention::Planck).unwrap(), 0.0);
            assert_eq!(adiabatic_k(&s, 1, 2, KConvention::Planck).unwrap(), 0.0);
        }
    }

    #[test]
    fn index_errors() {
        let s = coarse(0.493, 0.27);
        assert!(transition_element(&s, 0, 0).is_err());
        assert!(matches!(
            transition_element(&s, 0, 4),
            Err(Error::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn hermitian_and_gauge_invariant() {
        let mut s = coarse(0.493, 0.22);
        let mut before = Vec::new();
        for (i, j) in [(0, 1), (0, 2), (1, 2), (2, 3)] {
            let a = transition_element(&s, i, j).unwrap();
            let b = transition_element(&s, j, i).unwrap();
            assert!((a - b).abs() < 1e-12);
            before.push((a, adiabatic_k(&s, i, j, KConvention::Planck).unwrap()));
        }
        for v in s.states[1].iter_mut() {
            *v = -*v;
        }
        for ((i, j), (t, k)) in [(0, 1), (0, 2), (1, 2), (2, 3)].into_iter().zip(before) {
            assert!((transition_element(&s, i, j).unwrap() - t).abs() < 1e-14);
            assert!((adiabatic_k(&s, i, j, KConvention::Planck).unwrap() - k).abs() < 1e-14);
        }
    }

    #[test]
    fn analytic_flux_derivative_matches_finite_difference() {
        // ⟨E_i| H(f_s + δ) |E_j⟩ with states frozen at f_s; the i ≠ j element
        // vanishes at δ = 0 so the central difference isolates ∂H/∂f_s.
        let params = CircuitParams::reference(0.493, 0.27);
        let grid = PhaseGrid::new(40, 80).unwrap();
        let s = lowest_eigenpairs(&assemble_hamiltonian(&params, &grid).unwrap(), 3).unwrap();
        let delta = 1e-4;
        let element = |fs: f64, i: usize, j: usize| {
            let op = assemble_hamiltonian(&params.with_flux(params.f, fs), &grid).unwrap();
            let mut hv = vec![0.0; op.dim()];
            op.apply(&s.states[j], &mut hv);
            s.states[i].iter().zip(&hv).map(|(a, b)| a * b).sum::<f64>() * grid.weight()
        };
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let fd = (element(0.27 + delta, i, j) - element(0.27 - delta, i, j)) / (2.0 * delta);
            let analytic = flux_coupling(&s, i, j).unwrap();
            assert!(
                (fd.abs() - analytic).abs() <= 1e-3 * analytic,
                "{i}{j}: {fd} vs {analytic}"
            );
        }
    }

    #[test]
    fn degenerate_pair_is_reported() {
        let mut s = coarse(0.493, 0.27);
        s.levels[1] = s.levels[0] + 1e-8;
        assert!(matches!(
            adiabatic_k(&s, 0, 1, KConvention::Planck),
            Err(Error::DegeneratePair { .. })
        ));
        assert_eq!(
            k_or_crossing(&s, 0, 1, KConvention::Planck).unwrap(),
            Adiabaticity::Crossing
        );
    }
}
