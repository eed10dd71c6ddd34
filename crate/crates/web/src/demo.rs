//! Page operations on plain Rust types.

use std::f64::consts::PI;

use micromaser::circuit::{CircuitParams, PhaseGrid};
use micromaser::device::{device_report, DeviceInputs};
use micromaser::maser::{steady_state_atomic, steady_state_sqc, with_auto_truncation, MaserConfig};
use micromaser::spectral::{flux_axis, SweepSpec};
use micromaser::transitions::{transition_table, KConvention};
use micromaser::Result;

/// Number of values per row returned by [`level_rows`].
pub const LEVEL_ROW: usize = 8;

/// Four lowest levels and the three matrix elements along `f`.
///
/// Rows are flattened as `f, E0, E1, E2, E3, t01, t02, t12`.
pub fn level_rows(f_s: f64, f_start: f64, f_stop: f64, step: f64, n_p: usize, n_q: usize) -> Result<Vec<f64>> {
    let grid = PhaseGrid::new(n_p, n_q)?;
    let spec = SweepSpec::new(CircuitParams::reference(f_start, f_s), f_s, grid, 4);
    let axis = flux_axis(f_start, f_stop, step)?;
    let table = transition_table(&spec, &axis, KConvention::Planck)?;
    let mut out = Vec::with_capacity(table.rows.len() * LEVEL_ROW);
    for r in &table.rows {
        out.push(r.f);
        out.extend_from_slice(&r.levels);
        out.extend([r.t01, r.t02, r.t12]);
    }
    Ok(out)
}

pub struct Statistics {
    pub sqc: Vec<f64>,
    pub atomic: Vec<f64>,
    /// Mean, variance and Fano factor of each distribution.
    pub sqc_moments: [f64; 3],
    pub atomic_moments: [f64; 3],
}

/// Steady photon distributions for regular and Poissonian pumping.
pub fn photon_statistics(n_th: f64, n_t: f64, tau_over_pi: f64) -> Result<Statistics> {
    let cfg = MaserConfig::from_pump(n_th, n_t, tau_over_pi * PI, 64)?;
    let sqc = with_auto_truncation(&cfg, steady_state_sqc)?;
    let atomic = with_auto_truncation(&cfg.with_n_max(sqc.n_max()), steady_state_atomic)?;
    let sqc = if atomic.n_max() > sqc.n_max() {
        steady_state_sqc(&cfg.with_n_max(atomic.n_max()))?
    } else {
        sqc
    };
    let (a, b) = (sqc.moments()?, atomic.moments()?);
    Ok(Statistics {
        sqc_moments: [a.mean, a.variance, a.fano],
        atomic_moments: [b.mean, b.variance, b.fano],
        sqc: sqc.probs,
        atomic: atomic.probs,
    })
}

/// Device estimate as `name<TAB>value<TAB>unit` lines.
pub fn device_table(gap_over_ej: f64, t01: f64, n_t: f64, tau_over_pi: f64) -> Result<String> {
    let inputs = DeviceInputs {
        gap_over_ej,
        t01,
        n_t,
        tau_int: tau_over_pi * PI,
        ..DeviceInputs::reference()
    };
    let report = device_report(&inputs)?;
    Ok(report
        .rows()
        .iter()
        .map(|(name, value, unit)| format!("{name}\t{value:.4e}\t{unit}\n"))
        .collect())
}
