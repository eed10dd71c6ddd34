//! Lowest levels of the circuit Hamiltonian and flux sweeps.

mod cache;
pub mod eigen;
mod tridiag;

use rayon::prelude::*;

pub use cache::{SweepCache, SweepKey};
pub use eigen::{EigenOptions, Eigenpairs};

use crate::circuit::{BoundarySector, CircuitParams, HamiltonianOperator, PhaseGrid, PotentialModel};
use crate::error::{invalid, Error, Result};

pub const MAX_LEVELS: usize = 8;

/// Lowest levels (units of `E_J`) and grid-sampled eigenvectors.
///
/// States are normalized under the quadrature weight `h_p·h_q` and carry a
/// fixed sign: the component of largest magnitude is positive.
#[derive(Debug, Clone)]
pub struct EigenSpectrum {
    pub params: CircuitParams,
    pub grid: PhaseGrid,
    pub sector: BoundarySector,
    pub levels: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

impl EigenSpectrum {
    pub fn k(&self) -> usize {
        self.levels.len()
    }

    fn rows_q(&self) -> usize {
        match self.sector {
            BoundarySector::Full => self.grid.n_q(),
            _ => self.grid.n_q() / 2,
        }
    }

    /// Samples `g(φ_p, φ_q)` in the same layout as the stored states.
    pub fn sample<F: Fn(f64, f64) -> f64>(&self, g: F) -> Vec<f64> {
        let m = self.rows_q();
        let mut out = Vec::with_capacity(self.grid.n_p() * m);
        for i in 0..self.grid.n_p() {
            let p = self.grid.phi_p(i);
            for j in 0..m {
                out.push(g(p, self.grid.phi_q(j)));
            }
        }
        out
    }

    /// `⟨E_i| A |E_j⟩` for a multiplication operator sampled on the grid.
    pub fn expectation(&self, i: usize, j: usize, sampled: &[f64]) -> Result<f64> {
        self.check_index(i)?;
        self.check_index(j)?;
        let (a, b) = (&self.states[i], &self.states[j]);
        let sum: f64 = a.iter().zip(b).zip(sampled).map(|((x, y), g)| x * g * y).sum();
        Ok(sum * self.grid.weight())
    }

    /// Quadrature inner product of two stored states.
    pub fn overlap(&self, i: usize, j: usize) -> Result<f64> {
        self.check_index(i)?;
        self.check_index(j)?;
        Ok(eigen::dot(&self.states[i], &self.states[j]) * self.grid.weight())
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.levels.len() {
            Ok(())
        } else {
            Err(Error::LevelOutOfRange {
                index: i,
                available: self.levels.len(),
            })
        }
    }

    pub fn gap(&self, lower: usize, upper: usize) -> Result<f64> {
        self.check_index(lower)?;
        self.check_index(upper)?;
        Ok(self.levels[upper] - self.levels[lower])
    }
}

/// `k` lowest eigenpairs with default solver options.
pub fn lowest_eigenpairs(op: &HamiltonianOperator, k: usize) -> Result<EigenSpectrum> {
    lowest_eigenpairs_with(op, k, &EigenOptions::default())
}

pub fn lowest_eigenpairs_with(op: &HamiltonianOperator, k: usize, opts: &EigenOptions) -> Result<EigenSpectrum> {
    if k == 0 || k > MAX_LEVELS {
        return Err(invalid("k", format!("need 1 <= k <= {MAX_LEVELS}, got {k}")));
    }
    let pairs = eigen::solve_lowest(op, k, opts, op.expects_degeneracy())?;
    let scale = 1.0 / op.grid().weight().sqrt();
    let states = pairs
        .vectors
        .into_iter()
        .map(|mut v| {
            let pivot = v
                .iter()
                .copied()
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap_or(0.0);
            let sign = if pivot < 0.0 { -scale } else { scale };
            v.iter_mut().for_each(|x| *x *= sign);
            v
        })
        .collect();
    Ok(EigenSpectrum {
        params: *op.params(),
        grid: *op.grid(),
        sector: op.sector(),
        levels: pairs.values,
        states,
        residuals: pairs.residuals,
    })
}

/// Everything but `f` that determines a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub template: CircuitParams,
    pub f_s: f64,
    pub grid: PhaseGrid,
    pub sector: BoundarySector,
    pub k: usize,
    pub options: EigenOptions,
}

impl SweepSpec {
    pub fn new(template: CircuitParams, f_s: f64, grid: PhaseGrid, k: usize) -> Self {
        Self {
            template,
            f_s,
            grid,
            sector: BoundarySector::default(),
            k,
            options: EigenOptions::default(),
        }
    }

    pub fn params_at(&self, f: f64) -> CircuitParams {
        self.template.with_flux(f, self.f_s)
    }

    /// Solves a single sweep point.
    pub fn solve(&self, f: f64) -> Result<EigenSpectrum> {
        let op = HamiltonianOperator::new(&self.params_at(f), &self.grid, self.sector, PotentialModel::Josephson)?;
        lowest_eigenpairs_with(&op, self.k, &self.options).map_err(|e| Error::SweepPoint { f, source: Box::new(e) })
    }

    pub fn key(&self, axis: &[f64]) -> SweepKey {
        SweepKey::new(self, axis)
    }
}

/// Levels along a flux axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub axis: Vec<f64>,
    /// `levels[point][level]`.
    pub levels: Vec<Vec<f64>>,
    pub key: SweepKey,
}

pub fn validate_axis(f_values: &[f64]) -> Result<()> {
    if f_values.is_empty() {
        return Err(invalid("f_values", "sweep axis is empty"));
    }
    if f_values.iter().any(|f| !f.is_finite()) {
        return Err(invalid("f_values", "non-finite flux value"));
    }
    if f_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("f_values", "sweep axis must be strictly increasing"));
    }
    Ok(())
}

/// Runs `work` on every axis point using the current rayon pool; output is
/// in axis order.
pub fn map_points<T, F>(f_values: &[f64], work: F) -> Vec<Result<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    f_values.par_iter().map(|&f| work(f)).collect()
}

/// Levels for every `f` in `f_values` at fixed `f_s`.
pub fn sweep_spectrum(spec: &SweepSpec, f_values: &[f64]) -> Result<SweepResult> {
    validate_axis(f_values)?;
    spec.template.validate()?;
    let levels = map_points(f_values, |f| spec.solve(f).map(|s| s.levels))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        spec: *spec,
        axis: f_values.to_vec(),
        levels,
        key: spec.key(f_values),
    })
}

/// Same as [`sweep_spectrum`] but keeps the eigenvectors.
pub fn sweep_spectra(spec: &SweepSpec, f_values: &[f64]) -> Result<Vec<EigenSpectrum>> {
    validate_axis(f_values)?;
    map_points(f_values, |f| spec.solve(f)).into_iter().collect()
}

/// Inclusive, evenly spaced axis from `start` to `stop` with step `step`.
pub fn flux_axis(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(invalid("f range", format!("bad range {start}..={stop} step {step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + step * i as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane_wave_levels(params: &CircuitParams, grid: &PhaseGrid, sector: BoundarySector) -> Vec<f64> {
        // Discrete dispersion of the periodic second-difference stencil.
        let (c_p, c_q) = params.kinetic_coefficients();
        let (hp, hq) = (grid.h_p(), grid.h_q());
        let mut out = Vec::new();
        for k in 0..grid.n_p() {
            for m in 0..grid.n_q() {
                // Wave numbers: k on the 2π axis, m/2 on the 4π axis.
                let parity_ok = match sector {
                    BoundarySector::Full => true,
                    BoundarySector::Even => (k + m) % 2 == 0,
                    BoundarySector::Odd => (k + m) % 2 == 1,
                };
                if !parity_ok {
                    continue;
                }
                let kp = k as f64;
                let kq = 0.5 * m as f64;
                let ep = 4.0 * (kp * hp / 2.0).sin().powi(2) / (hp * hp);
                let eq = 4.0 * (kq * hq / 2.0).sin().powi(2) / (hq * hq);
                out.push(c_p * ep + c_q * eq);
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    #[test]
    fn free_particle_matches_plane_waves() {
        let params = CircuitParams::reference(0.0, 0.0);
        let grid = PhaseGrid::new(16, 32).unwrap();
        for sector in [BoundarySector::Full, BoundarySector::Even, BoundarySector::Odd] {
            let op = HamiltonianOperator::new(&params, &grid, sector, PotentialModel::Free).unwrap();
            let spec = lowest_eigenpairs(&op, 8).unwrap();
            let exact = plane_wave_levels(&params, &grid, sector);
            for (a, b) in spec.levels.iter().zip(&exact) {
                assert!((a - b).abs() < 1e-12, "{sector:?}: {a} vs {b}");
            }
        }
        // Lowest non-zero φ_q mode: c_q (1/2)² up to stencil dispersion.
        let op = HamiltonianOperator::new(&params, &grid, BoundarySector::Full, PotentialModel::Free).unwrap();
        let spec = lowest_eigenpairs(&op, 2).unwrap();
        let hq = grid.h_q();
        let expected = (8.0 / 300.0) * 4.0 * (0.25 * hq).sin().powi(2) / (hq * hq);
        assert!((spec.levels[1] - expected).abs() < 1e-12);
        assert!((expected - 8.0 / 1200.0).abs() < 1e-4);
    }

    #[test]
    fn spectrum_invariants_hold() {
        let params = CircuitParams::reference(0.493, 0.27);
        let grid = PhaseGrid::new(20, 40).unwrap();
        let op = HamiltonianOperator::new(&params, &grid, BoundarySector::Even, PotentialModel::Josephson).unwrap();
        let spec = lowest_eigenpairs(&op, 4).unwrap();
        assert!(spec.levels.windows(2).all(|w| w[0] <= w[1]));
        for i in 0..4 {
            for j in 0..4 {
                let o = spec.overlap(i, j).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((o - want).abs() < 1e-8);
            }
            assert!(spec.residuals[i] < 1e-8 * spec.levels[i].abs());
            let pivot = spec.states[i]
                .iter()
                .copied()
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap();
            assert!(pivot > 0.0);
        }
    }

    #[test]
    fn rejects_bad_level_counts() {
        let params = CircuitParams::reference(0.5, 0.0);
        let op = HamiltonianOperator::new(
            &params,
            &PhaseGrid::new(16, 32).unwrap(),
            BoundarySector::Even,
            PotentialModel::Josephson,
        )
        .unwrap();
        assert!(lowest_eigenpairs(&op, 0).is_err());
        assert!(lowest_eigenpairs(&op, 9).is_err());
    }

    #[test]
    fn axis_validation() {
        assert!(validate_axis(&[]).is_err());
        assert!(validate_axis(&[0.4, 0.4]).is_err());
        assert!(validate_axis(&[0.5, 0.4]).is_err());
        assert!(validate_axis(&[0.4, 0.5]).is_ok());
        let axis = flux_axis(0.45, 0.55, 0.01).unwrap();
        assert_eq!(axis.len(), 11);
        assert!(flux_axis(0.5, 0.4, 0.01).is_err());
        assert!((axis[10] - 0.55).abs() < 1e-12);
    }
}
