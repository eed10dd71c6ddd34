//! Circuit model of the SQUID-loaded flux loop.
//!
//! Energies are in units of `E_J` throughout this module. The two phase
//! coordinates are `φ_p ∈ [−π, π)` and `φ_q ∈ [−2π, 2π)`.
//!
//! Kinetic coefficients. With `Φ₀/2π = ħ/2e` and `E_c = e²/2C_J` the masses
//! `M_p = 2C_J(Φ₀/2π)²` and `M_q = M_p(1+4γ)/4` give
//!
//! ```text
//! ħ²/(2M_p) = e²/C_J        = 2 E_c
//! ħ²/(2M_q) = 4·2E_c/(1+4γ) = 8 E_c/(1+4γ)
//! ```
//!
//! so in units of `E_J` (with `x = E_J/E_c`) the operator is
//! `−c_p ∂²_p − c_q ∂²_q + U/E_J` with `c_p = 2/x`, `c_q = 8/(x(1+4γ))`.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Physical knobs of the artificial atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    /// SQUID junction ratio γ.
    pub gamma: f64,
    /// `E_J / E_c`.
    pub ej_over_ec: f64,
    /// Reduced total flux `f = Φ_e/Φ₀ + f_s/2`.
    pub f: f64,
    /// Reduced SQUID flux `f_s = Φ_s/Φ₀`.
    pub f_s: f64,
    /// `E_J/h` in GHz.
    pub ej_freq: f64,
}

impl CircuitParams {
    pub fn new(gamma: f64, ej_over_ec: f64, f: f64, f_s: f64, ej_freq: f64) -> Result<Self> {
        let params = Self {
            gamma,
            ej_over_ec,
            f,
            f_s,
            ej_freq,
        };
        params.validate()?;
        Ok(params)
    }

    /// γ = 0.5, E_J/E_c = 100, E_J/h = 400 GHz.
    pub fn reference(f: f64, f_s: f64) -> Self {
        Self {
            gamma: 0.5,
            ej_over_ec: 100.0,
            f,
            f_s,
            ej_freq: 400.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(name, format!("must be finite and > 0, got {v}")))
            }
        };
        positive("gamma", self.gamma)?;
        positive("ej_over_ec", self.ej_over_ec)?;
        positive("ej_freq", self.ej_freq)?;
        if !self.f.is_finite() {
            return Err(invalid("f", "must be finite"));
        }
        if !self.f_s.is_finite() {
            return Err(invalid("f_s", "must be finite"));
        }
        Ok(())
    }

    pub fn with_flux(self, f: f64, f_s: f64) -> Self {
        Self { f, f_s, ..self }
    }

    /// `(c_p, c_q)` in units of `E_J`.
    pub fn kinetic_coefficients(&self) -> (f64, f64) {
        let x = self.ej_over_ec;
        (2.0 / x, 8.0 / (x * (1.0 + 4.0 * self.gamma)))
    }

    pub fn alpha(&self) -> f64 {
        effective_alpha(self.gamma, self.f_s)
    }
}

/// Effective coupling α = 2γ cos(π f_s) of the SQUID junction pair.
pub fn effective_alpha(gamma: f64, f_s: f64) -> f64 {
    2.0 * gamma * (PI * f_s).cos()
}

/// Josephson potential `U(φ_p, φ_q)/E_J`.
pub fn potential(phi_p: f64, phi_q: f64, params: &CircuitParams) -> f64 {
    let loop_term = 1.0 - phi_p.cos() * (PI * params.f + 0.5 * phi_q).cos();
    let squid_term = 1.0 - (PI * params.f_s).cos() * phi_q.cos();
    2.0 * loop_term + 2.0 * params.gamma * squid_term
}

/// Circulating current in units of `I_c`.
pub fn circulating_current(phi_p: f64, phi_q: f64, f: f64) -> f64 {
    -phi_p.cos() * (PI * f + 0.5 * phi_q).sin()
}

/// `∂(U/E_J)/∂f_s` at fixed `f`.
pub fn potential_dfs(phi_q: f64, params: &CircuitParams) -> f64 {
    2.0 * PI * params.gamma * (PI * params.f_s).sin() * phi_q.cos()
}

/// Uniform periodic grid on `[−π, π) × [−2π, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseGrid {
    n_p: usize,
    n_q: usize,
}

impl PhaseGrid {
    pub const MIN_P: usize = 16;
    pub const MIN_Q: usize = 32;

    pub fn new(n_p: usize, n_q: usize) -> Result<Self> {
        if n_p < Self::MIN_P || n_q < Self::MIN_Q {
            return Err(Error::InvalidGrid {
                n_p,
                n_q,
                reason: format!("need n_p >= {} and n_q >= {}", Self::MIN_P, Self::MIN_Q),
            });
        }
        Ok(Self { n_p, n_q })
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn n_q(&self) -> usize {
        self.n_q
    }

    pub fn h_p(&self) -> f64 {
        2.0 * PI / self.n_p as f64
    }

    pub fn h_q(&self) -> f64 {
        4.0 * PI / self.n_q as f64
    }

    pub fn phi_p(&self, i: usize) -> f64 {
        -PI + self.h_p() * i as f64
    }

    pub fn phi_q(&self, j: usize) -> f64 {
        -2.0 * PI + self.h_q() * j as f64
    }

    /// Quadrature weight of a single grid cell.
    pub fn weight(&self) -> f64 {
        self.h_p() * self.h_q()
    }

    /// Grid with every axis doubled.
    pub fn refined(&self) -> Self {
        Self {
            n_p: 2 * self.n_p,
            n_q: 2 * self.n_q,
        }
    }
}

impl Default for PhaseGrid {
    fn default() -> Self {
        Self { n_p: 80, n_q: 160 }
    }
}

/// Boundary treatment along `φ_q`.
///
/// `U` is invariant under `T: (φ_p, φ_q) → (φ_p + π, φ_q + 2π)`, so the
/// 4π-periodic problem splits into `T = +1` and `T = −1` sectors with
/// identical spectra (up to exponentially small tunnelling). The sectors
/// are solved on `φ_q ∈ [−2π, 0)` with a twisted wrap that shifts `φ_p` by
/// half a period. `Full` keeps the whole 4π domain, where every level shows
/// up twice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BoundarySector {
    Full,
    #[default]
    Even,
    Odd,
}

impl BoundarySector {
    fn twist(self) -> Option<f64> {
        match self {
            Self::Full => None,
            Self::Even => Some(1.0),
            Self::Odd => Some(-1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::Even => "even",
            Self::Odd => "odd",
        }
    }
}

/// Potential used when assembling the operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PotentialModel {
    #[default]
    Josephson,
    /// `U ≡ 0`; leaves the discrete Laplacian only.
    Free,
}

/// A real symmetric linear operator acting on grid vectors.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;
    /// `y ← A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Discretized `H/E_J` on a [`PhaseGrid`].
#[derive(Debug, Clone)]
pub struct HamiltonianOperator {
    params: CircuitParams,
    grid: PhaseGrid,
    sector: BoundarySector,
    model: PotentialModel,
    rows_q: usize,
    off_p: f64,
    off_q: f64,
    diag: Vec<f64>,
}

/// Assembles the operator in the default (T-even) sector.
pub fn assemble_hamiltonian(params: &CircuitParams, grid: &PhaseGrid) -> Result<HamiltonianOperator> {
    HamiltonianOperator::new(params, grid, BoundarySector::default(), PotentialModel::Josephson)
}

impl HamiltonianOperator {
    pub fn new(
        params: &CircuitParams,
        grid: &PhaseGrid,
        sector: BoundarySector,
        model: PotentialModel,
    ) -> Result<Self> {
        params.validate()?;
        let grid = PhaseGrid::new(grid.n_p, grid.n_q)?;
        if sector != BoundarySector::Full && (grid.n_p % 2 != 0 || grid.n_q % 2 != 0) {
            return Err(Error::InvalidGrid {
                n_p: grid.n_p,
                n_q: grid.n_q,
                reason: format!("the {} sector needs even point counts", sector.name()),
            });
        }
        let rows_q = match sector {
            BoundarySector::Full => grid.n_q,
            _ => grid.n_q / 2,
        };
        let (c_p, c_q) = params.kinetic_coefficients();
        let off_p = -c_p / (grid.h_p() * grid.h_p());
        let off_q = -c_q / (grid.h_q() * grid.h_q());
        let kinetic = -2.0 * (off_p + off_q);

        let mut diag = Vec::with_capacity(grid.n_p * rows_q);
        for i in 0..grid.n_p {
            let p = grid.phi_p(i);
            for j in 0..rows_q {
                let u = match model {
                    PotentialModel::Josephson => potential(p, grid.phi_q(j), params),
                    PotentialModel::Free => 0.0,
                };
                diag.push(kinetic + u);
            }
        }
        Ok(Self {
            params: *params,
            grid,
            sector,
            model,
            rows_q,
            off_p,
            off_q,
            diag,
        })
    }

    pub fn params(&self) -> &CircuitParams {
        &self.params
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn sector(&self) -> BoundarySector {
        self.sector
    }

    pub fn model(&self) -> PotentialModel {
        self.model
    }

    /// Number of `φ_q` rows actually stored (all of them, or half in a sector).
    pub fn rows_q(&self) -> usize {
        self.rows_q
    }

    /// Evaluates `g(φ_p, φ_q)` on every stored grid point, in operator order.
    pub fn sample<F: Fn(f64, f64) -> f64>(&self, g: F) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.diag.len());
        for i in 0..self.grid.n_p {
            let p = self.grid.phi_p(i);
            for j in 0..self.rows_q {
                out.push(g(p, self.grid.phi_q(j)));
            }
        }
        out
    }

    /// Whether exact degeneracies are expected (every level doubled in
    /// `Full`, plane-wave multiplicities for `Free`).
    pub fn expects_degeneracy(&self) -> bool {
        self.sector == BoundarySector::Full || self.model == PotentialModel::Free
    }
}

impl SymmetricOperator for HamiltonianOperator {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n_p = self.grid.n_p;
        let m = self.rows_q;
        let half = n_p / 2;
        let twist = self.sector.twist();
        debug_assert_eq!(x.len(), n_p * m);
        debug_assert_eq!(y.len(), n_p * m);

        for i in 0..n_p {
            let up = if i + 1 == n_p { 0 } else { i + 1 } * m;
            let down = if i == 0 { n_p - 1 } else { i - 1 } * m;
            let row = i * m;
            // Neighbours across the φ_q seam.
            let (seam_hi, seam_lo, s) = match twist {
                None => (row, row + m - 1, 1.0),
                Some(s) => {
                    let shifted = ((i + half) % n_p) * m;
                    (shifted, shifted + m - 1, s)
                }
            };
            for j in 0..m {
                let k = row + j;
                let q_up = if j + 1 == m { s * x[seam_hi] } else { x[k + 1] };
                let q_down = if j == 0 { s * x[seam_lo] } else { x[k - 1] };
                y[k] = self.diag[k] * x[k] + self.off_p * (x[up + j] + x[down + j]) + self.off_q * (q_up + q_down);
            }
        }
    }
}
