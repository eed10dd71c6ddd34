//! Truncated-Fock master equation of the regularly pumped cavity.
//!
//! Time is measured in photon lifetimes unless a different `kappa` is
//! supplied. The generator is
//!
//! ```text
//! dρ/dt = r_a (M − 1)ρ − (r_a/2)(M − 1)²ρ + Lρ,   r_a = N_t κ
//! ```
//!
//! where `M` is the single-atom gain map (the atom enters excited and is
//! traced out after a resonant Jaynes–Cummings pulse of area `gτ`) and `L`
//! the thermal-bath dissipator. The gain unitary is `exp(−iH'τ/ħ)` acting
//! from the left and its adjoint from the right.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::maser::{MaserConfig, PhotonDistribution, Provenance};

/// Hermiticity tolerance for validated states.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Trace tolerance for validated states.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative diagonal entry a valid state may carry.
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Top-level population above which the gain map is flagged as leaking.
pub const LEAK_LIMIT: f64 = 1e-10;
/// Upper bound on `dt·(r_a + κ(n_th+1)n_max)` for the explicit integrator.
pub const STABILITY_LIMIT: f64 = 0.1;

/// Cavity density matrix in the Fock basis `|0⟩..|n_max⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    rho: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity of the diagonal.
    pub fn new(rho: DMatrix<Complex64>) -> Result<Self> {
        let state = Self::unchecked(rho)?;
        state
            .check(HERMITIAN_TOL, TRACE_TOL, Some(POSITIVITY_TOL))
            .map_err(|what| invalid("rho", what))?;
        Ok(state)
    }

    fn unchecked(rho: DMatrix<Complex64>) -> Result<Self> {
        if !rho.is_square() || rho.nrows() < 2 {
            return Err(invalid(
                "rho",
                format!(
                    "must be square with dimension >= 2, got {}x{}",
                    rho.nrows(),
                    rho.ncols()
                ),
            ));
        }
        Ok(Self { rho })
    }

    /// Fock state `|n⟩⟨n|`.
    pub fn fock(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(invalid("n", format!("{n} exceeds n_max = {n_max}")));
        }
        let mut rho = DMatrix::zeros(n_max + 1, n_max + 1);
        rho[(n, n)] = Complex64::new(1.0, 0.0);
        Self::unchecked(rho)
    }

    /// Diagonal state with the given populations.
    pub fn from_populations(p: &[f64]) -> Result<Self> {
        let d = DVector::from_iterator(p.len(), p.iter().map(|&x| Complex64::new(x, 0.0)));
        Self::new(DMatrix::from_diagonal(&d))
    }

    /// Pure state `|ψ⟩⟨ψ|` after normalizing `ψ`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(invalid("psi", "zero vector"));
        }
        let v = DVector::from_iterator(psi.len(), psi.iter().map(|c| c / norm));
        Self::new(&v * v.adjoint())
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn n_max(&self) -> usize {
        self.rho.nrows() - 1
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn populations(&self) -> Vec<f64> {
        self.rho.diagonal().iter().map(|c| c.re).collect()
    }

    pub fn mean_n(&self) -> f64 {
        self.populations().iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// Largest `|ρ_{nm}|` with `n ≠ m`.
    pub fn max_coherence(&self) -> f64 {
        let d = self.rho.nrows();
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                if i != j {
                    worst = worst.max(self.rho[(i, j)].norm());
                }
            }
        }
        worst
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.rho.nrows();
        let mut worst = 0.0f64;
        for j in 0..d {
            for i in 0..=j {
                worst = worst.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        worst
    }

    fn check(&self, herm_tol: f64, trace_tol: f64, positivity: Option<f64>) -> std::result::Result<(), String> {
        let herm = self.hermiticity_error();
        if !(herm <= herm_tol) {
            return Err(format!("hermiticity error {herm:.3e} exceeds {herm_tol:.0e}"));
        }
        let tr = self.trace();
        if !((tr - 1.0).abs() <= trace_tol) {
            return Err(format!("trace {tr:.15} differs from 1 by more than {trace_tol:.0e}"));
        }
        if let Some(tol) = positivity {
            if let Some((n, p)) = self.populations().into_iter().enumerate().find(|(_, p)| *p < -tol) {
                return Err(format!("population p_{n} = {p:.3e} is below -{tol:.0e}"));
            }
        }
        Ok(())
    }
}

/// Master-equation parameters: the shared cavity config plus the decay rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterEquation {
    pub cfg: MaserConfig,
    pub kappa: f64,
}

impl MasterEquation {
    pub fn new(cfg: MaserConfig, kappa: f64) -> Result<Self> {
        cfg.validate()?;
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(invalid("kappa", format!("must be > 0, got {kappa}")));
        }
        Ok(Self { cfg, kappa })
    }

    /// Pump rate `r_a = N_t κ`.
    pub fn pump_rate(&self) -> f64 {
        self.cfg.n_t * self.kappa
    }

    /// Largest time step admitted by the stability bound.
    pub fn max_dt(&self) -> f64 {
        let c = &self.cfg;
        STABILITY_LIMIT / (self.pump_rate() + self.kappa * (c.n_th + 1.0) * c.n_max as f64)
    }

    fn check_dim(&self, rho: &DMatrix<Complex64>) -> Result<()> {
        if rho.nrows() != self.cfg.n_max + 1 {
            return Err(invalid(
                "rho",
                format!(
                    "dimension {} does not match n_max + 1 = {}",
                    rho.nrows(),
                    self.cfg.n_max + 1
                ),
            ));
        }
        Ok(())
    }

    /// `dρ/dt` for an arbitrary matrix of the right dimension.
    pub fn generator(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let g_tau = self.cfg.g_tau;
        let d1 = gain_minus_one(rho, g_tau);
        let d2 = gain_minus_one(&d1, g_tau);
        let r_a = self.pump_rate();
        let mut out = dissipator_raw(rho, self.kappa, self.cfg.n_th);
        out.zip_zip_apply(&d1, &d2, |o, a, b| *o += (a - b * 0.5) * r_a);
        out
    }

    /// Explicit generator restricted to the populations.
    pub fn diagonal_generator(&self) -> DMatrix<f64> {
        let n = self.cfg.n_max + 1;
        let d = gain_matrix_diagonal(self.cfg.g_tau, self.cfg.n_max) - DMatrix::identity(n, n);
        let r_a = self.pump_rate();
        &d * r_a - (&d * &d) * (0.5 * r_a) + dissipator_matrix_diagonal(self.kappa, self.cfg.n_th, self.cfg.n_max)
    }

    /// Explicit generator on the coherences `ρ_{n,n+offset}`, which form a
    /// closed sector.
    pub fn coherence_generator(&self, offset: usize) -> Result<DMatrix<f64>> {
        let n_max = self.cfg.n_max;
        if offset > n_max {
            return Err(invalid("offset", format!("{offset} exceeds n_max = {n_max}")));
        }
        let dim = n_max + 1 - offset;
        let mut out = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut basis = DMatrix::zeros(n_max + 1, n_max + 1);
            basis[(col, col + offset)] = Complex64::new(1.0, 0.0);
            let image = self.generator(&basis);
            for row in 0..dim {
                out[(row, col)] = image[(row, row + offset)].re;
            }
        }
        Ok(out)
    }

    /// Slowest decay rate of the coherences at the given offset
    /// (minus the largest real part of the sector's spectrum).
    pub fn coherence_decay_rate(&self, offset: usize) -> Result<f64> {
        let g = self.coherence_generator(offset)?;
        let top = g
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(-top)
    }
}

/// `cos(gτ√(n+1))` and `sin(gτ√n)` for `n = 0..=n_max`.
fn rabi_factors(g_tau: f64, n_max: usize) -> (Vec<f64>, Vec<f64>) {
    let c = (0..=n_max).map(|n| (g_tau * ((n + 1) as f64).sqrt()).cos()).collect();
    let s = (0..=n_max).map(|n| (g_tau * (n as f64).sqrt()).sin()).collect();
    (c, s)
}

fn gain_raw(rho: &DMatrix<Complex64>, g_tau: f64) -> DMatrix<Complex64> {
    let d = rho.nrows();
    let (c, s) = rabi_factors(g_tau, d - 1);
    DMatrix::from_fn(d, d, |n, m| {
        let mut v = rho[(n, m)] * (c[n] * c[m]);
        if n > 0 && m > 0 {
            v += rho[(n - 1, m - 1)] * (s[n] * s[m]);
        }
        v
    })
}

fn gain_minus_one(rho: &DMatrix<Complex64>, g_tau: f64) -> DMatrix<Complex64> {
    gain_raw(rho, g_tau) - rho
}

/// Outcome of one gain-map application.
#[derive(Debug, Clone, PartialEq)]
pub struct GainOutput {
    pub state: DensityMatrix,
    /// Population of `|n_max⟩` in the input, part of which is lost.
    pub top_population: f64,
    pub leaking: bool,
}

/// One atomic passage: `ρ ↦ Tr_atom[U(ρ⊗|e⟩⟨e|)U†]`.
pub fn gain_map(rho: &DensityMatrix, g_tau: f64) -> Result<GainOutput> {
    if !g_tau.is_finite() {
        return Err(invalid("g_tau", "must be finite"));
    }
    let top_population = rho.rho[(rho.n_max(), rho.n_max())].re;
    Ok(GainOutput {
        state: DensityMatrix {
            rho: gain_raw(&rho.rho, g_tau),
        },
        top_population,
        leaking: top_population.abs() > LEAK_LIMIT,
    })
}

fn dissipator_raw(rho: &DMatrix<Complex64>, kappa: f64, n_th: f64) -> DMatrix<Complex64> {
    let d = rho.nrows();
    let n_max = d - 1;
    let down = kappa * (n_th + 1.0);
    let up = kappa * n_th;
    // Diagonal of the truncated `a a†`.
    let aad = |n: usize| if n < n_max { (n + 1) as f64 } else { 0.0 };
    DMatrix::from_fn(d, d, |n, m| {
        let (nf, mf) = (n as f64, m as f64);
        let mut v = rho[(n, m)] * (-0.5 * (down * (nf + mf) + up * (aad(n) + aad(m))));
        if n < n_max && m < n_max {
            v += rho[(n + 1, m + 1)] * (down * ((nf + 1.0) * (mf + 1.0)).sqrt());
        }
        if n > 0 && m > 0 {
            v += rho[(n - 1, m - 1)] * (up * (nf * mf).sqrt());
        }
        v
    })
}

/// Thermal-bath contribution `Lρ` to `dρ/dt`.
pub fn dissipator(rho: &DensityMatrix, kappa: f64, n_th: f64) -> Result<DMatrix<Complex64>> {
    if !(kappa > 0.0) {
        return Err(invalid("kappa", format!("must be > 0, got {kappa}")));
    }
    if !(n_th >= 0.0) {
        return Err(invalid("n_th", format!("must be >= 0, got {n_th}")));
    }
    Ok(dissipator_raw(&rho.rho, kappa, n_th))
}

/// Gain map on the populations as an explicit matrix.
pub fn gain_matrix_diagonal(g_tau: f64, n_max: usize) -> DMatrix<f64> {
    let (c, s) = rabi_factors(g_tau, n_max);
    DMatrix::from_fn(n_max + 1, n_max + 1, |n, m| {
        if n == m {
            c[n] * c[n]
        } else if m + 1 == n {
            s[n] * s[n]
        } else {
            0.0
        }
    })
}

/// Dissipator on the populations as an explicit matrix.
pub fn dissipator_matrix_diagonal(kappa: f64, n_th: f64, n_max: usize) -> DMatrix<f64> {
    let down = kappa * (n_th + 1.0);
    let up = kappa * n_th;
    let mut l = DMatrix::zeros(n_max + 1, n_max + 1);
    for n in 0..=n_max {
        let nf = n as f64;
        let aad = if n < n_max { nf + 1.0 } else { 0.0 };
        l[(n, n)] = -(down * nf + up * aad);
        if n < n_max {
            l[(n, n + 1)] = down * (nf + 1.0);
            l[(n + 1, n)] = up * (nf + 1.0);
        }
    }
    l
}

/// Snapshot of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub trace: f64,
    pub populations: Vec<f64>,
    pub mean_n: f64,
    pub max_coherence: f64,
}

impl TrajectoryPoint {
    fn of(t: f64, state: &DensityMatrix) -> Self {
        Self {
            t,
            trace: state.trace(),
            populations: state.populations(),
            mean_n: state.mean_n(),
            max_coherence: state.max_coherence(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub final_state: DensityMatrix,
}

/// Knobs for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    /// Record every this many steps (the initial and final states are
    /// always recorded).
    pub record_every: usize,
    pub trace_tol: f64,
    pub hermitian_tol: f64,
    /// Abort when a population drops below minus this value. Regular
    /// pumping can produce genuinely negative steady-state weights, in
    /// which case the check has to be disabled to reach them.
    pub positivity_tol: Option<f64>,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            record_every: 1,
            trace_tol: 1e-9,
            hermitian_tol: 1e-10,
            positivity_tol: Some(POSITIVITY_TOL),
        }
    }
}

/// Fixed-step RK4 integration of the master equation.
pub fn evolve(
    rho0: &DensityMatrix,
    eq: &MasterEquation,
    t_final: f64,
    dt: f64,
    opts: EvolveOptions,
) -> Result<Trajectory> {
    eq.check_dim(&rho0.rho)?;
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(invalid("t_final", format!("must be >= 0, got {t_final}")));
    }
    if !(dt > 0.0) {
        return Err(invalid("dt", format!("must be > 0, got {dt}")));
    }
    let bound = eq.max_dt();
    if dt >= bound {
        return Err(Error::StabilityBound { dt, suggested: bound });
    }
    if opts.record_every == 0 {
        return Err(invalid("record_every", "must be >= 1"));
    }
    let steps = (t_final / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { t_final / steps as f64 };
    let mut state = rho0.clone();
    let mut points = vec![TrajectoryPoint::of(0.0, &state)];
    for step in 1..=steps {
        let rho = &state.rho;
        let k1 = eq.generator(rho);
        let half = Complex64::new(0.5 * h, 0.0);
        let k2 = eq.generator(&(rho + &k1 * half));
        let k3 = eq.generator(&(rho + &k2 * half));
        let k4 = eq.generator(&(rho + &k3 * Complex64::new(h, 0.0)));
        let next = rho + (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * Complex64::new(h / 6.0, 0.0);
        state = DensityMatrix { rho: next };
        let t = step as f64 * h;
        state
            .check(opts.hermitian_tol, opts.trace_tol, opts.positivity_tol)
            .map_err(|what| Error::InvariantBreach { t, what })?;
        if step % opts.record_every == 0 || step == steps {
            points.push(TrajectoryPoint::of(t, &state));
        }
    }
    Ok(Trajectory {
        points,
        final_state: state,
    })
}

/// Steady-state populations from the null vector of the diagonal generator.
pub fn steady_state_nullspace(eq: &MasterEquation) -> Result<PhotonDistribution> {
    let g = eq.diagonal_generator();
    let svd = g.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let smallest = svd.singular_values[order[0]];
    let second = svd.singular_values[order[1]];
    if second < 1e3 * smallest {
        return Err(Error::AmbiguousSteadyState { smallest, second });
    }
    let weights: Vec<f64> = v_t.row(order[0]).iter().copied().collect();
    PhotonDistribution::from_weights(weights, Provenance::MasterEquation)
}
