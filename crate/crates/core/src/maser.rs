//! Closed-form steady-state photon statistics of the pumped cavity.
//!
//! Two pumping models are covered: the regularly switched circuit atom,
//! whose diagonal steady state obeys a three-term recursion, and the
//! Poisson-injected atomic beam, which obeys the familiar two-term one.

use crate::error::{invalid, Error, Result};

/// Normalized components in `[−ROUND_OFF, 0)` are treated as round-off.
pub const ROUND_OFF: f64 = 1e-12;
/// Tail probability above which a result is truncation-limited.
pub const TAIL_LIMIT: f64 = 1e-10;
pub const DEFAULT_N_MAX: usize = 256;
pub const MAX_AUTO_N_MAX: usize = 4096;

/// Cavity and pump parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaserConfig {
    /// Mean thermal photon number.
    pub n_th: f64,
    /// Pump events per photon lifetime, `r_a/κ`.
    pub n_t: f64,
    /// Rabi phase `gτ`.
    pub g_tau: f64,
    /// Fock-space cutoff.
    pub n_max: usize,
}

impl MaserConfig {
    pub fn new(n_th: f64, n_t: f64, g_tau: f64, n_max: usize) -> Result<Self> {
        let cfg = Self {
            n_th,
            n_t,
            g_tau,
            n_max,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Builds a config from the pump parameter `τ_int = gτ√N_t`.
    pub fn from_pump(n_th: f64, n_t: f64, tau_int: f64, n_max: usize) -> Result<Self> {
        if !(n_t > 0.0) {
            return Err(invalid("N_t", format!("must be > 0, got {n_t}")));
        }
        Self::new(n_th, n_t, tau_int / n_t.sqrt(), n_max)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_th >= 0.0 && self.n_th.is_finite()) {
            return Err(invalid("n_th", format!("must be >= 0, got {}", self.n_th)));
        }
        if !(self.n_t > 0.0 && self.n_t.is_finite()) {
            return Err(invalid("N_t", format!("must be > 0, got {}", self.n_t)));
        }
        if !(self.g_tau >= 0.0 && self.g_tau.is_finite()) {
            return Err(invalid("g_tau", format!("must be >= 0, got {}", self.g_tau)));
        }
        if self.n_max < 4 {
            return Err(invalid("n_max", format!("must be >= 4, got {}", self.n_max)));
        }
        Ok(())
    }

    pub fn tau_int(&self) -> f64 {
        self.g_tau * self.n_t.sqrt()
    }

    pub fn with_n_max(self, n_max: usize) -> Self {
        Self { n_max, ..self }
    }
}

/// Which calculation produced a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    RecursionSqc,
    RecursionAtomic,
    MasterEquation,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Self::RecursionSqc => "recursion-sqc",
            Self::RecursionAtomic => "recursion-atomic",
            Self::MasterEquation => "master-equation",
        }
    }
}

/// Photon-number probabilities `p_0..p_{n_max}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    pub probs: Vec<f64>,
    pub provenance: Provenance,
    /// `p_{n_max}` after normalization.
    pub tail: f64,
    /// Round-off negatives set to zero.
    pub clamped: usize,
    /// Sum of the components below `−ROUND_OFF`, kept as computed.
    pub negative_mass: f64,
    pub truncation_limited: bool,
    pub unstable: bool,
}

impl PhotonDistribution {
    /// Normalizes raw weights and records the diagnostic flags.
    pub fn from_weights(mut probs: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        let finite = probs.iter().all(|p| p.is_finite());
        let total: f64 = probs.iter().sum();
        let mut unstable = !finite || !(total.is_finite() && total != 0.0);
        if !unstable {
            probs.iter_mut().for_each(|p| *p /= total);
            // A runaway upward recursion shows up as a tail that outgrows
            // the body of the distribution.
            let n = probs.len();
            let peak = probs.iter().fold(0.0f64, |m, p| m.max(p.abs()));
            let top = probs[n - n.div_ceil(10)..].iter().fold(0.0f64, |m, p| m.max(p.abs()));
            unstable = top >= peak && n > 10 && peak > 0.0 && probs[..n / 2].iter().any(|p| p.abs() > top * 1e-3);
        }
        let mut clamped = 0;
        let mut negative_mass = 0.0;
        for p in probs.iter_mut() {
            if *p < 0.0 {
                if *p >= -ROUND_OFF {
                    *p = 0.0;
                    clamped += 1;
                } else {
                    negative_mass += *p;
                }
            }
        }
        let tail = *probs.last().unwrap();
        Ok(Self {
            truncation_limited: tail.abs() >= TAIL_LIMIT,
            tail,
            probs,
            provenance,
            clamped,
            negative_mass,
            unstable,
        })
    }

    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn moments(&self) -> Result<Moments> {
        distribution_moments(&self.probs)
    }
}

/// `S(n) = sin²(gτ√n)`.
pub fn rabi_s(n: usize, g_tau: f64) -> f64 {
    (g_tau * (n as f64).sqrt()).sin().powi(2)
}

/// Steady state of the regularly switched circuit micromaser.
pub fn steady_state_sqc(cfg: &MaserConfig) -> Result<PhotonDistribution> {
    cfg.validate()?;
    let MaserConfig {
        n_th,
        n_t,
        g_tau,
        n_max,
    } = *cfg;
    let thermal = n_th / (n_th + 1.0);
    let mut p = vec![0.0; n_max + 1];
    p[0] = 1.0;
    for n in 0..n_max {
        let s_next = rabi_s(n + 1, g_tau);
        let denom = 2.0 * (n_th + 1.0) * (n + 1) as f64;
        let gain = thermal + 2.0 * n_t * s_next * (1.0 + 0.5 * s_next) / denom;
        let mut next = gain * p[n];
        if n > 0 {
            next -= n_t * s_next * rabi_s(n, g_tau) / denom * p[n - 1];
        }
        p[n + 1] = next;
    }
    PhotonDistribution::from_weights(p, Provenance::RecursionSqc)
}

/// Steady state of the Poisson-pumped atomic micromaser.
pub fn steady_state_atomic(cfg: &MaserConfig) -> Result<PhotonDistribution> {
    cfg.validate()?;
    let MaserConfig {
        n_th,
        n_t,
        g_tau,
        n_max,
    } = *cfg;
    let mut p = vec![0.0; n_max + 1];
    p[0] = 1.0;
    for n in 1..=n_max {
        let nf = n as f64;
        p[n] = p[n - 1] * (n_th * nf + n_t * rabi_s(n, g_tau)) / ((n_th + 1.0) * nf);
    }
    PhotonDistribution::from_weights(p, Provenance::RecursionAtomic)
}

/// Repeats `solve` with doubled `n_max` while the tail flag is set.
pub fn with_auto_truncation<F>(cfg: &MaserConfig, solve: F) -> Result<PhotonDistribution>
where
    F: Fn(&MaserConfig) -> Result<PhotonDistribution>,
{
    let mut cfg = *cfg;
    loop {
        let dist = solve(&cfg)?;
        if !dist.truncation_limited || cfg.n_max * 2 > MAX_AUTO_N_MAX {
            return Ok(dist);
        }
        cfg = cfg.with_n_max(cfg.n_max * 2);
    }
}

/// Geometric distribution `(1−q)qⁿ`, `q = n_th/(1+n_th)`.
pub fn thermal_distribution(n_th: f64, n_max: usize) -> Vec<f64> {
    let q = n_th / (1.0 + n_th);
    (0..=n_max).map(|n| (1.0 - q) * q.powi(n as i32)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    /// `variance/mean`; NaN when the mean vanishes.
    pub fano: f64,
}

pub fn distribution_moments(p: &[f64]) -> Result<Moments> {
    if p.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let mean: f64 = p.iter().enumerate().map(|(n, pn)| n as f64 * pn).sum();
    let variance: f64 = p.iter().enumerate().map(|(n, pn)| (n as f64 - mean).powi(2) * pn).sum();
    let fano = if mean == 0.0 { f64::NAN } else { variance / mean };
    Ok(Moments { mean, variance, fano })
}
