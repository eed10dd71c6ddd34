//! Subcommand implementations. Each returns the files it wrote.

use std::path::{Path, PathBuf};

use micromaser::circuit::{BoundarySector, HamiltonianOperator, PotentialModel};
use micromaser::device::{device_report, DeviceReport};
use micromaser::lindblad::{evolve, DensityMatrix, EvolveOptions, MasterEquation, POSITIVITY_TOL};
use micromaser::maser::{steady_state_atomic, steady_state_sqc, with_auto_truncation, MaserConfig, PhotonDistribution};
use micromaser::spectral::{lowest_eigenpairs_with, map_points, SweepCache, SweepResult};
use micromaser::transitions::{transition_element, transition_sweep, Adiabaticity, TransitionRow};
use std::f64::consts::PI;

use crate::config::{DeviceSource, Preset, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{tag, Cell, Csv};

/// Largest tolerated fraction of failed sweep points.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

pub struct Context {
    pub cfg: RunConfig,
    pub hash: String,
    pub out: PathBuf,
}

impl Context {
    pub fn new(cfg: RunConfig) -> CliResult<Self> {
        cfg.validate()?;
        Ok(Self {
            hash: cfg.hash(),
            out: cfg.output.dir.clone(),
            cfg,
        })
    }

    fn csv(&self, command: &str) -> Csv {
        let mut csv = Csv::new(command, &self.hash, self.cfg.output.precision);
        let c = &self.cfg.circuit;
        csv.comment(
            "circuit",
            format!(
                "gamma={} ej_over_ec={} ej_freq_ghz={}",
                c.gamma, c.ej_over_ec, c.ej_freq
            ),
        )
        .comment(
            "grid",
            format!("{}x{} sector={}", c.n_p, c.n_q, BoundarySector::from(c.sector).name()),
        );
        csv
    }
}

/// Rows that solved, plus a sidecar log for those that did not. Fails the
/// run when more than 1% of the points failed.
fn split_failures<T>(
    ctx: &Context,
    stem: &str,
    axis: &[f64],
    results: Vec<micromaser::Result<T>>,
    written: &mut Vec<PathBuf>,
) -> CliResult<Vec<(f64, T)>> {
    let mut ok = Vec::with_capacity(results.len());
    let mut log = String::new();
    for (&f, r) in axis.iter().zip(results) {
        match r {
            Ok(v) => ok.push((f, v)),
            Err(e) => log.push_str(&format!("f={f}: {e}\n")),
        }
    }
    let failed = axis.len() - ok.len();
    if failed > 0 {
        std::fs::create_dir_all(&ctx.out)?;
        let path = ctx.out.join(format!("{stem}.failures.log"));
        std::fs::write(&path, log)?;
        written.push(path);
    }
    if failed as f64 > MAX_FAILURE_FRACTION * axis.len() as f64 {
        return Err(CliError::Numerical(format!(
            "{failed} of {} points failed in {stem}; see {stem}.failures.log",
            axis.len()
        )));
    }
    Ok(ok)
}

fn rows_at(ctx: &Context, f_s: f64, stem: &str, written: &mut Vec<PathBuf>) -> CliResult<Vec<TransitionRow>> {
    let spec = ctx.cfg.sweep_spec(f_s)?;
    let axis = ctx.cfg.flux_axis()?;
    let results = transition_sweep(&spec, &axis, ctx.cfg.sweep.k_convention.into())?;
    Ok(split_failures(ctx, stem, &axis, results, written)?
        .into_iter()
        .map(|(_, r)| r)
        .collect())
}

/// Levels and `|t_ij|` versus `f`, one file per `f_s`.
pub fn cmd_fig2(ctx: &Context) -> CliResult<Vec<PathBuf>> {
    let k = ctx.cfg.sweep.k;
    if k < 3 {
        return Err(CliError::Validation("fig2 needs sweep.k >= 3".into()));
    }
    let mut written = Vec::new();
    for &f_s in &ctx.cfg.sweep.f_s {
        let stem = format!("fig2_fs{}", tag(f_s));
        let rows = rows_at(ctx, f_s, &stem, &mut written)?;
        let mut csv = ctx.csv("fig2");
        csv.comment("f_s", f_s)
            .comment("units", "f and f_s in flux quanta; E_i in E_J; t_ij in I_c*Phi_w0");
        let mut cols: Vec<String> = vec!["f".into()];
        cols.extend((0..k).map(|i| format!("E{i}")));
        cols.extend(["t01", "t02", "t12"].map(String::from));
        csv.columns(&cols);
        for r in rows {
            let mut cells: Vec<Cell> = vec![r.f.into()];
            cells.extend(r.levels.iter().map(|&e| Cell::Num(e)));
            cells.extend([r.t01, r.t02, r.t12].map(Cell::Num));
            csv.row(cells);
        }
        written.push(csv.write(&ctx.out, &format!("{stem}.csv"))?);
    }
    Ok(written)
}

fn k_cell(a: Adiabaticity) -> Cell {
    match a {
        Adiabaticity::Finite(v) => Cell::Num(v),
        Adiabaticity::Crossing => Cell::Text("crossing".into()),
    }
}

/// `K_01`, `K_12` versus `f` for every adiabatic-map `f_s`.
pub fn cmd_fig3(ctx: &Context) -> CliResult<Vec<PathBuf>> {
    if ctx.cfg.sweep.k < 3 {
        return Err(CliError::Validation("fig3 needs sweep.k >= 3".into()));
    }
    let mut written = Vec::new();
    let mut csv = ctx.csv("fig3");
    let convention = ctx.cfg.sweep.k_convention;
    csv.comment("k_convention", format!("{convention:?}").to_lowercase())
        .comment(
            "units",
            "f and f_s in flux quanta; gaps in E_J; K_ij in ns; 'crossing' where the gap is below 1e-6 E_J",
        )
        .columns(&["f_s", "f", "gap01", "gap12", "K01", "K12"]);
    for &f_s in &ctx.cfg.sweep.f_s_adiabatic {
        let rows = rows_at(ctx, f_s, &format!("fig3_fs{}", tag(f_s)), &mut written)?;
        for r in rows {
            let gaps = r.gaps();
            csv.row(vec![
                f_s.into(),
                r.f.into(),
                gaps[0].into(),
                gaps[1].into(),
                k_cell(r.k01),
                k_cell(r.k12),
            ]);
        }
    }
    written.push(csv.write(&ctx.out, "fig3.csv")?);
    Ok(written)
}

/// Both steady states on a common cutoff wide enough for each.
pub fn photon_statistics(cfg: &MaserConfig) -> CliResult<(PhotonDistribution, PhotonDistribution)> {
    let sqc = with_auto_truncation(cfg, steady_state_sqc)?;
    let atomic = with_auto_truncation(&cfg.with_n_max(sqc.n_max()), steady_state_atomic)?;
    if atomic.n_max() == sqc.n_max() {
        return Ok((sqc, atomic));
    }
    let wide = cfg.with_n_max(atomic.n_max());
    Ok((steady_state_sqc(&wide)?, atomic))
}

fn describe(d: &PhotonDistribution) -> CliResult<String> {
    let m = d.moments()?;
    Ok(format!(
        "mean={} variance={} fano={} tail={:e} negative_mass={:e} clamped={} truncation_limited={} unstable={}",
        m.mean, m.variance, m.fano, d.tail, d.negative_mass, d.clamped, d.truncation_limited, d.unstable
    ))
}

/// `n, p_sqc, p_atomic` for every `(N_t, τ_int)` pair.
pub fn cmd_fig4(ctx: &Context) -> CliResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    let m = &ctx.cfg.maser;
    let labels = m.n_t.iter().zip(&m.tau_int_over_pi);
    for (cfg, (n_t, tau_over_pi)) in ctx.cfg.maser_configs()?.into_iter().zip(labels) {
        let (sqc, atomic) = photon_statistics(&cfg)?;
        let mut csv = Csv::new("fig4", &ctx.hash, ctx.cfg.output.precision);
        csv.comment("n_th", cfg.n_th)
            .comment("N_t", n_t)
            .comment("tau_int_over_pi", tau_over_pi)
            .comment("n_max", sqc.n_max())
            .comment("sqc", describe(&sqc)?)
            .comment("atomic", describe(&atomic)?)
            .columns(&["n", "p_sqc", "p_atomic"]);
        for (n, (a, b)) in sqc.probs.iter().zip(&atomic.probs).enumerate() {
            csv.row(vec![n.into(), (*a).into(), (*b).into()]);
        }
        let name = format!("fig4_Nt{}_tau{}pi.csv", tag(*n_t), tag(*tau_over_pi));
        written.push(csv.write(&ctx.out, &name)?);
    }
    Ok(written)
}

/// Master-equation trajectory plus a final-state comparison file.
pub fn cmd_evolve(ctx: &Context) -> CliResult<Vec<PathBuf>> {
    let e = &ctx.cfg.evolve;
    let (cfg, rho0) = match e.preset {
        Preset::Maser => (
            MaserConfig::from_pump(ctx.cfg.maser.n_th, e.n_t, e.tau_int_over_pi * PI, e.n_max)?,
            DensityMatrix::fock(0, e.n_max)?,
        ),
        Preset::PureDecay => (
            MaserConfig::new(0.0, e.n_t, 0.0, e.n_max)?,
            DensityMatrix::fock(1, e.n_max)?,
        ),
    };
    let eq = MasterEquation::new(cfg, 1.0)?;
    let dt = e.dt.unwrap_or(0.9 * eq.max_dt());
    let opts = EvolveOptions {
        record_every: e.record_every,
        positivity_tol: e.check_positivity.then_some(POSITIVITY_TOL),
        ..EvolveOptions::default()
    };
    let traj = evolve(&rho0, &eq, e.t_final, dt, opts)?;

    let preset = match e.preset {
        Preset::Maser => "maser",
        Preset::PureDecay => "pure-decay",
    };
    let mut csv = Csv::new("evolve", &ctx.hash, ctx.cfg.output.precision);
    csv.comment("preset", preset)
        .comment("n_th", cfg.n_th)
        .comment("N_t", cfg.n_t)
        .comment("g_tau", cfg.g_tau)
        .comment("n_max", cfg.n_max)
        .comment("dt", dt)
        .comment("units", "t in photon lifetimes (kappa = 1)");
    let mut cols: Vec<String> = vec!["t".into(), "tr".into()];
    cols.extend((0..=e.columns).map(|n| format!("p_{n}")));
    cols.push("mean_n".into());
    csv.columns(&cols);
    for pt in &traj.points {
        let mut cells: Vec<Cell> = vec![pt.t.into(), pt.trace.into()];
        cells.extend(pt.populations[..=e.columns].iter().map(|&p| Cell::Num(p)));
        cells.push(pt.mean_n.into());
        csv.row(cells);
    }
    let mut written = vec![csv.write(&ctx.out, "evolve.csv")?];

    let steady = steady_state_sqc(&cfg)?;
    let evolved = traj.final_state.populations();
    let worst = evolved
        .iter()
        .zip(&steady.probs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let mut fin = Csv::new("evolve", &ctx.hash, ctx.cfg.output.precision);
    let worst_text = fin.number(worst);
    fin.comment("t_final", e.t_final)
        .comment("max_abs_diff", worst_text)
        .columns(&["n", "p_evolved", "p_steady", "diff"]);
    for (n, (a, b)) in evolved.iter().zip(&steady.probs).enumerate() {
        fin.row(vec![n.into(), (*a).into(), (*b).into(), (a - b).into()]);
    }
    written.push(fin.write(&ctx.out, "evolve_final.csv")?);
    Ok(written)
}

/// Gap and `|t01|` at the configured operating point.
fn circuit_inputs(ctx: &Context) -> CliResult<(f64, f64)> {
    let d = &ctx.cfg.device;
    let params = ctx.cfg.template()?.with_flux(d.f, d.f_s);
    let op = HamiltonianOperator::new(
        &params,
        &ctx.cfg.grid()?,
        ctx.cfg.circuit.sector.into(),
        PotentialModel::Josephson,
    )?;
    let spec = lowest_eigenpairs_with(&op, 2, &ctx.cfg.eigen_options())?;
    Ok((spec.gap(0, 1)?, transition_element(&spec, 0, 1)?))
}

pub fn device_from_config(ctx: &Context) -> CliResult<DeviceReport> {
    let (gap, t01) = match ctx.cfg.device.source {
        DeviceSource::Fixed => (ctx.cfg.device.gap_over_ej, ctx.cfg.device.t01),
        DeviceSource::Circuit => circuit_inputs(ctx)?,
    };
    Ok(device_report(&ctx.cfg.device_inputs(gap, t01)?)?)
}

/// Aligned text rendering of a device report.
pub fn render_device(report: &DeviceReport, precision: usize) -> String {
    report
        .rows()
        .iter()
        .map(|(name, v, unit)| {
            format!(
                "{name:<22} {:>20} {unit}\n",
                crate::output::format_number(*v, precision)
            )
        })
        .collect()
}

pub fn cmd_estimate_device(ctx: &Context) -> CliResult<(Vec<PathBuf>, String)> {
    let report = device_from_config(ctx)?;
    let mut csv = Csv::new("estimate-device", &ctx.hash, ctx.cfg.output.precision);
    csv.comment("source", format!("{:?}", ctx.cfg.device.source).to_lowercase())
        .comment("g_convention", "angular frequency, rad/s")
        .columns(&["quantity", "value", "unit"]);
    for (name, v, unit) in report.rows() {
        csv.row(vec![name.into(), v.into(), unit.into()]);
    }
    let path = csv.write(&ctx.out, "device.csv")?;
    Ok((vec![path], render_device(&report, ctx.cfg.output.precision)))
}

fn solve_levels(ctx: &Context, f_s: f64, cache: Option<&Path>, written: &mut Vec<PathBuf>) -> CliResult<SweepResult> {
    let spec = ctx.cfg.sweep_spec(f_s)?;
    let axis = ctx.cfg.flux_axis()?;
    if let Some(dir) = cache {
        return Ok(SweepCache::new(dir).get_or_compute(&spec, &axis)?);
    }
    let results = map_points(&axis, |f| spec.solve(f).map(|s| s.levels));
    let ok = split_failures(ctx, &format!("sweep_fs{}", tag(f_s)), &axis, results, written)?;
    let (axis, levels): (Vec<f64>, Vec<Vec<f64>>) = ok.into_iter().unzip();
    Ok(SweepResult {
        key: spec.key(&axis),
        spec,
        axis,
        levels,
    })
}

/// Levels only, for every `f_s`, optionally memoized on disk.
pub fn cmd_sweep(ctx: &Context, cache: Option<&Path>) -> CliResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    let k = ctx.cfg.sweep.k;
    for &f_s in &ctx.cfg.sweep.f_s {
        let result = solve_levels(ctx, f_s, cache, &mut written)?;
        let mut csv = ctx.csv("sweep");
        csv.comment("f_s", f_s)
            .comment("sweep-key", result.key.as_str())
            .comment("units", "E_i in E_J");
        let mut cols: Vec<String> = vec!["f".into()];
        cols.extend((0..k).map(|i| format!("E{i}")));
        csv.columns(&cols);
        for (f, lv) in result.axis.iter().zip(&result.levels) {
            let mut cells: Vec<Cell> = vec![(*f).into()];
            cells.extend(lv.iter().map(|&e| Cell::Num(e)));
            csv.row(cells);
        }
        written.push(csv.write(&ctx.out, &format!("sweep_fs{}.csv", tag(f_s)))?);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_renders_as_text() {
        assert!(matches!(k_cell(Adiabaticity::Crossing), Cell::Text(ref s) if s == "crossing"));
        assert!(matches!(k_cell(Adiabaticity::Finite(0.3)), Cell::Num(v) if v == 0.3));
    }
}
