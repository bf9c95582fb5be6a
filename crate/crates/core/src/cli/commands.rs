use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::config::{OutputFormat, RunConfig};
use super::{Cli, CliError, Command, ConfigError, FormatArg};
use crate::dynamics::{ForceSignal, Spin};
use crate::engine::{turning_time_mismatch, PulseEngine, PulsePrimitive, PulseSequence, SpinorCoherentState};
use crate::response::{find_peaks, find_zeros, response_cp, response_up, uniform_grid, ResponseCurve};
use crate::sensitivity::{
    atom_number_sweep, default_search_range, optimize_trap, sensitivity, ApparatusParams, SweepRow,
};
use crate::thermal::thermal_signal;

type CmdResult = Result<(), CliError>;

struct Ctx {
    cfg: RunConfig,
    base: PathBuf,
    out: PathBuf,
    format: OutputFormat,
    seed: u64,
}

impl Ctx {
    fn engine(&self) -> Result<PulseEngine, CliError> {
        Ok(PulseEngine::new(self.cfg.trap.build()?)?)
    }

    fn drive(&self) -> Result<ForceSignal, CliError> {
        Ok(self.cfg.drive(&self.base)?)
    }

    fn path(&self, stem: &str) -> PathBuf {
        let ext = match self.format {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        };
        self.out.join(format!("{stem}.{ext}"))
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CmdResult {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn write_rows<T: Serialize>(path: &Path, header: &[&str], rows: &[T], format: OutputFormat) -> CmdResult
where
    T: RowFields,
{
    match format {
        OutputFormat::Json => write_json(path, &rows),
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(e.to_string()))?;
            w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
            for r in rows {
                w.write_record(r.fields()).map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

trait RowFields {
    fn fields(&self) -> Vec<String>;
}

pub fn execute(cli: &Cli) -> CmdResult {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ConfigError("--threads must be ≥ 1".into()).into());
        }
        // a pool that already exists (repeated in-process runs) is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let (cfg, base) = match &cli.config {
        Some(p) => (RunConfig::load(p)?, p.parent().map(Path::to_path_buf).unwrap_or_default()),
        None => (RunConfig::default(), PathBuf::from(".")),
    };
    cfg.validate(&base)?;
    let out = cli.out.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out)?;
    let format = match cli.format {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
        None => cfg.output.format.unwrap_or_default(),
    };
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let ctx = Ctx { cfg, base, out, format, seed };
    match cli.command {
        Command::Modes => cmd_modes(&ctx),
        Command::Trajectory => cmd_trajectory(&ctx),
        Command::Response => cmd_response(&ctx),
        Command::Thermal => cmd_thermal(&ctx),
        Command::Sensitivity => cmd_sensitivity(&ctx),
    }
}

fn cmd_modes(ctx: &Ctx) -> CmdResult {
    let m = ctx.engine()?.modes;
    let rows = [
        ("omega_plus_rad_s", m.omega_plus),
        ("omega_minus_rad_s", m.omega_minus),
        ("omega_tilde_rad_s", m.omega_tilde),
        ("omega_c_rad_s", m.omega_c()),
        ("l_osc_m", m.l_osc),
        ("epsilon", m.epsilon()),
    ];
    for (k, v) in rows {
        println!("{k:<20} {v:.9e}");
    }
    match ctx.format {
        OutputFormat::Json => {
            let map: serde_json::Map<String, serde_json::Value> = rows.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            write_json(&ctx.path("modes"), &map)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_path(ctx.path("modes")).map_err(|e| CliError::Io(e.to_string()))?;
            w.write_record(["quantity", "value"]).map_err(|e| CliError::Io(e.to_string()))?;
            for (k, v) in rows {
                w.write_record([k.to_string(), v.to_string()]).map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct PathRow {
    t_s: f64,
    a_x_m: f64,
    a_y_m: f64,
    b_x_m: f64,
    b_y_m: f64,
}

impl RowFields for PathRow {
    fn fields(&self) -> Vec<String> {
        [self.t_s, self.a_x_m, self.a_y_m, self.b_x_m, self.b_y_m].iter().map(f64::to_string).collect()
    }
}

fn is_odd_pi(angle: f64) -> bool {
    let k = angle / std::f64::consts::PI;
    (k - k.round()).abs() < 1e-9 && (k.round() as i64) % 2 != 0
}

/// Position of the arm carrying `spin`, or of the heaviest branch when
/// that spin is absent (before the split).
fn arm_position(engine: &PulseEngine, state: &SpinorCoherentState, spin: Spin) -> [f64; 2] {
    let pick = state
        .branches
        .iter()
        .filter(|b| b.spin == spin)
        .max_by(|x, y| x.weight.norm().total_cmp(&y.weight.norm()))
        .or_else(|| state.branches.iter().max_by(|x, y| x.weight.norm().total_cmp(&y.weight.norm())));
    match pick {
        Some(b) => engine.branch_point(b, state.trap_origin).position(),
        None => [f64::NAN, f64::NAN],
    }
}

/// Samples both arms of `seq` on a uniform time grid. Arm `a` is the one
/// released with spin up; arms swap spin at every π pulse.
fn arm_paths(engine: &PulseEngine, seq: &PulseSequence, drive: &ForceSignal, samples: usize) -> crate::Result<Vec<PathRow>> {
    let total = seq.interrogation_time();
    let times: Vec<f64> = uniform_grid(0.0, total, samples);
    let eps = 1e-12 * total.max(1e-300);
    let mut state = SpinorCoherentState::ground(Spin::Up);
    let mut spins = [Spin::Up, Spin::Down];
    let mut rows = Vec::with_capacity(samples);
    let mut next = 0;
    let record = |state: &SpinorCoherentState, spins: &[Spin; 2], t: f64| {
        let a = arm_position(engine, state, spins[0]);
        let b = arm_position(engine, state, spins[1]);
        PathRow { t_s: t, a_x_m: a[0], a_y_m: a[1], b_x_m: b[0], b_y_m: b[1] }
    };
    for p in &seq.primitives {
        match p {
            PulsePrimitive::Evolve { duration, mode } => {
                while next < times.len() && times[next] <= state.time + eps {
                    rows.push(record(&state, &spins, times[next]));
                    next += 1;
                }
                let end = state.time + duration;
                while next < times.len() && times[next] <= end + eps {
                    let step = (times[next] - state.time).max(0.0);
                    state = engine.evolve(&state, step, drive, *mode)?;
                    rows.push(record(&state, &spins, times[next]));
                    next += 1;
                }
                let rest = end - state.time;
                if rest > 0.0 {
                    state = engine.evolve(&state, rest, drive, *mode)?;
                }
            }
            PulsePrimitive::RotateY { angle } => {
                state = state.rotated(*angle);
                if is_odd_pi(*angle) {
                    spins = [spins[0].flipped(), spins[1].flipped()];
                }
            }
            PulsePrimitive::Displace { shift } => state = state.displaced(*shift),
            PulsePrimitive::Readout { .. } => {}
        }
    }
    while next < times.len() {
        rows.push(record(&state, &spins, times[next]));
        next += 1;
    }
    Ok(rows)
}

fn cmd_trajectory(ctx: &Ctx) -> CmdResult {
    let engine = ctx.engine()?;
    let seq = ctx.cfg.sequence.build(engine.modes.omega_tilde)?;
    let rows = arm_paths(&engine, &seq, &ctx.drive()?, ctx.cfg.trajectory.samples)?;
    let header = ["t_s", "a_x_m", "a_y_m", "b_x_m", "b_y_m"];
    write_rows(&ctx.path("trajectory"), &header, &rows, ctx.format)?;
    println!("wrote {} samples of sequence '{}' to {}", rows.len(), seq.name, ctx.path("trajectory").display());
    Ok(())
}

fn write_curve(ctx: &Ctx, stem: &str, curve: &ResponseCurve) -> CmdResult {
    let path = ctx.path(stem);
    match ctx.format {
        OutputFormat::Csv => curve.write_csv(fs::File::create(&path)?)?,
        OutputFormat::Json => write_json(&path, curve)?,
    }
    Ok(())
}

fn features(curve: &ResponseCurve) -> crate::Result<serde_json::Value> {
    let peaks = find_peaks(curve)?;
    Ok(json!({
        "zeros_rad_s": find_zeros(curve)?,
        "peaks": peaks.iter().take(8).collect::<Vec<_>>(),
        "peak_magnitude": curve.peak_magnitude(),
    }))
}

fn cmd_response(ctx: &Ctx) -> CmdResult {
    let modes = ctx.engine()?.modes;
    let spec = &ctx.cfg.sequence;
    let t = spec.interval(modes.omega_tilde)?;
    let r0 = spec.r0[0].hypot(spec.r0[1]);
    let hi = ctx.cfg.response.omega_max.unwrap_or(3.0 * modes.omega_plus);
    let grid = uniform_grid(0.0, hi, ctx.cfg.response.grid_points);
    let up = response_up(&modes, r0, t, &grid)?;
    let mut cp = response_cp(&modes, r0, t, &grid)?;
    if ctx.cfg.response.scale_cp_by_16 {
        cp = cp.scaled(16.0);
    }
    write_curve(ctx, "response_up", &up)?;
    write_curve(ctx, "response_cp", &cp)?;
    let summary = json!({
        "t_s": t,
        "r0_m": r0,
        "omega_plus_rad_s": modes.omega_plus,
        "omega_minus_rad_s": modes.omega_minus,
        "cp_scaled_by_16": ctx.cfg.response.scale_cp_by_16,
        "turning_time_warning": turning_time_mismatch(&modes, t),
        "up": features(&up)?,
        "cp": features(&cp)?,
    });
    write_json(&ctx.out.join("response_features.json"), &summary)?;
    println!("wrote response curves ({} points, t = {t:e} s) to {}", grid.len(), ctx.out.display());
    Ok(())
}

fn cmd_thermal(ctx: &Ctx) -> CmdResult {
    let engine = ctx.engine()?;
    let seq = ctx.cfg.sequence.build(engine.modes.omega_tilde)?;
    let params = ctx.cfg.thermal.build(&engine.modes)?;
    let report = thermal_signal(&engine, &seq, &ctx.drive()?, &params, ctx.cfg.thermal.count, ctx.seed)?;
    write_json(&ctx.out.join("thermal.json"), &report)?;
    println!(
        "mc_mean = {:.6e} ± {:.2e}, analytic = {:.6e}, suppression = {:.6}",
        report.mc_mean, report.mc_stderr, report.analytic, report.factors.suppression
    );
    Ok(())
}

impl RowFields for SweepRow {
    fn fields(&self) -> Vec<String> {
        vec![
            self.atoms_per_layer.to_string(),
            self.n_over_nc.to_string(),
            self.omega_opt.to_string(),
            self.s.to_string(),
            self.bandwidth.to_string(),
            self.at_boundary.to_string(),
        ]
    }
}

fn default_atoms() -> Vec<f64> {
    (0..=32).map(|k| 10f64.powf(k as f64 / 4.0)).collect()
}

fn cmd_sensitivity(ctx: &Ctx) -> CmdResult {
    let species = ctx.cfg.species.build()?;
    let spec = &ctx.cfg.sensitivity;
    let apparatus = spec.apparatus.unwrap_or_else(|| ApparatusParams::reference(&species, 1e8));
    let report = sensitivity(&species, &apparatus, spec.ceiling)?;
    let range = spec.search_range.map(|[a, b]| (a, b)).unwrap_or_else(|| default_search_range(&species, &apparatus));
    let optimum = optimize_trap(&species, &apparatus, range)?;
    let atoms = spec.atoms.clone().unwrap_or_else(default_atoms);
    let sweep = atom_number_sweep(&species, &apparatus, &atoms)?;
    write_json(
        &ctx.out.join("sensitivity.json"),
        &json!({
            "species": species,
            "apparatus": apparatus,
            "ceiling_rate": spec.ceiling,
            "report": report,
            "optimum": optimum,
            "search_range_rad_s": [range.0, range.1],
        }),
    )?;
    let header = [
        "atoms_per_layer",
        "n_over_nc",
        "omega_opt_rad_s",
        "s_m_s2_per_rt_hz",
        "bandwidth_rad_s",
        "at_boundary",
    ];
    write_rows(&ctx.path("sensitivity_sweep"), &header, &sweep, ctx.format)?;
    let table = [
        ("v_mean", report.v_mean, "m/s"),
        ("r_t", report.r_t, "m"),
        ("r_0", report.r_0, "m"),
        ("n_layers", report.n_layers as f64, ""),
        ("gamma_coll", report.gamma_coll, "1/s"),
        ("N_c", report.n_c, "atoms/layer"),
        ("tau", report.tau, "s"),
        ("g_max", report.g_max, "m/s^2"),
        ("S", report.s, "(m/s^2)/sqrt(Hz)"),
        ("bandwidth", report.bandwidth.fwhm, "rad/s"),
        ("omega_opt", optimum.omega_opt, "rad/s"),
        ("S_min", optimum.s_min, "(m/s^2)/sqrt(Hz)"),
    ];
    for (k, v, u) in table {
        println!("{k:<12} {v:>14.6e} {u}");
    }
    if optimum.at_boundary {
        println!("note: optimum lies on the edge of the search range");
    }
    Ok(())
}
