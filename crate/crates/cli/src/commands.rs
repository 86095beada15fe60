//! Command implementations. Each command validates its inputs before
//! touching the output directory, then writes a `failed` manifest,
//! computes, writes the data files, and finally flips the manifest to
//! `ok` with the wall-clock duration.

use std::fmt;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use aclbeam::assembly::{assemble, OperatorBundle};
use aclbeam::config::{load_beam_config, load_multilayer_config};
use aclbeam::dynamics::{default_initial_state, simulate as run_simulation, InitialProfile};
use aclbeam::export::{dump_operators, fmt_float, write_snapshot_csv};
use aclbeam::mesh::Mesh;
use aclbeam::model::BeamConfig;
use aclbeam::multilayer::{assemble_multilayer, MultilayerConfig};
use aclbeam::spectral::{compare_models, compute_spectrum, decay_rate_fit};
use aclbeam::CoreError;
use rayon::prelude::*;

use crate::grid;
use crate::manifest::RunManifest;
use crate::{CompareArgs, InputArgs, SimulateArgs, SpectrumArgs, SweepArgs};

/// A command failure with its process exit code: 2 for user and config
/// errors, 3 for numerical failures.
#[derive(Debug)]
pub struct CliFailure {
    message: String,
    code: i32,
}

impl CliFailure {
    pub fn user(message: impl Into<String>) -> Self {
        CliFailure {
            message: message.into(),
            code: 2,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.code
    }
}

impl fmt::Display for CliFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<CoreError> for CliFailure {
    fn from(err: CoreError) -> Self {
        let code = match &err {
            CoreError::Numerical(_) | CoreError::Dimension { .. } => 3,
            _ => 2,
        };
        CliFailure {
            message: err.to_string(),
            code,
        }
    }
}

impl From<std::io::Error> for CliFailure {
    fn from(err: std::io::Error) -> Self {
        CliFailure {
            message: format!("i/o failure: {err}"),
            code: 2,
        }
    }
}

enum LoadedConfig {
    Three(BeamConfig),
    Multi(MultilayerConfig),
}

impl LoadedConfig {
    fn length(&self) -> f64 {
        match self {
            LoadedConfig::Three(c) => c.length,
            LoadedConfig::Multi(c) => c.length,
        }
    }

    fn assemble(&self, n: usize) -> Result<OperatorBundle, CoreError> {
        let mesh = Mesh::uniform(self.length(), n)?;
        match self {
            LoadedConfig::Three(c) => assemble(c, &mesh),
            LoadedConfig::Multi(c) => assemble_multilayer(c, &mesh),
        }
    }
}

fn load_config(path: Option<&Path>, multilayer: bool) -> Result<LoadedConfig, CliFailure> {
    Ok(if multilayer {
        LoadedConfig::Multi(match path {
            Some(p) => load_multilayer_config(p)?,
            None => MultilayerConfig::from_three_layer(&BeamConfig::reference())?,
        })
    } else {
        LoadedConfig::Three(match path {
            Some(p) => load_beam_config(p)?,
            None => BeamConfig::reference(),
        })
    })
}

fn three_layer_config(path: Option<&Path>) -> Result<BeamConfig, CliFailure> {
    match load_config(path, false)? {
        LoadedConfig::Three(c) => Ok(c),
        LoadedConfig::Multi(_) => unreachable!(),
    }
}

fn prepare_out_dir(dir: &Path) -> Result<(), CliFailure> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn snapshot_bundle_json(bundle: &OperatorBundle) -> serde_json::Value {
    serde_json::to_value(&bundle.config).expect("config snapshots serialize")
}

fn maybe_dump_operators(
    input: &InputArgs,
    bundle: &OperatorBundle,
) -> Result<Vec<String>, CliFailure> {
    if let Some(dir) = &input.dump_operators {
        dump_operators(dir, bundle)?;
        Ok(["M.csv", "K.csv", "D.csv"]
            .iter()
            .map(|f| dir.join(f).display().to_string())
            .collect())
    } else {
        Ok(Vec::new())
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliFailure> {
    let profile: InitialProfile = args.profile.parse()?;
    let config = load_config(args.input.config.as_deref(), args.input.multilayer)?;
    let bundle = config.assemble(args.input.n)?;
    if !(args.dt > 0.0) || !(args.horizon > 0.0) {
        return Err(CliFailure::user(format!(
            "dt and T must be positive (got dt={}, T={})",
            args.dt, args.horizon
        )));
    }

    let started = Instant::now();
    prepare_out_dir(&args.input.out)?;
    let mut manifest = RunManifest::new("simulate", args.input.n, snapshot_bundle_json(&bundle));
    manifest.dt = Some(args.dt);
    manifest.horizon = Some(args.horizon);
    manifest.profile = Some(profile.to_string());
    manifest.outputs = vec![args.input.out.join("energy.csv").display().to_string()];
    manifest.write(&args.input.out)?;

    manifest.outputs.extend(maybe_dump_operators(&args.input, &bundle)?);
    let initial = default_initial_state(&bundle, profile);
    let stride = (args.snapshots > 0).then_some(args.snapshots);
    let output = run_simulation(&bundle, &initial, args.horizon, args.dt, stride)?;

    let energy_path = args.input.out.join("energy.csv");
    output
        .trace
        .write_csv(BufWriter::new(File::create(&energy_path)?))?;
    if stride.is_some() {
        let snap_dir = args.input.out.join("snapshots");
        std::fs::create_dir_all(&snap_dir)?;
        for snap in &output.snapshots {
            let path = snap_dir.join(format!("step_{:06}.csv", snap.step));
            write_snapshot_csv(BufWriter::new(File::create(&path)?), &bundle, &snap.state)?;
            manifest.outputs.push(path.display().to_string());
        }
    }

    manifest.status = "ok".to_string();
    manifest.duration_seconds = Some(started.elapsed().as_secs_f64());
    manifest.write(&args.input.out)?;
    println!(
        "simulate: {} steps, E(0) = {}, E(T) = {} -> {}",
        output.trace.n_steps(),
        fmt_float(output.trace.energies[0]),
        fmt_float(*output.trace.energies.last().unwrap()),
        energy_path.display()
    );
    Ok(())
}

pub fn spectrum(args: &SpectrumArgs) -> Result<(), CliFailure> {
    let config = load_config(args.input.config.as_deref(), args.input.multilayer)?;
    let bundle = config.assemble(args.input.n)?;

    let started = Instant::now();
    prepare_out_dir(&args.input.out)?;
    let mut manifest = RunManifest::new("spectrum", args.input.n, snapshot_bundle_json(&bundle));
    manifest.modes = Some(args.modes);
    manifest.outputs = vec![
        args.input.out.join("spectrum.csv").display().to_string(),
        args.input.out.join("summary.json").display().to_string(),
    ];
    manifest.write(&args.input.out)?;

    manifest.outputs.extend(maybe_dump_operators(&args.input, &bundle)?);
    let report = compute_spectrum(&bundle, args.modes)?;
    report.write_csv(
        BufWriter::new(File::create(args.input.out.join("spectrum.csv"))?),
        &bundle,
    )?;
    let summary = report.summary_json();
    serde_json::to_writer_pretty(
        BufWriter::new(File::create(args.input.out.join("summary.json"))?),
        &summary,
    )
    .map_err(std::io::Error::from)?;

    manifest.status = "ok".to_string();
    manifest.duration_seconds = Some(started.elapsed().as_secs_f64());
    manifest.write(&args.input.out)?;
    println!(
        "spectrum: {} modes, abscissa = {}, min trace norm = {}",
        report.modes.len(),
        fmt_float(report.spectral_abscissa),
        fmt_float(report.min_trace_norm())
    );
    Ok(())
}

pub fn compare(args: &CompareArgs) -> Result<(), CliFailure> {
    let config = three_layer_config(args.config.as_deref())?;

    let started = Instant::now();
    prepare_out_dir(&args.out)?;
    let mut manifest = RunManifest::new(
        "compare",
        args.n,
        serde_json::to_value(&config).expect("config serializes"),
    );
    manifest.modes = Some(args.modes);
    manifest.outputs = vec![args.out.join("compare.csv").display().to_string()];
    manifest.write(&args.out)?;

    let report = compare_models(&config, args.n, args.modes)?;
    report.write_csv(BufWriter::new(File::create(args.out.join("compare.csv"))?))?;

    manifest.status = "ok".to_string();
    manifest.duration_seconds = Some(started.elapsed().as_secs_f64());
    manifest.write(&args.out)?;
    let first = report.rows.first().unwrap();
    println!(
        "compare: {} axial-dominated modes, first shift = {}",
        report.rows.len(),
        fmt_float(first.shift)
    );
    Ok(())
}

struct SweepRow {
    gains: aclbeam::model::FeedbackGains,
    abscissa: f64,
    decay_rate: f64,
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliFailure> {
    let profile: InitialProfile = args.profile.parse()?;
    let config = three_layer_config(args.config.as_deref())?;
    if args.grid.is_empty() {
        return Err(CliFailure::user(
            "sweep needs at least one --grid axis (e.g. --grid s1=0:0.25:2)",
        ));
    }
    let axes: Vec<grid::Axis> = args
        .grid
        .iter()
        .map(|s| grid::parse_axis(s))
        .collect::<Result<_, _>>()?;
    let points = grid::grid_points(&axes, &config.gains);
    let mesh = Mesh::uniform(config.length, args.n)?;

    let started = Instant::now();
    prepare_out_dir(&args.out)?;
    let mut manifest = RunManifest::new(
        "sweep",
        args.n,
        serde_json::to_value(&config).expect("config serializes"),
    );
    manifest.modes = Some(args.modes);
    manifest.dt = Some(args.dt);
    manifest.horizon = Some(args.horizon);
    manifest.profile = Some(profile.to_string());
    manifest.grid = Some(args.grid.clone());
    manifest.outputs = vec![args.out.join("sweep.csv").display().to_string()];
    manifest.write(&args.out)?;

    let evaluate = |gains: &aclbeam::model::FeedbackGains| -> Result<SweepRow, CoreError> {
        let point_config = config.with_gains(*gains)?;
        let bundle = assemble(&point_config, &mesh)?;
        let report = compute_spectrum(&bundle, args.modes)?;
        let initial = default_initial_state(&bundle, profile);
        let output = run_simulation(&bundle, &initial, args.horizon, args.dt, None)?;
        let fit = decay_rate_fit(&output.trace, (args.horizon / 2.0, args.horizon))?;
        Ok(SweepRow {
            gains: *gains,
            abscissa: report.spectral_abscissa,
            decay_rate: fit.rate,
        })
    };

    // Grid points are independent; ACL_THREADS caps the worker pool.
    // Indexed collect keeps the lexicographic row order deterministic.
    let rows: Result<Vec<SweepRow>, CoreError> = match read_thread_cap()? {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CoreError::Numerical(format!("worker pool: {e}")))?
            .install(|| points.par_iter().map(evaluate).collect()),
        None => points.par_iter().map(evaluate).collect(),
    };
    let rows = rows?;

    let mut out = BufWriter::new(File::create(args.out.join("sweep.csv"))?);
    {
        use std::io::Write;
        writeln!(out, "s1,s3,k1,k2,spectral_abscissa,decay_rate")?;
        for row in &rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_float(row.gains.s1),
                fmt_float(row.gains.s3),
                fmt_float(row.gains.k1),
                fmt_float(row.gains.k2),
                fmt_float(row.abscissa),
                fmt_float(row.decay_rate)
            )?;
        }
    }

    manifest.status = "ok".to_string();
    manifest.duration_seconds = Some(started.elapsed().as_secs_f64());
    manifest.write(&args.out)?;
    println!(
        "sweep: {} grid points -> {}",
        rows.len(),
        args.out.join("sweep.csv").display()
    );
    Ok(())
}

fn read_thread_cap() -> Result<Option<usize>, CliFailure> {
    match std::env::var("ACL_THREADS") {
        Ok(value) => {
            let threads: usize = value.parse().map_err(|_| {
                CliFailure::user(format!("ACL_THREADS must be a positive integer (got '{value}')"))
            })?;
            if threads == 0 {
                return Err(CliFailure::user("ACL_THREADS must be at least 1"));
            }
            Ok(Some(threads))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliFailure::user(format!("ACL_THREADS: {e}"))),
    }
}
