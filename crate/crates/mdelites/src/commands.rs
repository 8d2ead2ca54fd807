//! The subcommands, usable without going through argument parsing.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use mdelites_core::archive::{Interval, DIMENSIONS};
use mdelites_core::patterns::annotate_archive;
use mdelites_core::solver::SolverError;
use mdelites_core::{BinKey, BoundsPolicy, Characteristics, RunOutcome, SolverConfig};
use serde::Deserialize;

use crate::archive_csv::{read_archive_csv, write_archive_csv};
use crate::bundle::{build_bundle, BundleError, MapBundle};
use crate::catalogue::{match_histogram, read_catalogue, write_annotations_csv};
use crate::cli::{Command, ExportUiArgs, HistoryArgs, MatchArgs, RunArgs, ServeArgs};
use crate::error::{Error, Result};
use crate::instance_file::{load_instance, LoadedInstance};
use crate::logfile::{read_log, LogWriter};
use crate::manifest::{read_manifest, RunManifest};
use crate::render::render_timeline;
use crate::{ANNOTATIONS_CSV, ARCHIVE_CSV, HISTORY_LOG, MANIFEST_JSON, MAP_JSON};

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(Error::write("<stdout>"))?
    };
}

pub fn dispatch(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Run(a) => cmd_run(a, out),
        Command::History(a) => cmd_history(a, out),
        Command::Match(a) => cmd_match(a, out),
        Command::ExportUi(a) => cmd_export_ui(a, out),
        Command::Serve(a) => cmd_serve(a, out),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum BoundsSpec {
    Pairs([[f64; 2]; DIMENSIONS]),
    Intervals([Interval; DIMENSIONS]),
}

/// `--bounds` value, inline JSON or the path of a file holding it.
pub fn parse_bounds(arg: &str) -> Result<[Interval; DIMENSIONS]> {
    let text = if arg.trim_start().starts_with('[') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(Error::read(arg))?
    };
    let spec: BoundsSpec = serde_json::from_str(&text)
        .map_err(|e| Error::Usage(format!("--bounds: expected four [lo, hi] pairs: {e}")))?;
    Ok(match spec {
        BoundsSpec::Pairs(p) => p.map(|[lo, hi]| Interval::new(lo, hi)),
        BoundsSpec::Intervals(i) => i,
    })
}

/// What a finished run produced.
pub struct RunReport {
    pub outcome: RunOutcome,
    pub manifest: RunManifest,
}

/// Runs the search and writes the three run files into `dir`.
pub fn run_to_dir(instance: &LoadedInstance, config: &SolverConfig, dir: &Path) -> Result<RunReport> {
    fs::create_dir_all(dir).map_err(Error::write(dir))?;
    let log_path = dir.join(HISTORY_LOG);
    let file = File::create(&log_path).map_err(Error::write(&log_path))?;
    let mut sink = LogWriter::new(BufWriter::new(file));
    let started = Instant::now();
    let result = mdelites_core::run(&instance.instance, config, &mut sink);
    let wall = started.elapsed().as_secs_f64();
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            drop(sink);
            let _ = fs::remove_file(&log_path);
            return Err(match e {
                SolverError::Sink(source) => Error::Write { path: log_path, source },
                other => Error::Usage(other.to_string()),
            });
        }
    };
    sink.into_inner().flush().map_err(Error::write(&log_path))?;

    let csv_path = dir.join(ARCHIVE_CSV);
    let file = File::create(&csv_path).map_err(Error::write(&csv_path))?;
    write_archive_csv(&outcome.archive, BufWriter::new(file)).map_err(|e| Error::Write {
        path: csv_path.clone(),
        source: e.into(),
    })?;

    let manifest = RunManifest::new(
        config,
        outcome.archive_config().bounds,
        instance,
        outcome.stats.clone(),
        Some(wall),
    );
    let manifest_path = dir.join(MANIFEST_JSON);
    fs::write(&manifest_path, manifest.to_json()).map_err(Error::write(&manifest_path))?;
    Ok(RunReport { outcome, manifest })
}

fn fmt_fitness(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), |v| format!("{v:.2}"))
}

fn cmd_run(a: RunArgs, out: &mut dyn Write) -> Result<()> {
    let instance = load_instance(&a.instance)?;
    let bounds = match &a.bounds {
        Some(arg) => BoundsPolicy::Fixed(parse_bounds(arg)?),
        None => BoundsPolicy::Calibrate {
            samples: a.calibration_samples,
            margin: 0.05,
        },
    };
    let config = SolverConfig {
        seed: a.seed,
        evaluations: a.evals,
        init_population: a.init,
        crossover_rate: a.crossover_rate,
        scale: a.scale,
        bounds,
    };
    let report = run_to_dir(&instance, &config, &a.out)?;
    let archive = &report.outcome.archive;
    let stats = &report.manifest.stats;
    say!(
        out,
        "instance  {} ({} customers, {} depots)",
        a.instance.display(),
        instance.instance.customers().len(),
        instance.instance.depots().len()
    );
    for (name, b) in Characteristics::NAMES.iter().zip(report.manifest.bounds) {
        say!(out, "bounds    {name:<9} [{}, {}]", b.lo, b.hi);
    }
    say!(
        out,
        "occupied  {} of {} bins",
        archive.len(),
        archive.config().bin_count()
    );
    say!(
        out,
        "fitness   best {} (seed phase {})",
        fmt_fitness(stats.best_fitness),
        fmt_fitness(stats.seed_best_fitness)
    );
    say!(
        out,
        "evals     {} ({} accepted, {} infeasible)",
        stats.evaluations,
        stats.accepted,
        stats.infeasible
    );
    say!(
        out,
        "wall time {:.2} s",
        report.manifest.wall_time_seconds.unwrap_or_default()
    );
    say!(out, "wrote     {}", a.out.display());
    Ok(())
}

fn scale_for(log: &Path) -> u16 {
    let manifest = log.parent().unwrap_or(Path::new(".")).join(MANIFEST_JSON);
    read_manifest(&manifest)
        .map(|m| m.config.scale)
        .unwrap_or(mdelites_core::archive::DEFAULT_SCALE)
}

fn cmd_history(a: HistoryArgs, out: &mut dyn Write) -> Result<()> {
    let scale = a.scale.unwrap_or_else(|| scale_for(&a.log));
    let key = BinKey::parse_in_range(&a.bin, scale).map_err(|e| Error::Usage(format!("bin {:?}: {e}", a.bin)))?;
    let log = read_log(&a.log)?;
    let timeline = log.bin_timeline(key);
    if timeline.is_empty() {
        say!(out, "bin never occupied: {key}");
    } else {
        write!(out, "{}", render_timeline(&timeline)).map_err(Error::write("<stdout>"))?;
    }
    Ok(())
}

fn cmd_match(a: MatchArgs, out: &mut dyn Write) -> Result<()> {
    let catalogue = read_catalogue(&a.catalogue)?;
    let rows = read_archive_csv(&a.archive)?;
    let annotations = annotate_archive(&catalogue, rows.iter().map(|r| (r.bin, r.encoding.as_str())));
    let target = a.out.unwrap_or_else(|| a.archive.with_file_name(ANNOTATIONS_CSV));
    let file = File::create(&target).map_err(Error::write(&target))?;
    write_annotations_csv(&catalogue, &annotations, BufWriter::new(file)).map_err(|e| Error::Write {
        path: target.clone(),
        source: e.into(),
    })?;

    say!(out, "{} cells, {} patterns", rows.len(), catalogue.len());
    if catalogue.is_empty() {
        say!(out, "catalogue is empty: every cell has confidence 1.0");
    } else {
        let k = catalogue.len();
        let counts = match_histogram(&catalogue, &annotations);
        let widest = counts.iter().max().copied().unwrap_or(0).max(1);
        for (j, n) in counts.iter().enumerate() {
            let bar = "#".repeat((n * 40).div_ceil(widest));
            let line = format!("confidence {:>5.3} ({j}/{k}) {n:>6}  {bar}", j as f64 / k as f64);
            say!(out, "{}", line.trim_end());
        }
        for (i, entry) in catalogue.entries.iter().enumerate() {
            let hits = annotations.iter().filter(|a| a.matches[i]).count();
            say!(
                out,
                "{:>6} match, {:>6} do not: {}",
                hits,
                annotations.len() - hits,
                entry.label()
            );
        }
    }
    say!(out, "wrote {}", target.display());
    Ok(())
}

/// Rebuilds `map.json` contents from the run files in `dir`.
pub fn export_bundle(dir: &Path, catalogue: Option<&Path>) -> Result<MapBundle> {
    let manifest = read_manifest(&dir.join(MANIFEST_JSON))?;
    let log_path = dir.join(HISTORY_LOG);
    let log = read_log(&log_path)?;
    let csv_path = dir.join(ARCHIVE_CSV);
    let rows = read_archive_csv(&csv_path)?;
    let catalogue = catalogue.map(read_catalogue).transpose()?;
    build_bundle(&manifest, log.records(), &rows, catalogue.as_ref()).map_err(|e| match e {
        BundleError::Replay(r) => Error::Line {
            path: log_path,
            line: r.index() + 1,
            message: r.to_string(),
        },
        BundleError::Mismatch(message) => Error::Invalid {
            path: csv_path,
            message,
        },
        BundleError::Config(c) => Error::Invalid {
            path: dir.join(MANIFEST_JSON),
            message: c.to_string(),
        },
    })
}

fn cmd_export_ui(a: ExportUiArgs, out: &mut dyn Write) -> Result<()> {
    let bundle = export_bundle(&a.out, a.catalogue.as_deref())?;
    let path: PathBuf = a.out.join(MAP_JSON);
    fs::write(&path, bundle.to_json()).map_err(Error::write(&path))?;
    say!(
        out,
        "wrote {} ({} cells, {} timelines)",
        path.display(),
        bundle.cells.len(),
        bundle.timelines.len()
    );
    Ok(())
}

fn cmd_serve(a: ServeArgs, out: &mut dyn Write) -> Result<()> {
    if !a.dir.is_dir() {
        return Err(Error::Usage(format!("{}: not a directory", a.dir.display())));
    }
    let server = crate::serve::bind(&a.addr).map_err(Error::Usage)?;
    say!(out, "serving {} at http://{}/", a.dir.display(), server.server_addr());
    out.flush().map_err(Error::write("<stdout>"))?;
    crate::serve::serve(&server, &a.dir, None);
    Ok(())
}
