//! Command-line front end. Every subcommand is turned into an
//! [`Experiment`], which is what the manifest records and `replay` re-runs.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiment::{
    aggregate_drops, compare, default_altitudes_m, default_apertures_wl, run_sweep_with, sample_heatmap,
    HeatmapSpec, Simulator,
};
use crate::io::{self, Experiment, PatternKind, RunManifest, SweepCsvWriter};
use crate::scenario::{DeploymentKind, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(name = "skylink", version, about = "Downlink system-level simulator for terrestrial and HAPS cellular networks")]
pub struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "SKYLINK_THREADS")]
    pub threads: Option<usize>,

    /// Overwrite existing outputs.
    #[arg(long, global = true)]
    pub force: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// JSON scenario file; omitted keys take the defaults of its deployment kind.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub drops: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PatternArg {
    Reflector,
    ElementH,
    ElementV,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the configured drops and write per-UE results.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Also dump the large-scale state of every link of drop 0.
        #[arg(long)]
        dump_links: bool,
    },
    /// Sweep HAPS altitude and reflector aperture.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Altitudes in metres, comma separated.
        #[arg(long, value_delimiter = ',')]
        altitudes: Option<Vec<f64>>,
        /// Aperture radii in wavelengths, comma separated.
        #[arg(long, value_delimiter = ',')]
        apertures: Option<Vec<f64>>,
        /// Continue a partial sweep.csv in the output directory.
        #[arg(long)]
        resume: bool,
    },
    /// SINR map of probe UEs on a regular grid around the central site.
    Heatmap {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 10.0)]
        resolution: f64,
        /// Side of the square in metres; defaults to 4/3 of the ISD.
        #[arg(long)]
        extent: Option<f64>,
    },
    /// Run TN4G, TN5G and NTN5G side by side.
    Compare {
        #[arg(long)]
        tn4g_config: Option<PathBuf>,
        #[arg(long)]
        tn5g_config: Option<PathBuf>,
        #[arg(long)]
        ntn_config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        drops: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate an antenna pattern cut.
    Pattern {
        #[arg(long, value_enum, default_value = "reflector")]
        antenna: PatternArg,
        #[arg(long, default_value_t = 25.0)]
        aperture: f64,
        #[arg(long, default_value_t = 1.0)]
        efficiency: f64,
        #[arg(long, default_value_t = 10.0)]
        max_deg: f64,
        #[arg(long, default_value_t = 0.01)]
        step_deg: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-run the experiment recorded in a manifest.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(path: Option<&Path>, kind: DeploymentKind, seed: Option<u64>, drops: Option<usize>) -> Result<ScenarioConfig> {
    let mut cfg = match path {
        Some(p) => io::parse_config(p)?,
        None => ScenarioConfig::for_kind(kind),
    };
    if let Some(s) = seed {
        cfg.rng_seed = s;
    }
    if let Some(n) = drops {
        cfg.n_drops = n;
    }
    Ok(cfg)
}

fn scenario(args: &ScenarioArgs) -> Result<ScenarioConfig> {
    load(args.config.as_deref(), DeploymentKind::Ntn5g, args.seed, args.drops)
}

/// Output files an experiment writes, manifest excluded.
pub fn output_names(exp: &Experiment) -> Vec<&'static str> {
    match exp {
        Experiment::Run { dump_links, .. } => {
            let mut v = vec!["ue_results.csv", "sites.csv", "ues.csv", "summary.json"];
            if *dump_links {
                v.push("links.csv");
            }
            v
        }
        Experiment::Sweep { .. } => vec!["sweep.csv", "best_apertures.csv"],
        Experiment::Heatmap { .. } => vec!["heatmap.csv"],
        Experiment::Compare { .. } => vec!["compare.csv"],
        Experiment::Pattern { .. } => vec!["pattern.csv"],
    }
}

/// How [`execute`] treats existing outputs, threads and the console.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExecOptions {
    pub force: bool,
    /// Keep and extend an existing `sweep.csv`.
    pub resume: bool,
    pub threads: Option<usize>,
    /// Print progress and summaries to stdout.
    pub verbose: bool,
}

/// Runs `exp` into `out` and writes its manifest.
pub fn execute(exp: &Experiment, out: &Path, opts: ExecOptions) -> Result<RunManifest> {
    let names = output_names(exp);
    let mut guarded: Vec<&str> = names.clone();
    guarded.push("manifest.json");
    if opts.resume {
        guarded.retain(|n| *n != "sweep.csv" && *n != "manifest.json");
    }
    io::prepare_output_dir(out, &guarded, opts.force)?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Consistency(e.to_string()))?;
    let start = Instant::now();
    let say = |line: String| {
        if opts.verbose {
            println!("{line}");
        }
    };
    pool.install(|| write_outputs(exp, out, opts.resume, &say))?;
    let manifest = RunManifest::new(
        exp.clone(),
        pool.current_num_threads(),
        start.elapsed().as_secs_f64(),
        names.iter().map(|s| s.to_string()).collect(),
    );
    manifest.write_atomic(out)?;
    Ok(manifest)
}

fn write_outputs(exp: &Experiment, out: &Path, resume: bool, say: &dyn Fn(String)) -> Result<()> {
    match exp {
        Experiment::Run { config, dump_links } => {
            let sim = Simulator::new(config.clone().validate()?);
            let drops = sim.run()?;
            io::write_ue_results(&out.join("ue_results.csv"), &drops)?;
            io::write_sites(&out.join("sites.csv"), sim.layout())?;
            io::write_ues(&out.join("ues.csv"), &drops)?;
            let stats = aggregate_drops(&drops)?;
            std::fs::write(out.join("summary.json"), serde_json::to_string_pretty(&stats)? + "\n")?;
            if *dump_links {
                io::write_links(&out.join("links.csv"), &sim.prepare_drop(0)?)?;
            }
            say(format!(
                "{}: {} UEs, mean SINR {:.2} dB, mean {:.2} / median {:.2} / p5 {:.2} Mbps",
                config.deployment_kind.label(),
                stats.n_samples,
                stats.mean_sinr_db,
                stats.mean_tput_mbps,
                stats.median_tput_mbps,
                stats.p5_tput_mbps
            ));
        }
        Experiment::Sweep {
            config,
            altitudes_m,
            apertures_wl,
        } => {
            config.clone().validate()?;
            let path = out.join("sweep.csv");
            let done = if resume && path.exists() {
                io::read_sweep_csv(&path)?
            } else {
                Vec::new()
            };
            let mut writer = SweepCsvWriter::create(&path)?;
            let grid = run_sweep_with(config, altitudes_m, apertures_wl, &done, |p| {
                say(format!(
                    "h = {:>6.0} m, r = {:>4.1} wl: mean {:.2} Mbps",
                    p.altitude_m, p.aperture_wl, p.stats.mean_tput_mbps
                ));
                writer.push(p)
            })?;
            let best = grid.best_apertures();
            let best: Vec<_> = best.iter().map(|(_, p)| *p).collect();
            io::write_sweep_csv(&out.join("best_apertures.csv"), &best)?;
        }
        Experiment::Heatmap {
            config,
            resolution_m,
            extent_m,
        } => {
            let sim = Simulator::new(config.clone().validate()?);
            let mut spec = HeatmapSpec::around_center(config, *resolution_m);
            spec.extent_m = *extent_m;
            let grid = sample_heatmap(&sim, &spec)?;
            io::write_heatmap(&out.join("heatmap.csv"), &grid)?;
            say(format!("{} x {} pixels at {} m", grid.side, grid.side, grid.resolution_m));
        }
        Experiment::Compare { configs } => {
            let validated = configs.iter().map(|c| c.clone().validate()).collect::<Result<Vec<_>>>()?;
            let cmp = compare(&validated)?;
            io::write_compare(&out.join("compare.csv"), &cmp)?;
            for (k, s) in &cmp.rows {
                say(format!(
                    "{:>6}: median {:.2} Mbps, median SE {:.3} bps/Hz, mean SE {:.3} bps/Hz",
                    k.label(),
                    s.median_tput_mbps,
                    s.median_se_bpshz,
                    s.mean_se_bpshz
                ));
            }
        }
        Experiment::Pattern { kind, max_deg, step_deg } => {
            let cut = io::pattern_cut(*kind, *max_deg, *step_deg)?;
            io::write_pattern(&out.join("pattern.csv"), &cut)?;
        }
    }
    Ok(())
}

/// Parses the command line, runs it and returns the experiment's manifest.
pub fn run(cli: Cli) -> Result<RunManifest> {
    let (exp, out, resume) = match cli.command {
        Command::Run { scenario: s, dump_links } => (
            Experiment::Run {
                config: scenario(&s)?,
                dump_links,
            },
            s.out,
            false,
        ),
        Command::Sweep {
            scenario: s,
            altitudes,
            apertures,
            resume,
        } => (
            Experiment::Sweep {
                config: scenario(&s)?,
                altitudes_m: altitudes.unwrap_or_else(default_altitudes_m),
                apertures_wl: apertures.unwrap_or_else(default_apertures_wl),
            },
            s.out,
            resume,
        ),
        Command::Heatmap {
            scenario: s,
            resolution,
            extent,
        } => {
            let config = scenario(&s)?;
            let extent_m = extent.unwrap_or(4.0 * config.isd_m / 3.0);
            (
                Experiment::Heatmap {
                    config,
                    resolution_m: resolution,
                    extent_m,
                },
                s.out,
                false,
            )
        }
        Command::Compare {
            tn4g_config,
            tn5g_config,
            ntn_config,
            seed,
            drops,
            out,
        } => {
            let configs = vec![
                load(tn4g_config.as_deref(), DeploymentKind::Tn4g, seed, drops)?,
                load(tn5g_config.as_deref(), DeploymentKind::Tn5g, seed, drops)?,
                load(ntn_config.as_deref(), DeploymentKind::Ntn5g, seed, drops)?,
            ];
            (Experiment::Compare { configs }, out, false)
        }
        Command::Pattern {
            antenna,
            aperture,
            efficiency,
            max_deg,
            step_deg,
            out,
        } => {
            let kind = match antenna {
                PatternArg::Reflector => PatternKind::Reflector {
                    radius_wavelengths: aperture,
                    efficiency,
                },
                PatternArg::ElementH => PatternKind::ElementHorizontal,
                PatternArg::ElementV => PatternKind::ElementVertical,
            };
            (Experiment::Pattern { kind, max_deg, step_deg }, out, false)
        }
        Command::Replay { manifest, out } => (RunManifest::read(&manifest)?.experiment, out, false),
    };
    execute(
        &exp,
        &out,
        ExecOptions {
            force: cli.force,
            resume,
            threads: cli.threads,
            verbose: true,
        },
    )
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
