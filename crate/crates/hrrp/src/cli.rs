//! Command-line interface: batch subcommands over dataset files.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/configuration error. All
//! output files are written atomically (temp file + rename in the target
//! directory) so an interrupted run never leaves a truncated CSV behind.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bench::{
    discriminability, mean_relative_evolution, select_pairs, sigma_sweep, BinReport,
    PairingParams,
};
use crate::error::{Error, Result};
use crate::metrics::{cos_f, cosine, mse, mse_f, DecomposedProfile, MetricKind};
use crate::mfn::{mfn_decompose_with_mask, DecompositionParams};
use crate::profile::{dataset_to_csv, load_dataset, Dataset};
use crate::segmentation::{coi_mask, tlop, SegmentationParams};
use crate::synth::{make_ship, render_fleet, SceneParams};

#[derive(Parser, Debug)]
#[command(name = "hrrp", version, about = "HRRP segmentation, decomposition and benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render a synthetic fleet described by a JSON config into a dataset CSV
    Synth {
        /// Fleet configuration JSON (ships, scene, aspects, draws)
        #[arg(long)]
        fleet: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Segment each profile and report the COI mask, LRP and TLOP
    Segment {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        seg: SegArgs,
    },
    /// Decompose each profile into m/f/n component rows
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        seg: SegArgs,
        /// Gaussian filter sigma for the feature component
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        /// Exponential decay rate of the smoothed mask off the COI
        #[arg(long, default_value_t = 2.0)]
        decay_rate: f64,
    },
    /// Evaluate all metrics on every profile pair of two datasets
    Metrics {
        #[arg(long = "in-a")]
        in_a: PathBuf,
        #[arg(long = "in-b")]
        in_b: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        seg: SegArgs,
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        #[arg(long, default_value_t = 2.0)]
        decay_rate: f64,
    },
    /// Run the pairing/top-metric benchmark; writes bins.csv and sweep.csv
    Bench {
        #[arg(long = "in")]
        input: PathBuf,
        /// Benchmark configuration JSON (pairing, decomposition, metrics, sigmas)
        #[arg(long)]
        config: PathBuf,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SegArgs {
    #[arg(long, default_value_t = 5)]
    uniform_window: usize,
    #[arg(long, default_value_t = 0.5)]
    threshold_frac: f64,
    #[arg(long, default_value_t = 14)]
    close_gap_cells: usize,
}

impl SegArgs {
    fn to_params(&self) -> SegmentationParams {
        SegmentationParams {
            uniform_window: self.uniform_window,
            threshold_frac: self.threshold_frac,
            close_gap_cells: self.close_gap_cells,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct FleetShip {
    id: String,
    length_m: f64,
    width_m: f64,
    n_scatterers: usize,
    seed: u64,
}

/// On-disk fleet description for the `synth` subcommand.
#[derive(Debug, Serialize, Deserialize)]
struct FleetConfig {
    ships: Vec<FleetShip>,
    #[serde(default)]
    scene: SceneParams,
    aspects_deg: Vec<f64>,
    draws_per_aspect: usize,
}

/// On-disk benchmark description for the `bench` subcommand.
#[derive(Debug, Serialize, Deserialize)]
struct BenchConfig {
    #[serde(default)]
    pairing: PairingParams,
    #[serde(default)]
    decomposition: DecompositionParams,
    #[serde(default = "default_metrics")]
    metrics: Vec<MetricKind>,
    #[serde(default)]
    sigmas: Vec<f64>,
    #[serde(default = "default_half_window")]
    half_window_deg: f64,
}

fn default_metrics() -> Vec<MetricKind> {
    MetricKind::ALL.to_vec()
}

fn default_half_window() -> f64 {
    5.0
}

/// Parses argv and runs the selected subcommand, mapping errors to exit
/// codes (1 usage, 2 data/config).
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successes, anything else is usage
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth { fleet, out } => cmd_synth(&fleet, &out),
        Command::Segment { input, out, seg } => cmd_segment(&input, &out, &seg.to_params()),
        Command::Decompose { input, out, seg, sigma, decay_rate } => {
            let params = DecompositionParams { sigma, decay_rate, seg: seg.to_params() };
            cmd_decompose(&input, &out, &params)
        }
        Command::Metrics { in_a, in_b, out, seg, sigma, decay_rate } => {
            let params = DecompositionParams { sigma, decay_rate, seg: seg.to_params() };
            cmd_metrics(&in_a, &in_b, &out, &params)
        }
        Command::Bench { input, config, out } => cmd_bench(&input, &config, &out),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Writes `content` to `path` via a temp file in the same directory plus an
/// atomic rename.
fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(content.as_bytes()).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

fn cmd_synth(fleet_path: &Path, out: &Path) -> Result<()> {
    let cfg: FleetConfig = read_json(fleet_path)?;
    if cfg.ships.is_empty() {
        return Err(Error::Config("fleet has no ships".into()));
    }
    let ships = cfg
        .ships
        .iter()
        .map(|s| make_ship(s.id.as_str(), s.length_m, s.width_m, s.n_scatterers, s.seed))
        .collect::<Result<Vec<_>>>()?;
    let ds = render_fleet(&ships, &cfg.aspects_deg, cfg.draws_per_aspect, &cfg.scene)?;
    write_atomic(out, &dataset_to_csv(&ds))
}

fn cmd_segment(input: &Path, out: &Path, params: &SegmentationParams) -> Result<()> {
    let ds = load_dataset(input)?;
    let mut csv = String::from("row_index,lrp_cells,lrp_m,tlop_m,mask\n");
    for (i, rp) in ds.profiles().iter().enumerate() {
        let mask = coi_mask(rp, params)?;
        let bits: String = mask.bits().iter().map(|&b| if b { '1' } else { '0' }).collect();
        let t = tlop(rp.aspect_deg(), rp.ship_length_m(), rp.ship_width_m());
        csv.push_str(&format!(
            "{i},{},{},{t},{bits}\n",
            mask.lrp_cells(),
            mask.lrp_meters(rp.delta_r_m()),
        ));
    }
    write_atomic(out, &csv)
}

fn cmd_decompose(input: &Path, out: &Path, params: &DecompositionParams) -> Result<()> {
    let ds = load_dataset(input)?;
    let mut csv = String::from("row_index,component");
    for c in 0..ds.s() {
        csv.push_str(&format!(",c{c}"));
    }
    csv.push('\n');
    for (i, rp) in ds.profiles().iter().enumerate() {
        let mask = coi_mask(rp, &params.seg)?;
        let comps = mfn_decompose_with_mask(rp, &mask, params)?;
        for (name, values) in [("m", &comps.m), ("f", &comps.f), ("n", &comps.n)] {
            csv.push_str(&format!("{i},{name}"));
            for v in values {
                csv.push_str(&format!(",{:.16e}", v));
            }
            csv.push('\n');
        }
    }
    write_atomic(out, &csv)
}

fn cmd_metrics(in_a: &Path, in_b: &Path, out: &Path, params: &DecompositionParams) -> Result<()> {
    let ds_a = load_dataset(in_a)?;
    let ds_b = load_dataset(in_b)?;
    if ds_a.s() != ds_b.s() {
        return Err(Error::Config(format!(
            "cell-count mismatch between inputs: {} vs {}",
            ds_a.s(),
            ds_b.s()
        )));
    }
    let decompose_all = |ds: &Dataset| -> Result<Vec<DecomposedProfile>> {
        ds.profiles()
            .iter()
            .map(|rp| DecomposedProfile::decompose(rp.clone(), params))
            .collect()
    };
    let da = decompose_all(&ds_a)?;
    let db = decompose_all(&ds_b)?;
    let mut csv = String::from("i,j,mse,cosine,mse_f,cos_f\n");
    for (i, qi) in da.iter().enumerate() {
        for (j, qj) in db.iter().enumerate() {
            let row = [
                mse(qi.rp.cells(), qj.rp.cells()).ok(),
                cosine(qi.rp.cells(), qj.rp.cells()).ok(),
                mse_f(qi, qj).ok(),
                cos_f(qi, qj).ok(),
            ];
            csv.push_str(&format!(
                "{i},{j},{},{},{},{}\n",
                fmt_opt(row[0]),
                fmt_opt(row[1]),
                fmt_opt(row[2]),
                fmt_opt(row[3]),
            ));
        }
    }
    write_atomic(out, &csv)
}

fn bins_csv(reports: &[BinReport]) -> String {
    let mut csv = String::from("bin,metric,mean_top_same,mean_top_diff,relative_evolution,n\n");
    for report in reports {
        for m in &report.metrics {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                report.bin_index,
                m.kind.name(),
                fmt_opt(m.mean_top_same),
                fmt_opt(m.mean_top_diff),
                fmt_opt(m.relative_evolution),
                m.n_comparisons,
            ));
        }
    }
    csv
}

fn cmd_bench(input: &Path, config: &Path, out_dir: &Path) -> Result<()> {
    let cfg: BenchConfig = read_json(config)?;
    let ds = load_dataset(input)?;
    cfg.pairing.validate()?;
    cfg.decomposition.validate()?;
    let pairs = select_pairs(&ds, &cfg.pairing)?;
    let reports = discriminability(
        &ds,
        &pairs,
        &cfg.decomposition,
        &cfg.metrics,
        cfg.half_window_deg,
    )?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write_atomic(&out_dir.join("bins.csv"), &bins_csv(&reports))?;

    if !cfg.sigmas.is_empty() {
        let sweep = sigma_sweep(
            &ds,
            &pairs,
            &cfg.sigmas,
            &cfg.decomposition,
            &cfg.metrics,
            cfg.half_window_deg,
        )?;
        let mut csv = String::from("sigma,metric,mean_relative_evolution\n");
        for (sigma, reports) in &sweep {
            for &kind in &cfg.metrics {
                csv.push_str(&format!(
                    "{sigma},{},{}\n",
                    kind.name(),
                    fmt_opt(mean_relative_evolution(reports, kind)),
                ));
            }
        }
        write_atomic(&out_dir.join("sweep.csv"), &csv)?;
    }
    Ok(())
}
