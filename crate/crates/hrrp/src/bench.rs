//! Benchmark harness: aspect binning, length-matched ship pairing, and
//! same-vs-different-ship top-metric statistics with a sigma sweep.
//!
//! The protocol: profiles are grouped into aspect bins; within each bin,
//! pairs of ships of similar length are selected and a fixed number of
//! profiles sampled per ship; for every sampled profile the extremal metric
//! against its own ship (query excluded) and against the paired ship is
//! recorded; per-bin means and an oriented relative evolution summarize how
//! much better same-ship matches score than cross-ship matches.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{
    cosine, evaluate, mse, top_metric_by, DecomposedProfile, MetricKind, Orientation,
};
use crate::mfn::DecompositionParams;
use crate::profile::Dataset;
use crate::synth::stream_rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PairingParams {
    pub bin_width_deg: f64,
    pub n_pairs_per_bin: usize,
    pub n_per_ship_per_bin: usize,
    pub length_tol_m: f64,
    pub min_length_m: f64,
    pub pairing_seed: u64,
}

impl Default for PairingParams {
    fn default() -> Self {
        Self {
            bin_width_deg: 10.0,
            n_pairs_per_bin: 10,
            n_per_ship_per_bin: 30,
            length_tol_m: 5.0,
            min_length_m: 50.0,
            pairing_seed: 0,
        }
    }
}

impl PairingParams {
    pub fn validate(&self) -> Result<()> {
        if self.bin_width_deg <= 0.0 || self.bin_width_deg.is_nan() {
            return Err(Error::InvalidParam("bin_width_deg must be positive".into()));
        }
        let bins = 360.0 / self.bin_width_deg;
        if (bins - bins.round()).abs() > 1e-9 {
            return Err(Error::InvalidParam(format!(
                "bin_width_deg {} does not divide 360",
                self.bin_width_deg
            )));
        }
        if self.n_pairs_per_bin == 0 || self.n_per_ship_per_bin == 0 {
            return Err(Error::InvalidParam(
                "n_pairs_per_bin and n_per_ship_per_bin must be positive".into(),
            ));
        }
        if self.length_tol_m < 0.0 || self.min_length_m < 0.0 {
            return Err(Error::InvalidParam("length bounds must be non-negative".into()));
        }
        Ok(())
    }

    pub fn n_bins(&self) -> usize {
        (360.0 / self.bin_width_deg).round() as usize
    }
}

/// One selected comparison: two distinct ships in one aspect bin with the
/// profile rows sampled for each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectedPair {
    pub bin_index: usize,
    pub ship_a: String,
    pub ship_b: String,
    pub indices_a: Vec<usize>,
    pub indices_b: Vec<usize>,
}

/// Per-bin, per-metric aggregate of the top-metric statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub kind: MetricKind,
    pub mean_top_same: Option<f64>,
    pub mean_top_diff: Option<f64>,
    pub relative_evolution: Option<f64>,
    /// Defined top values that entered the means.
    pub n_comparisons: usize,
    /// Queries whose aspect window held no candidate (or only undefined ones).
    pub n_absent: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinReport {
    pub bin_index: usize,
    pub metrics: Vec<MetricReport>,
}

/// Assigns every profile to the bin `floor(aspect / bin_width)`; the bins
/// partition the dataset.
pub fn bin_by_aspect(ds: &Dataset, bin_width_deg: f64) -> Result<Vec<Vec<usize>>> {
    if bin_width_deg <= 0.0
        || bin_width_deg.is_nan()
        || (360.0 / bin_width_deg).fract().abs() > 1e-9
    {
        return Err(Error::InvalidParam(format!(
            "bin width {bin_width_deg} must be positive and divide 360"
        )));
    }
    let n_bins = (360.0 / bin_width_deg).round() as usize;
    let mut bins = vec![Vec::new(); n_bins];
    for (i, rp) in ds.profiles().iter().enumerate() {
        let b = ((rp.aspect_deg() / bin_width_deg).floor() as usize).min(n_bins - 1);
        bins[b].push(i);
    }
    Ok(bins)
}

/// Selects up to `n_pairs_per_bin` unordered ship pairs per aspect bin with
/// close lengths (|Δℓ| ≤ length_tol_m, both ≥ min_length_m) and at least
/// `n_per_ship_per_bin` profiles each in the bin, then samples exactly
/// `n_per_ship_per_bin` rows per ship per pair. Deterministic in
/// `pairing_seed`; under-populated bins simply contribute fewer pairs.
pub fn select_pairs(ds: &Dataset, params: &PairingParams) -> Result<Vec<SelectedPair>> {
    params.validate()?;
    let bins = bin_by_aspect(ds, params.bin_width_deg)?;
    let mut pairs = Vec::new();
    for (bin_index, rows) in bins.iter().enumerate() {
        // ship id -> (length, rows in this bin), ordered by id for determinism
        let mut by_ship: BTreeMap<&str, (f64, Vec<usize>)> = BTreeMap::new();
        for &i in rows {
            let rp = &ds.profiles()[i];
            by_ship
                .entry(rp.ship_id())
                .or_insert((rp.ship_length_m(), Vec::new()))
                .1
                .push(i);
        }
        let eligible: Vec<(&str, f64, &Vec<usize>)> = by_ship
            .iter()
            .filter(|(_, (len, rows))| {
                *len >= params.min_length_m && rows.len() >= params.n_per_ship_per_bin
            })
            .map(|(id, (len, rows))| (*id, *len, rows))
            .collect();

        let mut n_taken = 0;
        for (ai, &(id_a, len_a, rows_a)) in eligible.iter().enumerate() {
            for &(id_b, len_b, rows_b) in &eligible[ai + 1..] {
                if n_taken >= params.n_pairs_per_bin {
                    break;
                }
                if (len_a - len_b).abs() > params.length_tol_m {
                    continue;
                }
                let mut rng =
                    stream_rng(params.pairing_seed, bin_index as u64, 3, n_taken as u64);
                let sample = |rows: &[usize], rng: &mut rand_chacha::ChaCha8Rng| {
                    let mut picked: Vec<usize> = rows.to_vec();
                    picked.shuffle(rng);
                    picked.truncate(params.n_per_ship_per_bin);
                    picked.sort_unstable();
                    picked
                };
                let indices_a = sample(rows_a, &mut rng);
                let indices_b = sample(rows_b, &mut rng);
                pairs.push(SelectedPair {
                    bin_index,
                    ship_a: id_a.to_string(),
                    ship_b: id_b.to_string(),
                    indices_a,
                    indices_b,
                });
                n_taken += 1;
            }
            if n_taken >= params.n_pairs_per_bin {
                break;
            }
        }
    }
    Ok(pairs)
}

/// The benchmark's standard-MSE variant: raw-profile MSE normalized by the
/// mean LRP of the two profiles (in cells) so it is commensurate with the
/// size-normalized feature MSE.
fn eval_bench(kind: MetricKind, q: &DecomposedProfile, c: &DecomposedProfile) -> Result<f64> {
    match kind {
        MetricKind::Mse => {
            let lrp_sum = q.mask.lrp_cells() + c.mask.lrp_cells();
            if lrp_sum == 0 {
                return Err(Error::UndefinedMetric("both LRPs are zero".into()));
            }
            Ok(mse(q.rp.cells(), c.rp.cells())? / (lrp_sum as f64 / 2.0))
        }
        MetricKind::Cosine => cosine(q.rp.cells(), c.rp.cells()),
        _ => evaluate(kind, q, c),
    }
}

/// Oriented relative evolution of mean top values: positive means the metric
/// separates same-ship from cross-ship matches. `None` when the denominator
/// is zero.
pub fn relative_evolution(
    mean_top_same: f64,
    mean_top_diff: f64,
    orientation: Orientation,
) -> Option<f64> {
    match orientation {
        Orientation::Minimize => {
            (mean_top_same != 0.0).then(|| (mean_top_diff - mean_top_same) / mean_top_same)
        }
        Orientation::Maximize => {
            (mean_top_diff != 0.0).then(|| (mean_top_same - mean_top_diff) / mean_top_diff.abs())
        }
    }
}

#[derive(Default)]
struct Accumulator {
    same_sum: f64,
    same_n: usize,
    diff_sum: f64,
    diff_n: usize,
    absent: usize,
}

/// Runs the same-vs-different protocol over `pairs`. Every sampled profile
/// of each ship queries (a) the other sampled profiles of its own ship and
/// (b) all sampled profiles of the paired ship; both pair directions are
/// pooled into the bin statistics.
pub fn discriminability(
    ds: &Dataset,
    pairs: &[SelectedPair],
    params: &DecompositionParams,
    kinds: &[MetricKind],
    half_window_deg: f64,
) -> Result<Vec<BinReport>> {
    params.validate()?;
    // Decompose each referenced row once.
    let mut decomposed: BTreeMap<usize, DecomposedProfile> = BTreeMap::new();
    for pair in pairs {
        for &i in pair.indices_a.iter().chain(&pair.indices_b) {
            if let std::collections::btree_map::Entry::Vacant(slot) = decomposed.entry(i) {
                let rp = ds
                    .profiles()
                    .get(i)
                    .ok_or_else(|| {
                        Error::InvalidParam(format!("pair references row {i} beyond dataset"))
                    })?
                    .clone();
                slot.insert(DecomposedProfile::decompose(rp, params)?);
            }
        }
    }

    let n_bins = pairs.iter().map(|p| p.bin_index + 1).max().unwrap_or(0);
    let mut acc: BTreeMap<(usize, MetricKind), Accumulator> = BTreeMap::new();

    let mut run_direction = |bin: usize, own: &[usize], other: &[usize]| {
        for &q in own {
            let query = &decomposed[&q];
            for &kind in kinds {
                let orientation = kind.orientation();
                let same = top_metric_by(
                    query,
                    own.iter().filter(|&&i| i != q).map(|i| &decomposed[i]),
                    orientation,
                    half_window_deg,
                    |a, b| eval_bench(kind, a, b),
                );
                let diff = top_metric_by(
                    query,
                    other.iter().map(|i| &decomposed[i]),
                    orientation,
                    half_window_deg,
                    |a, b| eval_bench(kind, a, b),
                );
                let entry = acc.entry((bin, kind)).or_default();
                match same {
                    Some(v) => {
                        entry.same_sum += v;
                        entry.same_n += 1;
                    }
                    None => entry.absent += 1,
                }
                match diff {
                    Some(v) => {
                        entry.diff_sum += v;
                        entry.diff_n += 1;
                    }
                    None => entry.absent += 1,
                }
            }
        }
    };

    for pair in pairs {
        run_direction(pair.bin_index, &pair.indices_a, &pair.indices_b);
        run_direction(pair.bin_index, &pair.indices_b, &pair.indices_a);
    }

    let mut reports = Vec::new();
    for bin_index in 0..n_bins {
        let metrics = kinds
            .iter()
            .map(|&kind| {
                let a = acc.get(&(bin_index, kind));
                let (same, diff, n, absent) = match a {
                    Some(a) => (
                        (a.same_n > 0).then(|| a.same_sum / a.same_n as f64),
                        (a.diff_n > 0).then(|| a.diff_sum / a.diff_n as f64),
                        a.same_n + a.diff_n,
                        a.absent,
                    ),
                    None => (None, None, 0, 0),
                };
                let rel = match (same, diff) {
                    (Some(s), Some(d)) => relative_evolution(s, d, kind.orientation()),
                    _ => None,
                };
                MetricReport {
                    kind,
                    mean_top_same: same,
                    mean_top_diff: diff,
                    relative_evolution: rel,
                    n_comparisons: n,
                    n_absent: absent,
                }
            })
            .collect();
        reports.push(BinReport { bin_index, metrics });
    }
    Ok(reports)
}

/// Reruns [`discriminability`] once per sigma, re-decomposing every profile.
pub fn sigma_sweep(
    ds: &Dataset,
    pairs: &[SelectedPair],
    sigmas: &[f64],
    base: &DecompositionParams,
    kinds: &[MetricKind],
    half_window_deg: f64,
) -> Result<Vec<(f64, Vec<BinReport>)>> {
    if sigmas.is_empty() {
        return Err(Error::InvalidParam("sigma list must be nonempty".into()));
    }
    let mut out = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let params = DecompositionParams { sigma, ..*base };
        out.push((sigma, discriminability(ds, pairs, &params, kinds, half_window_deg)?));
    }
    Ok(out)
}

/// Mean relative evolution of one metric over the bins where it is defined.
pub fn mean_relative_evolution(reports: &[BinReport], kind: MetricKind) -> Option<f64> {
    let vals: Vec<f64> = reports
        .iter()
        .flat_map(|r| &r.metrics)
        .filter(|m| m.kind == kind)
        .filter_map(|m| m.relative_evolution)
        .collect();
    if vals.is_empty() {
        None
    } else {
        Some(vals.iter().sum::<f64>() / vals.len() as f64)
    }
}
