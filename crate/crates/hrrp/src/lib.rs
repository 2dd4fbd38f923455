//! HRRP (high-resolution range profile) toolkit: COI segmentation,
//! mask/features/noise decomposition, decomposition-aware similarity
//! metrics, a deterministic synthetic profile generator, and a benchmark
//! harness comparing same-ship and cross-ship match quality.
//!
//! A range profile is a 1-D vector of echo amplitudes over range cells.
//! The decomposition splits it into `m` (a scaled target mask), `f`
//! (smoothed features on and near the target) and `n` (the residual), so
//! that metrics can focus on the stable part of the signature.

pub mod bench;
pub mod cli;
pub mod error;
pub mod metrics;
pub mod mfn;
pub mod profile;
pub mod segmentation;
pub mod synth;

pub use error::{Error, Result};
pub use metrics::{cos_f, cosine, mse, mse_f, top_metric, DecomposedProfile, MetricKind};
pub use mfn::{mfn_decompose, DecompositionParams};
pub use profile::{load_dataset, save_dataset, CoiMask, Dataset, MfnComponents, RangeProfile};
pub use segmentation::{coi_mask, lrp_meters, tlop, SegmentationParams};
pub use synth::{make_ship, render_fleet, render_hrrp, SceneParams, ShipModel};
