//! Mask/features/noise decomposition of a range profile.
//!
//! The pipeline segments the cells of interest, builds a scaled binary mask
//! `m` carrying the mean COI amplitude, turns it into a soft mask decaying
//! exponentially with distance from the COI, Gaussian-smooths the masked
//! profile into the feature component `f`, and keeps the residual as `n`.
//! `f + n` reconstructs the input exactly. Profiles with no detectable
//! target decompose as pure noise (`m = f = 0`, `n` = the profile).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{CoiMask, MfnComponents, RangeProfile};
use crate::segmentation::{coi_mask, SegmentationParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecompositionParams {
    /// Standard deviation of the Gaussian feature filter, in cells.
    pub sigma: f64,
    /// Exponential distance-decay coefficient of the soft mask.
    pub decay_rate: f64,
    pub seg: SegmentationParams,
}

impl Default for DecompositionParams {
    fn default() -> Self {
        Self {
            sigma: 0.5,
            decay_rate: 2.0,
            seg: SegmentationParams::default(),
        }
    }
}

impl DecompositionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParam(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.decay_rate > 0.0 && self.decay_rate.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "decay_rate must be positive, got {}",
                self.decay_rate
            )));
        }
        self.seg.validate()
    }
}

/// Mean amplitude over the cells of interest.
pub fn mean_coi_amplitude(rp: &RangeProfile, mask: &CoiMask) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (a, &b) in rp.cells().iter().zip(mask.bits()) {
        if b {
            sum += a;
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::DegenerateInput("empty COI mask".into()));
    }
    Ok(sum / count as f64)
}

/// Soft mask `exp(-decay_rate * dist(i, coi))`, 1 exactly on COI cells and
/// strictly decreasing with cell distance from the nearest COI cell.
pub fn smooth_with_distance(coi: &[bool], decay_rate: f64) -> Result<Vec<f64>> {
    let dist = distance_to_set(coi)?;
    Ok(dist.iter().map(|&d| (-decay_rate * d as f64).exp()).collect())
}

/// Cell-index distance to the nearest set cell, two-pass scan.
fn distance_to_set(coi: &[bool]) -> Result<Vec<usize>> {
    let n = coi.len();
    if !coi.iter().any(|&b| b) {
        return Err(Error::DegenerateInput("empty COI mask".into()));
    }
    let inf = usize::MAX / 2;
    let mut dist = vec![inf; n];
    let mut last = None;
    for i in 0..n {
        if coi[i] {
            last = Some(i);
        }
        if let Some(j) = last {
            dist[i] = i - j;
        }
    }
    last = None;
    for i in (0..n).rev() {
        if coi[i] {
            last = Some(i);
        }
        if let Some(j) = last {
            dist[i] = dist[i].min(j - i);
        }
    }
    Ok(dist)
}

/// Discrete Gaussian convolution, kernel truncated at radius `ceil(4*sigma)`
/// and renormalized to unit sum; edge replication at the boundaries.
pub fn gaussian_filter_1d(x: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParam(format!("sigma must be positive, got {sigma}")));
    }
    let radius = (4.0 * sigma).ceil() as usize;
    let mut kernel = Vec::with_capacity(2 * radius + 1);
    for k in -(radius as isize)..=(radius as isize) {
        let t = k as f64 / sigma;
        kernel.push((-0.5 * t * t).exp());
    }
    let total: f64 = kernel.iter().sum();
    for w in &mut kernel {
        *w /= total;
    }

    let n = x.len() as isize;
    let r = radius as isize;
    let mut out = Vec::with_capacity(x.len());
    for i in 0..n {
        let mut acc = 0.0;
        for (ki, w) in kernel.iter().enumerate() {
            let j = (i + ki as isize - r).clamp(0, n - 1);
            acc += w * x[j as usize];
        }
        out.push(acc);
    }
    Ok(out)
}

/// Decomposes a profile into its (m, f, n) components.
pub fn mfn_decompose(rp: &RangeProfile, params: &DecompositionParams) -> Result<MfnComponents> {
    params.validate()?;
    let mask = coi_mask(rp, &params.seg)?;
    mfn_decompose_with_mask(rp, &mask, params)
}

/// Same as [`mfn_decompose`] but reuses an already computed COI mask, for
/// callers that need the mask as well (metrics, sigma sweeps).
pub fn mfn_decompose_with_mask(
    rp: &RangeProfile,
    mask: &CoiMask,
    params: &DecompositionParams,
) -> Result<MfnComponents> {
    params.validate()?;
    let s = rp.len();
    if mask.is_all_zero() {
        return Ok(MfnComponents {
            m: vec![0.0; s],
            f: vec![0.0; s],
            n: rp.cells().to_vec(),
            sigma: params.sigma,
        });
    }
    let mean = mean_coi_amplitude(rp, mask)?;
    let m: Vec<f64> = mask.bits().iter().map(|&b| if b { mean } else { 0.0 }).collect();
    let soft = smooth_with_distance(mask.bits(), params.decay_rate)?;
    let masked: Vec<f64> = rp.cells().iter().zip(&soft).map(|(a, w)| a * w).collect();
    let f = gaussian_filter_1d(&masked, params.sigma)?;
    let n: Vec<f64> = rp.cells().iter().zip(&f).map(|(a, fi)| a - fi).collect();
    Ok(MfnComponents { m, f, n, sigma: params.sigma })
}
