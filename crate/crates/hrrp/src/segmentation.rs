//! Cells-of-interest segmentation, LRP and TLOP.
//!
//! A profile is smoothed with a uniform filter, thresholded at a fraction of
//! the smoothed maximum, then closed morphologically so small gaps inside the
//! target do not split it into several objects. The LRP is the cell length of
//! the first object; the TLOP is the projected extent of a rectangular target
//! of length `l` and width `w` seen at aspect `asp`:
//! `l*|cos(asp)| + w*|sin(asp)|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{CoiMask, RangeProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SegmentationParams {
    /// Uniform (moving-mean) filter window, odd, in cells.
    pub uniform_window: usize,
    /// Threshold as a fraction of the smoothed maximum, in (0, 1].
    pub threshold_frac: f64,
    /// Zero runs strictly shorter than this are filled by the closing.
    pub close_gap_cells: usize,
}

impl Default for SegmentationParams {
    fn default() -> Self {
        Self {
            uniform_window: 5,
            threshold_frac: 0.5,
            close_gap_cells: 14,
        }
    }
}

impl SegmentationParams {
    pub fn validate(&self) -> Result<()> {
        if self.uniform_window == 0 || self.uniform_window.is_multiple_of(2) {
            return Err(Error::InvalidParam(format!(
                "uniform_window must be odd and positive, got {}",
                self.uniform_window
            )));
        }
        if !(self.threshold_frac > 0.0 && self.threshold_frac <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "threshold_frac must be in (0, 1], got {}",
                self.threshold_frac
            )));
        }
        if self.close_gap_cells == 0 {
            return Err(Error::InvalidParam("close_gap_cells must be positive".into()));
        }
        Ok(())
    }
}

/// Moving mean with edge replication; output has the input's length.
pub fn uniform_filter(x: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 || window.is_multiple_of(2) {
        return Err(Error::InvalidParam(format!(
            "window must be odd and positive, got {window}"
        )));
    }
    if window > x.len() {
        return Err(Error::InvalidParam(format!(
            "window {window} exceeds signal length {}",
            x.len()
        )));
    }
    let r = (window / 2) as isize;
    let n = x.len() as isize;
    let mut out = Vec::with_capacity(x.len());
    for i in 0..n {
        let mut acc = 0.0;
        for j in (i - r)..=(i + r) {
            acc += x[j.clamp(0, n - 1) as usize];
        }
        out.push(acc / window as f64);
    }
    Ok(out)
}

/// Morphological closing with a flat structuring element sized so that zero
/// runs strictly shorter than `gap` cells, bounded by set cells on both
/// sides, are filled; runs of `gap` or more cells and leading/trailing zeros
/// are untouched.
pub fn morph_close(bits: &[bool], gap: usize) -> Vec<bool> {
    let n = bits.len();
    let se = gap; // element of length `gap` fills runs of length < gap
    if n == 0 || se <= 1 {
        return bits.to_vec();
    }
    // Work on a zero-padded buffer so boundary handling falls out of range
    // checks entirely.
    let mut padded = vec![false; n + 2 * se];
    padded[se..se + n].copy_from_slice(bits);

    // dilation: out[i] = OR of padded[i-k], k in [0, se)
    let mut dilated = vec![false; padded.len()];
    let mut run = 0usize;
    for i in 0..padded.len() {
        if padded[i] {
            run = se;
        } else {
            run = run.saturating_sub(1);
        }
        dilated[i] = run > 0;
    }

    // erosion with the same element: out[i] = AND of dilated[i+k], k in [0, se)
    let mut closed = vec![false; padded.len()];
    let mut set_run = 0usize; // consecutive set cells at or after i
    for i in (0..padded.len()).rev() {
        if dilated[i] {
            set_run += 1;
        } else {
            set_run = 0;
        }
        closed[i] = set_run >= se;
    }

    closed[se..se + n].to_vec()
}

/// Segments a profile into its COI mask.
///
/// An all-zero profile yields an empty mask with LRP 0 rather than an error;
/// degenerate inputs occur in synthetic sweeps and must flow through.
pub fn coi_mask(rp: &RangeProfile, params: &SegmentationParams) -> Result<CoiMask> {
    params.validate()?;
    let smoothed = uniform_filter(rp.cells(), params.uniform_window)?;
    let max = smoothed.iter().cloned().fold(0.0_f64, f64::max);
    if max <= 0.0 {
        return Ok(CoiMask::from_bits(vec![false; rp.len()]));
    }
    let threshold = params.threshold_frac * max;
    let raw: Vec<bool> = smoothed.iter().map(|&v| v >= threshold).collect();
    Ok(CoiMask::from_bits(morph_close(&raw, params.close_gap_cells)))
}

/// Theoretical length of the projection of an `l` x `w` rectangle on the
/// radar line of sight at aspect angle `asp_deg`.
pub fn tlop(asp_deg: f64, length_m: f64, width_m: f64) -> f64 {
    let asp = asp_deg.to_radians();
    length_m * asp.cos().abs() + width_m * asp.sin().abs()
}

/// Empirical object length in meters.
pub fn lrp_meters(mask: &CoiMask, delta_r_m: f64) -> f64 {
    mask.lrp_meters(delta_r_m)
}
