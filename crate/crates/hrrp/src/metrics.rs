//! Similarity metrics on raw profiles and on their decompositions, plus the
//! top-metric protocol (extremal metric value over candidates within an
//! aspect window).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mfn::{mfn_decompose_with_mask, DecompositionParams};
use crate::profile::{CoiMask, MfnComponents, RangeProfile};
use crate::segmentation::coi_mask;

/// A profile bundled with its decomposition and COI mask. All profiles
/// compared by the decomposition metrics must share one parameter set.
#[derive(Debug, Clone)]
pub struct DecomposedProfile {
    pub rp: RangeProfile,
    pub comps: MfnComponents,
    pub mask: CoiMask,
}

impl DecomposedProfile {
    pub fn decompose(rp: RangeProfile, params: &DecompositionParams) -> Result<Self> {
        let mask = coi_mask(&rp, &params.seg)?;
        let comps = mfn_decompose_with_mask(&rp, &mask, params)?;
        Ok(Self { rp, comps, mask })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Mse,
    Cosine,
    MseF,
    CosF,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Maximize,
    Minimize,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] = [
        MetricKind::Mse,
        MetricKind::Cosine,
        MetricKind::MseF,
        MetricKind::CosF,
    ];

    pub fn orientation(self) -> Orientation {
        match self {
            MetricKind::Mse | MetricKind::MseF => Orientation::Minimize,
            MetricKind::Cosine | MetricKind::CosF => Orientation::Maximize,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Mse => "mse",
            MetricKind::Cosine => "cosine",
            MetricKind::MseF => "mse_f",
            MetricKind::CosF => "cos_f",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricSpec {
    pub kind: MetricKind,
    pub orientation: Orientation,
}

impl MetricSpec {
    pub fn for_kind(kind: MetricKind) -> Self {
        Self { kind, orientation: kind.orientation() }
    }
}

/// Squared Euclidean distance (a sum, not a mean).
pub fn mse(x1: &[f64], x2: &[f64]) -> Result<f64> {
    if x1.len() != x2.len() {
        return Err(Error::InvalidParam(format!(
            "length mismatch: {} vs {}",
            x1.len(),
            x2.len()
        )));
    }
    Ok(x1.iter().zip(x2).map(|(a, b)| (a - b) * (a - b)).sum())
}

/// Cosine similarity; undefined when either vector has zero norm.
pub fn cosine(x1: &[f64], x2: &[f64]) -> Result<f64> {
    if x1.len() != x2.len() {
        return Err(Error::InvalidParam(format!(
            "length mismatch: {} vs {}",
            x1.len(),
            x2.len()
        )));
    }
    let dot: f64 = x1.iter().zip(x2).map(|(a, b)| a * b).sum();
    let s1: f64 = x1.iter().map(|a| a * a).sum();
    let s2: f64 = x2.iter().map(|a| a * a).sum();
    if s1 == 0.0 || s2 == 0.0 {
        return Err(Error::UndefinedMetric("cosine of a zero-norm vector".into()));
    }
    // sqrt of the product (not product of sqrts) so that identical vectors
    // give exactly 1: sqrt(fl(s*s)) == s for every positive double
    Ok(dot / (s1 * s2).sqrt())
}

/// MSE of the feature components, normalized by the mean LRP of the two
/// profiles (in cells) to remove the target-size bias.
pub fn mse_f(d1: &DecomposedProfile, d2: &DecomposedProfile) -> Result<f64> {
    let lrp_sum = d1.mask.lrp_cells() + d2.mask.lrp_cells();
    if lrp_sum == 0 {
        return Err(Error::UndefinedMetric("both LRPs are zero".into()));
    }
    Ok(mse(&d1.comps.f, &d2.comps.f)? / (lrp_sum as f64 / 2.0))
}

/// Cosine similarity of the per-profile mean-centered feature components,
/// restricted to the union of the two COI masks.
pub fn cos_f(d1: &DecomposedProfile, d2: &DecomposedProfile) -> Result<f64> {
    if d1.rp.len() != d2.rp.len() {
        return Err(Error::InvalidParam("profiles of different lengths".into()));
    }
    let mean_over_coi = |d: &DecomposedProfile| -> Result<f64> {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (v, &b) in d.comps.f.iter().zip(d.mask.bits()) {
            if b {
                sum += v;
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::UndefinedMetric("empty COI".into()));
        }
        Ok(sum / count as f64)
    };
    let mu1 = mean_over_coi(d1)?;
    let mu2 = mean_over_coi(d2)?;

    let mut dot = 0.0;
    let mut n1 = 0.0;
    let mut n2 = 0.0;
    let mut union_nonempty = false;
    for i in 0..d1.rp.len() {
        if d1.mask.bits()[i] || d2.mask.bits()[i] {
            union_nonempty = true;
            let a = d1.comps.f[i] - mu1;
            let b = d2.comps.f[i] - mu2;
            dot += a * b;
            n1 += a * a;
            n2 += b * b;
        }
    }
    if !union_nonempty {
        return Err(Error::UndefinedMetric("empty COI union".into()));
    }
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::UndefinedMetric(
            "zero-norm normalized restriction".into(),
        ));
    }
    Ok(dot / (n1.sqrt() * n2.sqrt()))
}

/// Evaluates one metric kind on a pair of decomposed profiles. `mse` and
/// `cosine` act on the raw amplitude vectors, the `_f` variants on the
/// decompositions.
pub fn evaluate(kind: MetricKind, d1: &DecomposedProfile, d2: &DecomposedProfile) -> Result<f64> {
    match kind {
        MetricKind::Mse => mse(d1.rp.cells(), d2.rp.cells()),
        MetricKind::Cosine => cosine(d1.rp.cells(), d2.rp.cells()),
        MetricKind::MseF => mse_f(d1, d2),
        MetricKind::CosF => cos_f(d1, d2),
    }
}

/// Circular distance between two aspect angles in degrees, in [0, 180].
pub fn aspect_distance_deg(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Extremal metric value between the query and the candidates whose aspect
/// lies within `half_window_deg` of the query's (circularly). Candidates on
/// which the metric is undefined are skipped; `None` when no candidate
/// yields a value.
pub fn top_metric<'a, I>(
    query: &DecomposedProfile,
    candidates: I,
    spec: MetricSpec,
    half_window_deg: f64,
) -> Option<f64>
where
    I: IntoIterator<Item = &'a DecomposedProfile>,
{
    top_metric_by(query, candidates, spec.orientation, half_window_deg, |q, c| {
        evaluate(spec.kind, q, c)
    })
}

/// Like [`top_metric`] but with a caller-supplied evaluator, for variants of
/// the stock metrics (e.g. differently normalized MSE).
pub fn top_metric_by<'a, I, F>(
    query: &DecomposedProfile,
    candidates: I,
    orientation: Orientation,
    half_window_deg: f64,
    mut eval: F,
) -> Option<f64>
where
    I: IntoIterator<Item = &'a DecomposedProfile>,
    F: FnMut(&DecomposedProfile, &DecomposedProfile) -> Result<f64>,
{
    let mut best: Option<f64> = None;
    for cand in candidates {
        if aspect_distance_deg(query.rp.aspect_deg(), cand.rp.aspect_deg()) > half_window_deg {
            continue;
        }
        let value = match eval(query, cand) {
            Ok(v) => v,
            Err(_) => continue,
        };
        best = Some(match (best, orientation) {
            (None, _) => value,
            (Some(b), Orientation::Maximize) => b.max(value),
            (Some(b), Orientation::Minimize) => b.min(value),
        });
    }
    best
}
