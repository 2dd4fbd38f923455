//! Core domain types and the dataset CSV format shared by every subcommand.
//!
//! A dataset is a plain UTF-8 CSV file, one profile per row:
//!
//! ```text
//! ship_id,aspect_deg,delta_r_m,ship_length_m,ship_width_m,c0,c1,...,c{s-1}
//! ```
//!
//! The cell count `s` is inferred from the header and must be shared by all
//! rows. Amplitudes are written with 17 significant digits so a save/load
//! round trip is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// One high-resolution range profile: an amplitude vector plus acquisition
/// metadata (aspect angle, range resolution, ship identity and dimensions).
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfile {
    cells: Vec<f64>,
    aspect_deg: f64,
    delta_r_m: f64,
    ship_id: String,
    ship_length_m: f64,
    ship_width_m: f64,
}

impl RangeProfile {
    pub fn new(
        ship_id: impl Into<String>,
        aspect_deg: f64,
        delta_r_m: f64,
        ship_length_m: f64,
        ship_width_m: f64,
        cells: Vec<f64>,
    ) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidParam("profile must have at least one cell".into()));
        }
        if let Some(i) = cells.iter().position(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidParam(format!(
                "amplitude at cell {i} must be finite and non-negative, got {}",
                cells[i]
            )));
        }
        if !(0.0..360.0).contains(&aspect_deg) {
            return Err(Error::InvalidParam(format!(
                "aspect_deg must be in [0, 360), got {aspect_deg}"
            )));
        }
        if !(delta_r_m > 0.0 && delta_r_m.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "delta_r_m must be positive, got {delta_r_m}"
            )));
        }
        if !(ship_length_m > 0.0 && ship_width_m > 0.0) {
            return Err(Error::InvalidParam(
                "ship dimensions must be positive".into(),
            ));
        }
        if ship_width_m > ship_length_m {
            return Err(Error::InvalidParam(format!(
                "ship_width_m ({ship_width_m}) must not exceed ship_length_m ({ship_length_m})"
            )));
        }
        let ship_id = ship_id.into();
        if ship_id.contains(',') {
            return Err(Error::InvalidParam("ship_id must not contain commas".into()));
        }
        Ok(Self {
            cells,
            aspect_deg,
            delta_r_m,
            ship_id,
            ship_length_m,
            ship_width_m,
        })
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn aspect_deg(&self) -> f64 {
        self.aspect_deg
    }

    pub fn delta_r_m(&self) -> f64 {
        self.delta_r_m
    }

    pub fn ship_id(&self) -> &str {
        &self.ship_id
    }

    pub fn ship_length_m(&self) -> f64 {
        self.ship_length_m
    }

    pub fn ship_width_m(&self) -> f64 {
        self.ship_width_m
    }
}

/// Binary mask of cells of interest, with the derived LRP (length in cells
/// of the first maximal run of set cells).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoiMask {
    bits: Vec<bool>,
    lrp_cells: usize,
}

impl CoiMask {
    /// Builds a mask from raw bits; the LRP is derived by scanning for the
    /// first run of set cells from cell 0.
    pub fn from_bits(bits: Vec<bool>) -> Self {
        let lrp_cells = first_run_length(&bits);
        Self { bits, lrp_cells }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn lrp_cells(&self) -> usize {
        self.lrp_cells
    }

    pub fn is_all_zero(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// LRP converted to meters using the profile's range resolution.
    pub fn lrp_meters(&self, delta_r_m: f64) -> f64 {
        self.lrp_cells as f64 * delta_r_m
    }
}

fn first_run_length(bits: &[bool]) -> usize {
    let start = match bits.iter().position(|&b| b) {
        Some(i) => i,
        None => return 0,
    };
    bits[start..].iter().take_while(|&&b| b).count()
}

/// The (m, f, n) triple produced by the decomposition, same length as the
/// source profile. `m` is a scaled binary mask, `f` the smoothed feature
/// component and `n` the residual, so `f + n` reconstructs the input.
#[derive(Debug, Clone, PartialEq)]
pub struct MfnComponents {
    pub m: Vec<f64>,
    pub f: Vec<f64>,
    pub n: Vec<f64>,
    pub sigma: f64,
}

/// Ordered collection of profiles sharing one cell count.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    profiles: Vec<RangeProfile>,
    s: usize,
}

impl Dataset {
    /// `s` must be at least 1 even for an empty dataset, so the CSV header
    /// stays well defined.
    pub fn new(s: usize, profiles: Vec<RangeProfile>) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParam("cell count s must be >= 1".into()));
        }
        if let Some(p) = profiles.iter().find(|p| p.len() != s) {
            return Err(Error::InvalidParam(format!(
                "profile of ship {} has {} cells, dataset expects {s}",
                p.ship_id(),
                p.len()
            )));
        }
        Ok(Self { profiles, s })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn profiles(&self) -> &[RangeProfile] {
        &self.profiles
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }
}

const FIXED_COLUMNS: [&str; 5] = [
    "ship_id",
    "aspect_deg",
    "delta_r_m",
    "ship_length_m",
    "ship_width_m",
];

/// Reads a dataset CSV. Errors name the offending line (1-based, the header
/// is line 1).
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing header line"))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < FIXED_COLUMNS.len() + 1 {
        return Err(Error::parse(path, 1, "header has too few columns"));
    }
    for (i, name) in FIXED_COLUMNS.iter().enumerate() {
        if columns[i] != *name {
            return Err(Error::parse(
                path,
                1,
                format!("expected column '{name}' at position {i}, got '{}'", columns[i]),
            ));
        }
    }
    let s = columns.len() - FIXED_COLUMNS.len();
    for (k, col) in columns[FIXED_COLUMNS.len()..].iter().enumerate() {
        let expected = format!("c{k}");
        if *col != expected {
            return Err(Error::parse(
                path,
                1,
                format!("expected cell column '{expected}', got '{col}'"),
            ));
        }
    }

    let mut profiles = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected {} fields, got {}", columns.len(), fields.len()),
            ));
        }
        let num = |i: usize, name: &str| -> Result<f64> {
            fields[i].parse::<f64>().map_err(|_| {
                Error::parse(path, lineno, format!("non-numeric {name}: '{}'", fields[i]))
            })
        };
        let aspect_deg = num(1, "aspect_deg")?;
        let delta_r_m = num(2, "delta_r_m")?;
        let ship_length_m = num(3, "ship_length_m")?;
        let ship_width_m = num(4, "ship_width_m")?;
        let mut cells = Vec::with_capacity(s);
        for k in 0..s {
            cells.push(num(FIXED_COLUMNS.len() + k, &format!("c{k}"))?);
        }
        let profile = RangeProfile::new(
            fields[0],
            aspect_deg,
            delta_r_m,
            ship_length_m,
            ship_width_m,
            cells,
        )
        .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        profiles.push(profile);
    }
    Dataset::new(s, profiles)
}

/// Serializes a dataset to the CSV wire format as a string.
pub fn dataset_to_csv(ds: &Dataset) -> String {
    let mut out = String::new();
    out.push_str(&FIXED_COLUMNS.join(","));
    for k in 0..ds.s() {
        let _ = write!(out, ",c{k}");
    }
    out.push('\n');
    for p in ds.profiles() {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            p.ship_id(),
            p.aspect_deg(),
            p.delta_r_m(),
            p.ship_length_m(),
            p.ship_width_m()
        );
        for &a in p.cells() {
            let _ = write!(out, ",{:.16e}", a);
        }
        out.push('\n');
    }
    out
}

pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, dataset_to_csv(ds)).map_err(|e| Error::io(path, e))
}
