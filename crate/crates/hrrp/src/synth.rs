//! Deterministic synthetic HRRP generator.
//!
//! A ship is a rectangle with point scatterers; a profile is rendered by
//! projecting each scatterer onto the line of sight and depositing its
//! amplitude into one range cell (nearest-cell rounding, no sidelobes).
//! Draw-to-draw variability comes from multiplicative log-normal speckle on
//! the scatterer amplitudes plus additive exponential clutter on every cell.
//! All randomness is derived from explicit seeds with a per-(seed, draw,
//! index) stream split, so rendering order never changes the output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{Dataset, RangeProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scatterer {
    /// Position along the ship length axis, in [-l/2, l/2] meters.
    pub along_m: f64,
    /// Position across the beam, in [-w/2, w/2] meters.
    pub across_m: f64,
    pub reflectivity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShipModel {
    pub ship_id: String,
    pub length_m: f64,
    pub width_m: f64,
    pub scatterers: Vec<Scatterer>,
    pub base_rcs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SceneParams {
    /// Cell count of rendered profiles.
    pub s: usize,
    pub delta_r_m: f64,
    /// Cell where the nearest scatterer lands.
    pub target_start_cell: usize,
    /// Mean of the exponential clutter amplitude; keep well below the
    /// scatterer amplitudes.
    pub clutter_mean: f64,
    /// Standard deviation of the log of the multiplicative speckle factor.
    pub speckle_sd: f64,
    pub seed: u64,
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            s: 1024,
            delta_r_m: 1.0,
            target_start_cell: 30,
            clutter_mean: 0.01,
            speckle_sd: 0.3,
            seed: 0,
        }
    }
}

// splitmix64, used to fold (seed, draw, index) into one RNG stream key
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

pub(crate) fn stream_rng(seed: u64, draw: u64, kind: u64, index: u64) -> ChaCha8Rng {
    let key = mix(mix(mix(mix(seed) ^ draw) ^ kind) ^ index);
    ChaCha8Rng::seed_from_u64(key)
}

const STREAM_SCATTERER: u64 = 1;
const STREAM_CLUTTER: u64 = 2;

/// Builds a ship with `n_scatterers` point scatterers drawn uniformly over
/// the rectangle, the first two forced onto the bow and stern so the
/// projected extent realizes the full length at cardinal aspects.
/// Reflectivities are log-uniform in [0.3, 1] x base_rcs.
pub fn make_ship(
    ship_id: impl Into<String>,
    length_m: f64,
    width_m: f64,
    n_scatterers: usize,
    seed: u64,
) -> Result<ShipModel> {
    if !(length_m > 0.0 && width_m > 0.0 && width_m <= length_m) {
        return Err(Error::InvalidParam(format!(
            "ship dimensions invalid: length {length_m}, width {width_m}"
        )));
    }
    if n_scatterers < 2 {
        return Err(Error::InvalidParam("a ship needs at least 2 scatterers".into()));
    }
    let base_rcs = 1.0;
    let mut rng = stream_rng(seed, 0, 0, 0);
    let reflectivity = |rng: &mut ChaCha8Rng| {
        let lo = 0.3f64.ln();
        let u: f64 = rng.gen();
        (lo + u * (0.0 - lo)).exp() * base_rcs
    };
    let mut scatterers = vec![
        Scatterer { along_m: -length_m / 2.0, across_m: 0.0, reflectivity: reflectivity(&mut rng) },
        Scatterer { along_m: length_m / 2.0, across_m: 0.0, reflectivity: reflectivity(&mut rng) },
    ];
    for _ in 2..n_scatterers {
        let along_m = (rng.gen::<f64>() - 0.5) * length_m;
        let across_m = (rng.gen::<f64>() - 0.5) * width_m;
        let r = reflectivity(&mut rng);
        scatterers.push(Scatterer { along_m, across_m, reflectivity: r });
    }
    Ok(ShipModel {
        ship_id: ship_id.into(),
        length_m,
        width_m,
        scatterers,
        base_rcs,
    })
}

/// Renders one profile of `ship` at `aspect_deg`. `draw` selects the speckle
/// and clutter realization; identical (scene.seed, draw) reproduce the
/// profile bit for bit.
pub fn render_hrrp(
    ship: &ShipModel,
    aspect_deg: f64,
    scene: &SceneParams,
    draw: u64,
) -> Result<RangeProfile> {
    if scene.s == 0 || scene.delta_r_m <= 0.0 {
        return Err(Error::Config("scene needs s >= 1 and positive delta_r_m".into()));
    }
    let asp = aspect_deg.to_radians();
    let offsets: Vec<f64> = ship
        .scatterers
        .iter()
        .map(|sc| sc.along_m * asp.cos() + sc.across_m * asp.sin())
        .collect();
    let min_offset = offsets.iter().cloned().fold(f64::INFINITY, f64::min);

    let mut cells = vec![0.0f64; scene.s];
    for (idx, (sc, off)) in ship.scatterers.iter().zip(&offsets).enumerate() {
        let cell = scene.target_start_cell
            + ((off - min_offset) / scene.delta_r_m).round() as usize;
        if cell >= scene.s {
            return Err(Error::Config(format!(
                "scatterer projects to cell {cell} outside the {}-cell scene",
                scene.s
            )));
        }
        let speckle = if scene.speckle_sd > 0.0 {
            let mut rng = stream_rng(scene.seed, draw, STREAM_SCATTERER, idx as u64);
            let z: f64 = StandardNormal.sample(&mut rng);
            (scene.speckle_sd * z).exp()
        } else {
            1.0
        };
        cells[cell] += sc.reflectivity * speckle;
    }
    if scene.clutter_mean > 0.0 {
        for (i, c) in cells.iter_mut().enumerate() {
            let mut rng = stream_rng(scene.seed, draw, STREAM_CLUTTER, i as u64);
            let u: f64 = rng.gen();
            *c += -scene.clutter_mean * (1.0 - u).ln();
        }
    }
    RangeProfile::new(
        ship.ship_id.clone(),
        aspect_deg.rem_euclid(360.0),
        scene.delta_r_m,
        ship.length_m,
        ship.width_m,
        cells,
    )
}

/// Renders the Cartesian product ships x aspects x draws, rows ordered
/// (ship, aspect, draw). Each row gets its own draw token so speckle and
/// clutter streams never collide across rows.
pub fn render_fleet(
    ships: &[ShipModel],
    aspects_deg: &[f64],
    draws_per_aspect: usize,
    scene: &SceneParams,
) -> Result<Dataset> {
    let mut profiles = Vec::with_capacity(ships.len() * aspects_deg.len() * draws_per_aspect);
    for (si, ship) in ships.iter().enumerate() {
        for (ai, &aspect) in aspects_deg.iter().enumerate() {
            for d in 0..draws_per_aspect {
                let token = ((si * aspects_deg.len() + ai) * draws_per_aspect + d) as u64;
                profiles.push(render_hrrp(ship, aspect, scene, token)?);
            }
        }
    }
    Dataset::new(scene.s, profiles)
}
