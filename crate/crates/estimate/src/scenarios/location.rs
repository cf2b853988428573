use std::io::{BufRead, BufReader, Read};

use gleak_core::{
    Alphabet, Channel, ChannelSampler, GainFunction, Mechanism, Observable, Prior, Secret, StreamRng,
};
use serde::{Deserialize, Serialize};

use crate::error::{EstimateError, Result};

const EARTH_RADIUS_KM: f64 = 6371.0088;

fn cell_coords(size: usize, i: usize) -> (f64, f64) {
    ((i / size) as f64, (i % size) as f64)
}

fn cell_distance(size: usize, a: usize, b: usize) -> f64 {
    let (ra, ca) = cell_coords(size, a);
    let (rb, cb) = cell_coords(size, b);
    (ra - rb).hypot(ca - cb)
}

/// Gain that decays with the distance between the guessed and the true
/// cell: `round(γ·exp(−α·d/l))`, with `d` in meters between cell centers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiamondGain {
    pub gamma: f64,
    pub alpha: f64,
    pub length: f64,
}

impl Default for DiamondGain {
    fn default() -> Self {
        DiamondGain {
            gamma: 4.0,
            alpha: 0.95,
            length: 250.0,
        }
    }
}

/// Cells are numbered row-major on a `size × size` grid whose cells have
/// side `cell_side` meters.
pub fn diamond_gain(size: usize, cell_side: f64, params: DiamondGain) -> Result<GainFunction> {
    if size == 0 || !(cell_side > 0.0) || !(params.length > 0.0) || !(params.gamma >= 0.0) {
        return Err(EstimateError::InvalidConfig("invalid diamond gain parameters".into()));
    }
    let n = size * size;
    let matrix = (0..n)
        .flat_map(|w| {
            (0..n).map(move |x| {
                let d = cell_side * cell_distance(size, w, x);
                (params.gamma * (-params.alpha * d / params.length).exp()).round()
            })
        })
        .collect();
    let cells = Alphabet::indexed(n);
    Ok(GainFunction::new(cells.clone(), cells, matrix)?)
}

/// Planar geometric noise on the grid: `C[x][y] ∝ exp(−ν·d(x, y))` with `d`
/// the Euclidean distance in cells.
pub fn grid_geometric_mechanism(size: usize, nu: f64) -> Result<Channel> {
    if size == 0 || nu.is_nan() || nu <= 0.0 {
        return Err(EstimateError::InvalidConfig("grid mechanism needs size >= 1 and nu > 0".into()));
    }
    let n = size * size;
    let data = (0..n)
        .flat_map(|x| {
            (0..n).map(move |y| {
                if nu.is_infinite() {
                    if x == y {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (-nu * cell_distance(size, x, y)).exp()
                }
            })
        })
        .collect();
    let cells = Alphabet::indexed(n);
    Ok(Channel::from_weights(cells.clone(), cells, data)?)
}

/// Reports sampled cells as `(row, col)` pairs.
#[derive(Clone, Debug)]
pub struct GridObservations {
    inner: ChannelSampler,
    size: usize,
}

impl GridObservations {
    pub fn new(channel: &Channel, size: usize) -> Result<Self> {
        if channel.cols() != size * size {
            return Err(EstimateError::InvalidConfig(format!(
                "channel has {} outputs, grid has {} cells",
                channel.cols(),
                size * size
            )));
        }
        Ok(GridObservations {
            inner: channel.sampler()?,
            size,
        })
    }
}

impl Mechanism for GridObservations {
    fn observe(&self, secret: Secret, rng: &mut StreamRng) -> Observable {
        let y = self.inner.observe(secret, rng).components()[0] as usize;
        Observable::tuple(vec![(y / self.size) as i64, (y % self.size) as i64])
    }
}

/// Square region and column layout of a check-in dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckinRegion {
    pub center_lat: f64,
    pub center_lon: f64,
    pub side_km: f64,
    pub grid: usize,
    pub lat_column: usize,
    pub lon_column: usize,
}

impl Default for CheckinRegion {
    /// 5 km square over San Francisco, 20 × 20 cells, columns of the public
    /// dump (user, time, latitude, longitude, location id).
    fn default() -> Self {
        CheckinRegion {
            center_lat: 37.755,
            center_lon: -122.440,
            side_km: 5.0,
            grid: 20,
            lat_column: 2,
            lon_column: 3,
        }
    }
}

impl CheckinRegion {
    /// Cell of a point, or `None` outside the square. Distances use an
    /// equirectangular projection about the center; a point on a boundary
    /// between cells goes to the lower-index cell.
    pub fn cell(&self, lat: f64, lon: f64) -> Option<usize> {
        let deg = std::f64::consts::PI / 180.0;
        let north = (lat - self.center_lat) * deg * EARTH_RADIUS_KM;
        let east = (lon - self.center_lon) * deg * EARTH_RADIUS_KM * (self.center_lat * deg).cos();
        let cell_km = self.side_km / self.grid as f64;
        let index = |offset: f64| -> Option<usize> {
            let t = (offset + self.side_km / 2.0) / cell_km;
            if !(0.0..=self.grid as f64).contains(&t) {
                return None;
            }
            Some(((t.ceil() as usize).max(1) - 1).min(self.grid - 1))
        };
        Some(index(north)? * self.grid + index(east)?)
    }
}

/// Prior over the region's cells from check-in frequencies, together with
/// the number of in-region records.
pub fn gowalla_ingest<R: Read>(reader: R, region: &CheckinRegion) -> Result<(Prior, usize)> {
    if region.grid == 0 || !(region.side_km > 0.0) {
        return Err(EstimateError::InvalidConfig("region needs grid >= 1 and a positive side".into()));
    }
    let mut counts = vec![0.0; region.grid * region.grid];
    let mut inside = 0usize;
    for (no, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let field = |c: usize| -> Option<f64> { fields.get(c).and_then(|s| s.parse().ok()) };
        let (Some(lat), Some(lon)) = (field(region.lat_column), field(region.lon_column)) else {
            if no == 0 {
                continue; // header
            }
            return Err(EstimateError::Input(format!("line {}: missing coordinates", no + 1)));
        };
        if let Some(c) = region.cell(lat, lon) {
            counts[c] += 1.0;
            inside += 1;
        }
    }
    if inside == 0 {
        return Err(EstimateError::Input("no check-ins inside the region".into()));
    }
    let prior = Prior::from_weights(Alphabet::indexed(counts.len()), &counts)?;
    Ok((prior, inside))
}

/// Stand-in prior when no check-in dump is available: a few smooth
/// hotspots over a low uniform floor, fixed for every grid size.
pub fn synthetic_city_prior(size: usize) -> Result<Prior> {
    if size == 0 {
        return Err(EstimateError::InvalidConfig("grid must be non-empty".into()));
    }
    // (row, col) as grid fractions, height, spread as a grid fraction
    const SPOTS: [(f64, f64, f64, f64); 4] = [
        (0.30, 0.65, 1.0, 0.08),
        (0.55, 0.40, 0.6, 0.12),
        (0.75, 0.75, 0.4, 0.06),
        (0.20, 0.20, 0.3, 0.10),
    ];
    let s = size as f64;
    let weights: Vec<f64> = (0..size * size)
        .map(|i| {
            let (r, c) = cell_coords(size, i);
            let (r, c) = ((r + 0.5) / s, (c + 0.5) / s);
            0.02 + SPOTS
                .iter()
                .map(|&(sr, sc, h, w)| h * (-((r - sr).powi(2) + (c - sc).powi(2)) / (2.0 * w * w)).exp())
                .sum::<f64>()
        })
        .collect();
    Ok(Prior::from_weights(Alphabet::indexed(size * size), &weights)?)
}
