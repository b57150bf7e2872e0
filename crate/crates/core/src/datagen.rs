//! Deterministic grid-based generation of the supervised dataset mapping
//! (target position, rig parameters) to the four motor rotations.
//!
//! The grid is a Cartesian product over cube side lengths `s` (B = D = H =
//! s), shared winch radii `R`, and target coordinates `x, y, z`, every axis
//! enumerated over a half-open arithmetic range `[start, stop)`. Enumeration
//! order is fixed: side outermost, then radius, then `x`, `y`, `z`
//! (row-major). Grid values are computed as `start + k * step` so the same
//! spec always produces the same bytes.
//!
//! Each sample stores seven features `(x, y, z, B, D, H, R)` and four targets
//! `(theta0..theta3)`; targets come straight from
//! [`Rig::target_to_rotations`].

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kinematics::{KinematicsError, Point3, Rig};

/// Feature layout: `x, y, z, B, D, H, R`.
pub const NUM_FEATURES: usize = 7;
/// Target layout: `theta0..theta3`.
pub const NUM_TARGETS: usize = 4;
/// Exact header of the dataset CSV format.
pub const CSV_HEADER: &str = "x,y,z,B,D,H,R,theta0,theta1,theta2,theta3";

/// Default held-out fraction for train/test splits.
pub const DEFAULT_TEST_FRACTION: f64 = 0.2;
/// Default seed for train/test splits.
pub const DEFAULT_SPLIT_SEED: u64 = 42;

/// Errors produced while generating, splitting or persisting datasets.
#[derive(Debug, Error)]
pub enum DatagenError {
    #[error("invalid grid spec: {0}")]
    InvalidSpec(String),
    #[error("grid spec produces no samples")]
    EmptyGrid,
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("invalid test fraction {0}: must lie strictly between 0 and 1")]
    InvalidFraction(f64),
    #[error("histogram needs at least one bin, got {0}")]
    InvalidBins(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// The grid over rig sizes, winch radii and target positions.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// Half-open range `[start, stop)` with `step` for the cube side
    /// (B = D = H).
    pub side_start: f64,
    pub side_stop: f64,
    pub side_step: f64,
    /// Shared winch radii, one full point grid per radius.
    pub radii: Vec<f64>,
    /// Step for the `x`, `y`, `z` grids, each over `[0, side)`.
    pub point_step: f64,
}

impl GridSpec {
    /// Desk-scale default: a few thousand rows, generated in well under a
    /// second.
    pub fn desk_scale() -> Self {
        Self {
            side_start: 1.0,
            side_stop: 4.0,
            side_step: 0.5,
            radii: vec![0.008, 0.010],
            point_step: 0.5,
        }
    }

    /// The full-size grid: sides 1.0..7.0 step 0.5, radii 8/9/10 mm,
    /// half-meter point grid.
    pub fn full_scale() -> Self {
        Self {
            side_start: 1.0,
            side_stop: 7.0,
            side_step: 0.5,
            radii: vec![0.008, 0.009, 0.010],
            point_step: 0.5,
        }
    }

    pub fn validate(&self) -> Result<(), DatagenError> {
        let bad = |msg: String| Err(DatagenError::InvalidSpec(msg));
        if !(self.side_start.is_finite() && self.side_start > 0.0) {
            return bad(format!("side start {} must be > 0", self.side_start));
        }
        if !(self.side_step.is_finite() && self.side_step > 0.0) {
            return bad(format!("side step {} must be > 0", self.side_step));
        }
        if !(self.side_stop.is_finite() && self.side_stop > self.side_start) {
            return bad(format!(
                "side stop {} must exceed side start {}",
                self.side_stop, self.side_start
            ));
        }
        if !(self.point_step.is_finite() && self.point_step > 0.0) {
            return bad(format!("point step {} must be > 0", self.point_step));
        }
        for &r in &self.radii {
            if !(r.is_finite() && r > 0.0) {
                return bad(format!("radius {r} must be > 0"));
            }
        }
        Ok(())
    }
}

/// One supervised example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// `x, y, z, B, D, H, R`.
    pub features: [f64; NUM_FEATURES],
    /// `theta0..theta3` in radians.
    pub targets: [f64; NUM_TARGETS],
}

impl Sample {
    /// The rig described by this sample's `B, D, H, R` features.
    pub fn rig(&self) -> Result<Rig, KinematicsError> {
        Rig::with_uniform_radius(
            self.features[3],
            self.features[4],
            self.features[5],
            self.features[6],
        )
    }

    /// The target position described by this sample's `x, y, z` features.
    pub fn point(&self) -> Point3 {
        Point3::new(self.features[0], self.features[1], self.features[2])
    }
}

/// An ordered collection of samples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Writes the dataset in the CSV format under [`CSV_HEADER`]. Reals are
    /// serialized with 17 significant digits, which round-trips every `f64`
    /// exactly.
    pub fn save(&self, path: &Path) -> Result<(), DatagenError> {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{CSV_HEADER}")?;
        for s in &self.samples {
            let mut fields = Vec::with_capacity(NUM_FEATURES + NUM_TARGETS);
            fields.extend(s.features.iter().map(|v| format_real(*v)));
            fields.extend(s.targets.iter().map(|v| format_real(*v)));
            writeln!(w, "{}", fields.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Parses a dataset written by [`Dataset::save`]. Errors carry 1-based
    /// line numbers.
    pub fn load(path: &Path) -> Result<Self, DatagenError> {
        let mut text = String::new();
        File::open(path)?.read_to_string(&mut text)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, DatagenError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, header)) if header == CSV_HEADER => {}
            Some((_, header)) => {
                return Err(DatagenError::Parse {
                    line: 1,
                    message: format!("header mismatch: expected '{CSV_HEADER}', found '{header}'"),
                })
            }
            None => {
                return Err(DatagenError::Parse {
                    line: 1,
                    message: "empty file".into(),
                })
            }
        }
        let mut samples = Vec::new();
        for (idx, row) in lines {
            let line = idx + 1;
            if row.is_empty() {
                continue;
            }
            let fields: Vec<&str> = row.split(',').collect();
            if fields.len() != NUM_FEATURES + NUM_TARGETS {
                return Err(DatagenError::Parse {
                    line,
                    message: format!(
                        "expected {} fields, found {}",
                        NUM_FEATURES + NUM_TARGETS,
                        fields.len()
                    ),
                });
            }
            let mut values = [0.0; NUM_FEATURES + NUM_TARGETS];
            for (k, field) in fields.iter().enumerate() {
                values[k] = field.parse::<f64>().map_err(|e| DatagenError::Parse {
                    line,
                    message: format!("field {} ('{}'): {e}", k + 1, field),
                })?;
            }
            let mut features = [0.0; NUM_FEATURES];
            features.copy_from_slice(&values[..NUM_FEATURES]);
            let mut targets = [0.0; NUM_TARGETS];
            targets.copy_from_slice(&values[NUM_FEATURES..]);
            samples.push(Sample { features, targets });
        }
        Ok(Self { samples })
    }
}

fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// The values of the half-open range `start + k*step < stop`, `k = 0, 1, ..`.
fn half_open_range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let mut vals = Vec::new();
    let mut k = 0u64;
    loop {
        let v = start + k as f64 * step;
        if v >= stop {
            return vals;
        }
        vals.push(v);
        k += 1;
    }
}

/// Generates the dataset for `spec` single-threaded.
pub fn generate(spec: &GridSpec) -> Result<Dataset, DatagenError> {
    generate_with_threads(spec, 1)
}

/// Generates the dataset for `spec`, optionally fanning grid blocks out
/// across `threads` workers. The output is identical for any thread count:
/// every sample is a pure function of its grid point and blocks are
/// reassembled in enumeration order.
pub fn generate_with_threads(spec: &GridSpec, threads: usize) -> Result<Dataset, DatagenError> {
    spec.validate()?;
    let sides = half_open_range(spec.side_start, spec.side_stop, spec.side_step);
    let mut blocks = Vec::new();
    for &side in &sides {
        for &radius in &spec.radii {
            blocks.push((side, radius));
        }
    }
    if blocks.is_empty() {
        return Err(DatagenError::EmptyGrid);
    }

    let samples = if threads <= 1 || blocks.len() == 1 {
        let mut samples = Vec::new();
        for &(side, radius) in &blocks {
            block_samples(side, radius, spec.point_step, &mut samples)?;
        }
        samples
    } else {
        let workers = threads.min(blocks.len());
        let chunk = blocks.len().div_ceil(workers);
        let results: Vec<Result<Vec<Sample>, DatagenError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = blocks
                .chunks(chunk)
                .map(|part| {
                    scope.spawn(move || {
                        let mut samples = Vec::new();
                        for &(side, radius) in part {
                            block_samples(side, radius, spec.point_step, &mut samples)?;
                        }
                        Ok(samples)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let mut samples = Vec::new();
        for r in results {
            samples.extend(r?);
        }
        samples
    };

    if samples.is_empty() {
        return Err(DatagenError::EmptyGrid);
    }
    Ok(Dataset { samples })
}

fn block_samples(
    side: f64,
    radius: f64,
    point_step: f64,
    out: &mut Vec<Sample>,
) -> Result<(), DatagenError> {
    let rig = Rig::with_uniform_radius(side, side, side, radius)?;
    let coords = half_open_range(0.0, side, point_step);
    for &x in &coords {
        for &y in &coords {
            for &z in &coords {
                let rot = rig.target_to_rotations(Point3::new(x, y, z))?;
                out.push(Sample {
                    features: [x, y, z, side, side, side, radius],
                    targets: rot.values(),
                });
            }
        }
    }
    Ok(())
}

/// Seeded shuffle-and-partition into `(train, test)`. The test set takes
/// `floor(len * test_fraction)` rows; train and test are disjoint and
/// together cover the input.
pub fn split(
    ds: &Dataset,
    test_fraction: f64,
    seed: u64,
) -> Result<(Dataset, Dataset), DatagenError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(DatagenError::InvalidFraction(test_fraction));
    }
    if ds.is_empty() {
        return Err(DatagenError::EmptyDataset);
    }
    let mut indices: Vec<usize> = (0..ds.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let n_test = (ds.len() as f64 * test_fraction).floor() as usize;
    let pick = |idx: &[usize]| Dataset {
        samples: idx.iter().map(|&i| ds.samples[i]).collect(),
    };
    Ok((pick(&indices[n_test..]), pick(&indices[..n_test])))
}

/// Distribution summary for one rotation output.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub stddev: f64,
    /// `bins + 1` edges; the last edge equals `max`.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Per-output histograms and moments over a dataset's targets.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramReport {
    pub rows: usize,
    pub outputs: [OutputStats; NUM_TARGETS],
}

/// Equal-width histogram (over `[min, max]`) plus summary moments for each
/// rotation output.
pub fn stats(ds: &Dataset, bins: usize) -> Result<HistogramReport, DatagenError> {
    if ds.is_empty() {
        return Err(DatagenError::EmptyDataset);
    }
    if bins == 0 {
        return Err(DatagenError::InvalidBins(bins));
    }
    let n = ds.len() as f64;
    let outputs = std::array::from_fn(|j| {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for s in &ds.samples {
            let v = s.targets[j];
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        let mean = sum / n;
        let var = ds
            .samples
            .iter()
            .map(|s| (s.targets[j] - mean).powi(2))
            .sum::<f64>()
            / n;

        let width = (max - min) / bins as f64;
        let mut counts = vec![0u64; bins];
        for s in &ds.samples {
            let idx = if width > 0.0 {
                (((s.targets[j] - min) / width).floor() as usize).min(bins - 1)
            } else {
                0
            };
            counts[idx] += 1;
        }
        let mut edges: Vec<f64> = (0..=bins).map(|k| min + k as f64 * width).collect();
        edges[bins] = max;
        OutputStats {
            min,
            max,
            mean,
            stddev: var.sqrt(),
            edges,
            counts,
        }
    });
    Ok(HistogramReport {
        rows: ds.len(),
        outputs,
    })
}

impl fmt::Display for HistogramReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rows: {}", self.rows)?;
        for (j, o) in self.outputs.iter().enumerate() {
            writeln!(
                f,
                "theta{j}: min {:.4}  max {:.4}  mean {:.4}  stddev {:.4}",
                o.min, o.max, o.mean, o.stddev
            )?;
            let peak = o.counts.iter().copied().max().unwrap_or(1).max(1);
            for (k, &c) in o.counts.iter().enumerate() {
                let bar = "#".repeat((c * 40 / peak) as usize);
                writeln!(
                    f,
                    "  [{:>10.4}, {:>10.4}{} {:>8}  {bar}",
                    o.edges[k],
                    o.edges[k + 1],
                    if k + 1 == o.counts.len() { "]" } else { ")" },
                    c
                )?;
            }
        }
        Ok(())
    }
}
