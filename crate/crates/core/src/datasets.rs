//! Seeded synthetic generators and a CSV loader.
//!
//! Every generator draws from a `ChaCha8Rng` seeded with the given seed, so the
//! same seed always yields a bit-identical dataset.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Bernoulli, Distribution, StandardNormal};

use crate::error::{Result, SpinexError};
use crate::preprocess::standardize;
use crate::types::DataMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub name: String,
    pub x: DataMatrix,
    pub truth: Option<Vec<usize>>,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
}

impl LabeledDataset {
    fn new(name: &str, x: DataMatrix, truth: Option<Vec<usize>>, seed: u64) -> Self {
        debug_assert!(truth.as_ref().is_none_or(|t| t.len() == x.n_rows()));
        Self {
            name: name.to_string(),
            x,
            truth,
            seed,
            params: BTreeMap::new(),
        }
    }

    fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn n_rows(&self) -> usize {
        self.x.n_rows()
    }

    pub fn n_cols(&self) -> usize {
        self.x.n_cols()
    }

    /// Number of distinct truth labels, if truth is present.
    pub fn n_classes(&self) -> Option<usize> {
        self.truth.as_ref().map(|t| {
            let mut v = t.clone();
            v.sort_unstable();
            v.dedup();
            v.len()
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Centers {
    Count(usize),
    Explicit(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClusterStd {
    Scalar(f64),
    PerCenter(Vec<f64>),
}

pub const DEFAULT_CENTER_BOX: (f64, f64) = (-10.0, 10.0);

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn matrix(n: usize, d: usize, values: Vec<f64>) -> DataMatrix {
    DataMatrix::new(n, d, values).expect("generated data is finite and well-shaped")
}

/// Shuffles rows and labels together.
fn shuffled(rng: &mut ChaCha8Rng, d: usize, values: Vec<f64>, labels: Vec<usize>) -> (Vec<f64>, Vec<usize>) {
    let n = labels.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut v = Vec::with_capacity(values.len());
    let mut l = Vec::with_capacity(n);
    for &i in &order {
        v.extend_from_slice(&values[i * d..(i + 1) * d]);
        l.push(labels[i]);
    }
    (v, l)
}

/// Sample counts per group, balanced to within one (earlier groups get the extra).
fn balanced_counts(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|c| n / k + usize::from(c < n % k)).collect()
}

fn blobs_with_counts(
    counts: &[usize],
    d: usize,
    centers: Centers,
    std: ClusterStd,
    center_box: (f64, f64),
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<f64>, Vec<usize>)> {
    let k = counts.len();
    let centers = match centers {
        Centers::Count(_) => {
            let (lo, hi) = center_box;
            if !(lo < hi) {
                return Err(SpinexError::InvalidInput(format!("invalid center box ({lo}, {hi})")));
            }
            (0..k)
                .map(|_| (0..d).map(|_| rng.random_range(lo..hi)).collect())
                .collect::<Vec<Vec<f64>>>()
        }
        Centers::Explicit(c) => {
            if c.iter().any(|row| row.len() != d) {
                return Err(SpinexError::InvalidInput("center dimension mismatch".into()));
            }
            c
        }
    };
    let stds = match std {
        ClusterStd::Scalar(s) => vec![s; k],
        ClusterStd::PerCenter(v) => {
            if v.len() != k {
                return Err(SpinexError::InvalidInput(format!(
                    "std list has {} entries for {k} centers",
                    v.len()
                )));
            }
            v
        }
    };
    if stds.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(SpinexError::InvalidInput("cluster std must be non-negative".into()));
    }
    let n: usize = counts.iter().sum();
    let mut values = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for (c, &count) in counts.iter().enumerate() {
        for _ in 0..count {
            for f in 0..d {
                values.push(centers[c][f] + stds[c] * normal(rng));
            }
            labels.push(c);
        }
    }
    Ok(shuffled(rng, d, values, labels))
}

/// Isotropic Gaussian blobs. Truth is the center index.
pub fn make_blobs(
    n: usize,
    d: usize,
    centers: Centers,
    std: ClusterStd,
    center_box: (f64, f64),
    seed: u64,
) -> Result<LabeledDataset> {
    let k = match &centers {
        Centers::Count(k) => *k,
        Centers::Explicit(c) => c.len(),
    };
    if k == 0 || n < k || d == 0 {
        return Err(SpinexError::InvalidInput(format!(
            "make_blobs needs n >= centers >= 1 and d >= 1 (n={n}, centers={k}, d={d})"
        )));
    }
    let mut rng = rng_for(seed);
    let (values, labels) = blobs_with_counts(&balanced_counts(n, k), d, centers, std, center_box, &mut rng)?;
    Ok(LabeledDataset::new("blobs", matrix(n, d, values), Some(labels), seed)
        .with_param("n_samples", n)
        .with_param("n_features", d)
        .with_param("centers", k))
}

/// Two interleaving half circles.
pub fn make_moons(n: usize, noise: f64, seed: u64) -> Result<LabeledDataset> {
    if n < 2 {
        return Err(SpinexError::InvalidInput("make_moons needs n >= 2".into()));
    }
    let mut rng = rng_for(seed);
    let n_out = n / 2;
    let n_in = n - n_out;
    let grid = |m: usize, i: usize| if m > 1 { PI * i as f64 / (m - 1) as f64 } else { 0.0 };
    let mut values = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n_out {
        let t = grid(n_out, i);
        values.extend([t.cos(), t.sin()]);
        labels.push(0);
    }
    for i in 0..n_in {
        let t = grid(n_in, i);
        values.extend([1.0 - t.cos(), 0.5 - t.sin()]);
        labels.push(1);
    }
    for v in values.iter_mut() {
        *v += noise * normal(&mut rng);
    }
    let (values, labels) = shuffled(&mut rng, 2, values, labels);
    Ok(LabeledDataset::new("moons", matrix(n, 2, values), Some(labels), seed)
        .with_param("n_samples", n)
        .with_param("noise", noise))
}

/// A large circle containing a smaller one scaled by `factor`.
pub fn make_circles(n: usize, noise: f64, factor: f64, seed: u64) -> Result<LabeledDataset> {
    if n < 2 || !(0.0..1.0).contains(&factor) {
        return Err(SpinexError::InvalidInput(
            "make_circles needs n >= 2 and 0 <= factor < 1".into(),
        ));
    }
    let (values, labels) = rings(n, &[1.0, factor], noise, 0.0, &mut rng_for(seed));
    let mut rng = rng_for(seed.wrapping_add(1));
    let (values, labels) = shuffled(&mut rng, 2, values, labels);
    Ok(LabeledDataset::new("circles", matrix(n, 2, values), Some(labels), seed)
        .with_param("n_samples", n)
        .with_param("noise", noise)
        .with_param("factor", factor))
}

/// Points on concentric circles of the given radii; `gap` radians of every
/// ring are left empty, starting at a ring-specific angle.
fn rings(n: usize, radii: &[f64], noise: f64, gap: f64, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<usize>) {
    let counts = balanced_counts(n, radii.len());
    let mut values = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(n);
    for (c, (&r, &m)) in radii.iter().zip(&counts).enumerate() {
        let offset = c as f64 * PI / 3.0;
        let span = 2.0 * PI - gap;
        for i in 0..m {
            let t = offset + gap + span * i as f64 / m as f64;
            values.extend([r * t.cos(), r * t.sin()]);
            labels.push(c);
        }
    }
    for v in values.iter_mut() {
        *v += noise * normal(rng);
    }
    (values, labels)
}

fn swiss_roll(n: usize, noise: f64, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    (0..n)
        .map(|_| {
            let t = 1.5 * PI * (1.0 + 2.0 * rng.random::<f64>());
            let h = 21.0 * rng.random::<f64>();
            [
                t * t.cos() + noise * normal(rng),
                h + noise * normal(rng),
                t * t.sin() + noise * normal(rng),
            ]
        })
        .collect()
}

/// Friedman's regression inputs on `[0,1]^5` with the response appended as a
/// sixth feature.
pub fn make_friedman(n: usize, seed: u64) -> LabeledDataset {
    let mut rng = rng_for(seed);
    let mut values = Vec::with_capacity(6 * n);
    for _ in 0..n {
        let u: [f64; 5] = std::array::from_fn(|_| rng.random::<f64>());
        let y = 10.0 * (PI * u[0] * u[1]).sin() + 20.0 * (u[2] - 0.5).powi(2) + 10.0 * u[3] + 5.0 * u[4];
        values.extend_from_slice(&u);
        values.push(y);
    }
    LabeledDataset::new("friedman", matrix(n, 6, values), None, seed).with_param("n_samples", n)
}

/// The 33 synthetic dataset names accepted by [`make_named`].
pub const NAMED_DATASETS: [&str; 33] = [
    "Aggregated Clusters",
    "Anisotropic",
    "Blobs",
    "Broken Rings",
    "Checkerboard",
    "Circles",
    "Concentric Spheres",
    "Disjoint Clusters",
    "Feature Entanglement",
    "Friedman's Function",
    "Gaussian Mixture",
    "Hierarchical Clusters",
    "High Dimensional Blobs",
    "Highly Correlated Features",
    "Interlocking Moons",
    "Manifold Learning Dataset",
    "Moons",
    "Nested Clusters",
    "No structure",
    "Non-spherical Gaussian Mixture",
    "Overlapping Circles",
    "Periodic Patterns",
    "Random Uniform Scatter",
    "Random Walk Clusters",
    "Shifting Variance Clusters",
    "Simple Blobs",
    "Sine Wave Clusters",
    "Sparse High-Dimensional",
    "Spirals",
    "Stretched Blobs",
    "Swiss Roll",
    "Varied Density",
    "Winding Function Clusters",
];

/// Shear applied to consecutive feature pairs of the anisotropic dataset.
pub const ANISOTROPIC_SHEAR: [[f64; 2]; 2] = [[0.6, -0.6], [-0.4, 0.8]];

/// Centers of the well-separated three-cluster dataset.
pub const DISJOINT_CENTERS: [[f64; 2]; 3] = [[-15.0, -15.0], [0.0, 15.0], [15.0, -15.0]];

const DEFAULT_SAMPLES: usize = 300;

fn canonical_name(name: &str) -> Option<&'static str> {
    let key = name.trim().to_ascii_lowercase();
    NAMED_DATASETS
        .iter()
        .copied()
        .find(|n| n.to_ascii_lowercase() == key)
        .or(match key.as_str() {
            "manifold learning" => Some("Manifold Learning Dataset"),
            "friedman" | "friedman's" | "friedman function" => Some("Friedman's Function"),
            "disjoint" => Some("Disjoint Clusters"),
            _ => None,
        })
}

fn blob_row(
    name: &str,
    n: usize,
    d: usize,
    centers: Centers,
    std: ClusterStd,
    center_box: (f64, f64),
    seed: u64,
) -> Result<LabeledDataset> {
    let mut ds = make_blobs(n, d, centers, std, center_box, seed)?;
    ds.name = name.to_string();
    Ok(ds)
}

fn labeled(name: &str, d: usize, values: Vec<f64>, labels: Vec<usize>, seed: u64, rng: &mut ChaCha8Rng) -> LabeledDataset {
    let n = labels.len();
    let (values, labels) = shuffled(rng, d, values, labels);
    LabeledDataset::new(name, matrix(n, d, values), Some(labels), seed)
}

/// Generates one of the [`NAMED_DATASETS`] with its tabulated parameters.
pub fn make_named(name: &str, seed: u64) -> Result<LabeledDataset> {
    let canonical = canonical_name(name).ok_or_else(|| SpinexError::UnknownDataset(name.to_string()))?;
    let mut rng = rng_for(seed);
    let box_ = DEFAULT_CENTER_BOX;
    let ds = match canonical {
        "Aggregated Clusters" => blob_row(canonical, 300, 2, Centers::Count(8), ClusterStd::Scalar(0.3), box_, seed)?,
        "Anisotropic" => {
            let mut ds = blob_row(
                canonical,
                400,
                6,
                Centers::Count(3),
                ClusterStd::PerCenter(vec![0.5, 1.5, 0.5]),
                box_,
                seed,
            )?;
            let mut v = ds.x.values().to_vec();
            for row in v.chunks_mut(6) {
                for pair in row.chunks_mut(2) {
                    let (a, b) = (pair[0], pair[1]);
                    pair[0] = a * ANISOTROPIC_SHEAR[0][0] + b * ANISOTROPIC_SHEAR[1][0];
                    pair[1] = a * ANISOTROPIC_SHEAR[0][1] + b * ANISOTROPIC_SHEAR[1][1];
                }
            }
            ds.x = matrix(400, 6, v);
            ds
        }
        "Blobs" => blob_row(canonical, 100, 4, Centers::Count(4), ClusterStd::Scalar(1.0), box_, seed)?,
        "Broken Rings" => {
            let (v, l) = rings(DEFAULT_SAMPLES, &[1.0, 2.0, 3.0], 0.1, PI / 3.0, &mut rng);
            labeled(canonical, 2, v, l, seed, &mut rng)
        }
        "Checkerboard" => {
            let mut v = Vec::with_capacity(2 * DEFAULT_SAMPLES);
            let mut l = Vec::with_capacity(DEFAULT_SAMPLES);
            for _ in 0..DEFAULT_SAMPLES {
                let (a, b): (f64, f64) = (rng.random_range(0.0..9.0), rng.random_range(0.0..9.0));
                v.extend([a, b]);
                l.push(((a.floor() + b.floor()) as usize) % 2);
            }
            LabeledDataset::new(canonical, matrix(DEFAULT_SAMPLES, 2, v), Some(l), seed)
        }
        "Circles" => named(make_circles(250, 0.05, 0.5, seed)?, canonical),
        "Concentric Spheres" => {
            let (v, l) = rings(DEFAULT_SAMPLES, &[1.0, 0.6, 0.3], 0.02, 0.0, &mut rng);
            labeled(canonical, 2, v, l, seed, &mut rng)
        }
        "Disjoint Clusters" => blob_row(
            canonical,
            300,
            2,
            Centers::Explicit(DISJOINT_CENTERS.iter().map(|c| c.to_vec()).collect()),
            ClusterStd::Scalar(1.0),
            box_,
            seed,
        )?,
        "Feature Entanglement" => {
            let mut v = Vec::with_capacity(2 * DEFAULT_SAMPLES);
            let mut l = Vec::with_capacity(DEFAULT_SAMPLES);
            for _ in 0..DEFAULT_SAMPLES {
                let (a, b): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                v.extend([a, b]);
                l.push(usize::from((a > 0.0) != (b > 0.0)));
            }
            LabeledDataset::new(canonical, matrix(DEFAULT_SAMPLES, 2, v), Some(l), seed)
        }
        "Friedman's Function" => named(make_friedman(1000, seed), canonical),
        "Gaussian Mixture" => blob_row(
            canonical,
            500,
            3,
            Centers::Count(5),
            ClusterStd::PerCenter(vec![0.5, 1.0, 1.5, 2.0, 2.5]),
            box_,
            seed,
        )?,
        "Hierarchical Clusters" => {
            let centers = vec![
                vec![0.0, 0.0, 0.0],
                vec![3.0, 3.0, 3.0],
                vec![15.0, 15.0, 15.0],
                vec![18.0, 18.0, 18.0],
            ];
            let counts = [100, 50, 150, 75];
            let (v, l) = blobs_with_counts(
                &counts,
                3,
                Centers::Explicit(centers),
                ClusterStd::PerCenter(vec![0.5, 1.0, 0.3, 0.8]),
                box_,
                &mut rng,
            )?;
            LabeledDataset::new(canonical, matrix(375, 3, v), Some(l), seed)
        }
        "High Dimensional Blobs" => blob_row(canonical, 300, 10, Centers::Count(5), ClusterStd::Scalar(1.0), box_, seed)?,
        "Highly Correlated Features" => {
            let latent_centers = [-5.0, 0.0, 5.0];
            let counts = balanced_counts(DEFAULT_SAMPLES, 3);
            let mut v = Vec::with_capacity(4 * DEFAULT_SAMPLES);
            let mut l = Vec::with_capacity(DEFAULT_SAMPLES);
            for (c, &m) in counts.iter().enumerate() {
                for _ in 0..m {
                    let z = latent_centers[c] + normal(&mut rng);
                    for _ in 0..4 {
                        v.push(z + 0.1 * normal(&mut rng));
                    }
                    l.push(c);
                }
            }
            labeled(canonical, 4, v, l, seed, &mut rng)
        }
        "Interlocking Moons" => named(make_moons(800, 0.2, seed)?, canonical),
        "Manifold Learning Dataset" => {
            let pts = swiss_roll(DEFAULT_SAMPLES, 0.1, &mut rng);
            let v = pts.iter().flatten().copied().collect();
            LabeledDataset::new(canonical, matrix(DEFAULT_SAMPLES, 3, v), None, seed)
        }
        "Moons" => named(make_moons(200, 0.1, seed)?, canonical),
        "Nested Clusters" => {
            let centers = vec![vec![0.0, 0.0], vec![1.5, 1.5], vec![-1.5, 1.5]];
            let (v, l) = blobs_with_counts(
                &balanced_counts(350, 3),
                2,
                Centers::Explicit(centers),
                ClusterStd::PerCenter(vec![0.5, 0.2, 0.3]),
                box_,
                &mut rng,
            )?;
            LabeledDataset::new(canonical, matrix(350, 2, v), Some(l), seed)
        }
        "No structure" => uniform(canonical, DEFAULT_SAMPLES, 2, 1.0, seed, &mut rng),
        "Non-spherical Gaussian Mixture" => blob_row(
            canonical,
            300,
            2,
            Centers::Count(3),
            ClusterStd::PerCenter(vec![1.0, 2.0, 3.0]),
            box_,
            seed,
        )?,
        "Overlapping Circles" => named(make_circles(500, 0.1, 0.5, seed)?, canonical),
        "Periodic Patterns" => {
            let mut v = Vec::with_capacity(2 * DEFAULT_SAMPLES);
            let mut l = Vec::with_capacity(DEFAULT_SAMPLES);
            for _ in 0..DEFAULT_SAMPLES {
                let a: f64 = rng.random_range(0.0..4.0);
                v.extend([a, a.fract() + 0.05 * normal(&mut rng)]);
                l.push(a.floor() as usize);
            }
            LabeledDataset::new(canonical, matrix(DEFAULT_SAMPLES, 2, v), Some(l), seed)
        }
        "Random Uniform Scatter" => uniform(canonical, 1000, 2, 100.0, seed, &mut rng),
        "Random Walk Clusters" => {
            let n = 1000;
            let mut v = Vec::with_capacity(2 * n);
            let mut pos = [0.0f64; 2];
            for _ in 0..n {
                for p in pos.iter_mut() {
                    *p += normal(&mut rng);
                }
                v.extend(pos);
            }
            LabeledDataset::new(canonical, matrix(n, 2, v), None, seed)
        }
        "Shifting Variance Clusters" => blob_row(
            canonical,
            300,
            2,
            Centers::Count(3),
            ClusterStd::PerCenter(vec![0.5, 1.0, 1.5]),
            box_,
            seed,
        )?,
        "Simple Blobs" => blob_row(canonical, 300, 2, Centers::Count(4), ClusterStd::Scalar(1.0), box_, seed)?,
        "Sine Wave Clusters" => {
            let counts = balanced_counts(200, 4);
            let mut v = Vec::with_capacity(400);
            let mut l = Vec::with_capacity(200);
            for (c, &m) in counts.iter().enumerate() {
                for _ in 0..m {
                    let a: f64 = rng.random_range(0.0..2.0 * PI);
                    v.extend([a, a.sin() + 2.0 * c as f64 + 0.1 * normal(&mut rng)]);
                    l.push(c);
                }
            }
            labeled(canonical, 2, v, l, seed, &mut rng)
        }
        "Sparse High-Dimensional" => {
            let bern = Bernoulli::new(0.05).expect("valid probability");
            let v = (0..200 * 100).map(|_| f64::from(u8::from(bern.sample(&mut rng)))).collect();
            LabeledDataset::new(canonical, matrix(200, 100, v), None, seed)
        }
        "Spirals" => {
            let counts = balanced_counts(DEFAULT_SAMPLES, 4);
            let mut v = Vec::with_capacity(2 * DEFAULT_SAMPLES);
            let mut l = Vec::with_capacity(DEFAULT_SAMPLES);
            for (c, &m) in counts.iter().enumerate() {
                let phase = c as f64 * PI / 2.0;
                for _ in 0..m {
                    let t: f64 = rng.random_range(0.05..1.0);
                    let angle = 2.0 * PI * t + phase;
                    v.extend([
                        t * angle.cos() + 0.02 * normal(&mut rng),
                        t * angle.sin() + 0.02 * normal(&mut rng),
                    ]);
                    l.push(c);
                }
            }
            labeled(canonical, 2, v, l, seed, &mut rng)
        }
        "Stretched Blobs" => blob_row(canonical, 300, 2, Centers::Count(3), ClusterStd::Scalar(0.5), (20.0, 100.0), seed)?,
        "Swiss Roll" => {
            let pts = swiss_roll(300, 0.1, &mut rng);
            let v = pts.iter().flat_map(|p| [p[0], p[2]]).collect();
            LabeledDataset::new(canonical, matrix(300, 2, v), None, seed)
        }
        "Varied Density" => blob_row(
            canonical,
            100,
            12,
            Centers::Count(3),
            ClusterStd::PerCenter(vec![1.0, 2.5, 0.5]),
            box_,
            seed,
        )?,
        "Winding Function Clusters" => {
            let counts = balanced_counts(200, 4);
            let mut v = Vec::with_capacity(400);
            let mut l = Vec::with_capacity(200);
            for (c, &m) in counts.iter().enumerate() {
                for _ in 0..m {
                    let a: f64 = rng.random_range(0.0..4.0 * PI);
                    let y = 1.5 * c as f64 + 0.5 * (2.0 * a + c as f64).sin();
                    v.extend([a, y + 0.05 * normal(&mut rng)]);
                    l.push(c);
                }
            }
            labeled(canonical, 2, v, l, seed, &mut rng)
        }
        _ => unreachable!("every registered name is handled"),
    };
    Ok(ds)
}

fn named(mut ds: LabeledDataset, name: &str) -> LabeledDataset {
    ds.name = name.to_string();
    ds
}

fn uniform(name: &str, n: usize, d: usize, scale: f64, seed: u64, rng: &mut ChaCha8Rng) -> LabeledDataset {
    let v = (0..n * d).map(|_| scale * rng.random::<f64>()).collect();
    LabeledDataset::new(name, matrix(n, d, v), None, seed)
}

/// Reads a headered CSV. Columns whose first value is not numeric are dropped,
/// as is the label column, which becomes truth with labels numbered in order
/// of first appearance.
pub fn load_csv(path: &Path, label_column: Option<&str>, standardize_features: bool) -> Result<LabeledDataset> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let label_idx = match label_column {
        Some(name) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| SpinexError::InvalidInput(format!("unknown label column '{name}'")))?,
        ),
        None => None,
    };
    let records: Vec<csv::StringRecord> = reader.records().collect::<std::result::Result<_, _>>()?;
    if records.is_empty() {
        return Err(SpinexError::InvalidInput(format!("{} has no data rows", path.display())));
    }
    let features: Vec<usize> = (0..headers.len())
        .filter(|&c| Some(c) != label_idx)
        .filter(|&c| records[0].get(c).is_some_and(|v| v.trim().parse::<f64>().is_ok()))
        .collect();
    if features.is_empty() {
        return Err(SpinexError::InvalidInput("no numeric feature columns".into()));
    }
    let mut values = Vec::with_capacity(records.len() * features.len());
    for (r, rec) in records.iter().enumerate() {
        for &c in &features {
            let cell = rec.get(c).unwrap_or("").trim();
            let v: f64 = cell.parse().map_err(|_| {
                SpinexError::InvalidInput(format!("non-numeric value '{cell}' at row {r}, column '{}'", headers[c]))
            })?;
            if !v.is_finite() {
                return Err(SpinexError::InvalidInput(format!(
                    "non-finite value '{cell}' at row {r}, column '{}'",
                    headers[c]
                )));
            }
            values.push(v);
        }
    }
    let truth = label_idx.map(|c| {
        let mut codes: HashMap<String, usize> = HashMap::new();
        records
            .iter()
            .map(|rec| {
                let key = rec.get(c).unwrap_or("").trim().to_string();
                let next = codes.len();
                *codes.entry(key).or_insert(next)
            })
            .collect()
    });
    let mut x = DataMatrix::new(records.len(), features.len(), values)?;
    if standardize_features {
        x = standardize(&x);
    }
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(LabeledDataset::new(&name, x, truth, 0).with_param("path", path.display()))
}

/// Writes features as `f0..f{d-1}` plus a `label` column when truth is present.
pub fn write_csv(ds: &LabeledDataset, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (0..ds.n_cols()).map(|f| format!("f{f}")).collect();
    if ds.truth.is_some() {
        header.push("label".into());
    }
    w.write_record(&header)?;
    for i in 0..ds.n_rows() {
        let mut row: Vec<String> = ds.x.row(i).iter().map(|v| v.to_string()).collect();
        if let Some(t) = &ds.truth {
            row.push(t[i].to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
