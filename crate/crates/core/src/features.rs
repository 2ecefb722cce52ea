//! Per-scale trajectory descriptors, the concatenated 24-dimensional feature
//! vector, and z-score normalization.
//!
//! Trajectory statistics are taken over the visited points p_1..p_{n_k}
//! (origin excluded) with population variance, so a one-step trajectory has
//! variance zero rather than a division by zero. Trajectories stay exact;
//! descriptors are double precision.

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, BaseAlphabet, CornerTable, DEFAULT_ALPHABET_LIMIT};
use crate::cgr::{encode_scale_with, ScalarCorners, Trajectory};
use crate::error::{Error, Result};
use crate::scalar::CgrScalar;

/// The four k-mer scales of the multi-scale descriptor.
pub const CGR_SCALES: [usize; 4] = [1, 2, 3, 4];
/// Width of the concatenated descriptor: 6 statistics x 4 scales.
pub const CGR_FEATURE_DIM: usize = 24;
/// Columns with standard deviation below this are mapped to all-zeros
/// instead of producing infinities.
pub const ZSCORE_STD_FLOOR: f64 = 1e-12;

/// Six summary statistics of one scale's trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleDescriptor {
    pub final_x: f64,
    pub final_y: f64,
    pub n_k: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub mean_dist: f64,
}

impl ScaleDescriptor {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.final_x,
            self.final_y,
            self.n_k,
            self.var_x,
            self.var_y,
            self.mean_dist,
        ]
    }
}

/// Extract the per-scale descriptor from a trajectory in any scalar type.
pub fn scale_descriptor<S: CgrScalar>(trajectory: &Trajectory<S>) -> Result<ScaleDescriptor> {
    let n_k = trajectory.step_count();
    if n_k == 0 {
        return Err(Error::EmptyTrajectory);
    }
    let visited = &trajectory.points()[1..];
    let inv = 1.0 / n_k as f64;
    let (mut sx, mut sy, mut sxx, mut syy, mut sd) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in visited {
        let (x, y) = p.to_f64();
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sd += (x * x + y * y).sqrt();
    }
    let (mx, my) = (sx * inv, sy * inv);
    let (fx, fy) = trajectory.last_point().to_f64();
    Ok(ScaleDescriptor {
        final_x: fx,
        final_y: fy,
        n_k: n_k as f64,
        var_x: (sxx * inv - mx * mx).max(0.0),
        var_y: (syy * inv - my * my).max(0.0),
        mean_dist: sd * inv,
    })
}

/// The 24-dimensional concatenated descriptor, scale-1 block first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CgrFeatureVector(pub [f64; CGR_FEATURE_DIM]);

impl CgrFeatureVector {
    fn from_descriptors(blocks: [ScaleDescriptor; 4]) -> Self {
        let mut values = [0.0; CGR_FEATURE_DIM];
        for (i, d) in blocks.iter().enumerate() {
            values[6 * i..6 * (i + 1)].copy_from_slice(&d.as_array());
        }
        CgrFeatureVector(values)
    }
}

/// Column names of the feature CSV, in fixed order.
pub fn cgr_feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(CGR_FEATURE_DIM);
    for k in CGR_SCALES {
        for stat in ["fx", "fy", "n", "vx", "vy", "d"] {
            names.push(format!("k{k}_{stat}"));
        }
    }
    names
}

/// Reusable featurizer holding pre-built corner tables per (base, scale).
/// The scalar type decides the path: `Rational` is exact, `f64` is the fast
/// path (feature extraction only, never decoding).
pub struct CgrFeaturizer<S> {
    alphabet_limit: usize,
    corners: Vec<(BaseAlphabet, usize, ScalarCorners<S>)>,
}

impl<S: CgrScalar> CgrFeaturizer<S> {
    /// `allow_large_alphabet` lifts the default token cap; required for
    /// protein sequences at scale 4 (M = 160,000).
    pub fn new(allow_large_alphabet: bool) -> Self {
        CgrFeaturizer {
            alphabet_limit: if allow_large_alphabet {
                usize::MAX
            } else {
                DEFAULT_ALPHABET_LIMIT
            },
            corners: Vec::new(),
        }
    }

    fn corners_for(&mut self, base: BaseAlphabet, k: usize) -> Result<&ScalarCorners<S>> {
        if let Some(i) = self
            .corners
            .iter()
            .position(|(b, kk, _)| *b == base && *kk == k)
        {
            return Ok(&self.corners[i].2);
        }
        let table = CornerTable::build(Alphabet::with_limit(base, k, self.alphabet_limit)?)?;
        self.corners
            .push((base, k, ScalarCorners::from_table(&table)));
        Ok(&self.corners.last().unwrap().2)
    }

    /// Compute the 24-dimensional descriptor of a sequence.
    pub fn features(&mut self, seq: &str, base: BaseAlphabet) -> Result<CgrFeatureVector> {
        if seq.len() < *CGR_SCALES.iter().max().unwrap() {
            return Err(Error::SequenceTooShort {
                length: seq.len(),
                scale: *CGR_SCALES.iter().max().unwrap(),
            });
        }
        let mut blocks = [ScaleDescriptor {
            final_x: 0.0,
            final_y: 0.0,
            n_k: 0.0,
            var_x: 0.0,
            var_y: 0.0,
            mean_dist: 0.0,
        }; 4];
        for (i, k) in CGR_SCALES.into_iter().enumerate() {
            let corners = self.corners_for(base, k)?;
            let trajectory = encode_scale_with(seq, corners)?;
            blocks[i] = scale_descriptor(&trajectory)?;
        }
        Ok(CgrFeatureVector::from_descriptors(blocks))
    }
}

/// Exact-path convenience wrapper (builds corner tables per call).
pub fn cgr_feature_vector(
    seq: &str,
    base: BaseAlphabet,
    allow_large_alphabet: bool,
) -> Result<CgrFeatureVector> {
    CgrFeaturizer::<crate::rational::Rational>::new(allow_large_alphabet).features(seq, base)
}

/// Fast-path convenience wrapper.
pub fn cgr_feature_vector_fast(
    seq: &str,
    base: BaseAlphabet,
    allow_large_alphabet: bool,
) -> Result<CgrFeatureVector> {
    CgrFeaturizer::<f64>::new(allow_large_alphabet).features(seq, base)
}

/// Per-column mean and population standard deviation, fit on training rows
/// only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn zscore_fit(x: &Array2<f64>) -> NormStats {
    let n = x.nrows().max(1) as f64;
    let mean: Array1<f64> = x.sum_axis(Axis(0)) / n;
    let mut std = vec![0.0; x.ncols()];
    for (j, col) in x.columns().into_iter().enumerate() {
        let m = mean[j];
        let var = col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n;
        std[j] = var.sqrt();
    }
    NormStats {
        mean: mean.to_vec(),
        std,
    }
}

/// Transform each column to (x - mean) / std with the supplied train-set
/// statistics; near-constant columns map to all-zeros.
pub fn zscore_apply(x: &Array2<f64>, stats: &NormStats) -> Result<Array2<f64>> {
    if x.ncols() != stats.mean.len() {
        return Err(Error::DimensionMismatch {
            expected: stats.mean.len(),
            got: x.ncols(),
        });
    }
    let mut out = x.clone();
    for (j, mut col) in out.columns_mut().into_iter().enumerate() {
        if stats.std[j] < ZSCORE_STD_FLOOR {
            col.fill(0.0);
        } else {
            col.mapv_inplace(|v| (v - stats.mean[j]) / stats.std[j]);
        }
    }
    Ok(out)
}
