//! Tri-mer baseline featurization, external-embedding ingestion with mean
//! pooling, feature fusion, l2-regularised multinomial logistic regression,
//! and weighted evaluation metrics.
//!
//! Training is deterministic full-batch gradient descent with Armijo
//! backtracking line search; no stochastic minibatching, so identical inputs
//! give bit-identical models.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{zscore_apply, zscore_fit, NormStats};

/// Tri-mer vocabulary built from the training corpus only; lexicographically
/// ordered so the column layout is stable across runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    tokens: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn from_tokens(mut tokens: Vec<String>) -> Self {
        tokens.sort();
        tokens.dedup();
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Vocabulary { tokens, index }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Rebuild the lookup map after deserialization.
    pub fn rebuild_index(&mut self) {
        self.index = self
            .tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
    }
}

const TRIMER: usize = 3;

fn trimers(seq: &str) -> impl Iterator<Item = &str> {
    seq.as_bytes()
        .windows(TRIMER)
        .map(|w| std::str::from_utf8(w).unwrap())
}

/// Raw overlapping tri-mer counts. When `vocab` is `None` the vocabulary is
/// built from the given sequences (train time); otherwise it is used
/// unchanged and out-of-vocabulary tri-mers are dropped (test time).
/// Sequences shorter than 3 symbols yield a zero row.
pub fn trimer_features(
    sequences: &[(String, String)],
    vocab: Option<&Vocabulary>,
) -> (Array2<f64>, Vocabulary) {
    let vocab = match vocab {
        Some(v) => v.clone(),
        None => {
            let mut seen = BTreeSet::new();
            for (_, seq) in sequences {
                for t in trimers(seq) {
                    if !seen.contains(t) {
                        seen.insert(t.to_string());
                    }
                }
            }
            Vocabulary::from_tokens(seen.into_iter().collect())
        }
    };
    let mut matrix = Array2::zeros((sequences.len(), vocab.len()));
    for (row, (id, seq)) in sequences.iter().enumerate() {
        if seq.len() < TRIMER {
            eprintln!("warning: record {id} is shorter than 3 symbols; zero feature row");
            continue;
        }
        for t in trimers(seq) {
            if let Some(col) = vocab.index_of(t) {
                matrix[[row, col]] += 1.0;
            }
        }
    }
    (matrix, vocab)
}

/// Arithmetic mean over per-residue embedding rows.
pub fn mean_pool(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::EmptyEmbedding { id: String::new() });
    }
    let dim = rows[0].len();
    let mut out = vec![0.0; dim];
    for row in rows {
        for (acc, v) in out.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for v in &mut out {
        *v /= n as f64;
    }
    Ok(out)
}

/// Pooled embedding vectors keyed by record id.
#[derive(Clone, Debug)]
pub struct EmbeddingTable {
    pub dim: usize,
    pub rows: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    /// Read an embedding CSV. Two layouts are accepted, detected from the
    /// header: pooled `id,e1,..,ed` (one row per id) and per-residue
    /// `id,t,e1,..,ed` (mean pooling applied per id).
    pub fn read_csv(path: &Path) -> Result<Self> {
        let reader = BufReader::new(File::open(path)?);
        let mut lines = reader.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((lineno, line)) => {
                    let line = line?;
                    if line.starts_with('#') || line.is_empty() {
                        continue;
                    }
                    break (lineno + 1, line);
                }
                None => {
                    return Err(Error::Parse {
                        line: 0,
                        message: "empty embedding file".into(),
                    })
                }
            }
        };
        let cols: Vec<&str> = header.1.split(',').collect();
        let per_residue = cols.get(1) == Some(&"t");
        let skip = if per_residue { 2 } else { 1 };
        let dim = cols.len() - skip;
        if dim == 0 {
            return Err(Error::Parse {
                line: header.0,
                message: "embedding header has no value columns".into(),
            });
        }
        let mut grouped: BTreeMap<String, Vec<Vec<f64>>> = BTreeMap::new();
        for (lineno, line) in lines {
            let line = line?;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols.len() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected {} fields, got {}", cols.len(), fields.len()),
                });
            }
            let values: Vec<f64> = fields[skip..]
                .iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|_| Error::Parse {
                        line: lineno + 1,
                        message: format!("not a number: {f:?}"),
                    })
                })
                .collect::<Result<_>>()?;
            grouped.entry(fields[0].to_string()).or_default().push(values);
        }
        let mut rows = HashMap::with_capacity(grouped.len());
        for (id, group) in grouped {
            let pooled = mean_pool(&group).map_err(|_| Error::EmptyEmbedding { id: id.clone() })?;
            rows.insert(id, pooled);
        }
        Ok(EmbeddingTable { dim, rows })
    }

    /// Rows for the given ids, in order; errors on the first missing id.
    pub fn matrix_for(&self, ids: &[String]) -> Result<Array2<f64>> {
        let mut matrix = Array2::zeros((ids.len(), self.dim));
        for (row, id) in ids.iter().enumerate() {
            let values = self
                .rows
                .get(id)
                .ok_or_else(|| Error::Alignment { id: id.clone() })?;
            for (col, v) in values.iter().enumerate() {
                matrix[[row, col]] = *v;
            }
        }
        Ok(matrix)
    }
}

/// A feature matrix plus the record ids and labels of its rows.
#[derive(Clone, Debug)]
pub struct FeatureBlock {
    pub ids: Vec<String>,
    pub labels: Vec<String>,
    pub columns: Vec<String>,
    pub matrix: Array2<f64>,
}

/// Horizontal concatenation of blocks sharing row order by record id.
pub fn fuse(blocks: &[FeatureBlock]) -> Result<FeatureBlock> {
    let first = blocks
        .first()
        .ok_or_else(|| Error::InvalidArgument("fuse requires at least one block".into()))?;
    for block in &blocks[1..] {
        if block.ids.len() != first.ids.len() {
            return Err(Error::Alignment {
                id: block
                    .ids
                    .first()
                    .cloned()
                    .unwrap_or_else(|| "<empty>".into()),
            });
        }
        if let Some(pos) = (0..first.ids.len()).find(|&i| block.ids[i] != first.ids[i]) {
            return Err(Error::Alignment {
                id: block.ids[pos].clone(),
            });
        }
    }
    let width: usize = blocks.iter().map(|b| b.matrix.ncols()).sum();
    let mut matrix = Array2::zeros((first.ids.len(), width));
    let mut columns = Vec::with_capacity(width);
    let mut offset = 0;
    for block in blocks {
        let w = block.matrix.ncols();
        matrix
            .slice_mut(ndarray::s![.., offset..offset + w])
            .assign(&block.matrix);
        columns.extend(block.columns.iter().cloned());
        offset += w;
    }
    Ok(FeatureBlock {
        ids: first.ids.clone(),
        labels: first.labels.clone(),
        columns,
        matrix,
    })
}

/// Trained multinomial logistic regression with its normalization statistics.
#[derive(Clone, Debug)]
pub struct LogRegModel {
    pub classes: Vec<String>,
    pub weights: Array2<f64>, // C x D
    pub bias: Array1<f64>,    // C
    pub norm_stats: NormStats,
    pub lambda: f64,
    pub final_loss: f64,
    pub iterations: usize,
}

pub struct TrainOptions {
    pub lambda: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            lambda: 1.0,
            max_iter: 500,
            tol: 1e-6,
        }
    }
}

fn softmax_rows(logits: &mut Array2<f64>) {
    for mut row in logits.rows_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
}

fn logits(x: &Array2<f64>, w: &Array2<f64>, b: &Array1<f64>) -> Array2<f64> {
    let mut z = x.dot(&w.t());
    z += b;
    z
}

/// Loss together with the softmax probabilities it was computed from, so the
/// training loop can reuse them for the next gradient.
fn loss_with_probs(
    x: &Array2<f64>,
    y: &[usize],
    w: &Array2<f64>,
    b: &Array1<f64>,
    lambda: f64,
) -> (f64, Array2<f64>) {
    let n = x.nrows() as f64;
    let mut z = logits(x, w, b);
    softmax_rows(&mut z);
    let mut total = 0.0;
    for (row, &cls) in y.iter().enumerate() {
        total -= z[[row, cls]].max(1e-300).ln();
    }
    let value = total / n + lambda / (2.0 * n) * w.iter().map(|v| v * v).sum::<f64>();
    (value, z)
}

/// Mean cross-entropy plus (lambda / 2N) ||W||^2; bias unregularised.
pub fn loss(
    x: &Array2<f64>,
    y: &[usize],
    w: &Array2<f64>,
    b: &Array1<f64>,
    lambda: f64,
) -> f64 {
    loss_with_probs(x, y, w, b, lambda).0
}

/// Gradient from precomputed softmax probabilities; consumes them in place.
fn gradient_from_probs(
    x: &Array2<f64>,
    y: &[usize],
    w: &Array2<f64>,
    lambda: f64,
    mut p: Array2<f64>,
) -> (Array2<f64>, Array1<f64>) {
    let n = x.nrows() as f64;
    for (row, &cls) in y.iter().enumerate() {
        p[[row, cls]] -= 1.0;
    }
    let grad_w = p.t().dot(x) / n + &(w * (lambda / n));
    let grad_b = p.sum_axis(Axis(0)) / n;
    (grad_w, grad_b)
}

/// Analytic gradient of [`loss`] with respect to weights and bias.
pub fn gradient(
    x: &Array2<f64>,
    y: &[usize],
    w: &Array2<f64>,
    b: &Array1<f64>,
    lambda: f64,
) -> (Array2<f64>, Array1<f64>) {
    let mut p = logits(x, w, b);
    softmax_rows(&mut p);
    gradient_from_probs(x, y, w, lambda, p)
}

/// Full-batch gradient descent with Armijo backtracking line search, from a
/// zero start. `x` must already be z-scored; `y` holds class indices into
/// `classes`.
pub fn train_logreg(
    x: &Array2<f64>,
    y: &[usize],
    classes: Vec<String>,
    norm_stats: NormStats,
    options: &TrainOptions,
) -> Result<LogRegModel> {
    let n_classes = classes.len();
    let distinct: BTreeSet<usize> = y.iter().copied().collect();
    if n_classes < 2 || distinct.len() < 2 {
        return Err(Error::DegenerateLabels);
    }
    let dim = x.ncols();
    let mut w = Array2::zeros((n_classes, dim));
    let mut b = Array1::zeros(n_classes);
    let (mut current, mut probs) = loss_with_probs(x, y, &w, &b, options.lambda);
    let mut step = 1.0f64;
    let mut prev: Option<(Array2<f64>, Array1<f64>, Array2<f64>, Array1<f64>)> = None;
    let mut iterations = 0;
    for iter in 0..options.max_iter {
        if !current.is_finite() {
            return Err(Error::Divergence);
        }
        // the probabilities at (w, b) are left over from the accepted line
        // search step, so the gradient needs no fresh forward pass
        let (gw, gb) = gradient_from_probs(
            x,
            y,
            &w,
            options.lambda,
            std::mem::replace(&mut probs, Array2::zeros((0, 0))),
        );
        let grad_sq = gw.iter().map(|v| v * v).sum::<f64>() + gb.iter().map(|v| v * v).sum::<f64>();
        if grad_sq.sqrt() < options.tol {
            break;
        }
        // Barzilai-Borwein trial step (s.s / s.y over the last accepted
        // move); falls back to doubling the previous step when curvature
        // information is absent or useless. Backtracking below keeps it safe.
        step = match &prev {
            Some((pw, pb, pgw, pgb)) => {
                let mut ss = 0.0;
                let mut sy = 0.0;
                for (wi, (pwi, (gi, pgi))) in
                    w.iter().zip(pw.iter().zip(gw.iter().zip(pgw.iter())))
                {
                    let s = wi - pwi;
                    ss += s * s;
                    sy += s * (gi - pgi);
                }
                for (bi, (pbi, (gi, pgi))) in
                    b.iter().zip(pb.iter().zip(gb.iter().zip(pgb.iter())))
                {
                    let s = bi - pbi;
                    ss += s * s;
                    sy += s * (gi - pgi);
                }
                if sy > 0.0 && ss > 0.0 {
                    (ss / sy).clamp(1e-10, 1e6)
                } else {
                    (step * 2.0).min(1e6)
                }
            }
            None => (step * 2.0).min(1e6),
        };
        // Armijo backtracking along the negative gradient
        let mut accepted = false;
        for _ in 0..60 {
            let w_try = &w - &(&gw * step);
            let b_try = &b - &(&gb * step);
            let (f_try, p_try) = loss_with_probs(x, y, &w_try, &b_try, options.lambda);
            if f_try <= current - 1e-4 * step * grad_sq {
                prev = Some((
                    std::mem::replace(&mut w, w_try),
                    std::mem::replace(&mut b, b_try),
                    gw,
                    gb,
                ));
                current = f_try;
                probs = p_try;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        iterations = iter + 1;
        if !accepted {
            break; // step underflow: no further progress possible
        }
    }
    if !current.is_finite() {
        return Err(Error::Divergence);
    }
    Ok(LogRegModel {
        classes,
        weights: w,
        bias: b,
        norm_stats,
        lambda: options.lambda,
        final_loss: current,
        iterations,
    })
}

/// Fit z-scoring on the block's rows, then train on the normalized matrix.
pub fn train_pipeline(block: &FeatureBlock, options: &TrainOptions) -> Result<LogRegModel> {
    let classes: Vec<String> = {
        let set: BTreeSet<&String> = block.labels.iter().collect();
        set.into_iter().cloned().collect()
    };
    let y: Vec<usize> = block
        .labels
        .iter()
        .map(|l| classes.iter().position(|c| c == l).unwrap())
        .collect();
    let stats = zscore_fit(&block.matrix);
    let z = zscore_apply(&block.matrix, &stats)?;
    train_logreg(&z, &y, classes, stats, options)
}

impl LogRegModel {
    /// Class probabilities for raw (unnormalized) feature rows; the stored
    /// train-set statistics are applied first.
    pub fn predict_proba(&self, x_raw: &Array2<f64>) -> Result<Array2<f64>> {
        let z = zscore_apply(x_raw, &self.norm_stats)?;
        let mut p = logits(&z, &self.weights, &self.bias);
        softmax_rows(&mut p);
        Ok(p)
    }

    /// Argmax class index per row (ties resolve to the lowest index).
    pub fn predict(&self, x_raw: &Array2<f64>) -> Result<Vec<usize>> {
        let p = self.predict_proba(x_raw)?;
        Ok(p
            .rows()
            .into_iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |best, (i, &v)| {
                        if v > best.1 {
                            (i, v)
                        } else {
                            best
                        }
                    })
                    .0
            })
            .collect())
    }
}

/// Support-weighted evaluation metrics with the full confusion matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    pub classes: Vec<String>,
    /// confusion[i][j] = count of true class i predicted as class j.
    pub confusion: Vec<Vec<usize>>,
}

/// Compute metrics from true and predicted class indices. Precision of a
/// never-predicted class counts as 0.
pub fn metrics_from_predictions(
    y_true: &[usize],
    y_pred: &[usize],
    classes: &[String],
) -> Metrics {
    let c = classes.len();
    let mut confusion = vec![vec![0usize; c]; c];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        confusion[t][p] += 1;
    }
    let total: usize = y_true.len();
    let correct: usize = (0..c).map(|i| confusion[i][i]).sum();
    let mut wp = 0.0;
    let mut wr = 0.0;
    let mut wf = 0.0;
    for i in 0..c {
        let support: usize = confusion[i].iter().sum();
        let predicted: usize = (0..c).map(|r| confusion[r][i]).sum();
        let tp = confusion[i][i];
        let precision = if predicted > 0 {
            tp as f64 / predicted as f64
        } else {
            0.0
        };
        let recall = if support > 0 {
            tp as f64 / support as f64
        } else {
            0.0
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        let weight = support as f64 / total as f64;
        wp += weight * precision;
        wr += weight * recall;
        wf += weight * f1;
    }
    Metrics {
        accuracy: correct as f64 / total as f64,
        weighted_precision: wp,
        weighted_recall: wr,
        weighted_f1: wf,
        classes: classes.to_vec(),
        confusion,
    }
}

/// Evaluate a model on raw test features and string labels.
pub fn evaluate(model: &LogRegModel, x_raw: &Array2<f64>, labels: &[String]) -> Result<Metrics> {
    let y_true: Vec<usize> = labels
        .iter()
        .map(|l| {
            model
                .classes
                .iter()
                .position(|c| c == l)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown class {l:?}")))
        })
        .collect::<Result<_>>()?;
    let y_pred = model.predict(x_raw)?;
    Ok(metrics_from_predictions(&y_true, &y_pred, &model.classes))
}

/// Serialized model layout: weights row-major, shape recorded explicitly.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: String,
    pub classes: Vec<String>,
    pub lambda: f64,
    pub norm_stats: NormStats,
    pub rows: usize,
    pub cols: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub final_loss: f64,
    pub iterations: usize,
    pub config: BTreeMap<String, String>,
}

impl ModelFile {
    pub fn from_model(model: &LogRegModel, config: BTreeMap<String, String>) -> Self {
        ModelFile {
            format_version: crate::FORMAT_VERSION.to_string(),
            classes: model.classes.clone(),
            lambda: model.lambda,
            norm_stats: model.norm_stats.clone(),
            rows: model.weights.nrows(),
            cols: model.weights.ncols(),
            weights: model.weights.iter().copied().collect(),
            bias: model.bias.to_vec(),
            final_loss: model.final_loss,
            iterations: model.iterations,
            config,
        }
    }

    pub fn into_model(self) -> Result<LogRegModel> {
        let weights = Array2::from_shape_vec((self.rows, self.cols), self.weights)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(LogRegModel {
            classes: self.classes,
            weights,
            bias: Array1::from_vec(self.bias),
            norm_stats: self.norm_stats,
            lambda: self.lambda,
            final_loss: self.final_loss,
            iterations: self.iterations,
        })
    }
}
