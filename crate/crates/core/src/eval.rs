//! Edge recovery metrics over all node pairs.

use serde::{Deserialize, Serialize};

use crate::error::{MuglError, Result};

/// Default relative threshold for turning learned weights into edges.
pub const DEFAULT_THRESHOLD: f64 = 0.01;

/// Predicts pair `k` as an edge iff `w_k > threshold * max(w)`.
pub fn binarize(w: &[f64], rel_threshold: f64) -> Vec<bool> {
    let max = w.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return vec![false; w.len()];
    }
    let cut = rel_threshold * max;
    w.iter().map(|&x| x > cut).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EdgeConfusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl EdgeConfusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

pub fn confusion(pred: &[bool], truth: &[bool]) -> Result<EdgeConfusion> {
    if pred.len() != truth.len() {
        return Err(MuglError::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    let mut c = EdgeConfusion::default();
    for (&p, &t) in pred.iter().zip(truth) {
        match (p, t) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// Precision, recall and F-measure. A `0/0` ratio is reported as zero and
/// flagged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub degenerate: bool,
}

pub fn prf(c: &EdgeConfusion) -> Prf {
    let mut degenerate = false;
    let mut ratio = |num: usize, den: usize| {
        if den == 0 {
            degenerate = true;
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(c.tp, c.tp + c.fp);
    let recall = ratio(c.tp, c.tp + c.fn_);
    let f_measure = ratio(2 * c.tp, 2 * c.tp + c.fn_ + c.fp);
    Prf {
        precision,
        recall,
        f_measure,
        degenerate,
    }
}

/// Normalized mutual information `2 I / (H(truth) + H(pred))` between the
/// binary edge indicators, natural logarithms. When either labeling has zero
/// entropy the score is 1 for identical labelings and 0 otherwise.
pub fn nmi(pred: &[bool], truth: &[bool]) -> Result<f64> {
    let c = confusion(pred, truth)?;
    let n = c.total() as f64;
    if n == 0.0 {
        return Ok(1.0);
    }
    let entropy = |counts: [usize; 2]| -> f64 {
        counts
            .iter()
            .filter(|&&k| k > 0)
            .map(|&k| {
                let p = k as f64 / n;
                -p * p.ln()
            })
            .sum()
    };
    let h_pred = entropy([c.tp + c.fp, c.fn_ + c.tn]);
    let h_truth = entropy([c.tp + c.fn_, c.fp + c.tn]);
    if h_pred == 0.0 || h_truth == 0.0 {
        return Ok(if pred == truth { 1.0 } else { 0.0 });
    }
    // joint cells with their marginals (pred, truth)
    let cells = [
        (c.tp, c.tp + c.fp, c.tp + c.fn_),
        (c.fp, c.tp + c.fp, c.fp + c.tn),
        (c.fn_, c.fn_ + c.tn, c.tp + c.fn_),
        (c.tn, c.fn_ + c.tn, c.fp + c.tn),
    ];
    let mi: f64 = cells
        .iter()
        .filter(|(k, _, _)| *k > 0)
        .map(|&(k, p, t)| {
            let pk = k as f64 / n;
            pk * (k as f64 * n / (p as f64 * t as f64)).ln()
        })
        .sum();
    Ok((2.0 * mi / (h_pred + h_truth)).clamp(0.0, 1.0))
}

/// Flat metrics record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub nmi: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub threshold: f64,
    pub degenerate: bool,
}

/// Binarizes `w` and scores it against `truth`.
pub fn score(w: &[f64], truth: &[bool], threshold: f64) -> Result<EdgeMetrics> {
    let pred = binarize(w, threshold);
    score_edges(&pred, truth, threshold)
}

pub fn score_edges(pred: &[bool], truth: &[bool], threshold: f64) -> Result<EdgeMetrics> {
    let c = confusion(pred, truth)?;
    let p = prf(&c);
    Ok(EdgeMetrics {
        precision: p.precision,
        recall: p.recall,
        f_measure: p.f_measure,
        nmi: nmi(pred, truth)?,
        tp: c.tp,
        fp: c.fp,
        fn_: c.fn_,
        tn: c.tn,
        threshold,
        degenerate: p.degenerate,
    })
}
