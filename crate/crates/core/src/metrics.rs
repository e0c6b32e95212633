//! Goal-oriented evaluation: signal metrics (PSNR, MSE, empirical SNR),
//! classification metrics (accuracy, macro-F1, recall, confusion matrix),
//! and localization metrics (IoU, MPA).

use crate::error::{Error, Result};
use crate::tensor::{Dtype, FeatureTensor};

/// k x k confusion counts; rows are true classes, columns predictions.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ConfusionMatrix {
    pub k: usize,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(k: usize) -> Self {
        ConfusionMatrix {
            k,
            counts: vec![0; k * k],
        }
    }

    pub fn count(&self, true_class: usize, predicted: usize) -> u64 {
        self.counts[true_class * self.k + predicted]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Per-class truth counts (row sums).
    pub fn row_sums(&self) -> Vec<u64> {
        (0..self.k)
            .map(|r| self.counts[r * self.k..(r + 1) * self.k].iter().sum())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationMetrics {
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub f1_macro: f64,
    pub recall_macro: f64,
    pub precision_macro: f64,
}

/// Confusion matrix plus accuracy and macro-averaged precision/recall/F1.
///
/// Per-class ratios use the 0/0 -> 0 convention; macro averages divide by
/// the declared class count k, so classes absent from both truth and
/// predictions contribute zero to the sum while k stays the denominator.
pub fn classification_metrics(
    true_labels: &[usize],
    predicted_labels: &[usize],
    k: usize,
) -> Result<ClassificationMetrics> {
    if true_labels.is_empty() || true_labels.len() != predicted_labels.len() {
        return Err(Error::EmptyInput);
    }
    let mut confusion = ConfusionMatrix::new(k);
    for (&t, &p) in true_labels.iter().zip(predicted_labels) {
        if t >= k {
            return Err(Error::MetricLabelOutOfRange { label: t, k });
        }
        if p >= k {
            return Err(Error::MetricLabelOutOfRange { label: p, k });
        }
        confusion.counts[t * k + p] += 1;
    }
    let total = confusion.total() as f64;
    let correct: u64 = (0..k).map(|c| confusion.count(c, c)).sum();
    let accuracy = correct as f64 / total;

    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let mut f1_sum = 0.0;
    let mut recall_sum = 0.0;
    let mut precision_sum = 0.0;
    for c in 0..k {
        let tp = confusion.count(c, c) as f64;
        let truth: f64 = (0..k).map(|p| confusion.count(c, p) as f64).sum();
        let predicted: f64 = (0..k).map(|t| confusion.count(t, c) as f64).sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, truth);
        precision_sum += precision;
        recall_sum += recall;
        f1_sum += ratio(2.0 * precision * recall, precision + recall);
    }
    Ok(ClassificationMetrics {
        confusion,
        accuracy,
        f1_macro: f1_sum / k as f64,
        recall_macro: recall_sum / k as f64,
        precision_macro: precision_sum / k as f64,
    })
}

/// Mean squared error between equally shaped tensors.
pub fn mse(reference: &FeatureTensor, test: &FeatureTensor) -> Result<f64> {
    check_shapes(reference, test)?;
    let a = reference.to_f64_vec();
    let b = test.to_f64_vec();
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.len() as f64)
}

/// Peak signal-to-noise ratio: 10 log10(max^2 / MSE), with +inf as the
/// zero-error sentinel.
///
/// When `max_value` is omitted it defaults to 255 for u8 rasters and to the
/// observed reference maximum for float tensors.
pub fn psnr(
    reference: &FeatureTensor,
    test: &FeatureTensor,
    max_value: Option<f64>,
) -> Result<f64> {
    check_shapes(reference, test)?;
    let max_value = match max_value {
        Some(v) => v,
        None => match reference.dtype() {
            Dtype::U8 => 255.0,
            _ => reference.to_f64_vec().iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        },
    };
    if !(max_value > 0.0) {
        return Err(Error::InvalidMaxValue(max_value));
    }
    let err = mse(reference, test)?;
    if err == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (max_value * max_value / err).log10())
}

/// Measured SNR of a noisy tensor against its clean reference:
/// 10 log10(P_clean / P_noise), +inf when the tensors are identical.
pub fn empirical_snr(clean: &FeatureTensor, noisy: &FeatureTensor) -> Result<f64> {
    check_shapes(clean, noisy)?;
    let a = clean.to_f64_vec();
    let b = noisy.to_f64_vec();
    let p_clean = a.iter().map(|x| x * x).sum::<f64>() / a.len() as f64;
    if p_clean <= 0.0 {
        return Err(Error::ZeroPower);
    }
    let p_noise = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (y - x) * (y - x))
        .sum::<f64>()
        / a.len() as f64;
    if p_noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (p_clean / p_noise).log10())
}

/// Intersection over union of binary rasters (nonzero = set). Two empty
/// masks agree there is nothing: IoU = 1.
pub fn iou(mask_a: &FeatureTensor, mask_b: &FeatureTensor) -> Result<f64> {
    check_shapes(mask_a, mask_b)?;
    let a = mask_a.to_f64_vec();
    let b = mask_b.to_f64_vec();
    let mut intersection = 0u64;
    let mut union = 0u64;
    for (x, y) in a.iter().zip(&b) {
        let (sa, sb) = (*x != 0.0, *y != 0.0);
        intersection += u64::from(sa && sb);
        union += u64::from(sa || sb);
    }
    if union == 0 {
        return Ok(1.0);
    }
    Ok(intersection as f64 / union as f64)
}

/// Mean pixel accuracy over class rasters: per-class pixel accuracy,
/// averaged over the classes present in the truth raster.
pub fn mpa(true_mask: &FeatureTensor, pred_mask: &FeatureTensor, k: usize) -> Result<f64> {
    check_shapes(true_mask, pred_mask)?;
    let t = true_mask.to_f64_vec();
    let p = pred_mask.to_f64_vec();
    let mut truth_count = vec![0u64; k];
    let mut correct_count = vec![0u64; k];
    for (x, y) in t.iter().zip(&p) {
        let (tc, pc) = (*x as usize, *y as usize);
        if *x < 0.0 || tc >= k {
            return Err(Error::MetricLabelOutOfRange { label: tc, k });
        }
        if *y < 0.0 || pc >= k {
            return Err(Error::MetricLabelOutOfRange { label: pc, k });
        }
        truth_count[tc] += 1;
        correct_count[tc] += u64::from(tc == pc);
    }
    let present: Vec<usize> = (0..k).filter(|&c| truth_count[c] > 0).collect();
    if present.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sum: f64 = present
        .iter()
        .map(|&c| correct_count[c] as f64 / truth_count[c] as f64)
        .sum();
    Ok(sum / present.len() as f64)
}

fn check_shapes(a: &FeatureTensor, b: &FeatureTensor) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            a: a.shape().to_vec(),
            b: b.shape().to_vec(),
        });
    }
    Ok(())
}
