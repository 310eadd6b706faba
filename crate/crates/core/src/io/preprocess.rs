use crate::dataset::TimeSeriesDataset;

/// Name recorded in provenance for the imputation rule below.
pub const NAN_POLICY: &str = "row-mean";

/// Replaces NaNs by the mean of the finite samples in the row; an all-NaN
/// row becomes zeros. Returns the number of values replaced.
pub fn impute_row(row: &mut [f64]) -> usize {
    let (sum, finite) = row
        .iter()
        .filter(|v| !v.is_nan())
        .fold((0.0, 0usize), |(s, n), &v| (s + v, n + 1));
    let fill = if finite == 0 { 0.0 } else { sum / finite as f64 };
    let mut replaced = 0;
    for v in row.iter_mut().filter(|v| v.is_nan()) {
        *v = fill;
        replaced += 1;
    }
    replaced
}

/// Subtracts the mean and divides by the population standard deviation.
/// Rows whose spread is at rounding level relative to their magnitude are
/// treated as constant and set to zero.
pub fn znormalize_row(row: &mut [f64]) {
    let n = row.len() as f64;
    let mean = row.iter().sum::<f64>() / n;
    let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    let scale = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if std <= 64.0 * f64::EPSILON * scale || std == 0.0 {
        row.iter_mut().for_each(|v| *v = 0.0);
    } else {
        row.iter_mut().for_each(|v| *v = (*v - mean) / std);
    }
}

/// NaN imputation followed by per-instance, per-channel z-normalization.
pub fn preprocess(mut ds: TimeSeriesDataset) -> TimeSeriesDataset {
    let len = ds.series_len();
    let mut imputed = 0;
    for row in ds.values_mut().chunks_exact_mut(len) {
        imputed += impute_row(row);
        znormalize_row(row);
    }
    if imputed > 0 || ds.provenance.nan_count > 0 {
        ds.provenance.nan_policy = Some(NAN_POLICY.to_string());
    }
    ds.provenance.z_normalized = true;
    ds
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(rows: &[&[f64]]) -> TimeSeriesDataset {
        let len = rows[0].len();
        let values = rows.iter().flat_map(|r| r.iter().copied()).collect();
        TimeSeriesDataset::new("t", 1, len, values, vec![0; rows.len()], vec!["a".into()]).unwrap()
    }

    #[test]
    fn nan_then_znorm() {
        let ds = preprocess(uni(&[&[1.0, f64::NAN, 3.0]]));
        // after imputation [1, 2, 3]: mean 2, population std sqrt(2/3)
        let s = (2.0f64 / 3.0).sqrt();
        let expected = [-1.0 / s, 0.0, 1.0 / s];
        for (a, b) in ds.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
        assert!((expected[2] - 1.224_744_871_391_589).abs() < 1e-15);
        assert_eq!(ds.provenance.nan_count, 1);
        assert_eq!(ds.provenance.nan_policy.as_deref(), Some(NAN_POLICY));
    }

    #[test]
    fn constant_and_all_nan_rows_become_zero() {
        let ds = preprocess(uni(&[&[4.0, 4.0, 4.0], &[0.1, 0.1, 0.1], &[f64::NAN; 3]]));
        assert!(ds.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn moments_after_znorm() {
        let row: Vec<f64> = (0..97).map(|t| ((t * 37) % 11) as f64 * 0.3 - 7.0).collect();
        let ds = preprocess(uni(&[&row]));
        let n = row.len() as f64;
        let mean = ds.values().iter().sum::<f64>() / n;
        let std = (ds.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
        assert!(mean.abs() < 1e-9 && (std - 1.0).abs() < 1e-9);
    }

    #[test]
    fn idempotent_on_nan_free_input() {
        let row: Vec<f64> = (0..64).map(|t| (t as f64 * 0.7).sin() * 3.0 + 1.0).collect();
        let once = preprocess(uni(&[&row]));
        let twice = preprocess(once.clone());
        for (a, b) in once.values().iter().zip(twice.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
