use super::{MathError, MathResult};
use crate::rng::Rng;

/// Interquartile mean: the mean of the middle half of the sorted samples.
/// When `n` is not a multiple of 4 the two boundary samples count with the
/// fraction of them that lies inside `[n/4, 3n/4]`.
pub fn iqm(samples: &[f64]) -> MathResult<f64> {
    let n = samples.len();
    if n < 4 {
        return Err(MathError::TooFewSamples { needed: 4, got: n });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(MathError::NonFinite("samples"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = n as f64 / 4.0;
    let hi = n as f64 - lo;
    let sum: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let overlap = (hi.min(i as f64 + 1.0) - lo.max(i as f64)).max(0.0);
            overlap * x
        })
        .sum();
    Ok(sum / (hi - lo))
}

/// Percentile confidence interval of the IQM over all episodes of all runs.
/// Each replicate resamples episodes with replacement within every run.
pub fn stratified_bootstrap_ci(runs: &[Vec<f64>], confidence: f64, replicates: usize, seed: u64) -> MathResult<(f64, f64)> {
    if runs.is_empty() || runs.iter().any(Vec::is_empty) {
        return Err(MathError::TooFewSamples { needed: 1, got: 0 });
    }
    if !(confidence > 0.0 && confidence < 1.0) || replicates == 0 {
        return Err(MathError::InvalidParameter("confidence must be in (0, 1) and replicates positive".into()));
    }
    let mut rng = Rng::new(seed);
    let total: usize = runs.iter().map(Vec::len).sum();
    let mut stats = Vec::with_capacity(replicates);
    let mut buf = Vec::with_capacity(total);
    for _ in 0..replicates {
        buf.clear();
        for run in runs {
            for _ in 0..run.len() {
                buf.push(run[rng.below(run.len() as u64) as usize]);
            }
        }
        stats.push(iqm(&buf)?);
    }
    stats.sort_by(f64::total_cmp);
    let alpha = (1.0 - confidence) / 2.0;
    Ok((percentile(&stats, alpha), percentile(&stats, 1.0 - alpha)))
}

/// Linear-interpolation percentile of sorted data.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let j = (i + 1).min(sorted.len() - 1);
    sorted[i] + (sorted[j] - sorted[i]) * (pos - i as f64)
}
