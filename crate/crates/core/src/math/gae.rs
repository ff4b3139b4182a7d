use super::{check_finite, check_len, MathResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Gae {
    pub advantages: Vec<f64>,
    /// Advantages plus values.
    pub returns: Vec<f64>,
}

/// Generalized advantage estimation over one rollout.
///
/// `dones[t]` marks that the episode ended after step `t`, so no value is
/// bootstrapped across it. `bootstrap` is the value of the observation that
/// follows the last step.
pub fn gae(rewards: &[f64], values: &[f64], dones: &[bool], bootstrap: f64, gamma: f64, lambda: f64) -> MathResult<Gae> {
    let n = rewards.len();
    check_len("values", n, values.len())?;
    check_len("dones", n, dones.len())?;
    check_finite("rewards", rewards)?;
    check_finite("values", values)?;
    check_finite("bootstrap", &[bootstrap, gamma, lambda])?;
    let mut advantages = vec![0.0; n];
    let mut acc = 0.0;
    for t in (0..n).rev() {
        let next_value = if t + 1 < n { values[t + 1] } else { bootstrap };
        let live = if dones[t] { 0.0 } else { 1.0 };
        let delta = rewards[t] + gamma * next_value * live - values[t];
        acc = delta + gamma * lambda * live * acc;
        advantages[t] = acc;
    }
    let returns = advantages.iter().zip(values).map(|(a, v)| a + v).collect();
    Ok(Gae { advantages, returns })
}

/// Zero-mean, unit-variance advantages. Off by default in the baselines.
pub fn normalize_advantages(advantages: &[f64]) -> Vec<f64> {
    let n = advantages.len() as f64;
    if n == 0.0 {
        return Vec::new();
    }
    let mean = advantages.iter().sum::<f64>() / n;
    let var = advantages.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt() + 1e-8;
    advantages.iter().map(|a| (a - mean) / std).collect()
}
