use serde::{Deserialize, Serialize};

use super::{check_finite, check_len, gae, masked_mean, MathError, MathResult};

/// Loss coefficients and return-estimation hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub value: f64,
    pub entropy: f64,
    pub reconstruction: f64,
    pub clip_range: f64,
    pub gamma: f64,
    pub lambda: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self { value: 0.5, entropy: 1e-4, reconstruction: 0.1, clip_range: 0.1, gamma: 0.995, lambda: 0.95 }
    }
}

impl LossWeights {
    pub fn validate(&self) -> MathResult<()> {
        let unit = |v: f64| v > 0.0 && v <= 1.0;
        if !(self.clip_range > 0.0) {
            return Err(MathError::InvalidParameter(format!("clip range {} must be positive", self.clip_range)));
        }
        if !unit(self.gamma) || !unit(self.lambda) {
            return Err(MathError::InvalidParameter("gamma and lambda must lie in (0, 1]".into()));
        }
        check_finite("weights", &[self.value, self.entropy, self.reconstruction])
    }
}

/// Per-step arrays of one rollout chunk.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainingBatch {
    pub rewards: Vec<f64>,
    pub values: Vec<f64>,
    pub bootstrap_value: f64,
    pub dones: Vec<bool>,
    pub logp_old: Vec<f64>,
    pub logp_new: Vec<f64>,
    pub advantages: Vec<f64>,
    pub mask: Vec<f64>,
}

impl TrainingBatch {
    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }

    pub fn validate(&self) -> MathResult<()> {
        let n = self.len();
        check_len("values", n, self.values.len())?;
        check_len("dones", n, self.dones.len())?;
        check_len("logp_old", n, self.logp_old.len())?;
        check_len("logp_new", n, self.logp_new.len())?;
        check_len("mask", n, self.mask.len())?;
        if !self.advantages.is_empty() {
            check_len("advantages", n, self.advantages.len())?;
        }
        if self.mask.iter().any(|&m| m != 0.0 && m != 1.0) {
            return Err(MathError::InvalidMask);
        }
        Ok(())
    }

    /// Fills `advantages` with GAE estimates and returns the value targets.
    pub fn compute_advantages(&mut self, w: &LossWeights) -> MathResult<Vec<f64>> {
        self.validate()?;
        let g = gae(&self.rewards, &self.values, &self.dones, self.bootstrap_value, w.gamma, w.lambda)?;
        self.advantages = g.advantages;
        Ok(g.returns)
    }

    /// Clipped surrogate loss averaged over unmasked steps.
    pub fn masked_policy_loss(&self, clip_range: f64) -> MathResult<f64> {
        self.validate()?;
        check_len("advantages", self.len(), self.advantages.len())?;
        let per_step = clip_terms(&self.logp_new, &self.logp_old, &self.advantages, clip_range)?;
        masked_mean(&per_step, &self.mask)
    }
}

fn clip_terms(logp_new: &[f64], logp_old: &[f64], adv: &[f64], eps: f64) -> MathResult<Vec<f64>> {
    let n = logp_new.len();
    check_len("logp_old", n, logp_old.len())?;
    check_len("advantages", n, adv.len())?;
    check_finite("logp_new", logp_new)?;
    check_finite("logp_old", logp_old)?;
    check_finite("advantages", adv)?;
    if !eps.is_finite() || eps <= 0.0 {
        return Err(MathError::InvalidParameter(format!("clip range {eps} must be positive")));
    }
    Ok((0..n)
        .map(|t| {
            let q = (logp_new[t] - logp_old[t]).exp();
            let clipped = q.clamp(1.0 - eps, 1.0 + eps);
            -(q * adv[t]).min(clipped * adv[t])
        })
        .collect())
}

/// Negated clipped surrogate objective, averaged over steps.
pub fn ppo_clip_loss(logp_new: &[f64], logp_old: &[f64], advantages: &[f64], clip_range: f64) -> MathResult<f64> {
    let terms = clip_terms(logp_new, logp_old, advantages, clip_range)?;
    if terms.is_empty() {
        return Err(MathError::TooFewSamples { needed: 1, got: 0 });
    }
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}

/// Mean squared error between value predictions and targets.
pub fn value_loss(values: &[f64], targets: &[f64]) -> MathResult<f64> {
    check_len("targets", values.len(), targets.len())?;
    check_finite("values", values)?;
    check_finite("targets", targets)?;
    if values.is_empty() {
        return Err(MathError::TooFewSamples { needed: 1, got: 0 });
    }
    Ok(values.iter().zip(targets).map(|(v, t)| (v - t).powi(2)).sum::<f64>() / values.len() as f64)
}

/// Sum of the natural-log Shannon entropies of independent categorical
/// action dimensions.
pub fn entropy_multidiscrete(dims: &[&[f64]]) -> MathResult<f64> {
    let mut total = 0.0;
    for probs in dims {
        check_finite("probabilities", probs)?;
        if probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(MathError::OutOfUnitRange("probabilities"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(MathError::Unnormalized(sum));
        }
        total -= probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>();
    }
    Ok(total)
}

const BCE_EPS: f64 = 1e-12;

/// Binary cross entropy between a reconstruction `o` and its target
/// `target`, averaged over elements: `-[t ln o + (1 - t) ln(1 - o)]`.
pub fn bce_reconstruction(o: &[f64], target: &[f64]) -> MathResult<f64> {
    check_len("target", o.len(), target.len())?;
    check_finite("reconstruction", o)?;
    check_finite("target", target)?;
    if o.iter().chain(target).any(|v| !(0.0..=1.0).contains(v)) {
        return Err(MathError::OutOfUnitRange("reconstruction"));
    }
    if o.is_empty() {
        return Err(MathError::TooFewSamples { needed: 1, got: 0 });
    }
    let sum: f64 = o
        .iter()
        .zip(target)
        .map(|(&o, &t)| {
            let o = o.clamp(BCE_EPS, 1.0 - BCE_EPS);
            -(t * o.ln() + (1.0 - t) * (1.0 - o).ln())
        })
        .sum();
    Ok(sum / o.len() as f64)
}

/// Individual loss terms.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossParts {
    pub clip: f64,
    pub value: f64,
    pub entropy: f64,
    pub reconstruction: f64,
}

/// `clip + c1 * value - c2 * entropy + c3 * reconstruction`.
pub fn combined_loss(parts: LossParts, w: &LossWeights) -> MathResult<f64> {
    check_finite("loss parts", &[parts.clip, parts.value, parts.entropy, parts.reconstruction])?;
    Ok(parts.clip + w.value * parts.value - w.entropy * parts.entropy + w.reconstruction * parts.reconstruction)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_hand_values() {
        let l = ppo_clip_loss(&[1.5f64.ln()], &[0.0], &[1.0], 0.1).unwrap();
        assert!((l + 1.1).abs() < 1e-12);
        // Negative advantage keeps the unclipped (worse) ratio.
        let l = ppo_clip_loss(&[1.5f64.ln()], &[0.0], &[-1.0], 0.1).unwrap();
        assert!((l - 1.5).abs() < 1e-12);
        assert_eq!(ppo_clip_loss(&[0.2, 0.3], &[0.2, 0.3], &[1.0, 3.0], 0.2).unwrap(), -2.0);
    }

    #[test]
    fn clip_rejects_nan() {
        assert!(ppo_clip_loss(&[f64::NAN], &[0.0], &[1.0], 0.1).is_err());
    }

    #[test]
    fn entropy_cases() {
        let u = [1.0 / 3.0; 3];
        let h = entropy_multidiscrete(&[&u, &u]).unwrap();
        assert!((h - 2.0 * 3f64.ln()).abs() < 1e-12);
        assert_eq!(entropy_multidiscrete(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]).unwrap(), 0.0);
        assert!(entropy_multidiscrete(&[&[0.5, 0.4, 0.0]]).is_err());
    }

    #[test]
    fn bce_half() {
        let l = bce_reconstruction(&[0.5], &[1.0]).unwrap();
        assert!((l - 2f64.ln()).abs() < 1e-12);
        assert!(bce_reconstruction(&[1.5], &[1.0]).is_err());
    }

    #[test]
    fn combined_arithmetic() {
        let p = LossParts { clip: 1.0, value: 1.0, entropy: 1.0, reconstruction: 1.0 };
        let w = LossWeights::default();
        assert!((combined_loss(p, &w).unwrap() - 1.5999).abs() < 1e-12);
        let zero = LossWeights { value: 0.0, entropy: 0.0, reconstruction: 0.0, ..w };
        assert_eq!(combined_loss(LossParts { clip: 0.7, ..p }, &zero).unwrap(), 0.7);
    }

    #[test]
    fn batch_pipeline() {
        let mut b = TrainingBatch {
            rewards: vec![0.0, 1.0, 0.0],
            values: vec![0.1, 0.2, 0.3],
            bootstrap_value: 0.0,
            dones: vec![false, true, false],
            logp_old: vec![-1.0; 3],
            logp_new: vec![-1.0; 3],
            advantages: vec![],
            mask: vec![1.0, 1.0, 0.0],
        };
        let targets = b.compute_advantages(&LossWeights::default()).unwrap();
        assert_eq!(targets.len(), 3);
        let l = b.masked_policy_loss(0.1).unwrap();
        assert!((l + (b.advantages[0] + b.advantages[1]) / 2.0).abs() < 1e-12);
        b.mask[0] = 0.5;
        assert!(b.validate().is_err());
    }

    #[test]
    fn weight_validation() {
        assert!(LossWeights::default().validate().is_ok());
        assert!(LossWeights { gamma: 0.0, ..Default::default() }.validate().is_err());
        assert!(LossWeights { clip_range: -0.1, ..Default::default() }.validate().is_err());
    }
}
