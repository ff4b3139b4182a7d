use serde::{Deserialize, Serialize};

use super::{check_len, MathError, MathResult};

/// Mean over the entries whose mask is 1.
pub fn masked_mean(losses: &[f64], mask: &[f64]) -> MathResult<f64> {
    check_len("mask", losses.len(), mask.len())?;
    if mask.iter().any(|&m| m != 0.0 && m != 1.0) {
        return Err(MathError::InvalidMask);
    }
    let count: f64 = mask.iter().sum();
    if count == 0.0 {
        return Err(MathError::EmptyMask);
    }
    // Padded entries may hold anything, including NaN; skip them outright.
    let sum: f64 = losses.iter().zip(mask).filter(|(_, &m)| m == 1.0).map(|(l, _)| l).sum();
    Ok(sum / count)
}

/// One fixed-length training sequence cut from an episode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sequence {
    /// Episode step of the first element.
    pub start: usize,
    /// Number of real (unpadded) steps.
    pub len: usize,
    /// Recurrent state to initialize the sequence with: the state stored at
    /// `start`.
    pub initial_state_index: usize,
    pub mask: Vec<u8>,
}

impl Sequence {
    /// Copies the sequence's steps out of `data`, zero-padding the tail.
    pub fn gather(&self, data: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.mask.len()];
        out[..self.len].copy_from_slice(&data[self.start..self.start + self.len]);
        out
    }

    pub fn mask_f64(&self) -> Vec<f64> {
        self.mask.iter().map(|&m| m as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkedEpisode {
    pub sequence_length: usize,
    pub sequences: Vec<Sequence>,
}

impl ChunkedEpisode {
    pub fn mask_mass(&self) -> usize {
        self.sequences.iter().flat_map(|s| &s.mask).map(|&m| m as usize).sum()
    }
}

/// Splits an episode of `len` steps into sequences of `seq_len`, the last
/// one zero-padded.
pub fn chunk_episode(len: usize, seq_len: usize) -> MathResult<ChunkedEpisode> {
    if len == 0 || seq_len == 0 {
        return Err(MathError::InvalidParameter("episode and sequence length must be positive".into()));
    }
    let sequences = (0..len)
        .step_by(seq_len)
        .map(|start| {
            let n = seq_len.min(len - start);
            let mut mask = vec![0u8; seq_len];
            mask[..n].fill(1);
            Sequence { start, len: n, initial_state_index: start, mask }
        })
        .collect();
    Ok(ChunkedEpisode { sequence_length: seq_len, sequences })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masked_mean_cases() {
        assert_eq!(masked_mean(&[2.0, 4.0], &[1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(masked_mean(&[2.0, 4.0, 100.0], &[1.0, 1.0, 0.0]).unwrap(), 3.0);
        assert_eq!(masked_mean(&[2.0, f64::NAN], &[1.0, 0.0]).unwrap(), 2.0);
        assert_eq!(masked_mean(&[1.0], &[0.0]), Err(MathError::EmptyMask));
    }

    #[test]
    fn chunk_cases() {
        let c = chunk_episode(5, 4).unwrap();
        assert_eq!(c.sequences.len(), 2);
        assert_eq!(c.sequences[0].mask, vec![1, 1, 1, 1]);
        assert_eq!(c.sequences[1].mask, vec![1, 0, 0, 0]);
        assert_eq!(c.sequences[1].initial_state_index, 4);
        let c = chunk_episode(4, 4).unwrap();
        assert_eq!(c.sequences.len(), 1);
        assert_eq!(c.sequences[0].mask, vec![1; 4]);
        let data: Vec<f64> = (0..5).map(|x| x as f64).collect();
        assert_eq!(chunk_episode(5, 4).unwrap().sequences[1].gather(&data), vec![4.0, 0.0, 0.0, 0.0]);
    }
}
