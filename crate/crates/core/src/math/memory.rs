use serde::{Deserialize, Serialize};

use super::{MathError, MathResult};

/// Per-step, per-layer latent vectors of one episode. Append-only; reads
/// return copies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodicMemory {
    layers: usize,
    dim: usize,
    /// `steps x layers x dim`, flattened.
    data: Vec<f64>,
}

impl EpisodicMemory {
    pub fn new(layers: usize, dim: usize) -> Self {
        Self { layers, dim, data: Vec::new() }
    }

    pub fn len(&self) -> usize {
        if self.layers * self.dim == 0 {
            0
        } else {
            self.data.len() / (self.layers * self.dim)
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Stores one step: one vector per layer.
    pub fn push(&mut self, step: &[Vec<f64>]) -> MathResult<()> {
        if step.len() != self.layers || step.iter().any(|v| v.len() != self.dim) {
            return Err(MathError::LengthMismatch(format!("expected {} vectors of length {}", self.layers, self.dim)));
        }
        for v in step {
            self.data.extend_from_slice(v);
        }
        Ok(())
    }

    pub fn get(&self, step: usize, layer: usize) -> Option<&[f64]> {
        if step >= self.len() || layer >= self.layers {
            return None;
        }
        let at = (step * self.layers + layer) * self.dim;
        Some(&self.data[at..at + self.dim])
    }

    /// Copies the window's vectors for `layer`.
    pub fn read(&self, window: &MemoryWindow, layer: usize) -> Vec<Vec<f64>> {
        (window.start..window.end).filter_map(|s| self.get(s, layer).map(<[f64]>::to_vec)).collect()
    }
}

/// Memory positions attended to at step `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryWindow {
    /// First index, inclusive.
    pub start: usize,
    /// Last index, exclusive (always `t`).
    pub end: usize,
    /// While the memory is shorter than the window: validity of each of the
    /// `W` window slots, i.e. row `t` of a strictly lower triangular matrix.
    pub mask: Option<Vec<bool>>,
}

impl MemoryWindow {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

/// Sliding window of length `window` over the memory before step `t`.
pub fn memory_window(t: usize, window: usize) -> MemoryWindow {
    let start = t.saturating_sub(window);
    let mask = (t < window).then(|| (0..window).map(|j| j < t).collect());
    MemoryWindow { start, end: t, mask }
}

/// `n x n` matrix with ones strictly below the diagonal.
pub fn strictly_lower_triangular(n: usize) -> Vec<Vec<bool>> {
    (0..n).map(|i| (0..n).map(|j| j < i).collect()).collect()
}

/// Sinusoidal position encoding, `length x dim`.
pub fn positional_encoding(length: usize, dim: usize) -> MathResult<Vec<Vec<f64>>> {
    if !dim.is_multiple_of(2) {
        return Err(MathError::OddDimension(dim));
    }
    Ok((0..length)
        .map(|p| {
            let mut row = vec![0.0; dim];
            for i in 0..dim / 2 {
                let angle = p as f64 / 10000f64.powf(2.0 * i as f64 / dim as f64);
                row[2 * i] = angle.sin();
                row[2 * i + 1] = angle.cos();
            }
            row
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_cases() {
        assert!(memory_window(0, 8).is_empty());
        let w = memory_window(5, 3);
        assert_eq!(w.indices().collect::<Vec<_>>(), vec![2, 3, 4]);
        assert!(w.mask.is_none());
        let w = memory_window(2, 4);
        assert_eq!(w.indices().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(w.mask, Some(vec![true, true, false, false]));
        assert_eq!(w.mask.unwrap(), strictly_lower_triangular(4)[2]);
    }

    #[test]
    fn memory_reads_do_not_mutate() {
        let mut m = EpisodicMemory::new(2, 3);
        for s in 0..5 {
            m.push(&[vec![s as f64; 3], vec![-(s as f64); 3]]).unwrap();
        }
        let before = m.clone();
        let read = m.read(&memory_window(4, 2), 1);
        assert_eq!(read, vec![vec![-2.0; 3], vec![-3.0; 3]]);
        assert_eq!(m, before);
        assert!(m.push(&[vec![0.0; 2]]).is_err());
    }

    #[test]
    fn encoding_values() {
        let pe = positional_encoding(3, 4).unwrap();
        assert_eq!(pe[0], vec![0.0, 1.0, 0.0, 1.0]);
        assert!((pe[1][0] - 0.841_470_984_807_896_5).abs() < 1e-12);
        assert!(positional_encoding(3, 5).is_err());
    }
}
