use std::collections::VecDeque;

use crate::env::ModeVector;

/// What the controller conditions on: predicted arrivals and the modes in
/// force before the decision.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub predicted: Vec<f64>,
    pub prev_modes: ModeVector,
}

impl State {
    pub fn new(predicted: Vec<f64>, prev_modes: ModeVector) -> Self {
        debug_assert!(predicted.iter().all(|&l| l >= 0.0));
        Self {
            predicted,
            prev_modes,
        }
    }

    /// Network input: arrivals divided by `lambda_scale`, then the modes as
    /// zeros and ones.
    pub fn write_features(&self, lambda_scale: f64, out: &mut Vec<f64>) {
        out.extend(self.predicted.iter().map(|l| l / lambda_scale));
        out.extend(self.prev_modes.iter().map(|on| if on { 1.0 } else { 0.0 }));
    }

    pub fn features(&self, lambda_scale: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.predicted.len() + self.prev_modes.len());
        self.write_features(lambda_scale, &mut out);
        out
    }
}

/// The last `h` arrival vectors, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct ArHistory {
    len: usize,
    width: usize,
    slots: VecDeque<Vec<f64>>,
}

impl ArHistory {
    pub fn new(len: usize, width: usize) -> Self {
        Self {
            len,
            width,
            slots: VecDeque::with_capacity(len),
        }
    }

    pub fn push(&mut self, arrivals: &[f64]) {
        assert_eq!(arrivals.len(), self.width);
        if self.slots.len() == self.len {
            self.slots.pop_front();
        }
        self.slots.push_back(arrivals.to_vec());
    }

    pub fn is_warm(&self) -> bool {
        self.slots.len() == self.len
    }

    pub fn history_len(&self) -> usize {
        self.len
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `len * width` values, oldest slot first; missing early slots are
    /// zero-padded at the front.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = vec![0.0; (self.len - self.slots.len()) * self.width];
        for slot in &self.slots {
            out.extend_from_slice(slot);
        }
        out
    }

    pub(crate) fn entries(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.slots.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_padded_then_rolling() {
        let mut h = ArHistory::new(3, 2);
        assert_eq!(h.flatten(), vec![0.0; 6]);
        h.push(&[1.0, 2.0]);
        assert_eq!(h.flatten(), vec![0.0, 0.0, 0.0, 0.0, 1.0, 2.0]);
        h.push(&[3.0, 4.0]);
        h.push(&[5.0, 6.0]);
        assert!(h.is_warm());
        h.push(&[7.0, 8.0]);
        assert_eq!(h.flatten(), vec![3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
    }

    #[test]
    fn features_layout() {
        let s = State::new(vec![1.0, 0.5], ModeVector::from_bits(&[true, false]));
        assert_eq!(s.features(2.0), vec![0.5, 0.25, 1.0, 0.0]);
    }
}
