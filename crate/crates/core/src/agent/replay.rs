use std::collections::VecDeque;

use rand::seq::index;
use rand::Rng;

use super::AgentError;

/// Bounded FIFO buffer with uniform sampling without replacement.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayMemory<T> {
    capacity: usize,
    buf: VecDeque<T>,
}

impl<T> ReplayMemory<T> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        Self {
            capacity,
            buf: VecDeque::with_capacity(capacity),
        }
    }

    /// Appends a record, evicting the oldest one when full.
    pub fn push(&mut self, record: T) {
        if self.buf.len() == self.capacity {
            self.buf.pop_front();
        }
        self.buf.push_back(record);
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.buf.iter()
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<&T>, AgentError> {
        if self.buf.len() < n {
            return Err(AgentError::InsufficientSamples {
                needed: n,
                available: self.buf.len(),
            });
        }
        Ok(index::sample(rng, self.buf.len(), n)
            .into_iter()
            .map(|i| &self.buf[i])
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn sampling_needs_enough_records() {
        let mut mem = ReplayMemory::new(10);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        mem.push(1);
        assert!(matches!(
            mem.sample(2, &mut rng),
            Err(AgentError::InsufficientSamples { needed: 2, available: 1 })
        ));
        mem.push(2);
        let mut got: Vec<i32> = mem.sample(2, &mut rng).unwrap().into_iter().copied().collect();
        got.sort();
        assert_eq!(got, vec![1, 2]);
    }

    proptest! {
        #[test]
        fn keeps_the_newest_in_order(cap in 1usize..50, extra in 0usize..80) {
            let mut mem = ReplayMemory::new(cap);
            for i in 0..cap + extra {
                mem.push(i);
            }
            let kept: Vec<usize> = mem.iter().copied().collect();
            let expected: Vec<usize> = (extra..cap + extra).collect();
            prop_assert_eq!(kept, expected);
        }
    }
}
