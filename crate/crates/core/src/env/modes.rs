use std::fmt;

/// On/off state of every small cell; `true` means active.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeVector(Vec<bool>);

impl ModeVector {
    pub fn all_on(n: usize) -> Self {
        Self(vec![true; n])
    }

    pub fn all_off(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        Self(bits.to_vec())
    }

    /// Bit `i` of `index` is cell `i`.
    pub fn from_index(index: u64, n: usize) -> Self {
        Self((0..n).map(|i| index >> i & 1 == 1).collect())
    }

    /// Inverse of [`ModeVector::from_index`]; only defined for up to 64 cells.
    pub fn index(&self) -> u64 {
        assert!(self.0.len() <= 64);
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &on)| acc | (u64::from(on) << i))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_on(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, on: bool) {
        self.0[i] = on;
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn count_on(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn hamming(&self, other: &ModeVector) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn as_bits(&self) -> &[bool] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    /// Deterministic preference among equally good actions: fewer active
    /// cells first, then the lower [`ModeVector::index`].
    pub fn tie_key(&self) -> (usize, u64) {
        (self.count_on(), self.index())
    }
}

/// Prints cell 0 first, e.g. `1101`.
impl fmt::Display for ModeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &on in &self.0 {
            f.write_str(if on { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_round_trip() {
        for idx in 0..64u64 {
            assert_eq!(ModeVector::from_index(idx, 6).index(), idx);
        }
        assert_eq!(ModeVector::from_bits(&[true, false, true]).index(), 0b101);
    }

    #[test]
    fn display_and_counts() {
        let v = ModeVector::from_bits(&[true, true, false, true]);
        assert_eq!(v.to_string(), "1101");
        assert_eq!(v.count_on(), 3);
        assert_eq!(v.hamming(&ModeVector::all_on(4)), 1);
    }
}
