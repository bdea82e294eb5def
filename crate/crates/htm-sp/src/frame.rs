//! Binary input frames: fixed-length bit vectors packed into 64-bit words.

/// An encoded input frame: `len` bits packed into `u64` words.
///
/// Packing the bits up front keeps the per-synapse test a single shift/mask
/// and shrinks staging traffic roughly 32-fold compared to one word per bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryFrame {
    words: Vec<u64>,
    len: usize,
}

impl BinaryFrame {
    /// An all-zero frame of `len` bits.
    pub fn zeros(len: usize) -> Self {
        BinaryFrame {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut frame = BinaryFrame::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                frame.set(i, true);
            }
        }
        frame
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut frame = BinaryFrame::zeros(len);
        for i in 0..len {
            if f(i) {
                frame.set(i, true);
            }
        }
        frame
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        debug_assert!(index < self.len);
        (self.words[index >> 6] >> (index & 63)) & 1 == 1
    }

    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len, "bit index {index} out of range {}", self.len);
        let mask = 1u64 << (index & 63);
        if value {
            self.words[index >> 6] |= mask;
        } else {
            self.words[index >> 6] &= !mask;
        }
    }

    /// The packed backing words. Bits past `len` in the last word are zero.
    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Calls `f` with the index of every set bit, in ascending order.
    pub fn for_each_set_bit(&self, mut f: impl FnMut(usize)) {
        for (w_idx, &word) in self.words.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let bit = w.trailing_zeros() as usize;
                f((w_idx << 6) | bit);
                w &= w - 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn set_get_roundtrip() {
        let mut f = BinaryFrame::zeros(130);
        f.set(0, true);
        f.set(63, true);
        f.set(64, true);
        f.set(129, true);
        assert!(f.get(0) && f.get(63) && f.get(64) && f.get(129));
        assert!(!f.get(1) && !f.get(65));
        assert_eq!(f.count_ones(), 4);
        f.set(64, false);
        assert!(!f.get(64));
        assert_eq!(f.count_ones(), 3);
    }

    proptest! {
        #[test]
        fn from_bits_preserves_every_bit(bits in proptest::collection::vec(any::<bool>(), 0..300)) {
            let frame = BinaryFrame::from_bits(&bits);
            prop_assert_eq!(frame.len(), bits.len());
            for (i, &b) in bits.iter().enumerate() {
                prop_assert_eq!(frame.get(i), b);
            }
            let mut seen = Vec::new();
            frame.for_each_set_bit(|i| seen.push(i));
            let expected: Vec<usize> = bits
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect();
            prop_assert_eq!(seen, expected);
        }
    }
}
