//! Packed bit vectors and the word-level kernels built on them.
//!
//! Vertex sets and colorings are stored LSB-first: vertex `v` lives at bit
//! `v % 64` of word `v / 64`. Bits past the logical length are kept zero so
//! population counts never need re-masking.

/// A fixed-length packed bit vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitVec {
    nbits: usize,
    words: Vec<u64>,
}

#[inline]
pub(crate) fn words_for(nbits: usize) -> usize {
    nbits.div_ceil(64)
}

/// Mask selecting the valid bits of the final word of an `nbits`-long vector.
#[inline]
pub(crate) fn tail_mask(nbits: usize) -> u64 {
    match nbits % 64 {
        0 => !0u64,
        r => (1u64 << r) - 1,
    }
}

impl BitVec {
    pub fn zeros(nbits: usize) -> Self {
        BitVec {
            nbits,
            words: vec![0; words_for(nbits)],
        }
    }

    pub fn ones(nbits: usize) -> Self {
        let mut v = BitVec {
            nbits,
            words: vec![!0u64; words_for(nbits)],
        };
        v.mask_tail();
        v
    }

    pub fn from_indices(nbits: usize, indices: &[usize]) -> Self {
        let mut v = Self::zeros(nbits);
        for &i in indices {
            v.set(i);
        }
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nbits
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nbits == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.nbits, "bit index {i} out of range {}", self.nbits);
        (self.words[i >> 6] >> (i & 63)) & 1 != 0
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        assert!(i < self.nbits, "bit index {i} out of range {}", self.nbits);
        self.words[i >> 6] |= 1u64 << (i & 63);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        assert!(i < self.nbits, "bit index {i} out of range {}", self.nbits);
        self.words[i >> 6] &= !(1u64 << (i & 63));
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Fills every bit from the word stream of `rng` (each bit fair).
    pub fn fill_random(&mut self, rng: &mut crate::rng::SplitMix64) {
        for w in &mut self.words {
            *w = rng.next_u64();
        }
        self.mask_tail();
    }

    /// Bitwise complement within the logical length.
    pub fn complemented(&self) -> BitVec {
        let mut out = BitVec {
            nbits: self.nbits,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.mask_tail();
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.nbits, other.nbits, "length mismatch");
        BitVec {
            nbits: self.nbits,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// Self AND NOT other.
    pub fn and_not(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.nbits, other.nbits, "length mismatch");
        BitVec {
            nbits: self.nbits,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    /// Indices of set bits, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some((wi << 6) | b)
                }
            })
        })
    }

    fn mask_tail(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.nbits);
        }
    }
}

/// Population count of the AND of two equally long word slices.
#[inline]
pub fn and_count(a: &[u64], b: &[u64]) -> u32 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

/// In-place transpose of a 64x64 bit tile, LSB-first (bit `c` of `tile[r]` is
/// entry `(r, c)`). Recursive block swap, adapted from the classic 32x32
/// word-transpose.
pub(crate) fn transpose64(tile: &mut [u64; 64]) {
    let mut j: usize = 32;
    let mut m: u64 = 0xFFFF_FFFF_0000_0000;
    loop {
        let mut k = 0;
        while k < 64 {
            let t = (tile[k] ^ (tile[k + j] << j)) & m;
            tile[k] ^= t;
            tile[k + j] ^= t >> j;
            k = (k + j + 1) & !j;
        }
        j >>= 1;
        if j == 0 {
            break;
        }
        m ^= m >> j;
    }
}
