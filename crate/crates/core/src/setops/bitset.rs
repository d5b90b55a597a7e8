//! Fixed-length membership bitset with word-level range operations.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut b = BitSet {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        b.clear_tail();
        b
    }

    fn clear_tail(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn unset(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn is_all(&self) -> bool {
        self.count_ones() == self.len as u64
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }

    pub fn or_assign(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn and_assign(&mut self, other: &BitSet) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Reads `n <= 64` bits starting at bit `off`, bit `off` landing in bit 0.
    #[inline]
    pub fn read_bits(&self, off: usize, n: usize) -> u64 {
        debug_assert!((1..=64).contains(&n) && off + n <= self.len);
        let (w, b) = (off / 64, off % 64);
        let mut v = self.words[w] >> b;
        if b + n > 64 {
            v |= self.words[w + 1] << (64 - b);
        }
        if n < 64 {
            v &= (1u64 << n) - 1;
        }
        v
    }

    /// ORs the low `n <= 64` bits of `val` into bits `off..off + n`.
    #[inline]
    pub fn or_bits(&mut self, off: usize, n: usize, val: u64) {
        debug_assert!((1..=64).contains(&n) && off + n <= self.len);
        let val = if n < 64 { val & ((1u64 << n) - 1) } else { val };
        let (w, b) = (off / 64, off % 64);
        self.words[w] |= val << b;
        if b + n > 64 {
            self.words[w + 1] |= val >> (64 - b);
        }
    }

    /// `self[dst_off + i] |= src[src_off + i]` for `i < n`.
    pub fn or_range_from(&mut self, dst_off: usize, src: &BitSet, src_off: usize, n: usize) {
        let mut done = 0;
        while done < n {
            let k = (n - done).min(64);
            let v = src.read_bits(src_off + done, k);
            if v != 0 {
                self.or_bits(dst_off + done, k, v);
            }
            done += k;
        }
    }

    /// ORs the block `src[src_off .. src_off + n]`, rotated forward by `shift`
    /// positions (cyclically within the block), into `self[dst_off .. dst_off + n]`.
    pub fn or_rotated_from(
        &mut self,
        dst_off: usize,
        src: &BitSet,
        src_off: usize,
        n: usize,
        shift: usize,
    ) {
        debug_assert!(shift < n);
        if shift == 0 {
            self.or_range_from(dst_off, src, src_off, n);
            return;
        }
        self.or_range_from(dst_off + shift, src, src_off, n - shift);
        self.or_range_from(dst_off, src, src_off + n - shift, shift);
    }

    /// Lowercase hex of the little-endian byte image: bit `i` is bit `i % 8` of byte `i / 8`.
    pub fn to_hex(&self) -> String {
        let nbytes = self.len.div_ceil(8);
        let bytes: Vec<u8> = self
            .words
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .take(nbytes)
            .collect();
        hex::encode(bytes)
    }

    pub fn from_hex(s: &str, len: usize) -> Result<Self> {
        let bytes =
            hex::decode(s.trim()).map_err(|e| Error::Parse(format!("bad hex bitset: {e}")))?;
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Parse(format!(
                "hex bitset has {} bytes, expected {} for {len} elements",
                bytes.len(),
                len.div_ceil(8)
            )));
        }
        let mut out = BitSet::new(len);
        for (i, chunk) in bytes.chunks(8).enumerate() {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            out.words[i] = u64::from_le_bytes(buf);
        }
        let before = out.words.clone();
        out.clear_tail();
        if before != out.words {
            return Err(Error::Parse(
                "hex bitset sets bits beyond the group order".into(),
            ));
        }
        Ok(out)
    }
}
