//! Word-packed vectors and square matrices over GF(2).
//!
//! Bit `b` of a row lives in word `b / WORD_BITS` at position `b % WORD_BITS`.
//! Padding bits past `n` in the last word are always zero, so whole-word
//! comparisons and popcounts are exact.

use std::io::{Read, Write};

use rand::Rng;

use crate::error::{Error, Result};

pub type Word = u64;
pub const WORD_BITS: usize = Word::BITS as usize;

/// Attempts before `sample_uniform_invertible` reports failure.
pub const MAX_SAMPLE_ATTEMPTS: u64 = 1_000_000;

const MATRIX_MAGIC: &[u8; 4] = b"GF2M";
const MATRIX_VERSION: u8 = 0x01;

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

#[inline]
fn tail_mask(n: usize) -> Word {
    match n % WORD_BITS {
        0 => Word::MAX,
        r => (1 << r) - 1,
    }
}

/// Cost of a computation, in single-bit operations and in word operations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCount {
    pub bit_ops: u64,
    pub word_ops: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitVector {
    n: usize,
    words: Vec<Word>,
}

impl BitVector {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            words: vec![0; words_for(n)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (k, &b) in bits.iter().enumerate() {
            v.set(k, b);
        }
        v
    }

    /// Low `n` bits of `value`, bit `k` is coordinate `k`.
    pub fn from_u64(value: u64, n: usize) -> Self {
        assert!(n <= 64);
        let mut v = Self::zeros(n);
        if n > 0 {
            v.words[0] = value & tail_mask(n);
        }
        v
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(n);
        for w in v.words.iter_mut() {
            *w = rng.gen();
        }
        v.clear_padding();
        v
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    #[inline]
    pub fn get(&self, k: usize) -> bool {
        assert!(k < self.n, "bit {k} out of range for length {}", self.n);
        (self.words[k / WORD_BITS] >> (k % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, k: usize, bit: bool) {
        assert!(k < self.n, "bit {k} out of range for length {}", self.n);
        let mask = 1 << (k % WORD_BITS);
        if bit {
            self.words[k / WORD_BITS] |= mask;
        } else {
            self.words[k / WORD_BITS] &= !mask;
        }
    }

    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// `v_i <- v_i xor v_j`: the action of a transvection on a column vector.
    /// One bit operation.
    pub fn apply_transvection(&mut self, t: Transvection) -> Result<()> {
        t.check(self.n)?;
        if self.get(t.source()) {
            let i = t.target();
            self.words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
        }
        Ok(())
    }

    /// Coordinates as a `0`/`1` string, coordinate 0 first.
    pub fn to_bit_string(&self) -> String {
        (0..self.n)
            .map(|k| if self.get(k) { '1' } else { '0' })
            .collect()
    }

    pub fn parse_bit_string(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Format(format!(
                    "unexpected character {other:?} in bit string"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(&bits))
    }

    fn clear_padding(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.n);
        }
    }
}

/// Elementary transvection `I + E_{i,j}`; left multiplication adds row `j`
/// (source) to row `i` (target).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transvection {
    target: u16,
    source: u16,
}

impl Transvection {
    pub fn new(target: usize, source: usize) -> Result<Self> {
        if target == source {
            return Err(Error::DegenerateTransvection(target));
        }
        let limit = u16::MAX as usize;
        for index in [target, source] {
            if index >= limit {
                return Err(Error::IndexOutOfRange { index, n: limit });
            }
        }
        Ok(Self {
            target: target as u16,
            source: source as u16,
        })
    }

    #[inline]
    pub fn target(self) -> usize {
        self.target as usize
    }

    #[inline]
    pub fn source(self) -> usize {
        self.source as usize
    }

    /// All `n(n-1)` transvections, ordered by `(target, source)`.
    pub fn all(n: usize) -> impl Iterator<Item = Transvection> {
        (0..n).flat_map(move |i| {
            (0..n).filter(move |&j| j != i).map(move |j| Transvection {
                target: i as u16,
                source: j as u16,
            })
        })
    }

    /// Maps `u` in `[0, n(n-1))` to an ordered pair of distinct indices:
    /// `i = u / (n-1)`, `j' = u % (n-1)`, `j = j' + (j' >= i)`.
    #[inline]
    pub fn from_pair_index(u: usize, n: usize) -> Self {
        debug_assert!(n >= 2 && u < n * (n - 1));
        let i = u / (n - 1);
        let jp = u % (n - 1);
        let j = jp + usize::from(jp >= i);
        Self {
            target: i as u16,
            source: j as u16,
        }
    }

    /// Inverse of [`Transvection::from_pair_index`].
    pub fn pair_index(self, n: usize) -> usize {
        let (i, j) = (self.target(), self.source());
        i * (n - 1) + if j > i { j - 1 } else { j }
    }

    pub fn check(self, n: usize) -> Result<()> {
        for index in [self.target(), self.source()] {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
        }
        Ok(())
    }
}

/// Square `n x n` matrix over GF(2), rows stored contiguously.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    n: usize,
    row_words: usize,
    words: Vec<Word>,
}

impl BitMatrix {
    pub fn zeros(n: usize) -> Self {
        let row_words = words_for(n);
        Self {
            n,
            row_words,
            words: vec![0; n * row_words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from nested rows of `0`/`1` values.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b & 1 == 1);
            }
        }
        Ok(m)
    }

    /// Every entry an independent fair bit.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(n);
        let mask = tail_mask(n);
        for row in m.words.chunks_mut(m.row_words.max(1)) {
            for w in row.iter_mut() {
                *w = rng.gen();
            }
            if let Some(last) = row.last_mut() {
                *last &= mask;
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Word] {
        &self.words[i * self.row_words..(i + 1) * self.row_words]
    }

    pub fn row_vector(&self, i: usize) -> BitVector {
        BitVector {
            n: self.n,
            words: self.row(i).to_vec(),
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.n && j < self.n);
        (self.words[i * self.row_words + j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, bit: bool) {
        assert!(i < self.n && j < self.n);
        let w = &mut self.words[i * self.row_words + j / WORD_BITS];
        let mask = 1 << (j % WORD_BITS);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    /// Number of ones.
    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    /// Number of ones on the diagonal.
    pub fn trace(&self) -> u32 {
        (0..self.n).filter(|&i| self.get(i, i)).count() as u32
    }

    /// Row `target` becomes `row target xor row source`, in place.
    pub fn apply_transvection_in_place(&mut self, t: Transvection) -> Result<()> {
        t.check(self.n)?;
        let rw = self.row_words;
        let (i, j) = (t.target() * rw, t.source() * rw);
        for k in 0..rw {
            let src = self.words[j + k];
            self.words[i + k] ^= src;
        }
        Ok(())
    }

    /// Left multiplication by `I + E_{i,j}`; `self` is untouched.
    pub fn apply_transvection(&self, t: Transvection) -> Result<Self> {
        let mut out = self.clone();
        out.apply_transvection_in_place(t)?;
        Ok(out)
    }

    /// Row rank over GF(2), by elimination on a scratch copy.
    pub fn rank(&self) -> usize {
        rank_of_rows(self.words.clone(), self.n, self.row_words, self.n)
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    /// Rank of the leading `k x k` block.
    pub fn leading_rank(&self, k: usize) -> usize {
        assert!(k <= self.n);
        let rw = words_for(k);
        let mask = tail_mask(k);
        let mut scratch = Vec::with_capacity(k * rw);
        for i in 0..k {
            let row = self.row(i);
            for w in 0..rw {
                let mut word = row[w];
                if w + 1 == rw {
                    word &= mask;
                }
                scratch.push(word);
            }
        }
        rank_of_rows(scratch, k, rw, k)
    }

    /// `y = M v` with `y_i = <row_i, v>` computed by word AND and parity.
    /// Cost is `n^2` bit operations and `n * ceil(n / WORD_BITS)` word operations.
    pub fn matvec(&self, v: &BitVector) -> Result<(BitVector, OpCount)> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        let mut y = BitVector::zeros(self.n);
        for i in 0..self.n {
            let parity = self
                .row(i)
                .iter()
                .zip(v.words())
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1;
            if parity == 1 {
                y.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        let n = self.n as u64;
        let ops = OpCount {
            bit_ops: n * n,
            word_ops: n * self.row_words as u64,
        };
        Ok((y, ops))
    }

    /// Row-major key: bit `i*n + j` is entry `(i, j)`.
    pub fn encode_key(&self) -> Result<u64> {
        check_key_width(self.n)?;
        let mut key = 0u64;
        for i in 0..self.n {
            let row = if self.n == 0 { 0 } else { self.row(i)[0] };
            key |= row << (i * self.n);
        }
        Ok(key)
    }

    pub fn decode_key(key: u64, n: usize) -> Result<Self> {
        check_key_width(n)?;
        let mut m = Self::zeros(n);
        let mask = key_row_mask(n);
        for i in 0..n {
            m.words[i * m.row_words] = (key >> (i * n)) & mask;
        }
        Ok(m)
    }

    /// Writes the `GF2M` binary format: magic, version, `n` as u32 LE,
    /// then `ceil(n/8)` bytes per row, LSB first.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(MATRIX_MAGIC)?;
        out.write_all(&[MATRIX_VERSION])?;
        let n = u32::try_from(self.n).map_err(|_| Error::Format("n exceeds u32".into()))?;
        out.write_all(&n.to_le_bytes())?;
        let row_bytes = self.n.div_ceil(8);
        let mut buf = Vec::with_capacity(row_bytes);
        for i in 0..self.n {
            buf.clear();
            buf.extend(self.row(i).iter().flat_map(|w| w.to_le_bytes()));
            out.write_all(&buf[..row_bytes])?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut header = [0u8; 9];
        input.read_exact(&mut header)?;
        if &header[..4] != MATRIX_MAGIC {
            return Err(Error::Format("missing GF2M magic".into()));
        }
        if header[4] != MATRIX_VERSION {
            return Err(Error::Format(format!(
                "unsupported GF2M version {}",
                header[4]
            )));
        }
        let n = u32::from_le_bytes(header[5..9].try_into().unwrap()) as usize;
        let row_bytes = n.div_ceil(8);
        let mut m = Self::zeros(n);
        let mut buf = vec![0u8; m.row_words * 8];
        let mask = tail_mask(n);
        for i in 0..n {
            buf.fill(0);
            input.read_exact(&mut buf[..row_bytes])?;
            for (w, chunk) in buf.chunks_exact(8).enumerate() {
                let mut word = Word::from_le_bytes(chunk.try_into().unwrap());
                if w + 1 == m.row_words {
                    if word & !mask != 0 {
                        return Err(Error::Format(format!(
                            "row {i} has bits set past column {n}"
                        )));
                    }
                    word &= mask;
                }
                m.words[i * m.row_words + w] = word;
            }
        }
        Ok(m)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out)
            .expect("writing to a Vec cannot fail");
        out
    }
}

impl std::fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.n {
            for j in 0..self.n {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
            if i + 1 < self.n {
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// Gaussian elimination pivoting on the lowest-index nonzero column.
fn rank_of_rows(mut rows: Vec<Word>, nrows: usize, rw: usize, ncols: usize) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let (cw, bit) = (col / WORD_BITS, 1 << (col % WORD_BITS));
        let Some(pivot) = (rank..nrows).find(|&r| rows[r * rw + cw] & bit != 0) else {
            continue;
        };
        if pivot != rank {
            for k in 0..rw {
                rows.swap(pivot * rw + k, rank * rw + k);
            }
        }
        for r in rank + 1..nrows {
            if rows[r * rw + cw] & bit != 0 {
                // words before cw are already zero in the pivot row
                for k in cw..rw {
                    let p = rows[rank * rw + k];
                    rows[r * rw + k] ^= p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn check_key_width(n: usize) -> Result<()> {
    if n * n > 64 {
        return Err(Error::KeyTooLarge { n, bits: 64 });
    }
    Ok(())
}

#[inline]
fn key_row_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1 << n) - 1
    }
}

/// Transvection applied directly to a row-major key (`n <= 8`).
#[inline]
pub fn transvect_key(key: u64, n: usize, t: Transvection) -> u64 {
    let row = (key >> (t.source() * n)) & key_row_mask(n);
    key ^ (row << (t.target() * n))
}

/// Rank of a matrix given as a row-major key.
pub fn key_rank(key: u64, n: usize) -> usize {
    let mask = key_row_mask(n);
    let rows: Vec<Word> = (0..n).map(|i| (key >> (i * n)) & mask).collect();
    rank_of_rows(rows, n, 1, n)
}

/// `prod_{k=1}^{n} (1 - 2^{-k})`, the fraction of invertible matrices.
pub fn invertible_fraction(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 - 0.5f64.powi(k as i32)).product()
}

/// `ln |GL_n(F_2)| = sum_k ln(2^n - 2^k)`, computed without forming the product.
pub fn ln_group_order(n: usize) -> f64 {
    (0..n)
        .map(|k| n as f64 * std::f64::consts::LN_2 + (1.0 - 0.5f64.powi((n - k) as i32)).ln())
        .sum()
}

/// `|GL_n(F_2)|` when it fits in a u128 (`n <= 11`).
pub fn group_order(n: usize) -> Option<u128> {
    (0..n).try_fold(1u128, |acc, k| {
        let two_n = 1u128.checked_shl(n as u32)?;
        acc.checked_mul(two_n - (1u128 << k))
    })
}

/// Exact uniform sample from the invertible matrices, by whole-matrix
/// rejection. Returns the matrix and the number of draws used.
pub fn sample_uniform_invertible_counted<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> Result<(BitMatrix, u64)> {
    for attempt in 1..=MAX_SAMPLE_ATTEMPTS {
        let m = BitMatrix::random(n, rng);
        if m.is_invertible() {
            return Ok((m, attempt));
        }
    }
    Err(Error::SamplingExhausted(MAX_SAMPLE_ATTEMPTS))
}

pub fn sample_uniform_invertible<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BitMatrix> {
    sample_uniform_invertible_counted(n, rng).map(|(m, _)| m)
}
