//! The transvection walk: pick an ordered pair of distinct rows uniformly and
//! add the second to the first.

use std::io::{Read, Write};

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, Transvection, Word, WORD_BITS};
use crate::seeding;

const TRAJECTORY_MAGIC: &[u8; 4] = b"TVWK";
const TRAJECTORY_VERSION: u8 = 0x01;
const HOLD_MARKER: u16 = 0xFFFF;

/// One recorded time step of a (possibly lazy) walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Move(Transvection),
    Hold,
}

/// Uniform move among the `n(n-1)` ordered pairs.
#[inline]
pub fn random_move<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Transvection {
    Transvection::from_pair_index(rng.gen_range(0..n * (n - 1)), n)
}

/// One step of the non-lazy walk from `x`.
pub fn step<R: Rng + ?Sized>(x: &BitMatrix, rng: &mut R) -> Result<(BitMatrix, Transvection)> {
    let n = x.n();
    if n < 2 {
        return Err(Error::TooSmall(n));
    }
    let t = random_move(n, rng);
    Ok((x.apply_transvection(t)?, t))
}

/// One step of the walk, lazy or not; `Step::Hold` leaves `x` unchanged.
#[inline]
pub fn step_in_place<R: Rng + ?Sized>(x: &mut BitMatrix, lazy: bool, rng: &mut R) -> Step {
    if lazy && rng.gen::<bool>() {
        return Step::Hold;
    }
    let t = random_move(x.n(), rng);
    x.apply_transvection_in_place(t)
        .expect("random_move stays in range");
    Step::Move(t)
}

/// The prover's secret: the sequence of moves from the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    n: usize,
    /// Master seed the walk was drawn from; unknown for trajectories read from disk.
    seed: Option<u64>,
    lazy: bool,
    steps: Vec<Step>,
}

impl Trajectory {
    pub fn new(n: usize, seed: Option<u64>, lazy: bool, steps: Vec<Step>) -> Result<Self> {
        for s in &steps {
            if let Step::Move(t) = s {
                t.check(n)?;
            }
        }
        Ok(Self {
            n,
            seed,
            lazy,
            steps,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn is_lazy(&self) -> bool {
        self.lazy
    }

    /// Number of time steps, held steps included.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// The moves actually applied, in order.
    pub fn moves(&self) -> impl Iterator<Item = Transvection> + '_ {
        self.steps.iter().filter_map(|s| match s {
            Step::Move(t) => Some(*t),
            Step::Hold => None,
        })
    }

    pub fn move_count(&self) -> usize {
        self.moves().count()
    }

    /// Final state when the moves are replayed from the identity.
    pub fn replay(&self) -> BitMatrix {
        let mut x = BitMatrix::identity(self.n);
        for t in self.moves() {
            x.apply_transvection_in_place(t)
                .expect("trajectory moves are validated on construction");
        }
        x
    }

    /// `TVWK` format: magic, version, n (u32 LE), t (u64 LE), lazy flag (u8),
    /// then `t` records of `(i: u16 LE, j: u16 LE)`; held steps are `(0xFFFF, 0xFFFF)`.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let n = u32::try_from(self.n).map_err(|_| Error::Format("n exceeds u32".into()))?;
        let mut buf = Vec::with_capacity(18 + 4 * self.steps.len());
        buf.extend_from_slice(TRAJECTORY_MAGIC);
        buf.push(TRAJECTORY_VERSION);
        buf.extend_from_slice(&n.to_le_bytes());
        buf.extend_from_slice(&(self.steps.len() as u64).to_le_bytes());
        buf.push(u8::from(self.lazy));
        for s in &self.steps {
            let (i, j) = match s {
                Step::Move(t) => (t.target() as u16, t.source() as u16),
                Step::Hold => (HOLD_MARKER, HOLD_MARKER),
            };
            buf.extend_from_slice(&i.to_le_bytes());
            buf.extend_from_slice(&j.to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut header = [0u8; 18];
        input.read_exact(&mut header)?;
        if &header[..4] != TRAJECTORY_MAGIC {
            return Err(Error::Format("missing TVWK magic".into()));
        }
        if header[4] != TRAJECTORY_VERSION {
            return Err(Error::Format(format!(
                "unsupported TVWK version {}",
                header[4]
            )));
        }
        let n = u32::from_le_bytes(header[5..9].try_into().unwrap()) as usize;
        let t = u64::from_le_bytes(header[9..17].try_into().unwrap());
        let lazy = match header[17] {
            0 => false,
            1 => true,
            other => return Err(Error::Format(format!("bad laziness flag {other}"))),
        };
        let t = usize::try_from(t).map_err(|_| Error::Format("step count too large".into()))?;
        let mut body = Vec::new();
        input.read_to_end(&mut body)?;
        if body.len() != 4 * t {
            return Err(Error::Format(format!(
                "expected {} move bytes, found {}",
                4 * t,
                body.len()
            )));
        }
        let steps = body
            .chunks_exact(4)
            .map(|rec| {
                let i = u16::from_le_bytes([rec[0], rec[1]]);
                let j = u16::from_le_bytes([rec[2], rec[3]]);
                match (i, j) {
                    (HOLD_MARKER, HOLD_MARKER) => Ok(Step::Hold),
                    (HOLD_MARKER, _) | (_, HOLD_MARKER) => {
                        Err(Error::Format("half-marked hold record".into()))
                    }
                    _ => Transvection::new(i as usize, j as usize).map(Step::Move),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, None, lazy, steps)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out)
            .expect("writing to a Vec cannot fail");
        out
    }
}

/// Runs `t` steps from the identity. Fully determined by `(n, t, seed, lazy)`.
pub fn run(n: usize, t: u64, seed: u64, lazy: bool) -> Result<(Trajectory, BitMatrix)> {
    if t > 0 && n < 2 {
        return Err(Error::TooSmall(n));
    }
    let mut rng = seeding::stream_rng(seed, seeding::WALK, 0);
    let mut x = BitMatrix::identity(n);
    let steps = (0..t)
        .map(|_| step_in_place(&mut x, lazy, &mut rng))
        .collect();
    Ok((Trajectory::new(n, Some(seed), lazy, steps)?, x))
}

/// The walk seen through its first `k` columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionState {
    n: usize,
    k: usize,
    row_words: usize,
    words: Vec<Word>,
}

impl ProjectionState {
    /// First `k` columns of the identity.
    pub fn identity(n: usize, k: usize) -> Result<Self> {
        Self::from_matrix(&BitMatrix::identity(n), k)
    }

    pub fn from_matrix(x: &BitMatrix, k: usize) -> Result<Self> {
        let n = x.n();
        if k == 0 || k > n {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= k <= n, got k = {k}, n = {n}"
            )));
        }
        let row_words = k.div_ceil(WORD_BITS);
        let mut words = vec![0; n * row_words];
        for i in 0..n {
            for c in 0..k {
                if x.get(i, c) {
                    words[i * row_words + c / WORD_BITS] |= 1 << (c % WORD_BITS);
                }
            }
        }
        Ok(Self {
            n,
            k,
            row_words,
            words,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, c: usize) -> bool {
        assert!(i < self.n && c < self.k);
        (self.words[i * self.row_words + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn apply_transvection(&mut self, t: Transvection) -> Result<()> {
        t.check(self.n)?;
        let rw = self.row_words;
        for c in 0..rw {
            let src = self.words[t.source() * rw + c];
            self.words[t.target() * rw + c] ^= src;
        }
        Ok(())
    }

    /// Applies a uniformly random transvection to the slice.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Transvection> {
        if self.n < 2 {
            return Err(Error::TooSmall(self.n));
        }
        let t = random_move(self.n, rng);
        self.apply_transvection(t)?;
        Ok(t)
    }
}

/// Functional form of [`ProjectionState::step`].
pub fn step_projection<R: Rng + ?Sized>(
    s: &ProjectionState,
    rng: &mut R,
) -> Result<ProjectionState> {
    let mut next = s.clone();
    next.step(rng)?;
    Ok(next)
}
