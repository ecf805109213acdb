//! Time-based authentication with the walk as key generator.
//!
//! The prover runs the walk for `t` steps from the identity and publishes
//! `A_t`. To answer a challenge `x` it replays its moves on `x`, one bit
//! operation per move. Anyone holding only `A_t` falls back to a
//! matrix-vector product costing `n^2` bit operations. "Fast enough" is an
//! operation-count deadline.

use std::fmt;

use crate::chain::{self, Trajectory};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector, OpCount, WORD_BITS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyPair {
    pub public: BitMatrix,
    pub secret: Trajectory,
}

impl KeyPair {
    pub fn n(&self) -> usize {
        self.public.n()
    }

    /// Number of time steps, held steps included.
    pub fn t(&self) -> usize {
        self.secret.len()
    }

    /// Pairs a public key with its secret, checking that they match.
    pub fn from_parts(public: BitMatrix, secret: Trajectory) -> Result<Self> {
        if secret.n() != public.n() {
            return Err(Error::DimensionMismatch {
                expected: public.n(),
                found: secret.n(),
            });
        }
        if secret.replay() != public {
            return Err(Error::InvalidParameter(
                "secret does not replay to the public key".into(),
            ));
        }
        Ok(Self { public, secret })
    }
}

pub fn keygen(n: usize, t: u64, seed: u64) -> Result<KeyPair> {
    keygen_with(n, t, seed, false)
}

/// Key generation with an optional lazy walk; held steps cost the prover nothing.
pub fn keygen_with(n: usize, t: u64, seed: u64, lazy: bool) -> Result<KeyPair> {
    let (secret, public) = chain::run(n, t, seed, lazy)?;
    Ok(KeyPair { public, secret })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Challenge {
    pub x: BitVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Honest,
    Dishonest,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Honest => "honest",
            Role::Dishonest => "dishonest",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Response {
    pub y: BitVector,
    pub ops: OpCount,
    pub role: Role,
}

impl Response {
    /// Text form: `y=<bits>`, `bit_ops=`, `word_ops=`, `role=` lines.
    pub fn to_text(&self) -> String {
        format!(
            "y={}\nbit_ops={}\nword_ops={}\nrole={}\n",
            self.y.to_bit_string(),
            self.ops.bit_ops,
            self.ops.word_ops,
            self.role
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (mut y, mut bit_ops, mut word_ops, mut role) = (None, None, None, None);
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("expected key=value, got {line:?}")))?;
            let number = || {
                value
                    .parse::<u64>()
                    .map_err(|_| Error::Format(format!("bad count {value:?}")))
            };
            match key {
                "y" => y = Some(BitVector::parse_bit_string(value)?),
                "bit_ops" => bit_ops = Some(number()?),
                "word_ops" => word_ops = Some(number()?),
                "role" => {
                    role = Some(match value {
                        "honest" => Role::Honest,
                        "dishonest" => Role::Dishonest,
                        other => return Err(Error::Format(format!("unknown role {other:?}"))),
                    })
                }
                other => return Err(Error::Format(format!("unknown field {other:?}"))),
            }
        }
        let missing = |name: &str| Error::Format(format!("response is missing {name}"));
        Ok(Self {
            y: y.ok_or_else(|| missing("y"))?,
            ops: OpCount {
                bit_ops: bit_ops.ok_or_else(|| missing("bit_ops"))?,
                word_ops: word_ops.ok_or_else(|| missing("word_ops"))?,
            },
            role: role.ok_or_else(|| missing("role"))?,
        })
    }
}

fn check_dim(n: usize, c: &Challenge) -> Result<()> {
    if c.x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.x.len(),
        });
    }
    Ok(())
}

/// Replays the secret moves on the challenge: `y = A_t x`.
pub fn respond_honest(kp: &KeyPair, c: &Challenge) -> Result<Response> {
    check_dim(kp.n(), c)?;
    let mut y = c.x.clone();
    let mut moves = 0u64;
    for t in kp.secret.moves() {
        y.apply_transvection(t)?;
        moves += 1;
    }
    Ok(Response {
        y,
        ops: OpCount {
            bit_ops: moves,
            word_ops: moves,
        },
        role: Role::Honest,
    })
}

/// Matrix-vector product from the public key alone.
pub fn respond_dishonest(public: &BitMatrix, c: &Challenge) -> Result<Response> {
    let (y, ops) = public.matvec(&c.x)?;
    Ok(Response {
        y,
        ops,
        role: Role::Dishonest,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    WrongAnswer,
    TooSlow,
}

impl Verdict {
    pub fn accepted(self) -> bool {
        self == Verdict::Accept
    }
}

/// Accepts iff `r.y = A x` and `r.ops.bit_ops <= deadline_ops`. A wrong
/// answer is rejected whatever its cost.
pub fn verify(public: &BitMatrix, c: &Challenge, r: &Response, deadline_ops: u64) -> Verdict {
    let correct = public.matvec(&c.x).is_ok_and(|(y, _)| y == r.y);
    if !correct {
        Verdict::WrongAnswer
    } else if r.ops.bit_ops > deadline_ops {
        Verdict::TooSlow
    } else {
        Verdict::Accept
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparationRow {
    pub n: u64,
    pub honest_bit_ops: u64,
    pub dishonest_bit_ops: u64,
    pub dishonest_word_ops: u64,
    /// `dishonest_bit_ops / honest_bit_ops`.
    pub ratio: f64,
}

/// Cost comparison for a key of `t` moves in dimension `n`; arithmetic only.
pub fn separation_report(n: u64, t: u64) -> SeparationRow {
    let dishonest = n * n;
    SeparationRow {
        n,
        honest_bit_ops: t,
        dishonest_bit_ops: dishonest,
        dishonest_word_ops: n * n.div_ceil(WORD_BITS as u64),
        ratio: dishonest as f64 / t as f64,
    }
}
