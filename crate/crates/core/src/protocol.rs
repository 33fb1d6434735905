//! Point-push protocols: words in the generators `a1..aN` of the free group of
//! stirrer motions, their action on the adapted loops `d1..d(N+1)` of the
//! punctured disk, and their braid words.
//!
//! Puncture 1 is the stirrer; punctures 2..=N+1 are the obstacles. The loop
//! `d(N+1)` runs clockwise around everything.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegroup::{Automorphism, FreeWord, Letter};

pub const MIN_OBSTACLES: usize = 2;

fn check_obstacles(n: usize) -> Result<()> {
    if n < MIN_OBSTACLES {
        Err(Error::TooFewObstacles {
            min: MIN_OBSTACLES,
            found: n,
        })
    } else {
        Ok(())
    }
}

/// A reduced word in `a1^±1 .. aN^±1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProtocolWord {
    word: FreeWord,
}

impl ProtocolWord {
    pub fn new<I>(n_obstacles: usize, letters: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, i64)>,
    {
        check_obstacles(n_obstacles)?;
        Ok(Self {
            word: FreeWord::reduce(letters, n_obstacles)?,
        })
    }

    pub fn empty(n_obstacles: usize) -> Result<Self> {
        Self::new(n_obstacles, [])
    }

    /// Parse whitespace-separated tokens `a<j>` or `a<j>^-1`.
    pub fn parse(text: &str, n_obstacles: usize) -> Result<Self> {
        let letters = text
            .split_whitespace()
            .map(parse_token)
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_obstacles, letters)
    }

    pub fn n_obstacles(&self) -> usize {
        self.word.rank()
    }

    /// Protocol word length, the cost of the protocol in generator units.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        self.word.letters()
    }

    pub fn as_free_word(&self) -> &FreeWord {
        &self.word
    }

    pub fn concat(&self, other: &ProtocolWord) -> Result<Self> {
        Ok(Self {
            word: self.word.concat(&other.word)?,
        })
    }

    /// Prefix of the first `k` letters and the remaining suffix.
    pub fn split_at(&self, k: usize) -> (ProtocolWord, ProtocolWord) {
        let (a, b) = self.letters().split_at(k);
        let n = self.n_obstacles();
        let mk = |ls: &[Letter]| ProtocolWord {
            word: FreeWord::from_letters(n, ls.iter().copied()).expect("subword of valid word"),
        };
        (mk(a), mk(b))
    }

    /// Uniformly random reduced word with exactly `len` letters.
    pub fn random<R: Rng + ?Sized>(n_obstacles: usize, len: usize, rng: &mut R) -> Result<Self> {
        check_obstacles(n_obstacles)?;
        let mut letters: Vec<Letter> = Vec::with_capacity(len);
        while letters.len() < len {
            let j = rng.random_range(1..=n_obstacles);
            let s = if rng.random_bool(0.5) { 1 } else { -1 };
            let l = Letter::new(j, s)?;
            if letters.last().is_some_and(|&p| p == l.inverse()) {
                continue;
            }
            letters.push(l);
        }
        Ok(Self {
            word: FreeWord::from_letters(n_obstacles, letters)?,
        })
    }
}

fn parse_token(tok: &str) -> Result<(usize, i64)> {
    let bad = || Error::BadToken(tok.to_string());
    let body = tok.strip_prefix('a').ok_or_else(bad)?;
    let (digits, sign) = match body.split_once('^') {
        Some((d, "-1")) => (d, -1),
        Some(_) => return Err(bad()),
        None => (body, 1),
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let j: usize = digits.parse().map_err(|_| bad())?;
    Ok((j, sign))
}

impl fmt::Display for ProtocolWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word.display_with("a"))
    }
}

/// The hypotrochoid protocol `a1 a2 ... aN`.
pub fn hsp(n_obstacles: usize) -> Result<ProtocolWord> {
    ProtocolWord::new(n_obstacles, (1..=n_obstacles).map(|j| (j, 1)))
}

/// Action of `a_j^sign` on the free group on `d1..d(N+1)`.
///
/// `d_j` is conjugated by `P = d(j+1) ... d(N+1) d1 ... d(j-1)`; every other
/// loop is fixed.
pub fn alpha_automorphism(j: usize, sign: i64, n_obstacles: usize) -> Result<Automorphism> {
    check_obstacles(n_obstacles)?;
    if j == 0 || j > n_obstacles {
        return Err(Error::IndexOutOfRange {
            index: j,
            rank: n_obstacles,
        });
    }
    let rank = n_obstacles + 1;
    let p: Vec<Letter> = (j + 1..=rank).chain(1..j).map(Letter::pos).collect();
    let p_inv: Vec<Letter> = p.iter().rev().map(|l| l.inverse()).collect();
    let conj: Vec<Letter> = match sign {
        1 => p_inv.iter().chain([&Letter::pos(j)]).chain(&p).copied().collect(),
        -1 => p.iter().chain([&Letter::pos(j)]).chain(&p_inv).copied().collect(),
        s => return Err(Error::BadSign(s)),
    };
    let images = (1..=rank)
        .map(|i| {
            if i == j {
                FreeWord::from_letters(rank, conj.iter().copied())
            } else {
                FreeWord::generator(rank, i)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Automorphism::from_images(images)
}

/// Induced automorphism of the whole protocol, composed left to right.
pub fn protocol_automorphism(p: &ProtocolWord) -> Automorphism {
    let n = p.n_obstacles();
    p.letters()
        .iter()
        .fold(Automorphism::identity(n + 1), |acc, l| {
            let g = alpha_automorphism(l.index(), l.sign(), n).expect("letter in range");
            acc.then(&g).expect("same rank")
        })
}

/// A word in the standard braid generators `s1..s(n-1)` of `n` strings.
/// No braid relations are applied; only free reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidWord {
    n_strings: usize,
    word: FreeWord,
}

impl BraidWord {
    pub fn n_strings(&self) -> usize {
        self.n_strings
    }

    pub fn letters(&self) -> &[Letter] {
        self.word.letters()
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// `perm[k]` is the string that ends in position `k`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.n_strings).collect();
        for l in self.letters() {
            let i = l.index();
            perm.swap(i - 1, i);
        }
        perm
    }

    pub fn is_pure(&self) -> bool {
        self.permutation().iter().enumerate().all(|(k, &s)| k == s)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word.display_with("s"))
    }
}

/// Braid word of a protocol: `a_i = s1 .. s(i-1) s_i^2 s(i-1)^-1 .. s1^-1`.
pub fn to_braid_word(p: &ProtocolWord) -> BraidWord {
    let n = p.n_obstacles();
    let mut letters = Vec::new();
    for l in p.letters() {
        let i = l.index();
        let core = if l.is_positive() {
            [Letter::pos(i), Letter::pos(i)]
        } else {
            [Letter::neg(i), Letter::neg(i)]
        };
        letters.extend((1..i).map(Letter::pos));
        letters.extend(core);
        letters.extend((1..i).rev().map(Letter::neg));
    }
    BraidWord {
        n_strings: n + 1,
        word: FreeWord::from_letters(n, letters).expect("indices below string count"),
    }
}

/// Entropy per generator: `entropy / len(p)`.
pub fn efficiency_estimate(p: &ProtocolWord, entropy: f64) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::EmptyProtocol);
    }
    Ok(entropy / p.len() as f64)
}
