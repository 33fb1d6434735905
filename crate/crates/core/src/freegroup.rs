//! Reduced words in finitely generated free groups and their automorphisms.
//!
//! Words are flat sequences of signed generator indices, freely reduced on
//! construction. Automorphisms are given by the images of the generators and
//! compose left to right: `a.then(&b)` first applies `a`, then `b`.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::ExactMatrix;

/// A generator or its inverse. Stored as a nonzero signed index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(i32);

impl Letter {
    pub fn new(index: usize, sign: i64) -> Result<Self> {
        if index == 0 {
            return Err(Error::ZeroIndex);
        }
        let idx = i32::try_from(index).map_err(|_| Error::IndexOutOfRange {
            index,
            rank: i32::MAX as usize,
        })?;
        match sign {
            1 => Ok(Letter(idx)),
            -1 => Ok(Letter(-idx)),
            s => Err(Error::BadSign(s)),
        }
    }

    pub(crate) fn pos(index: usize) -> Self {
        debug_assert!(index > 0);
        Letter(index as i32)
    }

    pub(crate) fn neg(index: usize) -> Self {
        debug_assert!(index > 0);
        Letter(-(index as i32))
    }

    /// 1-based generator index.
    pub fn index(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn sign(self) -> i64 {
        if self.0 > 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }
}

/// Push `l` onto a freely reduced stack, cancelling against the top.
#[inline]
fn push_reduced(stack: &mut Vec<Letter>, l: Letter) {
    if stack.last().is_some_and(|&top| top.0 == -l.0) {
        stack.pop();
    } else {
        stack.push(l);
    }
}

/// A freely reduced word in the free group of a given rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreeWord {
    rank: usize,
    letters: Vec<Letter>,
}

impl FreeWord {
    pub fn empty(rank: usize) -> Self {
        Self {
            rank,
            letters: Vec::new(),
        }
    }

    /// The single-letter word `x_index`.
    pub fn generator(rank: usize, index: usize) -> Result<Self> {
        Self::from_letters(rank, [Letter::new(index, 1)?])
    }

    /// Validate and freely reduce a raw `(index, sign)` sequence.
    pub fn reduce<I>(raw: I, rank: usize) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, i64)>,
    {
        let letters = raw
            .into_iter()
            .map(|(i, s)| Letter::new(i, s))
            .collect::<Result<Vec<_>>>()?;
        Self::from_letters(rank, letters)
    }

    pub fn from_letters<I>(rank: usize, letters: I) -> Result<Self>
    where
        I: IntoIterator<Item = Letter>,
    {
        let mut stack = Vec::new();
        for l in letters {
            if l.index() > rank {
                return Err(Error::IndexOutOfRange {
                    index: l.index(),
                    rank,
                });
            }
            push_reduced(&mut stack, l);
        }
        Ok(Self {
            rank,
            letters: stack,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Word length of the reduced form.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| w[0].0 != -w[1].0)
    }

    pub fn inverse(&self) -> Self {
        Self {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Reduced product `self · other`.
    pub fn concat(&self, other: &FreeWord) -> Result<Self> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: other.rank,
            });
        }
        let mut stack = self.letters.clone();
        for &l in &other.letters {
            push_reduced(&mut stack, l);
        }
        Ok(Self {
            rank: self.rank,
            letters: stack,
        })
    }

    /// Number of occurrences of each generator or its inverse.
    pub fn occurrences(&self) -> OccurrenceVector {
        let mut counts = vec![0u64; self.rank];
        for l in &self.letters {
            counts[l.index() - 1] += 1;
        }
        OccurrenceVector { counts }
    }

    /// Exponent sum per generator, i.e. the image in the abelianization.
    pub fn signed_counts(&self) -> Vec<i64> {
        let mut counts = vec![0i64; self.rank];
        for l in &self.letters {
            counts[l.index() - 1] += l.sign();
        }
        counts
    }

    /// Render with a custom generator symbol, e.g. `d2^-1 d1`.
    pub fn display_with(&self, symbol: &str) -> String {
        self.letters
            .iter()
            .map(|l| {
                if l.is_positive() {
                    format!("{symbol}{}", l.index())
                } else {
                    format!("{symbol}{}^-1", l.index())
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&self.display_with("x"))
        }
    }
}

/// Row vector of per-generator occurrence counts of a reduced word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccurrenceVector {
    pub counts: Vec<u64>,
}

impl OccurrenceVector {
    pub fn norm1(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// An endomorphism of a free group, given by the image of each generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Automorphism {
    rank: usize,
    images: Vec<FreeWord>,
}

/// Flattened lookup of the image of every letter (generator or inverse).
struct Substitution {
    table: Vec<Vec<Letter>>,
}

impl Substitution {
    fn new(a: &Automorphism) -> Self {
        let mut table = Vec::with_capacity(2 * a.rank);
        for img in &a.images {
            table.push(img.letters.clone());
            table.push(img.inverse().letters);
        }
        Self { table }
    }

    #[inline]
    fn image(&self, l: Letter) -> &[Letter] {
        let slot = 2 * (l.index() - 1) + usize::from(!l.is_positive());
        &self.table[slot]
    }

    /// Substitute and reduce; `None` once the working word exceeds `cap`.
    fn apply(&self, w: &[Letter], cap: usize) -> Option<Vec<Letter>> {
        let mut out: Vec<Letter> = Vec::new();
        for &l in w {
            for &m in self.image(l) {
                push_reduced(&mut out, m);
            }
            if out.len() > cap {
                return None;
            }
        }
        Some(out)
    }
}

impl Automorphism {
    pub fn identity(rank: usize) -> Self {
        let images = (1..=rank)
            .map(|i| FreeWord {
                rank,
                letters: vec![Letter::pos(i)],
            })
            .collect();
        Self { rank, images }
    }

    /// Build from generator images; every image must be reduced and of the same rank.
    pub fn from_images(images: Vec<FreeWord>) -> Result<Self> {
        let rank = images.len();
        for (i, img) in images.iter().enumerate() {
            if img.rank != rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    found: img.rank,
                });
            }
            if !img.is_reduced() {
                return Err(Error::UnreducedImage(i + 1));
            }
        }
        Ok(Self { rank, images })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    /// Image of generator `index` (1-based).
    pub fn image(&self, index: usize) -> &FreeWord {
        &self.images[index - 1]
    }

    pub fn apply(&self, w: &FreeWord) -> Result<FreeWord> {
        if w.rank != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: w.rank,
            });
        }
        let letters = Substitution::new(self)
            .apply(&w.letters, usize::MAX)
            .expect("uncapped substitution");
        Ok(FreeWord {
            rank: self.rank,
            letters,
        })
    }

    /// `self` followed by `next`: the result maps `w` to `next(self(w))`.
    pub fn then(&self, next: &Automorphism) -> Result<Automorphism> {
        if next.rank != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: next.rank,
            });
        }
        let sub = Substitution::new(next);
        let images = self
            .images
            .iter()
            .map(|img| FreeWord {
                rank: self.rank,
                letters: sub.apply(&img.letters, usize::MAX).expect("uncapped"),
            })
            .collect();
        Ok(Automorphism {
            rank: self.rank,
            images,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, img)| img.letters == [Letter::pos(i + 1)])
    }

    /// `A[i][j]` = occurrences of generator `j` in the image of generator `i`.
    pub fn incidence_matrix(&self) -> ExactMatrix {
        let n = self.rank;
        let mut m = ExactMatrix::zeros(n);
        for (i, img) in self.images.iter().enumerate() {
            for (j, c) in img.occurrences().counts.into_iter().enumerate() {
                m.set(i, j, BigInt::from(c));
            }
        }
        m
    }
}

/// `compose(a, b)` maps `w` to `b(a(w))`.
pub fn compose(a: &Automorphism, b: &Automorphism) -> Result<Automorphism> {
    a.then(b)
}

/// Lengths of the iterates `a^n(x_seed)` and the derived growth-rate estimates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub seed: usize,
    /// `lengths[n]` is the reduced length of `a^n(x_seed)`; `lengths[0] == 1`.
    pub lengths: Vec<usize>,
    /// Consecutive ratios `lengths[n+1] / lengths[n]`.
    pub ratios: Vec<f64>,
    /// n-th roots `lengths[n]^(1/n)` for `n >= 1`.
    pub root_rates: Vec<f64>,
    /// Iteration stopped early because the length cap was hit.
    pub truncated: bool,
    pub length_cap: usize,
}

impl GrowthReport {
    pub fn iterations(&self) -> usize {
        self.lengths.len() - 1
    }

    /// Latest consecutive-length ratio, the estimate of the growth rate.
    pub fn rate_estimate(&self) -> Option<f64> {
        self.ratios.last().copied()
    }

    pub fn entropy_estimate(&self) -> Option<f64> {
        self.rate_estimate().map(f64::ln)
    }
}

/// Iterate `a` on generator `seed_index` up to `n_iters` times, recording lengths.
///
/// Stops early (flagging `truncated`) when a reduced image would exceed
/// `length_cap` letters. Fails if fewer than two iterations fit under the cap.
pub fn growth_estimate(
    a: &Automorphism,
    seed_index: usize,
    n_iters: usize,
    length_cap: usize,
) -> Result<GrowthReport> {
    if n_iters == 0 {
        return Err(Error::NoIterations);
    }
    let mut word = FreeWord::generator(a.rank, seed_index)?.letters;
    let sub = Substitution::new(a);
    let mut lengths = vec![word.len()];
    let mut truncated = false;
    for _ in 0..n_iters {
        match sub.apply(&word, length_cap) {
            Some(next) => {
                word = next;
                lengths.push(word.len());
            }
            None => {
                truncated = true;
                break;
            }
        }
    }
    let completed = lengths.len() - 1;
    if truncated && completed < n_iters.min(2) {
        return Err(Error::LengthCapExceeded {
            cap: length_cap,
            completed,
        });
    }
    let ratios = lengths
        .windows(2)
        .map(|w| w[1] as f64 / w[0] as f64)
        .collect();
    let root_rates = lengths
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, &l)| (l as f64).powf(1.0 / n as f64))
        .collect();
    Ok(GrowthReport {
        seed: seed_index,
        lengths,
        ratios,
        root_rates,
        truncated,
        length_cap,
    })
}
