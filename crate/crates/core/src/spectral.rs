//! Exact spectra of Z_2^d(l) in the sign-vector (Hadamard) eigenbasis.
//!
//! Every generator mask `a` contributes the character `prod_{i: a_i = 1} s_i`
//! to the eigenvalue of the product eigenvector `|s_1> ⊗ ... ⊗ |s_d>`, so all
//! eigenvalues are integers and are stored exactly.

use std::fmt;

use serde::Serialize;

use crate::bits::{BitVector, MAX_DIM};
use crate::cayley::{CayleyGraph, CoordPerm, GeneratingSet};
use crate::error::{check_range, Error, Result};

/// Default absolute tolerance for [`rational_ratio_check`].
pub const RATIO_TOLERANCE: f64 = 1e-9;
/// Largest denominator accepted when rationalizing a ratio.
pub const RATIO_DENOMINATOR_CAP: u64 = 1_000_000;

/// Product eigenvector of the Kronecker-sum adjacency, one sign per slot.
///
/// Stored as the set of slots holding `-1`, packed like a [`BitVector`];
/// that packed value is also the Walsh–Hadamard row index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SignVector {
    negatives: BitVector,
}

impl SignVector {
    pub fn from_signs(signs: &[i8]) -> Result<Self> {
        let bits = signs
            .iter()
            .map(|&s| match s {
                1 => Ok(0),
                -1 => Ok(1),
                _ => Err(Error::Invalid(format!("sign {s} is not +1 or -1"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self {
            negatives: BitVector::from_bits(&bits)?,
        })
    }

    pub fn from_negatives(negatives: BitVector) -> Self {
        Self { negatives }
    }

    /// Hadamard row index (bit set where the sign is -1).
    pub fn index(self) -> usize {
        self.negatives.index()
    }

    pub fn dim(self) -> usize {
        self.negatives.dim()
    }

    pub fn negatives(self) -> BitVector {
        self.negatives
    }

    /// Sign `s_i` for 1-based `i`.
    pub fn sign(self, i: usize) -> i8 {
        if self.negatives.bit(i) == 1 {
            -1
        } else {
            1
        }
    }

    pub fn signs(self) -> Vec<i8> {
        (1..=self.dim()).map(|i| self.sign(i)).collect()
    }

    /// `prod_{i: mask_i = 1} s_i`, i.e. the eigenvalue of the Kronecker term
    /// with C in the masked slots.
    pub fn character(self, mask: BitVector) -> i64 {
        if (self.index() & mask.index()).count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Node-basis amplitude `2^(-d/2) prod_i s_i^{x_i}`.
    pub fn amplitude(self, node: usize) -> f64 {
        let norm = (-(self.dim() as f64) / 2.0).exp2();
        if (self.index() & node).count_ones().is_multiple_of(2) {
            norm
        } else {
            -norm
        }
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.dim() {
            f.write_str(if self.sign(i) > 0 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Eigenvalue as the direct sum of generator characters under `perm`.
pub fn eigenvalue_by_summation(s: SignVector, gen: &GeneratingSet, perm: &CoordPerm) -> Result<i64> {
    if s.dim() != gen.dim() || perm.dim() != gen.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            actual: s.dim(),
        });
    }
    Ok(gen
        .elements()
        .iter()
        .map(|&a| s.character(perm.apply(a)))
        .sum())
}

/// Closed form for the un-rotated Z_2^d(l).
///
/// The prefix terms (generators supported on the first `l` slots, `2^l - 1`
/// of them) contribute `2^l - 1` when `s_1..s_l` are all +1 and `-1`
/// otherwise; each remaining unit generator contributes its own sign.
pub fn eigenvalue_closed_form(s: SignVector, d: usize, l: usize) -> Result<i64> {
    check_range("d", d, 1, MAX_DIM)?;
    check_range("l", l, 1, d)?;
    if s.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: s.dim(),
        });
    }
    let prefix_clean = (1..=l).all(|i| s.sign(i) > 0);
    let prefix = if prefix_clean { (1i64 << l) - 1 } else { -1 };
    let minus = (l + 1..=d).filter(|&i| s.sign(i) < 0).count() as i64;
    let plus = (d - l) as i64 - minus;
    Ok(prefix + plus - minus)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Slots whose `-1` count decides the parity class, which are also the
/// slots flipped by the evolution at `tau = pi/2`.
///
/// `l = 1` counts every slot (the plain hypercube); `1 < l <= d` counts the
/// last `d - l` slots, carried through `perm`. At `l = d` the mask is empty.
pub fn parity_mask(d: usize, l: usize, perm: &CoordPerm) -> Result<BitVector> {
    check_range("d", d, 1, MAX_DIM)?;
    check_range("l", l, 1, d)?;
    if perm.dim() != d {
        return Err(Error::InvalidPermutation {
            perm: perm.images().to_vec(),
            d,
        });
    }
    let slots: Vec<usize> = if l == 1 {
        (1..=d).collect()
    } else {
        (l + 1..=d).map(|i| perm.image(i)).collect()
    };
    BitVector::from_coords(&slots, d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectralEntry {
    pub sign: SignVector,
    pub eigenvalue: i64,
    pub parity: Parity,
}

/// All `2^d` eigenpairs of a (possibly rotated) Z_2^d(l), indexed by
/// Hadamard row, with parity classes and the phase offset `k`.
#[derive(Clone, Debug)]
pub struct SpectralTable {
    d: usize,
    l: usize,
    perm: CoordPerm,
    eigenvalues: Vec<i64>,
    parity_mask: BitVector,
    k: i64,
}

pub fn build_spectral_table(d: usize, l: usize, perm: &CoordPerm) -> Result<SpectralTable> {
    let parity_mask = parity_mask(d, l, perm)?;
    // Rotating the generators by perm is the same as rotating the sign
    // vector by perm^-1 in the un-rotated closed form.
    let inverse = perm.inverse();
    let eigenvalues = (0..1usize << d)
        .map(|b| {
            let s = SignVector::from_negatives(inverse.apply(BitVector::new(b, d)?));
            eigenvalue_closed_form(s, d, l)
        })
        .collect::<Result<Vec<_>>>()?;
    let parity = |b: usize| {
        if (b & parity_mask.index()).count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    };
    let classified: Vec<(i64, Parity)> = eigenvalues
        .iter()
        .enumerate()
        .map(|(b, &e)| (e, parity(b)))
        .collect();
    let k = phase_offset(&classified)?;
    Ok(SpectralTable {
        d,
        l,
        perm: perm.clone(),
        eigenvalues,
        parity_mask,
        k,
    })
}

pub fn spectral_table_for(graph: &CayleyGraph) -> Result<SpectralTable> {
    build_spectral_table(graph.dim(), graph.level(), graph.coord_perm())
}

impl SpectralTable {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn level(&self) -> usize {
        self.l
    }

    pub fn coord_perm(&self) -> &CoordPerm {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn phase_offset(&self) -> i64 {
        self.k
    }

    pub fn parity_mask(&self) -> BitVector {
        self.parity_mask
    }

    /// Eigenvalues indexed by Hadamard row.
    pub fn eigenvalues(&self) -> &[i64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, s: SignVector) -> i64 {
        self.eigenvalues[s.index()]
    }

    pub fn parity(&self, s: SignVector) -> Parity {
        if s.character(self.parity_mask) == 1 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn entry(&self, b: usize) -> SpectralEntry {
        let sign = SignVector::from_negatives(BitVector::new(b, self.d).expect("row in range"));
        SpectralEntry {
            sign,
            eigenvalue: self.eigenvalues[b],
            parity: self.parity(sign),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = SpectralEntry> + '_ {
        (0..self.len()).map(|b| self.entry(b))
    }

    /// Entries ordered by eigenvalue descending, then sign string ascending.
    pub fn sorted_entries(&self) -> Vec<SpectralEntry> {
        let mut v: Vec<SpectralEntry> = self.entries().collect();
        v.sort_by(|a, b| {
            b.eigenvalue
                .cmp(&a.eigenvalue)
                .then_with(|| a.sign.to_string().cmp(&b.sign.to_string()))
        });
        v
    }

    pub fn max_eigenvalue(&self) -> i64 {
        *self.eigenvalues.iter().max().expect("non-empty table")
    }

    pub fn min_eigenvalue(&self) -> i64 {
        *self.eigenvalues.iter().min().expect("non-empty table")
    }
}

/// Chooses `k = lambda_max mod 4` and checks that every even eigenvalue
/// satisfies `lambda - k ≡ 0` and every odd one `lambda - k + 2 ≡ 0 (mod 4)`.
pub fn phase_offset(entries: &[(i64, Parity)]) -> Result<i64> {
    let max = entries
        .iter()
        .map(|&(e, _)| e)
        .max()
        .ok_or_else(|| Error::Invalid("empty spectrum".into()))?;
    let k = max.rem_euclid(4);
    for &(e, parity) in entries {
        let shifted = match parity {
            Parity::Even => e - k,
            Parity::Odd => e - k + 2,
        };
        if shifted.rem_euclid(4) != 0 {
            return Err(Error::NoValidOffset { eigenvalue: e, k });
        }
    }
    Ok(k)
}

/// Best rational approximation `p/q` from the continued fraction of `x`
/// that meets `|x - p/q| * q^2 <= tol`, provided `q <= cap`.
///
/// The `q^2` scaling separates exact ratios carried in floating point from
/// irrationals: the convergents of an irrational satisfy
/// `|x - p/q| * q^2 ~ 1 / a_{n+1}`, which stays far above `tol` unless the
/// expansion has an enormous partial quotient.
pub fn rationalize(x: f64, tol: f64, cap: u64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut p_prev, mut p) = (1i128, x.floor() as i128);
    let (mut q_prev, mut q) = (0i128, 1i128);
    let mut rem = x - x.floor();
    loop {
        let err = (x - p as f64 / q as f64).abs();
        if err * (q as f64) * (q as f64) <= tol {
            return Some((p as i64, q as u64));
        }
        if rem == 0.0 {
            return None;
        }
        let inv = 1.0 / rem;
        let a = inv.floor();
        rem = inv - a;
        let a = a as i128;
        let (p_next, q_next) = (a * p + p_prev, a * q + q_prev);
        if q_next > cap as i128 || q_next <= 0 {
            return None;
        }
        (p_prev, p, q_prev, q) = (p, p_next, q, q_next);
    }
}

fn distinct_sorted(values: &[f64], tol: f64) -> Vec<f64> {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for x in v {
        match out.last() {
            Some(&last) if (x - last).abs() <= tol => {}
            _ => out.push(x),
        }
    }
    out
}

/// True iff every ratio `(E_i - E_j) / (E_i' - E_j')` of eigenvalue
/// differences is rational.
///
/// All differences are integer combinations of the gaps from the lowest
/// level, so it suffices that each `(E_i - E_0) / (E_max - E_0)` is
/// rational. Spectra with fewer than three distinct levels pass trivially.
pub fn rational_ratio_check(eigenvalues: &[f64], tol: f64) -> bool {
    let levels = distinct_sorted(eigenvalues, tol);
    if levels.len() < 3 {
        return true;
    }
    let base = levels[0];
    let span = levels[levels.len() - 1] - base;
    levels[1..levels.len() - 1]
        .iter()
        .all(|&e| rationalize((e - base) / span, tol, RATIO_DENOMINATOR_CAP).is_some())
}
