//! Elements of the group Z_2^d.
//!
//! A [`BitVector`] stores its coordinates packed into an integer with `x_1`
//! as the most significant bit, so the packed value is exactly the 0-based
//! node index and `index + 1` is the node label used in cycle notation.

use std::fmt;
use std::str::FromStr;

use crate::error::{check_range, Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BitVector {
    index: u32,
    d: u8,
}

impl BitVector {
    pub fn new(index: usize, d: usize) -> Result<Self> {
        check_range("d", d, 1, MAX_DIM)?;
        check_range("node index", index, 0, (1usize << d) - 1)?;
        Ok(Self {
            index: index as u32,
            d: d as u8,
        })
    }

    pub fn zero(d: usize) -> Result<Self> {
        Self::new(0, d)
    }

    pub fn ones(d: usize) -> Result<Self> {
        check_range("d", d, 1, MAX_DIM)?;
        Self::new((1usize << d) - 1, d)
    }

    /// Builds a vector from its coordinates `x_1..x_d`, each 0 or 1.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let d = bits.len();
        check_range("d", d, 1, MAX_DIM)?;
        let mut index = 0usize;
        for &b in bits {
            if b > 1 {
                return Err(Error::Invalid(format!("bit value {b} is not 0 or 1")));
            }
            index = (index << 1) | b as usize;
        }
        Self::new(index, d)
    }

    /// Vector with ones exactly at the given 1-based coordinates.
    pub fn from_coords(coords: &[usize], d: usize) -> Result<Self> {
        check_range("d", d, 1, MAX_DIM)?;
        let mut index = 0usize;
        for &c in coords {
            check_range("coordinate", c, 1, d)?;
            index |= 1 << (d - c);
        }
        Self::new(index, d)
    }

    /// 1-based node label.
    pub fn from_label(label: usize, d: usize) -> Result<Self> {
        check_range("d", d, 1, MAX_DIM)?;
        check_range("node label", label, 1, 1usize << d)?;
        Self::new(label - 1, d)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.index as usize
    }

    #[inline]
    pub fn label(self) -> usize {
        self.index as usize + 1
    }

    #[inline]
    pub fn dim(self) -> usize {
        self.d as usize
    }

    /// Coordinate `x_i` for 1-based `i`.
    pub fn bit(self, i: usize) -> u8 {
        assert!(i >= 1 && i <= self.dim(), "coordinate {i} out of range");
        ((self.index >> (self.dim() - i)) & 1) as u8
    }

    pub fn bits(self) -> Vec<u8> {
        (1..=self.dim()).map(|i| self.bit(i)).collect()
    }

    pub fn weight(self) -> usize {
        self.index.count_ones() as usize
    }

    pub fn is_zero(self) -> bool {
        self.index == 0
    }

    /// Group operation (addition mod 2). Both operands must share `d`.
    pub fn xor(self, other: Self) -> Self {
        assert_eq!(self.d, other.d, "xor of vectors with different dimensions");
        Self {
            index: self.index ^ other.index,
            d: self.d,
        }
    }

    /// 1-based coordinates holding a 1.
    pub fn ones_positions(self) -> Vec<usize> {
        (1..=self.dim()).filter(|&i| self.bit(i) == 1).collect()
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 1..=self.dim() {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Invalid(format!("'{s}' is not a bit string"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bits(&bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x1_is_most_significant() {
        let v = BitVector::from_bits(&[1, 1, 0]).unwrap();
        assert_eq!(v.index(), 6);
        assert_eq!(v.label(), 7);
        assert_eq!(v.bit(1), 1);
        assert_eq!(v.bit(3), 0);
        assert_eq!(v.to_string(), "110");
    }

    #[test]
    fn index_is_a_bijection() {
        for d in 1..=6 {
            let mut seen = std::collections::HashSet::new();
            for idx in 0..(1 << d) {
                let v = BitVector::new(idx, d).unwrap();
                let back = BitVector::from_bits(&v.bits()).unwrap();
                assert_eq!(back.index(), idx);
                assert!(seen.insert(v.bits()));
            }
        }
    }

    #[test]
    fn bounds() {
        assert!(BitVector::new(0, 0).is_err());
        assert!(BitVector::new(0, 17).is_err());
        assert!(BitVector::new(8, 3).is_err());
        assert!(BitVector::from_label(0, 3).is_err());
        assert_eq!(BitVector::from_label(8, 3).unwrap().index(), 7);
        assert!("10a".parse::<BitVector>().is_err());
        assert_eq!("0111".parse::<BitVector>().unwrap().weight(), 3);
    }

    #[test]
    fn coords() {
        let v = BitVector::from_coords(&[1, 3], 4).unwrap();
        assert_eq!(v.to_string(), "1010");
        assert_eq!(v.ones_positions(), vec![1, 3]);
        assert!(BitVector::from_coords(&[5], 4).is_err());
    }
}
