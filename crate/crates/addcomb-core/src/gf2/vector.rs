use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension supported by plain set operations.
pub const SET_DIM_MAX: u32 = 64;

/// An element of F2^n: a bit pattern together with its explicit dimension.
///
/// Coordinate 1 is the most significant bit of the `n`-character binary
/// rendering, i.e. bit position `n - i` of `bits` holds coordinate `i`.
/// Addition is bitwise XOR and every vector is its own inverse.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct F2Vector {
    bits: u64,
    dim: u32,
}

impl F2Vector {
    pub fn new(bits: u64, dim: u32) -> Result<Self> {
        check_dim(dim)?;
        if dim < 64 && bits >> dim != 0 {
            return Err(Error::ElementOutOfRange { op: "F2Vector::new", elem: bits, dim });
        }
        Ok(Self { bits, dim })
    }

    pub fn zero(dim: u32) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { bits: 0, dim })
    }

    /// The i-th standard unit vector (1-based: coordinate `i` set).
    pub fn unit(i: u32, dim: u32) -> Result<Self> {
        check_dim(dim)?;
        if i == 0 || i > dim {
            return Err(Error::InvalidParameter(format!("unit index {i} out of 1..={dim}")));
        }
        Ok(Self { bits: 1 << (dim - i), dim })
    }

    #[inline]
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.dim
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// XOR addition. Panics on dimension mismatch; fallible set-level
    /// operations check dimensions before entering their loops.
    pub fn xor(&self, other: &F2Vector) -> F2Vector {
        assert_eq!(self.dim, other.dim, "F2Vector dimension mismatch");
        F2Vector { bits: self.bits ^ other.bits, dim: self.dim }
    }

    /// Parses an `n`-character binary string, most significant coordinate first.
    pub fn parse(s: &str) -> Result<Self> {
        let dim = s.len() as u32;
        check_dim(dim)?;
        let mut bits = 0u64;
        for c in s.chars() {
            bits <<= 1;
            match c {
                '0' => {}
                '1' => bits |= 1,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "binary string may only contain 0/1, got `{other}`"
                    )))
                }
            }
        }
        Ok(Self { bits, dim })
    }
}

pub(crate) fn check_dim(dim: u32) -> Result<()> {
    if dim == 0 || dim > SET_DIM_MAX {
        return Err(Error::DimOutOfRange { dim, max: SET_DIM_MAX });
    }
    Ok(())
}

impl fmt::Display for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.dim as usize)
    }
}

impl fmt::Debug for F2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F2Vector({self})")
    }
}
