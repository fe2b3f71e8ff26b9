//! Walsh–Hadamard transform kernel used for XOR autocorrelation.
//!
//! The transform runs on `i64` lanes. For the autocorrelation of an
//! indicator function all intermediate magnitudes are bounded by
//! `2^n * |A| <= 2^48` at the supported `n <= 24`, so the arithmetic is
//! exact with plenty of headroom.

use crate::error::{Error, Result};
use crate::gf2::F2Set;

/// Largest dimension for which 2^n-sized transform tables are supported.
pub const WHT_DIM_MAX: u32 = 24;

/// Below this length the parallel path falls back to the iterative kernel.
#[cfg(feature = "parallel")]
const PAR_LEAF: usize = 1 << 13;

/// In-place Walsh–Hadamard transform; `data.len()` must be a power of two.
pub fn wht_in_place(data: &mut [i64]) {
    #[cfg(feature = "parallel")]
    {
        wht_in_place_par(data);
    }
    #[cfg(not(feature = "parallel"))]
    {
        wht_in_place_seq(data);
    }
}

/// Iterative sequential kernel.
pub fn wht_in_place_seq(data: &mut [i64]) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for chunk in data.chunks_mut(h * 2) {
            let (lo, hi) = chunk.split_at_mut(h);
            for i in 0..h {
                let x = lo[i];
                let y = hi[i];
                lo[i] = x + y;
                hi[i] = x - y;
            }
        }
        h *= 2;
    }
}

/// Recursive split kernel: butterfly across the halves, then transform each
/// half in parallel. Computes exactly the same values as the iterative kernel.
#[cfg(feature = "parallel")]
pub fn wht_in_place_par(data: &mut [i64]) {
    use rayon::prelude::*;

    let n = data.len();
    debug_assert!(n.is_power_of_two());
    if n <= PAR_LEAF {
        wht_in_place_seq(data);
        return;
    }
    let (lo, hi) = data.split_at_mut(n / 2);
    lo.par_iter_mut().zip(hi.par_iter_mut()).for_each(|(x, y)| {
        let a = *x;
        let b = *y;
        *x = a + b;
        *y = a - b;
    });
    rayon::join(|| wht_in_place_par(lo), || wht_in_place_par(hi));
}

/// XOR autocorrelation of the indicator of `a`: for every `s` the number of
/// ordered pairs `(a1, a2)` in `A^2` with `a1 + a2 = s`, i.e. `|A(s)|`.
///
/// Returned as `(s, count)` pairs in ascending `s`, restricted to `count > 0`
/// (equivalently `s` ranging over `2A`). Computed by forward transform,
/// pointwise square, inverse transform and exact division by `2^n`.
pub fn xor_autocorrelation(a: &F2Set) -> Result<Vec<(u64, u64)>> {
    let n = a.dim();
    if n > WHT_DIM_MAX {
        return Err(Error::DimTooLarge { op: "wht autocorrelation", max: WHT_DIM_MAX, got: n });
    }
    if a.is_empty() {
        return Err(Error::EmptySet { op: "wht autocorrelation" });
    }
    let len = 1usize << n;
    let mut data = vec![0i64; len];
    for &e in a.bits() {
        data[e as usize] = 1;
    }
    wht_in_place(&mut data);
    square_in_place(&mut data);
    wht_in_place(&mut data);
    let mut out = Vec::new();
    for (s, &v) in data.iter().enumerate() {
        debug_assert!(v >= 0 && v % (len as i64) == 0);
        let count = (v >> n) as u64;
        if count > 0 {
            out.push((s as u64, count));
        }
    }
    Ok(out)
}

fn square_in_place(data: &mut [i64]) {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        data.par_iter_mut().for_each(|v| *v *= *v);
    }
    #[cfg(not(feature = "parallel"))]
    {
        data.iter_mut().for_each(|v| *v *= *v);
    }
}

/// Sequential-only variant of [`xor_autocorrelation`], exposed for the
/// benchmark suite's kernel comparison.
pub fn xor_autocorrelation_seq(a: &F2Set) -> Result<Vec<(u64, u64)>> {
    let n = a.dim();
    if n > WHT_DIM_MAX {
        return Err(Error::DimTooLarge { op: "wht autocorrelation", max: WHT_DIM_MAX, got: n });
    }
    if a.is_empty() {
        return Err(Error::EmptySet { op: "wht autocorrelation" });
    }
    let len = 1usize << n;
    let mut data = vec![0i64; len];
    for &e in a.bits() {
        data[e as usize] = 1;
    }
    wht_in_place_seq(&mut data);
    data.iter_mut().for_each(|v| *v *= *v);
    wht_in_place_seq(&mut data);
    let mut out = Vec::new();
    for (s, &v) in data.iter().enumerate() {
        let count = (v >> n) as u64;
        if count > 0 {
            out.push((s as u64, count));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_is_involution_up_to_scale() {
        let mut data: Vec<i64> = (0..16).map(|i| (i * 7 % 5) as i64 - 2).collect();
        let orig = data.clone();
        wht_in_place_seq(&mut data);
        wht_in_place_seq(&mut data);
        for (a, b) in data.iter().zip(&orig) {
            assert_eq!(*a, b * 16);
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let mut a: Vec<i64> = (0..(1 << 15)).map(|i| ((i as i64) * 2654435761 % 97) - 48).collect();
        let mut b = a.clone();
        wht_in_place_seq(&mut a);
        wht_in_place(&mut b);
        assert_eq!(a, b);
    }

    #[test]
    fn autocorrelation_small_example() {
        // A = {00, 01, 10}: |A(00)|=3, |A(01)|=|A(10)|=|A(11)|=2
        let a = F2Set::from_bits(2, [0b00, 0b01, 0b10]).unwrap();
        let ac = xor_autocorrelation(&a).unwrap();
        assert_eq!(ac, vec![(0, 3), (1, 2), (2, 2), (3, 2)]);
    }

    #[test]
    fn rejects_oversized_dimension() {
        let a = F2Set::from_bits(25, [0]).unwrap();
        assert!(matches!(xor_autocorrelation(&a), Err(Error::DimTooLarge { .. })));
    }
}
