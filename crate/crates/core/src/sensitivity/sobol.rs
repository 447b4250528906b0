//! Unscrambled Sobol low-discrepancy sequence.
//!
//! Points are produced in Gray-code order with the Antonov-Saleev update,
//! matching the common reference implementations: point 0 is the origin and
//! the one-dimensional sequence starts 0, 1/2, 3/4, 1/4, 3/8, ...
//!
//! Direction numbers come from the standard Joe-Kuo table of primitive
//! polynomials and initial values. Enough dimensions ship embedded for a
//! 16-input Saltelli design (which draws 2d = 32 Sobol dimensions) with
//! margin for experimentation.

use crate::error::{Error, Result};

/// Bits of resolution per coordinate.
const BITS: usize = 32;

/// Highest supported dimension.
pub const MAX_DIMENSION: usize = 48;

/// (polynomial degree s, interior coefficient bits a, first s values m_k)
/// for dimensions 2.. of the sequence; dimension 1 is the van der Corput
/// sequence in base 2 (all m_k = 1).
#[rustfmt::skip]
const JOE_KUO: [(usize, u32, &[u32]); MAX_DIMENSION - 1] = [
(1, 0x00, &[1]),
    (2, 0x01, &[1, 3]),
    (3, 0x01, &[1, 3, 1]),
    (3, 0x02, &[1, 1, 1]),
    (4, 0x01, &[1, 1, 3, 3]),
    (4, 0x04, &[1, 3, 5, 13]),
    (5, 0x02, &[1, 1, 5, 5, 17]),
    (5, 0x04, &[1, 1, 5, 5, 5]),
    (5, 0x07, &[1, 1, 7, 11, 19]),
    (5, 0x0b, &[1, 1, 5, 1, 1]),
    (5, 0x0d, &[1, 1, 1, 3, 11]),
    (5, 0x0e, &[1, 3, 5, 5, 31]),
    (6, 0x01, &[1, 3, 3, 9, 7, 49]),
    (6, 0x0d, &[1, 1, 1, 15, 21, 21]),
    (6, 0x10, &[1, 3, 1, 13, 27, 49]),
    (6, 0x13, &[1, 1, 1, 15, 7, 5]),
    (6, 0x16, &[1, 3, 1, 15, 13, 25]),
    (6, 0x19, &[1, 1, 5, 5, 19, 61]),
    (7, 0x01, &[1, 3, 7, 11, 23, 15, 103]),
    (7, 0x04, &[1, 3, 7, 13, 13, 15, 69]),
    (7, 0x07, &[1, 1, 3, 13, 7, 35, 63]),
    (7, 0x08, &[1, 3, 5, 9, 1, 25, 53]),
    (7, 0x0e, &[1, 3, 1, 13, 9, 35, 107]),
    (7, 0x13, &[1, 3, 1, 5, 27, 61, 31]),
    (7, 0x15, &[1, 1, 5, 11, 19, 41, 61]),
    (7, 0x1c, &[1, 3, 5, 3, 3, 13, 69]),
    (7, 0x1f, &[1, 1, 7, 13, 1, 19, 1]),
    (7, 0x20, &[1, 3, 7, 5, 13, 19, 59]),
    (7, 0x25, &[1, 1, 3, 9, 25, 29, 41]),
    (7, 0x29, &[1, 3, 5, 13, 23, 1, 55]),
    (7, 0x2a, &[1, 3, 7, 3, 13, 59, 17]),
    (7, 0x32, &[1, 3, 1, 3, 5, 53, 69]),
    (7, 0x37, &[1, 1, 5, 5, 23, 33, 13]),
    (7, 0x38, &[1, 1, 7, 7, 1, 61, 123]),
    (7, 0x3b, &[1, 1, 7, 9, 13, 61, 49]),
    (7, 0x3e, &[1, 3, 3, 5, 3, 55, 33]),
    (8, 0x0e, &[1, 3, 1, 15, 31, 13, 49, 245]),
    (8, 0x15, &[1, 3, 5, 15, 31, 59, 63, 97]),
    (8, 0x16, &[1, 3, 1, 11, 11, 11, 77, 249]),
    (8, 0x26, &[1, 3, 1, 11, 27, 43, 71, 9]),
    (8, 0x2f, &[1, 1, 7, 15, 21, 11, 81, 45]),
    (8, 0x31, &[1, 3, 7, 3, 25, 31, 65, 79]),
    (8, 0x32, &[1, 3, 1, 1, 19, 11, 3, 205]),
    (8, 0x34, &[1, 1, 5, 9, 19, 21, 29, 157]),
    (8, 0x38, &[1, 3, 7, 11, 1, 33, 89, 185]),
    (8, 0x43, &[1, 3, 3, 3, 15, 9, 79, 71]),
    (8, 0x46, &[1, 3, 7, 11, 15, 39, 119, 27]),
];

/// Streaming generator over the `dimension`-dimensional Sobol sequence.
#[derive(Debug, Clone)]
pub struct SobolGenerator {
    dimension: usize,
    /// Direction vectors, `dimension` rows of `BITS` entries.
    directions: Vec<[u32; BITS]>,
    /// XOR state of the point `next_index` refers to.
    state: Vec<u32>,
    /// Index of the next point to emit.
    next_index: u64,
}

impl SobolGenerator {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 || dimension > MAX_DIMENSION {
            return Err(Error::DimensionUnsupported {
                requested: dimension,
                max: MAX_DIMENSION,
            });
        }
        let directions = (0..dimension).map(direction_vector).collect();
        Ok(Self {
            dimension,
            directions,
            state: vec![0; dimension],
            next_index: 0,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Index of the point `next_point` will emit.
    pub fn next_index(&self) -> u64 {
        self.next_index
    }

    /// Repositions the stream so the next emitted point has `index`.
    ///
    /// The state is rebuilt directly from the Gray code of `index`, so
    /// seeking is O(bits) rather than O(index).
    pub fn skip_to(&mut self, index: u64) {
        assert!(index < 1 << BITS, "Sobol index beyond 2^32");
        let gray = (index ^ (index >> 1)) as u32;
        for (dim, slot) in self.state.iter_mut().enumerate() {
            let mut acc = 0u32;
            for bit in 0..BITS {
                if gray & (1 << bit) != 0 {
                    acc ^= self.directions[dim][bit];
                }
            }
            *slot = acc;
        }
        self.next_index = index;
    }

    /// Writes the next point into `out` and advances the stream.
    pub fn next_point(&mut self, out: &mut [f64]) {
        assert_eq!(out.len(), self.dimension);
        for (o, &s) in out.iter_mut().zip(&self.state) {
            *o = s as f64 / (1u64 << BITS) as f64;
        }
        // step to the next point by flipping the direction bit that
        // distinguishes successive Gray codes
        self.next_index += 1;
        let bit = self.next_index.trailing_zeros() as usize;
        if bit < BITS {
            for (slot, dirs) in self.state.iter_mut().zip(&self.directions) {
                *slot ^= dirs[bit];
            }
        }
    }
}

/// Points `skip .. skip + count` of the `dimension`-dimensional sequence,
/// flattened row-major (`count` rows of `dimension` coordinates).
pub fn sobol_points(dimension: usize, count: usize, skip: u64) -> Result<Vec<f64>> {
    let mut gen = SobolGenerator::new(dimension)?;
    gen.skip_to(skip);
    let mut out = vec![0.0; count * dimension];
    for row in out.chunks_exact_mut(dimension) {
        gen.next_point(row);
    }
    Ok(out)
}

fn direction_vector(dim: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim == 0 {
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = 1 << (31 - k);
        }
        return v;
    }
    let (s, a, m) = JOE_KUO[dim - 1];
    for (k, &mk) in m.iter().enumerate() {
        v[k] = mk << (31 - k);
    }
    for k in s..BITS {
        let prev = v[k - s];
        v[k] = prev ^ (prev >> s);
        for i in 0..s.saturating_sub(1) {
            if (a >> i) & 1 != 0 {
                v[k] ^= v[k - s + 1 + i];
            }
        }
    }
    v
}
