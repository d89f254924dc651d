//! Row-major tuple encoding. Coordinate 0 is the most significant digit;
//! the same encoding indexes power-structure domains and function tables,
//! so no second encoding exists anywhere in the crate.

/// Encode a tuple over `0..base` as its row-major index.
pub fn encode(tuple: &[usize], base: usize) -> usize {
    let mut idx = 0;
    for &t in tuple {
        debug_assert!(t < base);
        idx = idx * base + t;
    }
    idx
}

/// Decode a row-major index back into an `arity`-tuple over `0..base`.
pub fn decode(mut idx: usize, base: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = idx % base;
        idx /= base;
    }
    debug_assert_eq!(idx, 0);
    out
}

/// Iterate all tuples with per-position radices, ascending in row-major order.
/// An empty radix list yields exactly one empty tuple.
pub fn mixed_radix(radices: &[usize]) -> MixedRadix {
    MixedRadix {
        radices: radices.to_vec(),
        current: vec![0; radices.len()],
        done: radices.iter().any(|&r| r == 0),
        first: true,
    }
}

pub struct MixedRadix {
    radices: Vec<usize>,
    current: Vec<usize>,
    done: bool,
    first: bool,
}

impl Iterator for MixedRadix {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if self.first {
            self.first = false;
            return Some(self.current.clone());
        }
        for i in (0..self.radices.len()).rev() {
            self.current[i] += 1;
            if self.current[i] < self.radices[i] {
                return Some(self.current.clone());
            }
            self.current[i] = 0;
        }
        self.done = true;
        None
    }
}
