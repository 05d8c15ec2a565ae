use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rat::Rat;

/// Truth table of `s_i <= s_j + s_k` over all index triples of an increasing
/// sequence `s_0 < ... < s_{m-1}`, stored as a flat `m³` cube.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TrianglePattern {
    m: usize,
    bits: Vec<bool>,
}

impl TrianglePattern {
    pub fn of(values: &[Rat]) -> Self {
        let m = values.len();
        let mut bits = vec![false; m * m * m];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    bits[(i * m + j) * m + k] = values[i] <= values[j] + values[k];
                }
            }
        }
        TrianglePattern { m, bits }
    }

    /// Pattern of size `m` with the given values on the free triples
    /// `(i, j, k)`, `j <= k < i`, in [`free_triples`](Self::free_triples)
    /// order. Every other bit is forced true by monotonicity.
    pub fn from_free_bits(m: usize, free: &[bool]) -> Self {
        let triples = Self::free_triples(m);
        assert_eq!(triples.len(), free.len(), "wrong number of free bits");
        let mut bits = vec![true; m * m * m];
        for (&(i, j, k), &b) in triples.iter().zip(free) {
            bits[(i * m + j) * m + k] = b;
            bits[(i * m + k) * m + j] = b;
        }
        TrianglePattern { m, bits }
    }

    /// Arbitrary cube `bits[i][j][k]`; no consistency is assumed.
    pub fn from_cube(cube: &[Vec<Vec<bool>>]) -> Option<Self> {
        let m = cube.len();
        let mut bits = Vec::with_capacity(m * m * m);
        for plane in cube {
            if plane.len() != m {
                return None;
            }
            for row in plane {
                if row.len() != m {
                    return None;
                }
                bits.extend_from_slice(row);
            }
        }
        Some(TrianglePattern { m, bits })
    }

    /// Triples `(i, j, k)` with `j <= k < i`, ordered by `i`, then `j`, then `k`.
    pub fn free_triples(m: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for i in 0..m {
            for j in 0..i {
                for k in j..i {
                    out.push((i, j, k));
                }
            }
        }
        out
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> bool {
        self.bits[(i * self.m + j) * self.m + k]
    }

    pub fn free_bits(&self) -> Vec<bool> {
        Self::free_triples(self.m).into_iter().map(|(i, j, k)| self.get(i, j, k)).collect()
    }

    /// Nested `bits[i][j][k]` for serialization.
    pub fn cube(&self) -> Vec<Vec<Vec<bool>>> {
        (0..self.m)
            .map(|i| (0..self.m).map(|j| (0..self.m).map(|k| self.get(i, j, k)).collect()).collect())
            .collect()
    }

    /// Symmetry in `(j, k)` and monotonicity: a true bit stays true when
    /// `i` decreases or `j`, `k` increase. Bits with `i <= max(j, k)` are true.
    pub fn is_consistent(&self) -> bool {
        let m = self.m;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let b = self.get(i, j, k);
                    if b != self.get(i, k, j) {
                        return false;
                    }
                    if i <= j.max(k) && !b {
                        return false;
                    }
                    if b {
                        if i > 0 && !self.get(i - 1, j, k) {
                            return false;
                        }
                        if j + 1 < m && !self.get(i, j + 1, k) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Compact hex label of the free bits, most significant first.
    pub fn id(&self) -> String {
        let free = self.free_bits();
        if free.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for chunk in free.rchunks(4).rev() {
            let nibble = chunk.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8);
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }
}

impl fmt::Debug for TrianglePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TrianglePattern(m={}, free=", self.m)?;
        for b in self.free_bits() {
            write!(f, "{}", b as u8)?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| Rat::from_int(x)).collect()
    }

    #[test]
    fn examples() {
        let p = TrianglePattern::of(&ints(&[2, 3, 4]));
        assert!(p.cube().iter().flatten().flatten().all(|&b| b));
        let p = TrianglePattern::of(&ints(&[1, 3, 7]));
        assert!(!p.get(2, 1, 1));
        assert!(p.get(2, 1, 2));
        let p = TrianglePattern::of(&ints(&[1]));
        assert_eq!(p.cube(), vec![vec![vec![true]]]);
    }

    #[test]
    fn free_bits_round_trip() {
        let p = TrianglePattern::of(&ints(&[1, 3, 4, 9]));
        assert!(p.is_consistent());
        assert_eq!(TrianglePattern::from_free_bits(4, &p.free_bits()), p);
        assert_eq!(TrianglePattern::free_triples(3).len(), 4);
    }

    #[test]
    fn inconsistent_detected() {
        let mut cube = TrianglePattern::of(&ints(&[1, 3, 7])).cube();
        cube[2][1][1] = true;
        cube[2][1][2] = false;
        cube[2][2][1] = false;
        assert!(!TrianglePattern::from_cube(&cube).unwrap().is_consistent());
        let mut cube = TrianglePattern::of(&ints(&[1, 2, 3])).cube();
        cube[0][0][0] = false;
        assert!(!TrianglePattern::from_cube(&cube).unwrap().is_consistent());
    }
}
