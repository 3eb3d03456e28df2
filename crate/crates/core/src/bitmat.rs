//! Small dense linear algebra over F_2 with rows packed into machine words.

/// Square or rectangular bit matrix with at most 64 columns.
/// Row `i`, column `j` is bit `j` of `rows[i]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMat {
    pub cols: usize,
    pub rows: Vec<u64>,
}

impl BitMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        assert!(cols <= 64);
        BitMat {
            cols,
            rows: vec![0; rows],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.rows[r] >> c) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        if v {
            self.rows[r] |= 1 << c;
        } else {
            self.rows[r] &= !(1 << c);
        }
    }

    pub fn xor_assign(&mut self, other: &BitMat) {
        assert_eq!(self.rows.len(), other.rows.len());
        assert_eq!(self.cols, other.cols);
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            *a ^= b;
        }
    }

    pub fn rank(&self) -> usize {
        rank_words(self.rows.clone())
    }

    pub fn is_invertible(&self) -> bool {
        self.rows.len() == self.cols && self.rank() == self.cols
    }

    /// Rows rendered as bit strings, least significant column first.
    pub fn row_strings(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|&r| {
                (0..self.cols)
                    .map(|c| if (r >> c) & 1 == 1 { '1' } else { '0' })
                    .collect()
            })
            .collect()
    }
}

/// Rank of a set of rows, each packed into one word.
pub fn rank_words(mut rows: Vec<u64>) -> usize {
    let mut rank = 0;
    for col in 0..64 {
        let Some(pivot) = rows.iter().position(|&r| (r >> col) & 1 == 1) else {
            continue;
        };
        let pr = rows.swap_remove(pivot);
        for r in rows.iter_mut() {
            if (*r >> col) & 1 == 1 {
                *r ^= pr;
            }
        }
        rank += 1;
        if rows.is_empty() {
            break;
        }
    }
    rank
}

/// Rank over F_2 of rows wider than one word (each row a slice of words).
pub fn rank_wide(rows: &[Vec<u64>]) -> usize {
    row_basis_wide(rows).len()
}

/// Independent rows spanning the same space, echelonized by lowest set bit.
pub fn row_basis_wide(rows: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut basis: Vec<Vec<u64>> = Vec::new();
    'next: for row in rows {
        let mut cur = row.clone();
        loop {
            let Some(lead) = leading_bit(&cur) else {
                continue 'next;
            };
            match basis.iter().find(|b| leading_bit(b) == Some(lead)) {
                Some(b) => {
                    for (c, w) in cur.iter_mut().zip(b.iter()) {
                        *c ^= w;
                    }
                }
                None => {
                    basis.push(cur);
                    continue 'next;
                }
            }
        }
    }
    basis
}

fn leading_bit(row: &[u64]) -> Option<usize> {
    for (i, &w) in row.iter().enumerate() {
        if w != 0 {
            return Some(i * 64 + w.trailing_zeros() as usize);
        }
    }
    None
}

pub fn parity(word: u64) -> u8 {
    (word.count_ones() & 1) as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_identity() {
        let m = BitMat {
            cols: 4,
            rows: vec![1, 2, 4, 8],
        };
        assert_eq!(m.rank(), 4);
        assert!(m.is_invertible());
    }

    #[test]
    fn rank_detects_dependence() {
        // row2 = row0 ^ row1
        let m = BitMat {
            cols: 3,
            rows: vec![0b011, 0b110, 0b101],
        };
        assert_eq!(m.rank(), 2);
        assert!(!m.is_invertible());
    }

    #[test]
    fn wide_rank_matches_word_rank_on_narrow_input() {
        let rows = vec![0b1010u64, 0b0110, 0b1100, 0b0001];
        let wide: Vec<Vec<u64>> = rows.iter().map(|&r| vec![r]).collect();
        assert_eq!(rank_words(rows), rank_wide(&wide));
    }

    #[test]
    fn wide_rank_spans_word_boundary() {
        // Two rows sharing word 0 but differing in word 1.
        let r0 = vec![1u64, 1u64];
        let r1 = vec![1u64, 0u64];
        assert_eq!(rank_wide(&[r0.clone(), r1.clone()]), 2);
        assert_eq!(rank_wide(&[r0.clone(), r1, r0]), 2);
    }

    #[test]
    fn zero_rows_have_rank_zero() {
        assert_eq!(rank_words(vec![0, 0]), 0);
        assert_eq!(rank_wide(&[vec![0u64, 0u64]]), 0);
    }
}
