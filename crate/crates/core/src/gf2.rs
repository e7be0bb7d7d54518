//! Dense GF(2) Gaussian elimination on bit-packed rows.

/// A row of bits packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(ncols: usize) -> Self {
        BitRow { words: vec![0; ncols.div_ceil(64)] }
    }

    pub fn from_indices(ncols: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut r = BitRow::zeros(ncols);
        for i in idx {
            r.flip(i);
        }
        r
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn set(&mut self, i: usize, v: bool) {
        if self.get(i) != v {
            self.flip(i);
        }
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Set positions in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    /// Parity of the AND with `other`.
    pub fn dot(&self, other: &BitRow) -> bool {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum::<u32>() % 2 == 1
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }
}

/// Reduced row echelon form of `A x = b` over GF(2).
#[derive(Debug, Clone)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<BitRow>,
    rhs: Vec<bool>,
    pivots: Vec<usize>,
    consistent: bool,
}

impl Echelon {
    pub fn new(ncols: usize, equations: impl IntoIterator<Item = (BitRow, bool)>) -> Self {
        let mut rows: Vec<BitRow> = Vec::new();
        let mut rhs: Vec<bool> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        let mut consistent = true;
        for (mut row, mut b) in equations {
            // Reduce against existing pivots, then use the result as a new pivot.
            for (i, &p) in pivots.iter().enumerate() {
                if row.get(p) {
                    row.xor_assign(&rows[i]);
                    b ^= rhs[i];
                }
            }
            match row.first_one() {
                None => consistent &= !b,
                Some(p) => {
                    for i in 0..rows.len() {
                        if rows[i].get(p) {
                            rows[i].xor_assign(&row);
                            rhs[i] ^= b;
                        }
                    }
                    rows.push(row);
                    rhs.push(b);
                    pivots.push(p);
                }
            }
        }
        Echelon { ncols, rows, rhs, pivots, consistent }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    /// A solution with every non-pivot variable set to zero.
    pub fn particular(&self) -> Option<Vec<bool>> {
        if !self.consistent {
            return None;
        }
        let mut x = vec![false; self.ncols];
        for (i, &p) in self.pivots.iter().enumerate() {
            x[p] = self.rhs[i];
        }
        Some(x)
    }

    /// Non-pivot columns, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols).filter(|&c| !is_pivot[c]).collect()
    }

    /// A basis of the null space, one vector per free column.
    pub fn null_basis(&self) -> Vec<BitRow> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = BitRow::zeros(self.ncols);
                v.flip(f);
                for (i, &p) in self.pivots.iter().enumerate() {
                    if self.rows[i].get(f) {
                        v.flip(p);
                    }
                }
                v
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitrow_basics() {
        let mut r = BitRow::from_indices(130, [0, 64, 129]);
        assert_eq!(r.ones().collect::<Vec<_>>(), vec![0, 64, 129]);
        assert_eq!(r.count_ones(), 3);
        r.set(64, false);
        assert_eq!(r.first_one(), Some(0));
        assert!(r.dot(&BitRow::from_indices(130, [129])));
    }

    #[test]
    fn rank_and_solution() {
        // x0 + x1 = 1, x1 + x2 = 0, x0 + x2 = 1 (dependent), duplicate first row
        let eqs = vec![
            (BitRow::from_indices(3, [0, 1]), true),
            (BitRow::from_indices(3, [1, 2]), false),
            (BitRow::from_indices(3, [0, 2]), true),
            (BitRow::from_indices(3, [0, 1]), true),
        ];
        let e = Echelon::new(3, eqs.clone());
        assert_eq!(e.rank(), 2);
        let x = e.particular().unwrap();
        for (row, b) in &eqs {
            let lhs = row.ones().fold(false, |acc, i| acc ^ x[i]);
            assert_eq!(lhs, *b);
        }
        let basis = e.null_basis();
        assert_eq!(basis.len(), 1);
        for (row, _) in &eqs {
            assert!(!row.dot(&basis[0]));
        }
    }

    #[test]
    fn inconsistent_system() {
        let e = Echelon::new(2, vec![(BitRow::from_indices(2, [0]), true), (BitRow::from_indices(2, [0]), false)]);
        assert!(!e.is_consistent());
        assert!(e.particular().is_none());
    }
}
