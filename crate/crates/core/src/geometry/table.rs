use serde::{Deserialize, Serialize};

use super::{common_line_pair, CommonLine, Rotation};
use crate::error::{Error, Result};

/// Common lines for every ordered pair of `n` images, with a validity mask.
///
/// Entry `(i, j)` holds `c_ij`, the line as seen in image `i`. Pairs are
/// written and cleared together, so `(i, j)` is valid exactly when `(j, i)`
/// is, and the diagonal is never valid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommonLineTable {
    n: usize,
    lines: Vec<Option<CommonLine>>,
}

impl CommonLineTable {
    /// A table of `n` images with every pair invalid.
    pub fn new(n: usize) -> Self {
        CommonLineTable { n, lines: vec![None; n * n] }
    }

    /// Exact common lines of `rotations`; degenerate pairs are left invalid.
    pub fn from_rotations(rotations: &[Rotation]) -> Self {
        let n = rotations.len();
        let mut table = CommonLineTable::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if let Ok((cij, cji)) = common_line_pair(&rotations[i], &rotations[j]) {
                    table.set_pair(i, j, cij, cji);
                }
            }
        }
        table
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stores `c_ij` at `(i, j)` and `c_ji` at `(j, i)`.
    pub fn set_pair(&mut self, i: usize, j: usize, cij: CommonLine, cji: CommonLine) {
        assert!(i != j, "diagonal pairs cannot hold a common line");
        assert!(i < self.n && j < self.n, "pair ({i}, {j}) out of range for n = {}", self.n);
        self.lines[i * self.n + j] = Some(cij);
        self.lines[j * self.n + i] = Some(cji);
    }

    pub fn clear_pair(&mut self, i: usize, j: usize) {
        self.lines[i * self.n + j] = None;
        self.lines[j * self.n + i] = None;
    }

    /// `c_ij`, if the pair is valid.
    pub fn get(&self, i: usize, j: usize) -> Option<CommonLine> {
        self.lines[i * self.n + j]
    }

    /// `(c_ij, c_ji)`, if the pair is valid.
    pub fn pair(&self, i: usize, j: usize) -> Option<(CommonLine, CommonLine)> {
        Some((self.get(i, j)?, self.get(j, i)?))
    }

    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.lines[i * self.n + j].is_some()
    }

    /// Number of valid unordered pairs.
    pub fn valid_pair_count(&self) -> usize {
        (0..self.n)
            .map(|i| (i + 1..self.n).filter(|&j| self.is_valid(i, j)).count())
            .sum()
    }

    /// Sub-table over `members`, re-indexed in the given order.
    pub fn restrict(&self, members: &[usize]) -> Result<CommonLineTable> {
        if let Some(&bad) = members.iter().find(|&&m| m >= self.n) {
            return Err(Error::InvalidInput(format!("image index {bad} out of range")));
        }
        let m = members.len();
        let mut sub = CommonLineTable::new(m);
        for (a, &i) in members.iter().enumerate() {
            for (b, &j) in members.iter().enumerate() {
                if a != b {
                    sub.lines[a * m + b] = self.get(i, j);
                }
            }
        }
        Ok(sub)
    }

    /// Connected components of the valid-pair graph, as a label per image.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            stack.push(start);
            while let Some(i) = stack.pop() {
                for j in 0..self.n {
                    if label[j] == usize::MAX && self.is_valid(i, j) {
                        label[j] = count;
                        stack.push(j);
                    }
                }
            }
            count += 1;
        }
        (count, label)
    }

    /// Checks storage size, an invalid diagonal and a symmetric validity mask.
    pub fn validate(&self) -> Result<()> {
        if self.lines.len() != self.n * self.n {
            return Err(Error::InvalidInput("table storage does not match n".into()));
        }
        for i in 0..self.n {
            if self.is_valid(i, i) {
                return Err(Error::InvalidInput(format!("diagonal entry {i} is valid")));
            }
            for j in i + 1..self.n {
                if self.is_valid(i, j) != self.is_valid(j, i) {
                    return Err(Error::InvalidInput(format!("asymmetric mask at ({i}, {j})")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sample_uniform_rotation;
    use crate::rng::rng_from_seed;

    #[test]
    fn mask_is_symmetric() {
        let mut t = CommonLineTable::new(3);
        let c = CommonLine::from_angle(0.3);
        t.set_pair(0, 2, c, c);
        assert!(t.is_valid(2, 0) && t.is_valid(0, 2));
        assert!(!t.is_valid(1, 1));
        assert_eq!(t.valid_pair_count(), 1);
        t.clear_pair(2, 0);
        assert_eq!(t.valid_pair_count(), 0);
        assert!(t.validate().is_ok());
    }

    #[test]
    fn degenerate_pairs_are_invalid() {
        let r = Rotation::identity();
        let t = CommonLineTable::from_rotations(&[r, r, r]);
        assert_eq!(t.valid_pair_count(), 0);
        assert_eq!(t.components().0, 3);
    }

    #[test]
    fn restrict_reindexes() {
        let mut rng = rng_from_seed(1);
        let rots: Vec<_> = (0..5).map(|_| sample_uniform_rotation(&mut rng)).collect();
        let t = CommonLineTable::from_rotations(&rots);
        let sub = t.restrict(&[4, 1, 3]).unwrap();
        assert_eq!(sub.n(), 3);
        assert_eq!(sub.get(0, 1), t.get(4, 1));
        assert_eq!(sub.get(2, 0), t.get(3, 4));
        assert!(t.restrict(&[9]).is_err());
        assert_eq!(t.components().0, 1);
    }
}
