use crate::error::{Error, Result};

/// A vector `m` in `{1,2,3,4}^d` selecting, per factor of a degree-`d`
/// product, which of the four held components it contributes:
///
/// | `m_i` | component                 |
/// |-------|---------------------------|
/// | 1     | in-phase, previous symbol |
/// | 2     | in-phase, current symbol  |
/// | 3     | quadrature, previous      |
/// | 4     | quadrature, current       |
///
/// Set indices are zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MIndex {
    m: Vec<u8>,
    sets: [Vec<usize>; 4],
}

impl MIndex {
    pub fn classify(m: &[u8]) -> Result<Self> {
        let mut sets: [Vec<usize>; 4] = Default::default();
        for (i, &v) in m.iter().enumerate() {
            if !(1..=4).contains(&v) {
                return Err(Error::InvalidMIndex(v));
            }
            sets[(v - 1) as usize].push(i);
        }
        Ok(Self { m: m.to_vec(), sets })
    }

    /// Every `m` in `{1,2,3,4}^d`, lexicographic with the last entry varying fastest.
    pub fn enumerate(d: usize) -> impl Iterator<Item = MIndex> {
        let total = 4usize.pow(d as u32);
        (0..total).map(move |mut code| {
            let mut m = vec![0u8; d];
            for slot in m.iter_mut().rev() {
                *slot = (code % 4) as u8 + 1;
                code /= 4;
            }
            MIndex::classify(&m).expect("entries are in range")
        })
    }

    pub fn degree(&self) -> usize {
        self.m.len()
    }

    pub fn entries(&self) -> &[u8] {
        &self.m
    }

    /// `S^l` for `l` in `1..=4`.
    pub fn set(&self, l: usize) -> &[usize] {
        &self.sets[l - 1]
    }

    /// Number of cosine (in-phase) factors, `|S1 ∪ S2|`.
    pub fn n1(&self) -> usize {
        self.sets[0].len() + self.sets[1].len()
    }

    /// Number of sine (quadrature) factors, `|S3 ∪ S4|`.
    pub fn n2(&self) -> usize {
        self.sets[2].len() + self.sets[3].len()
    }

    /// Positions in `S1 ∪ S2`, ascending.
    pub fn cos_positions(&self) -> Vec<usize> {
        self.positions(|v| v <= 2)
    }

    /// Positions in `S3 ∪ S4`, ascending.
    pub fn sin_positions(&self) -> Vec<usize> {
        self.positions(|v| v >= 3)
    }

    /// Positions holding the previous symbol (`S1 ∪ S3`).
    pub fn delayed(&self) -> impl Iterator<Item = usize> + '_ {
        self.m.iter().enumerate().filter(|(_, &v)| v % 2 == 1).map(|(i, _)| i)
    }

    /// Positions holding the current symbol (`S2 ∪ S4`).
    pub fn undelayed(&self) -> impl Iterator<Item = usize> + '_ {
        self.m.iter().enumerate().filter(|(_, &v)| v % 2 == 0).map(|(i, _)| i)
    }

    /// Projection onto the cosine (`which == 1`) or sine (`which == 2`) coordinates.
    pub fn project(&self, which: usize, x: &[f64]) -> Vec<f64> {
        let idx = match which {
            1 => self.cos_positions(),
            2 => self.sin_positions(),
            _ => panic!("projection index must be 1 or 2"),
        };
        idx.into_iter().map(|i| x[i]).collect()
    }

    fn positions(&self, keep: impl Fn(u8) -> bool) -> Vec<usize> {
        self.m.iter().enumerate().filter(|(_, &v)| keep(v)).map(|(i, _)| i).collect()
    }
}

/// Sum of the entries of a sign vector.
pub fn sigma_tilde(r: &[i8]) -> i64 {
    r.iter().map(|&v| v as i64).sum()
}

/// All vectors in `{-1, 1}^n`, with `-1` first.
pub fn sign_vectors(n: usize) -> impl Iterator<Item = Vec<i8>> {
    (0..1usize << n).map(move |bits| (0..n).map(|i| if bits >> (n - 1 - i) & 1 == 1 { 1 } else { -1 }).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_based(s: &[usize]) -> Vec<usize> {
        s.iter().map(|i| i + 1).collect()
    }

    #[test]
    fn worked_example() {
        let m = MIndex::classify(&[3, 1, 4, 2, 1, 3, 1]).unwrap();
        assert_eq!(one_based(m.set(1)), vec![2, 5, 7]);
        assert_eq!(one_based(m.set(2)), vec![4]);
        assert_eq!(one_based(m.set(3)), vec![1, 6]);
        assert_eq!(one_based(m.set(4)), vec![3]);
        assert_eq!((m.n1(), m.n2()), (4, 3));
        let x: Vec<f64> = (1..=7).map(|v| v as f64).collect();
        assert_eq!(m.project(1, &x), vec![2.0, 4.0, 5.0, 7.0]);
        assert_eq!(m.project(2, &x), vec![1.0, 3.0, 6.0]);
    }

    #[test]
    fn small_cases() {
        let m = MIndex::classify(&[1]).unwrap();
        assert_eq!(m.set(1), &[0]);
        assert!(m.set(2).is_empty() && m.set(3).is_empty() && m.set(4).is_empty());
        assert_eq!((m.n1(), m.n2()), (1, 0));

        let m = MIndex::classify(&[4, 4]).unwrap();
        assert_eq!(m.set(4), &[0, 1]);
        assert_eq!((m.n1(), m.n2()), (0, 2));
    }

    #[test]
    fn rejects_bad_entry() {
        assert!(matches!(MIndex::classify(&[1, 5]), Err(Error::InvalidMIndex(5))));
        assert!(matches!(MIndex::classify(&[0]), Err(Error::InvalidMIndex(0))));
    }

    #[test]
    fn enumeration_covers_all() {
        let all: Vec<_> = MIndex::enumerate(3).collect();
        assert_eq!(all.len(), 64);
        assert_eq!(all[0].entries(), &[1, 1, 1]);
        assert_eq!(all[63].entries(), &[4, 4, 4]);
        for m in &all {
            assert_eq!(m.n1() + m.n2(), 3);
        }
    }

    #[test]
    fn signs() {
        let v: Vec<_> = sign_vectors(2).collect();
        assert_eq!(v, vec![vec![-1, -1], vec![-1, 1], vec![1, -1], vec![1, 1]]);
        assert_eq!(sigma_tilde(&[1, 1, -1]), 1);
        assert_eq!(sign_vectors(0).count(), 1);
    }
}
