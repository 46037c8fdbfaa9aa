use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// A bijection on `0..n`. Position `k` of a permuted sequence holds the
/// element that sat at `map[k]` before.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &i in &map {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Config(format!("{map:?} is not a permutation")));
            }
        }
        Ok(Permutation { map })
    }

    pub fn identity(n: usize) -> Self {
        Permutation { map: (0..n).collect() }
    }

    /// Stable permutation sorting `keys` ascending.
    pub fn sorting(keys: &[f64]) -> Self {
        let mut map: Vec<usize> = (0..keys.len()).collect();
        map.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
        Permutation { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(k, &i)| k == i)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (k, &i) in self.map.iter().enumerate() {
            inv[i] = k;
        }
        Permutation { map: inv }
    }

    pub fn apply<T: Copy>(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.map.len() {
            return Err(Error::LengthMismatch { expected: self.map.len(), found: v.len() });
        }
        Ok(self.map.iter().map(|&i| v[i]).collect())
    }

    /// Permutes the columns of `m` (the `Q Pᵀ` side of `P (D + ρuuᵀ) Pᵀ`).
    pub fn apply_columns(&self, m: &DenseMatrix) -> Result<DenseMatrix> {
        if m.cols() != self.map.len() {
            return Err(Error::LengthMismatch { expected: self.map.len(), found: m.cols() });
        }
        Ok(m.select_columns(&self.map))
    }
}

/// Applies `p` to a pole/weight pair.
pub fn apply_permutation(p: &Permutation, d: &[f64], u: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if d.len() != u.len() {
        return Err(Error::LengthMismatch { expected: d.len(), found: u.len() });
    }
    Ok((p.apply(d)?, p.apply(u)?))
}

/// Sorts the poles ascending and carries the weights along.
pub fn sort_poles(d: &[f64], u: &[f64]) -> Result<(Permutation, Vec<f64>, Vec<f64>)> {
    let p = Permutation::sorting(d);
    let (d2, u2) = apply_permutation(&p, d, u)?;
    Ok((p, d2, u2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn worked_example() {
        let d = [13.1247, 201.9311, 0.0693, 26.7189];
        let u = [-0.5421, -0.4540, 0.2128, -0.6743];
        let (p, ds, us) = sort_poles(&d, &u).unwrap();
        assert_eq!(p.as_slice(), &[2, 0, 3, 1]);
        assert_eq!(ds, vec![0.0693, 13.1247, 26.7189, 201.9311]);
        assert_eq!(us, vec![0.2128, -0.5421, -0.6743, -0.4540]);
    }

    #[test]
    fn already_sorted_is_identity() {
        let d = [1.0, 2.0, 5.0];
        let u = [0.3, -0.1, 0.7];
        let (p, ds, us) = sort_poles(&d, &u).unwrap();
        assert!(p.is_identity());
        assert_eq!(ds, d);
        assert_eq!(us, u);
    }

    #[test]
    fn symbolic_relabel() {
        let (p, ds, _) = sort_poles(&[3.0, 1.0, 2.0], &[0.0; 3]).unwrap();
        assert_eq!(ds, vec![1.0, 2.0, 3.0]);
        let labels = p.apply(&['a', 'b', 'c']).unwrap();
        assert_eq!(labels, vec!['b', 'c', 'a']);
    }

    #[test]
    fn length_mismatch() {
        let p = Permutation::identity(2);
        assert_eq!(apply_permutation(&p, &[1.0, 2.0], &[1.0]), Err(Error::LengthMismatch { expected: 2, found: 1 }));
        assert!(Permutation::new(vec![0, 0]).is_err());
    }

    #[test]
    fn stable_for_equal_keys() {
        let p = Permutation::sorting(&[2.0, 1.0, 2.0, 1.0]);
        assert_eq!(p.as_slice(), &[1, 3, 0, 2]);
    }

    proptest! {
        #[test]
        fn sort_preserves_pairs_and_inverts(d in proptest::collection::vec(-100.0f64..100.0, 1..20)) {
            let u: Vec<f64> = (0..d.len()).map(|i| i as f64).collect();
            let (p, ds, us) = sort_poles(&d, &u).unwrap();
            prop_assert!(ds.windows(2).all(|w| w[0] <= w[1]));
            for (x, w) in ds.iter().zip(&us) {
                prop_assert_eq!(*x, d[*w as usize]);
            }
            let back = p.inverse().apply(&ds).unwrap();
            prop_assert_eq!(back, d);
        }
    }
}
