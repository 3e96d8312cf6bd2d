use serde::{Deserialize, Serialize};

/// A signed permutation matrix, stored column-wise: column `i` has the
/// single entry `signs[i]` in row `perm[i]`, so `M e_i = signs[i] e_{perm[i]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedPerm {
    pub perm: Vec<usize>,
    pub signs: Vec<i8>,
}

impl SignedPerm {
    pub fn identity(n: usize) -> Self {
        SignedPerm {
            perm: (0..n).collect(),
            signs: vec![1; n],
        }
    }

    /// Builds and validates. Returns `None` unless `perm` is a bijection and
    /// every sign is ±1.
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Option<Self> {
        let n = perm.len();
        if signs.len() != n || signs.iter().any(|&s| s != 1 && s != -1) {
            return None;
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return None;
            }
            seen[p] = true;
        }
        Some(SignedPerm { perm, signs })
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    /// Image of basis vector `i` as `(row, sign)`.
    #[inline]
    pub fn image(&self, i: usize) -> (usize, i8) {
        (self.perm[i], self.signs[i])
    }

    /// Matrix entry at `(row, col)`.
    pub fn entry(&self, row: usize, col: usize) -> i8 {
        if self.perm[col] == row {
            self.signs[col]
        } else {
            0
        }
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &SignedPerm) -> SignedPerm {
        assert_eq!(self.dim(), other.dim());
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut signs = vec![0; n];
        for i in 0..n {
            let (j, s) = other.image(i);
            let (k, t) = self.image(j);
            perm[i] = k;
            signs[i] = s * t;
        }
        SignedPerm { perm, signs }
    }

    /// Transpose, which is also the inverse.
    pub fn transpose(&self) -> SignedPerm {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut signs = vec![0; n];
        for i in 0..n {
            let (j, s) = self.image(i);
            perm[j] = i;
            signs[j] = s;
        }
        SignedPerm { perm, signs }
    }

    pub fn neg(&self) -> SignedPerm {
        SignedPerm {
            perm: self.perm.clone(),
            signs: self.signs.iter().map(|s| -s).collect(),
        }
    }

    /// `Some(c)` when the matrix equals `c * Id` for `c = ±1`.
    pub fn scalar(&self) -> Option<i8> {
        let c = *self.signs.first()?;
        let ok = self
            .perm
            .iter()
            .enumerate()
            .all(|(i, &p)| p == i)
            && self.signs.iter().all(|&s| s == c);
        ok.then_some(c)
    }

    /// Kronecker product `self ⊗ other`, index `(a, b) -> a * dim(other) + b`.
    pub fn kron(&self, other: &SignedPerm) -> SignedPerm {
        let (n, m) = (self.dim(), other.dim());
        let mut perm = Vec::with_capacity(n * m);
        let mut signs = Vec::with_capacity(n * m);
        for a in 0..n {
            let (pa, sa) = self.image(a);
            for b in 0..m {
                let (pb, sb) = other.image(b);
                perm.push(pa * m + pb);
                signs.push(sa * sb);
            }
        }
        SignedPerm { perm, signs }
    }

    /// Conjugate by a relabelling of the basis: new index of old vector `i`
    /// is `relabel[i]`.
    pub fn relabel(&self, relabel: &[usize]) -> SignedPerm {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut signs = vec![0; n];
        for i in 0..n {
            let (j, s) = self.image(i);
            perm[relabel[i]] = relabel[j];
            signs[relabel[i]] = s;
        }
        SignedPerm { perm, signs }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &SignedPerm) -> SignedPerm {
        let n = self.dim();
        let mut perm = self.perm.clone();
        perm.extend(other.perm.iter().map(|p| p + n));
        let mut signs = self.signs.clone();
        signs.extend_from_slice(&other.signs);
        SignedPerm { perm, signs }
    }

    pub fn apply_i64(&self, v: &[i64]) -> Vec<i64> {
        let mut out = vec![0; v.len()];
        for (i, &x) in v.iter().enumerate() {
            let (j, s) = self.image(i);
            out[j] += s as i64 * x;
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let n = self.dim();
        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            let (j, s) = self.image(i);
            m[j][i] = s as i64;
        }
        m
    }
}
