//! Integer lattices: LLL reduction, short-vector enumeration, Gaussian theta
//! sums with certified tails, and norm histograms of integer boxes.

use nalgebra::DMatrix;

use crate::numeric::{theta_upper, Accumulate, Real};

/// `Σ_{|k|≤radius} e^{-a k²}`, switching to the Poisson dual for `a < π`,
/// together with a bound on what the truncation discards.
pub fn theta_truncated<T: Real>(a: T, radius: u32) -> (T, f64) {
    let af = a.to_f64();
    assert!(af > 0.0, "theta needs a positive argument");
    let pi = T::pi();
    let (b, scale) = if af >= std::f64::consts::PI {
        (a, T::one())
    } else {
        (pi * pi / a, (pi / a).sqrt())
    };
    let mut sum = T::zero();
    for k in (1..=radius as i64).rev() {
        sum += (-(b * T::from_i64(k * k))).exp();
    }
    let value = scale * (T::one() + sum + sum);
    // Σ_{k>K} e^{-b k²} ≤ e^{-b(K+1)²} / (1 - e^{-b(2K+3)})
    let bf = b.to_f64();
    let k1 = radius as f64 + 1.0;
    let tail = 2.0 * (-bf * k1 * k1).exp() / (1.0 - (-bf * (2.0 * k1 + 1.0)).exp());
    (value, tail * scale.to_f64())
}

/// Counts of `‖x‖²` over `x ∈ [-radius, radius]^dim`; index is the norm.
pub fn norm_histogram(dim: usize, radius: u32) -> Vec<u64> {
    let r = radius as usize;
    let mut hist = vec![0u64; 1];
    hist[0] = 1;
    let squares: Vec<usize> = (0..=r).map(|k| k * k).collect();
    for _ in 0..dim {
        let mut next = vec![0u64; hist.len() + r * r];
        for (n, &c) in hist.iter().enumerate() {
            if c == 0 {
                continue;
            }
            next[n] += c;
            for &sq in &squares[1..] {
                next[n + sq] += 2 * c;
            }
        }
        hist = next;
    }
    hist
}

/// LLL reduction (`δ = 0.99`) of linearly independent integer rows.
pub fn lll_reduce(basis: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut b: Vec<Vec<i64>> = basis.to_vec();
    let k = b.len();
    if k <= 1 {
        return b;
    }
    let dot = |u: &[i64], v: &[i64]| -> i128 { u.iter().zip(v).map(|(x, y)| *x as i128 * *y as i128).sum() };
    let gso = |b: &[Vec<i64>]| -> (Vec<Vec<f64>>, Vec<f64>) {
        let k = b.len();
        let mut mu = vec![vec![0.0; k]; k];
        let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut norms = vec![0.0; k];
        for i in 0..k {
            let mut v: Vec<f64> = b[i].iter().map(|&x| x as f64).collect();
            for j in 0..i {
                let m = b[i].iter().zip(&bstar[j]).map(|(&x, y)| x as f64 * y).sum::<f64>() / norms[j];
                mu[i][j] = m;
                for (vi, bj) in v.iter_mut().zip(&bstar[j]) {
                    *vi -= m * bj;
                }
            }
            norms[i] = v.iter().map(|x| x * x).sum();
            bstar.push(v);
        }
        (mu, norms)
    };
    let (mut mu, mut norms) = gso(&b);
    let mut i = 1;
    let mut guard = 0usize;
    while i < k {
        guard += 1;
        assert!(guard < 1_000_000, "LLL failed to terminate");
        for j in (0..i).rev() {
            let q = mu[i][j].round();
            if q != 0.0 {
                let qi = q as i64;
                let bj = b[j].clone();
                for (x, y) in b[i].iter_mut().zip(&bj) {
                    *x -= qi * y;
                }
                let (m2, n2) = gso(&b);
                mu = m2;
                norms = n2;
            }
        }
        if norms[i] >= (0.99 - mu[i][i - 1] * mu[i][i - 1]) * norms[i - 1] {
            i += 1;
        } else {
            b.swap(i, i - 1);
            let (m2, n2) = gso(&b);
            mu = m2;
            norms = n2;
            i = i.max(2) - 1;
        }
    }
    debug_assert!(b.iter().all(|v| dot(v, v) > 0));
    b
}

/// Exact Gram matrix of integer rows.
pub fn gram(basis: &[Vec<i64>]) -> Vec<Vec<i64>> {
    basis
        .iter()
        .map(|u| basis.iter().map(|v| u.iter().zip(v).map(|(a, b)| a * b).sum()).collect())
        .collect()
}

/// Smallest eigenvalue of an integer Gram matrix.
pub fn lambda_min(g: &[Vec<i64>]) -> f64 {
    let k = g.len();
    let m = DMatrix::from_fn(k, k, |i, j| g[i][j] as f64);
    m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Theta series `Σ_{x∈Z^k} e^{-Q(x)/2t}` of a positive definite integer form,
/// backed by an enumerated histogram of `Q` that grows on demand.
#[derive(Debug, Clone)]
pub struct LatticeTheta {
    gram: Vec<Vec<i64>>,
    chol_q: Vec<f64>,
    chol_mu: Vec<Vec<f64>>,
    lambda_min: f64,
    /// `(Q, count)` for all `Q ≤ radius`, increasing.
    norms: Vec<(i64, u64)>,
    radius: i64,
}

impl LatticeTheta {
    pub fn new(basis: &[Vec<i64>]) -> Self {
        let reduced = lll_reduce(basis);
        Self::from_gram(gram(&reduced))
    }

    pub fn from_gram(gram: Vec<Vec<i64>>) -> Self {
        let k = gram.len();
        // Q(x) = Σ q_i (x_i + Σ_{j>i} μ_ij x_j)²
        let mut a: Vec<Vec<f64>> = gram.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
        let mut q = vec![0.0; k];
        let mut mu = vec![vec![0.0; k]; k];
        for i in 0..k {
            q[i] = a[i][i];
            assert!(q[i] > 0.0, "form is not positive definite");
            for j in i + 1..k {
                mu[i][j] = a[i][j] / q[i];
            }
            for j in i + 1..k {
                for l in j..k {
                    a[j][l] -= mu[i][j] * a[i][l];
                    a[l][j] = a[j][l];
                }
            }
        }
        let lmin = lambda_min(&gram);
        LatticeTheta {
            gram,
            chol_q: q,
            chol_mu: mu,
            lambda_min: lmin,
            norms: vec![(0, 1)],
            radius: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// Lower bound on `Q(x)/‖x‖²`, slightly deflated against rounding.
    pub fn lambda_min(&self) -> f64 {
        self.lambda_min * (1.0 - 1e-9)
    }

    /// Minimum of `Q` over nonzero vectors.
    pub fn min_norm(&mut self) -> i64 {
        let mut r = self.gram.iter().enumerate().map(|(i, row)| row[i]).min().unwrap_or(0);
        self.ensure_radius(r);
        loop {
            if let Some(&(q, _)) = self.norms.get(1) {
                return q;
            }
            r *= 2;
            self.ensure_radius(r);
        }
    }

    /// `(Q, count)` pairs for all `Q ≤ radius`.
    pub fn norm_counts(&mut self, radius: i64) -> Vec<(i64, u64)> {
        self.ensure_radius(radius);
        self.norms.iter().copied().filter(|&(q, _)| q <= radius).collect()
    }

    fn ensure_radius(&mut self, radius: i64) {
        if radius <= self.radius {
            return;
        }
        let k = self.rank();
        let mut counts = std::collections::BTreeMap::new();
        let mut x = vec![0i64; k];
        let bound = radius as f64 + 0.5;
        self.enumerate(k, 0.0, bound, radius, &mut x, &mut counts);
        self.norms = counts.into_iter().collect();
        self.radius = radius;
    }

    fn enumerate(
        &self,
        level: usize,
        partial: f64,
        bound: f64,
        radius: i64,
        x: &mut Vec<i64>,
        counts: &mut std::collections::BTreeMap<i64, u64>,
    ) {
        if level == 0 {
            let q: i64 = (0..x.len())
                .map(|i| x[i] * (0..x.len()).map(|j| self.gram[i][j] * x[j]).sum::<i64>())
                .sum();
            if q <= radius {
                *counts.entry(q).or_insert(0) += 1;
            }
            return;
        }
        let i = level - 1;
        let c: f64 = -(i + 1..x.len()).map(|j| self.chol_mu[i][j] * x[j] as f64).sum::<f64>();
        let rem = (bound - partial).max(0.0);
        let w = (rem / self.chol_q[i]).sqrt();
        let lo = (c - w).ceil() as i64;
        let hi = (c + w).floor() as i64;
        for v in lo..=hi {
            let d = v as f64 - c;
            let p = partial + self.chol_q[i] * d * d;
            if p > bound {
                continue;
            }
            x[i] = v;
            self.enumerate(i, p, bound, radius, x, counts);
        }
        x[i] = 0;
    }

    /// Bound on `Σ_{Q(x)>R} e^{-Q(x)/2t}`:
    /// `e^{-R/4t} Σ e^{-Q/4t} ≤ e^{-R/4t} (1 + √(4πt/λ_min))^k`.
    pub fn tail_bound(&self, t: f64, radius: i64) -> f64 {
        (-(radius as f64) / (4.0 * t)).exp() * theta_upper(self.lambda_min() / (4.0 * t), self.rank())
    }

    /// `Σ_x e^{-Q(x)/2t}` with absolute error at most `abs_tol` from truncation;
    /// returns the value and the truncation bound actually achieved.
    pub fn theta<T: Accumulate>(&mut self, t: T, abs_tol: f64) -> (T, f64) {
        let tf = t.to_f64();
        let lead = theta_upper(self.lambda_min() / (4.0 * tf), self.rank());
        let need = if abs_tol > 0.0 && lead > abs_tol {
            (4.0 * tf * (lead / abs_tol).ln()).ceil() as i64
        } else {
            0
        };
        self.ensure_radius(need);
        let mut acc = T::Acc::default();
        for &(q, c) in self.norms.iter().rev() {
            if q > need {
                continue;
            }
            let term = (-(T::from_i64(q) / (t + t))).exp() * T::from_f64(c as f64);
            T::acc_add(&mut acc, term);
        }
        (T::acc_value(&acc), self.tail_bound(tf, need))
    }
}
