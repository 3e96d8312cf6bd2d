//! Recovering an admissible scalar product from generators alone.
//!
//! For signed permutations each entry of `J^T G + G J = 0` reads
//! `s_p G[π(p)][q] + s_q G[p][π(q)] = 0`, a relation between two unknowns
//! of the symmetric matrix `G`. The solution space is therefore spanned by
//! connected components of a signed graph on the entries of `G`.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::SignedPerm;
use crate::exact::bareiss;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FormResult {
    /// `metric` is the ±1 diagonal after diagonalization; `gram` is the
    /// solution found. `diagonal` is true when `gram` is itself diagonal
    /// with entries equal to `metric`.
    Found {
        metric: Vec<i8>,
        gram: Vec<Vec<i64>>,
        diagonal: bool,
    },
    NotFound,
}

struct SignedUnionFind {
    parent: Vec<usize>,
    // value(x) = parity(x) * value(root)
    parity: Vec<i8>,
    dead: Vec<bool>,
}

impl SignedUnionFind {
    fn new(n: usize) -> Self {
        SignedUnionFind {
            parent: (0..n).collect(),
            parity: vec![1; n],
            dead: vec![false; n],
        }
    }

    fn find(&mut self, x: usize) -> (usize, i8) {
        if self.parent[x] == x {
            return (x, 1);
        }
        let p = self.parent[x];
        let (root, pp) = self.find(p);
        self.parent[x] = root;
        self.parity[x] *= pp;
        (root, self.parity[x])
    }

    /// Imposes `value(a) = sign * value(b)`.
    fn relate(&mut self, a: usize, b: usize, sign: i8) {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            if pa != sign * pb {
                self.dead[ra] = true;
            }
            return;
        }
        self.parent[ra] = rb;
        // value(ra) = pa * value(a) = pa * sign * pb * value(rb)
        self.parity[ra] = pa * sign * pb;
        if self.dead[ra] {
            self.dead[rb] = true;
        }
    }
}

fn idx(n: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    a * n + b
}

/// Solves for symmetric `G` with `J_k^T G + G J_k = 0` for all generators,
/// preferring a diagonal nondegenerate solution.
pub fn find_admissible_form(generators: &[SignedPerm]) -> FormResult {
    let Some(n) = generators.first().map(|g| g.dim()) else {
        return FormResult::NotFound;
    };
    let mut uf = SignedUnionFind::new(n * n);
    for g in generators {
        for p in 0..n {
            for q in p..n {
                let (pp, sp) = g.image(p);
                let (pq, sq) = g.image(q);
                let u1 = idx(n, pp, q);
                let u2 = idx(n, p, pq);
                // sp * G[u1] + sq * G[u2] = 0  =>  G[u1] = -sp*sq G[u2]
                uf.relate(u1, u2, -sp * sq);
            }
        }
    }
    let mut value = vec![vec![0i64; n]; n];
    // roots of live components that touch the diagonal, with one
    // representative diagonal entry each
    let mut diag_roots: Vec<usize> = Vec::new();
    for i in 0..n {
        let (root, _) = uf.find(idx(n, i, i));
        if !uf.dead[root] && !diag_roots.contains(&root) {
            diag_roots.push(root);
        }
    }
    let diag_only = diag_roots.iter().all(|&root| {
        (0..n).all(|a| {
            (a + 1..n).all(|b| {
                let (r, _) = uf.find(idx(n, a, b));
                r != root
            })
        })
    });
    if diag_only {
        let mut metric = vec![0i8; n];
        let mut chosen: Vec<(usize, i8)> = Vec::new();
        for i in 0..n {
            let (root, par) = uf.find(idx(n, i, i));
            if uf.dead[root] {
                break;
            }
            // first diagonal entry of each component is normalized to +1
            let scale = match chosen.iter().find(|(r, _)| *r == root) {
                Some(&(_, s)) => s,
                None => {
                    chosen.push((root, par));
                    par
                }
            };
            metric[i] = par * scale;
        }
        if metric.iter().all(|&m| m != 0) {
            for i in 0..n {
                value[i][i] = metric[i] as i64;
            }
            return FormResult::Found {
                metric,
                gram: value,
                diagonal: true,
            };
        }
    }
    general_form(&mut uf, n)
}

// Off-diagonal fallback: sum all live components with fixed small weights
// and read off the inertia by exact symmetric elimination.
fn general_form(uf: &mut SignedUnionFind, n: usize) -> FormResult {
    let mut roots: Vec<usize> = Vec::new();
    let mut g = vec![vec![0i64; n]; n];
    for a in 0..n {
        for b in a..n {
            let (root, par) = uf.find(idx(n, a, b));
            if uf.dead[root] {
                continue;
            }
            let w = match roots.iter().position(|&r| r == root) {
                Some(p) => p,
                None => {
                    roots.push(root);
                    roots.len() - 1
                }
            };
            let weight = 1 + (w as i64 * 7919) % 13;
            g[a][b] = par as i64 * weight;
            g[b][a] = g[a][b];
        }
    }
    if roots.is_empty() || bareiss::det_i64(&g).is_zero() {
        return FormResult::NotFound;
    }
    let metric = inertia(&g);
    FormResult::Found {
        metric,
        gram: g,
        diagonal: false,
    }
}

/// Signs of the leading principal minor ratios after a symmetric pivot
/// search; returns the ±1 diagonal of an equivalent form, positives first.
fn inertia(g: &[Vec<i64>]) -> Vec<i8> {
    use num_rational::BigRational;
    use num_traits::Signed;
    let n = g.len();
    let mut a: Vec<Vec<BigRational>> = g
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from(BigInt::from(x))).collect())
        .collect();
    let mut signs = Vec::with_capacity(n);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        if let Some(p) = active.iter().position(|&i| !a[i][i].is_zero()) {
            let i = active.remove(p);
            let piv = a[i][i].clone();
            signs.push(if piv.is_positive() { 1 } else { -1 });
            for &j in &active {
                let f = &a[j][i] / &piv;
                if f.is_zero() {
                    continue;
                }
                for &k in &active {
                    let t = &f * &a[i][k];
                    a[j][k] -= t;
                }
            }
        } else {
            // all remaining diagonal entries vanish: combine two rows and
            // columns to create a nonzero pivot
            let i = active[0];
            let Some(&j) = active.iter().find(|&&j| !a[i][j].is_zero()) else {
                break;
            };
            for &k in &active {
                let t = a[j][k].clone();
                a[i][k] += t;
            }
            for &k in &active {
                let t = a[k][j].clone();
                a[k][i] += t;
            }
        }
    }
    signs.sort_by(|x, y| y.cmp(x));
    signs
}
