//! Pseudo H-type Lie algebras `N_{r,s}(V) = V ⊕ R^{r,s}` built from
//! admissible modules.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::clifford::{verify_module_axioms, CliffordModule, Signature};
use crate::error::{Error, Result};
use crate::exact::{bareiss, kernel, modular, IntPoly};

/// Integer vector `(μ, ν)` indexing the dual element `n = 2(μ + ν)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualLatticeVector {
    pub m: Vec<i64>,
    pub n: Vec<i64>,
}

impl DualLatticeVector {
    pub fn new(m: Vec<i64>, n: Vec<i64>) -> Self {
        DualLatticeVector { m, n }
    }

    pub fn zero(sig: Signature) -> Self {
        DualLatticeVector::new(vec![0; sig.r as usize], vec![0; sig.s as usize])
    }

    /// Splits a concatenated coefficient vector at `r`.
    pub fn from_coeffs(sig: Signature, c: &[i64]) -> Self {
        let r = sig.r as usize;
        DualLatticeVector::new(c[..r].to_vec(), c[r..].to_vec())
    }

    pub fn coeffs(&self) -> Vec<i64> {
        self.m.iter().chain(&self.n).copied().collect()
    }

    pub fn mu_sq(&self) -> i64 {
        self.m.iter().map(|x| x * x).sum()
    }

    pub fn nu_sq(&self) -> i64 {
        self.n.iter().map(|x| x * x).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().chain(&self.n).all(|&x| x == 0)
    }

    /// gcd of all entries (0 for the zero vector).
    pub fn gcd(&self) -> i64 {
        self.m.iter().chain(&self.n).fold(0i64, |g, x| g.gcd(x))
    }

    pub fn neg(&self) -> Self {
        DualLatticeVector::new(
            self.m.iter().map(|x| -x).collect(),
            self.n.iter().map(|x| -x).collect(),
        )
    }

    pub fn l_inf(&self) -> i64 {
        self.m.iter().chain(&self.n).map(|x| x.abs()).max().unwrap_or(0)
    }
}

/// Lattice `{Σ m_i X_i + ½ Σ k_j Z_j}`; its centre part has dual `2 Z^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardLattice {
    pub horizontal_spacing: i64,
    /// Stored as numerator/denominator, here 1/2.
    pub vertical_spacing: (i64, i64),
    pub p0: i64,
}

impl Default for StandardLattice {
    fn default() -> Self {
        StandardLattice {
            horizontal_spacing: 1,
            vertical_spacing: (1, 2),
            p0: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureConstant {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoHTypeAlgebra {
    pub module: CliffordModule,
    pub dim_h: usize,
    pub d: usize,
    /// `(i, j) -> (k, c_{ij}^k)`, both orders stored.
    pub constants: BTreeMap<(usize, usize), (usize, i8)>,
    pub lattice: StandardLattice,
}

/// Blocks of `J_z` with respect to `V₊ ⊕ V₋`:
/// `A: V₊→V₊`, `B: V₋→V₊`, `C: V₊→V₋`, `D: V₋→V₋`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaBlocks<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<Vec<T>>,
    pub c: Vec<Vec<T>>,
    pub d: Vec<Vec<T>>,
}

/// Kernel lattice `M(n)` as parametrized through `(B(ν'), -D(μ'))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelLattice {
    /// `N` vectors of length `dim_h`, in module coordinates.
    pub basis: Vec<Vec<i64>>,
    pub gram: Vec<Vec<i64>>,
    pub d0: i64,
    /// `‖μ'‖²`; the Gram matrix is `2 ‖μ'‖² Id`.
    pub reduced_norm_sq: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupElement {
    pub x: Vec<BigRational>,
    pub z: Vec<BigRational>,
}

impl GroupElement {
    pub fn zero(dim_h: usize, d: usize) -> Self {
        GroupElement {
            x: vec![BigRational::zero(); dim_h],
            z: vec![BigRational::zero(); d],
        }
    }

    pub fn from_i64(x: &[i64], z: &[(i64, i64)]) -> Self {
        GroupElement {
            x: x.iter().map(|&v| BigRational::from(BigInt::from(v))).collect(),
            z: z
                .iter()
                .map(|&(p, q)| BigRational::new(p.into(), q.into()))
                .collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        GroupElement {
            x: self.x.iter().map(|v| -v).collect(),
            z: self.z.iter().map(|v| -v).collect(),
        }
    }
}

pub(crate) trait Ring:
    Clone + Zero + One + PartialEq + Neg<Output = Self> + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
}

impl<T> Ring for T where
    T: Clone
        + Zero
        + One
        + PartialEq
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
{
}

#[cfg(test)]
pub(crate) fn mat_mul<T: Ring>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let inner = b.len();
    let mut out = vec![vec![T::zero(); m]; n];
    for i in 0..n {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] = out[i][j].clone() + a[i][k].clone() * b[k][j].clone();
            }
        }
    }
    out
}

impl PseudoHTypeAlgebra {
    /// `c_{ij}^ℓ = ε_ℓ ⟨J_ℓ X_i, X_j⟩_V` with `ε_ℓ = ⟨Z_ℓ, Z_ℓ⟩`.
    pub fn new(module: CliffordModule) -> Result<Self> {
        let report = verify_module_axioms(&module);
        if let Some(f) = report.first_failure() {
            return Err(Error::UnverifiedModule(format!(
                "{}: {}",
                f.axiom.name(),
                f.witness.as_ref().map(|w| w.to_string()).unwrap_or_default()
            )));
        }
        let sig = module.signature;
        let mut constants = BTreeMap::new();
        for (l, g) in module.generators.iter().enumerate() {
            let eps = sig.central_sign(l) as i8;
            for i in 0..module.dim_v {
                let (j, s) = g.image(i);
                constants.insert((i, j), (l, eps * s * module.metric[j]));
            }
        }
        Ok(PseudoHTypeAlgebra {
            dim_h: module.dim_v,
            d: sig.d(),
            module,
            constants,
            lattice: StandardLattice::default(),
        })
    }

    pub fn signature(&self) -> Signature {
        self.module.signature
    }

    /// `N = dim_h / 2`.
    pub fn n_half(&self) -> usize {
        self.dim_h / 2
    }

    /// Topological dimension of the nilmanifold.
    pub fn manifold_dim(&self) -> usize {
        self.dim_h + self.d
    }

    pub fn constant(&self, i: usize, j: usize) -> Option<(usize, i8)> {
        self.constants.get(&(i, j)).copied()
    }

    pub fn sparse_constants(&self) -> Vec<StructureConstant> {
        self.constants
            .iter()
            .map(|(&(i, j), &(k, sign))| StructureConstant { i, j, k, sign })
            .collect()
    }

    pub(crate) fn omega_generic<T: Ring>(&self, z: &[T]) -> Vec<Vec<T>> {
        let n = self.dim_h;
        let mut m = vec![vec![T::zero(); n]; n];
        for (&(i, j), &(k, s)) in &self.constants {
            m[i][j] = if s > 0 { z[k].clone() } else { -z[k].clone() };
        }
        m
    }

    /// `Ω(z)_{ij} = Σ_k z_k c_{ij}^k`.
    pub fn omega_i64(&self, z: &[i64]) -> Vec<Vec<i64>> {
        self.omega_generic(z)
    }

    pub fn omega_rational(&self, z: &[BigRational]) -> Vec<Vec<BigRational>> {
        let n = self.dim_h;
        let mut m = vec![vec![BigRational::zero(); n]; n];
        for (&(i, j), &(k, s)) in &self.constants {
            m[i][j] = if s > 0 { z[k].clone() } else { -z[k].clone() };
        }
        m
    }

    pub fn omega_f64(&self, z: &[f64]) -> Vec<Vec<f64>> {
        let n = self.dim_h;
        let mut m = vec![vec![0.0; n]; n];
        for (&(i, j), &(k, s)) in &self.constants {
            m[i][j] = s as f64 * z[k];
        }
        m
    }

    /// `τ J_zᵀ` computed from the module directly, for cross-checking.
    pub fn tau_jt_rational(&self, z: &[BigRational]) -> Vec<Vec<BigRational>> {
        let n = self.dim_h;
        let mut j = vec![vec![BigRational::zero(); n]; n];
        for (k, g) in self.module.generators.iter().enumerate() {
            for col in 0..n {
                let (row, s) = g.image(col);
                let v = if s > 0 { z[k].clone() } else { -z[k].clone() };
                j[row][col] = &j[row][col] + v;
            }
        }
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let v = j[b][a].clone();
                        if self.module.metric[a] > 0 {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect()
    }

    fn blocks_from<T: Ring>(&self, jz: Vec<Vec<T>>) -> Result<OmegaBlocks<T>> {
        if self.signature().s == 0 {
            return Err(Error::RequiresIndefinite(self.signature()));
        }
        let (plus, minus) = self.module.plus_minus_split();
        let sub = |rows: &[usize], cols: &[usize]| -> Vec<Vec<T>> {
            rows.iter()
                .map(|&r| cols.iter().map(|&c| jz[r][c].clone()).collect())
                .collect()
        };
        Ok(OmegaBlocks {
            a: sub(&plus, &plus),
            b: sub(&plus, &minus),
            c: sub(&minus, &plus),
            d: sub(&minus, &minus),
        })
    }

    fn j_generic<T: Ring>(&self, z: &[T]) -> Vec<Vec<T>> {
        let n = self.dim_h;
        let mut j = vec![vec![T::zero(); n]; n];
        for (k, g) in self.module.generators.iter().enumerate() {
            for col in 0..n {
                let (row, s) = g.image(col);
                let v = if s > 0 { z[k].clone() } else { -z[k].clone() };
                j[row][col] = j[row][col].clone() + v;
            }
        }
        j
    }

    /// Blocks of `J_z` for integer `z`.
    pub fn omega_blocks(&self, z: &[i64]) -> Result<OmegaBlocks<i64>> {
        self.blocks_from(self.j_generic(z))
    }

    pub fn omega_blocks_rational(&self, z: &[BigRational]) -> Result<OmegaBlocks<BigRational>> {
        self.blocks_from(self.j_generic(z))
    }

    /// Exact `det(Ω(z) + λ)²` by modular Hessenberg reduction.
    pub fn char_poly_squared(&self, z: &[i64]) -> IntPoly {
        let om = self.omega_i64(z);
        let neg: Vec<Vec<i64>> = om.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        // rows of Ω have Euclidean norm ‖z‖, so every coefficient of
        // det(λ - Ω) is at most (1 + ‖z‖)^n
        let zn = (z.iter().map(|x| (x * x) as f64).sum::<f64>()).sqrt();
        let bits = (self.dim_h as f64 * (1.0 + zn).log2()).ceil() as u64 + 2;
        let p = modular::charpoly_exact(&neg, bits);
        &p * &p
    }

    /// Closed form of `det(Ω(z) + λ)²`.
    pub fn char_poly_squared_closed(&self, z: &[i64]) -> IntPoly {
        let r = self.signature().r as usize;
        let mu: i64 = z[..r].iter().map(|x| x * x).sum();
        let nu: i64 = z[r..].iter().map(|x| x * x).sum();
        let n = self.n_half() as u32;
        if self.signature().s == 0 {
            return IntPoly::from_i64(&[mu, 0, 1]).pow(2 * n);
        }
        // (λ² + μ² + ν²)² − 4μ²ν²
        let base = IntPoly::from_coeffs(vec![
            BigInt::from(mu + nu).pow(2) - BigInt::from(4) * BigInt::from(mu) * BigInt::from(nu),
            BigInt::zero(),
            BigInt::from(2 * (mu + nu)),
            BigInt::zero(),
            BigInt::one(),
        ]);
        base.pow(n)
    }

    /// Eigenvalues of `Ω(√-1 z)` with multiplicities, from the closed form,
    /// sorted decreasing; equal values are merged.
    pub fn omega_eigen(&self, z: &[f64]) -> Result<Vec<(f64, usize)>> {
        let r = self.signature().r as usize;
        let mu = z[..r].iter().map(|x| x * x).sum::<f64>().sqrt();
        let nu = z[r..].iter().map(|x| x * x).sum::<f64>().sqrt();
        if mu == 0.0 && nu == 0.0 {
            return Err(Error::ZeroCentralVector);
        }
        let n = self.n_half();
        let mut raw: Vec<(f64, usize)> = if self.signature().s == 0 || nu == 0.0 {
            vec![(mu, n), (-mu, n)]
        } else if mu == 0.0 {
            vec![(nu, n), (-nu, n)]
        } else {
            if n % 2 == 1 {
                return Err(Error::OddHalfDimension(n));
            }
            let h = n / 2;
            vec![(mu + nu, h), (-(mu + nu), h), (mu - nu, h), (nu - mu, h)]
        };
        raw.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite"));
        let mut out: Vec<(f64, usize)> = Vec::new();
        for (v, k) in raw {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += k,
                _ => out.push((v, k)),
            }
        }
        Ok(out)
    }

    /// Exact rank of `Ω(z)` over the rationals.
    pub fn omega_rank(&self, z: &[i64]) -> usize {
        bareiss::rank_i64(&self.omega_i64(z))
    }

    /// Basis `(B(ν')e_i, -D(μ')e_i)` of `M(n)` and its Gram matrix.
    pub fn kernel_lattice_basis(&self, v: &DualLatticeVector) -> Result<KernelLattice> {
        let sig = self.signature();
        if sig.s == 0 {
            return Err(Error::RequiresIndefinite(sig));
        }
        if v.is_zero() {
            return Err(Error::ZeroCentralVector);
        }
        let (mu_sq, nu_sq) = (v.mu_sq(), v.nu_sq());
        if mu_sq != nu_sq {
            return Err(Error::NotIsotropic {
                mu_sq: mu_sq as u64,
                nu_sq: nu_sq as u64,
            });
        }
        let d0 = v.gcd();
        let reduced: Vec<i64> = v.coeffs().iter().map(|x| x / d0).collect();
        let blocks = self.omega_blocks(&reduced)?;
        let (plus, minus) = self.module.plus_minus_split();
        let n = self.n_half();
        let mut basis = Vec::with_capacity(n);
        for e in 0..n {
            let mut vec = vec![0i64; self.dim_h];
            for (row, &pos) in plus.iter().enumerate() {
                vec[pos] = blocks.b[row][e];
            }
            for (row, &pos) in minus.iter().enumerate() {
                vec[pos] = -blocks.d[row][e];
            }
            basis.push(vec);
        }
        let gram = gram_i64(&basis);
        Ok(KernelLattice {
            basis,
            gram,
            d0,
            reduced_norm_sq: mu_sq / (d0 * d0),
        })
    }

    /// Full integer kernel `{ℓ ∈ Z^{2N} : Ω(n) ℓ = 0}`.
    pub fn saturated_kernel(&self, v: &DualLatticeVector) -> Vec<Vec<i64>> {
        let om = self.omega_i64(&v.coeffs());
        let k = kernel::integer_kernel(&om);
        kernel::to_i64(&k).expect("kernel entries fit in i64")
    }

    /// `g ∗ h = g + h + ½[g, h]`.
    pub fn group_product(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        for (len, want) in [
            (g.x.len(), self.dim_h),
            (h.x.len(), self.dim_h),
            (g.z.len(), self.d),
            (h.z.len(), self.d),
        ] {
            if len != want {
                return Err(Error::DimensionMismatch {
                    expected: want,
                    got: len,
                });
            }
        }
        let x = g.x.iter().zip(&h.x).map(|(a, b)| a + b).collect();
        let mut z: Vec<BigRational> = g.z.iter().zip(&h.z).map(|(a, b)| a + b).collect();
        let half = BigRational::new(1.into(), 2.into());
        for (&(i, j), &(k, s)) in &self.constants {
            if g.x[i].is_zero() || h.x[j].is_zero() {
                continue;
            }
            let t = &g.x[i] * &h.x[j] * &half;
            if s > 0 {
                z[k] += t;
            } else {
                z[k] -= t;
            }
        }
        Ok(GroupElement { x, z })
    }
}

pub(crate) fn gram_i64(basis: &[Vec<i64>]) -> Vec<Vec<i64>> {
    basis
        .iter()
        .map(|u| {
            basis
                .iter()
                .map(|v| u.iter().zip(v).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect()
}
