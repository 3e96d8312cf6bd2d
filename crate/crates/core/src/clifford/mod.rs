//! Admissible Clifford modules with signed-permutation generators.
//!
//! Convention: generator `J_k` squares to `-Id` for `k < r` and to `+Id` for
//! `k >= r` (zero-based), and every generator is skew for the diagonal
//! metric `G`, i.e. `J^T G + G J = 0`.

mod construct;
mod form;
mod signed_perm;
mod table;
mod verify;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use construct::{build_minimal_module, build_module};
pub use form::{find_admissible_form, FormResult};
pub use signed_perm::SignedPerm;
pub use table::{has_two_types, min_admissible_dim, reduce, Shift};
pub use verify::{verify_module_axioms, Axiom, AxiomCheck, VerificationReport, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    pub r: u32,
    pub s: u32,
}

impl Signature {
    pub const fn new(r: u32, s: u32) -> Self {
        Signature { r, s }
    }

    pub fn d(&self) -> usize {
        (self.r + self.s) as usize
    }

    pub fn swapped(&self) -> Self {
        Signature::new(self.s, self.r)
    }

    /// `⟨Z_k, Z_k⟩`: +1 for the first `r` basis vectors, -1 after.
    pub fn central_sign(&self, k: usize) -> i64 {
        if k < self.r as usize {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.r, self.s)
    }
}

/// Sign of the scalar product relative to the constructed minimal module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProductSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl ProductSign {
    pub fn value(self) -> i8 {
        match self {
            ProductSign::Plus => 1,
            ProductSign::Minus => -1,
        }
    }
}

/// Which irreducible module underlies the minimal module. `Plus` and `Minus`
/// exist only where the volume element `J_1 ... J_d` acts as `±Id` on a
/// minimal module; the label is that sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IrreducibleType {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "unique")]
    Unique,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MinimalVariant {
    pub product_sign: ProductSign,
    pub irreducible_type: IrreducibleType,
}

impl MinimalVariant {
    pub const fn new(product_sign: ProductSign, irreducible_type: IrreducibleType) -> Self {
        MinimalVariant {
            product_sign,
            irreducible_type,
        }
    }

    /// The default variant for `sig`: positive product, and the `+` type
    /// when two types exist.
    pub fn standard(sig: Signature) -> Self {
        let ty = if has_two_types(sig) {
            IrreducibleType::Plus
        } else {
            IrreducibleType::Unique
        };
        MinimalVariant::new(ProductSign::Plus, ty)
    }

    pub fn label(&self) -> String {
        let p = match self.product_sign {
            ProductSign::Plus => "+",
            ProductSign::Minus => "-",
        };
        match self.irreducible_type {
            IrreducibleType::Plus => format!("{p},+"),
            IrreducibleType::Minus => format!("{p},-"),
            IrreducibleType::Unique => format!("{p},unique"),
        }
    }
}

/// How a module is assembled: multiplicities of minimal variants, in the
/// order the blocks appear before the metric reordering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub signature: Signature,
    pub summands: Vec<(MinimalVariant, usize)>,
}

impl ModuleSpec {
    pub fn minimal(sig: Signature) -> Self {
        ModuleSpec {
            signature: sig,
            summands: vec![(MinimalVariant::standard(sig), 1)],
        }
    }

    /// `k` copies of the standard minimal module.
    pub fn copies(sig: Signature, k: usize) -> Self {
        ModuleSpec {
            signature: sig,
            summands: vec![(MinimalVariant::standard(sig), k)],
        }
    }

    /// `p⁺` copies of the minimal module and `p⁻` copies with negated metric
    /// (standard irreducible type).
    pub fn with_signs(sig: Signature, p_plus: usize, p_minus: usize) -> Self {
        let ty = MinimalVariant::standard(sig).irreducible_type;
        ModuleSpec {
            signature: sig,
            summands: vec![
                (MinimalVariant::new(ProductSign::Plus, ty), p_plus),
                (MinimalVariant::new(ProductSign::Minus, ty), p_minus),
            ],
        }
    }

    /// Multiplicities `p⁺₊, p⁻₊, p⁺₋, p⁻₋` (upper index: product sign, lower
    /// index: irreducible type).
    pub fn with_types(sig: Signature, pp: usize, mp: usize, pm: usize, mm: usize) -> Self {
        use IrreducibleType as T;
        use ProductSign as P;
        ModuleSpec {
            signature: sig,
            summands: vec![
                (MinimalVariant::new(P::Plus, T::Plus), pp),
                (MinimalVariant::new(P::Minus, T::Plus), mp),
                (MinimalVariant::new(P::Plus, T::Minus), pm),
                (MinimalVariant::new(P::Minus, T::Minus), mm),
            ],
        }
    }

    pub fn count(&self, v: MinimalVariant) -> usize {
        self.summands
            .iter()
            .filter(|(w, _)| *w == v)
            .map(|(_, k)| *k)
            .sum()
    }

    pub fn total_copies(&self) -> usize {
        self.summands.iter().map(|(_, k)| *k).sum()
    }

    pub fn dim(&self) -> crate::Result<usize> {
        Ok(self.total_copies() * min_admissible_dim(self.signature)? as usize)
    }

    /// `(p⁺, p⁻)`, summing over irreducible types.
    pub fn sign_counts(&self) -> (usize, usize) {
        let mut out = (0, 0);
        for (v, k) in &self.summands {
            match v.product_sign {
                ProductSign::Plus => out.0 += k,
                ProductSign::Minus => out.1 += k,
            }
        }
        out
    }
}

/// An admissible module in an integral basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordModule {
    pub signature: Signature,
    pub dim_v: usize,
    pub generators: Vec<SignedPerm>,
    pub metric: Vec<i8>,
    pub spec: ModuleSpec,
}

impl CliffordModule {
    /// Positions of `V₊` and `V₋` basis vectors.
    pub fn plus_minus_split(&self) -> (Vec<usize>, Vec<usize>) {
        let plus = (0..self.dim_v).filter(|&i| self.metric[i] > 0).collect();
        let minus = (0..self.dim_v).filter(|&i| self.metric[i] < 0).collect();
        (plus, minus)
    }

    /// `J_z = Σ z_k J_k` as a dense integer matrix.
    pub fn j_of(&self, z: &[i64]) -> Vec<Vec<i64>> {
        let n = self.dim_v;
        let mut m = vec![vec![0i64; n]; n];
        for (k, g) in self.generators.iter().enumerate() {
            if z[k] == 0 {
                continue;
            }
            for i in 0..n {
                let (j, s) = g.image(i);
                m[j][i] += s as i64 * z[k];
            }
        }
        m
    }

    /// Volume element `J_1 J_2 ... J_d`.
    pub fn volume_element(&self) -> SignedPerm {
        let mut w = SignedPerm::identity(self.dim_v);
        for g in &self.generators {
            w = w.compose(g);
        }
        w
    }
}
