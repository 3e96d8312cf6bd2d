//! Module construction.
//!
//! Stored cells are realized on `(Z/2)^m` by real Pauli strings
//! `P(x, z) e_v = (-1)^{z·v} e_{v⊕x}` found by a small backtracking search;
//! everything else is reached by tensoring with 16-dimensional base modules.
//! All results pass through the exact verifier before they are returned.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::table::{reduce, table_cell, Shift};
use super::{
    has_two_types, verify_module_axioms, CliffordModule, IrreducibleType, MinimalVariant,
    ModuleSpec, ProductSign, Signature, SignedPerm,
};
use crate::error::{Error, Result};

#[inline]
fn dot(a: u32, b: u32) -> u32 {
    (a & b).count_ones() & 1
}

fn pauli(m: u32, x: u32, z: u32) -> SignedPerm {
    let n = 1usize << m;
    let perm = (0..n).map(|v| v ^ x as usize).collect();
    let signs = (0..n)
        .map(|v| if dot(z, v as u32) == 1 { -1 } else { 1 })
        .collect();
    SignedPerm { perm, signs }
}

type Pauli = (u32, u32);

#[inline]
fn anticommute(a: Pauli, b: Pauli) -> bool {
    a.0 != b.0 && (dot(a.0, b.1) ^ dot(a.1, b.0)) == 1
}

/// Backtracking with forward checking. Generators of the same square sign
/// are interchangeable, so each type is chosen in increasing candidate
/// order; the type with fewer live candidates is extended first.
struct Search {
    need_pos: usize,
    need_neg: usize,
    g: u32,
    want_scalar_volume: bool,
}

impl Search {
    fn new(sig: Signature, m: u32) -> (Self, Vec<Pauli>, Vec<Pauli>) {
        let g = if sig.s > 0 { 1u32 << (m - 1) } else { 0 };
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for x in 1u32..(1 << m) {
            for z in 0u32..(1 << m) {
                // square sign (-1)^{x·z}; skewness needs g·x + x·z = 1
                match (dot(x, z), dot(g, x)) {
                    (1, 0) => pos.push((x, z)),
                    (0, 1) => neg.push((x, z)),
                    _ => {}
                }
            }
        }
        let s = Search {
            need_pos: sig.r as usize,
            need_neg: sig.s as usize,
            g,
            want_scalar_volume: has_two_types(sig),
        };
        (s, pos, neg)
    }

    fn closing_string(&self, pos: &[Pauli], neg: &[Pauli]) -> Option<(Pauli, bool)> {
        let c = pos
            .iter()
            .chain(neg)
            .fold((0, 0), |(a, b), &(x, z)| (a ^ x, b ^ z));
        if c.0 == 0 {
            return None;
        }
        let positive = dot(c.0, c.1) == 1;
        (dot(self.g, c.0) == u32::from(!positive)).then_some((c, positive))
    }

    #[allow(clippy::too_many_arguments)]
    fn run(
        &self,
        pos: &mut Vec<Pauli>,
        neg: &mut Vec<Pauli>,
        live_pos: &[Pauli],
        live_neg: &[Pauli],
        budget: &mut u64,
    ) -> bool {
        let (rp, rn) = (self.need_pos - pos.len(), self.need_neg - neg.len());
        if rp + rn == 0 {
            return true;
        }
        if *budget == 0 || live_pos.len() < rp || live_neg.len() < rn {
            return false;
        }
        *budget -= 1;
        if self.want_scalar_volume && rp + rn == 1 {
            // the product of all strings must be ±Id, which fixes the last one
            let Some((c, positive)) = self.closing_string(pos, neg) else {
                return false;
            };
            let (live, dst) = if positive { (live_pos, &mut *pos) } else { (live_neg, &mut *neg) };
            if (positive && rp == 1 || !positive && rn == 1) && live.contains(&c) {
                dst.push(c);
                return true;
            }
            return false;
        }
        let extend_pos = rp > 0 && (rn == 0 || live_pos.len() <= live_neg.len());
        let pool = if extend_pos { live_pos } else { live_neg };
        for (idx, &c) in pool.iter().enumerate() {
            let (next_pos, next_neg): (Vec<Pauli>, Vec<Pauli>) = if extend_pos {
                (
                    pool[idx + 1..].iter().copied().filter(|&u| anticommute(u, c)).collect(),
                    live_neg.iter().copied().filter(|&u| anticommute(u, c)).collect(),
                )
            } else {
                (
                    live_pos.iter().copied().filter(|&u| anticommute(u, c)).collect(),
                    pool[idx + 1..].iter().copied().filter(|&u| anticommute(u, c)).collect(),
                )
            };
            if extend_pos {
                pos.push(c);
            } else {
                neg.push(c);
            }
            if self.run(pos, neg, &next_pos, &next_neg, budget) {
                return true;
            }
            if extend_pos {
                pos.pop();
            } else {
                neg.pop();
            }
            if *budget == 0 {
                return false;
            }
        }
        false
    }
}

fn stored_cell_module(sig: Signature) -> Result<CliffordModule> {
    let dim = table_cell(sig).expect("stored cell") as usize;
    let m = dim.trailing_zeros();
    let metric: Vec<i8> = if sig.s > 0 {
        (0..dim).map(|v| if v < dim / 2 { 1 } else { -1 }).collect()
    } else {
        vec![1; dim]
    };
    let generators = if sig.d() == 0 {
        Vec::new()
    } else {
        let (search, live_pos, live_neg) = Search::new(sig, m);
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        let mut budget = 20_000_000u64;
        if !search.run(&mut pos, &mut neg, &live_pos, &live_neg, &mut budget) {
            return Err(Error::Construction {
                signature: sig,
                axiom: "existence".into(),
                detail: format!("no Pauli-string realization found in dimension {dim}"),
            });
        }
        pos.iter().chain(&neg).map(|&(x, z)| pauli(m, x, z)).collect()
    };
    Ok(CliffordModule {
        signature: sig,
        dim_v: dim,
        generators,
        metric,
        spec: ModuleSpec::minimal(sig),
    })
}

fn shift_base(shift: Shift) -> Result<CliffordModule> {
    let (r, s) = shift.offset();
    stored_cell_module(Signature::new(r, s))
}

/// `A ⊗ B` where `B` is a 16-dimensional base module with `d_B = 8`.
/// New generators are `J ⊗ ω_B` and `Id ⊗ K`; since `d_B` is even, `ω_B`
/// anticommutes with every `K` and squares to `Id`.
fn tensor_step(a: &CliffordModule, b: &CliffordModule) -> CliffordModule {
    let omega_b = b.volume_element();
    let id_a = SignedPerm::identity(a.dim_v);
    let (ra, rb) = (a.signature.r as usize, b.signature.r as usize);
    let lift_a = |k: usize| a.generators[k].kron(&omega_b);
    let lift_b = |k: usize| id_a.kron(&b.generators[k]);
    let mut gens = Vec::with_capacity(a.generators.len() + b.generators.len());
    gens.extend((0..ra).map(lift_a));
    gens.extend((0..rb).map(lift_b));
    gens.extend((ra..a.generators.len()).map(lift_a));
    gens.extend((rb..b.generators.len()).map(lift_b));

    let mut metric = Vec::with_capacity(a.dim_v * b.dim_v);
    for &ga in &a.metric {
        for &hb in &b.metric {
            metric.push(ga * hb);
        }
    }
    let sig = Signature::new(a.signature.r + b.signature.r, a.signature.s + b.signature.s);
    let module = CliffordModule {
        signature: sig,
        dim_v: metric.len(),
        generators: gens,
        metric,
        spec: ModuleSpec::minimal(sig),
    };
    plus_first(module)
}

/// Stable relabelling that puts the positive-metric vectors first.
fn plus_first(m: CliffordModule) -> CliffordModule {
    let n = m.dim_v;
    let mut relabel = vec![0; n];
    let mut next = 0;
    for pass in [1i8, -1] {
        for i in 0..n {
            if m.metric[i] == pass {
                relabel[i] = next;
                next += 1;
            }
        }
    }
    let mut metric = vec![0; n];
    for i in 0..n {
        metric[relabel[i]] = m.metric[i];
    }
    CliffordModule {
        generators: m.generators.iter().map(|g| g.relabel(&relabel)).collect(),
        metric,
        ..m
    }
}

fn standard_minimal(sig: Signature) -> Result<CliffordModule> {
    let (base, steps) = reduce(sig);
    let mut module = stored_cell_module(base)?;
    for step in steps {
        module = tensor_step(&module, &shift_base(step)?);
    }
    Ok(module)
}

fn cache() -> &'static Mutex<HashMap<Signature, CliffordModule>> {
    static CACHE: OnceLock<Mutex<HashMap<Signature, CliffordModule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached_standard(sig: Signature) -> Result<CliffordModule> {
    if let Some(m) = cache().lock().expect("module cache").get(&sig) {
        return Ok(m.clone());
    }
    let m = standard_minimal(sig)?;
    cache()
        .lock()
        .expect("module cache")
        .insert(sig, m.clone());
    Ok(m)
}

fn unsupported(sig: Signature, variant: MinimalVariant) -> Error {
    Error::UnsupportedVariant {
        signature: sig,
        variant: variant.label(),
    }
}

pub fn build_minimal_module(sig: Signature, variant: MinimalVariant) -> Result<CliffordModule> {
    if sig.d() == 0 {
        return Err(Error::EmptySignature);
    }
    let two = has_two_types(sig);
    match (two, variant.irreducible_type) {
        (true, IrreducibleType::Unique) | (false, IrreducibleType::Plus | IrreducibleType::Minus) => {
            return Err(unsupported(sig, variant))
        }
        _ => {}
    }
    let mut module = cached_standard(sig)?;
    if two {
        let want: i8 = match variant.irreducible_type {
            IrreducibleType::Minus => -1,
            _ => 1,
        };
        let have = module.volume_element().scalar().ok_or_else(|| Error::Construction {
            signature: sig,
            axiom: "volume element".into(),
            detail: "volume element is not ±Id on a two-type minimal module".into(),
        })?;
        if have != want {
            // negating one generator negates the volume element
            module.generators[0] = module.generators[0].neg();
        }
    }
    if variant.product_sign == ProductSign::Minus {
        for g in module.metric.iter_mut() {
            *g = -*g;
        }
    }
    module.spec = ModuleSpec {
        signature: sig,
        summands: vec![(variant, 1)],
    };
    let report = verify_module_axioms(&module);
    if let Some(f) = report.first_failure() {
        return Err(Error::Construction {
            signature: sig,
            axiom: f.axiom.name().into(),
            detail: f.witness.as_ref().map(|w| w.to_string()).unwrap_or_default(),
        });
    }
    Ok(module)
}

/// Block-diagonal sum of the summands, metric concatenated in spec order.
pub fn build_module(spec: &ModuleSpec) -> Result<CliffordModule> {
    let sig = spec.signature;
    if spec.total_copies() == 0 {
        return Err(Error::InvalidSpec("all multiplicities are zero".into()));
    }
    let mut blocks = Vec::new();
    for &(variant, k) in &spec.summands {
        if k == 0 {
            continue;
        }
        let m = build_minimal_module(sig, variant)?;
        blocks.extend(std::iter::repeat(m).take(k));
    }
    let mut iter = blocks.into_iter();
    let first = iter.next().expect("nonempty");
    let mut generators = first.generators;
    let mut metric = first.metric;
    for b in iter {
        generators = generators
            .iter()
            .zip(&b.generators)
            .map(|(g, h)| g.direct_sum(h))
            .collect();
        metric.extend_from_slice(&b.metric);
    }
    let module = CliffordModule {
        signature: sig,
        dim_v: metric.len(),
        generators,
        metric,
        spec: spec.clone(),
    };
    let report = verify_module_axioms(&module);
    if let Some(f) = report.first_failure() {
        return Err(Error::Construction {
            signature: sig,
            axiom: f.axiom.name().into(),
            detail: f.witness.as_ref().map(|w| w.to_string()).unwrap_or_default(),
        });
    }
    Ok(module)
}
