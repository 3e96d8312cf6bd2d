use std::fmt;

use serde::Serialize;

use super::{min_admissible_dim, CliffordModule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axiom {
    Shape,
    CliffordRelations,
    SkewSymmetry,
    Isometry,
    MetricSignature,
    IntegralBasis,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Shape => "shape",
            Axiom::CliffordRelations => "AdMo1 (Clifford relations)",
            Axiom::SkewSymmetry => "AdMo2 (skew-symmetry)",
            Axiom::Isometry => "isometry <J_z X, J_z Y> = <z,z><X,Y>",
            Axiom::MetricSignature => "metric signature",
            Axiom::IntegralBasis => "integral basis",
        }
    }
}

/// Location of a failure: generator indices `k`, `l` and basis indices
/// `i`, `j`, whichever apply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct Witness {
    pub k: Option<usize>,
    pub l: Option<usize>,
    pub i: Option<usize>,
    pub j: Option<usize>,
    pub note: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, v) in [("k", self.k), ("l", self.l), ("i", self.i), ("j", self.j)] {
            if let Some(v) = v {
                parts.push(format!("{name}={v}"));
            }
        }
        write!(f, "{} [{}]", self.note, parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<AxiomCheck>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn get(&self, axiom: Axiom) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.axiom == axiom)
    }
}

fn check(axiom: Axiom, w: Option<Witness>) -> AxiomCheck {
    AxiomCheck {
        axiom,
        passed: w.is_none(),
        witness: w,
    }
}

fn shape(m: &CliffordModule) -> Option<Witness> {
    let bad = |note: String| {
        Some(Witness {
            note,
            ..Default::default()
        })
    };
    if m.generators.len() != m.signature.d() {
        return bad(format!(
            "{} generators for signature {}",
            m.generators.len(),
            m.signature
        ));
    }
    if m.metric.len() != m.dim_v {
        return bad(format!("metric length {} != dim {}", m.metric.len(), m.dim_v));
    }
    if m.metric.iter().any(|&g| g != 1 && g != -1) {
        return bad("metric entry outside ±1".into());
    }
    for (k, g) in m.generators.iter().enumerate() {
        if g.perm.len() != m.dim_v || g.signs.len() != m.dim_v {
            return Some(Witness {
                k: Some(k),
                note: "generator dimension mismatch".into(),
                ..Default::default()
            });
        }
        if super::SignedPerm::new(g.perm.clone(), g.signs.clone()).is_none() {
            return Some(Witness {
                k: Some(k),
                note: "not a signed permutation".into(),
                ..Default::default()
            });
        }
    }
    None
}

fn clifford(m: &CliffordModule) -> Option<Witness> {
    let sig = m.signature;
    let n = m.dim_v;
    for (k, a) in m.generators.iter().enumerate() {
        // J_k^2 = -<Z_k,Z_k> Id
        let want = -sig.central_sign(k) as i8;
        for i in 0..n {
            let (j, s) = a.image(i);
            let (l, t) = a.image(j);
            if l != i || s * t != want {
                return Some(Witness {
                    k: Some(k),
                    i: Some(i),
                    note: format!("J_k^2 != {want} Id"),
                    ..Default::default()
                });
            }
        }
        for (l, b) in m.generators.iter().enumerate().skip(k + 1) {
            for i in 0..n {
                let (j1, s1) = b.image(i);
                let (j2, s2) = a.image(j1);
                let (h1, t1) = a.image(i);
                let (h2, t2) = b.image(h1);
                if j2 != h2 || s1 * s2 != -(t1 * t2) {
                    return Some(Witness {
                        k: Some(k),
                        l: Some(l),
                        i: Some(i),
                        note: "J_k J_l + J_l J_k != 0".into(),
                        ..Default::default()
                    });
                }
            }
        }
    }
    None
}

fn skew(m: &CliffordModule) -> Option<Witness> {
    let g = &m.metric;
    for (k, a) in m.generators.iter().enumerate() {
        for i in 0..m.dim_v {
            let (j, s) = a.image(i);
            // (G J)_{ji} + (J^T G)_{ji} = g_j J_{ji} + J_{ij} g_i
            let lhs = g[j] as i64 * s as i64 + a.entry(i, j) as i64 * g[i] as i64;
            if lhs != 0 {
                return Some(Witness {
                    k: Some(k),
                    i: Some(i),
                    j: Some(j),
                    note: "J^T G + G J != 0".into(),
                    ..Default::default()
                });
            }
        }
    }
    None
}

fn isometry(m: &CliffordModule) -> Option<Witness> {
    for (k, a) in m.generators.iter().enumerate() {
        let eps = m.signature.central_sign(k) as i8;
        for i in 0..m.dim_v {
            let (j, _) = a.image(i);
            // images of distinct basis vectors are distinct basis vectors,
            // so only the diagonal can fail
            if m.metric[j] != eps * m.metric[i] {
                return Some(Witness {
                    k: Some(k),
                    i: Some(i),
                    j: Some(j),
                    note: "<J X_i, J X_i> != <z,z><X_i,X_i>".into(),
                    ..Default::default()
                });
            }
        }
    }
    None
}

fn metric_signature(m: &CliffordModule) -> Option<Witness> {
    if m.signature.s > 0 {
        let plus = m.metric.iter().filter(|&&g| g > 0).count();
        if 2 * plus != m.dim_v {
            return Some(Witness {
                note: format!("{plus} positive entries in dimension {}", m.dim_v),
                ..Default::default()
            });
        }
        return None;
    }
    // s = 0: each minimal summand carries a definite metric
    let block = match min_admissible_dim(m.signature) {
        Ok(b) => b as usize,
        Err(e) => {
            return Some(Witness {
                note: e.to_string(),
                ..Default::default()
            })
        }
    };
    let mut expect = Vec::with_capacity(m.dim_v);
    for (v, k) in &m.spec.summands {
        for _ in 0..(*k * block) {
            expect.push(v.product_sign.value());
        }
    }
    if expect != m.metric {
        let i = expect
            .iter()
            .zip(&m.metric)
            .position(|(a, b)| a != b)
            .unwrap_or(expect.len().min(m.metric.len()));
        return Some(Witness {
            i: Some(i),
            note: "definite metric does not match the module spec".into(),
            ..Default::default()
        });
    }
    None
}

fn integral_basis(m: &CliffordModule) -> Option<Witness> {
    let n = m.dim_v;
    let mut owner = vec![usize::MAX; n];
    for i in 0..n {
        owner.iter_mut().for_each(|o| *o = usize::MAX);
        for (k, a) in m.generators.iter().enumerate() {
            let (j, _) = a.image(i);
            if j == i {
                return Some(Witness {
                    k: Some(k),
                    i: Some(i),
                    note: "J_k fixes a basis line".into(),
                    ..Default::default()
                });
            }
            if owner[j] != usize::MAX {
                return Some(Witness {
                    k: Some(owner[j]),
                    l: Some(k),
                    i: Some(i),
                    j: Some(j),
                    note: "two generators map X_i to ±X_j".into(),
                    ..Default::default()
                });
            }
            owner[j] = k;
        }
    }
    None
}

/// Exact integer check of every module axiom. Later checks are skipped
/// (reported failed with a note) when the shape is wrong.
pub fn verify_module_axioms(m: &CliffordModule) -> VerificationReport {
    let s = shape(m);
    if s.is_some() {
        let mut checks = vec![check(Axiom::Shape, s)];
        for ax in [
            Axiom::CliffordRelations,
            Axiom::SkewSymmetry,
            Axiom::Isometry,
            Axiom::MetricSignature,
            Axiom::IntegralBasis,
        ] {
            checks.push(check(
                ax,
                Some(Witness {
                    note: "skipped: malformed module".into(),
                    ..Default::default()
                }),
            ));
        }
        return VerificationReport { checks };
    }
    VerificationReport {
        checks: vec![
            check(Axiom::Shape, None),
            check(Axiom::CliffordRelations, clifford(m)),
            check(Axiom::SkewSymmetry, skew(m)),
            check(Axiom::Isometry, isometry(m)),
            check(Axiom::MetricSignature, metric_signature(m)),
            check(Axiom::IntegralBasis, integral_basis(m)),
        ],
    }
}
