//! ADAPT operator pools.

use num_complex::Complex64;

use super::AnsatzError;
use crate::fermion::{anti_hermitian_excitation, FermionOperator, JordanWigner};
use crate::pauli::PauliOperator;

pub const POOL_NAMES: [&str; 2] = ["singlet-adapted-uccsd", "uccsd"];

/// One pool operator: a label and an anti-Hermitian Pauli generator.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolElement {
    pub label: String,
    pub generator: PauliOperator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorPool {
    pub name: String,
    pub elements: Vec<PoolElement>,
}

impl OperatorPool {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Appends `generator` unless it is zero or already present.
    fn push_unique(&mut self, label: String, generator: PauliOperator) {
        if generator.is_empty() {
            return;
        }
        if self
            .elements
            .iter()
            .any(|e| e.generator.max_coefficient_diff(&generator) < 1e-12)
        {
            return;
        }
        self.elements.push(PoolElement { label, generator });
    }
}

/// Registry-facing pool builder.
pub trait PoolGenerator: Send + Sync {
    fn name(&self) -> &str;
    fn build(&self, ne: usize, nq: usize) -> Result<OperatorPool, AnsatzError>;
}

/// Pool builder for one of [`POOL_NAMES`].
pub struct NamedPool(pub &'static str);

impl PoolGenerator for NamedPool {
    fn name(&self) -> &str {
        self.0
    }
    fn build(&self, ne: usize, nq: usize) -> Result<OperatorPool, AnsatzError> {
        build_pool(self.0, ne, nq)
    }
}

/// Orbital partition used by the pools. With even `ne` and `nq` the
/// occupied set is the closed-shell alpha/beta layout and excitations must
/// conserve spin; otherwise the first `ne` qubits are occupied and spin is
/// not tracked.
struct Partition {
    occupied: Vec<usize>,
    virtuals: Vec<usize>,
    /// `Some(m)` when qubits `< m` are alpha and the rest beta.
    spin_split: Option<usize>,
}

impl Partition {
    fn new(ne: usize, nq: usize) -> Result<Self, AnsatzError> {
        let occupied = super::reference_occupation(ne, nq)?;
        let virtuals = (0..nq).filter(|q| !occupied.contains(q)).collect();
        let spin_split = (ne % 2 == 0 && nq % 2 == 0).then_some(nq / 2);
        Ok(Partition {
            occupied,
            virtuals,
            spin_split,
        })
    }

    fn alpha_count(&self, qs: &[usize]) -> usize {
        match self.spin_split {
            Some(m) => qs.iter().filter(|&&q| q < m).count(),
            None => 0,
        }
    }
}

fn pairs(v: &[usize]) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            out.push([v[i], v[j]]);
        }
    }
    out
}

/// Scales `g` to unit Euclidean norm over its Pauli coefficients.
fn normalized(g: PauliOperator) -> PauliOperator {
    let norm = g.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        g
    } else {
        g.scale(Complex64::new(1.0 / norm, 0.0))
    }
}

/// Builds the named pool for `ne` electrons in `nq` spin-orbitals.
///
/// * `uccsd`: every occupied-to-virtual single and double excitation
///   (spin-conserving in the closed-shell layout), as `JW(T - T†)`.
/// * `singlet-adapted-uccsd`: spin-summed combinations over spatial
///   orbitals. Singles are `E_ia - E_ai` with `E_ia` summed over both spins;
///   doubles for `i <= j` occupied and `a <= b` virtual are the sum and the
///   difference of the direct and exchange spin sums. Each generator is
///   normalized. Requires the closed-shell layout.
///
/// Zero and duplicate generators are dropped in both pools.
pub fn build_pool(name: &str, ne: usize, nq: usize) -> Result<OperatorPool, AnsatzError> {
    match name {
        "uccsd" => uccsd_pool(ne, nq),
        "singlet-adapted-uccsd" => singlet_pool(ne, nq),
        _ => Err(AnsatzError::UnknownPool {
            name: name.to_string(),
            available: POOL_NAMES.iter().map(|s| s.to_string()).collect(),
        }),
    }
}

fn uccsd_pool(ne: usize, nq: usize) -> Result<OperatorPool, AnsatzError> {
    let part = Partition::new(ne, nq)?;
    let jw = JordanWigner::new(nq);
    let mut pool = OperatorPool {
        name: "uccsd".into(),
        elements: Vec::new(),
    };
    for &i in &part.occupied {
        for &a in &part.virtuals {
            if part.alpha_count(&[i]) != part.alpha_count(&[a]) {
                continue;
            }
            let e = anti_hermitian_excitation(&[i], &[a], "")?;
            pool.push_unique(format!("{i}->{a}"), jw.transform(&e.generator)?);
        }
    }
    for occ in pairs(&part.occupied) {
        for virt in pairs(&part.virtuals) {
            if part.alpha_count(&occ) != part.alpha_count(&virt) {
                continue;
            }
            let e = anti_hermitian_excitation(&occ, &virt, "")?;
            pool.push_unique(
                format!("{},{}->{},{}", occ[0], occ[1], virt[0], virt[1]),
                jw.transform(&e.generator)?,
            );
        }
    }
    Ok(pool)
}

fn singlet_pool(ne: usize, nq: usize) -> Result<OperatorPool, AnsatzError> {
    if ne % 2 != 0 || nq % 2 != 0 || ne == 0 || ne > nq {
        return Err(AnsatzError::InvalidSpec(format!(
            "the singlet-adapted pool needs a closed-shell reference, got ne = {ne}, nq = {nq}"
        )));
    }
    let m = nq / 2;
    let h = ne / 2;
    let jw = JordanWigner::new(nq);
    let spin = |p: usize, s: usize| p + s * m;
    let mut pool = OperatorPool {
        name: "singlet-adapted-uccsd".into(),
        elements: Vec::new(),
    };
    let anti = |t: FermionOperator| -> Result<PauliOperator, AnsatzError> {
        Ok(normalized(jw.transform(&t.minus(&t.adjoint()))?))
    };

    for i in 0..h {
        for a in h..m {
            let mut t = FermionOperator::zero();
            for s in 0..2 {
                t.add_term(vec![(spin(a, s), true), (spin(i, s), false)], 1.0);
            }
            pool.push_unique(format!("{i}->{a}"), anti(t)?);
        }
    }
    for i in 0..h {
        for j in i..h {
            for a in h..m {
                for b in a..m {
                    let mut direct = FermionOperator::zero();
                    let mut exchange = FermionOperator::zero();
                    for s in 0..2 {
                        for t in 0..2 {
                            direct.add_term(
                                vec![
                                    (spin(a, s), true),
                                    (spin(b, t), true),
                                    (spin(j, t), false),
                                    (spin(i, s), false),
                                ],
                                1.0,
                            );
                            exchange.add_term(
                                vec![
                                    (spin(a, s), true),
                                    (spin(b, t), true),
                                    (spin(j, s), false),
                                    (spin(i, t), false),
                                ],
                                1.0,
                            );
                        }
                    }
                    let label = format!("{i},{j}->{a},{b}");
                    pool.push_unique(format!("{label}+"), anti(direct.plus(&exchange))?);
                    pool.push_unique(format!("{label}-"), anti(direct.minus(&exchange))?);
                }
            }
        }
    }
    Ok(pool)
}
