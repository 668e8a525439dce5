//! Measurement of Pauli observables: appending basis changes and
//! measurements to a circuit, and reducing counts back to expectations.

use std::collections::BTreeMap;

use crate::ir::{CompositeInstruction, Gate, Instruction};

use super::{Pauli, PauliError, PauliOperator, PauliTerm};

/// Output of [`observe`]: one measured circuit per non-identity term plus
/// the identity coefficient as a constant.
#[derive(Debug, Clone)]
pub struct ObservedCircuits {
    pub terms: Vec<(PauliTerm, CompositeInstruction)>,
    pub offset: f64,
}

/// Appends, for each non-identity term of `obs`, the rotation into the
/// term's eigenbasis (X: H; Y: Sdg then H) and a Z measurement on each
/// support qubit. Circuits are named after the term, e.g. `Z0Z1`.
pub fn observe(
    obs: &PauliOperator,
    circuit: &CompositeInstruction,
) -> Result<ObservedCircuits, PauliError> {
    if circuit.has_measurements() {
        return Err(PauliError::AlreadyMeasured(circuit.name().to_string()));
    }
    if !obs.is_hermitian() {
        return Err(PauliError::NotHermitian);
    }
    let base = circuit.flatten();
    let mut terms = Vec::with_capacity(obs.len());
    for term in obs.terms().filter(|t| !t.is_identity()) {
        let label: String = term.string.to_string().split_whitespace().collect();
        let mut c = base.clone();
        c.set_name(label);
        for &(q, p) in term.string.ops() {
            match p {
                Pauli::X => c.add_instruction(Instruction::one(Gate::H, q)),
                Pauli::Y => {
                    c.add_instruction(Instruction::one(Gate::Sdg, q));
                    c.add_instruction(Instruction::one(Gate::H, q));
                }
                Pauli::Z => {}
            }
        }
        for q in term.string.support() {
            c.add_instruction(Instruction::one(Gate::Measure, q));
        }
        terms.push((term, c));
    }
    Ok(ObservedCircuits {
        terms,
        offset: obs.identity_coefficient().re,
    })
}

/// Count-like weights: integer shot counts or exact probabilities.
pub trait CountWeight: Copy {
    fn weight(self) -> f64;
}

macro_rules! count_weight {
    ($($t:ty),*) => {$(
        impl CountWeight for $t {
            fn weight(self) -> f64 {
                self as f64
            }
        }
    )*};
}

count_weight!(u32, u64, usize, i32, i64, f64);

/// Estimates `Re(c) <P>` from bitstring counts. Character `q` of each
/// bitstring is the outcome of qubit `q`; the sign of an outcome is the
/// parity of the bits on the term's support.
pub fn expectation_from_counts<W: CountWeight>(
    term: &PauliTerm,
    counts: &BTreeMap<String, W>,
) -> Result<f64, PauliError> {
    let support = term.string.support();
    let mut total = 0.0;
    let mut signed = 0.0;
    for (bits, &w) in counts {
        let w = w.weight();
        let bytes = bits.as_bytes();
        let mut parity = false;
        for &q in &support {
            match bytes.get(q) {
                Some(b'1') => parity = !parity,
                Some(_) => {}
                None => {
                    return Err(PauliError::BitstringTooShort {
                        bits: bits.clone(),
                        qubit: q,
                    })
                }
            }
        }
        total += w;
        signed += if parity { -w } else { w };
    }
    if counts.is_empty() || total <= 0.0 {
        return Err(PauliError::EmptyCounts);
    }
    Ok(term.coefficient.re * signed / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;
    use num_complex::Complex64;

    fn term(s: &str, c: f64) -> PauliTerm {
        PauliOperator::term(c, s).terms().next().unwrap()
    }

    #[test]
    fn single_z_measurement() {
        let obs = PauliOperator::term(1.0, "Z0");
        let out = observe(&obs, &CompositeInstruction::new("empty")).unwrap();
        assert_eq!(out.terms.len(), 1);
        let c = &out.terms[0].1;
        let gates: Vec<Gate> = c.instructions().map(|i| i.gate()).collect();
        assert_eq!(gates, vec![Gate::Measure]);
    }

    #[test]
    fn x_gets_hadamard_then_measure() {
        let obs = PauliOperator::term(1.0, "X1");
        let out = observe(&obs, &CompositeInstruction::new("k")).unwrap();
        let gates: Vec<(Gate, usize)> = out.terms[0]
            .1
            .instructions()
            .map(|i| (i.gate(), i.qubits()[0]))
            .collect();
        assert_eq!(gates, vec![(Gate::H, 1), (Gate::Measure, 1)]);
    }

    #[test]
    fn rejects_measured_or_non_hermitian() {
        let mut c = CompositeInstruction::new("m");
        c.add_instruction(Instruction::one(Gate::Measure, 0));
        assert!(observe(&PauliOperator::term(1.0, "Z0"), &c).is_err());
        let ah = PauliOperator::term(Complex64::new(0.0, 1.0), "Z0");
        assert_eq!(
            observe(&ah, &CompositeInstruction::new("k")).unwrap_err(),
            PauliError::NotHermitian
        );
    }

    #[test]
    fn counts_examples() {
        let z0 = term("Z0", 1.0);
        let c1: BTreeMap<String, u64> = [("0".to_string(), 100)].into();
        assert_eq!(expectation_from_counts(&z0, &c1).unwrap(), 1.0);
        let c2: BTreeMap<String, u64> = [("0".to_string(), 50), ("1".to_string(), 50)].into();
        assert_eq!(expectation_from_counts(&z0, &c2).unwrap(), 0.0);
        let zz = term("Z0 Z1", 0.5818);
        let c3: BTreeMap<String, u64> = [("11".to_string(), 100)].into();
        assert!((expectation_from_counts(&zz, &c3).unwrap() - 0.5818).abs() < 1e-15);
        let empty: BTreeMap<String, u64> = BTreeMap::new();
        assert_eq!(expectation_from_counts(&z0, &empty), Err(PauliError::EmptyCounts));
        let short = PauliTerm::new(PauliString::single(3, Pauli::Z), Complex64::new(1.0, 0.0));
        assert!(expectation_from_counts(&short, &c1).is_err());
    }
}
