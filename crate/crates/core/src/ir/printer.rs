use std::fmt::Write;

use super::CompositeInstruction;

/// Line-oriented serialization: a `kernel <name>(<vars>)` header followed by
/// one `Gate q[i](, q[j])(, angle)` line per instruction. Nested composites
/// are written flattened.
pub(super) fn pretty_print(c: &CompositeInstruction) -> String {
    let mut out = String::with_capacity(16 * c.n_instructions() + 32);
    let vars: Vec<&str> = c.variables().iter().map(|v| &**v).collect();
    let _ = writeln!(out, "kernel {}({})", c.name(), vars.join(", "));
    for inst in c.instructions() {
        let _ = writeln!(out, "{inst}");
    }
    out
}

#[cfg(test)]
mod tests {
    use crate::ir::{parse_kernel, CompositeInstruction, Instruction, Parameter};

    #[test]
    fn golden_format() {
        let mut c = CompositeInstruction::new("bell");
        c.add_instruction(Instruction::create("H", &[0], &[]).unwrap());
        c.add_instruction(Instruction::create("CNOT", &[0, 1], &[]).unwrap());
        c.add_instruction(Instruction::create("Rz", &[1], &["-0.25*t0".parse().unwrap()]).unwrap());
        c.add_instruction(Instruction::create("Ry", &[0], &[Parameter::Concrete(0.5)]).unwrap());
        c.add_instruction(Instruction::create("Measure", &[1], &[]).unwrap());
        let text = c.pretty_print();
        assert_eq!(
            text,
            "kernel bell(t0)\nH q[0]\nCNOT q[0], q[1]\nRz q[1], -0.25*t0\nRy q[0], 0.5\nMeasure q[1]\n"
        );
        assert_eq!(parse_kernel(&text).unwrap(), c);
    }
}
