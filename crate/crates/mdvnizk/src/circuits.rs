//! Boolean circuit intermediate representation.
//!
//! Gate-list circuits over {AND, XOR, NOT, CONST0, CONST1} with a canonical
//! byte encoding. Wires are numbered with inputs first, then one wire per
//! gate in list order; gate operands must reference earlier wires.
//!
//! Canonical encoding format ("CIR1"): magic bytes, varint input count,
//! varint gate count, per-gate 1-byte opcode plus varint operand indices,
//! varint output count, varint output indices. The encoder first rewrites
//! the circuit into a normal form (gates renumbered by first use from the
//! outputs, dead gates dropped), so structurally equal circuits built in
//! different insertion orders serialize to identical bytes.

use crate::bits::Bits;
use crate::error::{Error, Result};
use crate::wire::{put_varint, Reader};

pub type Wire = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    And(Wire, Wire),
    Xor(Wire, Wire),
    Not(Wire),
    Const0,
    Const1,
}

impl Gate {
    fn opcode(&self) -> u8 {
        match self {
            Gate::And(..) => 0x01,
            Gate::Xor(..) => 0x02,
            Gate::Not(..) => 0x03,
            Gate::Const0 => 0x04,
            Gate::Const1 => 0x05,
        }
    }

    fn operands(&self) -> [Option<Wire>; 2] {
        match *self {
            Gate::And(a, b) | Gate::Xor(a, b) => [Some(a), Some(b)],
            Gate::Not(a) => [Some(a), None],
            Gate::Const0 | Gate::Const1 => [None, None],
        }
    }

    fn map_operands(&self, f: impl Fn(Wire) -> Wire) -> Gate {
        match *self {
            Gate::And(a, b) => Gate::And(f(a), f(b)),
            Gate::Xor(a, b) => Gate::Xor(f(a), f(b)),
            Gate::Not(a) => Gate::Not(f(a)),
            g => g,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub inputs: u32,
    pub gates: Vec<Gate>,
    pub outputs: Vec<Wire>,
}

impl Circuit {
    pub fn wire_count(&self) -> u32 {
        self.inputs + self.gates.len() as u32
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    pub fn output_len(&self) -> usize {
        self.outputs.len()
    }

    /// Check the topological-order and output-reference invariants.
    pub fn validate(&self) -> Result<()> {
        for (i, gate) in self.gates.iter().enumerate() {
            let defined = self.inputs + i as u32;
            for op in gate.operands().into_iter().flatten() {
                if op >= defined {
                    return Err(Error::malformed(
                        "circuit",
                        format!("gate {i} references wire {op} >= {defined}"),
                    ));
                }
            }
        }
        let total = self.wire_count();
        for &o in &self.outputs {
            if o >= total {
                return Err(Error::malformed(
                    "circuit",
                    format!("output references wire {o} >= {total}"),
                ));
            }
        }
        Ok(())
    }

    /// Evaluate gate-by-gate in topological order.
    pub fn eval(&self, input: &Bits) -> Result<Bits> {
        if input.len() != self.inputs as usize {
            return Err(Error::InputArity {
                expected: self.inputs as usize,
                got: input.len(),
            });
        }
        let mut wires = Vec::with_capacity(self.wire_count() as usize);
        wires.extend(input.iter());
        for gate in &self.gates {
            let v = match *gate {
                Gate::And(a, b) => wires[a as usize] & wires[b as usize],
                Gate::Xor(a, b) => wires[a as usize] ^ wires[b as usize],
                Gate::Not(a) => wires[a as usize] ^ 1,
                Gate::Const0 => 0,
                Gate::Const1 => 1,
            };
            wires.push(v);
        }
        Ok(self.outputs.iter().map(|&o| wires[o as usize]).collect())
    }

    /// Rewrite into normal form: gates reachable from the outputs only,
    /// numbered in deterministic first-use order (iterative DFS from the
    /// outputs, operands left to right).
    pub fn normalize(&self) -> Circuit {
        let mut order: Vec<u32> = Vec::new(); // old gate index, completion order
        let mut state = vec![0u8; self.gates.len()]; // 0 unvisited, 1 open, 2 done
        for &out in &self.outputs {
            if out < self.inputs {
                continue;
            }
            let root = out - self.inputs;
            if state[root as usize] == 2 {
                continue;
            }
            let mut stack = vec![root];
            while let Some(&g) = stack.last() {
                if state[g as usize] == 2 {
                    stack.pop();
                    continue;
                }
                if state[g as usize] == 0 {
                    state[g as usize] = 1;
                    // push operands right-to-left so the left one completes first
                    let ops = self.gates[g as usize].operands();
                    for op in ops.into_iter().rev().flatten() {
                        if op >= self.inputs {
                            let child = op - self.inputs;
                            if state[child as usize] == 0 {
                                stack.push(child);
                            }
                        }
                    }
                } else {
                    state[g as usize] = 2;
                    order.push(g);
                    stack.pop();
                }
            }
        }
        let mut renumber = vec![u32::MAX; self.gates.len()];
        for (new, &old) in order.iter().enumerate() {
            renumber[old as usize] = self.inputs + new as u32;
        }
        let map = |w: Wire| {
            if w < self.inputs {
                w
            } else {
                renumber[(w - self.inputs) as usize]
            }
        };
        Circuit {
            inputs: self.inputs,
            gates: order
                .iter()
                .map(|&old| self.gates[old as usize].map_operands(map))
                .collect(),
            outputs: self.outputs.iter().map(|&o| map(o)).collect(),
        }
    }

    /// Deterministic, self-delimiting canonical encoding.
    pub fn encode(&self) -> Vec<u8> {
        let norm = self.normalize();
        let mut out = Vec::new();
        out.extend_from_slice(b"CIR1");
        put_varint(&mut out, norm.inputs as u64);
        put_varint(&mut out, norm.gates.len() as u64);
        for gate in &norm.gates {
            out.push(gate.opcode());
            for op in gate.operands().into_iter().flatten() {
                put_varint(&mut out, op as u64);
            }
        }
        put_varint(&mut out, norm.outputs.len() as u64);
        for &o in &norm.outputs {
            put_varint(&mut out, o as u64);
        }
        out
    }

    /// Decode from a reader positioned at a "CIR1" frame.
    pub fn decode_from(r: &mut Reader<'_>) -> Result<Circuit> {
        r.tag(b"CIR1")?;
        let inputs = r.varint()? as u32;
        let gate_count = r.usize()?;
        let mut gates = Vec::with_capacity(gate_count);
        for _ in 0..gate_count {
            let op = r.byte()?;
            let gate = match op {
                0x01 => Gate::And(r.varint()? as Wire, r.varint()? as Wire),
                0x02 => Gate::Xor(r.varint()? as Wire, r.varint()? as Wire),
                0x03 => Gate::Not(r.varint()? as Wire),
                0x04 => Gate::Const0,
                0x05 => Gate::Const1,
                _ => return Err(Error::malformed("circuit", format!("bad opcode {op:#04x}"))),
            };
            gates.push(gate);
        }
        let out_count = r.usize()?;
        let mut outputs = Vec::with_capacity(out_count);
        for _ in 0..out_count {
            outputs.push(r.varint()? as Wire);
        }
        let c = Circuit {
            inputs,
            gates,
            outputs,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn decode(bytes: &[u8]) -> Result<Circuit> {
        let mut r = Reader::new(bytes, "circuit");
        let c = Self::decode_from(&mut r)?;
        r.finish()?;
        Ok(c)
    }
}

/// Incremental circuit construction with gadget helpers.
pub struct Builder {
    inputs: u32,
    gates: Vec<Gate>,
}

impl Builder {
    pub fn new(inputs: u32) -> Self {
        Builder {
            inputs,
            gates: Vec::new(),
        }
    }

    pub fn input(&self, i: u32) -> Wire {
        assert!(i < self.inputs, "input {i} out of range");
        i
    }

    fn push(&mut self, gate: Gate) -> Wire {
        self.gates.push(gate);
        self.inputs + self.gates.len() as u32 - 1
    }

    pub fn and(&mut self, a: Wire, b: Wire) -> Wire {
        self.push(Gate::And(a, b))
    }

    pub fn xor(&mut self, a: Wire, b: Wire) -> Wire {
        self.push(Gate::Xor(a, b))
    }

    pub fn not(&mut self, a: Wire) -> Wire {
        self.push(Gate::Not(a))
    }

    pub fn constant(&mut self, bit: u8) -> Wire {
        self.push(if bit == 0 { Gate::Const0 } else { Gate::Const1 })
    }

    pub fn or(&mut self, a: Wire, b: Wire) -> Wire {
        // a | b = (a ^ b) ^ (a & b)
        let x = self.xor(a, b);
        let n = self.and(a, b);
        self.xor(x, n)
    }

    /// sel == 0 -> a, sel == 1 -> b.
    pub fn mux(&mut self, sel: Wire, a: Wire, b: Wire) -> Wire {
        // a ^ (sel & (a ^ b))
        let d = self.xor(a, b);
        let m = self.and(sel, d);
        self.xor(a, m)
    }

    /// Multiplex 2^sel.len() entries; entry index is sel interpreted LSB-first.
    pub fn mux_tree(&mut self, sel: &[Wire], entries: &[Wire]) -> Wire {
        assert_eq!(entries.len(), 1 << sel.len());
        if sel.is_empty() {
            return entries[0];
        }
        let half = entries.len() / 2;
        let lo: Vec<Wire> = (0..half).map(|i| entries[2 * i]).collect();
        let hi: Vec<Wire> = (0..half).map(|i| entries[2 * i + 1]).collect();
        let a = self.mux_tree(&sel[1..], &lo);
        let b = self.mux_tree(&sel[1..], &hi);
        self.mux(sel[0], a, b)
    }

    /// One wire per bit of `bits`, as constant gates.
    pub fn constants(&mut self, bits: &Bits) -> Vec<Wire> {
        bits.iter().map(|b| self.constant(b)).collect()
    }

    /// AND-reduction of `wires` (1 iff all set); empty reduces to constant 1.
    pub fn all(&mut self, wires: &[Wire]) -> Wire {
        match wires.len() {
            0 => self.constant(1),
            1 => wires[0],
            _ => {
                let mid = wires.len() / 2;
                let (l, r) = wires.split_at(mid);
                let a = self.all(l);
                let b = self.all(r);
                self.and(a, b)
            }
        }
    }

    /// 1 iff wire `w` equals constant bit `c`.
    pub fn eq_const(&mut self, w: Wire, c: u8) -> Wire {
        if c == 0 {
            self.not(w)
        } else {
            w
        }
    }

    pub fn finish(self, outputs: Vec<Wire>) -> Circuit {
        let c = Circuit {
            inputs: self.inputs,
            gates: self.gates,
            outputs,
        };
        debug_assert!(c.validate().is_ok());
        c
    }
}

/// Circuit that ignores its `input_arity` inputs and outputs `gamma`.
pub fn build_const_circuit(gamma: &Bits, input_arity: u32) -> Circuit {
    let mut b = Builder::new(input_arity);
    let outs = b.constants(gamma);
    b.finish(outs)
}

/// Uniformly random circuit, for randomized oracles in tests.
pub fn random_circuit(
    inputs: u32,
    gate_count: usize,
    output_count: usize,
    rng: &mut impl rand::Rng,
) -> Circuit {
    assert!(inputs > 0);
    let mut gates = Vec::with_capacity(gate_count);
    for i in 0..gate_count {
        let avail = inputs + i as u32;
        let a = rng.next_u32() % avail;
        let b = rng.next_u32() % avail;
        let gate = match rng.gen_range(0..5) {
            0 => Gate::And(a, b),
            1 => Gate::Xor(a, b),
            2 => Gate::Not(a),
            3 => Gate::Const0,
            _ => Gate::Const1,
        };
        gates.push(gate);
    }
    let total = inputs + gate_count as u32;
    let outputs = (0..output_count)
        .map(|_| rng.next_u32() % total)
        .collect();
    Circuit {
        inputs,
        gates,
        outputs,
    }
}
