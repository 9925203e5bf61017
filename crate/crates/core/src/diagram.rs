//! Circuits over a one-sorted signature.
//!
//! A circuit is stored as a word of [`Slice`]s: one generator per level, with
//! identity wires as padding on either side. Two words denote the same
//! circuit when they are related by a sequence of exchange moves (the
//! interchange law), and every [`Circuit`] handed out by this module is kept
//! in a canonical representative of its exchange class, so structural
//! equality is equality modulo isotopy.
//!
//! ```text
//!   | |  |          | |  |
//!   [mu] |          | [mu]
//!    |   |    =>    |  |
//!    [mu ]          [mu ]
//!      |              |
//! ```

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator `{0}` declared twice")]
    DuplicateGenerator(String),
    #[error("cannot plug a circuit with {outputs} outputs into one with {inputs} inputs")]
    InterfaceMismatch { outputs: usize, inputs: usize },
    #[error("slice {index} does not fit: pad {pad} + {arity} inputs exceeds width {width}")]
    SliceOutOfBounds {
        index: usize,
        pad: usize,
        arity: usize,
        width: usize,
    },
}

/// Index of a generator inside its [`Signature`].
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct GenId(pub u32);

impl GenId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorDecl {
    pub name: String,
    pub inputs: usize,
    pub outputs: usize,
}

/// The generating 2-cells: an ordered list of named boxes `m -> n`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    generators: Vec<GeneratorDecl>,
    by_name: HashMap<String, GenId>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(
        &mut self,
        name: impl Into<String>,
        inputs: usize,
        outputs: usize,
    ) -> Result<GenId, DiagramError> {
        let name = name.into();
        if self.by_name.contains_key(&name) {
            return Err(DiagramError::DuplicateGenerator(name));
        }
        let id = GenId(self.generators.len() as u32);
        self.by_name.insert(name.clone(), id);
        self.generators.push(GeneratorDecl {
            name,
            inputs,
            outputs,
        });
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn decl(&self, id: GenId) -> &GeneratorDecl {
        &self.generators[id.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<GenId> {
        self.by_name.get(name).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = GenId> + '_ {
        (0..self.generators.len() as u32).map(GenId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (GenId, &GeneratorDecl)> + '_ {
        self.generators
            .iter()
            .enumerate()
            .map(|(i, d)| (GenId(i as u32), d))
    }

    /// The one-slice circuit of a named generator.
    pub fn generator(&self, name: &str) -> Result<Circuit, DiagramError> {
        let id = self
            .lookup(name)
            .ok_or_else(|| DiagramError::UnknownGenerator(name.to_string()))?;
        Ok(self.circuit_of(id))
    }

    pub fn circuit_of(&self, id: GenId) -> Circuit {
        let d = self.decl(id);
        Circuit {
            inputs: d.inputs,
            outputs: d.outputs,
            slices: vec![self.slice(id, 0)],
        }
    }

    pub fn slice(&self, id: GenId, pad: usize) -> Slice {
        let d = self.decl(id);
        Slice {
            pad,
            gen: id,
            inputs: d.inputs,
            outputs: d.outputs,
        }
    }
}

/// One level of a circuit word: `pad` identity wires, then the generator,
/// then whatever wires remain on the right.
///
/// The arities are copied from the signature so words can be manipulated
/// without it; they never take part in comparisons beyond `gen`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slice {
    pub pad: usize,
    pub gen: GenId,
    pub inputs: usize,
    pub outputs: usize,
}

impl Slice {
    pub fn shifted(self, by: usize) -> Slice {
        Slice {
            pad: self.pad + by,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interface {
    pub inputs: usize,
    pub outputs: usize,
}

impl fmt::Display for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.inputs, self.outputs)
    }
}

/// Checks width bookkeeping and returns the output width of the word.
pub fn word_outputs(inputs: usize, slices: &[Slice]) -> Result<usize, DiagramError> {
    let mut width = inputs;
    for (index, s) in slices.iter().enumerate() {
        if s.pad + s.inputs > width {
            return Err(DiagramError::SliceOutOfBounds {
                index,
                pad: s.pad,
                arity: s.inputs,
                width,
            });
        }
        width = width - s.inputs + s.outputs;
    }
    Ok(width)
}

/// Wire counts at every level of a word: `widths[k]` is the width just above
/// slice `k`, and the last entry is the output width.
pub fn word_widths(inputs: usize, slices: &[Slice]) -> Vec<usize> {
    let mut widths = Vec::with_capacity(slices.len() + 1);
    let mut width = inputs;
    widths.push(width);
    for s in slices {
        width = width + s.outputs - s.inputs;
        widths.push(width);
    }
    widths
}

/// All words obtained from `slices` by one exchange move at levels
/// `(i, i + 1)`. Empty when the two slices share a wire.
///
/// Exchanges are the only moves that relate isotopic words. The lower slice
/// may pass above the upper one when it lies entirely left of the upper
/// slice's outputs, or entirely right of them; both can hold at once when
/// a slice without outputs sits directly above a slice without inputs.
pub fn exchanges(slices: &[Slice], i: usize) -> Vec<Vec<Slice>> {
    let mut out = Vec::new();
    for (upper, lower) in exchange_pairs(slices[i], slices[i + 1]) {
        let mut w = slices.to_vec();
        w[i] = upper;
        w[i + 1] = lower;
        if !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

/// The swapped pairs `(new_upper, new_lower)` for upper slice `j` and lower
/// slice `k`.
pub fn exchange_pairs(j: Slice, k: Slice) -> Vec<(Slice, Slice)> {
    let mut out = Vec::with_capacity(2);
    if k.pad + k.inputs <= j.pad {
        out.push((
            k,
            Slice {
                pad: j.pad + k.outputs - k.inputs,
                ..j
            },
        ));
    }
    if k.pad >= j.pad + j.outputs {
        let pair = (
            Slice {
                pad: k.pad + j.inputs - j.outputs,
                ..k
            },
            j,
        );
        if !out.contains(&pair) {
            out.push(pair);
        }
    }
    out
}

/// A circuit `inputs -> outputs`, always held in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Circuit {
    inputs: usize,
    outputs: usize,
    slices: Vec<Slice>,
}

impl Circuit {
    pub fn identity(n: usize) -> Self {
        Circuit {
            inputs: n,
            outputs: n,
            slices: Vec::new(),
        }
    }

    /// Canonicalizes an arbitrary well-formed word.
    pub fn from_slices(inputs: usize, slices: Vec<Slice>) -> Result<Self, DiagramError> {
        Self::from_slices_tracked(inputs, slices).map(|(c, _)| c)
    }

    /// Like [`Circuit::from_slices`], also returning for every canonical
    /// level the index of the input slice that ended up there.
    pub fn from_slices_tracked(
        inputs: usize,
        slices: Vec<Slice>,
    ) -> Result<(Self, Vec<usize>), DiagramError> {
        let outputs = word_outputs(inputs, &slices)?;
        let (slices, labels) = crate::canon::canonicalize(inputs, slices);
        debug_assert_eq!(word_outputs(inputs, &slices), Ok(outputs));
        Ok((
            Circuit {
                inputs,
                outputs,
                slices,
            },
            labels,
        ))
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn interface(&self) -> Interface {
        Interface {
            inputs: self.inputs,
            outputs: self.outputs,
        }
    }

    pub fn is_parallel(&self, other: &Circuit) -> bool {
        self.interface() == other.interface()
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_identity(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn widths(&self) -> Vec<usize> {
        word_widths(self.inputs, &self.slices)
    }

    /// Horizontal juxtaposition, `self` on the left.
    pub fn hcomp(&self, other: &Circuit) -> Circuit {
        let mut slices = self.slices.clone();
        slices.extend(other.slices.iter().map(|s| s.shifted(self.outputs)));
        Circuit::from_slices(self.inputs + other.inputs, slices)
            .expect("juxtaposition of well-formed circuits is well-formed")
    }

    /// Vertical plugging, `self` on top.
    pub fn vcomp(&self, other: &Circuit) -> Result<Circuit, DiagramError> {
        if self.outputs != other.inputs {
            return Err(DiagramError::InterfaceMismatch {
                outputs: self.outputs,
                inputs: other.inputs,
            });
        }
        let mut slices = self.slices.clone();
        slices.extend_from_slice(&other.slices);
        Circuit::from_slices(self.inputs, slices)
    }

    /// `id(left) * self * id(right)`.
    pub fn whisker(&self, left: usize, right: usize) -> Circuit {
        let slices = self.slices.iter().map(|s| s.shifted(left)).collect();
        Circuit::from_slices(left + self.inputs + right, slices).expect("whiskering keeps widths")
    }

    /// Number of occurrences of each generator.
    pub fn generator_counts(&self) -> HashMap<GenId, usize> {
        let mut counts = HashMap::new();
        for s in &self.slices {
            *counts.entry(s.gen).or_insert(0) += 1;
        }
        counts
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> CircuitDisplay<'a> {
        CircuitDisplay { circuit: self, sig }
    }
}

/// Renders a circuit in the term syntax: one `id:p * g * id:q` factor per
/// slice, joined by `;`.
pub struct CircuitDisplay<'a> {
    circuit: &'a Circuit,
    sig: &'a Signature,
}

impl fmt::Display for CircuitDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.circuit;
        if c.slices.is_empty() {
            return write!(f, "id:{}", c.inputs);
        }
        let widths = c.widths();
        for (k, s) in c.slices.iter().enumerate() {
            if k > 0 {
                f.write_str(" ; ")?;
            }
            let right = widths[k] - s.pad - s.inputs;
            let mut parts = Vec::with_capacity(3);
            if s.pad > 0 {
                parts.push(format!("id:{}", s.pad));
            }
            parts.push(self.sig.decl(s.gen).name.clone());
            if right > 0 {
                parts.push(format!("id:{right}"));
            }
            if parts.len() == 1 {
                f.write_str(&parts[0])?;
            } else {
                write!(f, "({})", parts.join(" * "))?;
            }
        }
        Ok(())
    }
}

/// Graphviz rendering of a circuit: one node per slice, one edge per wire.
pub fn to_dot(circuit: &Circuit, sig: &Signature) -> String {
    let mut out = String::from("digraph circuit {\n  rankdir=TB;\n");
    for i in 0..circuit.inputs {
        out.push_str(&format!("  in{i} [shape=point, label=\"\"];\n"));
    }
    for i in 0..circuit.outputs {
        out.push_str(&format!("  out{i} [shape=point, label=\"\"];\n"));
    }
    // Each open wire remembers the dot node that produced it.
    let mut wires: Vec<String> = (0..circuit.inputs).map(|i| format!("in{i}")).collect();
    for (k, s) in circuit.slices.iter().enumerate() {
        let node = format!("s{k}");
        out.push_str(&format!(
            "  {node} [shape=box, label=\"{}\"];\n",
            sig.decl(s.gen).name
        ));
        let consumed: Vec<String> = wires.drain(s.pad..s.pad + s.inputs).collect();
        for src in consumed {
            out.push_str(&format!("  {src} -> {node};\n"));
        }
        let produced = std::iter::repeat_n(node.clone(), s.outputs);
        wires.splice(s.pad..s.pad, produced);
    }
    for (i, src) in wires.iter().enumerate() {
        out.push_str(&format!("  {src} -> out{i};\n"));
    }
    out.push_str("}\n");
    out
}
