//! Canonical representatives of exchange classes.
//!
//! The part of a word connected to the boundary is sorted by left exchanges
//! (a lower slice moves above an upper one whenever it lies to its left);
//! that rewriting is terminating and confluent as long as every node is
//! connected to the boundary. Closed components (a scalar, a loop
//! `eta ; eps`, ...) can orbit around other closed components under the
//! same moves, so they are taken out, canonicalized on their own, and put
//! back as contiguous blocks at the first cell of the face they live in.

use std::collections::HashMap;

use crate::diagram::{word_widths, Slice};

// The rewriting step: the lower slice moves up past the upper one whenever
// it lies left of it. Two scalars at the same gap are ordered by generator
// index so the step cannot cycle.
fn pulls_up(j: Slice, k: Slice) -> bool {
    if k.pad + k.inputs > j.pad {
        return false;
    }
    if j.inputs == 0 && j.outputs == 0 && k.inputs == 0 && k.outputs == 0 && j.pad == k.pad {
        return k.gen < j.gen;
    }
    true
}

fn bubble(slices: &mut [Slice], labels: &mut [usize]) {
    let n = slices.len();
    let cap = 8 * n * n + 64;
    let mut steps = 0usize;
    let mut i = 0usize;
    while i + 1 < n {
        let (j, k) = (slices[i], slices[i + 1]);
        if pulls_up(j, k) {
            slices[i] = k;
            slices[i + 1] = Slice {
                pad: j.pad + k.outputs - k.inputs,
                ..j
            };
            labels.swap(i, i + 1);
            steps += 1;
            assert!(steps <= cap, "left exchanges did not converge");
            i = i.saturating_sub(1);
        } else {
            i += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Wire {
    Input(usize),
    Output { node: usize, port: usize },
}

// A word-independent name for a face: a side of a wire, the point where a
// generator without inputs starts, or where one without outputs ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Handle {
    LeftOf(Wire),
    RightOf(Wire),
    Above(usize),
    Below(usize),
    Outer,
}

/// A word whose slices carry stable node labels.
struct Labelled<'a> {
    inputs: usize,
    slices: &'a [Slice],
    labels: &'a [usize],
}

impl Labelled<'_> {
    /// Wire identities at every level.
    fn wires(&self) -> Vec<Vec<Wire>> {
        let mut levels = Vec::with_capacity(self.slices.len() + 1);
        let mut cur: Vec<Wire> = (0..self.inputs).map(Wire::Input).collect();
        levels.push(cur.clone());
        for (s, &node) in self.slices.iter().zip(self.labels) {
            cur.splice(
                s.pad..s.pad + s.inputs,
                (0..s.outputs).map(|port| Wire::Output { node, port }),
            );
            levels.push(cur.clone());
        }
        levels
    }

    /// Face index of every cell `(level, gap)`, flattened level by level.
    fn faces(&self) -> Faces {
        let widths = word_widths(self.inputs, self.slices);
        let mut offsets = Vec::with_capacity(widths.len());
        let mut total = 0;
        for w in &widths {
            offsets.push(total);
            total += w + 1;
        }
        let mut uf = UnionFind::new(total);
        for (t, s) in self.slices.iter().enumerate() {
            let (above, below) = (offsets[t], offsets[t + 1]);
            for g in 0..=s.pad {
                uf.union(above + g, below + g);
            }
            for g in s.pad + s.inputs..=widths[t] {
                uf.union(above + g, below + g - s.inputs + s.outputs);
            }
        }
        let roots: Vec<usize> = (0..total).map(|c| uf.find(c)).collect();
        Faces { offsets, roots }
    }

    /// Every handle naming the face of some cell, with that cell.
    fn handles(&self) -> Vec<(Handle, usize, usize)> {
        let wires = self.wires();
        let mut out = Vec::new();
        for (t, level) in wires.iter().enumerate() {
            for (g, &w) in level.iter().enumerate() {
                out.push((Handle::LeftOf(w), t, g));
                out.push((Handle::RightOf(w), t, g + 1));
            }
        }
        for (t, (s, &node)) in self.slices.iter().zip(self.labels).enumerate() {
            if s.inputs == 0 {
                out.push((Handle::Above(node), t, s.pad));
            }
            if s.outputs == 0 {
                out.push((Handle::Below(node), t + 1, s.pad));
            }
        }
        if self.slices.is_empty() && self.inputs == 0 {
            out.push((Handle::Outer, 0, 0));
        }
        out
    }

    fn handle_of(&self, t: usize, g: usize) -> Handle {
        self.handles()
            .into_iter()
            .find(|&(_, ht, hg)| (ht, hg) == (t, g))
            .map(|(h, _, _)| h)
            .expect("every cell has a handle")
    }

    /// Keeps the slices whose label satisfies `keep`, dropping the wires of
    /// the others. Also maps cells of this word to cells of the result.
    fn restrict(&self, keep_inputs: bool, keep: impl Fn(usize) -> bool) -> Restricted {
        let mut cur: Vec<bool> = vec![keep_inputs; self.inputs];
        let mut slices = Vec::new();
        let mut labels = Vec::new();
        let mut kept_before = Vec::with_capacity(self.slices.len() + 1);
        let mut wire_kept = Vec::with_capacity(self.slices.len() + 1);
        for (s, &node) in self.slices.iter().zip(self.labels) {
            kept_before.push(slices.len());
            wire_kept.push(cur.clone());
            let k = keep(node);
            if k {
                let pad = cur[..s.pad].iter().filter(|&&b| b).count();
                slices.push(Slice { pad, ..*s });
                labels.push(node);
            }
            cur.splice(s.pad..s.pad + s.inputs, std::iter::repeat_n(k, s.outputs));
        }
        kept_before.push(slices.len());
        wire_kept.push(cur);
        Restricted {
            inputs: if keep_inputs { self.inputs } else { 0 },
            slices,
            labels,
            kept_before,
            wire_kept,
        }
    }
}

struct Restricted {
    inputs: usize,
    slices: Vec<Slice>,
    labels: Vec<usize>,
    kept_before: Vec<usize>,
    wire_kept: Vec<Vec<bool>>,
}

impl Restricted {
    fn map_cell(&self, t: usize, g: usize) -> (usize, usize) {
        let gap = self.wire_kept[t][..g].iter().filter(|&&b| b).count();
        (self.kept_before[t], gap)
    }

    fn labelled(&self) -> Labelled<'_> {
        Labelled {
            inputs: self.inputs,
            slices: &self.slices,
            labels: &self.labels,
        }
    }
}

struct Faces {
    offsets: Vec<usize>,
    roots: Vec<usize>,
}

impl Faces {
    fn of(&self, t: usize, g: usize) -> usize {
        self.roots[self.offsets[t] + g]
    }

    /// Topmost, then leftmost, cell of every face.
    fn first_cells(&self) -> HashMap<usize, (usize, usize)> {
        let mut first = HashMap::new();
        for (t, &off) in self.offsets.iter().enumerate() {
            let end = self.offsets.get(t + 1).copied().unwrap_or(self.roots.len());
            for g in 0..end - off {
                first.entry(self.roots[off + g]).or_insert((t, g));
            }
        }
        first
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

/// Connected components of the nodes; the boundary is its own vertex.
/// Returns a component id per slice and the id of the boundary component.
fn components(inputs: usize, slices: &[Slice]) -> (Vec<usize>, usize) {
    let boundary = slices.len();
    let mut uf = UnionFind::new(slices.len() + 1);
    let mut wires: Vec<usize> = vec![boundary; inputs];
    for (k, s) in slices.iter().enumerate() {
        for src in wires.splice(s.pad..s.pad + s.inputs, std::iter::repeat_n(k, s.outputs)) {
            uf.union(src, k);
        }
    }
    for src in wires {
        uf.union(src, boundary);
    }
    let ids = (0..slices.len()).map(|k| uf.find(k)).collect();
    (ids, uf.find(boundary))
}

type Block = (Vec<Slice>, Vec<usize>);

fn block_key(block: &Block) -> Vec<(usize, u32)> {
    block.0.iter().map(|s| (s.pad, s.gen.0)).collect()
}

/// Inserts 0 -> 0 blocks into a canonical host word at the first cell of
/// the face assigned to each of them.
fn insert_blocks(host: Block, host_inputs: usize, placed: Vec<(usize, Block)>) -> Block {
    let (host_slices, host_labels) = host;
    let faces = Labelled {
        inputs: host_inputs,
        slices: &host_slices,
        labels: &host_labels,
    }
    .faces();
    let first = faces.first_cells();
    let mut at: Vec<((usize, usize), Block)> = placed
        .into_iter()
        .map(|(face, b)| (first[&face], b))
        .collect();
    at.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| block_key(&a.1).cmp(&block_key(&b.1))));
    let mut slices = Vec::new();
    let mut labels = Vec::new();
    let mut pending = at.into_iter().peekable();
    for t in 0..=host_slices.len() {
        while let Some(((bt, g), _)) = pending.peek() {
            if *bt != t {
                break;
            }
            let g = *g;
            let (_, (bs, bl)) = pending.next().unwrap();
            slices.extend(bs.into_iter().map(|s| s.shifted(g)));
            labels.extend(bl);
        }
        if t < host_slices.len() {
            slices.push(host_slices[t]);
            labels.push(host_labels[t]);
        }
    }
    (slices, labels)
}

/// Canonical representative of the exchange class of a well-formed word,
/// together with the original index of every slice of the result.
pub(crate) fn canonicalize(inputs: usize, slices: Vec<Slice>) -> (Vec<Slice>, Vec<usize>) {
    let labels: Vec<usize> = (0..slices.len()).collect();
    canonical_labelled(inputs, slices, labels)
}

fn canonical_labelled(inputs: usize, mut slices: Vec<Slice>, mut labels: Vec<usize>) -> Block {
    let (comp, boundary) = components(inputs, &slices);
    if comp.iter().all(|&c| c == boundary) {
        bubble(&mut slices, &mut labels);
        return (slices, labels);
    }

    let word = Labelled {
        inputs,
        slices: &slices,
        labels: &labels,
    };
    let comp_of: HashMap<usize, usize> = labels.iter().copied().zip(comp.iter().copied()).collect();

    // closed components in order of their first slice, with that slice's
    // cell: the component sits in the face of this cell
    let mut closed: Vec<(usize, (usize, usize))> = Vec::new();
    for (t, (&c, s)) in comp.iter().zip(&slices).enumerate() {
        if c != boundary && !closed.iter().any(|&(d, _)| d == c) {
            closed.push((c, (t, s.pad)));
        }
    }

    // nesting: which closed components enclose which
    let alone: Vec<Restricted> = closed
        .iter()
        .map(|&(c, _)| word.restrict(false, |node| comp_of[&node] == c))
        .collect();
    let alone_faces: Vec<Faces> = alone.iter().map(|r| r.labelled().faces()).collect();
    let n = closed.len();
    let mut encloses = vec![vec![false; n]; n];
    for (i, &(_, (t, g))) in closed.iter().enumerate() {
        for j in 0..n {
            if i != j {
                let (mt, mg) = alone[j].map_cell(t, g);
                encloses[j][i] = alone_faces[j].of(mt, mg) != alone_faces[j].of(0, 0);
            }
        }
    }
    let depth: Vec<usize> = (0..n)
        .map(|i| (0..n).filter(|&j| encloses[j][i]).count())
        .collect();
    let parent: Vec<Option<usize>> = (0..n)
        .map(|i| (0..n).find(|&j| encloses[j][i] && depth[j] + 1 == depth[i]))
        .collect();

    // canonical blocks, innermost first
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(depth[i]));
    let mut blocks: Vec<Option<Block>> = vec![None; n];
    for &i in &order {
        let mut own = (alone[i].slices.clone(), alone[i].labels.clone());
        bubble(&mut own.0, &mut own.1);
        let canon_handles = face_lookup(0, &own);
        let children: Vec<(usize, Block)> = (0..n)
            .filter(|&j| parent[j] == Some(i))
            .map(|j| {
                let (t, g) = closed[j].1;
                let (mt, mg) = alone[i].map_cell(t, g);
                let h = alone[i].labelled().handle_of(mt, mg);
                (canon_handles[&h], blocks[j].take().unwrap())
            })
            .collect();
        blocks[i] = Some(insert_blocks(own, 0, children));
    }

    // the boundary-connected part, and the top-level closed components
    let anchored = word.restrict(true, |node| comp_of[&node] == boundary);
    let mut host = (anchored.slices.clone(), anchored.labels.clone());
    bubble(&mut host.0, &mut host.1);
    let host_handles = face_lookup(inputs, &host);
    let top: Vec<(usize, Block)> = (0..n)
        .filter(|&i| parent[i].is_none())
        .map(|i| {
            let (t, g) = closed[i].1;
            let (mt, mg) = anchored.map_cell(t, g);
            let h = anchored.labelled().handle_of(mt, mg);
            (host_handles[&h], blocks[i].take().unwrap())
        })
        .collect();
    insert_blocks(host, inputs, top)
}

fn face_lookup(inputs: usize, word: &Block) -> HashMap<Handle, usize> {
    let l = Labelled {
        inputs,
        slices: &word.0,
        labels: &word.1,
    };
    let faces = l.faces();
    l.handles()
        .into_iter()
        .map(|(h, t, g)| (h, faces.of(t, g)))
        .collect()
}
