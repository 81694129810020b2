//! Permuted forests and the bijection with partitioned hypermaps.
//!
//! A forest is a list of vertices with ordered descendant slots. The edge to
//! the parent of a non-root vertex is not stored as a slot: it is always the
//! vertex's rightmost half-edge, since it carries the largest label.
//! Latin labels are thorn ids shared by the two matched thorns; greek labels
//! are vertex ids.

mod enumerate;
mod forward;
mod inverse;

pub use enumerate::{enumerate_forests, FOREST_MAX_N};
pub use forward::theta_forward;
pub use inverse::theta_inverse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::strata::{ArrayKind, ArrayTuple};

pub type VertexId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    White,
    Black,
}

impl Color {
    pub fn opposite(self) -> Self {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Slot {
    /// Tree edge to a child of the opposite colour.
    Child(VertexId),
    /// Thorn with the given latin label (shared with its matched thorn).
    Thorn(usize),
    /// One extremity of the given loop.
    Loop(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoopLabel {
    /// Greek label naming a vertex of the opposite colour.
    Greek(VertexId),
    /// The maximal loop of a non-seed root; its vertex is given by the arrow.
    Maximal,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub color: Color,
    pub slots: Vec<Slot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrow: Option<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PermutedForest {
    pub vertices: Vec<Vertex>,
    /// Tree roots; `roots[0]` is the seed root.
    pub roots: Vec<VertexId>,
    /// Attribution of each loop id.
    pub loops: Vec<LoopLabel>,
}

/// Position of a loop extremity or thorn: `(vertex, slot index)`.
type Place = (VertexId, usize);

/// Incidence data derived from the slot lists.
pub(crate) struct Incidence {
    pub parent: Vec<Option<VertexId>>,
    pub loop_places: Vec<Vec<Place>>,
    pub thorn_places: BTreeMap<usize, Vec<Place>>,
}

impl PermutedForest {
    pub fn seed(&self) -> VertexId {
        self.roots[0]
    }

    pub fn is_root(&self, v: VertexId) -> bool {
        self.roots.contains(&v)
    }

    /// Slots plus the implicit parent edge.
    pub fn degree(&self, v: VertexId) -> usize {
        self.vertices[v].slots.len() + usize::from(!self.is_root(v))
    }

    pub fn loop_count(&self, v: VertexId) -> usize {
        self.vertices[v]
            .slots
            .iter()
            .filter(|s| matches!(s, Slot::Loop(_)))
            .count()
            / 2
    }

    /// Total white degree, which is `n` for a valid forest.
    pub fn n(&self) -> usize {
        (0..self.vertices.len())
            .filter(|&v| self.vertices[v].color == Color::White)
            .map(|v| self.degree(v))
            .sum()
    }

    pub(crate) fn incidence(&self) -> Incidence {
        let mut parent = vec![None; self.vertices.len()];
        let mut loop_places = vec![Vec::new(); self.loops.len()];
        let mut thorn_places: BTreeMap<usize, Vec<Place>> = BTreeMap::new();
        for (v, vert) in self.vertices.iter().enumerate() {
            for (k, s) in vert.slots.iter().enumerate() {
                match *s {
                    Slot::Child(c) if c < parent.len() => parent[c] = Some(v),
                    Slot::Child(_) => {}
                    Slot::Loop(l) if l < loop_places.len() => loop_places[l].push((v, k)),
                    Slot::Loop(_) => {}
                    Slot::Thorn(t) => thorn_places.entry(t).or_default().push((v, k)),
                }
            }
        }
        Incidence {
            parent,
            loop_places,
            thorn_places,
        }
    }
}

/// Checks the structural rules and the forest properties; returns one
/// message per violation.
pub fn validate_forest(f: &PermutedForest) -> Vec<String> {
    let out = structural_violations(f);
    if !out.is_empty() {
        return out;
    }
    property_violations(f)
}

/// Ranges, parent uniqueness, and the pairing of loop and thorn ends.
pub(crate) fn structural_violations(f: &PermutedForest) -> Vec<String> {
    let mut out = Vec::new();
    let nv = f.vertices.len();
    if f.roots.is_empty() {
        return vec!["forest has no seed root".into()];
    }
    for &rt in &f.roots {
        if rt >= nv {
            return vec![format!("root {rt} out of range")];
        }
    }
    if f.vertices[f.seed()].color != Color::White {
        out.push("seed root must be white".into());
    }
    if f.roots.iter().collect::<BTreeSet<_>>().len() != f.roots.len() {
        out.push("root listed twice".into());
    }

    // Slot targets and child counts.
    let mut child_refs = vec![0usize; nv];
    for (v, vert) in f.vertices.iter().enumerate() {
        for s in &vert.slots {
            match *s {
                Slot::Child(c) if c >= nv => out.push(format!("vertex {v}: child {c} out of range")),
                Slot::Child(c) => {
                    child_refs[c] += 1;
                    if f.vertices[c].color == vert.color {
                        out.push(format!("vertex {v}: tree edge to same-coloured vertex {c}"));
                    }
                }
                Slot::Loop(l) if l >= f.loops.len() => out.push(format!("vertex {v}: loop {l} has no attribution")),
                _ => {}
            }
        }
    }
    if !out.is_empty() {
        return out;
    }
    for v in 0..nv {
        let root = f.is_root(v);
        match (child_refs[v], root) {
            (0, false) => out.push(format!("vertex {v} has no parent and is not a root")),
            (1, true) => out.push(format!("root {v} is also a child")),
            (k, _) if k > 1 => out.push(format!("vertex {v} has {k} parents")),
            _ => {}
        }
    }

    let inc = f.incidence();
    for (l, places) in inc.loop_places.iter().enumerate() {
        if places.len() != 2 || places[0].0 != places[1].0 {
            out.push(format!("loop {l} does not have two extremities on one vertex"));
        }
    }
    for (t, places) in &inc.thorn_places {
        let ok = places.len() == 2 && f.vertices[places[0].0].color != f.vertices[places[1].0].color;
        if !ok {
            out.push(format!("thorn label {t} does not match one white and one black thorn"));
        }
    }
    out
}

/// Loop attributions, arrows and properties (a) to (e), for a structurally
/// sound forest.
fn property_violations(f: &PermutedForest) -> Vec<String> {
    let mut out = Vec::new();
    let nv = f.vertices.len();
    let inc = f.incidence();
    let mut attributed = vec![0usize; nv];
    for (l, label) in f.loops.iter().enumerate() {
        let (v, k) = inc.loop_places[l][1];
        let is_max = f.is_root(v) && v != f.seed() && k + 1 == f.vertices[v].slots.len();
        match *label {
            LoopLabel::Maximal if !is_max => {
                out.push(format!("loop {l} is marked maximal but is not the rightmost loop of a non-seed root"))
            }
            LoopLabel::Greek(_) if is_max => out.push(format!("maximal loop {l} carries a greek label")),
            LoopLabel::Greek(w) if w >= nv => out.push(format!("loop {l}: greek label {w} out of range")),
            LoopLabel::Greek(w) => {
                if f.vertices[w].color == f.vertices[v].color {
                    out.push(format!("loop {l}: greek label names same-coloured vertex {w}"));
                }
                attributed[w] += 1;
            }
            LoopLabel::Maximal => {}
        }
    }
    for (v, vert) in f.vertices.iter().enumerate() {
        let non_seed_root = f.is_root(v) && v != f.seed();
        match (vert.arrow, non_seed_root) {
            (Some(_), false) => out.push(format!("vertex {v} has an arrow but is not a non-seed root")),
            (None, true) => out.push(format!("non-seed root {v} has no arrow")),
            (Some(w), true) if w >= nv => out.push(format!("arrow of {v} out of range")),
            (Some(w), true) => {
                if f.vertices[w].color == vert.color {
                    out.push(format!("arrow of {v} points to same-coloured vertex {w}"));
                }
                attributed[w] += 1;
            }
            (None, false) => {}
        }
        if non_seed_root && !matches!(vert.slots.last(), Some(Slot::Loop(_))) {
            out.push(format!("non-seed root {v} has no loop ending at its rightmost descendant"));
        }
    }
    if !out.is_empty() {
        return out;
    }

    // (c) loop balance.
    for v in 0..nv {
        if f.loop_count(v) != attributed[v] {
            out.push(format!(
                "vertex {v} has {} loops but {} incoming arrows and loop labels",
                f.loop_count(v),
                attributed[v]
            ));
        }
    }

    // (d) the ascent through tree edges and arrows reaches the seed.
    for start in 0..nv {
        let mut seen = BTreeSet::new();
        let mut v = start;
        while v != f.seed() {
            if !seen.insert(v) {
                out.push(format!("ascent from vertex {start} cycles without reaching the seed root"));
                break;
            }
            v = inc.parent[v].or(f.vertices[v].arrow).expect("checked above");
        }
    }

    // (e) both colours carry the same total degree.
    let black: usize = (0..nv)
        .filter(|&v| f.vertices[v].color == Color::Black)
        .map(|v| f.degree(v))
        .sum();
    if black != f.n() {
        out.push(format!("white degree {} differs from black degree {black}", f.n()));
    }
    out
}

/// Degree `A` of a forest, tallied by degree and loop count.
pub fn forest_degree(f: &PermutedForest) -> ArrayTuple {
    let mut a = ArrayTuple::default();
    for (v, vert) in f.vertices.iter().enumerate() {
        let i = f.degree(v) as u32;
        let j = f.loop_count(v) as u32;
        if v == f.seed() {
            a.i0 = i;
            a.j0 = j;
            continue;
        }
        let kind = match (vert.color, f.is_root(v)) {
            (Color::White, false) => ArrayKind::P,
            (Color::White, true) => ArrayKind::PPrime,
            (Color::Black, false) => ArrayKind::Q,
            (Color::Black, true) => ArrayKind::QPrime,
        };
        a.add(kind, i, j);
    }
    a
}

/// Preorder of the tree below `v`.
fn preorder(f: &PermutedForest, v: VertexId, out: &mut Vec<VertexId>) {
    out.push(v);
    for s in &f.vertices[v].slots {
        if let Slot::Child(c) = *s {
            preorder(f, c, out);
        }
    }
}

/// Relabels `f` with trees in the given root order; returns the relabelled
/// forest (ids by preorder, loop and thorn ids by first occurrence).
fn relabel(f: &PermutedForest, root_order: &[VertexId]) -> PermutedForest {
    let mut order = Vec::with_capacity(f.vertices.len());
    for &rt in root_order {
        preorder(f, rt, &mut order);
    }
    let mut new_id = vec![usize::MAX; f.vertices.len()];
    for (k, &v) in order.iter().enumerate() {
        new_id[v] = k;
    }
    let mut loop_id: BTreeMap<usize, usize> = BTreeMap::new();
    let mut thorn_id: BTreeMap<usize, usize> = BTreeMap::new();
    let mut vertices = Vec::with_capacity(order.len());
    for &v in &order {
        let vert = &f.vertices[v];
        let slots = vert
            .slots
            .iter()
            .map(|s| match *s {
                Slot::Child(c) => Slot::Child(new_id[c]),
                Slot::Loop(l) => {
                    let k = loop_id.len();
                    Slot::Loop(*loop_id.entry(l).or_insert(k))
                }
                Slot::Thorn(t) => {
                    let k = thorn_id.len();
                    Slot::Thorn(*thorn_id.entry(t).or_insert(k))
                }
            })
            .collect();
        vertices.push(Vertex {
            color: vert.color,
            slots,
            arrow: vert.arrow.map(|w| new_id[w]),
        });
    }
    let mut loops = vec![LoopLabel::Maximal; loop_id.len()];
    for (&old, &new) in &loop_id {
        loops[new] = match f.loops[old] {
            LoopLabel::Greek(w) => LoopLabel::Greek(new_id[w]),
            LoopLabel::Maximal => LoopLabel::Maximal,
        };
    }
    let roots = root_order.iter().map(|&r| new_id[r]).collect();
    PermutedForest { vertices, roots, loops }
}

pub(crate) fn tokens(f: &PermutedForest) -> Vec<usize> {
    let mut t = Vec::new();
    for vert in &f.vertices {
        t.push(vert.color as usize);
        t.push(vert.slots.len());
        for s in &vert.slots {
            match *s {
                Slot::Child(c) => t.extend([0, c]),
                Slot::Thorn(x) => t.extend([1, x]),
                Slot::Loop(l) => t.extend([2, l]),
            }
        }
        t.push(vert.arrow.map_or(usize::MAX, |w| w));
    }
    for l in &f.loops {
        t.push(match *l {
            LoopLabel::Greek(w) => w,
            LoopLabel::Maximal => usize::MAX,
        });
    }
    t
}

/// Shape of a tree with all cross references erased; used to order
/// non-seed trees before breaking ties by full comparison.
fn shape(f: &PermutedForest, v: VertexId, out: &mut Vec<usize>) {
    let vert = &f.vertices[v];
    out.push(vert.color as usize);
    out.push(vert.slots.len());
    for s in &vert.slots {
        match *s {
            Slot::Child(c) => {
                out.push(0);
                shape(f, c, out);
            }
            Slot::Thorn(_) => out.push(1),
            Slot::Loop(_) => out.push(2),
        }
    }
    out.push(usize::MAX);
}

/// Canonical representative: non-seed trees are unordered, so the forest is
/// relabelled under every order of same-shaped non-seed trees and the
/// lexicographically least encoding is kept.
pub fn canonical_form(f: &PermutedForest) -> PermutedForest {
    let mut keyed: Vec<(Vec<usize>, VertexId)> = f.roots[1..]
        .iter()
        .map(|&r| {
            let mut s = Vec::new();
            shape(f, r, &mut s);
            (s, r)
        })
        .collect();
    keyed.sort();
    let groups: Vec<Vec<VertexId>> = keyed
        .chunk_by(|a, b| a.0 == b.0)
        .map(|g| g.iter().map(|x| x.1).collect())
        .collect();
    let choices: Vec<Vec<Vec<VertexId>>> = groups
        .iter()
        .map(|g| g.iter().copied().permutations(g.len()).collect())
        .collect();
    let mut best: Option<(Vec<usize>, PermutedForest)> = None;
    let combos: Box<dyn Iterator<Item = Vec<&Vec<VertexId>>>> = if choices.is_empty() {
        Box::new(std::iter::once(Vec::new()))
    } else {
        Box::new(choices.iter().map(|c| c.iter()).multi_cartesian_product())
    };
    for combo in combos {
        let mut order = vec![f.seed()];
        for g in combo {
            order.extend_from_slice(g);
        }
        let g = relabel(f, &order);
        let t = tokens(&g);
        if best.as_ref().is_none_or(|(bt, _)| t < *bt) {
            best = Some((t, g));
        }
    }
    best.expect("at least one order").1
}

fn latin(k: usize) -> String {
    let letters: Vec<char> = ('a'..='z').collect();
    if k < 26 {
        letters[k].to_string()
    } else {
        format!("{}{}", letters[k % 26], k / 26)
    }
}

fn greek(k: usize) -> String {
    const G: [&str; 24] = [
        "α", "β", "γ", "δ", "ε", "ζ", "η", "θ", "ι", "κ", "λ", "μ", "ν", "ξ", "ο", "π", "ρ", "σ", "τ", "υ", "φ", "χ",
        "ψ", "ω",
    ];
    if k < G.len() {
        G[k].to_string()
    } else {
        format!("{}{}", G[k % G.len()], k / G.len())
    }
}

/// Greek names for the vertices that carry a greek label, in id order.
fn greek_names(f: &PermutedForest) -> BTreeMap<VertexId, String> {
    let targets: BTreeSet<VertexId> = f
        .loops
        .iter()
        .filter_map(|l| match *l {
            LoopLabel::Greek(w) => Some(w),
            LoopLabel::Maximal => None,
        })
        .collect();
    targets.into_iter().enumerate().map(|(k, v)| (v, greek(k))).collect()
}

/// One line per vertex with slots written as `[v]` for children, latin
/// letters for thorns and `(k:α)` for loop extremities.
pub fn pretty(f: &PermutedForest) -> String {
    let names = greek_names(f);
    let mut s = String::new();
    for (v, vert) in f.vertices.iter().enumerate() {
        let kind = if v == f.seed() {
            "seed root"
        } else if f.is_root(v) {
            "root"
        } else {
            "vertex"
        };
        let color = match vert.color {
            Color::White => "white",
            Color::Black => "black",
        };
        let _ = write!(s, "{v}: {color} {kind}");
        if let Some(greek) = names.get(&v) {
            let _ = write!(s, " {greek}");
        }
        let slots: Vec<String> = vert
            .slots
            .iter()
            .map(|sl| match *sl {
                Slot::Child(c) => format!("[{c}]"),
                Slot::Thorn(t) => latin(t),
                Slot::Loop(l) => match f.loops[l] {
                    LoopLabel::Greek(w) => format!("({l}:{})", names[&w]),
                    LoopLabel::Maximal => format!("({l}:max)"),
                },
            })
            .collect();
        let _ = write!(s, " | {}", slots.join(" "));
        if let Some(w) = vert.arrow {
            let _ = write!(s, " | arrow -> {w}");
        }
        s.push('\n');
    }
    s
}

/// Graphviz rendering: tree edges solid, arrows dashed, loops as labelled
/// self-edges and thorns as labelled stubs.
pub fn to_dot(f: &PermutedForest) -> String {
    let names = greek_names(f);
    let mut s = String::from("digraph forest {\n  node [shape=circle, label=\"\"];\n");
    for (v, vert) in f.vertices.iter().enumerate() {
        let fill = match vert.color {
            Color::White => "white",
            Color::Black => "black",
        };
        let label = names.get(&v).cloned().unwrap_or_default();
        let font = if vert.color == Color::Black { "white" } else { "black" };
        let periph = if v == f.seed() { 2 } else { 1 };
        let _ = writeln!(
            s,
            "  v{v} [style=filled, fillcolor={fill}, fontcolor={font}, peripheries={periph}, label=\"{label}\"];"
        );
    }
    let mut seen_loops = BTreeSet::new();
    for (v, vert) in f.vertices.iter().enumerate() {
        for (k, sl) in vert.slots.iter().enumerate() {
            match *sl {
                Slot::Child(c) => {
                    let _ = writeln!(s, "  v{v} -> v{c} [dir=none];");
                }
                Slot::Thorn(t) => {
                    let _ = writeln!(s, "  t{v}_{k} [shape=plaintext, label=\"{}\"];", latin(t));
                    let _ = writeln!(s, "  v{v} -> t{v}_{k} [dir=none];");
                }
                Slot::Loop(l) => {
                    if seen_loops.insert(l) {
                        let label = match f.loops[l] {
                            LoopLabel::Greek(w) => names[&w].clone(),
                            LoopLabel::Maximal => String::new(),
                        };
                        let _ = writeln!(s, "  v{v} -> v{v} [dir=none, label=\"{label}\"];");
                    }
                }
            }
        }
        if let Some(w) = vert.arrow {
            let _ = writeln!(s, "  v{v} -> v{w} [style=dashed, constraint=false];");
        }
    }
    s.push_str("}\n");
    s
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_valid_with_expected_degree() {
        let f = fixtures::eleven();
        assert_eq!(validate_forest(&f), Vec::<String>::new());
        assert_eq!(f.n(), 11);
        assert_eq!(forest_degree(&f).to_string(), "P:E4,1|P':0|Q:E7,2|Q':E4,2|i0=7|j0=3");
    }

    #[test]
    fn missing_root_loop_is_reported() {
        let mut f = fixtures::eleven();
        // Move the rightmost loop end of the black root away from the end.
        f.vertices[3].slots = vec![Slot::Loop(6), Slot::Loop(7), Slot::Loop(7), Slot::Loop(6)];
        // Loop 6 is now the maximal one but still carries a greek label.
        let v = validate_forest(&f);
        assert!(!v.is_empty());
    }

    #[test]
    fn arrow_cycle_is_reported() {
        use LoopLabel::*;
        use Slot::*;
        // Seed with two loops, plus a white and a black root whose arrows
        // point at each other.
        let f = PermutedForest {
            vertices: vec![
                Vertex {
                    color: Color::White,
                    slots: vec![Thorn(0)],
                    arrow: None,
                },
                Vertex {
                    color: Color::Black,
                    slots: vec![Thorn(0), Loop(0), Loop(0)],
                    arrow: Some(2),
                },
                Vertex {
                    color: Color::White,
                    slots: vec![Loop(1), Loop(1)],
                    arrow: Some(1),
                },
            ],
            roots: vec![0, 1, 2],
            loops: vec![Maximal, Maximal],
        };
        let v = validate_forest(&f);
        assert_eq!(v.iter().filter(|m| m.contains("cycles")).count(), 2, "{v:?}");
    }

    #[test]
    fn canonical_form_ignores_tree_order_and_ids() {
        let f = fixtures::eleven();
        let c = canonical_form(&f);
        assert_eq!(canonical_form(&c), c);
        // Swap vertex ids 1 and 3 by hand.
        let mut g = f.clone();
        g.vertices.swap(1, 3);
        let fix = |v: usize| match v {
            1 => 3,
            3 => 1,
            x => x,
        };
        for vert in &mut g.vertices {
            for s in &mut vert.slots {
                if let Slot::Child(c) = s {
                    *c = fix(*c);
                }
            }
            vert.arrow = vert.arrow.map(fix);
        }
        for l in &mut g.loops {
            if let LoopLabel::Greek(w) = l {
                *w = fix(*w);
            }
        }
        g.roots = vec![0, 1];
        assert!(validate_forest(&g).is_empty());
        assert_eq!(canonical_form(&g), c);
    }

    #[test]
    fn json_and_dot() {
        let f = fixtures::eleven();
        let js = serde_json::to_string(&f).unwrap();
        assert!(js.contains("\"maximal\""));
        let back: PermutedForest = serde_json::from_str(&js).unwrap();
        assert_eq!(back, f);
        let dot = to_dot(&f);
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("style=dashed"));
        assert!(pretty(&f).contains("arrow -> 2"));
    }
}
