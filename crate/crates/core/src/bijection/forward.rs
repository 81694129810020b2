use std::collections::BTreeMap;

use super::{canonical_form, Color, LoopLabel, PermutedForest, Slot, Vertex};
use crate::error::Result;
use crate::oracle::PartitionedHypermap;

/// How a non-seed vertex hangs below its ascendant.
#[derive(Clone, Copy)]
enum Ascent {
    /// Tree edge to the ascendant through the vertex's largest label.
    Edge,
    /// Root with an arrow to the ascendant.
    Arrow(usize),
}

/// The permuted forest of a partitioned hypermap, in canonical form.
///
/// White vertices are the blocks of π₁ carrying their non-hat labels, black
/// vertices the blocks of π₂ carrying their hat labels. Each non-seed
/// vertex looks at the pair of its largest label: if it leaves the colour
/// class it is the tree edge to the parent, otherwise it is the maximal
/// loop of a root whose arrow points at the opposite block containing it.
pub fn theta_forward(h: &PartitionedHypermap) -> Result<PermutedForest> {
    let n = h.n();
    let f3 = h.f3().image();
    let is_hat = |x: usize| x >= n;
    let of1 = h.pi1().block_of();
    let of2 = h.pi2().block_of();
    let nw = h.pi1().blocks().len();
    let nb = h.pi2().blocks().len();

    // Vertex ids: white blocks first, then black blocks.
    let vertex_of = |x: usize| if is_hat(x) { nw + of2[x] } else { of1[x] };
    let mut labels: Vec<Vec<usize>> = vec![Vec::new(); nw + nb];
    for x in 0..2 * n {
        labels[vertex_of(x)].push(x);
    }
    let seed = of1[0];

    let mut ascent: Vec<Option<Ascent>> = vec![None; nw + nb];
    for (v, ls) in labels.iter().enumerate() {
        if v == seed {
            continue;
        }
        let max = *ls.last().expect("balanced blocks are non-empty");
        // The opposite block holding the largest label.
        let up = if is_hat(max) { of1[max] } else { nw + of2[max] };
        ascent[v] = Some(if is_hat(f3[max]) != is_hat(max) {
            Ascent::Edge
        } else {
            Ascent::Arrow(up)
        });
    }
    let edge_down = |x: usize| -> bool {
        // x is the largest label of a vertex attached by a tree edge.
        let v = vertex_of(x);
        matches!(ascent[v], Some(Ascent::Edge)) && labels[v].last() == Some(&x)
    };

    let mut loop_id: BTreeMap<usize, usize> = BTreeMap::new();
    let mut loops = Vec::new();
    let mut thorn_id: BTreeMap<usize, usize> = BTreeMap::new();
    let mut vertices = Vec::with_capacity(nw + nb);
    for (v, ls) in labels.iter().enumerate() {
        let color = if v < nw { Color::White } else { Color::Black };
        let mut slots = Vec::new();
        for &x in ls {
            if edge_down(x) {
                continue;
            }
            let y = f3[x];
            let key = x.min(y);
            if is_hat(y) == is_hat(x) {
                let id = *loop_id.entry(key).or_insert_with(|| {
                    let maximal = matches!(ascent[v], Some(Ascent::Arrow(_))) && ls.last() == Some(&x.max(y));
                    loops.push(if maximal {
                        LoopLabel::Maximal
                    } else if is_hat(x) {
                        LoopLabel::Greek(of1[x])
                    } else {
                        LoopLabel::Greek(nw + of2[x])
                    });
                    loops.len() - 1
                });
                slots.push(Slot::Loop(id));
            } else if edge_down(y) {
                slots.push(Slot::Child(vertex_of(y)));
            } else {
                let k = thorn_id.len();
                slots.push(Slot::Thorn(*thorn_id.entry(key).or_insert(k)));
            }
        }
        let arrow = match ascent[v] {
            Some(Ascent::Arrow(w)) => Some(w),
            _ => None,
        };
        vertices.push(Vertex { color, slots, arrow });
    }
    let mut roots = vec![seed];
    roots.extend((0..nw + nb).filter(|&v| matches!(ascent[v], Some(Ascent::Arrow(_)))));
    Ok(canonical_form(&PermutedForest { vertices, roots, loops }))
}
