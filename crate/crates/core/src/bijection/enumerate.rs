use std::collections::BTreeSet;

use itertools::Itertools;

use super::{canonical_form, tokens, validate_forest, Color, LoopLabel, PermutedForest, Slot, Vertex};
use crate::error::{check_bound, Error, Result};
use crate::strata::{ArrayKind, ArrayTuple};

pub const FOREST_MAX_N: usize = 4;

struct Spec {
    color: Color,
    /// Number of descendant slots.
    slots: usize,
    loops: usize,
    non_seed_root: bool,
    root: bool,
}

/// A slot layout: `Some(k)` is an extremity of local loop `k`, `None` a
/// slot left for a child or a thorn.
type Layout = Vec<Option<usize>>;

fn matchings(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for (k, &other) in rest.iter().enumerate() {
        let remaining: Vec<usize> = rest.iter().enumerate().filter(|&(m, _)| m != k).map(|(_, &x)| x).collect();
        for mut m in matchings(&remaining) {
            m.insert(0, (first, other));
            out.push(m);
        }
    }
    out
}

fn layouts(spec: &Spec) -> Vec<Layout> {
    let mut out = Vec::new();
    if 2 * spec.loops > spec.slots {
        return out;
    }
    for ends in (0..spec.slots).combinations(2 * spec.loops) {
        if spec.non_seed_root && ends.last() != Some(&(spec.slots - 1)) {
            continue;
        }
        for m in matchings(&ends) {
            let mut layout = vec![None; spec.slots];
            for (k, &(a, b)) in m.iter().enumerate() {
                layout[a] = Some(k);
                layout[b] = Some(k);
            }
            out.push(layout);
        }
    }
    out
}

fn specs(a: &ArrayTuple) -> Vec<Spec> {
    let mut out = vec![Spec {
        color: Color::White,
        slots: a.i0 as usize,
        loops: a.j0 as usize,
        non_seed_root: false,
        root: true,
    }];
    for (kind, color, root) in [
        (ArrayKind::P, Color::White, false),
        (ArrayKind::PPrime, Color::White, true),
        (ArrayKind::Q, Color::Black, false),
        (ArrayKind::QPrime, Color::Black, true),
    ] {
        for (&(i, j), &c) in a.cells(kind) {
            for _ in 0..c {
                out.push(Spec {
                    color,
                    slots: i as usize - usize::from(!root),
                    loops: j as usize,
                    non_seed_root: root,
                    root,
                });
            }
        }
    }
    out
}

/// Every permuted forest of degree `A`, up to the order of non-seed trees,
/// in canonical form. Brute force, so limited to small `n`.
pub fn enumerate_forests(a: &ArrayTuple, n: usize) -> Result<Vec<PermutedForest>> {
    check_bound("forest enumeration", n, FOREST_MAX_N)?;
    if !a.violations().is_empty() {
        return Err(Error::Invalid(a.violations().join("; ")));
    }
    let white = a.lambda().size() as usize;
    let black = a.mu().size() as usize;
    if white != n || black != n {
        return Err(Error::Invalid(format!("degree {a} does not have order {n}")));
    }
    let specs = specs(a);
    let nv = specs.len();
    let per_vertex: Vec<Vec<Layout>> = specs.iter().map(layouts).collect();
    let opposite: Vec<Vec<usize>> = specs
        .iter()
        .map(|s| (0..nv).filter(|&w| specs[w].color != s.color).collect())
        .collect();
    let non_root = |c: Color| -> Vec<usize> { (0..nv).filter(|&v| !specs[v].root && specs[v].color == c).collect() };
    let white_children = non_root(Color::White);
    let black_children = non_root(Color::Black);

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for combo in per_vertex.iter().map(|l| l.iter()).multi_cartesian_product() {
        let cross = |c: Color| -> Vec<(usize, usize)> {
            (0..nv)
                .filter(|&v| specs[v].color == c)
                .flat_map(|v| combo[v].iter().enumerate().filter(|s| s.1.is_none()).map(move |(k, _)| (v, k)))
                .collect()
        };
        let white_cross = cross(Color::White);
        let black_cross = cross(Color::Black);
        if white_cross.len() < black_children.len() || black_cross.len() < white_children.len() {
            continue;
        }
        // Loops in vertex order, with their local index and maximality.
        let mut loop_owner = Vec::new();
        for v in 0..nv {
            for k in 0..specs[v].loops {
                let maximal = specs[v].non_seed_root && combo[v].last() == Some(&Some(k));
                loop_owner.push((v, k, maximal));
            }
        }
        let mut attributions: Vec<Vec<usize>> = Vec::new();
        for targets in loop_owner.iter().map(|l| opposite[l.0].iter().copied()).multi_cartesian_product() {
            let mut incoming = vec![0usize; nv];
            for &t in &targets {
                incoming[t] += 1;
            }
            if (0..nv).all(|v| incoming[v] == specs[v].loops) {
                attributions.push(targets);
            }
        }
        if loop_owner.is_empty() {
            attributions = vec![Vec::new()];
        }
        if attributions.is_empty() {
            continue;
        }

        for to_black in black_cross.iter().permutations(white_children.len()) {
            for to_white in white_cross.iter().permutations(black_children.len()) {
                let used: BTreeSet<(usize, usize)> = to_black.iter().chain(&to_white).map(|p| **p).collect();
                let white_thorns: Vec<_> = white_cross.iter().filter(|p| !used.contains(p)).collect();
                let black_thorns: Vec<_> = black_cross.iter().filter(|p| !used.contains(p)).collect();
                if white_thorns.len() != black_thorns.len() {
                    continue;
                }
                for matched in black_thorns.iter().permutations(black_thorns.len()) {
                    let mut slots: Vec<Vec<Slot>> = combo.iter().map(|l| vec![Slot::Thorn(usize::MAX); l.len()]).collect();
                    for (&child, &&(v, k)) in white_children.iter().zip(&to_black) {
                        slots[v][k] = Slot::Child(child);
                    }
                    for (&child, &&(v, k)) in black_children.iter().zip(&to_white) {
                        slots[v][k] = Slot::Child(child);
                    }
                    for (t, (&&(wv, wk), &&&(bv, bk))) in white_thorns.iter().zip(&matched).enumerate() {
                        slots[wv][wk] = Slot::Thorn(t);
                        slots[bv][bk] = Slot::Thorn(t);
                    }
                    for (id, &(v, k, _)) in loop_owner.iter().enumerate() {
                        for (pos, s) in combo[v].iter().enumerate() {
                            if *s == Some(k) {
                                slots[v][pos] = Slot::Loop(id);
                            }
                        }
                    }
                    for targets in &attributions {
                        let mut arrows = vec![None; nv];
                        let loops: Vec<LoopLabel> = loop_owner
                            .iter()
                            .zip(targets)
                            .map(|(&(v, _, maximal), &t)| {
                                if maximal {
                                    arrows[v] = Some(t);
                                    LoopLabel::Maximal
                                } else {
                                    LoopLabel::Greek(t)
                                }
                            })
                            .collect();
                        let vertices = (0..nv)
                            .map(|v| Vertex {
                                color: specs[v].color,
                                slots: slots[v].clone(),
                                arrow: arrows[v],
                            })
                            .collect();
                        let roots = (0..nv).filter(|&v| specs[v].root).collect();
                        let forest = PermutedForest { vertices, roots, loops };
                        if !validate_forest(&forest).is_empty() {
                            continue;
                        }
                        let canon = canonical_form(&forest);
                        if seen.insert(tokens(&canon)) {
                            out.push(canon);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
