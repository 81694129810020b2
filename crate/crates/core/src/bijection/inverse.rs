use super::{structural_violations, validate_forest, LoopLabel, PermutedForest, Slot};
use crate::error::{Error, Result};
use crate::oracle::PartitionedHypermap;
use crate::pairing::{Label, Pairing, SetPartition};

/// Recovers the partitioned hypermap of a permuted forest.
///
/// Labels are placed by walking `1 → 1̂ → 2 → ... → n̂`: the label after the
/// one at half-edge `e` goes to the next free half-edge of the vertex that
/// `e` designates (the other end of an edge or thorn, the vertex named by a
/// loop, or the arrow target for a maximal loop). Half-edges of a vertex are
/// filled left to right, the parent edge last.
pub fn theta_inverse(f: &PermutedForest) -> Result<PartitionedHypermap> {
    let structural = structural_violations(f);
    if !structural.is_empty() {
        return Err(Error::Invalid(structural.join("; ")));
    }
    let n = f.n();
    let inc = f.incidence();
    let nv = f.vertices.len();
    let positions: Vec<usize> = (0..nv).map(|v| f.degree(v)).collect();
    let total: usize = positions.iter().sum();
    if n == 0 || total != 2 * n {
        return Err(Error::MalformedForest {
            step: 0,
            reason: format!("white degree {n} and total degree {total} are not balanced"),
        });
    }

    // Vertex designated by half-edge k of v.
    let target = |v: usize, k: usize| -> Option<usize> {
        let slots = &f.vertices[v].slots;
        if k == slots.len() {
            return inc.parent[v];
        }
        match slots[k] {
            Slot::Child(c) => Some(c),
            Slot::Thorn(t) => inc.thorn_places[&t].iter().find(|p| **p != (v, k)).map(|p| p.0),
            Slot::Loop(l) => match f.loops[l] {
                LoopLabel::Greek(w) => Some(w),
                LoopLabel::Maximal => f.vertices[v].arrow,
            },
        }
    };

    let mut cursor = vec![0usize; nv];
    let mut label_at: Vec<Vec<Label>> = positions.iter().map(|&d| Vec::with_capacity(d)).collect();
    let seed = f.seed();
    cursor[seed] = 1;
    label_at[seed].push(Label::plain(1));
    let (mut v, mut k, mut label) = (seed, 0usize, Label::plain(1));
    for step in 1..2 * n {
        let next = if label.hat {
            Label::plain(label.value + 1)
        } else {
            Label::hat(label.value)
        };
        let u = match target(v, k) {
            Some(u) if u < nv && f.vertices[u].color != f.vertices[v].color => u,
            _ => {
                return Err(Error::MalformedForest {
                    step,
                    reason: format!("half-edge {k} of vertex {v} does not lead to the opposite colour"),
                })
            }
        };
        if cursor[u] >= positions[u] {
            return Err(Error::MalformedForest {
                step,
                reason: format!("vertex {u} has no free half-edge left for label {next}"),
            });
        }
        k = cursor[u];
        cursor[u] += 1;
        label_at[u].push(next);
        v = u;
        label = next;
    }
    if target(v, k) != Some(seed) {
        return Err(Error::MalformedForest {
            step: 2 * n,
            reason: format!("label {label} does not lead back to the seed root"),
        });
    }
    let properties = validate_forest(f);
    if !properties.is_empty() {
        return Err(Error::MalformedForest {
            step: 2 * n,
            reason: properties.join("; "),
        });
    }

    let mut pairs: Vec<(Label, Label)> = Vec::with_capacity(n);
    for places in &inc.loop_places {
        pairs.push((label_at[places[0].0][places[0].1], label_at[places[1].0][places[1].1]));
    }
    for places in inc.thorn_places.values() {
        pairs.push((label_at[places[0].0][places[0].1], label_at[places[1].0][places[1].1]));
    }
    for (v, vert) in f.vertices.iter().enumerate() {
        for (k, s) in vert.slots.iter().enumerate() {
            if let Slot::Child(c) = *s {
                pairs.push((label_at[v][k], label_at[c][positions[c] - 1]));
            }
        }
    }
    let f3 = Pairing::from_pairs(n, &pairs)?;
    let f1 = Pairing::canonical_f1(n);
    let f2 = Pairing::canonical_f2(n);
    let mut pi1 = Vec::new();
    let mut pi2 = Vec::new();
    for (v, vert) in f.vertices.iter().enumerate() {
        let partner = if vert.color == super::Color::White { &f1 } else { &f2 };
        let block: Vec<Label> = label_at[v].iter().flat_map(|&l| [l, partner.apply(l)]).collect();
        if vert.color == super::Color::White {
            pi1.push(block);
        } else {
            pi2.push(block);
        }
    }
    PartitionedHypermap::new(f3, SetPartition::new(n, pi1)?, SetPartition::new(n, pi2)?)
}
