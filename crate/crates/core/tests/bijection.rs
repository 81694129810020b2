use octamoment::bijection::{
    canonical_form, enumerate_forests, forest_degree, theta_forward, theta_inverse, validate_forest, Color,
    LoopLabel, PermutedForest, Slot,
};
use octamoment::oracle::{degree_array, enumerate_partitioned, partitioned_tallies, PARTITIONED_MAX_N};
use octamoment::{ArrayTuple, Label, Pairing, PartitionedHypermap, SetPartition};

fn eleven() -> PermutedForest {
    serde_json::from_str(include_str!("data/forest_n11.json")).unwrap()
}

/// Pairs of a partial cycle list such as `(1 3^)(2 7)`.
fn cycles(s: &str) -> Vec<(Label, Label)> {
    s.trim_matches(|c| c == '(' || c == ')')
        .split(")(")
        .map(|p| {
            let mut it = p.split_whitespace().map(|x| x.parse::<Label>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect()
}

fn labels(s: &str) -> Vec<Label> {
    s.split(',').map(|x| x.trim().parse().unwrap()).collect()
}

#[test]
fn eleven_edge_forest_recovers_triple() {
    let f = eleven();
    assert!(validate_forest(&f).is_empty());
    assert_eq!(forest_degree(&f).to_string(), "P:E4,1|P':0|Q:E7,2|Q':E4,2|i0=7|j0=3");
    let h = theta_inverse(&f).unwrap();
    let expected = PartitionedHypermap::new(
        "(1 4)(1^ 8^)(2 9)(2^ 3^)(3 11^)(4^ 10^)(5 7)(5^ 6)(6^ 11)(7^ 9^)(8 10)".parse().unwrap(),
        SetPartition::new(
            11,
            vec![
                labels("11^,1,1^,2,2^,3,3^,4,7^,8,8^,9,9^,10"),
                labels("4^,5,5^,6,6^,7,10^,11"),
            ],
        )
        .unwrap(),
        SetPartition::new(
            11,
            vec![
                labels("2,2^,3,3^,5,5^,6,6^,7,7^,9,9^,11,11^"),
                labels("1,1^,4,4^,8,8^,10,10^"),
            ],
        )
        .unwrap(),
    )
    .unwrap();
    assert_eq!(h, expected);
    assert_eq!(theta_forward(&h).unwrap(), canonical_form(&f));
}

#[test]
fn twelve_edge_hypermap_round_trips() {
    // Blocks are fixed; f3 is forced except on two cells of four labels.
    let pi1 = SetPartition::new(
        12,
        vec![
            labels("12^,1,3^,4,7^,8,11^,12"),
            labels("1^,2,6^,7,8^,9"),
            labels("2^,3,10^,11"),
            labels("4^,5,5^,6,9^,10"),
        ],
    )
    .unwrap();
    let pi2 = SetPartition::new(
        12,
        vec![
            labels("1,1^,3,3^,6,6^,10,10^"),
            labels("2,2^,7,7^,11,11^"),
            labels("4,4^,5,5^,8,8^,9,9^,12,12^"),
        ],
    )
    .unwrap();
    let forced = "(1 3^)(7^ 11^)(1^ 6^)(2 7)(8^ 9)(3 10^)(2^ 11)(6 10)";
    let cell_a = labels("12^,4,8,12");
    let cell_b = labels("4^,5,5^,9^");
    let pairings = |c: &[Label]| {
        [(1, 2, 3), (2, 1, 3), (3, 1, 2)].map(|(x, y, z)| [(c[0], c[x]), (c[y], c[z])])
    };
    let target: ArrayTuple = "P:E3,1+E2,0|P':E3,1|Q:E5,1+E4,1|Q':E3,1|i0=4|j0=1".parse().unwrap();
    let mut matches = 0;
    for pa in pairings(&cell_a) {
        for pb in pairings(&cell_b) {
            let mut pairs = cycles(forced);
            pairs.extend(pa);
            pairs.extend(pb);
            let f3 = Pairing::from_pairs(12, &pairs).unwrap();
            let Ok(h) = PartitionedHypermap::new(f3, pi1.clone(), pi2.clone()) else {
                continue;
            };
            if degree_array(&h) != target {
                continue;
            }
            matches += 1;
            let f = theta_forward(&h).unwrap();
            assert!(validate_forest(&f).is_empty());
            assert_eq!(forest_degree(&f), target);
            assert_eq!(theta_inverse(&f).unwrap(), h);
        }
    }
    assert!(matches > 0);
}

#[test]
fn hypermaps_round_trip_up_to_five() {
    for n in 1..=5 {
        let mut failures = 0;
        enumerate_partitioned(n, PARTITIONED_MAX_N, |h| {
            let ok = theta_forward(&h).is_ok_and(|f| {
                validate_forest(&f).is_empty()
                    && forest_degree(&f) == degree_array(&h)
                    && theta_inverse(&f).as_ref() == Ok(&h)
            });
            failures += usize::from(!ok);
        })
        .unwrap();
        assert_eq!(failures, 0, "n = {n}");
    }
}

#[test]
fn enumerated_forests_round_trip_and_count_at_four() {
    let tallies = partitioned_tallies(4, PARTITIONED_MAX_N).unwrap();
    for (a, &lp) in &tallies.by_array {
        let forests = enumerate_forests(a, 4).unwrap();
        assert_eq!(forests.len() as u64, lp, "A = {a}");
        for f in &forests {
            let h = theta_inverse(f).unwrap();
            assert_eq!(&theta_forward(&h).unwrap(), f);
        }
    }
}

#[test]
fn small_examples() {
    let a: ArrayTuple = "P:0|P':0|Q:E1,0|Q':0|i0=1|j0=0".parse().unwrap();
    let forests = enumerate_forests(&a, 1).unwrap();
    assert_eq!(forests.len(), 1);
    let h = theta_inverse(&forests[0]).unwrap();
    assert_eq!(h.f3().cycle_notation_ascii(), "(1 1^)");

    let merged: ArrayTuple = "P:0|P':0|Q:0|Q':E2,1|i0=2|j0=1".parse().unwrap();
    assert_eq!(enumerate_forests(&merged, 2).unwrap().len(), 1);
    let two: ArrayTuple = "P:0|P':0|Q:E2,0|Q':0|i0=2|j0=0".parse().unwrap();
    assert_eq!(enumerate_forests(&two, 2).unwrap().len(), 2);

    // Both colour classes fully merged with f3 = (1 2)(1^ 2^).
    let h = PartitionedHypermap::new(
        "(1 2)(1^ 2^)".parse().unwrap(),
        SetPartition::new(2, vec![labels("1,1^,2,2^")]).unwrap(),
        SetPartition::new(2, vec![labels("1,1^,2,2^")]).unwrap(),
    )
    .unwrap();
    let f = theta_forward(&h).unwrap();
    assert_eq!(forest_degree(&f), merged);
    assert_eq!(f.roots.len(), 2);
    let black = f.roots[1];
    assert_eq!(f.vertices[black].color, Color::Black);
    assert_eq!(f.vertices[black].arrow, Some(f.seed()));
    assert_eq!(f.vertices[f.seed()].slots, vec![Slot::Loop(0), Slot::Loop(0)]);
    assert_eq!(f.loops[0], LoopLabel::Greek(black));
}

#[test]
fn enumeration_bound() {
    let a = ArrayTuple::seed_only(5, 0);
    assert!(enumerate_forests(&a, 5).is_err());
}
