use std::sync::OnceLock;

use octamoment::closed_forms::{complex_expansion, q_real, OracleBounds};
use octamoment::moments::{mc_moment_complex, mc_moment_real, MatrixSpec, RealMoment};
use octamoment::symfun::MonomialExpansion;
use octamoment::ExactRational;
use proptest::prelude::*;

fn real(n: u32) -> &'static RealMoment {
    static CACHE: OnceLock<Vec<RealMoment>> = OnceLock::new();
    &CACHE.get_or_init(|| {
        (1..=3)
            .map(|k| RealMoment::new(k, OracleBounds::default()).unwrap())
            .collect()
    })[n as usize - 1]
}

fn complex(n: u32) -> &'static MonomialExpansion {
    static CACHE: OnceLock<Vec<MonomialExpansion>> = OnceLock::new();
    &CACHE.get_or_init(|| (1..=3).map(complex_expansion).collect())[n as usize - 1]
}

fn rational() -> impl Strategy<Value = ExactRational> {
    (-6i64..=6, 1i64..=4).prop_map(|(a, b)| ExactRational::new(a, b).unwrap())
}

fn eigs(m: usize) -> impl Strategy<Value = Vec<ExactRational>> {
    proptest::collection::vec(rational(), m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn symmetric_in_x_and_y(n in 1u32..=3, (x, y) in (1usize..=3).prop_flat_map(|m| (eigs(m), eigs(m)))) {
        let r = real(n);
        prop_assert_eq!(r.evaluate(&x, &y).unwrap(), r.evaluate(&y, &x).unwrap());
        let c = complex(n);
        prop_assert_eq!(c.evaluate(&x, &y), c.evaluate(&y, &x));
    }

    #[test]
    fn homogeneous_of_degree_n(n in 1u32..=3, c in rational(), (x, y) in (1usize..=3).prop_flat_map(|m| (eigs(m), eigs(m)))) {
        let r = real(n);
        let cx: Vec<ExactRational> = x.iter().map(|v| v * &c).collect();
        let scale = c.pow(n as i32).unwrap();
        prop_assert_eq!(r.evaluate(&cx, &y).unwrap(), scale.clone() * r.evaluate(&x, &y).unwrap());
        let e = complex(n);
        prop_assert_eq!(e.evaluate(&cx, &y), scale * e.evaluate(&x, &y));
    }
}

#[test]
fn identity_specialisation() {
    for n in 1..=5 {
        let r = RealMoment::new(n, OracleBounds::default()).unwrap();
        for m in 1..=5usize {
            for l in 0..=m {
                let mut x = vec![ExactRational::one(); l];
                x.resize(m, ExactRational::zero());
                let y = vec![ExactRational::one(); m];
                assert_eq!(r.evaluate(&x, &y).unwrap(), q_real(n, l as i64, m as i64), "n={n} l={l} m={m}");
            }
        }
    }
}

#[test]
fn dense_input_matches_diagonal_input() {
    // A rotated diag(1, -1/2) has the same moments.
    let (c, s) = (0.6f64, 0.8f64);
    let (a, b) = (1.0f64, -0.5f64);
    let entries = MatrixSpec::Entries {
        dim: 2,
        entries: vec![
            vec![
                octamoment::moments::Entry::Real(a * c * c + b * s * s),
                octamoment::moments::Entry::Real((a - b) * c * s),
            ],
            vec![
                octamoment::moments::Entry::Real((a - b) * c * s),
                octamoment::moments::Entry::Real(a * s * s + b * c * c),
            ],
        ],
    };
    let diag = MatrixSpec::diagonal(vec![ExactRational::one(), ExactRational::new(-1, 2).unwrap()]);
    let i2 = MatrixSpec::identity(2);
    let d = mc_moment_real(2, &entries, &i2, 20_000, 3).unwrap();
    let e = mc_moment_real(2, &diag, &i2, 20_000, 3).unwrap();
    // Same seed, orthogonally invariant law: estimates agree statistically.
    assert!((d.mean - e.mean).abs() < 5.0 * (d.std_error + e.std_error));
    let z = mc_moment_complex(2, &entries, &i2, 20_000, 3).unwrap();
    assert!(z.mean.is_finite());
}
