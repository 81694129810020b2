//! Connection coefficients computed directly in group algebras, for small
//! `n`: the class algebra of `S_n` and the double coset algebra of
//! `(S_{2n}, B_n)`.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;

use crate::error::{check_bound, Result};
use crate::exact::factorial;
use crate::pairing::{compose, cycle_type, halve_cycle_type, inverse, Pairing};
use crate::partition::{partitions_of, z, Partition};

pub const CLASS_MAX_N: usize = 8;
pub const COSET_MAX_N: usize = 3;

fn type_of(perm: &[usize]) -> Partition {
    Partition::new(cycle_type(perm))
}

/// `c^{(n)}_{λ,μ}` for every pair: the number of `α ∈ C_λ` with
/// `α⁻¹γ ∈ C_μ` for the fixed `n`-cycle `γ = (1 2 ... n)`.
pub fn class_connection_table(n: usize) -> Result<BTreeMap<(Partition, Partition), u64>> {
    check_bound("class algebra product", n, CLASS_MAX_N)?;
    let gamma: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let mut out = BTreeMap::new();
    for lam in partitions_of(n as u32) {
        for mu in partitions_of(n as u32) {
            out.insert((lam.clone(), mu), 0);
        }
    }
    for alpha in (0..n).permutations(n) {
        let beta = compose(&inverse(&alpha), &gamma);
        *out.get_mut(&(type_of(&alpha), type_of(&beta))).expect("all keys present") += 1;
    }
    Ok(out)
}

pub fn class_connection(n: usize, lambda: &Partition, mu: &Partition) -> Result<u64> {
    Ok(class_connection_table(n)?
        .get(&(lambda.clone(), mu.clone()))
        .copied()
        .unwrap_or(0))
}

/// Double coset type of `ω ∈ S_{2n}`: `λ` with `f★ ω f★ ω⁻¹ ∈ C_{λλ}`.
pub fn coset_type(omega: &[usize], fstar: &[usize]) -> Partition {
    let w = compose(&compose(fstar, omega), &compose(fstar, &inverse(omega)));
    halve_cycle_type(&cycle_type(&w)).expect("a product of two pairings has type λλ")
}

/// Double coset data for `S_{2n}`: the coset type of every permutation.
struct Cosets {
    elements: Vec<Vec<usize>>,
    types: Vec<Partition>,
}

fn cosets(n: usize) -> Cosets {
    let fstar = Pairing::canonical_f2(n);
    let elements: Vec<Vec<usize>> = (0..2 * n).permutations(2 * n).collect();
    let types = elements.iter().map(|w| coset_type(w, fstar.image())).collect();
    Cosets { elements, types }
}

/// `|K_λ|` for every `λ ⊢ n`, counted in `S_{2n}`.
pub fn double_coset_sizes(n: usize) -> Result<BTreeMap<Partition, u64>> {
    check_bound("double coset product", n, COSET_MAX_N)?;
    let mut out: BTreeMap<Partition, u64> = partitions_of(n as u32).into_iter().map(|l| (l, 0)).collect();
    for t in cosets(n).types {
        *out.get_mut(&t).expect("all keys present") += 1;
    }
    Ok(out)
}

/// `|B_n|² / (2^{ℓ(λ)} z_λ)`.
pub fn double_coset_size_formula(lambda: &Partition) -> BigInt {
    let n = lambda.size() as u64;
    let bn = BigInt::from(2).pow(n as u32) * factorial(n);
    &bn * &bn / (BigInt::from(2).pow(lambda.len() as u32) * z(lambda))
}

/// `b^{(n)}_{λ,μ} = [K_{(n)}] K_λ K_μ` for every pair, as the number of
/// `x ∈ K_λ` with `x⁻¹ g₀ ∈ K_μ` for a fixed `g₀ ∈ K_{(n)}`.
pub fn double_coset_table(n: usize) -> Result<BTreeMap<(Partition, Partition), u64>> {
    check_bound("double coset product", n, COSET_MAX_N)?;
    let fstar = Pairing::canonical_f2(n);
    let data = cosets(n);
    let full = Partition::single(n as u32);
    let g0 = data
        .elements
        .iter()
        .zip(&data.types)
        .find(|(_, t)| **t == full)
        .map(|(g, _)| g.clone())
        .expect("K_(n) is non-empty");
    let mut out = BTreeMap::new();
    for lam in partitions_of(n as u32) {
        for mu in partitions_of(n as u32) {
            out.insert((lam.clone(), mu), 0);
        }
    }
    for (x, t) in data.elements.iter().zip(&data.types) {
        let y = compose(&inverse(x), &g0);
        let ty = coset_type(&y, fstar.image());
        *out.get_mut(&(t.clone(), ty)).expect("all keys present") += 1;
    }
    Ok(out)
}

pub fn double_coset_connection(n: usize, lambda: &Partition, mu: &Partition) -> Result<u64> {
    Ok(double_coset_table(n)?
        .get(&(lambda.clone(), mu.clone()))
        .copied()
        .unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::oracle::{b_from_l, c_from_l, l_table};

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn class_connection_examples() {
        assert_eq!(class_connection(2, &part("2"), &part("1,1")).unwrap(), 1);
        assert_eq!(class_connection(2, &part("2"), &part("2")).unwrap(), 0);
        assert_eq!(
            class_connection(3, &part("3"), &part("3")).unwrap(),
            l_table(3).unwrap().get(&part("3"), &part("3"), 0)
        );
        assert!(matches!(class_connection(9, &part("9"), &part("9")), Err(Error::BoundExceeded { .. })));
    }

    #[test]
    fn class_connection_matches_orientable_pairings() {
        for n in 1..=5 {
            let c = c_from_l(&l_table(n).unwrap());
            assert_eq!(class_connection_table(n).unwrap(), c, "n = {n}");
        }
    }

    #[test]
    fn double_cosets_small_n() {
        assert_eq!(double_coset_connection(1, &part("1"), &part("1")).unwrap(), 2);
        assert_eq!(double_coset_connection(2, &part("2"), &part("1,1")).unwrap(), 8);
        for n in 1..=2 {
            let b = b_from_l(&l_table(n).unwrap());
            let table = double_coset_table(n).unwrap();
            for (k, v) in table {
                assert_eq!(BigInt::from(v), b[&k]);
            }
            for (lam, size) in double_coset_sizes(n).unwrap() {
                assert_eq!(BigInt::from(size), double_coset_size_formula(&lam));
            }
        }
    }
}
