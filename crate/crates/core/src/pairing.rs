//! Half-edge labels `1..n, 1̂..n̂`, perfect pairings on them, and set
//! partitions of the label set.
//!
//! Internally a label is an index: non-hat `i` is `i-1`, hat `î` is
//! `n+i-1`. Labels order as `1 < 1̂ < 2 < 2̂ < ... < n < n̂`, the order in
//! which the inverse bijection recovers them.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::partition::Partition;

const COMBINING_CIRCUMFLEX: char = '\u{302}';

/// A half-edge label: `value ∈ 1..=n`, hat or non-hat.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub value: u32,
    pub hat: bool,
}

impl Label {
    pub fn plain(value: u32) -> Self {
        Self { value, hat: false }
    }

    pub fn hat(value: u32) -> Self {
        Self { value, hat: true }
    }

    pub fn index(self, n: usize) -> usize {
        let base = self.value as usize - 1;
        if self.hat {
            n + base
        } else {
            base
        }
    }

    pub fn from_index(idx: usize, n: usize) -> Self {
        if idx < n {
            Self::plain(idx as u32 + 1)
        } else {
            Self::hat((idx - n) as u32 + 1)
        }
    }

    /// ASCII form, `3` or `3^`.
    pub fn to_ascii(self) -> String {
        if self.hat {
            format!("{}^", self.value)
        } else {
            self.value.to_string()
        }
    }
}

impl fmt::Display for Label {
    /// Hat labels carry a combining circumflex, e.g. `3̂`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hat {
            write!(f, "{}{}", self.value, COMBINING_CIRCUMFLEX)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ascii())
    }
}

impl FromStr for Label {
    type Err = Error;

    /// Accepts `3`, `3^`, and `3̂`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (digits, hat) = if let Some(d) = s.strip_suffix('^') {
            (d, true)
        } else if let Some(d) = s.strip_suffix(COMBINING_CIRCUMFLEX) {
            (d, true)
        } else {
            (s, false)
        };
        let value: u32 = digits
            .parse()
            .map_err(|_| Error::Parse(format!("invalid label `{s}`")))?;
        if value == 0 {
            return Err(Error::Parse("labels start at 1".into()));
        }
        Ok(Self { value, hat })
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_ascii())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Cycle type of a permutation given as an index map.
pub fn cycle_type(perm: &[usize]) -> Vec<u32> {
    let mut seen = vec![false; perm.len()];
    let mut lengths = Vec::new();
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        lengths.push(len);
    }
    lengths.sort_unstable_by(|a, b| b.cmp(a));
    lengths
}

/// `(g∘h)(x) = g(h(x))`.
pub fn compose(g: &[usize], h: &[usize]) -> Vec<usize> {
    h.iter().map(|&x| g[x]).collect()
}

pub fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Halves a cycle type of the form `λλ`; `None` if some length has odd
/// multiplicity.
pub fn halve_cycle_type(lengths: &[u32]) -> Option<Partition> {
    let doubled = Partition::new(lengths.to_vec());
    let mut half = std::collections::BTreeMap::new();
    for (len, mult) in doubled.multiplicities() {
        if mult % 2 != 0 {
            return None;
        }
        half.insert(len, mult / 2);
    }
    Some(Partition::from_multiplicities(&half))
}

/// A fixed-point-free involution on `[n] ∪ [n̂]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Pairing {
    n: usize,
    image: Vec<usize>,
}

impl Pairing {
    /// Validates that `image` is a fixed-point-free involution on `2n` points.
    pub fn from_image(n: usize, image: Vec<usize>) -> Result<Self> {
        if image.len() != 2 * n {
            return Err(Error::Invalid(format!(
                "pairing on 2n = {} points has {} images",
                2 * n,
                image.len()
            )));
        }
        for (x, &y) in image.iter().enumerate() {
            if y >= 2 * n || y == x || image[y] != x {
                return Err(Error::Invalid(format!(
                    "not a fixed-point-free involution at {:?}",
                    Label::from_index(x, n)
                )));
            }
        }
        Ok(Self { n, image })
    }

    pub fn from_pairs(n: usize, pairs: &[(Label, Label)]) -> Result<Self> {
        let mut image = vec![usize::MAX; 2 * n];
        for &(a, b) in pairs {
            for l in [a, b] {
                if l.value as usize > n || l.value == 0 {
                    return Err(Error::Invalid(format!("label {l:?} out of range for n = {n}")));
                }
            }
            let (ia, ib) = (a.index(n), b.index(n));
            if image[ia] != usize::MAX || image[ib] != usize::MAX {
                return Err(Error::Invalid(format!("label paired twice in ({a:?} {b:?})")));
            }
            image[ia] = ib;
            image[ib] = ia;
        }
        if image.contains(&usize::MAX) {
            return Err(Error::Invalid("pairing leaves labels unpaired".into()));
        }
        Self::from_image(n, image)
    }

    /// `f₁ = (1 n̂)(2 1̂)(3 2̂)...(n (n-1)̂)`.
    pub fn canonical_f1(n: usize) -> Self {
        let pairs: Vec<_> = (1..=n as u32)
            .map(|i| {
                let partner = if i == 1 { n as u32 } else { i - 1 };
                (Label::plain(i), Label::hat(partner))
            })
            .collect();
        Self::from_pairs(n, &pairs).expect("f1 is a pairing")
    }

    /// `f₂ = f★ = (1 1̂)(2 2̂)...(n n̂)`.
    pub fn canonical_f2(n: usize) -> Self {
        let pairs: Vec<_> = (1..=n as u32)
            .map(|i| (Label::plain(i), Label::hat(i)))
            .collect();
        Self::from_pairs(n, &pairs).expect("f2 is a pairing")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, l: Label) -> Label {
        Label::from_index(self.image[l.index(self.n)], self.n)
    }

    /// Pairs `(a, b)` with `a < b`, sorted by `a`.
    pub fn pairs(&self) -> Vec<(Label, Label)> {
        let mut out: Vec<_> = (0..2 * self.n)
            .filter(|&x| x < self.image[x])
            .map(|x| (Label::from_index(x, self.n), Label::from_index(self.image[x], self.n)))
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        out.sort();
        out
    }

    /// Cycle notation, pairs ordered by their smaller label: `(1 4)(1̂ 8̂)...`.
    pub fn cycle_notation(&self) -> String {
        self.pairs()
            .iter()
            .map(|(a, b)| format!("({a} {b})"))
            .collect()
    }

    pub fn cycle_notation_ascii(&self) -> String {
        self.pairs()
            .iter()
            .map(|(a, b)| format!("({} {})", a.to_ascii(), b.to_ascii()))
            .collect()
    }
}

impl fmt::Debug for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.cycle_notation_ascii())
    }
}

impl FromStr for Pairing {
    type Err = Error;

    /// Parses cycle notation `(1 4)(1^ 8^)...`; `n` is the largest value seen.
    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for chunk in s.split(')') {
            let chunk = chunk.trim();
            if chunk.is_empty() {
                continue;
            }
            let inner = chunk
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected `(` in `{chunk}`")))?;
            let labels: Vec<Label> = inner
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_>>()?;
            match labels.as_slice() {
                [a, b] => pairs.push((*a, *b)),
                _ => return Err(Error::Parse(format!("a pairing cycle has two labels: `({inner})`"))),
            }
        }
        let n = pairs
            .iter()
            .flat_map(|(a, b)| [a.value, b.value])
            .max()
            .unwrap_or(0) as usize;
        Self::from_pairs(n, &pairs)
    }
}

/// Cycle type `λλ` of `g∘h`, returned as `λ`.
pub fn half_cycle_type(g: &Pairing, h: &Pairing) -> Result<Partition> {
    if g.n != h.n {
        return Err(Error::Invalid("pairings of different orders".into()));
    }
    let product = compose(&g.image, &h.image);
    let lengths = cycle_type(&product);
    halve_cycle_type(&lengths).ok_or_else(|| {
        Error::Convention(format!("cycle type {lengths:?} of g∘h is not of the form λλ"))
    })
}

/// Number of hat/hat pairs of `f3` (equal to the number of non-hat/non-hat
/// pairs).
pub fn r_statistic(f3: &Pairing) -> usize {
    let n = f3.n;
    (n..2 * n).filter(|&x| f3.image[x] >= n).count() / 2
}

/// A set partition of `[n] ∪ [n̂]`, stored canonically: each block sorted,
/// blocks sorted by their smallest label.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<Label>>,
}

impl SetPartition {
    pub fn new(n: usize, blocks: Vec<Vec<Label>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut canon = Vec::with_capacity(blocks.len());
        for mut b in blocks {
            if b.is_empty() {
                return Err(Error::Invalid("empty block".into()));
            }
            for &l in &b {
                if l.value == 0 || l.value as usize > n {
                    return Err(Error::Invalid(format!("label {l:?} out of range for n = {n}")));
                }
                if !seen.insert(l) {
                    return Err(Error::Invalid(format!("label {l:?} in two blocks")));
                }
            }
            b.sort();
            canon.push(b);
        }
        if seen.len() != 2 * n {
            return Err(Error::Invalid("blocks do not cover [n] ∪ [n̂]".into()));
        }
        canon.sort();
        Ok(Self { n, blocks: canon })
    }

    /// From blocks of indices (internal use by the enumerators).
    pub(crate) fn from_index_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Self {
        let mut canon: Vec<Vec<Label>> = blocks
            .into_iter()
            .map(|b| {
                let mut v: Vec<Label> = b.into_iter().map(|i| Label::from_index(i, n)).collect();
                v.sort();
                v
            })
            .collect();
        canon.sort();
        Self { n, blocks: canon }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<Label>] {
        &self.blocks
    }

    /// Block index of every label, by label index.
    pub fn block_of(&self) -> Vec<usize> {
        let mut out = vec![0; 2 * self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &l in block {
                out[l.index(self.n)] = b;
            }
        }
        out
    }

    /// Every block is a union of pairs of `f`.
    pub fn is_stable_under(&self, f: &Pairing) -> bool {
        let of = self.block_of();
        (0..2 * self.n).all(|x| of[x] == of[f.image[x]])
    }

    /// Half types of the blocks, as a partition.
    pub fn half_type(&self) -> Partition {
        Partition::new(self.blocks.iter().map(|b| (b.len() / 2) as u32).collect())
    }

    /// Blocks listed as consecutive `f`-pairs `(f(x) x)` for non-hat `x`,
    /// which is how the blocks of π₁ (with `f₁`) and π₂ (with `f₂`) read
    /// most naturally: `{1̂1̂,1,3̂,4,...}`.
    pub fn notation_by_pairs(&self, f: &Pairing, partner_first: bool) -> String {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let mut items = Vec::new();
                for &l in b.iter().filter(|l| !l.hat) {
                    let partner = f.apply(l);
                    if partner_first {
                        items.push(partner.to_string());
                        items.push(l.to_string());
                    } else {
                        items.push(l.to_string());
                        items.push(partner.to_string());
                    }
                }
                // Blocks without a hat/non-hat f-structure fall back to sorted order.
                if items.len() != b.len() {
                    items = b.iter().map(Label::to_string).collect();
                }
                format!("{{{}}}", items.join(","))
            })
            .collect();
        format!("{{{}}}", blocks.join(";"))
    }
}

impl fmt::Debug for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let items: Vec<String> = b.iter().map(|l| l.to_ascii()).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        write!(f, "{{{}}}", blocks.join(";"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairing(s: &str, n: usize) -> Pairing {
        let p: Pairing = s.parse().unwrap();
        assert_eq!(p.n(), n);
        p
    }

    #[test]
    fn label_order_and_parsing() {
        assert!(Label::plain(1) < Label::hat(1));
        assert!(Label::hat(1) < Label::plain(2));
        assert_eq!("3^".parse::<Label>().unwrap(), Label::hat(3));
        assert_eq!("3\u{302}".parse::<Label>().unwrap(), Label::hat(3));
        assert_eq!("12".parse::<Label>().unwrap(), Label::plain(12));
        assert!("0".parse::<Label>().is_err());
        assert_eq!(Label::hat(11).to_string(), "11\u{302}");
    }

    #[test]
    fn canonical_pairings_for_n2() {
        let f1 = Pairing::canonical_f1(2);
        let f2 = Pairing::canonical_f2(2);
        assert_eq!(f1.cycle_notation_ascii(), "(1 2^)(1^ 2)");
        assert_eq!(f2.cycle_notation_ascii(), "(1 1^)(2 2^)");
    }

    #[test]
    fn f1_after_f2_is_two_n_cycles() {
        for n in 1..=8 {
            let f1 = Pairing::canonical_f1(n);
            let f2 = Pairing::canonical_f2(n);
            let prod = compose(f1.image(), f2.image());
            assert_eq!(cycle_type(&prod), vec![n as u32, n as u32]);
            // (1 2 ... n): f1(f2(i)) = i + 1.
            for i in 1..n as u32 {
                let img = Label::from_index(prod[Label::plain(i).index(n)], n);
                assert_eq!(img, Label::plain(i + 1));
            }
        }
        let n = 3;
        let prod = compose(Pairing::canonical_f1(n).image(), Pairing::canonical_f2(n).image());
        // (3̂ 2̂ 1̂): n̂ -> (n-1)̂
        assert_eq!(Label::from_index(prod[Label::hat(3).index(n)], n), Label::hat(2));
        assert_eq!(Label::from_index(prod[Label::hat(1).index(n)], n), Label::hat(3));
    }

    #[test]
    fn half_cycle_type_examples() {
        let f1 = Pairing::canonical_f1(2);
        let f2 = Pairing::canonical_f2(2);
        assert_eq!(half_cycle_type(&f2, &f1).unwrap(), Partition::single(2));
        for n in 1..=5 {
            let f = Pairing::canonical_f1(n);
            assert_eq!(half_cycle_type(&f, &f).unwrap(), Partition::ones(n as u32));
        }
        let g = pairing("(1 2)(1^ 2^)", 2);
        assert_eq!(half_cycle_type(&g, &f1).unwrap(), Partition::single(2));
        let prod = compose(g.image(), f1.image());
        // (1 1̂)(2 2̂)
        assert_eq!(prod[Label::plain(1).index(2)], Label::hat(1).index(2));
    }

    #[test]
    fn halving_rejects_odd_multiplicities() {
        assert!(halve_cycle_type(&[3, 1]).is_none());
        assert_eq!(halve_cycle_type(&[2, 2, 1, 1]), Some("2,1".parse().unwrap()));
    }

    #[test]
    fn r_statistic_examples() {
        assert_eq!(r_statistic(&Pairing::canonical_f2(3)), 0);
        assert_eq!(r_statistic(&Pairing::canonical_f1(3)), 0);
        assert_eq!(r_statistic(&pairing("(1 2)(1^ 2^)", 2)), 1);
    }

    #[test]
    fn pairing_parse_rejects_bad_input() {
        assert!("(1 2)(1^ 1^)".parse::<Pairing>().is_err());
        assert!("(1 2 3)".parse::<Pairing>().is_err());
        assert!("(1 2)".parse::<Pairing>().is_err());
        assert!(Pairing::from_image(1, vec![0, 1]).is_err());
    }

    #[test]
    fn set_partition_validation_and_canonical_order() {
        let a = SetPartition::new(
            1,
            vec![vec![Label::hat(1), Label::plain(1)]],
        )
        .unwrap();
        assert_eq!(a.blocks()[0], vec![Label::plain(1), Label::hat(1)]);
        assert!(SetPartition::new(1, vec![vec![Label::plain(1)]]).is_err());
        assert!(SetPartition::new(1, vec![vec![Label::plain(1), Label::plain(1), Label::hat(1)]]).is_err());
        assert!(a.is_stable_under(&Pairing::canonical_f2(1)));
    }
}
