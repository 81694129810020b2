//! Integer-array strata `A = (P, P', Q, Q')` with the seed block `(i₀, j₀)`,
//! and enumeration of the admissible sets `M^r_{λ,μ}`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::factorial;
use crate::partition::Partition;

/// Sparse array `(i, j) → count`; zero counts are never stored.
pub type Cells = BTreeMap<(u32, u32), u32>;

/// Which of the four arrays a cell belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArrayKind {
    P,
    PPrime,
    Q,
    QPrime,
}

impl ArrayKind {
    /// Largest loop count `j` whose binomial weight is non-zero for degree `i`.
    /// Non-root cells need `2j ≤ i-1`, root cells `1 ≤ j` and `2j-1 ≤ i-1`.
    pub fn j_range(self, i: u32) -> std::ops::RangeInclusive<u32> {
        match self {
            ArrayKind::P | ArrayKind::Q => 0..=(i.saturating_sub(1) / 2),
            ArrayKind::PPrime | ArrayKind::QPrime => 1..=(i / 2),
        }
    }
}

/// A stratum of the closed formula.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArrayTuple {
    pub p: Cells,
    pub p_prime: Cells,
    pub q: Cells,
    pub q_prime: Cells,
    pub i0: u32,
    pub j0: u32,
}

fn total(cells: &Cells) -> u32 {
    cells.values().sum()
}

fn weight(cells: &Cells) -> u32 {
    cells.iter().map(|(&(_, j), &c)| j * c).sum()
}

fn bump(cells: &mut Cells, i: u32, j: u32) {
    *cells.entry((i, j)).or_insert(0) += 1;
}

impl ArrayTuple {
    pub fn new(p: Cells, p_prime: Cells, q: Cells, q_prime: Cells, i0: u32, j0: u32) -> Self {
        let clean = |mut c: Cells| {
            c.retain(|_, v| *v > 0);
            c
        };
        Self {
            p: clean(p),
            p_prime: clean(p_prime),
            q: clean(q),
            q_prime: clean(q_prime),
            i0,
            j0,
        }
    }

    pub fn cells(&self, kind: ArrayKind) -> &Cells {
        match kind {
            ArrayKind::P => &self.p,
            ArrayKind::PPrime => &self.p_prime,
            ArrayKind::Q => &self.q,
            ArrayKind::QPrime => &self.q_prime,
        }
    }

    pub fn cells_mut(&mut self, kind: ArrayKind) -> &mut Cells {
        match kind {
            ArrayKind::P => &mut self.p,
            ArrayKind::PPrime => &mut self.p_prime,
            ArrayKind::Q => &mut self.q,
            ArrayKind::QPrime => &mut self.q_prime,
        }
    }

    /// Adds one vertex of degree `i` with `j` loops to the given array.
    pub fn add(&mut self, kind: ArrayKind, i: u32, j: u32) {
        bump(self.cells_mut(kind), i, j);
    }

    /// `p = |P|` (the seed block is not counted).
    pub fn p_count(&self) -> u32 {
        total(&self.p)
    }

    pub fn p_prime_count(&self) -> u32 {
        total(&self.p_prime)
    }

    pub fn q_count(&self) -> u32 {
        total(&self.q)
    }

    pub fn q_prime_count(&self) -> u32 {
        total(&self.q_prime)
    }

    /// `r = Σ j (Q + Q')_{ij}`.
    pub fn r(&self) -> u32 {
        weight(&self.q) + weight(&self.q_prime)
    }

    /// `j₀ + Σ j (P + P')_{ij}`; equals [`Self::r`] on consistent tuples.
    pub fn white_r(&self) -> u32 {
        self.j0 + weight(&self.p) + weight(&self.p_prime)
    }

    /// White degree distribution: `i₀` together with the `P`, `P'` rows.
    pub fn lambda(&self) -> Partition {
        let mut parts = vec![self.i0];
        for cells in [&self.p, &self.p_prime] {
            for (&(i, _), &c) in cells {
                parts.extend(std::iter::repeat_n(i, c as usize));
            }
        }
        Partition::new(parts)
    }

    /// Black degree distribution from the `Q`, `Q'` rows.
    pub fn mu(&self) -> Partition {
        let mut parts = Vec::new();
        for cells in [&self.q, &self.q_prime] {
            for (&(i, _), &c) in cells {
                parts.extend(std::iter::repeat_n(i, c as usize));
            }
        }
        Partition::new(parts)
    }

    /// `A! = Π P_{ij}! P'_{ij}! Q_{ij}! Q'_{ij}!`.
    pub fn factorial(&self) -> BigInt {
        [&self.p, &self.p_prime, &self.q, &self.q_prime]
            .into_iter()
            .flat_map(|c| c.values())
            .map(|&v| factorial(v as u64))
            .product()
    }

    /// Structural problems; empty for a tuple that can index a stratum.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.i0 == 0 {
            out.push("i0 must be positive".to_string());
        }
        if 2 * self.j0 > self.i0 {
            out.push(format!("seed block of half size {} cannot hold {} loops", self.i0, self.j0));
        }
        if self.r() != self.white_r() {
            out.push(format!(
                "black loop count {} differs from white loop count {}",
                self.r(),
                self.white_r()
            ));
        }
        for kind in [ArrayKind::P, ArrayKind::PPrime, ArrayKind::Q, ArrayKind::QPrime] {
            for &(i, j) in self.cells(kind).keys() {
                if i == 0 || !kind.j_range(i).contains(&j) {
                    out.push(format!("{kind:?} cell ({i},{j}) has zero weight"));
                }
            }
        }
        if self.lambda().size() != self.mu().size() {
            out.push(format!(
                "white degree total {} differs from black degree total {}",
                self.lambda().size(),
                self.mu().size()
            ));
        }
        out
    }

    pub fn seed_only(i0: u32, j0: u32) -> Self {
        Self {
            i0,
            j0,
            ..Self::default()
        }
    }
}

fn fmt_cells(cells: &Cells) -> String {
    if cells.is_empty() {
        return "0".to_string();
    }
    cells
        .iter()
        .rev()
        .map(|(&(i, j), &c)| {
            if c == 1 {
                format!("E{i},{j}")
            } else {
                format!("{c}E{i},{j}")
            }
        })
        .collect::<Vec<_>>()
        .join("+")
}

fn parse_cells(s: &str) -> Result<Cells> {
    let s = s.trim();
    let mut cells = Cells::new();
    if s == "0" || s.is_empty() {
        return Ok(cells);
    }
    for term in s.split('+') {
        let term = term.trim();
        let (count, rest) = match term.find('E') {
            Some(0) => (1, &term[1..]),
            Some(k) => (
                term[..k]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad multiplicity in `{term}`")))?,
                &term[k + 1..],
            ),
            None => return Err(Error::Parse(format!("expected E<i>,<j> in `{term}`"))),
        };
        let (i, j) = rest
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected E<i>,<j> in `{term}`")))?;
        let i: u32 = i.trim().parse().map_err(|_| Error::Parse(format!("bad index in `{term}`")))?;
        let j: u32 = j.trim().parse().map_err(|_| Error::Parse(format!("bad index in `{term}`")))?;
        if count > 0 {
            *cells.entry((i, j)).or_insert(0) += count;
        }
    }
    Ok(cells)
}

impl fmt::Display for ArrayTuple {
    /// `P:E3,1+E2,0|P':E3,1|Q:E5,1+E4,1|Q':E3,1|i0=4|j0=1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P:{}|P':{}|Q:{}|Q':{}|i0={}|j0={}",
            fmt_cells(&self.p),
            fmt_cells(&self.p_prime),
            fmt_cells(&self.q),
            fmt_cells(&self.q_prime),
            self.i0,
            self.j0
        )
    }
}

impl fmt::Debug for ArrayTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for ArrayTuple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut a = ArrayTuple::default();
        let mut seen = [false; 6];
        for field in s.split('|') {
            let field = field.trim();
            if let Some(rest) = field.strip_prefix("P':") {
                a.p_prime = parse_cells(rest)?;
                seen[1] = true;
            } else if let Some(rest) = field.strip_prefix("P:") {
                a.p = parse_cells(rest)?;
                seen[0] = true;
            } else if let Some(rest) = field.strip_prefix("Q':") {
                a.q_prime = parse_cells(rest)?;
                seen[3] = true;
            } else if let Some(rest) = field.strip_prefix("Q:") {
                a.q = parse_cells(rest)?;
                seen[2] = true;
            } else if let Some(rest) = field.strip_prefix("i0=") {
                a.i0 = rest.parse().map_err(|_| Error::Parse(format!("bad i0 `{rest}`")))?;
                seen[4] = true;
            } else if let Some(rest) = field.strip_prefix("j0=") {
                a.j0 = rest.parse().map_err(|_| Error::Parse(format!("bad j0 `{rest}`")))?;
                seen[5] = true;
            } else {
                return Err(Error::Parse(format!("unknown array field `{field}`")));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Parse(format!("array tuple `{s}` is missing a field")));
        }
        Ok(a)
    }
}

impl Serialize for ArrayTuple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ArrayTuple {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Every way to spread the vertex multiplicities `rows` (degree `i`, count)
/// over the cells of `non_root` and `root` arrays with total loop weight
/// exactly `budget`. `budget = None` removes the weight constraint.
pub(crate) fn distribute(
    rows: &[(u32, u32)],
    non_root: ArrayKind,
    root: ArrayKind,
    budget: Option<u32>,
) -> Vec<(Cells, Cells)> {
    let mut out = Vec::new();
    let mut acc = (Cells::new(), Cells::new());
    distribute_rec(rows, non_root, root, budget, &mut acc, &mut out);
    out
}

fn distribute_rec(
    rows: &[(u32, u32)],
    non_root: ArrayKind,
    root: ArrayKind,
    budget: Option<u32>,
    acc: &mut (Cells, Cells),
    out: &mut Vec<(Cells, Cells)>,
) {
    let Some((&(i, count), rest)) = rows.split_first() else {
        if budget.is_none_or(|b| b == 0) {
            out.push(acc.clone());
        }
        return;
    };
    let options: Vec<(bool, u32)> = non_root
        .j_range(i)
        .map(|j| (false, j))
        .chain(root.j_range(i).map(|j| (true, j)))
        .collect();
    // Multisets of size `count` drawn from `options`, as non-increasing
    // option indices.
    fn pick(
        options: &[(bool, u32)],
        i: u32,
        left: u32,
        from: usize,
        budget: Option<u32>,
        k: &mut dyn FnMut(Option<u32>, &mut (Cells, Cells)),
        acc: &mut (Cells, Cells),
    ) {
        if left == 0 {
            k(budget, acc);
            return;
        }
        for idx in from..options.len() {
            let (is_root, j) = options[idx];
            if budget.is_some_and(|b| j > b) {
                continue;
            }
            let cells = if is_root { &mut acc.1 } else { &mut acc.0 };
            bump(cells, i, j);
            pick(options, i, left - 1, idx, budget.map(|b| b - j), k, acc);
            let cells = if is_root { &mut acc.1 } else { &mut acc.0 };
            let e = cells.get_mut(&(i, j)).expect("just inserted");
            *e -= 1;
            if *e == 0 {
                cells.remove(&(i, j));
            }
        }
    }
    let mut cont = |b: Option<u32>, acc: &mut (Cells, Cells)| {
        distribute_rec(rest, non_root, root, b, acc, out);
    };
    pick(&options, i, count, 0, budget, &mut cont, acc);
}

/// Rows `(i, n_i)` of a partition, increasing in `i`.
fn rows_of(lambda: &Partition) -> Vec<(u32, u32)> {
    lambda.multiplicities().into_iter().collect()
}

/// The set `M^r_{λ,μ}`, restricted to cells with non-zero binomial weight,
/// in increasing order.
pub fn enumerate_m(lambda: &Partition, mu: &Partition, r: u32) -> Vec<ArrayTuple> {
    if lambda.size() != mu.size() || lambda.is_empty() {
        return Vec::new();
    }
    let blacks = distribute(&rows_of(mu), ArrayKind::Q, ArrayKind::QPrime, Some(r));
    if blacks.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mults = lambda.multiplicities();
    for &i0 in mults.keys() {
        let mut rest = mults.clone();
        *rest.get_mut(&i0).expect("present") -= 1;
        let rest_rows: Vec<(u32, u32)> = rest.into_iter().filter(|&(_, c)| c > 0).collect();
        for j0 in 0..=(i0 / 2).min(r) {
            for (p, p_prime) in distribute(&rest_rows, ArrayKind::P, ArrayKind::PPrime, Some(r - j0)) {
                for (q, q_prime) in &blacks {
                    out.push(ArrayTuple::new(
                        p.clone(),
                        p_prime.clone(),
                        q.clone(),
                        q_prime.clone(),
                        i0,
                        j0,
                    ));
                }
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::partitions_of;

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn tuple(s: &str) -> ArrayTuple {
        s.parse().unwrap()
    }

    #[test]
    fn display_parse_round_trip() {
        let s = "P:E3,1+E2,0|P':E3,1|Q:E5,1+E4,1|Q':E3,1|i0=4|j0=1";
        let a = tuple(s);
        assert_eq!(a.to_string(), s);
        assert_eq!(a.p_count(), 2);
        assert_eq!(a.r(), 3);
        assert_eq!(a.white_r(), 3);
        assert_eq!(a.lambda(), part("4,3,3,2"));
        assert_eq!(a.mu(), part("5,4,3"));
        assert!(a.violations().is_empty());
        let b = tuple("P:0|P':0|Q:2E1,0|Q':0|i0=1|j0=0");
        assert_eq!(b.q_count(), 2);
        assert_eq!(b.to_string(), "P:0|P':0|Q:2E1,0|Q':0|i0=1|j0=0");
        assert!("P:0|Q:0".parse::<ArrayTuple>().is_err());
    }

    #[test]
    fn serde_is_the_string_form() {
        let a = tuple("P:0|P':0|Q:0|Q':E2,1|i0=2|j0=1");
        let js = serde_json::to_string(&a).unwrap();
        assert_eq!(js, "\"P:0|P':0|Q:0|Q':E2,1|i0=2|j0=1\"");
        assert_eq!(serde_json::from_str::<ArrayTuple>(&js).unwrap(), a);
    }

    #[test]
    fn small_m_sets() {
        let one = part("1");
        assert_eq!(enumerate_m(&one, &one, 0), vec![tuple("P:0|P':0|Q:E1,0|Q':0|i0=1|j0=0")]);
        let two = part("2");
        assert_eq!(enumerate_m(&two, &two, 1), vec![tuple("P:0|P':0|Q:0|Q':E2,1|i0=2|j0=1")]);
        assert_eq!(enumerate_m(&two, &two, 0), vec![tuple("P:0|P':0|Q:E2,0|Q':0|i0=2|j0=0")]);
        assert!(enumerate_m(&one, &one, 1).is_empty());
    }

    #[test]
    fn tuples_reproduce_their_indices() {
        for n in 1..=6 {
            for lambda in partitions_of(n) {
                for mu in partitions_of(n) {
                    for r in 0..=n / 2 {
                        let set = enumerate_m(&lambda, &mu, r);
                        let mut dedup = set.clone();
                        dedup.dedup();
                        assert_eq!(dedup.len(), set.len());
                        for a in set {
                            assert_eq!(a.lambda(), lambda);
                            assert_eq!(a.mu(), mu);
                            assert_eq!(a.r(), r);
                            assert!(a.violations().is_empty(), "{a}: {:?}", a.violations());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unconstrained_distribution_counts() {
        // Degree 2: Q(2,0) or Q'(2,1); two vertices give 3 multisets.
        assert_eq!(distribute(&[(2, 2)], ArrayKind::Q, ArrayKind::QPrime, None).len(), 3);
        assert_eq!(distribute(&[(2, 2)], ArrayKind::Q, ArrayKind::QPrime, Some(1)).len(), 1);
    }
}
