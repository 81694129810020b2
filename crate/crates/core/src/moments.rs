//! Exact and Monte Carlo evaluation of `E[tr((XUYUᵗ)ⁿ)]` and
//! `E[tr((XUYU*)ⁿ)]` for concrete matrices.

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{complex_expansion, real_expansion, real_expansion_strict, DiscrepancyEntry, OracleBounds};
use crate::error::{Error, Result};
use crate::exact::{factorial, ExactRational};
use crate::oracle::{b_from_l, l_table_bounded, PAIRING_MAX_N};
use crate::symfun::{MonomialExpansion, PowerSumExpansion};

/// Tolerance for the symmetric / hermitian check on dense input.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Independent Monte Carlo streams; fixed so results do not depend on the
/// thread count.
pub const MC_SHARDS: u64 = 64;

/// A dense entry: a real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> Complex64 {
        match self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// An `m × m` matrix given by its eigenvalues or by its entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Eigs { dim: usize, eigs: Vec<ExactRational> },
    Entries { dim: usize, entries: Vec<Vec<Entry>> },
}

impl MatrixSpec {
    pub fn identity(dim: usize) -> Self {
        MatrixSpec::Eigs {
            dim,
            eigs: vec![ExactRational::one(); dim],
        }
    }

    pub fn diagonal(eigs: Vec<ExactRational>) -> Self {
        MatrixSpec::Eigs { dim: eigs.len(), eigs }
    }

    pub fn dim(&self) -> usize {
        match self {
            MatrixSpec::Eigs { dim, .. } | MatrixSpec::Entries { dim, .. } => *dim,
        }
    }

    /// Eigenvalues, for the exact layer.
    pub fn eigenvalues(&self) -> Result<&[ExactRational]> {
        match self {
            MatrixSpec::Eigs { dim, eigs } if eigs.len() == *dim => Ok(eigs),
            MatrixSpec::Eigs { dim, eigs } => Err(Error::Invalid(format!(
                "{} eigenvalues given for dimension {dim}",
                eigs.len()
            ))),
            MatrixSpec::Entries { .. } => Err(Error::Invalid("exact evaluation needs eigenvalue input".into())),
        }
    }

    /// Dense complex form; entries must be hermitian up to tolerance.
    pub fn dense(&self) -> Result<Dense<Complex64>> {
        let m = self.dim();
        match self {
            MatrixSpec::Eigs { eigs, .. } => {
                self.eigenvalues()?;
                let mut d = Dense::zeros(m);
                for (i, e) in eigs.iter().enumerate() {
                    d.set(i, i, Complex64::new(e.to_f64(), 0.0));
                }
                Ok(d)
            }
            MatrixSpec::Entries { entries, .. } => {
                if entries.len() != m || entries.iter().any(|row| row.len() != m) {
                    return Err(Error::Invalid(format!("entries are not {m} x {m}")));
                }
                let mut d = Dense::zeros(m);
                for (i, row) in entries.iter().enumerate() {
                    for (j, e) in row.iter().enumerate() {
                        d.set(i, j, e.value());
                    }
                }
                for i in 0..m {
                    for j in 0..m {
                        if (d.get(i, j) - d.get(j, i).conj()).norm() > SYMMETRY_TOLERANCE {
                            return Err(Error::Invalid(format!("matrix is not hermitian at ({i}, {j})")));
                        }
                    }
                }
                Ok(d)
            }
        }
    }

    /// Dense real form; entries must be real and symmetric.
    pub fn dense_real(&self) -> Result<Dense<f64>> {
        let d = self.dense()?;
        if d.data.iter().any(|z| z.im.abs() > SYMMETRY_TOLERANCE) {
            return Err(Error::Invalid("real moment needs a real symmetric matrix".into()));
        }
        Ok(Dense {
            m: d.m,
            data: d.data.iter().map(|z| z.re).collect(),
        })
    }
}

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense<T> {
    m: usize,
    data: Vec<T>,
}

impl<T: Copy + Zero + One + std::ops::Mul<Output = T>> Dense<T> {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            data: vec![T::zero(); m * m],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.m + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.m + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.m;
        let mut out = Self::zeros(m);
        for i in 0..m {
            for k in 0..m {
                let a = self.data[i * m + k];
                for j in 0..m {
                    out.data[i * m + j] = out.data[i * m + j] + a * other.data[k * m + j];
                }
            }
        }
        out
    }

    pub fn trace_of_power(&self, n: u32) -> T {
        let mut p = self.clone();
        for _ in 1..n {
            p = p.mul(self);
        }
        (0..self.m).fold(T::zero(), |acc, i| acc + p.get(i, i))
    }
}

/// `E[tr((XUYUᵗ)ⁿ)]` with both routes available at `n`.
#[derive(Debug, Clone)]
pub struct RealMoment {
    pub n: u32,
    pub expansion: MonomialExpansion,
    /// `Σ b_{λ,μ} p_λ p_μ / (2ⁿ n!)`, when the pairing oracle reaches `n`.
    pub power_sums: Option<PowerSumExpansion>,
    pub report: Vec<DiscrepancyEntry>,
}

fn power_sum_series(n: u32) -> Result<PowerSumExpansion> {
    let b = b_from_l(&l_table_bounded(n as usize, PAIRING_MAX_N)?);
    let norm = ExactRational::from_integer(factorial(n as u64) * (num_bigint::BigInt::from(1) << n));
    let mut s = PowerSumExpansion::new(n);
    for ((lambda, mu), v) in b {
        s.add_term(lambda, mu, ExactRational::from(v).checked_div(&norm)?)?;
    }
    Ok(s)
}

impl RealMoment {
    /// Oracle-substituted expansion; flagged strata are listed in `report`.
    pub fn new(n: u32, bounds: OracleBounds) -> Result<Self> {
        let e = real_expansion(n, bounds)?;
        let power_sums = if (n as usize) <= bounds.pairing_max_n.min(PAIRING_MAX_N) {
            Some(power_sum_series(n)?)
        } else {
            None
        };
        Ok(Self {
            n,
            expansion: e.expansion,
            power_sums,
            report: e.report,
        })
    }

    /// Formula-only expansion; fails listing the flagged strata if any.
    pub fn strict(n: u32) -> Result<Self> {
        let expansion = real_expansion_strict(n).map_err(|flagged| Error::DegenerateStrata {
            count: flagged.len(),
            detail: flagged
                .iter()
                .map(|e| format!("lambda={} mu={} r={} A={}", e.lambda, e.mu, e.r, e.a))
                .collect::<Vec<_>>()
                .join(", "),
        })?;
        let power_sums = if (n as usize) <= PAIRING_MAX_N {
            Some(power_sum_series(n)?)
        } else {
            None
        };
        Ok(Self {
            n,
            expansion,
            power_sums,
            report: Vec::new(),
        })
    }

    /// Exact value at eigenvalue lists; both routes must agree when both exist.
    pub fn evaluate(&self, x: &[ExactRational], y: &[ExactRational]) -> Result<ExactRational> {
        let v = self.expansion.evaluate(x, y);
        if let Some(ps) = &self.power_sums {
            let w = ps.evaluate(x, y);
            if w != v {
                return Err(Error::CrossCheck(format!(
                    "monomial route gives {v}, power-sum route gives {w} at n = {}",
                    self.n
                )));
            }
        }
        Ok(v)
    }
}

pub fn moment_real_exact(n: u32, x: &MatrixSpec, y: &MatrixSpec) -> Result<ExactRational> {
    RealMoment::new(n, OracleBounds::default())?.evaluate(x.eigenvalues()?, y.eigenvalues()?)
}

pub fn moment_complex_exact(n: u32, x: &MatrixSpec, y: &MatrixSpec) -> Result<ExactRational> {
    Ok(complex_expansion(n).evaluate(x.eigenvalues()?, y.eigenvalues()?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub n: u32,
    pub m: usize,
}

/// Monte Carlo output with the exact value when known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCReport {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<ExactRational>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub z_score: Option<f64>,
}

impl MCReport {
    pub fn new(est: &MCEstimate, exact: Option<ExactRational>) -> Self {
        let z_score = exact.as_ref().map(|e| (est.mean - e.to_f64()) / est.std_error);
        Self {
            mean: est.mean,
            std_error: est.std_error,
            samples: est.samples,
            seed: est.seed,
            exact,
            z_score,
        }
    }
}

/// Running mean and sum of squared deviations.
#[derive(Clone, Copy, Default)]
struct Welford {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Self) -> Self {
        if o.count == 0 {
            return self;
        }
        if self.count == 0 {
            return o;
        }
        let count = self.count + o.count;
        let d = o.mean - self.mean;
        Self {
            count,
            mean: self.mean + d * o.count as f64 / count as f64,
            m2: self.m2 + o.m2 + d * d * (self.count as f64 * o.count as f64) / count as f64,
        }
    }
}

fn sharded_estimate(
    n: u32,
    m: usize,
    samples: u64,
    seed: u64,
    sample: impl Fn(&mut ChaCha8Rng) -> f64 + Sync,
) -> Result<MCEstimate> {
    if samples < 2 {
        return Err(Error::Invalid("Monte Carlo needs at least two samples".into()));
    }
    let parts: Vec<Welford> = (0..MC_SHARDS)
        .into_par_iter()
        .map(|s| {
            let count = samples / MC_SHARDS + u64::from(s < samples % MC_SHARDS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let mut w = Welford::default();
            for _ in 0..count {
                w.push(sample(&mut rng));
            }
            w
        })
        .collect();
    let total = parts.into_iter().fold(Welford::default(), Welford::merge);
    let var = total.m2 / (total.count - 1) as f64;
    Ok(MCEstimate {
        mean: total.mean,
        std_error: (var / total.count as f64).sqrt(),
        samples,
        seed,
        n,
        m,
    })
}

fn check_dims(x: &MatrixSpec, y: &MatrixSpec) -> Result<usize> {
    if x.dim() != y.dim() || x.dim() == 0 {
        return Err(Error::Invalid(format!("dimensions {} and {} differ", x.dim(), y.dim())));
    }
    Ok(x.dim())
}

/// `U` has i.i.d. `N(0, 1)` entries.
pub fn mc_moment_real(n: u32, x: &MatrixSpec, y: &MatrixSpec, samples: u64, seed: u64) -> Result<MCEstimate> {
    let m = check_dims(x, y)?;
    let (xd, yd) = (x.dense_real()?, y.dense_real()?);
    sharded_estimate(n, m, samples, seed, |rng| {
        let mut u = Dense::zeros(m);
        let mut ut = Dense::zeros(m);
        for i in 0..m {
            for j in 0..m {
                let g: f64 = StandardNormal.sample(rng);
                u.set(i, j, g);
                ut.set(j, i, g);
            }
        }
        xd.mul(&u).mul(&yd).mul(&ut).trace_of_power(n)
    })
}

/// `U` has i.i.d. complex entries with real and imaginary parts `N(0, 1/2)`.
pub fn mc_moment_complex(n: u32, x: &MatrixSpec, y: &MatrixSpec, samples: u64, seed: u64) -> Result<MCEstimate> {
    let m = check_dims(x, y)?;
    let (xd, yd) = (x.dense()?, y.dense()?);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    sharded_estimate(n, m, samples, seed, |rng| {
        let mut u = Dense::zeros(m);
        let mut us = Dense::zeros(m);
        for i in 0..m {
            for j in 0..m {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                let g = Complex64::new(re * scale, im * scale);
                u.set(i, j, g);
                us.set(j, i, g.conj());
            }
        }
        xd.mul(&u).mul(&yd).mul(&us).trace_of_power(n).re
    })
}
