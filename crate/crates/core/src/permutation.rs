//! Row permutations, permutation plans and permutation distributions.
//!
//! A plan never materialises its permutations. Permutation `k` of a sampled
//! plan is a Fisher-Yates shuffle driven by its own derived stream, and
//! permutation `k` of an exhaustive plan is the `k`-th in lexicographic order.
//! Either way it is a pure function of `(plan, k)`, so distributions can be
//! evaluated in parallel without affecting the result.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, Series, Tail};
use crate::rng;

/// Largest `n` accepted for exhaustive enumeration (`8! = 40320`).
pub const MAX_EXHAUSTIVE_N: usize = 8;

/// A bijection of `{0, .., n-1}`; entry `i` is the source row placed at row `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        let n = indices.len();
        let mut seen = vec![false; n];
        for &i in &indices {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPermutation(format!(
                    "{indices:?} is not a bijection of 0..{n}"
                )));
            }
        }
        Ok(Self(indices))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationMode {
    #[default]
    Sampled,
    Exhaustive,
}

/// The randomization scheme of a single test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermutationPlan {
    pub n: usize,
    /// Number of random draws (ignored in exhaustive mode).
    pub count: usize,
    pub seed: u64,
    pub mode: PermutationMode,
    /// Append the identity to a sampled plan.
    pub include_identity: bool,
}

pub fn draw_plan(n: usize, count: usize, seed: u64, mode: PermutationMode) -> Result<PermutationPlan> {
    if n == 0 {
        return Err(Error::EmptyInput("cannot permute zero rows".into()));
    }
    match mode {
        PermutationMode::Exhaustive if n > MAX_EXHAUSTIVE_N => Err(Error::ExhaustiveTooLarge { n }),
        PermutationMode::Sampled if count == 0 => {
            Err(Error::InvalidConfig("permutations must be at least 1".into()))
        }
        _ => Ok(PermutationPlan {
            n,
            count,
            seed,
            mode,
            include_identity: true,
        }),
    }
}

impl PermutationPlan {
    pub fn with_identity(mut self, include: bool) -> Self {
        self.include_identity = include;
        self
    }

    /// Number of permutations the plan yields.
    pub fn len(&self) -> usize {
        match self.mode {
            PermutationMode::Exhaustive => factorial(self.n),
            PermutationMode::Sampled => self.count + usize::from(self.include_identity),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether the identity arrangement is guaranteed to be among the yielded permutations.
    pub fn contains_identity(&self) -> bool {
        self.mode == PermutationMode::Exhaustive || self.include_identity
    }

    /// Writes permutation `k` into `out` (length `n`).
    pub fn fill(&self, k: usize, out: &mut [usize]) {
        debug_assert!(k < self.len());
        match self.mode {
            PermutationMode::Exhaustive => unrank(k, out),
            PermutationMode::Sampled if k == self.count => {
                out.iter_mut().enumerate().for_each(|(i, v)| *v = i);
            }
            PermutationMode::Sampled => {
                out.iter_mut().enumerate().for_each(|(i, v)| *v = i);
                let mut stream = rng::stream(rng::derive(self.seed, &[rng::PERM_INDEX, k as u64]));
                out.shuffle(&mut stream);
            }
        }
    }

    pub fn get(&self, k: usize) -> Permutation {
        let mut out = vec![0; self.n];
        self.fill(k, &mut out);
        Permutation(out)
    }

    pub fn iter(&self) -> impl Iterator<Item = Permutation> + '_ {
        (0..self.len()).map(move |k| self.get(k))
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// `k`-th permutation of `0..out.len()` in lexicographic order.
fn unrank(mut k: usize, out: &mut [usize]) {
    let n = out.len();
    let mut pool: Vec<usize> = (0..n).collect();
    for (i, slot) in out.iter_mut().enumerate() {
        let f = factorial(n - 1 - i);
        *slot = pool.remove(k / f);
        k %= f;
    }
}

/// All `n!` permutations of `0..n` in lexicographic order.
pub fn enumerate_permutations(n: usize) -> Result<Vec<Permutation>> {
    if n > MAX_EXHAUSTIVE_N {
        return Err(Error::ExhaustiveTooLarge { n });
    }
    Ok((0..factorial(n))
        .map(|k| {
            let mut out = vec![0; n];
            unrank(k, &mut out);
            Permutation(out)
        })
        .collect())
}

/// Data that a row permutation acts on.
pub trait Permutable: Sized {
    fn rows(&self) -> usize;
    fn permuted(&self, perm: &Permutation) -> Result<Self>;
}

fn check_length(perm: &Permutation, n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "permutation of length {} applied to {n} rows",
            perm.len()
        )));
    }
    Ok(())
}

impl Permutable for Dataset {
    fn rows(&self) -> usize {
        self.n()
    }

    /// Rearranges covariate rows; the response is untouched.
    fn permuted(&self, perm: &Permutation) -> Result<Self> {
        check_length(perm, self.n())?;
        let x = self.x().select_rows(perm.as_slice());
        Ok(Dataset::from_parts_unchecked(self.y().clone(), x))
    }
}

impl Permutable for Series {
    fn rows(&self) -> usize {
        self.len()
    }

    fn permuted(&self, perm: &Permutation) -> Result<Self> {
        check_length(perm, self.len())?;
        let v = self.values();
        Ok(Series::from_vec_unchecked(perm.as_slice().iter().map(|&i| v[i]).collect()))
    }
}

/// Row `i` of the result is row `perm[i]` of the input covariates.
pub fn permute_covariates(data: &Dataset, perm: &Permutation) -> Result<Dataset> {
    data.permuted(perm)
}

/// Statistic values over a plan, with the value on the observed arrangement.
#[derive(Debug, Clone, PartialEq)]
pub struct PermDistribution {
    pub samples: Vec<f64>,
    pub observed: f64,
    /// Whether the samples contain the identity arrangement.
    pub includes_identity: bool,
}

/// Evaluates `f` on every permutation of the plan, in parallel, in plan order.
/// Errors are tagged with the permutation index.
pub fn map_permutations<F>(plan: &PermutationPlan, f: F) -> Result<Vec<f64>>
where
    F: Fn(&[usize]) -> Result<f64> + Sync,
{
    (0..plan.len())
        .into_par_iter()
        .map_init(
            || vec![0usize; plan.n],
            |buf, k| {
                plan.fill(k, buf);
                f(buf).map_err(|e| Error::at_permutation(k, e))
            },
        )
        .collect()
}

/// Permutation distribution of `statistic` over permuted copies of `data`.
pub fn perm_distribution<D, F>(data: &D, statistic: F, plan: &PermutationPlan) -> Result<PermDistribution>
where
    D: Permutable + Sync,
    F: Fn(&D) -> Result<f64> + Sync,
{
    if plan.n != data.rows() {
        return Err(Error::InvalidPermutation(format!(
            "plan for {} rows applied to {} rows",
            plan.n,
            data.rows()
        )));
    }
    let observed = statistic(data)?;
    let samples = map_permutations(plan, |perm| {
        let p = Permutation(perm.to_vec());
        statistic(&data.permuted(&p)?)
    })?;
    finish(samples, observed, plan)
}

pub(crate) fn finish(samples: Vec<f64>, observed: f64, plan: &PermutationPlan) -> Result<PermDistribution> {
    if let Some(k) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::at_permutation(
            k,
            Error::NonFiniteValue {
                location: "permutation statistic".into(),
            },
        ));
    }
    Ok(PermDistribution {
        samples,
        observed,
        includes_identity: plan.contains_identity(),
    })
}

/// Add-one p-value; ties count against the null.
pub fn p_value(dist: &PermDistribution, tail: Tail) -> f64 {
    let key = |v: f64| match tail {
        Tail::Upper => v,
        Tail::TwoSided => v.abs(),
    };
    let obs = key(dist.observed);
    let hits = dist.samples.iter().filter(|&&v| key(v) >= obs).count();
    let m = dist.samples.len();
    if dist.includes_identity {
        hits as f64 / m as f64
    } else {
        (1 + hits) as f64 / (m + 1) as f64
    }
}

/// Exact conditional mean and variance of the trend statistic when the series
/// is uniformly permuted: `(0, (n+1)/(12 n^2) sum (Y_i - Ybar)^2)`.
pub fn trend_conditional_moments(series: &Series) -> (f64, f64) {
    let n = series.len() as f64;
    let mean = series.mean();
    let ss: f64 = series.values().iter().map(|v| (v - mean).powi(2)).sum();
    (0.0, (n + 1.0) / (12.0 * n * n) * ss)
}
