//! Permutation matrix-averages `Ave_π max_i |x_i y_{iπ(i)}|`.
//!
//! * [`exact_average`] enumerates all `n!` permutations in minimal-change
//!   (adjacent transposition) order, split into blocks by the columns taken
//!   by the first rows.
//! * [`mc_average`] samples uniform permutations; trial `t` draws from a
//!   ChaCha stream keyed by `(seed, t)` only, so the estimate does not depend
//!   on how trials are scheduled.
//! * [`ks_bounds`] is the rearrangement sandwich
//!   `(1/2n) Σ_{k≤n} s(k) ≤ Ave ≤ (1/n) Σ_{k≤n} s(k)`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::par::{self, Execution};
use crate::{Error, Result, WeightMatrix};

/// Largest `n` accepted by [`exact_average`] unless configured otherwise.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 10;

/// Fewest trials accepted by [`mc_average`].
pub const MIN_TRIALS: u64 = 100;

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.576;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
    Bounds,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::MonteCarlo => "mc",
            Method::Bounds => "bounds",
        }
    }
}

/// A value of the matrix-average with its uncertainty.
///
/// `half_width` is zero for exact enumeration, a 99% confidence half-width
/// for Monte-Carlo, and half the width of the sandwich for bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AverageEstimate {
    pub value: f64,
    pub method: Method,
    pub half_width: f64,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

impl AverageEstimate {
    pub fn lower(&self) -> f64 {
        self.value - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.value + self.half_width
    }
}

/// Rearrangement sandwich for the matrix-average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Tunables for [`exact_average_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactConfig {
    pub enumeration_limit: usize,
    pub execution: Execution,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
            execution: Execution::default(),
        }
    }
}

/// Which estimator to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AverageRequest {
    Exact,
    MonteCarlo { trials: u64, seed: u64 },
    Bounds,
}

impl AverageRequest {
    pub fn method(&self) -> Method {
        match self {
            AverageRequest::Exact => Method::Exact,
            AverageRequest::MonteCarlo { .. } => Method::MonteCarlo,
            AverageRequest::Bounds => Method::Bounds,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match *self {
            AverageRequest::MonteCarlo { seed, .. } => Some(seed),
            _ => None,
        }
    }

    pub fn estimate(&self, x: &[f64], y: &WeightMatrix) -> Result<AverageEstimate> {
        match *self {
            AverageRequest::Exact => exact_average(x, y),
            AverageRequest::MonteCarlo { trials, seed } => mc_average(x, y, trials, seed),
            AverageRequest::Bounds => bounds_average(x, y),
        }
    }
}

fn check_vector(x: &[f64]) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) {
        Err(Error::validation("vector entries must be finite"))
    } else {
        Ok(())
    }
}

/// `v_ij = |x_i · y_ij|`.
pub fn product_matrix(x: &[f64], y: &WeightMatrix) -> Result<WeightMatrix> {
    Error::check_len(y.rows(), x.len())?;
    check_vector(x)?;
    let data = y
        .iter_rows()
        .zip(x)
        .flat_map(|(row, &xi)| row.iter().map(move |&v| (xi * v).abs()))
        .collect();
    WeightMatrix::from_flat(y.rows(), y.cols(), data)
}

/// Sum of the `k` largest absolute values.
///
/// Quickselect isolates the top `k`; only those are then sorted, so the sum
/// is accumulated in decreasing order exactly as a full-sort reference would.
pub fn top_k_sum(values: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > values.len() {
        return Err(Error::OutOfRange(format!(
            "k = {k} must lie in 1..={}",
            values.len()
        )));
    }
    check_vector(values)?;
    // bit patterns of nonnegative finite floats order like the floats
    let mut abs: Vec<u64> = values.iter().map(|v| v.abs().to_bits()).collect();
    let desc = |a: &u64, b: &u64| b.cmp(a);
    if k < abs.len() {
        abs.select_nth_unstable_by(k - 1, desc);
    }
    let top = &mut abs[..k];
    top.sort_unstable_by(desc);
    Ok(top.iter().map(|&b| f64::from_bits(b)).sum())
}

/// The sandwich `((1/2n) Σ_{k≤n} s(k), (1/n) Σ_{k≤n} s(k))` where `s` is the
/// decreasing rearrangement of `|x_i y_ij|`.
pub fn ks_bounds(x: &[f64], y: &WeightMatrix) -> Result<KsBounds> {
    y.require_square()?;
    let v = product_matrix(x, y)?;
    let n = y.rows();
    let upper = top_k_sum(v.as_slice(), n)? / n as f64;
    Ok(KsBounds {
        lower: 0.5 * upper,
        upper,
    })
}

/// The sandwich as an [`AverageEstimate`] centred in the interval.
pub fn bounds_average(x: &[f64], y: &WeightMatrix) -> Result<AverageEstimate> {
    let b = ks_bounds(x, y)?;
    Ok(AverageEstimate {
        value: 0.5 * (b.lower + b.upper),
        method: Method::Bounds,
        half_width: 0.5 * (b.upper - b.lower),
        trials: None,
        seed: None,
    })
}

/// Exact average over all `n!` permutations.
pub fn exact_average(x: &[f64], y: &WeightMatrix) -> Result<AverageEstimate> {
    exact_average_with(x, y, &ExactConfig::default())
}

pub fn exact_average_with(x: &[f64], y: &WeightMatrix, cfg: &ExactConfig) -> Result<AverageEstimate> {
    y.require_square()?;
    let n = y.rows();
    if n > cfg.enumeration_limit {
        return Err(Error::TooLarge {
            what: "exact average",
            n,
            limit: cfg.enumeration_limit,
            hint: "; use mc_average instead",
        });
    }
    let v = product_matrix(x, y)?;
    let fixed = match n {
        0..=4 => 1.min(n),
        _ => 2,
    };
    let prefixes = block_prefixes(n, fixed);
    let sums = par::map_slice(cfg.execution, &prefixes, |prefix| block_sum(&v, prefix));
    let mut total = Neumaier::default();
    for s in &sums {
        total.merge(s);
    }
    let count: f64 = (1..=n).map(|k| k as f64).product();
    Ok(AverageEstimate {
        value: total.div(count),
        method: Method::Exact,
        half_width: 0.0,
        trials: None,
        seed: None,
    })
}

/// All injective assignments of columns to the first `fixed` rows, in
/// lexicographic order.
fn block_prefixes(n: usize, fixed: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..fixed {
        let mut next = Vec::with_capacity(out.len() * n);
        for p in &out {
            for c in (0..n).filter(|c| !p.contains(c)) {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Sum of `max_i v_{iπ(i)}` over all permutations extending `prefix`.
fn block_sum(v: &WeightMatrix, prefix: &[usize]) -> Neumaier {
    let n = v.rows();
    let floor = prefix
        .iter()
        .enumerate()
        .map(|(i, &c)| v.get(i, c))
        .fold(0.0, f64::max);
    let offset = prefix.len();
    let cols: Vec<usize> = (0..n).filter(|c| !prefix.contains(c)).collect();
    let m = cols.len();
    if m == 0 {
        let mut single = Neumaier::default();
        single.add(floor);
        return single;
    }
    let entry = |pos: usize, elem: usize| v.get(offset + pos, cols[elem]);

    let mut perm: Vec<usize> = (0..m).collect();
    // true: element moves towards lower positions
    let mut left = vec![true; m];
    let mut vals: Vec<f64> = (0..m).map(|p| entry(p, p)).collect();
    let mut sum = Neumaier::default();
    let mut current = vals.iter().copied().fold(floor, f64::max);
    loop {
        sum.add(current);
        let Some(pos) = largest_mobile(&perm, &left) else {
            break;
        };
        let elem = perm[pos];
        let other = if left[elem] { pos - 1 } else { pos + 1 };
        perm.swap(pos, other);
        let (a, b) = (pos.min(other), pos.max(other));
        let was_max = vals[a] == current || vals[b] == current;
        vals[a] = entry(a, perm[a]);
        vals[b] = entry(b, perm[b]);
        current = if was_max {
            vals.iter().copied().fold(floor, f64::max)
        } else {
            current.max(vals[a]).max(vals[b])
        };
        for d in &mut left[elem + 1..] {
            *d = !*d;
        }
    }
    sum
}

/// Position of the largest element whose direction points at a smaller
/// neighbour (Steinhaus-Johnson-Trotter).
fn largest_mobile(perm: &[usize], left: &[bool]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (pos, &e) in perm.iter().enumerate() {
        let mobile = if left[e] {
            pos > 0 && perm[pos - 1] < e
        } else {
            pos + 1 < perm.len() && perm[pos + 1] < e
        };
        if mobile && best.is_none_or(|b| perm[b] < e) {
            best = Some(pos);
        }
    }
    best
}

/// Monte-Carlo estimate over `trials` uniform permutations.
pub fn mc_average(x: &[f64], y: &WeightMatrix, trials: u64, seed: u64) -> Result<AverageEstimate> {
    mc_average_with(x, y, trials, seed, Execution::default())
}

const MC_CHUNK: u64 = 4096;

pub fn mc_average_with(
    x: &[f64],
    y: &WeightMatrix,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<AverageEstimate> {
    if trials < MIN_TRIALS {
        return Err(Error::OutOfRange(format!(
            "at least {MIN_TRIALS} trials required, got {trials}"
        )));
    }
    y.require_square()?;
    let v = product_matrix(x, y)?;
    let n = v.rows();
    let chunks = trials.div_ceil(MC_CHUNK) as usize;
    let samples = par::map_indexed(exec, chunks, |c| {
        let start = c as u64 * MC_CHUNK;
        let end = (start + MC_CHUNK).min(trials);
        let mut perm: Vec<usize> = Vec::with_capacity(n);
        (start..end)
            .map(|t| {
                let mut rng = trial_rng(seed, t);
                perm.clear();
                perm.extend(0..n);
                perm.shuffle(&mut rng);
                perm.iter()
                    .enumerate()
                    .map(|(i, &j)| v.get(i, j))
                    .fold(0.0, f64::max)
            })
            .collect::<Vec<f64>>()
    });
    let count = trials as f64;
    let mean = samples.iter().flatten().sum::<f64>() / count;
    let ss: f64 = samples.iter().flatten().map(|s| (s - mean) * (s - mean)).sum();
    let sd = (ss / (count - 1.0)).sqrt();
    Ok(AverageEstimate {
        value: mean,
        method: Method::MonteCarlo,
        half_width: Z_99 * sd / count.sqrt(),
        trials: Some(trials),
        seed: Some(seed),
    })
}

/// Random stream for one trial, a function of `(seed, trial)` alone.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Compensated summation.
#[derive(Debug, Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    /// `(sum + comp) / d` with one correction step, so an exactly
    /// representable quotient is returned exactly.
    fn div(&self, d: f64) -> f64 {
        let q = self.sum / d;
        let r = (-q).mul_add(d, self.sum) + self.comp;
        q + r / d
    }
}
