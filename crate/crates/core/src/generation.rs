//! Matrix to Musielak-Orlicz functions and back.
//!
//! Row `i` of a matrix `y` with nonincreasing positive entries defines the
//! piecewise-linear `M_i` with `M_i(scale · Σ_{j≤k} y_ij) = k/n`. The
//! matrix-average of `y` is then equivalent to `‖·‖_{ΣM_i*}`:
//!
//! ```text
//!     c_low · ‖x‖_{ΣM_i*} ≤ Ave_π max_i |x_i y_{iπ(i)}| ≤ c_high · ‖x‖_{ΣM_i*}
//! ```
//!
//! with `(1/(6n), 2/n)` for unit row sums and scale 1, and `(1/6, 2)` for
//! scale `1/n`. When the rows define the conjugates `M_i*` instead, the roles
//! of the two norms swap and the constants are unchanged.
//!
//! The ball inclusion `B ⊂ B_{ΣM_i} ⊂ 3B` behind these constants is checked
//! constructively: [`ball_b_vertices`] enumerates the generators of `B` and
//! [`decompose_lemma31`] splits a unit-ball point into pieces dominated by
//! points of `B`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combinat::AverageRequest;
use crate::musielak::MusielakSpace;
use crate::orlicz::{Orlicz, OrliczFunction, PiecewiseOrlicz, Preimage};
use crate::report::{sandwich_holds, Report};
use crate::{Error, Result, WeightMatrix, EPS};

/// Row sums must be within this of 1 for [`Variant::RowsumNormalized`].
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Largest `n` accepted by [`ball_b_vertices`] by default.
pub const DEFAULT_VERTEX_LIMIT: usize = 6;

/// Normalization of the generating equalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Rows sum to 1, `M_i(Σ_{j≤k} y_ij) = k/n`.
    #[serde(rename = "rowsum")]
    RowsumNormalized,
    /// `M_i((1/n) Σ_{j≤k} y_ij) = k/n`.
    #[serde(rename = "scaled")]
    ScaledByN,
}

impl Variant {
    pub fn scale(self, n: usize) -> f64 {
        match self {
            Variant::RowsumNormalized => 1.0,
            Variant::ScaledByN => 1.0 / n as f64,
        }
    }

    /// `(c_low, c_high)` of the sandwich.
    pub fn constants(self, n: usize) -> (f64, f64) {
        let n = n as f64;
        match self {
            Variant::RowsumNormalized => (1.0 / (6.0 * n), 2.0 / n),
            Variant::ScaledByN => (1.0 / 6.0, 2.0),
        }
    }

    pub fn theorem(self) -> &'static str {
        match self {
            Variant::RowsumNormalized => "thm3.2",
            Variant::ScaledByN => "thm3.3",
        }
    }
}

/// Whether the rows define `M_i` or `M_i*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Primal,
    Dual,
}

/// Functions generated from a weight matrix.
///
/// `space` holds the functions satisfying the generating equalities: the
/// `M_i` for [`Side::Primal`], the `M_i*` for [`Side::Dual`]. In both cases
/// the norm compared with the matrix-average is the one of the conjugate
/// space, see [`GeneratedSpace::comparison_space`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSpace {
    pub space: MusielakSpace,
    pub source: WeightMatrix,
    pub variant: Variant,
    pub side: Side,
}

impl GeneratedSpace {
    pub fn n(&self) -> usize {
        self.source.rows()
    }

    pub fn scale(&self) -> f64 {
        self.variant.scale(self.n())
    }

    pub fn generated(&self, i: usize) -> &PiecewiseOrlicz {
        self.space.functions()[i]
            .as_piecewise()
            .expect("generated functions are piecewise linear")
    }

    /// `scale · Σ_{j≤k} y_ij`, the breakpoint where the generated function
    /// reaches `k/n`.
    pub fn prefix(&self, i: usize, k: usize) -> f64 {
        self.generated(i).breakpoints()[k].0
    }

    /// The space whose norm the matrix-average is equivalent to.
    pub fn comparison_space(&self) -> MusielakSpace {
        self.space.conjugate()
    }

    /// Largest deviation `|M_i(scale · prefix_k) − k/n|` over all `i, k`.
    pub fn consistency_error(&self) -> f64 {
        let n = self.n();
        let scale = self.scale();
        let mut worst = 0.0f64;
        for (i, row) in self.source.iter_rows().enumerate() {
            let f = self.generated(i);
            let mut prefix = 0.0;
            for (k, &y) in row.iter().enumerate() {
                prefix += y;
                let want = (k + 1) as f64 / n as f64;
                worst = worst.max((f.value(scale * prefix) - want).abs());
            }
        }
        worst
    }
}

/// Builds the generated functions of an `n × n` matrix.
///
/// Under [`Variant::RowsumNormalized`] the rows must sum to 1 within
/// [`ROW_SUM_TOL`]; they are then rescaled to remove float drift.
pub fn functions_from_matrix(y: &WeightMatrix, variant: Variant, side: Side) -> Result<GeneratedSpace> {
    y.require_square()?;
    y.require_rows_decreasing()?;
    let source = match variant {
        Variant::RowsumNormalized => {
            y.require_unit_row_sums(ROW_SUM_TOL)?;
            y.normalize_rows()?
        }
        Variant::ScaledByN => y.clone(),
    };
    let scale = variant.scale(y.rows());
    let functions = source
        .iter_rows()
        .map(|row| PiecewiseOrlicz::from_decreasing_weights(row, scale).map(OrliczFunction::from))
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratedSpace {
        space: MusielakSpace::new(functions)?,
        source,
        variant,
        side,
    })
}

/// `y_ij = n · (M_i⁻¹(j/n) − M_i⁻¹((j−1)/n))` for normalized functions.
///
/// The rows are nonincreasing because `M_i⁻¹` is concave; increments that
/// exceed their predecessor by float noise only are clamped.
pub fn matrix_from_functions(functions: &[OrliczFunction]) -> Result<WeightMatrix> {
    let n = functions.len();
    if n == 0 {
        return Err(Error::validation("no functions given"));
    }
    let nf = n as f64;
    let mut data = Vec::with_capacity(n * n);
    for (i, f) in functions.iter().enumerate() {
        if !f.is_normalized() {
            return Err(Error::validation(format!(
                "function {i} is not normalized: M(1) = {}",
                f.value(1.0)
            )));
        }
        let mut prev_inv = 0.0;
        let mut prev_y = f64::INFINITY;
        for j in 1..=n {
            let level = if j == n { 1.0 } else { j as f64 / nf };
            let inv = f.inverse(level, Preimage::Inf)?;
            let mut y = nf * (inv - prev_inv);
            if y > prev_y {
                if y - prev_y <= EPS * prev_y.max(1.0) {
                    y = prev_y;
                } else {
                    return Err(Error::validation(format!(
                        "function {i} yields increasing inverse increments"
                    )));
                }
            }
            data.push(y);
            prev_inv = inv;
            prev_y = y;
        }
    }
    WeightMatrix::from_flat(n, n, data)
}

/// Generators `(ε_i Σ_{j≤ℓ_i} y_ij)_i` of `B` over all `ℓ_i ≥ 0` with
/// `Σ ℓ_i ≤ n`. With signs, only nonzero coordinates are flipped, so the
/// list has no duplicates.
pub fn ball_b_vertices(y: &WeightMatrix, include_signs: bool) -> Result<Vec<Vec<f64>>> {
    ball_b_vertices_with_limit(y, include_signs, DEFAULT_VERTEX_LIMIT)
}

pub fn ball_b_vertices_with_limit(y: &WeightMatrix, include_signs: bool, limit: usize) -> Result<Vec<Vec<f64>>> {
    y.require_square()?;
    let n = y.rows();
    if n > limit {
        return Err(Error::TooLarge {
            what: "vertex enumeration",
            n,
            limit,
            hint: "",
        });
    }
    let prefixes: Vec<Vec<f64>> = y
        .iter_rows()
        .map(|row| {
            let mut acc = vec![0.0];
            let mut s = 0.0;
            for &v in row {
                s += v;
                acc.push(s);
            }
            acc
        })
        .collect();
    let mut out = Vec::new();
    let mut ell = vec![0usize; n];
    compositions(&mut ell, 0, n, &mut |ell| {
        let base: Vec<f64> = ell.iter().enumerate().map(|(i, &l)| prefixes[i][l]).collect();
        if !include_signs {
            out.push(base);
            return;
        }
        let support: Vec<usize> = (0..n).filter(|&i| ell[i] > 0).collect();
        for mask in 0u32..(1 << support.len()) {
            let mut v = base.clone();
            for (b, &i) in support.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    v[i] = -v[i];
                }
            }
            out.push(v);
        }
    });
    Ok(out)
}

fn compositions(ell: &mut Vec<usize>, i: usize, budget: usize, visit: &mut dyn FnMut(&[usize])) {
    if i == ell.len() {
        visit(ell);
        return;
    }
    for l in 0..=budget {
        ell[i] = l;
        compositions(ell, i + 1, budget - l, visit);
    }
    ell[i] = 0;
}

/// Writes `u` as a convex combination of sign flips of `v`, valid whenever
/// `|u_i| ≤ |v_i|` for all `i`. Returns the nonzero weights with their
/// points.
pub fn sign_flip_combination(v: &[f64], u: &[f64]) -> Result<Vec<(f64, Vec<f64>)>> {
    Error::check_len(v.len(), u.len())?;
    let mut support = Vec::new();
    let mut plus = Vec::new();
    for (i, (&vi, &ui)) in v.iter().zip(u).enumerate() {
        let slack = EPS * vi.abs().max(1.0);
        if ui.abs() > vi.abs() + slack {
            return Err(Error::validation(format!(
                "coordinate {i}: |{ui}| exceeds |{vi}|"
            )));
        }
        if vi != 0.0 {
            support.push(i);
            plus.push((1.0 + (ui / vi).clamp(-1.0, 1.0)) / 2.0);
        }
    }
    if support.len() > 24 {
        return Err(Error::TooLarge {
            what: "sign-flip combination",
            n: support.len(),
            limit: 24,
            hint: "",
        });
    }
    let mut terms = Vec::new();
    for mask in 0u32..(1 << support.len()) {
        let mut weight = 1.0;
        let mut point = v.to_vec();
        for (b, &i) in support.iter().enumerate() {
            if mask & (1 << b) != 0 {
                weight *= 1.0 - plus[b];
                point[i] = -point[i];
            } else {
                weight *= plus[b];
            }
        }
        if weight > 0.0 {
            terms.push((weight, point));
        }
    }
    Ok(terms)
}

/// Proof objects placing a point of `B_{ΣM_i}` inside `3B`.
///
/// `x = x_I + x_J`; `|x_I| ≤ (y_11, …, y_n1)` componentwise, and
/// `|x_J| ≤ w_J ≤ 2·z_J` with `z_J` a generator of `B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma31Witness {
    pub j: Vec<usize>,
    pub i: Vec<usize>,
    pub k: BTreeMap<usize, usize>,
    pub x_i: Vec<f64>,
    pub x_j: Vec<f64>,
    pub z_j: Vec<f64>,
    pub w_j: Vec<f64>,
}

impl Lemma31Witness {
    /// The generator `(y_11, …, y_n1)` dominating `x_I`.
    pub fn first_column_point(&self, g: &GeneratedSpace) -> Vec<f64> {
        (0..g.n()).map(|i| g.prefix(i, 1)).collect()
    }

    /// Checks every witness inequality against `g` and `x`.
    pub fn validate(&self, g: &GeneratedSpace, x: &[f64]) -> Result<()> {
        let n = g.n();
        Error::check_len(n, x.len())?;
        let fail = |msg: String| Err(Error::Validation(format!("witness: {msg}")));
        let level = 1.0 / n as f64;
        let mut seen = vec![0u8; n];
        for &i in self.i.iter().chain(&self.j) {
            if i >= n {
                return fail(format!("index {i} out of range"));
            }
            seen[i] += 1;
        }
        if seen.iter().any(|&c| c != 1) {
            return fail("I and J must partition the coordinates".into());
        }
        for v in [&self.x_i, &self.x_j, &self.z_j, &self.w_j] {
            Error::check_len(n, v.len())?;
        }
        let tol = |v: f64| EPS * v.abs().max(1.0);
        let mut k_total = 0;
        for (&i, &k) in &self.k {
            if !self.j.contains(&i) {
                return fail(format!("k given for {i} outside J"));
            }
            if k == 0 || k >= n {
                return fail(format!("k_{i} = {k} outside 1..n-1"));
            }
            k_total += k;
        }
        if k_total > n {
            return fail(format!("Σ k_i = {k_total} exceeds n = {n}"));
        }
        for (i, &xi) in x.iter().enumerate().take(n) {
            let m = g.generated(i).value(xi.abs());
            if xi != self.x_i[i] + self.x_j[i] {
                return fail(format!("x_I + x_J differs from x at {i}"));
            }
            if self.j.contains(&i) {
                let Some(&k) = self.k.get(&i) else {
                    return fail(format!("missing k_{i}"));
                };
                if !(m > level) {
                    return fail(format!("{i} in J but M_i(|x_i|) = {m} ≤ 1/n"));
                }
                let (lo, hi) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
                if m < lo - EPS || m > hi + EPS {
                    return fail(format!("M_{i}(|x_i|) = {m} outside [{lo}, {hi}]"));
                }
                if self.x_i[i] != 0.0 {
                    return fail(format!("x_I nonzero at {i} in J"));
                }
                if self.z_j[i] != g.prefix(i, k) || self.w_j[i] != g.prefix(i, k + 1) {
                    return fail(format!("z_J or w_J at {i} differ from the prefix sums"));
                }
                if self.x_j[i].abs() > self.w_j[i] + tol(self.w_j[i]) {
                    return fail(format!("|x_J| > w_J at {i}"));
                }
                if self.w_j[i] > 2.0 * self.z_j[i] + tol(self.w_j[i]) {
                    return fail(format!("w_J > 2 z_J at {i}"));
                }
            } else {
                if m > level {
                    return fail(format!("{i} in I but M_i(|x_i|) = {m} > 1/n"));
                }
                if self.x_j[i] != 0.0 || self.z_j[i] != 0.0 || self.w_j[i] != 0.0 {
                    return fail(format!("J-vectors nonzero at {i} in I"));
                }
                let y1 = g.prefix(i, 1);
                if self.x_i[i].abs() > y1 + tol(y1) {
                    return fail(format!("|x_I| > y_{i}1 at {i}"));
                }
            }
        }
        Ok(())
    }
}

/// Splits `x` with `Σ M_i(|x_i|) ≤ 1` into the pieces used to show
/// `B_{ΣM_i} ⊂ 3B`. Coordinates keep their input order.
///
/// `k_i = ⌊n·M_i(|x_i|)⌋` clamped to `1..n−1`; exact multiples of `1/n`
/// resolve downward.
pub fn decompose_lemma31(g: &GeneratedSpace, x: &[f64]) -> Result<Lemma31Witness> {
    if g.variant != Variant::RowsumNormalized {
        return Err(Error::validation(
            "ball decomposition needs the row-sum normalized construction",
        ));
    }
    let n = g.n();
    let modular = g.space.modular(x, 1.0)?;
    if modular > 1.0 + EPS {
        return Err(Error::OutOfRange(format!(
            "x is outside the unit ball (modular {modular})"
        )));
    }
    let level = 1.0 / n as f64;
    let mut w = Lemma31Witness {
        j: Vec::new(),
        i: Vec::new(),
        k: BTreeMap::new(),
        x_i: vec![0.0; n],
        x_j: vec![0.0; n],
        z_j: vec![0.0; n],
        w_j: vec![0.0; n],
    };
    for (i, &xi) in x.iter().enumerate() {
        let m = g.generated(i).value(xi.abs());
        if m > level && n > 1 {
            let k = ((n as f64 * m).floor() as usize).clamp(1, n - 1);
            w.j.push(i);
            w.k.insert(i, k);
            w.x_j[i] = xi;
            w.z_j[i] = g.prefix(i, k);
            w.w_j[i] = g.prefix(i, k + 1);
        } else {
            w.i.push(i);
            w.x_i[i] = xi;
        }
    }
    Ok(w)
}

/// Checks `c_low·L ≤ Ave ≤ c_high·L` for one instance, `L` the norm of the
/// comparison space at `x`.
pub fn verify_sandwich(
    x: &[f64],
    y: &WeightMatrix,
    variant: Variant,
    side: Side,
    method: AverageRequest,
) -> Result<Report> {
    let g = functions_from_matrix(y, variant, side)?;
    let n = g.n();
    let estimate = method.estimate(x, &g.source)?;
    let l = g.comparison_space().luxemburg_norm(x)?;
    let (c_low, c_high) = variant.constants(n);
    let detail = match method {
        AverageRequest::Exact => None,
        _ => Some(format!(
            "A in [{}, {}]",
            estimate.lower(),
            estimate.upper()
        )),
    };
    Ok(Report {
        theorem: variant.theorem().to_string(),
        n,
        a: estimate.value,
        l,
        c_low,
        c_high,
        pass: sandwich_holds(&estimate, l, c_low, c_high),
        method: method.method().as_str().to_string(),
        seed: method.seed(),
        detail,
    })
}

/// Largest `|M'_i(M_i⁻¹(k/n)) − k/n|` where `M'_i` is regenerated from
/// `matrix_from_functions(functions)` with the `1/n` scaling.
pub fn round_trip_error(functions: &[OrliczFunction], y: &WeightMatrix) -> Result<f64> {
    let g = functions_from_matrix(y, Variant::ScaledByN, Side::Primal)?;
    let n = functions.len();
    let mut worst = 0.0f64;
    for (i, f) in functions.iter().enumerate() {
        for k in 1..=n {
            let level = k as f64 / n as f64;
            let t = f.inverse(level, Preimage::Inf)?;
            worst = worst.max((g.space.functions()[i].value(t) - level).abs());
        }
    }
    Ok(worst)
}

/// Matrix built from given functions, checked for the round trip, then the
/// row-sum sandwich on `y / n`.
pub fn verify_converse(functions: &[OrliczFunction], x: &[f64], method: AverageRequest) -> Result<Report> {
    let y = matrix_from_functions(functions)?;
    let err = round_trip_error(functions, &y)?;
    let n = functions.len();
    let rows_ok = y.rows_decreasing();
    let mut report = verify_sandwich(
        x,
        &y.scaled(1.0 / n as f64)?,
        Variant::RowsumNormalized,
        Side::Primal,
        method,
    )?;
    report.theorem = "thm4.1".into();
    report.pass &= rows_ok && err <= 1e-10;
    let extra = format!("round-trip error {err:.3e}, rows nonincreasing: {rows_ok}");
    report.detail = Some(match report.detail.take() {
        Some(d) => format!("{d}; {extra}"),
        None => extra,
    });
    Ok(report)
}
