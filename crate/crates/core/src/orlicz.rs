//! One-dimensional Orlicz functions.
//!
//! Two concrete forms are supported: [`PiecewiseOrlicz`], a convex
//! piecewise-linear function given by its breakpoints, and [`PowerOrlicz`],
//! `c·t^p`. [`OrliczFunction`] wraps either one.
//!
//! Piecewise functions built from a decreasing weight sequence satisfy
//! `M(scale · (w_1 + … + w_k)) = k/N` and are linear in between. Their
//! Legendre conjugates vanish on an initial interval and are `+∞` past a finite
//! domain end; both features are represented exactly.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::bisect::{self, Tolerance};
use crate::{Error, Result, EPS};

/// Relative slack allowed when checking that segment slopes are nondecreasing.
const CONVEXITY_RTOL: f64 = 1e-9;

/// Slopes closer than this (relative) describe one straight segment.
const COLLINEAR_RTOL: f64 = 1e-12;

fn same_slope(a: f64, b: f64) -> bool {
    (a - b).abs() <= COLLINEAR_RTOL * a.abs().max(b.abs()).max(1.0)
}

/// Which preimage [`Orlicz::inverse`] returns when the function is flat at
/// zero and `0` is queried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Preimage {
    /// The smallest `t` with `M(t) = v`.
    #[default]
    Inf,
    /// The largest `t` with `M(t) = v`.
    Sup,
}

/// Common evaluation interface.
pub trait Orlicz {
    /// `M(t)` for `t ≥ 0`; may be `+∞`.
    fn value(&self, t: f64) -> f64;

    /// Checked evaluation rejecting negative or non-finite arguments.
    fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || t.is_infinite() {
            return Err(Error::OutOfRange(format!(
                "Orlicz functions are evaluated on [0, ∞), got {t}"
            )));
        }
        Ok(self.value(t))
    }

    /// A `t` with `M(t) = v`.
    ///
    /// The default locates the switching point of `M(t) ≥ v` by bisection;
    /// concrete forms override it with exact formulas.
    fn inverse(&self, v: f64, preimage: Preimage) -> Result<f64> {
        inverse_by_bisection(self, v, preimage)
    }
}

/// Monotone bisection inverse, absolute tolerance `1e-12`, at most 200 steps.
pub fn inverse_by_bisection<F: Orlicz + ?Sized>(f: &F, v: f64, preimage: Preimage) -> Result<f64> {
    if !(v >= 0.0) || v.is_infinite() {
        return Err(Error::OutOfRange(format!("inverse of {v}")));
    }
    let tol = Tolerance {
        abs: 1e-12,
        rel: 0.0,
        max_iter: 200,
    };
    let t = if v == 0.0 && preimage == Preimage::Sup {
        // largest t with M(t) = 0: switching point of M(t) > 0
        let (lo, hi) = bisect::bracket(1.0, |t| f.value(t) > 0.0)?;
        if lo == hi {
            return Ok(0.0);
        }
        bisect::threshold(lo, hi, |t| f.value(t) > 0.0, tol)?
    } else if v == 0.0 {
        return Ok(0.0);
    } else {
        let (lo, hi) = bisect::bracket(1.0, |t| f.value(t) >= v)?;
        let lo = if lo == hi { 0.0 } else { lo };
        bisect::threshold(lo, hi, |t| f.value(t) >= v, tol)?
    };
    if v > 0.0 && !f.value(t).is_finite() && f.value((t - 1e-12).max(0.0)) < v - EPS {
        return Err(Error::Range { value: v });
    }
    Ok(t)
}

/// Slope of a piecewise function beyond its last breakpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// Linear continuation with this slope.
    Finite(f64),
    /// `+∞` beyond the last breakpoint.
    Infinite,
}

impl Tail {
    pub fn is_infinite(self) -> bool {
        matches!(self, Tail::Infinite)
    }
}

impl Serialize for Tail {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Tail::Finite(s) => serializer.serialize_f64(s),
            Tail::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Tail {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Number(f64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Number(s) => Ok(Tail::Finite(s)),
            Repr::Text(s) if s == "inf" => Ok(Tail::Infinite),
            Repr::Text(s) => Err(de::Error::custom(format!(
                "tail_slope must be a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// Convex, increasing, piecewise-linear function on `[0, ∞)`.
///
/// Breakpoints start at the origin. Segment slopes are kept alongside the
/// breakpoints so that conjugation does not have to recover them from
/// difference quotients.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PiecewiseRepr", into = "PiecewiseRepr")]
pub struct PiecewiseOrlicz {
    breakpoints: Vec<(f64, f64)>,
    slopes: Vec<f64>,
    tail: Tail,
}

#[derive(Serialize, Deserialize)]
struct PiecewiseRepr {
    breakpoints: Vec<(f64, f64)>,
    tail_slope: Tail,
}

impl TryFrom<PiecewiseRepr> for PiecewiseOrlicz {
    type Error = Error;

    fn try_from(repr: PiecewiseRepr) -> Result<Self> {
        PiecewiseOrlicz::new(repr.breakpoints, repr.tail_slope)
    }
}

impl From<PiecewiseOrlicz> for PiecewiseRepr {
    fn from(f: PiecewiseOrlicz) -> Self {
        PiecewiseRepr {
            breakpoints: f.breakpoints,
            tail_slope: f.tail,
        }
    }
}

impl PartialEq for PiecewiseOrlicz {
    fn eq(&self, other: &Self) -> bool {
        self.breakpoints == other.breakpoints && self.tail == other.tail
    }
}

impl PiecewiseOrlicz {
    /// Builds a function from breakpoints `(t_k, v_k)` starting at `(0, 0)`.
    pub fn new(breakpoints: Vec<(f64, f64)>, tail: Tail) -> Result<Self> {
        let slopes = breakpoints
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        Self::from_parts(breakpoints, slopes, tail)
    }

    fn from_parts(breakpoints: Vec<(f64, f64)>, slopes: Vec<f64>, tail: Tail) -> Result<Self> {
        let f = PiecewiseOrlicz {
            breakpoints,
            slopes,
            tail,
        };
        f.validate()?;
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        let bp = &self.breakpoints;
        match bp.first() {
            Some(&(t, v)) if t == 0.0 && v == 0.0 => {}
            _ => return Err(Error::validation("breakpoints must start at (0, 0)")),
        }
        if bp.iter().any(|&(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::validation("breakpoints must be finite"));
        }
        for (k, w) in bp.windows(2).enumerate() {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            if !(t1 > t0) {
                return Err(Error::validation(format!(
                    "breakpoint abscissae must increase strictly (index {})",
                    k + 1
                )));
            }
            // only the first segment may be flat
            if v1 < v0 || (k > 0 && v1 <= v0) {
                return Err(Error::validation(format!(
                    "breakpoint values must increase (index {})",
                    k + 1
                )));
            }
        }
        debug_assert_eq!(self.slopes.len(), bp.len() - 1);
        for w in self.slopes.windows(2) {
            if w[1] < w[0] - CONVEXITY_RTOL * w[0].abs().max(1.0) {
                return Err(Error::validation(format!(
                    "segment slopes must be nondecreasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        match self.tail {
            Tail::Finite(s) => {
                if !s.is_finite() {
                    return Err(Error::validation("finite tail slope must be a number"));
                }
                let last = self.slopes.last().copied().unwrap_or(0.0);
                if s < last - CONVEXITY_RTOL * last.abs().max(1.0) {
                    return Err(Error::validation(format!(
                        "tail slope {s} below last segment slope {last}"
                    )));
                }
                if s <= 0.0 {
                    return Err(Error::validation("function vanishes identically"));
                }
            }
            Tail::Infinite => {
                if bp.len() < 2 {
                    return Err(Error::validation(
                        "function with infinite tail needs a nonempty domain",
                    ));
                }
            }
        }
        Ok(())
    }

    /// The function with `M(scale · Σ_{j≤k} w_j) = k/N`, `k = 1..N`, linear in
    /// between and continued with the last slope.
    pub fn from_decreasing_weights(weights: &[f64], scale: f64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::validation("weight sequence is empty"));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::validation(format!("scale must be positive, got {scale}")));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(Error::validation("weights must be positive and finite"));
        }
        if let Some(j) = weights.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::validation(format!(
                "weights must be nonincreasing (index {})",
                j + 1
            )));
        }
        let len = weights.len() as f64;
        let mut breakpoints = Vec::with_capacity(weights.len() + 1);
        breakpoints.push((0.0, 0.0));
        let mut prefix = 0.0;
        for (k, &w) in weights.iter().enumerate() {
            prefix += w;
            breakpoints.push((scale * prefix, (k + 1) as f64 / len));
        }
        let slopes: Vec<f64> = weights.iter().map(|&w| 1.0 / (len * scale * w)).collect();
        let tail = Tail::Finite(*slopes.last().unwrap());
        Self::from_parts(breakpoints, slopes, tail)
    }

    /// `M(t) = slope · t`.
    pub fn linear(slope: f64) -> Result<Self> {
        Self::from_parts(vec![(0.0, 0.0)], Vec::new(), Tail::Finite(slope))
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    /// Slopes of the segments between consecutive breakpoints.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Right end of the finite domain, if the function is `+∞` beyond it.
    pub fn domain_end(&self) -> Option<f64> {
        match self.tail {
            Tail::Infinite => Some(self.breakpoints.last().unwrap().0),
            Tail::Finite(_) => None,
        }
    }

    /// `false` for functions that vanish on an initial interval, such as the
    /// conjugate of `M(t) = t`.
    pub fn is_strict(&self) -> bool {
        match self.breakpoints.get(1) {
            Some(&(_, v)) => v > 0.0,
            None => true,
        }
    }

    /// `M(1) = 1` within [`EPS`].
    pub fn is_normalized(&self) -> bool {
        (self.value(1.0) - 1.0).abs() <= EPS
    }

    /// Legendre transform `M*(s) = sup_{t≥0} (s·t − M(t))`.
    ///
    /// Each segment of `M` becomes a breakpoint of `M*` and each breakpoint
    /// of `M` a segment. A finite tail slope bounds the domain of `M*`;
    /// an infinite tail gives `M*` a finite tail slope.
    pub fn conjugate(&self) -> PiecewiseOrlicz {
        let bp = &self.breakpoints;
        let mut points = vec![(0.0, 0.0)];
        let mut slopes = Vec::with_capacity(bp.len());
        // conjugate segment slopes are the abscissae where the sup is attained
        let push = |s: f64, at: usize, points: &mut Vec<(f64, f64)>, slopes: &mut Vec<f64>| {
            let &(s_prev, _) = points.last().unwrap();
            if s <= s_prev || same_slope(s, s_prev) {
                return;
            }
            let (t, v) = bp[at];
            points.push((s, (s * t - v).max(0.0)));
            slopes.push(t);
        };
        for (k, &sigma) in self.slopes.iter().enumerate() {
            push(sigma, k, &mut points, &mut slopes);
        }
        let last = bp.len() - 1;
        let tail = match self.tail {
            Tail::Finite(s) => {
                push(s, last, &mut points, &mut slopes);
                Tail::Infinite
            }
            Tail::Infinite => Tail::Finite(bp[last].0),
        };
        PiecewiseOrlicz::from_parts(points, slopes, tail)
            .expect("conjugate of a valid Orlicz function is valid")
    }

    /// Drops breakpoints that are not kinks: interior points between
    /// collinear segments, and the last point when the tail continues its
    /// segment.
    pub fn canonical(&self) -> PiecewiseOrlicz {
        let mut points = vec![self.breakpoints[0]];
        let mut slopes: Vec<f64> = Vec::new();
        for (k, &sigma) in self.slopes.iter().enumerate() {
            let next = self.breakpoints[k + 1];
            match slopes.last() {
                Some(&prev) if same_slope(prev, sigma) => {
                    *points.last_mut().unwrap() = next;
                }
                _ => {
                    points.push(next);
                    slopes.push(sigma);
                }
            }
        }
        if let (Tail::Finite(s), Some(&last)) = (self.tail, slopes.last()) {
            if same_slope(s, last) {
                points.pop();
                slopes.pop();
            }
        }
        PiecewiseOrlicz {
            breakpoints: points,
            slopes,
            tail: self.tail,
        }
    }

    /// Equality of canonical forms, breakpoints and tail within `tol`.
    pub fn approx_eq(&self, other: &PiecewiseOrlicz, tol: f64) -> bool {
        let (a, b) = (self.canonical(), other.canonical());
        let tails = match (a.tail, b.tail) {
            (Tail::Finite(x), Tail::Finite(y)) => (x - y).abs() <= tol,
            (Tail::Infinite, Tail::Infinite) => true,
            _ => false,
        };
        tails
            && a.breakpoints.len() == b.breakpoints.len()
            && a
                .breakpoints
                .iter()
                .zip(&b.breakpoints)
                .all(|(p, q)| (p.0 - q.0).abs() <= tol && (p.1 - q.1).abs() <= tol)
    }
}

impl Orlicz for PiecewiseOrlicz {
    fn value(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0, "negative argument {t}");
        let bp = &self.breakpoints;
        let k = bp.partition_point(|&(tk, _)| tk < t);
        if k < bp.len() {
            let (tk, vk) = bp[k];
            if tk == t || k == 0 {
                return vk;
            }
            let (ta, va) = bp[k - 1];
            return va + (vk - va) * ((t - ta) / (tk - ta));
        }
        let (tm, vm) = bp[bp.len() - 1];
        match self.tail {
            Tail::Finite(s) => vm + s * (t - tm),
            Tail::Infinite => f64::INFINITY,
        }
    }

    fn inverse(&self, v: f64, preimage: Preimage) -> Result<f64> {
        if !(v >= 0.0) || v.is_infinite() {
            return Err(Error::OutOfRange(format!("inverse of {v}")));
        }
        let bp = &self.breakpoints;
        if v == 0.0 {
            return Ok(match (preimage, bp.get(1)) {
                (Preimage::Sup, Some(&(t1, 0.0))) => t1,
                _ => 0.0,
            });
        }
        let k = bp.partition_point(|&(_, vk)| vk < v);
        if k < bp.len() {
            let (tk, vk) = bp[k];
            if vk == v {
                return Ok(tk);
            }
            let (ta, va) = bp[k - 1];
            return Ok(ta + (tk - ta) * ((v - va) / (vk - va)));
        }
        let (tm, vm) = bp[bp.len() - 1];
        match self.tail {
            Tail::Finite(s) => Ok(tm + (v - vm) / s),
            Tail::Infinite => Err(Error::Range { value: v }),
        }
    }
}

impl fmt::Display for PiecewiseOrlicz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PL[")?;
        for (i, (t, v)) in self.breakpoints.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({t}, {v})")?;
        }
        match self.tail {
            Tail::Finite(s) => write!(f, "; tail {s}]"),
            Tail::Infinite => write!(f, "; tail inf]"),
        }
    }
}

/// `M(t) = coefficient · t^p` with `p ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PowerRepr", into = "PowerRepr")]
pub struct PowerOrlicz {
    p: f64,
    coefficient: f64,
}

#[derive(Serialize, Deserialize)]
struct PowerRepr {
    p: f64,
    coefficient: f64,
}

impl TryFrom<PowerRepr> for PowerOrlicz {
    type Error = Error;

    fn try_from(r: PowerRepr) -> Result<Self> {
        PowerOrlicz::new(r.p, r.coefficient)
    }
}

impl From<PowerOrlicz> for PowerRepr {
    fn from(f: PowerOrlicz) -> Self {
        PowerRepr {
            p: f.p,
            coefficient: f.coefficient,
        }
    }
}

impl PowerOrlicz {
    pub fn new(p: f64, coefficient: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::validation(format!("exponent must be >= 1, got {p}")));
        }
        if !(coefficient > 0.0) || !coefficient.is_finite() {
            return Err(Error::validation(format!(
                "coefficient must be positive, got {coefficient}"
            )));
        }
        Ok(PowerOrlicz { p, coefficient })
    }

    /// `t^p / p`, the form whose conjugate is `t^{p*} / p*`.
    pub fn reciprocal(p: f64) -> Result<Self> {
        Self::new(p, 1.0 / p)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    /// `p / (p − 1)`; infinite for `p = 1`.
    pub fn dual_exponent(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else {
            self.p / (self.p - 1.0)
        }
    }

    /// For `p > 1`, `(c t^p)* = (cp)^{−1/(p−1)} s^{p*} / p*`. For `p = 1` the
    /// conjugate is the indicator of `[0, c]`.
    pub fn conjugate(&self) -> OrliczFunction {
        if self.p == 1.0 {
            let f = PiecewiseOrlicz::from_parts(
                vec![(0.0, 0.0), (self.coefficient, 0.0)],
                vec![0.0],
                Tail::Infinite,
            )
            .expect("indicator of [0, c]");
            return OrliczFunction::Piecewise(f);
        }
        let q = self.dual_exponent();
        let scale = (self.coefficient * self.p).powf(-1.0 / (self.p - 1.0));
        OrliczFunction::Power(PowerOrlicz {
            p: q,
            coefficient: scale / q,
        })
    }
}

impl Orlicz for PowerOrlicz {
    fn value(&self, t: f64) -> f64 {
        self.coefficient * t.powf(self.p)
    }

    fn inverse(&self, v: f64, _preimage: Preimage) -> Result<f64> {
        if !(v >= 0.0) || v.is_infinite() {
            return Err(Error::OutOfRange(format!("inverse of {v}")));
        }
        Ok((v / self.coefficient).powf(1.0 / self.p))
    }
}

/// Either supported form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrliczFunction {
    Piecewise(PiecewiseOrlicz),
    Power(PowerOrlicz),
}

impl OrliczFunction {
    pub fn conjugate(&self) -> OrliczFunction {
        match self {
            OrliczFunction::Piecewise(f) => OrliczFunction::Piecewise(f.conjugate()),
            OrliczFunction::Power(f) => f.conjugate(),
        }
    }

    pub fn is_normalized(&self) -> bool {
        (self.value(1.0) - 1.0).abs() <= EPS
    }

    pub fn is_strict(&self) -> bool {
        match self {
            OrliczFunction::Piecewise(f) => f.is_strict(),
            OrliczFunction::Power(_) => true,
        }
    }

    pub fn domain_end(&self) -> Option<f64> {
        match self {
            OrliczFunction::Piecewise(f) => f.domain_end(),
            OrliczFunction::Power(_) => None,
        }
    }

    pub fn as_piecewise(&self) -> Option<&PiecewiseOrlicz> {
        match self {
            OrliczFunction::Piecewise(f) => Some(f),
            OrliczFunction::Power(_) => None,
        }
    }
}

impl Orlicz for OrliczFunction {
    fn value(&self, t: f64) -> f64 {
        match self {
            OrliczFunction::Piecewise(f) => f.value(t),
            OrliczFunction::Power(f) => f.value(t),
        }
    }

    fn inverse(&self, v: f64, preimage: Preimage) -> Result<f64> {
        match self {
            OrliczFunction::Piecewise(f) => f.inverse(v, preimage),
            OrliczFunction::Power(f) => f.inverse(v, preimage),
        }
    }
}

impl From<PiecewiseOrlicz> for OrliczFunction {
    fn from(f: PiecewiseOrlicz) -> Self {
        OrliczFunction::Piecewise(f)
    }
}

impl From<PowerOrlicz> for OrliczFunction {
    fn from(f: PowerOrlicz) -> Self {
        OrliczFunction::Power(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn quarter_weights() -> PiecewiseOrlicz {
        PiecewiseOrlicz::from_decreasing_weights(&[0.5, 0.25, 0.25], 1.0).unwrap()
    }

    #[test]
    fn weights_forced_breakpoints() {
        let m = quarter_weights();
        assert_eq!(
            m.breakpoints(),
            &[(0.0, 0.0), (0.5, 1.0 / 3.0), (0.75, 2.0 / 3.0), (1.0, 1.0)]
        );
        assert_eq!(m.tail(), Tail::Finite(4.0 / 3.0));

        let ident = PiecewiseOrlicz::from_decreasing_weights(&[1.0, 1.0], 0.5).unwrap();
        assert_eq!(ident.breakpoints(), &[(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]);
        assert_eq!(ident.value(2.0), 2.0);

        let scaled = PiecewiseOrlicz::from_decreasing_weights(&[2.0, 1.0, 1.0], 0.25).unwrap();
        assert_eq!(
            scaled.breakpoints()[1..],
            [(0.5, 1.0 / 3.0), (0.75, 2.0 / 3.0), (1.0, 1.0)]
        );
    }

    #[test]
    fn weights_rejected() {
        assert!(PiecewiseOrlicz::from_decreasing_weights(&[0.25, 0.5], 1.0).is_err());
        assert!(PiecewiseOrlicz::from_decreasing_weights(&[0.5, 0.0], 1.0).is_err());
        assert!(PiecewiseOrlicz::from_decreasing_weights(&[0.5, -0.1], 1.0).is_err());
        assert!(PiecewiseOrlicz::from_decreasing_weights(&[], 1.0).is_err());
        assert!(PiecewiseOrlicz::from_decreasing_weights(&[1.0], 0.0).is_err());
    }

    #[test]
    fn slopes_follow_weights() {
        let w = [0.4, 0.3, 0.2, 0.1];
        let m = PiecewiseOrlicz::from_decreasing_weights(&w, 0.5).unwrap();
        for (k, &s) in m.slopes().iter().enumerate() {
            assert_abs_diff_eq!(s, 1.0 / (4.0 * 0.5 * w[k]), epsilon = 1e-12);
        }
        assert!(m.slopes().windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn evaluation() {
        let m = quarter_weights();
        assert_abs_diff_eq!(m.eval(0.625).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(m.eval(0.0).unwrap(), 0.0);
        assert!(m.eval(-1.0).is_err());
        assert!(m.eval(f64::NAN).is_err());
        assert_eq!(PowerOrlicz::new(2.0, 1.0).unwrap().eval(3.0).unwrap(), 9.0);
    }

    #[test]
    fn inverse_values() {
        let m = quarter_weights();
        assert_eq!(m.inverse(2.0 / 3.0, Preimage::Inf).unwrap(), 0.75);
        assert_abs_diff_eq!(m.inverse(0.5, Preimage::Inf).unwrap(), 0.625, epsilon = 1e-15);
        assert_abs_diff_eq!(m.inverse(2.0, Preimage::Inf).unwrap(), 1.75, epsilon = 1e-15);
        let sq = PowerOrlicz::new(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            sq.inverse(0.5, Preimage::Inf).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-8
        );
        let ident = PiecewiseOrlicz::linear(1.0).unwrap();
        assert_abs_diff_eq!(ident.inverse(0.3, Preimage::Inf).unwrap(), 0.3, epsilon = 1e-15);
    }

    #[test]
    fn inverse_on_flat_and_bounded_functions() {
        let dual = PiecewiseOrlicz::linear(1.0).unwrap().conjugate();
        assert_eq!(dual.inverse(0.0, Preimage::Inf).unwrap(), 0.0);
        assert_eq!(dual.inverse(0.0, Preimage::Sup).unwrap(), 1.0);
        assert!(matches!(
            dual.inverse(0.5, Preimage::Inf),
            Err(Error::Range { .. })
        ));
        assert!(dual.inverse(-0.5, Preimage::Inf).is_err());
    }

    #[test]
    fn bisection_fallback_matches_closed_form() {
        let f = PowerOrlicz::new(2.5, 0.7).unwrap();
        for &v in &[1e-6, 0.3, 1.0, 4.2, 100.0] {
            let exact = f.inverse(v, Preimage::Inf).unwrap();
            let approx = inverse_by_bisection(&f, v, Preimage::Inf).unwrap();
            assert!((exact - approx).abs() <= 1e-11, "{v}: {exact} vs {approx}");
        }
        let dual = PiecewiseOrlicz::linear(1.0).unwrap().conjugate();
        let sup = inverse_by_bisection(&dual, 0.0, Preimage::Sup).unwrap();
        assert!((sup - 1.0).abs() <= 1e-11);
        assert!(inverse_by_bisection(&dual, 0.5, Preimage::Inf).is_err());
    }

    #[test]
    fn conjugate_of_identity_is_indicator() {
        let dual = PiecewiseOrlicz::linear(1.0).unwrap().conjugate();
        assert_eq!(dual.breakpoints(), &[(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(dual.tail(), Tail::Infinite);
        assert!(!dual.is_strict());
        assert_eq!(dual.value(0.7), 0.0);
        assert_eq!(dual.value(1.0), 0.0);
        assert_eq!(dual.value(1.0 + 1e-9), f64::INFINITY);

        // generated from equal weights the identity carries redundant points
        let ident = PiecewiseOrlicz::from_decreasing_weights(&[1.0; 4], 0.25).unwrap();
        assert_eq!(ident.conjugate(), dual);
    }

    #[test]
    fn conjugate_breakpoints_by_hand() {
        // slopes 2/3, 4/3, 4/3; kink at t = 0.5 only
        let m = quarter_weights();
        let dual = m.conjugate();
        let expected = [(0.0, 0.0), (2.0 / 3.0, 0.0), (4.0 / 3.0, 4.0 / 3.0 * 0.5 - 1.0 / 3.0)];
        assert_eq!(dual.breakpoints().len(), 3);
        for (p, q) in dual.breakpoints().iter().zip(&expected) {
            assert_abs_diff_eq!(p.0, q.0, epsilon = 1e-15);
            assert_abs_diff_eq!(p.1, q.1, epsilon = 1e-15);
        }
        assert_eq!(dual.slopes(), &[0.0, 0.5]);
        assert!(dual.tail().is_infinite());
        assert!(m.conjugate().conjugate().approx_eq(&m, 1e-12));
    }

    #[test]
    fn power_pair_duality() {
        let half_square = PowerOrlicz::reciprocal(2.0).unwrap();
        assert_eq!(half_square.conjugate(), OrliczFunction::Power(half_square));
        let f = PowerOrlicz::reciprocal(3.0).unwrap();
        match f.conjugate() {
            OrliczFunction::Power(g) => {
                assert_abs_diff_eq!(g.p(), 1.5, epsilon = 1e-12);
                assert_abs_diff_eq!(g.coefficient(), 1.0 / 1.5, epsilon = 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        let lin = PowerOrlicz::new(1.0, 2.0).unwrap().conjugate();
        assert_eq!(lin.domain_end(), Some(2.0));
    }

    #[test]
    fn canonical_drops_non_kinks() {
        let m = quarter_weights().canonical();
        assert_eq!(m.breakpoints(), &[(0.0, 0.0), (0.5, 1.0 / 3.0)]);
        assert!(m.approx_eq(&quarter_weights(), 0.0));
        assert_abs_diff_eq!(m.value(1.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn json_shape() {
        let m = quarter_weights();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(
            text,
            r#"{"breakpoints":[[0.0,0.0],[0.5,0.3333333333333333],[0.75,0.6666666666666666],[1.0,1.0]],"tail_slope":1.3333333333333333}"#
        );
        let back: PiecewiseOrlicz = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);

        let dual = m.conjugate();
        let text = serde_json::to_string(&dual).unwrap();
        assert!(text.ends_with(r#""tail_slope":"inf"}"#));
        let back: PiecewiseOrlicz = serde_json::from_str(&text).unwrap();
        assert_eq!(back, dual);

        let bad = r#"{"breakpoints":[[0,0],[1,1],[2,1.5]],"tail_slope":1}"#;
        assert!(serde_json::from_str::<PiecewiseOrlicz>(bad).is_err());
        let bad = r#"{"breakpoints":[[0,0],[1,1]],"tail_slope":"huge"}"#;
        assert!(serde_json::from_str::<PiecewiseOrlicz>(bad).is_err());
    }

    #[test]
    fn validation_rules() {
        use Tail::*;
        assert!(PiecewiseOrlicz::new(vec![(0.1, 0.0)], Finite(1.0)).is_err());
        assert!(PiecewiseOrlicz::new(vec![(0.0, 0.0), (1.0, 1.0), (1.0, 2.0)], Finite(1.0)).is_err());
        assert!(PiecewiseOrlicz::new(vec![(0.0, 0.0), (1.0, 1.0)], Finite(0.5)).is_err());
        assert!(PiecewiseOrlicz::new(vec![(0.0, 0.0)], Infinite).is_err());
        assert!(PiecewiseOrlicz::new(vec![(0.0, 0.0), (1.0, 0.0)], Finite(0.0)).is_err());
        assert!(PiecewiseOrlicz::new(vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], Infinite).is_err());
        assert!(PiecewiseOrlicz::new(vec![(0.0, 0.0), (1.0, 0.0)], Infinite).is_ok());
        assert!(PowerOrlicz::new(0.5, 1.0).is_err());
        assert!(PowerOrlicz::new(2.0, 0.0).is_err());
    }
}
