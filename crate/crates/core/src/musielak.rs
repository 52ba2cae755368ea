//! Musielak-Orlicz (Luxemburg) norms
//!
//! `‖x‖_{ΣM_i} = inf { ρ > 0 : Σ_i M_i(|x_i| / ρ) ≤ 1 }`, one Orlicz function
//! per coordinate. The infimum is found by bisection on `ρ`; the modular is
//! nonincreasing in `ρ` even where it takes the value `+∞`.

use serde::{Deserialize, Serialize};

use crate::bisect::{self, Tolerance};
use crate::orlicz::{Orlicz, OrliczFunction, Preimage};
use crate::{Error, Result, EPS};

/// Relative tolerance of computed norms.
pub const NORM_RTOL: f64 = 1e-10;

// The search runs to a few ulps, with a few ulps of slack on the modular, so
// printed norms are good to 12 digits; the advertised accuracy stays
// NORM_RTOL.
const BISECT_RTOL: f64 = 4.0 * f64::EPSILON;
const BISECT_SLACK: f64 = 16.0 * f64::EPSILON;

/// Ordered list of Orlicz functions, one per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct MusielakSpace {
    functions: Vec<OrliczFunction>,
    normalized: bool,
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    functions: Vec<OrliczFunction>,
    normalized: bool,
}

impl TryFrom<SpaceRepr> for MusielakSpace {
    type Error = Error;

    fn try_from(repr: SpaceRepr) -> Result<Self> {
        let space = MusielakSpace::new(repr.functions)?;
        if space.normalized != repr.normalized {
            return Err(Error::validation(format!(
                "\"normalized\": {} does not match the functions",
                repr.normalized
            )));
        }
        Ok(space)
    }
}

impl From<MusielakSpace> for SpaceRepr {
    fn from(s: MusielakSpace) -> Self {
        SpaceRepr {
            functions: s.functions,
            normalized: s.normalized,
        }
    }
}

/// Bounds `(L, 2L)` on the norm of the dual space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualNormInterval {
    pub lower: f64,
    pub upper: f64,
}

impl DualNormInterval {
    pub fn contains(&self, value: f64, tol: f64) -> bool {
        value >= self.lower - tol && value <= self.upper + tol
    }
}

impl MusielakSpace {
    pub fn new(functions: Vec<OrliczFunction>) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::validation("a Musielak-Orlicz space needs n >= 1 functions"));
        }
        let normalized = functions.iter().all(OrliczFunction::is_normalized);
        Ok(MusielakSpace {
            functions,
            normalized,
        })
    }

    /// The same function in every coordinate.
    pub fn uniform(function: impl Into<OrliczFunction>, n: usize) -> Result<Self> {
        let f = function.into();
        Self::new(vec![f; n])
    }

    pub fn dim(&self) -> usize {
        self.functions.len()
    }

    pub fn functions(&self) -> &[OrliczFunction] {
        &self.functions
    }

    /// Every `M_i(1) = 1`.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Coordinatewise conjugates `M_i*`.
    pub fn conjugate(&self) -> MusielakSpace {
        MusielakSpace::new(self.functions.iter().map(OrliczFunction::conjugate).collect())
            .expect("nonempty")
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        Error::check_len(self.dim(), x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("vector entries must be finite"));
        }
        Ok(())
    }

    fn modular_at(&self, x: &[f64], rho: f64) -> f64 {
        let mut total = 0.0;
        for (f, &xi) in self.functions.iter().zip(x) {
            total += f.value(xi.abs() / rho);
            if total == f64::INFINITY {
                break;
            }
        }
        total
    }

    /// `Σ_i M_i(|x_i| / ρ)`, possibly `+∞`.
    pub fn modular(&self, x: &[f64], rho: f64) -> Result<f64> {
        self.check(x)?;
        if !(rho > 0.0) {
            return Err(Error::OutOfRange(format!("rho must be positive, got {rho}")));
        }
        Ok(self.modular_at(x, rho))
    }

    /// Whether `x` lies in `radius · B_{ΣM_i}`, with slack [`EPS`].
    pub fn ball_membership(&self, x: &[f64], radius: f64) -> Result<bool> {
        Ok(self.modular(x, radius)? <= 1.0 + EPS)
    }

    /// Luxemburg norm, relative accuracy [`NORM_RTOL`]. The returned `ρ`
    /// always satisfies `modular(x, ρ) ≤ 1 + EPS`.
    ///
    /// The search starts from `ρ_i = |x_i| / r_i`, `r_i` the largest `t`
    /// with `M_i(t) ≤ 1`: convexity gives `max ρ_i ≤ ‖x‖ ≤ Σ ρ_i`, and the
    /// lower end is returned as is when feasible.
    pub fn luxemburg_norm(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        if x.iter().all(|&v| v == 0.0) {
            return Ok(0.0);
        }
        let feasible = |rho: f64| self.modular_at(x, rho) <= 1.0 + BISECT_SLACK;
        let (lo, hi) = match self.coordinate_radii(x) {
            Some((lo, hi)) if feasible(hi) => (lo, hi),
            _ => bisect::bracket(x.iter().map(|v| v.abs()).sum(), feasible)?,
        };
        bisect::threshold(lo, hi, feasible, Tolerance::relative(BISECT_RTOL))
    }

    /// `(max ρ_i, Σ ρ_i)`, or `None` when some unit radius is degenerate.
    fn coordinate_radii(&self, x: &[f64]) -> Option<(f64, f64)> {
        let (mut max, mut sum) = (0.0f64, 0.0);
        for (f, &xi) in self.functions.iter().zip(x) {
            let r = f.inverse(1.0, Preimage::Inf).ok().or_else(|| f.domain_end())?;
            if !(r > 0.0 && r.is_finite()) {
                return None;
            }
            let rho = xi.abs() / r;
            max = max.max(rho);
            sum += rho;
        }
        Some((max, sum))
    }

    /// The dual norm `‖x‖_{(ΣM_i)*}` lies in `[L, 2L]` with
    /// `L = ‖x‖_{ΣM_i*}`.
    pub fn dual_norm_estimate(&self, x: &[f64]) -> Result<DualNormInterval> {
        let lower = self.conjugate().luxemburg_norm(x)?;
        Ok(DualNormInterval {
            lower,
            upper: 2.0 * lower,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orlicz::{PiecewiseOrlicz, PowerOrlicz};
    use approx::assert_relative_eq;

    fn identity(n: usize) -> MusielakSpace {
        MusielakSpace::uniform(PiecewiseOrlicz::linear(1.0).unwrap(), n).unwrap()
    }

    fn squares(n: usize) -> MusielakSpace {
        MusielakSpace::uniform(PowerOrlicz::new(2.0, 1.0).unwrap(), n).unwrap()
    }

    #[test]
    fn modular_examples() {
        assert_eq!(identity(3).modular(&[1.0, 2.0, 3.0], 6.0).unwrap(), 1.0);
        assert_eq!(squares(2).modular(&[3.0, 4.0], 5.0).unwrap(), 1.0);
        let dual = identity(2).conjugate();
        assert_eq!(dual.modular(&[1.0, 1.0], 0.5).unwrap(), f64::INFINITY);
        assert!(identity(2).modular(&[1.0], 1.0).is_err());
        assert!(identity(1).modular(&[1.0], 0.0).is_err());
    }

    #[test]
    fn norm_examples() {
        assert_relative_eq!(identity(3).luxemburg_norm(&[1.0, 2.0, 3.0]).unwrap(), 6.0, max_relative = 1e-10);
        assert_relative_eq!(squares(2).luxemburg_norm(&[3.0, 4.0]).unwrap(), 5.0, max_relative = 1e-10);
        let mixed = MusielakSpace::new(vec![
            PiecewiseOrlicz::linear(1.0).unwrap().into(),
            PowerOrlicz::new(2.0, 1.0).unwrap().into(),
        ])
        .unwrap();
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert_relative_eq!(mixed.luxemburg_norm(&[1.0, 1.0]).unwrap(), golden, max_relative = 1e-10);
        assert_eq!(identity(3).luxemburg_norm(&[0.0; 3]).unwrap(), 0.0);
        assert!(identity(3).luxemburg_norm(&[1.0]).is_err());
    }

    #[test]
    fn unnormalized_space_uses_bracketing() {
        // M(t) = 5t gives 5·‖x‖_1
        let s = MusielakSpace::uniform(PiecewiseOrlicz::linear(5.0).unwrap(), 2).unwrap();
        assert!(!s.is_normalized());
        assert_relative_eq!(s.luxemburg_norm(&[1.0, -2.0]).unwrap(), 15.0, max_relative = 1e-10);
        // conjugate of the identity gives the max norm
        let dual = identity(3).conjugate();
        assert!(!dual.is_normalized());
        assert_relative_eq!(dual.luxemburg_norm(&[1.0, -7.0, 3.0]).unwrap(), 7.0, max_relative = 1e-10);
    }

    #[test]
    fn membership() {
        let s = squares(2);
        assert!(s.ball_membership(&[3.0, 4.0], 5.0).unwrap());
        assert!(!s.ball_membership(&[3.0, 4.0], 4.999).unwrap());
        assert!(s.ball_membership(&[0.0, 0.0], 1e-6).unwrap());
    }

    #[test]
    fn dual_estimates() {
        let iv = identity(3).dual_norm_estimate(&[1.0, 2.0, 3.0]).unwrap();
        assert_relative_eq!(iv.lower, 3.0, max_relative = 1e-10);
        assert_relative_eq!(iv.upper, 6.0, max_relative = 1e-10);
        assert!(iv.contains(6.0, 1e-9));

        // t²/2 is self-dual; exact dual norm of the ‖·‖_{t²/2} norm is
        // sup <x, z> over Σ z_i²/2 ≤ 1, i.e. √2·‖x‖_2 = 5√2, while L = 5/√2
        let half = MusielakSpace::uniform(PowerOrlicz::reciprocal(2.0).unwrap(), 2).unwrap();
        let iv = half.dual_norm_estimate(&[3.0, 4.0]).unwrap();
        assert_relative_eq!(iv.lower, 5.0 / 2f64.sqrt(), max_relative = 1e-10);
        assert!(iv.contains(5.0 * 2f64.sqrt(), 1e-9));

        let iv = identity(2).dual_norm_estimate(&[0.0, 0.0]).unwrap();
        assert_eq!((iv.lower, iv.upper), (0.0, 0.0));
    }

    #[test]
    fn json_round_trip() {
        let s = MusielakSpace::new(vec![
            PiecewiseOrlicz::from_decreasing_weights(&[0.5, 0.25, 0.25], 1.0).unwrap().into(),
            PowerOrlicz::new(2.0, 1.0).unwrap().into(),
        ])
        .unwrap();
        assert!(s.is_normalized());
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains(r#""normalized":true"#));
        let back: MusielakSpace = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let wrong = text.replace(r#""normalized":true"#, r#""normalized":false"#);
        assert!(serde_json::from_str::<MusielakSpace>(&wrong).is_err());
    }
}
