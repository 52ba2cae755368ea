//! Reproducible problem instances.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinat::trial_rng;
use crate::generation::{matrix_from_functions, Variant};
use crate::musielak::MusielakSpace;
use crate::orlicz::{OrliczFunction, PowerOrlicz};
use crate::{Error, Result, WeightMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    RandomNormalized,
    PowerRows,
    User,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::RandomNormalized => "random_normalized",
            Kind::PowerRows => "power_rows",
            Kind::User => "user",
        })
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "random_normalized" | "random" => Ok(Kind::RandomNormalized),
            "power_rows" | "power" => Ok(Kind::PowerRows),
            "user" => Ok(Kind::User),
            _ => Err(Error::validation(format!("unknown instance kind {s:?}"))),
        }
    }
}

/// Matrix, vector and origin of one test case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub matrix: Vec<Vec<f64>>,
    pub x: Vec<f64>,
    pub seed: u64,
    pub kind: Kind,
    /// Row exponents of a `power_rows` instance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exponents: Option<Vec<f64>>,
}

impl Instance {
    /// Checks dimensions and finiteness. Row monotonicity is left to the
    /// theorems that need it.
    pub fn validate(&self) -> Result<WeightMatrix> {
        if self.n == 0 || self.big_n < self.n {
            return Err(Error::validation(format!(
                "dimensions need 1 <= n <= N, got n = {}, N = {}",
                self.n, self.big_n
            )));
        }
        Error::check_len(self.n, self.matrix.len())?;
        Error::check_len(self.n, self.x.len())?;
        let m = WeightMatrix::from_rows(self.matrix.clone())?;
        Error::check_len(self.big_n, m.cols())?;
        if let Some(p) = &self.exponents {
            Error::check_len(self.n, p.len())?;
        }
        Ok(m)
    }

    pub fn weight_matrix(&self) -> Result<WeightMatrix> {
        self.validate()
    }

    /// Row functions `t^{p_i}` of a `power_rows` instance.
    pub fn power_functions(&self) -> Option<Result<Vec<OrliczFunction>>> {
        self.exponents.as_ref().map(|ps| power_functions(ps))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("instances serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Instance =
            serde_json::from_str(text).map_err(|e| Error::validation(format!("malformed instance: {e}")))?;
        inst.validate()?;
        Ok(inst)
    }
}

/// `M_i(t) = t^{p_i}`.
pub fn power_functions(exponents: &[f64]) -> Result<Vec<OrliczFunction>> {
    exponents
        .iter()
        .map(|&p| PowerOrlicz::new(p, 1.0).map(OrliczFunction::from))
        .collect()
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of the `index`-th instance of a campaign.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    trial_rng(base ^ 0x005e_ed0f_ca4a_a1e5, index).next_u64()
}

/// Entries uniform in `[-1, 1]`.
pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
}

/// `n × cols` matrix with positive entries, rows sorted decreasing and
/// scaled to sum 1.
pub fn random_normalized_matrix<R: Rng>(rng: &mut R, n: usize, cols: usize) -> Result<WeightMatrix> {
    let mut data = Vec::with_capacity(n * cols);
    for _ in 0..n {
        let mut row: Vec<f64> = (0..cols).map(|_| 1.0 - rng.random::<f64>()).collect();
        row.sort_by(|a, b| b.total_cmp(a));
        let s: f64 = row.iter().sum();
        data.extend(row.into_iter().map(|v| v / s));
    }
    WeightMatrix::from_flat(n, cols, data)
}

/// Random nonincreasing positive rows without normalization, each row
/// scaled by a factor in `[0.2, 5]`.
pub fn random_decreasing_matrix<R: Rng>(rng: &mut R, n: usize) -> Result<WeightMatrix> {
    let base = random_normalized_matrix(rng, n, n)?;
    let mut data = base.as_slice().to_vec();
    for row in data.chunks_exact_mut(n) {
        let f: f64 = rng.random_range(0.2..=5.0) * n as f64;
        row.iter_mut().for_each(|v| *v *= f);
    }
    WeightMatrix::from_flat(n, n, data)
}

/// Generates an instance.
///
/// `random_normalized` draws an `n × N` matrix with unit row sums.
/// `power_rows` draws exponents in `p_range` and builds the `n × n` matrix
/// from `t^{p_i}`; the scaled variant keeps row sums `n`, the row-sum variant
/// divides by `n`.
pub fn generate(
    n: usize,
    big_n: usize,
    kind: Kind,
    seed: u64,
    variant: Variant,
    p_range: (f64, f64),
) -> Result<Instance> {
    if n == 0 || big_n < n {
        return Err(Error::validation(format!(
            "dimensions need 1 <= n <= N, got n = {n}, N = {big_n}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let (matrix, exponents) = match kind {
        Kind::RandomNormalized => (random_normalized_matrix(&mut rng, n, big_n)?, None),
        Kind::PowerRows => {
            if big_n != n {
                return Err(Error::validation("power_rows instances are square (N = n)"));
            }
            let (lo, hi) = p_range;
            if !(1.0 <= lo && lo <= hi && hi.is_finite()) {
                return Err(Error::validation(format!("invalid exponent range [{lo}, {hi}]")));
            }
            let ps: Vec<f64> = (0..n)
                .map(|_| if lo == hi { lo } else { rng.random_range(lo..=hi) })
                .collect();
            let y = matrix_from_functions(&power_functions(&ps)?)?;
            let y = match variant {
                Variant::ScaledByN => y,
                Variant::RowsumNormalized => y.scaled(1.0 / n as f64)?,
            };
            (y, Some(ps))
        }
        Kind::User => return Err(Error::validation("user instances are not generated")),
    };
    let x = random_vector(&mut rng, n);
    Ok(Instance {
        n,
        big_n,
        matrix: matrix.to_rows(),
        x,
        seed,
        kind,
        exponents,
    })
}

/// A point on the boundary of the unit ball of `space`: a random direction
/// divided by its norm.
pub fn boundary_point<R: Rng>(rng: &mut R, space: &MusielakSpace) -> Result<Vec<f64>> {
    loop {
        let v = random_vector(rng, space.dim());
        let norm = space.luxemburg_norm(&v)?;
        if norm > 0.0 {
            return Ok(v.into_iter().map(|c| c / norm).collect());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let a = generate(3, 3, Kind::RandomNormalized, 7, Variant::RowsumNormalized, (1.0, 4.0)).unwrap();
        let b = generate(3, 3, Kind::RandomNormalized, 7, Variant::RowsumNormalized, (1.0, 4.0)).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let c = generate(3, 3, Kind::RandomNormalized, 8, Variant::RowsumNormalized, (1.0, 4.0)).unwrap();
        assert_ne!(a.to_json(), c.to_json());
    }

    #[test]
    fn rectangular_random_rows() {
        let inst = generate(4, 6, Kind::RandomNormalized, 1, Variant::RowsumNormalized, (1.0, 4.0)).unwrap();
        let m = inst.validate().unwrap();
        assert_eq!((m.rows(), m.cols()), (4, 6));
        m.require_unit_row_sums(1e-9).unwrap();
        assert!(m.rows_decreasing());
    }

    #[test]
    fn unit_exponents_give_constant_rows() {
        let inst = generate(4, 4, Kind::PowerRows, 3, Variant::ScaledByN, (1.0, 1.0)).unwrap();
        assert!(inst.matrix.iter().flatten().all(|&v| (v - 1.0).abs() <= 1e-12));
        let inst = generate(4, 4, Kind::PowerRows, 3, Variant::RowsumNormalized, (1.0, 1.0)).unwrap();
        assert!(inst.matrix.iter().flatten().all(|&v| (v - 0.25).abs() <= 1e-12));
        assert_eq!(inst.exponents, Some(vec![1.0; 4]));
    }

    #[test]
    fn invalid_requests() {
        assert!(generate(0, 3, Kind::RandomNormalized, 1, Variant::ScaledByN, (1.0, 4.0)).is_err());
        assert!(generate(4, 3, Kind::RandomNormalized, 1, Variant::ScaledByN, (1.0, 4.0)).is_err());
        assert!(generate(3, 4, Kind::PowerRows, 1, Variant::ScaledByN, (1.0, 4.0)).is_err());
        assert!(generate(3, 3, Kind::User, 1, Variant::ScaledByN, (1.0, 4.0)).is_err());
        assert!(generate(3, 3, Kind::PowerRows, 1, Variant::ScaledByN, (0.5, 4.0)).is_err());
    }

    #[test]
    fn json_validation() {
        let inst = generate(2, 2, Kind::RandomNormalized, 5, Variant::RowsumNormalized, (1.0, 4.0)).unwrap();
        let text = inst.to_json();
        assert!(text.contains(r#""N":2"#) && text.contains(r#""kind":"random_normalized""#));
        assert_eq!(Instance::from_json(&text).unwrap(), inst);
        let increasing = r#"{"n":2,"N":2,"matrix":[[0.2,0.8],[0.5,0.5]],"x":[1,1],"seed":0,"kind":"user"}"#;
        assert!(!Instance::from_json(increasing).unwrap().weight_matrix().unwrap().rows_decreasing());
        let wide = r#"{"n":2,"N":1,"matrix":[[0.2],[0.5]],"x":[1,1],"seed":0,"kind":"user"}"#;
        assert!(Instance::from_json(wide).is_err());
        let short = r#"{"n":2,"N":2,"matrix":[[0.5,0.5]],"x":[1,1],"seed":0,"kind":"user"}"#;
        assert!(Instance::from_json(short).is_err());
        assert!(Instance::from_json("{").is_err());
    }

    #[test]
    fn boundary_points_have_unit_norm() {
        let inst = generate(3, 3, Kind::RandomNormalized, 2, Variant::RowsumNormalized, (1.0, 4.0)).unwrap();
        let g = crate::generation::functions_from_matrix(
            &inst.weight_matrix().unwrap(),
            Variant::RowsumNormalized,
            crate::generation::Side::Primal,
        )
        .unwrap();
        let mut rng = seeded_rng(4);
        let x = boundary_point(&mut rng, &g.space).unwrap();
        let m = g.space.modular(&x, 1.0).unwrap();
        assert!(m <= 1.0 + 1e-12 && m > 1.0 - 1e-8, "{m}");
        assert_eq!("power-rows".parse::<Kind>().unwrap(), Kind::PowerRows);
    }
}
