//! The composition-maximum norm
//!
//! `‖x‖_a = max_{Σ ℓ_i ≤ N} Σ_i (Σ_{j≤ℓ_i} a_ij) |x_i|` for an `n × N` matrix
//! with nonincreasing positive rows. It is within a factor 2 of the
//! Musielak-Orlicz norm whose conjugate functions satisfy
//! `M_i*(Σ_{j≤m} a_ij) = m/N`.

use crate::musielak::MusielakSpace;
use crate::orlicz::{OrliczFunction, PiecewiseOrlicz};
use crate::report::{ratio_holds, Report};
use crate::{Error, Result, WeightMatrix};

/// Largest number of compositions [`a_norm_bruteforce`] will visit.
pub const BRUTEFORCE_LIMIT: u64 = 1_000_000;

fn check(a: &WeightMatrix, x: &[f64]) -> Result<()> {
    Error::check_len(a.rows(), x.len())?;
    a.require_rows_decreasing()?;
    if a.rows() > a.cols() {
        return Err(Error::validation(format!(
            "need n <= N, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("vector entries must be finite"));
    }
    Ok(())
}

/// `Σ_i |x_i| · (Σ_{j≤ℓ_i} a_ij)`, the objective for one composition.
pub fn composition_value(a: &WeightMatrix, x: &[f64], ell: &[usize]) -> f64 {
    ell.iter()
        .enumerate()
        .map(|(i, &l)| x[i].abs() * a.row(i)[..l].iter().sum::<f64>())
        .sum()
}

/// The maximizing composition: the `N` largest products `|x_i| a_ij`, ties
/// broken by row then column so each row contributes a prefix.
pub fn a_norm_composition(a: &WeightMatrix, x: &[f64]) -> Result<Vec<usize>> {
    check(a, x)?;
    let (n, cols) = (a.rows(), a.cols());
    let value = |idx: usize| x[idx / cols].abs() * a.as_slice()[idx];
    let mut order: Vec<usize> = (0..n * cols).collect();
    let cmp = |&p: &usize, &q: &usize| value(q).total_cmp(&value(p)).then(p.cmp(&q));
    if cols < order.len() {
        order.select_nth_unstable_by(cols - 1, cmp);
    }
    let mut ell = vec![0usize; n];
    for &idx in &order[..cols] {
        ell[idx / cols] += 1;
    }
    Ok(ell)
}

/// `‖x‖_a` by top-`N` selection.
pub fn a_norm(a: &WeightMatrix, x: &[f64]) -> Result<f64> {
    let ell = a_norm_composition(a, x)?;
    Ok(composition_value(a, x, &ell))
}

/// `‖x‖_a` by visiting every composition; a reference for tests.
pub fn a_norm_bruteforce(a: &WeightMatrix, x: &[f64]) -> Result<f64> {
    check(a, x)?;
    let (n, cols) = (a.rows(), a.cols());
    let count = composition_count(n, cols);
    if count > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge {
            what: "brute-force composition count",
            n: count.min(usize::MAX as u64) as usize,
            limit: BRUTEFORCE_LIMIT as usize,
            hint: "",
        });
    }
    let mut best = 0.0f64;
    let mut ell = vec![0usize; n];
    visit(&mut ell, 0, cols, &mut |ell| {
        best = best.max(composition_value(a, x, ell));
    });
    Ok(best)
}

/// Number of `(ℓ_1..ℓ_n)`, `ℓ_i ≥ 0`, with `Σ ℓ_i ≤ budget`: `C(budget + n, n)`.
fn composition_count(n: usize, budget: usize) -> u64 {
    let mut c: u128 = 1;
    for k in 1..=n as u128 {
        c = c * (budget as u128 + k) / k;
        if c > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    c as u64
}

fn visit(ell: &mut Vec<usize>, i: usize, budget: usize, f: &mut dyn FnMut(&[usize])) {
    if i == ell.len() {
        f(ell);
        return;
    }
    for l in 0..=budget {
        ell[i] = l;
        visit(ell, i + 1, budget - l, f);
    }
    ell[i] = 0;
}

/// The space of `M_i = (M_i*)*` where `M_i*` interpolates
/// `M_i*(Σ_{j≤m} a_ij) = m/N`.
pub fn approximated_space(a: &WeightMatrix) -> Result<MusielakSpace> {
    a.require_rows_decreasing()?;
    let fs = a
        .iter_rows()
        .map(|row| {
            PiecewiseOrlicz::from_decreasing_weights(row, 1.0)
                .map(|dual| OrliczFunction::Piecewise(dual.conjugate()))
        })
        .collect::<Result<Vec<_>>>()?;
    MusielakSpace::new(fs)
}

/// Checks `(1/2)‖x‖_a ≤ ‖x‖_{ΣM_i} ≤ 2‖x‖_a`.
///
/// Report fields: `A = ‖x‖_{ΣM_i}`, `L = ‖x‖_a`.
pub fn verify_lemma51(a: &WeightMatrix, x: &[f64]) -> Result<Report> {
    check(a, x)?;
    a.require_unit_row_sums(crate::generation::ROW_SUM_TOL)?;
    let a = a.normalize_rows()?;
    let space = approximated_space(&a)?;
    let mo = space.luxemburg_norm(x)?;
    let an = a_norm(&a, x)?;
    Ok(Report {
        theorem: "lemma5.1".into(),
        n: a.rows(),
        a: mo,
        l: an,
        c_low: 0.5,
        c_high: 2.0,
        pass: ratio_holds(mo, an, 0.5, 2.0),
        method: "exact".into(),
        seed: None,
        detail: Some(format!("N = {}", a.cols())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn m(rows: &[&[f64]]) -> WeightMatrix {
        WeightMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn two_by_two_by_hand() {
        let a = m(&[&[0.7, 0.3], &[0.6, 0.4]]);
        assert_abs_diff_eq!(a_norm(&a, &[1.0, 1.0]).unwrap(), 1.3, epsilon = 1e-15);
        assert_eq!(a_norm_composition(&a, &[1.0, 1.0]).unwrap(), vec![1, 1]);
        assert_eq!(a_norm(&a, &[1.0, 1.0]).unwrap(), a_norm_bruteforce(&a, &[1.0, 1.0]).unwrap());
    }

    #[test]
    fn single_coordinate() {
        let a = m(&[&[0.5, 0.3, 0.2], &[0.4, 0.4, 0.2]]);
        assert_abs_diff_eq!(a_norm(&a, &[-2.0, 0.0]).unwrap(), 2.0, epsilon = 1e-15);
        let one = m(&[&[0.5, 0.3, 0.2]]);
        assert_abs_diff_eq!(a_norm_bruteforce(&one, &[3.0]).unwrap(), 3.0, epsilon = 1e-15);
        assert_eq!(a_norm_bruteforce(&a, &[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(a_norm(&a, &[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn equal_rows_give_max_norm() {
        let a = WeightMatrix::constant(3, 3, 1.0 / 3.0).unwrap();
        let x = [0.2, -0.9, 0.5];
        assert_abs_diff_eq!(a_norm(&a, &x).unwrap(), 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(a_norm_bruteforce(&a, &x).unwrap(), 0.9, epsilon = 1e-15);
    }

    #[test]
    fn ties_stay_prefix_closed() {
        let a = m(&[&[0.25, 0.25, 0.25, 0.25], &[0.25, 0.25, 0.25, 0.25]]);
        let ell = a_norm_composition(&a, &[1.0, 1.0]).unwrap();
        assert_eq!(ell.iter().sum::<usize>(), 4);
        assert_eq!(ell, vec![4, 0]);
    }

    #[test]
    fn dimension_checks() {
        let a = m(&[&[0.5, 0.5], &[0.5, 0.5], &[0.5, 0.5]]);
        assert!(a_norm(&a, &[1.0, 1.0, 1.0]).is_err());
        let a = m(&[&[0.5, 0.5]]);
        assert!(a_norm(&a, &[1.0, 1.0]).is_err());
        let a = WeightMatrix::constant(6, 40, 0.025).unwrap();
        assert!(a_norm_bruteforce(&a, &[1.0; 6]).is_err());
        assert_eq!(composition_count(2, 2), 6);
        assert_eq!(composition_count(3, 3), 20);
    }

    #[test]
    fn lemma_on_equal_rows() {
        // M_i*(t) = t, so M_i is the indicator of [0, 1] and both norms are
        // the max norm
        let a = WeightMatrix::constant(2, 2, 0.5).unwrap();
        let r = verify_lemma51(&a, &[1.0, 0.7]).unwrap();
        assert!((r.a - 1.0).abs() <= 1e-9);
        assert_abs_diff_eq!(r.l, 1.0, epsilon = 1e-15);
        assert!(r.pass);
        let r = verify_lemma51(&a, &[1.0, 0.0]).unwrap();
        assert!(r.pass);
        assert!((r.a - 1.0).abs() <= 1e-9);

        let bad = m(&[&[0.6, 0.5], &[0.5, 0.5]]);
        assert!(verify_lemma51(&bad, &[1.0, 1.0]).is_err());
    }
}
