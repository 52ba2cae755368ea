use clap::ValueEnum;

use musielak::approx::verify_lemma51;
use musielak::combinat::ks_bounds;
use musielak::generation::{
    ball_b_vertices, decompose_lemma31, functions_from_matrix, verify_converse, verify_sandwich, Side, Variant,
    DEFAULT_VERTEX_LIMIT,
};
use musielak::instance::{Instance, Kind};
use musielak::par::{map_slice, Execution};
use musielak::report::{sandwich_holds, Report};
use musielak::{Error, Result, EPS};

use crate::{AverageArgs, CliResult, Failure};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    #[value(name = "thm2.1")]
    Thm21,
    #[value(name = "thm3.2")]
    Thm32,
    #[value(name = "thm3.3")]
    Thm33,
    #[value(name = "thm4.1")]
    Thm41,
    #[value(name = "lemma3.1")]
    Lemma31,
    #[value(name = "lemma5.1")]
    Lemma51,
}

impl Theorem {
    pub fn name(self) -> &'static str {
        match self {
            Theorem::Thm21 => "thm2.1",
            Theorem::Thm32 => "thm3.2",
            Theorem::Thm33 => "thm3.3",
            Theorem::Thm41 => "thm4.1",
            Theorem::Lemma31 => "lemma3.1",
            Theorem::Lemma51 => "lemma5.1",
        }
    }

    pub fn default_kind(self) -> Kind {
        match self {
            Theorem::Thm41 => Kind::PowerRows,
            _ => Kind::RandomNormalized,
        }
    }

    pub fn default_variant(self) -> Variant {
        match self {
            Theorem::Thm33 | Theorem::Thm41 => Variant::ScaledByN,
            _ => Variant::RowsumNormalized,
        }
    }
}

pub struct Options {
    pub theorem: Theorem,
    pub side: Side,
    pub average: AverageArgs,
}

/// Verifies every instance; reports keep the input order.
pub fn campaign(opts: &Options, instances: &[Instance]) -> CliResult<Vec<Report>> {
    map_slice(Execution::Parallel, instances, |inst| check(opts, inst))
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| {
                let which = if instances.len() > 1 {
                    format!("instance {i} (seed {}): ", instances[i].seed)
                } else {
                    String::new()
                };
                Failure::Input(format!("{which}{e}"))
            })
        })
        .collect()
}

fn check(opts: &Options, inst: &Instance) -> Result<Report> {
    let y = inst.weight_matrix()?;
    let request = opts.average.request(inst.seed);
    let x = &inst.x;
    let mut report = match opts.theorem {
        Theorem::Thm21 => {
            let estimate = request.estimate(x, &y)?;
            let l = ks_bounds(x, &y)?.upper;
            Report {
                theorem: "thm2.1".into(),
                n: inst.n,
                a: estimate.value,
                l,
                c_low: 0.5,
                c_high: 1.0,
                pass: sandwich_holds(&estimate, l, 0.5, 1.0),
                method: request.method().as_str().into(),
                seed: None,
                detail: None,
            }
        }
        Theorem::Thm32 => verify_sandwich(x, &y, Variant::RowsumNormalized, opts.side, request)?,
        Theorem::Thm33 => verify_sandwich(x, &y, Variant::ScaledByN, opts.side, request)?,
        Theorem::Thm41 => {
            let functions = match inst.power_functions() {
                Some(fs) => fs?,
                None => functions_from_matrix(&y, Variant::ScaledByN, Side::Primal)?
                    .space
                    .functions()
                    .to_vec(),
            };
            verify_converse(&functions, x, request)?
        }
        Theorem::Lemma31 => ball_inclusion(inst, opts.side)?,
        Theorem::Lemma51 => verify_lemma51(&y, x)?,
    };
    report.seed = Some(inst.seed);
    Ok(report)
}

/// `A` is the largest modular over the vertices of `B` (window `[0, 1]`);
/// the witness for `x / ‖x‖` must also validate.
fn ball_inclusion(inst: &Instance, side: Side) -> Result<Report> {
    let y = inst.weight_matrix()?;
    let g = functions_from_matrix(&y, Variant::RowsumNormalized, side)?;
    let n = g.n();
    let mut notes = Vec::new();
    let worst = if n <= DEFAULT_VERTEX_LIMIT {
        let vertices = ball_b_vertices(&g.source, true)?;
        notes.push(format!("{} vertices", vertices.len()));
        vertices
            .iter()
            .map(|v| g.space.modular(v, 1.0))
            .try_fold(0.0f64, |m, r| r.map(|v| m.max(v)))?
    } else {
        notes.push("vertex check skipped (n > 6)".into());
        0.0
    };
    let norm = g.space.luxemburg_norm(&inst.x)?;
    let point: Vec<f64> = if norm > 0.0 {
        inst.x.iter().map(|v| v / norm).collect()
    } else {
        inst.x.clone()
    };
    let witness = decompose_lemma31(&g, &point)?;
    let valid = witness.validate(&g, &point);
    match &valid {
        Ok(()) => notes.push(format!("witness valid, J = {:?}, k = {:?}", witness.j, witness.k)),
        Err(Error::Validation(msg)) => notes.push(msg.clone()),
        Err(e) => notes.push(e.to_string()),
    }
    Ok(Report {
        theorem: "lemma3.1".into(),
        n,
        a: worst,
        l: 1.0,
        c_low: 0.0,
        c_high: 1.0,
        pass: worst <= 1.0 + EPS && valid.is_ok(),
        method: "exact".into(),
        seed: None,
        detail: Some(notes.join("; ")),
    })
}
