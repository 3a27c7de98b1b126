use std::path::Path;

use bscount::bsengine::{count_bs, count_direct, hs_count_bound_check, rank_one_domination};
use bscount::efimov::{cutoff_stability, level_ratios, s0_oracle, trimer_count, trimer_levels};
use bscount::iterbs::{iterate, random_iterbs_instance};
use bscount::linop::{count_evs, spectral_decompose, Relation, SymOperator};
use bscount::radial::{find_critical_coupling_radial, radial_counts, resolvent_power_kernel, schwinger_bound_check};
use bscount::sample::{
    instance_seed, random_bs_problem, random_orthogonal, random_symmetric, random_unit_vector, rng, with_spectrum,
    InstanceOptions, PerturbationSign,
};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Command, RunConfig, Suite};
use crate::report::{Cell, Check, Report, Table};

/// Failure that prevents a report from being produced.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{stage}: {source}")]
    Numerical {
        stage: &'static str,
        #[source]
        source: bscount::Error,
    },
    #[error("{0}")]
    Input(String),
}

fn numerical(stage: &'static str) -> impl Fn(bscount::Error) -> RunError {
    move |source| RunError::Numerical { stage, source }
}

/// Executes the configured pipeline. `base` resolves relative input paths.
pub fn execute(cfg: &RunConfig, base: &Path) -> Result<Report, RunError> {
    match cfg.command {
        Command::Verify => Ok(verify(cfg)),
        Command::Twobody => twobody(cfg, base),
        Command::Kernelcheck => kernelcheck(cfg),
        Command::IterbsDemo => iterbs_demo(cfg),
        Command::Efimov => efimov(cfg),
    }
}

struct Row {
    suite: &'static str,
    index: usize,
    seed: u64,
    dim: usize,
    a: Cell,
    b: Cell,
    pass: bool,
}

fn tally(rows: &[Row], suite: &'static str) -> Check {
    let mine: Vec<&Row> = rows.iter().filter(|r| r.suite == suite).collect();
    let passed = mine.iter().filter(|r| r.pass).count();
    Check::new(suite, passed == mine.len(), format!("{passed}/{} pass", mine.len()))
}

fn verify(cfg: &RunConfig) -> Report {
    let v = &cfg.verify;
    let seed = cfg.seed;
    let opts = |i: usize, zero_mode: bool| InstanceOptions {
        min_dim: v.min_dim,
        max_dim: v.max_dim,
        zero_mode,
        sign: if i.is_multiple_of(2) {
            PerturbationSign::NonPositive
        } else {
            PerturbationSign::Indefinite
        },
    };
    let bs = |suite: &'static str, salt: u64, zero_mode: bool, strict: bool| {
        (0..v.instances)
            .into_par_iter()
            .map(move |i| {
                let s = instance_seed(seed ^ salt, i as u64);
                let p = random_bs_problem(&mut rng(s), &opts(i, zero_mode));
                let direct = count_direct(&p);
                let via_bs = count_bs(&p).ok();
                let pass = via_bs.is_some_and(|c| if strict { c == direct } else { c >= direct });
                Row {
                    suite,
                    index: i,
                    seed: s,
                    dim: p.dim(),
                    a: via_bs.map_or(Cell::Empty, Cell::from),
                    b: direct.into(),
                    pass,
                }
            })
            .collect::<Vec<_>>()
    };
    let lemma = |suite: &'static str, salt: u64, f: fn(&mut bscount::sample::SeededRng) -> (usize, f64, f64, bool)| {
        (0..v.lemma_instances)
            .into_par_iter()
            .map(move |i| {
                let s = instance_seed(seed ^ salt, i as u64);
                let (dim, a, b, pass) = f(&mut rng(s));
                Row {
                    suite,
                    index: i,
                    seed: s,
                    dim,
                    a: a.into(),
                    b: b.into(),
                    pass,
                }
            })
            .collect::<Vec<_>>()
    };
    let mut rows = Vec::new();
    for &suite in &v.suites {
        rows.extend(match suite {
            Suite::BsEquality => bs("bs_equality", 0, false, true),
            Suite::BsInequality => bs("bs_inequality", 0x5EED_0001, true, false),
            Suite::IterbsInvariance => iterbs_rows(seed, v.iterbs_instances),
            Suite::HsBound => lemma("hs_bound", 0x5EED_0003, hs_instance),
            Suite::HsExtremal => lemma("hs_extremal", 0x5EED_0004, hs_extremal_instance),
            Suite::Domination => lemma("domination", 0x5EED_0005, domination_instance),
        });
    }

    let mut table = Table::new(&["suite", "index", "seed", "dim", "value_a", "value_b", "pass"]);
    for r in &rows {
        table.push(vec![
            r.suite.into(),
            r.index.into(),
            Cell::Text(r.seed.to_string()),
            r.dim.into(),
            r.a.clone(),
            r.b.clone(),
            r.pass.into(),
        ]);
    }
    let checks: Vec<Check> = v.suites.iter().map(|s| tally(&rows, s.name())).collect();
    let results = json!({
        "columns": {
            "bs_equality": ["count_bs", "count_direct"],
            "bs_inequality": ["count_bs", "count_direct"],
            "iterbs_invariance": ["base_count", "max_consistency_residual"],
            "hs_bound": ["n", "bound"],
            "hs_extremal": ["n", "bound"],
            "domination": ["max_eigenvalue", "c"],
        }
    });
    Report { table, checks, results }
}

fn iterbs_rows(seed: u64, instances: usize) -> Vec<Row> {
    (0..instances)
        .into_par_iter()
        .map(|i| {
            let s = instance_seed(seed ^ 0x5EED_0002, i as u64);
            let mut r = rng(s);
            let n = r.random_range(6..=16);
            let steps = r.random_range(1..=3);
            let (k, plan) = random_iterbs_instance(&mut r, n, steps);
            let base = count_evs(&k, Relation::Greater, 1.0);
            let (pass, worst) = match iterate(&k, &plan) {
                Ok(stages) => {
                    let worst = stages.iter().map(|s| s.consistency_residual).fold(0.0, f64::max);
                    (
                        stages.iter().all(|s| s.count_above_one == base) && worst <= 1e-8,
                        Some(worst),
                    )
                }
                Err(_) => (false, None),
            };
            Row {
                suite: "iterbs_invariance",
                index: i,
                seed: s,
                dim: n,
                a: base.into(),
                b: worst.into(),
                pass,
            }
        })
        .collect()
}

fn hs_instance(r: &mut bscount::sample::SeededRng) -> (usize, f64, f64, bool) {
    let n = r.random_range(2..=20);
    let a = random_symmetric(r, n);
    let delta = 0.2 + r.random::<f64>();
    let Ok(dec) = spectral_decompose(&a) else {
        return (n, f64::NAN, f64::NAN, false);
    };
    let vectors: Vec<DVector<f64>> = (0..n)
        .filter(|&j| dec.eigenvalues[j].abs() >= delta)
        .map(|j| dec.eigenvector(j))
        .collect();
    match hs_count_bound_check(&a, delta, &vectors) {
        Ok(b) => (n, b.n as f64, b.bound, b.holds),
        Err(_) => (n, vectors.len() as f64, f64::NAN, false),
    }
}

fn hs_extremal_instance(r: &mut bscount::sample::SeededRng) -> (usize, f64, f64, bool) {
    let n = r.random_range(2..=20);
    let rank = r.random_range(1..=n);
    let delta = 0.1 + 3.0 * r.random::<f64>();
    let q = random_orthogonal(r, n);
    let basis: Vec<DVector<f64>> = (0..rank).map(|j| q.column(j).into_owned()).collect();
    let p = basis
        .iter()
        .fold(DMatrix::zeros(n, n), |acc, v| acc + v * v.transpose());
    let Ok(a) = SymOperator::symmetrize(p * delta) else {
        return (n, rank as f64, f64::NAN, false);
    };
    match hs_count_bound_check(&a, delta, &basis) {
        Ok(b) => (
            n,
            b.n as f64,
            b.bound,
            b.n == rank && (b.bound - rank as f64).abs() <= 1e-9,
        ),
        Err(_) => (n, rank as f64, f64::NAN, false),
    }
}

fn domination_instance(r: &mut bscount::sample::SeededRng) -> (usize, f64, f64, bool) {
    let n = r.random_range(2..=20);
    let spec: Vec<f64> = (0..n).map(|_| 10.0 * r.random::<f64>()).collect();
    let a = with_spectrum(r, &spec);
    let f = random_unit_vector(r, n);
    let eps0 = 0.01 + r.random::<f64>();
    let c = 0.05 + 1.5 * r.random::<f64>();
    match rank_one_domination(&f, &a, eps0, c) {
        Ok(d) => (n, d.max_eigenvalue, c, d.max_eigenvalue <= c),
        Err(_) => (n, f64::NAN, c, false),
    }
}

fn twobody(cfg: &RunConfig, base: &Path) -> Result<Report, RunError> {
    let pot = cfg.potential_spec(base).map_err(RunError::Input)?;
    let cases: Vec<(u32, f64)> = cfg
        .scan
        .ells
        .iter()
        .flat_map(|&l| cfg.scan.epsilons.iter().map(move |&e| (l, e)))
        .collect();
    let counts = cases
        .par_iter()
        .map(|&(ell, eps)| radial_counts(&pot, &cfg.radial_grid(ell)?, eps))
        .collect::<bscount::Result<Vec<_>>>()
        .map_err(numerical("radial counts"))?;
    let mut table = Table::new(&["ell", "epsilon", "count_direct", "count_bs"]);
    let mut agree = 0;
    for (&(ell, eps), c) in cases.iter().zip(&counts) {
        table.push(vec![ell.into(), eps.into(), c.direct.into(), c.bs.into()]);
        agree += usize::from(c.direct == c.bs);
    }
    let mut checks = vec![Check::new(
        "direct_bs_agree",
        agree == cases.len(),
        format!("{agree}/{} cases", cases.len()),
    )];
    let mut results = json!({ "potential": pot.attractive.kind.name() });

    if cfg.scan.critical {
        let mut crit = Vec::new();
        for &ell in &cfg.scan.ells {
            let grid = cfg.radial_grid(ell).map_err(numerical("grid"))?;
            match find_critical_coupling_radial(&pot.with_strength(1.0), &grid, cfg.scan.critical_tol) {
                Ok(r) => crit
                    .push(json!({ "ell": ell, "lambda_star": r.lambda_star, "bracket": [r.bracket.0, r.bracket.1] })),
                Err(e) => {
                    checks.push(Check::new("critical_coupling", false, format!("ℓ = {ell}: {e}")));
                }
            }
        }
        if checks.iter().all(|c| c.name != "critical_coupling") {
            checks.push(Check::new("critical_coupling", true, format!("{} waves", crit.len())));
        }
        results["critical_coupling"] = json!(crit);
    }
    if cfg.scan.schwinger {
        let grid = cfg.radial_grid(0).map_err(numerical("grid"))?;
        match schwinger_bound_check(&pot, &grid) {
            Ok(s) => {
                checks.push(Check::new(
                    "schwinger_bound",
                    s.holds(),
                    format!("{} ≤ {:.6}", s.count_total, s.bound),
                ));
                results["schwinger"] = json!({
                    "counts": s.counts, "count_total": s.count_total, "rollnik": s.rollnik, "bound": s.bound,
                });
            }
            Err(e) => checks.push(Check::new("schwinger_bound", false, e.to_string())),
        }
    }
    Ok(Report { table, checks, results })
}

fn kernelcheck(cfg: &RunConfig) -> Result<Report, RunError> {
    let k = &cfg.kernel;
    let cases: Vec<(f64, f64, f64)> = k
        .gammas
        .iter()
        .flat_map(|&g| {
            k.epsilons
                .iter()
                .flat_map(move |&e| k.radii.iter().map(move |&r| (g, e, r)))
        })
        .collect();
    let values = cases
        .par_iter()
        .map(|&(g, e, r)| resolvent_power_kernel(g, e, r))
        .collect::<bscount::Result<Vec<_>>>()
        .map_err(numerical("resolvent kernel"))?;
    let mut table = Table::new(&[
        "gamma",
        "epsilon",
        "r",
        "value",
        "alt_value",
        "bound",
        "closed_form",
        "holds",
    ]);
    let (mut holds, mut agree, mut exact, mut n_exact) = (0, 0, 0, 0);
    let mut worst_free: f64 = 0.0;
    for (&(g, e, r), v) in cases.iter().zip(&values) {
        let closed = (g == 0.0).then(|| (-e.sqrt() * r).exp() / (4.0 * std::f64::consts::PI * r));
        if let Some(c) = closed {
            n_exact += 1;
            let rel = (v.value / c - 1.0).abs();
            worst_free = worst_free.max(rel);
            exact += usize::from(rel <= 1e-6);
        }
        holds += usize::from(v.holds());
        agree += usize::from((v.value / v.alt_value - 1.0).abs() <= 1e-8);
        table.push(vec![
            g.into(),
            e.into(),
            r.into(),
            v.value.into(),
            v.alt_value.into(),
            v.bound.into(),
            closed.into(),
            v.holds().into(),
        ]);
    }
    let n = cases.len();
    let checks = vec![
        Check::new("kernel_bound", holds == n, format!("{holds}/{n}")),
        Check::new("routes_agree", agree == n, format!("{agree}/{n}")),
        Check::new(
            "free_resolvent",
            exact == n_exact,
            format!("{exact}/{n_exact}, worst {worst_free:.3e}"),
        ),
    ];
    Ok(Report {
        table,
        checks,
        results: json!({ "worst_free_relative_error": worst_free }),
    })
}

fn iterbs_demo(cfg: &RunConfig) -> Result<Report, RunError> {
    let (k, plan) = random_iterbs_instance(&mut rng(cfg.seed), cfg.iterbs.dim, cfg.iterbs.steps);
    let stages = iterate(&k, &plan).map_err(numerical("iterate"))?;
    let base = count_evs(&k, Relation::Greater, 1.0);
    let mut table = Table::new(&["k", "count", "hs_norm_Mk", "consistency_residual"]);
    for s in &stages {
        table.push(vec![
            s.k.into(),
            s.count_above_one.into(),
            s.hs_norm_m.into(),
            s.consistency_residual.into(),
        ]);
    }
    let worst = stages.iter().map(|s| s.consistency_residual).fold(0.0, f64::max);
    let constant = stages.iter().all(|s| s.count_above_one == base);
    let checks = vec![
        Check::new("count_invariance", constant, format!("base count {base}")),
        Check::new(
            "recurrence_consistency",
            worst <= 1e-8,
            format!("max residual {worst:.3e}"),
        ),
    ];
    Ok(Report {
        table,
        checks,
        results: json!({ "dim": cfg.iterbs.dim, "steps": plan.len(), "base_count": base }),
    })
}

fn efimov(cfg: &RunConfig) -> Result<Report, RunError> {
    let model = cfg.separable_model().map_err(numerical("model"))?;
    let opts = cfg.scan_options();
    let levels = trimer_levels(&model, &opts).map_err(numerical("trimer scan"))?;
    let ratios = level_ratios(&levels);
    let cutoff = if cfg.model.cutoff_check && !levels.is_empty() {
        Some(cutoff_stability(&model, &opts, &levels).map_err(numerical("cutoff scan"))?)
    } else {
        None
    };
    let flags = cutoff.as_ref().map(|c| c.stable_levels(0.02));

    let mut table = Table::new(&["n", "E_n", "ratio", "cutoff_stability_flag"]);
    for (i, e) in levels.iter().enumerate() {
        table.push(vec![
            i.into(),
            (*e).into(),
            ratios.get(i).copied().into(),
            flags.as_ref().map_or(Cell::Empty, |f| f[i].into()),
        ]);
    }

    let (s0, oracle) = s0_oracle();
    let mut checks = Vec::new();
    let at_unitarity = (cfg.model.lambda_ratio - 1.0).abs() <= 1e-8;
    if at_unitarity {
        checks.push(Check::new(
            "levels_resolved",
            levels.len() >= 4,
            format!("{} levels", levels.len()),
        ));
        let tail: Vec<f64> = ratios.iter().rev().take(3).copied().collect();
        let spread = tail
            .iter()
            .fold(0.0f64, |m, a| tail.iter().fold(m, |m, b| m.max((a / b - 1.0).abs())));
        checks.push(Check::new(
            "geometric_tail",
            tail.len() == 3 && spread <= 0.05,
            format!("spread {spread:.3e} over {} ratios", tail.len()),
        ));
        let last = ratios.last().copied().unwrap_or(f64::NAN);
        checks.push(Check::new(
            "ratio_vs_oracle",
            (last / oracle - 1.0).abs() <= 0.1,
            format!("{last:.6} vs {oracle:.6}"),
        ));
        if let Some(c) = &cutoff {
            checks.push(Check::new(
                "cutoff_stability",
                c.shallow_ratios_stable(2, 0.02),
                format!("{:?}", c.ratio_shift.iter().rev().take(2).collect::<Vec<_>>()),
            ));
        }
    } else {
        let ceiling = opts.e_ceiling * model.beta * model.beta;
        let near = trimer_count(&model, ceiling).map_err(numerical("trimer count"))?;
        let far = trimer_count(&model, ceiling * 1e-6).map_err(numerical("trimer count"))?;
        checks.push(Check::new(
            "finite_spectrum",
            near == far && near == levels.len(),
            format!("N = {near} at {ceiling:e}, N = {far} at {:e}", ceiling * 1e-6),
        ));
    }
    let results = json!({
        "lambda_ratio": cfg.model.lambda_ratio,
        "levels": levels,
        "ratios": ratios,
        "s0": s0,
        "oracle_ratio": oracle,
        "cutoff_wide_levels": cutoff.as_ref().map(|c| c.wide.clone()),
    });
    Ok(Report { table, checks, results })
}
