use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use expander_forge_core::catalog::{
    find_group, load_catalog, shipped_catalog, verify_catalog, CatalogGroup, VerifySettings,
};
use expander_forge_core::expsum::{search_v, switching_bound, switching_sweep, tail_experiment};
use expander_forge_core::kazhdan::{kazhdan_interval, kazhdan_upper_opt};
use expander_forge_core::semidirect::{bfs_diameter, build_y, l1_lower_bound, DEFAULT_ORDER_CAP};
use expander_forge_core::spectral::{abelian_spectrum, dense_v0_spectrum};
use expander_forge_core::{FpVector, PrimeField};

use crate::args::{
    CertifyArgs, Command, Crosscheck, DiamArgs, GapArgs, KazhdanArgs, TailArgs, VerifyArgs,
};
use crate::config::{resolve_common, FileConfig, Resolved};
use crate::manifest::{CsvTable, Output, Status};

/// Tolerance for agreement between the character and dense spectra.
pub const CROSSCHECK_TOL: f64 = 1e-8;
/// Slack in the exhaustive switching sweep.
pub const SWITCHING_TOL: f64 = 1e-9;

/// Everything a command produces before it is wrapped into a manifest.
#[derive(Debug)]
pub struct Outcome {
    pub command: &'static str,
    pub common: Resolved,
    pub config: serde_json::Value,
    pub outputs: Vec<Output>,
    pub table: CsvTable,
    pub status: Status,
}

pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Certify(a) => certify(a),
        Command::Gap(a) => gap(a),
        Command::Diam(a) => diam(a),
        Command::Tail(a) => tail(a),
        Command::Verify(a) => verify(a),
        Command::Kazhdan(a) => kazhdan(a),
    }
}

fn setup(common: &crate::args::CommonArgs, keys: &[&str]) -> Result<(FileConfig, Resolved)> {
    let cfg = FileConfig::load(common.config.as_deref())?;
    cfg.check_keys(keys)?;
    let resolved = resolve_common(common, &cfg)?;
    Ok((cfg, resolved))
}

fn field(p: u64) -> Result<PrimeField> {
    PrimeField::new(p).with_context(|| format!("p = {p}"))
}

fn fmt_entries(v: &FpVector) -> String {
    v.entries()
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn certify(args: &CertifyArgs) -> Result<Outcome> {
    let (cfg, common) = setup(&args.common, &["n", "p", "threshold", "max_trials"])?;
    let n: usize = cfg.require(args.n, "n")?;
    let p: u64 = cfg.require(args.p, "p")?;
    let threshold = cfg.pick_or(args.threshold, "threshold", 0.5)?;
    let max_trials = cfg.pick_or(args.max_trials, "max_trials", 100)?;
    let config = json!({
        "n": n, "p": p, "threshold": threshold, "max_trials": max_trials, "seed": common.seed,
    });
    let outcome = search_v(&field(p)?, n, threshold, max_trials, common.seed)?;
    let cert = outcome.certificate();

    let mut table = CsvTable::new(vec![
        "status",
        "n",
        "p",
        "seed",
        "trials",
        "max_support_one",
        "spectral_bound",
        "u_argmax",
        "v",
    ]);
    table.push(vec![
        if outcome.is_found() {
            "found"
        } else {
            "failed"
        }
        .into(),
        n.to_string(),
        p.to_string(),
        common.seed.to_string(),
        outcome.trials().to_string(),
        cert.max_support_one.to_string(),
        cert.spectral_bound.to_string(),
        cert.u_argmax.to_string(),
        fmt_entries(&cert.v),
    ]);
    Ok(Outcome {
        command: "certify",
        outputs: vec![
            Output::new("expsum.search_v", config.clone(), &outcome)?,
            Output::new(
                "expsum.switching_bound",
                json!({ "max_support_one": threshold }),
                switching_bound(threshold),
            )?,
        ],
        common,
        config,
        table,
        status: Status::Ok,
    })
}

#[derive(Serialize)]
struct Bucket {
    lower: f64,
    upper: f64,
    count: usize,
}

fn histogram(values: &[f64], bins: usize) -> Vec<Bucket> {
    let width = 2.0 / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in values {
        let k = (((x + 1.0) / width).floor().max(0.0) as usize).min(bins - 1);
        counts[k] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| Bucket {
            lower: -1.0 + k as f64 * width,
            upper: -1.0 + (k + 1) as f64 * width,
            count,
        })
        .collect()
}

fn gap(args: &GapArgs) -> Result<Outcome> {
    let (cfg, common) = setup(&args.common, &["n", "p", "v", "crosscheck", "bins"])?;
    let p: u64 = cfg.require(args.p, "p")?;
    let v_flag: Option<Vec<i64>> = cfg.pick(args.v.clone(), "v")?;
    let n: usize = match (cfg.pick(args.n, "n")?, &v_flag) {
        (Some(n), Some(v)) if n != v.len() => {
            bail!("--n {n} does not match the {} entries of --v", v.len())
        }
        (Some(n), _) => n,
        (None, Some(v)) => v.len(),
        (None, None) => bail!("missing required value --n (or --v)"),
    };
    if n < 2 {
        bail!("n must be at least 2");
    }
    let entries = v_flag.unwrap_or_else(|| {
        let mut e = vec![0i64; n];
        e[0] = 1;
        e[1] = -1;
        e
    });
    let crosscheck: Option<Crosscheck> = cfg.pick(args.crosscheck, "crosscheck")?;
    let bins: usize = cfg.pick_or(args.bins, "bins", 20)?;
    if bins == 0 {
        bail!("bins must be positive");
    }
    let f = field(p)?;
    let v = FpVector::from_signed(&entries, p);
    let config = json!({
        "n": n, "p": p, "v": v.entries(), "crosscheck": crosscheck, "bins": bins, "seed": common.seed,
    });
    let chars = abelian_spectrum(&f, &v)?;
    let eig = &chars.spectrum.eigenvalues;
    let buckets = histogram(eig, bins);
    let mut outputs = vec![Output::new(
        "spectral.abelian_spectrum",
        json!({ "n": n, "p": p, "v": v.entries() }),
        json!({
            "gap": chars.spectrum.gap,
            "second_largest": chars.spectrum.second_largest(),
            "eigenvalue_count": eig.len(),
            "extremal_w": chars.extremal_w.entries(),
            "max_imaginary": chars.max_imaginary,
            "degree_normalization": chars.spectrum.degree_normalization,
            "histogram": buckets,
        }),
    )?];

    let mut status = Status::Ok;
    if crosscheck == Some(Crosscheck::Dense) {
        let dense = dense_v0_spectrum(&f, &v)?;
        let max_diff = dense
            .eigenvalues
            .iter()
            .zip(eig)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let agrees = dense.eigenvalues.len() == eig.len() && max_diff <= CROSSCHECK_TOL;
        if !agrees {
            status = Status::Falsified;
        }
        outputs.push(Output::new(
            "spectral.dense_v0_spectrum",
            json!({ "n": n, "p": p, "v": v.entries(), "tolerance": CROSSCHECK_TOL }),
            json!({
                "gap": dense.gap,
                "max_abs_difference": max_diff,
                "agrees": agrees,
            }),
        )?);
    }

    let mut table = CsvTable::new(vec!["lower", "upper", "count"]);
    for b in &buckets {
        table.push(vec![
            b.lower.to_string(),
            b.upper.to_string(),
            b.count.to_string(),
        ]);
    }
    Ok(Outcome {
        command: "gap",
        common,
        config,
        outputs,
        table,
        status,
    })
}

fn diam(args: &DiamArgs) -> Result<Outcome> {
    let (cfg, common) = setup(&args.common, &["n", "p", "ps", "order_cap"])?;
    let n: usize = cfg.require(args.n, "n")?;
    let ps: Vec<u64> = match cfg.pick(args.ps.clone(), "ps")? {
        Some(ps) if !ps.is_empty() => ps,
        _ => vec![cfg.require(args.p, "p")?],
    };
    let order_cap = cfg.pick_or(args.order_cap, "order_cap", DEFAULT_ORDER_CAP)?;
    let config = json!({ "n": n, "ps": ps, "order_cap": order_cap, "seed": common.seed });

    let mut table = CsvTable::new(vec![
        "n",
        "p",
        "order",
        "diameter",
        "log_order",
        "polylog_reference",
        "diameter_over_reference",
        "l1_lower_bound",
        "truncated",
    ]);
    let mut outputs = Vec::new();
    let mut status = Status::Ok;
    for &p in &ps {
        field(p)?;
        let y = build_y(n, p)?;
        let order = y.group_order().context("group order overflows")?;
        let report = bfs_diameter(&y, order_cap)?;
        let lower = l1_lower_bound(n, p).ok();
        let log_order = (order as f64).ln();
        let reference = log_order * log_order;
        if report.truncated {
            status = status.combine(Status::Truncated);
        } else if lower.is_some_and(|l| (report.diameter as u64) < l) {
            status = status.combine(Status::Falsified);
        }
        table.push(vec![
            n.to_string(),
            p.to_string(),
            order.to_string(),
            report.diameter.to_string(),
            log_order.to_string(),
            reference.to_string(),
            (report.diameter as f64 / reference).to_string(),
            lower.map(|l| l.to_string()).unwrap_or_default(),
            report.truncated.to_string(),
        ]);
        outputs.push(Output::new(
            "semidirect.bfs_diameter",
            json!({ "n": n, "p": p, "generators": "Y", "order_cap": order_cap }),
            json!({
                "group_order": order.to_string(),
                "log_order": log_order,
                "polylog_reference": reference,
                "l1_lower_bound": lower,
                "bfs": report,
            }),
        )?);
    }
    Ok(Outcome {
        command: "diam",
        common,
        config,
        outputs,
        table,
        status,
    })
}

fn tail(args: &TailArgs) -> Result<Outcome> {
    let (cfg, common) = setup(&args.common, &["n", "p", "eps", "trials", "u"])?;
    let n: usize = cfg.require(args.n, "n")?;
    let p: u64 = cfg.require(args.p, "p")?;
    let eps: f64 = cfg.require(args.eps, "eps")?;
    let trials = cfg.pick_or(args.trials, "trials", 10_000)?;
    let u = cfg.pick_or(args.u, "u", 1)?;
    let config =
        json!({ "n": n, "p": p, "eps": eps, "trials": trials, "u": u, "seed": common.seed });
    let f = field(p)?;
    let report = tail_experiment(&f, n, eps, trials, f.scalar(u), common.seed)?;
    let holds = report.empirical_rate <= report.bound;

    let mut table = CsvTable::new(vec![
        "n",
        "p",
        "eps",
        "u",
        "trials",
        "exceedances",
        "empirical_rate",
        "bound",
        "holds",
    ]);
    table.push(vec![
        n.to_string(),
        p.to_string(),
        eps.to_string(),
        report.u.to_string(),
        trials.to_string(),
        report.exceedances.to_string(),
        report.empirical_rate.to_string(),
        report.bound.to_string(),
        holds.to_string(),
    ]);
    Ok(Outcome {
        command: "tail",
        outputs: vec![Output::new(
            "expsum.tail_experiment",
            config.clone(),
            json!({ "report": report, "holds": holds }),
        )?],
        common,
        config,
        table,
        status: if holds { Status::Ok } else { Status::Falsified },
    })
}

fn catalog(path: Option<&std::path::Path>) -> Result<Vec<CatalogGroup>> {
    Ok(match path {
        Some(p) => load_catalog(
            &std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        )?,
        None => shipped_catalog()?,
    })
}

fn verify(args: &VerifyArgs) -> Result<Outcome> {
    let (cfg, common) = setup(
        &args.common,
        &[
            "all",
            "group",
            "switching",
            "catalog",
            "trials",
            "restarts",
            "n_power",
            "max_n",
            "primes",
        ],
    )?;
    let all = cfg.switch(args.all, "all")?;
    let group: Option<String> = cfg.pick(args.group.clone(), "group")?;
    let switching = cfg.switch(args.switching, "switching")?;
    if !all && group.is_none() && !switching {
        bail!("nothing to verify: pass --all, --group <name> or --switching");
    }
    let catalog_path: Option<std::path::PathBuf> = cfg.pick(args.catalog.clone(), "catalog")?;
    let settings = VerifySettings {
        trials: cfg.pick_or(args.trials, "trials", 1000)?,
        restarts: cfg.pick_or(args.restarts, "restarts", 20)?,
        n_power: cfg.pick_or(args.n_power, "n_power", 2)?,
        seed: common.seed,
    };
    let max_n: usize = cfg.pick_or(args.max_n, "max_n", 5)?;
    let primes: Vec<u64> = cfg.pick_or(args.primes.clone(), "primes", vec![2, 3, 5])?;
    let config = json!({
        "all": all,
        "group": group,
        "switching": switching,
        "catalog": catalog_path.as_ref().map(|p| p.display().to_string()),
        "trials": settings.trials,
        "restarts": settings.restarts,
        "n_power": settings.n_power,
        "max_n": max_n,
        "primes": primes,
        "seed": common.seed,
    });

    let mut outputs = Vec::new();
    let mut table = CsvTable::new(vec!["subject", "check", "statement", "lhs", "rhs", "holds"]);
    let mut status = Status::Ok;
    if all || group.is_some() {
        let groups = catalog(catalog_path.as_deref())?;
        let selected = if all {
            groups
        } else {
            vec![find_group(&groups, group.as_deref().expect("checked"))?]
        };
        for report in verify_catalog(&selected, &settings)? {
            if report.falsifications() > 0 {
                status = Status::Falsified;
            }
            for c in &report.checks {
                table.push(vec![
                    report.subject.clone(),
                    c.name.clone(),
                    c.statement.clone(),
                    c.lhs.to_string(),
                    c.rhs.to_string(),
                    c.holds.to_string(),
                ]);
            }
            outputs.push(Output::new(
                "kazhdan.verify",
                json!({
                    "group": report.subject,
                    "trials": settings.trials,
                    "restarts": settings.restarts,
                    "n_power": settings.n_power,
                    "seed": settings.seed,
                }),
                json!({ "falsifications": report.falsifications(), "checks": report.checks }),
            )?);
        }
    }
    if switching {
        for &p in &primes {
            let f = field(p)?;
            for n in 2..=max_n {
                let sweep = switching_sweep(&f, n, SWITCHING_TOL)?;
                if sweep.violations > 0 {
                    status = Status::Falsified;
                }
                table.push(vec![
                    format!("switching n={n} p={p}"),
                    "switching".into(),
                    format!("|λ_{{v,w}}|² ≤ 1/2 + m_v²/2 on {} pairs", sweep.pairs),
                    sweep.worst_slack.to_string(),
                    SWITCHING_TOL.to_string(),
                    (sweep.violations == 0).to_string(),
                ]);
                outputs.push(Output::new(
                    "expsum.switching_sweep",
                    json!({ "n": n, "p": p, "tolerance": SWITCHING_TOL }),
                    &sweep,
                )?);
            }
        }
    }
    Ok(Outcome {
        command: "verify",
        common,
        config,
        outputs,
        table,
        status,
    })
}

fn kazhdan(args: &KazhdanArgs) -> Result<Outcome> {
    let (cfg, common) = setup(&args.common, &["group", "gens", "restarts", "catalog"])?;
    let name: String = cfg.require(args.group.clone(), "group")?;
    let labels: Vec<String> = cfg.pick_or(args.gens.clone(), "gens", Vec::new())?;
    let restarts = cfg.pick_or(args.restarts, "restarts", 20)?;
    let catalog_path: Option<std::path::PathBuf> = cfg.pick(args.catalog.clone(), "catalog")?;
    let group = find_group(&catalog(catalog_path.as_deref())?, &name)?;
    let gens = group.select(&labels)?;
    let used: Vec<String> = if labels.is_empty() {
        group.generators.iter().map(|(l, _)| l.clone()).collect()
    } else {
        labels
    };
    let config = json!({
        "group": name,
        "gens": used,
        "restarts": restarts,
        "catalog": catalog_path.as_ref().map(|p| p.display().to_string()),
        "seed": common.seed,
    });
    let interval = kazhdan_interval(&group.table, &gens)?;
    let mut outputs = vec![Output::new(
        "kazhdan.kazhdan_interval",
        json!({ "group": name, "gens": used, "order": group.order() }),
        interval,
    )?];
    let mut restricted = None;
    if interval.generating {
        let opt = kazhdan_upper_opt(&group.table, &gens, restarts, common.seed)?;
        restricted = Some(opt.value);
        outputs.push(Output::new(
            "kazhdan.kazhdan_upper_opt",
            json!({ "group": name, "gens": used, "restarts": restarts, "seed": common.seed }),
            json!({ "value": opt.value, "restart": opt.restart }),
        )?);
    }
    let mut table = CsvTable::new(vec![
        "group",
        "generators",
        "order",
        "gap",
        "lower",
        "upper",
        "restricted_upper",
    ]);
    table.push(vec![
        name.clone(),
        used.join(" "),
        group.order().to_string(),
        interval.gap.to_string(),
        interval.lower.to_string(),
        interval.upper.to_string(),
        restricted.map(|v| v.to_string()).unwrap_or_default(),
    ]);
    Ok(Outcome {
        command: "kazhdan",
        common,
        config,
        outputs,
        table,
        status: Status::Ok,
    })
}
