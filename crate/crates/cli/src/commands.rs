use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use serde::Serialize;
use serde_json::{json, Value};
use tame_density::{
    construct_gl2_ramified_pair, count_locus as count, general_ramified_criterion, gl2_ramified_criterion,
    is_detectably_ramified, locus_series, resultant_invariant, semistability_threshold, simulate_density, BetaSign,
    CountConfig, DensityTrace, Error, LocusCriterion, MatrixJson, PairJson, RingSpec, SeriesRecord, SimConfig,
    SubgroupSpec,
};

use crate::output::{config_value, CommonConfig, Outcome, Report, Table};
use crate::{
    BudgetArgs, CheckPairArgs, ConstructArgs, CountLocusArgs, CriterionArgs, DecayArgs, SimulateArgs, ThresholdArgs,
};

const SERIES_COLUMNS: [&str; 9] = [
    "p",
    "m",
    "n",
    "group_size",
    "locus_size",
    "excluded_b1_size",
    "ratio_num",
    "ratio_den",
    "ratio_float",
];

const TRACE_COLUMNS: [&str; 7] = [
    "n",
    "primes_streamed",
    "flagged",
    "degenerate",
    "running_density",
    "ci95",
    "exact_reference",
];

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn parse_spec(s: &str) -> anyhow::Result<SubgroupSpec> {
    Ok(s.parse::<SubgroupSpec>()?)
}

fn count_config(args: &BudgetArgs) -> anyhow::Result<CountConfig> {
    Ok(CountConfig {
        criterion: args.criterion.parse::<LocusCriterion>()?,
        fixed_b: args.fixed_b,
        budget: args.budget,
    })
}

fn series_row(p: u64, m: usize, r: &SeriesRecord) -> Vec<String> {
    let ratio = r.ratio();
    vec![
        p.to_string(),
        m.to_string(),
        r.n.to_string(),
        r.group_size.to_string(),
        r.locus_size.to_string(),
        r.excluded_b1_size.to_string(),
        ratio.numer().to_string(),
        ratio.denom().to_string(),
        r.ratio_f64().to_string(),
    ]
}

pub fn threshold(args: &ThresholdArgs, common: &CommonConfig) -> anyhow::Result<Outcome> {
    let t = semistability_threshold(args.m, args.p)?;
    Ok(Outcome::ok(Report::new(config_value("threshold", args, common), t)))
}

pub fn check_pair(args: &CheckPairArgs, common: &CommonConfig) -> anyhow::Result<Outcome> {
    let wire: PairJson = serde_json::from_value(read_json(&args.file)?).context("expected a pair {p, n, q, sigma, tau}")?;
    let pair = wire.to_pair()?;
    let threshold = semistability_threshold(pair.tau().dim(), wire.p)?.value;
    let (detectable, note) = match is_detectably_ramified(pair.tau()) {
        Ok(v) => (Some(v), None),
        Err(e @ Error::PrecisionTooLow { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let body = json!({
        "p": wire.p,
        "n": wire.n,
        "q": wire.q,
        "relation": pair.verify_relation()?,
        "qtwist": pair.charpoly_qtwist_check(),
        "tau_is_identity": pair.tau().is_identity(),
        "threshold_N": threshold,
        "detectably_ramified": detectable,
        "detectably_ramified_note": note,
    });
    Ok(Outcome::ok(Report::new(config_value("check-pair", args, common), body)))
}

pub fn criterion(args: &CriterionArgs, common: &CommonConfig) -> anyhow::Result<Outcome> {
    let value = read_json(&args.file)?;
    let (matrix, file_q) = if value.get("sigma").is_some() {
        let wire: PairJson = serde_json::from_value(value).context("expected a pair {p, n, q, sigma, tau}")?;
        (wire.to_pair()?.sigma().clone(), Some(wire.q))
    } else {
        let wire: MatrixJson = serde_json::from_value(value).context("expected a matrix {p, n, m, entries}")?;
        (wire.to_matrix()?, None)
    };
    let q = args
        .q
        .or(file_q)
        .ok_or_else(|| anyhow!("--q is required when the file holds a single matrix"))?;
    let ring = matrix.ring().clone();
    if !tame_density::is_prime(q) {
        return Err(Error::NotPrime(q).into());
    }
    if q == ring.p() {
        return Err(Error::BadParam(format!("q must differ from p = {q}")).into());
    }
    let b = ring.residue_from_biguint(&q.into());
    let gl2 = if matrix.dim() == 2 {
        Some(gl2_ramified_criterion(&matrix, q)?)
    } else {
        None
    };
    let body = json!({
        "p": ring.p(),
        "n": ring.n(),
        "m": matrix.dim(),
        "q": q,
        "b": b.value().to_string(),
        "degenerate": tame_density::tame::is_degenerate_cyclotomic(&b),
        "invariant": resultant_invariant(&matrix, &b)?.value().to_string(),
        "gl2_ramified": gl2,
        "general_ramified": general_ramified_criterion(&matrix, &b)?,
    });
    Ok(Outcome::ok(Report::new(config_value("criterion", args, common), body)))
}

pub fn construct(args: &ConstructArgs, common: &CommonConfig) -> anyhow::Result<Outcome> {
    let ring = RingSpec::new(args.p, args.n)?;
    let sign = if args.sign > 0 { BetaSign::Plus } else { BetaSign::Minus };
    let pair = construct_gl2_ramified_pair(args.q, sign, &ring.residue(args.t))?;
    Ok(Outcome::ok(Report::new(config_value("construct", args, common), pair.to_json())))
}

pub fn count_locus(args: &CountLocusArgs, common: &CommonConfig) -> anyhow::Result<Outcome> {
    let spec = parse_spec(&args.spec)?;
    let config = count_config(&args.budget)?;
    let ring = RingSpec::new(args.p, args.n)?;
    let record = count(&spec, &ring, &config)?;
    let criterion = match config.criterion {
        LocusCriterion::Auto => spec.default_criterion(),
        c => c,
    };
    #[derive(Serialize)]
    struct Body<'a> {
        spec: String,
        p: u64,
        m: usize,
        dimension: usize,
        criterion: LocusCriterion,
        #[serde(flatten)]
        record: &'a SeriesRecord,
    }
    let body = Body {
        spec: spec.to_string(),
        p: args.p,
        m: spec.m(),
        dimension: spec.dimension(),
        criterion,
        record: &record,
    };
    let table = Table {
        header: SERIES_COLUMNS.to_vec(),
        rows: vec![series_row(args.p, spec.m(), &record)],
        footer: Vec::new(),
    };
    Ok(Outcome::ok(
        Report::new(config_value("count-locus", args, common), body).with_table(table),
    ))
}

pub fn decay(args: &DecayArgs, common: &CommonConfig) -> anyhow::Result<Outcome> {
    let spec = parse_spec(&args.spec)?;
    let config = count_config(&args.budget)?;
    if args.n_from == 0 || args.n_from > args.n_to {
        return Err(Error::BadParam(format!("empty precision range {}..={}", args.n_from, args.n_to)).into());
    }
    let report = locus_series(&spec, args.p, args.n_from..=args.n_to, &config)?;
    let table = Table {
        header: SERIES_COLUMNS.to_vec(),
        rows: report.series.iter().map(|r| series_row(report.p, report.m, r)).collect(),
        footer: vec![
            (
                "fitted_delta".into(),
                report.fitted_delta.map_or_else(String::new, |d| d.to_string()),
            ),
            (
                "truncated_at".into(),
                report.truncated_at.map_or_else(String::new, |n| n.to_string()),
            ),
        ],
    };
    if let Some(n) = report.truncated_at {
        eprintln!("error: budget of {} exhausted at n = {n}; the series stops before it", args.budget.budget);
    }
    let status = if report.truncated_at.is_some() { 3 } else { 0 };
    Ok(Outcome {
        report: Report::new(config_value("decay", args, common), &report).with_table(table),
        status,
    })
}

#[derive(Serialize)]
struct TraceBody<'a> {
    #[serde(flatten)]
    trace: &'a DensityTrace,
    exact_reference_float: Option<f64>,
    running_density: Vec<String>,
}

pub fn simulate(args: &SimulateArgs, common: &CommonConfig) -> anyhow::Result<Outcome> {
    let spec = parse_spec(&args.spec)?;
    let mut config = SimConfig::new(spec, args.p, args.levels.clone(), args.primes, args.seed);
    config.skip = args.skip.clone();
    config.start = args.start;
    config.reference_budget = args.reference_budget;
    let traces = simulate_density(&config)?;

    let bodies: Vec<TraceBody> = traces
        .iter()
        .map(|t| TraceBody {
            trace: t,
            exact_reference_float: t.exact_reference_f64(),
            running_density: t.running_density().iter().map(|r| format!("{}/{}", r.numer(), r.denom())).collect(),
        })
        .collect();

    let mut rows = Vec::new();
    for t in &traces {
        let reference = t.exact_reference_f64().map_or_else(String::new, |r| r.to_string());
        let (mut flagged, mut degenerate) = (0usize, 0usize);
        for (i, o) in t.outcomes.iter().enumerate() {
            flagged += usize::from(o.flagged);
            degenerate += usize::from(o.degenerate);
            let streamed = i + 1;
            let density = flagged as f64 / streamed as f64;
            rows.push(vec![
                t.n.to_string(),
                streamed.to_string(),
                flagged.to_string(),
                degenerate.to_string(),
                density.to_string(),
                tame_density::density::ci95(density, streamed).to_string(),
                reference.clone(),
            ]);
        }
    }
    let table = Table {
        header: TRACE_COLUMNS.to_vec(),
        rows,
        footer: Vec::new(),
    };
    let body = json!({ "spec": config.spec.to_string(), "p": args.p, "traces": bodies });
    Ok(Outcome::ok(
        Report::new(config_value("simulate", args, common), body).with_table(table),
    ))
}
