//! Subcommand execution.

use std::fs::File;
use std::io::{BufWriter, Write};

use rayon::prelude::*;
use repeatcap_core::bounds::{
    bound_objective, delta_choice, optimize_bound, parse_table_id, run_job, table_jobs,
    verify_entry, BoundResult, BoundSettings, BoundVariant, VerifyEntry, VerifyTolerances,
};
use repeatcap_core::channels::RepeatChannel;
use repeatcap_core::dual::{build_dual, kl_gap_profile, DualVariant, WeightTable};
use repeatcap_core::nats_to_bits;
use repeatcap_core::sim::{run_trial, InputSource, MonteCarloSummary, SimConfig};
use serde::Serialize;

use crate::cli::{
    BoundArgs, Cli, Command, FamilyArg, Format, GapVariantArg, KlgapArgs, SimulateArgs, SweepArgs,
    VariantArg, VerifyArgs,
};
use crate::config::{merge, FileConfig};
use crate::records::{
    write_bound_csv, BoundOutput, BoundRecord, Meta, SimMeta, SimulationOutput, TrialRecord,
    VerifyRecord,
};
use crate::AppError;

/// Global options after merging flags with the config file.
#[derive(Debug, Clone, Copy)]
struct Globals {
    no_meta: bool,
    nats: bool,
}

/// Runs a parsed command line, writing its payload to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), AppError> {
    let cli = match &cli.config {
        Some(path) => {
            let file = FileConfig::load(path)?;
            merge(cli, file)
        }
        None => cli,
    };
    let globals = Globals {
        no_meta: cli.no_meta,
        nats: cli.nats,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
        .map_err(|e| AppError::Usage(format!("thread pool: {e}")))?;
    // Payloads are buffered so that the caller's writer need not be Send.
    let mut buf = Vec::new();
    let result = pool.install(|| match cli.command {
        Command::Bound(a) => cmd_bound(a, globals, &mut buf),
        Command::Sweep(a) => cmd_sweep(a, &mut buf),
        Command::Verify(a) => cmd_verify(a, &mut buf),
        Command::Klgap(a) => cmd_klgap(a, &mut buf),
        Command::Simulate(a) => cmd_simulate(a, globals, &mut buf),
    });
    out.write_all(&buf)?;
    result
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T, AppError> {
    value.ok_or_else(|| AppError::Usage(format!("missing required option --{flag}")))
}

fn check_unit_interval(name: &str, v: f64) -> Result<(), AppError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(AppError::Usage(format!("{name} = {v} must lie in (0, 1)")))
    }
}

/// The bounds a (family, variant) request expands to. An empty list with
/// `auto` means "all three deletion bounds and their minimum".
fn resolve_variant(
    family: FamilyArg,
    variant: Option<VariantArg>,
) -> Result<Option<BoundVariant>, AppError> {
    use VariantArg as V;
    let v = match (family, variant) {
        (FamilyArg::Sticky, None | Some(V::Sticky)) => BoundVariant::StickyExact,
        (FamilyArg::Duplication, None | Some(V::Duplication)) => BoundVariant::DuplicationExact,
        (FamilyArg::Geomdel, None | Some(V::Auto)) => return Ok(None),
        (FamilyArg::Geomdel, Some(V::Conv)) => BoundVariant::GeomDelConv,
        (FamilyArg::Geomdel, Some(V::Trunc)) => BoundVariant::GeomDelTrunc,
        (FamilyArg::Geomdel, Some(V::DeltaD)) => BoundVariant::GeomDelDeltaD,
        (FamilyArg::Geomdel, Some(V::Elementary)) => BoundVariant::GeomDelElementary,
        (f, Some(v)) => {
            return Err(AppError::Usage(format!(
                "variant {v:?} does not apply to family {}",
                f.name()
            )))
        }
    };
    Ok(Some(v))
}

const DELETION_OPTIMIZED: [BoundVariant; 3] = [
    BoundVariant::GeomDelConv,
    BoundVariant::GeomDelTrunc,
    BoundVariant::GeomDelDeltaD,
];

fn smallest(results: &[BoundResult]) -> BoundResult {
    results
        .iter()
        .min_by(|a, b| a.bound_nats.total_cmp(&b.bound_nats))
        .cloned()
        .expect("at least one deletion bound")
}

fn cmd_bound(a: BoundArgs, g: Globals, out: &mut dyn Write) -> Result<(), AppError> {
    let family = required(a.family, "family")?;
    let p = required(a.p, "p")?;
    check_unit_interval("p", p)?;
    let settings = BoundSettings::default();
    let result = match resolve_variant(family, a.variant)? {
        Some(v) => optimize_bound(v, p, &settings)?,
        None => {
            let all = DELETION_OPTIMIZED
                .par_iter()
                .map(|&v| optimize_bound(v, p, &settings))
                .collect::<Result<Vec<_>, _>>()?;
            smallest(&all)
        }
    };
    let meta = (!g.no_meta).then(|| Meta::now(&settings));
    match a.format.unwrap_or_default() {
        Format::Json => {
            let o = BoundOutput::new(family.name(), &result, meta);
            serde_json::to_writer_pretty(&mut *out, &o)?;
            writeln!(out)?;
        }
        Format::Csv => write_bound_csv(out, &[BoundRecord::from_result(&result)])?,
        Format::Text => {
            let (value, unit) = if g.nats {
                (result.bound_nats, "nats")
            } else {
                (result.bound_bits, "bits")
            };
            writeln!(
                out,
                "{} p={} variant={}: {value:.6} {unit}/channel use",
                family.name(),
                p,
                result.variant.name()
            )?;
            writeln!(
                out,
                "q_opt={} mu_opt={} epsilon={} feasible={}{}",
                result.q_opt,
                result.mu_opt,
                result.epsilon_used,
                result.feasible,
                if result.clamped_to_one {
                    " (exceeds 1 bit)"
                } else {
                    ""
                }
            )?;
        }
    }
    Ok(())
}

/// `steps` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, steps: usize) -> Vec<f64> {
    let h = (end - start) / (steps - 1) as f64;
    (0..steps)
        .map(|i| {
            if i + 1 == steps {
                end
            } else {
                start + h * i as f64
            }
        })
        .collect()
}

fn sweep_grid(a: &SweepArgs) -> Result<Vec<f64>, AppError> {
    if let Some(values) = &a.p_values {
        if values.is_empty() {
            return Err(AppError::Usage("--p-values is empty".into()));
        }
        for &p in values {
            check_unit_interval("p", p)?;
        }
        return Ok(values.clone());
    }
    let start = required(a.p_start, "p-start")?;
    let end = required(a.p_end, "p-end")?;
    let steps = required(a.steps, "steps")?;
    check_unit_interval("p-start", start)?;
    check_unit_interval("p-end", end)?;
    if start >= end {
        return Err(AppError::Usage(format!(
            "p-start {start} must be below p-end {end}"
        )));
    }
    if steps < 2 {
        return Err(AppError::Usage("steps must be at least 2".into()));
    }
    Ok(linspace(start, end, steps))
}

fn open_output<'a>(
    path: &Option<std::path::PathBuf>,
    stdout: &'a mut dyn Write,
) -> Result<Box<dyn Write + 'a>, AppError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(stdout),
    })
}

fn record_for(
    p: f64,
    variant: &str,
    r: &Result<BoundResult, repeatcap_core::Error>,
) -> BoundRecord {
    match r {
        Ok(r) => {
            let mut rec = BoundRecord::from_result(r);
            rec.variant = variant.to_string();
            rec
        }
        Err(e) => BoundRecord::failure(p, variant, e.to_string()),
    }
}

/// Bound records for a sweep, in grid order. Failures become rows with the
/// `error` field set.
pub fn sweep_records(
    family: FamilyArg,
    variant: Option<VariantArg>,
    grid: &[f64],
) -> Result<Vec<BoundRecord>, AppError> {
    let settings = BoundSettings::default();
    let variants: Vec<BoundVariant> = match resolve_variant(family, variant)? {
        Some(v) => vec![v],
        None => DELETION_OPTIMIZED.to_vec(),
    };
    let jobs: Vec<(f64, BoundVariant)> = grid
        .iter()
        .flat_map(|&p| variants.iter().map(move |&v| (p, v)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(p, v)| optimize_bound(v, p, &settings))
        .collect();
    let mut records = Vec::with_capacity(results.len() + grid.len());
    for (chunk, &p) in results.chunks(variants.len()).zip(grid) {
        for (r, v) in chunk.iter().zip(&variants) {
            records.push(record_for(p, v.name(), r));
        }
        if variants.len() > 1 {
            let ok: Vec<BoundResult> = chunk
                .iter()
                .filter_map(|r| r.as_ref().ok().cloned())
                .collect();
            records.push(if ok.len() == chunk.len() {
                record_for(p, "min", &Ok(smallest(&ok)))
            } else {
                BoundRecord::failure(p, "min", "a component bound failed".into())
            });
        }
    }
    Ok(records)
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<(), AppError> {
    let family = required(a.family, "family")?;
    if let Some(p) = a.emit_inner {
        return emit_inner(&a, family, p, out);
    }
    let grid = sweep_grid(&a)?;
    let records = sweep_records(family, a.variant, &grid)?;
    let mut w = open_output(&a.out, out)?;
    write_bound_csv(&mut w, &records)?;
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct InnerRow {
    variant: &'static str,
    q: f64,
    objective_nats: f64,
    objective_bits: f64,
    mu: f64,
    feasible: bool,
}

/// The bound objective on a grid in `q` at fixed `p`.
pub fn inner_curve(
    variant: BoundVariant,
    p: f64,
    points: usize,
) -> Result<Vec<(f64, repeatcap_core::bounds::ObjectiveValue)>, AppError> {
    let settings = BoundSettings::default();
    let dual = variant
        .dual_variant()
        .ok_or_else(|| AppError::Usage("the elementary bound has no inner objective".into()))?;
    let (delta, epsilon) = if dual.includes_zero() {
        let c = delta_choice(variant, p, settings.x_max)?;
        (c.delta, c.epsilon.value)
    } else {
        (1.0, 0.0)
    };
    let mut table = WeightTable::new(dual, p)?;
    let s_lo = -settings.q_min.ln_1p_neg();
    let s_hi = -settings.effective_q_max().ln_1p_neg();
    let mut rows = Vec::with_capacity(points);
    for i in 0..points {
        let s = s_lo + (s_hi - s_lo) * i as f64 / (points - 1) as f64;
        let q = -(-s).exp_m1();
        rows.push((q, bound_objective(variant, &mut table, q, delta, epsilon)?));
    }
    Ok(rows)
}

trait Log1pNeg {
    fn ln_1p_neg(self) -> f64;
}

impl Log1pNeg for f64 {
    /// `ln(1 - self)`.
    fn ln_1p_neg(self) -> f64 {
        (-self).ln_1p()
    }
}

fn emit_inner(
    a: &SweepArgs,
    family: FamilyArg,
    p: f64,
    out: &mut dyn Write,
) -> Result<(), AppError> {
    check_unit_interval("emit-inner", p)?;
    let points = a.inner_points.unwrap_or(200);
    if points < 2 {
        return Err(AppError::Usage("inner-points must be at least 2".into()));
    }
    let variants: Vec<BoundVariant> = match resolve_variant(family, a.variant)? {
        Some(v) => vec![v],
        None => DELETION_OPTIMIZED.to_vec(),
    };
    let curves = variants
        .par_iter()
        .map(|&v| inner_curve(v, p, points))
        .collect::<Result<Vec<_>, _>>()?;
    let mut w = open_output(&a.out, out)?;
    {
        let mut csv = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut w);
        for (v, curve) in variants.iter().zip(curves) {
            for (q, o) in curve {
                csv.serialize(InnerRow {
                    variant: v.name(),
                    q,
                    objective_nats: o.value,
                    objective_bits: nats_to_bits(o.value),
                    mu: o.mu,
                    feasible: o.feasible,
                })?;
            }
        }
        csv.flush()?;
    }
    w.flush()?;
    Ok(())
}

/// Parses `LABEL=DELTA` perturbations.
fn parse_perturbations(items: &[String]) -> Result<Vec<(String, f64)>, AppError> {
    items
        .iter()
        .map(|s| {
            let (label, delta) = s
                .rsplit_once('=')
                .ok_or_else(|| AppError::Usage(format!("perturbation {s:?} is not LABEL=DELTA")))?;
            let delta: f64 = delta
                .trim()
                .parse()
                .map_err(|_| AppError::Usage(format!("perturbation {s:?} has a bad number")))?;
            Ok((label.trim().to_string(), delta))
        })
        .collect()
}

/// Recomputes the selected reference entries in parallel, applying the
/// perturbations to the computed values before judging them.
pub fn verify_report(a: &VerifyArgs) -> Result<Vec<VerifyEntry>, AppError> {
    let only = a.only.as_deref().map(parse_table_id).transpose()?;
    let tol = match a.tolerance {
        Some(t) if t > 0.0 => VerifyTolerances::uniform(t),
        Some(t) => return Err(AppError::Usage(format!("tolerance {t} must be positive"))),
        None => VerifyTolerances::default(),
    };
    let jobs = table_jobs(only);
    let perturb = parse_perturbations(&a.perturb)?;
    for (label, _) in &perturb {
        if !jobs.iter().any(|j| &j.label() == label) {
            return Err(AppError::Usage(format!(
                "no reference entry labelled {label:?}"
            )));
        }
    }
    let settings = BoundSettings::default();
    let computed: Vec<_> = jobs.par_iter().map(|j| run_job(j, &settings)).collect();
    Ok(jobs
        .iter()
        .zip(computed)
        .map(|(job, c)| {
            let shift: f64 = perturb
                .iter()
                .filter(|(l, _)| *l == job.label())
                .map(|(_, d)| d)
                .sum();
            let c = c.map(|mut c| {
                c.bits += shift;
                c
            });
            verify_entry(job, c, &tol)
        })
        .collect())
}

fn verify_record(e: &VerifyEntry) -> VerifyRecord {
    VerifyRecord {
        entry: e.job.label(),
        expected: e.job.expected.text().to_string(),
        computed_bits: e.computed.map(|c| c.bits),
        deviation: e.deviation.is_finite().then_some(e.deviation),
        tolerance: e.tolerance,
        pass: e.pass,
        error: e.error.clone(),
    }
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<(), AppError> {
    let entries = verify_report(&a)?;
    let records: Vec<VerifyRecord> = entries.iter().map(verify_record).collect();
    if a.json {
        serde_json::to_writer_pretty(&mut *out, &records)?;
        writeln!(out)?;
    } else {
        for r in &records {
            let computed = r
                .computed_bits
                .map(|c| format!("{c:.6}"))
                .unwrap_or_else(|| "-".into());
            let dev = r
                .deviation
                .map(|d| format!("{d:.2e}"))
                .unwrap_or_else(|| "-".into());
            writeln!(
                out,
                "{} {:<28} expected {:>8} computed {:>9} dev {:>8} tol {:.0e}{}",
                if r.pass { "ok  " } else { "FAIL" },
                r.entry,
                r.expected,
                computed,
                dev,
                r.tolerance,
                r.error
                    .as_ref()
                    .map(|e| format!(" ({e})"))
                    .unwrap_or_default()
            )?;
        }
        let failed = records.iter().filter(|r| !r.pass).count();
        writeln!(out, "{} entries, {} failed", records.len(), failed)?;
    }
    let failed: Vec<&str> = records
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.entry.as_str())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(AppError::Verification(format!(
            "entries out of tolerance: {}",
            failed.join(", ")
        )))
    }
}

/// The KL-gap profile of a dual: `(x, Δ(x))` for `x = 1..x_max` and the
/// limit candidate.
pub fn klgap_profile(a: &KlgapArgs) -> Result<(Vec<f64>, Option<f64>), AppError> {
    let family = required(a.family, "family")?;
    let p = required(a.p, "p")?;
    let q = required(a.q, "q")?;
    check_unit_interval("p", p)?;
    check_unit_interval("q", q)?;
    let x_max = a.x_max.unwrap_or(repeatcap_core::dual::DEFAULT_X_MAX);
    if x_max == 0 {
        return Err(AppError::Usage("x-max must be at least 1".into()));
    }
    let d = 1.0 - p;
    let (channel, dual_variant, delta) = match family {
        FamilyArg::Sticky | FamilyArg::Duplication => {
            if a.variant.is_some() {
                return Err(AppError::Usage("--variant applies to geomdel only".into()));
            }
            match a.delta_rule.as_deref() {
                None | Some("one") => {}
                Some(_) => {
                    return Err(AppError::Usage(
                        "the zero-gap duals have no mass at 0".into(),
                    ))
                }
            }
            if family == FamilyArg::Sticky {
                (RepeatChannel::sticky(p)?, DualVariant::StickyZeroGap, 1.0)
            } else {
                (
                    RepeatChannel::duplication(p)?,
                    DualVariant::DuplicationZeroGap,
                    1.0,
                )
            }
        }
        FamilyArg::Geomdel => {
            let (dv, bv) = match a.variant.unwrap_or(GapVariantArg::Trunc) {
                GapVariantArg::Conv => (
                    DualVariant::GeomDelConvexity,
                    Some(BoundVariant::GeomDelConv),
                ),
                GapVariantArg::Trunc => (
                    DualVariant::GeomDelTruncated,
                    Some(BoundVariant::GeomDelTrunc),
                ),
                GapVariantArg::Invbin => (DualVariant::InverseBinomial, None),
            };
            let delta = match a.delta_rule.as_deref().unwrap_or("one") {
                "one" => 1.0,
                "d" => d,
                "rule" => match bv {
                    Some(bv) => delta_choice(bv, p, x_max)?.delta,
                    None => d,
                },
                other => other
                    .parse::<f64>()
                    .ok()
                    .filter(|v| *v > 0.0 && *v <= 1.0)
                    .ok_or_else(|| {
                        AppError::Usage(format!(
                            "delta rule {other:?} is not one, rule, d or a number in (0, 1]"
                        ))
                    })?,
            };
            (RepeatChannel::deletion(p)?, dv, delta)
        }
    };
    let dual = build_dual(dual_variant, p, q, delta)?;
    let profile = kl_gap_profile(&channel, &dual, x_max)?;
    Ok((profile.gaps, profile.limit_candidate))
}

fn cmd_klgap(a: KlgapArgs, out: &mut dyn Write) -> Result<(), AppError> {
    let (gaps, limit) = klgap_profile(&a)?;
    let mut csv = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    csv.write_record(["x", "gap_nats"])?;
    for (i, g) in gaps.iter().enumerate() {
        csv.write_record([(i + 1).to_string(), g.to_string()])?;
    }
    csv.write_record([
        "limit".to_string(),
        limit.map(|l| l.to_string()).unwrap_or_default(),
    ])?;
    csv.flush()?;
    Ok(())
}

fn parse_input(s: &str) -> Result<InputSource, AppError> {
    match s {
        "uniform" => Ok(InputSource::UniformRandom),
        "alternating" => Ok(InputSource::Alternating),
        _ => {
            let bits = s
                .strip_prefix("bits:")
                .ok_or_else(|| AppError::Usage(format!("unknown input {s:?}")))?;
            bits.chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(AppError::Usage(format!("input bit {c:?} is not 0 or 1"))),
                })
                .collect::<Result<Vec<u8>, _>>()
                .map(InputSource::Fixed)
        }
    }
}

/// Builds and validates the simulation config from the arguments.
pub fn sim_config(a: &SimulateArgs) -> Result<SimConfig, AppError> {
    let input = parse_input(a.input.as_deref().unwrap_or("uniform"))?;
    let n = match (&input, a.n) {
        (InputSource::Fixed(bits), None) => bits.len(),
        (_, n) => n.unwrap_or(2000),
    };
    let mut config = SimConfig::new(
        n,
        a.lambda.unwrap_or(200.0),
        a.eps.unwrap_or(0.1),
        a.trials.unwrap_or(200),
        a.seed.unwrap_or(0),
    );
    config.input = input;
    config.validate()?;
    Ok(config)
}

/// Runs every trial in parallel; reports come back in trial order.
pub fn simulate(config: &SimConfig) -> MonteCarloSummary {
    let reports = (0..config.trials as u64)
        .into_par_iter()
        .map(|i| run_trial(config, i))
        .collect();
    MonteCarloSummary::from_reports(reports)
}

fn cmd_simulate(a: SimulateArgs, g: Globals, out: &mut dyn Write) -> Result<(), AppError> {
    let config = sim_config(&a)?;
    let summary = simulate(&config);
    let o = SimulationOutput {
        n: config.n,
        lambda: config.lambda,
        epsilon: config.epsilon,
        trials: config.trials,
        seed: config.seed,
        input: a.input.clone().unwrap_or_else(|| "uniform".into()),
        success_rate: summary.success_rate,
        mean_output_length: summary.mean_output_length,
        reports: a.verbose.then(|| {
            summary
                .reports
                .iter()
                .enumerate()
                .map(|(i, r)| TrialRecord::new(i as u64, r))
                .collect()
        }),
        meta: (!g.no_meta).then(SimMeta::now),
    };
    serde_json::to_writer_pretty(&mut *out, &o)?;
    writeln!(out)?;
    Ok(())
}
