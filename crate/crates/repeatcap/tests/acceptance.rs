//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero only when a check fails that is not listed in
//! `KNOWN_RED` below.

use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;
use repeatcap::exec::simulate;
use repeatcap_core::bounds::{
    geomdel_elementary_bound, optimize_bound, run_job, table_jobs, verify_entry, BoundSettings,
    BoundVariant, TableId, VerifyTolerances,
};
use repeatcap_core::channels::RepeatChannel;
use repeatcap_core::dual::{
    analytic_gaps, build_dual, delta_shift, i_p, kl_gap_profile, lambda_trunc_geomdel, r_p,
    DualVariant, WeightTable,
};
use repeatcap_core::numerics::{log_gamma, log_gamma_via_integral, log_integral_li};
use repeatcap_core::sim::SimConfig;
use repeatcap_core::LN_2;

/// Checks that fail with the reference data as printed. Each entry names
/// the criterion and the exact check label; see the README for the numbers.
const KNOWN_RED: &[(u32, &str)] = &[
    // The printed 0.204186 sits off the curve through its neighbours; the
    // convexity-based bound evaluates to 0.208075 here.
    (3, "T3 p=0.60 upper"),
    // The closed form evaluates to 0.7317 bits at d = 1e-3.
    (8, "d=1.0e-3 at most 0.73"),
];

struct Check {
    label: String,
    pass: bool,
    detail: String,
}

impl Check {
    fn new(label: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            pass,
            detail: detail.into(),
        }
    }
}

struct Criterion {
    id: u32,
    title: &'static str,
    run: fn() -> Vec<Check>,
}

fn table_checks(table: TableId) -> Vec<Check> {
    let settings = BoundSettings::default();
    let tol = VerifyTolerances::default();
    let jobs = table_jobs(Some(table));
    let computed: Vec<_> = jobs.par_iter().map(|j| run_job(j, &settings)).collect();
    jobs.iter()
        .zip(computed)
        .map(|(job, c)| {
            let e = verify_entry(job, c, &tol);
            let got = e
                .computed
                .map(|c| format!("{:.6}", c.bits))
                .unwrap_or_else(|| "error".into());
            let clamped = e.computed.map(|c| c.clamped_to_one).unwrap_or(false);
            Check::new(
                job.label(),
                e.pass,
                format!(
                    "expected {} got {got}{} dev {:.1e} tol {:.0e}",
                    job.expected.text(),
                    if clamped { " (clamped)" } else { "" },
                    e.deviation,
                    e.tolerance
                ),
            )
        })
        .collect()
}

fn criterion_1() -> Vec<Check> {
    table_checks(TableId::T1Sticky)
}

fn criterion_2() -> Vec<Check> {
    table_checks(TableId::T2Duplication)
}

fn criterion_3() -> Vec<Check> {
    let mut checks = table_checks(TableId::T3GeomDel);
    let settings = BoundSettings::default();
    let half = [
        BoundVariant::GeomDelConv,
        BoundVariant::GeomDelTrunc,
        BoundVariant::GeomDelDeltaD,
    ]
    .par_iter()
    .map(|&v| optimize_bound(v, 0.5, &settings).map(|r| r.bound_bits))
    .collect::<Result<Vec<_>, _>>();
    match half {
        Ok(v) => {
            let best = v.iter().cloned().fold(f64::INFINITY, f64::min);
            checks.push(Check::new(
                "p=0.5 at most 0.1690, improving on 0.209092",
                best <= 0.1690,
                format!("{best:.6}"),
            ));
        }
        Err(e) => checks.push(Check::new(
            "p=0.5 at most 0.1690, improving on 0.209092",
            false,
            e.to_string(),
        )),
    }
    checks
}

fn zero_gap(variant: DualVariant) -> Vec<Check> {
    let grid: Vec<(f64, f64)> = [0.1, 0.3, 0.5, 0.7]
        .iter()
        .flat_map(|&p| [0.3, 0.6, 0.9].map(|q| (p, q)))
        .collect();
    grid.par_iter()
        .map(|&(p, q)| {
            let label = format!("{variant:?} p={p} q={q}");
            let channel = match variant {
                DualVariant::StickyZeroGap => RepeatChannel::sticky(p),
                _ => RepeatChannel::duplication(p),
            };
            let profile = channel.and_then(|c| {
                build_dual(variant, p, q, 1.0).and_then(|d| kl_gap_profile(&c, &d, 50))
            });
            match profile {
                Ok(prof) => {
                    let worst = prof.gaps.iter().map(|g| g.abs()).fold(0.0, f64::max);
                    Check::new(label, worst <= 1e-6, format!("max |gap| {worst:.2e}"))
                }
                Err(e) => Check::new(label, false, e.to_string()),
            }
        })
        .collect()
}

fn criterion_4() -> Vec<Check> {
    let mut c = zero_gap(DualVariant::StickyZeroGap);
    c.extend(zero_gap(DualVariant::DuplicationZeroGap));
    c
}

fn criterion_5() -> Vec<Check> {
    [0.3, 0.6, 0.9]
        .par_iter()
        .flat_map(|&p| {
            let mut out = Vec::new();
            let profile = RepeatChannel::deletion(p).and_then(|c| {
                build_dual(DualVariant::GeomDelTruncated, p, 0.7, 1.0)
                    .and_then(|d| kl_gap_profile(&c, &d, 30))
            });
            let envelope = i_p(p);
            match (profile, envelope) {
                (Ok(prof), Ok(ip)) => {
                    let mut worst = 0.0f64;
                    let mut over = 0.0f64;
                    for x in 1..=30u64 {
                        let r = r_p(x, p).unwrap_or(f64::NAN);
                        worst = worst.max((prof.gap(x).unwrap() - r).abs());
                        over = over.max(r - (1.0 + 2.0 * p).powi(1 - x as i32) * ip);
                    }
                    out.push(Check::new(
                        format!("gap = R_p, p={p}"),
                        worst <= 1e-6,
                        format!("max deviation {worst:.2e}"),
                    ));
                    out.push(Check::new(
                        format!("R_p envelope, p={p}"),
                        over <= 0.0,
                        format!("max excess {over:.2e}"),
                    ));
                }
                (a, b) => out.push(Check::new(
                    format!("p={p}"),
                    false,
                    format!("{:?} {:?}", a.err(), b.err()),
                )),
            }
            out
        })
        .collect()
}

fn criterion_6() -> Vec<Check> {
    (1..=19)
        .into_par_iter()
        .map(|k| {
            let p = k as f64 * 0.05;
            let label = format!("p={p:.2}");
            match analytic_gaps(DualVariant::GeomDelConvexity, p, 500) {
                Ok(g) => {
                    let eps = g.iter().cloned().fold(0.5, f64::min);
                    Check::new(label, eps >= -1e-9, format!("eps {eps:.6}"))
                }
                Err(e) => Check::new(label, false, e.to_string()),
            }
        })
        .collect()
}

fn criterion_7() -> Vec<Check> {
    let mut checks: Vec<Check> = [0.4, 0.7]
        .par_iter()
        .flat_map(|&p| {
            let d = 1.0 - p;
            let q = 0.6;
            let channel = RepeatChannel::deletion(p).unwrap();
            let base = build_dual(DualVariant::GeomDelConvexity, p, q, 1.0)
                .and_then(|dual| kl_gap_profile(&channel, &dual, 20));
            [("0.3", 0.3), ("d", d), ("1", 1.0)]
                .iter()
                .map(|&(name, delta)| {
                    let label = format!("delta identity p={p} delta={name}");
                    let shifted = build_dual(DualVariant::GeomDelConvexity, p, q, delta)
                        .and_then(|dual| kl_gap_profile(&channel, &dual, 20));
                    match (&base, shifted) {
                        (Ok(b), Ok(s)) => {
                            let worst = (1..=20u64)
                                .map(|x| {
                                    (s.gap(x).unwrap()
                                        - b.gap(x).unwrap()
                                        - delta_shift(x, p, delta))
                                    .abs()
                                })
                                .fold(0.0, f64::max);
                            Check::new(label, worst <= 1e-9, format!("max deviation {worst:.2e}"))
                        }
                        (_, Err(e)) => Check::new(label, false, e.to_string()),
                        (Err(e), _) => Check::new(label, false, e.to_string()),
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    for p in [0.2, 0.5, 0.8] {
        let conv = WeightTable::new(DualVariant::GeomDelConvexity, p).unwrap();
        let invbin = WeightTable::new(DualVariant::InverseBinomial, p).unwrap();
        let log_d = (1.0 - p).ln();
        let worst = (1..=200u64)
            .map(|y| {
                let a = conv.evaluate(y).unwrap();
                let b = invbin.evaluate(y).unwrap();
                // Both sides are sums of log-gamma values of size up to
                // log Γ(y/p + 1); agreement is measured in ulps of that.
                let scale = log_gamma(y as f64 / p + 1.0).unwrap().max(1.0);
                (a - b - log_d).abs() / (scale * f64::EPSILON)
            })
            .fold(0.0, f64::max);
        checks.push(Check::new(
            format!("inverse binomial relation p={p}"),
            worst <= 16.0,
            format!("max deviation {worst:.1} ulp of the largest term"),
        ));
    }
    checks
}

fn criterion_8() -> Vec<Check> {
    let mut checks = Vec::new();
    let target = 1.0 / (2.0 * LN_2);
    match geomdel_elementary_bound(1.0 - 1e-6) {
        Ok(r) => checks.push(Check::new(
            "d=1e-6 equals 1/(2 ln 2)",
            (r.bound_bits - target).abs() <= 1e-4,
            format!("{:.6} vs {target:.6}", r.bound_bits),
        )),
        Err(e) => checks.push(Check::new("d=1e-6", false, e.to_string())),
    }
    for k in 0..10 {
        let d = 10f64.powf(-3.0 - k as f64 / 3.0);
        let label = format!("d={d:.1e} at most 0.73");
        match geomdel_elementary_bound(1.0 - d) {
            Ok(r) => checks.push(Check::new(
                label,
                r.bound_bits <= 0.73,
                format!("{:.6}", r.bound_bits),
            )),
            Err(e) => checks.push(Check::new(label, false, e.to_string())),
        }
    }
    checks
}

fn criterion_9() -> Vec<Check> {
    let rate = |lambda: f64| {
        let config = SimConfig::new(2000, lambda, 0.1, 200, 20_240_607);
        simulate(&config).success_rate
    };
    let rates: Vec<f64> = [20.0, 50.0, 100.0, 200.0]
        .iter()
        .map(|&l| rate(l))
        .collect();
    let mut checks = vec![Check::new(
        "lambda=200 success rate at least 0.99",
        rates[3] >= 0.99,
        format!("{:.3}", rates[3]),
    )];
    let dips = rates.windows(2).filter(|w| w[1] < w[0]).count();
    let worst_dip = rates.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
    checks.push(Check::new(
        "non-decreasing in lambda",
        dips <= 1 && worst_dip <= 0.01,
        format!("rates {rates:?}"),
    ));
    checks
}

fn criterion_10() -> Vec<Check> {
    let mut checks = Vec::new();
    for z in [0.1, 0.5, 1.0, 2.5, 7.0, 20.0] {
        let a = log_gamma_via_integral(z, 1e-12).unwrap_or(f64::NAN);
        let b = log_gamma(1.0 + z).unwrap();
        checks.push(Check::new(
            format!("log gamma integral z={z}"),
            (a - b).abs() <= 1e-8,
            format!("deviation {:.1e}", (a - b).abs()),
        ));
    }
    let variants = [
        DualVariant::StickyZeroGap,
        DualVariant::DuplicationZeroGap,
        DualVariant::GeomDelConvexity,
        DualVariant::GeomDelTruncated,
        DualVariant::InverseBinomial,
    ];
    let cases: Vec<(DualVariant, f64, f64)> = variants
        .iter()
        .flat_map(|&v| [(0.2, 0.4), (0.5, 0.8), (0.8, 0.95)].map(|(p, q)| (v, p, q)))
        .collect();
    checks.extend(
        cases
            .par_iter()
            .map(|&(v, p, q)| {
                let label = format!("normalization {v:?} p={p} q={q}");
                let delta = if v.includes_zero() { 1.0 - p } else { 1.0 };
                match build_dual(v, p, q, delta) {
                    Ok(dual) => {
                        let (y_max, tail) = dual.truncation();
                        let total: f64 = (0..=y_max).map(|y| dual.pmf(y).unwrap()).sum();
                        let dev = (total - 1.0).abs();
                        Check::new(
                            label,
                            dev <= tail + 1e-10,
                            format!("|sum - 1| {dev:.1e}, tail {tail:.1e}"),
                        )
                    }
                    Err(e) => Check::new(label, false, e.to_string()),
                }
            })
            .collect::<Vec<_>>(),
    );
    let ys = [100u64, 200, 500, 1000, 2000, 5000, 10_000];
    let growth: Vec<(DualVariant, f64)> = variants
        .iter()
        .flat_map(|&v| [0.1, 0.5, 0.9].map(|p| (v, p)))
        .collect();
    checks.extend(
        growth
            .par_iter()
            .map(|&(v, p)| {
                let label = format!("growth band {v:?} p={p}");
                let table = WeightTable::new(v, p).unwrap();
                let vals: Result<Vec<f64>, _> = ys
                    .iter()
                    .map(|&y| table.evaluate(y).map(|b| b + 0.5 * (y as f64).ln()))
                    .collect();
                band_check(label, vals)
            })
            .collect::<Vec<_>>(),
    );
    for p in [0.1, 0.5, 0.9] {
        let label = format!("truncated asymptotics p={p}");
        let li = log_integral_li(1.0 / (1.0 + 2.0 * p)).unwrap();
        let vals: Result<Vec<f64>, _> = ys
            .iter()
            .map(|&y| {
                let s = y as f64 * (1.0 - p) / p;
                lambda_trunc_geomdel(y, p).map(|(l1, _)| l1 - log_gamma(s).unwrap() - s * li)
            })
            .collect();
        checks.push(band_check(label, vals));
    }
    checks
}

/// Passes when the values stay within a band of width 0.05.
fn band_check(label: String, vals: Result<Vec<f64>, repeatcap_core::Error>) -> Check {
    match vals {
        Ok(vals) => {
            let hi = vals.iter().cloned().fold(f64::MIN, f64::max);
            let lo = vals.iter().cloned().fold(f64::MAX, f64::min);
            Check::new(label, hi - lo <= 0.05, format!("spread {:.2e}", hi - lo))
        }
        Err(e) => Check::new(label, false, e.to_string()),
    }
}

const CRITERIA: [Criterion; 10] = [
    Criterion {
        id: 1,
        title: "sticky table",
        run: criterion_1,
    },
    Criterion {
        id: 2,
        title: "duplication table",
        run: criterion_2,
    },
    Criterion {
        id: 3,
        title: "deletion table",
        run: criterion_3,
    },
    Criterion {
        id: 4,
        title: "zero KL-gap duals",
        run: criterion_4,
    },
    Criterion {
        id: 5,
        title: "truncated gap identity",
        run: criterion_5,
    },
    Criterion {
        id: 6,
        title: "convexity gap nonnegative",
        run: criterion_6,
    },
    Criterion {
        id: 7,
        title: "mass-at-zero identity",
        run: criterion_7,
    },
    Criterion {
        id: 8,
        title: "large-p elementary bound",
        run: criterion_8,
    },
    Criterion {
        id: 9,
        title: "Poisson-repeat Monte Carlo",
        run: criterion_9,
    },
    Criterion {
        id: 10,
        title: "numerical substrate",
        run: criterion_10,
    },
];

fn main() -> ExitCode {
    let outcomes: Vec<(u32, &str, Vec<Check>, f64)> = CRITERIA
        .par_iter()
        .map(|c| {
            let start = Instant::now();
            let checks = (c.run)();
            (c.id, c.title, checks, start.elapsed().as_secs_f64())
        })
        .collect();
    let mut unexpected = Vec::new();
    for (id, title, checks, secs) in &outcomes {
        let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
        let status = if failed.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {status} {title}: {} of {} checks passed ({secs:.1} s)",
            checks.len() - failed.len(),
            checks.len()
        );
        for f in &failed {
            let known = KNOWN_RED.contains(&(*id, f.label.as_str()));
            println!(
                "    {} {}: {}",
                if known { "known" } else { "NEW " },
                f.label,
                f.detail
            );
            if !known {
                unexpected.push(format!("{id}: {}", f.label));
            }
        }
        if std::env::var_os("ACCEPTANCE_VERBOSE").is_some() {
            for c in checks.iter().filter(|c| c.pass) {
                println!("    ok {}: {}", c.label, c.detail);
            }
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: no failures beyond the known reference discrepancies");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected failures: {}", unexpected.join("; "));
        ExitCode::FAILURE
    }
}
