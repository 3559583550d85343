//! Acceptance criteria, one line per criterion.
//!
//! Runs without the libtest harness so every criterion is evaluated and
//! reported even when an earlier one fails. Exits non-zero if any fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use common::{to_f64, Exact};
use rand::Rng;
use rand_distr::Binomial as BinomialSampler;
use randp::grouptest::{power_fixed_individuals, power_fixed_inspections, GroupPowerConfig};
use randp::ingest::load_strata;
use randp::multiple::{
    bonferroni_level, fwer_mc, k0_study, sidak_level, Method, MultipleProblem, Stratum,
};
use randp::power::{drops_exceeding, power_vs_n, PowerQuery};
use randp::pvalues::{check_validity, unit_grid};
use randp::rng::{uniform, DEFAULT_SEED};
use randp::{CurveSeries, OneSidedProblem, PValueKind, RandomizationInput, SeedKey, StreamRole};

const KINDS: [PValueKind; 4] = PValueKind::ALL;
const C_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const N_GRID: [u64; 3] = [2, 10, 50];
const NULL_THETAS: [f64; 5] = [0.01, 0.05, 0.1, 0.2, 0.25];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/covid_fixture.csv")
}

/// 1. Validity grids.
fn validity_grids() -> Verdict {
    let start = Instant::now();
    let grid = unit_grid(101);
    let mut worst = f64::NEG_INFINITY;
    let mut at = String::new();
    for n in N_GRID {
        let p = OneSidedProblem::new(n, 0.25).unwrap();
        for kind in KINDS {
            for c in C_GRID {
                let r = check_validity(kind, &p, c, &NULL_THETAS, &grid).unwrap();
                if r.max_violation > worst {
                    worst = r.max_violation;
                    at = format!("{kind} n={n} c={c} theta={} t={}", r.worst_theta, r.worst_t);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 1e-10 && within(elapsed, 5.0),
        format!("max(CDF(t) - t) = {worst:.3e} at {at}; {elapsed:.2?} (limit 5 s)"),
    )
}

/// 2. Exact uniformity at the boundary.
fn uniform_at_boundary() -> Verdict {
    let grid = unit_grid(101);
    let mut worst: f64 = 0.0;
    for n in N_GRID {
        let p = OneSidedProblem::new(n, 0.25).unwrap();
        for &t in &grid {
            worst = worst.max((p.pt_rand_cdf(0.25, t).unwrap() - t).abs());
            for c in C_GRID {
                worst = worst.max((p.rand2_cdf(0.25, t, c).unwrap() - t).abs());
            }
        }
    }
    verdict(
        worst <= 1e-12,
        format!("max |CDF(t) - t| = {worst:.3e} (tolerance 1e-12)"),
    )
}

/// 3. Analytic CDFs against exact enumeration.
fn brute_force_oracle() -> Verdict {
    // Levels are the decimals i/100 exactly; the library sees their doubles.
    let grid: Vec<(f64, common::Q)> = (0..=100)
        .map(|i| (i as f64 / 100.0, common::q(i, 100)))
        .collect();
    let boundaries = [(1, 4), (1, 2)];
    let thetas = [
        (1, 100),
        (1, 10),
        (1, 4),
        (37, 100),
        (1, 2),
        (3, 4),
        (9, 10),
    ];
    let cs = [(0, 1), (1, 10), (1, 4), (1, 2), (3, 4), (1, 1)];
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    let mut checked = 0usize;
    let mut note = |err: f64, what: String| {
        if err > worst {
            worst = err;
            at = what;
        }
    };
    for n in 1..=12u64 {
        for (a, b) in boundaries {
            let theta_star = a as f64 / b as f64;
            let p = OneSidedProblem::new(n, theta_star).unwrap();
            for (ta, tb) in thetas {
                let theta = ta as f64 / tb as f64;
                let exact = Exact::new(n, &common::q(a, b), &common::q(ta, tb));
                for (t, tq) in &grid {
                    let t = *t;
                    let e = (p.p_lfc_cdf(theta, t).unwrap() - to_f64(&exact.lfc_cdf(tq))).abs();
                    note(
                        e,
                        format!("lfc n={n} theta*={theta_star} theta={theta} t={t}"),
                    );
                    let e = (p.pt_rand_cdf(theta, t).unwrap() - to_f64(&exact.pt_cdf(tq))).abs();
                    note(
                        e,
                        format!("pt n={n} theta*={theta_star} theta={theta} t={t}"),
                    );
                    checked += 2;
                    for (ca, cb) in cs {
                        let c = ca as f64 / cb as f64;
                        let cq = common::q(ca, cb);
                        let e = (p.rand1_cdf(theta, t, c).unwrap()
                            - to_f64(&exact.rand1_cdf(tq, &cq)))
                        .abs();
                        note(
                            e,
                            format!("rand1 n={n} theta*={theta_star} theta={theta} t={t} c={c}"),
                        );
                        let e = (p.rand2_cdf(theta, t, c).unwrap()
                            - to_f64(&exact.rand2_cdf(tq, &cq)))
                        .abs();
                        note(
                            e,
                            format!("rand2 n={n} theta*={theta_star} theta={theta} t={t} c={c}"),
                        );
                        checked += 2;
                    }
                }
            }
        }
    }
    verdict(
        worst <= 1e-10,
        format!("{checked} comparisons, max abs error {worst:.3e} at {at} (tolerance 1e-10)"),
    )
}

/// Kolmogorov distance between the sample and the analytic CDF, evaluated at
/// both sides of every sample point. The left limit is taken a relative 1e-9
/// below the point, beyond the CDFs' tie tolerance and far below atom spacing.
fn sup_distance(mut sample: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(f64::total_cmp);
    let m = sample.len() as f64;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < sample.len() {
        let v = sample[i];
        let mut j = i;
        while j < sample.len() && sample[j] == v {
            j += 1;
        }
        worst = worst
            .max((cdf(v) - j as f64 / m).abs())
            .max((cdf(v * (1.0 - 1e-9)) - i as f64 / m).abs());
        i = j;
    }
    worst
}

/// 4. Monte Carlo consistency.
fn monte_carlo_consistency() -> Verdict {
    let start = Instant::now();
    let reps = 100_000u64;
    let (n, theta_star, c) = (50u64, 0.25, 0.5);
    let p = OneSidedProblem::new(n, theta_star).unwrap();
    let obs: Vec<_> = (0..=n as i64).map(|k| p.observe(k, c).unwrap()).collect();
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for (stratum, theta) in [0.20, 0.37].into_iter().enumerate() {
        let sampler = BinomialSampler::new(n, theta).unwrap();
        let mut data = SeedKey::new(DEFAULT_SEED, 0, stratum as u64, StreamRole::Data).stream();
        let counts: Vec<u64> = (0..reps).map(|_| data.sample(sampler)).collect();
        let uk = SeedKey::new(DEFAULT_SEED, 0, stratum as u64, StreamRole::U);
        let vk = SeedKey::new(DEFAULT_SEED, 0, stratum as u64, StreamRole::UTilde);
        for kind in KINDS {
            let sample: Vec<f64> = counts
                .iter()
                .enumerate()
                .map(|(i, &k)| {
                    obs[k as usize].value(kind, uniform(&uk, i as u64), uniform(&vk, i as u64))
                })
                .collect();
            let d = sup_distance(sample, |t| {
                p.cdf(kind, theta, t.clamp(0.0, 1.0), c).unwrap()
            });
            if d > worst {
                worst = d;
                at = format!("{kind} theta={theta}");
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        worst <= 0.01 && within(elapsed, 30.0),
        format!(
            "max sup-distance {worst:.4} at {at} over 1e5 draws; {elapsed:.2?} (limits 0.01, 30 s)"
        ),
    )
}

fn power_n_setting() -> Vec<CurveSeries> {
    let ns: Vec<u64> = (5..=150).collect();
    KINDS
        .iter()
        .map(|&k| power_vs_n(&PowerQuery::new(k, 0.25, 0.5, 0.05, 0.5).unwrap(), &ns).unwrap())
        .collect()
}

/// 5. Power against n.
fn power_vs_n_shape() -> Verdict {
    let start = Instant::now();
    let s = power_n_setting();
    let [lfc, rand1, pt, rand2] = [&s[0], &s[1], &s[2], &s[3]];
    let a = !drops_exceeding(lfc, 0.0).is_empty();
    let b = drops_exceeding(pt, 1e-12).is_empty() && drops_exceeding(rand2, 1e-12).is_empty();
    let mut order_breaks = Vec::new();
    for i in 0..pt.len() {
        let ok = pt.y[i] + 1e-12 >= rand2.y[i]
            && rand2.y[i] + 1e-12 >= rand1.y[i]
            && pt.y[i] + 1e-12 >= lfc.y[i];
        if !ok {
            order_breaks.push(pt.x[i]);
        }
    }
    let c = order_breaks.is_empty();
    let elapsed = start.elapsed();
    verdict(
        a && b && c && within(elapsed, 10.0),
        format!(
            "(a) lfc decreases: {} (b) pt/rand2 nondecreasing: {b} (c) ordering breaks at n = {order_breaks:?}; {elapsed:.2?}",
            drops_exceeding(lfc, 0.0).len()
        ),
    )
}

fn group_config(kind: PValueKind) -> GroupPowerConfig {
    GroupPowerConfig {
        kind,
        theta_star: 0.1,
        theta_alt: 0.2,
        alpha: 0.05,
        c: 0.5,
        se: 0.95,
        sp: 0.95,
    }
}

/// 6. Power against group size with 50 inspections.
fn fixed_inspections_shape() -> Verdict {
    let s: Vec<f64> = (1..=40).map(f64::from).collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for kind in KINDS {
        let sweep = power_fixed_inspections(&group_config(kind), 50, &s).unwrap();
        let y = &sweep.series.y;
        let (argmax, max) =
            y.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
            );
        let rises_falls = sweep.degenerate.is_empty() && max > y[0] && max > y[y.len() - 1];
        let s_max = sweep.series.x[argmax];
        pass &= rises_falls;
        if kind == PValueKind::Pt {
            pass &= (6.0..=14.0).contains(&s_max);
        }
        parts.push(format!(
            "{kind}: peak {max:.4} at s={s_max}, rise-fall {rises_falls}"
        ));
    }
    verdict(pass, parts.join("; "))
}

fn fixed_individuals_curves() -> Vec<CurveSeries> {
    let g: Vec<u64> = (6..=300).rev().collect();
    KINDS
        .iter()
        .map(|&k| {
            power_fixed_individuals(&group_config(k), 300, &g)
                .unwrap()
                .series
        })
        .collect()
}

/// 7a. Individual testing dominates pooling with 300 individuals.
fn individual_testing_dominates() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in fixed_individuals_curves() {
        assert_eq!(s.x[0], 1.0);
        let (i, best) = s.y[1..]
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| {
                if v > acc.1 {
                    (i + 1, v)
                } else {
                    acc
                }
            });
        let ok = s.y[0] > best;
        pass &= ok;
        parts.push(format!(
            "{}: s=1 {:.4} vs best s>1 {best:.4} at s={:.3}",
            s.kind, s.y[0], s.x[i]
        ));
    }
    verdict(pass, parts.join("; "))
}

/// 7b. Tail behaviour at the three largest group sizes.
fn largest_pool_tails() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in fixed_individuals_curves() {
        let tail = &s.y[s.len() - 3..];
        let ok = match s.kind {
            PValueKind::Pt | PValueKind::Rand2 => tail.iter().all(|v| (v - 0.05).abs() <= 0.01),
            PValueKind::Lfc => tail.iter().all(|&v| v <= 0.01),
            PValueKind::Rand1 => true,
        };
        pass &= ok;
        parts.push(format!("{}: {:.4?}", s.kind, tail));
    }
    verdict(
        pass,
        format!(
            "s in {:.1?}: {}",
            &fixed_individuals_curves()[0].x[fixed_individuals_curves()[0].len() - 3..],
            parts.join("; ")
        ),
    )
}

/// 8. Conservativeness ordering of k0 estimates on the bundled fixture.
fn table2_ordering() -> Verdict {
    let start = Instant::now();
    let problem = load_strata(&fixture(), 0.0254).unwrap();
    let k = problem.k();
    let mut pass = true;
    let mut parts = Vec::new();
    for theta_star in [0.0144, 0.0198, 0.0254] {
        let rows = k0_study(&problem, theta_star, &KINDS, 1000, DEFAULT_SEED).unwrap();
        let k0 = rows[0].k0_true as f64;
        let err = |kind: PValueKind| {
            let r = rows.iter().find(|r| r.kind == kind).unwrap();
            (r.mean_k0_hat, (r.mean_k0_hat - k0).abs())
        };
        let (lfc, e_lfc) = err(PValueKind::Lfc);
        let (pt, e_pt) = err(PValueKind::Pt);
        let (r1, e_r1) = err(PValueKind::Rand1);
        let (r2, e_r2) = err(PValueKind::Rand2);
        let conservative = e_lfc.min(e_pt);
        pass &= e_r1 < conservative && e_r2 < conservative;
        parts.push(format!(
            "theta*={theta_star} k0={k0}: lfc {lfc:.2} rand1 {r1:.2} ump {pt:.2} rand2 {r2:.2}{}",
            if lfc > k as f64 { " (lfc > k)" } else { "" }
        ));
    }
    let elapsed = start.elapsed();
    verdict(
        pass && within(elapsed, 60.0),
        format!("k={k}; {}; {elapsed:.2?}", parts.join("; ")),
    )
}

/// 9. Family-wise error control.
fn fwer_control() -> Verdict {
    let strata = (0..20)
        .map(|i| {
            Stratum::new(format!("s{i}"), 50, 0.25)
                .unwrap()
                .with_theta(0.25)
                .unwrap()
        })
        .collect();
    let problem = MultipleProblem::new(strata, 0.5, 0.5, 0.05).unwrap();
    let est = fwer_mc(
        &problem,
        PValueKind::Pt,
        Method::Bonferroni,
        false,
        10_000,
        DEFAULT_SEED,
    )
    .unwrap();
    let bound = 0.05 + 3.0 * est.std_error;
    let (sidak, bonf) = (sidak_level(20.0, 0.05), bonferroni_level(20.0, 0.05));
    verdict(
        est.estimate <= bound && sidak > bonf,
        format!(
            "FWER {:.4} (se {:.4}, bound {bound:.4}); Sidak {sidak:.6e} > Bonferroni {bonf:.6e}",
            est.estimate, est.std_error
        ),
    )
}

/// 10. Support-point insensitivity of rand1.
fn support_point_semantics() -> Verdict {
    let p = OneSidedProblem::new(50, 0.25).unwrap();
    let s = p.c_star(0.5).unwrap();
    let eps = 1e-6;
    let us: Vec<f64> = (0..200).map(|i| (i as f64 + 0.5) / 200.0).collect();
    let mut same_above = true;
    let mut differs_below = false;
    for t_obs in 0..=50 {
        for &u in &us {
            let at = |c: f64| {
                p.rand1(t_obs, &RandomizationInput::new(u, c).unwrap())
                    .unwrap()
            };
            let base = at(s);
            same_above &= base == at(s + eps);
            differs_below |= base != at(s - eps);
        }
    }
    verdict(
        same_above && differs_below,
        format!(
            "s = {s:.6}: identical at s + 1e-6: {same_above}; differs at s - 1e-6: {differs_below}"
        ),
    )
}

/// 11. Byte-identical CLI output for repeated invocations.
fn cli_determinism() -> Verdict {
    let exe = env!("CARGO_BIN_EXE_randp");
    let dir = tempfile::tempdir().unwrap();
    let data = fixture();
    let data = data.to_str().unwrap();
    let invocations: Vec<Vec<&str>> = vec![
        vec![
            "cdf",
            "--n",
            "50",
            "--theta-star",
            "0.25",
            "--theta",
            "0.2,0.25,0.37",
        ],
        vec![
            "power-n",
            "--theta-star",
            "0.25",
            "--theta",
            "0.5",
            "--n",
            "5..150",
        ],
        vec![
            "power-c",
            "--n",
            "50",
            "--theta-star",
            "0.25",
            "--theta",
            "0.35",
            "--format",
            "json",
        ],
        vec![
            "power-c",
            "--n",
            "50",
            "--theta-star",
            "0.25",
            "--theta",
            "0.35",
            "--around-support",
        ],
        vec!["group-power", "--mode", "inspections"],
        vec!["group-power", "--mode", "individuals", "--format", "json"],
        vec![
            "estimate-k0",
            "--data",
            data,
            "--theta-star",
            "0.0144,0.0254",
            "--reps",
            "200",
            "--seed",
            "7",
        ],
        vec![
            "fwer",
            "--reps",
            "500",
            "--seed",
            "7",
            "--plug-in",
            "--method",
            "sidak",
        ],
        vec!["validity-check", "--n", "2,10"],
    ];
    let mut failures = Vec::new();
    for (i, args) in invocations.iter().enumerate() {
        let outputs: Vec<Vec<u8>> = (0..2)
            .map(|j| {
                let path = dir.path().join(format!("run{i}_{j}.out"));
                let status = Command::new(exe)
                    .args(args)
                    .arg("--out")
                    .arg(&path)
                    .status()
                    .expect("binary runs");
                assert!(status.success(), "{args:?} exited with {status}");
                std::fs::read(&path).unwrap()
            })
            .collect();
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            failures.push(args[0]);
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{} invocations repeated; mismatches: {failures:?}",
            invocations.len()
        ),
    )
}

type Criterion = (&'static str, &'static str, fn() -> Verdict);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("1", "validity grids", validity_grids),
        ("2", "exact uniformity at the boundary", uniform_at_boundary),
        ("3", "brute-force oracle equivalence", brute_force_oracle),
        ("4", "Monte Carlo consistency", monte_carlo_consistency),
        ("5", "power against n", power_vs_n_shape),
        (
            "6",
            "group power, fixed inspections",
            fixed_inspections_shape,
        ),
        (
            "7a",
            "group power, fixed individuals: s=1 dominates",
            individual_testing_dominates,
        ),
        (
            "7b",
            "group power, fixed individuals: large-s tails",
            largest_pool_tails,
        ),
        ("8", "k0 estimate ordering on fixture", table2_ordering),
        ("9", "FWER control", fwer_control),
        ("10", "support-point semantics", support_point_semantics),
        ("11", "CLI determinism", cli_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, f) in &criteria {
        let v = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        if !v.pass {
            failed += 1;
        }
        println!(
            "[{}] criterion {id}: {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
