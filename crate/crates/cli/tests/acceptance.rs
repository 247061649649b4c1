//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

use std::process::Command;
use std::time::Instant;

use mfbm_asian::analytic::series;
use mfbm_asian::{
    conditional_lognormal_oracle, mc_price, mc_terminal_spot_mean, normal_cdf, poisson_weights,
    price, Averaging, Fidelity, McConfig, ModelParams, OptionContract, OptionKind,
    TruncationPolicy,
};

const Z_MAX: f64 = 3.0;
const BIN: &str = env!("CARGO_BIN_EXE_mfbm-asian");

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn base() -> ModelParams {
    ModelParams {
        s0: 100.0,
        r: 0.05,
        q: 0.01,
        sigma: 0.2,
        epsilon: 0.1,
        hurst: 0.75,
        lambda: 0.0,
        mu_j: -0.1,
        sigma_j: 0.0,
    }
}

const KINDS: [OptionKind; 2] = [OptionKind::Call, OptionKind::Put];

/// The 72-point grid: H × λ × σ_J × K/S0 × kind, `m = 1`, `T = 1`.
fn grid(averaging: Averaging) -> Vec<(ModelParams, OptionContract)> {
    let mut out = Vec::new();
    for hurst in [0.55, 0.75, 0.9] {
        for lambda in [0.0, 0.5] {
            for sigma_j in [0.0, 0.2] {
                for k in [0.9, 1.0, 1.1] {
                    for kind in KINDS {
                        let model = ModelParams {
                            hurst,
                            lambda,
                            sigma_j,
                            ..base()
                        };
                        let c = OptionContract::call(100.0 * k, 1.0)
                            .with_kind(kind)
                            .with_averaging(averaging);
                        out.push((model, c));
                    }
                }
            }
        }
    }
    out
}

/// Jump-free, fractional-free cases at K/S0 ∈ {0.9, 1, 1.1}.
fn exact_regime(averaging: Averaging) -> Vec<(ModelParams, OptionContract)> {
    let model = ModelParams {
        epsilon: 0.0,
        hurst: 0.5,
        ..base()
    };
    let mut out = Vec::new();
    for k in [0.9, 1.0, 1.1] {
        for kind in KINDS {
            out.push((
                model,
                OptionContract::call(100.0 * k, 1.0)
                    .with_kind(kind)
                    .with_averaging(averaging),
            ));
        }
    }
    out
}

fn criterion_1() -> Verdict {
    let mut worst = (0.0f64, String::new());
    let mut fails = 0;
    let mut n = 0;
    for (a, averaging) in [Averaging::Geometric, Averaging::Arithmetic]
        .into_iter()
        .enumerate()
    {
        for (i, (model, c)) in grid(averaging).into_iter().enumerate() {
            let analytic = price(&model, &c).unwrap().price;
            let seed = 10_000 + (a * 100 + i) as u64;
            let est = conditional_lognormal_oracle(&model, &c, 1_000_000, seed).unwrap();
            let z = est.z_score(analytic);
            n += 1;
            if z.abs() > Z_MAX {
                fails += 1;
            }
            if z.abs() > worst.0.abs() {
                worst = (
                    z,
                    format!(
                        "{averaging:?} {:?} H={} λ={} σJ={} K={}",
                        c.kind, model.hurst, model.lambda, model.sigma_j, c.strike
                    ),
                );
            }
        }
    }
    verdict(
        fails == 0,
        format!(
            "{n} cases at 1e6 samples, {fails} outside 3 SE, max |z| = {:.3} ({})",
            worst.0.abs(),
            worst.1
        ),
    )
}

fn criterion_2() -> Verdict {
    let mut fails = 0;
    let mut max_z = 0.0f64;
    let mut n = 0;
    for m in [2u32, 3] {
        for (j, averaging) in [Averaging::Geometric, Averaging::Arithmetic]
            .into_iter()
            .enumerate()
        {
            for (i, (hurst, k)) in [0.55, 0.9]
                .into_iter()
                .flat_map(|h| [0.9, 1.0, 1.1].map(|k| (h, k)))
                .enumerate()
            {
                let model = ModelParams {
                    hurst,
                    lambda: 0.5,
                    sigma_j: 0.2,
                    ..base()
                };
                let c = OptionContract::call(100f64.powi(m as i32) * k, 1.0)
                    .with_power(m)
                    .with_averaging(averaging)
                    .with_fidelity(Fidelity::Consistent);
                let analytic = price(&model, &c).unwrap().price;
                let seed = 20_000 + u64::from(m) * 100 + (j * 10 + i) as u64;
                let est = conditional_lognormal_oracle(&model, &c, 1_000_000, seed).unwrap();
                let z = est.z_score(analytic);
                n += 1;
                max_z = max_z.max(z.abs());
                if z.abs() > Z_MAX {
                    fails += 1;
                }
            }
        }
    }
    let mut max_rel = 0.0f64;
    for averaging in [Averaging::Geometric, Averaging::Arithmetic] {
        for (model, c) in grid(averaging) {
            let p = price(&model, &c.with_fidelity(Fidelity::Paper))
                .unwrap()
                .price;
            let q = price(&model, &c.with_fidelity(Fidelity::Consistent))
                .unwrap()
                .price;
            max_rel = max_rel.max((p - q).abs() / p.abs().max(f64::MIN_POSITIVE));
        }
    }
    verdict(
        fails == 0 && max_rel <= 1e-14,
        format!(
            "m∈{{2,3}}: {n} consistent cases, {fails} outside 3 SE, max |z| = {max_z:.3}; m=1 paper vs consistent max rel diff = {max_rel:.1e}"
        ),
    )
}

fn criterion_3() -> Verdict {
    let mut fails = 0;
    let mut max_z = 0.0f64;
    for (i, (model, c)) in exact_regime(Averaging::Geometric).into_iter().enumerate() {
        let analytic = price(&model, &c).unwrap().price;
        let est = mc_price(&model, &c, &McConfig::new(100_000, 256, 30_000 + i as u64)).unwrap();
        let z = est.z_score(analytic);
        max_z = max_z.max(z.abs());
        if z.abs() > Z_MAX {
            fails += 1;
        }
    }
    verdict(
        fails == 0,
        format!("6 cases, 1e5 paths × 256 steps, {fails} outside 3 SE, max |z| = {max_z:.3}"),
    )
}

/// Path-MC arithmetic estimates for the exact-regime cases, shared by 4 and 5.
fn exact_regime_arithmetic() -> Vec<(mfbm_asian::PriceResult, mfbm_asian::McEstimate)> {
    exact_regime(Averaging::Arithmetic)
        .into_iter()
        .enumerate()
        .map(|(i, (model, c))| {
            let res = price(&model, &c).unwrap();
            let cfg = McConfig::new(100_000, 256, 40_000 + i as u64).with_control_variate(true);
            (res, mc_price(&model, &c, &cfg).unwrap())
        })
        .collect()
}

fn criterion_4(mc: &[(mfbm_asian::PriceResult, mfbm_asian::McEstimate)]) -> Verdict {
    let mut chain_fails = 0;
    let mut n = 0;
    for (model, c) in grid(Averaging::Arithmetic) {
        let res = price(&model, &c).unwrap();
        let (lo, hi) = (res.lower_bound.unwrap(), res.upper_bound.unwrap());
        let slack = 1e-12 * hi.abs().max(1.0);
        n += 1;
        if !(lo <= res.price + slack && res.price <= hi + slack) {
            chain_fails += 1;
        }
    }
    let mut mc_fails = 0;
    for (res, est) in mc {
        let tol = Z_MAX * est.std_error;
        if !(res.lower_bound.unwrap() - tol <= est.mean
            && est.mean <= res.upper_bound.unwrap() + tol)
        {
            mc_fails += 1;
        }
    }
    verdict(
        chain_fails == 0 && mc_fails == 0,
        format!(
            "bound chain violated at {chain_fails}/{n} grid points; path MC outside bracket ± 3 SE in {mc_fails}/{} exact-regime cases",
            mc.len()
        ),
    )
}

fn criterion_5(mc: &[(mfbm_asian::PriceResult, mfbm_asian::McEstimate)]) -> Verdict {
    let mut fails = 0;
    let mut worst_ratio = 0.0f64;
    for (res, est) in mc {
        let gap = (res.price - est.mean).abs();
        let allowed = res.error_bound.unwrap() + Z_MAX * est.std_error;
        worst_ratio = worst_ratio.max(gap / allowed);
        if gap > allowed {
            fails += 1;
        }
    }
    verdict(
        fails == 0,
        format!(
            "{} cases, {fails} violations, max |C̃ − MC| / (bound + 3 SE) = {worst_ratio:.3}",
            mc.len()
        ),
    )
}

fn criterion_6() -> Verdict {
    let sets = [
        ModelParams {
            hurst: 0.8,
            lambda: 0.5,
            sigma_j: 0.2,
            ..base()
        },
        ModelParams {
            s0: 80.0,
            r: 0.03,
            q: 0.0,
            sigma: 0.15,
            epsilon: 0.2,
            hurst: 0.6,
            lambda: 2.0,
            mu_j: 0.05,
            sigma_j: 0.1,
        },
    ];
    let mut zs = Vec::new();
    for (i, model) in sets.iter().enumerate() {
        let est =
            mc_terminal_spot_mean(model, 1.0, &McConfig::new(1_000_000, 2, 60_000 + i as u64))
                .unwrap();
        zs.push(est.z_score(model.s0 * model.log_expected_growth(1.0).exp()));
    }
    verdict(
        zs.iter().all(|z| z.abs() <= Z_MAX),
        format!(
            "2 jump-active sets at 1e6 paths, z = {:.3}, {:.3}",
            zs[0], zs[1]
        ),
    )
}

fn criterion_7() -> Verdict {
    let mut worst_pc = 0.0f64;
    let mut worst_collapse = 0.0f64;
    for averaging in [Averaging::Geometric, Averaging::Arithmetic] {
        for (model, c) in grid(averaging) {
            let s = series(&model, &c, &TruncationPolicy::default()).unwrap();
            for t in &s.terms {
                let want = t.forward - t.discounted_strike;
                let rel =
                    (t.call - t.put - want).abs() / t.forward.abs().max(t.discounted_strike.abs());
                worst_pc = worst_pc.max(rel);
            }
            let zero = price(
                &ModelParams {
                    lambda: 0.0,
                    ..model
                },
                &c,
            )
            .unwrap()
            .price;
            let tiny = price(
                &ModelParams {
                    lambda: 1e-12,
                    ..model
                },
                &c,
            )
            .unwrap()
            .price;
            worst_collapse = worst_collapse.max((tiny - zero).abs() / zero);
        }
    }
    let mut worst_reflect = 0.0f64;
    for i in -4000..=4000 {
        let x = f64::from(i) * 0.01;
        let s = normal_cdf(x).unwrap() + normal_cdf(-x).unwrap();
        worst_reflect = worst_reflect.max((s - 1.0).abs());
    }
    let mut worst_mass = 0.0f64;
    let mut worst_tail = 0.0f64;
    for lt in [
        0.0, 1e-9, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0, 100.0, 250.0,
    ] {
        let pw = poisson_weights(lt, &TruncationPolicy::default()).unwrap();
        let total: f64 = pw.weights.iter().sum();
        worst_mass = worst_mass.max((total + pw.truncated_mass - 1.0).abs());
        worst_tail = worst_tail.max(pw.truncated_mass);
    }
    verdict(
        worst_pc <= 1e-12 && worst_reflect <= 1e-12 && worst_mass <= 1e-12 && worst_tail <= 1e-12
            && worst_collapse <= 1e-9,
        format!(
            "put–call {worst_pc:.1e}, Φ reflection {worst_reflect:.1e}, Σw + tail − 1 {worst_mass:.1e}, max tail {worst_tail:.1e}, λ→0 collapse {worst_collapse:.1e}"
        ),
    )
}

fn run_bin(args: &[&str]) -> (bool, Vec<u8>) {
    let out = Command::new(BIN)
        .args(args)
        .env_remove("MFBM_ASIAN_SEED")
        .output()
        .expect("binary runs");
    (out.status.success(), out.stdout)
}

fn parse_csv(bytes: &[u8]) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::str::from_utf8(bytes).unwrap();
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap_or("")
        .split(',')
        .map(String::from)
        .collect();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|c| {
                    if c.is_empty() {
                        f64::NAN
                    } else {
                        c.parse().unwrap()
                    }
                })
                .collect()
        })
        .collect();
    (header, rows)
}

fn direction(ys: &[f64]) -> &'static str {
    let scale = ys.iter().fold(0.0f64, |a, y| a.max(y.abs())).max(1e-300);
    let tol = 1e-12 * scale;
    let up = ys.windows(2).all(|w| w[1] >= w[0] - tol);
    let down = ys.windows(2).all(|w| w[1] <= w[0] + tol);
    match (up, down) {
        (true, true) => "flat",
        (true, false) => "increasing",
        (false, true) => "decreasing",
        (false, false) => "non-monotone",
    }
}

fn criterion_8() -> Verdict {
    let market = [
        "--s0",
        "100",
        "--r",
        "0.05",
        "--q",
        "0.01",
        "--sigma",
        "0.2",
        "--eps",
        "0.2",
        "--h",
        "0.8",
        "--lambda",
        "0.5",
        "--mu-j",
        "-0.1",
        "--sigma-j",
        "0.2",
    ];
    let axes: [(&str, &str, &str, &str, &str); 3] = [
        ("hurst", "0.55", "0.95", "9", "2"),
        ("sigma_j", "0", "0.5", "9", "1"),
        ("mu_j", "-0.3", "0.3", "9", "1"),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (avg, kind) in [
        ("geometric", "call"),
        ("arithmetic", "call"),
        ("geometric", "put"),
    ] {
        for (axis, start, stop, count, t) in axes {
            let mut dirs = Vec::new();
            for seed in ["1", "2"] {
                let mut args = vec![
                    "sweep", "--k", "100", "--t", t, "--avg", avg, "--kind", kind,
                ];
                args.extend(market);
                args.extend([
                    "--axis",
                    axis,
                    "--start",
                    start,
                    "--stop",
                    stop,
                    "--count",
                    count,
                    "--mc-paths",
                    "20000",
                    "--mc-oracle",
                    "conditional",
                    "--seed",
                    seed,
                ]);
                let (success, out) = run_bin(&args);
                let (_, rows) = parse_csv(&out);
                let finite = rows.iter().all(|r| r[1].is_finite() && r[6].is_finite());
                ok &= success && rows.len() == 9 && finite;
                let analytic: Vec<f64> = rows.iter().map(|r| r[1]).collect();
                let mc: Vec<f64> = rows.iter().map(|r| r[6]).collect();
                dirs.push((direction(&analytic), direction(&mc)));
            }
            ok &= dirs[0].0 == dirs[1].0;
            notes.push(format!(
                "{avg} {kind} {axis}: {} (mc {}/{})",
                dirs[0].0, dirs[0].1, dirs[1].1
            ));
        }
    }
    for avg in ["geometric", "arithmetic"] {
        let mut args = vec!["sweep", "--avg", avg, "--kind", "call"];
        args.extend(market);
        args.extend([
            "--axis", "strike", "--start", "80", "--stop", "120", "--count", "5", "--axis2",
            "maturity", "--start2", "0.5", "--stop2", "2.5", "--count2", "5",
        ]);
        let (success, out) = run_bin(&args);
        let (header, rows) = parse_csv(&out);
        ok &= success && rows.len() == 25 && header[1] == "axis2_value";
        ok &= rows.iter().all(|r| r[2].is_finite());
        for j in 0..5 {
            let by_strike: Vec<f64> = (0..5).map(|i| rows[i * 5 + j][2]).collect();
            let d = direction(&by_strike);
            ok &= d == "decreasing" || d == "flat";
        }
        notes.push(format!("{avg} call K×T surface non-increasing in K"));
    }
    verdict(ok, notes.join("; "))
}

fn criterion_9() -> Verdict {
    let price_args = [
        "price",
        "--k",
        "100",
        "--t",
        "1",
        "--eps",
        "0.1",
        "--h",
        "0.8",
        "--lambda",
        "0.5",
        "--mu-j",
        "-0.1",
        "--sigma-j",
        "0.2",
        "--avg",
        "arithmetic",
        "--mc-paths",
        "20000",
        "--control-variate",
        "--seed",
        "42",
    ];
    let runs: [&[&str]; 3] = [
        &price_args,
        &[
            "validate",
            "--oracle",
            "conditional",
            "--grid",
            "small",
            "--seed",
            "42",
        ],
        &[
            "validate",
            "--oracle",
            "path",
            "--grid",
            "small",
            "--seed",
            "42",
            "--threads",
            "1",
        ],
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for args in runs {
        let (s1, a) = run_bin(args);
        let (s2, b) = run_bin(args);
        let same = a == b && !a.is_empty();
        ok &= s1 && s2 && same;
        let label = if args[0] == "validate" {
            format!("validate {}", args[2])
        } else {
            args[0].to_string()
        };
        notes.push(format!(
            "{label}: {}",
            if same { "identical" } else { "DIFFERENT" }
        ));
    }
    verdict(ok, notes.join("; "))
}

fn main() {
    let started = Instant::now();
    let mut results: Vec<(u32, &str, Verdict)> = Vec::new();
    let mut record = |id, name, f: &dyn Fn() -> Verdict| {
        let t = Instant::now();
        let v = f();
        println!(
            "criterion {id} {name}: {} ({:.1}s) {}",
            if v.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            v.detail
        );
        results.push((id, name, v));
    };
    record(1, "formula-algebra equivalence", &criterion_1);
    record(2, "power consistency", &criterion_2);
    record(3, "exact-regime path validation", &criterion_3);
    let mc = exact_regime_arithmetic();
    record(4, "bound chain", &|| criterion_4(&mc));
    record(5, "arithmetic error bound", &|| criterion_5(&mc));
    record(6, "expected terminal spot", &criterion_6);
    record(7, "identity suite", &criterion_7);
    record(8, "figure-shape sweeps", &criterion_8);
    record(9, "determinism", &criterion_9);

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        results.len() - failed.len(),
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
