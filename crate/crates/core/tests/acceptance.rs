//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.
//!
//! Expected values come from independent routes: the Frank–Wolfe oracle,
//! an explicit Hadamard matrix, a bisection solve of the projection's
//! optimality conditions, an equality-constrained Newton solve of the dual
//! step, the centralized solver (for the simulation) and the reference
//! hull distances of iris and mushrooms.

use std::process::ExitCode;
use std::time::Instant;

use rand::Rng;
use saddle_svm::data::{read_libsvm, LabelPolicy};
use saddle_svm::distributed::{run_simulation, Message, PartitionScheme, Simulation};
use saddle_svm::oracle::{fw_oracle, OracleResult, OracleStatus};
use saddle_svm::preprocess::fwht_normalized;
use saddle_svm::rng::{self, Stream};
use saddle_svm::solver::{
    derive_params, dual_objective_g, project_capped_loop, project_capped_sorted, solve_transformed,
    Checkpoint, ProjectionRule, SaddleState,
};
use saddle_svm::synth::{random_instance, InstanceShape};
use saddle_svm::{apply_transform, solve, Matrix, Mode, Solution, SolverConfig, StopRule, TransformedData};

const EPS: f64 = 0.05;
const ALPHA: f64 = 0.85;
const ORACLE_TOL: f64 = 1e-10;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// A solver run on one random instance next to its oracle.
struct FamilyRun {
    seed: u64,
    data: TransformedData,
    oracle: OracleResult,
    sol: Solution,
    /// Same run under the primal-change stopping rule.
    default_rule: Solution,
}

fn family_config(seed: u64, mode: Mode, stop: StopRule) -> SolverConfig {
    SolverConfig {
        epsilon: EPS,
        beta: 0.1,
        mode,
        seed,
        stop,
        ..SolverConfig::default()
    }
}

fn run_family(shape: InstanceShape, nu_mode: bool) -> Vec<FamilyRun> {
    (0..20)
        .map(|seed| {
            let ds = random_instance(seed, shape);
            let data = apply_transform(&ds, seed).unwrap();
            let (mode, nu) = if nu_mode {
                let mode = Mode::nu_from_alpha(ALPHA, ds.n1(), ds.n2()).unwrap();
                (mode, Some(mode.cap()))
            } else {
                (Mode::HardMargin, None)
            };
            let oracle = fw_oracle(&data, nu, ORACLE_TOL).unwrap();
            let sol = solve_transformed(&data, &family_config(seed, mode, StopRule::DualityGap), &mut |_, _| {})
                .unwrap();
            let default_rule =
                solve_transformed(&data, &family_config(seed, mode, StopRule::PrimalChange), &mut |_, _| {})
                    .unwrap();
            FamilyRun {
                seed,
                data,
                oracle,
                sol,
                default_rule,
            }
        })
        .collect()
}

fn ratio_max(runs: &[FamilyRun], f: impl Fn(&FamilyRun) -> f64) -> (f64, u64) {
    runs.iter()
        .map(|r| (f(r), r.seed))
        .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a })
}

fn criterion_1(hm: &[FamilyRun], secs: f64) -> Verdict {
    let (worst, seed) = ratio_max(hm, |r| r.sol.distance / r.oracle.distance);
    let (worst_default, _) = ratio_max(hm, |r| r.default_rule.distance / r.oracle.distance);
    let separable = hm.iter().all(|r| r.oracle.status == OracleStatus::Converged);
    verdict(
        separable && worst <= 1.0 + EPS && secs < 30.0,
        format!(
            "hard margin, 20 seeds: max distance/oracle = {worst:.5} (seed {seed}), bound {:.2}; {secs:.3} s \
             [primal-change rule: {worst_default:.5}]",
            1.0 + EPS
        ),
    )
}

fn criterion_2(nu: &[FamilyRun], overlapping: usize) -> Verdict {
    let (worst, seed) = ratio_max(nu, |r| r.sol.primal / r.oracle.half_sq);
    let (worst_default, _) = ratio_max(nu, |r| r.default_rule.primal / r.oracle.half_sq);
    verdict(
        overlapping == nu.len() && worst <= 1.0 + EPS,
        format!(
            "nu-SVM (alpha {ALPHA}), 20 seeds, {overlapping}/20 with intersecting full hulls: max primal/oracle = \
             {worst:.5} (seed {seed}), bound {:.2} [primal-change rule: {worst_default:.5}]",
            1.0 + EPS
        ),
    )
}

fn dataset_run(path: &str, policy: LabelPolicy, stop: StopRule) -> (Solution, f64) {
    let ds = read_libsvm(path, policy, None).unwrap();
    let config = SolverConfig {
        epsilon: 1e-3,
        beta: 0.1,
        seed: 7,
        stop,
        ..SolverConfig::default()
    };
    let start = Instant::now();
    let sol = solve(&ds, &config).unwrap();
    (sol, start.elapsed().as_secs_f64())
}

fn criterion_3() -> (Verdict, Vec<Solution>) {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let (iris, iris_s) = dataset_run(&format!("{dir}/iris.libsvm"), LabelPolicy::Strict, StopRule::DualityGap);
    let (mush, mush_s) =
        dataset_run(&format!("{dir}/mushrooms.libsvm"), LabelPolicy::ZeroTwoNegative, StopRule::DualityGap);
    let (iris_d, _) = dataset_run(&format!("{dir}/iris.libsvm"), LabelPolicy::Strict, StopRule::PrimalChange);
    let (mush_d, _) =
        dataset_run(&format!("{dir}/mushrooms.libsvm"), LabelPolicy::ZeroTwoNegative, StopRule::PrimalChange);
    let ok = (iris.distance_original - 0.835).abs() <= 0.02
        && (mush.distance_original - 0.516).abs() <= 0.02
        && iris_s < 5.0;
    (
        verdict(
            ok,
            format!(
                "iris {:.4} (target 0.835 ± 0.02, half-squared {:.4}, {iris_s:.2} s), \
                 mushrooms {:.4} (target 0.516 ± 0.02, half-squared {:.4}, {mush_s:.1} s) \
                 [primal-change rule: iris {:.4}, mushrooms {:.4}]",
                iris.distance_original,
                0.5 * iris.distance_original.powi(2),
                mush.distance_original,
                0.5 * mush.distance_original.powi(2),
                iris_d.distance_original,
                mush_d.distance_original,
            ),
        ),
        vec![iris, mush, iris_d, mush_d],
    )
}

/// `⟨w, X⁺η − X⁻ξ⟩ − ½‖w‖²`, the unregularized saddle objective.
fn saddle_value(r: &FamilyRun) -> f64 {
    let z: Vec<f64> = r
        .data
        .xp
        .mul(&r.sol.eta)
        .iter()
        .zip(r.data.xm.mul(&r.sol.xi))
        .map(|(a, b)| a - b)
        .collect();
    let wz: f64 = r.sol.w.iter().zip(&z).map(|(a, b)| a * b).sum();
    let ww: f64 = r.sol.w.iter().map(|a| a * a).sum();
    wz - 0.5 * ww
}

fn criterion_4(hm: &[FamilyRun]) -> Verdict {
    let worst = hm[..10]
        .iter()
        .map(|r| (saddle_value(r) - r.oracle.half_sq).abs() / r.oracle.half_sq)
        .fold(0.0, f64::max);
    verdict(
        worst <= EPS,
        format!("10 instances: max |saddle value − OPT|/OPT = {worst:.2e}, bound {EPS}"),
    )
}

fn criterion_5(hm: &[FamilyRun]) -> Verdict {
    let worst = hm[..10]
        .iter()
        .map(|r| dual_objective_g(&r.sol.w, &r.data, 1.0) / r.oracle.half_sq)
        .fold(f64::INFINITY, f64::min);
    verdict(
        worst >= 1.0 - 2.0 * EPS,
        format!("10 instances: min g(w)/OPT = {worst:.5}, bound {:.2}", 1.0 - 2.0 * EPS),
    )
}

/// KL projection onto the capped simplex by bisection on the scaling in
/// `x_i = min(ν, t·y_i)`.
fn bisection_projection(y: &[f64], nu: f64) -> Vec<f64> {
    let mass = |t: f64| y.iter().map(|&v| (t * v).min(nu)).sum::<f64>();
    let (mut lo, mut hi) = (0.0, nu / y.iter().copied().fold(f64::INFINITY, f64::min));
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    y.iter().map(|&v| (hi * v).min(nu)).collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn criterion_6() -> Verdict {
    let mut rng = rng::stream(6, Stream::Synthetic);
    let (mut worst_rules, mut worst_oracle, mut pass_ok, mut small) = (0.0f64, 0.0f64, true, 0);
    for case in 0..1000 {
        let n = if case % 2 == 0 { rng.gen_range(2..=6) } else { rng.gen_range(7..=60) };
        let spread = rng.gen_range(0.0..8.0);
        let mut y: Vec<f64> = (0..n).map(|_| (spread * rng.gen_range(-1.0..1.0f64)).exp()).collect();
        if case % 7 == 0 {
            // repeated values
            let v = y[0];
            y.iter_mut().step_by(2).for_each(|e| *e = v);
        }
        let s: f64 = y.iter().sum();
        y.iter_mut().for_each(|e| *e /= s);
        let nu = if case % 11 == 0 { 1.0 / n as f64 } else { rng.gen_range(1.0 / n as f64..=1.0) };

        let (by_loop, passes) = project_capped_loop(&y, nu).unwrap();
        let by_sort = project_capped_sorted(&y, nu).unwrap();
        worst_rules = worst_rules.max(max_diff(&by_loop, &by_sort));
        pass_ok &= passes <= (1.0 / nu).ceil() as usize;
        if n <= 6 {
            small += 1;
            let reference = bisection_projection(&y, nu);
            worst_oracle = worst_oracle.max(max_diff(&by_loop, &reference)).max(max_diff(&by_sort, &reference));
        }
    }
    verdict(
        worst_rules <= 1e-8 && worst_oracle <= 1e-8 && pass_ok,
        format!(
            "1000 cases: loop vs sorted {worst_rules:.1e}, vs bisection argmin ({small} cases, n ≤ 6) \
             {worst_oracle:.1e}, pass bound held: {pass_ok}"
        ),
    )
}

/// Minimizer of `⟨u, Xη⟩ + γH(η) + c·KL(η‖prev)` over the simplex by
/// equality-constrained Newton steps with backtracking.
fn newton_dual_step(a: &[f64], prev: &[f64], gamma: f64, c: f64) -> Vec<f64> {
    let f = |x: &[f64]| -> f64 {
        x.iter()
            .zip(a)
            .zip(prev)
            .map(|((&x, &a), &p)| a * x + gamma * x * x.ln() + c * x * (x / p).ln())
            .sum()
    };
    let n = a.len();
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..500 {
        let g: Vec<f64> = (0..n)
            .map(|i| a[i] + gamma * (x[i].ln() + 1.0) + c * ((x[i] / prev[i]).ln() + 1.0))
            .collect();
        let hinv: Vec<f64> = x.iter().map(|&v| v / (gamma + c)).collect();
        let lambda = g.iter().zip(&hinv).map(|(g, h)| g * h).sum::<f64>() / hinv.iter().sum::<f64>();
        let dir: Vec<f64> = (0..n).map(|i| -(g[i] - lambda) * hinv[i]).collect();
        if dir.iter().zip(&x).all(|(d, x)| d.abs() <= 1e-15 * x.max(1e-300)) {
            break;
        }
        let mut step = 1.0f64;
        for (d, v) in dir.iter().zip(&x) {
            if *d < 0.0 {
                step = step.min(0.99 * v / -d);
            }
        }
        let f0 = f(&x);
        loop {
            let cand: Vec<f64> = x.iter().zip(&dir).map(|(v, d)| v + step * d).collect();
            if f(&cand) <= f0 || step < 1e-20 {
                x = cand;
                break;
            }
            step *= 0.5;
        }
    }
    x
}

fn criterion_7() -> Verdict {
    let mut rng = rng::stream(7, Stream::Synthetic);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let d = 1 << rng.gen_range(1..=2);
        let (n1, n2) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let mut col = || (0..d).map(|_| rng.gen_range(-0.5..0.5)).collect::<Vec<f64>>();
        let xp: Vec<Vec<f64>> = (0..n1).map(|_| col()).collect();
        let xm: Vec<Vec<f64>> = (0..n2).map(|_| col()).collect();
        let data = TransformedData::untransformed(Matrix::from_columns(d, &xp), Matrix::from_columns(d, &xm));
        let params = derive_params(0.1, 0.5, Mode::HardMargin, n1, n2, d, ProjectionRule::Auto).unwrap();
        let mut state = SaddleState::new(n1, n2, d);
        let warmup = rng.gen_range(0..30);
        for _ in 0..warmup {
            let i = rng.gen_range(0..d);
            state.iterate_at(&data, &params, i);
        }
        let (w_old, eta_old, xi_old) = (state.w.clone(), state.eta().to_vec(), state.xi().to_vec());
        let i = rng.gen_range(0..d);
        state.iterate_at(&data, &params, i);
        let u: Vec<f64> = w_old
            .iter()
            .zip(&state.w)
            .map(|(o, n)| o + d as f64 * (n - o))
            .collect();
        let c = params.dual_weight();
        let ap = data.xp.transpose_mul(&u);
        let am: Vec<f64> = data.xm.transpose_mul(&u).iter().map(|v| -v).collect();
        worst = worst.max(max_diff(state.eta(), &newton_dual_step(&ap, &eta_old, params.gamma, c)));
        worst = worst.max(max_diff(state.xi(), &newton_dual_step(&am, &xi_old, params.gamma, c)));
    }
    verdict(
        worst <= 1e-6,
        format!("50 micro-instances: max |closed form − Newton argmin| = {worst:.1e}, bound 1e-6"),
    )
}

fn criterion_8() -> Verdict {
    let mut rng = rng::stream(8, Stream::Synthetic);
    let (mut norm_err, mut inv_err, mut matrix_err) = (0.0f64, 0.0f64, 0.0f64);
    for d in [2usize, 8, 64, 512] {
        for _ in 0..100 {
            let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let h = fwht_normalized(&v).unwrap();
            let n0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let n1 = h.iter().map(|x| x * x).sum::<f64>().sqrt();
            norm_err = norm_err.max((n1 - n0).abs() / n0);
            inv_err = inv_err.max(max_diff(&fwht_normalized(&h).unwrap(), &v));
            if d <= 64 {
                // explicit Sylvester matrix: H_ij = (−1)^popcount(i & j)
                let explicit: Vec<f64> = (0..d)
                    .map(|i| {
                        (0..d)
                            .map(|j| if (i & j).count_ones() % 2 == 0 { v[j] } else { -v[j] })
                            .sum::<f64>()
                            / (d as f64).sqrt()
                    })
                    .collect();
                matrix_err = matrix_err.max(max_diff(&h, &explicit));
            }
        }
    }
    verdict(
        norm_err <= 1e-10 && inv_err <= 1e-10 && matrix_err <= 1e-10,
        format!(
            "d ∈ {{2, 8, 64, 512}}: relative norm error {norm_err:.1e}, involution error {inv_err:.1e}, \
             explicit matrix error {matrix_err:.1e}"
        ),
    )
}

/// Forty points; the overlapping variant has one intruder per class.
fn forty_points(seed: u64, overlapping: bool) -> saddle_svm::Dataset {
    let intruders = usize::from(overlapping);
    random_instance(
        seed,
        InstanceShape {
            min_n: 40 - 2 * intruders,
            max_n: 40 - 2 * intruders,
            max_d: 8,
            gap: 0.2,
            intruders,
        },
    )
}

fn criterion_9() -> (Verdict, Vec<Solution>) {
    let mut runs = Vec::new();
    let mut identical = true;
    for (seed, nu_mode) in [(1u64, false), (2, true)] {
        let ds = forty_points(seed, nu_mode);
        let mode = if nu_mode { Mode::nu_from_alpha(ALPHA, ds.n1(), ds.n2()).unwrap() } else { Mode::HardMargin };
        let config = SolverConfig {
            projection: ProjectionRule::Loop,
            max_blocks: 30,
            ..family_config(seed, mode, StopRule::DualityGap)
        };
        let central = solve(&ds, &config).unwrap();
        let (dist, _) = run_simulation(&ds, 1, &config, PartitionScheme::RoundRobin).unwrap();
        identical &= dist.same_values(&central);
        runs.push(central);
        runs.push(dist);
    }

    let mut worst = 0.0f64;
    for (seed, nu_mode) in [(3u64, false), (4, true)] {
        let ds = forty_points(seed, nu_mode);
        let data = apply_transform(&ds, seed).unwrap();
        let mode = if nu_mode { Mode::nu_from_alpha(ALPHA, ds.n1(), ds.n2()).unwrap() } else { Mode::HardMargin };
        let config = family_config(seed, mode, StopRule::DualityGap);
        let params = derive_params(EPS, 0.1, mode, data.n1(), data.n2(), data.d_pad(), ProjectionRule::Loop).unwrap();
        for k in [2, 5, 20] {
            for scheme in [PartitionScheme::RoundRobin, PartitionScheme::Shuffled] {
                let mut sim = Simulation::new(&data, k, &config, scheme).unwrap();
                let mut state = SaddleState::new(data.n1(), data.n2(), data.d_pad());
                let mut sampler = rng::stream(seed, Stream::Sampling);
                for _ in 0..500 {
                    sim.run_iteration().unwrap();
                    state.iterate(&data, &params, &mut sampler);
                    worst = worst
                        .max(max_diff(sim.w(), &state.w))
                        .max(max_diff(&sim.eta(), state.eta()))
                        .max(max_diff(&sim.xi(), state.xi()));
                }
            }
        }
    }
    (
        verdict(
            identical && worst <= 1e-12,
            format!(
                "k = 1 end to end bit-identical (hard margin and nu): {identical}; k ∈ {{2, 5, 20}}, 500 iterations, \
                 40 points: max coordinate difference {worst:.1e}, bound 1e-12"
            ),
        ),
        runs,
    )
}

/// Scalar count per message tag, written out independently of the crate.
fn payload(msg: &Message) -> u64 {
    match msg.tag() {
        "PickIndex" => 1,
        "ClientDelta" | "DeltaBroadcast" | "ClientNorm" | "NormBroadcast" => 2,
        "ClientClip" | "ClipBroadcast" => 4,
        _ => 0,
    }
}

fn criterion_10() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for (seed, nu_mode) in [(5u64, false), (6, true)] {
        let ds = forty_points(seed, nu_mode);
        let data = apply_transform(&ds, seed).unwrap();
        let mode = if nu_mode { Mode::nu_from_alpha(ALPHA, ds.n1(), ds.n2()).unwrap() } else { Mode::HardMargin };
        let config = family_config(seed, mode, StopRule::DualityGap);
        let params = derive_params(EPS, 0.1, mode, data.n1(), data.n2(), data.d_pad(), ProjectionRule::Loop).unwrap();
        let pass_cap = (1.0 / params.nu).ceil() as u64 + 1;
        for k in [1, 2, 5, 20] {
            let mut sim = Simulation::new(&data, k, &config, PartitionScheme::RoundRobin).unwrap();
            sim.record_messages();
            let mut state = SaddleState::new(data.n1(), data.n2(), data.d_pad());
            let mut sampler = rng::stream(seed, Stream::Sampling);
            let k = k as u64;
            let mut expected_total = 0;
            let mut clamp_passes = 0;
            for _ in 0..100 {
                let r = sim.run_iteration().unwrap();
                state.iterate(&data, &params, &mut sampler);
                // broadcasts = clamp passes of the centralized loop + the final empty one
                let p = if nu_mode { state.last_clip_passes as u64 + 1 } else { 0 };
                clamp_passes += state.last_clip_passes;
                ok &= r.scalars_up + r.scalars_down == 9 * k + 8 * k * p;
                ok &= r.scalars_up == 4 * k + 4 * k * p && r.scalars_down == 5 * k + 4 * k * p;
                ok &= p <= pass_cap && r.clip_broadcasts == p;
                expected_total += 9 * k + 8 * k * p;
            }
            let stats = sim.stats();
            let logged: u64 = sim.network().log().iter().map(|e| payload(&e.msg)).sum();
            ok &= stats.scalars_up + stats.scalars_down == expected_total && logged == expected_total;
            ok &= stats.rounds == 3 * 100 + stats.clip_passes;
            if !nu_mode {
                ok &= expected_total == 900 * k;
            }
            if k == 20 {
                notes.push(format!(
                    "{} k=20: {} scalars over 100 iterations ({} clamp passes)",
                    if nu_mode { "nu" } else { "hard margin" },
                    stats.scalars_up + stats.scalars_down,
                    clamp_passes
                ));
            }
        }
    }
    verdict(
        ok,
        format!("9k per hard-margin iteration, 9k + 8kP in nu mode, closed-form totals for k ∈ {{1, 2, 5, 20}}; {}", notes.join("; ")),
    )
}

fn criterion_11(traces: &[(&str, &[Checkpoint])], families: &[&[FamilyRun]]) -> Verdict {
    let mut checks = 0;
    let mut worst = f64::NEG_INFINITY;
    for (_, trace) in traces {
        for cp in *trace {
            checks += 1;
            worst = worst.max(cp.dual - cp.primal);
        }
    }
    // against the oracle: g ≤ OPT ≤ primal, OPT known to within the certificate
    let mut oracle_worst = f64::NEG_INFINITY;
    for runs in families {
        for r in *runs {
            let opt_hi = r.oracle.half_sq;
            let opt_lo = r.oracle.half_sq - r.oracle.gap_certificate;
            for cp in r.sol.trace.iter().chain(&r.default_rule.trace) {
                checks += 1;
                worst = worst.max(cp.dual - cp.primal);
                oracle_worst = oracle_worst.max(cp.dual - opt_hi).max(opt_lo - cp.primal);
            }
        }
    }
    verdict(
        worst <= 1e-8 && oracle_worst <= 1e-8,
        format!(
            "{checks} checkpoints: max(g − primal) = {worst:.2e}, max violation of g ≤ OPT ≤ primal = \
             {oracle_worst:.2e}, slack 1e-8"
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let hm = run_family(InstanceShape::default(), false);
    let hm_secs = start.elapsed().as_secs_f64();
    // one intruder per class inside the other hull; 18 + 2 points at most
    let nu_shape = InstanceShape {
        max_n: 18,
        intruders: 1,
        ..InstanceShape::default()
    };
    let nu = run_family(nu_shape, true);
    let overlapping = nu
        .iter()
        .filter(|r| fw_oracle(&r.data, None, ORACLE_TOL).unwrap().status == OracleStatus::NonSeparable)
        .count();
    let (v3, datasets) = criterion_3();
    let (v9, dist) = criterion_9();

    let mut traces: Vec<(&str, &[Checkpoint])> = Vec::new();
    traces.extend(datasets.iter().map(|s| ("datasets", s.trace.as_slice())));
    traces.extend(dist.iter().map(|s| ("distributed", s.trace.as_slice())));

    let verdicts = [
        criterion_1(&hm, hm_secs),
        criterion_2(&nu, overlapping),
        v3,
        criterion_4(&hm),
        criterion_5(&hm),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        v9,
        criterion_10(),
        criterion_11(&traces, &[&hm, &nu]),
    ];
    let mut failed = 0;
    for (n, v) in verdicts.iter().enumerate() {
        println!("criterion {:>2}: {} {}", n + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!(
        "acceptance: {}/{} passed in {:.1} s",
        verdicts.len() - failed,
        verdicts.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
