//! Self-contained verification suite: every cross-check between the
//! enumeration path and the closed forms, every pinned reference number, and
//! the randomized property checks, packaged so both the test suite and the
//! `verify` CLI command run exactly the same list.
//!
//! All randomness is a fixed-seed SplitMix64, so the suite is deterministic.

use num_complex::Complex64;

use crate::analysis::{critical_visibility, m3_no_sharing_check, violation_window};
use crate::branchsim::{branch_correlator, branch_distribution, joint_distribution, BranchSpec};
use crate::inequality::{
    analytic_bound, analytic_bound_noise, chained_value, ck, simulate_s, BranchCorrelators,
};
use crate::measure::{
    alice_observable, bob_project_and_reduce, projective_update, weak_update, Observable, Outcome,
};
use crate::model::{symmetric_config, NetworkConfig, NoiseParams, ObserverSelection, WeakParams};
use crate::qcore::ComplexMatrix;
use crate::state::noisy_source;

/// Outcome of one verification item.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn from_deviation(name: &'static str, worst: f64, tol: f64, count: usize) -> Self {
        Check {
            name,
            passed: worst <= tol,
            detail: format!("max deviation {worst:.3e} over {count} comparisons (tol {tol:.0e})"),
        }
    }
}

/// Runs the full verification suite in order.
pub fn run_all() -> Vec<Check> {
    vec![
        check_oracle_equivalence(),
        check_noise_oracle(),
        check_pinned_values(),
        check_window_endpoints(),
        check_critical_visibilities(),
        check_property_suite(),
        check_joint_vs_factorized(),
    ]
}

struct SplitMix64(u64);

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        Self(seed)
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn next_usize(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    /// A weak pair (F, G) uniform over the physical region F^2 + G^2 <= 1.
    fn next_weak_pair(&mut self) -> (f64, f64) {
        let g = self.next_f64();
        let f = self.next_f64() * (1.0 - g * g).sqrt();
        (f, g)
    }

    fn next_weak_params(&mut self, n: usize, m: usize) -> WeakParams {
        let mut fs = Vec::with_capacity(n);
        let mut gs = Vec::with_capacity(n);
        for _ in 0..n {
            let pairs: Vec<(f64, f64)> = (0..m - 1).map(|_| self.next_weak_pair()).collect();
            fs.push(pairs.iter().map(|p| p.0).collect());
            gs.push(pairs.iter().map(|p| p.1).collect());
        }
        WeakParams::new(fs, gs).expect("draws are physical")
    }

    fn next_state2(&mut self) -> ComplexMatrix {
        let entries: Vec<Complex64> = (0..4)
            .map(|_| Complex64::new(2.0 * self.next_f64() - 1.0, 2.0 * self.next_f64() - 1.0))
            .collect();
        let m = ComplexMatrix::from_entries(2, &entries).expect("dim 2");
        let rho = m.matmul(&m.dagger()).expect("same dim");
        let tr = rho.trace().re.max(1e-9);
        rho.scale(Complex64::new(1.0 / tr, 0.0))
    }
}

/// Criterion 1: the enumeration pipeline reproduces the noiseless closed-form
/// bound for every scenario in {1,2,3}^2 x {2,3,4}, every selection, and 20
/// randomized heterogeneous weak-parameter draws per scenario.
pub fn check_oracle_equivalence() -> Check {
    let mut rng = SplitMix64::new(0x0001);
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for n in 1..=3 {
        for m in 1..=3 {
            for k in 2..=4 {
                let selections = ObserverSelection::all(n, m);
                for _ in 0..20 {
                    let weak = rng.next_weak_params(n, m);
                    let config = NetworkConfig::new(n, m, k, weak).expect("valid scenario");
                    let noise = NoiseParams::noiseless(n);
                    // One correlator table per (branch, depth), shared by all
                    // selections of this draw.
                    let mut tables = vec![Vec::with_capacity(m); n];
                    for (branch, row) in tables.iter_mut().enumerate() {
                        for depth in 1..=m {
                            let spec = BranchSpec::from_config(&config, &noise, branch, depth)
                                .expect("valid branch");
                            let mut table = BranchCorrelators::new();
                            for l in 1..=k {
                                for x in [l - 1, l] {
                                    table.insert(
                                        x,
                                        l - 1,
                                        branch_correlator(&spec, x, l - 1).expect("valid indices"),
                                    );
                                }
                            }
                            row.push(table);
                        }
                    }
                    for j in &selections {
                        let sim_tables: Vec<BranchCorrelators> = (0..n)
                            .map(|i| tables[i][j.observer(i) - 1].clone())
                            .collect();
                        let sim = chained_value(&sim_tables, k).expect("complete tables");
                        let bound = analytic_bound(&config, j).expect("valid selection");
                        worst = worst.max((sim.s_value - bound).abs());
                        count += 1;
                    }
                }
            }
        }
    }
    Check::from_deviation(
        "oracle equivalence (enumeration vs closed form)",
        worst,
        1e-10,
        count,
    )
}

/// Criterion 2: under per-source noise in m = 2 scenarios the enumeration
/// matches the noise closed form for heterogeneous draws, and the printed
/// white-noise / symmetric special cases hold in their regimes.
pub fn check_noise_oracle() -> Check {
    let mut rng = SplitMix64::new(0x0002);
    let mut worst = 0.0f64;
    let mut count = 0usize;
    for n in 1..=3usize {
        for k in 2..=3usize {
            for _ in 0..10 {
                let weak = rng.next_weak_params(n, 2);
                let config = NetworkConfig::new(n, 2, k, weak).expect("valid scenario");
                let v: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
                let r: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
                let noise = NoiseParams::new(v.clone(), r.clone()).expect("valid noise");
                let white = NoiseParams::new(v.clone(), vec![0.0; n]).expect("valid noise");
                for target in [1usize, 2] {
                    let j = ObserverSelection::uniform(n, target).expect("n >= 1");
                    let t_product: f64 = (0..n)
                        .map(|i| {
                            if target == 1 {
                                config.weak().precision(i, 0)
                            } else {
                                (1.0 + config.weak().quality(i, 0)) / 2.0
                            }
                        })
                        .product();
                    // Heterogeneous colored noise: enumeration vs closed form.
                    let sim = simulate_s(&config, &j, &noise).expect("valid run").s_value;
                    let closed = analytic_bound_noise(&config, &j, &noise).expect("m = 2");
                    worst = worst.max((sim - closed).abs());
                    // White-noise printed form C_k { prod T_i v_i }^(1/n).
                    let sim_w = simulate_s(&config, &j, &white).expect("valid run").s_value;
                    let printed_w =
                        ck(k) * (t_product * v.iter().product::<f64>()).powf(1.0 / n as f64);
                    worst = worst.max((sim_w - printed_w).abs());
                    // k = 2: the printed heterogeneous form is exact as well.
                    if k == 2 {
                        let printed: f64 = ck(2) / 2.0
                            * (0..n)
                                .map(|i| {
                                    let t = if target == 1 {
                                        config.weak().precision(i, 0)
                                    } else {
                                        (1.0 + config.weak().quality(i, 0)) / 2.0
                                    };
                                    t * (r[i] * (1.0 - v[i]) + 2.0 * v[i])
                                })
                                .product::<f64>()
                                .powf(1.0 / n as f64);
                        worst = worst.max((sim - printed).abs());
                    }
                    count += 3;
                }
            }
            // Symmetric parameters: the printed linear-in-v form.
            for _ in 0..5 {
                let g = rng.next_f64();
                let f = (1.0 - g * g).sqrt();
                let (v, r) = (rng.next_f64(), rng.next_f64());
                let config = symmetric_config(n, 2, k, &[g]).expect("valid scenario");
                let noise = NoiseParams::uniform(n, v, r).expect("valid noise");
                let bracket = r * (1.0 - v) + 2.0 * v;
                for (target, t) in [(1usize, g), (2, (1.0 + f) / 2.0)] {
                    let j = ObserverSelection::uniform(n, target).expect("n >= 1");
                    let sim = simulate_s(&config, &j, &noise).expect("valid run").s_value;
                    let printed = ck(k) / 2.0 * t * bracket;
                    worst = worst.max((sim - printed).abs());
                    count += 1;
                }
            }
        }
    }
    Check::from_deviation(
        "noise oracle (enumeration vs noise closed forms)",
        worst,
        1e-10,
        count,
    )
}

/// Criterion 3: the pinned reference numbers, each within 1e-4.
pub fn check_pinned_values() -> Check {
    const SQRT_2: f64 = std::f64::consts::SQRT_2;
    let mut values: Vec<(&str, f64, f64)> = Vec::new();
    let mut failures: Vec<String> = Vec::new();

    let all2 = ObserverSelection::all(2, 2);
    let w2 = violation_window(2, 2, &all2).expect("valid scenario");
    values.push(("k=2 maximin", w2.v_star, 1.13137));
    values.push(("k=2 maximin location", w2.g_star, 0.8));
    let w3 = violation_window(2, 3, &all2).expect("valid scenario");
    values.push(("k=3 maximin", w3.v_star, 2.07846));
    values.push(("k=3 maximin location", w3.g_star, 0.8));
    let w4 = violation_window(2, 4, &all2).expect("valid scenario");
    values.push(("k=4 maximin", w4.v_star, 2.9564));
    if w4.endpoints.is_some() || w4.v_star >= 3.0 {
        failures.push("k=4 unexpectedly violates".into());
    }

    // (2,2,4) peak of S_12 via a single-selection window search.
    let j12 = ObserverSelection::new(vec![1, 2]).expect("nonempty");
    let p224 = violation_window(2, 4, std::slice::from_ref(&j12)).expect("valid scenario");
    values.push(("(2,2,4) S_12 peak", p224.v_star, 2.9783));
    values.push((
        "(2,2,4) S_12 peak location",
        p224.g_star,
        3.0f64.sqrt() / 2.0,
    ));

    // (3,2,4) peak of S_122.
    let j122 = ObserverSelection::new(vec![1, 2, 2]).expect("nonempty");
    let p324 = violation_window(3, 4, std::slice::from_ref(&j122)).expect("valid scenario");
    values.push(("(3,2,4) S_122 peak", p324.v_star, 2.9671));
    values.push((
        "(3,2,4) S_122 peak location",
        p324.g_star,
        5.0f64.sqrt() / 3.0,
    ));

    // (3,2,4) first-generation-heavy subset.
    let subset: Vec<ObserverSelection> =
        [vec![1, 1, 1], vec![1, 1, 2], vec![1, 2, 1], vec![2, 1, 1]]
            .into_iter()
            .map(|v| ObserverSelection::new(v).expect("nonempty"))
            .collect();
    let ws = violation_window(3, 4, &subset).expect("valid scenario");
    match ws.endpoints {
        Some((lo, hi)) => {
            values.push(("(3,2,4) subset window lo", lo, 0.8280));
            values.push(("(3,2,4) subset window hi", hi, 0.9970));
        }
        None => failures.push("(3,2,4) subset window is empty".into()),
    }
    values.push(("(3,2,4) subset maximin", ws.v_star, 3.1040));
    values.push((
        "(3,2,4) subset maximin location",
        ws.g_star,
        2.0 * SQRT_2 / 3.0,
    ));

    // m = 3 equalization point.
    let m3 = m3_no_sharing_check(2, 2).expect("valid scenario");
    values.push(("m=3 value", m3.value, 0.9753));
    values.push(("m=3 G1", m3.g1, 20.0 / 29.0));
    values.push(("m=3 G2", m3.g2, 0.8));

    let mut worst = 0.0f64;
    for (label, got, want) in &values {
        let dev = (got - want).abs();
        worst = worst.max(dev);
        if dev > 1e-4 {
            failures.push(format!("{label}: {got:.6} vs {want:.6}"));
        }
    }
    Check {
        name: "pinned reference values",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!(
                "max deviation {worst:.3e} over {} values (tol 1e-4)",
                values.len()
            )
        } else {
            failures.join("; ")
        },
    }
}

/// Criterion 4: the k = 2 and k = 3 window endpoints against their exact
/// algebraic values, within 1e-6 on G.
pub fn check_window_endpoints() -> Check {
    const SQRT_2: f64 = std::f64::consts::SQRT_2;
    let mut worst = 0.0f64;
    let mut count = 0usize;
    let all2 = ObserverSelection::all(2, 2);
    let expected = [
        (2usize, 1.0 / SQRT_2, (2.0 * (SQRT_2 - 1.0)).sqrt()),
        (
            3,
            4.0 / (3.0 * 3.0f64.sqrt()),
            4.0 / 3.0 * ((3.0 * 3.0f64.sqrt() - 4.0) / 3.0).sqrt(),
        ),
    ];
    for (k, lo_want, hi_want) in expected {
        match violation_window(2, k, &all2).map(|w| w.endpoints) {
            Ok(Some((lo, hi))) => {
                worst = worst.max((lo - lo_want).abs()).max((hi - hi_want).abs());
                count += 2;
            }
            _ => {
                return Check {
                    name: "violation-window endpoints",
                    passed: false,
                    detail: format!("k={k} window unexpectedly empty"),
                }
            }
        }
    }
    Check::from_deviation("violation-window endpoints", worst, 1e-6, count)
}

/// Criterion 5: critical visibilities against their reference values (1e-3)
/// and, for white noise, against the linear closed form (1e-6).
pub fn check_critical_visibilities() -> Check {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let mut count = 0usize;
    let reference = [
        (2usize, 0.0, 0.8839, 1e-3),
        (3, 0.0, 0.9623, 1e-3),
        (2, 1.0 / 3.0, 0.8607, 1e-3),
        (3, 1.0 / 3.0, 0.9548, 1e-3),
    ];
    for (k, r, want, tol) in reference {
        match critical_visibility(2, k, r, 1e-8) {
            Ok(Some(v)) => {
                let dev = (v - want).abs();
                worst = worst.max(dev);
                count += 1;
                if dev > tol {
                    failures.push(format!("k={k} r={r:.3}: {v:.6} vs {want}"));
                }
            }
            _ => failures.push(format!("k={k} r={r:.3}: no critical visibility found")),
        }
    }
    for k in [2usize, 3] {
        let want = (k - 1) as f64 / (0.8 * ck(k));
        match critical_visibility(2, k, 0.0, 1e-8) {
            Ok(Some(v)) => {
                let dev = (v - want).abs();
                worst = worst.max(dev);
                count += 1;
                if dev > 1e-6 {
                    failures.push(format!(
                        "k={k} white-noise closed form: {v:.8} vs {want:.8}"
                    ));
                }
            }
            _ => failures.push(format!("k={k}: no critical visibility found")),
        }
    }
    Check {
        name: "critical visibilities",
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("max deviation {worst:.3e} over {count} values")
        } else {
            failures.join("; ")
        },
    }
}

/// Criterion 6: randomized physicality properties, 100+ instances each at
/// tolerance 1e-10.
pub fn check_property_suite() -> Check {
    let mut rng = SplitMix64::new(0x0006);
    let mut worst = 0.0f64;
    let mut count = 0usize;
    let mut failures: Vec<String> = Vec::new();

    // Trace preservation and PSD preservation of the measurement channel.
    for _ in 0..100 {
        let rho = rng.next_state2();
        let obs = Observable::from_angle(rng.next_f64() * std::f64::consts::TAU);
        let (f, g) = rng.next_weak_pair();
        let mut total = 0.0;
        for a in Outcome::BOTH {
            let out = weak_update(&rho, &obs, a, f, g).expect("physical pair");
            total += out.trace().re;
            if !out.is_psd(1e-10) {
                failures.push(format!("weak_update output not PSD at f={f:.3} g={g:.3}"));
            }
            let proj = projective_update(&rho, &obs, a).expect("dim 2");
            if !proj.is_psd(1e-10) {
                failures.push("projective_update output not PSD".into());
            }
        }
        worst = worst.max((total - rho.trace().re).abs());
        count += 1;
    }

    // PSD of Bob's reduction and normalization of branch distributions.
    for _ in 0..100 {
        let k = 2 + rng.next_usize(3);
        let m = 1 + rng.next_usize(3);
        let depth = 1 + rng.next_usize(m);
        let (v, r) = (rng.next_f64(), rng.next_f64());
        let source = noisy_source(v, r).expect("valid noise");
        let b = if rng.next_usize(2) == 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        };
        let reduced = bob_project_and_reduce(source.density(), rng.next_usize(k), b, k)
            .expect("valid indices");
        if !reduced.is_psd(1e-10) {
            failures.push("bob_project_and_reduce output not PSD".into());
        }
        let pairs: Vec<(f64, f64)> = (0..m).map(|_| rng.next_weak_pair()).collect();
        let spec = BranchSpec::new(
            source,
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
            k,
            depth,
            m,
        )
        .expect("valid branch");
        let xs: Vec<usize> = (0..depth).map(|_| rng.next_usize(k)).collect();
        let y = rng.next_usize(k);
        let mut total = 0.0;
        for mask in 0..1usize << depth {
            let outcomes: Vec<Outcome> = (0..depth)
                .map(|t| {
                    if mask >> t & 1 == 0 {
                        Outcome::Plus
                    } else {
                        Outcome::Minus
                    }
                })
                .collect();
            for b in Outcome::BOTH {
                total += branch_distribution(&spec, &xs, y, &outcomes, b).expect("valid indices");
            }
        }
        worst = worst.max((total - 1.0).abs());
        count += 1;

        // Correlator magnitude stays within [-1, 1].
        let x_target = rng.next_usize(k + 1);
        let c = branch_correlator(&spec, x_target, y).expect("valid indices");
        worst = worst.max((c.abs() - 1.0).max(0.0));
        count += 1;
    }

    // No-signaling: the early marginal ignores later settings and y.
    for _ in 0..100 {
        let k = 2 + rng.next_usize(2);
        let (f1, g1) = rng.next_weak_pair();
        let (f2, g2) = rng.next_weak_pair();
        let spec = BranchSpec::new(
            noisy_source(rng.next_f64(), rng.next_f64()).expect("valid noise"),
            vec![f1, f2],
            vec![g1, g2],
            k,
            2,
            3,
        )
        .expect("valid branch");
        let x1 = rng.next_usize(k);
        let a1 = if rng.next_usize(2) == 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        };
        let marginal = |x2: usize, y: usize| -> f64 {
            let mut p = 0.0;
            for a2 in Outcome::BOTH {
                for b in Outcome::BOTH {
                    p += branch_distribution(&spec, &[x1, x2], y, &[a1, a2], b)
                        .expect("valid indices");
                }
            }
            p
        };
        let base = marginal(0, 0);
        for x2 in 0..k {
            for y in 0..k {
                worst = worst.max((marginal(x2, y) - base).abs());
                count += 1;
            }
        }
    }

    // Chain closure A^k = -A^0 entrywise, over randomized setting counts.
    for _ in 0..100 {
        let k = 2 + rng.next_usize(49);
        let a0 = alice_observable(0, k).expect("valid setting");
        let ak = alice_observable(k, k).expect("valid setting");
        for i in 0..2 {
            for j in 0..2 {
                let d = (ak.matrix().get(i, j) + a0.matrix().get(i, j)).norm();
                worst = worst.max(d);
            }
        }
        count += 1;
    }

    // Branch-permutation symmetry of the assembled expression.
    for _ in 0..100 {
        let k = 2 + rng.next_usize(3);
        let n = 2 + rng.next_usize(2);
        let mut tables = Vec::with_capacity(n);
        for _ in 0..n {
            let mut t = BranchCorrelators::new();
            for l in 1..=k {
                for x in [l - 1, l] {
                    t.insert(x, l - 1, 2.0 * rng.next_f64() - 1.0);
                }
            }
            tables.push(t);
        }
        let forward = chained_value(&tables, k).expect("complete tables").s_value;
        tables.rotate_left(1);
        let rotated = chained_value(&tables, k).expect("complete tables").s_value;
        worst = worst.max((forward - rotated).abs());
        count += 1;
    }

    if !failures.is_empty() {
        return Check {
            name: "property suite",
            passed: false,
            detail: failures.join("; "),
        };
    }
    Check::from_deviation("property suite", worst, 1e-10, count)
}

/// Criterion 7: the n <= 3 joint-distribution path (product construction
/// with b = prod b_i) reproduces the factorized S within 1e-12.
pub fn check_joint_vs_factorized() -> Check {
    let mut rng = SplitMix64::new(0x0007);
    let mut worst = 0.0f64;
    let mut count = 0usize;
    let k = 2usize;
    for n in 2..=3usize {
        for m in 1..=2usize {
            let selections = ObserverSelection::all(n, m);
            for _ in 0..3 {
                let weak = rng.next_weak_params(n, m);
                let config = NetworkConfig::new(n, m, k, weak).expect("valid scenario");
                let noise = NoiseParams::noiseless(n);
                for j in &selections {
                    let factorized = simulate_s(&config, j, &noise).expect("valid run").s_value;
                    let joint = joint_chained_value(&config, j, &noise);
                    worst = worst.max((factorized - joint).abs());
                    count += 1;
                }
            }
        }
    }
    Check::from_deviation("joint vs factorized evaluation", worst, 1e-12, count)
}

/// Evaluates S through `joint_distribution`: enumerates complete outcome and
/// intermediate-setting histories of all branches jointly, weighting each
/// target-setting tuple of I_l by 1/2^n and each intermediate-setting tuple
/// by the uniform 1/k^(depth-1) per branch, with Bob's network outcome read
/// as the product of his per-branch outcomes.
fn joint_chained_value(
    config: &NetworkConfig,
    selection: &ObserverSelection,
    noise: &NoiseParams,
) -> f64 {
    let n = config.branches();
    let k = config.settings();
    let specs: Vec<BranchSpec> = (0..n)
        .map(|branch| {
            BranchSpec::from_config(config, noise, branch, selection.observer(branch))
                .expect("valid branch")
        })
        .collect();
    let depths: Vec<usize> = (0..n).map(|i| selection.observer(i)).collect();

    // Per-branch histories at a fixed target setting: (xs, outcomes, b, sign).
    type History = (Vec<usize>, Vec<Outcome>, Outcome, f64);
    let histories = |branch: usize, x_target: usize| -> Vec<History> {
        let depth = depths[branch];
        let stages = depth - 1;
        let mut out = Vec::new();
        for combo in 0..k.pow(stages as u32) {
            let mut xs = vec![0usize; depth];
            let mut rem = combo;
            for x in xs.iter_mut().take(stages) {
                *x = rem % k;
                rem /= k;
            }
            xs[stages] = x_target;
            for mask in 0..1usize << depth {
                let outcomes: Vec<Outcome> = (0..depth)
                    .map(|t| {
                        if mask >> t & 1 == 0 {
                            Outcome::Plus
                        } else {
                            Outcome::Minus
                        }
                    })
                    .collect();
                for b in Outcome::BOTH {
                    let sign = outcomes[depth - 1].sign() * b.sign();
                    out.push((xs.clone(), outcomes.clone(), b, sign));
                }
            }
        }
        out
    };

    let weight: f64 = depths
        .iter()
        .map(|&d| (k as f64).powi(d as i32 - 1))
        .product();
    let mut s = 0.0;
    for l in 1..=k {
        let y = l - 1;
        // Sum the network correlator over target settings in {l-1, l}^n.
        let mut i_term = 0.0;
        for combo in 0..1usize << n {
            let x_targets: Vec<usize> = (0..n)
                .map(|i| if combo >> i & 1 == 0 { l - 1 } else { l })
                .collect();
            let branch_histories: Vec<Vec<History>> =
                (0..n).map(|i| histories(i, x_targets[i])).collect();
            let mut indices = vec![0usize; n];
            loop {
                let mut xs = Vec::with_capacity(n);
                let mut outcomes = Vec::with_capacity(n);
                let mut bs = Vec::with_capacity(n);
                let mut sign = 1.0;
                for (i, &idx) in indices.iter().enumerate() {
                    let h = &branch_histories[i][idx];
                    xs.push(h.0.clone());
                    outcomes.push(h.1.clone());
                    bs.push(h.2);
                    sign *= h.3;
                }
                let p = joint_distribution(&specs, &xs, y, &outcomes, &bs)
                    .expect("valid joint evaluation");
                i_term += sign * p;
                // Advance the mixed-radix counter over history tuples.
                let mut pos = n;
                while pos > 0 {
                    indices[pos - 1] += 1;
                    if indices[pos - 1] < branch_histories[pos - 1].len() {
                        break;
                    }
                    indices[pos - 1] = 0;
                    pos -= 1;
                }
                if pos == 0 {
                    break;
                }
            }
        }
        i_term /= weight * 2.0f64.powi(n as i32);
        s += i_term.abs().powf(1.0 / n as f64);
    }
    s
}
