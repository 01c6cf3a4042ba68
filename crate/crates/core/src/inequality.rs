//! The chained n-locality expression S = sum_l |I_l|^(1/n) evaluated two
//! independent ways: from enumerated branch correlators (simulation path)
//! and from closed forms (analytic path), including the noise variants.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::branchsim::{branch_correlator, BranchSpec};
use crate::error::{Error, Result};
use crate::model::{NetworkConfig, NoiseParams, ObserverSelection};

/// Per-branch correlator table keyed by (x, y).
#[derive(Clone, Debug, Default)]
pub struct BranchCorrelators {
    values: HashMap<(usize, usize), f64>,
}

impl BranchCorrelators {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, x: usize, y: usize, value: f64) {
        self.values.insert((x, y), value);
    }

    pub fn get(&self, x: usize, y: usize) -> Result<f64> {
        self.values
            .get(&(x, y))
            .copied()
            .ok_or(Error::MissingCorrelator { x, y })
    }
}

/// One evaluation of the chained expression.
#[derive(Clone, Debug, PartialEq)]
pub struct InequalityResult {
    /// The signed terms I_l, l = 1..=k.
    pub i_terms: Vec<f64>,
    /// sum_l |I_l|^(1/n).
    pub s_value: f64,
    /// k - 1.
    pub classical_bound: f64,
    /// s_value > classical_bound.
    pub violated: bool,
}

/// The quantum maximum k cos(pi/2k) of the chained expression with perfect
/// singlets and no weak stages.
pub fn ck(k: usize) -> f64 {
    k as f64 * (PI / (2.0 * k as f64)).cos()
}

/// Assembles S from per-branch correlator tables:
///
///   I_l = (1/2^n) prod_i [ <A^(l-1) B^(l-1)>_i + <A^l B^(l-1)>_i ]
///
/// exact sum-then-product, valid because Bob's separable operator factorizes
/// the network correlator into per-branch ones.
pub fn chained_value(tables: &[BranchCorrelators], k: usize) -> Result<InequalityResult> {
    if tables.is_empty() {
        return Err(Error::InvalidScenario("no branch tables supplied".into()));
    }
    if k < 2 {
        return Err(Error::InvalidScenario("k must be >= 2".into()));
    }
    let n = tables.len();
    let mut i_terms = Vec::with_capacity(k);
    for l in 1..=k {
        let y = l - 1;
        let mut product = 1.0;
        for table in tables {
            product *= (table.get(l - 1, y)? + table.get(l, y)?) / 2.0;
        }
        i_terms.push(product);
    }
    Ok(finish(i_terms, n, k))
}

fn finish(i_terms: Vec<f64>, n: usize, k: usize) -> InequalityResult {
    let s_value = i_terms.iter().map(|&i| i.abs().powf(1.0 / n as f64)).sum();
    let classical_bound = (k - 1) as f64;
    InequalityResult {
        i_terms,
        s_value,
        classical_bound,
        violated: s_value > classical_bound,
    }
}

fn t_factor(config: &NetworkConfig, branch: usize, observer: usize, target: usize) -> f64 {
    let m = config.observers_per_branch();
    if observer == target {
        if target == m {
            1.0
        } else {
            config.weak().precision(branch, observer - 1)
        }
    } else {
        (1.0 + config.weak().quality(branch, observer - 1)) / 2.0
    }
}

/// Closed-form noiseless bound: C_k times the geometric mean over branches
/// of the per-observer factor products (1 at a projective target, G at a
/// weak target, (1+F)/2 upstream).
pub fn analytic_bound(config: &NetworkConfig, selection: &ObserverSelection) -> Result<f64> {
    config.validate_selection(selection)?;
    let n = config.branches();
    let mut product = 1.0;
    for branch in 0..n {
        let target = selection.observer(branch);
        for observer in 1..=target {
            product *= t_factor(config, branch, observer, target);
        }
    }
    Ok(ck(config.settings()) * product.powf(1.0 / n as f64))
}

/// Closed-form bound under per-source noise, derived for m = 2 and a uniform
/// selection (all branches at the first or all at the second observer):
///
///   S = cos(pi/2k) sum_l prod_i { T_i [ v_i + (1-v_i) r_i cos^2((2l-1)pi/2k) ] }^(1/n)
///
/// with T_i = G_i1 (first generation) or (1+F_i1)/2 (second). The inner
/// bracket is the noisy correlator pair-sum; for k = 2, for white noise, and
/// for source-symmetric noise the sum collapses to the familiar
/// (C_k/2) { prod_i T_i [ r_i (1 - v_i) + 2 v_i ] }^(1/n) forms.
///
/// Everything else (m != 2, mixed selections) must go through the
/// simulation path, which handles them exactly.
pub fn analytic_bound_noise(
    config: &NetworkConfig,
    selection: &ObserverSelection,
    noise: &NoiseParams,
) -> Result<f64> {
    config.validate_selection(selection)?;
    if config.observers_per_branch() != 2 {
        return Err(Error::UnsupportedNoiseCase(format!(
            "m = {}",
            config.observers_per_branch()
        )));
    }
    let n = config.branches();
    if noise.len() != n {
        return Err(Error::InvalidScenario(format!(
            "{} noise entries for {} sources",
            noise.len(),
            n
        )));
    }
    let target = selection.observer(0);
    if selection.entries().iter().any(|&j| j != target) {
        return Err(Error::UnsupportedNoiseCase(format!(
            "mixed selection {selection}"
        )));
    }
    let k = config.settings();
    let kf = k as f64;
    let mut s = 0.0;
    for l in 1..=k {
        let cl = ((2 * l - 1) as f64 * PI / (2.0 * kf)).cos();
        let mut product = 1.0;
        for branch in 0..n {
            let t = if target == 1 {
                config.weak().precision(branch, 0)
            } else {
                (1.0 + config.weak().quality(branch, 0)) / 2.0
            };
            let v = noise.visibility(branch);
            let r = noise.colored_fraction(branch);
            product *= t * (v + (1.0 - v) * r * cl * cl);
        }
        s += product.powf(1.0 / n as f64);
    }
    Ok((PI / (2.0 * kf)).cos() * s)
}

/// Full enumeration path: builds one [`BranchSpec`] per branch, computes the
/// required correlators by brute force, and assembles the chained value.
pub fn simulate_s(
    config: &NetworkConfig,
    selection: &ObserverSelection,
    noise: &NoiseParams,
) -> Result<InequalityResult> {
    config.validate_selection(selection)?;
    let k = config.settings();
    let mut tables = Vec::with_capacity(config.branches());
    for branch in 0..config.branches() {
        let spec = BranchSpec::from_config(config, noise, branch, selection.observer(branch))?;
        let mut table = BranchCorrelators::new();
        for l in 1..=k {
            let y = l - 1;
            for x in [l - 1, l] {
                table.insert(x, y, branch_correlator(&spec, x, y)?);
            }
        }
        tables.push(table);
    }
    chained_value(&tables, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::symmetric_config;

    const SQRT_2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn ck_values() {
        assert!((ck(2) - SQRT_2).abs() < 1e-14);
        assert!(ck(1).abs() < 1e-14);
        assert!((ck(3) - 1.5 * 3.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn standard_chained_chsh() {
        // (1, 1, k): S = k cos(pi/2k).
        for k in 2..=4 {
            let cfg = symmetric_config(1, 1, k, &[]).unwrap();
            let j = ObserverSelection::first_generation(1);
            let sim = simulate_s(&cfg, &j, &NoiseParams::noiseless(1)).unwrap();
            assert!((sim.s_value - ck(k)).abs() < 1e-12);
            assert!(sim.violated);
            assert_eq!(sim.classical_bound, (k - 1) as f64);
        }
    }

    #[test]
    fn zero_correlators_give_zero() {
        let mut table = BranchCorrelators::new();
        for l in 1..=2usize {
            table.insert(l - 1, l - 1, 0.0);
            table.insert(l, l - 1, 0.0);
        }
        let result = chained_value(&[table.clone(), table], 2).unwrap();
        assert_eq!(result.s_value, 0.0);
        assert!(!result.violated);
    }

    #[test]
    fn missing_entry_is_reported() {
        let table = BranchCorrelators::new();
        assert_eq!(
            chained_value(&[table], 2).unwrap_err(),
            Error::MissingCorrelator { x: 0, y: 0 }
        );
    }

    #[test]
    fn maximum_simultaneous_violation_222() {
        let cfg = symmetric_config(2, 2, 2, &[0.8]).unwrap();
        for j in ObserverSelection::all(2, 2) {
            let sim = simulate_s(&cfg, &j, &NoiseParams::noiseless(2)).unwrap();
            assert!(
                (sim.s_value - 4.0 * SQRT_2 / 5.0).abs() < 1e-10,
                "S_{j} = {}",
                sim.s_value
            );
            assert!(sim.violated);
        }
    }

    #[test]
    fn analytic_bound_special_cases() {
        // (2, 2, k), j = (1, 2): C_k/sqrt(2) * sqrt(G11 (1 + F21)).
        for k in 2..=4 {
            let cfg = symmetric_config(2, 2, k, &[0.7]).unwrap();
            let g = 0.7;
            let f = (1.0f64 - g * g).sqrt();
            let j = ObserverSelection::new(vec![1, 2]).unwrap();
            let got = analytic_bound(&cfg, &j).unwrap();
            let want = ck(k) / SQRT_2 * (g * (1.0 + f)).sqrt();
            assert!((got - want).abs() < 1e-12);
        }
        // (n, 1, k): always C_k.
        for n in 1..=3 {
            let cfg = symmetric_config(n, 1, 3, &[]).unwrap();
            let j = ObserverSelection::first_generation(n);
            assert!((analytic_bound(&cfg, &j).unwrap() - ck(3)).abs() < 1e-12);
        }
        // (2, 3, 2) symmetric with G1 = 20/29, G2 = 0.8, j = (3, 3).
        let cfg = symmetric_config(2, 3, 2, &[20.0 / 29.0, 0.8]).unwrap();
        let j = ObserverSelection::uniform(2, 3).unwrap();
        let got = analytic_bound(&cfg, &j).unwrap();
        assert!((got - 20.0 * SQRT_2 / 29.0).abs() < 1e-12);
    }

    #[test]
    fn eq12_closed_forms() {
        // All four (2,2,k) selections against their printed closed forms,
        // with heterogeneous weak parameters.
        let (g11, g21) = (0.9, 0.55);
        let (f11, f21) = (0.3, 0.8);
        let weak =
            crate::model::WeakParams::new(vec![vec![f11], vec![f21]], vec![vec![g11], vec![g21]])
                .unwrap();
        for k in 2..=4 {
            let cfg = NetworkConfig::new(2, 2, k, weak.clone()).unwrap();
            let c = ck(k);
            let cases = [
                (vec![1, 1], c * (g11 * g21).sqrt()),
                (vec![1, 2], c / SQRT_2 * (g11 * (1.0 + f21)).sqrt()),
                (vec![2, 1], c / SQRT_2 * (g21 * (1.0 + f11)).sqrt()),
                (vec![2, 2], c / 2.0 * ((1.0 + f11) * (1.0 + f21)).sqrt()),
            ];
            for (j, want) in cases {
                let j = ObserverSelection::new(j).unwrap();
                let got = analytic_bound(&cfg, &j).unwrap();
                assert!((got - want).abs() < 1e-12, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn noise_bound_reduces_to_noiseless() {
        let cfg = symmetric_config(3, 2, 3, &[0.65]).unwrap();
        let noise = NoiseParams::uniform(3, 1.0, 0.4).unwrap();
        for j in [1, 2] {
            let j = ObserverSelection::uniform(3, j).unwrap();
            let with = analytic_bound_noise(&cfg, &j, &noise).unwrap();
            let without = analytic_bound(&cfg, &j).unwrap();
            assert!((with - without).abs() < 1e-12);
        }
    }

    #[test]
    fn noise_bound_critical_visibility_point() {
        // Symmetric (n,2,2), G = 0.8, white noise at v = 1/(0.8 sqrt(2)):
        // both generations sit exactly at the classical bound.
        let v = 1.0 / (0.8 * SQRT_2);
        for n in 1..=3 {
            let cfg = symmetric_config(n, 2, 2, &[0.8]).unwrap();
            let noise = NoiseParams::uniform(n, v, 0.0).unwrap();
            for j in [1, 2] {
                let j = ObserverSelection::uniform(n, j).unwrap();
                let s = analytic_bound_noise(&cfg, &j, &noise).unwrap();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn noise_bound_colored_linear_form() {
        // Pure colored noise at k = 2: S_1..1 = (sqrt(2)/2) G (1 + v).
        for v in [0.0, 0.3, 0.8, 1.0] {
            let cfg = symmetric_config(2, 2, 2, &[0.8]).unwrap();
            let noise = NoiseParams::uniform(2, v, 1.0).unwrap();
            let j = ObserverSelection::first_generation(2);
            let s = analytic_bound_noise(&cfg, &j, &noise).unwrap();
            assert!((s - SQRT_2 / 2.0 * 0.8 * (1.0 + v)).abs() < 1e-12);
        }
    }

    #[test]
    fn noise_bound_rejects_unsupported_cases() {
        let cfg = symmetric_config(2, 3, 2, &[0.8, 0.8]).unwrap();
        let noise = NoiseParams::noiseless(2);
        let j = ObserverSelection::first_generation(2);
        assert!(matches!(
            analytic_bound_noise(&cfg, &j, &noise),
            Err(Error::UnsupportedNoiseCase(_))
        ));
        let cfg = symmetric_config(2, 2, 2, &[0.8]).unwrap();
        let mixed = ObserverSelection::new(vec![1, 2]).unwrap();
        assert!(matches!(
            analytic_bound_noise(&cfg, &mixed, &noise),
            Err(Error::UnsupportedNoiseCase(_))
        ));
    }

    #[test]
    fn chained_value_branch_permutation_invariant() {
        let cfg = crate::model::NetworkConfig::new(
            2,
            2,
            3,
            crate::model::WeakParams::new(vec![vec![0.2], vec![0.7]], vec![vec![0.9], vec![0.5]])
                .unwrap(),
        )
        .unwrap();
        let noise = NoiseParams::noiseless(2);
        let k = 3;
        let mut tables = Vec::new();
        for (branch, depth) in [(0, 1), (1, 2)] {
            let spec = BranchSpec::from_config(&cfg, &noise, branch, depth).unwrap();
            let mut table = BranchCorrelators::new();
            for l in 1..=k {
                for x in [l - 1, l] {
                    table.insert(x, l - 1, branch_correlator(&spec, x, l - 1).unwrap());
                }
            }
            tables.push(table);
        }
        let forward = chained_value(&tables, k).unwrap();
        tables.reverse();
        let backward = chained_value(&tables, k).unwrap();
        assert!((forward.s_value - backward.s_value).abs() < 1e-15);
        for (a, b) in forward.i_terms.iter().zip(&backward.i_terms) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn scaling_symmetric_tables() {
        // Scaling every correlator of a symmetric table by c scales S by c.
        let spec = BranchSpec::new(crate::state::singlet(), vec![0.6], vec![0.8], 2, 1, 2).unwrap();
        let k = 2;
        let mut base = BranchCorrelators::new();
        for l in 1..=k {
            for x in [l - 1, l] {
                base.insert(x, l - 1, branch_correlator(&spec, x, l - 1).unwrap());
            }
        }
        for c in [0.25, 0.5, 1.0] {
            let mut scaled = BranchCorrelators::new();
            for l in 1..=k {
                for x in [l - 1, l] {
                    scaled.insert(x, l - 1, c * base.get(x, l - 1).unwrap());
                }
            }
            let s0 = chained_value(&[base.clone(), base.clone()], k)
                .unwrap()
                .s_value;
            let s1 = chained_value(&[scaled.clone(), scaled], k).unwrap().s_value;
            assert!((s1 - c * s0).abs() < 1e-12);
        }
    }

    #[test]
    fn simulated_324_subset_optimum() {
        // At G = 2 sqrt(2)/3 (so F = 1/3) the four first-generation-heavy
        // selections of the (3,2,4) scenario all clear the classical bound 3,
        // the binding ones at ~3.1040.
        let g = 2.0 * SQRT_2 / 3.0;
        let cfg = symmetric_config(3, 2, 4, &[g]).unwrap();
        let subset = [vec![1, 1, 1], vec![1, 1, 2], vec![1, 2, 1], vec![2, 1, 1]];
        let mut min_s = f64::INFINITY;
        for j in subset {
            let j = ObserverSelection::new(j).unwrap();
            let s = simulate_s(&cfg, &j, &NoiseParams::noiseless(3)).unwrap();
            assert!(s.violated);
            min_s = min_s.min(s.s_value);
        }
        assert!((min_s - 3.1040).abs() < 1e-4, "min S = {min_s}");
    }

    #[test]
    fn full_visibility_ignores_colored_fraction() {
        let cfg = symmetric_config(2, 2, 2, &[0.8]).unwrap();
        let j = ObserverSelection::new(vec![1, 2]).unwrap();
        let clean = simulate_s(&cfg, &j, &NoiseParams::noiseless(2)).unwrap();
        for r in [0.0, 0.5, 1.0] {
            let noise = NoiseParams::uniform(2, 1.0, r).unwrap();
            let s = simulate_s(&cfg, &j, &noise).unwrap();
            assert!((s.s_value - clean.s_value).abs() < 1e-12);
        }
    }

    #[test]
    fn deeper_weak_targets_only_lose_value() {
        // Stepping the target one observer deeper multiplies the branch
        // factor by (1+F)/2 <= 1 as long as the new target still measures
        // weakly. (The final weak-to-projective step can raise S again when
        // (1+F)/2 > G, e.g. any G < 0.8 on the optimal trade-off.)
        for g in [0.3, 0.5, 0.8, 0.95] {
            let cfg = symmetric_config(1, 4, 2, &[g, g, g]).unwrap();
            let mut previous = f64::INFINITY;
            for depth in 1..=3 {
                let j = ObserverSelection::uniform(1, depth).unwrap();
                let s = analytic_bound(&cfg, &j).unwrap();
                assert!(s <= previous + 1e-12, "G={g} depth={depth}");
                previous = s;
            }
        }
    }

    #[test]
    fn i_terms_bounded_by_one() {
        let cfg = symmetric_config(3, 2, 4, &[0.9]).unwrap();
        for j in ObserverSelection::all(3, 2) {
            let sim = simulate_s(&cfg, &j, &NoiseParams::noiseless(3)).unwrap();
            for i in &sim.i_terms {
                assert!(i.abs() <= 1.0 + 1e-12);
            }
        }
    }
}
