//! Brute-force enumeration over one branch of the network: joint outcome
//! distributions, per-branch correlators, and (for up to three branches) the
//! full-network joint distribution used as an independence cross-check.
//!
//! The evaluation order applies Bob's projection first and the Alice chain
//! afterwards; all measurements act on different factors or commute through
//! the update maps, so this matches the physical temporal order (a dedicated
//! test applies Bob last and checks agreement).

use crate::error::{Error, Result};
use crate::measure::{
    alice_observable, bob_project_and_reduce, projective_update, weak_update, Outcome,
};
use crate::model::{NetworkConfig, NoiseParams};
use crate::qcore::ComplexMatrix;
use crate::state::{noisy_source, SourceState};

/// Everything needed to enumerate one branch up to a target observer.
#[derive(Clone, Debug)]
pub struct BranchSpec {
    source: SourceState,
    weak_f: Vec<f64>,
    weak_g: Vec<f64>,
    k: usize,
    depth: usize,
    m: usize,
}

impl BranchSpec {
    /// `depth` is the 1-based index of the target observer; the weak
    /// parameter lists must cover stages 1..depth-1, plus the target stage
    /// when the target itself measures weakly (depth < m).
    pub fn new(
        source: SourceState,
        weak_f: Vec<f64>,
        weak_g: Vec<f64>,
        k: usize,
        depth: usize,
        m: usize,
    ) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidScenario("k must be >= 2".into()));
        }
        if depth < 1 || depth > m {
            return Err(Error::InvalidScenario(format!(
                "target observer {depth} outside 1..={m}"
            )));
        }
        if weak_f.len() != weak_g.len() {
            return Err(Error::InvalidScenario(format!(
                "weak parameter lists have {} vs {} stages",
                weak_f.len(),
                weak_g.len()
            )));
        }
        let required = if depth < m { depth } else { depth - 1 };
        if weak_f.len() < required {
            return Err(Error::InvalidScenario(format!(
                "{} weak stages supplied, target {} needs {}",
                weak_f.len(),
                depth,
                required
            )));
        }
        for (&f, &g) in weak_f.iter().zip(&weak_g) {
            if !(0.0..=1.0).contains(&f) || !(0.0..=1.0).contains(&g) {
                return Err(Error::OutOfRange {
                    name: "weak parameter",
                    value: if (0.0..=1.0).contains(&f) { g } else { f },
                    lo: 0.0,
                    hi: 1.0,
                });
            }
            if f * f + g * g > 1.0 + 1e-12 {
                return Err(Error::UnphysicalWeakPair(f * f + g * g));
            }
        }
        Ok(Self {
            source,
            weak_f,
            weak_g,
            k,
            depth,
            m,
        })
    }

    /// Slices branch `branch` (0-based) of a network configuration, targeting
    /// its `depth`-th observer, with the given source state.
    pub fn from_config(
        config: &NetworkConfig,
        noise: &NoiseParams,
        branch: usize,
        depth: usize,
    ) -> Result<Self> {
        if branch >= config.branches() {
            return Err(Error::InvalidScenario(format!(
                "branch {} outside 0..{}",
                branch,
                config.branches()
            )));
        }
        if noise.len() != config.branches() {
            return Err(Error::InvalidScenario(format!(
                "{} noise entries for {} sources",
                noise.len(),
                config.branches()
            )));
        }
        let source = noisy_source(noise.visibility(branch), noise.colored_fraction(branch))?;
        Self::new(
            source,
            config.weak().branch_quality(branch).to_vec(),
            config.weak().branch_precision(branch).to_vec(),
            config.settings(),
            depth,
            config.observers_per_branch(),
        )
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Runs the update pipeline for one fully specified outcome history and
    /// returns the final unnormalized state on the target Alice's qubit.
    fn run_chain(
        &self,
        xs: &[usize],
        y: usize,
        outcomes: &[Outcome],
        b: Outcome,
    ) -> Result<ComplexMatrix> {
        let mut rho = bob_project_and_reduce(self.source.density(), y, b, self.k)?;
        for stage in 0..self.depth - 1 {
            let obs = alice_observable(xs[stage], self.k)?;
            rho = weak_update(
                &rho,
                &obs,
                outcomes[stage],
                self.weak_f[stage],
                self.weak_g[stage],
            )?;
        }
        let target = self.depth - 1;
        let obs = alice_observable(xs[target], self.k)?;
        if self.depth < self.m {
            rho = weak_update(
                &rho,
                &obs,
                outcomes[target],
                self.weak_f[target],
                self.weak_g[target],
            )?;
        } else {
            rho = projective_update(&rho, &obs, outcomes[target])?;
        }
        Ok(rho)
    }

    fn check_settings(&self, xs: &[usize], y: usize) -> Result<()> {
        if xs.len() != self.depth {
            return Err(Error::InvalidScenario(format!(
                "{} settings supplied for target depth {}",
                xs.len(),
                self.depth
            )));
        }
        for &x in &xs[..self.depth - 1] {
            if x >= self.k {
                return Err(Error::SettingOutOfRange {
                    value: x,
                    max: self.k - 1,
                });
            }
        }
        if xs[self.depth - 1] > self.k {
            return Err(Error::SettingOutOfRange {
                value: xs[self.depth - 1],
                max: self.k,
            });
        }
        if y >= self.k {
            return Err(Error::SettingOutOfRange {
                value: y,
                max: self.k - 1,
            });
        }
        Ok(())
    }
}

/// P(a_1..a_depth, b | x_1..x_depth, y): the trace of the final unnormalized
/// state after Bob's projection and the Alice update chain.
pub fn branch_distribution(
    spec: &BranchSpec,
    xs: &[usize],
    y: usize,
    outcomes: &[Outcome],
    b: Outcome,
) -> Result<f64> {
    spec.check_settings(xs, y)?;
    if outcomes.len() != spec.depth {
        return Err(Error::InvalidScenario(format!(
            "{} outcomes supplied for target depth {}",
            outcomes.len(),
            spec.depth
        )));
    }
    Ok(spec.run_chain(xs, y, outcomes, b)?.trace().re)
}

/// The correlator <A^x B^y>: the target outcome times Bob's outcome, summed
/// over every earlier outcome and averaged uniformly (weight 1/k^(depth-1))
/// over every earlier setting.
pub fn branch_correlator(spec: &BranchSpec, x_target: usize, y: usize) -> Result<f64> {
    let stages = spec.depth - 1;
    let mut xs = vec![0usize; spec.depth];
    xs[stages] = x_target;
    spec.check_settings(&xs, y)?;

    let setting_combos = spec.k.pow(stages as u32);
    let outcome_combos = 1usize << stages;
    let mut total = 0.0;
    let mut outcomes = vec![Outcome::Plus; spec.depth];
    for combo in 0..setting_combos {
        let mut rem = combo;
        for x in xs.iter_mut().take(stages) {
            *x = rem % spec.k;
            rem /= spec.k;
        }
        for mask in 0..outcome_combos {
            for (stage, slot) in outcomes.iter_mut().enumerate().take(stages) {
                *slot = if mask >> stage & 1 == 0 {
                    Outcome::Plus
                } else {
                    Outcome::Minus
                };
            }
            for a_target in Outcome::BOTH {
                outcomes[stages] = a_target;
                for b in Outcome::BOTH {
                    let p = spec.run_chain(&xs, y, &outcomes, b)?.trace().re;
                    total += a_target.sign() * b.sign() * p;
                }
            }
        }
    }
    Ok(total / setting_combos as f64)
}

/// Joint probability across independent branches sharing Bob's setting `y`,
/// with Bob's outcome supplied per branch. Product form by source
/// independence; capped at three branches.
pub fn joint_distribution(
    specs: &[BranchSpec],
    xs: &[Vec<usize>],
    y: usize,
    outcomes: &[Vec<Outcome>],
    bs: &[Outcome],
) -> Result<f64> {
    if specs.len() > 3 {
        return Err(Error::TooManyBranches(specs.len()));
    }
    if xs.len() != specs.len() || outcomes.len() != specs.len() || bs.len() != specs.len() {
        return Err(Error::InvalidScenario(
            "per-branch argument lists must match the number of branches".into(),
        ));
    }
    let mut product = 1.0;
    for (i, spec) in specs.iter().enumerate() {
        product *= branch_distribution(spec, &xs[i], y, &outcomes[i], bs[i])?;
    }
    Ok(product)
}
