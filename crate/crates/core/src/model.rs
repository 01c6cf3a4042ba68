//! Scenario configuration: the (n, m, k) star network, weak-measurement
//! parameters, observer selections, and source noise.
//!
//! All physicality constraints are enforced at construction, so downstream
//! code never revalidates. Branch and observer indices are 1-based in the
//! public types, matching the usual subscript notation (e.g. selection "12"
//! picks the first Alice of branch 1 and the second of branch 2).

use crate::error::{Error, Result};

const PHYS_TOL: f64 = 1e-12;

fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) || !value.is_finite() {
        return Err(Error::OutOfRange {
            name,
            value,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(())
}

/// Per-observer weak-measurement parameters: quality factors F (undisturbed
/// fraction) and precision factors G (information gain), one pair per
/// non-final Alice. Row t of a branch is the t-th sequential observer.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakParams {
    f: Vec<Vec<f64>>,
    g: Vec<Vec<f64>>,
}

impl WeakParams {
    /// `f` and `g` are indexed `[branch][stage]`, each of shape n x (m-1).
    pub fn new(f: Vec<Vec<f64>>, g: Vec<Vec<f64>>) -> Result<Self> {
        if f.len() != g.len() {
            return Err(Error::InvalidScenario(format!(
                "quality and precision tables have {} vs {} branches",
                f.len(),
                g.len()
            )));
        }
        for (frow, grow) in f.iter().zip(&g) {
            if frow.len() != grow.len() {
                return Err(Error::InvalidScenario(format!(
                    "quality and precision rows have {} vs {} stages",
                    frow.len(),
                    grow.len()
                )));
            }
            for (&fv, &gv) in frow.iter().zip(grow) {
                check_unit_interval("F", fv)?;
                check_unit_interval("G", gv)?;
                let norm = fv * fv + gv * gv;
                if norm > 1.0 + PHYS_TOL {
                    return Err(Error::UnphysicalWeakPair(norm));
                }
            }
        }
        Ok(Self { f, g })
    }

    pub fn empty(branches: usize) -> Self {
        Self {
            f: vec![Vec::new(); branches],
            g: vec![Vec::new(); branches],
        }
    }

    pub fn branches(&self) -> usize {
        self.f.len()
    }

    pub fn stages(&self) -> usize {
        self.f.first().map_or(0, Vec::len)
    }

    /// Quality factor F of branch `branch`, stage `stage` (0-based).
    pub fn quality(&self, branch: usize, stage: usize) -> f64 {
        self.f[branch][stage]
    }

    /// Precision factor G of branch `branch`, stage `stage` (0-based).
    pub fn precision(&self, branch: usize, stage: usize) -> f64 {
        self.g[branch][stage]
    }

    pub fn branch_quality(&self, branch: usize) -> &[f64] {
        &self.f[branch]
    }

    pub fn branch_precision(&self, branch: usize) -> &[f64] {
        &self.g[branch]
    }
}

/// The (n, m, k) scenario plus weak-measurement parameters for every
/// non-final observer.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkConfig {
    n: usize,
    m: usize,
    k: usize,
    weak: WeakParams,
}

impl NetworkConfig {
    pub fn new(n: usize, m: usize, k: usize, weak: WeakParams) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidScenario("n must be >= 1".into()));
        }
        if m < 1 {
            return Err(Error::InvalidScenario("m must be >= 1".into()));
        }
        if k < 2 {
            return Err(Error::InvalidScenario("k must be >= 2".into()));
        }
        if weak.branches() != n {
            return Err(Error::InvalidScenario(format!(
                "weak parameters cover {} branches, scenario has {}",
                weak.branches(),
                n
            )));
        }
        for branch in 0..n {
            if weak.branch_quality(branch).len() != m - 1 {
                return Err(Error::InvalidScenario(format!(
                    "branch {} carries {} weak stages, expected m - 1 = {}",
                    branch + 1,
                    weak.branch_quality(branch).len(),
                    m - 1
                )));
            }
        }
        Ok(Self { n, m, k, weak })
    }

    pub fn branches(&self) -> usize {
        self.n
    }

    pub fn observers_per_branch(&self) -> usize {
        self.m
    }

    pub fn settings(&self) -> usize {
        self.k
    }

    pub fn weak(&self) -> &WeakParams {
        &self.weak
    }

    /// Checks that a selection has one entry per branch, each within 1..=m.
    pub fn validate_selection(&self, selection: &ObserverSelection) -> Result<()> {
        if selection.len() != self.n {
            return Err(Error::SelectionLength(selection.len(), self.n));
        }
        for &j in selection.entries() {
            if j < 1 || j > self.m {
                return Err(Error::SelectionOutOfRange(j, self.m));
            }
        }
        Ok(())
    }
}

/// One Alice per branch: the tuple (j1, ..., jn), 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObserverSelection(Vec<usize>);

impl ObserverSelection {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidScenario("selection must be nonempty".into()));
        }
        if entries.contains(&0) {
            return Err(Error::InvalidScenario(
                "selection entries are 1-based".into(),
            ));
        }
        Ok(Self(entries))
    }

    /// The selection (1, ..., 1) of length n.
    pub fn first_generation(n: usize) -> Self {
        Self(vec![1; n])
    }

    /// The selection (j, ..., j) of length n.
    pub fn uniform(n: usize, j: usize) -> Result<Self> {
        Self::new(vec![j; n])
    }

    /// Every tuple in {1..=m}^n, lexicographic.
    pub fn all(n: usize, m: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(m.pow(n as u32));
        let mut current = vec![1usize; n];
        loop {
            out.push(Self(current.clone()));
            let mut pos = n;
            while pos > 0 {
                if current[pos - 1] < m {
                    current[pos - 1] += 1;
                    break;
                }
                current[pos - 1] = 1;
                pos -= 1;
            }
            if pos == 0 {
                return out;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    /// 1-based observer index for `branch` (0-based).
    pub fn observer(&self, branch: usize) -> usize {
        self.0[branch]
    }
}

impl std::fmt::Display for ObserverSelection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &j in &self.0 {
            write!(f, "{j}")?;
        }
        Ok(())
    }
}

/// Per-source noise: visibility v (singlet weight) and colored fraction r.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseParams {
    v: Vec<f64>,
    r: Vec<f64>,
}

impl NoiseParams {
    pub fn new(v: Vec<f64>, r: Vec<f64>) -> Result<Self> {
        if v.len() != r.len() {
            return Err(Error::InvalidScenario(format!(
                "visibility and colored-fraction lists have {} vs {} sources",
                v.len(),
                r.len()
            )));
        }
        for &vi in &v {
            check_unit_interval("v", vi)?;
        }
        for &ri in &r {
            check_unit_interval("r", ri)?;
        }
        Ok(Self { v, r })
    }

    /// The same (v, r) for every source.
    pub fn uniform(n: usize, v: f64, r: f64) -> Result<Self> {
        Self::new(vec![v; n], vec![r; n])
    }

    /// v = 1 everywhere: the sources are perfect singlets.
    pub fn noiseless(n: usize) -> Self {
        Self {
            v: vec![1.0; n],
            r: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn visibility(&self, source: usize) -> f64 {
        self.v[source]
    }

    pub fn colored_fraction(&self, source: usize) -> f64 {
        self.r[source]
    }
}

/// Optimal quality factor for a given precision factor: F = sqrt(1 - G^2).
pub fn optimal_f(g: f64) -> Result<f64> {
    check_unit_interval("G", g)?;
    Ok((1.0 - g * g).sqrt())
}

/// Builds the branch-symmetric configuration with G_it = g_list[t] and
/// F_it = sqrt(1 - g_list[t]^2) for every branch.
pub fn symmetric_config(n: usize, m: usize, k: usize, g_list: &[f64]) -> Result<NetworkConfig> {
    if m == 0 || g_list.len() != m - 1 {
        return Err(Error::InvalidScenario(format!(
            "expected {} precision factors for m = {}, got {}",
            m.saturating_sub(1),
            m,
            g_list.len()
        )));
    }
    let f_row: Vec<f64> = g_list
        .iter()
        .map(|&g| optimal_f(g))
        .collect::<Result<_>>()?;
    let weak = WeakParams::new(vec![f_row; n], vec![g_list.to_vec(); n])?;
    NetworkConfig::new(n, m, k, weak)
}
