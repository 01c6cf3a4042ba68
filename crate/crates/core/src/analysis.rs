//! Parameter-space studies on top of the closed-form oracles: precision
//! sweeps, simultaneous-violation windows, maximin points, critical noise
//! visibilities, and the three-observer no-sharing computation.
//!
//! All searches run fixed iteration budgets with no randomness, so identical
//! inputs give bitwise-identical outputs.

use crate::error::{Error, Result};
use crate::inequality::{analytic_bound, analytic_bound_noise};
use crate::model::{symmetric_config, NoiseParams, ObserverSelection};

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const GOLDEN_ITERS: usize = 120;
const PRE_GRID: usize = 2001;
const G_TOL: f64 = 1e-9;

/// Golden-section maximization on [lo, hi] with a fixed iteration budget.
/// Requires unimodality for the global answer; returns (argmax, max).
fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let mut x1 = hi - (hi - lo) * INV_PHI;
    let mut x2 = lo + (hi - lo) * INV_PHI;
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..GOLDEN_ITERS {
        if hi - lo <= G_TOL * 1e-3 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + (hi - lo) * INV_PHI;
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - (hi - lo) * INV_PHI;
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// Bisection for the root of a sign-changing function on [lo, hi], assuming
/// f(lo) and f(hi) straddle zero. Runs until the bracket is below `tol`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if (f_lo <= 0.0) == (f_mid <= 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One row of a precision-factor sweep.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub g: f64,
    /// (selection, S) in the order the selection set was supplied.
    pub s_values: Vec<(ObserverSelection, f64)>,
    pub min_s: f64,
    pub all_violated: bool,
}

/// Evaluates the closed-form bound over a grid of precision factors for an
/// m = 2 scenario on the optimal trade-off F = sqrt(1 - G^2).
pub fn sweep(
    n: usize,
    k: usize,
    selections: &[ObserverSelection],
    grid: &[f64],
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidScenario("empty sweep grid".into()));
    }
    if selections.is_empty() {
        return Err(Error::InvalidScenario("empty selection set".into()));
    }
    let bound = (k - 1) as f64;
    grid.iter()
        .map(|&g| {
            let cfg = symmetric_config(n, 2, k, &[g])?;
            let mut s_values = Vec::with_capacity(selections.len());
            let mut min_s = f64::INFINITY;
            for j in selections {
                let s = analytic_bound(&cfg, j)?;
                min_s = min_s.min(s);
                s_values.push((j.clone(), s));
            }
            Ok(SweepRow {
                g,
                s_values,
                min_s,
                all_violated: min_s > bound,
            })
        })
        .collect()
}

/// Result of a violation-window search: the open interval of G where every
/// selection in the set violates simultaneously (None when no G does), the
/// maximin location g_star, and the maximin value v_star = min_s(g_star).
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    pub endpoints: Option<(f64, f64)>,
    pub g_star: f64,
    pub v_star: f64,
}

/// Locates the simultaneous-violation window of an m = 2 scenario under the
/// optimal trade-off: pre-grids min_s over [0, 1], refines the maximin by
/// golden section, then brackets each crossing of the classical bound by
/// bisection to 1e-9 on G.
pub fn violation_window(n: usize, k: usize, selections: &[ObserverSelection]) -> Result<Window> {
    violation_window_with_tol(n, k, selections, G_TOL)
}

/// [`violation_window`] with an explicit bisection tolerance on G.
pub fn violation_window_with_tol(
    n: usize,
    k: usize,
    selections: &[ObserverSelection],
    tol: f64,
) -> Result<Window> {
    if selections.is_empty() {
        return Err(Error::InvalidScenario("empty selection set".into()));
    }
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            lo: f64::MIN_POSITIVE,
            hi: 1.0,
        });
    }
    // Validate eagerly so the closure below cannot fail.
    let probe = symmetric_config(n, 2, k, &[0.5])?;
    for j in selections {
        probe.validate_selection(j)?;
    }
    let min_s = |g: f64| -> f64 {
        let cfg = symmetric_config(n, 2, k, &[g]).expect("validated scenario");
        selections
            .iter()
            .map(|j| analytic_bound(&cfg, j).expect("validated selection"))
            .fold(f64::INFINITY, f64::min)
    };

    let values: Vec<f64> = (0..PRE_GRID)
        .map(|i| min_s(i as f64 / (PRE_GRID - 1) as f64))
        .collect();
    let peak = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite S values"))
        .map(|(i, _)| i)
        .expect("nonempty grid");
    let step = 1.0 / (PRE_GRID - 1) as f64;
    let lo_bracket = peak.saturating_sub(1) as f64 * step;
    let hi_bracket = ((peak + 1).min(PRE_GRID - 1)) as f64 * step;
    let (g_star, v_star) = golden_section_max(min_s, lo_bracket, hi_bracket);

    let bound = (k - 1) as f64;
    if v_star <= bound {
        return Ok(Window {
            endpoints: None,
            g_star,
            v_star,
        });
    }
    let crossing = |a: f64, b: f64| bisect(|g| min_s(g) - bound, a, b, tol);
    // Walk the grid outward from the peak to bracket each sign change.
    let lo = (0..peak)
        .rev()
        .find(|&i| values[i] <= bound)
        .map(|i| crossing(i as f64 * step, (i + 1) as f64 * step))
        .unwrap_or(0.0);
    let hi = ((peak + 1)..PRE_GRID)
        .find(|&i| values[i] <= bound)
        .map(|i| crossing((i - 1) as f64 * step, i as f64 * step))
        .unwrap_or(1.0);
    Ok(Window {
        endpoints: Some((lo, hi)),
        g_star,
        v_star,
    })
}

/// Critical visibility for an m = 2 scenario with shared colored fraction
/// `r`: the infimum of v at which the first and second generations can still
/// violate simultaneously (maximized over G). None when even v = 1 cannot.
pub fn critical_visibility(n: usize, k: usize, r: f64, tol: f64) -> Result<Option<f64>> {
    if !(0.0..=1.0).contains(&r) || !r.is_finite() {
        return Err(Error::OutOfRange {
            name: "r",
            value: r,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            lo: f64::MIN_POSITIVE,
            hi: 1.0,
        });
    }
    // Validate the scenario once up front.
    symmetric_config(n, 2, k, &[0.5])?;
    let best_over_g = |v: f64| -> f64 {
        let inner = |g: f64| -> f64 {
            let cfg = symmetric_config(n, 2, k, &[g]).expect("validated scenario");
            let noise = NoiseParams::uniform(n, v, r).expect("validated noise");
            [1, 2]
                .into_iter()
                .map(|j| {
                    let j = ObserverSelection::uniform(n, j).expect("n >= 1");
                    analytic_bound_noise(&cfg, &j, &noise).expect("supported case")
                })
                .fold(f64::INFINITY, f64::min)
        };
        golden_section_max(inner, 0.0, 1.0).1
    };
    let bound = (k - 1) as f64;
    if best_over_g(1.0) <= bound {
        return Ok(None);
    }
    Ok(Some(bisect(|v| best_over_g(v) - bound, 0.0, 1.0, tol)))
}

/// Optimum of the m = 3 equalization problem.
#[derive(Clone, Debug, PartialEq)]
pub struct M3Optimum {
    pub g1: f64,
    pub g2: f64,
    /// min(S_1..1, S_2..2, S_3..3) at (g1, g2).
    pub value: f64,
}

/// Maximizes the smallest of the three uniform-selection bounds of an
/// (n, 3, k) scenario over (G1, G2) by coordinate ascent with golden-section
/// line searches (fixed 100 outer rounds from (0.7, 0.8)).
pub fn m3_no_sharing_check(n: usize, k: usize) -> Result<M3Optimum> {
    symmetric_config(n, 3, k, &[0.5, 0.5])?;
    let objective = |g1: f64, g2: f64| -> f64 {
        let cfg = symmetric_config(n, 3, k, &[g1, g2]).expect("validated scenario");
        (1..=3)
            .map(|j| {
                let j = ObserverSelection::uniform(n, j).expect("n >= 1");
                analytic_bound(&cfg, &j).expect("validated selection")
            })
            .fold(f64::INFINITY, f64::min)
    };
    let (mut g1, mut g2) = (0.7, 0.8);
    for _ in 0..100 {
        g1 = golden_section_max(|g| objective(g, g2), 0.0, 1.0).0;
        g2 = golden_section_max(|g| objective(g1, g), 0.0, 1.0).0;
    }
    Ok(M3Optimum {
        g1,
        g2,
        value: objective(g1, g2),
    })
}

/// One row of a visibility sweep at fixed G: the binding bound
/// min(S_1..1, S_2..2) for each colored fraction in the supplied list.
#[derive(Clone, Debug)]
pub struct NoiseSweepRow {
    pub v: f64,
    pub s_values: Vec<f64>,
}

/// Sweeps visibility at a fixed precision factor for each colored fraction
/// in `r_list` (the data behind the noise-robustness plots).
pub fn noise_sweep(
    n: usize,
    k: usize,
    g: f64,
    r_list: &[f64],
    v_grid: &[f64],
) -> Result<Vec<NoiseSweepRow>> {
    if v_grid.is_empty() || r_list.is_empty() {
        return Err(Error::InvalidScenario("empty sweep grid".into()));
    }
    let cfg = symmetric_config(n, 2, k, &[g])?;
    v_grid
        .iter()
        .map(|&v| {
            let s_values = r_list
                .iter()
                .map(|&r| {
                    let noise = NoiseParams::uniform(n, v, r)?;
                    [1, 2]
                        .into_iter()
                        .map(|j| {
                            let j = ObserverSelection::uniform(n, j)?;
                            analytic_bound_noise(&cfg, &j, &noise)
                        })
                        .try_fold(f64::INFINITY, |acc, s| s.map(|s| acc.min(s)))
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(NoiseSweepRow { v, s_values })
        })
        .collect()
}
