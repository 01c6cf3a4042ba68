//! Subcommand implementations. Results go to stdout (or the --out CSV);
//! the resolved-configuration echo always goes to stderr so piped output
//! stays machine-readable.

use std::path::Path;

use chainstar::analysis::{
    critical_visibility, m3_no_sharing_check, noise_sweep, sweep, violation_window_with_tol,
};
use chainstar::inequality::{analytic_bound, analytic_bound_noise, simulate_s, InequalityResult};
use chainstar::model::{NoiseParams, ObserverSelection};
use chainstar::verify;

use crate::config::Resolved;
use crate::format::{fmt6, fmt_g9};

pub enum CmdError {
    Invalid(String),
    Verification,
}

impl From<chainstar::Error> for CmdError {
    fn from(e: chainstar::Error) -> Self {
        CmdError::Invalid(e.to_string())
    }
}

impl From<String> for CmdError {
    fn from(e: String) -> Self {
        CmdError::Invalid(e)
    }
}

fn write_out(path: &Path, content: &str) -> Result<(), CmdError> {
    std::fs::write(path, content)
        .map_err(|e| CmdError::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn violated_word(violated: bool) -> &'static str {
    if violated {
        "yes"
    } else {
        "no"
    }
}

/// `bound`: closed-form S_j per selection.
pub fn bound(resolved: &Resolved, out: Option<&Path>) -> Result<(), CmdError> {
    eprint!("{}", resolved.echo);
    let k = resolved.config.settings();
    let classical = (k - 1) as f64;
    let mut csv = String::from("j,s,classical_bound,violated\n");
    for j in &resolved.selections {
        let s = match &resolved.noise {
            Some(noise) => analytic_bound_noise(&resolved.config, j, noise)
                .map_err(|e| CmdError::Invalid(format!("{e}; use `simulate` for this case")))?,
            None => analytic_bound(&resolved.config, j)?,
        };
        let violated = s > classical;
        println!(
            "j={j}  S={}  bound={}  violated={}",
            fmt6(s),
            fmt6(classical),
            violated_word(violated)
        );
        csv.push_str(&format!(
            "{j},{},{},{}\n",
            fmt_g9(s),
            fmt_g9(classical),
            violated
        ));
    }
    if let Some(path) = out {
        write_out(path, &csv)?;
    }
    Ok(())
}

/// `simulate`: enumerated S_j per selection, with the I_l terms.
pub fn simulate(resolved: &Resolved, out: Option<&Path>) -> Result<(), CmdError> {
    eprint!("{}", resolved.echo);
    let k = resolved.config.settings();
    let fallback = NoiseParams::noiseless(resolved.config.branches());
    let noise = resolved.noise.as_ref().unwrap_or(&fallback);
    let mut csv = String::from("j,s,classical_bound,violated");
    for l in 1..=k {
        csv.push_str(&format!(",i_{l}"));
    }
    csv.push('\n');
    for j in &resolved.selections {
        let InequalityResult {
            i_terms,
            s_value,
            classical_bound,
            violated,
        } = simulate_s(&resolved.config, j, noise)?;
        let terms: Vec<String> = i_terms.iter().map(|&t| fmt6(t)).collect();
        println!(
            "j={j}  S={}  bound={}  violated={}  I=[{}]",
            fmt6(s_value),
            fmt6(classical_bound),
            violated_word(violated),
            terms.join(",")
        );
        csv.push_str(&format!(
            "{j},{},{},{}",
            fmt_g9(s_value),
            fmt_g9(classical_bound),
            violated
        ));
        for t in &i_terms {
            csv.push_str(&format!(",{}", fmt_g9(*t)));
        }
        csv.push('\n');
    }
    if let Some(path) = out {
        write_out(path, &csv)?;
    }
    Ok(())
}

fn grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, CmdError> {
    if steps == 0 {
        return Err(CmdError::Invalid("--steps must be >= 1".into()));
    }
    if !(from.is_finite() && to.is_finite()) || from > to {
        return Err(CmdError::Invalid(format!("bad grid [{from}, {to}]")));
    }
    Ok((0..=steps)
        .map(|i| from + (to - from) * i as f64 / steps as f64)
        .collect())
}

/// `sweep` without --visibility: the bounds over a precision-factor grid.
pub fn sweep_precision(
    n: usize,
    k: usize,
    selections: &[ObserverSelection],
    from: f64,
    to: f64,
    steps: usize,
    out: Option<&Path>,
) -> Result<(), CmdError> {
    let sel: Vec<String> = selections.iter().map(|s| s.to_string()).collect();
    eprintln!(
        "# sweep: n={n} m=2 k={k} selections={} grid=[{from}, {to}] steps={steps}",
        sel.join(" ")
    );
    let rows = sweep(n, k, selections, &grid(from, to, steps)?)?;
    let mut csv = String::from("g");
    for j in selections {
        csv.push_str(&format!(",s{j}"));
    }
    csv.push_str(",classical_bound,min_s,all_violated\n");
    let classical = fmt_g9((k - 1) as f64);
    for row in &rows {
        csv.push_str(&fmt_g9(row.g));
        for (_, s) in &row.s_values {
            csv.push_str(&format!(",{}", fmt_g9(*s)));
        }
        csv.push_str(&format!(
            ",{classical},{},{}\n",
            fmt_g9(row.min_s),
            row.all_violated
        ));
    }
    match out {
        Some(path) => write_out(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

/// `sweep --visibility`: min(S_1..1, S_2..2) over a visibility grid at fixed G,
/// one column per colored fraction.
#[allow(clippy::too_many_arguments)]
pub fn sweep_visibility(
    n: usize,
    k: usize,
    g: f64,
    r_list: &[f64],
    from: f64,
    to: f64,
    steps: usize,
    out: Option<&Path>,
) -> Result<(), CmdError> {
    let rs: Vec<String> = r_list.iter().map(|r| fmt_g9(*r)).collect();
    eprintln!(
        "# sweep: n={n} m=2 k={k} fixed G={g} r=[{}] v-grid=[{from}, {to}] steps={steps}",
        rs.join(",")
    );
    let rows = noise_sweep(n, k, g, r_list, &grid(from, to, steps)?)?;
    let mut csv = String::from("v");
    for r in r_list {
        csv.push_str(&format!(",s_r{}", fmt_g9(*r)));
    }
    csv.push('\n');
    for row in &rows {
        csv.push_str(&fmt_g9(row.v));
        for s in &row.s_values {
            csv.push_str(&format!(",{}", fmt_g9(*s)));
        }
        csv.push('\n');
    }
    match out {
        Some(path) => write_out(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

/// `visibility`: critical visibility by bisection.
pub fn visibility(n: usize, k: usize, r: f64, tol: f64) -> Result<(), CmdError> {
    eprintln!("# visibility: n={n} m=2 k={k} r={r} tol={tol}");
    match critical_visibility(n, k, r, tol)? {
        Some(v) => println!("critical_visibility={}", fmt6(v)),
        None => println!("no simultaneous violation for any v in [0, 1]"),
    }
    Ok(())
}

/// `window`: simultaneous-violation window in G.
pub fn window(
    n: usize,
    k: usize,
    selections: &[ObserverSelection],
    tol: f64,
) -> Result<(), CmdError> {
    let sel: Vec<String> = selections.iter().map(|s| s.to_string()).collect();
    eprintln!(
        "# window: n={n} m=2 k={k} selections={} tol={tol}",
        sel.join(" ")
    );
    let w = violation_window_with_tol(n, k, selections, tol)?;
    match w.endpoints {
        Some((lo, hi)) => println!("window: lo={} hi={}", fmt6(lo), fmt6(hi)),
        None => println!("window: empty"),
    }
    println!(
        "maximin: g_star={} v_star={}",
        fmt6(w.g_star),
        fmt6(w.v_star)
    );
    Ok(())
}

/// `m3check`: the three-observer equalization optimum.
pub fn m3check(n: usize, k: usize) -> Result<(), CmdError> {
    eprintln!("# m3check: n={n} m=3 k={k}");
    let opt = m3_no_sharing_check(n, k)?;
    println!(
        "g1={} g2={} value={} classical_bound={}",
        fmt6(opt.g1),
        fmt6(opt.g2),
        fmt6(opt.value),
        fmt6((k - 1) as f64)
    );
    Ok(())
}

/// `verify`: the deterministic verification suite; nonzero exit on failure.
pub fn verify_suite() -> Result<(), CmdError> {
    let checks = verify::run_all();
    let total = checks.len();
    let mut passed = 0usize;
    for (idx, check) in checks.iter().enumerate() {
        let tag = if check.passed { "PASS" } else { "FAIL" };
        println!(
            "[{}/{total}] {tag} {}: {}",
            idx + 1,
            check.name,
            check.detail
        );
        if check.passed {
            passed += 1;
        }
    }
    println!("verification: {passed}/{total} passed");
    if passed == total {
        Ok(())
    } else {
        Err(CmdError::Verification)
    }
}
