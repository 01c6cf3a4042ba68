//! Run-configuration resolution: defaults, then an optional flat key = value
//! config file (with one optional `[branch i]` section per branch), then
//! command-line flags, later layers overriding earlier ones.

use std::fmt::Write as _;
use std::path::Path;

use chainstar::model::{NetworkConfig, NoiseParams, ObserverSelection, WeakParams};

use crate::format::fmt_g9;

pub struct Resolved {
    pub config: NetworkConfig,
    pub selections: Vec<ObserverSelection>,
    pub noise: Option<NoiseParams>,
    /// Human-readable echo of every resolved value.
    pub echo: String,
}

#[derive(Default, Clone)]
pub struct RawScenario {
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    /// Symmetric per-stage precision factors.
    pub g: Option<Vec<f64>>,
    /// Symmetric per-stage quality factors (default: optimal trade-off).
    pub f: Option<Vec<f64>>,
    pub j: Option<String>,
    /// Shared (v, r) for every source.
    pub noise: Option<(f64, f64)>,
    /// Per-branch overrides from the config file.
    pub branches: Vec<BranchSection>,
    /// Per-source noise from --noise-file.
    pub noise_rows: Option<Vec<(f64, f64)>>,
}

#[derive(Default, Clone)]
pub struct BranchSection {
    pub index: usize,
    pub g: Option<Vec<f64>>,
    pub f: Option<Vec<f64>>,
    pub v: Option<f64>,
    pub r: Option<f64>,
}

pub fn parse_float_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: '{t}'"))
        })
        .collect()
}

pub fn parse_noise_pair(s: &str) -> Result<(f64, f64), String> {
    let parts = parse_float_list(s)?;
    if parts.len() != 2 {
        return Err(format!("--noise expects 'v,r', got '{s}'"));
    }
    Ok((parts[0], parts[1]))
}

/// Parses the flat `key = value` config file with optional `[branch i]`
/// sections. Unknown keys are rejected.
pub fn parse_config_file(path: &Path) -> Result<RawScenario, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut raw = RawScenario::default();
    let mut section: Option<BranchSection> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or(format!("line {}: unterminated section", lineno + 1))?
                .trim();
            let index = header
                .strip_prefix("branch")
                .map(str::trim)
                .and_then(|s| s.parse::<usize>().ok())
                .filter(|&i| i >= 1)
                .ok_or(format!(
                    "line {}: expected [branch <i>] with i >= 1",
                    lineno + 1
                ))?;
            if let Some(done) = section.take() {
                raw.branches.push(done);
            }
            section = Some(BranchSection {
                index,
                ..BranchSection::default()
            });
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(format!("line {}: expected key = value", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |e: String| format!("line {}: {e}", lineno + 1);
        match &mut section {
            None => match key {
                "n" => raw.n = Some(value.parse().map_err(|_| bad("bad n".into()))?),
                "m" => raw.m = Some(value.parse().map_err(|_| bad("bad m".into()))?),
                "k" => raw.k = Some(value.parse().map_err(|_| bad("bad k".into()))?),
                "g" => raw.g = Some(parse_float_list(value).map_err(bad)?),
                "f" => raw.f = Some(parse_float_list(value).map_err(bad)?),
                "j" => raw.j = Some(value.to_string()),
                "noise" => raw.noise = Some(parse_noise_pair(value).map_err(bad)?),
                other => return Err(bad(format!("unknown key '{other}'"))),
            },
            Some(branch) => match key {
                "g" => branch.g = Some(parse_float_list(value).map_err(bad)?),
                "f" => branch.f = Some(parse_float_list(value).map_err(bad)?),
                "v" => branch.v = Some(value.parse().map_err(|_| bad("bad v".into()))?),
                "r" => branch.r = Some(value.parse().map_err(|_| bad("bad r".into()))?),
                other => return Err(bad(format!("unknown key '{other}' in branch section"))),
            },
        }
    }
    if let Some(done) = section.take() {
        raw.branches.push(done);
    }
    Ok(raw)
}

/// One `v r` (or `v,r`) line per source.
pub fn parse_noise_file(path: &Path) -> Result<Vec<(f64, f64)>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        if parts.len() != 2 {
            return Err(format!("line {}: expected 'v r'", lineno + 1));
        }
        let v = parts[0]
            .parse::<f64>()
            .map_err(|_| format!("line {}: bad v", lineno + 1))?;
        let r = parts[1]
            .parse::<f64>()
            .map_err(|_| format!("line {}: bad r", lineno + 1))?;
        rows.push((v, r));
    }
    Ok(rows)
}

/// Overlays `flags` on top of `file` (flags win where both are set).
pub fn overlay(file: RawScenario, flags: RawScenario) -> RawScenario {
    RawScenario {
        n: flags.n.or(file.n),
        m: flags.m.or(file.m),
        k: flags.k.or(file.k),
        g: flags.g.or(file.g),
        f: flags.f.or(file.f),
        j: flags.j.or(file.j),
        noise: flags.noise.or(file.noise),
        branches: if flags.branches.is_empty() {
            file.branches
        } else {
            flags.branches
        },
        noise_rows: flags.noise_rows.or(file.noise_rows),
    }
}

fn optimal_quality(gs: &[f64]) -> Result<Vec<f64>, String> {
    gs.iter()
        .map(|&g| chainstar::model::optimal_f(g).map_err(|e| e.to_string()))
        .collect()
}

/// Parses `--j`: "all", one comma-separated tuple of n indices, or a
/// comma-separated list of n-digit selection strings.
pub fn parse_selections(spec: &str, n: usize, m: usize) -> Result<Vec<ObserverSelection>, String> {
    if spec.trim().eq_ignore_ascii_case("all") {
        return Ok(ObserverSelection::all(n, m));
    }
    let tokens: Vec<&str> = spec.split(',').map(str::trim).collect();
    let as_digits = |token: &str| -> Result<ObserverSelection, String> {
        let entries: Vec<usize> = token
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or(format!("bad selection digit '{c}'"))
            })
            .collect::<Result<_, _>>()?;
        ObserverSelection::new(entries).map_err(|e| e.to_string())
    };
    if tokens.iter().all(|t| t.len() == n) {
        return tokens.iter().map(|t| as_digits(t)).collect();
    }
    if tokens.len() == n && tokens.iter().all(|t| t.len() == 1) {
        let entries: Vec<usize> = tokens
            .iter()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| format!("bad selection index '{t}'"))
            })
            .collect::<Result<_, _>>()?;
        return Ok(vec![
            ObserverSelection::new(entries).map_err(|e| e.to_string())?
        ]);
    }
    Err(format!(
        "cannot read '{spec}' as selections for n = {n} (use 'all', one tuple like '1,2', or digit strings like '11,12')"
    ))
}

/// Builds the validated scenario from the raw layers.
pub fn resolve(raw: RawScenario) -> Result<Resolved, String> {
    let n = raw.n.unwrap_or(2);
    let m = raw.m.unwrap_or(2);
    let k = raw.k.unwrap_or(2);
    if m >= 1 && raw.g.as_ref().is_some_and(|g| g.len() != m - 1) {
        return Err(format!(
            "--g needs one value per weak stage ({} for m = {m})",
            m - 1
        ));
    }
    let default_g = vec![0.8; m.saturating_sub(1)];
    let base_g = raw.g.clone().unwrap_or(default_g);
    let base_f = match &raw.f {
        Some(f) => {
            if f.len() != base_g.len() {
                return Err("--f must have the same length as --g".to_string());
            }
            f.clone()
        }
        None => optimal_quality(&base_g)?,
    };

    // Per-branch tables: file sections override the symmetric base row.
    let mut g_rows = vec![base_g.clone(); n];
    let mut f_rows = vec![base_f.clone(); n];
    let mut v_list = vec![None; n];
    let mut r_list = vec![None; n];
    for section in &raw.branches {
        if section.index > n {
            return Err(format!("[branch {}] exceeds n = {n}", section.index));
        }
        let i = section.index - 1;
        if let Some(g) = &section.g {
            if g.len() != m - 1 {
                return Err(format!(
                    "[branch {}] g needs {} values for m = {m}",
                    section.index,
                    m - 1
                ));
            }
            g_rows[i] = g.clone();
            f_rows[i] = match &section.f {
                Some(f) => f.clone(),
                None => optimal_quality(g)?,
            };
        } else if let Some(f) = &section.f {
            if f.len() != m - 1 {
                return Err(format!(
                    "[branch {}] f needs {} values for m = {m}",
                    section.index,
                    m - 1
                ));
            }
            f_rows[i] = f.clone();
        }
        v_list[i] = section.v;
        r_list[i] = section.r;
    }

    let weak = WeakParams::new(f_rows.clone(), g_rows.clone()).map_err(|e| e.to_string())?;
    let config = NetworkConfig::new(n, m, k, weak).map_err(|e| e.to_string())?;

    let selections = parse_selections(raw.j.as_deref().unwrap_or("all"), n, m)?;
    for j in &selections {
        config.validate_selection(j).map_err(|e| e.to_string())?;
    }

    // Noise priority: --noise-file, then shared --noise, then file sections.
    let sectioned = v_list.iter().any(Option::is_some) || r_list.iter().any(Option::is_some);
    let noise = if let Some(rows) = &raw.noise_rows {
        if rows.len() != n {
            return Err(format!("noise file has {} rows for n = {n}", rows.len()));
        }
        Some(
            NoiseParams::new(
                rows.iter().map(|p| p.0).collect(),
                rows.iter().map(|p| p.1).collect(),
            )
            .map_err(|e| e.to_string())?,
        )
    } else if let Some((v, r)) = raw.noise {
        Some(NoiseParams::uniform(n, v, r).map_err(|e| e.to_string())?)
    } else if sectioned {
        Some(
            NoiseParams::new(
                v_list.iter().map(|v| v.unwrap_or(1.0)).collect(),
                r_list.iter().map(|r| r.unwrap_or(0.0)).collect(),
            )
            .map_err(|e| e.to_string())?,
        )
    } else {
        None
    };

    let mut echo = String::new();
    let _ = writeln!(echo, "# scenario: n={n} m={m} k={k}");
    for branch in 0..n {
        let gs: Vec<String> = g_rows[branch].iter().map(|g| fmt_g9(*g)).collect();
        let fs: Vec<String> = f_rows[branch].iter().map(|f| fmt_g9(*f)).collect();
        let _ = writeln!(
            echo,
            "# branch {}: G=[{}] F=[{}]",
            branch + 1,
            gs.join(","),
            fs.join(",")
        );
    }
    let sel: Vec<String> = selections.iter().map(|s| s.to_string()).collect();
    let _ = writeln!(echo, "# selections: {}", sel.join(" "));
    match &noise {
        Some(p) => {
            let rows: Vec<String> = (0..n)
                .map(|i| {
                    format!(
                        "(v={}, r={})",
                        fmt_g9(p.visibility(i)),
                        fmt_g9(p.colored_fraction(i))
                    )
                })
                .collect();
            let _ = writeln!(echo, "# noise: {}", rows.join(" "));
        }
        None => {
            let _ = writeln!(echo, "# noise: none");
        }
    }
    Ok(Resolved {
        config,
        selections,
        noise,
        echo,
    })
}
