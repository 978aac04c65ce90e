//! Line-oriented run configuration: `key = value` pairs with `#` comments,
//! strict key checking, typed defaults, and a canonical serialization whose
//! parse round-trips to the identical typed value.

use crate::coupling::{Cutoff, Variant};
use crate::effective::ResolventMethod;
use crate::error::{Error, Result};
use crate::geometry::{Bump, Geometry};

/// Interior or channel truncation request: everything the discretization
/// carries, or an explicit energy cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutoffSpec {
    All,
    Energy(f64),
}

impl CutoffSpec {
    pub fn to_cutoff(self) -> Cutoff {
        match self {
            CutoffSpec::All => Cutoff::All,
            CutoffSpec::Energy(e) => Cutoff::Energy(e),
        }
    }
}

/// Fully typed run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub geometry: Geometry,
    pub k: Option<f64>,
    pub k_grid: Option<Vec<f64>>,
    pub n_cut: CutoffSpec,
    pub lambda_cut: CutoffSpec,
    pub variant: Variant,
    pub resolvent: ResolventMethod,
    pub threshold_eps: f64,
}

const KNOWN_KEYS: [&str; 13] = [
    "geometry.kind",
    "geometry.L",
    "geometry.a",
    "geometry.nx",
    "geometry.ny",
    "geometry.bumps",
    "run.k",
    "run.k_grid",
    "run.N",
    "run.Lambda",
    "run.variant",
    "run.resolvent",
    "run.threshold_eps",
];

const DEFAULT_LENGTH: f64 = std::f64::consts::PI;
const DEFAULT_WIDTH: f64 = std::f64::consts::PI;
const DEFAULT_GRID: usize = 40;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::ParseError {
        line,
        msg: msg.into(),
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("{key}: expected a number, got {value:?}")))
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| parse_err(line, format!("{key}: expected a count, got {value:?}")))
}

fn parse_cutoff(line: usize, key: &str, value: &str) -> Result<CutoffSpec> {
    if value == "all" {
        return Ok(CutoffSpec::All);
    }
    let e = parse_f64(line, key, value)?;
    if e < 0.0 {
        return Err(Error::RangeError {
            key: key.into(),
            value: value.into(),
            why: "cutoff must be nonnegative or \"all\"".into(),
        });
    }
    Ok(CutoffSpec::Energy(e))
}

/// `(amplitude, x-center, y-center, width)` tuples separated by `;`.
fn parse_bumps(line: usize, value: &str) -> Result<Vec<Bump>> {
    let mut bumps = Vec::new();
    for piece in value.split(';') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let inner = piece
            .strip_prefix('(')
            .and_then(|p| p.strip_suffix(')'))
            .ok_or_else(|| {
                parse_err(
                    line,
                    format!("geometry.bumps: expected (amplitude, x, y, width), got {piece:?}"),
                )
            })?;
        let fields: Vec<&str> = inner.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(parse_err(
                line,
                format!(
                    "geometry.bumps: expected 4 fields (amplitude, x, y, width), got {}",
                    fields.len()
                ),
            ));
        }
        bumps.push(Bump {
            amplitude: parse_f64(line, "geometry.bumps", fields[0])?,
            x_center: parse_f64(line, "geometry.bumps", fields[1])?,
            y_center: parse_f64(line, "geometry.bumps", fields[2])?,
            width: parse_f64(line, "geometry.bumps", fields[3])?,
        });
    }
    Ok(bumps)
}

/// Comma-separated values, or `start:stop:count` for a uniform grid.
fn parse_k_grid(line: usize, value: &str) -> Result<Vec<f64>> {
    if value.contains(':') {
        let parts: Vec<&str> = value.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(parse_err(
                line,
                format!("run.k_grid: expected start:stop:count, got {value:?}"),
            ));
        }
        let start = parse_f64(line, "run.k_grid", parts[0])?;
        let stop = parse_f64(line, "run.k_grid", parts[1])?;
        let count = parse_usize(line, "run.k_grid", parts[2])?;
        if count < 2 {
            return Err(Error::RangeError {
                key: "run.k_grid".into(),
                value: value.into(),
                why: "grid needs at least 2 points".into(),
            });
        }
        let step = (stop - start) / (count - 1) as f64;
        return Ok((0..count).map(|i| start + step * i as f64).collect());
    }
    let mut grid = Vec::new();
    for piece in value.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        grid.push(parse_f64(line, "run.k_grid", piece)?);
    }
    if grid.is_empty() {
        return Err(parse_err(line, "run.k_grid: empty grid"));
    }
    Ok(grid)
}

fn reject_inapplicable(kind: &str, key: &str, set: bool) -> Result<()> {
    if set {
        return Err(Error::ConfigError(format!(
            "{key} does not apply to geometry.kind = {kind}"
        )));
    }
    Ok(())
}

/// Parse configuration text. Unknown keys, duplicate keys, malformed values,
/// and out-of-range values are all rejected with the offending line number
/// where one exists.
pub fn parse_config(text: &str) -> Result<Config> {
    let mut seen: Vec<&str> = Vec::new();
    let mut kind: Option<String> = None;
    let mut length: Option<f64> = None;
    let mut width: Option<f64> = None;
    let mut nx: Option<usize> = None;
    let mut ny: Option<usize> = None;
    let mut bumps: Option<Vec<Bump>> = None;
    let mut k: Option<f64> = None;
    let mut k_grid: Option<Vec<f64>> = None;
    let mut n_cut: Option<CutoffSpec> = None;
    let mut lambda_cut: Option<CutoffSpec> = None;
    let mut variant: Option<Variant> = None;
    let mut resolvent: Option<ResolventMethod> = None;
    let mut threshold_eps: Option<f64> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, format!("expected key = value, got {content:?}")))?;
        let key = key.trim();
        let value = value.trim();
        let known = KNOWN_KEYS
            .iter()
            .find(|&&known| known == key)
            .ok_or_else(|| Error::UnknownKey {
                line,
                key: key.into(),
            })?;
        if seen.contains(known) {
            return Err(parse_err(line, format!("duplicate key {key}")));
        }
        seen.push(known);
        if value.is_empty() {
            return Err(parse_err(line, format!("{key}: empty value")));
        }
        match key {
            "geometry.kind" => match value {
                "example1d" | "rect2d" | "fd2d" => kind = Some(value.into()),
                other => {
                    return Err(Error::RangeError {
                        key: key.into(),
                        value: other.into(),
                        why: "expected example1d, rect2d, or fd2d".into(),
                    })
                }
            },
            "geometry.L" => {
                let v = parse_f64(line, key, value)?;
                if v <= 0.0 {
                    return Err(Error::RangeError {
                        key: key.into(),
                        value: value.into(),
                        why: "length must be positive".into(),
                    });
                }
                length = Some(v);
            }
            "geometry.a" => {
                let v = parse_f64(line, key, value)?;
                if v <= 0.0 {
                    return Err(Error::RangeError {
                        key: key.into(),
                        value: value.into(),
                        why: "width must be positive".into(),
                    });
                }
                width = Some(v);
            }
            "geometry.nx" => {
                let v = parse_usize(line, key, value)?;
                if v < 2 {
                    return Err(Error::RangeError {
                        key: key.into(),
                        value: value.into(),
                        why: "grid needs at least 2 points per direction".into(),
                    });
                }
                nx = Some(v);
            }
            "geometry.ny" => {
                let v = parse_usize(line, key, value)?;
                if v < 2 {
                    return Err(Error::RangeError {
                        key: key.into(),
                        value: value.into(),
                        why: "grid needs at least 2 points per direction".into(),
                    });
                }
                ny = Some(v);
            }
            "geometry.bumps" => bumps = Some(parse_bumps(line, value)?),
            "run.k" => k = Some(parse_f64(line, key, value)?),
            "run.k_grid" => k_grid = Some(parse_k_grid(line, value)?),
            "run.N" => n_cut = Some(parse_cutoff(line, key, value)?),
            "run.Lambda" => lambda_cut = Some(parse_cutoff(line, key, value)?),
            "run.variant" => match value {
                "transpose" => variant = Some(Variant::Transpose),
                "conjugate" => variant = Some(Variant::Conjugate),
                other => {
                    return Err(Error::RangeError {
                        key: key.into(),
                        value: other.into(),
                        why: "expected transpose or conjugate".into(),
                    })
                }
            },
            "run.resolvent" => match value {
                "dense" => resolvent = Some(ResolventMethod::Dense),
                "woodbury" => resolvent = Some(ResolventMethod::Woodbury),
                "auto" => resolvent = Some(ResolventMethod::Auto),
                other => {
                    return Err(Error::RangeError {
                        key: key.into(),
                        value: other.into(),
                        why: "expected dense, woodbury, or auto".into(),
                    })
                }
            },
            "run.threshold_eps" => {
                let v = parse_f64(line, key, value)?;
                if !(v > 0.0) {
                    return Err(Error::RangeError {
                        key: key.into(),
                        value: value.into(),
                        why: "threshold guard must be positive".into(),
                    });
                }
                threshold_eps = Some(v);
            }
            _ => unreachable!("key membership checked above"),
        }
    }

    let kind = kind.ok_or(Error::MissingKey {
        key: "geometry.kind",
    })?;
    let geometry = match kind.as_str() {
        "example1d" => {
            reject_inapplicable(&kind, "geometry.L", length.is_some())?;
            reject_inapplicable(&kind, "geometry.a", width.is_some())?;
            reject_inapplicable(&kind, "geometry.nx", nx.is_some())?;
            reject_inapplicable(&kind, "geometry.ny", ny.is_some())?;
            reject_inapplicable(&kind, "geometry.bumps", bumps.is_some())?;
            Geometry::Example1d
        }
        "rect2d" => {
            reject_inapplicable(&kind, "geometry.nx", nx.is_some())?;
            reject_inapplicable(&kind, "geometry.ny", ny.is_some())?;
            reject_inapplicable(&kind, "geometry.bumps", bumps.is_some())?;
            Geometry::Rect2d {
                length: length.unwrap_or(DEFAULT_LENGTH),
                width: width.unwrap_or(DEFAULT_WIDTH),
            }
        }
        "fd2d" => Geometry::Fd2d {
            length: length.unwrap_or(DEFAULT_LENGTH),
            width: width.unwrap_or(DEFAULT_WIDTH),
            nx: nx.unwrap_or(DEFAULT_GRID),
            ny: ny.unwrap_or(DEFAULT_GRID),
            bumps: bumps.unwrap_or_default(),
        },
        _ => unreachable!("kind validated above"),
    };
    geometry.validate()?;
    if k.is_some() && k_grid.is_some() {
        return Err(Error::ConfigError(
            "run.k and run.k_grid are mutually exclusive".into(),
        ));
    }
    Ok(Config {
        geometry,
        k,
        k_grid,
        n_cut: n_cut.unwrap_or(CutoffSpec::All),
        lambda_cut: lambda_cut.unwrap_or(CutoffSpec::All),
        variant: variant.unwrap_or(Variant::Transpose),
        resolvent: resolvent.unwrap_or(ResolventMethod::Auto),
        threshold_eps: threshold_eps.unwrap_or(crate::channels::DEFAULT_THRESHOLD_EPS),
    })
}

fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

/// Canonical text form: parsing it reproduces the identical typed value.
pub fn serialize_config(config: &Config) -> String {
    let mut out = String::new();
    match &config.geometry {
        Geometry::Example1d => {
            out.push_str("geometry.kind = example1d\n");
        }
        Geometry::Rect2d { length, width } => {
            out.push_str("geometry.kind = rect2d\n");
            out.push_str(&format!("geometry.L = {}\n", fmt_f(*length)));
            out.push_str(&format!("geometry.a = {}\n", fmt_f(*width)));
        }
        Geometry::Fd2d {
            length,
            width,
            nx,
            ny,
            bumps,
        } => {
            out.push_str("geometry.kind = fd2d\n");
            out.push_str(&format!("geometry.L = {}\n", fmt_f(*length)));
            out.push_str(&format!("geometry.a = {}\n", fmt_f(*width)));
            out.push_str(&format!("geometry.nx = {nx}\n"));
            out.push_str(&format!("geometry.ny = {ny}\n"));
            if !bumps.is_empty() {
                let tuples: Vec<String> = bumps
                    .iter()
                    .map(|b| {
                        format!(
                            "({}, {}, {}, {})",
                            fmt_f(b.amplitude),
                            fmt_f(b.x_center),
                            fmt_f(b.y_center),
                            fmt_f(b.width)
                        )
                    })
                    .collect();
                out.push_str(&format!("geometry.bumps = {}\n", tuples.join("; ")));
            }
        }
    }
    if let Some(k) = config.k {
        out.push_str(&format!("run.k = {}\n", fmt_f(k)));
    }
    if let Some(grid) = &config.k_grid {
        let vals: Vec<String> = grid.iter().map(|&v| fmt_f(v)).collect();
        out.push_str(&format!("run.k_grid = {}\n", vals.join(", ")));
    }
    match config.n_cut {
        CutoffSpec::All => out.push_str("run.N = all\n"),
        CutoffSpec::Energy(e) => out.push_str(&format!("run.N = {}\n", fmt_f(e))),
    }
    match config.lambda_cut {
        CutoffSpec::All => out.push_str("run.Lambda = all\n"),
        CutoffSpec::Energy(e) => out.push_str(&format!("run.Lambda = {}\n", fmt_f(e))),
    }
    out.push_str(&format!(
        "run.variant = {}\n",
        match config.variant {
            Variant::Transpose => "transpose",
            Variant::Conjugate => "conjugate",
        }
    ));
    out.push_str(&format!(
        "run.resolvent = {}\n",
        match config.resolvent {
            ResolventMethod::Dense => "dense",
            ResolventMethod::Woodbury => "woodbury",
            ResolventMethod::Auto => "auto",
        }
    ));
    out.push_str(&format!(
        "run.threshold_eps = {}\n",
        fmt_f(config.threshold_eps)
    ));
    out
}

/// 64-bit FNV-1a over the canonical serialization; stamped into CSV headers
/// so outputs are traceable to the exact configuration.
pub fn config_hash(config: &Config) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in serialize_config(config).as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
