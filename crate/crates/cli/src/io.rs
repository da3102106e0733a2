//! File ingestion and emission: JSON cell fields, CSV sample columns, and
//! the gauge spec strings.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use masspack_core::circle::CircleWeight;
use masspack_core::gauge::Gauge;
use masspack_core::pack::{MassFunction, RoofGrid};

/// Parses `power:<alpha>`, `log`, `density:<file>`, or `table:<file>` into a gauge
/// with the given domain (1 for cube commands, 2 pi for circle commands).
pub fn parse_gauge(spec: &str, domain_max: f64) -> Result<Gauge> {
    let gauge = match spec.split_once(':') {
        None if spec == "log" => Gauge::log_type(domain_max)?,
        Some(("power", alpha)) => {
            let alpha: f64 = alpha
                .parse()
                .with_context(|| format!("bad power exponent {alpha:?}"))?;
            Gauge::power(alpha, domain_max)?
        }
        Some(("density", path)) => {
            let samples = read_two_column_csv(Path::new(path))?;
            Gauge::from_density(&samples, DENSITY_CLAMP, domain_max)?
        }
        Some(("table", path)) => {
            let samples = read_two_column_csv(Path::new(path))?;
            Gauge::tabulated(&samples, domain_max)?
        }
        _ => bail!("unknown gauge spec {spec:?} (expected power:<alpha>, log, density:<file>, or table:<file>)"),
    };
    Ok(gauge)
}

/// Largest sampled gauge value accepted from a density file.
const DENSITY_CLAMP: f64 = 1e9;

/// Two ascending columns `x,value`, one pair per line; blank lines and
/// `#` comments skipped.
pub fn read_two_column_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (x, v) = line
            .split_once(',')
            .with_context(|| format!("{}:{}: expected x,value", path.display(), lineno + 1))?;
        let x: f64 = x
            .trim()
            .parse()
            .with_context(|| format!("{}:{}: bad x", path.display(), lineno + 1))?;
        let v: f64 = v
            .trim()
            .parse()
            .with_context(|| format!("{}:{}: bad value", path.display(), lineno + 1))?;
        out.push((x, v));
    }
    if out.is_empty() {
        bail!("{}: no samples", path.display());
    }
    Ok(out)
}

/// One non-negative sample per line.
pub fn read_weight_csv(path: &Path, t: f64) -> Result<CircleWeight> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line
            .parse()
            .with_context(|| format!("{}:{}: bad weight sample", path.display(), lineno + 1))?;
        samples.push(v);
    }
    Ok(CircleWeight::new(samples, t)?)
}

pub fn read_roof(path: &Path) -> Result<RoofGrid> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let roof: RoofGrid =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(roof)
}

/// Accepts either a bare cell-field JSON or a pack report, whose `f` field
/// is then used.
pub fn read_mass(path: &Path) -> Result<MassFunction> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if let Ok(f) = serde_json::from_str::<MassFunction>(&text) {
        return Ok(f);
    }
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let inner = value
        .get("f")
        .with_context(|| format!("{}: neither a cell field nor a pack report", path.display()))?;
    let f: MassFunction = serde_json::from_value(inner.clone())
        .with_context(|| format!("parsing the f field of {}", path.display()))?;
    Ok(f)
}

/// Pretty JSON to a file, or to stdout when no path is given.
pub fn emit_json<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}
