//! Argument parsers and small output helpers shared by the subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use chrono::{DateTime, FixedOffset, Utc};
use findnet_geo::export::{export_csv, import_csv};
use findnet_geo::GeoPoint;
use findnet_sim::config::LatLon;

/// RFC 3339 or Unix milliseconds.
pub fn instant(s: &str) -> Result<DateTime<Utc>, String> {
    if let Ok(ms) = s.parse::<i64>() {
        return DateTime::from_timestamp_millis(ms).ok_or_else(|| format!("{ms} ms is out of range"));
    }
    DateTime::parse_from_rfc3339(s).map(|t| t.with_timezone(&Utc)).map_err(|e| format!("`{s}`: {e}"))
}

/// `lat,lon` in degrees.
pub fn lat_lon(s: &str) -> Result<LatLon, String> {
    let (a, b) = s.split_once(',').ok_or("expected `lat,lon`")?;
    let lat: f64 = a.trim().parse().map_err(|_| format!("bad latitude `{a}`"))?;
    let lon: f64 = b.trim().parse().map_err(|_| format!("bad longitude `{b}`"))?;
    if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
        return Err(format!("{lat},{lon} is not a coordinate"));
    }
    Ok(LatLon { lat, lon })
}

/// `+HH:MM`, `-HH:MM` or `Z`.
pub fn utc_offset(s: &str) -> Result<FixedOffset, String> {
    if s.eq_ignore_ascii_case("z") || s.eq_ignore_ascii_case("utc") {
        return Ok(FixedOffset::east_opt(0).unwrap());
    }
    let (sign, rest) = match s.as_bytes().first() {
        Some(b'+') => (1, &s[1..]),
        Some(b'-') => (-1, &s[1..]),
        _ => return Err(format!("`{s}`: expected +HH:MM or -HH:MM")),
    };
    let (h, m) = rest.split_once(':').unwrap_or((rest, "0"));
    let h: i32 = h.parse().map_err(|_| format!("`{s}`: bad hours"))?;
    let m: i32 = m.parse().map_err(|_| format!("`{s}`: bad minutes"))?;
    FixedOffset::east_opt(sign * (h * 3600 + m * 60)).ok_or_else(|| format!("`{s}` is out of range"))
}

/// A file, or stdout for `None` and `-`.
pub fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    match path {
        Some(p) if p != Path::new("-") => {
            Ok(Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)))
        }
        _ => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

pub fn read_points(path: &Path) -> anyhow::Result<Vec<GeoPoint>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    import_csv(f).map_err(|e| anyhow!("{}: {e}", path.display()))
}

pub fn write_points(points: &[GeoPoint], path: Option<&PathBuf>) -> anyhow::Result<()> {
    let mut out = output(path.map(PathBuf::as_path))?;
    export_csv(points, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn print_json<T: serde::Serialize>(value: &T, path: Option<&Path>) -> anyhow::Result<()> {
    let mut out = output(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instants() {
        assert_eq!(instant("0").unwrap().timestamp(), 0);
        assert_eq!(instant("2021-03-01T09:00:00+01:00").unwrap().timestamp(), 1_614_585_600);
        assert!(instant("yesterday").is_err());
    }

    #[test]
    fn coordinates() {
        assert_eq!(lat_lon("49.87, 8.65").unwrap(), LatLon { lat: 49.87, lon: 8.65 });
        assert!(lat_lon("91,0").is_err());
        assert!(lat_lon("1").is_err());
    }

    #[test]
    fn offsets() {
        assert_eq!(utc_offset("+02:00").unwrap().local_minus_utc(), 7200);
        assert_eq!(utc_offset("-05:30").unwrap().local_minus_utc(), -19800);
        assert_eq!(utc_offset("Z").unwrap().local_minus_utc(), 0);
        assert!(utc_offset("2").is_err());
    }
}
