use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use chrono::{Duration, FixedOffset};
use clap::{Args, Subcommand};
use findnet_geo::export::export_geojson;
use findnet_geo::interp::mean_error;
use findnet_geo::evaldata::{load_scenario, SCENARIOS};
use findnet_geo::point::sort_by_time;
use findnet_geo::{lowess_estimate, rank_top_locations, visiting_histogram, AnalyticsParams, GeoPoint, Trace};
use serde_json::json;

use crate::args::{output, print_json, read_points, utc_offset, write_points};

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Mean distance of reports, raw and smoothed, to a ground-truth trace.
    Error(ErrorArgs),
    /// Smoothed path estimate.
    Path(PathArgs),
    /// Most visited places ranked by dwell time.
    Top(TopArgs),
    /// Visits per hour of day for one ranked place.
    Histogram(HistogramArgs),
    /// Raw and smoothed error for externally supplied walking, restaurant and train data.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct Params {
    /// Reports per local fit.
    #[arg(long, default_value_t = 30)]
    pub lowess_window: usize,
    #[arg(long, default_value_t = 20)]
    pub interval_min: i64,
    #[arg(long, default_value_t = 50.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 6)]
    pub min_neighbors: usize,
}

impl Params {
    fn analytics(&self) -> anyhow::Result<AnalyticsParams> {
        let p = AnalyticsParams {
            lowess_window: self.lowess_window,
            resample_interval: Duration::minutes(self.interval_min),
            dbscan_radius: self.radius,
            dbscan_min_neighbors: self.min_neighbors,
        };
        p.validate()?;
        Ok(p)
    }
}

fn reports(path: &PathBuf) -> anyhow::Result<Vec<GeoPoint>> {
    let mut pts = read_points(path)?;
    if pts.is_empty() {
        bail!("{} holds no reports", path.display());
    }
    sort_by_time(&mut pts);
    Ok(pts)
}

#[derive(Debug, Args)]
pub struct ErrorArgs {
    /// Ground truth, strictly increasing timestamps.
    #[arg(long)]
    pub gps: PathBuf,
    #[arg(long)]
    pub reports: PathBuf,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Args)]
pub struct PathArgs {
    #[arg(long)]
    pub reports: PathBuf,
    /// Estimated path as CSV; stdout by default.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub geojson: Option<PathBuf>,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Args)]
pub struct TopArgs {
    #[arg(long)]
    pub reports: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub limit: usize,
    #[arg(long)]
    pub geojson: Option<PathBuf>,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    #[arg(long)]
    pub reports: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    /// Local time offset for the hour buckets, e.g. +02:00.
    #[arg(long, value_parser = utc_offset, default_value = "+00:00", allow_hyphen_values = true)]
    pub utc_offset: FixedOffset,
    #[command(flatten)]
    pub params: Params,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Directory holding the published GPS and report CSVs.
    #[arg(long, env = "FINDNET_PAPER_DATA")]
    pub paper_data: PathBuf,
    #[arg(long, default_value_t = 30)]
    pub lowess_window: usize,
}

fn errors(gps: &Trace, reps: &[GeoPoint], window: usize) -> anyhow::Result<(f64, f64)> {
    let raw = mean_error(reps, gps)?;
    let est = mean_error(&lowess_estimate(reps, window)?, gps)?;
    Ok((raw, est))
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

pub fn run(c: AnalyzeCommand) -> anyhow::Result<()> {
    match c {
        AnalyzeCommand::Error(a) => {
            let params = a.params.analytics()?;
            let gps = Trace::new(read_points(&a.gps)?).context("ground truth")?;
            let reps = reports(&a.reports)?;
            let (raw, est) = errors(&gps, &reps, params.lowess_window)?;
            print_json(
                &json!({
                    "reports": reps.len(),
                    "raw_mean_error_m": round1(raw),
                    "estimated_mean_error_m": round1(est),
                    "improvement": (raw / est * 100.0).round() / 100.0,
                }),
                None,
            )
        }
        AnalyzeCommand::Path(a) => {
            let params = a.params.analytics()?;
            let reps = reports(&a.reports)?;
            let est = lowess_estimate(&reps, params.lowess_window)?;
            if let Some(g) = &a.geojson {
                export_geojson(&[("reports", &reps), ("estimated", &est)], &[], output(Some(g.as_path()))?)?;
            }
            write_points(&est, a.out.as_ref())
        }
        AnalyzeCommand::Top(a) => {
            let params = a.params.analytics()?;
            let reps = reports(&a.reports)?;
            let top = rank_top_locations(&reps, &params)?;
            if let Some(g) = &a.geojson {
                export_geojson(&[("reports", &reps)], &top, output(Some(g.as_path()))?)?;
            }
            let rows: Vec<_> = top
                .iter()
                .take(a.limit)
                .map(|c| {
                    json!({
                        "rank": c.rank,
                        "lat": (c.center.lat * 1e7).round() / 1e7,
                        "lon": (c.center.lon * 1e7).round() / 1e7,
                        "dwell_minutes": c.dwell_minutes(),
                        "days": c.days_visited,
                        "resampled_count": c.resampled_count,
                        "first_visit": c.first_visit(),
                    })
                })
                .collect();
            print_json(&rows, None)
        }
        AnalyzeCommand::Histogram(a) => {
            let params = a.params.analytics()?;
            let reps = reports(&a.reports)?;
            let top = rank_top_locations(&reps, &params)?;
            let Some(cluster) = top.iter().find(|c| c.rank == a.rank) else {
                bail!("only {} places found", top.len());
            };
            let hist = visiting_histogram(cluster, a.utc_offset);
            let mut out = output(None)?;
            for (hour, n) in hist.iter().enumerate() {
                writeln!(out, "{hour:02}:00 {n:>4} {}", "#".repeat(*n as usize))?;
            }
            out.flush()?;
            Ok(())
        }
        AnalyzeCommand::Evaluate(a) => {
            let mut rows = Vec::new();
            for name in SCENARIOS {
                match load_scenario(&a.paper_data, name) {
                    Ok(data) => {
                        let (raw, est) = errors(&data.gps, &data.reports, a.lowess_window)?;
                        rows.push(json!({
                            "scenario": name,
                            "reports": data.reports.len(),
                            "raw_mean_error_m": round1(raw),
                            "estimated_mean_error_m": round1(est),
                        }));
                    }
                    Err(e) => eprintln!("{name}: {e}"),
                }
            }
            if rows.is_empty() {
                bail!("no scenario found under {}", a.paper_data.display());
            }
            print_json(&rows, None)
        }
    }
}
