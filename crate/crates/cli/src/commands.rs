//! Command-line surface and study dispatch.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mmw::coverage::{inr_bound_ccdf, sinr_coverage, snr_coverage, uplink_fpc_coverage, LinkKind, SinrOptions};
use mmw::geometry::{fit_blockage, BuildingSet, PolarSampling};
use mmw::numerics::InversionConfig;
use mmw::propagation::PropagationModel;
use mmw::rate::{median_rate_contour, saturation_density, HybridAnalysis, RateAnalysis, SaturationQuery};
use mmw::simulator::{estimate_ccdf, BlockageSource, Metric};
use mmw::units::{per_km2_to_per_m2, per_m2_to_per_km2};
use rayon::prelude::*;
use serde_json::json;

use crate::error::CliError;
use crate::grid::{GridSpec, Scale};
use crate::output::{sidecar_path, write_file, write_stdout, Table};
use crate::schema::{load_config, FileConfig, Resolved};

#[derive(Debug, Parser)]
#[command(name = "mmw", version, about = "Coverage, rate and dimensioning studies for self-backhauled mmWave networks")]
pub struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML config, or a JSON sidecar from an earlier run.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Override one config field, e.g. `--set network.bs_density_per_km2=150`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// CSV destination; the JSON sidecar goes next to it. Default: stdout, no sidecar.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub grid: GridArgs,
}

/// Grid flags override the config's `[grid]`, which overrides the command default.
#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub scale: Option<Scale>,
    /// Explicit ascending grid, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Link {
    Downlink,
    Uplink,
    Backhaul,
}

impl From<Link> for LinkKind {
    fn from(l: Link) -> Self {
        match l {
            Link::Downlink => LinkKind::Downlink,
            Link::Uplink => LinkKind::Uplink,
            Link::Backhaul => LinkKind::Backhaul,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CoverageMetric {
    Snr,
    Sinr,
    /// Uplink SNR under fractional power control.
    FpcSnr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMetric {
    Snr,
    Sinr,
    Inr,
    Rate,
    FpcSnr,
    /// Rate with offloading to the UHF tier (downlink, fully wired).
    HybridRate,
}

impl SimMetric {
    fn is_rate(self) -> bool {
        matches!(self, SimMetric::Rate | SimMetric::HybridRate)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytical SNR/SINR coverage; thresholds in dB.
    Coverage {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = CoverageMetric::Sinr)]
        metric: CoverageMetric,
        #[arg(long, value_enum, default_value_t = Link::Downlink)]
        link: Link,
    },
    /// Analytical rate coverage; thresholds in Mbps.
    Rate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Link::Downlink)]
        link: Link,
        /// Replace cell loads by their means.
        #[arg(long, conflicts_with = "hybrid")]
        meanload: bool,
        /// Offload users with low mmWave SNR to the UHF tier.
        #[arg(long)]
        hybrid: bool,
    },
    /// Analytical INR tail bound; thresholds in dB.
    Inr {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Link::Downlink)]
        link: Link,
    },
    /// Monte Carlo CCDF with 95% Wilson intervals.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = SimMetric::Sinr)]
        metric: SimMetric,
        #[arg(long, value_enum, default_value_t = Link::Downlink)]
        link: Link,
    },
    /// Analysis and simulation side by side, with their largest gap.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = SimMetric::Sinr)]
        metric: SimMetric,
        #[arg(long, value_enum, default_value_t = Link::Downlink)]
        link: Link,
    },
    /// Smallest wired fraction with median rate above a target, per BS density (per km²).
    Contour {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 400.0)]
        target_mbps: f64,
    },
    /// BS density beyond which rate coverage stops improving, per A-BS density (per km²).
    Saturation {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.02)]
        delta: f64,
        #[arg(long, default_value_t = 100.0)]
        rate_mbps: f64,
    },
    /// LOS-ball fit of a building map, per ball radius (m).
    FitBlockage {
        #[command(flatten)]
        common: Common,
        /// GeoJSON footprints in projected meters; defaults to `sim.buildings`.
        #[arg(long)]
        buildings: Option<PathBuf>,
        /// Sample points per radius.
        #[arg(long, default_value_t = 2000)]
        samples: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Coverage { .. } => "coverage",
            Command::Rate { .. } => "rate",
            Command::Inr { .. } => "inr",
            Command::Simulate { .. } => "simulate",
            Command::Validate { .. } => "validate",
            Command::Contour { .. } => "contour",
            Command::Saturation { .. } => "saturation",
            Command::FitBlockage { .. } => "fit-blockage",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Coverage { common, .. }
            | Command::Rate { common, .. }
            | Command::Inr { common, .. }
            | Command::Simulate { common, .. }
            | Command::Validate { common, .. }
            | Command::Contour { common, .. }
            | Command::Saturation { common, .. }
            | Command::FitBlockage { common, .. } => common,
        }
    }

    fn default_grid(&self) -> GridSpec {
        let rates = GridSpec::range(10.0, 10_000.0, 21, Scale::Log);
        match self {
            Command::Coverage { .. } => GridSpec::range(-10.0, 30.0, 21, Scale::Db),
            Command::Inr { .. } => GridSpec::range(-20.0, 20.0, 21, Scale::Db),
            Command::Rate { .. } => rates,
            Command::Simulate { metric, .. } | Command::Validate { metric, .. } => match metric {
                m if m.is_rate() => rates,
                SimMetric::Inr => GridSpec::range(-20.0, 20.0, 21, Scale::Db),
                _ => GridSpec::range(-10.0, 30.0, 21, Scale::Db),
            },
            Command::Contour { .. } => GridSpec::range(50.0, 300.0, 26, Scale::Linear),
            Command::Saturation { .. } => GridSpec { values: Some(vec![10.0, 20.0, 40.0]), ..GridSpec::range(0.0, 0.0, 1, Scale::Linear) },
            Command::FitBlockage { .. } => GridSpec::range(50.0, 400.0, 8, Scale::Linear),
        }
    }

    /// Options not held in the config file, recorded in the sidecar.
    fn options(&self) -> serde_json::Value {
        let dbg = |v: &dyn std::fmt::Debug| format!("{v:?}").to_lowercase();
        match self {
            Command::Coverage { metric, link, .. } => json!({ "metric": dbg(metric), "link": dbg(link) }),
            Command::Rate { link, meanload, hybrid, .. } => json!({ "link": dbg(link), "meanload": meanload, "hybrid": hybrid }),
            Command::Inr { link, .. } => json!({ "link": dbg(link) }),
            Command::Simulate { metric, link, .. } | Command::Validate { metric, link, .. } => {
                json!({ "metric": dbg(metric), "link": dbg(link) })
            }
            Command::Contour { target_mbps, .. } => json!({ "target_mbps": target_mbps }),
            Command::Saturation { delta, rate_mbps, .. } => json!({ "delta": delta, "rate_mbps": rate_mbps }),
            Command::FitBlockage { buildings, samples, .. } => json!({ "buildings": buildings, "samples": samples }),
        }
    }
}

/// Resolves the effective grid.
pub fn effective_grid(default: GridSpec, from_config: Option<&GridSpec>, args: &GridArgs) -> GridSpec {
    let mut g = from_config.cloned().unwrap_or(default);
    if args.min.is_some() || args.max.is_some() || args.points.is_some() {
        g.values = None;
    }
    if let Some(v) = args.min {
        g.min = v;
    }
    if let Some(v) = args.max {
        g.max = v;
    }
    if let Some(v) = args.points {
        g.points = v;
    }
    if let Some(v) = args.scale {
        g.scale = v;
    }
    if let Some(v) = &args.values {
        g.values = Some(v.clone());
    }
    g
}

/// What a finished study produced.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub sidecar: serde_json::Value,
    pub max_deviation: Option<f64>,
}

/// Runs one study on a dedicated worker pool, writes its outputs and
/// returns them.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} worker threads: {e}", cli.threads)))?;
    pool.install(|| run_study(&cli.command))
}

pub fn run_study(cmd: &Command) -> Result<Report, CliError> {
    let start = Instant::now();
    let common = cmd.common();
    let mut file = load_config(common.config.as_deref(), &common.overrides)?;
    let grid = effective_grid(cmd.default_grid(), file.grid.as_ref(), &common.grid);
    let xs = grid.values()?;
    file.grid = Some(grid.clone());
    let cfg = file.resolve()?;

    let (table, max_deviation, unreachable) = dispatch(cmd, &file, &cfg, &grid, &xs)?;

    let sidecar = json!({
        "command": cmd.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "core_version": mmw::VERSION,
        "seed": cfg.sim.seed,
        "threads": rayon::current_num_threads(),
        "wall_time_s": start.elapsed().as_secs_f64(),
        "overrides": common.overrides,
        "options": cmd.options(),
        "max_deviation": max_deviation,
        "resolved": resolved_json(&cfg),
        "config": file,
    });
    let csv = table.to_csv();
    match &common.output {
        Some(path) => {
            write_file(path, &csv)?;
            let text = serde_json::to_string_pretty(&sidecar).map_err(|e| CliError::Io(e.to_string()))?;
            write_file(&sidecar_path(path), &(text + "\n"))?;
        }
        None => write_stdout(&csv)?,
    }
    if let Some(d) = max_deviation {
        eprintln!("max |analysis - simulation| = {d}");
    }
    if let Some(msg) = unreachable {
        return Err(CliError::Unreachable(msg));
    }
    Ok(Report { table, sidecar, max_deviation })
}

type Outcome = (Table, Option<f64>, Option<String>);

fn dispatch(cmd: &Command, file: &FileConfig, cfg: &Resolved, grid: &GridSpec, xs: &[f64]) -> Result<Outcome, CliError> {
    let lin: Vec<f64> = xs.iter().map(|&x| grid.to_linear(x)).collect();
    match cmd {
        Command::Coverage { metric, link, .. } => {
            let m = match metric {
                CoverageMetric::Snr => SimMetric::Snr,
                CoverageMetric::Sinr => SimMetric::Sinr,
                CoverageMetric::FpcSnr => SimMetric::FpcSnr,
            };
            Ok((value_table(xs, &analysis_curve(m, (*link).into(), cfg, &lin)?), None, None))
        }
        Command::Inr { link, .. } => Ok((value_table(xs, &analysis_curve(SimMetric::Inr, (*link).into(), cfg, &lin)?), None, None)),
        Command::Rate { link, meanload, hybrid, .. } => {
            let rhos = mbps(&lin);
            let v = if *meanload {
                let (a, b) = models(cfg)?;
                let ra = RateAnalysis::new(&a, &b, &cfg.net.radio, &cfg.net.load_model()?, &cfg.net.rate_config_for((*link).into()))?;
                rhos.par_iter().map(|&r| ra.coverage_meanload(r)).collect::<mmw::Result<Vec<_>>>()?
            } else if *hybrid {
                analysis_curve(SimMetric::HybridRate, (*link).into(), cfg, &lin)?
            } else {
                analysis_curve(SimMetric::Rate, (*link).into(), cfg, &lin)?
            };
            Ok((value_table(xs, &v), None, None))
        }
        Command::Simulate { metric, link, .. } => {
            let est = simulate(*metric, (*link).into(), file, cfg, &lin)?;
            let mut t = Table::new(vec!["threshold", "value", "ci_low", "ci_high"]);
            let c = &est.curve;
            for (i, (&x, &p)) in xs.iter().zip(&c.probabilities).enumerate() {
                t.push(vec![Some(x), Some(p), ci(&c.ci_low, i), ci(&c.ci_high, i)]);
            }
            Ok((t, None, None))
        }
        Command::Validate { metric, link, .. } => {
            let ana = analysis_curve(*metric, (*link).into(), cfg, &lin)?;
            let est = simulate(*metric, (*link).into(), file, cfg, &lin)?;
            let c = &est.curve;
            let mut t = Table::new(vec!["threshold", "analysis", "simulation", "ci_low", "ci_high"]);
            for i in 0..xs.len() {
                t.push(vec![Some(xs[i]), Some(ana[i]), Some(c.probabilities[i]), ci(&c.ci_low, i), ci(&c.ci_high, i)]);
            }
            let dev = ana.iter().zip(&c.probabilities).map(|(a, s)| (a - s).abs()).fold(0.0, f64::max);
            Ok((t, Some(dev), None))
        }
        Command::Contour { target_mbps, .. } => {
            let dens: Vec<f64> = lin.iter().map(|&l| per_km2_to_per_m2(l)).collect();
            let pts = median_rate_contour(&cfg.net, target_mbps * 1e6, &dens)?;
            let mut t = Table::new(vec!["bs_density_per_km2", "abs_fraction"]);
            for (x, p) in xs.iter().zip(&pts) {
                t.push(vec![Some(*x), p.abs_fraction]);
            }
            let none = pts.iter().all(|p| p.abs_fraction.is_none());
            Ok((t, None, none.then(|| format!("no BS density on the grid reaches a median rate of {target_mbps} Mbps"))))
        }
        Command::Saturation { delta, rate_mbps, .. } => {
            let rows = lin
                .par_iter()
                .map(|&g| match saturation_density(&cfg.net, &SaturationQuery::new(per_km2_to_per_m2(g), *delta, rate_mbps * 1e6)) {
                    Ok(d) => Ok(Some(per_m2_to_per_km2(d))),
                    Err(mmw::Error::NoSolution(_)) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<mmw::Result<Vec<_>>>()?;
            let mut t = Table::new(vec!["abs_density_per_km2", "saturation_density_per_km2"]);
            for (x, d) in xs.iter().zip(&rows) {
                t.push(vec![Some(*x), *d]);
            }
            let none = rows.iter().all(Option::is_none);
            Ok((t, None, none.then(|| "no A-BS density on the grid saturates within the search range".to_string())))
        }
        Command::FitBlockage { buildings, samples, .. } => {
            let path = buildings
                .clone()
                .or_else(|| file.sim.buildings.as_ref().map(PathBuf::from))
                .ok_or_else(|| CliError::Config("fit-blockage needs --buildings or sim.buildings".into()))?;
            let set = read_buildings(&path)?;
            let fits = fit_blockage(&set, &lin, *samples, cfg.sim.seed, PolarSampling::default())?;
            let mut t = Table::new(vec!["ball_radius_m", "los_inside", "std_error"]);
            for (x, f) in xs.iter().zip(&fits) {
                t.push(vec![Some(*x), Some(f.c_estimate), Some(f.std_error)]);
            }
            Ok((t, None, None))
        }
    }
}

fn ci(v: &Option<Vec<f64>>, i: usize) -> Option<f64> {
    v.as_ref().map(|v| v[i])
}

fn mbps(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| x * 1e6).collect()
}

fn value_table(xs: &[f64], v: &[f64]) -> Table {
    let mut t = Table::new(vec!["threshold", "value"]);
    for (x, p) in xs.iter().zip(v) {
        t.push(vec![Some(*x), Some(*p)]);
    }
    t
}

fn models(cfg: &Resolved) -> Result<(PropagationModel, PropagationModel), CliError> {
    Ok((cfg.net.access_model()?, cfg.net.backhaul_model()?))
}

/// Analytical CCDF of `metric` on linear thresholds (bits/s for rates).
fn analysis_curve(metric: SimMetric, kind: LinkKind, cfg: &Resolved, lin: &[f64]) -> Result<Vec<f64>, CliError> {
    let net = &cfg.net;
    let radio = &net.radio;
    let (a, b) = models(cfg)?;
    let model = if kind == LinkKind::Backhaul { &b } else { &a };
    let eval = |f: &(dyn Fn(f64) -> mmw::Result<f64> + Sync), xs: &[f64]| xs.par_iter().map(|&x| f(x)).collect::<mmw::Result<Vec<_>>>();
    let v = match metric {
        SimMetric::Snr => eval(&|t| snr_coverage(model, radio, kind, t), lin)?,
        SimMetric::Sinr if !cfg.sim.interference => eval(&|t| snr_coverage(model, radio, kind, t), lin)?,
        SimMetric::Sinr => {
            let opts = SinrOptions {
                fading: cfg.sim.fading,
                thinning_user_density: cfg.sim.activity_thinning.then_some(net.user_density),
                ..SinrOptions::default()
            };
            let gains = radio.interferer_gains(kind);
            eval(&|t| sinr_coverage(model, radio, kind, &gains, t, &opts), lin)?
        }
        SimMetric::Inr => {
            let gains = radio.interferer_gains(kind);
            eval(&|y| inr_bound_ccdf(model, radio, kind, &gains, y, &InversionConfig::default()), lin)?
        }
        SimMetric::FpcSnr => {
            if kind != LinkKind::Uplink {
                return Err(CliError::Config("power control applies to the uplink only".into()));
            }
            eval(&|t| uplink_fpc_coverage(&a, radio, &cfg.fpc, t), lin)?
        }
        SimMetric::Rate => {
            let ra = RateAnalysis::new(&a, &b, radio, &net.load_model()?, &net.rate_config_for(kind))?;
            eval(&|r| ra.coverage(r), &mbps(lin))?
        }
        SimMetric::HybridRate => {
            if kind != LinkKind::Downlink {
                return Err(CliError::Config("hybrid offloading is modelled on the downlink only".into()));
            }
            let h = HybridAnalysis::new(&a, &b, radio, &net.load_model()?, &net.rate_config(), &cfg.hybrid)?;
            eval(&|r| h.coverage(r), &mbps(lin))?
        }
    };
    Ok(v)
}

fn simulate(
    metric: SimMetric,
    kind: LinkKind,
    file: &FileConfig,
    cfg: &Resolved,
    lin: &[f64],
) -> Result<mmw::simulator::Estimate, CliError> {
    let (m, thresholds) = match metric {
        SimMetric::Snr => (Metric::Snr, lin.to_vec()),
        SimMetric::Sinr => (Metric::Sinr, lin.to_vec()),
        SimMetric::Inr => (Metric::Inr, lin.to_vec()),
        SimMetric::FpcSnr => (Metric::FpcSnr(cfg.fpc), lin.to_vec()),
        SimMetric::Rate => (Metric::Rate, mbps(lin)),
        SimMetric::HybridRate => (Metric::HybridRate(cfg.hybrid), mbps(lin)),
    };
    let buildings = match cfg.sim.blockage_source {
        BlockageSource::Stochastic => None,
        BlockageSource::Polygons => {
            let path = file.sim.buildings.as_ref().ok_or_else(|| CliError::Config("polygon blockage needs sim.buildings".into()))?;
            Some(read_buildings(&PathBuf::from(path))?)
        }
    };
    Ok(estimate_ccdf(&m, kind, &cfg.net, &cfg.sim, &thresholds, buildings.as_ref())?)
}

fn read_buildings(path: &std::path::Path) -> Result<BuildingSet, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(BuildingSet::from_geojson(&text)?)
}

/// Internal-unit view echoed into the sidecar.
fn resolved_json(cfg: &Resolved) -> serde_json::Value {
    let n = &cfg.net;
    let r = &n.radio;
    json!({
        "user_density_per_m2": n.user_density,
        "bs_density_per_m2": n.bs_density,
        "abs_fraction": n.abs_fraction,
        "min_mcs_snr": n.min_mcs_snr,
        "bs_power_mw": r.p_bs,
        "ue_power_mw": r.p_ue,
        "bandwidth_hz": r.bandwidth,
        "noise_power_mw": r.noise_power(),
        "max_gain": r.g_max,
        "min_gain": r.g_min,
        "beamwidth_rad": r.beamwidth,
        "carrier_hz": r.carrier_hz,
        "uhf_density_per_m2": cfg.hybrid.uhf_density,
        "uhf_power_mw": cfg.hybrid.uhf_power,
        "offload_threshold": cfg.hybrid.offload_threshold,
        "fpc_p0_mw": cfg.fpc.p0,
        "fpc_epsilon": cfg.fpc.epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_precedence() {
        let default = GridSpec::range(0.0, 1.0, 3, Scale::Linear);
        let from_file = GridSpec { values: Some(vec![5.0, 6.0]), ..default.clone() };
        let none = GridArgs::default();
        assert_eq!(effective_grid(default.clone(), None, &none), default);
        assert_eq!(effective_grid(default.clone(), Some(&from_file), &none).values().unwrap(), vec![5.0, 6.0]);
        let flags = GridArgs { points: Some(2), ..GridArgs::default() };
        assert_eq!(effective_grid(default, Some(&from_file), &flags).values().unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn cli_parses() {
        let cli =
            Cli::try_parse_from(["mmw", "--threads", "1", "coverage", "--set", "radio.beamwidth_deg=5", "--values", "-5,0,5"]).unwrap();
        assert_eq!(cli.threads, 1);
        assert_eq!(cli.command.name(), "coverage");
        assert_eq!(cli.command.common().grid.values, Some(vec![-5.0, 0.0, 5.0]));
        assert!(Cli::try_parse_from(["mmw", "frobnicate"]).is_err());
        assert!(Cli::try_parse_from(["mmw", "rate", "--meanload", "--hybrid"]).is_err());
    }
}
