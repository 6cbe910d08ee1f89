//! The computations behind each subcommand, separated from flag parsing so
//! they can be driven directly in tests.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use twoway_core::oracle::{mc_cond_mi, mc_cond_mi_gaussian, McEstimate};
use twoway_core::search::{achievable_region, grain_sweep, rotation_sweep, ud_check};
use twoway_core::{
    cond_mi_discrete, cond_mi_gaussian, rate_pair_discrete, ChannelConfig, Constellation, Direction,
    RatePair, RegionPolygon, SweepResult, UdReport, UniformQuantizer, DEFAULT_QUAD_ORDER,
};

use crate::args::{channel, constellation, Snr};
use crate::error::{CliError, Result};
use crate::formats::{region_csv, sweep_csv, write_json, CsvArtifact, QuantizerDoc, RegionDoc};

/// Slack for the region containment check.
const CONTAINMENT_TOL: f64 = 1e-12;

fn gains_text(g: [f64; 4]) -> String {
    format!("{},{},{},{}", g[0], g[1], g[2], g[3])
}

fn grid_text(grid: &[f64]) -> String {
    grid.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

/// Sorted, duplicate-free copy of a grid.
pub fn normalize_grid(mut grid: Vec<f64>) -> Vec<f64> {
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Number of grid points whose value strictly exceeds every neighbour.
pub fn local_maxima(values: &[f64]) -> usize {
    (0..values.len())
        .filter(|&i| {
            let left = i == 0 || values[i] > values[i - 1];
            let right = i + 1 == values.len() || values[i] > values[i + 1];
            left && right
        })
        .count()
}

/// What drives the user-1 link in a single-link sweep.
#[derive(Debug, Clone, PartialEq)]
pub enum InputKind {
    Gaussian,
    /// The same real constellation at both users.
    Discrete(String),
}

impl InputKind {
    pub fn parse(text: &str) -> Self {
        if text.eq_ignore_ascii_case("gaussian") {
            InputKind::Gaussian
        } else {
            InputKind::Discrete(text.to_string())
        }
    }

    fn name(&self) -> &str {
        match self {
            InputKind::Gaussian => "gaussian",
            InputKind::Discrete(s) => s,
        }
    }
}

fn first_rate_sweep(input: &InputKind, cfg: &ChannelConfig, levels: usize, grid: &[f64]) -> Result<SweepResult> {
    let sweep = match input {
        InputKind::Gaussian => grain_sweep(
            |q| Ok(RatePair::new(cond_mi_gaussian(cfg, &UniformQuantizer::one_dim(levels, q)?, DEFAULT_QUAD_ORDER)?, 0.0)),
            grid,
        )?,
        InputKind::Discrete(spec) => {
            let c = constellation(spec, cfg.p1)?;
            if !c.is_real() {
                return Err(CliError::arg("--input", format!("{spec} is not a real constellation")));
            }
            grain_sweep(
                |q| {
                    let qz = UniformQuantizer::one_dim(levels, q)?;
                    Ok(RatePair::new(cond_mi_discrete(Direction::OneToTwo, &c, &c, cfg, &qz)?, 0.0))
                },
                grid,
            )?
        }
    };
    Ok(sweep)
}

pub struct Table1Options {
    pub snrs: Vec<Snr>,
    pub levels: usize,
    pub grain_grid: Vec<f64>,
}

/// Optimum first-link rate and grain for Gaussian and 8-PAM inputs per SNR.
pub fn table1(opts: &Table1Options) -> Result<CsvArtifact> {
    if opts.snrs.is_empty() {
        return Err(CliError::arg("--snr", "at least one SNR is required"));
    }
    let grid = normalize_grid(opts.grain_grid.clone());
    let mut out = CsvArtifact::new(["snr", "gaussian_r1", "gaussian_grain", "pam_r1", "pam_grain"]);
    out.note("command", "table1")
        .note("gains", "1,1,1,1")
        .note("noise_var", 1)
        .note("levels", opts.levels)
        .note("pam_points", 8)
        .note("quad_order", DEFAULT_QUAD_ORDER)
        .note("grain_grid", grid_text(&grid));
    for snr in &opts.snrs {
        let cfg = ChannelConfig::symmetric(snr.linear)?;
        let g = first_rate_sweep(&InputKind::Gaussian, &cfg, opts.levels, &grid)?;
        let p = first_rate_sweep(&InputKind::Discrete("pam8".into()), &cfg, opts.levels, &grid)?;
        out.push(vec![snr.linear, g.best_rate().r1, g.argmax(), p.best_rate().r1, p.argmax()]);
    }
    Ok(out)
}

pub struct GrainSweepOptions {
    pub input: InputKind,
    pub snr: Snr,
    pub gains: [f64; 4],
    pub levels: usize,
    pub grain_grid: Vec<f64>,
}

pub fn grain_sweep_cmd(opts: &GrainSweepOptions) -> Result<(SweepResult, CsvArtifact)> {
    let grid = normalize_grid(opts.grain_grid.clone());
    let cfg = channel(opts.gains, opts.snr.linear, opts.snr.linear)?;
    let sweep = first_rate_sweep(&opts.input, &cfg, opts.levels, &grid)?;
    let mut out = sweep_csv(&sweep, "grain");
    out.note("command", "grain-sweep")
        .note("input", opts.input.name())
        .note("snr", opts.snr.linear)
        .note("gains", gains_text(opts.gains))
        .note("noise_var", 1)
        .note("levels", opts.levels)
        .note("local_maxima", local_maxima(&sweep.values()));
    if opts.input == InputKind::Gaussian {
        out.note("quad_order", DEFAULT_QUAD_ORDER);
    }
    Ok((sweep, out))
}

pub struct RotateOptions {
    pub constellation: String,
    pub snrs: Vec<Snr>,
    pub gains: [f64; 4],
    pub levels: usize,
    pub levels2: usize,
    pub grain: f64,
    pub theta_grid: Vec<f64>,
}

pub struct RotationOutcome {
    pub snr: Snr,
    pub sweep: SweepResult,
    pub unrotated: RatePair,
    pub with_rotation: RegionPolygon,
    pub without_rotation: RegionPolygon,
}

impl RotationOutcome {
    pub fn contained(&self) -> bool {
        self.with_rotation.contains_polygon(&self.without_rotation, CONTAINMENT_TOL)
    }
}

pub fn rotate_sweep(opts: &RotateOptions) -> Result<Vec<RotationOutcome>> {
    if opts.snrs.is_empty() {
        return Err(CliError::arg("--snr", "at least one SNR is required"));
    }
    let qz = UniformQuantizer::new(opts.levels, opts.levels2, opts.grain)?;
    opts.snrs
        .iter()
        .map(|snr| {
            let cfg = channel(opts.gains, snr.linear, snr.linear)?;
            let c = constellation(&opts.constellation, snr.linear)?;
            let sweep = rotation_sweep(&c, &cfg, &qz, &opts.theta_grid)?;
            let with_rotation = achievable_region(&sweep.rates)?;
            let unrotated = rate_pair_discrete(&c, &c, &cfg, &qz)?;
            let without_rotation = achievable_region(&[unrotated])?;
            Ok(RotationOutcome { snr: *snr, sweep, unrotated, with_rotation, without_rotation })
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct RotationSummary {
    snr: f64,
    snr_db: Option<f64>,
    theta_star: f64,
    rates_at_theta_star: [f64; 2],
    rates_without_rotation: [f64; 2],
    region_contains_unrotated: bool,
    sweep_csv: String,
    with_rotation: RegionDoc,
    without_rotation: RegionDoc,
}

#[derive(Debug, Serialize)]
struct RotateReport {
    constellation: String,
    gains: [f64; 4],
    noise_var: f64,
    quantizer: QuantizerDoc,
    theta_grid: Vec<f64>,
    results: Vec<RotationSummary>,
}

/// Writes per-SNR sweep and region CSVs plus `summary.json` into `dir`
/// (the summary alone goes to stdout when `dir` is `None`).
pub fn write_rotation(opts: &RotateOptions, outcomes: &[RotationOutcome], dir: Option<&Path>, plot: bool) -> Result<()> {
    if let Some(d) = dir {
        fs::create_dir_all(d).map_err(|e| CliError::io(d, e))?;
    }
    let qz = UniformQuantizer::new(opts.levels, opts.levels2, opts.grain)?;
    let mut results = Vec::new();
    for o in outcomes {
        let label = o.snr.label();
        let sweep_name = format!("sweep_{label}.csv");
        if let Some(d) = dir {
            let mut csv = sweep_csv(&o.sweep, "theta_deg");
            csv.note("command", "rotate-sweep")
                .note("constellation", &opts.constellation)
                .note("snr", o.snr.linear)
                .note("gains", gains_text(opts.gains))
                .note("noise_var", 1)
                .note("levels", opts.levels)
                .note("levels2", opts.levels2)
                .note("grain", opts.grain);
            csv.save(Some(&d.join(&sweep_name)))?;
            region_csv(&o.with_rotation).save(Some(&d.join(format!("region_with_{label}.csv"))))?;
            region_csv(&o.without_rotation).save(Some(&d.join(format!("region_without_{label}.csv"))))?;
            if plot {
                write_text(&d.join(format!("plot_{label}.gp")), &region_plot_script(&label))?;
            }
        }
        let best = o.sweep.best_rate();
        results.push(RotationSummary {
            snr: o.snr.linear,
            snr_db: o.snr.db,
            theta_star: o.sweep.argmax(),
            rates_at_theta_star: [best.r1, best.r2],
            rates_without_rotation: [o.unrotated.r1, o.unrotated.r2],
            region_contains_unrotated: o.contained(),
            sweep_csv: sweep_name,
            with_rotation: RegionDoc::from(&o.with_rotation),
            without_rotation: RegionDoc::from(&o.without_rotation),
        });
    }
    let report = RotateReport {
        constellation: opts.constellation.clone(),
        gains: opts.gains,
        noise_var: 1.0,
        quantizer: QuantizerDoc::from(&qz),
        theta_grid: opts.theta_grid.clone(),
        results,
    };
    let summary: Option<PathBuf> = dir.map(|d| d.join("summary.json"));
    write_json(&report, summary.as_deref())
}

pub struct PairOptions {
    pub constellation: String,
    pub constellation2: String,
    pub theta: f64,
    pub power: [f64; 2],
    pub gains: [f64; 4],
    pub levels: usize,
    /// `None` picks 2-D when either constellation is complex.
    pub levels2: Option<usize>,
    pub grain: f64,
}

pub struct Pair {
    pub c1: Constellation,
    pub c2: Constellation,
    pub cfg: ChannelConfig,
    pub qz: UniformQuantizer,
}

impl PairOptions {
    pub fn build(&self) -> Result<Pair> {
        let c1 = constellation(&self.constellation, self.power[0])?;
        let c2 = constellation(&self.constellation2, self.power[1])?.rotate(self.theta);
        let complex = !(c1.is_real() && c2.is_real());
        let levels2 = self.levels2.unwrap_or(if complex { self.levels } else { 0 });
        let qz = UniformQuantizer::new(self.levels, levels2, self.grain)?;
        let cfg = channel(self.gains, self.power[0], self.power[1])?;
        Ok(Pair { c1, c2, cfg, qz })
    }
}

pub fn ud_check_cmd(opts: &PairOptions) -> Result<UdReport> {
    let p = opts.build()?;
    Ok(ud_check(&p.c1, &p.c2, &p.cfg, &p.qz)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct McReport {
    pub input: String,
    pub direction: String,
    pub analytic: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub bias_guard: f64,
    pub samples: usize,
    pub seed: u64,
    /// Whether the analytic value lies within three standard errors
    /// (plus the bias guard on the plug-in side).
    pub agrees: bool,
}

pub struct McOptions {
    pub input: InputKind,
    pub pair: PairOptions,
    pub direction: Direction,
    pub samples: usize,
    pub seed: u64,
}

fn report(input: &str, direction: Direction, analytic: f64, est: McEstimate) -> McReport {
    McReport {
        input: input.to_string(),
        direction: match direction {
            Direction::OneToTwo => "1to2",
            Direction::TwoToOne => "2to1",
        }
        .to_string(),
        analytic,
        estimate: est.value,
        stderr: est.stderr,
        bias_guard: est.bias_guard,
        samples: est.samples,
        seed: est.seed,
        agrees: est.agrees_with(analytic, 3.0),
    }
}

pub fn mc_cmd(opts: &McOptions) -> Result<McReport> {
    match &opts.input {
        InputKind::Gaussian => {
            let pair = &opts.pair;
            let qz = UniformQuantizer::new(pair.levels, pair.levels2.unwrap_or(0), pair.grain)?;
            let cfg = channel(pair.gains, pair.power[0], pair.power[1])?;
            let cfg = match opts.direction {
                Direction::OneToTwo => cfg,
                Direction::TwoToOne => cfg.swapped(),
            };
            let analytic = cond_mi_gaussian(&cfg, &qz, DEFAULT_QUAD_ORDER)?;
            let est = mc_cond_mi_gaussian(&cfg, &qz, opts.samples, opts.seed)?;
            Ok(report("gaussian", opts.direction, analytic, est))
        }
        InputKind::Discrete(_) => {
            let p = opts.pair.build()?;
            let analytic = cond_mi_discrete(opts.direction, &p.c1, &p.c2, &p.cfg, &p.qz)?;
            let est = mc_cond_mi(opts.direction, &p.c1, &p.c2, &p.cfg, &p.qz, opts.samples, opts.seed)?;
            Ok(report(&opts.pair.constellation, opts.direction, analytic, est))
        }
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// gnuplot script for a two-column-plus sweep CSV.
pub fn sweep_plot_script(data: &Path, xlabel: &str) -> String {
    let name = data.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    format!(
        "set datafile separator ','\nset key bottom right\nset xlabel '{xlabel}'\nset ylabel 'rate (bits/use)'\n\
         plot '{name}' using 1:2 skip 1 with linespoints title 'r1'\n"
    )
}

pub fn table_plot_script(data: &Path) -> String {
    let name = data.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    format!(
        "set datafile separator ','\nset key bottom right\nset xlabel 'SNR'\nset ylabel 'rate (bits/use)'\n\
         plot '{name}' using 1:2 skip 1 with linespoints title 'Gaussian', \\\n     \
         '{name}' using 1:4 skip 1 with linespoints title '8-PAM'\n"
    )
}

fn region_plot_script(label: &str) -> String {
    format!(
        "set datafile separator ','\nset xlabel 'r1'\nset ylabel 'r2'\nset size square\n\
         plot 'region_with_{label}.csv' using 1:2 skip 1 with lines dt 2 title 'with rotation', \\\n     \
         'region_without_{label}.csv' using 1:2 skip 1 with lines title 'without rotation'\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_maxima_counts_strict_peaks() {
        assert_eq!(local_maxima(&[1.0, 2.0, 3.0, 2.0, 1.0]), 1);
        assert_eq!(local_maxima(&[3.0, 2.0, 3.0]), 2);
        assert_eq!(local_maxima(&[1.0, 1.0, 1.0]), 0);
        assert_eq!(local_maxima(&[5.0]), 1);
    }

    #[test]
    fn grids_are_sorted_and_deduplicated() {
        assert_eq!(normalize_grid(vec![2.0, 0.5, 2.0, 1.0]), vec![0.5, 1.0, 2.0]);
    }

    #[test]
    fn pair_picks_dimension_from_constellations() {
        let mut opts = PairOptions {
            constellation: "bpsk".into(),
            constellation2: "bpsk".into(),
            theta: 0.0,
            power: [1.0, 1.0],
            gains: [1.0; 4],
            levels: 8,
            levels2: None,
            grain: 1.0,
        };
        assert!(!opts.build().unwrap().qz.is_2d());
        opts.theta = 90.0;
        assert!(opts.build().unwrap().qz.is_2d());
        opts.levels2 = Some(0);
        assert!(ud_check_cmd(&opts).is_err());
    }
}
