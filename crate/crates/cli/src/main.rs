use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use twoway_core::model::DEFAULT_LEVELS;
use twoway_core::search::{default_grain_grid, default_theta_grid};
use twoway_core::Direction;

use twoway::args::{collect_snrs, parse_gains, parse_grid, parse_power, Snr};
use twoway::commands::{
    grain_sweep_cmd, mc_cmd, rotate_sweep, sweep_plot_script, table1, table_plot_script, ud_check_cmd,
    write_rotation, write_text, GrainSweepOptions, InputKind, McOptions, PairOptions, RotateOptions,
    Table1Options,
};
use twoway::formats::{write_json, SweepDoc, UdReportDoc};
use twoway::{CliError, Result};

/// Achievable rates of the Gaussian two-way channel with quantized outputs.
#[derive(Parser)]
#[command(name = "twoway", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimum rate and grain for Gaussian and 8-PAM inputs at each SNR.
    Table1 {
        #[command(flatten)]
        snr: SnrArgs,
        #[arg(long, default_value_t = DEFAULT_LEVELS)]
        levels: usize,
        /// lo:step:hi
        #[arg(long)]
        grain_grid: Option<String>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// First-link rate against quantizer grain at one SNR.
    GrainSweep {
        /// gaussian, or a real constellation (bpsk, pam4, pam8, file.json).
        #[arg(long, default_value = "gaussian")]
        input: String,
        #[command(flatten)]
        snr: SnrArgs,
        #[arg(long, default_value_t = DEFAULT_LEVELS)]
        levels: usize,
        /// lo:step:hi
        #[arg(long)]
        grain_grid: Option<String>,
        /// Extra grains appended to the grid (repeatable).
        #[arg(long)]
        grain: Vec<f64>,
        #[arg(long, default_value = "1,1,1,1")]
        gains: String,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Rotate user 2's constellation and sweep the sum rate over the angle.
    RotateSweep {
        #[arg(long, default_value = "pam4")]
        constellation: String,
        #[command(flatten)]
        snr: SnrArgs,
        #[arg(long, default_value_t = DEFAULT_LEVELS)]
        levels: usize,
        /// Levels on the imaginary axis; defaults to --levels.
        #[arg(long)]
        levels2: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        grain: f64,
        /// lo:step:hi in degrees.
        #[arg(long, allow_hyphen_values = true)]
        theta_grid: Option<String>,
        #[arg(long, default_value = "1,1,1,1")]
        gains: String,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write gnuplot scripts (needs --out).
        #[arg(long)]
        plot: bool,
    },
    /// Check whether a constellation pair is uniquely decodable.
    UdCheck {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo estimate of one link's rate next to the analytic value.
    Mc {
        /// gaussian, or use the constellation flags.
        #[arg(long)]
        input: Option<String>,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_enum, default_value_t = Dir::OneToTwo)]
        direction: Dir,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SnrArgs {
    /// Linear SNR P/σ² (repeatable).
    #[arg(long = "snr", allow_negative_numbers = true)]
    linear: Vec<f64>,
    /// SNR in dB (repeatable).
    #[arg(long = "snr-db", allow_negative_numbers = true)]
    db: Vec<f64>,
}

impl SnrArgs {
    fn resolve(&self, default: &[f64]) -> Result<Vec<Snr>> {
        if self.linear.is_empty() && self.db.is_empty() {
            collect_snrs(default, &[])
        } else {
            collect_snrs(&self.linear, &self.db)
        }
    }

    fn single(&self) -> Result<Snr> {
        let all = self.resolve(&[1.0])?;
        match all[..] {
            [s] => Ok(s),
            _ => Err(CliError::arg("--snr", "this command takes a single SNR")),
        }
    }
}

#[derive(Args)]
struct OutArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a gnuplot script next to --out.
    #[arg(long)]
    plot: bool,
}

impl OutArgs {
    fn plot_path(&self) -> Result<Option<PathBuf>> {
        match (&self.out, self.plot) {
            (_, false) => Ok(None),
            (Some(p), true) => Ok(Some(p.with_extension("gp"))),
            (None, true) => Err(CliError::arg("--plot", "needs --out")),
        }
    }
}

#[derive(Args)]
struct PairArgs {
    #[arg(long, default_value = "bpsk")]
    constellation: String,
    /// User 2's constellation; defaults to --constellation.
    #[arg(long)]
    constellation2: Option<String>,
    /// Rotation of user 2 in degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta: f64,
    #[command(flatten)]
    snr: SnrArgs,
    /// P1,P2 (cannot be combined with an SNR).
    #[arg(long, conflicts_with_all = ["linear", "db"])]
    power: Option<String>,
    #[arg(long, default_value = "1,1,1,1")]
    gains: String,
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    levels: usize,
    /// Levels on the imaginary axis, 0 for a 1-D quantizer; defaults to
    /// --levels when a constellation is complex.
    #[arg(long)]
    levels2: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    grain: f64,
}

impl PairArgs {
    fn options(&self) -> Result<PairOptions> {
        let power = match &self.power {
            Some(p) => parse_power(p)?,
            None => {
                let s = self.snr.single()?.linear;
                [s, s]
            }
        };
        Ok(PairOptions {
            constellation: self.constellation.clone(),
            constellation2: self.constellation2.clone().unwrap_or_else(|| self.constellation.clone()),
            theta: self.theta,
            power,
            gains: parse_gains(&self.gains)?,
            levels: self.levels,
            levels2: self.levels2,
            grain: self.grain,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Dir {
    #[value(name = "1to2")]
    OneToTwo,
    #[value(name = "2to1")]
    TwoToOne,
}

fn grain_grid(text: &Option<String>) -> Result<Vec<f64>> {
    match text {
        Some(t) => parse_grid("--grain-grid", t),
        None => Ok(default_grain_grid()),
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Table1 { snr, levels, grain_grid: grid, out } => {
            let opts = Table1Options {
                snrs: snr.resolve(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0])?,
                levels,
                grain_grid: grain_grid(&grid)?,
            };
            let plot = out.plot_path()?;
            table1(&opts)?.save(out.out.as_deref())?;
            if let (Some(gp), Some(data)) = (plot, &out.out) {
                write_text(&gp, &table_plot_script(data))?;
            }
        }
        Command::GrainSweep { input, snr, levels, grain_grid: grid, grain, gains, out } => {
            let mut q = grain_grid(&grid)?;
            q.extend(grain);
            let opts = GrainSweepOptions {
                input: InputKind::parse(&input),
                snr: snr.single()?,
                gains: parse_gains(&gains)?,
                levels,
                grain_grid: q,
            };
            let plot = out.plot_path()?;
            let (sweep, csv) = grain_sweep_cmd(&opts)?;
            match &out.out {
                Some(p) if is_json(p) => write_json(&SweepDoc::new(&sweep, "grain"), Some(p))?,
                other => csv.save(other.as_deref())?,
            }
            if let (Some(gp), Some(data)) = (plot, &out.out) {
                write_text(&gp, &sweep_plot_script(data, "grain q"))?;
            }
        }
        Command::RotateSweep { constellation, snr, levels, levels2, grain, theta_grid, gains, out, plot } => {
            if plot && out.is_none() {
                return Err(CliError::arg("--plot", "needs --out"));
            }
            let opts = RotateOptions {
                constellation,
                snrs: snr.resolve(&[1.0])?,
                gains: parse_gains(&gains)?,
                levels,
                levels2: levels2.unwrap_or(levels),
                grain,
                theta_grid: match theta_grid {
                    Some(t) => parse_grid("--theta-grid", &t)?,
                    None => default_theta_grid(),
                },
            };
            let outcomes = rotate_sweep(&opts)?;
            write_rotation(&opts, &outcomes, out.as_deref(), plot)?;
        }
        Command::UdCheck { pair, out } => {
            let report = ud_check_cmd(&pair.options()?)?;
            write_json(&UdReportDoc::from(&report), out.as_deref())?;
        }
        Command::Mc { input, pair, direction, samples, seed, out } => {
            let input = match input {
                Some(s) => InputKind::parse(&s),
                None => InputKind::Discrete(pair.constellation.clone()),
            };
            let opts = McOptions {
                input,
                pair: pair.options()?,
                direction: match direction {
                    Dir::OneToTwo => Direction::OneToTwo,
                    Dir::TwoToOne => Direction::TwoToOne,
                },
                samples,
                seed,
            };
            write_json(&mc_cmd(&opts)?, out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let record = serde_json::to_string(&e.record()).unwrap_or_else(|_| format!("{{\"error\":\"{e}\"}}"));
            eprintln!("{record}");
            ExitCode::FAILURE
        }
    }
}
