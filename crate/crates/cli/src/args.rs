//! Parsers for the compact flag values: grids, gain tuples, power pairs,
//! SNR lists and constellation names.

use std::path::Path;

use twoway_core::model::db_to_linear;
use twoway_core::search::linear_grid;
use twoway_core::{ChannelConfig, Constellation};

use crate::error::{CliError, Result};
use crate::formats::read_constellation;

/// `lo:step:hi`, inclusive at both ends.
pub fn parse_grid(flag: &'static str, text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, step, hi] = parts[..] else {
        return Err(CliError::arg(flag, format!("expected lo:step:hi, got {text:?}")));
    };
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|e| CliError::arg(flag, format!("{s:?}: {e}")))
    };
    linear_grid(num(lo)?, num(step)?, num(hi)?).map_err(|e| CliError::arg(flag, e.to_string()))
}

fn parse_list<const N: usize>(flag: &'static str, text: &str) -> Result<[f64; N]> {
    let values = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CliError::arg(flag, format!("{s:?}: {e}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    values
        .try_into()
        .map_err(|v: Vec<f64>| CliError::arg(flag, format!("expected {N} comma-separated values, got {}", v.len())))
}

/// `a,b,c,d`.
pub fn parse_gains(text: &str) -> Result<[f64; 4]> {
    parse_list::<4>("--gains", text)
}

/// `P1,P2`.
pub fn parse_power(text: &str) -> Result<[f64; 2]> {
    let p = parse_list::<2>("--power", text)?;
    if p.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(CliError::arg("--power", "powers must be positive"));
    }
    Ok(p)
}

/// An SNR with the unit it was given in, kept for labels and headers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snr {
    pub linear: f64,
    pub db: Option<f64>,
}

impl Snr {
    pub fn label(&self) -> String {
        match self.db {
            Some(db) => format!("{db}dB"),
            None => format!("snr{}", self.linear),
        }
    }
}

/// Merges `--snr` (linear) and `--snr-db` values, rejecting nonpositive SNRs.
pub fn collect_snrs(linear: &[f64], db: &[f64]) -> Result<Vec<Snr>> {
    let mut out = Vec::with_capacity(linear.len() + db.len());
    for &s in linear {
        if !(s.is_finite() && s > 0.0) {
            return Err(CliError::arg("--snr", format!("SNR must be positive, got {s}")));
        }
        out.push(Snr { linear: s, db: None });
    }
    for &d in db {
        if !d.is_finite() {
            return Err(CliError::arg("--snr-db", format!("SNR must be finite, got {d}")));
        }
        out.push(Snr { linear: db_to_linear(d), db: Some(d) });
    }
    Ok(out)
}

/// Unit-noise channel at the given powers.
pub fn channel(gains: [f64; 4], p1: f64, p2: f64) -> Result<ChannelConfig> {
    Ok(ChannelConfig::new(gains, 1.0, p1, p2)?)
}

/// `pam4`, `pam8`, `qpsk`, `bpsk`, or a path to a constellation JSON document.
///
/// Named constellations are built at `power`; a file keeps its own points
/// unless it states a power.
pub fn constellation(spec: &str, power: f64) -> Result<Constellation> {
    let built = match spec.to_ascii_lowercase().as_str() {
        "bpsk" => Constellation::pam(2, power),
        "pam4" => Constellation::pam(4, power),
        "pam8" => Constellation::pam(8, power),
        "qpsk" => Constellation::psk(4, power, 45.0),
        _ => {
            let path = Path::new(spec);
            if !path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
                return Err(CliError::arg(
                    "--constellation",
                    format!("unknown constellation {spec:?} (expected pam4, pam8, qpsk, bpsk or a .json file)"),
                ));
            }
            return read_constellation(path);
        }
    };
    Ok(built?)
}
