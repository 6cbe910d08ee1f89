//! JSON documents and CSV artifacts.
//!
//! CSV files start with `# key: value` comment lines describing the run, then
//! a column header row, then one row per record. Floats are written in
//! shortest round-trip form so re-reading reproduces them bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use twoway_core::model::Cell;
use twoway_core::search::Objective;
use twoway_core::{Constellation, Point, RegionPolygon, SweepResult, UdReport, UniformQuantizer};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstellationDoc {
    pub points: Vec<[f64; 2]>,
    /// When present the points are rescaled to this average power.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<f64>,
}

impl ConstellationDoc {
    pub fn from_constellation(c: &Constellation) -> Self {
        ConstellationDoc {
            points: c.points().iter().map(|p| [p.re, p.im]).collect(),
            power: Some(c.power()),
        }
    }

    pub fn build(&self) -> twoway_core::Result<Constellation> {
        let pts: Vec<Point> = self.points.iter().map(|&[re, im]| Point::new(re, im)).collect();
        match self.power {
            Some(p) => Constellation::with_power(pts, p),
            None => Constellation::new(pts),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizerDoc {
    pub levels: usize,
    /// Zero for a 1-D quantizer.
    #[serde(default)]
    pub levels2: usize,
    pub grain: f64,
}

impl From<&UniformQuantizer> for QuantizerDoc {
    fn from(q: &UniformQuantizer) -> Self {
        QuantizerDoc { levels: q.levels(), levels2: q.levels2(), grain: q.grain() }
    }
}

impl QuantizerDoc {
    pub fn build(&self) -> twoway_core::Result<UniformQuantizer> {
        UniformQuantizer::new(self.levels, self.levels2, self.grain)
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| CliError::format(path, e))
}

pub fn read_constellation(path: &Path) -> Result<Constellation> {
    let doc: ConstellationDoc = read_json(path)?;
    doc.build().map_err(|e| CliError::format(path, e))
}

pub fn read_quantizer(path: &Path) -> Result<UniformQuantizer> {
    let doc: QuantizerDoc = read_json(path)?;
    doc.build().map_err(|e| CliError::format(path, e))
}

/// Writes pretty JSON to `path`, or to stdout when `path` is `None`.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("artifact documents always serialize");
    emit(path, |w| writeln!(w, "{text}"))
}

fn emit(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::io(p, e))?;
            let mut w = BufWriter::new(file);
            body(&mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(p, e))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match body(&mut lock) {
                // a closed pipe (`| head`) is the reader's choice, not a failure
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other.map_err(|e| CliError::io("<stdout>", e)),
            }
        }
    }
}

/// A numeric table with a self-describing comment header.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvArtifact {
    pub header: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvArtifact {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        CsvArtifact {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    pub fn note(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.header.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (k, v) in &self.header {
            writeln!(w, "# {k}: {v}")?;
        }
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row.iter().map(|v| v.to_string()))?;
        }
        out.flush()
    }

    /// Writes to `path`, or to stdout when `path` is `None`.
    pub fn save(&self, path: Option<&Path>) -> Result<()> {
        emit(path, |w| self.write_to(w))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        Self::read_from(BufReader::new(file)).map_err(|e| CliError::format(path, e))
    }

    pub fn read_from<R: BufRead>(r: R) -> std::result::Result<Self, String> {
        let mut text = String::new();
        let mut r = r;
        r.read_to_string(&mut text).map_err(|e| e.to_string())?;
        let header = text
            .lines()
            .take_while(|l| l.starts_with('#'))
            .map(|l| {
                let body = l.trim_start_matches('#').trim_start();
                match body.split_once(": ") {
                    Some((k, v)) => (k.to_string(), v.to_string()),
                    None => (body.to_string(), String::new()),
                }
            })
            .collect();
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let columns = reader
            .headers()
            .map_err(|e| e.to_string())?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| e.to_string())?;
            let row = record
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| format!("{f:?}: {e}")))
                .collect::<std::result::Result<Vec<f64>, String>>()?;
            rows.push(row);
        }
        Ok(CsvArtifact { header, columns, rows })
    }
}

fn objective_name(o: Objective) -> &'static str {
    match o {
        Objective::FirstRate => "first_rate",
        Objective::SumRate => "sum_rate",
    }
}

/// One row per grid point: parameter, `r1`, `r2`, objective value.
pub fn sweep_csv(sweep: &SweepResult, parameter: &str) -> CsvArtifact {
    let mut out = CsvArtifact::new([parameter, "r1", "r2", "objective"]);
    out.note("objective", objective_name(sweep.objective));
    out.note("argmax", sweep.argmax());
    out.note("best_value", sweep.best_value());
    for (x, r) in sweep.grid.iter().zip(&sweep.rates) {
        out.push(vec![*x, r.r1, r.r2, sweep.objective.eval(r)]);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub x: f64,
    pub r1: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDoc {
    pub parameter: String,
    pub objective: String,
    pub argmax: f64,
    pub best_value: f64,
    pub points: Vec<SweepPoint>,
}

impl SweepDoc {
    pub fn new(sweep: &SweepResult, parameter: &str) -> Self {
        SweepDoc {
            parameter: parameter.to_string(),
            objective: objective_name(sweep.objective).to_string(),
            argmax: sweep.argmax(),
            best_value: sweep.best_value(),
            points: sweep
                .grid
                .iter()
                .zip(&sweep.rates)
                .map(|(&x, r)| SweepPoint { x, r1: r.r1, r2: r.r2 })
                .collect(),
        }
    }
}

/// One row per vertex, counterclockwise.
pub fn region_csv(region: &RegionPolygon) -> CsvArtifact {
    let mut out = CsvArtifact::new(["r1", "r2"]);
    out.note("area", region.area());
    for &(x, y) in region.vertices() {
        out.push(vec![x, y]);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDoc {
    pub vertices: Vec<[f64; 2]>,
    pub area: f64,
}

impl From<&RegionPolygon> for RegionDoc {
    fn from(r: &RegionPolygon) -> Self {
        RegionDoc {
            vertices: r.vertices().iter().map(|&(x, y)| [x, y]).collect(),
            area: r.area(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionDoc {
    pub receiver: u8,
    /// Constellation indices `(user 1, user 2)`, zero-based.
    pub first: [usize; 2],
    pub second: [usize; 2],
    /// 1-based cell, one entry per quantizer dimension.
    pub cell: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UdReportDoc {
    pub is_ud: bool,
    pub distinct_outputs: [usize; 2],
    pub collisions: Vec<CollisionDoc>,
}

impl From<&UdReport> for UdReportDoc {
    fn from(r: &UdReport) -> Self {
        UdReportDoc {
            is_ud: r.is_ud,
            distinct_outputs: r.distinct_outputs,
            collisions: r
                .collisions
                .iter()
                .map(|c| CollisionDoc {
                    receiver: c.receiver,
                    first: [c.first.0, c.first.1],
                    second: [c.second.0, c.second.1],
                    cell: match c.cell {
                        Cell::One(m) => vec![m],
                        Cell::Two(m, n) => vec![m, n],
                    },
                })
                .collect(),
        }
    }
}
