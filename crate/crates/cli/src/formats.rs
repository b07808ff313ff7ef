//! Schedule and report files.
//!
//! A schedule file is a CSV whose first line is `# ` followed by a JSON
//! header; floats are written in shortest round-trip form so a file read
//! back reproduces every sample bit for bit.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;

use lrpulse_core::{
    strategy_a, strategy_b, strategy_c, Carriers, Drive, DriveSample, PulseSchedule, Strategy,
    TransferReport,
};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

pub const SCHEDULE_COLUMNS: [&str; 6] =
    ["t", "re_omega_p", "im_omega_p", "re_omega_s", "im_omega_s", "delta"];

/// Strategy parameters as stored in a schedule header.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "lowercase")]
pub enum ScheduleParams {
    A { a: f64, period: f64 },
    B { b: f64, period: f64, delta_t_over_t: f64, neglect_imag: bool },
    C { omega0: f64, n_periods: usize },
}

impl ScheduleParams {
    pub fn of(strategy: Strategy) -> Self {
        match strategy {
            Strategy::Smooth { a, period } => ScheduleParams::A { a, period },
            Strategy::Singular { b, period, delta_t_over_period, neglect_imag } => {
                ScheduleParams::B { b, period, delta_t_over_t: delta_t_over_period, neglect_imag }
            }
            Strategy::Reverse { omega0, n_periods } => ScheduleParams::C { omega0, n_periods },
        }
    }

    pub fn build(&self, omega: f64) -> CliResult<PulseSchedule> {
        Ok(match *self {
            ScheduleParams::A { a, period } => strategy_a(a, omega, period)?,
            ScheduleParams::B { b, period, delta_t_over_t, neglect_imag } => {
                strategy_b(b, omega, period, delta_t_over_t, neglect_imag)?
            }
            ScheduleParams::C { omega0, n_periods } => strategy_c(omega0, omega, n_periods)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleHeader {
    pub schema_version: u32,
    pub omega: f64,
    pub start: f64,
    pub end: f64,
    #[serde(flatten)]
    pub params: ScheduleParams,
}

impl ScheduleHeader {
    pub fn of(schedule: &PulseSchedule) -> Self {
        let (start, end) = schedule.domain();
        Self {
            schema_version: SCHEMA_VERSION,
            omega: schedule.omega(),
            start,
            end,
            params: ScheduleParams::of(schedule.strategy()),
        }
    }
}

/// Time axis used in reports: `t/T` for A and B, `t/(π/2ω)` for C.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeUnit {
    pub name: &'static str,
    pub seconds: f64,
}

impl TimeUnit {
    pub fn of(schedule: &PulseSchedule) -> Self {
        match schedule.strategy() {
            Strategy::Smooth { period, .. } | Strategy::Singular { period, .. } => {
                TimeUnit { name: "t/T", seconds: period }
            }
            Strategy::Reverse { .. } => {
                TimeUnit { name: "t/(pi/2omega)", seconds: PI / (2.0 * schedule.omega()) }
            }
        }
    }

    pub fn scale(&self, t: f64) -> f64 {
        t / self.seconds
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, fill: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> CliResult<()> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = NamedTempFile::new_in(&parent).map_err(|e| CliError::io(&parent, e))?;
    let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
    fill(&mut buf).and_then(|_| buf.flush()).map_err(|e| CliError::io(path, e))?;
    drop(buf);
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    write_atomic(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    })
}

fn csv_error(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

/// Envelope extrema over the written samples.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct EnvelopeStats {
    pub samples: usize,
    pub max_abs_omega: f64,
    pub t_max_abs_omega: f64,
    pub max_re_omega: f64,
    pub min_re_omega: f64,
    pub max_im_omega: f64,
    pub min_im_omega: f64,
    pub min_delta: f64,
}

/// Samples `schedule` at `samples` uniform times and writes the file.
pub fn write_schedule(path: &Path, schedule: &PulseSchedule, samples: usize) -> CliResult<EnvelopeStats> {
    let times = schedule.sample_times(samples);
    let mut rows = Vec::with_capacity(times.len());
    let mut stats = EnvelopeStats { samples: times.len(), ..Default::default() };
    for &t in &times {
        let s = schedule.sample(t)?;
        let abs = s.omega_p.norm();
        if abs > stats.max_abs_omega {
            stats.max_abs_omega = abs;
            stats.t_max_abs_omega = t;
        }
        stats.max_re_omega = stats.max_re_omega.max(s.omega_p.re);
        stats.min_re_omega = stats.min_re_omega.min(s.omega_p.re);
        stats.max_im_omega = stats.max_im_omega.max(s.omega_p.im);
        stats.min_im_omega = stats.min_im_omega.min(s.omega_p.im);
        stats.min_delta = stats.min_delta.min(s.delta_p);
        rows.push((t, s));
    }
    let header = serde_json::to_string(&ScheduleHeader::of(schedule))
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    write_atomic(path, |w| {
        writeln!(w, "# {header}")?;
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(SCHEDULE_COLUMNS).map_err(csv_error)?;
        for (t, s) in &rows {
            let fields = [t, &s.omega_p.re, &s.omega_p.im, &s.omega_s.re, &s.omega_s.im, &s.delta_p];
            csv.write_record(fields.iter().map(|x| x.to_string())).map_err(csv_error)?;
        }
        csv.flush()
    })?;
    Ok(stats)
}

/// A schedule file read back: the header and its samples.
#[derive(Debug, Clone)]
pub struct ScheduleFile {
    pub path: PathBuf,
    pub header: ScheduleHeader,
    pub times: Vec<f64>,
    pub samples: Vec<DriveSample>,
}

pub fn read_schedule(path: &Path) -> CliResult<ScheduleFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |message: String| CliError::Format { path: path.into(), message };
    let (first, body) = text.split_once('\n').ok_or_else(|| bad("empty schedule file".into()))?;
    let json = first.strip_prefix("# ").ok_or_else(|| bad("missing '# ' header line".into()))?;
    let header: ScheduleHeader =
        serde_json::from_str(json).map_err(|e| bad(format!("header: {e}")))?;
    if header.schema_version != SCHEMA_VERSION {
        return Err(bad(format!("unsupported schema_version {}", header.schema_version)));
    }
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let columns = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if columns.iter().ne(SCHEDULE_COLUMNS) {
        return Err(bad(format!("expected columns {}", SCHEDULE_COLUMNS.join(","))));
    }
    let (mut times, mut samples) = (Vec::new(), Vec::new());
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let mut v = [0.0f64; 6];
        for (slot, field) in v.iter_mut().zip(record.iter()) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| bad(format!("data row {}: bad number {field:?}", line + 1)))?;
        }
        if record.len() != 6 || v.iter().any(|x| !x.is_finite()) {
            return Err(bad(format!("data row {}: expected six finite numbers", line + 1)));
        }
        if times.last().is_some_and(|&last| v[0] <= last) {
            return Err(bad(format!("data row {}: times must increase", line + 1)));
        }
        times.push(v[0]);
        samples.push(DriveSample {
            omega_p: lrpulse_core::C64::new(v[1], v[2]),
            omega_s: lrpulse_core::C64::new(v[3], v[4]),
            delta_p: v[5],
            delta_s: v[5],
        });
    }
    if times.len() < 2 {
        return Err(bad("schedule needs at least two samples".into()));
    }
    Ok(ScheduleFile { path: path.into(), header, times, samples })
}

/// The samples of a schedule file as a drive, defined only at the file's
/// sample times.
#[derive(Debug, Clone)]
pub struct FileDrive<'a> {
    file: &'a ScheduleFile,
}

impl<'a> FileDrive<'a> {
    pub fn new(file: &'a ScheduleFile) -> Self {
        Self { file }
    }
}

impl Drive for FileDrive<'_> {
    fn carriers(&self) -> Carriers {
        Carriers { omega_p: self.file.header.omega, omega_s: self.file.header.omega }
    }

    fn domain(&self) -> (f64, f64) {
        (self.file.times[0], self.file.times[self.file.times.len() - 1])
    }

    fn sample(&self, t: f64) -> lrpulse_core::Result<DriveSample> {
        match self.file.times.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => Ok(self.file.samples[i]),
            Err(_) => Err(lrpulse_core::Error::InvalidArgument("time not among the file's samples")),
        }
    }
}

/// Writes `t, P1, P2, P3, norm` with `t` in `unit`.
pub fn write_report(path: &Path, report: &TransferReport, unit: TimeUnit) -> CliResult<()> {
    write_atomic(path, |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["t", "P1", "P2", "P3", "norm"]).map_err(csv_error)?;
        for ((t, p), n) in report.times.iter().zip(&report.populations).zip(&report.norms) {
            let fields = [unit.scale(*t), p[0], p[1], p[2], *n];
            csv.write_record(fields.iter().map(|x| x.to_string())).map_err(csv_error)?;
        }
        csv.flush()
    })
}
