//! Text file formats: occupancy maps, stage definitions, trial event logs and
//! questionnaire answers.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use beacon_nav_core::evalkit::{SusRecord, SusResponse, System, TrialEvent};
use beacon_nav_core::geometry::Vec2;
use beacon_nav_core::navsim::{OccupancyGrid, Stage};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path} line {line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { path: path.to_path_buf(), line, message: message.into() }
}

fn numbers<const N: usize>(fields: &[&str]) -> Result<[f64; N], String> {
    if fields.len() != N {
        return Err(format!("expected {N} numbers, found {}", fields.len()));
    }
    let mut out = [0.0; N];
    for (slot, f) in out.iter_mut().zip(fields) {
        *slot = f.parse::<f64>().map_err(|_| format!("not a number: {f:?}"))?;
        if !slot.is_finite() {
            return Err(format!("not finite: {f:?}"));
        }
    }
    Ok(out)
}

/// Parses a map: `resolution <m>`, `origin <x> <y>`, then rows of `#` and
/// `.` with the top row at maximum y.
pub fn parse_map(path: &Path, text: &str) -> Result<OccupancyGrid, FormatError> {
    let mut resolution = None;
    let mut origin = None;
    let mut rows: Vec<(usize, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "resolution" if rows.is_empty() => {
                let [r] = numbers::<1>(&fields[1..]).map_err(|m| parse_err(path, line_no, m))?;
                resolution = Some(r);
            }
            "origin" if rows.is_empty() => {
                let [x, y] = numbers::<2>(&fields[1..]).map_err(|m| parse_err(path, line_no, m))?;
                origin = Some(Vec2::new(x, y));
            }
            _ => {
                if let Some(c) = line.chars().find(|c| *c != '#' && *c != '.') {
                    return Err(parse_err(path, line_no, format!("unexpected map character {c:?}")));
                }
                if let Some((_, first)) = rows.first() {
                    if first.len() != line.len() {
                        return Err(parse_err(path, line_no, "map rows differ in width"));
                    }
                }
                rows.push((line_no, line));
            }
        }
    }
    let resolution = resolution.ok_or_else(|| parse_err(path, 1, "missing resolution line"))?;
    let origin = origin.ok_or_else(|| parse_err(path, 1, "missing origin line"))?;
    if rows.is_empty() {
        return Err(parse_err(path, text.lines().count().max(1), "map has no rows"));
    }
    let width = rows[0].1.len();
    let cells: Vec<bool> = rows.iter().rev().flat_map(|(_, r)| r.bytes().map(|b| b == b'#')).collect();
    OccupancyGrid::from_cells(width, rows.len(), resolution, origin, cells)
        .map_err(|e| parse_err(path, 1, e.to_string()))
}

pub fn load_map(path: &Path) -> Result<OccupancyGrid, FormatError> {
    parse_map(path, &read(path)?)
}

/// Renders a grid in the map file format.
pub fn render_map(grid: &OccupancyGrid) -> String {
    let mut out = format!("resolution {}\norigin {} {}\n", grid.resolution(), grid.origin().x, grid.origin().y);
    for row in (0..grid.height()).rev() {
        for col in 0..grid.width() {
            out.push(if grid.is_occupied(col, row) { '#' } else { '.' });
        }
        out.push('\n');
    }
    out
}

/// Parses stage lines `stage <id> <cx> <cy> <w> <h> <area_yaw> <target_yaw> <yaw_tol>`.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_stages(path: &Path, text: &str) -> Result<Vec<Stage>, FormatError> {
    let mut stages: Vec<Stage> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] != "stage" || fields.len() != 9 {
            return Err(parse_err(path, line_no, "expected `stage id cx cy w h area_yaw target_yaw yaw_tol`"));
        }
        let id: u8 = fields[1].parse().map_err(|_| parse_err(path, line_no, "stage id must be 1..=255"))?;
        if id == 0 || stages.iter().any(|s| s.id == id) {
            return Err(parse_err(path, line_no, format!("stage id {id} is zero or repeated")));
        }
        let [cx, cy, w, h, yaw, target, tol] = numbers::<7>(&fields[2..]).map_err(|m| parse_err(path, line_no, m))?;
        let stage = Stage::new(id, Vec2::new(cx, cy), w, h, yaw, target, tol)
            .map_err(|e| parse_err(path, line_no, e.to_string()))?;
        stages.push(stage);
    }
    Ok(stages)
}

pub fn load_stages(path: &Path) -> Result<Vec<Stage>, FormatError> {
    parse_stages(path, &read(path)?)
}

/// One event log line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EventLine {
    t: f64,
    participant: String,
    system: String,
    stage: u8,
    kind: String,
}

pub fn event_to_line(e: &TrialEvent) -> String {
    let line = EventLine {
        t: e.t,
        participant: e.participant.clone(),
        system: e.system.as_str().into(),
        stage: e.stage,
        kind: e.kind.as_str().into(),
    };
    serde_json::to_string(&line).expect("event serializes")
}

pub fn parse_event_log(path: &Path, text: &str) -> Result<Vec<TrialEvent>, FormatError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |m: String| parse_err(path, i + 1, m);
        let raw: EventLine = serde_json::from_str(line).map_err(|e| err(e.to_string()))?;
        out.push(TrialEvent {
            t: raw.t,
            system: raw.system.parse().map_err(|_| err(format!("unknown system {:?}", raw.system)))?,
            kind: raw.kind.parse().map_err(|_| err(format!("unknown event kind {:?}", raw.kind)))?,
            participant: raw.participant,
            stage: raw.stage,
        });
    }
    Ok(out)
}

pub fn load_event_log(path: &Path) -> Result<Vec<TrialEvent>, FormatError> {
    parse_event_log(path, &read(path)?)
}

pub fn write_event_log(path: &Path, events: &[TrialEvent]) -> Result<(), FormatError> {
    let mut text = String::new();
    for e in events {
        text.push_str(&event_to_line(e));
        text.push('\n');
    }
    fs::write(path, text).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })
}

/// Appends events to a log file, flushing each line.
pub struct EventLogWriter {
    path: PathBuf,
    file: fs::File,
}

impl EventLogWriter {
    pub fn create(path: &Path) -> Result<Self, FormatError> {
        let file = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|source| FormatError::Io { path: path.to_path_buf(), source })?;
        Ok(Self { path: path.to_path_buf(), file })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, e: &TrialEvent) -> Result<(), FormatError> {
        let mut line = event_to_line(e);
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.flush())
            .map_err(|source| FormatError::Io { path: self.path.clone(), source })
    }
}

/// Parses questionnaire CSV with header `participant,system,q1,…,q10`.
pub fn parse_sus_csv(path: &Path, text: &str) -> Result<Vec<SusRecord>, FormatError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| parse_err(path, line, e.to_string()))?;
        if row.len() != 12 {
            return Err(parse_err(path, line, format!("expected 12 columns, found {}", row.len())));
        }
        let system: System =
            row[1].parse().map_err(|_| parse_err(path, line, format!("unknown system {:?}", &row[1])))?;
        let ratings = row
            .iter()
            .skip(2)
            .map(|v| v.parse::<i64>().map_err(|_| parse_err(path, line, format!("not an integer: {v:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let response = SusResponse::new(&ratings).map_err(|e| parse_err(path, line, e.to_string()))?;
        out.push(SusRecord { participant: row[0].to_string(), system, response });
    }
    Ok(out)
}

pub fn load_sus_csv(path: &Path) -> Result<Vec<SusRecord>, FormatError> {
    parse_sus_csv(path, &read(path)?)
}

pub fn render_sus_csv(records: &[SusRecord]) -> String {
    let mut out = String::from("participant,system,q1,q2,q3,q4,q5,q6,q7,q8,q9,q10\n");
    for r in records {
        out.push_str(&r.participant);
        out.push(',');
        out.push_str(r.system.as_str());
        for v in r.response.ratings() {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}
