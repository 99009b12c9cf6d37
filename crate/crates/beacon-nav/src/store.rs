//! Beacon database: one JSON record per line, replaced atomically on save.
//!
//! Every mutation is applied to a copy of the records, written to a temporary
//! file in the same directory, synced and renamed over the database file.
//! Only after the rename succeeds does the in-memory view change, so a failed
//! save leaves both the file and the [`Database`] as they were.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use beacon_nav_core::beacon::{Beacon, BeaconId, Footprint};
use beacon_nav_core::geometry::{Frame, Pose, Quat, Vec3, UNIT_TOLERANCE};
use serde::{Deserialize, Serialize};

/// One stored beacon: anchor-relative position and orientation in the map frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeaconRecord {
    pub id: BeaconId,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub qx: f64,
    pub qy: f64,
    pub qz: f64,
    pub qw: f64,
}

impl BeaconRecord {
    pub fn from_pose(id: BeaconId, pose: &Pose) -> Self {
        let (p, q) = (pose.position, pose.orientation);
        Self { id, x: p.x, y: p.y, z: p.z, qx: q.x, qy: q.y, qz: q.z, qw: q.w }
    }

    pub fn from_beacon(beacon: &Beacon) -> Self {
        Self::from_pose(beacon.id, &beacon.pose)
    }

    /// The stored pose, bit-for-bit, tagged with the map frame.
    pub fn pose(&self) -> Pose {
        Pose::new(
            Vec3::new(self.x, self.y, self.z),
            Quat { x: self.qx, y: self.qy, z: self.qz, w: self.qw },
            Frame::RobotMap,
        )
    }

    pub fn to_beacon(&self, footprint: Footprint) -> Beacon {
        Beacon { id: self.id, pose: self.pose(), footprint }
    }

    fn check(&self) -> Result<(), RecordError> {
        let values = [self.x, self.y, self.z, self.qx, self.qy, self.qz, self.qw];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(RecordError::NonFinite);
        }
        let norm = (self.qx * self.qx + self.qy * self.qy + self.qz * self.qz + self.qw * self.qw).sqrt();
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(RecordError::NonUnitQuaternion(norm));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum RecordError {
    #[error("non-finite field")]
    NonFinite,
    #[error("quaternion norm {0} is not 1")]
    NonUnitQuaternion(f64),
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path} line {line}: {message}")]
    Malformed { path: PathBuf, line: usize, message: String },
    #[error("{path} line {line}: beacon {id} appears more than once")]
    DuplicateInFile { path: PathBuf, line: usize, id: BeaconId },
    #[error("beacon {0} already exists")]
    Duplicate(BeaconId),
    #[error("beacon {0} not found")]
    NotFound(BeaconId),
    #[error("invalid record for beacon {id}: {source}")]
    InvalidRecord { id: BeaconId, source: RecordError },
}

type StageHook = Box<dyn FnMut(&Path) -> io::Result<()> + Send>;

/// Ordered beacon records backed by a file that is rewritten on every change.
pub struct Database {
    path: PathBuf,
    records: Vec<BeaconRecord>,
    stage_hook: Option<StageHook>,
}

impl std::fmt::Debug for Database {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Database").field("path", &self.path).field("records", &self.records).finish()
    }
}

impl Database {
    /// Opens the database at `path`. A missing file is an empty database.
    pub fn load(path: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let path = path.into();
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(source) => return Err(StoreError::Io { path, source }),
        };
        let records = parse_records(&path, &text)?;
        Ok(Self { path, records, stage_hook: None })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn records(&self) -> &[BeaconRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &BeaconId) -> Option<&BeaconRecord> {
        self.records.iter().find(|r| r.id == *id)
    }

    pub fn contains(&self, id: &BeaconId) -> bool {
        self.get(id).is_some()
    }

    /// Installs a callback that runs after the temporary file is written and
    /// synced but before it replaces the database file. Returning an error
    /// abandons the save at that point.
    pub fn set_stage_hook(&mut self, hook: impl FnMut(&Path) -> io::Result<()> + Send + 'static) {
        self.stage_hook = Some(Box::new(hook));
    }

    pub fn clear_stage_hook(&mut self) {
        self.stage_hook = None;
    }

    /// Appends a new record and persists.
    pub fn add(&mut self, record: BeaconRecord) -> Result<(), StoreError> {
        record.check().map_err(|source| StoreError::InvalidRecord { id: record.id, source })?;
        if self.contains(&record.id) {
            return Err(StoreError::Duplicate(record.id));
        }
        let mut next = self.records.clone();
        next.push(record);
        self.commit(next)
    }

    /// Replaces the pose of an existing record and persists.
    pub fn change(&mut self, id: &BeaconId, pose: &Pose) -> Result<(), StoreError> {
        let record = BeaconRecord::from_pose(*id, pose);
        record.check().map_err(|source| StoreError::InvalidRecord { id: *id, source })?;
        let idx = self.index_of(id)?;
        let mut next = self.records.clone();
        next[idx] = record;
        self.commit(next)
    }

    /// Removes a record and persists.
    pub fn delete(&mut self, id: &BeaconId) -> Result<(), StoreError> {
        let idx = self.index_of(id)?;
        let mut next = self.records.clone();
        next.remove(idx);
        self.commit(next)
    }

    /// Adds the record, or changes its pose if the id is already stored.
    pub fn upsert(&mut self, record: BeaconRecord) -> Result<(), StoreError> {
        if self.contains(&record.id) {
            self.change(&record.id, &record.pose())
        } else {
            self.add(record)
        }
    }

    /// Rewrites the backing file from the in-memory records.
    pub fn save(&mut self) -> Result<(), StoreError> {
        let records = std::mem::take(&mut self.records);
        let result = self.write_file(&records);
        self.records = records;
        result
    }

    fn index_of(&self, id: &BeaconId) -> Result<usize, StoreError> {
        self.records.iter().position(|r| r.id == *id).ok_or(StoreError::NotFound(*id))
    }

    fn commit(&mut self, next: Vec<BeaconRecord>) -> Result<(), StoreError> {
        self.write_file(&next)?;
        self.records = next;
        Ok(())
    }

    fn write_file(&mut self, records: &[BeaconRecord]) -> Result<(), StoreError> {
        let io_err = |source| StoreError::Io { path: self.path.clone(), source };
        let dir = match self.path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let text = render_records(records);
        let mut tmp = tempfile::Builder::new().prefix(".beacons-").suffix(".tmp").tempfile_in(&dir).map_err(io_err)?;
        tmp.write_all(text.as_bytes()).map_err(io_err)?;
        tmp.as_file().sync_all().map_err(io_err)?;
        if let Some(hook) = self.stage_hook.as_mut() {
            hook(tmp.path()).map_err(io_err)?;
        }
        tmp.persist(&self.path).map_err(|e| io_err(e.error))?;
        sync_dir(&dir).map_err(io_err)?;
        Ok(())
    }
}

#[cfg(unix)]
fn sync_dir(dir: &Path) -> io::Result<()> {
    fs::File::open(dir)?.sync_all()
}

#[cfg(not(unix))]
fn sync_dir(_dir: &Path) -> io::Result<()> {
    Ok(())
}

/// Serializes records in file order, one per line.
pub fn render_records(records: &[BeaconRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

/// Parses database text, rejecting malformed lines, bad quaternions and
/// repeated ids with the 1-based line number.
pub fn parse_records(path: &Path, text: &str) -> Result<Vec<BeaconRecord>, StoreError> {
    let mut records: Vec<BeaconRecord> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| StoreError::Malformed { path: path.to_path_buf(), line: line_no, message };
        let record: BeaconRecord = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
        record.check().map_err(|e| malformed(e.to_string()))?;
        if records.iter().any(|r| r.id == record.id) {
            return Err(StoreError::DuplicateInFile { path: path.to_path_buf(), line: line_no, id: record.id });
        }
        records.push(record);
    }
    Ok(records)
}
