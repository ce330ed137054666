//! File formats and dataset loaders: edge lists, CSV signal matrices, JSON
//! manifests and results, station tables for weather-style data and
//! relation tables for social-style data.
//!
//! All files are UTF-8; floats use the shortest round-trip decimal form, so
//! a save/load cycle reproduces matrices bit for bit. Manifests carry the
//! format version string `graphmask/1`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{
    EdgeSet, GlobalGraph, GraphError, GraphLayer, MaskSet, MultiLayerGraph, EDGE_EPS,
};
use crate::infer::{GlConvResult, GlResult, Method, MlResult};
use crate::qp::KktReport;
use crate::spectral::{SignalMatrix, SpectralError};
use crate::synth::{SynthConfig, SynthInstance};

pub const FORMAT_VERSION: &str = "graphmask/1";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: expected {expected} columns, found {found}")]
    ColumnCount {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("{path}:{line}: self-loop {i} {i} is not allowed")]
    SelfLoop {
        path: PathBuf,
        line: usize,
        i: usize,
    },
    #[error("{path}:{line}: conflicting duplicate for edge ({i},{j})")]
    DuplicateEdge {
        path: PathBuf,
        line: usize,
        i: usize,
        j: usize,
    },
    #[error("{path}: vertex id {id} is out of range for {n} vertices")]
    VertexOutOfRange { path: PathBuf, id: usize, n: usize },
    #[error("{path}: format version {found:?} is not {expected:?}")]
    FormatVersion {
        path: PathBuf,
        found: String,
        expected: String,
    },
    #[error("{path}: manifest kind {found:?} is not {expected:?}")]
    ManifestKind {
        path: PathBuf,
        found: String,
        expected: String,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("mask file {path} is missing an entry for support pair ({i},{j})")]
    MissingMaskEntry { path: PathBuf, i: usize, j: usize },
    #[error("unknown relation {0:?}")]
    UnknownRelation(String),
    #[error("unknown measurement {0:?}")]
    UnknownMeasurement(String),
    #[error("group {0:?} is empty")]
    EmptyGroup(String),
    #[error("actor {id} appears in both groups")]
    OverlappingGroups { id: usize },
    #[error("need at least two stations, got {0}")]
    TooFewStations(usize),
    #[error("sparsity target must lie in (0, 1), got {0}")]
    BadSparsity(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IngestError + '_ {
    move |source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn read_to_string(path: &Path) -> Result<String, IngestError> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn write_file(path: &Path, content: &str) -> Result<(), IngestError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(path))?;
    }
    let mut file = fs::File::create(path).map_err(io_err(path))?;
    file.write_all(content.as_bytes()).map_err(io_err(path))
}

// ---------------------------------------------------------------------------
// Edge lists
// ---------------------------------------------------------------------------

/// Parse `i j w` triplet lines. Blank lines and `#` comments are skipped.
pub fn parse_edge_list(path: &Path, text: &str) -> Result<Vec<(usize, usize, f64)>, IngestError> {
    let mut triplets = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(IngestError::ColumnCount {
                path: path.to_path_buf(),
                line,
                expected: 3,
                found: fields.len(),
            });
        }
        let parse_id = |s: &str| {
            s.parse::<usize>().map_err(|e| IngestError::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("bad vertex id {s:?}: {e}"),
            })
        };
        let i = parse_id(fields[0])?;
        let j = parse_id(fields[1])?;
        let w = fields[2].parse::<f64>().map_err(|e| IngestError::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("bad weight {:?}: {e}", fields[2]),
        })?;
        if i == j {
            return Err(IngestError::SelfLoop {
                path: path.to_path_buf(),
                line,
                i,
            });
        }
        if !w.is_finite() {
            return Err(IngestError::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("non-finite weight {w}"),
            });
        }
        triplets.push((i, j, w));
    }
    Ok(triplets)
}

/// Assemble a symmetric weight matrix from triplets; both orientations of an
/// edge may appear if they agree.
pub fn edges_to_weights(
    path: &Path,
    n: usize,
    triplets: &[(usize, usize, f64)],
) -> Result<DMatrix<f64>, IngestError> {
    let mut w = DMatrix::zeros(n, n);
    let mut seen: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (line_no, &(i, j, value)) in triplets.iter().enumerate() {
        if i >= n || j >= n {
            return Err(IngestError::VertexOutOfRange {
                path: path.to_path_buf(),
                id: i.max(j),
                n,
            });
        }
        let key = if i < j { (i, j) } else { (j, i) };
        if let Some(&prev) = seen.get(&key) {
            if (prev - value).abs() > 1e-12 {
                return Err(IngestError::DuplicateEdge {
                    path: path.to_path_buf(),
                    line: line_no + 1,
                    i: key.0,
                    j: key.1,
                });
            }
        } else {
            seen.insert(key, value);
        }
        if value < 0.0 {
            return Err(IngestError::Parse {
                path: path.to_path_buf(),
                line: line_no + 1,
                message: format!("negative weight {value}"),
            });
        }
        w[(key.0, key.1)] = value;
        w[(key.1, key.0)] = value;
    }
    Ok(w)
}

pub fn load_weights(path: &Path, n: usize) -> Result<DMatrix<f64>, IngestError> {
    let text = read_to_string(path)?;
    let triplets = parse_edge_list(path, &text)?;
    edges_to_weights(path, n, &triplets)
}

/// Write the strictly-positive upper-triangle entries as `i j w` lines.
pub fn save_weights(path: &Path, weights: &DMatrix<f64>) -> Result<(), IngestError> {
    let mut out = String::new();
    for i in 0..weights.nrows() {
        for j in i + 1..weights.ncols() {
            if weights[(i, j)] > 0.0 {
                out.push_str(&format!("{} {} {}\n", i, j, weights[(i, j)]));
            }
        }
    }
    write_file(path, &out)
}

/// Write mask values over the full support, zeros included, so the support
/// itself round-trips.
pub fn save_mask_layer(path: &Path, masks: &MaskSet, layer: usize) -> Result<(), IngestError> {
    let mut out = String::new();
    for (e, &(i, j)) in masks.support().iter().enumerate() {
        out.push_str(&format!("{} {} {}\n", i, j, masks.layer_values(layer)[e]));
    }
    write_file(path, &out)
}

fn load_mask_values(
    path: &Path,
    n: usize,
    support: &[(usize, usize)],
) -> Result<Vec<f64>, IngestError> {
    let text = read_to_string(path)?;
    let triplets = parse_edge_list(path, &text)?;
    let mut map: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for &(i, j, v) in &triplets {
        if i >= n || j >= n {
            return Err(IngestError::VertexOutOfRange {
                path: path.to_path_buf(),
                id: i.max(j),
                n,
            });
        }
        map.insert(if i < j { (i, j) } else { (j, i) }, v);
    }
    support
        .iter()
        .map(|&(i, j)| {
            map.get(&(i, j))
                .copied()
                .ok_or(IngestError::MissingMaskEntry {
                    path: path.to_path_buf(),
                    i,
                    j,
                })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Signal matrices
// ---------------------------------------------------------------------------

/// Load a CSV signal matrix: one row per vertex, comma-separated columns.
pub fn load_signals(path: &Path) -> Result<SignalMatrix, IngestError> {
    let text = read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut expected = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = content.split(',').collect();
        if let Some(expected) = expected {
            if fields.len() != expected {
                return Err(IngestError::ColumnCount {
                    path: path.to_path_buf(),
                    line,
                    expected,
                    found: fields.len(),
                });
            }
        } else {
            expected = Some(fields.len());
        }
        let mut row = Vec::with_capacity(fields.len());
        for field in fields {
            row.push(
                field
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| IngestError::Parse {
                        path: path.to_path_buf(),
                        line,
                        message: format!("bad value {field:?}: {e}"),
                    })?,
            );
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(IngestError::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: "empty signal matrix".into(),
        });
    }
    let n = rows.len();
    let k = rows[0].len();
    let data = DMatrix::from_fn(n, k, |i, j| rows[i][j]);
    Ok(SignalMatrix::new(data)?)
}

pub fn save_signals(path: &Path, signals: &SignalMatrix) -> Result<(), IngestError> {
    let mut out = String::new();
    let data = signals.data();
    for i in 0..data.nrows() {
        let row: Vec<String> = (0..data.ncols())
            .map(|j| format!("{}", data[(i, j)]))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_file(path, &out)
}

// ---------------------------------------------------------------------------
// Synthetic instance directories
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceManifest {
    pub format: String,
    pub kind: String,
    pub n: usize,
    pub t: usize,
    pub k: usize,
    pub seed: u64,
    pub sigma: f64,
    pub tau: f64,
    pub edge_quantile: f64,
    pub coverability_target: f64,
    pub coverability_actual: f64,
    pub groups: Vec<Vec<usize>>,
    pub layer_files: Vec<String>,
    pub mask_files: Vec<String>,
    pub global_file: String,
    pub signals_file: String,
}

fn check_manifest(
    path: &Path,
    format: &str,
    kind: &str,
    expected_kind: &str,
) -> Result<(), IngestError> {
    if format != FORMAT_VERSION {
        return Err(IngestError::FormatVersion {
            path: path.to_path_buf(),
            found: format.to_string(),
            expected: FORMAT_VERSION.to_string(),
        });
    }
    if kind != expected_kind {
        return Err(IngestError::ManifestKind {
            path: path.to_path_buf(),
            found: kind.to_string(),
            expected: expected_kind.to_string(),
        });
    }
    Ok(())
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, IngestError> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|source| IngestError::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IngestError> {
    let text = serde_json::to_string_pretty(value).map_err(|source| IngestError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    write_file(path, &format!("{text}\n"))
}

/// Write a synthetic instance directory: layer and mask edge lists, the true
/// global graph, the signal CSV and a manifest.
pub fn save_instance(dir: &Path, instance: &SynthInstance) -> Result<(), IngestError> {
    let layer_files: Vec<String> = (1..=instance.layers.t())
        .map(|t| format!("layer-{t}.edges"))
        .collect();
    let mask_files: Vec<String> = (1..=instance.true_masks.t())
        .map(|t| format!("mask-{t}.edges"))
        .collect();
    let manifest = InstanceManifest {
        format: FORMAT_VERSION.to_string(),
        kind: "synthetic".to_string(),
        n: instance.layers.n(),
        t: instance.layers.t(),
        k: instance.signals.k(),
        seed: instance.config.seed,
        sigma: instance.config.sigma,
        tau: instance.config.tau,
        edge_quantile: instance.config.edge_quantile,
        coverability_target: instance.config.coverability,
        coverability_actual: instance.coverability_actual,
        groups: vec![instance.groups.0.clone(), instance.groups.1.clone()],
        layer_files: layer_files.clone(),
        mask_files: mask_files.clone(),
        global_file: "global.edges".to_string(),
        signals_file: "signals.csv".to_string(),
    };
    for (t, file) in layer_files.iter().enumerate() {
        save_weights(&dir.join(file), instance.layers.layer(t).weights())?;
    }
    for (t, file) in mask_files.iter().enumerate() {
        save_mask_layer(&dir.join(file), &instance.true_masks, t)?;
    }
    save_weights(
        &dir.join(&manifest.global_file),
        instance.true_global.weights(),
    )?;
    save_signals(&dir.join(&manifest.signals_file), &instance.signals)?;
    save_json(&dir.join("manifest.json"), &manifest)
}

/// A synthetic instance read back from disk.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub manifest: InstanceManifest,
    pub layers: MultiLayerGraph,
    pub true_masks: MaskSet,
    pub true_global: GlobalGraph,
    pub signals: SignalMatrix,
}

pub fn load_instance(dir: &Path) -> Result<LoadedInstance, IngestError> {
    let manifest_path = dir.join("manifest.json");
    let manifest: InstanceManifest = load_json(&manifest_path)?;
    check_manifest(
        &manifest_path,
        &manifest.format,
        &manifest.kind,
        "synthetic",
    )?;

    let mut layers = Vec::new();
    for file in &manifest.layer_files {
        layers.push(GraphLayer::new(load_weights(&dir.join(file), manifest.n)?)?);
    }
    let layers = MultiLayerGraph::new(layers)?;

    let support: Vec<(usize, usize)> = layers.support_pairs(EDGE_EPS);
    let mut values = Vec::new();
    for file in &manifest.mask_files {
        values.push(load_mask_values(&dir.join(file), manifest.n, &support)?);
    }
    let true_masks = MaskSet::new(manifest.n, support, values)?;

    let true_global =
        GlobalGraph::from_weights(&load_weights(&dir.join(&manifest.global_file), manifest.n)?)?;
    let signals = load_signals(&dir.join(&manifest.signals_file))?;
    Ok(LoadedInstance {
        manifest,
        layers,
        true_masks,
        true_global,
        signals,
    })
}

/// Reconstruct the generator configuration recorded in a manifest.
pub fn manifest_config(manifest: &InstanceManifest) -> SynthConfig {
    SynthConfig {
        n: manifest.n,
        sigma: manifest.sigma,
        edge_quantile: manifest.edge_quantile,
        tau: manifest.tau,
        coverability: manifest.coverability_target,
        k_signals: manifest.k,
        seed: manifest.seed,
    }
}

// ---------------------------------------------------------------------------
// Weather-style station tables
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeatherManifest {
    pub format: String,
    pub kind: String,
    pub n: usize,
    pub stations_file: String,
    pub measurements_file: String,
    pub measurements: Vec<String>,
}

/// Monthly normals plus the yearly average of one measurement at a station.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlyRecord {
    pub monthly: [f64; 12],
    pub yearly: f64,
}

/// Stations with geographic and altitude features and per-measurement
/// monthly records; a station may miss a measurement entirely.
#[derive(Debug, Clone)]
pub struct StationTable {
    pub ids: Vec<String>,
    pub gps: Vec<[f64; 2]>,
    pub altitude: Vec<f64>,
    pub measurements: BTreeMap<String, Vec<Option<MonthlyRecord>>>,
}

/// One proximity notion: a named feature vector per station.
#[derive(Debug, Clone)]
pub struct FeatureBlock {
    pub name: String,
    pub vectors: Vec<Vec<f64>>,
}

impl StationTable {
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    /// Signal matrix of one measurement: stations with a record keep their
    /// row order; stations missing the measurement are dropped and reported.
    pub fn measurement_signals(
        &self,
        name: &str,
    ) -> Result<(SignalMatrix, Vec<usize>, Vec<String>), IngestError> {
        let records = self
            .measurements
            .get(name)
            .ok_or_else(|| IngestError::UnknownMeasurement(name.to_string()))?;
        let mut kept = Vec::new();
        let mut dropped = Vec::new();
        for (idx, record) in records.iter().enumerate() {
            match record {
                Some(_) => kept.push(idx),
                None => dropped.push(self.ids[idx].clone()),
            }
        }
        if kept.len() < 2 {
            return Err(IngestError::TooFewStations(kept.len()));
        }
        let data = DMatrix::from_fn(kept.len(), 12, |i, j| {
            records[kept[i]]
                .as_ref()
                .expect("kept records exist")
                .monthly[j]
        });
        Ok((SignalMatrix::new(data)?, kept, dropped))
    }

    /// The GPS and altitude proximity notions, restricted to `kept`.
    pub fn feature_blocks(&self, kept: &[usize]) -> Vec<FeatureBlock> {
        vec![
            FeatureBlock {
                name: "gps".to_string(),
                vectors: kept.iter().map(|&i| self.gps[i].to_vec()).collect(),
            },
            FeatureBlock {
                name: "altitude".to_string(),
                vectors: kept.iter().map(|&i| vec![self.altitude[i]]).collect(),
            },
        ]
    }
}

pub fn load_station_table(dir: &Path) -> Result<(WeatherManifest, StationTable), IngestError> {
    let manifest_path = dir.join("manifest.json");
    let manifest: WeatherManifest = load_json(&manifest_path)?;
    check_manifest(&manifest_path, &manifest.format, &manifest.kind, "weather")?;

    let stations_path = dir.join(&manifest.stations_file);
    let text = read_to_string(&stations_path)?;
    let mut ids = Vec::new();
    let mut gps = Vec::new();
    let mut altitude = Vec::new();
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim()).unwrap_or_default();
    if header != "station_id,x,y,altitude" {
        return Err(IngestError::Parse {
            path: stations_path.clone(),
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    for (idx, raw) in lines {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split(',').collect();
        if fields.len() != 4 {
            return Err(IngestError::ColumnCount {
                path: stations_path.clone(),
                line,
                expected: 4,
                found: fields.len(),
            });
        }
        let parse = |s: &str| {
            s.trim().parse::<f64>().map_err(|e| IngestError::Parse {
                path: stations_path.clone(),
                line,
                message: format!("bad number {s:?}: {e}"),
            })
        };
        ids.push(fields[0].trim().to_string());
        gps.push([parse(fields[1])?, parse(fields[2])?]);
        altitude.push(parse(fields[3])?);
    }
    if ids.len() != manifest.n {
        return Err(IngestError::Parse {
            path: stations_path.clone(),
            line: 0,
            message: format!("expected {} stations, found {}", manifest.n, ids.len()),
        });
    }

    let measurements_path = dir.join(&manifest.measurements_file);
    let text = read_to_string(&measurements_path)?;
    let mut measurements: BTreeMap<String, Vec<Option<MonthlyRecord>>> = manifest
        .measurements
        .iter()
        .map(|m| (m.clone(), vec![None; ids.len()]))
        .collect();
    let id_index: BTreeMap<&str, usize> = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim()).unwrap_or_default();
    let expected_header =
        "station_id,measurement,m01,m02,m03,m04,m05,m06,m07,m08,m09,m10,m11,m12,yearly";
    if header != expected_header {
        return Err(IngestError::Parse {
            path: measurements_path.clone(),
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    for (idx, raw) in lines {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split(',').collect();
        if fields.len() != 15 {
            return Err(IngestError::ColumnCount {
                path: measurements_path.clone(),
                line,
                expected: 15,
                found: fields.len(),
            });
        }
        let station = *id_index
            .get(fields[0].trim())
            .ok_or_else(|| IngestError::Parse {
                path: measurements_path.clone(),
                line,
                message: format!("unknown station {:?}", fields[0]),
            })?;
        let name = fields[1].trim();
        let slot = measurements
            .get_mut(name)
            .ok_or_else(|| IngestError::UnknownMeasurement(name.to_string()))?;
        // An empty monthly block flags the measurement missing at this
        // station.
        if fields[2..].iter().all(|f| f.trim().is_empty()) {
            slot[station] = None;
            continue;
        }
        let parse = |s: &str| {
            s.trim().parse::<f64>().map_err(|e| IngestError::Parse {
                path: measurements_path.clone(),
                line,
                message: format!("bad number {s:?}: {e}"),
            })
        };
        let mut monthly = [0.0; 12];
        for (k, slot_val) in monthly.iter_mut().enumerate() {
            *slot_val = parse(fields[2 + k])?;
        }
        slot[station] = Some(MonthlyRecord {
            monthly,
            yearly: parse(fields[14])?,
        });
    }
    Ok((
        manifest,
        StationTable {
            ids,
            gps,
            altitude,
            measurements,
        },
    ))
}

pub fn save_station_table(
    dir: &Path,
    manifest: &WeatherManifest,
    table: &StationTable,
) -> Result<(), IngestError> {
    let mut out = String::from("station_id,x,y,altitude\n");
    for i in 0..table.n() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            table.ids[i], table.gps[i][0], table.gps[i][1], table.altitude[i]
        ));
    }
    write_file(&dir.join(&manifest.stations_file), &out)?;

    let mut out = String::from(
        "station_id,measurement,m01,m02,m03,m04,m05,m06,m07,m08,m09,m10,m11,m12,yearly\n",
    );
    for (name, records) in &table.measurements {
        for (i, record) in records.iter().enumerate() {
            match record {
                Some(r) => {
                    let months: Vec<String> = r.monthly.iter().map(|v| format!("{v}")).collect();
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        table.ids[i],
                        name,
                        months.join(","),
                        r.yearly
                    ));
                }
                None => {
                    out.push_str(&format!("{},{},{},\n", table.ids[i], name, ",".repeat(11)));
                }
            }
        }
    }
    write_file(&dir.join(&manifest.measurements_file), &out)?;
    save_json(&dir.join("manifest.json"), manifest)
}

/// Build one unweighted layer per proximity notion by thresholding pairwise
/// Euclidean distances at the target edge sparsity, then scaling each layer
/// to volume n.
///
/// The threshold selects the `floor(sparsity * pairs)` closest pairs (at
/// least one); distance ties are broken deterministically by index order.
pub fn layers_from_features(
    blocks: &[FeatureBlock],
    sparsity: f64,
) -> Result<MultiLayerGraph, IngestError> {
    if blocks.is_empty() {
        return Err(IngestError::EmptyGroup("feature blocks".into()));
    }
    let n = blocks[0].vectors.len();
    if n < 2 {
        return Err(IngestError::TooFewStations(n));
    }
    if !(sparsity > 0.0 && sparsity < 1.0) {
        return Err(IngestError::BadSparsity(sparsity));
    }
    let pairs = n * (n - 1) / 2;
    let count = (((pairs as f64) * sparsity).floor() as usize).clamp(1, pairs);

    let mut layers = Vec::new();
    for block in blocks {
        let mut scored: Vec<(f64, usize, usize)> = Vec::with_capacity(pairs);
        for (i, j) in crate::graph::upper_pairs(n) {
            let d: f64 = block.vectors[i]
                .iter()
                .zip(&block.vectors[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            scored.push((d, i, j));
        }
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let weight = n as f64 / (2.0 * count as f64);
        let mut w = DMatrix::zeros(n, n);
        for &(_, i, j) in scored.iter().take(count) {
            w[(i, j)] = weight;
            w[(j, i)] = weight;
        }
        layers.push(GraphLayer::new(w)?);
    }
    Ok(MultiLayerGraph::new(layers)?)
}

// ---------------------------------------------------------------------------
// Social-style relation tables
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationFile {
    pub name: String,
    pub file: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OfficeManifest {
    pub format: String,
    pub kind: String,
    pub n_actors: usize,
    pub actors_file: String,
    pub relations: Vec<RelationFile>,
}

/// Actors with two disjoint groups and typed edge lists, one per relation.
#[derive(Debug, Clone)]
pub struct RelationTable {
    pub n_actors: usize,
    pub group_a: Vec<usize>,
    pub group_b: Vec<usize>,
    pub relations: BTreeMap<String, Vec<(usize, usize)>>,
}

impl RelationTable {
    pub fn relation(&self, name: &str) -> Result<&[(usize, usize)], IngestError> {
        self.relations
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| IngestError::UnknownRelation(name.to_string()))
    }
}

pub fn load_relation_table(dir: &Path) -> Result<(OfficeManifest, RelationTable), IngestError> {
    let manifest_path = dir.join("manifest.json");
    let manifest: OfficeManifest = load_json(&manifest_path)?;
    check_manifest(&manifest_path, &manifest.format, &manifest.kind, "office")?;

    let actors_path = dir.join(&manifest.actors_file);
    let text = read_to_string(&actors_path)?;
    let mut group_a = Vec::new();
    let mut group_b = Vec::new();
    let mut count = 0usize;
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim()).unwrap_or_default();
    if header != "actor_id,group" {
        return Err(IngestError::Parse {
            path: actors_path.clone(),
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    for (idx, raw) in lines {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split(',').collect();
        if fields.len() != 2 {
            return Err(IngestError::ColumnCount {
                path: actors_path.clone(),
                line,
                expected: 2,
                found: fields.len(),
            });
        }
        let id = fields[0]
            .trim()
            .parse::<usize>()
            .map_err(|e| IngestError::Parse {
                path: actors_path.clone(),
                line,
                message: format!("bad actor id {:?}: {e}", fields[0]),
            })?;
        match fields[1].trim() {
            "A" => group_a.push(id),
            "B" => group_b.push(id),
            "-" => {}
            other => {
                return Err(IngestError::Parse {
                    path: actors_path.clone(),
                    line,
                    message: format!("unknown group {other:?}"),
                })
            }
        }
        count = count.max(id + 1);
    }
    if count != manifest.n_actors {
        return Err(IngestError::Parse {
            path: actors_path.clone(),
            line: 0,
            message: format!("expected {} actors, found {count}", manifest.n_actors),
        });
    }
    for &id in &group_a {
        if group_b.contains(&id) {
            return Err(IngestError::OverlappingGroups { id });
        }
    }

    let mut relations = BTreeMap::new();
    for rel in &manifest.relations {
        let path = dir.join(&rel.file);
        let text = read_to_string(&path)?;
        let triplets = parse_edge_list(&path, &text)?;
        let mut edges = Vec::with_capacity(triplets.len());
        for &(i, j, _) in &triplets {
            if i >= manifest.n_actors || j >= manifest.n_actors {
                return Err(IngestError::VertexOutOfRange {
                    path: path.clone(),
                    id: i.max(j),
                    n: manifest.n_actors,
                });
            }
            edges.push(if i < j { (i, j) } else { (j, i) });
        }
        edges.sort_unstable();
        edges.dedup();
        relations.insert(rel.name.clone(), edges);
    }
    let n_actors = manifest.n_actors;
    Ok((
        manifest,
        RelationTable {
            n_actors,
            group_a,
            group_b,
            relations,
        },
    ))
}

/// Write a relation table as a fixture directory: the actor/group CSV, one
/// unit-weight edge list per relation and the manifest.
pub fn save_relation_table_files(
    dir: &Path,
    manifest: &OfficeManifest,
    table: &RelationTable,
) -> Result<(), IngestError> {
    let mut out = String::from("actor_id,group\n");
    for id in 0..table.n_actors {
        let group = if table.group_a.contains(&id) {
            "A"
        } else if table.group_b.contains(&id) {
            "B"
        } else {
            "-"
        };
        out.push_str(&format!("{id},{group}\n"));
    }
    write_file(&dir.join(&manifest.actors_file), &out)?;

    for rel in &manifest.relations {
        let edges = table.relation(&rel.name)?;
        let mut out = String::new();
        for &(i, j) in edges {
            out.push_str(&format!("{i} {j} 1\n"));
        }
        write_file(&dir.join(&rel.file), &out)?;
    }
    save_json(&dir.join("manifest.json"), manifest)
}

/// Binary cross-group records of one relation: X_ij = 1 when actor i of
/// group A shares the relation with actor j of group B. Rows follow the
/// sorted order of group A, columns of group B.
pub fn bipartite_signals(
    table: &RelationTable,
    relation: &str,
) -> Result<SignalMatrix, IngestError> {
    if table.group_a.is_empty() {
        return Err(IngestError::EmptyGroup("A".into()));
    }
    if table.group_b.is_empty() {
        return Err(IngestError::EmptyGroup("B".into()));
    }
    let edges = table.relation(relation)?;
    let mut a_sorted = table.group_a.clone();
    a_sorted.sort_unstable();
    let mut b_sorted = table.group_b.clone();
    b_sorted.sort_unstable();
    let a_index: BTreeMap<usize, usize> = a_sorted
        .iter()
        .enumerate()
        .map(|(k, &id)| (id, k))
        .collect();
    let b_index: BTreeMap<usize, usize> = b_sorted
        .iter()
        .enumerate()
        .map(|(k, &id)| (id, k))
        .collect();
    let mut data = DMatrix::zeros(a_sorted.len(), b_sorted.len());
    for &(i, j) in edges {
        for (x, y) in [(i, j), (j, i)] {
            if let (Some(&row), Some(&col)) = (a_index.get(&x), b_index.get(&y)) {
                data[(row, col)] = 1.0;
            }
        }
    }
    Ok(SignalMatrix::new(data)?)
}

/// Unit-weight layer of one relation restricted to a vertex subset; indices
/// follow the sorted order of the subset.
pub fn layer_from_relation(
    table: &RelationTable,
    relation: &str,
    subset: &[usize],
) -> Result<GraphLayer, IngestError> {
    let edges = table.relation(relation)?;
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    let index: BTreeMap<usize, usize> = sorted.iter().enumerate().map(|(k, &id)| (id, k)).collect();
    let mut w = DMatrix::zeros(sorted.len(), sorted.len());
    for &(i, j) in edges {
        if let (Some(&a), Some(&b)) = (index.get(&i), index.get(&j)) {
            w[(a, b)] = 1.0;
            w[(b, a)] = 1.0;
        }
    }
    Ok(GraphLayer::new(w)?)
}

/// Edge set of one relation restricted to a vertex subset, reindexed to the
/// subset's sorted order.
pub fn relation_edges_in(
    table: &RelationTable,
    relation: &str,
    subset: &[usize],
) -> Result<EdgeSet, IngestError> {
    let edges = table.relation(relation)?;
    let mut sorted = subset.to_vec();
    sorted.sort_unstable();
    let index: BTreeMap<usize, usize> = sorted.iter().enumerate().map(|(k, &id)| (id, k)).collect();
    Ok(EdgeSet::from_pairs(edges.iter().filter_map(
        |&(i, j)| match (index.get(&i), index.get(&j)) {
            (Some(&a), Some(&b)) => Some((a, b)),
            _ => None,
        },
    )))
}

// ---------------------------------------------------------------------------
// Learn-result documents
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KktDoc {
    pub stationarity: f64,
    pub primal_eq: f64,
    pub primal_ineq: f64,
    pub dual_feas: f64,
    pub comp_slack: f64,
    pub gap: f64,
}

impl From<&KktReport> for KktDoc {
    fn from(k: &KktReport) -> Self {
        Self {
            stationarity: k.stationarity,
            primal_eq: k.primal_eq,
            primal_ineq: k.primal_ineq,
            dual_feas: k.dual_feas,
            comp_slack: k.comp_slack,
            gap: k.gap,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerTriplets {
    pub layer: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

/// JSON document for a learned graph: sparse triplets for masks, corrective
/// term and weights, plus the objective, solver status and a config echo.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LearnDocument {
    pub format: String,
    pub method: String,
    pub n: usize,
    pub layers: usize,
    pub gamma: Option<f64>,
    pub trace: Option<f64>,
    pub beta: Option<f64>,
    pub objective: f64,
    pub status: String,
    pub kkt: KktDoc,
    pub alphas: Option<Vec<f64>>,
    pub layer_contributions: Option<Vec<f64>>,
    pub masks: Option<Vec<LayerTriplets>>,
    pub corrective: Option<Vec<(usize, usize, f64)>>,
    pub weights: Vec<(usize, usize, f64)>,
    pub warnings: Vec<String>,
}

fn weight_triplets(g: &GlobalGraph) -> Vec<(usize, usize, f64)> {
    let w = g.weights();
    crate::graph::upper_pairs(g.n())
        .filter(|&(i, j)| w[(i, j)] > EDGE_EPS)
        .map(|(i, j)| (i, j, w[(i, j)]))
        .collect()
}

impl LearnDocument {
    pub fn from_ml(method: Method, result: &MlResult, gamma: f64, trace: f64) -> Self {
        let masks = (0..result.masks.t())
            .map(|t| LayerTriplets {
                layer: t,
                entries: result
                    .masks
                    .support()
                    .iter()
                    .enumerate()
                    .map(|(e, &(i, j))| (i, j, result.masks.layer_values(t)[e]))
                    .collect(),
            })
            .collect();
        let corrective: Vec<(usize, usize, f64)> = crate::graph::upper_pairs(result.corrective.n())
            .filter(|&(i, j)| result.corrective.entry(i, j).abs() > 1e-12)
            .map(|(i, j)| (i, j, result.corrective.entry(i, j)))
            .collect();
        Self {
            format: FORMAT_VERSION.to_string(),
            method: method.name().to_string(),
            n: result.global.n(),
            layers: result.masks.t(),
            gamma: Some(gamma),
            trace: Some(trace),
            beta: None,
            objective: result.objective,
            status: result.status.to_string(),
            kkt: KktDoc::from(&result.kkt),
            alphas: None,
            layer_contributions: result.layer_contributions.clone(),
            masks: Some(masks),
            corrective: Some(corrective),
            weights: weight_triplets(&result.global),
            warnings: result.warnings.clone(),
        }
    }

    pub fn from_gl(method: Method, result: &GlResult, gamma: f64, trace: f64, t: usize) -> Self {
        Self {
            format: FORMAT_VERSION.to_string(),
            method: method.name().to_string(),
            n: result.global.n(),
            layers: t,
            gamma: Some(gamma),
            trace: Some(trace),
            beta: None,
            objective: result.objective,
            status: result.status.to_string(),
            kkt: KktDoc::from(&result.kkt),
            alphas: None,
            layer_contributions: None,
            masks: None,
            corrective: None,
            weights: weight_triplets(&result.global),
            warnings: result.warnings.clone(),
        }
    }

    pub fn from_conv(result: &GlConvResult, beta: f64, trace: Option<f64>) -> Self {
        Self {
            format: FORMAT_VERSION.to_string(),
            method: Method::GlConv.name().to_string(),
            n: result.global.n(),
            layers: result.alphas.len(),
            gamma: None,
            trace,
            beta: Some(beta),
            objective: result.objective,
            status: result.status.to_string(),
            kkt: KktDoc::from(&result.kkt),
            alphas: Some(result.alphas.clone()),
            layer_contributions: None,
            masks: None,
            corrective: None,
            weights: weight_triplets(&result.global),
            warnings: result.warnings.clone(),
        }
    }

    /// Rebuild the learned global graph from the weight triplets.
    pub fn global_graph(&self) -> Result<GlobalGraph, IngestError> {
        let mut w = DMatrix::zeros(self.n, self.n);
        for &(i, j, v) in &self.weights {
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
        Ok(GlobalGraph::from_weights(&w)?)
    }
}

pub fn save_result(path: &Path, doc: &LearnDocument) -> Result<(), IngestError> {
    save_json(path, doc)
}

pub fn load_result(path: &Path) -> Result<LearnDocument, IngestError> {
    let doc: LearnDocument = load_json(path)?;
    if doc.format != FORMAT_VERSION {
        return Err(IngestError::FormatVersion {
            path: path.to_path_buf(),
            found: doc.format.clone(),
            expected: FORMAT_VERSION.to_string(),
        });
    }
    Ok(doc)
}
