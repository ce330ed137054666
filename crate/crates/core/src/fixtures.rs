//! Bundled synthetic fixtures.
//!
//! Real station measurements and social-relation records are not
//! redistributable, so the repository ships two deterministic synthetic
//! stand-ins in the exact same file formats: a "synthetic weather" fixture
//! (stations with GPS and altitude features plus monthly measurement
//! normals) and a "synthetic office" fixture (actors with facebook, work
//! and lunch relations and two disjoint groups). Every experiment pipeline
//! runs end to end on them.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{upper_pairs, EdgeSet, GlobalGraph, MultiLayerGraph, EDGE_EPS};
use crate::ingest::{
    save_relation_table_files, save_station_table, FeatureBlock, IngestError, MonthlyRecord,
    OfficeManifest, RelationFile, RelationTable, StationTable, WeatherManifest, FORMAT_VERSION,
};
use crate::spectral::generate_smooth_signals;

const WEATHER_SEED: u64 = 0x5745_4154;
const OFFICE_SEED: u64 = 0x4f46_4649;

/// Number of stations in the weather fixture.
pub const WEATHER_STATIONS: usize = 24;
/// Edge sparsity of the fixture's feature layers.
pub const WEATHER_SPARSITY: f64 = 0.15;
/// Group sizes of the office fixture.
pub const OFFICE_GROUP_A: usize = 32;
pub const OFFICE_GROUP_B: usize = 26;
/// Planted lunch-network size and its edges outside the layer union; the
/// resulting coverability is 42/50.
pub const OFFICE_LUNCH_EDGES: usize = 50;
pub const OFFICE_UNCOVERED_LUNCH_EDGES: usize = 8;

/// The weather fixture in memory, including generation-time ground truth
/// that is not written to disk.
#[derive(Debug, Clone)]
pub struct WeatherFixture {
    pub manifest: WeatherManifest,
    pub table: StationTable,
    /// The graph each measurement's signals were generated on.
    pub true_globals: BTreeMap<String, GlobalGraph>,
    /// The layer each measurement predominantly draws from ("gps" or
    /// "altitude").
    pub dominant_layer: BTreeMap<String, String>,
}

fn smooth_columns(global: &GlobalGraph, k: usize, seed: u64) -> DMatrix<f64> {
    let signals =
        generate_smooth_signals(global.laplacian(), k, seed).expect("fixture Laplacian is valid");
    let mut data = signals.data().clone();
    // Peripheral vertices carry outsized variance under the smooth model;
    // shrink rows toward the median spread so no station becomes an
    // outlier the learners are forced to abandon.
    let row_rms: Vec<f64> = (0..data.nrows())
        .map(|i| (data.row(i).norm_squared() / k as f64).sqrt().max(1e-12))
        .collect();
    let mut sorted = row_rms.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    for (i, rms) in row_rms.iter().enumerate() {
        let shrink = median / rms;
        for m in 0..k {
            data[(i, m)] *= shrink;
        }
    }
    // Unit RMS per column so the amplitude knob below is meaningful.
    for mut col in data.column_iter_mut() {
        let rms = (col.norm_squared() / col.len() as f64).sqrt();
        if rms > 0.0 {
            col /= rms;
        }
    }
    data
}

/// Build a measurement's ground-truth graph: keep every edge of the
/// dominant layer, a fraction of the other layer, all shared edges at half
/// mask, then rewire a few edges outside the union. Every vertex keeps at
/// least two in-union edges where its union degree allows, so no learner
/// is forced to isolate a station.
fn planted_global(
    layers: &MultiLayerGraph,
    dominant: usize,
    keep_other: f64,
    rewired: usize,
    rng: &mut ChaCha8Rng,
) -> GlobalGraph {
    let n = layers.n();
    let union: Vec<(usize, usize)> = layers.support_pairs(EDGE_EPS);
    let natural = |i: usize, j: usize| {
        let wd = layers.layer(dominant).weight(i, j);
        let wo = layers.layer(1 - dominant).weight(i, j);
        if wd > 0.0 && wo > 0.0 {
            0.5 * (wd + wo)
        } else {
            wd.max(wo)
        }
    };
    let mut weights = DMatrix::zeros(n, n);
    for &(i, j) in &union {
        let wd = layers.layer(dominant).weight(i, j);
        let keep = wd > 0.0 || rng.random::<f64>() < keep_other;
        if keep {
            let value = natural(i, j);
            weights[(i, j)] = value;
            weights[(j, i)] = value;
        }
    }
    let mut degree = vec![0usize; n];
    for &(i, j) in &union {
        if weights[(i, j)] > 0.0 {
            degree[i] += 1;
            degree[j] += 1;
        }
    }
    for v in 0..n {
        while degree[v] < 2 {
            let candidate = union
                .iter()
                .filter(|&&(i, j)| (i == v || j == v) && weights[(i, j)] == 0.0)
                .max_by(|a, b| natural(a.0, a.1).total_cmp(&natural(b.0, b.1)))
                .copied();
            let Some((i, j)) = candidate else { break };
            let value = natural(i, j);
            weights[(i, j)] = value;
            weights[(j, i)] = value;
            degree[i] += 1;
            degree[j] += 1;
        }
    }

    let edges: Vec<(usize, usize)> = EdgeSet::from_weights(&weights, EDGE_EPS).iter().collect();
    let union_set = EdgeSet::from_pairs(union.iter().copied());
    let outside: Vec<(usize, usize)> = upper_pairs(n)
        .filter(|&(i, j)| !union_set.contains(i, j))
        .collect();
    let mut moved = edges.clone();
    moved.shuffle(rng);
    let mut targets = outside;
    targets.shuffle(rng);
    let mut target_iter = targets.iter();
    let mut remaining = rewired;
    for &(i, j) in &moved {
        if remaining == 0 {
            break;
        }
        // Skip moves that would leave an endpoint nearly stranded.
        if degree[i] <= 2 || degree[j] <= 2 {
            continue;
        }
        let Some(&(a, b)) = target_iter.next() else {
            break;
        };
        let w = weights[(i, j)];
        weights[(i, j)] = 0.0;
        weights[(j, i)] = 0.0;
        weights[(a, b)] = w;
        weights[(b, a)] = w;
        degree[i] -= 1;
        degree[j] -= 1;
        remaining -= 1;
    }

    GlobalGraph::from_weights(&weights)
        .expect("planted weights are symmetric and nonnegative")
        .normalized_to(n as f64)
        .expect("planted graph has edges")
}

/// Generate the synthetic weather fixture.
///
/// Stations live on the unit square with altitudes drawn from a mountain
/// bump plus noise. Temperature and snowfall signals are smooth on an
/// altitude-dominant planted graph with a strong lapse-rate component;
/// precipitation is smooth on a GPS-dominant one. Snowfall is missing at
/// two stations. All values stay well away from zero so relative errors
/// are defined.
pub fn weather_fixture() -> WeatherFixture {
    let n = WEATHER_STATIONS;
    let mut rng = ChaCha8Rng::seed_from_u64(WEATHER_SEED);
    let positions: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
    let altitude: Vec<f64> = positions
        .iter()
        .map(|p| {
            let dx = p[0] - 0.3;
            let dy = p[1] - 0.7;
            let bump = (-(dx * dx + dy * dy) / (2.0 * 0.35 * 0.35)).exp();
            let noise: f64 = rng.random();
            200.0 + 2400.0 * (0.55 * bump + 0.45 * noise).clamp(0.0, 1.0)
        })
        .collect();
    let ids: Vec<String> = (0..n).map(|i| format!("S{i:02}")).collect();

    let blocks = vec![
        FeatureBlock {
            name: "gps".to_string(),
            vectors: positions.iter().map(|p| p.to_vec()).collect(),
        },
        FeatureBlock {
            name: "altitude".to_string(),
            vectors: altitude.iter().map(|&a| vec![a]).collect(),
        },
    ];
    let layers = crate::ingest::layers_from_features(&blocks, WEATHER_SPARSITY)
        .expect("fixture feature layers are well formed");

    let alt_norm: Vec<f64> = {
        let lo = altitude.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = altitude.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        altitude.iter().map(|&a| (a - lo) / (hi - lo)).collect()
    };

    let mut measurements: BTreeMap<String, Vec<Option<MonthlyRecord>>> = BTreeMap::new();
    let mut true_globals = BTreeMap::new();
    let mut dominant_layer = BTreeMap::new();

    // Seasonal baselines, one value per month.
    let season = [
        10.5, 11.2, 13.4, 16.0, 19.1, 21.8, 23.4, 22.9, 20.2, 16.8, 13.0, 11.0,
    ];

    // Altitude-dominant measurements: temperature (complete) and snowfall
    // (missing at two stations).
    for (name, sig_seed, amplitude, lapse, offset, missing) in [
        ("temperature", 11u64, 1.8f64, 2.0f64, 0.0f64, &[][..]),
        ("snowfall", 13, 1.6, 2.2, 14.0, &[5usize, 11][..]),
    ] {
        let global = planted_global(&layers, 1, 0.55, 3, &mut rng);
        let smooth = smooth_columns(&global, 12, WEATHER_SEED.wrapping_add(sig_seed));
        let mut records = Vec::with_capacity(n);
        for i in 0..n {
            if missing.contains(&i) {
                records.push(None);
                continue;
            }
            let mut monthly = [0.0; 12];
            for (m, slot) in monthly.iter_mut().enumerate() {
                let noise: f64 = rng.random_range(-0.05..0.05);
                *slot = season[m]
                    + offset
                    + lapse * (1.0 - alt_norm[i])
                    + amplitude * smooth[(i, m)]
                    + noise;
            }
            let yearly = monthly.iter().sum::<f64>() / 12.0;
            records.push(Some(MonthlyRecord { monthly, yearly }));
        }
        measurements.insert(name.to_string(), records);
        true_globals.insert(name.to_string(), global);
        dominant_layer.insert(name.to_string(), "altitude".to_string());
    }

    // GPS-dominant measurement: precipitation.
    {
        let global = planted_global(&layers, 0, 0.55, 3, &mut rng);
        let smooth = smooth_columns(&global, 12, WEATHER_SEED.wrapping_add(17));
        let mut records = Vec::with_capacity(n);
        for i in 0..n {
            let mut monthly = [0.0; 12];
            for (m, slot) in monthly.iter_mut().enumerate() {
                let noise: f64 = rng.random_range(-0.05..0.05);
                let west_east = 6.0 * (1.0 - positions[i][0]);
                *slot = 60.0 + 3.0 * season[m] + west_east + 2.0 * smooth[(i, m)] + noise;
            }
            let yearly = monthly.iter().sum::<f64>() / 12.0;
            records.push(Some(MonthlyRecord { monthly, yearly }));
        }
        measurements.insert("precipitation".to_string(), records);
        true_globals.insert("precipitation".to_string(), global);
        dominant_layer.insert("precipitation".to_string(), "gps".to_string());
    }

    let manifest = WeatherManifest {
        format: FORMAT_VERSION.to_string(),
        kind: "weather".to_string(),
        n,
        stations_file: "stations.csv".to_string(),
        measurements_file: "measurements.csv".to_string(),
        measurements: measurements.keys().cloned().collect(),
    };
    WeatherFixture {
        manifest,
        table: StationTable {
            ids,
            gps: positions,
            altitude,
            measurements,
        },
        true_globals,
        dominant_layer,
    }
}

/// The office fixture in memory, including the planted lunch circles.
#[derive(Debug, Clone)]
pub struct OfficeFixture {
    pub manifest: OfficeManifest,
    pub table: RelationTable,
    /// Circle index of each group-A actor.
    pub circles: Vec<usize>,
}

/// Generate the synthetic office fixture.
///
/// Group A actors form lunch circles; the true lunch network has exactly
/// [`OFFICE_LUNCH_EDGES`] edges of which [`OFFICE_UNCOVERED_LUNCH_EDGES`]
/// lie outside the facebook-work union. Facebook covers most lunch edges
/// plus distractors; work covers department blocks plus the remaining
/// covered lunch edges. Group B actors hold cross-group lunch records
/// aligned with the circles.
pub fn office_fixture() -> OfficeFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(OFFICE_SEED);
    let n_a = OFFICE_GROUP_A;
    let n_total = OFFICE_GROUP_A + OFFICE_GROUP_B;

    // Eight lunch circles of four over group A; circles are cliques, so
    // with two bridges the lunch network has exactly fifty edges.
    let circle_sizes = [4usize; 8];
    let mut circles = Vec::with_capacity(n_a);
    for (c, &size) in circle_sizes.iter().enumerate() {
        circles.extend(std::iter::repeat_n(c, size));
    }

    let mut lunch: Vec<(usize, usize)> = upper_pairs(n_a)
        .filter(|&(i, j)| circles[i] == circles[j])
        .collect();
    let bridges: Vec<(usize, usize)> = {
        let mut candidates: Vec<(usize, usize)> = upper_pairs(n_a)
            .filter(|&(i, j)| circles[i] != circles[j])
            .collect();
        candidates.shuffle(&mut rng);
        candidates[..2].to_vec()
    };
    lunch.extend(bridges.iter().copied());
    lunch.sort_unstable();
    debug_assert_eq!(lunch.len(), OFFICE_LUNCH_EDGES);

    // Pick the uncovered edges, then split coverage between the layers:
    // facebook takes the cross-circle part plus a random share, work covers
    // the within-circle remainder inside its department blocks.
    let mut shuffled = lunch.clone();
    shuffled.shuffle(&mut rng);
    let uncovered: Vec<(usize, usize)> = shuffled[..OFFICE_UNCOVERED_LUNCH_EDGES].to_vec();
    let covered: Vec<(usize, usize)> = shuffled[OFFICE_UNCOVERED_LUNCH_EDGES..].to_vec();

    let department = |actor: usize| circles[actor] / 2;
    let mut fb_lunch: Vec<(usize, usize)> = covered
        .iter()
        .copied()
        .filter(|&(i, j)| circles[i] != circles[j])
        .collect();
    let mut work_lunch: Vec<(usize, usize)> = Vec::new();
    for &(i, j) in covered.iter().filter(|&&(i, j)| circles[i] == circles[j]) {
        if fb_lunch.len() < 30 && rng.random::<f64>() < 0.72 {
            fb_lunch.push((i, j));
        } else {
            work_lunch.push((i, j));
        }
    }

    let lunch_set: std::collections::BTreeSet<(usize, usize)> = lunch.iter().copied().collect();
    let mut facebook: std::collections::BTreeSet<(usize, usize)> =
        fb_lunch.iter().copied().collect();
    let mut fb_candidates: Vec<(usize, usize)> = upper_pairs(n_a)
        .filter(|e| !lunch_set.contains(e))
        .collect();
    fb_candidates.shuffle(&mut rng);
    for e in fb_candidates {
        if facebook.len() >= 66 {
            break;
        }
        facebook.insert(e);
    }

    let mut work: std::collections::BTreeSet<(usize, usize)> = work_lunch.iter().copied().collect();
    let mut work_candidates: Vec<(usize, usize)> = upper_pairs(n_a)
        .filter(|&(i, j)| {
            department(i) == department(j)
                && !lunch_set.contains(&(i, j))
                && !facebook.contains(&(i, j))
        })
        .collect();
    work_candidates.shuffle(&mut rng);
    for e in work_candidates {
        if work.len() >= 40 {
            break;
        }
        work.insert(e);
    }
    debug_assert!(covered
        .iter()
        .all(|e| facebook.contains(e) || work.contains(e)));
    debug_assert!(!uncovered
        .iter()
        .any(|e| facebook.contains(e) || work.contains(e)));

    // Cross-group lunch records: each B actor eats with one circle, each
    // member joining independently, plus occasional outsiders. Independent
    // membership keeps record columns individual, grading pair costs by
    // true adjacency.
    let mut lunch_records: Vec<(usize, usize)> = Vec::new();
    for b in 0..OFFICE_GROUP_B {
        let b_id = n_a + b;
        let circle = b % circle_sizes.len();
        let mut partners: Vec<usize> = Vec::new();
        for (a, &member_circle) in circles.iter().enumerate() {
            let p = if member_circle == circle { 0.75 } else { 0.03 };
            if rng.random::<f64>() < p {
                partners.push(a);
            }
        }
        if partners.is_empty() {
            partners.push(
                (0..n_a)
                    .find(|&a| circles[a] == circle)
                    .expect("circle exists"),
            );
        }
        for a in partners {
            lunch_records.push((a, b_id));
        }
    }

    let mut lunch_all: Vec<(usize, usize)> = lunch.clone();
    lunch_all.extend(lunch_records);
    lunch_all.sort_unstable();

    let mut relations = BTreeMap::new();
    relations.insert(
        "facebook".to_string(),
        facebook.into_iter().collect::<Vec<_>>(),
    );
    relations.insert("work".to_string(), work.into_iter().collect::<Vec<_>>());
    relations.insert("lunch".to_string(), lunch_all);

    let manifest = OfficeManifest {
        format: FORMAT_VERSION.to_string(),
        kind: "office".to_string(),
        n_actors: n_total,
        actors_file: "actors.csv".to_string(),
        relations: vec![
            RelationFile {
                name: "facebook".into(),
                file: "facebook.edges".into(),
            },
            RelationFile {
                name: "work".into(),
                file: "work.edges".into(),
            },
            RelationFile {
                name: "lunch".into(),
                file: "lunch.edges".into(),
            },
        ],
    };
    OfficeFixture {
        manifest,
        table: RelationTable {
            n_actors: n_total,
            group_a: (0..n_a).collect(),
            group_b: (n_a..n_total).collect(),
            relations,
        },
        circles,
    }
}

/// Inputs of the office experiment: the facebook and work layers over group
/// A, the cross-group lunch records as signals, and the true within-A lunch
/// network.
pub fn office_inputs(
    table: &RelationTable,
) -> Result<(MultiLayerGraph, crate::spectral::SignalMatrix, GlobalGraph), IngestError> {
    let fb = crate::ingest::layer_from_relation(table, "facebook", &table.group_a)?;
    let work = crate::ingest::layer_from_relation(table, "work", &table.group_a)?;
    let layers = MultiLayerGraph::new(vec![fb, work])?;
    let signals = crate::ingest::bipartite_signals(table, "lunch")?;
    let truth_edges = crate::ingest::relation_edges_in(table, "lunch", &table.group_a)?;
    let n = table.group_a.len();
    let mut w = DMatrix::zeros(n, n);
    for (i, j) in truth_edges.iter() {
        w[(i, j)] = 1.0;
        w[(j, i)] = 1.0;
    }
    let truth = GlobalGraph::from_weights(&w)?;
    Ok((layers, signals, truth))
}

pub fn write_weather_fixture(dir: &Path) -> Result<(), IngestError> {
    let fixture = weather_fixture();
    save_station_table(dir, &fixture.manifest, &fixture.table)
}

pub fn write_office_fixture(dir: &Path) -> Result<(), IngestError> {
    let fixture = office_fixture();
    save_relation_table_files(dir, &fixture.manifest, &fixture.table)
}
