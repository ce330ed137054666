//! Synthetic benchmark generation: random geometric layers, planted masks,
//! fully complementary global graphs and coverability-controlled
//! perturbations.
//!
//! Vertices are drawn on the unit square and joined below a distance
//! quantile; edge weights come from a Gaussian kernel. The vertex set is
//! split into two groups, each layer collecting the edges incident to one
//! group. Masks keep the strong within-group edges and the full
//! intersection, dismissing the rest. Both layers share one scale factor,
//! chosen so the planted combination has volume n: the global graph is
//! normalized to the vertex count and the trace budget n stays feasible,
//! while edges shared by the layers keep identical weights on both.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{
    coverability, mask_combination, upper_pairs, EdgeSet, GlobalGraph, GraphError, GraphLayer,
    MaskSet, MultiLayerGraph, EDGE_EPS,
};
use crate::spectral::{generate_smooth_signals, SignalMatrix, SpectralError};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("degenerate geometry after {0} regeneration attempts")]
    DegenerateGeometry(usize),
    #[error(
        "cannot place {needed} rewired edges outside the union support; only {available} \
         vertex pairs are available"
    )]
    InsufficientNonUnionPairs { needed: usize, available: usize },
}

/// Configuration of the synthetic scenario.
#[derive(Debug, Clone, Copy)]
pub struct SynthConfig {
    /// Vertex count.
    pub n: usize,
    /// Gaussian kernel width.
    pub sigma: f64,
    /// Distance quantile deciding which vertex pairs become union edges.
    pub edge_quantile: f64,
    /// Kernel-weight threshold reserving strong edges for the masks.
    pub tau: f64,
    /// Target coverability of the global graph; one is fully complementary.
    pub coverability: f64,
    /// Number of generated signals.
    pub k_signals: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n: 20,
            sigma: 0.45,
            // Mean degree of about six at twenty vertices.
            edge_quantile: 6.0 / 19.0,
            tau: 0.8,
            coverability: 1.0,
            k_signals: 50,
            seed: 0,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<(), SynthError> {
        if self.n < 4 {
            return Err(SynthError::InvalidConfig(format!(
                "need at least four vertices, got {}",
                self.n
            )));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(SynthError::InvalidConfig(format!(
                "tau must lie in (0, 1), got {}",
                self.tau
            )));
        }
        if !(self.coverability > 0.0 && self.coverability <= 1.0) {
            return Err(SynthError::InvalidConfig(format!(
                "coverability must lie in (0, 1], got {}",
                self.coverability
            )));
        }
        if !(self.edge_quantile > 0.0 && self.edge_quantile < 1.0) {
            return Err(SynthError::InvalidConfig(format!(
                "edge quantile must lie in (0, 1), got {}",
                self.edge_quantile
            )));
        }
        if self.sigma <= 0.0 {
            return Err(SynthError::InvalidConfig(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if self.k_signals == 0 {
            return Err(SynthError::InvalidConfig("need at least one signal".into()));
        }
        Ok(())
    }
}

/// Gaussian kernel weight for a squared distance.
pub fn gaussian_kernel(distance: f64, sigma: f64) -> f64 {
    (-distance * distance / (2.0 * sigma * sigma)).exp()
}

/// Output of the layer-generation stage.
#[derive(Debug, Clone)]
pub struct LayerConstruction {
    /// The two layers, in the units of the target global volume.
    pub layers: MultiLayerGraph,
    /// Raw Gaussian-kernel weights on the union support.
    pub kernel: DMatrix<f64>,
    /// The two vertex groups.
    pub groups: (Vec<usize>, Vec<usize>),
    /// Strong edges reserved for the masks (kernel weight above tau).
    pub reserved: EdgeSet,
    pub union_support: EdgeSet,
}

const LAYER_SEED_STAGE: u64 = 0x6c61_7965;
const GLOBAL_SEED_STAGE: u64 = 0x676c_6f62;
const SIGNAL_SEED_STAGE: u64 = 0x7369_676e;
const MAX_GEOMETRY_RETRIES: usize = 16;

/// Generate the two geometric layers.
///
/// Points are uniform on the unit square; pairs below the distance quantile
/// form the union support with Gaussian-kernel weights; the vertex set is
/// split evenly at random and layer t collects the edges incident to its
/// group. Both layers are scaled by the common factor that brings the
/// planted combination to volume n. Degenerate draws (an empty union or an
/// empty group side) are regenerated with follow-up seeds, up to a cap.
pub fn generate_layers(cfg: &SynthConfig) -> Result<LayerConstruction, SynthError> {
    cfg.validate()?;
    for attempt in 0..MAX_GEOMETRY_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(
            cfg.seed
                .wrapping_add(LAYER_SEED_STAGE)
                .wrapping_add(attempt as u64),
        );
        if let Some(result) = try_generate_layers(cfg, &mut rng)? {
            return Ok(result);
        }
    }
    Err(SynthError::DegenerateGeometry(MAX_GEOMETRY_RETRIES))
}

fn try_generate_layers(
    cfg: &SynthConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Option<LayerConstruction>, SynthError> {
    let n = cfg.n;
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();

    let mut distances: Vec<f64> = upper_pairs(n)
        .map(|(i, j)| {
            let dx = points[i].0 - points[j].0;
            let dy = points[i].1 - points[j].1;
            (dx * dx + dy * dy).sqrt()
        })
        .collect();
    let mut sorted = distances.clone();
    sorted.sort_by(f64::total_cmp);
    let count = ((cfg.edge_quantile * sorted.len() as f64).round() as usize).clamp(1, sorted.len());
    let threshold = sorted[count - 1];

    let mut kernel = DMatrix::zeros(n, n);
    let mut union_support = EdgeSet::new();
    for (k, (i, j)) in upper_pairs(n).enumerate() {
        if distances[k] <= threshold {
            let w = gaussian_kernel(distances[k], cfg.sigma);
            kernel[(i, j)] = w;
            kernel[(j, i)] = w;
            union_support.insert(i, j);
        }
    }
    distances.clear();
    if union_support.is_empty() {
        return Ok(None);
    }

    // Random even split into the two neighborhood groups.
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut group1 = order[..n / 2].to_vec();
    let mut group2 = order[n / 2..].to_vec();
    group1.sort_unstable();
    group2.sort_unstable();
    if group1.is_empty() || group2.is_empty() {
        return Ok(None);
    }

    let mut in_group1 = vec![false; n];
    for &v in &group1 {
        in_group1[v] = true;
    }

    // Layer t holds the union edges incident to group t.
    let mut w1 = DMatrix::zeros(n, n);
    let mut w2 = DMatrix::zeros(n, n);
    for (i, j) in union_support.iter() {
        let w = kernel[(i, j)];
        if in_group1[i] || in_group1[j] {
            w1[(i, j)] = w;
            w1[(j, i)] = w;
        }
        if !in_group1[i] || !in_group1[j] {
            w2[(i, j)] = w;
            w2[(j, i)] = w;
        }
    }
    if w1.sum() <= 0.0 || w2.sum() <= 0.0 {
        return Ok(None);
    }

    let reserved = EdgeSet::from_pairs(
        union_support
            .iter()
            .filter(|&(i, j)| kernel[(i, j)] > cfg.tau),
    );

    // Volume of the planted combination before scaling: the cross edges
    // survive at full weight, within-group edges only when reserved.
    let mut planted_volume = 0.0;
    for (i, j) in union_support.iter() {
        let cross = in_group1[i] != in_group1[j];
        if cross || reserved.contains(i, j) {
            planted_volume += 2.0 * kernel[(i, j)];
        }
    }
    if planted_volume <= 0.0 {
        return Ok(None);
    }
    let scale = n as f64 / planted_volume;

    let layers = MultiLayerGraph::new(vec![
        GraphLayer::new(w1 * scale)?,
        GraphLayer::new(w2 * scale)?,
    ])?;
    Ok(Some(LayerConstruction {
        layers,
        kernel,
        groups: (group1, group2),
        reserved,
        union_support,
    }))
}

/// Plant the ground-truth masks.
///
/// Intersection edges (between the groups, hence in both layers) get 0.5 in
/// each mask. Reserved within-group edges get mask one on their own layer.
/// Any other within-group edge is dismissed: the unit mask weight is parked
/// on the opposite layer, where the edge carries no weight, so the unity-sum
/// constraint holds while the edge drops out of the combination.
pub fn plant_masks(construction: &LayerConstruction) -> Result<MaskSet, SynthError> {
    let n = construction.layers.n();
    let support: Vec<(usize, usize)> = construction.union_support.iter().collect();
    let mut in_group1 = vec![false; n];
    for &v in &construction.groups.0 {
        in_group1[v] = true;
    }
    let mut values = vec![vec![0.0; support.len()]; 2];
    for (e, &(i, j)) in support.iter().enumerate() {
        let cross = in_group1[i] != in_group1[j];
        if cross {
            values[0][e] = 0.5;
            values[1][e] = 0.5;
        } else {
            let own = if in_group1[i] { 0 } else { 1 };
            if construction.reserved.contains(i, j) {
                values[own][e] = 1.0;
            } else {
                values[1 - own][e] = 1.0;
            }
        }
    }
    Ok(MaskSet::new(n, support, values)?)
}

/// Build the ground-truth global graph from the mask combination.
///
/// At full coverability the global graph is the mask combination itself. A
/// lower target rewires `ceil((1 - c) |E|)` of its edges to uniformly random
/// vertex pairs outside the union support, preserving each rewired edge's
/// weight. Either way the volume is normalized to n. Returns the graph and
/// the measured coverability.
pub fn make_global(
    construction: &LayerConstruction,
    masks: &MaskSet,
    cfg: &SynthConfig,
) -> Result<(GlobalGraph, f64), SynthError> {
    cfg.validate()?;
    let n = construction.layers.n();
    let mut weights = mask_combination(&construction.layers, masks)?;
    let edges: Vec<(usize, usize)> = EdgeSet::from_weights(&weights, EDGE_EPS).iter().collect();

    if cfg.coverability < 1.0 {
        let n_move = ((1.0 - cfg.coverability) * edges.len() as f64).ceil() as usize;
        if n_move > 0 {
            let outside: Vec<(usize, usize)> = upper_pairs(n)
                .filter(|&(i, j)| !construction.union_support.contains(i, j))
                .collect();
            if outside.len() < n_move {
                return Err(SynthError::InsufficientNonUnionPairs {
                    needed: n_move,
                    available: outside.len(),
                });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(GLOBAL_SEED_STAGE));
            let moved: Vec<(usize, usize)> = {
                let mut pool = edges.clone();
                pool.shuffle(&mut rng);
                pool[..n_move].to_vec()
            };
            let targets: Vec<(usize, usize)> = {
                let mut pool = outside;
                pool.shuffle(&mut rng);
                pool[..n_move].to_vec()
            };
            for (&(i, j), &(a, b)) in moved.iter().zip(&targets) {
                let w = weights[(i, j)];
                weights[(i, j)] = 0.0;
                weights[(j, i)] = 0.0;
                weights[(a, b)] = w;
                weights[(b, a)] = w;
            }
        }
    }

    let global = GlobalGraph::from_weights(&weights)?.normalized_to(n as f64)?;
    let actual = coverability(&global.edge_set(EDGE_EPS), &construction.union_support)?;
    Ok((global, actual))
}

/// A complete synthetic instance.
#[derive(Debug, Clone)]
pub struct SynthInstance {
    pub config: SynthConfig,
    pub layers: MultiLayerGraph,
    pub groups: (Vec<usize>, Vec<usize>),
    pub true_masks: MaskSet,
    pub true_global: GlobalGraph,
    pub signals: SignalMatrix,
    pub coverability_actual: f64,
}

/// Compose layer generation, mask planting, global-graph construction and
/// smooth-signal generation. Fully reproducible for a fixed seed.
pub fn generate_instance(cfg: &SynthConfig) -> Result<SynthInstance, SynthError> {
    let construction = generate_layers(cfg)?;
    let true_masks = plant_masks(&construction)?;
    let (true_global, coverability_actual) = make_global(&construction, &true_masks, cfg)?;
    let signals = generate_smooth_signals(
        true_global.laplacian(),
        cfg.k_signals,
        cfg.seed.wrapping_add(SIGNAL_SEED_STAGE),
    )?;
    Ok(SynthInstance {
        config: *cfg,
        layers: construction.layers,
        groups: construction.groups,
        true_masks,
        true_global,
        signals,
        coverability_actual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::check_valid_laplacian;

    #[test]
    fn kernel_of_coincident_points_is_one() {
        assert_eq!(gaussian_kernel(0.0, 0.45), 1.0);
    }

    #[test]
    fn kernel_at_half_weight_distance() {
        // w = 0.5 exactly at d = sigma sqrt(2 ln 2).
        let sigma = 0.45;
        let d = sigma * (2.0 * 2.0f64.ln()).sqrt();
        assert!((gaussian_kernel(d, sigma) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn kernel_weights_lie_in_unit_interval() {
        let construction = generate_layers(&SynthConfig::default()).unwrap();
        for (i, j) in construction.union_support.iter() {
            let w = construction.kernel[(i, j)];
            assert!(w > 0.0 && w <= 1.0, "kernel weight {w}");
        }
    }

    #[test]
    fn layers_cover_the_union_and_share_cross_edges() {
        let construction = generate_layers(&SynthConfig::default()).unwrap();
        let l1 = construction.layers.layer(0).edge_set(EDGE_EPS);
        let l2 = construction.layers.layer(1).edge_set(EDGE_EPS);
        assert_eq!(l1.union(&l2), construction.union_support);

        let mut in_group1 = vec![false; 20];
        for &v in &construction.groups.0 {
            in_group1[v] = true;
        }
        for (i, j) in construction.union_support.iter() {
            if in_group1[i] != in_group1[j] {
                assert!(l1.contains(i, j) && l2.contains(i, j));
            }
        }
    }

    #[test]
    fn planted_combination_has_volume_n() {
        let construction = generate_layers(&SynthConfig::default()).unwrap();
        let masks = plant_masks(&construction).unwrap();
        let wm = mask_combination(&construction.layers, &masks).unwrap();
        assert!((wm.sum() - 20.0).abs() < 1e-9);
        // Shared edges carry identical weights on both layers.
        let l1 = construction.layers.layer(0);
        let l2 = construction.layers.layer(1);
        for (i, j) in construction.union_support.iter() {
            let (a, b) = (l1.weight(i, j), l2.weight(i, j));
            if a > 0.0 && b > 0.0 {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn planted_masks_follow_the_rules() {
        let construction = generate_layers(&SynthConfig {
            seed: 3,
            ..Default::default()
        })
        .unwrap();
        let masks = plant_masks(&construction).unwrap();
        let mut in_group1 = vec![false; 20];
        for &v in &construction.groups.0 {
            in_group1[v] = true;
        }
        let mut saw_cross = false;
        let mut saw_reserved = false;
        for &(i, j) in masks.support() {
            let m = (masks.value(0, i, j), masks.value(1, i, j));
            if in_group1[i] != in_group1[j] {
                assert_eq!(m, (0.5, 0.5));
                saw_cross = true;
            } else {
                let own = if in_group1[i] { 0 } else { 1 };
                if construction.reserved.contains(i, j) {
                    assert_eq!(if own == 0 { m.0 } else { m.1 }, 1.0);
                    saw_reserved = true;
                } else {
                    // Dismissed: the unit sits on the weightless layer.
                    assert_eq!(if own == 0 { m.1 } else { m.0 }, 1.0);
                    assert_eq!(construction.layers.layer(1 - own).weight(i, j), 0.0);
                }
            }
        }
        assert!(saw_cross && saw_reserved);
    }

    #[test]
    fn fully_complementary_global_is_the_normalized_combination() {
        let cfg = SynthConfig {
            seed: 5,
            ..Default::default()
        };
        let construction = generate_layers(&cfg).unwrap();
        let masks = plant_masks(&construction).unwrap();
        let (global, cov) = make_global(&construction, &masks, &cfg).unwrap();
        assert_eq!(cov, 1.0);
        let wm = mask_combination(&construction.layers, &masks).unwrap();
        let scaled = &wm * (20.0 / wm.sum());
        assert!((global.weights() - scaled).amax() < 1e-12);
        assert!((global.volume() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn perturbed_global_hits_the_coverability_target() {
        let cfg = SynthConfig {
            seed: 7,
            coverability: 0.7,
            ..Default::default()
        };
        let construction = generate_layers(&cfg).unwrap();
        let masks = plant_masks(&construction).unwrap();
        let base_edges = EdgeSet::from_weights(
            &mask_combination(&construction.layers, &masks).unwrap(),
            EDGE_EPS,
        )
        .len();
        let (global, cov) = make_global(&construction, &masks, &cfg).unwrap();

        // Exactly ceil((1 - c) |E|) edges moved outside; quantization keeps
        // the measured value within one edge of the target.
        let moved = ((1.0 - 0.7) * base_edges as f64).ceil() as usize;
        let edges = global.edge_set(EDGE_EPS);
        let outside = edges.len() - edges.intersection_len(&construction.union_support);
        assert_eq!(outside, moved);
        assert!((cov - 0.7).abs() <= 1.0 / base_edges as f64 + 1e-12);
    }

    #[test]
    fn instance_is_reproducible_and_consistent() {
        let cfg = SynthConfig {
            seed: 11,
            k_signals: 5,
            ..Default::default()
        };
        let a = generate_instance(&cfg).unwrap();
        let b = generate_instance(&cfg).unwrap();
        assert_eq!(a.signals.data(), b.signals.data());
        assert_eq!(a.true_global.weights(), b.true_global.weights());
        assert_eq!((a.signals.n(), a.signals.k()), (20, 5));
        assert!(check_valid_laplacian(a.true_global.laplacian().matrix(), 1e-9).valid);
        assert!(a.coverability_actual == 1.0);
    }

    #[test]
    fn default_protocol_dimensions() {
        let instance = generate_instance(&SynthConfig {
            seed: 13,
            ..Default::default()
        })
        .unwrap();
        assert_eq!(instance.layers.t(), 2);
        assert_eq!((instance.signals.n(), instance.signals.k()), (20, 50));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad_tau = SynthConfig {
            tau: 1.5,
            ..Default::default()
        };
        assert!(matches!(
            generate_layers(&bad_tau),
            Err(SynthError::InvalidConfig(_))
        ));
        let bad_cov = SynthConfig {
            coverability: 0.0,
            ..Default::default()
        };
        assert!(matches!(
            generate_instance(&bad_cov),
            Err(SynthError::InvalidConfig(_))
        ));
    }

    #[test]
    fn extreme_coverability_without_room_is_rejected() {
        // A dense union leaves too few outside pairs for heavy rewiring.
        let cfg = SynthConfig {
            seed: 17,
            edge_quantile: 0.95,
            coverability: 0.05,
            ..Default::default()
        };
        let construction = generate_layers(&cfg).unwrap();
        let masks = plant_masks(&construction).unwrap();
        match make_global(&construction, &masks, &cfg) {
            Err(SynthError::InsufficientNonUnionPairs { .. }) => {}
            other => panic!("expected insufficient pairs, got {other:?}"),
        }
    }
}
