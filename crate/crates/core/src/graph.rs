//! Vertex sets, weighted graph layers, Laplacian algebra, mask combinations
//! and validity checks.
//!
//! The central objects are [`MultiLayerGraph`] (a stack of symmetric
//! nonnegative weight matrices on one shared vertex set) and [`MaskSet`]
//! (per-layer masks on the union support whose entries sum to one across
//! layers). The masked sum of the layer weights is the weight matrix of the
//! combination, and its Laplacian is always a valid graph Laplacian.

use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

/// Absolute weight threshold below which an entry does not count as an edge.
pub const EDGE_EPS: f64 = 1e-4;

/// Tolerance used when validating symmetry and mask feasibility of inputs.
pub const FEAS_TOL: f64 = 1e-6;

/// Default tolerance for Laplacian validity checks.
pub const LAP_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex set must contain at least two vertices, got {0}")]
    TooFewVertices(usize),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric at ({i},{j}): {a} vs {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("negative weight {w} at ({i},{j})")]
    NegativeWeight { i: usize, j: usize, w: f64 },
    #[error("nonzero diagonal entry {w} at vertex {i}")]
    NonzeroDiagonal { i: usize, w: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("a multi-layer graph needs at least one layer")]
    NoLayers,
    #[error("mask value {v} at ({i},{j}) of layer {layer} is negative")]
    NegativeMask {
        layer: usize,
        i: usize,
        j: usize,
        v: f64,
    },
    #[error("mask values at ({i},{j}) sum to {sum}, expected 1")]
    MaskSumViolation { i: usize, j: usize, sum: f64 },
    #[error("mask support pair ({i},{j}) is out of range or not ordered")]
    BadSupportPair { i: usize, j: usize },
    #[error("mask layer count {got} does not match the {expected} layers")]
    LayerCountMismatch { got: usize, expected: usize },
    #[error("edge set is empty, metric undefined")]
    EmptyEdgeSet,
    #[error("entry {entries} values given for a support of {support} pairs")]
    SupportLengthMismatch { entries: usize, support: usize },
}

/// The shared vertex set of a multi-layer graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexSet {
    n: usize,
}

impl VertexSet {
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::TooFewVertices(n));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Iterate the strict upper-triangle pairs (i, j), i < j, in row-major order.
pub fn upper_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Number of strict upper-triangle pairs for an n-vertex graph.
pub fn pair_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Flat index of the ordered pair (i, j), i < j, in `upper_pairs` order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// An unordered edge set over pairs (i, j) with i < j.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeSet {
    edges: BTreeSet<(usize, usize)>,
}

impl EdgeSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Self {
        let edges = pairs
            .into_iter()
            .map(|(i, j)| if i < j { (i, j) } else { (j, i) })
            .collect();
        Self { edges }
    }

    /// Edges of a symmetric weight matrix: pairs whose weight exceeds `eps`.
    pub fn from_weights(weights: &DMatrix<f64>, eps: f64) -> Self {
        let n = weights.nrows();
        let edges = upper_pairs(n)
            .filter(|&(i, j)| weights[(i, j)].abs() > eps)
            .collect();
        Self { edges }
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.edges.insert(if i < j { (i, j) } else { (j, i) });
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&if i < j { (i, j) } else { (j, i) })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn intersection_len(&self, other: &EdgeSet) -> usize {
        self.edges.intersection(&other.edges).count()
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        EdgeSet {
            edges: self.edges.union(&other.edges).copied().collect(),
        }
    }
}

impl FromIterator<(usize, usize)> for EdgeSet {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        Self::from_pairs(iter)
    }
}

fn validate_weight_matrix(weights: &DMatrix<f64>) -> Result<(), GraphError> {
    if weights.nrows() != weights.ncols() {
        return Err(GraphError::NotSquare {
            rows: weights.nrows(),
            cols: weights.ncols(),
        });
    }
    let n = weights.nrows();
    for i in 0..n {
        if weights[(i, i)].abs() > 1e-12 {
            return Err(GraphError::NonzeroDiagonal {
                i,
                w: weights[(i, i)],
            });
        }
        for j in i + 1..n {
            let a = weights[(i, j)];
            let b = weights[(j, i)];
            if (a - b).abs() > FEAS_TOL * (1.0 + a.abs().max(b.abs())) {
                return Err(GraphError::Asymmetric { i, j, a, b });
            }
            if a < 0.0 || b < 0.0 {
                return Err(GraphError::NegativeWeight { i, j, w: a.min(b) });
            }
        }
    }
    Ok(())
}

/// One relation type: symmetric nonnegative edge weights on the shared
/// vertex set, with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphLayer {
    weights: DMatrix<f64>,
}

impl GraphLayer {
    pub fn new(weights: DMatrix<f64>) -> Result<Self, GraphError> {
        validate_weight_matrix(&weights)?;
        VertexSet::new(weights.nrows())?;
        Ok(Self { weights })
    }

    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn edge_set(&self, eps: f64) -> EdgeSet {
        EdgeSet::from_weights(&self.weights, eps)
    }

    /// Total weight volume, i.e. the sum over all ordered entries
    /// (twice the sum over unordered edges).
    pub fn volume(&self) -> f64 {
        self.weights.sum()
    }

    /// Rescale so the volume equals `volume`. A layer with no edges is
    /// returned unchanged.
    pub fn normalized_to(&self, volume: f64) -> GraphLayer {
        let v = self.volume();
        if v <= 0.0 {
            return self.clone();
        }
        GraphLayer {
            weights: &self.weights * (volume / v),
        }
    }

    pub fn laplacian(&self) -> Laplacian {
        laplacian_from_weights(&self.weights).expect("layer weights are validated")
    }
}

/// An ordered list of layers over one shared vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiLayerGraph {
    layers: Vec<GraphLayer>,
}

impl MultiLayerGraph {
    pub fn new(layers: Vec<GraphLayer>) -> Result<Self, GraphError> {
        let first = layers.first().ok_or(GraphError::NoLayers)?;
        let n = first.n();
        for layer in &layers {
            if layer.n() != n {
                return Err(GraphError::DimensionMismatch {
                    left: n,
                    right: layer.n(),
                });
            }
        }
        Ok(Self { layers })
    }

    pub fn n(&self) -> usize {
        self.layers[0].n()
    }

    pub fn t(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, t: usize) -> &GraphLayer {
        &self.layers[t]
    }

    pub fn layers(&self) -> &[GraphLayer] {
        &self.layers
    }

    /// The union support: pairs carrying an edge in at least one layer.
    pub fn union_support(&self, eps: f64) -> EdgeSet {
        let mut union = EdgeSet::new();
        for layer in &self.layers {
            union = union.union(&layer.edge_set(eps));
        }
        union
    }

    /// Sorted vector form of [`Self::union_support`], the variable support
    /// used by mask learning.
    pub fn support_pairs(&self, eps: f64) -> Vec<(usize, usize)> {
        self.union_support(eps).iter().collect()
    }

    /// Entrywise minimum over layers at a pair.
    pub fn min_weight(&self, i: usize, j: usize) -> f64 {
        self.layers
            .iter()
            .map(|l| l.weight(i, j))
            .fold(f64::INFINITY, f64::min)
    }

    /// Entrywise maximum over layers at a pair.
    pub fn max_weight(&self, i: usize, j: usize) -> f64 {
        self.layers
            .iter()
            .map(|l| l.weight(i, j))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Per-layer mask values stored sparsely on the union support.
///
/// Entries outside the support are structurally zero. Feasible masks are
/// nonnegative and sum to one across layers at every stored pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskSet {
    n: usize,
    support: Vec<(usize, usize)>,
    /// `values[t][e]` is the mask of layer `t` at `support[e]`.
    values: Vec<Vec<f64>>,
}

impl MaskSet {
    pub fn new(
        n: usize,
        support: Vec<(usize, usize)>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self, GraphError> {
        VertexSet::new(n)?;
        if values.is_empty() {
            return Err(GraphError::NoLayers);
        }
        for &(i, j) in &support {
            if i >= j || j >= n {
                return Err(GraphError::BadSupportPair { i, j });
            }
        }
        for layer in &values {
            if layer.len() != support.len() {
                return Err(GraphError::SupportLengthMismatch {
                    entries: layer.len(),
                    support: support.len(),
                });
            }
        }
        for (e, &(i, j)) in support.iter().enumerate() {
            let mut sum = 0.0;
            for (t, layer) in values.iter().enumerate() {
                let v = layer[e];
                if v < -FEAS_TOL {
                    return Err(GraphError::NegativeMask { layer: t, i, j, v });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > FEAS_TOL {
                return Err(GraphError::MaskSumViolation { i, j, sum });
            }
        }
        Ok(Self { n, support, values })
    }

    /// Masks of a single-layer graph: all ones on the support, forced by the
    /// unity-sum constraint.
    pub fn all_ones(n: usize, support: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let len = support.len();
        Self::new(n, support, vec![vec![1.0; len]])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.values.len()
    }

    pub fn support(&self) -> &[(usize, usize)] {
        &self.support
    }

    /// Mask value of layer `t` at pair (i, j); zero outside the support.
    pub fn value(&self, t: usize, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        match self.support.binary_search(&key) {
            Ok(e) => self.values[t][e],
            Err(_) => 0.0,
        }
    }

    pub fn layer_values(&self, t: usize) -> &[f64] {
        &self.values[t]
    }

    /// Dense mask matrix of layer `t` (zeros outside the support).
    pub fn to_matrix(&self, t: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for (e, &(i, j)) in self.support.iter().enumerate() {
            m[(i, j)] = self.values[t][e];
            m[(j, i)] = self.values[t][e];
        }
        m
    }
}

/// Validity report of [`check_valid_laplacian`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    pub max_asymmetry: f64,
    pub max_positive_offdiag: f64,
    pub max_rowsum: f64,
    pub tol: f64,
    pub valid: bool,
}

/// Check membership in the set of valid Laplacians: symmetric, non-positive
/// off-diagonal entries and zero row sums, all within `tol`.
pub fn check_valid_laplacian(matrix: &DMatrix<f64>, tol: f64) -> ValidityReport {
    let n = matrix.nrows().min(matrix.ncols());
    let mut asym = 0.0f64;
    let mut offdiag = 0.0f64;
    let mut rowsum = 0.0f64;
    for i in 0..n {
        let mut sum = 0.0;
        for j in 0..n {
            sum += matrix[(i, j)];
            if i != j {
                asym = asym.max((matrix[(i, j)] - matrix[(j, i)]).abs());
                offdiag = offdiag.max(matrix[(i, j)]);
            }
        }
        rowsum = rowsum.max(sum.abs());
    }
    let offdiag = offdiag.max(0.0);
    ValidityReport {
        max_asymmetry: asym,
        max_positive_offdiag: offdiag,
        max_rowsum: rowsum,
        tol,
        valid: matrix.nrows() == matrix.ncols() && asym <= tol && offdiag <= tol && rowsum <= tol,
    }
}

/// A symmetric Laplacian matrix together with its validity flag.
#[derive(Debug, Clone, PartialEq)]
pub struct Laplacian {
    matrix: DMatrix<f64>,
    valid: bool,
}

impl Laplacian {
    /// Wrap a matrix, checking membership in the valid-Laplacian set at the
    /// default tolerance.
    pub fn new(matrix: DMatrix<f64>) -> Self {
        let valid = check_valid_laplacian(&matrix, LAP_TOL).valid;
        Self { matrix, valid }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// Recover the weight matrix: W_ij = -L_ij off the diagonal, clamped at
    /// zero to absorb solver dust.
    pub fn weights(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut w = DMatrix::zeros(n, n);
        for (i, j) in upper_pairs(n) {
            let v = (-self.matrix[(i, j)]).max(0.0);
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
        w
    }

    pub fn edge_set(&self, eps: f64) -> EdgeSet {
        EdgeSet::from_weights(&self.weights(), eps)
    }

    /// The quadratic form x^T L x.
    pub fn quadratic_form(&self, x: &nalgebra::DVector<f64>) -> f64 {
        x.dot(&(&self.matrix * x))
    }
}

/// Build L = D - W from a symmetric nonnegative weight matrix.
pub fn laplacian_from_weights(weights: &DMatrix<f64>) -> Result<Laplacian, GraphError> {
    validate_weight_matrix(weights)?;
    let n = weights.nrows();
    let mut l = -weights.clone();
    for i in 0..n {
        let degree: f64 = weights.row(i).sum();
        l[(i, i)] = degree;
    }
    Ok(Laplacian {
        matrix: l,
        valid: true,
    })
}

/// The masked sum of the layer weight matrices: W_M = sum_t M_t .* W_t.
pub fn mask_combination(ml: &MultiLayerGraph, masks: &MaskSet) -> Result<DMatrix<f64>, GraphError> {
    if masks.n() != ml.n() {
        return Err(GraphError::DimensionMismatch {
            left: ml.n(),
            right: masks.n(),
        });
    }
    if masks.t() != ml.t() {
        return Err(GraphError::LayerCountMismatch {
            got: masks.t(),
            expected: ml.t(),
        });
    }
    let n = ml.n();
    let mut w = DMatrix::zeros(n, n);
    for (e, &(i, j)) in masks.support().iter().enumerate() {
        let mut v = 0.0;
        for t in 0..ml.t() {
            v += masks.layer_values(t)[e] * ml.layer(t).weight(i, j);
        }
        w[(i, j)] = v;
        w[(j, i)] = v;
    }
    Ok(w)
}

/// The Laplacian of the mask combination.
pub fn lambda_of(ml: &MultiLayerGraph, masks: &MaskSet) -> Result<Laplacian, GraphError> {
    let w = mask_combination(ml, masks)?;
    laplacian_from_weights(&w)
}

/// Coverability: the fraction of global edges covered by the layer union,
/// |E n E^L| / |E|. Undefined for an empty global edge set.
pub fn coverability(global_edges: &EdgeSet, layer_union: &EdgeSet) -> Result<f64, GraphError> {
    if global_edges.is_empty() {
        return Err(GraphError::EmptyEdgeSet);
    }
    Ok(global_edges.intersection_len(layer_union) as f64 / global_edges.len() as f64)
}

/// The learned global graph: a valid Laplacian, its weight matrix and trace.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalGraph {
    laplacian: Laplacian,
    weights: DMatrix<f64>,
    trace: f64,
}

impl GlobalGraph {
    pub fn from_laplacian(laplacian: Laplacian) -> Self {
        let weights = laplacian.weights();
        let trace = laplacian.trace();
        Self {
            laplacian,
            weights,
            trace,
        }
    }

    pub fn from_weights(weights: &DMatrix<f64>) -> Result<Self, GraphError> {
        let laplacian = laplacian_from_weights(weights)?;
        Ok(Self {
            weights: weights.clone(),
            trace: laplacian.trace(),
            laplacian,
        })
    }

    pub fn n(&self) -> usize {
        self.laplacian.n()
    }

    pub fn laplacian(&self) -> &Laplacian {
        &self.laplacian
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    /// Volume of the graph, equal to the Laplacian trace.
    pub fn volume(&self) -> f64 {
        self.weights.sum()
    }

    pub fn edge_set(&self, eps: f64) -> EdgeSet {
        EdgeSet::from_weights(&self.weights, eps)
    }

    /// Rescale the weights so the volume equals `volume`.
    pub fn normalized_to(&self, volume: f64) -> Result<Self, GraphError> {
        let v = self.volume();
        if v <= 0.0 {
            return Err(GraphError::EmptyEdgeSet);
        }
        Self::from_weights(&(&self.weights * (volume / v)))
    }
}

/// A symmetric zero-row-sum corrective term, parameterized by its strict
/// upper-triangle entries; the diagonal is the negated row sum. Off-diagonal
/// entries may take either sign, so this is not in general a valid Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectiveLaplacian {
    n: usize,
    upper: Vec<f64>,
}

impl CorrectiveLaplacian {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            upper: vec![0.0; pair_count(n)],
        }
    }

    pub fn from_upper(n: usize, upper: Vec<f64>) -> Result<Self, GraphError> {
        if upper.len() != pair_count(n) {
            return Err(GraphError::SupportLengthMismatch {
                entries: upper.len(),
                support: pair_count(n),
            });
        }
        Ok(Self { n, upper })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            let mut sum = 0.0;
            for k in 0..self.n {
                if k != i {
                    let (a, b) = if i < k { (i, k) } else { (k, i) };
                    sum += self.upper[pair_index(self.n, a, b)];
                }
            }
            -sum
        } else {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            self.upper[pair_index(self.n, a, b)]
        }
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut m = DMatrix::zeros(n, n);
        for (i, j) in upper_pairs(n) {
            let v = self.upper[pair_index(n, i, j)];
            m[(i, j)] = v;
            m[(j, i)] = v;
            m[(i, i)] -= v;
            m[(j, j)] -= v;
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.to_matrix().norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "valid={} (asymmetry {:.3e}, positive off-diagonal {:.3e}, row sum {:.3e}, tol {:.1e})",
            self.valid, self.max_asymmetry, self.max_positive_offdiag, self.max_rowsum, self.tol
        )
    }
}
