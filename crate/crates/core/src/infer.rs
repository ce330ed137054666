//! The graph-learning problems: mask learning with a corrective term, its
//! reduced LP form, the signal-only baseline, the support-informed baseline
//! and the convex layer combination.
//!
//! Every solver canonicalizes to a [`crate::qp::QpProblem`], solves it
//! with the interior-point engine and decodes the variables back into
//! masks, corrective terms and global graphs.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::graph::{
    lambda_of, pair_count, pair_index, upper_pairs, CorrectiveLaplacian, GlobalGraph, GraphError,
    Laplacian, MaskSet, MultiLayerGraph, EDGE_EPS,
};
use crate::qp::{self, KktReport, QpError, QpProblem, QpStatus, SolveSettings, VarKind};
use crate::spectral::{SignalMatrix, SpectralError};

#[derive(Debug, Error)]
pub enum InferError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Qp(#[from] QpError),
    #[error("volume {trace} is outside the feasible interval [{lo}, {hi}] spanned by the layers")]
    InfeasibleVolume { trace: f64, lo: f64, hi: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("the union support of the layers is empty")]
    EmptyUnion,
    #[error("solver finished with status {status}; max KKT residual {residual:.3e}")]
    NotOptimal { status: QpStatus, residual: f64 },
    #[error("the global graph has no edges on the union support; contributions undefined")]
    NoContributableEdges,
}

/// Configuration of the mask-learning solvers.
#[derive(Debug, Clone, Copy)]
pub struct MlConfig {
    /// Penalty weight on the corrective term.
    pub gamma: f64,
    /// Trace of the learned Laplacian, fixing the global-graph volume.
    pub trace: f64,
    /// Whether the corrective term is part of the program.
    pub use_corrective: bool,
}

impl MlConfig {
    pub fn full(gamma: f64, trace: f64) -> Self {
        Self {
            gamma,
            trace,
            use_corrective: true,
        }
    }

    pub fn reduced(trace: f64) -> Self {
        Self {
            gamma: 0.0,
            trace,
            use_corrective: false,
        }
    }

    fn validate(&self) -> Result<(), InferError> {
        if self.trace <= 0.0 {
            return Err(InferError::InvalidConfig(format!(
                "trace must be positive, got {}",
                self.trace
            )));
        }
        if self.use_corrective && self.gamma <= 0.0 {
            return Err(InferError::InvalidConfig(format!(
                "gamma must be positive when the corrective term is used, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Gamma chosen proportionally to the squared norm of the observation
/// matrix.
pub fn auto_gamma(gamma_rel: f64, x: &SignalMatrix) -> f64 {
    gamma_rel * x.energy()
}

/// Outcome of a mask-learning solve.
#[derive(Debug, Clone)]
pub struct MlResult {
    pub masks: MaskSet,
    pub corrective: CorrectiveLaplacian,
    pub global: GlobalGraph,
    /// Percentage of global edges drawn from each layer; `None` when the
    /// global graph has no edges on the union support.
    pub layer_contributions: Option<Vec<f64>>,
    pub objective: f64,
    pub status: QpStatus,
    pub kkt: KktReport,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

/// Outcome of the baseline graph-learning solvers.
#[derive(Debug, Clone)]
pub struct GlResult {
    pub global: GlobalGraph,
    pub objective: f64,
    pub status: QpStatus,
    pub kkt: KktReport,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

/// Outcome of the convex layer combination.
#[derive(Debug, Clone)]
pub struct GlConvResult {
    pub alphas: Vec<f64>,
    pub global: GlobalGraph,
    pub objective: f64,
    pub status: QpStatus,
    pub kkt: KktReport,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

/// Pairwise smoothness costs: `c[(i,j)] = sum_k (X_ik - X_jk)^2`, so that
/// tr(X' L X) = sum_{i<j} W_ij c_ij for any valid Laplacian.
pub fn smoothness_costs(x: &SignalMatrix) -> DMatrix<f64> {
    let n = x.n();
    let data = x.data();
    let mut c = DMatrix::zeros(n, n);
    for (i, j) in upper_pairs(n) {
        let mut acc = 0.0;
        for k in 0..x.k() {
            let d = data[(i, k)] - data[(j, k)];
            acc += d * d;
        }
        c[(i, j)] = acc;
        c[(j, i)] = acc;
    }
    c
}

/// Feasible volume interval of a mask combination: the sums over ordered
/// pairs of the entrywise minimum and maximum layer weights. A trace budget
/// for the reduced program must lie inside it.
pub fn volume_interval(ml: &MultiLayerGraph) -> (f64, f64) {
    let mut lo = 0.0;
    let mut hi = 0.0;
    for (i, j) in ml.union_support(EDGE_EPS).iter() {
        lo += 2.0 * ml.min_weight(i, j).max(0.0);
        hi += 2.0 * ml.max_weight(i, j);
    }
    (lo, hi)
}

fn degeneracy_warning(costs: &DMatrix<f64>, x: &SignalMatrix) -> Option<String> {
    if costs.amax() <= 1e-12 * (1.0 + x.energy()) {
        Some(
            "signal set is degenerate (columns are constant); the solution is \
             determined by the regularizer"
                .to_string(),
        )
    } else {
        None
    }
}

/// Share-vertex Hessian of the squared Frobenius norm of a zero-row-sum
/// symmetric matrix parameterized by its upper-triangle entries: the norm
/// equals one half of `z' H z` with `H[e,e] = 8` and `H[e,f] = 2` when the
/// pairs share a vertex.
fn frobenius_hessian(pairs: &[(usize, usize)]) -> DMatrix<f64> {
    let e = pairs.len();
    let mut h = DMatrix::zeros(e, e);
    for a in 0..e {
        h[(a, a)] = 8.0;
        let (i, j) = pairs[a];
        for b in a + 1..e {
            let (k, l) = pairs[b];
            let shared = usize::from(i == k)
                + usize::from(i == l)
                + usize::from(j == k)
                + usize::from(j == l);
            if shared > 0 {
                h[(a, b)] = 2.0 * shared as f64;
                h[(b, a)] = h[(a, b)];
            }
        }
    }
    h
}

struct MaskProblem {
    problem: QpProblem,
    support: Vec<(usize, usize)>,
    t: usize,
    n: usize,
    with_corrective: bool,
}

impl MaskProblem {
    fn mask_var(&self, e: usize, t: usize) -> usize {
        e * self.t + t
    }

    fn ell_offset(&self) -> usize {
        self.support.len() * self.t
    }

    fn decode(&self, z: &DVector<f64>) -> Result<(MaskSet, CorrectiveLaplacian), GraphError> {
        let t = self.t;
        let mut values = vec![vec![0.0; self.support.len()]; t];
        for (e, _) in self.support.iter().enumerate() {
            for (tt, layer) in values.iter_mut().enumerate() {
                layer[e] = z[self.mask_var(e, tt)];
            }
        }
        let masks = MaskSet::new(self.n, self.support.clone(), values)?;
        let corrective = if self.with_corrective {
            let offset = self.ell_offset();
            let upper: Vec<f64> = (0..pair_count(self.n)).map(|k| z[offset + k]).collect();
            CorrectiveLaplacian::from_upper(self.n, upper)?
        } else {
            CorrectiveLaplacian::zero(self.n)
        };
        Ok((masks, corrective))
    }
}

fn build_mask_problem(
    ml: &MultiLayerGraph,
    costs: &DMatrix<f64>,
    cfg: &MlConfig,
) -> Result<MaskProblem, InferError> {
    let n = ml.n();
    let t = ml.t();
    let support = ml.support_pairs(EDGE_EPS);
    if support.is_empty() {
        return Err(InferError::EmptyUnion);
    }
    let e = support.len();
    let n_mask = e * t;
    let n_ell = if cfg.use_corrective { pair_count(n) } else { 0 };
    let n_vars = n_mask + n_ell;

    let mut q = DVector::zeros(n_vars);
    let mut names = Vec::with_capacity(n_vars);
    for (idx_e, &(i, j)) in support.iter().enumerate() {
        for tt in 0..t {
            q[idx_e * t + tt] = ml.layer(tt).weight(i, j) * costs[(i, j)];
            names.push(VarKind::Mask { layer: tt, i, j });
        }
    }
    let mut p = DMatrix::zeros(n_vars, n_vars);
    if cfg.use_corrective {
        let all_pairs: Vec<(usize, usize)> = upper_pairs(n).collect();
        for (k, &(i, j)) in all_pairs.iter().enumerate() {
            q[n_mask + k] = -costs[(i, j)];
            names.push(VarKind::Corrective { i, j });
        }
        let h = frobenius_hessian(&all_pairs);
        p.view_mut((n_mask, n_mask), (n_ell, n_ell))
            .copy_from(&(h * cfg.gamma));
    }

    // Equalities: one unity-sum row per support pair, one trace row.
    let n_eq = e + 1;
    let mut a = DMatrix::zeros(n_eq, n_vars);
    let mut b = DVector::zeros(n_eq);
    for (idx_e, _) in support.iter().enumerate() {
        for tt in 0..t {
            a[(idx_e, idx_e * t + tt)] = 1.0;
        }
        b[idx_e] = 1.0;
    }
    let trace_row = e;
    for (idx_e, &(i, j)) in support.iter().enumerate() {
        for tt in 0..t {
            a[(trace_row, idx_e * t + tt)] = 2.0 * ml.layer(tt).weight(i, j);
        }
    }
    if cfg.use_corrective {
        for k in 0..n_ell {
            a[(trace_row, n_mask + k)] = -2.0;
        }
    }
    b[trace_row] = cfg.trace;

    // Inequalities: mask nonnegativity, and for the corrective form the
    // valid-Laplacian rows L_ij <= 0 over every vertex pair.
    let n_ineq = n_mask + if cfg.use_corrective { pair_count(n) } else { 0 };
    let mut g = DMatrix::zeros(n_ineq, n_vars);
    let h = DVector::zeros(n_ineq);
    for v in 0..n_mask {
        g[(v, v)] = -1.0;
    }
    if cfg.use_corrective {
        for (k, (i, j)) in upper_pairs(n).enumerate() {
            let row = n_mask + k;
            g[(row, n_mask + pair_index(n, i, j))] = 1.0;
            if let Ok(idx_e) = support.binary_search(&(i, j)) {
                for tt in 0..t {
                    g[(row, idx_e * t + tt)] = -ml.layer(tt).weight(i, j);
                }
            }
        }
    }

    let problem = QpProblem::new(p, q, a, b, g, h)?.with_var_names(names);
    Ok(MaskProblem {
        problem,
        support,
        t,
        n,
        with_corrective: cfg.use_corrective,
    })
}

fn require_optimal(status: QpStatus, kkt: &KktReport) -> Result<(), InferError> {
    if status != QpStatus::Optimal {
        return Err(InferError::NotOptimal {
            status,
            residual: kkt.max_residual(),
        });
    }
    Ok(())
}

fn finish_ml(
    ml: &MultiLayerGraph,
    layout: &MaskProblem,
    solution: qp::QpSolution,
    warnings: Vec<String>,
) -> Result<MlResult, InferError> {
    require_optimal(solution.status, &solution.kkt)?;
    let (masks, corrective) = layout.decode(&solution.z)?;
    let lap_matrix = lambda_of(ml, &masks)?.matrix() + corrective.to_matrix();
    let global = GlobalGraph::from_laplacian(Laplacian::new(lap_matrix));
    let layer_contributions = contributions_from(&masks, &global).ok();
    Ok(MlResult {
        masks,
        corrective,
        global,
        layer_contributions,
        objective: solution.objective,
        status: solution.status,
        kkt: solution.kkt,
        iterations: solution.iterations,
        warnings,
    })
}

/// Full mask learning: masks plus a corrective Laplacian term, penalized by
/// `gamma`, under mask feasibility, Laplacian validity and the trace budget.
pub fn solve_ml_full(
    ml: &MultiLayerGraph,
    x: &SignalMatrix,
    cfg: &MlConfig,
    settings: &SolveSettings,
) -> Result<MlResult, InferError> {
    let mut cfg = *cfg;
    cfg.use_corrective = true;
    cfg.validate()?;
    check_dims(ml, x)?;
    let costs = smoothness_costs(x);
    let warnings: Vec<String> = degeneracy_warning(&costs, x).into_iter().collect();
    let layout = build_mask_problem(ml, &costs, &cfg)?;
    let solution = qp::solve(&layout.problem, settings)?;
    finish_ml(ml, &layout, solution, warnings)
}

/// Reduced mask learning: the corrective term is fixed at zero and the
/// program is a linear one over the masks. The trace budget must lie in the
/// feasible volume interval of the layers.
///
/// At either endpoint of the interval the weight matrix is forced: the
/// entrywise weight-interval bound plus the trace equality pin every
/// combined weight at its minimum (or maximum) over the layers, so the
/// solution is assembled in closed form instead of going through the
/// solver, whose iterates need a nonempty relative interior.
pub fn solve_ml_reduced(
    ml: &MultiLayerGraph,
    x: &SignalMatrix,
    cfg: &MlConfig,
    settings: &SolveSettings,
) -> Result<MlResult, InferError> {
    let mut cfg = *cfg;
    cfg.use_corrective = false;
    cfg.validate()?;
    check_dims(ml, x)?;
    let (lo, hi) = volume_interval(ml);
    let slack = 1e-9 * hi.max(1.0);
    if cfg.trace < lo - slack || cfg.trace > hi + slack {
        return Err(InferError::InfeasibleVolume {
            trace: cfg.trace,
            lo,
            hi,
        });
    }
    let costs = smoothness_costs(x);
    let warnings: Vec<String> = degeneracy_warning(&costs, x).into_iter().collect();
    if cfg.trace <= lo + slack {
        return endpoint_solution(ml, x, Extreme::Min, warnings);
    }
    if cfg.trace >= hi - slack {
        return endpoint_solution(ml, x, Extreme::Max, warnings);
    }
    let layout = build_mask_problem(ml, &costs, &cfg)?;
    let solution = qp::solve(&layout.problem, settings)?;
    finish_ml(ml, &layout, solution, warnings)
}

#[derive(Clone, Copy, PartialEq)]
enum Extreme {
    Min,
    Max,
}

/// Closed-form solution at a volume-interval endpoint: each mask puts its
/// unit on the layers attaining the extreme weight, split equally on ties.
fn endpoint_solution(
    ml: &MultiLayerGraph,
    x: &SignalMatrix,
    extreme: Extreme,
    warnings: Vec<String>,
) -> Result<MlResult, InferError> {
    let support = ml.support_pairs(EDGE_EPS);
    let t = ml.t();
    let mut values = vec![vec![0.0; support.len()]; t];
    for (e, &(i, j)) in support.iter().enumerate() {
        let target = match extreme {
            Extreme::Min => ml.min_weight(i, j),
            Extreme::Max => ml.max_weight(i, j),
        };
        let tied: Vec<usize> = (0..t)
            .filter(|&tt| (ml.layer(tt).weight(i, j) - target).abs() <= 1e-12)
            .collect();
        for &tt in &tied {
            values[tt][e] = 1.0 / tied.len() as f64;
        }
    }
    let masks = MaskSet::new(ml.n(), support, values)?;
    let corrective = CorrectiveLaplacian::zero(ml.n());
    let global =
        GlobalGraph::from_laplacian(Laplacian::new(lambda_of(ml, &masks)?.matrix().clone()));
    let objective = ml_objective(ml, x, &masks, &corrective, 0.0)?;
    let layer_contributions = contributions_from(&masks, &global).ok();
    Ok(MlResult {
        masks,
        corrective,
        global,
        layer_contributions,
        objective,
        status: QpStatus::Optimal,
        // The construction satisfies every constraint exactly; no dual
        // certificate is produced for the forced point.
        kkt: KktReport::default(),
        iterations: 0,
        warnings,
    })
}

fn check_dims(ml: &MultiLayerGraph, x: &SignalMatrix) -> Result<(), InferError> {
    if ml.n() != x.n() {
        return Err(InferError::Spectral(SpectralError::DimensionMismatch {
            signal: x.n(),
            laplacian: ml.n(),
        }));
    }
    Ok(())
}

/// Shared core of the signal-only and support-informed baselines: learn
/// nonnegative edge weights on `pairs` minimizing
/// tr(X' L X) + gamma ||L||_F^2 under tr(L) = trace.
fn solve_weight_learning(
    n: usize,
    pairs: Vec<(usize, usize)>,
    costs: &DMatrix<f64>,
    gamma: f64,
    trace: f64,
    settings: &SolveSettings,
    warnings: Vec<String>,
) -> Result<GlResult, InferError> {
    let e = pairs.len();
    let q = DVector::from_fn(e, |k, _| costs[pairs[k]]);
    let p = frobenius_hessian(&pairs) * gamma;
    let mut a = DMatrix::zeros(1, e);
    for k in 0..e {
        a[(0, k)] = 2.0;
    }
    let b = DVector::from_element(1, trace);
    let g = -DMatrix::identity(e, e);
    let h = DVector::zeros(e);
    let names = pairs
        .iter()
        .map(|&(i, j)| VarKind::Weight { i, j })
        .collect();
    let problem = QpProblem::new(p, q, a, b, g, h)?.with_var_names(names);
    let solution = qp::solve(&problem, settings)?;
    require_optimal(solution.status, &solution.kkt)?;

    let mut w = DMatrix::zeros(n, n);
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let v = solution.z[k].max(0.0);
        w[(i, j)] = v;
        w[(j, i)] = v;
    }
    let global = GlobalGraph::from_weights(&w)?;
    Ok(GlResult {
        global,
        objective: solution.objective,
        status: solution.status,
        kkt: solution.kkt,
        iterations: solution.iterations,
        warnings,
    })
}

/// Signal-only baseline: learn a valid Laplacian of fixed trace minimizing
/// smoothness plus a squared Frobenius regularizer.
pub fn solve_gl_sigrep(
    x: &SignalMatrix,
    gamma: f64,
    trace: f64,
    settings: &SolveSettings,
) -> Result<GlResult, InferError> {
    if gamma < 0.0 {
        return Err(InferError::InvalidConfig(format!(
            "gamma must be nonnegative, got {gamma}"
        )));
    }
    if trace <= 0.0 {
        return Err(InferError::InvalidConfig(format!(
            "trace must be positive, got {trace}"
        )));
    }
    let costs = smoothness_costs(x);
    let warnings: Vec<String> = degeneracy_warning(&costs, x).into_iter().collect();
    let pairs: Vec<(usize, usize)> = upper_pairs(x.n()).collect();
    solve_weight_learning(x.n(), pairs, &costs, gamma, trace, settings, warnings)
}

/// Support-informed baseline: the signal-only program with its solution
/// space restricted to the union support of the layers.
pub fn solve_gl_informed(
    ml: &MultiLayerGraph,
    x: &SignalMatrix,
    gamma: f64,
    trace: f64,
    settings: &SolveSettings,
) -> Result<GlResult, InferError> {
    if gamma < 0.0 {
        return Err(InferError::InvalidConfig(format!(
            "gamma must be nonnegative, got {gamma}"
        )));
    }
    if trace <= 0.0 {
        return Err(InferError::InvalidConfig(format!(
            "trace must be positive, got {trace}"
        )));
    }
    check_dims(ml, x)?;
    let pairs = ml.support_pairs(EDGE_EPS);
    if pairs.is_empty() {
        return Err(InferError::EmptyUnion);
    }
    let costs = smoothness_costs(x);
    let warnings: Vec<String> = degeneracy_warning(&costs, x).into_iter().collect();
    solve_weight_learning(x.n(), pairs, &costs, gamma, trace, settings, warnings)
}

/// Convex combination of the layer Laplacians: learn simplex coefficients
/// alpha minimizing smoothness plus `beta ||alpha||^2`. The returned graph is
/// optionally volume-normalized for comparability.
pub fn solve_gl_conv(
    ml: &MultiLayerGraph,
    x: &SignalMatrix,
    beta: f64,
    normalize_volume: Option<f64>,
    settings: &SolveSettings,
) -> Result<GlConvResult, InferError> {
    if beta < 0.0 {
        return Err(InferError::InvalidConfig(format!(
            "beta must be nonnegative, got {beta}"
        )));
    }
    check_dims(ml, x)?;
    let t = ml.t();
    let costs = smoothness_costs(x);
    let warnings: Vec<String> = degeneracy_warning(&costs, x).into_iter().collect();

    // Data term is linear in alpha: tr(X' L_t X) per layer.
    let q = DVector::from_fn(t, |tt, _| {
        upper_pairs(ml.n())
            .map(|(i, j)| ml.layer(tt).weight(i, j) * costs[(i, j)])
            .sum()
    });
    let p = DMatrix::from_diagonal_element(t, t, 2.0 * beta);
    let a = DMatrix::from_element(1, t, 1.0);
    let b = DVector::from_element(1, 1.0);
    let g = -DMatrix::identity(t, t);
    let h = DVector::zeros(t);
    let names = (0..t).map(|layer| VarKind::Alpha { layer }).collect();
    let problem = QpProblem::new(p, q, a, b, g, h)?.with_var_names(names);
    let solution = qp::solve(&problem, settings)?;
    require_optimal(solution.status, &solution.kkt)?;

    let alphas: Vec<f64> = solution.z.iter().copied().collect();
    let n = ml.n();
    let mut w = DMatrix::zeros(n, n);
    for (tt, &alpha) in alphas.iter().enumerate() {
        w += ml.layer(tt).weights() * alpha.max(0.0);
    }
    let mut global = GlobalGraph::from_weights(&w)?;
    if let Some(volume) = normalize_volume {
        if global.volume() > 0.0 {
            global = global.normalized_to(volume)?;
        }
    }
    Ok(GlConvResult {
        alphas,
        global,
        objective: solution.objective,
        status: solution.status,
        kkt: solution.kkt,
        iterations: solution.iterations,
        warnings,
    })
}

/// Percentage of global-graph edges whose dominant mask entry belongs to
/// each layer. Ties are split equally among the tied layers; the
/// percentages sum to one hundred.
pub fn layer_contributions(result: &MlResult) -> Result<Vec<f64>, InferError> {
    contributions_from(&result.masks, &result.global)
}

fn contributions_from(masks: &MaskSet, global: &GlobalGraph) -> Result<Vec<f64>, InferError> {
    let t = masks.t();
    let edges = global.edge_set(EDGE_EPS);
    let mut counts = vec![0.0f64; t];
    let mut total = 0usize;
    for (i, j) in edges.iter() {
        let values: Vec<f64> = (0..t).map(|tt| masks.value(tt, i, j)).collect();
        let best = values.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v));
        if best <= 0.0 {
            // Edge outside the union support (created by the corrective
            // term); no layer can claim it.
            continue;
        }
        let tied: Vec<usize> = (0..t)
            .filter(|&tt| (values[tt] - best).abs() <= 1e-9)
            .collect();
        for &tt in &tied {
            counts[tt] += 1.0 / tied.len() as f64;
        }
        total += 1;
    }
    if total == 0 {
        return Err(InferError::NoContributableEdges);
    }
    Ok(counts
        .into_iter()
        .map(|c| 100.0 * c / total as f64)
        .collect())
}

/// Recompute the mask-learning objective from decoded variables: the
/// smoothness of the signals on the assembled Laplacian plus the penalty.
pub fn ml_objective(
    ml: &MultiLayerGraph,
    x: &SignalMatrix,
    masks: &MaskSet,
    corrective: &CorrectiveLaplacian,
    gamma: f64,
) -> Result<f64, InferError> {
    let lap = lambda_of(ml, masks)?.matrix() + corrective.to_matrix();
    let lx = &lap * x.data();
    let smooth = x.data().component_mul(&lx).sum();
    Ok(smooth + gamma * corrective.frobenius_norm().powi(2))
}

/// The learning methods exposed by the experiment harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ml,
    MlReduced,
    GlSigrep,
    GlInformed,
    GlConv,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Ml,
        Method::MlReduced,
        Method::GlSigrep,
        Method::GlInformed,
        Method::GlConv,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Ml => "ml",
            Method::MlReduced => "ml-reduced",
            Method::GlSigrep => "gl-sigrep",
            Method::GlInformed => "gl-informed",
            Method::GlConv => "gl-conv",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ml" => Ok(Method::Ml),
            "ml-reduced" => Ok(Method::MlReduced),
            "gl-sigrep" => Ok(Method::GlSigrep),
            "gl-informed" => Ok(Method::GlInformed),
            "gl-conv" => Ok(Method::GlConv),
            other => Err(format!(
                "unknown method `{other}`; expected one of ml, ml-reduced, gl-sigrep, gl-informed, gl-conv"
            )),
        }
    }
}
