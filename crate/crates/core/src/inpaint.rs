//! Graph-signal inpainting: recover a full signal from partial vertex
//! observations by Tikhonov regularization with the graph Laplacian.
//!
//! The recovery minimizes `||S x - y||^2 + gamma x' L x`, whose closed form
//! is `x = (S'S + gamma L)^{-1} S' y`. The experiment harness repeats a
//! leave-one-column-out protocol: learn a graph on the remaining columns
//! with each method, hide half of the vertices of the held-out column and
//! score the recovery.

use nalgebra::{DMatrix, DVector};
use rand::{seq::SliceRandom, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::Laplacian;
use crate::infer::{
    solve_gl_conv, solve_gl_informed, solve_gl_sigrep, solve_ml_full, InferError, Method, MlConfig,
};
use crate::metrics::{mape, signal_mse, MetricError};
use crate::qp::SolveSettings;
use crate::spectral::{SignalMatrix, SpectralError};
use crate::MultiLayerGraph;

#[derive(Debug, Error)]
pub enum InpaintError {
    #[error("no observed vertices")]
    NoObservations,
    #[error("observed index {0} is out of range for {1} vertices")]
    IndexOutOfRange(usize, usize),
    #[error("observed index {0} appears twice")]
    DuplicateIndex(usize),
    #[error("observed values ({values}) do not match observed indices ({indices})")]
    ValueCountMismatch { values: usize, indices: usize },
    #[error(
        "singular system: connected component {{{component:?}}} has no observed vertex \
         (gamma = {gamma})"
    )]
    SingularComponent { component: Vec<usize>, gamma: f64 },
    #[error("factorization failed; system is numerically singular")]
    FactorizationFailed,
    #[error("normal-equation residual {residual:.3e} exceeds the 1e-8 relative bound")]
    ResidualTooLarge { residual: f64 },
    #[error("graph learning failed for {method}: {source}")]
    Learning {
        method: Method,
        source: Box<InferError>,
    },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("inpainting experiment needs at least two signal columns")]
    TooFewColumns,
}

/// A single inpainting instance.
#[derive(Debug, Clone)]
pub struct InpaintProblem<'a> {
    laplacian: &'a Laplacian,
    observed: Vec<usize>,
    y: DVector<f64>,
    gamma: f64,
}

impl<'a> InpaintProblem<'a> {
    pub fn new(
        laplacian: &'a Laplacian,
        observed: Vec<usize>,
        y: DVector<f64>,
        gamma: f64,
    ) -> Result<Self, InpaintError> {
        let n = laplacian.n();
        if observed.is_empty() {
            return Err(InpaintError::NoObservations);
        }
        if y.len() != observed.len() {
            return Err(InpaintError::ValueCountMismatch {
                values: y.len(),
                indices: observed.len(),
            });
        }
        let mut seen = vec![false; n];
        for &i in &observed {
            if i >= n {
                return Err(InpaintError::IndexOutOfRange(i, n));
            }
            if seen[i] {
                return Err(InpaintError::DuplicateIndex(i));
            }
            seen[i] = true;
        }
        Ok(Self {
            laplacian,
            observed,
            y,
            gamma,
        })
    }

    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        let mut data = 0.0;
        for (k, &i) in self.observed.iter().enumerate() {
            data += (x[i] - self.y[k]).powi(2);
        }
        data + self.gamma * self.laplacian.quadratic_form(x)
    }
}

/// Connected components of the graph under the Laplacian's off-diagonal
/// support.
fn components(l: &Laplacian) -> Vec<Vec<usize>> {
    let n = l.n();
    let m = l.matrix();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let root = find(parent, parent[i]);
            parent[i] = root;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            if m[(i, j)].abs() > 1e-12 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Closed-form Tikhonov recovery `x = (S'S + gamma L)^{-1} S' y`.
///
/// The system matrix is symmetric positive definite whenever every connected
/// component holds at least one observation (all vertices, when gamma is
/// zero); a component violating that is reported as singular.
pub fn inpaint(problem: &InpaintProblem) -> Result<DVector<f64>, InpaintError> {
    let l = problem.laplacian;
    let n = l.n();
    let observed = &problem.observed;
    let gamma = problem.gamma;

    let mut is_observed = vec![false; n];
    for &i in observed {
        is_observed[i] = true;
    }
    if gamma == 0.0 {
        if let Some(unseen) = (0..n).find(|&i| !is_observed[i]) {
            return Err(InpaintError::SingularComponent {
                component: vec![unseen],
                gamma,
            });
        }
    } else {
        for component in components(l) {
            if !component.iter().any(|&i| is_observed[i]) {
                return Err(InpaintError::SingularComponent { component, gamma });
            }
        }
    }

    let mut system = l.matrix() * gamma;
    let mut rhs = DVector::zeros(n);
    for (k, &i) in observed.iter().enumerate() {
        system[(i, i)] += 1.0;
        rhs[i] = problem.y[k];
    }

    let chol = system
        .clone()
        .cholesky()
        .ok_or(InpaintError::FactorizationFailed)?;
    let mut x = chol.solve(&rhs);
    // Refinement sweeps keep the normal-equation residual at the contract
    // bound; the backward-error scale accounts for stiff regularization
    // weights where A x itself is large.
    let scale = |x: &DVector<f64>| system.amax() * x.amax().max(1.0) + rhs.amax().max(1.0);
    for _ in 0..3 {
        let residual = &rhs - &system * &x;
        if residual.amax() <= 1e-12 * scale(&x) {
            break;
        }
        x += chol.solve(&residual);
    }
    let residual = (&rhs - &system * &x).amax() / scale(&x);
    if residual > 1e-8 {
        return Err(InpaintError::ResidualTooLarge { residual });
    }
    Ok(x)
}

/// Per-method configuration of the inpainting experiment.
#[derive(Debug, Clone)]
pub struct InpaintExperimentConfig {
    pub methods: Vec<Method>,
    /// Corrective-term weight of the mask-learning solve.
    pub ml_gamma: f64,
    pub sigrep_gamma: f64,
    pub informed_gamma: f64,
    /// Simplex regularizer of the convex combination; `None` scales it to
    /// the training-signal energy, which keeps the blend interior.
    pub conv_beta: Option<f64>,
    /// Trace budget for every learned graph.
    pub trace: f64,
    /// Tikhonov weight; shared across methods unless overridden.
    pub inpaint_gamma: f64,
    pub overrides: Vec<(Method, f64)>,
    /// Fraction of vertices hidden in each round.
    pub holdout_fraction: f64,
    pub seed: u64,
    pub settings: SolveSettings,
}

impl InpaintExperimentConfig {
    pub fn new(trace: f64) -> Self {
        Self {
            methods: Method::ALL.to_vec(),
            ml_gamma: 1000.0,
            sigrep_gamma: 1.0,
            informed_gamma: 1.0,
            conv_beta: None,
            trace,
            inpaint_gamma: 1000.0,
            overrides: Vec::new(),
            holdout_fraction: 0.5,
            seed: 0,
            settings: SolveSettings::default(),
        }
    }

    fn gamma_for(&self, method: Method) -> f64 {
        self.overrides
            .iter()
            .find(|(m, _)| *m == method)
            .map(|(_, g)| *g)
            .unwrap_or(self.inpaint_gamma)
    }
}

/// Scores of one method across the experiment rounds.
#[derive(Debug, Clone)]
pub struct MethodScore {
    pub method: Method,
    pub mse: f64,
    pub mape: f64,
}

fn learn_graph(
    method: Method,
    ml: &MultiLayerGraph,
    x: &SignalMatrix,
    cfg: &InpaintExperimentConfig,
) -> Result<Laplacian, InpaintError> {
    let wrap = |source: InferError| InpaintError::Learning {
        method,
        source: Box::new(source),
    };
    let lap = match method {
        Method::Ml => solve_ml_full(
            ml,
            x,
            &MlConfig::full(cfg.ml_gamma, cfg.trace),
            &cfg.settings,
        )
        .map_err(wrap)?
        .global
        .laplacian()
        .clone(),
        Method::MlReduced => {
            crate::infer::solve_ml_reduced(ml, x, &MlConfig::reduced(cfg.trace), &cfg.settings)
                .map_err(wrap)?
                .global
                .laplacian()
                .clone()
        }
        Method::GlSigrep => solve_gl_sigrep(x, cfg.sigrep_gamma, cfg.trace, &cfg.settings)
            .map_err(wrap)?
            .global
            .laplacian()
            .clone(),
        Method::GlInformed => {
            solve_gl_informed(ml, x, cfg.informed_gamma, cfg.trace, &cfg.settings)
                .map_err(wrap)?
                .global
                .laplacian()
                .clone()
        }
        Method::GlConv => solve_gl_conv(
            ml,
            x,
            cfg.conv_beta.unwrap_or_else(|| x.energy()),
            Some(cfg.trace),
            &cfg.settings,
        )
        .map_err(wrap)?
        .global
        .laplacian()
        .clone(),
    };
    Ok(lap)
}

/// Leave-one-column-out inpainting comparison.
///
/// For every held-out column, each method learns a graph on the remaining
/// columns, half of the vertices (seeded, shared across methods) are hidden,
/// the column is recovered from the observed half, and MSE / MAPE against
/// the full column are averaged over rounds.
pub fn inpaint_experiment(
    ml: &MultiLayerGraph,
    signals: &SignalMatrix,
    cfg: &InpaintExperimentConfig,
) -> Result<Vec<MethodScore>, InpaintError> {
    let k = signals.k();
    if k < 2 {
        return Err(InpaintError::TooFewColumns);
    }
    let n = signals.n();
    let mut totals: Vec<(f64, f64)> = vec![(0.0, 0.0); cfg.methods.len()];

    for round in 0..k {
        let train = signals.without_column(round)?;
        let truth_col = signals.column(round);

        // The observed set is drawn per round and shared across methods.
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(round as u64));
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let observed_count = ((n as f64) * (1.0 - cfg.holdout_fraction)).round().max(1.0) as usize;
        let mut observed = order[..observed_count].to_vec();
        observed.sort_unstable();
        let y = DVector::from_fn(observed.len(), |k, _| truth_col[observed[k]]);

        for (slot, &method) in cfg.methods.iter().enumerate() {
            let laplacian = learn_graph(method, ml, &train, cfg)?;
            let problem = InpaintProblem::new(
                &laplacian,
                observed.clone(),
                y.clone(),
                cfg.gamma_for(method),
            )?;
            let recovered = inpaint(&problem)?;
            let rec = SignalMatrix::new(DMatrix::from_column_slice(n, 1, recovered.as_slice()))?;
            let tru = SignalMatrix::new(DMatrix::from_column_slice(n, 1, truth_col.as_slice()))?;
            totals[slot].0 += signal_mse(&rec, &tru, None)?;
            totals[slot].1 += mape(&rec, &tru, None)?;
        }
    }

    Ok(cfg
        .methods
        .iter()
        .zip(totals)
        .map(|(&method, (mse, mp))| MethodScore {
            method,
            mse: mse / k as f64,
            mape: mp / k as f64,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{laplacian_from_weights, upper_pairs};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_connected(n: usize, seed: u64) -> Laplacian {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = DMatrix::zeros(n, n);
        for k in 1..n {
            let v = rng.random_range(0.5..1.5);
            w[(k - 1, k)] = v;
            w[(k, k - 1)] = v;
        }
        for (i, j) in upper_pairs(n) {
            if j > i + 1 && rng.random::<f64>() < 0.35 {
                let v = rng.random_range(0.2..1.0);
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
        laplacian_from_weights(&w).unwrap()
    }

    #[test]
    fn full_observation_without_regularization_is_identity() {
        let l = random_connected(6, 3);
        let y = DVector::from_fn(6, |i, _| i as f64 + 0.5);
        let problem = InpaintProblem::new(&l, (0..6).collect(), y.clone(), 0.0).unwrap();
        let x = inpaint(&problem).unwrap();
        assert!((x - y).amax() < 1e-12);
    }

    #[test]
    fn heavy_regularization_recovers_the_observed_mean() {
        let l = random_connected(8, 5);
        let observed = vec![0, 2, 4, 6];
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        let problem = InpaintProblem::new(&l, observed, y, 1e9).unwrap();
        let x = inpaint(&problem).unwrap();
        for i in 0..8 {
            assert!((x[i] - 2.5).abs() < 1e-4, "x[{i}] = {}", x[i]);
        }
    }

    #[test]
    fn closed_form_matches_conjugate_gradient_oracle() {
        let l = random_connected(8, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let observed: Vec<usize> = vec![0, 1, 3, 6];
        let y = DVector::from_fn(4, |_, _| rng.random_range(-2.0..2.0f64));
        let gamma = 0.7;
        let problem = InpaintProblem::new(&l, observed.clone(), y.clone(), gamma).unwrap();
        let x = inpaint(&problem).unwrap();

        // Independent conjugate-gradient solve of the normal equations.
        let mut system = l.matrix() * gamma;
        let mut rhs = DVector::zeros(8);
        for (k, &i) in observed.iter().enumerate() {
            system[(i, i)] += 1.0;
            rhs[i] = y[k];
        }
        let mut cg = DVector::zeros(8);
        let mut r = rhs.clone();
        let mut p = r.clone();
        let mut rs = r.norm_squared();
        for _ in 0..200 {
            let ap = &system * &p;
            let alpha = rs / p.dot(&ap);
            cg += &p * alpha;
            r -= ap * alpha;
            let rs_new = r.norm_squared();
            if rs_new.sqrt() < 1e-14 {
                break;
            }
            p = &r + &p * (rs_new / rs);
            rs = rs_new;
        }
        let rel = (&x - &cg).norm() / cg.norm();
        assert!(rel < 1e-8, "relative gap {rel}");
    }

    #[test]
    fn unobserved_vertex_without_regularization_is_singular() {
        let l = random_connected(5, 9);
        let problem =
            InpaintProblem::new(&l, vec![0, 1], DVector::from_vec(vec![1.0, 2.0]), 0.0).unwrap();
        assert!(matches!(
            inpaint(&problem),
            Err(InpaintError::SingularComponent { .. })
        ));
    }

    #[test]
    fn unobserved_component_is_reported() {
        // Two disconnected pairs; the second has no observation.
        let mut w = DMatrix::zeros(4, 4);
        w[(0, 1)] = 1.0;
        w[(1, 0)] = 1.0;
        w[(2, 3)] = 1.0;
        w[(3, 2)] = 1.0;
        let l = laplacian_from_weights(&w).unwrap();
        let problem = InpaintProblem::new(&l, vec![0], DVector::from_vec(vec![1.0]), 2.0).unwrap();
        match inpaint(&problem) {
            Err(InpaintError::SingularComponent { component, .. }) => {
                assert_eq!(component, vec![2, 3]);
            }
            other => panic!("expected singular component, got {other:?}"),
        }
    }

    #[test]
    fn data_fit_improves_as_gamma_shrinks() {
        let l = random_connected(9, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let observed: Vec<usize> = vec![0, 2, 3, 5, 7];
        let y = DVector::from_fn(5, |_, _| rng.random_range(-1.0..1.0f64));
        let mut fits = Vec::new();
        for gamma in [1.0, 0.1, 0.01] {
            let problem = InpaintProblem::new(&l, observed.clone(), y.clone(), gamma).unwrap();
            let x = inpaint(&problem).unwrap();
            let fit: f64 = observed
                .iter()
                .enumerate()
                .map(|(k, &i)| (x[i] - y[k]).powi(2))
                .sum();
            fits.push(fit);
        }
        assert!(fits[0] >= fits[1] && fits[1] >= fits[2], "{fits:?}");
    }

    #[test]
    fn solution_is_the_unique_minimizer() {
        let l = random_connected(7, 13);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let observed: Vec<usize> = vec![1, 2, 4];
        let y = DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0f64));
        let problem = InpaintProblem::new(&l, observed, y, 0.5).unwrap();
        let x = inpaint(&problem).unwrap();
        let base = problem.objective(&x);
        for _ in 0..20 {
            let mut delta = DVector::from_fn(7, |_, _| rng.random_range(-1.0..1.0f64));
            delta *= 1e-3 / delta.norm();
            assert!(problem.objective(&(&x + delta)) > base);
        }
    }

    #[test]
    fn perfect_graph_and_constant_signal_yield_zero_error() {
        let l = random_connected(6, 17);
        let y = DVector::from_element(3, 4.0);
        let problem = InpaintProblem::new(&l, vec![0, 2, 4], y, 10.0).unwrap();
        let x = inpaint(&problem).unwrap();
        for i in 0..6 {
            assert!((x[i] - 4.0).abs() < 1e-9);
        }
    }

    #[test]
    fn experiment_runs_one_round_per_column() {
        use crate::graph::{GraphLayer, MultiLayerGraph};
        use crate::spectral::generate_smooth_signals;
        let l = random_connected(8, 19);
        let layer = GraphLayer::new(l.weights()).unwrap();
        let ml = MultiLayerGraph::new(vec![layer]).unwrap();
        // Constant offset keeps the relative errors defined.
        let smooth = generate_smooth_signals(&l, 3, 6).unwrap();
        let data = smooth.data().map(|v| v + 5.0);
        let signals = SignalMatrix::new(data).unwrap();

        let mut cfg = InpaintExperimentConfig::new(l.trace());
        cfg.methods = vec![Method::GlConv];
        cfg.inpaint_gamma = 1.0;
        cfg.seed = 3;
        let scores = inpaint_experiment(&ml, &signals, &cfg).unwrap();
        assert_eq!(scores.len(), 1);
        assert!(scores[0].mse.is_finite() && scores[0].mape.is_finite());

        let single = SignalMatrix::new(smooth.data().columns(0, 1).into_owned()).unwrap();
        assert!(matches!(
            inpaint_experiment(&ml, &single, &cfg),
            Err(InpaintError::TooFewColumns)
        ));
    }
}
