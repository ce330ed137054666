//! Inference of the global graph structure underlying a set of smooth
//! signals, guided by a priori known multi-layer graphs.
//!
//! The crate learns per-layer mask matrices that combine the layers into a
//! global weight matrix, optionally refined by a corrective Laplacian term,
//! and ships the surrounding machinery: a dense convex QP/LP solver, spectral
//! signal generation, synthetic benchmarks, evaluation metrics, graph-signal
//! inpainting and file ingestion.
//!
//! ```
//! use graphmask_core::infer::{solve_ml_reduced, MlConfig};
//! use graphmask_core::metrics::edge_report;
//! use graphmask_core::qp::SolveSettings;
//! use graphmask_core::synth::{generate_instance, SynthConfig};
//! use graphmask_core::EDGE_EPS;
//!
//! // A seeded benchmark: two geometric layers, planted masks, fifty smooth
//! // signals on the planted global graph.
//! let instance = generate_instance(&SynthConfig { seed: 7, ..Default::default() })?;
//!
//! // Learn the masks under the trace budget and score the recovery.
//! let result = solve_ml_reduced(
//!     &instance.layers,
//!     &instance.signals,
//!     &MlConfig::reduced(20.0),
//!     &SolveSettings::default(),
//! )?;
//! let report = edge_report(&result.global, &instance.true_global, EDGE_EPS)?;
//! assert!(report.f_score > 0.8);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod fixtures;
pub mod graph;
pub mod infer;
pub mod ingest;
pub mod inpaint;
pub mod metrics;
pub mod qp;
pub mod spectral;
pub mod synth;

pub use graph::{
    check_valid_laplacian, coverability, lambda_of, laplacian_from_weights, mask_combination,
    CorrectiveLaplacian, EdgeSet, GlobalGraph, GraphError, GraphLayer, Laplacian, MaskSet,
    MultiLayerGraph, VertexSet, EDGE_EPS,
};
pub use infer::{
    solve_gl_conv, solve_gl_informed, solve_gl_sigrep, solve_ml_full, solve_ml_reduced, Method,
    MlConfig, MlResult,
};
pub use qp::{QpProblem, QpSolution, QpStatus, SolveSettings};
pub use spectral::{
    add_noise, eigendecompose, generate_smooth_signals, smoothness, SignalMatrix,
    SpectralDecomposition,
};
pub use synth::{generate_instance, SynthConfig, SynthInstance};
