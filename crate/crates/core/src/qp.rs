//! Dense convex quadratic programming.
//!
//! All inference problems in this crate reduce to the canonical program
//!
//! ```text
//!     minimize    1/2 z' P z + q' z
//!     subject to  A z  = b
//!                 G z <= h
//! ```
//!
//! with P symmetric positive semidefinite; P = 0 gives the LP case. The
//! solver is a Mehrotra predictor-corrector primal-dual interior-point
//! method on dense matrices. The contract is tolerance-based: an `Optimal`
//! solution satisfies the KKT conditions of the internally scaled problem
//! within the requested tolerances.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QpError {
    #[error("dimension mismatch: {what} has {got} {unit}, expected {expected}")]
    Dimension {
        what: &'static str,
        got: usize,
        expected: usize,
        unit: &'static str,
    },
    #[error("objective matrix is not symmetric: max |P - P'| = {0:.3e}")]
    NotSymmetric(f64),
    #[error("objective matrix is not positive semidefinite")]
    NotPsd,
    #[error("linear system solve failed during {0}")]
    NumericFailure(&'static str),
    #[error("problem has no variables")]
    Empty,
}

/// Semantic meaning of a flat variable index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    /// Mask entry of `layer` at pair (i, j).
    Mask { layer: usize, i: usize, j: usize },
    /// Corrective-term upper-triangle entry at pair (i, j).
    Corrective { i: usize, j: usize },
    /// Edge weight variable at pair (i, j).
    Weight { i: usize, j: usize },
    /// Convex-combination coefficient of `layer`.
    Alpha { layer: usize },
    /// Anonymous variable.
    Other(usize),
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarKind::Mask { layer, i, j } => write!(f, "mask[{layer}]({i},{j})"),
            VarKind::Corrective { i, j } => write!(f, "corrective({i},{j})"),
            VarKind::Weight { i, j } => write!(f, "weight({i},{j})"),
            VarKind::Alpha { layer } => write!(f, "alpha[{layer}]"),
            VarKind::Other(k) => write!(f, "z{k}"),
        }
    }
}

/// A canonical convex program.
#[derive(Debug, Clone)]
pub struct QpProblem {
    p: DMatrix<f64>,
    q: DVector<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    g: DMatrix<f64>,
    h: DVector<f64>,
    var_names: Vec<VarKind>,
}

impl QpProblem {
    pub fn new(
        p: DMatrix<f64>,
        q: DVector<f64>,
        a: DMatrix<f64>,
        b: DVector<f64>,
        g: DMatrix<f64>,
        h: DVector<f64>,
    ) -> Result<Self, QpError> {
        let n = q.len();
        if n == 0 {
            return Err(QpError::Empty);
        }
        if p.nrows() != n || p.ncols() != n {
            return Err(QpError::Dimension {
                what: "P",
                got: p.nrows().max(p.ncols()),
                expected: n,
                unit: "rows/cols",
            });
        }
        if a.ncols() != n && a.nrows() > 0 {
            return Err(QpError::Dimension {
                what: "A",
                got: a.ncols(),
                expected: n,
                unit: "columns",
            });
        }
        if b.len() != a.nrows() {
            return Err(QpError::Dimension {
                what: "b",
                got: b.len(),
                expected: a.nrows(),
                unit: "rows",
            });
        }
        if g.ncols() != n && g.nrows() > 0 {
            return Err(QpError::Dimension {
                what: "G",
                got: g.ncols(),
                expected: n,
                unit: "columns",
            });
        }
        if h.len() != g.nrows() {
            return Err(QpError::Dimension {
                what: "h",
                got: h.len(),
                expected: g.nrows(),
                unit: "rows",
            });
        }
        let asym = (&p - p.transpose()).amax();
        if asym > 1e-8 * (1.0 + p.amax()) {
            return Err(QpError::NotSymmetric(asym));
        }
        // Work with the exactly symmetric part from here on.
        let p = (&p + p.transpose()) * 0.5;
        Ok(Self {
            p,
            q,
            a,
            b,
            g,
            h,
            var_names: Vec::new(),
        })
    }

    pub fn with_var_names(mut self, names: Vec<VarKind>) -> Self {
        self.var_names = names;
        self
    }

    pub fn n(&self) -> usize {
        self.q.len()
    }

    pub fn n_eq(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_ineq(&self) -> usize {
        self.g.nrows()
    }

    pub fn var_names(&self) -> &[VarKind] {
        &self.var_names
    }

    pub fn objective_at(&self, z: &DVector<f64>) -> f64 {
        0.5 * z.dot(&(&self.p * z)) + self.q.dot(z)
    }

    /// Text serialization of (P, q, A, b, G, h) for external cross-checking.
    pub fn dump(&self) -> String {
        fn write_matrix(out: &mut String, label: &str, m: &DMatrix<f64>) {
            out.push_str(label);
            out.push('\n');
            for i in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols()).map(|j| format!("{}", m[(i, j)])).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        fn write_vector(out: &mut String, label: &str, v: &DVector<f64>) {
            out.push_str(label);
            out.push('\n');
            let row: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        let mut out = String::new();
        out.push_str("graphmask-qp/1\n");
        out.push_str(&format!(
            "n {} eq {} ineq {}\n",
            self.n(),
            self.n_eq(),
            self.n_ineq()
        ));
        write_matrix(&mut out, "P", &self.p);
        write_vector(&mut out, "q", &self.q);
        write_matrix(&mut out, "A", &self.a);
        write_vector(&mut out, "b", &self.b);
        write_matrix(&mut out, "G", &self.g);
        write_vector(&mut out, "h", &self.h);
        if !self.var_names.is_empty() {
            out.push_str("vars\n");
            for v in &self.var_names {
                out.push_str(&format!("{v}\n"));
            }
        }
        out
    }
}

/// Solver tolerances and iteration cap.
#[derive(Debug, Clone, Copy)]
pub struct SolveSettings {
    pub tol_feas: f64,
    pub tol_gap: f64,
    pub max_iter: usize,
    /// Print per-iteration progress to stderr.
    pub verbose: bool,
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self {
            tol_feas: 1e-7,
            tol_gap: 1e-7,
            max_iter: 20_000,
            verbose: false,
        }
    }
}

impl SolveSettings {
    /// Tight tolerances for limit-case cross checks.
    pub fn tight() -> Self {
        Self {
            tol_feas: 1e-9,
            tol_gap: 1e-10,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    Optimal,
    MaxIter,
    Infeasible,
}

impl fmt::Display for QpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QpStatus::Optimal => write!(f, "optimal"),
            QpStatus::MaxIter => write!(f, "max-iter"),
            QpStatus::Infeasible => write!(f, "infeasible"),
        }
    }
}

/// KKT residual norms of a primal-dual point.
#[derive(Debug, Clone, Copy, Default)]
pub struct KktReport {
    /// || P z + q + A' y + G' lambda ||_inf
    pub stationarity: f64,
    /// || A z - b ||_inf
    pub primal_eq: f64,
    /// max(0, max_i (G z - h)_i)
    pub primal_ineq: f64,
    /// max(0, -min_i lambda_i)
    pub dual_feas: f64,
    /// || lambda .* (G z - h) ||_inf
    pub comp_slack: f64,
    /// lambda' (h - G z), the duality gap contribution of the inequalities
    pub gap: f64,
}

impl KktReport {
    pub fn max_residual(&self) -> f64 {
        self.stationarity
            .max(self.primal_eq)
            .max(self.primal_ineq)
            .max(self.dual_feas)
            .max(self.comp_slack)
    }
}

/// Solution of a [`QpProblem`].
///
/// The `kkt` field holds the residuals of the internally scaled problem,
/// which is the basis on which the tolerances of [`SolveSettings`] are
/// enforced. Duals are reported in the units of the original problem.
#[derive(Debug, Clone)]
pub struct QpSolution {
    pub z: DVector<f64>,
    pub objective: f64,
    pub status: QpStatus,
    pub kkt: KktReport,
    pub eq_duals: DVector<f64>,
    pub ineq_duals: DVector<f64>,
    pub iterations: usize,
}

/// KKT residuals of (z, duals) for the given problem, in its original units.
pub fn kkt_residuals(
    p: &QpProblem,
    z: &DVector<f64>,
    eq_duals: &DVector<f64>,
    ineq_duals: &DVector<f64>,
) -> KktReport {
    let mut stat = &p.p * z + &p.q;
    if p.n_eq() > 0 {
        stat += p.a.transpose() * eq_duals;
    }
    if p.n_ineq() > 0 {
        stat += p.g.transpose() * ineq_duals;
    }
    let primal_eq = if p.n_eq() > 0 {
        (&p.a * z - &p.b).amax()
    } else {
        0.0
    };
    let (primal_ineq, comp, gap, dual_feas) = if p.n_ineq() > 0 {
        let resid = &p.g * z - &p.h;
        let viol = resid.iter().fold(0.0f64, |m, &v| m.max(v));
        let comp = resid
            .iter()
            .zip(ineq_duals.iter())
            .fold(0.0f64, |m, (&r, &l)| m.max((r * l).abs()));
        let gap = resid
            .iter()
            .zip(ineq_duals.iter())
            .map(|(&r, &l)| -r * l)
            .sum::<f64>();
        let dual = ineq_duals.iter().fold(0.0f64, |m, &l| m.max(-l));
        (viol, comp, gap, dual)
    } else {
        (0.0, 0.0, 0.0, 0.0)
    };
    KktReport {
        stationarity: stat.amax(),
        primal_eq,
        primal_ineq,
        dual_feas,
        comp_slack: comp,
        gap,
    }
}

struct Scaled {
    p: DMatrix<f64>,
    q: DVector<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    g: DMatrix<f64>,
    h: DVector<f64>,
    obj_scale: f64,
    eq_row_scale: DVector<f64>,
    ineq_row_scale: DVector<f64>,
}

/// Scale the objective and equilibrate constraint rows. The feasible set is
/// unchanged; duals of the scaled problem map back by
/// `y_i = obj_scale * y_scaled_i / row_scale_i`.
///
/// The objective scale is anchored on the linear term so that the optimal
/// face of nearly linear problems stays resolvable at the gap tolerance even
/// when P carries a huge penalty weight.
fn scale_problem(p: &QpProblem) -> Scaled {
    let obj_scale = p.q.amax().max(1e-9 * p.p.amax()).max(1e-12);
    let mut a = p.a.clone();
    let mut b = p.b.clone();
    let mut eq_row_scale = DVector::from_element(p.n_eq(), 1.0);
    for i in 0..a.nrows() {
        let r = a.row(i).amax().max(1e-12);
        eq_row_scale[i] = r;
        for j in 0..a.ncols() {
            a[(i, j)] /= r;
        }
        b[i] /= r;
    }
    let mut g = p.g.clone();
    let mut h = p.h.clone();
    let mut ineq_row_scale = DVector::from_element(p.n_ineq(), 1.0);
    for i in 0..g.nrows() {
        let r = g.row(i).amax().max(1e-12);
        ineq_row_scale[i] = r;
        for j in 0..g.ncols() {
            g[(i, j)] /= r;
        }
        h[i] /= r;
    }
    Scaled {
        p: &p.p / obj_scale,
        q: &p.q / obj_scale,
        a,
        b,
        g,
        h,
        obj_scale,
        eq_row_scale,
        ineq_row_scale,
    }
}

/// Factorization of the (regularized) KKT matrix with iterative refinement
/// against the unregularized system.
struct KktSolver {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    kkt: DMatrix<f64>,
}

impl KktSolver {
    fn factor(kkt: DMatrix<f64>, n: usize, reg: f64) -> Self {
        let total = kkt.nrows();
        let mut regularized = kkt.clone();
        for i in 0..total {
            if i < n {
                regularized[(i, i)] += reg;
            } else {
                regularized[(i, i)] -= reg;
            }
        }
        Self {
            lu: regularized.lu(),
            kkt,
        }
    }

    fn solve(&self, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        let mut x = self.lu.solve(rhs)?;
        // Two refinement sweeps recover the accuracy lost to the static
        // regularization and to ill-conditioned barrier weights.
        for _ in 0..2 {
            let residual = rhs - &self.kkt * &x;
            if residual.amax() <= 1e-14 * (1.0 + rhs.amax()) {
                break;
            }
            let correction = self.lu.solve(&residual)?;
            x += correction;
        }
        Some(x)
    }
}

fn max_step(v: &DVector<f64>, dv: &DVector<f64>) -> f64 {
    let mut alpha = f64::INFINITY;
    for (x, dx) in v.iter().zip(dv.iter()) {
        if *dx < 0.0 {
            alpha = alpha.min(-x / dx);
        }
    }
    alpha
}

/// Solve the program. P is validated as PSD by an attempted factorization
/// with a small diagonal shift before any work is done.
pub fn solve(problem: &QpProblem, settings: &SolveSettings) -> Result<QpSolution, QpError> {
    let n = problem.n();
    let shift = 1e-8 * (1.0 + problem.p.amax());
    let shifted = &problem.p + DMatrix::from_diagonal_element(n, n, shift);
    if shifted.cholesky().is_none() {
        return Err(QpError::NotPsd);
    }

    let scaled = scale_problem(problem);
    if problem.n_ineq() == 0 {
        return solve_equality_only(problem, &scaled);
    }
    solve_interior_point(problem, &scaled, settings)
}

/// Direct KKT solve for problems without inequality constraints.
fn solve_equality_only(problem: &QpProblem, s: &Scaled) -> Result<QpSolution, QpError> {
    let n = problem.n();
    let p_eq = problem.n_eq();
    let total = n + p_eq;
    let mut kkt = DMatrix::zeros(total, total);
    kkt.view_mut((0, 0), (n, n)).copy_from(&s.p);
    if p_eq > 0 {
        kkt.view_mut((0, n), (n, p_eq)).copy_from(&s.a.transpose());
        kkt.view_mut((n, 0), (p_eq, n)).copy_from(&s.a);
    }
    let mut rhs = DVector::zeros(total);
    rhs.rows_mut(0, n).copy_from(&(-&s.q));
    if p_eq > 0 {
        rhs.rows_mut(n, p_eq).copy_from(&s.b);
    }
    let solver = KktSolver::factor(kkt, n, 1e-12);
    let sol = solver
        .solve(&rhs)
        .ok_or(QpError::NumericFailure("equality KKT solve"))?;
    let z = sol.rows(0, n).into_owned();
    let y_scaled = sol.rows(n, p_eq).into_owned();

    let mut eq_duals = DVector::zeros(p_eq);
    for i in 0..p_eq {
        eq_duals[i] = s.obj_scale * y_scaled[i] / s.eq_row_scale[i];
    }
    let kkt_scaled = scaled_kkt_report(s, &z, &y_scaled, &DVector::zeros(0), &DVector::zeros(0));
    Ok(QpSolution {
        objective: problem.objective_at(&z),
        z,
        status: QpStatus::Optimal,
        kkt: kkt_scaled,
        eq_duals,
        ineq_duals: DVector::zeros(0),
        iterations: 1,
    })
}

fn scaled_kkt_report(
    s: &Scaled,
    z: &DVector<f64>,
    y: &DVector<f64>,
    lambda: &DVector<f64>,
    slack: &DVector<f64>,
) -> KktReport {
    let mut stat = &s.p * z + &s.q;
    if s.a.nrows() > 0 {
        stat += s.a.transpose() * y;
    }
    if s.g.nrows() > 0 {
        stat += s.g.transpose() * lambda;
    }
    let primal_eq = if s.a.nrows() > 0 {
        (&s.a * z - &s.b).amax()
    } else {
        0.0
    };
    let (primal_ineq, comp, gap, dual_feas) = if s.g.nrows() > 0 {
        let resid = &s.g * z - &s.h;
        let viol = resid.iter().fold(0.0f64, |m, &v| m.max(v));
        let comp = slack
            .iter()
            .zip(lambda.iter())
            .fold(0.0f64, |m, (&sl, &l)| m.max((sl * l).abs()));
        let gap = slack.dot(lambda);
        let dual = lambda.iter().fold(0.0f64, |m, &l| m.max(-l));
        (viol, comp, gap, dual)
    } else {
        (0.0, 0.0, 0.0, 0.0)
    };
    KktReport {
        stationarity: stat.amax(),
        primal_eq,
        primal_ineq,
        dual_feas,
        comp_slack: comp,
        gap,
    }
}

fn solve_interior_point(
    problem: &QpProblem,
    s: &Scaled,
    settings: &SolveSettings,
) -> Result<QpSolution, QpError> {
    let n = problem.n();
    let p_eq = problem.n_eq();
    let m = problem.n_ineq();
    let total = n + p_eq;

    // Starting point: least-squares-ish primal from an augmented KKT solve,
    // slacks shifted into the positive orthant, unit multipliers.
    let mut init_kkt = DMatrix::zeros(total, total);
    init_kkt
        .view_mut((0, 0), (n, n))
        .copy_from(&(&s.p + DMatrix::identity(n, n)));
    if p_eq > 0 {
        init_kkt
            .view_mut((0, n), (n, p_eq))
            .copy_from(&s.a.transpose());
        init_kkt.view_mut((n, 0), (p_eq, n)).copy_from(&s.a);
    }
    let mut rhs = DVector::zeros(total);
    rhs.rows_mut(0, n).copy_from(&(-&s.q));
    if p_eq > 0 {
        rhs.rows_mut(n, p_eq).copy_from(&s.b);
    }
    let init = KktSolver::factor(init_kkt, n, 1e-12)
        .solve(&rhs)
        .ok_or(QpError::NumericFailure("initial point solve"))?;
    let mut z = init.rows(0, n).into_owned();
    let mut y = if p_eq > 0 {
        init.rows(n, p_eq).into_owned()
    } else {
        DVector::zeros(0)
    };

    let t = &s.h - &s.g * &z;
    let min_t = t.iter().fold(f64::INFINITY, |a, &v| a.min(v));
    let shift = if min_t < 1.0 { 1.0 - min_t } else { 0.0 };
    let mut slack = t.add_scalar(shift);
    let mut lambda = DVector::from_element(m, 1.0);

    let mut status = QpStatus::MaxIter;
    let mut iterations = 0usize;
    let q_norm = 1.0 + s.q.amax();
    let b_norm = 1.0 + if p_eq > 0 { s.b.amax() } else { 0.0 };
    let h_norm = 1.0 + s.h.amax();

    for iter in 0..settings.max_iter {
        iterations = iter + 1;

        let mut rd = &s.p * &z + &s.q + s.g.transpose() * &lambda;
        if p_eq > 0 {
            rd += s.a.transpose() * &y;
        }
        let rp = if p_eq > 0 {
            &s.a * &z - &s.b
        } else {
            DVector::zeros(0)
        };
        let rg = &s.g * &z + &slack - &s.h;
        let gap = slack.dot(&lambda);
        let mu = gap / m as f64;
        let obj = 0.5 * z.dot(&(&s.p * &z)) + s.q.dot(&z);

        if settings.verbose && (iter % 25 == 0 || iter + 1 == settings.max_iter) {
            eprintln!(
                "iter {iter:5}  rd {:.3e}  rp {:.3e}  rg {:.3e}  gap {:.3e}  obj {obj:.6e}",
                rd.amax(),
                if p_eq > 0 { rp.amax() } else { 0.0 },
                rg.amax(),
                gap,
            );
        }

        let rd_ok = rd.amax() <= settings.tol_feas * q_norm;
        let rp_ok = p_eq == 0 || rp.amax() <= settings.tol_feas * b_norm;
        let rg_ok = rg.amax() <= settings.tol_feas * h_norm;
        let gap_ok = gap <= settings.tol_gap * obj.abs().max(1.0);
        if rd_ok && rp_ok && rg_ok && gap_ok {
            status = QpStatus::Optimal;
            break;
        }

        // Divergence of the multipliers signals an infeasible primal.
        if lambda.amax() > 1e13 || (p_eq > 0 && y.amax() > 1e13) || slack.amax() > 1e14 {
            status = QpStatus::Infeasible;
            break;
        }

        // Unreduced KKT system: eliminating the slack block would form
        // G' W G whose mixed magnitudes destroy precision at assembly time;
        // keeping the barrier weights on the diagonal leaves iterative
        // refinement effective.
        //
        //   [ P   A'   G' ] [dz]
        //   [ A   0    0  ] [dy]
        //   [ G   0   -D  ] [dl],  D = diag(s ./ lambda)
        let full = n + p_eq + m;
        let mut kkt = DMatrix::zeros(full, full);
        kkt.view_mut((0, 0), (n, n)).copy_from(&s.p);
        if p_eq > 0 {
            kkt.view_mut((0, n), (n, p_eq)).copy_from(&s.a.transpose());
            kkt.view_mut((n, 0), (p_eq, n)).copy_from(&s.a);
        }
        kkt.view_mut((0, n + p_eq), (n, m))
            .copy_from(&s.g.transpose());
        kkt.view_mut((n + p_eq, 0), (m, n)).copy_from(&s.g);
        for i in 0..m {
            kkt[(n + p_eq + i, n + p_eq + i)] = -slack[i] / lambda[i];
        }
        let solver = KktSolver::factor(kkt, n, 1e-11);

        // Predictor (affine scaling) direction: rcent = s .* lambda.
        let mut rhs = DVector::zeros(full);
        rhs.rows_mut(0, n).copy_from(&(-&rd));
        if p_eq > 0 {
            rhs.rows_mut(n, p_eq).copy_from(&(-&rp));
        }
        for i in 0..m {
            // -rg + rcent ./ lambda with rcent = s .* lambda
            rhs[n + p_eq + i] = -rg[i] + slack[i];
        }
        let aff = solver
            .solve(&rhs)
            .ok_or(QpError::NumericFailure("predictor solve"))?;
        let dz_aff = aff.rows(0, n).into_owned();
        let dlambda_aff = aff.rows(n + p_eq, m).into_owned();
        let ds_aff = -&rg - &s.g * &dz_aff;

        let alpha_p_aff = max_step(&slack, &ds_aff).min(1.0);
        let alpha_d_aff = max_step(&lambda, &dlambda_aff).min(1.0);
        let mu_aff = (&slack + &ds_aff * alpha_p_aff).dot(&(&lambda + &dlambda_aff * alpha_d_aff))
            / m as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector with centering and Mehrotra second-order term.
        let mut rcent = DVector::zeros(m);
        for i in 0..m {
            rcent[i] = slack[i] * lambda[i] - sigma * mu + ds_aff[i] * dlambda_aff[i];
        }
        let mut rhs = DVector::zeros(full);
        rhs.rows_mut(0, n).copy_from(&(-&rd));
        if p_eq > 0 {
            rhs.rows_mut(n, p_eq).copy_from(&(-&rp));
        }
        for i in 0..m {
            rhs[n + p_eq + i] = -rg[i] + rcent[i] / lambda[i];
        }
        let dir = solver
            .solve(&rhs)
            .ok_or(QpError::NumericFailure("corrector solve"))?;
        let dz = dir.rows(0, n).into_owned();
        let dy = if p_eq > 0 {
            dir.rows(n, p_eq).into_owned()
        } else {
            DVector::zeros(0)
        };
        let dlambda = dir.rows(n + p_eq, m).into_owned();
        let ds = -&rg - &s.g * &dz;

        let alpha_p = (0.99 * max_step(&slack, &ds)).min(1.0);
        let alpha_d = (0.99 * max_step(&lambda, &dlambda)).min(1.0);
        if alpha_p < 1e-13 && alpha_d < 1e-13 {
            // No progress possible; classify below.
            break;
        }

        z += &dz * alpha_p;
        slack += &ds * alpha_p;
        y += &dy * alpha_d;
        lambda += &dlambda * alpha_d;
    }

    // Post-loop classification for non-optimal exits: persistent primal
    // infeasibility with a small barrier parameter means the constraint
    // system has no solution.
    if status == QpStatus::MaxIter {
        let rp_bad = p_eq > 0 && (&s.a * &z - &s.b).amax() > 1e3 * settings.tol_feas * b_norm;
        let rg_bad = {
            let resid = &s.g * &z - &s.h;
            resid.iter().fold(0.0f64, |m, &v| m.max(v)) > 1e3 * settings.tol_feas * h_norm
        };
        if (rp_bad || rg_bad) && lambda.amax() > 1e6 {
            status = QpStatus::Infeasible;
        }
    }

    let kkt = scaled_kkt_report(s, &z, &y, &lambda, &slack);
    let mut eq_duals = DVector::zeros(p_eq);
    for i in 0..p_eq {
        eq_duals[i] = s.obj_scale * y[i] / s.eq_row_scale[i];
    }
    let mut ineq_duals = DVector::zeros(m);
    for i in 0..m {
        ineq_duals[i] = s.obj_scale * lambda[i] / s.ineq_row_scale[i];
    }
    Ok(QpSolution {
        objective: problem.objective_at(&z),
        z,
        status,
        kkt,
        eq_duals,
        ineq_duals,
        iterations,
    })
}
