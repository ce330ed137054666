//! Shared test oracles, independent of the solver implementation path.

use nalgebra::{DMatrix, DVector};

/// All k-element index subsets of 0..m.
pub fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn recurse(
        start: usize,
        m: usize,
        k: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for idx in start..m {
            if m - idx < k - current.len() {
                break;
            }
            current.push(idx);
            recurse(idx + 1, m, k, current, out);
            current.pop();
        }
    }
    recurse(0, m, k, &mut current, &mut out);
    out
}

/// Enumerate the vertices of { A z = b, G z <= h } by activating every
/// possible set of inequality rows that squares out the system.
pub fn enumerate_lp_vertices(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    g: &DMatrix<f64>,
    h: &DVector<f64>,
) -> Vec<DVector<f64>> {
    let n = g.ncols().max(a.ncols());
    let p = a.nrows();
    assert!(p <= n, "over-determined equality system");
    let need = n - p;
    let mut vertices = Vec::new();
    for active in combinations(g.nrows(), need) {
        let mut square = DMatrix::zeros(n, n);
        let mut rhs = DVector::zeros(n);
        for r in 0..p {
            square.row_mut(r).copy_from(&a.row(r));
            rhs[r] = b[r];
        }
        for (k, &row) in active.iter().enumerate() {
            square.row_mut(p + k).copy_from(&g.row(row));
            rhs[p + k] = h[row];
        }
        let Some(z) = square.lu().solve(&rhs) else {
            continue;
        };
        let eq_ok = p == 0 || (a * &z - b).amax() <= 1e-8;
        let ineq_ok = (0..g.nrows()).all(|r| g.row(r).transpose().dot(&z) <= h[r] + 1e-8);
        if eq_ok && ineq_ok {
            vertices.push(z);
        }
    }
    vertices
}

/// Minimum of a linear objective over the polytope, by vertex enumeration.
pub fn lp_min_by_enumeration(
    q: &DVector<f64>,
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    g: &DMatrix<f64>,
    h: &DVector<f64>,
) -> Option<f64> {
    enumerate_lp_vertices(a, b, g, h)
        .into_iter()
        .map(|z| q.dot(&z))
        .min_by(f64::total_cmp)
}
