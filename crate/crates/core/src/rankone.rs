//! Rank-one eigensystem updates through the secular equation.
//!
//! Given the eigensystem `G = V·diag(d)·V^H` of a Gram matrix and a vector
//! `h`, the eigensystem of `G − h·h^H` (downdate, row removal) or
//! `G + h·h^H` (update, row insertion) is recovered from `z = V^H·h`:
//! the new eigenvalues are the roots of
//!
//! ```text
//! f(x) = 1 ∓ Σ_i |z_i|² / (d_i − x)
//! ```
//!
//! one per interlacing bracket, and the eigenvector for root `x` is
//! `V·(D − x·I)^{-1}·z`, normalized.
//!
//! Components with negligible `z_i`, and clusters of coincident poles, are
//! deflated first; the corresponding eigenpairs pass through unchanged.
//! Roots are found by bisection in coordinates shifted to the nearest pole
//! so that roots very close to a pole keep full relative accuracy in
//! `d_i − x`.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::linalg::{self, ComplexMatrix, EigenSystem};
use crate::OpCounter;

/// `|z_i| ≤ Z_DEFLATION·‖z‖` deflates component i.
pub const Z_DEFLATION: f64 = 1e-12;
/// Poles closer than `POLE_DEFLATION·max(|d₁|, 1)` are treated as coincident.
pub const POLE_DEFLATION: f64 = 1e-12;
/// A downdate whose smallest eigenvalue falls below `−PSD_TOL·d₁` is rejected.
pub const PSD_TOL: f64 = 1e-8;
/// Eigenvector matrices further than this from orthonormal are re-orthonormalized.
pub const ORTHO_TOL: f64 = 1e-10;

const MAX_BISECTIONS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RankOneError {
    #[error("secular function has no sign change over bracket {bracket}: {reason}")]
    BracketFailure { bracket: usize, reason: String },
    #[error("root {root} coincides with pole {pole}")]
    SingularShift { root: f64, pole: f64 },
    #[error("downdate leaves eigenvalue {value:e} below zero (largest {largest:e})")]
    PsdViolation { value: f64, largest: f64 },
    #[error("vector has length {got}, eigensystem has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `D − z·z^H`
    Downdate,
    /// `D + z·z^H`
    Update,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Downdate => -1.0,
            Direction::Update => 1.0,
        }
    }
}

/// Poles (descending) and weights `|z_i|²` of a secular equation.
#[derive(Debug, Clone, PartialEq)]
pub struct SecularProblem {
    pub poles: Vec<f64>,
    pub weights: Vec<f64>,
    pub direction: Direction,
}

impl SecularProblem {
    pub fn new(poles: Vec<f64>, weights: Vec<f64>, direction: Direction) -> Self {
        Self {
            poles,
            weights,
            direction,
        }
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `1 ∓ Σ w_i / (d_i − x)`, sign per direction.
    pub fn eval(&self, x: f64) -> f64 {
        let s: f64 = self.poles.iter().zip(&self.weights).map(|(d, w)| w / (d - x)).sum();
        1.0 + self.direction.sign() * s
    }

    /// Interlacing bracket `(lower, upper)` of root k among the active poles.
    pub fn bracket(&self, k: usize) -> (f64, f64) {
        let n = self.len();
        let w = self.weight_sum();
        match self.direction {
            Direction::Downdate => {
                let lower = if k + 1 < n {
                    self.poles[k + 1]
                } else {
                    self.poles[n - 1] - w
                };
                (lower, self.poles[k])
            }
            Direction::Update => {
                let upper = if k == 0 { self.poles[0] + w } else { self.poles[k - 1] };
                (self.poles[k], upper)
            }
        }
    }
}

/// A root stored as `poles[origin] + offset`.
#[derive(Debug, Clone, Copy)]
struct ShiftedRoot {
    origin: usize,
    offset: f64,
}

impl ShiftedRoot {
    fn value(&self, poles: &[f64]) -> f64 {
        poles[self.origin] + self.offset
    }

    /// `d_i − root`, computed without cancellation against the origin pole.
    fn gap(&self, poles: &[f64], i: usize) -> f64 {
        (poles[i] - poles[self.origin]) - self.offset
    }
}

/// Roots of the secular equation, descending, one per interlacing bracket.
///
/// Components with zero weight return their pole unchanged.
pub fn secular_roots(problem: &SecularProblem) -> Result<Vec<f64>, RankOneError> {
    secular_roots_with(problem, &OpCounter::new())
}

pub fn secular_roots_with(problem: &SecularProblem, ops: &OpCounter) -> Result<Vec<f64>, RankOneError> {
    if problem.poles.len() != problem.weights.len() {
        return Err(RankOneError::BracketFailure {
            bracket: 0,
            reason: "poles and weights differ in length".into(),
        });
    }
    if let Some(i) = problem.weights.iter().position(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(RankOneError::BracketFailure {
            bracket: i,
            reason: format!("weight {} is negative or not finite", problem.weights[i]),
        });
    }
    let active: Vec<usize> = (0..problem.len()).filter(|&i| problem.weights[i] > 0.0).collect();
    let reduced = SecularProblem::new(
        active.iter().map(|&i| problem.poles[i]).collect(),
        active.iter().map(|&i| problem.weights[i]).collect(),
        problem.direction,
    );
    let shifted = solve_shifted(&reduced, ops)?;
    let mut roots: Vec<f64> = problem
        .poles
        .iter()
        .enumerate()
        .filter(|(i, _)| problem.weights[*i] == 0.0)
        .map(|(_, &d)| d)
        .collect();
    roots.extend(shifted.iter().map(|r| r.value(&reduced.poles)));
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok(roots)
}

fn solve_shifted(problem: &SecularProblem, ops: &OpCounter) -> Result<Vec<ShiftedRoot>, RankOneError> {
    let n = problem.len();
    let poles = &problem.poles;
    for k in 1..n {
        if !(poles[k - 1] > poles[k]) {
            return Err(RankOneError::BracketFailure {
                bracket: k,
                reason: format!("poles {} and {} not strictly descending", poles[k - 1], poles[k]),
            });
        }
    }
    if let Some(i) = problem.weights.iter().position(|w| !(*w > 0.0)) {
        return Err(RankOneError::BracketFailure {
            bracket: i,
            reason: "non-positive weight in active problem".into(),
        });
    }

    let weights = &problem.weights;
    let sign = problem.direction.sign();
    let mut roots = Vec::with_capacity(n);
    for k in 0..n {
        let (lower, upper) = problem.bracket(k);
        // choose the pole nearest to the root as origin
        let (origin, mut a, mut b) = match problem.direction {
            Direction::Downdate => {
                if k + 1 == n {
                    (k, lower - poles[k], 0.0)
                } else {
                    let mid = 0.5 * (lower + upper);
                    ops.add(n as u64);
                    if problem.eval(mid) > 0.0 {
                        (k, mid - poles[k], 0.0)
                    } else {
                        (k + 1, 0.0, mid - poles[k + 1])
                    }
                }
            }
            Direction::Update => {
                if k == 0 {
                    (0, 0.0, upper - poles[0])
                } else {
                    let mid = 0.5 * (lower + upper);
                    ops.add(n as u64);
                    if problem.eval(mid) > 0.0 {
                        (k, 0.0, mid - poles[k])
                    } else {
                        (k - 1, mid - poles[k - 1], 0.0)
                    }
                }
            }
        };
        let deltas: Vec<f64> = poles.iter().map(|d| d - poles[origin]).collect();
        let shifted_eval = |mu: f64| -> f64 {
            let s: f64 = deltas.iter().zip(weights).map(|(dl, w)| w / (dl - mu)).sum();
            1.0 + sign * s
        };
        // f decreases across a downdate bracket and increases across an update
        // bracket; `left_positive` says which side of the root f is positive on
        let left_positive = matches!(problem.direction, Direction::Downdate);
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b || (b - a) <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) {
                break;
            }
            let f = shifted_eval(mid);
            ops.add(n as u64);
            if f.is_nan() {
                return Err(RankOneError::BracketFailure {
                    bracket: k,
                    reason: "secular function evaluated to NaN".into(),
                });
            }
            if (f > 0.0) == left_positive {
                a = mid;
            } else {
                b = mid;
            }
        }
        let offset = 0.5 * (a + b);
        if offset == 0.0 && weights[origin] > 0.0 {
            // the bracket collapsed onto the pole: preconditions were violated
            return Err(RankOneError::BracketFailure {
                bracket: k,
                reason: "root collapsed onto a pole".into(),
            });
        }
        roots.push(ShiftedRoot { origin, offset });
    }
    Ok(roots)
}

/// Unit eigenvector `(D − root·I)^{-1}·z / ‖·‖` of `diag(poles) ± z·z^H`.
pub fn eigvec_from_root(poles: &[f64], z: &[C64], root: f64) -> Result<Vec<C64>, RankOneError> {
    if poles.len() != z.len() {
        return Err(RankOneError::DimensionMismatch {
            expected: poles.len(),
            got: z.len(),
        });
    }
    let mut q = Vec::with_capacity(z.len());
    for (&d, &zi) in poles.iter().zip(z) {
        let gap = d - root;
        if gap.abs() <= 1e-14 * d.abs() || gap == 0.0 {
            if zi == C64::new(0.0, 0.0) {
                q.push(C64::new(0.0, 0.0));
                continue;
            }
            return Err(RankOneError::SingularShift { root, pole: d });
        }
        q.push(zi / gap);
    }
    let norm = linalg::vec_norm(&q);
    Ok(q.into_iter().map(|x| x / norm).collect())
}

/// New eigensystem after a rank-one change, with the reduced secular
/// problem that produced it.
#[derive(Debug, Clone)]
pub struct UpdateResult {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
    /// Indices of input eigenpairs that passed through deflation unchanged.
    pub deflated_indices: Vec<usize>,
    /// The secular problem after deflation (active poles and weights).
    pub secular: SecularProblem,
    /// Roots of `secular`, descending, before clamping.
    pub roots: Vec<f64>,
}

impl UpdateResult {
    pub fn into_system(self) -> EigenSystem {
        EigenSystem {
            values: self.values,
            vectors: self.vectors,
        }
    }
}

/// Eigensystem of `V·diag(d)·V^H − h·h^H`.
pub fn downdate_eigs(sys: &EigenSystem, h: &[C64]) -> Result<UpdateResult, RankOneError> {
    rank_one(sys, h, Direction::Downdate, &OpCounter::new())
}

pub fn downdate_eigs_with(sys: &EigenSystem, h: &[C64], ops: &OpCounter) -> Result<UpdateResult, RankOneError> {
    rank_one(sys, h, Direction::Downdate, ops)
}

/// Eigensystem of `V·diag(d)·V^H + h·h^H`.
pub fn update_eigs(sys: &EigenSystem, h: &[C64]) -> Result<UpdateResult, RankOneError> {
    rank_one(sys, h, Direction::Update, &OpCounter::new())
}

pub fn update_eigs_with(sys: &EigenSystem, h: &[C64], ops: &OpCounter) -> Result<UpdateResult, RankOneError> {
    rank_one(sys, h, Direction::Update, ops)
}

/// Eigenvalues only (descending) of the rank-one modified Gram matrix.
/// This is the per-candidate path of the greedy selectors: O(K²) work.
pub fn modified_values_with(
    sys: &EigenSystem,
    h: &[C64],
    direction: Direction,
    ops: &OpCounter,
) -> Result<Vec<f64>, RankOneError> {
    let z = project(sys, h, ops)?;
    let Some(mut plan) = deflate(&sys.values, &z, None, ops) else {
        return Ok(sys.values.clone());
    };
    plan.problem.direction = direction;
    let roots = solve_shifted(&plan.problem, ops)?;
    let mut values: Vec<f64> = plan.deflated.iter().map(|&i| sys.values[i]).collect();
    values.extend(roots.iter().map(|r| r.value(&plan.problem.poles)));
    values.sort_by(|a, b| b.total_cmp(a));
    finish_values(&mut values, &sys.values, direction)?;
    Ok(values)
}

fn project(sys: &EigenSystem, h: &[C64], ops: &OpCounter) -> Result<Vec<C64>, RankOneError> {
    let k = sys.dim();
    if h.len() != k {
        return Err(RankOneError::DimensionMismatch {
            expected: k,
            got: h.len(),
        });
    }
    let v = &sys.vectors;
    let mut z = vec![C64::new(0.0, 0.0); k];
    for (r, &hr) in h.iter().enumerate() {
        if hr == C64::new(0.0, 0.0) {
            continue;
        }
        for (c, zc) in z.iter_mut().enumerate() {
            *zc += v[(r, c)].conj() * hr;
        }
    }
    ops.add((k * k) as u64);
    Ok(z)
}

struct DeflationPlan {
    /// active indices into the (possibly rotated) eigensystem
    active: Vec<usize>,
    deflated: Vec<usize>,
    /// z after rotations; only active entries are meaningful
    z: Vec<C64>,
    problem: SecularProblem,
}

/// Deflates negligible components and coincident poles. Rotations needed to
/// concentrate `z` within a cluster are applied to `vectors` when given.
/// Returns `None` when `z` vanishes.
fn deflate(
    values: &[f64],
    z: &[C64],
    mut vectors: Option<&mut ComplexMatrix>,
    ops: &OpCounter,
) -> Option<DeflationPlan> {
    let k = values.len();
    let znorm = linalg::vec_norm(z);
    if znorm == 0.0 {
        return None;
    }
    let mut z = z.to_vec();
    let small = Z_DEFLATION * znorm;
    let pole_tol = POLE_DEFLATION * values.first().map_or(0.0, |d| d.abs()).max(1.0);
    let mut is_active: Vec<bool> = z.iter().map(|x| x.norm() > small).collect();

    let mut prev: Option<usize> = None;
    for i in 0..k {
        if !is_active[i] {
            continue;
        }
        if let Some(p) = prev {
            if (values[p] - values[i]).abs() <= pole_tol {
                // unitary 2x2 rotation zeroing z_p and moving its weight into z_i
                let (a, b) = (z[p], z[i]);
                let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
                if let Some(v) = vectors.as_deref_mut() {
                    for row in 0..v.rows() {
                        let vp = v[(row, p)];
                        let vi = v[(row, i)];
                        v[(row, p)] = (b.conj() * vp - a.conj() * vi) / r;
                        v[(row, i)] = (a * vp + b * vi) / r;
                    }
                    ops.add(2 * v.rows() as u64);
                }
                z[p] = C64::new(0.0, 0.0);
                z[i] = C64::new(r, 0.0);
                is_active[p] = false;
            }
        }
        prev = Some(i);
    }
    ops.add(k as u64);

    let active: Vec<usize> = (0..k).filter(|&i| is_active[i]).collect();
    let deflated: Vec<usize> = (0..k).filter(|&i| !is_active[i]).collect();
    let problem = SecularProblem::new(
        active.iter().map(|&i| values[i]).collect(),
        active.iter().map(|&i| z[i].norm_sqr()).collect(),
        Direction::Downdate,
    );
    Some(DeflationPlan {
        active,
        deflated,
        z,
        problem,
    })
}

/// PSD check and clamp for downdates.
fn finish_values(values: &mut [f64], old: &[f64], direction: Direction) -> Result<(), RankOneError> {
    if direction == Direction::Downdate {
        let largest = old.first().copied().unwrap_or(0.0).abs();
        if let Some(&min) = values.last() {
            if min < -PSD_TOL * largest.max(f64::MIN_POSITIVE) {
                return Err(RankOneError::PsdViolation { value: min, largest });
            }
        }
        for v in values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
    }
    Ok(())
}

fn rank_one(sys: &EigenSystem, h: &[C64], direction: Direction, ops: &OpCounter) -> Result<UpdateResult, RankOneError> {
    let k = sys.dim();
    let z = project(sys, h, ops)?;
    let mut vectors = sys.vectors.clone();
    let Some(mut plan) = deflate(&sys.values, &z, Some(&mut vectors), ops) else {
        return Ok(UpdateResult {
            values: sys.values.clone(),
            vectors,
            deflated_indices: (0..k).collect(),
            secular: SecularProblem::new(vec![], vec![], direction),
            roots: vec![],
        });
    };
    plan.problem.direction = direction;
    let roots = solve_shifted(&plan.problem, ops)?;
    let poles = &plan.problem.poles;

    // (value, column) pairs, later sorted by value
    let mut pairs: Vec<(f64, Vec<C64>)> = Vec::with_capacity(k);
    for &i in &plan.deflated {
        pairs.push((sys.values[i], vectors.column(i)));
    }
    let za: Vec<C64> = plan.active.iter().map(|&i| plan.z[i]).collect();
    for root in &roots {
        let mut q: Vec<C64> = za.iter().enumerate().map(|(t, &zt)| zt / root.gap(poles, t)).collect();
        let norm = linalg::vec_norm(&q);
        for x in q.iter_mut() {
            *x /= norm;
        }
        ops.add(za.len() as u64);
        let mut col = vec![C64::new(0.0, 0.0); k];
        for (t, &qt) in q.iter().enumerate() {
            let src = plan.active[t];
            for (r, c) in col.iter_mut().enumerate() {
                *c += vectors[(r, src)] * qt;
            }
        }
        pairs.push((root.value(poles), col));
    }
    ops.add((k * plan.active.len() * plan.active.len()) as u64);

    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    finish_values(&mut values, &sys.values, direction)?;
    let columns: Vec<Vec<C64>> = pairs.into_iter().map(|p| p.1).collect();
    let mut new_vectors = ComplexMatrix::from_columns(&columns).expect("eigenvector columns have equal length");
    if linalg::orthonormality_error(&new_vectors) > ORTHO_TOL {
        linalg::orthonormalize_columns(&mut new_vectors);
    }

    let root_values = roots.iter().map(|r| r.value(poles)).collect();
    Ok(UpdateResult {
        values,
        vectors: new_vectors,
        deflated_indices: plan.deflated,
        secular: plan.problem,
        roots: root_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{gram, hermitian_eig};

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn downdate_two_poles() {
        // D − zz^H = [[2, −1], [−1, 0]]
        let p = SecularProblem::new(vec![3.0, 1.0], vec![1.0, 1.0], Direction::Downdate);
        let roots = secular_roots(&p).unwrap();
        assert!((roots[0] - (1.0 + SQRT2)).abs() < 1e-12);
        assert!((roots[1] - (1.0 - SQRT2)).abs() < 1e-12);
    }

    #[test]
    fn update_two_poles() {
        // D + zz^H = [[3, 1], [1, 1]]
        let p = SecularProblem::new(vec![2.0, 0.0], vec![1.0, 1.0], Direction::Update);
        let roots = secular_roots(&p).unwrap();
        assert!((roots[0] - (2.0 + SQRT2)).abs() < 1e-12);
        assert!((roots[1] - (2.0 - SQRT2)).abs() < 1e-12);
    }

    #[test]
    fn zero_weights_return_poles() {
        for dir in [Direction::Downdate, Direction::Update] {
            let p = SecularProblem::new(vec![5.0, 2.0, 1.0], vec![0.0; 3], dir);
            assert_eq!(secular_roots(&p).unwrap(), vec![5.0, 2.0, 1.0]);
        }
    }

    #[test]
    fn broken_preconditions_are_reported() {
        let p = SecularProblem::new(vec![1.0, 3.0], vec![1.0, 1.0], Direction::Downdate);
        assert!(matches!(secular_roots(&p), Err(RankOneError::BracketFailure { .. })));
        let p = SecularProblem::new(vec![3.0, 1.0], vec![1.0, -1.0], Direction::Update);
        assert!(matches!(secular_roots(&p), Err(RankOneError::BracketFailure { .. })));
    }

    #[test]
    fn residual_bound_holds() {
        let p = SecularProblem::new(
            vec![10.0, 4.0, 3.5, 1.0, 0.1],
            vec![0.3, 1e-3, 2.0, 0.7, 0.05],
            Direction::Downdate,
        );
        for dir in [Direction::Downdate, Direction::Update] {
            let p = SecularProblem {
                direction: dir,
                ..p.clone()
            };
            for root in secular_roots(&p).unwrap() {
                let scale: f64 = p.poles.iter().zip(&p.weights).map(|(d, w)| w / (d - root).abs()).sum();
                assert!(p.eval(root).abs() <= 1e-10 * (1.0 + scale), "{dir:?} root {root}");
            }
        }
    }

    #[test]
    fn roots_near_poles_keep_relative_gap_accuracy() {
        // weight 1e-9 puts a root within ~1e-12 of the pole at 4; in shifted
        // coordinates the residual stays at round-off level
        let p = SecularProblem::new(
            vec![10.0, 4.0, 3.999, 1.0, 0.1],
            vec![0.3, 1e-9, 2.0, 0.7, 0.05],
            Direction::Downdate,
        );
        let roots = solve_shifted(&p, &OpCounter::new()).unwrap();
        for r in &roots {
            let terms: Vec<f64> = (0..p.len()).map(|i| p.weights[i] / r.gap(&p.poles, i)).collect();
            let f = 1.0 - terms.iter().sum::<f64>();
            let scale: f64 = terms.iter().map(|t| t.abs()).sum();
            assert!(f.abs() <= 1e-12 * (1.0 + scale), "residual {f} scale {scale}");
            assert!(r.gap(&p.poles, r.origin) != 0.0);
        }
    }

    #[test]
    fn eigvec_examples() {
        let z = [c(1.0), c(1.0)];
        let q = eigvec_from_root(&[3.0, 1.0], &z, 1.0 + SQRT2).unwrap();
        // eigenvector of [[2,−1],[−1,0]] at 1+√2, normalized: (cos π/8, −sin π/8)
        let (e0, e1) = ((std::f64::consts::PI / 8.0).cos(), (std::f64::consts::PI / 8.0).sin());
        let sign = q[0].re.signum();
        assert!((q[0].re * sign - e0).abs() < 1e-5 && (q[1].re * sign + e1).abs() < 1e-5);
        assert!((q[0].re.abs() - 0.92388).abs() < 1e-5);

        // z confined to the first coordinate: root 2, vector e_1
        let q = eigvec_from_root(&[3.0, 1.0], &[c(1.0), c(0.0)], 2.0).unwrap();
        assert!((q[0] - c(1.0)).norm() < 1e-15 && q[1].norm() < 1e-15);

        // update direction against a direct eigensolve of [[3,1],[1,1]]
        let root = 2.0 + SQRT2;
        let q = eigvec_from_root(&[2.0, 0.0], &z, root).unwrap();
        let g = ComplexMatrix::from_real_rows(&[vec![3.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let gq = g.mul_vec(&q).unwrap();
        for (a, b) in gq.iter().zip(&q) {
            assert!((a - b * root).norm() < 1e-8 * root);
        }
        assert!((linalg::vec_norm(&q) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigvec_rejects_root_on_pole() {
        assert!(matches!(
            eigvec_from_root(&[3.0, 1.0], &[c(1.0), c(1.0)], 3.0),
            Err(RankOneError::SingularShift { .. })
        ));
    }

    #[test]
    fn zero_vector_leaves_system_unchanged() {
        let g = ComplexMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let sys = hermitian_eig(&g).unwrap();
        let zero = [c(0.0), c(0.0)];
        for r in [downdate_eigs(&sys, &zero).unwrap(), update_eigs(&sys, &zero).unwrap()] {
            assert_eq!(r.values, sys.values);
            assert_eq!(r.vectors, sys.vectors);
        }
    }

    #[test]
    fn downdate_recovers_identity() {
        let h = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let sys = hermitian_eig(&gram(&h)).unwrap();
        let row: Vec<C64> = h.row(2).iter().map(|x| x.conj()).collect();
        let out = downdate_eigs(&sys, &row).unwrap();
        assert!((out.values[0] - 1.0).abs() < 1e-12 && (out.values[1] - 1.0).abs() < 1e-12);
        let rebuilt = out.into_system().reconstruct();
        assert!(rebuilt.distance(&ComplexMatrix::identity(2)) < 1e-10);
    }

    #[test]
    fn update_with_disjoint_support_deflates() {
        let sys = hermitian_eig(&ComplexMatrix::from_diagonal(&[1.0, 0.0])).unwrap();
        let out = update_eigs(&sys, &[c(0.0), c(1.0)]).unwrap();
        assert_eq!(out.values[0], 1.0);
        assert!((out.values[1] - 1.0).abs() < 1e-15);
        assert_eq!(out.deflated_indices, vec![0]);
    }

    #[test]
    fn update_from_zero_system_concentrates_weight() {
        let sys = EigenSystem::zero(3);
        let h = [C64::new(1.0, 1.0), c(2.0), C64::new(0.0, -1.0)];
        let out = update_eigs(&sys, &h).unwrap();
        assert!((out.values[0] - 7.0).abs() < 1e-12);
        assert_eq!(&out.values[1..], &[0.0, 0.0]);
        let expected = {
            let mut g = ComplexMatrix::zeros(3, 3);
            for i in 0..3 {
                for j in 0..3 {
                    g[(i, j)] = h[i] * h[j].conj();
                }
            }
            g
        };
        let sys2 = out.into_system();
        assert!(sys2.reconstruct().distance(&expected) < 1e-12);
        assert!(sys2.orthonormality_error() < 1e-12);
    }

    #[test]
    fn psd_violation_detected() {
        let sys = hermitian_eig(&ComplexMatrix::from_diagonal(&[1.0, 0.5])).unwrap();
        assert!(matches!(
            downdate_eigs(&sys, &[c(2.0), c(0.0)]),
            Err(RankOneError::PsdViolation { .. })
        ));
    }

    #[test]
    fn values_only_path_matches_full_path() {
        let g = ComplexMatrix::from_rows(&[
            vec![c(4.0), C64::new(1.0, 0.5), c(0.2)],
            vec![C64::new(1.0, -0.5), c(3.0), C64::new(0.0, 1.0)],
            vec![c(0.2), C64::new(0.0, -1.0), c(2.0)],
        ])
        .unwrap();
        let sys = hermitian_eig(&g).unwrap();
        let h = [C64::new(0.3, 0.1), c(-0.4), C64::new(0.2, 0.2)];
        for dir in [Direction::Downdate, Direction::Update] {
            let ops = OpCounter::new();
            let vals = modified_values_with(&sys, &h, dir, &ops).unwrap();
            let full = rank_one(&sys, &h, dir, &OpCounter::new()).unwrap();
            assert_eq!(vals, full.values);
        }
    }
}
