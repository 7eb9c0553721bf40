// SPDX-License-Identifier: Apache-2.0

//! Step-2 truncated tensor algebra over `R^D`.
//!
//! A [`StepTwoLift`] is a group element `(x, X)` of the step-2 free nilpotent
//! group: `x` is the path increment and `X` the matrix of second iterated
//! integrals `X^{ij} = \int x^i dx^j`. The group law is
//!
//! ```text
//! (a, A) * (b, B) = (a + b, A + B + a ⊗ b)
//! ```
//!
//! A [`LiftedPath`] stores running signatures `S_{0,i}` on a time grid and
//! recovers interval lifts `S_{i,j} = S_{0,i}^{-1} * S_{0,j}`, so Chen's
//! relation holds by construction.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Tolerance used to accept a matrix as antisymmetric, relative to `max(1, |v|)`.
pub const ANTISYMMETRY_TOL: f64 = 1e-12;

/// Above this many intervals the Hölder sweep only visits dyadic pairs `(i, i + 2^k)`.
pub const FULL_PAIR_SWEEP_MAX: usize = 2048;

#[derive(Debug, Clone, PartialEq)]
pub struct StepTwoLift {
    level1: DVector<f64>,
    level2: DMatrix<f64>,
}

impl StepTwoLift {
    pub fn identity(dim: usize) -> Self {
        Self {
            level1: DVector::zeros(dim),
            level2: DMatrix::zeros(dim, dim),
        }
    }

    pub fn new(level1: DVector<f64>, level2: DMatrix<f64>) -> Result<Self> {
        let dim = level1.len();
        if level2.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: level2.nrows(),
            });
        }
        if level2.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: level2.ncols(),
            });
        }
        if !level1.iter().chain(level2.iter()).all(|v| v.is_finite()) {
            return Err(Error::NonFinite("step-2 lift"));
        }
        Ok(Self { level1, level2 })
    }

    /// Lift of a straight segment with the given increment.
    pub fn exp(increment: &[f64]) -> Self {
        let level1 = DVector::from_column_slice(increment);
        let level2 = &level1 * level1.transpose() * 0.5;
        Self { level1, level2 }
    }

    pub fn dim(&self) -> usize {
        self.level1.len()
    }

    pub fn level1(&self) -> &DVector<f64> {
        &self.level1
    }

    pub fn level2(&self) -> &DMatrix<f64> {
        &self.level2
    }

    pub fn into_parts(self) -> (DVector<f64>, DMatrix<f64>) {
        (self.level1, self.level2)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let level1 = &self.level1 + &other.level1;
        let mut level2 = &self.level2 + &other.level2;
        level2.ger(1.0, &self.level1, &other.level1, 1.0);
        Ok(Self { level1, level2 })
    }

    pub fn inverse(&self) -> Self {
        let level1 = -&self.level1;
        let level2 = &self.level1 * self.level1.transpose() - &self.level2;
        Self { level1, level2 }
    }

    /// Antisymmetric part `½(X - X^T)` of the second level.
    pub fn levy_area(&self) -> DMatrix<f64> {
        (&self.level2 - self.level2.transpose()) * 0.5
    }

    /// Largest entrywise deviation of `Sym(X)` from `½ x ⊗ x`.
    pub fn geometric_defect(&self) -> f64 {
        let sym = (&self.level2 + self.level2.transpose()) * 0.5;
        let target = &self.level1 * self.level1.transpose() * 0.5;
        (sym - target).amax()
    }
}

pub fn exp_step2(increment: &[f64]) -> StepTwoLift {
    StepTwoLift::exp(increment)
}

pub fn chen_mul(a: &StepTwoLift, b: &StepTwoLift) -> Result<StepTwoLift> {
    a.mul(b)
}

pub fn chen_inv(a: &StepTwoLift) -> StepTwoLift {
    a.inverse()
}

pub fn levy_area(a: &StepTwoLift) -> DMatrix<f64> {
    a.levy_area()
}

/// Streaming accumulator for the signature of a piecewise-linear path.
///
/// Each pushed increment is multiplied on the right as a segment exponential,
/// without allocating.
#[derive(Debug, Clone)]
pub struct RunningLift {
    level1: DVector<f64>,
    level2: DMatrix<f64>,
    mid: DVector<f64>,
}

impl RunningLift {
    pub fn new(dim: usize) -> Self {
        Self {
            level1: DVector::zeros(dim),
            level2: DMatrix::zeros(dim, dim),
            mid: DVector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.level1.len()
    }

    /// Append a straight segment: `X += (x + ½Δ) ⊗ Δ`, `x += Δ`.
    pub fn push(&mut self, increment: &[f64]) {
        debug_assert_eq!(increment.len(), self.dim());
        let inc = nalgebra::DVectorView::from_slice(increment, increment.len());
        self.mid.copy_from(&self.level1);
        self.mid.axpy(0.5, &inc, 1.0);
        self.level2.ger(1.0, &self.mid, &inc, 1.0);
        self.level1 += inc;
    }

    pub fn snapshot(&self) -> StepTwoLift {
        StepTwoLift {
            level1: self.level1.clone(),
            level2: self.level2.clone(),
        }
    }
}

/// Antisymmetric counter-term `v`, acting on lifts by `X_{s,t} -> X_{s,t} + (t - s) v`.
#[derive(Debug, Clone, PartialEq)]
pub struct RenormTerm {
    v: DMatrix<f64>,
}

impl RenormTerm {
    pub fn new(v: DMatrix<f64>) -> Result<Self> {
        if !v.is_square() {
            return Err(Error::DimensionMismatch {
                expected: v.nrows(),
                found: v.ncols(),
            });
        }
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("counter-term"));
        }
        let asymmetry = (&v + v.transpose()).norm();
        if asymmetry > ANTISYMMETRY_TOL * v.norm().max(1.0) {
            return Err(Error::NotAntisymmetric { asymmetry });
        }
        Ok(Self { v })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            v: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.v.norm()
    }

    pub fn negated(&self) -> Self {
        Self { v: -&self.v }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPath {
    times: Vec<f64>,
    running: Vec<StepTwoLift>,
}

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(i) = times.iter().position(|t| !t.is_finite()) {
        return Err(Error::NonMonotoneTimes { index: i });
    }
    if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneTimes { index: i + 1 });
    }
    Ok(())
}

impl LiftedPath {
    /// Assemble from precomputed running signatures; `running[0]` must be the identity.
    pub fn from_running(times: Vec<f64>, running: Vec<StepTwoLift>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::TooFewPoints {
                needed: 2,
                found: times.len(),
            });
        }
        if times.len() != running.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: running.len(),
            });
        }
        check_times(&times)?;
        let dim = running[0].dim();
        if let Some(bad) = running.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        if running[0] != StepTwoLift::identity(dim) {
            return Err(Error::InvalidParameter(
                "running signature must start at the identity".into(),
            ));
        }
        Ok(Self { times, running })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.running[0].dim()
    }

    /// Running signature `S_{0,i}`.
    pub fn running(&self, i: usize) -> &StepTwoLift {
        &self.running[i]
    }

    /// Interval lift `S_{i,j} = S_{0,i}^{-1} * S_{0,j}`; `i > j` yields the reversed interval.
    pub fn interval(&self, i: usize, j: usize) -> StepTwoLift {
        let a = &self.running[i];
        let b = &self.running[j];
        // S_{0,i}^{-1} * S_{0,j} = (x_j - x_i, X_j - X_i - x_i ⊗ (x_j - x_i))
        let level1 = &b.level1 - &a.level1;
        let mut level2 = &b.level2 - &a.level2;
        level2.ger(-1.0, &a.level1, &level1, 1.0);
        StepTwoLift { level1, level2 }
    }

    /// Apply `T_v`: every interval lift gains `(t_j - t_i) v` on level 2.
    pub fn translate(&self, v: &RenormTerm) -> Result<Self> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.dim(),
            });
        }
        let t0 = self.times[0];
        let running = self
            .times
            .iter()
            .zip(&self.running)
            .map(|(&t, s)| {
                let mut s = s.clone();
                s.level2 += v.matrix() * (t - t0);
                s
            })
            .collect();
        Ok(Self {
            times: self.times.clone(),
            running,
        })
    }

    /// Restrict to a subset of grid indices, rebasing at the first one.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::IndexOutOfRange(format!(
                "grid index {bad} for a path with {} points",
                self.len()
            )));
        }
        let base = *indices.first().ok_or(Error::TooFewPoints {
            needed: 2,
            found: 0,
        })?;
        let times = indices.iter().map(|&i| self.times[i]).collect();
        let running = indices.iter().map(|&i| self.interval(base, i)).collect();
        Self::from_running(times, running)
    }
}

/// Signature of the piecewise-linear interpolation of `points` at `times`.
pub fn lift_piecewise_linear<P: AsRef<[f64]>>(times: &[f64], points: &[P]) -> Result<LiftedPath> {
    if times.len() != points.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: points.len(),
        });
    }
    if points.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: points.len(),
        });
    }
    check_times(times)?;
    let dim = points[0].as_ref().len();
    let mut acc = RunningLift::new(dim);
    let mut running = Vec::with_capacity(points.len());
    running.push(acc.snapshot());
    let mut inc = vec![0.0; dim];
    for w in points.windows(2) {
        let (prev, next) = (w[0].as_ref(), w[1].as_ref());
        if next.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: next.len(),
            });
        }
        for ((d, a), b) in inc.iter_mut().zip(prev).zip(next) {
            *d = b - a;
        }
        if !inc.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite("path samples"));
        }
        acc.push(&inc);
        running.push(acc.snapshot());
    }
    Ok(LiftedPath {
        times: times.to_vec(),
        running,
    })
}

pub fn translate(path: &LiftedPath, v: &RenormTerm) -> Result<LiftedPath> {
    path.translate(v)
}

/// Which grid pairs `(i, j)` the Hölder sweep visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSweep {
    All,
    /// Pairs `(i, i + 2^k)` only.
    Dyadic,
}

impl PairSweep {
    pub fn for_intervals(n: usize) -> Self {
        if n <= FULL_PAIR_SWEEP_MAX {
            PairSweep::All
        } else {
            PairSweep::Dyadic
        }
    }
}

fn same_grid(x: &LiftedPath, y: &LiftedPath) -> bool {
    x.len() == y.len()
        && x
            .times
            .iter()
            .zip(&y.times)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0))
}

/// Inhomogeneous α-Hölder distance between two lifts on the same grid.
///
/// Level 1 uses the Euclidean norm, level 2 the Frobenius norm; the suprema
/// run over grid pairs (see [`PairSweep`]).
pub fn holder_distance(x: &LiftedPath, y: &LiftedPath, alpha: f64) -> Result<f64> {
    holder_distance_with(x, y, alpha, PairSweep::for_intervals(x.len().saturating_sub(1)))
}

pub fn holder_distance_with(
    x: &LiftedPath,
    y: &LiftedPath,
    alpha: f64,
    sweep: PairSweep,
) -> Result<f64> {
    if !(0.0..0.5).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "Hölder exponent {alpha} outside [0, 1/2)"
        )));
    }
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    if !same_grid(x, y) {
        return Err(Error::GridMismatch);
    }
    let d = x.dim();
    let n = x.len();
    let mut sup1: f64 = 0.0;
    let mut sup2: f64 = 0.0;
    let mut visit = |i: usize, j: usize| {
        let (xi, xj) = (&x.running[i], &x.running[j]);
        let (yi, yj) = (&y.running[i], &y.running[j]);
        let dt = x.times[j] - x.times[i];
        let mut n1 = 0.0;
        for a in 0..d {
            let dx = xj.level1[a] - xi.level1[a];
            let dy = yj.level1[a] - yi.level1[a];
            n1 += (dx - dy) * (dx - dy);
        }
        let mut n2 = 0.0;
        for b in 0..d {
            let dxb = xj.level1[b] - xi.level1[b];
            let dyb = yj.level1[b] - yi.level1[b];
            for a in 0..d {
                let lx = xj.level2[(a, b)] - xi.level2[(a, b)] - xi.level1[a] * dxb;
                let ly = yj.level2[(a, b)] - yi.level2[(a, b)] - yi.level1[a] * dyb;
                n2 += (lx - ly) * (lx - ly);
            }
        }
        sup1 = sup1.max(n1.sqrt() / dt.powf(alpha));
        sup2 = sup2.max(n2.sqrt() / dt.powf(2.0 * alpha));
    };
    match sweep {
        PairSweep::All => {
            for i in 0..n {
                for j in i + 1..n {
                    visit(i, j);
                }
            }
        }
        PairSweep::Dyadic => {
            let mut step = 1;
            while step < n {
                for i in 0..n - step {
                    visit(i, i + step);
                }
                step *= 2;
            }
        }
    }
    Ok(sup1 + sup2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        (a - b).amax() <= tol
    }

    fn jmat() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
    }

    #[test]
    fn segment_exponential() {
        let s = exp_step2(&[2.0]);
        assert_eq!(s.level1()[0], 2.0);
        assert_eq!(s.level2()[(0, 0)], 2.0);
        assert_eq!(exp_step2(&[0.0, 0.0]), StepTwoLift::identity(2));
        let s = exp_step2(&[1.0, 1.0]);
        assert_eq!(s.level2(), &DMatrix::from_element(2, 2, 0.5));
    }

    #[test]
    fn l_shaped_path() {
        let a = exp_step2(&[1.0, 0.0]);
        let b = exp_step2(&[0.0, 1.0]);
        let ab = chen_mul(&a, &b).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.5, 1.0, 0.0, 0.5]);
        assert_eq!(ab.level2(), &expected);
        assert_eq!(levy_area(&ab)[(0, 1)], 0.5);
        assert_eq!(levy_area(&ab)[(1, 0)], -0.5);
        // level2 = area + ½ x ⊗ x
        let recon = levy_area(&ab) + ab.level1() * ab.level1().transpose() * 0.5;
        assert!(close(&recon, ab.level2(), 1e-15));
    }

    #[test]
    fn identity_and_retraced_segment() {
        let b = exp_step2(&[0.3, -1.2, 4.0]);
        assert_eq!(chen_mul(&StepTwoLift::identity(3), &b).unwrap(), b);
        let back = chen_mul(&exp_step2(&[0.3, -1.2]), &exp_step2(&[-0.3, 1.2])).unwrap();
        assert!(back.level1().amax() == 0.0);
        assert!(back.level2().amax() <= 1e-15);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let err = chen_mul(&exp_step2(&[1.0]), &exp_step2(&[1.0, 2.0])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn inverse_formula() {
        assert_eq!(chen_inv(&StepTwoLift::identity(2)), StepTwoLift::identity(2));
        let inv = chen_inv(&exp_step2(&[2.0]));
        assert!(close(inv.level2(), exp_step2(&[-2.0]).level2(), 0.0));
        assert_eq!(inv.level1()[0], -2.0);

        let u = DVector::from_vec(vec![1.0, -2.0]);
        let m = DMatrix::from_row_slice(2, 2, &[0.7, 3.0, -1.5, 2.2]);
        let a = StepTwoLift::new(u.clone(), m.clone()).unwrap();
        let inv = chen_inv(&a);
        assert_eq!(inv.level1(), &(-&u));
        assert!(close(inv.level2(), &(&u * u.transpose() - &m), 0.0));
        let id = chen_mul(&a, &inv).unwrap();
        assert!(id.level1().amax() == 0.0 && id.level2().amax() <= 1e-15);
    }

    #[test]
    fn square_loop_encloses_unit_area() {
        let times = [0.0, 1.0, 2.0, 3.0, 4.0];
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]];
        let path = lift_piecewise_linear(&times, &pts).unwrap();
        let s = path.interval(0, 4);
        assert_eq!(s.level1().amax(), 0.0);
        assert!((levy_area(&s)[(0, 1)] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn single_segment_and_refinement() {
        let path = lift_piecewise_linear(&[0.0, 1.0], &[[0.0, 0.0], [2.0, -1.0]]).unwrap();
        assert_eq!(path.interval(0, 1), exp_step2(&[2.0, -1.0]));

        let coarse = lift_piecewise_linear(&[0.0, 1.0, 2.0], &[[0.0, 0.0], [1.0, 2.0], [3.0, 1.0]])
            .unwrap();
        let fine = lift_piecewise_linear(
            &[0.0, 0.5, 1.0, 2.0],
            &[[0.0, 0.0], [0.5, 1.0], [1.0, 2.0], [3.0, 1.0]],
        )
        .unwrap();
        let map = [0, 2, 3];
        for i in 0..3 {
            for j in i..3 {
                let a = coarse.interval(i, j);
                let b = fine.interval(map[i], map[j]);
                assert!((a.level1() - b.level1()).amax() <= 1e-12);
                assert!(close(a.level2(), b.level2(), 1e-12));
            }
        }
    }

    #[test]
    fn non_monotone_times_rejected() {
        let err = lift_piecewise_linear(&[0.0, 1.0, 1.0], &[[0.0], [1.0], [2.0]]).unwrap_err();
        assert!(matches!(err, Error::NonMonotoneTimes { index: 2 }));
        let err = lift_piecewise_linear(&[0.0], &[[0.0]]).unwrap_err();
        assert!(matches!(err, Error::TooFewPoints { .. }));
    }

    #[test]
    fn translation_cases() {
        let path = lift_piecewise_linear(&[0.0, 0.5, 1.0], &[[1.0, 2.0]; 3]).unwrap();
        assert_eq!(path.translate(&RenormTerm::zero(2)).unwrap(), path);

        let v = RenormTerm::new(jmat()).unwrap();
        let moved = translate(&path, &v).unwrap();
        let s = moved.interval(0, 2);
        assert_eq!(s.level1().amax(), 0.0);
        assert!(close(s.level2(), &jmat(), 1e-15));

        let back = moved.translate(&v.negated()).unwrap();
        for i in 0..3 {
            assert!(close(back.running(i).level2(), path.running(i).level2(), 1e-12));
        }
    }

    #[test]
    fn symmetric_counter_term_rejected() {
        let err = RenormTerm::new(DMatrix::identity(2, 2)).unwrap_err();
        assert!(matches!(err, Error::NotAntisymmetric { .. }));
        let err = lift_piecewise_linear(&[0.0, 1.0], &[[0.0; 3], [1.0; 3]])
            .unwrap()
            .translate(&RenormTerm::new(jmat()).unwrap())
            .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn holder_distance_cases() {
        let times: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        let pts: Vec<[f64; 2]> = (0..=8)
            .map(|i| {
                let t = i as f64;
                [t.sin(), (0.7 * t).cos()]
            })
            .collect();
        let x = lift_piecewise_linear(&times, &pts).unwrap();
        assert_eq!(holder_distance(&x, &x, 0.3).unwrap(), 0.0);

        // Level-2 offset (t - s) v scaled by (t - s)^{-2α}: sup at t - s = T = 1.
        let v = RenormTerm::new(jmat() * 0.8).unwrap();
        let y = x.translate(&v).unwrap();
        let d = holder_distance(&x, &y, 0.3).unwrap();
        assert!((d - 0.8 * 2f64.sqrt()).abs() <= 1e-12);

        // α = 0: plain sup of level-1 plus level-2 deviations.
        let z = lift_piecewise_linear(&times, &pts.iter().map(|p| [p[0] * 1.1, p[1]]).collect::<Vec<_>>())
            .unwrap();
        let mut s1: f64 = 0.0;
        let mut s2: f64 = 0.0;
        for i in 0..9 {
            for j in i + 1..9 {
                let a = x.interval(i, j);
                let b = z.interval(i, j);
                s1 = s1.max((a.level1() - b.level1()).norm());
                s2 = s2.max((a.level2() - b.level2()).norm());
            }
        }
        assert!((holder_distance(&x, &z, 0.0).unwrap() - (s1 + s2)).abs() <= 1e-14);
    }

    #[test]
    fn holder_distance_rejects_bad_input() {
        let x = lift_piecewise_linear(&[0.0, 1.0], &[[0.0], [1.0]]).unwrap();
        let y = lift_piecewise_linear(&[0.0, 2.0], &[[0.0], [1.0]]).unwrap();
        assert!(matches!(holder_distance(&x, &y, 0.2), Err(Error::GridMismatch)));
        assert!(matches!(holder_distance(&x, &x, 0.5), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn dyadic_sweep_is_a_lower_bound_including_unit_steps() {
        let n = 40;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let pts: Vec<[f64; 2]> = (0..=n).map(|i| [(i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()]).collect();
        let pts2: Vec<[f64; 2]> = pts.iter().map(|p| [p[1], p[0]]).collect();
        let x = lift_piecewise_linear(&times, &pts).unwrap();
        let y = lift_piecewise_linear(&times, &pts2).unwrap();
        let all = holder_distance_with(&x, &y, 0.25, PairSweep::All).unwrap();
        let dy = holder_distance_with(&x, &y, 0.25, PairSweep::Dyadic).unwrap();
        assert!(dy <= all && dy > 0.0);
        assert_eq!(PairSweep::for_intervals(2048), PairSweep::All);
        assert_eq!(PairSweep::for_intervals(2049), PairSweep::Dyadic);
    }

    #[test]
    fn restrict_rebases() {
        let times = [0.0, 0.25, 0.5, 0.75, 1.0];
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]];
        let path = lift_piecewise_linear(&times, &pts).unwrap();
        let sub = path.restrict(&[1, 3, 4]).unwrap();
        assert_eq!(sub.times(), &[0.25, 0.75, 1.0]);
        assert!(close(sub.interval(0, 2).level2(), path.interval(1, 4).level2(), 1e-15));
        assert!(path.restrict(&[0, 9]).is_err());
    }
}
