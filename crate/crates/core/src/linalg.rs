// SPDX-License-Identifier: Apache-2.0

//! Small dense matrices for the magnetic example: matrix exponential,
//! stationary OU covariance, the counter-term and exact OU transitions.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tensor2::RenormTerm;

const STRUCTURE_TOL: f64 = 1e-12;

/// Eigenvalues of the joint transition covariance below `-PSD_TOL * max` are rejected.
pub const PSD_TOL: f64 = 1e-12;

// Padé(13) numerator coefficients.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn mat_exp(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if !m.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("matrix exponential input"));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let norm = one_norm(m);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = m * 2f64.powi(-squarings);
    let ident = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let inner_u = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let u = &a * (&a6 * inner_u + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &ident * b[1]);
    let inner_v = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let v = &a6 * inner_v + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &ident * b[0];

    let mut r = (&v - &u)
        .lu()
        .solve(&(&v + &u))
        .ok_or(Error::Singular("Padé denominator"))?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

/// Drift `M = A - B` with symmetric positive definite friction `A` and
/// antisymmetric magnetic part `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct StableDrift {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    m: DMatrix<f64>,
    lambda: f64,
}

impl StableDrift {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        let d = a.nrows();
        for mat in [&a, &b] {
            if mat.nrows() != d || mat.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: if mat.nrows() != d { mat.nrows() } else { mat.ncols() },
                });
            }
        }
        if d == 0 {
            return Err(Error::InvalidParameter("drift dimension must be positive".into()));
        }
        if !a.iter().chain(b.iter()).all(|x| x.is_finite()) {
            return Err(Error::NonFinite("drift matrices"));
        }
        let asym = (&a - a.transpose()).norm();
        if asym > STRUCTURE_TOL * a.norm().max(1.0) {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        let bsym = (&b + b.transpose()).norm();
        if bsym > STRUCTURE_TOL * b.norm().max(1.0) {
            return Err(Error::NotAntisymmetric { asymmetry: bsym });
        }
        let lambda = SymmetricEigen::new(a.clone()).eigenvalues.min();
        if lambda <= 0.0 {
            return Err(Error::NotStable { margin: lambda });
        }
        let m = &a - &b;
        Ok(Self { a, b, m, lambda })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn m(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// Smallest eigenvalue of `A`, a lower bound for `Re σ(M)`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `min Re σ(M)` from a real Schur decomposition.
    pub fn spectral_abscissa(&self) -> f64 {
        self.m
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::INFINITY, f64::min)
    }

    /// Frobenius norm of `M`.
    pub fn norm(&self) -> f64 {
        self.m.norm()
    }
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Stationary covariance `C = \int_0^∞ e^{-Ms} e^{-M^T s} ds`, the solution of `MC + CM^T = I`.
///
/// Solved through the Kronecker system `(I ⊗ M + M ⊗ I) vec(C) = vec(I)` with
/// one step of iterative refinement.
pub fn lyapunov_c(drift: &StableDrift) -> Result<DMatrix<f64>> {
    let d = drift.dim();
    let ident = DMatrix::<f64>::identity(d, d);
    let m = drift.m();
    let k = ident.kronecker(m) + m.kronecker(&ident);
    let rhs = nalgebra::DVector::from_column_slice(ident.as_slice());
    let lu = k.clone().lu();
    let mut x = lu.solve(&rhs).ok_or(Error::Singular("Lyapunov system"))?;
    let residual = &rhs - &k * &x;
    if let Some(dx) = lu.solve(&residual) {
        x += dx;
    }
    let c = DMatrix::from_column_slice(d, d, x.as_slice());
    Ok(symmetrize(&c))
}

/// The three algebraically equivalent expressions of the counter-term:
/// `-½(MC - CM^T)`, `CM^T - ½I` and `-MC + ½I`.
pub fn counter_term_forms(drift: &StableDrift) -> Result<[DMatrix<f64>; 3]> {
    let c = lyapunov_c(drift)?;
    let d = drift.dim();
    let half = DMatrix::<f64>::identity(d, d) * 0.5;
    let mc = drift.m() * &c;
    let cmt = &c * drift.m().transpose();
    Ok([(&mc - &cmt) * -0.5, &cmt - &half, &half - &mc])
}

/// Counter-term `v = -½(MC - CM^T)`.
pub fn renorm_v(drift: &StableDrift) -> Result<RenormTerm> {
    let c = lyapunov_c(drift)?;
    let mc = drift.m() * &c;
    let v = (mc.transpose() - &mc) * 0.5;
    // exact antisymmetry
    RenormTerm::new((&v - v.transpose()) * 0.5)
}

/// Partial covariance `C_r = \int_0^r e^{-Mu} e^{-M^T u} du = C - e^{-Mr} C e^{-M^T r}`.
pub fn partial_c(drift: &StableDrift, r: f64) -> Result<DMatrix<f64>> {
    let c = lyapunov_c(drift)?;
    partial_c_with(drift, &c, r)
}

fn partial_c_with(drift: &StableDrift, c: &DMatrix<f64>, r: f64) -> Result<DMatrix<f64>> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "partial covariance horizon must be finite and nonnegative, got {r}"
        )));
    }
    let e = mat_exp(&(drift.m() * -r))?;
    Ok(symmetrize(&(c - &e * c * e.transpose())))
}

/// Exact Gaussian transition over a step `h` of
/// `dP = -ε^{-2} M P dt + dW`, jointly with the driving increment `ΔW`.
#[derive(Debug, Clone)]
pub struct OuTransition {
    h: f64,
    mean_map: DMatrix<f64>,
    cov_pp: DMatrix<f64>,
    cov_pw: DMatrix<f64>,
    cov_ww: DMatrix<f64>,
    gain: DMatrix<f64>,
    cond_sqrt: DMatrix<f64>,
}

impl OuTransition {
    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn dim(&self) -> usize {
        self.mean_map.nrows()
    }

    /// `e^{-Mh/ε²}`.
    pub fn mean_map(&self) -> &DMatrix<f64> {
        &self.mean_map
    }

    pub fn cov_pp(&self) -> &DMatrix<f64> {
        &self.cov_pp
    }

    /// `E[ξ ΔW^T]` where `ξ` is the state noise.
    pub fn cov_pw(&self) -> &DMatrix<f64> {
        &self.cov_pw
    }

    pub fn cov_ww(&self) -> &DMatrix<f64> {
        &self.cov_ww
    }

    /// `[[covPP, covPW], [covPW^T, covWW]]`.
    pub fn joint_covariance(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut j = DMatrix::zeros(2 * d, 2 * d);
        j.view_mut((0, 0), (d, d)).copy_from(&self.cov_pp);
        j.view_mut((0, d), (d, d)).copy_from(&self.cov_pw);
        j.view_mut((d, 0), (d, d)).copy_from(&self.cov_pw.transpose());
        j.view_mut((d, d), (d, d)).copy_from(&self.cov_ww);
        j
    }

    /// Map standard normals `(z_w, z_p)` to `(ΔW, ξ)`:
    /// `ΔW = √h z_w`, `ξ = (covPW / h) ΔW + S z_p` with `S S^T` the conditional covariance.
    pub fn noise_from_normals(&self, z_w: &[f64], z_p: &[f64], dw: &mut [f64], xi: &mut [f64]) {
        let d = self.dim();
        let sh = self.h.sqrt();
        for i in 0..d {
            dw[i] = sh * z_w[i];
        }
        for i in 0..d {
            let mut acc = 0.0;
            for j in 0..d {
                acc += self.gain[(i, j)] * dw[j] + self.cond_sqrt[(i, j)] * z_p[j];
            }
            xi[i] = acc;
        }
    }
}

pub fn ou_joint_transition(drift: &StableDrift, eps: f64, h: f64) -> Result<OuTransition> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let d = drift.dim();
    let ident = DMatrix::<f64>::identity(d, d);
    let eps2 = eps * eps;
    let r = h / eps2;
    let c = lyapunov_c(drift)?;
    let mean_map = mat_exp(&(drift.m() * -r))?;
    let cov_pp = partial_c_with(drift, &c, r)? * eps2;
    let cov_pw = drift
        .m()
        .clone()
        .lu()
        .solve(&(&ident - &mean_map))
        .ok_or(Error::Singular("drift inverse"))?
        * eps2;
    let cov_ww = &ident * h;

    let gain = &cov_pw / h;
    let cond = symmetrize(&(&cov_pp - &cov_pw * cov_pw.transpose() / h));
    let eig = SymmetricEigen::new(cond);
    let scale = SymmetricEigen::new(cov_pp.clone()).eigenvalues.amax().max(h);
    let min_eig = eig.eigenvalues.min();
    if min_eig < -PSD_TOL * scale {
        return Err(Error::NotPsd { min_eig });
    }
    let sqrt_vals = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    let q = &eig.eigenvectors;
    let cond_sqrt = q * DMatrix::from_diagonal(&sqrt_vals) * q.transpose();

    Ok(OuTransition {
        h,
        mean_map,
        cov_pp,
        cov_pw,
        cov_ww,
        gain,
        cond_sqrt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jmat() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
    }

    fn rotation(theta: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()])
    }

    fn magnetic(b: f64) -> StableDrift {
        StableDrift::new(DMatrix::identity(2, 2), jmat() * b).unwrap()
    }

    /// Composite Gauss–Legendre (5-point) quadrature of a matrix-valued integrand.
    fn quad<F: Fn(f64) -> DMatrix<f64>>(f: F, a: f64, b: f64, panels: usize, d: usize) -> DMatrix<f64> {
        const X: [f64; 5] = [
            0.0,
            -0.538_469_310_105_683_1,
            0.538_469_310_105_683_1,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        const W: [f64; 5] = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let h = (b - a) / panels as f64;
        let mut acc = DMatrix::zeros(d, d);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (x, w) in X.iter().zip(W) {
                acc += f(mid + 0.5 * h * x) * (0.5 * h * w);
            }
        }
        acc
    }

    #[test]
    fn exponential_closed_forms() {
        assert_eq!(mat_exp(&DMatrix::zeros(3, 3)).unwrap(), DMatrix::identity(3, 3));
        let e = mat_exp(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0]))).unwrap();
        assert!((e[(0, 0)] - 1f64.exp()).abs() < 1e-14);
        assert!((e[(1, 1)] - 2f64.exp()).abs() < 1e-13);
        assert!(e[(0, 1)].abs() < 1e-15);

        // e^{-(I - bJ)s} = e^{-s} R(bs)
        let b = 3.0;
        let m = DMatrix::identity(2, 2) - jmat() * b;
        let e = mat_exp(&(-&m)).unwrap();
        let expected = rotation(3.0) * (-1f64).exp();
        assert!((e - expected).amax() < 1e-14);
    }

    #[test]
    fn exponential_large_norm_rotation() {
        let b = 700.0;
        let e = mat_exp(&(jmat() * b)).unwrap();
        let expected = rotation(b);
        assert!((e - &expected).amax() < 1e-12, "relative accuracy at |M| ~ 1e3");
    }

    #[test]
    fn exponential_rejects_non_finite() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = f64::NAN;
        assert!(matches!(mat_exp(&m), Err(Error::NonFinite(_))));
    }

    #[test]
    fn drift_validation() {
        assert!(matches!(
            StableDrift::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]), DMatrix::zeros(2, 2)),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(
            StableDrift::new(DMatrix::identity(2, 2), DMatrix::identity(2, 2)),
            Err(Error::NotAntisymmetric { .. })
        ));
        assert!(matches!(
            StableDrift::new(-DMatrix::<f64>::identity(2, 2), DMatrix::zeros(2, 2)),
            Err(Error::NotStable { .. })
        ));
        let drift = StableDrift::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]),
            jmat() * 5.0,
        )
        .unwrap();
        assert_eq!(drift.lambda(), 1.0);
        assert!(drift.spectral_abscissa() >= drift.lambda() - 1e-12);
        assert_eq!(drift.m(), &(drift.a() - drift.b()));
    }

    #[test]
    fn lyapunov_closed_forms() {
        let c = lyapunov_c(&StableDrift::new(DMatrix::identity(3, 3), DMatrix::zeros(3, 3)).unwrap()).unwrap();
        assert!((c - DMatrix::identity(3, 3) * 0.5).amax() < 1e-15);

        for b in [0.5, 3.0, 250.0] {
            let c = lyapunov_c(&magnetic(b)).unwrap();
            assert!((c - DMatrix::identity(2, 2) * 0.5).amax() < 1e-12);
        }

        let a = DMatrix::from_row_slice(2, 2, &[0.4, 0.0, 0.0, 3.0]);
        let c = lyapunov_c(&StableDrift::new(a, DMatrix::zeros(2, 2)).unwrap()).unwrap();
        assert!((c[(0, 0)] - 1.25).abs() < 1e-15);
        assert!((c[(1, 1)] - 1.0 / 6.0).abs() < 1e-15);
        assert!(c[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn lyapunov_matches_quadrature() {
        let b = 4.0;
        let drift = magnetic(b);
        let m = drift.m().clone();
        let integrand = |s: f64| {
            let e = mat_exp(&(&m * -s)).unwrap();
            &e * e.transpose()
        };
        // e^{-2s} I: truncate at s = 20 (tail e^{-40}/2).
        let oracle = quad(integrand, 0.0, 20.0, 400, 2);
        assert!((oracle - DMatrix::identity(2, 2) * 0.5).amax() < 1e-12);
        let c = lyapunov_c(&drift).unwrap();
        assert!((c - DMatrix::identity(2, 2) * 0.5).amax() < 1e-12);
    }

    #[test]
    fn counter_term_closed_forms() {
        let v = renorm_v(&StableDrift::new(DMatrix::identity(2, 2) * 2.0, DMatrix::zeros(2, 2)).unwrap()).unwrap();
        assert!(v.matrix().amax() < 1e-15);

        let mut prev = 0.0;
        for k in 0..8 {
            let b = 2f64.powi(k);
            let v = renorm_v(&magnetic(b)).unwrap();
            assert!((v.matrix() - jmat() * (b / 2.0)).amax() < 1e-10 * b.max(1.0));
            assert!(v.norm() > prev);
            prev = v.norm();
        }
        // |v| grows linearly in b
        let ratio = renorm_v(&magnetic(256.0)).unwrap().norm() / renorm_v(&magnetic(128.0)).unwrap().norm();
        assert!((ratio - 2.0).abs() < 1e-10);
    }

    #[test]
    fn counter_term_forms_agree() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 0.7]);
        let b = DMatrix::from_row_slice(3, 3, &[0.0, 4.0, -1.0, -4.0, 0.0, 2.5, 1.0, -2.5, 0.0]);
        let drift = StableDrift::new(a, b).unwrap();
        let [v1, v2, v3] = counter_term_forms(&drift).unwrap();
        assert!((&v1 - &v2).amax() < 1e-12);
        assert!((&v1 - &v3).amax() < 1e-12);
        let v = renorm_v(&drift).unwrap();
        assert!((v.matrix() + v.matrix().transpose()).amax() == 0.0);
    }

    #[test]
    fn partial_covariance() {
        let drift = magnetic(2.0);
        assert!(partial_c(&drift, 0.0).unwrap().amax() < 1e-16);
        let scalar = StableDrift::new(DMatrix::identity(2, 2), DMatrix::zeros(2, 2)).unwrap();
        for r in [0.1, 1.0, 3.0] {
            let c = partial_c(&scalar, r).unwrap();
            let expected = 0.5 * (1.0 - (-2.0 * r).exp());
            assert!((c - DMatrix::identity(2, 2) * expected).amax() < 1e-15);
        }
        assert!(matches!(partial_c(&drift, -1.0), Err(Error::InvalidParameter(_))));

        // Random-ish stable drift against quadrature of the integrand.
        let a = DMatrix::from_row_slice(3, 3, &[1.2, 0.2, 0.0, 0.2, 0.5, 0.1, 0.0, 0.1, 0.9]);
        let b = DMatrix::from_row_slice(3, 3, &[0.0, 1.5, -0.7, -1.5, 0.0, 2.0, 0.7, -2.0, 0.0]);
        let drift = StableDrift::new(a, b).unwrap();
        let m = drift.m().clone();
        let oracle = quad(
            |u| {
                let e = mat_exp(&(&m * -u)).unwrap();
                &e * e.transpose()
            },
            0.0,
            1.0,
            64,
            3,
        );
        assert!((partial_c(&drift, 1.0).unwrap() - oracle).amax() < 1e-8);

        // monotone in r, converging to C
        let c = lyapunov_c(&drift).unwrap();
        let mut prev = -1.0;
        for r in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
            let tr = partial_c(&drift, r).unwrap().trace();
            assert!(tr >= prev);
            prev = tr;
        }
        let far = partial_c(&drift, 40.0).unwrap();
        assert!((far - c).amax() < 1e-12);
    }

    #[test]
    fn transition_scalar_limits() {
        let drift = StableDrift::new(DMatrix::identity(1, 1), DMatrix::zeros(1, 1)).unwrap();
        let t = ou_joint_transition(&drift, 1.0, 50.0).unwrap();
        assert!((t.cov_pp()[(0, 0)] - 0.5).abs() < 1e-15);

        let h: f64 = 0.01;
        let t = ou_joint_transition(&drift, 1.0, h).unwrap();
        // second-order Taylor expansions of ½(1 - e^{-2h}) and 1 - e^{-h}
        assert!((t.cov_pp()[(0, 0)] - (h - h * h)).abs() < 1e-6);
        assert!((t.cov_pw()[(0, 0)] - (h - h * h / 2.0)).abs() < 2e-7);
        assert!((t.mean_map()[(0, 0)] - (-h).exp()).abs() < 1e-15);
        assert_eq!(t.cov_ww()[(0, 0)], h);
    }

    #[test]
    fn transition_joint_covariance_is_psd() {
        let drift = magnetic(30.0);
        for (eps, h) in [(0.1, 1e-5), (0.5, 0.01), (1.0, 2.0)] {
            let t = ou_joint_transition(&drift, eps, h).unwrap();
            let j = t.joint_covariance();
            assert!((&j - j.transpose()).amax() < 1e-15);
            let min = SymmetricEigen::new(j).eigenvalues.min();
            assert!(min > -1e-12 * h);
            assert!((t.cov_ww() - DMatrix::identity(2, 2) * h).amax() == 0.0);
        }
        assert!(ou_joint_transition(&drift, 0.0, 0.1).is_err());
        assert!(ou_joint_transition(&drift, 1.0, -0.1).is_err());
    }

    #[test]
    fn noise_map_reproduces_covariance() {
        // ξ = G ΔW + S z_p must have covariance covPP and cross covariance covPW.
        let drift = magnetic(5.0);
        let t = ou_joint_transition(&drift, 0.3, 0.002).unwrap();
        let d = 2;
        let mut cols = DMatrix::zeros(2 * d, 2 * d);
        for k in 0..2 * d {
            let mut z = vec![0.0; 2 * d];
            z[k] = 1.0;
            let (mut dw, mut xi) = (vec![0.0; d], vec![0.0; d]);
            t.noise_from_normals(&z[..d], &z[d..], &mut dw, &mut xi);
            for i in 0..d {
                cols[(i, k)] = xi[i];
                cols[(d + i, k)] = dw[i];
            }
        }
        let cov = &cols * cols.transpose();
        assert!((cov - t.joint_covariance()).amax() < 1e-15);
    }
}
