//! Closed-form evaluation of the scalar-gain LQ game.
//!
//! Every quantity here is a function of the resolvent `M = (K - A)^{-1}`:
//! player `i`'s cost is `J_i = (1 + rho_i k_i^2) M_ii / 2`, and all first
//! and second derivatives follow from `d M / d k_j = -M e_j e_j^T M`.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};

/// Lower-bound slack added to the Gershgorin bound when `A` is not negative
/// definite.
pub const GERSHGORIN_MARGIN: f64 = 1e-6;

/// Relative pivot threshold for the Cholesky factor of `K - A`.
pub const PIVOT_RTOL: f64 = 1e-12;

/// A joint gain vector `k`, one scalar feedback gain per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct ActionProfile(DVector<f64>);

impl ActionProfile {
    pub fn new(k: Vec<f64>) -> Self {
        Self(DVector::from_vec(k))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DVector::zeros(n))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vector(self) -> DVector<f64> {
        self.0
    }

    /// Largest componentwise distance to another profile.
    pub fn max_abs_diff(&self, other: &ActionProfile) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for ActionProfile {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<DVector<f64>> for ActionProfile {
    fn from(v: DVector<f64>) -> Self {
        Self(v)
    }
}

impl From<Vec<f64>> for ActionProfile {
    fn from(v: Vec<f64>) -> Self {
        Self::new(v)
    }
}

impl From<ActionProfile> for Vec<f64> {
    fn from(p: ActionProfile) -> Self {
        p.0.as_slice().to_vec()
    }
}

/// The immutable game: symmetric state matrix, tradeoffs and action box.
///
/// Construction guarantees that `K - A` is positive definite for every `k`
/// in `[k_lower, k_upper]`. If `A` itself is not negative definite the lower
/// bounds are lifted to the Gershgorin bound `a_ii + sum_j |a_ij| + margin`,
/// which makes `K - A` strictly diagonally dominant with a positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    a: DMatrix<f64>,
    rho: DVector<f64>,
    k_lower: DVector<f64>,
    k_upper: DVector<f64>,
}

impl GameSpec {
    /// Game with the default action box `[0, k_upper]`.
    pub fn new(a: DMatrix<f64>, rho: DVector<f64>, k_upper: DVector<f64>) -> Result<Self> {
        let n = a.nrows();
        Self::with_bounds(a, rho, DVector::zeros(n), k_upper)
    }

    pub fn with_bounds(
        a: DMatrix<f64>,
        rho: DVector<f64>,
        k_lower: DVector<f64>,
        k_upper: DVector<f64>,
    ) -> Result<Self> {
        let n = a.nrows();
        if n == 0 {
            return Err(GameError::InvalidSpec("state matrix is empty".into()));
        }
        if a.ncols() != n {
            return Err(GameError::InvalidSpec(format!(
                "state matrix must be square, got {}x{}",
                n,
                a.ncols()
            )));
        }
        for (name, v) in [("rho", &rho), ("k_lower", &k_lower), ("k_upper", &k_upper)] {
            if v.len() != n {
                return Err(GameError::InvalidSpec(format!(
                    "{name} has length {}, expected {n}",
                    v.len()
                )));
            }
        }
        if a.iter().chain(rho.iter()).chain(k_lower.iter()).chain(k_upper.iter()).any(|x| !x.is_finite()) {
            return Err(GameError::InvalidSpec("non-finite entry".into()));
        }

        let scale = a.amax().max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale {
                    return Err(GameError::InvalidSpec(format!(
                        "state matrix is not symmetric at ({i}, {j}): {} vs {}",
                        a[(i, j)],
                        a[(j, i)]
                    )));
                }
            }
        }
        let a = (&a + a.transpose()) * 0.5;

        if let Some(i) = rho.iter().position(|&r| r < 0.0) {
            return Err(GameError::InvalidSpec(format!(
                "rho[{i}] = {} is negative",
                rho[i]
            )));
        }

        let mut k_lower = k_lower;
        if !is_positive_definite(&(-&a)) {
            for i in 0..n {
                let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
                let bound = (a[(i, i)] + off + GERSHGORIN_MARGIN).max(0.0);
                k_lower[i] = k_lower[i].max(bound);
            }
        }

        for i in 0..n {
            if k_lower[i] >= k_upper[i] {
                return Err(GameError::InvalidSpec(format!(
                    "empty action interval for player {i}: [{}, {}]",
                    k_lower[i], k_upper[i]
                )));
            }
        }

        // K - A is monotone in K, so positive definiteness at the lower
        // corner covers the whole box.
        factor_spd(&(DMatrix::from_diagonal(&k_lower) - &a))?;

        Ok(Self {
            a,
            rho,
            k_lower,
            k_upper,
        })
    }

    /// Build from row-major nested vectors.
    pub fn from_rows(rows: &[Vec<f64>], rho: &[f64], k_upper: &[f64]) -> Result<Self> {
        let a = matrix_from_rows(rows)?;
        Self::new(
            a,
            DVector::from_column_slice(rho),
            DVector::from_column_slice(k_upper),
        )
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rho(&self) -> &DVector<f64> {
        &self.rho
    }

    pub fn k_lower(&self) -> &DVector<f64> {
        &self.k_lower
    }

    pub fn k_upper(&self) -> &DVector<f64> {
        &self.k_upper
    }

    /// Row-major copy of `A`, for reports.
    pub fn a_rows(&self) -> Vec<Vec<f64>> {
        self.a.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn contains(&self, k: &ActionProfile) -> bool {
        k.len() == self.n()
            && (0..self.n()).all(|i| self.k_lower[i] <= k[i] && k[i] <= self.k_upper[i])
    }

    pub fn check_dimension(&self, k: &ActionProfile) -> Result<()> {
        if k.len() != self.n() {
            return Err(GameError::DimensionMismatch {
                expected: self.n(),
                got: k.len(),
            });
        }
        Ok(())
    }

    /// Validate `k` against the action box and wrap it.
    pub fn profile(&self, k: Vec<f64>) -> Result<ActionProfile> {
        let k = ActionProfile::new(k);
        self.check_dimension(&k)?;
        for i in 0..self.n() {
            if !(self.k_lower[i] <= k[i] && k[i] <= self.k_upper[i]) {
                return Err(GameError::OutOfBox {
                    player: i,
                    value: k[i],
                    lower: self.k_lower[i],
                    upper: self.k_upper[i],
                });
            }
        }
        Ok(k)
    }

    /// `K - A` for the profile `k`.
    pub fn closed_loop_gap(&self, k: &ActionProfile) -> DMatrix<f64> {
        DMatrix::from_diagonal(k.vector()) - &self.a
    }

    /// Costs, gradients and curvatures at `k` from a single factorization.
    pub fn evaluate(&self, k: &ActionProfile) -> Result<CostGradientReport> {
        Ok(Resolvent::new(self, k)?.report())
    }
}

/// Per-player `f_i = M_ii`, costs, pseudogradient and own-action curvature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostGradientReport {
    pub f: Vec<f64>,
    pub cost: Vec<f64>,
    pub gradient: Vec<f64>,
    pub second_derivative: Vec<f64>,
}

/// `M = (K - A)^{-1}` at one profile, together with the profile data needed
/// to derive costs and derivatives from it.
#[derive(Debug, Clone)]
pub struct Resolvent<'a> {
    spec: &'a GameSpec,
    k: ActionProfile,
    m: DMatrix<f64>,
}

impl<'a> Resolvent<'a> {
    pub fn new(spec: &'a GameSpec, k: &ActionProfile) -> Result<Self> {
        spec.check_dimension(k)?;
        let gap = spec.closed_loop_gap(k);
        let chol = factor_spd(&gap)?;
        let m = chol.inverse();
        let m = (&m + m.transpose()) * 0.5;
        Ok(Self {
            spec,
            k: k.clone(),
            m,
        })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn f(&self, i: usize) -> f64 {
        self.m[(i, i)]
    }

    fn weight(&self, i: usize) -> f64 {
        1.0 + self.spec.rho[i] * self.k[i] * self.k[i]
    }

    pub fn costs(&self) -> DVector<f64> {
        DVector::from_fn(self.spec.n(), |i, _| self.weight(i) * self.f(i) / 2.0)
    }

    /// `g_i = rho_i k_i f_i - (1 + rho_i k_i^2) f_i^2 / 2`.
    pub fn gradient(&self) -> DVector<f64> {
        DVector::from_fn(self.spec.n(), |i, _| {
            let f = self.f(i);
            self.spec.rho[i] * self.k[i] * f - self.weight(i) * f * f / 2.0
        })
    }

    /// `h_i = f_i [rho_i (1 - k_i f_i)^2 + f_i^2]`.
    pub fn second_derivative(&self) -> DVector<f64> {
        DVector::from_fn(self.spec.n(), |i, _| {
            let f = self.f(i);
            let r = 1.0 - self.k[i] * f;
            f * (self.spec.rho[i] * r * r + f * f)
        })
    }

    /// Jacobian of the pseudogradient, `G_ij = d g_i / d k_j`.
    ///
    /// Off the diagonal only `f_i` depends on `k_j`, with
    /// `d f_i / d k_j = -M_ij^2`.
    pub fn jacobian(&self) -> DMatrix<f64> {
        let n = self.spec.n();
        let h = self.second_derivative();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                h[i]
            } else {
                let coeff = self.spec.rho[i] * self.k[i] - self.weight(i) * self.f(i);
                -coeff * self.m[(i, j)] * self.m[(i, j)]
            }
        })
    }

    pub fn report(&self) -> CostGradientReport {
        let n = self.spec.n();
        CostGradientReport {
            f: (0..n).map(|i| self.f(i)).collect(),
            cost: self.costs().as_slice().to_vec(),
            gradient: self.gradient().as_slice().to_vec(),
            second_derivative: self.second_derivative().as_slice().to_vec(),
        }
    }
}

pub fn resolvent(spec: &GameSpec, k: &ActionProfile) -> Result<DMatrix<f64>> {
    Ok(Resolvent::new(spec, k)?.m)
}

pub fn cost(spec: &GameSpec, k: &ActionProfile) -> Result<DVector<f64>> {
    Ok(Resolvent::new(spec, k)?.costs())
}

pub fn exact_gradient(spec: &GameSpec, k: &ActionProfile) -> Result<DVector<f64>> {
    Ok(Resolvent::new(spec, k)?.gradient())
}

pub fn second_derivative(spec: &GameSpec, k: &ActionProfile) -> Result<DVector<f64>> {
    Ok(Resolvent::new(spec, k)?.second_derivative())
}

pub fn pseudogradient_jacobian(spec: &GameSpec, k: &ActionProfile) -> Result<DMatrix<f64>> {
    Ok(Resolvent::new(spec, k)?.jacobian())
}

/// Marginal cost of one player recovered from its own cost value alone:
/// `dJ/dk = 2 J (rho k - J) / (1 + rho k^2)`.
pub fn marginal_cost_from_cost(cost: f64, k: f64, rho: f64) -> f64 {
    2.0 * cost / (1.0 + rho * k * k) * (rho * k - cost)
}

/// Smallest eigenvalue of `K - A`; positive iff the closed loop is stable.
pub fn stability_margin(spec: &GameSpec, k: &ActionProfile) -> f64 {
    min_eigenvalue(&spec.closed_loop_gap(k))
}

pub fn min_eigenvalue(sym: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(sym.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Cholesky factor of a symmetric matrix, rejecting pivots below
/// `PIVOT_RTOL * ||mat||_inf`.
pub fn factor_spd(mat: &DMatrix<f64>) -> Result<Cholesky<f64, nalgebra::Dyn>> {
    let threshold = PIVOT_RTOL * inf_norm(mat);
    let fail = || GameError::NotPositiveDefinite {
        min_eigenvalue: min_eigenvalue(mat),
        threshold,
    };
    let chol = Cholesky::new(mat.clone()).ok_or_else(fail)?;
    let l = chol.l_dirty();
    let min_pivot = (0..mat.nrows())
        .map(|i| l[(i, i)] * l[(i, i)])
        .fold(f64::INFINITY, f64::min);
    if min_pivot <= threshold {
        return Err(fail());
    }
    Ok(chol)
}

fn is_positive_definite(mat: &DMatrix<f64>) -> bool {
    factor_spd(mat).is_ok()
}

fn inf_norm(mat: &DMatrix<f64>) -> f64 {
    mat.row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(GameError::InvalidSpec(format!(
            "state matrix row has {} entries, expected {n}",
            r.len()
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scalar(a: f64, rho: f64) -> GameSpec {
        GameSpec::from_rows(&[vec![a]], &[rho], &[10.0]).unwrap()
    }

    fn k(v: &[f64]) -> ActionProfile {
        ActionProfile::new(v.to_vec())
    }

    #[test]
    fn resolvent_of_decoupled_game() {
        let spec = GameSpec::from_rows(&[vec![-2.0, 0.0], vec![0.0, -3.0]], &[1.0, 1.0], &[5.0, 5.0])
            .unwrap();
        let m = resolvent(&spec, &k(&[0.0, 0.0])).unwrap();
        assert_relative_eq!(m[(0, 0)], 0.5, epsilon = 1e-15);
        assert_relative_eq!(m[(1, 1)], 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(m[(0, 1)], 0.0);
    }

    #[test]
    fn resolvent_matches_adjugate() {
        let spec = GameSpec::from_rows(
            &[vec![-2.0, -0.5], vec![-0.5, -2.0]],
            &[0.0, 0.0],
            &[5.0, 5.0],
        )
        .unwrap();
        let m = resolvent(&spec, &k(&[0.0, 0.0])).unwrap();
        // adj(K - A) / det with det = 2*2 - 0.25
        let expected = DMatrix::from_row_slice(2, 2, &[2.0, -0.5, -0.5, 2.0]) / 3.75;
        assert_relative_eq!(m, expected, epsilon = 1e-14);
        let gap = spec.closed_loop_gap(&k(&[0.0, 0.0]));
        assert_relative_eq!(gap * &m, DMatrix::identity(2, 2), epsilon = 1e-14);
    }

    #[test]
    fn resolvent_of_negative_identity() {
        let spec = GameSpec::new(-DMatrix::identity(3, 3), DVector::zeros(3), DVector::repeat(3, 1.0))
            .unwrap();
        let m = resolvent(&spec, &ActionProfile::zeros(3)).unwrap();
        assert_relative_eq!(m, DMatrix::identity(3, 3), epsilon = 1e-15);
    }

    #[test]
    fn scalar_cost_gradient_curvature() {
        let spec = scalar(-1.0, 1.0);
        let r = spec.evaluate(&k(&[1.0])).unwrap();
        assert_relative_eq!(r.f[0], 0.5);
        assert_relative_eq!(r.cost[0], 0.5);
        assert_relative_eq!(r.gradient[0], 0.25);
        assert_relative_eq!(r.second_derivative[0], 0.25);

        let spec = scalar(-1.0, 0.0);
        assert_relative_eq!(cost(&spec, &k(&[0.0])).unwrap()[0], 0.5);
        assert_relative_eq!(exact_gradient(&spec, &k(&[1.0])).unwrap()[0], -0.125);
        // h = f^3 with f = 1 at k = 0
        assert_relative_eq!(second_derivative(&spec, &k(&[0.0])).unwrap()[0], 1.0);
    }

    #[test]
    fn scalar_cost_with_rho_zero_at_origin() {
        // J = 1 / (2 (k - a)) with a = -1 gives 0.5; a = -2 gives 0.25
        let spec = scalar(-2.0, 0.0);
        assert_relative_eq!(cost(&spec, &k(&[0.0])).unwrap()[0], 0.25);
    }

    #[test]
    fn marginal_cost_examples() {
        assert_relative_eq!(marginal_cost_from_cost(0.5, 1.0, 1.0), 0.25);
        assert_relative_eq!(marginal_cost_from_cost(0.25, 1.0, 0.0), -0.125);
    }

    #[test]
    fn benchmark_system_golden_costs() {
        // f from an independent dense LU solve of (K - A) X = I.
        let spec = crate::presets::benchmark_game();
        let r = spec.evaluate(&k(&[1.31, 1.89, 1.46, 3.85, 1.03])).unwrap();
        let f = [
            0.7440706685115461,
            0.5123148101651842,
            0.6693802084342813,
            0.2575929682083571,
            0.8786490094439168,
        ];
        let j = [
            0.7258642339856444,
            0.4979056538635504,
            0.6575864520922943,
            0.2555597869102885,
            0.8117219190025193,
        ];
        for i in 0..5 {
            assert_relative_eq!(r.f[i], f[i], max_relative = 1e-12);
            assert_relative_eq!(r.cost[i], j[i], max_relative = 1e-12);
        }
    }

    #[test]
    fn jacobian_of_decoupled_game_is_diagonal() {
        let spec = GameSpec::from_rows(&[vec![-2.0, 0.0], vec![0.0, -3.0]], &[0.3, 0.7], &[5.0, 5.0])
            .unwrap();
        let g = pseudogradient_jacobian(&spec, &k(&[0.4, 1.2])).unwrap();
        assert_eq!(g[(0, 1)], 0.0);
        assert_eq!(g[(1, 0)], 0.0);
        assert!(g[(0, 0)] > 0.0 && g[(1, 1)] > 0.0);
    }

    #[test]
    fn two_player_symmetric_part_matches_closed_form() {
        let (a11, a12, a22) = (-1.3, 0.6, -0.9);
        let spec = GameSpec::from_rows(&[vec![a11, a12], vec![a12, a22]], &[0.0, 0.0], &[5.0, 5.0])
            .unwrap();
        let (k1, k2) = (0.7, 0.2);
        let g = pseudogradient_jacobian(&spec, &k(&[k1, k2])).unwrap();
        let s = &g + g.transpose();
        let (p, q) = (k1 - a11, k2 - a22);
        let nu = p * q - a12 * a12;
        let nu3 = nu * nu * nu;
        let off = a12 * a12 * (p + q) / nu3;
        assert_relative_eq!(s[(0, 0)], 2.0 * q * q * q / nu3, max_relative = 1e-12);
        assert_relative_eq!(s[(1, 1)], 2.0 * p * p * p / nu3, max_relative = 1e-12);
        assert_relative_eq!(s[(0, 1)], off, max_relative = 1e-12);
        assert_relative_eq!(s[(1, 0)], off, max_relative = 1e-12);
    }

    #[test]
    fn self_derivative_matches_jacobian_identity() {
        // d f_i / d k_i = -f_i^2 = -M_ii^2
        let spec = crate::presets::benchmark_game();
        let r = Resolvent::new(&spec, &k(&[0.5, 1.0, 2.0, 0.1, 3.0])).unwrap();
        for i in 0..5 {
            assert_eq!(-r.f(i) * r.f(i), -r.matrix()[(i, i)].powi(2));
        }
    }

    #[test]
    fn stability_margin_signs() {
        let spec = GameSpec::new(-DMatrix::identity(2, 2), DVector::zeros(2), DVector::repeat(2, 1.0))
            .unwrap();
        assert_relative_eq!(stability_margin(&spec, &ActionProfile::zeros(2)), 1.0);

        // Unstable A is accepted with lifted lower bounds; the raw margin at
        // the origin is still reported.
        let spec = GameSpec::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0]], &[0.0, 0.0], &[5.0, 5.0])
            .unwrap();
        assert_relative_eq!(stability_margin(&spec, &ActionProfile::zeros(2)), -1.0);
        assert!(matches!(
            resolvent(&spec, &ActionProfile::zeros(2)),
            Err(GameError::NotPositiveDefinite { .. })
        ));

        let bench = crate::presets::benchmark_game();
        assert!(stability_margin(&bench, &ActionProfile::zeros(5)) > 0.0);
    }

    #[test]
    fn non_negative_definite_a_lifts_lower_bounds() {
        let spec = GameSpec::from_rows(&[vec![1.0, 0.5], vec![0.5, -1.0]], &[1.0, 1.0], &[5.0, 5.0])
            .unwrap();
        assert_relative_eq!(spec.k_lower()[0], 1.5 + GERSHGORIN_MARGIN);
        // -1 + 0.5 < 0 so the second bound stays at zero
        assert_eq!(spec.k_lower()[1], 0.0);
        let corner = ActionProfile::from(spec.k_lower().clone());
        assert!(stability_margin(&spec, &corner) > 0.0);
        assert!(spec.evaluate(&corner).is_ok());
    }

    #[test]
    fn construction_rejects_bad_games() {
        let asym = GameSpec::from_rows(&[vec![-1.0, 0.2], vec![0.1, -1.0]], &[0.0, 0.0], &[1.0, 1.0]);
        assert!(matches!(asym, Err(GameError::InvalidSpec(_))));
        let neg_rho = GameSpec::from_rows(&[vec![-1.0]], &[-0.1], &[1.0]);
        assert!(matches!(neg_rho, Err(GameError::InvalidSpec(_))));
        let empty_box = GameSpec::from_rows(&[vec![-1.0]], &[0.1], &[0.0]);
        assert!(matches!(empty_box, Err(GameError::InvalidSpec(_))));
        let ragged = GameSpec::from_rows(&[vec![-1.0, 0.0], vec![0.0]], &[0.1, 0.1], &[1.0, 1.0]);
        assert!(matches!(ragged, Err(GameError::InvalidSpec(_))));
        // lifted lower bound above the upper bound
        let tight = GameSpec::from_rows(&[vec![2.0]], &[0.1], &[1.0]);
        assert!(matches!(tight, Err(GameError::InvalidSpec(_))));
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let spec = GameSpec::from_rows(
            &[vec![-1.0, 0.2 + 1e-15], vec![0.2, -1.0]],
            &[0.0, 0.0],
            &[1.0, 1.0],
        )
        .unwrap();
        assert_eq!(spec.a()[(0, 1)], spec.a()[(1, 0)]);
    }

    #[test]
    fn profile_validation() {
        let spec = scalar(-1.0, 1.0);
        assert!(spec.profile(vec![0.5]).is_ok());
        assert!(matches!(spec.profile(vec![11.0]), Err(GameError::OutOfBox { .. })));
        assert!(matches!(
            spec.profile(vec![0.5, 0.5]),
            Err(GameError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn decoupled_stationary_point() {
        // 2 rho k (k - a) = 1 + rho k^2  =>  k* = a + sqrt(a^2 + 1/rho)
        let diag = [-0.5, -2.0, -1.0];
        let rho = [0.4, 1.5, 0.05];
        let spec = GameSpec::new(
            DMatrix::from_diagonal(&DVector::from_column_slice(&diag)),
            DVector::from_column_slice(&rho),
            DVector::repeat(3, 20.0),
        )
        .unwrap();
        let star: Vec<f64> = (0..3)
            .map(|i| diag[i] + (diag[i] * diag[i] + 1.0 / rho[i]).sqrt())
            .collect();
        let g = exact_gradient(&spec, &spec.profile(star).unwrap()).unwrap();
        assert!(g.amax() < 1e-14, "{g}");
    }

    #[test]
    fn numerically_singular_corner_is_not_positive_definite() {
        let err = GameSpec::from_rows(&[vec![-1e-14, 0.0], vec![0.0, -1e6]], &[1.0, 1.0], &[5.0, 5.0])
            .unwrap_err();
        assert!(matches!(err, GameError::NotPositiveDefinite { .. }), "{err}");
    }
}
