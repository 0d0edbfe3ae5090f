//! Numerical convex roof: searches over ensemble decompositions of ρ for the
//! smallest average pure-state concurrence (or tangle).
//!
//! Every decomposition with `m` members is generated by an `m × r` isometry
//! `U` acting on the scaled eigenvectors of ρ:
//! `|ψ̃_i⟩ = Σ_j U_ij √μ_j |e_j⟩`, `p_i = ⟨ψ̃_i|ψ̃_i⟩`. Any value the search
//! reports is the average over an explicit decomposition, so it is always an
//! upper bound on the true roof.
//!
//! Each restart runs Riemannian gradient descent on the Stiefel manifold with
//! Armijo backtracking, then a derivative-free polish with shrinking random
//! perturbations (accept if better).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, orthonormalize_columns, BipartiteDims, DensityMatrix, PureState, DEFAULT_TOL,
};
use crate::monotones::{pure_concurrence, pure_tangle};

/// Eigenvalues of ρ at or below this value span the discarded null space.
pub const RANK_TOL: f64 = 1e-10;

const ISOMETRY_TOL: f64 = 1e-10;
const MIN_WEIGHT: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Concurrence,
    Tangle,
}

/// Probability-weighted pure states `{p_i, ψ_i}`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    probabilities: Vec<f64>,
    states: Vec<PureState>,
}

impl Ensemble {
    pub fn new(probabilities: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if probabilities.len() != states.len() {
            return Err(Error::LengthMismatch(probabilities.len(), states.len()));
        }
        if states.is_empty() {
            return Err(Error::InvalidState("empty ensemble".into()));
        }
        if let Some((index, &value)) = probabilities.iter().enumerate().find(|(_, p)| !(**p > 0.0))
        {
            return Err(Error::NegativeEntry { index, value });
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::InvalidState(format!(
                "ensemble weights sum to {total}"
            )));
        }
        let dims = states[0].dims();
        if let Some(bad) = states.iter().find(|s| s.dims() != dims) {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                found: bad.dims().total(),
            });
        }
        Ok(Ensemble {
            probabilities,
            states,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dims(&self) -> BipartiteDims {
        self.states[0].dims()
    }

    /// `Σ_i p_i |ψ_i⟩⟨ψ_i|`.
    pub fn mixture(&self) -> DMatrix<Complex64> {
        let n = self.dims().total();
        let mut out = DMatrix::zeros(n, n);
        for (p, s) in self.probabilities.iter().zip(&self.states) {
            let v = s.amplitudes();
            out += (v * v.adjoint()) * Complex64::new(*p, 0.0);
        }
        out
    }

    /// Largest entrywise deviation between the mixture and `rho`.
    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        (self.mixture() - rho.matrix().as_matrix()).camax()
    }
}

/// Search settings. `ensemble_size = None` picks `min(r², r + 4)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoofConfig {
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub step_tol: f64,
    pub objective: Objective,
}

impl RoofConfig {
    pub fn new(objective: Objective) -> Self {
        RoofConfig {
            ensemble_size: None,
            restarts: 32,
            max_iters: 2000,
            seed: 0,
            step_tol: 1e-7,
            objective,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RoofResult {
    pub value: f64,
    pub ensemble: Ensemble,
    /// Best value after each restart, in restart order.
    pub best_so_far: Vec<f64>,
    pub reconstruction_error: f64,
}

/// Non-null eigen-support of ρ: rows of `weights` are `√μ_j e_jᵀ`.
struct Support {
    weights: DMatrix<Complex64>,
    dims: BipartiteDims,
}

impl Support {
    fn of(rho: &DensityMatrix) -> Result<Self> {
        let eig = hermitian_eigen(rho.matrix())?;
        let kept: Vec<usize> = (0..eig.spectrum.len())
            .filter(|&j| eig.spectrum.values()[j] > RANK_TOL)
            .collect();
        let n = rho.dims().total();
        let weights = DMatrix::from_fn(kept.len(), n, |row, col| {
            let j = kept[row];
            eig.vectors[(col, j)] * eig.spectrum.values()[j].sqrt()
        });
        Ok(Support {
            weights,
            dims: rho.dims(),
        })
    }

    fn rank(&self) -> usize {
        self.weights.nrows()
    }
}

/// Decomposition of ρ induced by an `m × r` isometry.
pub fn ensemble_from_unitary(rho: &DensityMatrix, u: &DMatrix<Complex64>) -> Result<Ensemble> {
    let support = Support::of(rho)?;
    if u.ncols() != support.rank() {
        return Err(Error::RankMismatch {
            expected: support.rank(),
            found: u.ncols(),
        });
    }
    let residual = isometry_residual(u);
    if residual > ISOMETRY_TOL {
        return Err(Error::NotIsometry { residual });
    }
    ensemble_from_rows(&(u * &support.weights), support.dims)
}

fn isometry_residual(u: &DMatrix<Complex64>) -> f64 {
    let r = u.ncols();
    (u.adjoint() * u - DMatrix::<Complex64>::identity(r, r)).camax()
}

fn ensemble_from_rows(rows: &DMatrix<Complex64>, dims: BipartiteDims) -> Result<Ensemble> {
    let mut probabilities = Vec::new();
    let mut states = Vec::new();
    for row in rows.row_iter() {
        let p = row.norm_squared();
        if p <= MIN_WEIGHT {
            continue;
        }
        probabilities.push(p);
        states.push(PureState::normalized(row.iter().copied().collect(), dims)?);
    }
    Ensemble::new(probabilities, states)
}

/// `Σ_i p_i C(ψ_i)` or `Σ_i p_i C²(ψ_i)`.
pub fn average_objective(e: &Ensemble, objective: Objective) -> Result<f64> {
    e.probabilities()
        .iter()
        .zip(e.states())
        .map(|(p, s)| {
            let v = match objective {
                Objective::Concurrence => pure_concurrence(s)?,
                Objective::Tangle => pure_tangle(s)?,
            };
            Ok(p * v)
        })
        .sum()
}

/// Upper estimate of the I-concurrence or I-tangle of `rho`.
pub fn minimize_roof(rho: &DensityMatrix, cfg: &RoofConfig) -> Result<RoofResult> {
    if cfg.restarts == 0 || cfg.max_iters == 0 {
        return Err(Error::ConvergenceFailure { dim: 0 });
    }
    let support = Support::of(rho)?;
    let r = support.rank();
    let m = cfg.ensemble_size.unwrap_or_else(|| (r * r).min(r + 4));
    if m < r || m > 4 * r * r {
        return Err(Error::InvalidConfig(format!(
            "ensemble size {m} outside [{r}, {}]",
            4 * r * r
        )));
    }
    let runs: Vec<(f64, DMatrix<Complex64>)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| {
            let start = if k == 0 {
                DMatrix::identity(m, r)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(k as u64);
                random_isometry(m, r, &mut rng)
            };
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
            rng.set_stream(k as u64);
            Problem::new(&support, cfg.objective).optimize(start, cfg, &mut rng)
        })
        .collect();

    let mut best_so_far = Vec::with_capacity(runs.len());
    let mut best_idx = 0;
    for (k, (value, _)) in runs.iter().enumerate() {
        if *value < runs[best_idx].0 {
            best_idx = k;
        }
        best_so_far.push(runs[best_idx].0);
    }
    let u = &runs[best_idx].1;
    let ensemble = ensemble_from_rows(&(u * &support.weights), support.dims)?;
    let value = average_objective(&ensemble, cfg.objective)?;
    let reconstruction_error = ensemble.reconstruction_error(rho);
    Ok(RoofResult {
        value,
        ensemble,
        best_so_far,
        reconstruction_error,
    })
}

fn random_isometry(m: usize, r: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(m, r, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    orthonormalize_columns(&g)
}

/// Smoothing radii for the concurrence kink at product states, ending exact.
const SMOOTHING: [f64; 7] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4, 0.0];

struct Problem<'a> {
    support: &'a Support,
    objective: Objective,
    // concurrence term is √(2f + ε²) − ε
    smoothing: f64,
}

impl<'a> Problem<'a> {
    fn new(support: &'a Support, objective: Objective) -> Self {
        Problem {
            support,
            objective,
            smoothing: 0.0,
        }
    }

    /// Objective value and, when requested, its Euclidean gradient in `U`
    /// (so that `df = Re Σ conj(G_ij) dU_ij`).
    fn evaluate(
        &self,
        u: &DMatrix<Complex64>,
        want_grad: bool,
    ) -> (f64, Option<DMatrix<Complex64>>) {
        let rows = u * &self.support.weights;
        let BipartiteDims { d_a, d_b } = self.support.dims;
        let mut total = 0.0;
        let mut grad_rows = want_grad.then(|| DMatrix::zeros(rows.nrows(), rows.ncols()));
        for i in 0..rows.nrows() {
            let x = DMatrix::from_fn(d_a, d_b, |a, b| rows[(i, a * d_b + b)]);
            let p = x.norm_squared();
            if p <= MIN_WEIGHT {
                continue;
            }
            // f = p² − Tr σ² = 2 Σ_{i<j} (weighted Schmidt pairs)
            let (purity, reduced_x) = if d_a <= d_b {
                let s = &x * x.adjoint();
                (s.norm_squared(), want_grad.then(|| &s * &x))
            } else {
                let s = x.adjoint() * &x;
                (s.norm_squared(), want_grad.then(|| &x * &s))
            };
            let f = (p * p - purity).max(0.0);
            let h = match self.objective {
                Objective::Concurrence => {
                    let eps = self.smoothing;
                    (2.0 * f + eps * eps).sqrt() - eps
                }
                Objective::Tangle => 2.0 * f / p,
            };
            total += h;
            if let (Some(g), Some(sx)) = (grad_rows.as_mut(), reduced_x) {
                // ∇f = 4 (p X − σ X)
                let grad_f = (&x * Complex64::new(p, 0.0) - sx) * Complex64::new(4.0, 0.0);
                let grad_h = match self.objective {
                    Objective::Concurrence => {
                        let root = h + self.smoothing;
                        if root > 1e-300 {
                            grad_f / Complex64::new(root, 0.0)
                        } else {
                            DMatrix::zeros(d_a, d_b)
                        }
                    }
                    Objective::Tangle => {
                        grad_f * Complex64::new(2.0 / p, 0.0)
                            - &x * Complex64::new(4.0 * f / (p * p), 0.0)
                    }
                };
                for a in 0..d_a {
                    for b in 0..d_b {
                        g[(i, a * d_b + b)] = grad_h[(a, b)];
                    }
                }
            }
        }
        let grad = grad_rows.map(|g| g * self.support.weights.adjoint());
        (total, grad)
    }

    fn value(&self, u: &DMatrix<Complex64>) -> f64 {
        self.evaluate(u, false).0
    }

    fn optimize(
        mut self,
        start: DMatrix<Complex64>,
        cfg: &RoofConfig,
        rng: &mut ChaCha8Rng,
    ) -> (f64, DMatrix<Complex64>) {
        let mut u = start;
        if self.objective == Objective::Concurrence {
            for eps in &SMOOTHING[..SMOOTHING.len() - 1] {
                self.smoothing = *eps;
                u = self.descend(u, cfg).0;
            }
            self.smoothing = 0.0;
        }
        let (mut u, mut f) = self.descend(u, cfg);
        self.polish(&mut u, &mut f, cfg, rng);
        (f, u)
    }

    /// Riemannian steepest descent with Armijo backtracking and QR retraction.
    fn descend(&self, start: DMatrix<Complex64>, cfg: &RoofConfig) -> (DMatrix<Complex64>, f64) {
        let mut u = start;
        let (mut f, _) = self.evaluate(&u, false);
        let mut step: f64 = 1.0;
        let mut stalls = 0;
        for _ in 0..cfg.max_iters {
            let (_, g) = self.evaluate(&u, true);
            let g = g.expect("gradient requested");
            let ug = u.adjoint() * &g;
            let sym = (&ug + ug.adjoint()) * Complex64::new(0.5, 0.0);
            let xi = g - &u * sym;
            let slope = xi.norm_squared();
            if slope < 1e-28 {
                break;
            }
            step = (step * 2.0).min(1e3);
            let mut accepted = None;
            while step > 1e-14 {
                let cand = orthonormalize_columns(&(&u - &xi * Complex64::new(step, 0.0)));
                let fc = self.value(&cand);
                if fc <= f - 1e-4 * step * slope {
                    accepted = Some((cand, fc));
                    break;
                }
                step *= 0.5;
            }
            let Some((cand, fc)) = accepted else { break };
            let gain = f - fc;
            u = cand;
            f = fc;
            if gain < cfg.step_tol * 1e-2 {
                stalls += 1;
                if stalls >= 20 {
                    break;
                }
            } else {
                stalls = 0;
            }
        }
        (u, f)
    }

    /// Random perturbation search with step halving after repeated failures.
    fn polish(
        &self,
        u: &mut DMatrix<Complex64>,
        f: &mut f64,
        cfg: &RoofConfig,
        rng: &mut ChaCha8Rng,
    ) {
        let (m, r) = (u.nrows(), u.ncols());
        let mut scale = 0.1;
        let mut failures = 0;
        for _ in 0..cfg.max_iters {
            if scale < cfg.step_tol {
                break;
            }
            let z = DMatrix::from_fn(m, r, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let z = &z * Complex64::new(scale / z.norm().max(1e-300), 0.0);
            let cand = orthonormalize_columns(&(&*u + z));
            let fc = self.value(&cand);
            if fc < *f {
                *u = cand;
                *f = fc;
                failures = 0;
            } else {
                failures += 1;
                if failures >= 8 {
                    scale *= 0.5;
                    failures = 0;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::HermitianMatrix;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            vec![c(s), c(0.0), c(0.0), c(s)],
            BipartiteDims::new(2, 2).unwrap(),
        )
        .unwrap()
    }

    fn product() -> PureState {
        PureState::product(&[c(1.0), c(0.0)], &[c(0.0), c(1.0)]).unwrap()
    }

    #[test]
    fn rank_one_unitary() {
        let rho = bell().to_density();
        let e = ensemble_from_unitary(&rho, &DMatrix::identity(1, 1)).unwrap();
        assert_eq!(e.len(), 1);
        assert_abs_diff_eq!(e.probabilities()[0], 1.0, epsilon = 1e-14);
        let overlap = e.states()[0].amplitudes().dotc(bell().amplitudes()).norm();
        assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn hadamard_mixing_of_maximally_mixed_qubit() {
        let dims = BipartiteDims::new(1, 2).unwrap();
        let rho =
            DensityMatrix::new(HermitianMatrix::from_diagonal(&[0.5, 0.5]).unwrap(), dims).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = DMatrix::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)]);
        let e = ensemble_from_unitary(&rho, &h).unwrap();
        assert_eq!(e.len(), 2);
        let plus = PureState::new(vec![c(s), c(s)], dims).unwrap();
        let minus = PureState::new(vec![c(s), c(-s)], dims).unwrap();
        for (p, st) in e.probabilities().iter().zip(e.states()) {
            assert_abs_diff_eq!(*p, 0.5, epsilon = 1e-14);
            let fp = st.amplitudes().dotc(plus.amplitudes()).norm();
            let fm = st.amplitudes().dotc(minus.amplitudes()).norm();
            assert_abs_diff_eq!(fp.max(fm), 1.0, epsilon = 1e-14);
        }
        assert!(e.reconstruction_error(&rho) < 1e-14);
    }

    #[test]
    fn unitary_validation() {
        let rho = bell().to_density();
        assert!(matches!(
            ensemble_from_unitary(&rho, &DMatrix::identity(2, 2)),
            Err(Error::RankMismatch {
                expected: 1,
                found: 2
            })
        ));
        let not_iso = DMatrix::from_element(1, 1, c(2.0));
        assert!(matches!(
            ensemble_from_unitary(&rho, &not_iso),
            Err(Error::NotIsometry { .. })
        ));
    }

    #[test]
    fn average_objective_examples() {
        let e = Ensemble::new(vec![1.0], vec![product()]).unwrap();
        assert_abs_diff_eq!(
            average_objective(&e, Objective::Concurrence).unwrap(),
            0.0,
            epsilon = 1e-7
        );
        let e = Ensemble::new(vec![1.0], vec![bell()]).unwrap();
        for obj in [Objective::Concurrence, Objective::Tangle] {
            assert_abs_diff_eq!(average_objective(&e, obj).unwrap(), 1.0, epsilon = 1e-14);
        }
        let e = Ensemble::new(vec![0.5, 0.5], vec![bell(), product()]).unwrap();
        assert_abs_diff_eq!(
            average_objective(&e, Objective::Concurrence).unwrap(),
            0.5,
            epsilon = 1e-7
        );
    }

    #[test]
    fn ensemble_validation() {
        assert!(Ensemble::new(vec![0.5], vec![bell()]).is_err());
        assert!(Ensemble::new(vec![1.0, 0.0], vec![bell(), product()]).is_err());
        assert!(Ensemble::new(vec![1.0], vec![]).is_err());
    }

    #[test]
    fn pure_state_roof_is_exact() {
        let psi = PureState::normalized(
            vec![c(0.8), c(0.1), Complex64::new(0.0, 0.3), c(0.5)],
            BipartiteDims::new(2, 2).unwrap(),
        )
        .unwrap();
        let cfg = RoofConfig {
            restarts: 3,
            max_iters: 50,
            ..RoofConfig::new(Objective::Concurrence)
        };
        let res = minimize_roof(&psi.to_density(), &cfg).unwrap();
        assert_abs_diff_eq!(res.value, pure_concurrence(&psi).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn separable_diagonal_state_reaches_zero() {
        let dims = BipartiteDims::new(2, 2).unwrap();
        let q = [0.4, 0.0, 0.0, 0.6];
        let rho = DensityMatrix::new(HermitianMatrix::from_diagonal(&q).unwrap(), dims).unwrap();
        let cfg = RoofConfig {
            restarts: 4,
            max_iters: 200,
            ..RoofConfig::new(Objective::Concurrence)
        };
        let res = minimize_roof(&rho, &cfg).unwrap();
        assert!(res.value < 1e-7, "{}", res.value);
        assert!(res.reconstruction_error < 1e-8);
    }

    #[test]
    fn zero_budget_is_rejected() {
        let rho = bell().to_density();
        let cfg = RoofConfig {
            restarts: 0,
            ..RoofConfig::new(Objective::Tangle)
        };
        assert!(matches!(
            minimize_roof(&rho, &cfg),
            Err(Error::ConvergenceFailure { .. })
        ));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_isometry(6, 6, &mut rng);
        let mu = [0.4, 0.3, 0.2, 0.1, 0.0, 0.0];
        let mut m = DMatrix::zeros(6, 6);
        for (j, w) in mu.iter().enumerate() {
            m += a.column(j) * a.column(j).adjoint() * c(*w);
        }
        let rho = DensityMatrix::new(HermitianMatrix::new(m).unwrap(), dims).unwrap();
        let support = Support::of(&rho).unwrap();
        for obj in [Objective::Concurrence, Objective::Tangle] {
            let problem = Problem::new(&support, obj);
            let u = random_isometry(6, 4, &mut rng);
            let (_, g) = problem.evaluate(&u, true);
            let g = g.unwrap();
            let dir = DMatrix::from_fn(6, 4, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let h = 1e-6;
            let fd = (problem.value(&(&u + &dir * c(h))) - problem.value(&(&u - &dir * c(h))))
                / (2.0 * h);
            let analytic: f64 = g
                .iter()
                .zip(dir.iter())
                .map(|(gi, di)| (gi.conj() * di).re)
                .sum();
            assert_abs_diff_eq!(fd, analytic, epsilon = 1e-6);
        }
    }
}
