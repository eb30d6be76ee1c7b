//! Damped Newton iteration for the discrete axisymmetric equation, backed by
//! a sparse LU factorization (symbolic structure reused across iterations).

use super::field::ScalarField;
use super::residual::{jacobian, residual_norm, residual_vector, UnknownMap};
use crate::error::{Error, Result};
use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::linalg::LuError;
use faer::Mat;

/// Reusable factorization workspace: the sparsity pattern depends only on
/// the grid, so the symbolic analysis is done once.
#[derive(Default)]
pub struct LinearWorkspace {
    symbolic: Option<(usize, SymbolicLu<usize>)>,
}

impl LinearWorkspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Factor the current Jacobian.
    pub fn factor(&mut self, field: &ScalarField, map: &UnknownMap) -> Result<Lu<usize, f64>> {
        let jac = jacobian(field, map);
        let n = map.count();
        if self.symbolic.as_ref().map(|(m, _)| *m) != Some(n) {
            let sym = SymbolicLu::try_new(jac.symbolic())
                .map_err(|e| Error::LinearSolve(format!("symbolic LU failed: {e:?}")))?;
            self.symbolic = Some((n, sym));
        }
        let (_, sym) = self.symbolic.as_ref().unwrap();
        Lu::try_new_with_symbolic(sym.clone(), jac.as_ref()).map_err(|e| match e {
            LuError::Generic(g) => Error::LinearSolve(format!("LU factorization failed: {g:?}")),
            LuError::SymbolicSingular { .. } => {
                Error::LinearSolve("LU factorization: matrix is singular".into())
            }
        })
    }
}

/// Newton outcome: the converged field plus the iteration log.
#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub field: ScalarField,
    pub iters: usize,
    pub residual_history: Vec<f64>,
    pub final_residual: f64,
}

/// Solve the discrete system from `initial`, driving the max-norm residual
/// below `tol`. Dirichlet rows are refreshed from the field's far-field data
/// before iterating. Steps are halved (up to 8 times) whenever the residual
/// norm fails to decrease.
pub fn newton_solve(initial: &ScalarField, tol: f64, max_iter: usize) -> Result<NewtonOutcome> {
    let mut ws = LinearWorkspace::new();
    newton_solve_with(initial, tol, max_iter, &mut ws)
}

pub fn newton_solve_with(
    initial: &ScalarField,
    tol: f64,
    max_iter: usize,
    ws: &mut LinearWorkspace,
) -> Result<NewtonOutcome> {
    if !(tol >= 1e-13) {
        return Err(Error::Domain(format!("Newton tolerance {tol} too small")));
    }
    let mut field = initial.clone();
    field.apply_dirichlet();
    let map = UnknownMap::new(&field.grid);
    let n = map.count();

    let mut history = Vec::new();
    let mut norm = residual_norm(&field);
    history.push(norm);
    let initial_norm = norm;
    if !norm.is_finite() {
        return Err(Error::Domain("initial residual is not finite".into()));
    }
    if norm <= tol {
        return Ok(NewtonOutcome {
            field,
            iters: 0,
            residual_history: history,
            final_residual: norm,
        });
    }

    for iter in 1..=max_iter {
        let lu = ws.factor(&field, &map)?;
        let f = residual_vector(&field, &map);
        let mut rhs = Mat::<f64>::zeros(n, 1);
        for (i, v) in f.iter().enumerate() {
            rhs[(i, 0)] = -v;
        }
        let delta = lu.solve(&rhs);

        // Step halving on residual-norm increase.
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=8 {
            let mut trial = field.clone();
            for idx in 0..n {
                let (i, j) = map.node(idx);
                let v = trial.get(i, j) + lambda * delta[(idx, 0)];
                trial.set(i, j, v);
            }
            let trial_norm = residual_norm(&trial);
            if trial_norm.is_finite() && trial_norm < norm {
                accepted = Some((trial, trial_norm));
                break;
            }
            lambda *= 0.5;
        }
        match accepted {
            Some((trial, trial_norm)) => {
                field = trial;
                norm = trial_norm;
                history.push(norm);
            }
            None => {
                return Err(Error::Nonconvergence {
                    iters: iter,
                    history,
                });
            }
        }
        if norm > 10.0 * initial_norm {
            return Err(Error::Divergence {
                current: norm,
                initial: initial_norm,
            });
        }
        if norm <= tol {
            return Ok(NewtonOutcome {
                field,
                iters: iter,
                residual_history: history,
                final_residual: norm,
            });
        }
    }
    Err(Error::Nonconvergence {
        iters: max_iter,
        history,
    })
}
