//! Objective oracles.
//!
//! The solver sees an objective only through [`ObjectiveOracle`]: one call
//! returns the value and one subgradient at a point. For differentiable
//! points the subgradient is the gradient; at kinks implementations pick a
//! deterministic representative so that repeated evaluation at the same
//! point returns the same answer.

use std::cell::Cell;

/// Value and one subgradient at a point.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: f64,
    pub subgradient: Vec<f64>,
}

/// A deterministic objective: `evaluate` is a pure function of `x`.
pub trait ObjectiveOracle {
    fn dim(&self) -> usize;
    fn evaluate(&self, x: &[f64]) -> Evaluation;
}

/// Objective built from a closure, mostly for tests and small experiments.
pub struct FnOracle<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> Evaluation> FnOracle<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnOracle { dim, f }
    }
}

impl<F: Fn(&[f64]) -> Evaluation> ObjectiveOracle for FnOracle<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, x: &[f64]) -> Evaluation {
        (self.f)(x)
    }
}

/// Wrapper counting oracle calls and rejecting non-finite inputs.
///
/// The value and the subgradient come from the same call, so both counters
/// advance together; they are kept separate because reports quote them
/// separately. A solver run owns its wrapper, so plain `Cell` counters are
/// enough.
pub struct CountingOracle<O> {
    inner: O,
    fevals: Cell<u64>,
    gevals: Cell<u64>,
}

impl<O: ObjectiveOracle> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        CountingOracle { inner, fevals: Cell::new(0), gevals: Cell::new(0) }
    }

    pub fn function_evals(&self) -> u64 {
        self.fevals.get()
    }

    pub fn subgradient_evals(&self) -> u64 {
        self.gevals.get()
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: ObjectiveOracle> ObjectiveOracle for CountingOracle<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn evaluate(&self, x: &[f64]) -> Evaluation {
        assert_eq!(x.len(), self.inner.dim(), "evaluate: dimension mismatch");
        assert!(
            x.iter().all(|v| v.is_finite()),
            "evaluate: non-finite component in input point"
        );
        self.fevals.set(self.fevals.get() + 1);
        self.gevals.set(self.gevals.get() + 1);
        self.inner.evaluate(x)
    }
}
