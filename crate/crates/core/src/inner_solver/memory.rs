use std::collections::VecDeque;

use crate::linalg::{all_finite, axpy, dot, norm};

/// Relative curvature threshold: a pair is stored only if `yᵀs > 1e-10·‖s‖‖y‖`.
pub const CURVATURE_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct CurvaturePair {
    pub s: Vec<f64>,
    pub y: Vec<f64>,
    /// `1 / (yᵀs)`
    pub rho: f64,
}

/// Bounded L-BFGS history, oldest pair evicted first.
#[derive(Debug, Clone, PartialEq)]
pub struct LbfgsMemory {
    pairs: VecDeque<CurvaturePair>,
    capacity: usize,
}

impl LbfgsMemory {
    pub fn new(capacity: usize) -> Self {
        Self { pairs: VecDeque::with_capacity(capacity), capacity }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn clear(&mut self) {
        self.pairs.clear();
    }

    /// Oldest first.
    pub fn pairs(&self) -> impl DoubleEndedIterator<Item = &CurvaturePair> + ExactSizeIterator {
        self.pairs.iter()
    }

    pub fn newest(&self) -> Option<&CurvaturePair> {
        self.pairs.back()
    }

    /// Stores `(s, y)` if it passes the curvature test; returns whether it was stored.
    pub fn try_insert(&mut self, s: Vec<f64>, y: Vec<f64>) -> bool {
        if self.capacity == 0 || s.len() != y.len() || !all_finite(&s) || !all_finite(&y) {
            return false;
        }
        let sy = dot(&s, &y);
        if !(sy > CURVATURE_THRESHOLD * norm(&s) * norm(&y)) {
            return false;
        }
        let rho = 1.0 / sy;
        if !rho.is_finite() {
            return false;
        }
        if self.pairs.len() == self.capacity {
            self.pairs.pop_front();
        }
        self.pairs.push_back(CurvaturePair { s, y, rho });
        true
    }

    /// `H g` for the implicit inverse-Hessian approximation, with initial
    /// scaling `γ = sᵀy / yᵀy` from the newest pair (`γ = 1` when empty).
    pub fn apply_inverse_hessian(&self, g: &[f64]) -> Vec<f64> {
        let mut q = g.to_vec();
        let mut alphas = Vec::with_capacity(self.pairs.len());
        for pair in self.pairs.iter().rev() {
            let a = pair.rho * dot(&pair.s, &q);
            axpy(-a, &pair.y, &mut q);
            alphas.push(a);
        }
        let gamma = self
            .newest()
            .map(|p| dot(&p.s, &p.y) / dot(&p.y, &p.y))
            .unwrap_or(1.0);
        for v in q.iter_mut() {
            *v *= gamma;
        }
        for (pair, a) in self.pairs.iter().zip(alphas.iter().rev()) {
            let b = pair.rho * dot(&pair.y, &q);
            axpy(a - b, &pair.s, &mut q);
        }
        q
    }
}
