//! Soft filtering of a pure-state ensemble and its inverse.
//!
//! The success operator is a fractional power of the ensemble Gram operator
//! `G = Σ qⱼ|ψⱼ⟩⟨ψⱼ|`. `G^{-p/2}` alone is not a contraction, so it is scaled
//! by the largest constant that keeps `F†F ≤ I`: `c = λ_min^{p/2}` (smallest
//! eigenvalue on the support). The inverse map uses `c' = λ_max^{-p/2}`.
//! The kernel of a rank-deficient Gram always lands in the fail branch.

pub use crate::channel::CpMap;

use crate::error::{check_range, Error, Result};
use crate::linalg::{herm_power, hermitian_eigenvalues, identity, CMatrix, PSEUDO_EPS};
use crate::model::WeightedEnsemble;

pub const SUCC: &str = "succ";
pub const FAIL: &str = "fail";

/// `Σ qⱼ|ψⱼ⟩⟨ψⱼ|` of a pure-state ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct GramOperator {
    matrix: CMatrix,
    eigenvalues: Vec<f64>,
}

impl GramOperator {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Smallest eigenvalue above the pseudo-inverse cutoff.
    pub fn min_support_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .copied()
            .find(|&l| l >= PSEUDO_EPS)
            .unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn power(&self, exponent: f64) -> CMatrix {
        herm_power(&self.matrix, exponent, PSEUDO_EPS).expect("Gram operator is Hermitian")
    }
}

pub fn gram(ensemble: &WeightedEnsemble) -> Result<GramOperator> {
    let n: usize = ensemble.dims().iter().product();
    let mut m = CMatrix::zeros(n, n);
    for e in ensemble.entries() {
        let psi = e.state.as_pure().ok_or(Error::MixedEnsemble)?;
        let v = psi.amplitudes();
        m += (v * v.adjoint()).scale(e.prob);
    }
    let eigenvalues = hermitian_eigenvalues(&m);
    Ok(GramOperator {
        matrix: m,
        eigenvalues,
    })
}

fn complete(success: CMatrix) -> Result<CpMap> {
    let n = success.ncols();
    let rest = identity(n) - success.adjoint() * &success;
    let fail = herm_power(&rest, 0.5, 0.0)?;
    CpMap::new(vec![(SUCC.to_string(), success), (FAIL.to_string(), fail)])
}

/// Forward and backward filters tuned on one ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftFilter {
    pub strength: f64,
    pub gram: GramOperator,
    /// Scale of the forward success operator, `λ_min^{p/2}`.
    pub forward_scale: f64,
    /// Scale of the backward success operator, `λ_max^{-p/2}`.
    pub backward_scale: f64,
    pub forward: CpMap,
    pub backward: CpMap,
}

impl SoftFilter {
    pub fn new(ensemble: &WeightedEnsemble, strength: f64) -> Result<Self> {
        check_range("p", strength, 0.0, 1.0, "[0, 1]")?;
        let gram = gram(ensemble)?;
        let lmin = gram.min_support_eigenvalue();
        let lmax = gram.max_eigenvalue();
        let forward_scale = lmin.powf(strength / 2.0);
        let backward_scale = lmax.powf(-strength / 2.0);
        let forward = complete(gram.power(-strength / 2.0).scale(forward_scale))?;
        let backward = complete(gram.power(strength / 2.0).scale(backward_scale))?;
        Ok(Self {
            strength,
            gram,
            forward_scale,
            backward_scale,
            forward,
            backward,
        })
    }

    pub fn forward_success(&self) -> &CMatrix {
        self.forward
            .branch(SUCC)
            .expect("filter has a success branch")
    }

    pub fn forward_failure(&self) -> &CMatrix {
        self.forward.branch(FAIL).expect("filter has a fail branch")
    }

    pub fn backward_success(&self) -> &CMatrix {
        self.backward
            .branch(SUCC)
            .expect("filter has a success branch")
    }

    pub fn backward_failure(&self) -> &CMatrix {
        self.backward
            .branch(FAIL)
            .expect("filter has a fail branch")
    }
}

/// Kraus pair `{succ: c·G^{-p/2}, fail: (I − F†F)^{1/2}}`.
pub fn forward_filter(ensemble: &WeightedEnsemble, p: f64) -> Result<CpMap> {
    Ok(SoftFilter::new(ensemble, p)?.forward)
}

/// Kraus pair `{succ: c'·G^{p/2}, fail: (I − B†B)^{1/2}}`.
pub fn backward_filter(ensemble: &WeightedEnsemble, p: f64) -> Result<CpMap> {
    Ok(SoftFilter::new(ensemble, p)?.backward)
}
