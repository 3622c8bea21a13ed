//! Completely positive maps as labeled Kraus branches.

use crate::error::{Error, Result};
use crate::linalg::{identity, kron, max_abs_diff, CMatrix, STRUCTURAL_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct KrausBranch {
    pub label: String,
    pub op: CMatrix,
}

/// A trace-preserving instrument: Kraus operators with `Σ K†K = I`, each
/// tagged by the classical outcome it records.
#[derive(Debug, Clone, PartialEq)]
pub struct CpMap {
    branches: Vec<KrausBranch>,
}

impl CpMap {
    pub fn new(branches: Vec<(String, CMatrix)>) -> Result<Self> {
        let branches: Vec<KrausBranch> = branches
            .into_iter()
            .map(|(label, op)| KrausBranch { label, op })
            .collect();
        let first = branches.first().ok_or(Error::EmptyEnsemble)?;
        let (rows, cols) = first.op.shape();
        if branches.iter().any(|b| b.op.shape() != (rows, cols)) {
            return Err(Error::DimensionMismatch(
                "Kraus operators differ in shape".into(),
            ));
        }
        let mut sum = CMatrix::zeros(cols, cols);
        for b in &branches {
            sum += b.op.adjoint() * &b.op;
        }
        let dev = max_abs_diff(&sum, &identity(cols));
        if dev > STRUCTURAL_TOL {
            return Err(Error::IncompleteKraus(dev));
        }
        Ok(Self { branches })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            branches: vec![KrausBranch {
                label: "id".into(),
                op: identity(dim),
            }],
        }
    }

    pub fn branches(&self) -> &[KrausBranch] {
        &self.branches
    }

    pub fn labels(&self) -> Vec<&str> {
        self.branches.iter().map(|b| b.label.as_str()).collect()
    }

    pub fn branch(&self, label: &str) -> Result<&CMatrix> {
        self.branches
            .iter()
            .find(|b| b.label == label)
            .map(|b| &b.op)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn input_dim(&self) -> usize {
        self.branches[0].op.ncols()
    }

    /// Unnormalized post-measurement operator `K ρ K†` for one branch.
    pub fn apply_branch(&self, label: &str, rho: &CMatrix) -> Result<CMatrix> {
        let k = self.branch(label)?;
        Ok(k * rho * k.adjoint())
    }

    /// `Σ_k K_k ρ K_k†`.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let out_dim = self.branches[0].op.nrows();
        let mut out = CMatrix::zeros(out_dim, out_dim);
        for b in &self.branches {
            out += &b.op * rho * b.op.adjoint();
        }
        out
    }

    /// Sequential composition: `self` applied after `first`. Labels are joined
    /// as `first/self`.
    pub fn compose(&self, first: &CpMap) -> Result<CpMap> {
        let mut out = Vec::new();
        for a in &first.branches {
            for b in &self.branches {
                out.push((format!("{}/{}", a.label, b.label), &b.op * &a.op));
            }
        }
        CpMap::new(out)
    }

    /// Lift to act on subsystem `slot` of a register with subsystem sizes
    /// `dims`, as identity elsewhere. Only valid for square Kraus operators.
    pub fn embed(&self, dims: &[usize], slot: usize) -> Result<CpMap> {
        if slot >= dims.len() || dims[slot] != self.input_dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot embed a {}-dim map in slot {} of {:?}",
                self.input_dim(),
                slot,
                dims
            )));
        }
        let before: usize = dims[..slot].iter().product();
        let after: usize = dims[slot + 1..].iter().product();
        let branches = self
            .branches
            .iter()
            .map(|b| {
                let op = kron(&kron(&identity(before), &b.op), &identity(after));
                (b.label.clone(), op)
            })
            .collect();
        CpMap::new(branches)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;

    fn dephasing(p: f64) -> CpMap {
        let mut z = identity(2);
        z[(1, 1)] = real(-1.0);
        CpMap::new(vec![
            ("keep".into(), identity(2).scale((1.0 - p).sqrt())),
            ("flip".into(), z.scale(p.sqrt())),
        ])
        .unwrap()
    }

    #[test]
    fn rejects_incomplete_kraus() {
        let err = CpMap::new(vec![("a".into(), identity(2).scale(0.5))]).unwrap_err();
        assert!(matches!(err, Error::IncompleteKraus(_)));
    }

    #[test]
    fn composition_is_complete_and_labels_join() {
        let m = dephasing(0.3).compose(&dephasing(0.1)).unwrap();
        assert_eq!(m.branches().len(), 4);
        assert!(m.labels().contains(&"keep/flip"));
    }

    #[test]
    fn embed_acts_on_one_slot() {
        let m = dephasing(0.5).embed(&[2, 2], 1).unwrap();
        assert_eq!(m.input_dim(), 4);
        assert!(dephasing(0.5).embed(&[2, 3], 1).is_err());
        // |+><+| on slot 1 fully dephased; slot 0 untouched
        let mut rho = CMatrix::from_element(4, 4, real(0.0));
        for i in 0..2 {
            for j in 0..2 {
                rho[(i, j)] = real(0.5);
            }
        }
        let out = m.apply(&rho);
        assert!((out[(0, 1)].re).abs() < 1e-15);
        assert!((out[(0, 0)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn unknown_branch_label() {
        assert!(matches!(
            dephasing(0.2).apply_branch("nope", &identity(2)),
            Err(Error::UnknownLabel(_))
        ));
    }
}
