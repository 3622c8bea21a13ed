//! Dense complex linear algebra over small, explicitly factored Hilbert spaces.
//!
//! Every state carries the list of its subsystem dimensions; subsystem 0 is
//! the most significant factor of the Kronecker index.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance for structural invariants (normalization, Hermiticity, positivity).
pub const STRUCTURAL_TOL: f64 = 1e-10;

/// Default eigenvalue cutoff for pseudo-powers.
pub const PSEUDO_EPS: f64 = 1e-12;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn projector(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Largest absolute entry of `m - m†`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    (m - m.adjoint())
        .iter()
        .fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Deviation of `v†v` from the identity on the input space.
pub fn isometry_deviation(v: &CMatrix) -> f64 {
    max_abs_diff(&(v.adjoint() * v), &identity(v.ncols()))
}

pub fn trace(m: &CMatrix) -> C64 {
    m.trace()
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(h.nrows(), h.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    hermitian_eigen(h).0
}

/// Spectral function calculus `Σ f(λᵢ)|vᵢ⟩⟨vᵢ|` for Hermitian `h`.
pub fn hermitian_map(h: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(h);
    let n = h.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lambda) in values.iter().enumerate() {
        let w = f(lambda);
        if w != 0.0 {
            let v = vectors.column(k);
            out += (v * v.adjoint()).scale(w);
        }
    }
    out
}

/// Pseudo-power of a Hermitian PSD operator: eigenvalues `λ >= eps` map to
/// `λ^exponent`, everything below `eps` (kernel and round-off negatives) to 0.
pub fn herm_power(h: &CMatrix, exponent: f64, eps: f64) -> Result<CMatrix> {
    if h.nrows() != h.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "herm_power needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let scale = h.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
    let dev = hermitian_deviation(h);
    if dev > STRUCTURAL_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    Ok(hermitian_map(h, |lambda| {
        if lambda >= eps {
            lambda.powf(exponent)
        } else {
            0.0
        }
    }))
}

/// `-Σ λ log2 λ` over the spectrum of a unit-trace PSD matrix, with `0 log 0 = 0`.
pub fn entropy_of(matrix: &CMatrix) -> f64 {
    let s: f64 = hermitian_eigenvalues(matrix)
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum();
    s.max(0.0)
}

/// Block-diagonal direct sum of square matrices.
pub fn direct_sum(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, at), (b.nrows(), b.ncols())).copy_from(b);
        at += b.nrows();
    }
    out
}

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) || dims.iter().product::<usize>() != len {
        return Err(Error::InvalidDims {
            dims: dims.to_vec(),
            expected: len,
        });
    }
    Ok(())
}

/// Kronecker product of two objects of the same kind; subsystem lists concatenate.
pub trait Tensor {
    fn tensor(&self, other: &Self) -> Self;
}

/// Normalized state vector on a factored Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    dims: Vec<usize>,
}

impl PureState {
    pub fn new(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm < 1e-300 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(amplitudes.unscale(norm), dims)
    }

    pub fn qubit(a0: C64, a1: C64) -> Result<Self> {
        Self::new(CVector::from_vec(vec![a0, a1]), vec![2])
    }

    /// Computational basis vector `|index⟩` of a single system of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = real(1.0);
        Self {
            amplitudes: v,
            dims: vec![dim],
        }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn projector(&self) -> DensityOperator {
        DensityOperator {
            matrix: projector(&self.amplitudes),
            dims: self.dims.clone(),
        }
    }
}

impl Tensor for PureState {
    fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
            dims,
        }
    }
}

/// Hermitian, positive semidefinite, unit-trace operator on a factored space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        check_dims(&dims, matrix.nrows())?;
        let dev = hermitian_deviation(&matrix);
        if dev > STRUCTURAL_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STRUCTURAL_TOL || tr.im.abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized(tr.re));
        }
        let min = hermitian_eigenvalues(&matrix)
            .first()
            .copied()
            .unwrap_or(0.0);
        if min < -STRUCTURAL_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { matrix, dims })
    }

    /// Divides a nonzero PSD operator by its trace.
    pub fn from_unnormalized(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr <= 1e-300 {
            return Err(Error::NotNormalized(tr));
        }
        let m = matrix.unscale(tr);
        Self::new((&m + m.adjoint()).scale(0.5), dims)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: identity(dim).unscale(dim as f64),
            dims: vec![dim],
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &PureState) -> f64 {
        psi.amplitudes.dotc(&(&self.matrix * &psi.amplitudes)).re
    }

    /// Same operator with its subsystem structure replaced; total size must agree.
    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, self.matrix.nrows())?;
        Ok(Self {
            matrix: self.matrix,
            dims,
        })
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        partial_trace(self, keep)
    }

    pub fn entropy(&self) -> f64 {
        von_neumann_entropy(self)
    }
}

impl Tensor for DensityOperator {
    fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            matrix: kron(&self.matrix, &other.matrix),
            dims,
        }
    }
}

impl From<&PureState> for DensityOperator {
    fn from(psi: &PureState) -> Self {
        psi.projector()
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Reduced operator on the subsystems listed in `keep` (any order; the
/// result keeps them in ascending order).
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let matrix = partial_trace_matrix(&rho.matrix, &rho.dims, keep)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    let dims = kept.iter().map(|&k| rho.dims[k]).collect();
    Ok(DensityOperator { matrix, dims })
}

/// Partial trace on a raw (possibly unnormalized) matrix.
pub fn partial_trace_matrix(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let count = dims.len();
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() || kept.iter().any(|&k| k >= count) || kept.is_empty() {
        return Err(Error::InvalidSubsystems {
            keep: keep.to_vec(),
            count,
        });
    }
    if dims.iter().product::<usize>() != m.nrows() {
        return Err(Error::InvalidDims {
            dims: dims.to_vec(),
            expected: m.nrows(),
        });
    }

    let n = m.nrows();
    // strides[k]: weight of subsystem k in the flat index
    let mut strides = vec![1usize; count];
    for k in (0..count.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let is_kept: Vec<bool> = (0..count).map(|k| kept.contains(&k)).collect();
    let out_dim: usize = kept.iter().map(|&k| dims[k]).product();
    let mut out_strides = vec![0usize; count];
    let mut acc = 1;
    for &k in kept.iter().rev() {
        out_strides[k] = acc;
        acc *= dims[k];
    }

    let split = |flat: usize| -> (usize, usize) {
        // (index within kept space, index within traced space)
        let mut kept_idx = 0;
        let mut traced_idx = 0;
        for k in 0..count {
            let digit = (flat / strides[k]) % dims[k];
            if is_kept[k] {
                kept_idx += digit * out_strides[k];
            } else {
                traced_idx = traced_idx * dims[k] + digit;
            }
        }
        (kept_idx, traced_idx)
    };
    let parts: Vec<(usize, usize)> = (0..n).map(split).collect();

    let mut out = CMatrix::zeros(out_dim, out_dim);
    for r in 0..n {
        let (kr, tr) = parts[r];
        for col in 0..n {
            let (kc, tc) = parts[col];
            if tr == tc {
                out[(kr, kc)] += m[(r, col)];
            }
        }
    }
    Ok(out)
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    entropy_of(&rho.matrix)
}

/// Fidelity `⟨ψ|ρ|ψ⟩` of a density operator with a pure target.
pub fn fidelity_pure(rho: &DensityOperator, psi: &PureState) -> f64 {
    rho.expectation(psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn diag(values: &[f64]) -> CMatrix {
        let n = values.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = real(v);
        }
        m
    }

    fn bell() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            CVector::from_vec(vec![real(s), real(0.0), real(0.0), real(s)]),
            vec![2, 2],
        )
        .unwrap()
    }

    #[test]
    fn tensor_of_basis_kets() {
        let k0 = PureState::basis(2, 0);
        let k1 = PureState::basis(2, 1);
        let t = tensor(&k0, &k1);
        assert_eq!(t.dims(), &[2, 2]);
        let expect = [0.0, 1.0, 0.0, 0.0];
        for (a, e) in t.amplitudes().iter().zip(expect) {
            assert!(approx(a.re, e, 1e-15) && a.im == 0.0);
        }
    }

    #[test]
    fn tensor_with_mixed_then_trace_recovers_factor() {
        let rho = DensityOperator::new(
            CMatrix::from_row_slice(2, 2, &[real(0.7), c(0.1, 0.2), c(0.1, -0.2), real(0.3)]),
            vec![2],
        )
        .unwrap();
        let joint = rho.tensor(&DensityOperator::maximally_mixed(2));
        let back = partial_trace(&joint, &[0]).unwrap();
        assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-15);
        assert_eq!(back.dims(), &[2]);
    }

    #[test]
    fn product_state_reduces_to_factor() {
        let k00 = PureState::basis(2, 0).tensor(&PureState::basis(2, 0));
        let red = partial_trace(&k00.projector(), &[0]).unwrap();
        assert!(max_abs_diff(red.matrix(), &diag(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn bell_state_reduces_to_maximally_mixed() {
        let red = partial_trace(&bell().projector(), &[1]).unwrap();
        assert!(max_abs_diff(red.matrix(), &diag(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_indices() {
        let rho = bell().projector();
        assert!(matches!(
            partial_trace(&rho, &[2]),
            Err(Error::InvalidSubsystems { .. })
        ));
        assert!(partial_trace(&rho, &[0, 0]).is_err());
        assert!(partial_trace(&rho, &[]).is_err());
    }

    #[test]
    fn partial_trace_on_middle_of_qutrit_sandwich() {
        // |0><0| ⊗ (I/3) ⊗ |1><1| keep {0, 2}
        let a = PureState::basis(2, 0).projector();
        let b = DensityOperator::maximally_mixed(3);
        let cst = PureState::basis(2, 1).projector();
        let joint = a.tensor(&b).tensor(&cst);
        let red = partial_trace(&joint, &[2, 0]).unwrap();
        assert_eq!(red.dims(), &[2, 2]);
        let expect = a.tensor(&cst);
        assert!(max_abs_diff(red.matrix(), expect.matrix()) < 1e-15);
    }

    #[test]
    fn identity_to_any_power_is_identity() {
        let id = identity(3);
        let out = herm_power(&id, -0.5, PSEUDO_EPS).unwrap();
        assert!(max_abs_diff(&out, &id) < 1e-14);
    }

    #[test]
    fn diagonal_inverse_square_root() {
        let out = herm_power(&diag(&[4.0, 1.0]), -0.5, PSEUDO_EPS).unwrap();
        assert!(max_abs_diff(&out, &diag(&[0.5, 1.0])) < 1e-14);
    }

    #[test]
    fn pseudo_power_zeroes_kernel() {
        let out = herm_power(&diag(&[0.0, 0.25]), -0.5, PSEUDO_EPS).unwrap();
        assert!(max_abs_diff(&out, &diag(&[0.0, 2.0])) < 1e-14);
    }

    #[test]
    fn herm_power_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[real(1.0), real(0.5), real(0.0), real(1.0)]);
        assert!(matches!(
            herm_power(&m, 0.5, PSEUDO_EPS),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn entropy_reference_values() {
        assert!(bell().projector().entropy().abs() < 1e-12);
        assert!(approx(
            DensityOperator::maximally_mixed(2).entropy(),
            1.0,
            1e-12
        ));
        let rho = DensityOperator::new(diag(&[0.25, 0.75]), vec![2]).unwrap();
        // scalar oracle: -(1/4)log2(1/4) - (3/4)log2(3/4)
        let oracle = -0.25 * 0.25f64.log2() - 0.75 * 0.75f64.log2();
        assert!(approx(rho.entropy(), oracle, 1e-12));
        assert!(approx(rho.entropy(), 0.811_278_124_459_132_8, 1e-12));
    }

    #[test]
    fn density_validation() {
        assert!(matches!(
            DensityOperator::new(diag(&[0.6, 0.6]), vec![2]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            DensityOperator::new(diag(&[1.2, -0.2]), vec![2]),
            Err(Error::NotPositive(_))
        ));
        assert!(matches!(
            DensityOperator::new(diag(&[0.5, 0.5]), vec![1, 2]),
            Err(Error::InvalidDims { .. })
        ));
        assert!(PureState::new(CVector::from_vec(vec![real(1.0), real(1.0)]), vec![2]).is_err());
    }

    #[test]
    fn direct_sum_places_blocks() {
        let d = direct_sum(&[diag(&[1.0, 2.0]), diag(&[3.0])]);
        assert!(max_abs_diff(&d, &diag(&[1.0, 2.0, 3.0])) < 1e-15);
    }
}
