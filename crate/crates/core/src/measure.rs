//! Binary discrimination of the side-channel states: minimum-error
//! (Helstrom) and unambiguous (USD) measurements, plus the Stinespring
//! realization of the minimum-error readout as a channel.

use nalgebra::Matrix2;

use crate::channel::CpMap;
use crate::error::{Error, Result};
use crate::linalg::{
    c, hermitian_eigen, hermitian_eigenvalues, identity, kron, max_abs_diff, projector, real,
    CMatrix, CVector, PureState, STRUCTURAL_TOL,
};
use crate::model::SideChannelModel;

#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    pub label: String,
    pub op: CMatrix,
}

/// Positive operator-valued measure with labeled elements summing to identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<PovmElement>,
}

impl Povm {
    pub fn new(elements: Vec<(String, CMatrix)>) -> Result<Self> {
        let first = elements.first().ok_or(Error::EmptyEnsemble)?;
        let n = first.1.nrows();
        let mut sum = CMatrix::zeros(n, n);
        for (_, m) in &elements {
            if m.shape() != (n, n) {
                return Err(Error::DimensionMismatch("POVM element shape".into()));
            }
            let min = hermitian_eigenvalues(m)[0];
            if min < -STRUCTURAL_TOL {
                return Err(Error::NotPositive(min));
            }
            sum += m;
        }
        let dev = max_abs_diff(&sum, &identity(n));
        if dev > STRUCTURAL_TOL {
            return Err(Error::IncompletePovm(dev));
        }
        Ok(Self {
            elements: elements
                .into_iter()
                .map(|(label, op)| PovmElement { label, op })
                .collect(),
        })
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn element(&self, label: &str) -> Result<&CMatrix> {
        self.elements
            .iter()
            .find(|e| e.label == label)
            .map(|e| &e.op)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// `⟨ψ|M_label|ψ⟩`.
    pub fn probability(&self, label: &str, psi: &PureState) -> Result<f64> {
        let m = self.element(label)?;
        Ok(psi.amplitudes().dotc(&(m * psi.amplitudes())).re)
    }
}

/// Optimal two-outcome measurement for the side-channel pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MeResult {
    pub p_succ: f64,
    pub povm: Povm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UsdResult {
    /// Probability of a conclusive identification given |0Δ⟩.
    pub p_conclusive_0: f64,
    /// Probability of a conclusive identification given |1Δ⟩.
    pub p_conclusive_1: f64,
    /// Prior-averaged probability of the inconclusive outcome.
    pub p_inc: f64,
    pub povm: Povm,
}

impl UsdResult {
    /// Prior-averaged conclusive probability, `1 − p_inc`.
    pub fn p_usd(&self) -> f64 {
        1.0 - self.p_inc
    }
}

fn check_priors(prior0: f64) -> Result<()> {
    if prior0.is_finite() && prior0 > 0.0 && prior0 < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "prior0",
            value: prior0,
            range: "(0, 1)",
        })
    }
}

/// Helstrom measurement of `{prior0: |0Δ⟩, 1 − prior0: |1Δ⟩}` with overlap `delta`.
///
/// The POVM projects onto the positive part of `q0ρ0 − q1ρ1`; the success
/// probability is `(1 + √(1 − 4q0q1Δ²))/2`.
pub fn helstrom_binary(delta: f64, prior0: f64) -> Result<MeResult> {
    let model = SideChannelModel::new(delta)?;
    check_priors(prior0)?;
    let (s0, s1) = model.states();
    let gamma =
        projector(s0.amplitudes()).scale(prior0) - projector(s1.amplitudes()).scale(1.0 - prior0);

    let (values, vectors) = hermitian_eigen(&gamma);
    let mut m0 = CMatrix::zeros(2, 2);
    if values.iter().all(|v| v.abs() < 1e-14) {
        // Γ = 0: every measurement is optimal; keep the symmetric ± readout
        m0 = projector(&CVector::from_vec(vec![real(1.0), real(1.0)]).unscale(2f64.sqrt()));
    } else {
        for (k, &v) in values.iter().enumerate() {
            if v > 0.0 {
                m0 += projector(&vectors.column(k).into_owned());
            }
        }
    }
    let m1 = identity(2) - &m0;
    let p_succ = 0.5
        * (1.0
            + (1.0 - 4.0 * prior0 * (1.0 - prior0) * delta * delta)
                .max(0.0)
                .sqrt());
    Ok(MeResult {
        p_succ,
        povm: Povm::new(vec![("r0".into(), m0), ("r1".into(), m1)])?,
    })
}

fn orthogonal_qubit(psi: &PureState) -> CVector {
    let a = psi.amplitudes();
    CVector::from_vec(vec![-a[1].conj(), a[0].conj()])
}

/// Optimal unambiguous discrimination of the side-channel pair.
///
/// Equal priors give the Ivanovic–Dieks–Peres measurement with `p_inc = Δ`.
/// For unequal priors the conclusive-probability-maximizing form is used,
/// degenerating to a projective measurement once `Δ² > q_min/q_max`.
pub fn usd_binary(delta: f64, prior0: f64) -> Result<UsdResult> {
    let model = SideChannelModel::new(delta)?;
    check_priors(prior0)?;
    let prior1 = 1.0 - prior0;

    if delta >= 1.0 {
        return Ok(UsdResult {
            p_conclusive_0: 0.0,
            p_conclusive_1: 0.0,
            p_inc: 1.0,
            povm: Povm::new(vec![
                ("id0".into(), CMatrix::zeros(2, 2)),
                ("id1".into(), CMatrix::zeros(2, 2)),
                ("inc".into(), identity(2)),
            ])?,
        });
    }

    let ratio = (prior1 / prior0).sqrt();
    let (pc0, pc1) = if delta <= ratio.min(1.0 / ratio) {
        (1.0 - delta * ratio, 1.0 - delta / ratio)
    } else if prior0 > prior1 {
        (1.0 - delta * delta, 0.0)
    } else {
        (0.0, 1.0 - delta * delta)
    };

    let (s0, s1) = model.states();
    // e0 ⟂ |1Δ⟩ fires only on |0Δ⟩, e1 ⟂ |0Δ⟩ only on |1Δ⟩
    let e0 = orthogonal_qubit(&s1);
    let e1 = orthogonal_qubit(&s0);
    let norm = 1.0 - delta * delta;
    let m0 = projector(&e0).scale(pc0 / norm);
    let m1 = projector(&e1).scale(pc1 / norm);
    let minc = identity(2) - &m0 - &m1;
    Ok(UsdResult {
        p_conclusive_0: pc0,
        p_conclusive_1: pc1,
        p_inc: prior0 * (1.0 - pc0) + prior1 * (1.0 - pc1),
        povm: Povm::new(vec![
            ("id0".into(), m0),
            ("id1".into(), m1),
            ("inc".into(), minc),
        ])?,
    })
}

/// Dual vectors `f0`, `f1` with `⟨f0|0Δ⟩ = √P, ⟨f0|1Δ⟩ = √(1−P)` and the
/// mirrored conditions for `f1`.
fn readout_duals(model: &SideChannelModel, p_succ: f64) -> (CVector, CVector) {
    let plus = CVector::from_vec(vec![real(1.0), real(1.0)]).unscale(2f64.sqrt());
    let minus = CVector::from_vec(vec![real(1.0), real(-1.0)]).unscale(2f64.sqrt());
    if 1.0 - model.delta() < 1e-9 {
        // Gram is singular; the exact solution for the real embedding is |±⟩ for every Δ
        return (plus, minus);
    }
    let (s0, s1) = model.states();
    let (a, b) = (s0.amplitudes(), s1.amplitudes());
    // f†σ = t  ⇔  Σ conj(fᵢ) σᵢ = t: solve for g = conj(f) with rows σᵀ
    let rows = Matrix2::new(a[0], a[1], b[0], b[1]);
    let inv = rows
        .try_inverse()
        .expect("side-channel states are linearly independent for Δ < 1");
    let (hi, lo) = (p_succ.sqrt(), (1.0 - p_succ).sqrt());
    let solve = |t0: f64, t1: f64| {
        let g = inv * nalgebra::Vector2::new(real(t0), real(t1));
        CVector::from_vec(vec![g[0].conj(), g[1].conj()])
    };
    (solve(hi, lo), solve(lo, hi))
}

/// Stinespring isometry `side → side ⊗ ancilla` of the minimum-error readout:
/// |0Δ⟩ ↦ √P|0Δ⟩|r0⟩ + √(1−P)|1Δ⟩|r1⟩, |1Δ⟩ ↦ √(1−P)|0Δ⟩|r0⟩ + √P|1Δ⟩|r1⟩,
/// with `P` the Helstrom success probability.
pub fn me_stinespring_isometry(delta: f64) -> Result<CMatrix> {
    let model = SideChannelModel::new(delta)?;
    let p_succ = helstrom_binary(delta, 0.5)?.p_succ;
    let (f0, f1) = readout_duals(&model, p_succ);
    let (s0, s1) = model.states();
    let r0 = CVector::from_vec(vec![real(1.0), real(0.0)]);
    let r1 = CVector::from_vec(vec![real(0.0), real(1.0)]);
    let k0 = s0.amplitudes().kronecker(&r0) * f0.adjoint();
    let k1 = s1.amplitudes().kronecker(&r1) * f1.adjoint();
    Ok(k0 + k1)
}

/// The minimum-error readout as an instrument on the side-channel qubit:
/// branches `r0`, `r1` are the isometry followed by an ancilla measurement.
pub fn me_side_channel_map(delta: f64) -> Result<CpMap> {
    let v = me_stinespring_isometry(delta)?;
    let mut branches = Vec::with_capacity(2);
    for (idx, label) in [(0usize, "r0"), (1, "r1")] {
        let mut bra = CMatrix::zeros(1, 2);
        bra[(0, idx)] = c(1.0, 0.0);
        let project = kron(&identity(2), &bra);
        branches.push((label.to_string(), project * &v));
    }
    CpMap::new(branches)
}
