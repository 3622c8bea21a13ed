//! Cloning isometries: the phase-covariant cloner for the equatorial BB84
//! states and the symmetric two-state cloner tuned on an arbitrary pair.

use std::f64::consts::FRAC_PI_2;

use crate::error::{check_range, Error, Result};
use crate::linalg::{
    isometry_deviation, kron, real, CMatrix, CVector, DensityOperator, PureState, STRUCTURAL_TOL,
};
use crate::model::{signal_state, Basis, Label, WeightedEnsemble};

/// Output subsystems of the phase-covariant cloner: Bob, Eve, ancilla.
pub const PC_DIMS: [usize; 3] = [2, 2, 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseCovariantSpec {
    pub eta: f64,
}

impl PhaseCovariantSpec {
    pub fn new(eta: f64) -> Result<Self> {
        check_range("eta", eta, 0.0, FRAC_PI_2, "[0, pi/2]")?;
        Ok(Self { eta })
    }

    /// Cloner strength that produces a given error on Bob's copy.
    pub fn for_error(q: f64) -> Result<Self> {
        Self::new(pc_eta_for_error(q)?)
    }

    pub fn isometry(&self) -> Result<CMatrix> {
        phase_covariant_isometry(self.eta)
    }

    pub fn bob_error(&self) -> f64 {
        pc_bob_error(self.eta)
    }
}

/// `signal → B⊗E⊗Anc` isometry (8×2):
///
/// |0⟩ ↦ (|000⟩ + cos η|011⟩ + sin η|101⟩)/√2
/// |1⟩ ↦ (cos η|100⟩ + sin η|010⟩ + |111⟩)/√2
///
/// On (|0⟩ ± e^{iφ}|1⟩)/√2 this is the branch pair with the sign carried by
/// the second input component.
pub fn phase_covariant_isometry(eta: f64) -> Result<CMatrix> {
    check_range("eta", eta, 0.0, FRAC_PI_2, "[0, pi/2]")?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (s, co) = eta.sin_cos();
    let mut v = CMatrix::zeros(8, 2);
    v[(0b000, 0)] = real(h);
    v[(0b011, 0)] = real(h * co);
    v[(0b101, 0)] = real(h * s);
    v[(0b100, 1)] = real(h * co);
    v[(0b010, 1)] = real(h * s);
    v[(0b111, 1)] = real(h);
    let dev = isometry_deviation(&v);
    if dev > STRUCTURAL_TOL {
        return Err(Error::NotIsometry(dev));
    }
    Ok(v)
}

/// Bit-flip probability on Bob's copy for any equatorial input.
pub fn pc_bob_error(eta: f64) -> f64 {
    (1.0 - eta.cos()) / 2.0
}

/// Inverse of [`pc_bob_error`] on `[0, 1/2]`.
pub fn pc_eta_for_error(q: f64) -> Result<f64> {
    check_range("q", q, 0.0, 0.5, "[0, 1/2]")?;
    Ok((1.0 - 2.0 * q).clamp(-1.0, 1.0).acos())
}

/// Full output of the phase-covariant cloner on a signal state, dims `[2, 2, 2]`.
pub fn pc_clone(eta: f64, input: &PureState) -> Result<PureState> {
    let v = phase_covariant_isometry(eta)?;
    PureState::new(&v * input.amplitudes(), PC_DIMS.to_vec())
}

/// Eve's two memory states (E⊗Anc) for the bits of one basis.
pub fn pc_eve_ensemble(eta: f64, basis: Basis) -> Result<WeightedEnsemble> {
    let mut items = Vec::with_capacity(2);
    for bit in 0..2u8 {
        let out = pc_clone(eta, &signal_state(basis, bit))?;
        let eve = out.projector().partial_trace(&[1, 2])?;
        items.push((0.5, eve, Label::new(basis, bit, "E⊗Anc")));
    }
    WeightedEnsemble::mixed(items)
}

/// Bob's reduced state after cloning `input`.
pub fn pc_bob_state(eta: f64, input: &PureState) -> Result<DensityOperator> {
    pc_clone(eta, input)?.projector().partial_trace(&[0])
}

/// Parameters of the symmetric two-state cloner tuned on one pair.
///
/// In the canonical frame the pair is `cos x|0⟩ + sin x|1⟩`,
/// `sin x|0⟩ + cos x|1⟩`, and
/// U|0⟩|0⟩ = a|00⟩ + b(|01⟩ + |10⟩) + c|11⟩,
/// U|1⟩|0⟩ = c|00⟩ + b(|01⟩ + |10⟩) + a|11⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStateSpec {
    pub x: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub p_coef: f64,
    pub q_coef: f64,
    /// Unitary taking the canonical pair to the target pair (up to a
    /// global phase on the second state).
    pub frame: CMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStateCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub p_coef: f64,
    pub q_coef: f64,
}

pub fn two_state_coefficients(x: f64) -> Result<TwoStateCoefficients> {
    if !(x.is_finite() && (0.0..std::f64::consts::FRAC_PI_4).contains(&x)) {
        return Err(Error::OutOfRange {
            name: "x",
            value: x,
            range: "[0, pi/4)",
        });
    }
    let s = (2.0 * x).sin();
    let c2 = (2.0 * x).cos();
    let (sx, cx) = x.sin_cos();
    let p = 0.5 * (1.0 + s).sqrt() / (1.0 + s * s).sqrt();
    let q = 0.5 * (1.0 - s).sqrt() / (1.0 - s * s).sqrt();
    Ok(TwoStateCoefficients {
        a: ((p + q * c2) * cx - (p - q * c2) * sx) / c2,
        b: p * (cx - sx) * s / c2,
        c: ((p - q * c2) * cx - (p + q * c2) * sx) / c2,
        p_coef: p,
        q_coef: q,
    })
}

fn orthogonal_complement(u: &CVector) -> CVector {
    CVector::from_vec(vec![-u[1].conj(), u[0].conj()])
}

/// Tune the two-state cloner on `(psi1, psi2)` and return its spec and the
/// `signal → A⊗E` isometry (4×2). The first output slot is the copy kept
/// in the channel, the second the one Eve stores.
pub fn two_state_isometry(psi1: &PureState, psi2: &PureState) -> Result<(TwoStateSpec, CMatrix)> {
    if psi1.dim() != 2 || psi2.dim() != 2 {
        return Err(Error::DimensionMismatch(
            "two-state cloner acts on qubits".into(),
        ));
    }
    let overlap = psi1.inner(psi2);
    let s = overlap.norm();
    if s >= 1.0 - 1e-12 {
        return Err(Error::DegeneratePair(s));
    }
    let x = 0.5 * s.asin();
    let coef = two_state_coefficients(x)?;

    let phase = if s > 0.0 { overlap / s } else { real(1.0) };
    let a1 = psi1.amplitudes();
    let b1 = psi2.amplitudes() * phase.conj();
    let sum = a1 + &b1;
    let diff = a1 - &b1;
    let u = sum.unscale(sum.norm());
    let v = if diff.norm() > 1e-12 {
        diff.unscale(diff.norm())
    } else {
        orthogonal_complement(&u)
    };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = CVector::from_vec(vec![real(h), real(h)]);
    let minus = CVector::from_vec(vec![real(h), real(-h)]);
    let frame = &u * plus.adjoint() + &v * minus.adjoint();

    let mut canonical = CMatrix::zeros(4, 2);
    for (row, (c0, c1)) in [
        (coef.a, coef.c),
        (coef.b, coef.b),
        (coef.b, coef.b),
        (coef.c, coef.a),
    ]
    .into_iter()
    .enumerate()
    {
        canonical[(row, 0)] = real(c0);
        canonical[(row, 1)] = real(c1);
    }
    let iso = kron(&frame, &frame) * canonical * frame.adjoint();
    let dev = isometry_deviation(&iso);
    if dev > STRUCTURAL_TOL {
        return Err(Error::NotIsometry(dev));
    }
    let spec = TwoStateSpec {
        x,
        a: coef.a,
        b: coef.b,
        c: coef.c,
        p_coef: coef.p_coef,
        q_coef: coef.q_coef,
        frame,
    };
    Ok((spec, iso))
}
