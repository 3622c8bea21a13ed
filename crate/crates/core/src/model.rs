//! BB84 signal states, the binary side channel and the ensembles built from them.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::error::{check_range, Error, Result};
use crate::linalg::{c, real, CMatrix, DensityOperator, PureState, Tensor, STRUCTURAL_TOL};

/// BB84 encoding basis. Both are equatorial: X = σx eigenbasis, Y = σy eigenbasis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    X,
    Y,
}

impl Basis {
    pub const ALL: [Basis; 2] = [Basis::X, Basis::Y];
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::X => f.write_str("X"),
            Basis::Y => f.write_str("Y"),
        }
    }
}

/// Readout of the minimum-error side-channel measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SideOutcome {
    R0,
    R1,
}

impl SideOutcome {
    pub const ALL: [SideOutcome; 2] = [SideOutcome::R0, SideOutcome::R1];

    pub fn index(self) -> usize {
        match self {
            SideOutcome::R0 => 0,
            SideOutcome::R1 => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SideOutcome::R0 => "r0",
            SideOutcome::R1 => "r1",
        }
    }
}

/// `|bit⟩` in `basis`: |0x⟩=(|0⟩+|1⟩)/√2, |1x⟩=(|0⟩−|1⟩)/√2, |0y⟩=(|0⟩+i|1⟩)/√2, |1y⟩=(|0⟩−i|1⟩)/√2.
pub fn signal_state(basis: Basis, bit: u8) -> PureState {
    let sign = if bit == 0 { 1.0 } else { -1.0 };
    let second = match basis {
        Basis::X => c(sign * FRAC_1_SQRT_2, 0.0),
        Basis::Y => c(0.0, sign * FRAC_1_SQRT_2),
    };
    PureState::qubit(real(FRAC_1_SQRT_2), second).expect("BB84 states are normalized")
}

/// Index (0 → |0Δ⟩, 1 → |1Δ⟩) of the side-channel state paired with a signal.
///
/// X basis pairs bit 0 with |0Δ⟩ and bit 1 with |1Δ⟩; Y basis crosses them.
pub fn side_index(basis: Basis, bit: u8) -> usize {
    match basis {
        Basis::X => bit as usize,
        Basis::Y => 1 - bit as usize,
    }
}

/// Identification of an ensemble member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Label {
    pub basis: Basis,
    pub bit: u8,
    pub tag: String,
}

impl Label {
    pub fn new(basis: Basis, bit: u8, tag: impl Into<String>) -> Self {
        Self {
            basis,
            bit,
            tag: tag.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleState {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl EnsembleState {
    pub fn dims(&self) -> &[usize] {
        match self {
            EnsembleState::Pure(p) => p.dims(),
            EnsembleState::Mixed(m) => m.dims(),
        }
    }

    pub fn density(&self) -> DensityOperator {
        match self {
            EnsembleState::Pure(p) => p.projector(),
            EnsembleState::Mixed(m) => m.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            EnsembleState::Pure(p) => Some(p),
            EnsembleState::Mixed(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub prob: f64,
    pub state: EnsembleState,
    pub label: Label,
}

/// Probability-weighted list of states sharing one subsystem structure.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEnsemble {
    entries: Vec<Entry>,
}

impl WeightedEnsemble {
    pub fn new(entries: Vec<Entry>) -> Result<Self> {
        let first = entries.first().ok_or(Error::EmptyEnsemble)?;
        let dims = first.state.dims().to_vec();
        if let Some(bad) = entries.iter().find(|e| e.state.dims() != dims.as_slice()) {
            return Err(Error::DimensionMismatch(format!(
                "ensemble members have dims {:?} and {:?}",
                dims,
                bad.state.dims()
            )));
        }
        let sum: f64 = entries.iter().map(|e| e.prob).sum();
        if entries.iter().any(|e| e.prob.is_nan() || e.prob < 0.0)
            || (sum - 1.0).abs() > STRUCTURAL_TOL
        {
            return Err(Error::InvalidProbabilities(sum));
        }
        Ok(Self { entries })
    }

    pub fn pure(items: Vec<(f64, PureState, Label)>) -> Result<Self> {
        Self::new(
            items
                .into_iter()
                .map(|(prob, s, label)| Entry {
                    prob,
                    state: EnsembleState::Pure(s),
                    label,
                })
                .collect(),
        )
    }

    pub fn mixed(items: Vec<(f64, DensityOperator, Label)>) -> Result<Self> {
        Self::new(
            items
                .into_iter()
                .map(|(prob, s, label)| Entry {
                    prob,
                    state: EnsembleState::Mixed(s),
                    label,
                })
                .collect(),
        )
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dims(&self) -> &[usize] {
        self.entries[0].state.dims()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.prob).collect()
    }

    pub fn is_pure(&self) -> bool {
        self.entries
            .iter()
            .all(|e| matches!(e.state, EnsembleState::Pure(_)))
    }

    /// `Σ pⱼ ρⱼ`.
    pub fn average(&self) -> DensityOperator {
        let n: usize = self.dims().iter().product();
        let mut m = CMatrix::zeros(n, n);
        for e in &self.entries {
            m += e.state.density().matrix().scale(e.prob);
        }
        DensityOperator::new(m, self.dims().to_vec()).expect("convex mixture of states is a state")
    }

    /// Probability attached to the first entry with this basis and bit.
    pub fn prob_of(&self, basis: Basis, bit: u8) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.label.basis == basis && e.label.bit == bit)
            .map(|e| e.prob)
    }
}

/// The four equiprobable BB84 states.
pub fn bb84_ensemble() -> WeightedEnsemble {
    let items = Basis::ALL
        .iter()
        .flat_map(|&b| [0u8, 1].map(move |bit| (b, bit)))
        .map(|(basis, bit)| (0.25, signal_state(basis, bit), Label::new(basis, bit, "")))
        .collect();
    WeightedEnsemble::pure(items).expect("uniform BB84 ensemble is valid")
}

/// Binary side channel with real overlap `⟨0Δ|1Δ⟩ = delta`.
///
/// The states are embedded as `cos α|0⟩ ± sin α|1⟩` with `cos 2α = delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideChannelModel {
    delta: f64,
    alpha: f64,
}

impl SideChannelModel {
    pub fn new(delta: f64) -> Result<Self> {
        check_range("delta", delta, 0.0, 1.0, "[0, 1]")?;
        Ok(Self {
            delta,
            alpha: 0.5 * delta.acos(),
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn states(&self) -> (PureState, PureState) {
        let (s, co) = self.alpha.sin_cos();
        (
            PureState::qubit(real(co), real(s)).expect("unit vector"),
            PureState::qubit(real(co), real(-s)).expect("unit vector"),
        )
    }

    pub fn state(&self, index: usize) -> PureState {
        let (a, b) = self.states();
        if index == 0 {
            a
        } else {
            b
        }
    }
}

pub fn side_channel_states(delta: f64) -> Result<(PureState, PureState)> {
    Ok(SideChannelModel::new(delta)?.states())
}

/// Signal ⊗ side-channel product states, four equiprobable entries over dims [2, 2].
pub fn joint_ensemble(delta: f64) -> Result<WeightedEnsemble> {
    let side = SideChannelModel::new(delta)?;
    let items = Basis::ALL
        .iter()
        .flat_map(|&b| [0u8, 1].map(move |bit| (b, bit)))
        .map(|(basis, bit)| {
            let k = side_index(basis, bit);
            let joint = signal_state(basis, bit).tensor(&side.state(k));
            let tag = if k == 0 { "0Δ" } else { "1Δ" };
            (0.25, joint, Label::new(basis, bit, tag))
        })
        .collect();
    WeightedEnsemble::pure(items)
}

/// Signal ensemble conditioned on a side-channel readout whose correct-outcome
/// probability is `p_succ`.
///
/// Outcome r0 weights (|0x⟩, |1x⟩, |0y⟩, |1y⟩) as (q, 1−q, 1−q, q)/2 with
/// q = `p_succ`; r1 swaps q and 1−q.
pub fn reweighted_ensemble(outcome: SideOutcome, p_succ: f64) -> Result<WeightedEnsemble> {
    check_range("p_succ", p_succ, 0.5, 1.0, "[1/2, 1]")?;
    let items = Basis::ALL
        .iter()
        .flat_map(|&b| [0u8, 1].map(move |bit| (b, bit)))
        .map(|(basis, bit)| {
            let matches = side_index(basis, bit) == outcome.index();
            let w = if matches { p_succ } else { 1.0 - p_succ };
            (
                w / 2.0,
                signal_state(basis, bit),
                Label::new(basis, bit, outcome.label()),
            )
        })
        .collect();
    WeightedEnsemble::pure(items)
}
