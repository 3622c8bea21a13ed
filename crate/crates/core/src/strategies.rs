//! End-to-end attack pipelines: side-channel readout, signal attack, and the
//! resulting states held by Bob and Eve for every input and branch.

use std::fmt;
use std::str::FromStr;

use crate::cloners::{pc_clone, two_state_isometry};
use crate::error::{Error, Result};
use crate::filtering::{SoftFilter, FAIL, SUCC};
use crate::linalg::{direct_sum, kron, CMatrix, CVector, DensityOperator, PureState};
use crate::measure::{helstrom_binary, me_side_channel_map, usd_binary};
use crate::model::{
    reweighted_ensemble, side_index, signal_state, Basis, Label, SideChannelModel, SideOutcome,
    WeightedEnsemble,
};
use crate::rates::holevo;

/// Branches lighter than this are dropped from a run.
const NEGLIGIBLE: f64 = 1e-15;

/// The three attacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    /// Minimum-error side-channel readout, then phase-covariant cloning.
    MePc,
    /// Minimum-error readout, soft filtering, two-state cloning, inverse filtering.
    MeFilterTsc,
    /// Unambiguous side-channel discrimination, phase-covariant cloning when inconclusive.
    UsdPc,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::MePc, Strategy::MeFilterTsc, Strategy::UsdPc];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::MePc => "me-pc",
            Strategy::MeFilterTsc => "me-filter-tsc",
            Strategy::UsdPc => "usd-pc",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::UnknownStrategy(s.to_string()))
    }
}

/// Which branches of a probabilistic attack count as attacked pulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FailureAccounting {
    /// Only all-success paths; the rest fall under the unattacked fraction.
    #[default]
    Postselect,
    /// Every path, failed filters included.
    Forward,
}

impl FailureAccounting {
    fn accepts(self, outcome: &AttackOutcome) -> bool {
        match self {
            FailureAccounting::Forward => true,
            FailureAccounting::Postselect => outcome.succeeded(),
        }
    }
}

/// One branch of one input state.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackOutcome {
    /// Classical record: side outcome, then filter flags where present.
    pub path: Vec<String>,
    /// Joint probability of the input and this branch.
    pub probability: f64,
    pub bob: DensityOperator,
    pub eve: DensityOperator,
    pub basis: Basis,
    pub bit: u8,
}

impl AttackOutcome {
    pub fn path_label(&self) -> String {
        self.path.join("/")
    }

    pub fn succeeded(&self) -> bool {
        !self.path.iter().any(|p| p == FAIL)
    }

    /// Probability that Bob, measuring in the right basis, reads the wrong bit.
    pub fn bob_flip_probability(&self) -> f64 {
        self.bob
            .expectation(&signal_state(self.basis, 1 - self.bit))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackRun {
    pub strategy: Strategy,
    pub outcomes: Vec<AttackOutcome>,
}

impl AttackRun {
    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }

    fn accepted(
        &self,
        basis: Basis,
        accounting: FailureAccounting,
    ) -> impl Iterator<Item = &AttackOutcome> + '_ {
        self.outcomes
            .iter()
            .filter(move |o| o.basis == basis && accounting.accepts(o))
    }

    /// Probability mass of the accepted branches within one basis, relative
    /// to that basis.
    pub fn accepted_fraction(&self, basis: Basis, accounting: FailureAccounting) -> f64 {
        let all: f64 = self
            .accepted(basis, FailureAccounting::Forward)
            .map(|o| o.probability)
            .sum();
        let acc: f64 = self
            .accepted(basis, accounting)
            .map(|o| o.probability)
            .sum();
        if all > 0.0 {
            acc / all
        } else {
            0.0
        }
    }

    /// Bob's error rate in `basis`, conditioned on the accepted branches.
    pub fn bob_error(&self, basis: Basis, accounting: FailureAccounting) -> f64 {
        let (mut mass, mut err) = (0.0, 0.0);
        for o in self.accepted(basis, accounting) {
            mass += o.probability;
            err += o.probability * o.bob_flip_probability();
        }
        if mass > 0.0 {
            err / mass
        } else {
            0.0
        }
    }

    /// Eve's memory for each value of Alice's bit in `basis`. The branch
    /// record is classical, so the memory is block diagonal over paths.
    pub fn eve_bit_ensemble(
        &self,
        basis: Basis,
        accounting: FailureAccounting,
    ) -> Result<WeightedEnsemble> {
        let accepted: Vec<&AttackOutcome> = self.accepted(basis, accounting).collect();
        let first = accepted.first().ok_or(Error::EmptyEnsemble)?;
        let d = first.eve.dim();
        let mut paths: Vec<String> = accepted.iter().map(|o| o.path_label()).collect();
        paths.sort();
        paths.dedup();

        let total: f64 = accepted.iter().map(|o| o.probability).sum();
        let mut items = Vec::with_capacity(2);
        for bit in 0..2u8 {
            let mut blocks = vec![CMatrix::zeros(d, d); paths.len()];
            let mut mass = 0.0;
            for o in accepted.iter().filter(|o| o.bit == bit) {
                if o.eve.dim() != d {
                    return Err(Error::DimensionMismatch(
                        "Eve memories differ in size".into(),
                    ));
                }
                let slot = paths
                    .binary_search(&o.path_label())
                    .expect("path was collected");
                blocks[slot] += o.eve.matrix().scale(o.probability);
                mass += o.probability;
            }
            if mass <= 0.0 {
                continue;
            }
            let rho =
                DensityOperator::from_unnormalized(direct_sum(&blocks), vec![d * paths.len()])?;
            items.push((mass / total, rho, Label::new(basis, bit, "eve")));
        }
        WeightedEnsemble::mixed(items)
    }

    /// Holevo information of Eve's memory about Alice's bit in `basis`.
    pub fn eve_holevo(&self, basis: Basis, accounting: FailureAccounting) -> Result<f64> {
        Ok(holevo(&self.eve_bit_ensemble(basis, accounting)?))
    }
}

fn inputs() -> impl Iterator<Item = (Basis, u8)> {
    Basis::ALL
        .into_iter()
        .flat_map(|b| [0u8, 1].map(move |bit| (b, bit)))
}

fn blank(dims: Vec<usize>) -> DensityOperator {
    let n: usize = dims.iter().product();
    PureState::basis(n, 0)
        .projector()
        .with_dims(dims)
        .expect("dims multiply to the vector length")
}

fn pc_outcome(
    path: Vec<String>,
    probability: f64,
    eta: f64,
    basis: Basis,
    bit: u8,
) -> Result<AttackOutcome> {
    let rho = pc_clone(eta, &signal_state(basis, bit))?.projector();
    Ok(AttackOutcome {
        path,
        probability,
        bob: rho.partial_trace(&[0])?,
        eve: rho.partial_trace(&[1, 2])?,
        basis,
        bit,
    })
}

/// Minimum-error readout of the side channel (outcome kept as a classical
/// label, signal untouched), then phase-covariant cloning of every pulse.
pub fn run_strategy1(delta: f64, eta: f64) -> Result<AttackRun> {
    let model = SideChannelModel::new(delta)?;
    let readout = me_side_channel_map(delta)?;
    let mut outcomes = Vec::with_capacity(8);
    for (basis, bit) in inputs() {
        let side = model.state(side_index(basis, bit));
        for r in SideOutcome::ALL {
            let pr = (readout.branch(r.label())? * side.amplitudes()).norm_squared();
            if pr < NEGLIGIBLE {
                continue;
            }
            outcomes.push(pc_outcome(
                vec![r.label().into()],
                0.25 * pr,
                eta,
                basis,
                bit,
            )?);
        }
    }
    Ok(AttackRun {
        strategy: Strategy::MePc,
        outcomes,
    })
}

/// Per-outcome machinery of the filtering attack.
struct FilterStage {
    filter: SoftFilter,
    cloner: CMatrix,
}

fn filter_stage(outcome: SideOutcome, p_succ: f64, p_filter: f64) -> Result<FilterStage> {
    let ensemble = reweighted_ensemble(outcome, p_succ)?;
    let filter = SoftFilter::new(&ensemble, p_filter)?;
    let fs = filter.forward_success();
    let mut pair = inputs()
        .filter(|&(b, bit)| side_index(b, bit) == outcome.index())
        .map(|(b, bit)| -> Result<PureState> {
            PureState::normalized(fs * signal_state(b, bit).amplitudes(), vec![2])
        });
    let first = pair.next().expect("two states per outcome")?;
    let second = pair.next().expect("two states per outcome")?;
    let cloner = match two_state_isometry(&first, &second) {
        Ok((_, iso)) => iso,
        Err(Error::DegeneratePair(_)) => {
            let keep = CVector::from_vec(vec![crate::linalg::real(1.0), crate::linalg::real(0.0)]);
            kron(&crate::linalg::identity(2), &CMatrix::from_columns(&[keep]))
        }
        Err(e) => return Err(e),
    };
    Ok(FilterStage { filter, cloner })
}

/// Minimum-error readout, soft filter tuned on the reweighted ensemble,
/// two-state cloner tuned on the filtered high-probability pair, inverse
/// filter on both copies. Bob receives the first copy.
///
/// On forward-filter failure the failed state is passed on and Eve keeps a
/// blank qubit.
pub fn run_strategy2(delta: f64, p_filter: f64) -> Result<AttackRun> {
    let model = SideChannelModel::new(delta)?;
    let p_succ = helstrom_binary(delta, 0.5)?.p_succ;
    let readout = me_side_channel_map(delta)?;
    let stages = [
        filter_stage(SideOutcome::R0, p_succ, p_filter)?,
        filter_stage(SideOutcome::R1, p_succ, p_filter)?,
    ];

    let mut outcomes = Vec::with_capacity(40);
    for (basis, bit) in inputs() {
        let psi = signal_state(basis, bit);
        let side = model.state(side_index(basis, bit));
        for r in SideOutcome::ALL {
            let pr = (readout.branch(r.label())? * side.amplitudes()).norm_squared();
            if pr < NEGLIGIBLE {
                continue;
            }
            let stage = &stages[r.index()];
            let f = &stage.filter;

            let cloned = &stage.cloner * (f.forward_success() * psi.amplitudes());
            let backs = [(SUCC, f.backward_success()), (FAIL, f.backward_failure())];
            for (bob_flag, bob_op) in backs {
                for (eve_flag, eve_op) in backs {
                    let out = kron(bob_op, eve_op) * &cloned;
                    let w = out.norm_squared();
                    if 0.25 * pr * w < NEGLIGIBLE {
                        continue;
                    }
                    let rho = PureState::normalized(out, vec![2, 2])?.projector();
                    outcomes.push(AttackOutcome {
                        path: vec![
                            r.label().into(),
                            SUCC.into(),
                            bob_flag.into(),
                            eve_flag.into(),
                        ],
                        probability: 0.25 * pr * w,
                        bob: rho.partial_trace(&[0])?,
                        eve: rho.partial_trace(&[1])?,
                        basis,
                        bit,
                    });
                }
            }

            let failed = f.forward_failure() * psi.amplitudes();
            let w = failed.norm_squared();
            if 0.25 * pr * w >= NEGLIGIBLE {
                outcomes.push(AttackOutcome {
                    path: vec![r.label().into(), FAIL.into()],
                    probability: 0.25 * pr * w,
                    bob: PureState::normalized(failed, vec![2])?.projector(),
                    eve: blank(vec![2]),
                    basis,
                    bit,
                });
            }
        }
    }
    Ok(AttackRun {
        strategy: Strategy::MeFilterTsc,
        outcomes,
    })
}

/// Unambiguous readout of the side channel. Conclusive pulses pass
/// untouched and Eve keeps only the classical label; inconclusive pulses get
/// the phase-covariant cloner.
pub fn run_strategy3(delta: f64, eta: f64) -> Result<AttackRun> {
    let model = SideChannelModel::new(delta)?;
    let usd = usd_binary(delta, 0.5)?;
    let mut outcomes = Vec::with_capacity(12);
    for (basis, bit) in inputs() {
        let side = model.state(side_index(basis, bit));
        for element in usd.povm.elements() {
            let pr = usd.povm.probability(&element.label, &side)?;
            if pr < NEGLIGIBLE {
                continue;
            }
            let path = vec![element.label.clone()];
            if element.label == "inc" {
                outcomes.push(pc_outcome(path, 0.25 * pr, eta, basis, bit)?);
            } else {
                outcomes.push(AttackOutcome {
                    path,
                    probability: 0.25 * pr,
                    bob: signal_state(basis, bit).projector(),
                    eve: blank(vec![2, 2]),
                    basis,
                    bit,
                });
            }
        }
    }
    Ok(AttackRun {
        strategy: Strategy::UsdPc,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cloners::pc_bob_error;
    use crate::linalg::max_abs_diff;

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
        }
        assert!("intercept-resend".parse::<Strategy>().is_err());
    }

    #[test]
    fn strategy1_without_cloning() {
        let run = run_strategy1(0.4, 0.0).unwrap();
        assert!((run.total_probability() - 1.0).abs() < 1e-12);
        assert!(run.bob_error(Basis::X, FailureAccounting::Forward) < 1e-12);
        // bit information comes only from the side outcome
        let p = helstrom_binary(0.4, 0.5).unwrap().p_succ;
        let chi = run
            .eve_holevo(Basis::X, FailureAccounting::Forward)
            .unwrap();
        let h = |q: f64| -q * q.log2() - (1.0 - q) * (1.0 - q).log2();
        assert!((chi - (1.0 - h(p))).abs() < 1e-10);
    }

    #[test]
    fn strategy1_branch_weights_follow_helstrom() {
        let run = run_strategy1(0.6, 0.3).unwrap();
        for o in &run.outcomes {
            let matches = o.path[0] == "r0" && side_index(o.basis, o.bit) == 0
                || o.path[0] == "r1" && side_index(o.basis, o.bit) == 1;
            let expect = if matches { 0.9 } else { 0.1 };
            assert!((o.probability - 0.25 * expect).abs() < 1e-12);
        }
        let blind = run_strategy1(1.0, 0.3).unwrap();
        for o in &blind.outcomes {
            assert!((o.probability - 0.125).abs() < 1e-12);
        }
    }

    #[test]
    fn strategy2_completeness_and_branch_count() {
        let run = run_strategy2(0.5, 0.7).unwrap();
        assert!((run.total_probability() - 1.0).abs() < 1e-9);
        assert!(run.outcomes.len() <= 40);
        for o in &run.outcomes {
            assert!((o.bob.trace() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn strategy2_orthogonal_side_channel() {
        let run = run_strategy2(0.0, 0.0).unwrap();
        // only the matching side outcome ever occurs
        assert!(run
            .outcomes
            .iter()
            .all(|o| o.path[0] == SideOutcome::ALL[side_index(o.basis, o.bit)].label()));
        let chi = run
            .eve_holevo(Basis::X, FailureAccounting::Postselect)
            .unwrap();
        assert!((chi - 1.0).abs() < 1e-9);
    }

    #[test]
    fn strategy2_blind_side_channel_is_inert_filtering() {
        let a = run_strategy2(1.0, 0.0).unwrap();
        let b = run_strategy2(1.0, 0.8).unwrap();
        let ea = a.bob_error(Basis::X, FailureAccounting::Postselect);
        let eb = b.bob_error(Basis::X, FailureAccounting::Postselect);
        assert!((ea - eb).abs() < 1e-10);
        assert!((a.accepted_fraction(Basis::X, FailureAccounting::Postselect) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn strategy3_weights_bob_error_by_inconclusive_rate() {
        let run = run_strategy3(0.5, 0.4).unwrap();
        assert!((run.total_probability() - 1.0).abs() < 1e-12);
        let err = run.bob_error(Basis::Y, FailureAccounting::Forward);
        assert!((err - 0.5 * pc_bob_error(0.4)).abs() < 1e-10);
    }

    #[test]
    fn strategy3_endpoints() {
        let run = run_strategy3(0.0, 0.9).unwrap();
        assert!(run.bob_error(Basis::X, FailureAccounting::Forward) < 1e-12);
        let chi = run
            .eve_holevo(Basis::X, FailureAccounting::Forward)
            .unwrap();
        assert!((chi - 1.0).abs() < 1e-10);

        let blind = run_strategy3(1.0, 0.9).unwrap();
        let pc = run_strategy1(1.0, 0.9).unwrap();
        let e3 = blind.bob_error(Basis::X, FailureAccounting::Forward);
        let e1 = pc.bob_error(Basis::X, FailureAccounting::Forward);
        assert!((e3 - e1).abs() < 1e-12);
    }

    #[test]
    fn basis_symmetry() {
        for run in [
            run_strategy1(0.3, 0.6).unwrap(),
            run_strategy2(0.3, 0.6).unwrap(),
            run_strategy3(0.3, 0.6).unwrap(),
        ] {
            for acc in [FailureAccounting::Forward, FailureAccounting::Postselect] {
                let ex = run.bob_error(Basis::X, acc);
                let ey = run.bob_error(Basis::Y, acc);
                assert!((ex - ey).abs() < 1e-8, "{:?} {ex} {ey}", run.strategy);
                let cx = run.eve_holevo(Basis::X, acc).unwrap();
                let cy = run.eve_holevo(Basis::Y, acc).unwrap();
                assert!((cx - cy).abs() < 1e-8, "{:?} {cx} {cy}", run.strategy);
            }
        }
    }

    #[test]
    fn blank_memory_has_requested_dims() {
        let b = blank(vec![2, 2]);
        assert_eq!(b.dims(), &[2, 2]);
        let mut expect = CMatrix::zeros(4, 4);
        expect[(0, 0)] = crate::linalg::real(1.0);
        assert!(max_abs_diff(b.matrix(), &expect) < 1e-15);
    }
}
