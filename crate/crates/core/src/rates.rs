//! Entropic quantities, key rates per attack, and the critical error rate.

use std::fmt;
use std::str::FromStr;

use crate::cloners::{pc_bob_error, pc_eta_for_error, pc_eve_ensemble};
use crate::error::{check_range, Error, Result};
use crate::hom::delta_from_visibility;
use crate::linalg::entropy_of;
use crate::measure::helstrom_binary;
use crate::model::{Basis, WeightedEnsemble};
use crate::optimize::{bisect_boundary, golden_section_min, linspace};
use crate::strategies::{run_strategy2, FailureAccounting, Strategy};

/// Which error rate enters `h₂` when only part of the pulses is attacked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RateConvention {
    /// `h₂` of the observed error; Eve's information at the per-attack error.
    #[default]
    PaperLiteral,
    /// Both terms at the per-attack error.
    Weighted,
}

impl RateConvention {
    pub fn name(self) -> &'static str {
        match self {
            RateConvention::PaperLiteral => "paper-literal",
            RateConvention::Weighted => "weighted",
        }
    }
}

impl fmt::Display for RateConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RateConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-literal" => Ok(RateConvention::PaperLiteral),
            "weighted" => Ok(RateConvention::Weighted),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RateOptions {
    pub convention: RateConvention,
    pub accounting: FailureAccounting,
}

/// Grid size and refinement tolerance of the filter-strength search.
pub const FILTER_GRID: usize = 21;
pub const FILTER_TOL: f64 = 1e-4;
const BOUNDARY_TOL: f64 = 1e-9;

fn h2(q: f64) -> f64 {
    if q <= 0.0 || q >= 1.0 {
        0.0
    } else {
        -q * q.log2() - (1.0 - q) * (1.0 - q).log2()
    }
}

/// Binary Shannon entropy in bits.
pub fn binary_entropy(q: f64) -> Result<f64> {
    check_range("q", q, 0.0, 1.0, "[0, 1]")?;
    Ok(h2(q))
}

/// `S(Σ pⱼρⱼ) − Σ pⱼS(ρⱼ)`.
pub fn holevo(ensemble: &WeightedEnsemble) -> f64 {
    let avg = ensemble.average();
    let mut chi = entropy_of(avg.matrix());
    for e in ensemble.entries() {
        chi -= e.prob * entropy_of(e.state.density().matrix());
    }
    chi.max(0.0)
}

/// Eve's information with side-channel success probability `p` against the
/// phase-covariant attack at error `q`: classical part `1 − h₂(p)` plus the
/// quantum part.
pub fn iae_strategy1(p: f64, q: f64) -> Result<f64> {
    check_range("p", p, 0.5, 1.0, "[1/2, 1]")?;
    check_range("Q", q, 0.0, 0.5, "[0, 1/2]")?;
    Ok(1.0 - h2(p) + iae_quantum(p, q))
}

fn iae_quantum(p: f64, q: f64) -> f64 {
    let inner = 1.0 - 4.0 * p * (1.0 - p) * (1.0 - (1.0 - 2.0 * q).powi(2));
    h2((1.0 - inner.max(0.0).sqrt()) / 2.0)
}

/// Key rate and Eve's information at one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyReport {
    pub strategy: Strategy,
    pub visibility: f64,
    pub delta: f64,
    /// Error rate Bob observes over all pulses.
    pub qber: f64,
    /// Secret bits per pulse; `-inf` when the attack cannot be realized.
    pub rate: f64,
    /// Holevo information of Eve's memory on the attacked pulses.
    pub chi: f64,
    /// Eve's total information per pulse.
    pub i_ae: f64,
    /// Filter strength; 0 for attacks without a filter.
    pub p_filter: f64,
    /// Cloner angle η for the phase-covariant attacks, attacked fraction for
    /// the filtering attack.
    pub attack_param: f64,
}

fn pc_chi(q_att: f64) -> Result<f64> {
    let eta = pc_eta_for_error(q_att)?;
    let chi = holevo(&pc_eve_ensemble(eta, Basis::X)?);
    debug_assert!(
        (chi - holevo(&pc_eve_ensemble(eta, Basis::Y)?)).abs() < 1e-8,
        "X/Y asymmetry in phase-covariant Holevo"
    );
    Ok(chi)
}

pub fn keyrate_strategy1(visibility: f64, qber: f64) -> Result<StrategyReport> {
    check_range("Q", qber, 0.0, 0.5, "[0, 1/2]")?;
    let delta = delta_from_visibility(visibility)?;
    let p = helstrom_binary(delta, 0.5)?.p_succ;
    let i_ae = iae_strategy1(p, qber)?;
    Ok(StrategyReport {
        strategy: Strategy::MePc,
        visibility,
        delta,
        qber,
        rate: 1.0 - h2(qber) - i_ae,
        chi: iae_quantum(p, qber),
        i_ae,
        p_filter: 0.0,
        attack_param: pc_eta_for_error(qber)?,
    })
}

/// Bob's error and Eve's information on the attacked pulses of the
/// filtering attack at one filter strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterAttack {
    pub p_filter: f64,
    pub q_att: f64,
    pub chi: f64,
    /// Share of pulses that count as attacked under the chosen accounting.
    pub yield_fraction: f64,
}

pub fn evaluate_strategy2(
    delta: f64,
    p_filter: f64,
    accounting: FailureAccounting,
) -> Result<FilterAttack> {
    let run = run_strategy2(delta, p_filter)?;
    let q_att = run.bob_error(Basis::X, accounting);
    let chi = run.eve_holevo(Basis::X, accounting)?;
    debug_assert!(
        (q_att - run.bob_error(Basis::Y, accounting)).abs() < 1e-8
            && (chi - run.eve_holevo(Basis::Y, accounting)?).abs() < 1e-8,
        "X/Y asymmetry in the filtering attack"
    );
    Ok(FilterAttack {
        p_filter,
        q_att,
        chi,
        yield_fraction: run.accepted_fraction(Basis::X, accounting),
    })
}

fn strategy2_rate(attack: &FilterAttack, p_attack: f64, convention: RateConvention) -> f64 {
    let q_obs = p_attack * attack.q_att;
    let q = match convention {
        RateConvention::PaperLiteral => q_obs,
        RateConvention::Weighted => attack.q_att,
    };
    (1.0 - p_attack) + p_attack * (1.0 - h2(q) - attack.chi)
}

pub fn keyrate_strategy2(
    visibility: f64,
    p_filter: f64,
    p_attack: f64,
    options: RateOptions,
) -> Result<StrategyReport> {
    check_range("P_attack", p_attack, 0.0, 1.0, "[0, 1]")?;
    let delta = delta_from_visibility(visibility)?;
    let attack = evaluate_strategy2(delta, p_filter, options.accounting)?;
    Ok(report2(
        visibility,
        delta,
        &attack,
        p_attack,
        options.convention,
    ))
}

fn report2(
    visibility: f64,
    delta: f64,
    attack: &FilterAttack,
    p_attack: f64,
    convention: RateConvention,
) -> StrategyReport {
    StrategyReport {
        strategy: Strategy::MeFilterTsc,
        visibility,
        delta,
        qber: p_attack * attack.q_att,
        rate: strategy2_rate(attack, p_attack, convention),
        chi: attack.chi,
        i_ae: p_attack * attack.chi,
        p_filter: attack.p_filter,
        attack_param: p_attack,
    }
}

/// Unambiguous readout attack at observed error `qber`. Only the
/// inconclusive fraction `Δ` is cloned, at error `qber/Δ`; if that exceeds
/// 1/2 the point is unreachable and the rate is `-inf`.
pub fn keyrate_strategy3(
    visibility: f64,
    qber: f64,
    convention: RateConvention,
) -> Result<StrategyReport> {
    check_range("Q", qber, 0.0, 0.5, "[0, 1/2]")?;
    let delta = delta_from_visibility(visibility)?;
    let mut report = StrategyReport {
        strategy: Strategy::UsdPc,
        visibility,
        delta,
        qber,
        rate: 0.0,
        chi: 0.0,
        i_ae: 1.0,
        p_filter: 0.0,
        attack_param: 0.0,
    };
    if delta == 0.0 {
        return Ok(report);
    }
    let q_att = qber / delta;
    if q_att > 0.5 {
        report.rate = f64::NEG_INFINITY;
        report.chi = 1.0;
        report.attack_param = std::f64::consts::FRAC_PI_2;
        return Ok(report);
    }
    let chi = pc_chi(q_att)?;
    let q = match convention {
        RateConvention::PaperLiteral => qber,
        RateConvention::Weighted => q_att,
    };
    report.rate = delta * (1.0 - h2(q) - chi);
    report.chi = chi;
    report.i_ae = (1.0 - delta) + delta * chi;
    report.attack_param = pc_eta_for_error(q_att)?;
    Ok(report)
}

/// Fully specified Eve parameters for a single rate evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateInputs {
    pub strategy: Strategy,
    pub visibility: f64,
    /// Cloner angle of the phase-covariant attacks.
    pub eta: f64,
    pub p_filter: f64,
    pub p_attack: f64,
    pub options: RateOptions,
}

impl RateInputs {
    pub fn evaluate(&self) -> Result<StrategyReport> {
        match self.strategy {
            Strategy::MePc => keyrate_strategy1(self.visibility, pc_bob_error(self.eta)),
            Strategy::MeFilterTsc => {
                keyrate_strategy2(self.visibility, self.p_filter, self.p_attack, self.options)
            }
            Strategy::UsdPc => {
                let delta = delta_from_visibility(self.visibility)?;
                let q = delta * pc_bob_error(self.eta);
                keyrate_strategy3(self.visibility, q, self.options.convention)
            }
        }
    }
}

/// The filtering attack at one visibility, with Eve's filter strength chosen
/// to minimize the key rate at a requested observed error.
pub struct FilterLandscape {
    visibility: f64,
    delta: f64,
    options: RateOptions,
    grid: Vec<FilterAttack>,
}

impl FilterLandscape {
    pub fn new(visibility: f64, options: RateOptions) -> Result<Self> {
        let delta = delta_from_visibility(visibility)?;
        let grid = linspace(0.0, 1.0, FILTER_GRID)
            .into_iter()
            .map(|p| evaluate_strategy2(delta, p, options.accounting))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            visibility,
            delta,
            options,
            grid,
        })
    }

    pub fn grid(&self) -> &[FilterAttack] {
        &self.grid
    }

    fn eval(&self, p: f64) -> FilterAttack {
        evaluate_strategy2(self.delta, p, self.options.accounting)
            .expect("filter strength stays inside [0, 1]")
    }

    /// Rate at observed error `qber`, or `None` if the attack cannot reach it.
    fn rate_at(&self, attack: &FilterAttack, qber: f64) -> Option<f64> {
        if qber == 0.0 {
            return Some(strategy2_rate(attack, 0.0, self.options.convention));
        }
        if attack.q_att < qber {
            return None;
        }
        Some(strategy2_rate(
            attack,
            qber / attack.q_att,
            self.options.convention,
        ))
    }

    /// Minimum key rate over the filter strength at observed error `qber`.
    pub fn optimize(&self, qber: f64) -> Option<StrategyReport> {
        let mut best: Option<(f64, FilterAttack)> = None;
        let consider = |attack: FilterAttack, best: &mut Option<(f64, FilterAttack)>| {
            if let Some(r) = self.rate_at(&attack, qber) {
                if best.as_ref().map_or(true, |(b, _)| r < *b) {
                    *best = Some((r, attack));
                }
            }
        };

        for a in &self.grid {
            consider(*a, &mut best);
        }

        let step = 1.0 / (FILTER_GRID - 1) as f64;
        if let Some((_, seed)) = best {
            let lo = (seed.p_filter - step).max(0.0);
            let hi = (seed.p_filter + step).min(1.0);
            let (p, _) = golden_section_min(
                |p| self.rate_at(&self.eval(p), qber).unwrap_or(f64::INFINITY),
                lo,
                hi,
                FILTER_TOL,
            );
            consider(self.eval(p), &mut best);
        }

        for pair in self.grid.windows(2) {
            let ok0 = pair[0].q_att >= qber;
            let ok1 = pair[1].q_att >= qber;
            if ok0 == ok1 {
                continue;
            }
            let (from, to) = if ok0 {
                (pair[0].p_filter, pair[1].p_filter)
            } else {
                (pair[1].p_filter, pair[0].p_filter)
            };
            let (edge, _) = bisect_boundary(|p| self.eval(p).q_att >= qber, from, to, BOUNDARY_TOL);
            consider(self.eval(edge), &mut best);
        }

        best.map(|(_, attack)| {
            let p_attack = if qber == 0.0 {
                0.0
            } else {
                qber / attack.q_att
            };
            report2(
                self.visibility,
                self.delta,
                &attack,
                p_attack,
                self.options.convention,
            )
        })
    }
}

/// Key rate at observed error `qber` with Eve's free parameters chosen
/// adversarially.
pub fn keyrate_at_qber(
    strategy: Strategy,
    visibility: f64,
    qber: f64,
    options: RateOptions,
) -> Result<StrategyReport> {
    check_range("Q", qber, 0.0, 0.5, "[0, 1/2]")?;
    let infeasible = || Error::Infeasible {
        strategy: strategy.name(),
        visibility,
        qber,
    };
    match strategy {
        Strategy::MePc => keyrate_strategy1(visibility, qber),
        Strategy::UsdPc => {
            let r = keyrate_strategy3(visibility, qber, options.convention)?;
            if r.rate == f64::NEG_INFINITY {
                Err(infeasible())
            } else {
                Ok(r)
            }
        }
        Strategy::MeFilterTsc => FilterLandscape::new(visibility, options)?
            .optimize(qber)
            .ok_or_else(infeasible),
    }
}

/// Largest observed error at which the key rate is still positive.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub strategy: Strategy,
    pub visibility: f64,
    pub delta: f64,
    pub critical_qber: f64,
    pub p_filter: f64,
    pub attack_param: f64,
}

/// Boundary of `{Q : R(Q) > 0}` on `[0, 1/2]` located by bisection to `tol`.
/// Returns 0 when the rate is never positive.
pub fn critical_qber(
    strategy: Strategy,
    visibility: f64,
    tol: f64,
    options: RateOptions,
) -> Result<CriticalPoint> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::OutOfRange {
            name: "tol",
            value: tol,
            range: "(0, inf)",
        });
    }
    let delta = delta_from_visibility(visibility)?;
    let landscape = match strategy {
        Strategy::MeFilterTsc => Some(FilterLandscape::new(visibility, options)?),
        _ => None,
    };
    let probe = |q: f64| -> Option<StrategyReport> {
        match strategy {
            Strategy::MePc => keyrate_strategy1(visibility, q).ok(),
            Strategy::UsdPc => keyrate_strategy3(visibility, q, options.convention).ok(),
            Strategy::MeFilterTsc => landscape.as_ref().and_then(|l| l.optimize(q)),
        }
    };
    let positive = |q: f64| probe(q).is_some_and(|r| r.rate > 0.0);

    let q = if !positive(0.0) {
        0.0
    } else if positive(0.5) {
        0.5
    } else {
        bisect_boundary(positive, 0.0, 0.5, tol).0
    };
    let at = probe(q);
    Ok(CriticalPoint {
        strategy,
        visibility,
        delta,
        critical_qber: q,
        p_filter: at.as_ref().map_or(0.0, |r| r.p_filter),
        attack_param: at.as_ref().map_or(0.0, |r| r.attack_param),
    })
}
