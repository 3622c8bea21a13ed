//! Independent reference computations shared by the oracle and acceptance
//! targets. Nothing here calls the closed forms it is compared against.
#![allow(dead_code)]

use bb84sc::cloners::{pc_eta_for_error, pc_eve_ensemble, two_state_coefficients};
use bb84sc::linalg::{max_abs_diff, partial_trace_matrix, real, CMatrix, CVector};
use bb84sc::measure::{helstrom_binary, me_side_channel_map, usd_binary};
use bb84sc::model::{joint_ensemble, reweighted_ensemble, Basis, SideOutcome};
use bb84sc::rates::holevo;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn h2(q: f64) -> f64 {
    if q <= 0.0 || q >= 1.0 {
        return 0.0;
    }
    -(q * q.ln() + (1.0 - q) * (1.0 - q).ln()) / std::f64::consts::LN_2
}

/// Real side-channel pair with overlap `delta`, built from the half angle.
pub fn pair(delta: f64) -> ([f64; 2], [f64; 2]) {
    let half = delta.acos() / 2.0;
    ([half.cos(), half.sin()], [half.cos(), -half.sin()])
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Maximize `f` on `[lo, hi]` by repeated grid scans around the best point.
pub fn zoom_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let n = 400;
    let mut best = (lo, f(lo));
    for _ in 0..8 {
        let step = (hi - lo) / n as f64;
        for i in 0..=n {
            let x = lo + step * i as f64;
            let v = f(x);
            if v > best.1 {
                best = (x, v);
            }
        }
        lo = (best.0 - 2.0 * step).max(lo);
        hi = (best.0 + 2.0 * step).min(hi);
    }
    best
}

/// Best average success probability over projective measurements
/// `{|θ⟩⟨θ|, I − |θ⟩⟨θ|}` in the real plane of the pair.
pub fn brute_helstrom(delta: f64, prior0: f64) -> f64 {
    let (s0, s1) = pair(delta);
    let success = |t: f64| {
        let m = [t.cos(), t.sin()];
        prior0 * dot(m, s0).powi(2) + (1.0 - prior0) * (1.0 - dot(m, s1).powi(2))
    };
    zoom_max(success, 0.0, std::f64::consts::PI).1
}

fn psd_2x2(m: [[f64; 2]; 2]) -> bool {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    tr >= -1e-13 && det >= -1e-13
}

/// Smallest inconclusive probability over POVMs `{a|e0⟩⟨e0|, b|e1⟩⟨e1|, rest}`
/// with `e0 ⟂ |1Δ⟩`, `e1 ⟂ |0Δ⟩` and the rest positive.
pub fn brute_usd_pinc(delta: f64, prior0: f64) -> f64 {
    let (s0, s1) = pair(delta);
    let e0 = [-s1[1], s1[0]];
    let e1 = [-s0[1], s0[0]];
    let rest = |a: f64, b: f64| {
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { 1.0 } else { 0.0 };
                m[i][j] = id - a * e0[i] * e0[j] - b * e1[i] * e1[j];
            }
        }
        m
    };
    let max_b = |a: f64| {
        if !psd_2x2(rest(a, 0.0)) {
            return None;
        }
        let (mut ok, mut bad) = (0.0, 2.0);
        for _ in 0..200 {
            let mid = 0.5 * (ok + bad);
            if psd_2x2(rest(a, mid)) {
                ok = mid;
            } else {
                bad = mid;
            }
        }
        Some(ok)
    };
    let conclusive = |a: f64| match max_b(a) {
        Some(b) => prior0 * a * dot(e0, s0).powi(2) + (1.0 - prior0) * b * dot(e1, s1).powi(2),
        None => -1.0,
    };
    1.0 - zoom_max(conclusive, 0.0, 1.0).1.max(0.0)
}

pub struct DiscriminationReport {
    pub helstrom_dev: f64,
    pub usd_dev: f64,
    pub misidentification: f64,
}

/// Closed forms against the scans on 20 seeded random instances.
pub fn discrimination_oracle(seed: u64) -> DiscriminationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = DiscriminationReport {
        helstrom_dev: 0.0,
        usd_dev: 0.0,
        misidentification: 0.0,
    };
    for _ in 0..20 {
        let delta: f64 = rng.random_range(0.0..0.999);
        let prior0: f64 = rng.random_range(0.05..0.95);
        let me = helstrom_binary(delta, prior0).unwrap();
        report.helstrom_dev = report
            .helstrom_dev
            .max((me.p_succ - brute_helstrom(delta, prior0)).abs());
        let usd = usd_binary(delta, prior0).unwrap();
        report.usd_dev = report
            .usd_dev
            .max((usd.p_inc - brute_usd_pinc(delta, prior0)).abs());

        let (s0, s1) = pair(delta);
        let wrong = |label: &str, s: [f64; 2]| {
            let m = usd.povm.element(label).unwrap();
            let v = CVector::from_vec(vec![real(s[0]), real(s[1])]);
            (v.adjoint() * m * &v)[(0, 0)].re
        };
        report.misidentification = report
            .misidentification
            .max(wrong("id0", s1).abs())
            .max(wrong("id1", s0).abs());
    }
    report
}

/// Conditional signal ensembles from the readout channel applied to the
/// joint ensemble, against the reweighted ensembles. Returns the largest
/// deviation over weights and conditional signal states.
pub fn stinespring_oracle(delta: f64) -> f64 {
    let map = me_side_channel_map(delta).unwrap();
    let p_succ = helstrom_binary(delta, 0.5).unwrap().p_succ;
    let joint = joint_ensemble(delta).unwrap();
    let mut dev: f64 = 0.0;
    for r in SideOutcome::ALL {
        let k = map.branch(r.label()).unwrap();
        let lift = bb84sc::linalg::kron(&bb84sc::linalg::identity(2), k);
        let expect = reweighted_ensemble(r, p_succ).unwrap();

        let mut total = 0.0;
        let mut weights = Vec::new();
        let mut signal = CMatrix::zeros(2, 2);
        for e in joint.entries() {
            let psi = e.state.as_pure().unwrap().amplitudes();
            let out = &lift * psi;
            let rho = &out * out.adjoint();
            // signal ⊗ side; the branch operator has already read out the ancilla
            let reduced = partial_trace_matrix(&rho, &[2, 2], &[0]).unwrap();
            let w = e.prob * reduced.trace().re;
            signal += reduced.scale(e.prob);
            weights.push((e.label.clone(), w));
            total += w;
        }
        for (label, w) in &weights {
            let want = expect.prob_of(label.basis, label.bit).unwrap();
            dev = dev.max((w / total - want).abs());
        }
        dev = dev.max(max_abs_diff(
            &signal.unscale(total),
            expect.average().matrix(),
        ));
        dev = dev.max((total - 0.5).abs());
    }
    dev
}

/// Largest gap between the phase-covariant Eve Holevo and `h₂(q)`.
pub fn pc_holevo_oracle(errors: &[f64]) -> f64 {
    errors
        .iter()
        .map(|&q| {
            let eta = pc_eta_for_error(q).unwrap();
            let chi = holevo(&pc_eve_ensemble(eta, Basis::X).unwrap());
            (chi - h2(q)).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest violation of `a² + 2b² + c² = 1` on a grid of `x`.
pub fn two_state_identity_oracle(points: usize) -> f64 {
    let top = std::f64::consts::FRAC_PI_4 - 1e-3;
    (0..points)
        .map(|i| {
            let x = top * i as f64 / (points - 1) as f64;
            let k = two_state_coefficients(x).unwrap();
            (k.a * k.a + 2.0 * k.b * k.b + k.c * k.c - 1.0).abs()
        })
        .fold(0.0, f64::max)
}
