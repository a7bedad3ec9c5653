use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::env::ModeVector;
use crate::nn::{Mlp, NnError};

use super::State;

/// How proto-actions are turned into executed actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    /// Cost estimator with probability `min(eps, 1)`, otherwise the critic.
    Hybrid,
    CostOnly,
    CriticOnly,
    /// Execute the noisy proto-action as is.
    NoiseOnly,
}

impl Refinement {
    pub fn name(self) -> &'static str {
        match self {
            Refinement::Hybrid => "hybrid",
            Refinement::CostOnly => "cost_only",
            Refinement::CriticOnly => "critic_only",
            Refinement::NoiseOnly => "noise_only",
        }
    }
}

impl std::str::FromStr for Refinement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "hybrid" => Refinement::Hybrid,
            "cost_only" => Refinement::CostOnly,
            "critic_only" => Refinement::CriticOnly,
            "noise_only" => Refinement::NoiseOnly,
            other => return Err(format!("unknown refinement `{other}`")),
        })
    }
}

/// Which estimator picked the executed action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Cost,
    Critic,
    Unrefined,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Cost => "cost",
            Branch::Critic => "critic",
            Branch::Unrefined => "none",
        }
    }
}

/// Adds `N(0, sigma^2)` to every entry, clamps to `[0, 1]` and rounds with
/// ties going to "on". One normal draw is taken per entry even when
/// `sigma == 0`, so the random stream does not depend on the noise level.
pub fn proto_action<R: Rng + ?Sized>(continuous: &[f64], sigma: f64, rng: &mut R) -> ModeVector {
    let bits: Vec<bool> = continuous
        .iter()
        .map(|&v| {
            let z: f64 = rng.sample(StandardNormal);
            (v + sigma * z).clamp(0.0, 1.0) >= 0.5
        })
        .collect();
    ModeVector::from_bits(&bits)
}

/// Every mode vector within Hamming distance `d` of `center`: the center
/// first, then by increasing distance, flipped positions in lexicographic
/// order.
pub fn neighborhood(center: &ModeVector, d: usize) -> Vec<ModeVector> {
    let n = center.len();
    let mut out = vec![center.clone()];
    for dist in 1..=d.min(n) {
        let mut idx: Vec<usize> = (0..dist).collect();
        loop {
            let mut v = center.clone();
            for &i in &idx {
                v.flip(i);
            }
            out.push(v);
            // next combination
            let mut k = dist;
            while k > 0 && idx[k - 1] == n - dist + k - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for j in k..dist {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    out
}

/// Position of the smallest score; ties go to fewer active cells, then the
/// lower index. NaN scores lose to everything.
pub fn argmin_with_ties(candidates: &[ModeVector], scores: &[f64]) -> usize {
    assert_eq!(candidates.len(), scores.len());
    assert!(!candidates.is_empty());
    let key = |s: f64| if s.is_nan() { f64::INFINITY } else { s };
    let mut best = 0;
    for i in 1..candidates.len() {
        let (a, b) = (key(scores[i]), key(scores[best]));
        if a < b || (a == b && candidates[i].tie_key() < candidates[best].tie_key()) {
            best = i;
        }
    }
    best
}

/// One row per candidate: state features followed by the candidate bits.
pub fn candidate_inputs(state: &State, candidates: &[ModeVector], lambda_scale: f64) -> Array2<f64> {
    let features = state.features(lambda_scale);
    let width = features.len() + state.prev_modes.len();
    let mut data = Vec::with_capacity(candidates.len() * width);
    for c in candidates {
        data.extend_from_slice(&features);
        data.extend(c.iter().map(|on| if on { 1.0 } else { 0.0 }));
    }
    Array2::from_shape_vec((candidates.len(), width), data).expect("row width")
}

/// Eval-mode scores of every candidate under `net`.
pub fn score_candidates(
    net: &Mlp,
    state: &State,
    candidates: &[ModeVector],
    lambda_scale: f64,
) -> Result<Vec<f64>, NnError> {
    let inputs = candidate_inputs(state, candidates, lambda_scale);
    Ok(net.predict(inputs.view())?.column(0).to_vec())
}

/// Hybrid refinement over the Hamming ball of radius `d` around `proto`.
///
/// A uniform `r` is drawn (Hybrid only); the cost estimator ranks the ball when
/// `r <= eps`, the critic otherwise. The returned action minimizes the
/// chosen network's output, ties broken by [`argmin_with_ties`].
#[allow(clippy::too_many_arguments)]
pub fn refine_action<R: Rng + ?Sized>(
    proto: &ModeVector,
    state: &State,
    eps: f64,
    d: usize,
    mode: Refinement,
    cen: &Mlp,
    critic: &Mlp,
    lambda_scale: f64,
    rng: &mut R,
) -> Result<(ModeVector, Branch), NnError> {
    let branch = match mode {
        Refinement::NoiseOnly => return Ok((proto.clone(), Branch::Unrefined)),
        Refinement::CostOnly => Branch::Cost,
        Refinement::CriticOnly => Branch::Critic,
        Refinement::Hybrid => {
            let r: f64 = rng.random();
            if r <= eps {
                Branch::Cost
            } else {
                Branch::Critic
            }
        }
    };
    let candidates = neighborhood(proto, d);
    if candidates.len() == 1 {
        return Ok((proto.clone(), branch));
    }
    let net = if branch == Branch::Cost { cen } else { critic };
    let scores = score_candidates(net, state, &candidates, lambda_scale)?;
    let best = argmin_with_ties(&candidates, &scores);
    Ok((candidates[best].clone(), branch))
}
