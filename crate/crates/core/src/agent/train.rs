//! One gradient step for each of the four trained networks.

use ndarray::{concatenate, s, Array1, Array2, ArrayView2, Axis};

use crate::nn::{grad_inverse, Gradients, Mlp, Mode, NnError};

/// Minibatch diagnostics measured before the update.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport {
    /// Mean squared error summed over outputs.
    pub loss: f64,
    /// Mean over rows of `|prediction - target|_2 / |target|_2`.
    pub normalized_error: f64,
}

fn report(out: &Array2<f64>, targets: ArrayView2<f64>) -> StepReport {
    let n = out.nrows() as f64;
    let diff = out - &targets;
    let loss = diff.mapv(|d| d * d).sum() / n;
    let normalized_error = diff
        .rows()
        .into_iter()
        .zip(targets.rows())
        .map(|(d, t)| {
            let num = d.dot(&d).sqrt();
            let den = t.dot(&t).sqrt();
            if den > 0.0 {
                num / den
            } else {
                num
            }
        })
        .sum::<f64>()
        / n;
    StepReport {
        loss,
        normalized_error,
    }
}

/// Gradients of `(1/N) sum |net(x_i) - y_i|^2` in train mode.
pub fn mse_gradients(
    net: &mut Mlp,
    inputs: ArrayView2<f64>,
    targets: ArrayView2<f64>,
) -> Result<(Gradients, StepReport), NnError> {
    let (out, cache) = net.forward(inputs, Mode::Train)?;
    if out.dim() != targets.dim() {
        return Err(NnError::ShapeMismatch(format!(
            "targets {:?} vs outputs {:?}",
            targets.dim(),
            out.dim()
        )));
    }
    let rep = report(&out, targets);
    let upstream = (&out - &targets) * (2.0 / out.nrows() as f64);
    let (grads, _) = net.backward(&cache, upstream.view())?;
    Ok((grads, rep))
}

/// One descent step on a mean-squared-error regression.
pub fn mse_step(
    net: &mut Mlp,
    inputs: ArrayView2<f64>,
    targets: ArrayView2<f64>,
    lr: f64,
) -> Result<StepReport, NnError> {
    let (grads, rep) = mse_gradients(net, inputs, targets)?;
    net.sgd_step(&grads, lr)?;
    Ok(rep)
}

/// Arrival predictor step: scaled histories in, scaled next arrivals as targets.
pub fn train_arp(
    arp: &mut Mlp,
    histories: ArrayView2<f64>,
    arrivals: ArrayView2<f64>,
    lr: f64,
) -> Result<StepReport, NnError> {
    mse_step(arp, histories, arrivals, lr)
}

/// Cost estimator step: `(arrivals, previous modes, modes)` rows against
/// observed costs already divided by the head scale.
pub fn train_cen(
    cen: &mut Mlp,
    inputs: ArrayView2<f64>,
    costs: ArrayView2<f64>,
    lr: f64,
) -> Result<StepReport, NnError> {
    mse_step(cen, inputs, costs, lr)
}

/// `y_i = c_i + gamma * Q^T(s'_i, pi^T(s'_i))`, both target networks in eval
/// mode.
pub fn critic_target(
    actor_target: &Mlp,
    critic_target: &Mlp,
    next_states: ArrayView2<f64>,
    costs: &[f64],
    gamma: f64,
) -> Result<Array1<f64>, NnError> {
    let actions = actor_target.predict(next_states)?;
    let inputs = concatenate![Axis(1), next_states, actions];
    let q = critic_target.predict(inputs.view())?;
    Ok(Array1::from_iter(
        costs.iter().zip(q.column(0)).map(|(&c, &q)| c + gamma * q),
    ))
}

/// Critic step on `(state, action)` rows towards the targets `y`.
pub fn train_critic(
    critic: &mut Mlp,
    inputs: ArrayView2<f64>,
    targets: &Array1<f64>,
    lr: f64,
) -> Result<StepReport, NnError> {
    let y = targets.view().insert_axis(Axis(1));
    mse_step(critic, inputs, y, lr)
}

/// Actor parameter gradients given a map from the batch of actions to
/// `d loss / d action`.
pub fn actor_gradients_with(
    actor: &mut Mlp,
    states: ArrayView2<f64>,
    action_grad: impl FnOnce(&Array2<f64>) -> Result<Array2<f64>, NnError>,
) -> Result<Gradients, NnError> {
    let (actions, cache) = actor.forward(states, Mode::Train)?;
    let upstream = action_grad(&actions)?;
    let (grads, _) = actor.backward(&cache, upstream.view())?;
    Ok(grads)
}

/// Gradients of the mean critic value `(1/N) sum Q(s_i, pi(s_i))` with
/// respect to the actor, the critic evaluated in eval mode. With `inverse`
/// the action gradient is damped near the `[0, 1]` bounds first. Also
/// returns the mean Q.
pub fn actor_gradients(
    actor: &mut Mlp,
    critic: &Mlp,
    states: ArrayView2<f64>,
    inverse: bool,
) -> Result<(Gradients, f64), NnError> {
    let mut mean_q = 0.0;
    let grads = actor_gradients_with(actor, states, |actions| {
        let inputs = concatenate![Axis(1), states, *actions];
        let (q, cache) = critic.forward_eval(inputs.view())?;
        mean_q = q.mean().unwrap_or(0.0);
        let n = q.nrows();
        let upstream = Array2::from_elem((n, 1), 1.0 / n as f64);
        let (_, dinput) = critic.backward(&cache, upstream.view())?;
        let mut da = dinput.slice(s![.., states.ncols()..]).to_owned();
        if inverse {
            for (mut g, a) in da.rows_mut().into_iter().zip(actions.rows()) {
                let damped = grad_inverse(g.as_slice().unwrap(), a.as_slice().unwrap(), 0.0, 1.0);
                g.assign(&Array1::from(damped));
            }
        }
        Ok(da)
    })?;
    Ok((grads, mean_q))
}

/// Actor step towards lower critic values with gradient inversion. Returns
/// the mean Q of the batch before the step.
pub fn train_actor(
    actor: &mut Mlp,
    critic: &Mlp,
    states: ArrayView2<f64>,
    lr: f64,
) -> Result<f64, NnError> {
    let (grads, mean_q) = actor_gradients(actor, critic, states, true)?;
    actor.sgd_step(&grads, lr)?;
    Ok(mean_q)
}
