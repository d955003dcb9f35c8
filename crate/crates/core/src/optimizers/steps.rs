use crate::problems::{alt_gda_step, sim_gda_step, JointIterate, MinimaxProblem};

pub fn step_sim_gda(problem: &dyn MinimaxProblem, w: &JointIterate, eta: f64) -> JointIterate {
    sim_gda_step(problem, w, eta)
}

pub fn step_alt_gda(problem: &dyn MinimaxProblem, w: &JointIterate, eta: f64) -> JointIterate {
    alt_gda_step(problem, w, eta)
}

/// `w_half = w - eta V(w)`, then `w - eta V(w_half)`.
pub fn step_eg(problem: &dyn MinimaxProblem, w: &JointIterate, eta: f64) -> JointIterate {
    step_eg_momentum(problem, w, None, eta, eta, 0.0)
}

/// `w - eta V(w_t) + (eta/2) V(w_{t-1})`; plain GDA when there is no history.
pub fn step_og(problem: &dyn MinimaxProblem, w: &JointIterate, prev_field: Option<&JointIterate>, eta: f64) -> JointIterate {
    let v = problem.grad_field(w);
    let mut next = w.as_vector() - v.as_vector() * eta;
    if let Some(prev) = prev_field {
        next.axpy(0.5 * eta, prev.as_vector(), 1.0);
    }
    JointIterate::from_stacked(next, w.nx())
}

/// Extragradient with separate extrapolation / update step sizes and a
/// heavy-ball term `beta (w_t - w_{t-1})` on the update.
pub fn step_eg_momentum(
    problem: &dyn MinimaxProblem,
    w: &JointIterate,
    w_prev: Option<&JointIterate>,
    eta_extrapolation: f64,
    eta_update: f64,
    beta: f64,
) -> JointIterate {
    let v = problem.grad_field(w);
    let half = JointIterate::from_stacked(w.as_vector() - v.as_vector() * eta_extrapolation, w.nx());
    let vh = problem.grad_field(&half);
    let mut next = w.as_vector() - vh.as_vector() * eta_update;
    if let (Some(prev), true) = (w_prev, beta != 0.0) {
        next += (w.as_vector() - prev.as_vector()) * beta;
    }
    JointIterate::from_stacked(next, w.nx())
}
