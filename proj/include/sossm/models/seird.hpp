#pragma once

#include <array>

#include "sossm/param_space.hpp"
#include "sossm/ssm_model.hpp"

namespace sossm {

/// One Euler step of the SEIRD flow; conserves the component sum exactly.
/// w = (s, e, i, r, d).
std::array<double, 5> seird_map(const std::array<double, 5>& w, double beta, double q, double eta,
                                double gamma, double mu);

/// Beta-Dirichlet SEIRD SSM. theta = (eta, gamma, mu, sigma_q, sigma_beta,
/// kappa, lambda1, lambda2); state = (S, E, I, R, D, q, beta), 7 slots, with
/// S = -1 marking a particle whose Dirichlet parameters left the simplex
/// (its observation density is -inf). Observations are pairs
/// (new-case fraction, new-death fraction), each Beta-distributed with means
/// eta*E and mu*I.
SsmModel make_seird_model();

/// (gamma, mu, sigma_q, sigma_beta) in [0, 0.5]^4, eta in [0, 1] (the
/// eta <= 1 - gamma feasibility is enforced through -inf densities),
/// (kappa, lambda1, lambda2) in [1e-7, 1e-4]^3.
ParameterSpace seird_space();

/// ER_t = beta_t S_t (1 + q_t eta / (gamma + mu)) / (gamma + eta).
double effective_reproduction(std::span<const double> theta, std::span<const double> state);

ObsSequence seird_simulate(std::span<const double> theta, long T, Rng& rng);

}  // namespace sossm
