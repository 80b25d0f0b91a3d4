// Forward values of the four training losses. No gradients; the simulator
// supplies model improvement exogenously.
#pragma once

#include <cstdint>
#include <span>

#include "plr/vecmath.hpp"

namespace plr {

struct LossWeights {
    double lambda_u = 1.0;
    double lambda_p = 1.0;
    double lambda_c = 1.0;
};

// mean_i eta_i * CE(p_hat_i, p_strong_i). Soft targets, no sharpening.
double unlabeled_loss(std::span<const ProbDist> p_hat,
                      std::span<const ProbDist> p_strong,
                      std::span<const std::uint8_t> eta);

// mean_i CE(y_i, p_x_i); y rows are one-hot.
double supervised_loss(std::span<const ProbDist> y, std::span<const ProbDist> p_x);

// mean_i (1 - eta_i) * CE(SM(q_weak_i, mult*t), SM(q_strong_i, t)), treating
// the d projection coordinates as soft class scores.
double self_supervised_loss(std::span<const UnitVector> q_weak,
                            std::span<const UnitVector> q_strong,
                            std::span<const std::uint8_t> eta, double temperature,
                            double target_temp_mult = 5.0);

// lx + lambda_u*lu + lambda_p*lp + lambda_c*lc
double total_loss(double lx, double lu, double lp, double lc, const LossWeights& w);

}  // namespace plr
