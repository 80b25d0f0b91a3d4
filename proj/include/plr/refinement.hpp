// Distribution alignment and co-training pseudo-label refinement.
#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "plr/banks.hpp"
#include "plr/vecmath.hpp"

namespace plr {

// Exponential moving average of classifier predictions, initialized uniform.
class RunningMarginal {
  public:
    explicit RunningMarginal(std::size_t class_count, double momentum = 0.99);

    const ProbDist& marginal() const { return p_bar_; }
    double momentum() const { return momentum_; }
    bool warm() const { return warm_; }

    // p_bar <- momentum * p_bar + (1 - momentum) * p
    void update(const ProbDist& p);

  private:
    ProbDist p_bar_;
    double momentum_;
    bool warm_ = false;
};

struct RefinementConfig {
    double alpha = 0.8;  // mixing ratio: 1 keeps the aligned prediction
    double tau = 0.95;   // confidence threshold
    std::size_t heads = 1;
};

// Renormalized p / p_bar; afterwards folds p (the unaligned prediction) into
// the running marginal.
ProbDist distribution_align(const ProbDist& p, RunningMarginal& rm);

// Mean of the valid per-head cluster label rows for one sample; nullopt when
// no head has a usable row.
std::optional<ProbDist> mean_cluster_label(std::span<const ClusterLabelTable> tables,
                                           std::span<const std::int32_t> assignments);

// alpha * p_aligned + (1 - alpha) * mean of the valid per-head cluster label
// rows. With no valid row (first epoch, or every assigned cluster empty) the
// aligned prediction passes through unchanged.
ProbDist refine(const ProbDist& p_aligned, std::span<const ClusterLabelTable> tables,
                std::span<const std::int32_t> assignments, double alpha);

// 1 iff max(p_hat) >= tau (inclusive).
bool reliability(const ProbDist& p_hat, double tau);

}  // namespace plr
