// Class prototypes: normalized mean projection of the labeled plus reliable
// unlabeled samples of each class, accumulated over an epoch.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "plr/vecmath.hpp"

namespace plr {

class PrototypeSet {
  public:
    PrototypeSet(std::size_t class_count, std::size_t dim);

    void accumulate_labeled(const UnitVector& q, std::size_t y);
    // No-op unless eta is set.
    void accumulate_unlabeled(const UnitVector& q, std::size_t y_hat, bool eta);

    // Classes with members this epoch get normalize(mean); the rest keep
    // their previous prototype. Accumulators reset.
    void finalize_epoch();

    std::size_t class_count() const { return c_; }
    std::size_t dim() const { return d_; }
    bool initialized(std::size_t c) const { return initialized_.at(c) != 0; }
    bool all_initialized() const;
    std::span<const double> prototype(std::size_t c) const;
    std::span<const std::int64_t> epoch_counts() const { return count_acc_; }

    // Batch-mean of -log softmax(q . P_* / t)[y_hat]. Requires every
    // prototype initialized.
    double proto_loss(std::span<const UnitVector> q_strong,
                      std::span<const std::uint32_t> y_hat, double temperature) const;

    // C x d matrix, one row per class.
    void dump_csv(std::ostream& out) const;

  private:
    std::size_t c_ = 0;
    std::size_t d_ = 0;
    std::vector<double> protos_;            // c x d, rows unit norm once initialized
    std::vector<std::uint8_t> initialized_;
    std::vector<double> sum_acc_;           // c x d
    std::vector<std::int64_t> count_acc_;   // c
};

}  // namespace plr
