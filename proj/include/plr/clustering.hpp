// Online mini-batch K-means with a soft lower bound on cluster sizes,
// enforced through per-cluster dual variables.
//
// Per mini-batch:
//   assignment   a(i) = argmax_k  q_i . c_k + rho_k         (ties: lowest k)
//   dual ascent  rho_k <- max{0, rho_k - lambda * (count_k/B - gamma/N)}
//   centroids    c_k   <- normalize( sum of assigned projections this epoch )
// Centroids are refreshed after every batch during warmup and only at epoch
// end afterwards; accumulators reset at each epoch boundary.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "plr/vecmath.hpp"

namespace plr {

enum class CentroidUpdateMode { kWarmup, kEpochUpdate };

struct Assignment {
    std::uint32_t sample_id = 0;  // position within the assigned batch
    std::uint32_t cluster = 0;
    double similarity = 0.0;  // raw q . c of the winning cluster (no dual term)
};

class ClusterState {
  public:
    // Centroids are K seed projections sampled without replacement under
    // rng_seed (exact duplicates in the pool are collapsed first). Duals and
    // accumulators start at zero, mode starts at Warmup.
    static ClusterState init_clusters(std::size_t k, double gamma,
                                      std::span<const UnitVector> seed_projections,
                                      std::uint64_t rng_seed);

    // Closed-form assignment for every sample in the batch. Read-only.
    std::vector<Assignment> assign_batch(std::span<const UnitVector> batch) const;

    // Dual ascent step over the batch. B is the actual batch size.
    void update_duals(std::span<const Assignment> batch_assignments, double gamma,
                      std::int64_t total_unlabeled, double lambda);

    // Extends the epoch accumulators; in Warmup mode also recomputes every
    // centroid that has received at least one sample this epoch.
    void accumulate_and_update_centroids(std::span<const UnitVector> batch,
                                         std::span<const Assignment> assignments);

    // Recomputes populated centroids from the epoch accumulators, resets the
    // accumulators, bumps the epoch counter, and leaves Warmup once
    // warmup_epochs_done is true. Empty clusters keep their centroid.
    void end_epoch(bool warmup_epochs_done);

    std::size_t cluster_count() const { return k_; }
    std::size_t dim() const { return d_; }
    double gamma() const { return gamma_; }
    CentroidUpdateMode mode() const { return mode_; }
    int epoch() const { return epoch_; }
    std::int64_t samples_seen() const { return m_seen_; }

    std::span<const double> centroid(std::size_t k) const;
    std::span<const double> duals() const { return duals_; }
    std::span<const std::int64_t> epoch_counts() const { return count_acc_; }

    // Snapshot schema: {k, d, gamma, centroids (row-major), duals, mode, epoch}.
    nlohmann::json snapshot() const;
    static ClusterState restore(const nlohmann::json& j);

  private:
    ClusterState() = default;
    void refresh_centroids_from_accumulators();

    std::size_t k_ = 0;
    std::size_t d_ = 0;
    double gamma_ = 0.0;
    std::vector<double> centroids_;      // k x d row-major, each row unit norm
    std::vector<double> duals_;          // k, >= 0
    std::vector<double> sum_acc_;        // k x d
    std::vector<std::int64_t> count_acc_;  // k
    std::int64_t m_seen_ = 0;
    CentroidUpdateMode mode_ = CentroidUpdateMode::kWarmup;
    int epoch_ = 0;
};

// Fixed-size set of independently seeded clustering heads over the same
// stream; all heads must share K and d.
class MultiHeadState {
  public:
    explicit MultiHeadState(std::vector<ClusterState> heads);

    std::size_t head_count() const { return heads_.size(); }
    ClusterState& head(std::size_t h) { return heads_.at(h); }
    const ClusterState& head(std::size_t h) const { return heads_.at(h); }

    std::vector<std::vector<Assignment>> assign_batch(
        std::span<const UnitVector> batch) const;
    void update_duals(const std::vector<std::vector<Assignment>>& per_head,
                      double gamma, std::int64_t total_unlabeled, double lambda);
    void accumulate_and_update_centroids(
        std::span<const UnitVector> batch,
        const std::vector<std::vector<Assignment>>& per_head);
    void end_epoch(bool warmup_epochs_done);

  private:
    std::vector<ClusterState> heads_;
};

}  // namespace plr
