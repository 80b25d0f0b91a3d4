// Per-sample memory banks and the per-cluster label table.
//
// For every unlabeled sample the banks keep exactly four scalars per head
// set: hard pseudo-label, reliability bit, cluster assignment and similarity
// score. Together with the K x C label table the engine state is
// 4*N*H + K*C scalar slots.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "plr/clustering.hpp"
#include "plr/vecmath.hpp"

namespace plr {

class SampleBanks {
  public:
    SampleBanks(std::size_t sample_count, std::size_t head_count);

    // Epoch used for stamping subsequent record_prediction calls.
    void begin_epoch(int epoch) { current_epoch_ = epoch; }
    int current_epoch() const { return current_epoch_; }

    // hard_label[i] = argmax(refined) (lowest index on ties),
    // reliable[i] = max(refined) >= tau.
    void record_prediction(std::size_t i, const ProbDist& refined, double tau);

    // Stores (cluster, similarity) for sample i under the given head.
    void record_assignment(std::size_t i, std::size_t head, const Assignment& a);

    std::size_t sample_count() const { return n_; }
    std::size_t head_count() const { return h_; }

    std::int32_t hard_label(std::size_t i) const;   // -1 if never recorded
    bool reliable(std::size_t i) const;
    std::int32_t epoch_stamp(std::size_t i) const;  // -1 if never recorded
    std::int32_t cluster_of(std::size_t i, std::size_t head) const;  // -1 if none
    double sim_score(std::size_t i, std::size_t head) const;

    // 4 scalar slots per sample per head.
    std::int64_t scalar_slots() const { return 4 * static_cast<std::int64_t>(n_) * static_cast<std::int64_t>(h_); }

    // Columnar dump: sample_id,hard_label,reliable,epoch_stamp,
    // then cluster_h<h>,sim_h<h> per head.
    void dump_csv(std::ostream& out) const;
    static SampleBanks load_csv(std::istream& in);

  private:
    void check_index(std::size_t i, std::size_t head) const;

    std::size_t n_ = 0;
    std::size_t h_ = 1;
    int current_epoch_ = 0;
    std::vector<std::int32_t> hard_label_;
    std::vector<std::uint8_t> reliable_;
    std::vector<std::int32_t> epoch_stamp_;
    std::vector<std::int32_t> cluster_of_;  // n x h
    std::vector<double> sim_score_;         // n x h
};

// K x C matrix of per-cluster class distributions. Rows of clusters that
// received no members are uniform placeholders flagged invalid.
class ClusterLabelTable {
  public:
    ClusterLabelTable() = default;
    ClusterLabelTable(std::size_t k, std::size_t c);

    std::size_t cluster_count() const { return k_; }
    std::size_t class_count() const { return c_; }
    std::span<const double> row(std::size_t k) const;
    bool valid(std::size_t k) const { return valid_.at(k) != 0; }

    void set_row(std::size_t k, std::span<const double> z, bool valid);

    void dump_csv(std::ostream& out) const;

  private:
    std::size_t k_ = 0;
    std::size_t c_ = 0;
    std::vector<double> z_;
    std::vector<std::uint8_t> valid_;
};

// Similarity-weighted class distribution per cluster from the banks'
// current-epoch records. Weights are max(sim, sim_floor) so that negative
// cosines cannot produce negative masses.
ClusterLabelTable build_cluster_labels(const SampleBanks& banks, std::size_t head,
                                       std::size_t k, std::size_t c,
                                       double sim_floor = 1e-6);

// Total scalar slots held: 4*N*H + K*C.
std::int64_t footprint(const SampleBanks& banks, const ClusterLabelTable& table);

}  // namespace plr
