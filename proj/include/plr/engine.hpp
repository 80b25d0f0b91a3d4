// Epoch driver.
//
// Per unlabeled batch: align + refine the prediction against the
// previous-epoch cluster labels, gate by confidence, record banks, feed
// prototypes, then cluster the weak projections (assign -> dual update ->
// centroid accumulation). At epoch end: finalize prototypes, rebuild the
// cluster label tables, swap them in for the next epoch, close the
// clustering epoch.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "plr/banks.hpp"
#include "plr/clustering.hpp"
#include "plr/losses.hpp"
#include "plr/prototypes.hpp"
#include "plr/refinement.hpp"
#include "plr/world.hpp"

namespace plr {

struct EngineConfig {
    std::size_t cluster_count = 0;  // K
    double gamma = 0.0;             // cluster size lower bound
    double lambda_dual = 20.0;
    double alpha = 0.8;
    double tau = 0.95;
    double temperature = 0.1;
    double target_temp_mult = 5.0;
    std::size_t heads = 1;
    int warmup_epochs = 20;
    double da_momentum = 0.99;
    LossWeights loss_weights;
    std::uint64_t rng_seed = 1;

    void validate(std::size_t n_unlabeled) const;
};

struct EpochReport {
    int epoch = 0;
    // Accuracy of the aligned classifier prediction, the head-averaged
    // cluster label, and the refined label against ground truth.
    double pl_acc_classifier = 0.0;
    double pl_acc_cluster = 0.0;
    double pl_acc_refined = 0.0;
    double disagreement_rate = 0.0;
    double retention_rate = 0.0;            // refined labels passing tau
    double retention_rate_unrefined = 0.0;  // aligned labels passing tau
    std::vector<double> cluster_purity_per_class;
    std::vector<std::uint8_t> purity_defined;
    std::int64_t min_cluster_size = 0;
    std::array<double, 4> loss_components{};  // x, u, p, c

    nlohmann::ordered_json to_json() const;
    static void write_csv_header(std::ostream& out);
    void append_csv(std::ostream& out) const;
};

// Per-class average purity of the clusters each class dominates;
// classes that dominate no cluster report 0 with defined = 0.
struct PurityReport {
    std::vector<double> per_class;
    std::vector<std::uint8_t> defined;
};
PurityReport purity_report(const SampleBanks& banks,
                           std::span<const std::uint32_t> ground_truth,
                           std::size_t head, std::size_t cluster_count,
                           std::size_t class_count);

class Engine {
  public:
    Engine(EngineConfig cfg, std::size_t n_unlabeled, std::size_t class_count,
           std::size_t dim);

    EpochReport run_epoch(EpochStream& stream);

    const EngineConfig& config() const { return cfg_; }
    int epochs_run() const { return epochs_run_; }
    const SampleBanks& banks() const { return banks_; }
    const PrototypeSet& prototypes() const { return protos_; }
    const RunningMarginal& marginal() const { return marginal_; }
    // Null until enough projections arrived to seed the centroids.
    const MultiHeadState* clusters() const { return clusters_ ? &*clusters_ : nullptr; }
    // Previous-epoch tables (one per head); empty before the first epoch ends.
    std::span<const ClusterLabelTable> tables() const { return prev_tables_; }

  private:
    void cluster_step(std::vector<std::uint32_t> ids, std::vector<UnitVector> q);
    void run_cluster_batch(std::span<const std::uint32_t> ids,
                           std::span<const UnitVector> q);

    EngineConfig cfg_;
    std::size_t n_;
    std::size_t c_;
    std::size_t d_;
    SampleBanks banks_;
    PrototypeSet protos_;
    RunningMarginal marginal_;
    std::optional<MultiHeadState> clusters_;
    std::vector<ClusterLabelTable> prev_tables_;
    int epochs_run_ = 0;

    // Batches buffered until the centroid seed pool is large enough.
    std::vector<UnitVector> seed_pool_;
    std::vector<std::vector<std::uint32_t>> pending_ids_;
    std::vector<std::vector<UnitVector>> pending_q_;
};

}  // namespace plr
