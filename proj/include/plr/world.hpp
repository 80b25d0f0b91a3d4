// Synthetic world: class-conditional projections on the unit sphere plus a
// mock classifier whose accuracy follows class separation. Stands in for the
// encoder/projector/classifier so the refinement machinery can be driven and
// measured without any network training.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "plr/vecmath.hpp"

namespace plr {

struct WorldConfig {
    std::size_t unlabeled_count = 4000;  // N
    std::size_t labeled_count = 40;      // M, >= C with every class covered
    std::size_t class_count = 10;        // C
    std::size_t dim = 32;                // d
    double class_sep = 1.5;              // initial angular separation control
    double sep_growth = 0.1;             // per-epoch increase (representation learning)
    double view_noise = 0.35;            // weak/strong perturbation scale
    std::vector<double> classifier_bias; // per-class overconfidence multipliers; empty = 1
    double label_noise = 0.0;            // fraction of predictions with scrambled class
    double imbalance = 1.0;              // max/min class ratio
    std::uint64_t rng_seed = 1;

    void validate() const;  // throws InvalidConfigError naming the field

    // The world used by the refinement-gain analysis: C=10 with a 2x
    // overconfidence bias on class 0 and 10% label noise.
    static WorldConfig biased_preset();
};

struct LabeledSample {
    std::uint32_t cls = 0;
    UnitVector q_weak;
    ProbDist p_x;
};

struct UnlabeledSample {
    std::uint32_t id = 0;
    std::uint32_t truth = 0;
    UnitVector q_weak;
    UnitVector q_strong;
    ProbDist p_weak;
    ProbDist p_strong;
};

struct Batch {
    std::vector<LabeledSample> labeled;
    std::vector<UnlabeledSample> unlabeled;
};

class World;

// One epoch of batches: batch_labeled labeled + up to mu*batch_labeled
// unlabeled per step, unlabeled order reshuffled per epoch, labeled samples
// cycled. Deterministic under (world seed, epoch).
class EpochStream {
  public:
    std::optional<Batch> next();

    int epoch() const { return epoch_; }
    std::size_t total_unlabeled() const;
    std::size_t batch_labeled() const { return b_; }
    std::size_t mu() const { return mu_; }

  private:
    friend class World;
    EpochStream(const World* world, int epoch, std::size_t b, std::size_t mu);

    const World* world_;
    int epoch_;
    std::size_t b_;
    std::size_t mu_;
    double sep_;
    std::mt19937_64 rng_;
    std::vector<std::uint32_t> order_;
    std::vector<std::uint32_t> labeled_order_;
    std::size_t pos_ = 0;
    std::size_t labeled_pos_ = 0;
};

class World {
  public:
    explicit World(WorldConfig cfg);

    const WorldConfig& config() const { return cfg_; }
    std::span<const std::uint32_t> ground_truth() const { return truth_; }
    std::span<const std::uint32_t> labeled_classes() const { return labeled_cls_; }
    double separation_at(int epoch) const;

    EpochStream epoch_stream(int epoch, std::size_t batch_labeled, std::size_t mu) const;

    // sample_id,true_class rows for external verification.
    void dump_ground_truth_csv(std::ostream& out) const;

  private:
    friend class EpochStream;

    void make_sample_views(std::uint32_t cls, double sep, std::mt19937_64& rng,
                           UnitVector& q_weak, UnitVector& q_strong) const;
    ProbDist mock_prediction(std::uint32_t truth, double sep, bool strong_view,
                             std::mt19937_64& rng) const;

    WorldConfig cfg_;
    std::vector<double> class_dirs_;       // C x d, rows unit norm
    std::vector<std::uint32_t> truth_;     // N
    std::vector<std::uint32_t> labeled_cls_;  // M
};

}  // namespace plr
