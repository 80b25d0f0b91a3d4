#include "plr/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "plr/kernels.hpp"

namespace plr {

ClusterState ClusterState::init_clusters(std::size_t k, double gamma,
                                         std::span<const UnitVector> seed_projections,
                                         std::uint64_t rng_seed) {
    if (k < 2) throw InvalidConfigError("cluster count K must be >= 2");
    if (gamma < 0.0) throw InvalidConfigError("gamma must be >= 0");

    // Collapse exact duplicates; selection is over distinct projections.
    std::vector<std::size_t> distinct;
    distinct.reserve(seed_projections.size());
    for (std::size_t i = 0; i < seed_projections.size(); ++i) {
        bool dup = false;
        for (std::size_t j : distinct) {
            if (seed_projections[i] == seed_projections[j]) {
                dup = true;
                break;
            }
        }
        if (!dup) distinct.push_back(i);
    }
    if (distinct.size() < k)
        throw TooFewSeedsError("need at least K distinct seed projections");

    std::mt19937_64 rng(rng_seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    std::sample(distinct.begin(), distinct.end(), std::back_inserter(chosen), k, rng);

    ClusterState s;
    s.k_ = k;
    s.d_ = seed_projections[chosen[0]].dim();
    s.gamma_ = gamma;
    s.centroids_.resize(k * s.d_);
    for (std::size_t c = 0; c < k; ++c) {
        const UnitVector& u = seed_projections[chosen[c]];
        if (u.dim() != s.d_)
            throw DimensionMismatchError("seed projections differ in dimension");
        std::copy(u.values().begin(), u.values().end(), s.centroids_.begin() + c * s.d_);
    }
    s.duals_.assign(k, 0.0);
    s.sum_acc_.assign(k * s.d_, 0.0);
    s.count_acc_.assign(k, 0);
    return s;
}

std::vector<Assignment> ClusterState::assign_batch(
    std::span<const UnitVector> batch) const {
    const auto& ops = kernels::active();
    std::vector<Assignment> out(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch[i].dim() != d_)
            throw DimensionMismatchError("assign_batch: sample dimension mismatch");
        double sim = 0.0;
        const std::size_t k = ops.best_scored_row(batch[i].data(), centroids_.data(),
                                                  duals_.data(), k_, d_, &sim);
        out[i] = Assignment{static_cast<std::uint32_t>(i),
                            static_cast<std::uint32_t>(k), sim};
    }
    return out;
}

void ClusterState::update_duals(std::span<const Assignment> batch_assignments,
                                double gamma, std::int64_t total_unlabeled,
                                double lambda) {
    const auto b = static_cast<double>(batch_assignments.size());
    if (batch_assignments.empty()) throw InvalidConfigError("dual update on empty batch");
    if (total_unlabeled < 1) throw InvalidConfigError("N must be >= 1");
    if (!(lambda > 0.0)) throw InvalidConfigError("dual learning rate must be > 0");

    std::vector<double> batch_count(k_, 0.0);
    for (const Assignment& a : batch_assignments) batch_count[a.cluster] += 1.0;

    const double target = gamma / static_cast<double>(total_unlabeled);
    for (std::size_t k = 0; k < k_; ++k) {
        const double grad = batch_count[k] / b - target;
        duals_[k] = std::max(0.0, duals_[k] - lambda * grad);
    }
}

void ClusterState::accumulate_and_update_centroids(
    std::span<const UnitVector> batch, std::span<const Assignment> assignments) {
    const auto& ops = kernels::active();
    if (batch.size() != assignments.size())
        throw LengthMismatchError("batch and assignments differ in length");
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const std::uint32_t k = assignments[i].cluster;
        ops.axpy(1.0, batch[i].data(), sum_acc_.data() + k * d_, d_);
        count_acc_[k] += 1;
        m_seen_ += 1;
    }
    if (mode_ == CentroidUpdateMode::kWarmup) refresh_centroids_from_accumulators();
}

void ClusterState::refresh_centroids_from_accumulators() {
    const auto& ops = kernels::active();
    std::vector<double> mean(d_);
    for (std::size_t k = 0; k < k_; ++k) {
        if (count_acc_[k] == 0) continue;
        std::copy_n(sum_acc_.begin() + k * d_, d_, mean.begin());
        ops.scale(mean.data(), d_, 1.0 / static_cast<double>(count_acc_[k]));
        const double norm = std::sqrt(ops.sum_sq(mean.data(), d_));
        if (norm < kZeroNormFloor) continue;  // degenerate mean: keep previous centroid
        ops.scale(mean.data(), d_, 1.0 / norm);
        std::copy_n(mean.begin(), d_, centroids_.begin() + k * d_);
    }
}

void ClusterState::end_epoch(bool warmup_epochs_done) {
    refresh_centroids_from_accumulators();
    std::fill(sum_acc_.begin(), sum_acc_.end(), 0.0);
    std::fill(count_acc_.begin(), count_acc_.end(), 0);
    m_seen_ = 0;
    epoch_ += 1;
    if (warmup_epochs_done) mode_ = CentroidUpdateMode::kEpochUpdate;
}

std::span<const double> ClusterState::centroid(std::size_t k) const {
    if (k >= k_) throw IndexOutOfRangeError("centroid index out of range");
    return {centroids_.data() + k * d_, d_};
}

nlohmann::json ClusterState::snapshot() const {
    return nlohmann::json{
        {"k", k_},
        {"d", d_},
        {"gamma", gamma_},
        {"centroids", centroids_},
        {"duals", duals_},
        {"mode", mode_ == CentroidUpdateMode::kWarmup ? "warmup" : "epoch_update"},
        {"epoch", epoch_},
    };
}

ClusterState ClusterState::restore(const nlohmann::json& j) {
    ClusterState s;
    s.k_ = j.at("k").get<std::size_t>();
    s.d_ = j.at("d").get<std::size_t>();
    s.gamma_ = j.at("gamma").get<double>();
    s.centroids_ = j.at("centroids").get<std::vector<double>>();
    s.duals_ = j.at("duals").get<std::vector<double>>();
    s.epoch_ = j.at("epoch").get<int>();
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "warmup")
        s.mode_ = CentroidUpdateMode::kWarmup;
    else if (mode == "epoch_update")
        s.mode_ = CentroidUpdateMode::kEpochUpdate;
    else
        throw InvalidConfigError("snapshot mode must be warmup or epoch_update");
    if (s.centroids_.size() != s.k_ * s.d_ || s.duals_.size() != s.k_)
        throw InvalidConfigError("snapshot centroid/dual shapes are inconsistent");
    s.sum_acc_.assign(s.k_ * s.d_, 0.0);
    s.count_acc_.assign(s.k_, 0);
    return s;
}

MultiHeadState::MultiHeadState(std::vector<ClusterState> heads)
    : heads_(std::move(heads)) {
    if (heads_.empty()) throw HeterogeneousHeadsError("need at least one head");
    for (const ClusterState& h : heads_) {
        if (h.cluster_count() != heads_[0].cluster_count() || h.dim() != heads_[0].dim())
            throw HeterogeneousHeadsError("heads must share K and d");
    }
}

std::vector<std::vector<Assignment>> MultiHeadState::assign_batch(
    std::span<const UnitVector> batch) const {
    std::vector<std::vector<Assignment>> out;
    out.reserve(heads_.size());
    for (const ClusterState& h : heads_) out.push_back(h.assign_batch(batch));
    return out;
}

void MultiHeadState::update_duals(const std::vector<std::vector<Assignment>>& per_head,
                                  double gamma, std::int64_t total_unlabeled,
                                  double lambda) {
    for (std::size_t h = 0; h < heads_.size(); ++h)
        heads_[h].update_duals(per_head.at(h), gamma, total_unlabeled, lambda);
}

void MultiHeadState::accumulate_and_update_centroids(
    std::span<const UnitVector> batch,
    const std::vector<std::vector<Assignment>>& per_head) {
    for (std::size_t h = 0; h < heads_.size(); ++h)
        heads_[h].accumulate_and_update_centroids(batch, per_head.at(h));
}

void MultiHeadState::end_epoch(bool warmup_epochs_done) {
    for (ClusterState& h : heads_) h.end_epoch(warmup_epochs_done);
}

}  // namespace plr
