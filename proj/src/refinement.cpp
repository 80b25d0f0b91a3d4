#include "plr/refinement.hpp"

#include <optional>
#include <vector>

namespace plr {

RunningMarginal::RunningMarginal(std::size_t class_count, double momentum)
    : p_bar_(ProbDist::uniform(class_count)), momentum_(momentum) {
    if (class_count < 2) throw InvalidConfigError("running marginal needs C >= 2");
    if (!(momentum > 0.0 && momentum < 1.0))
        throw InvalidConfigError("marginal momentum must be in (0, 1)");
}

void RunningMarginal::update(const ProbDist& p) {
    if (p.size() != p_bar_.size())
        throw DimensionMismatchError("marginal update: size mismatch");
    std::vector<double> next(p_bar_.size());
    for (std::size_t c = 0; c < next.size(); ++c)
        next[c] = momentum_ * p_bar_[c] + (1.0 - momentum_) * p[c];
    p_bar_ = ProbDist::adopt_unchecked(std::move(next));
    warm_ = true;
}

ProbDist distribution_align(const ProbDist& p, RunningMarginal& rm) {
    const ProbDist& bar = rm.marginal();
    if (p.size() != bar.size()) throw DimensionMismatchError("align: size mismatch");
    std::vector<double> out(p.size());
    double sum = 0.0;
    for (std::size_t c = 0; c < out.size(); ++c) {
        // bar entries stay strictly positive: uniform init, momentum < 1
        out[c] = p[c] / bar[c];
        sum += out[c];
    }
    for (double& v : out) v /= sum;
    rm.update(p);
    return ProbDist::adopt_unchecked(std::move(out));
}

std::optional<ProbDist> mean_cluster_label(std::span<const ClusterLabelTable> tables,
                                           std::span<const std::int32_t> assignments) {
    if (tables.size() != assignments.size())
        throw LengthMismatchError("one assignment per head required");
    if (tables.empty()) return std::nullopt;

    std::vector<double> z_mean;
    std::size_t valid_heads = 0;
    for (std::size_t h = 0; h < tables.size(); ++h) {
        const std::int32_t a = assignments[h];
        if (a < 0) continue;
        if (static_cast<std::size_t>(a) >= tables[h].cluster_count())
            throw IndexOutOfRangeError("assigned cluster out of table range");
        if (!tables[h].valid(static_cast<std::size_t>(a))) continue;
        const auto row = tables[h].row(static_cast<std::size_t>(a));
        if (z_mean.empty()) z_mean.assign(row.size(), 0.0);
        if (row.size() != z_mean.size())
            throw DimensionMismatchError("table width mismatch across heads");
        for (std::size_t j = 0; j < row.size(); ++j) z_mean[j] += row[j];
        ++valid_heads;
    }
    if (valid_heads == 0) return std::nullopt;
    for (double& v : z_mean) v /= static_cast<double>(valid_heads);
    return ProbDist::adopt_unchecked(std::move(z_mean));
}

ProbDist refine(const ProbDist& p_aligned, std::span<const ClusterLabelTable> tables,
                std::span<const std::int32_t> assignments, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw InvalidConfigError("alpha must be in [0, 1]");

    const std::optional<ProbDist> z = mean_cluster_label(tables, assignments);
    if (!z) return p_aligned;
    if (z->size() != p_aligned.size())
        throw DimensionMismatchError("refine: table width mismatch");

    std::vector<double> out(p_aligned.size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = alpha * p_aligned[j] + (1.0 - alpha) * (*z)[j];
    return ProbDist::adopt_unchecked(std::move(out));
}

bool reliability(const ProbDist& p_hat, double tau) {
    return p_hat.max_value() >= tau;
}

}  // namespace plr
