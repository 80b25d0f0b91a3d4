#include "plr/prototypes.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "plr/kernels.hpp"

namespace plr {

PrototypeSet::PrototypeSet(std::size_t class_count, std::size_t dim)
    : c_(class_count), d_(dim) {
    if (c_ < 2) throw InvalidConfigError("prototype set needs C >= 2");
    if (d_ == 0) throw InvalidConfigError("prototype set needs d >= 1");
    protos_.assign(c_ * d_, 0.0);
    initialized_.assign(c_, 0);
    sum_acc_.assign(c_ * d_, 0.0);
    count_acc_.assign(c_, 0);
}

void PrototypeSet::accumulate_labeled(const UnitVector& q, std::size_t y) {
    if (y >= c_) throw IndexOutOfRangeError("class index out of range");
    if (q.dim() != d_) throw DimensionMismatchError("projection dimension mismatch");
    kernels::active().axpy(1.0, q.data(), sum_acc_.data() + y * d_, d_);
    count_acc_[y] += 1;
}

void PrototypeSet::accumulate_unlabeled(const UnitVector& q, std::size_t y_hat, bool eta) {
    if (y_hat >= c_) throw IndexOutOfRangeError("class index out of range");
    if (!eta) return;
    accumulate_labeled(q, y_hat);
}

void PrototypeSet::finalize_epoch() {
    const auto& ops = kernels::active();
    std::vector<double> mean(d_);
    for (std::size_t c = 0; c < c_; ++c) {
        if (count_acc_[c] == 0) continue;
        std::copy_n(sum_acc_.begin() + c * d_, d_, mean.begin());
        ops.scale(mean.data(), d_, 1.0 / static_cast<double>(count_acc_[c]));
        const double norm = std::sqrt(ops.sum_sq(mean.data(), d_));
        if (norm >= kZeroNormFloor) {
            ops.scale(mean.data(), d_, 1.0 / norm);
            std::copy_n(mean.begin(), d_, protos_.begin() + c * d_);
            initialized_[c] = 1;
        }
        // degenerate near-zero mean: previous prototype (if any) is retained
    }
    std::fill(sum_acc_.begin(), sum_acc_.end(), 0.0);
    std::fill(count_acc_.begin(), count_acc_.end(), 0);
}

bool PrototypeSet::all_initialized() const {
    return std::all_of(initialized_.begin(), initialized_.end(),
                       [](std::uint8_t b) { return b != 0; });
}

std::span<const double> PrototypeSet::prototype(std::size_t c) const {
    if (c >= c_) throw IndexOutOfRangeError("class index out of range");
    return {protos_.data() + c * d_, d_};
}

double PrototypeSet::proto_loss(std::span<const UnitVector> q_strong,
                                std::span<const std::uint32_t> y_hat,
                                double temperature) const {
    if (!all_initialized())
        throw UninitializedPrototypesError("proto_loss before all prototypes exist");
    if (q_strong.size() != y_hat.size())
        throw LengthMismatchError("proto_loss: batch length mismatch");
    if (!(temperature > 0.0))
        throw NonPositiveTemperatureError("proto_loss temperature must be > 0");
    if (q_strong.empty()) return 0.0;

    const auto& ops = kernels::active();
    std::vector<double> scores(c_);
    double total = 0.0;
    for (std::size_t i = 0; i < q_strong.size(); ++i) {
        if (q_strong[i].dim() != d_)
            throw DimensionMismatchError("projection dimension mismatch");
        if (y_hat[i] >= c_) throw IndexOutOfRangeError("class index out of range");
        for (std::size_t c = 0; c < c_; ++c)
            scores[c] = ops.dot(q_strong[i].data(), protos_.data() + c * d_, d_) /
                        temperature;
        // -log softmax(scores)[y] via logsumexp
        const double m = *std::max_element(scores.begin(), scores.end());
        double z = 0.0;
        for (double s : scores) z += std::exp(s - m);
        total += m + std::log(z) - scores[y_hat[i]];
    }
    return total / static_cast<double>(q_strong.size());
}

void PrototypeSet::dump_csv(std::ostream& out) const {
    out.precision(17);
    for (std::size_t c = 0; c < c_; ++c) {
        for (std::size_t j = 0; j < d_; ++j) {
            if (j) out << ',';
            out << protos_[c * d_ + j];
        }
        out << "\n";
    }
}

}  // namespace plr
