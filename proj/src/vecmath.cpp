#include "plr/vecmath.hpp"

#include <algorithm>
#include <cmath>

#include "plr/kernels.hpp"

namespace plr {

ProbDist ProbDist::from_probs(std::span<const double> probs) {
    if (probs.size() < 2) throw InvalidDistributionError("ProbDist needs C >= 2");
    double sum = 0.0;
    for (double p : probs) {
        if (!(p >= 0.0)) throw InvalidDistributionError("ProbDist entry < 0 or NaN");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
        throw InvalidDistributionError("ProbDist does not sum to 1");
    return adopt_unchecked(std::vector<double>(probs.begin(), probs.end()));
}

ProbDist ProbDist::uniform(std::size_t c) {
    return adopt_unchecked(std::vector<double>(c, 1.0 / static_cast<double>(c)));
}

ProbDist ProbDist::one_hot(std::size_t c, std::size_t hot) {
    std::vector<double> v(c, 0.0);
    v.at(hot) = 1.0;
    return adopt_unchecked(std::move(v));
}

std::size_t ProbDist::arg_max() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p_.size(); ++i)
        if (p_[i] > p_[best]) best = i;
    return best;
}

double ProbDist::max_value() const { return p_[arg_max()]; }

UnitVector l2_normalize(std::span<const double> v) {
    if (v.empty()) throw ZeroVectorError("cannot normalize an empty vector");
    const auto& k = kernels::active();
    const double norm = std::sqrt(k.sum_sq(v.data(), v.size()));
    if (norm < kZeroNormFloor) throw ZeroVectorError("cannot normalize a zero vector");
    std::vector<double> out(v.begin(), v.end());
    k.scale(out.data(), out.size(), 1.0 / norm);
    return UnitVector::adopt_unchecked(std::move(out));
}

ProbDist tempered_softmax(std::span<const double> scores, double t) {
    if (!(t > 0.0)) throw NonPositiveTemperatureError("softmax temperature must be > 0");
    if (scores.empty()) throw DimensionMismatchError("softmax over empty score vector");
    const double m = *std::max_element(scores.begin(), scores.end());
    std::vector<double> out(scores.size());
    double z = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp((scores[i] - m) / t);
        z += out[i];
    }
    for (double& p : out) p /= z;
    return ProbDist::adopt_unchecked(std::move(out));
}

double cross_entropy(const ProbDist& target, const ProbDist& pred) {
    if (target.size() != pred.size())
        throw DimensionMismatchError("cross_entropy: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i)
        s -= target[i] * std::log(pred[i] + kLogEpsilon);
    return s;
}

double entropy(const ProbDist& p) { return cross_entropy(p, p); }

double dot(const UnitVector& a, const UnitVector& b) {
    if (a.dim() != b.dim()) throw DimensionMismatchError("dot: dimension mismatch");
    return kernels::active().dot(a.data(), b.data(), a.dim());
}

}  // namespace plr
