// Vector and distribution primitives shared by all modules.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "plr/errors.hpp"

namespace plr {

// An l2-normalized embedding. Constructed through l2_normalize (or
// adopt_unchecked for data already known to be unit norm).
class UnitVector {
  public:
    UnitVector() = default;

    static UnitVector adopt_unchecked(std::vector<double> values) {
        UnitVector u;
        u.v_ = std::move(values);
        return u;
    }

    std::size_t dim() const { return v_.size(); }
    std::span<const double> values() const { return v_; }
    const double* data() const { return v_.data(); }
    double operator[](std::size_t i) const { return v_[i]; }

    bool operator==(const UnitVector& o) const { return v_ == o.v_; }

  private:
    std::vector<double> v_;
};

// A distribution over C classes: entries >= 0, sum within 1e-6 of 1.
class ProbDist {
  public:
    ProbDist() = default;

    // Validates the invariant; throws InvalidDistributionError.
    static ProbDist from_probs(std::span<const double> probs);
    static ProbDist uniform(std::size_t c);
    static ProbDist one_hot(std::size_t c, std::size_t hot);

    static ProbDist adopt_unchecked(std::vector<double> probs) {
        ProbDist p;
        p.p_ = std::move(probs);
        return p;
    }

    std::size_t size() const { return p_.size(); }
    std::span<const double> values() const { return p_; }
    double operator[](std::size_t i) const { return p_[i]; }

    // Lowest index on ties.
    std::size_t arg_max() const;
    double max_value() const;

  private:
    std::vector<double> p_;
};

// Log argument clamp used everywhere a probability enters a log.
inline constexpr double kLogEpsilon = 1e-12;
// Norms below this are treated as degenerate zero vectors.
inline constexpr double kZeroNormFloor = 1e-12;

// Scales v to unit l2 norm. Throws ZeroVectorError if ||v|| < 1e-12.
UnitVector l2_normalize(std::span<const double> v);

// softmax(scores / t), computed with max subtraction. Throws
// NonPositiveTemperatureError for t <= 0.
ProbDist tempered_softmax(std::span<const double> scores, double t);

// -sum_c target_c * log(pred_c + 1e-12). Throws DimensionMismatchError.
double cross_entropy(const ProbDist& target, const ProbDist& pred);

// cross_entropy(p, p).
double entropy(const ProbDist& p);

// Inner product of two unit vectors; in [-1, 1] up to rounding.
double dot(const UnitVector& a, const UnitVector& b);

}  // namespace plr
