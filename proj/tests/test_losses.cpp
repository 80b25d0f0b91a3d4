#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "plr/losses.hpp"

using namespace plr;

namespace {

ProbDist random_dist(std::size_t c, std::mt19937_64& rng) {
    std::vector<double> v(c);
    double sum = 0.0;
    for (double& x : v) {
        x = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
        sum += x;
    }
    for (double& x : v) x /= sum;
    return ProbDist::adopt_unchecked(std::move(v));
}

UnitVector random_unit(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::vector<double> v(d);
    for (double& x : v) x = nd(rng);
    return l2_normalize(v);
}

}  // namespace

TEST_CASE("unlabeled_loss: fully gated batch is zero") {
    std::mt19937_64 rng(1);
    std::vector<ProbDist> p_hat, p_strong;
    for (int i = 0; i < 8; ++i) {
        p_hat.push_back(random_dist(5, rng));
        p_strong.push_back(random_dist(5, rng));
    }
    const std::vector<std::uint8_t> eta(8, 0);
    CHECK(unlabeled_loss(p_hat, p_strong, eta) == 0.0);
}

TEST_CASE("unlabeled_loss: retained identical pairs give mean entropy") {
    std::mt19937_64 rng(2);
    std::vector<ProbDist> p;
    double want = 0.0;
    for (int i = 0; i < 6; ++i) {
        p.push_back(random_dist(4, rng));
        want += entropy(p.back());
    }
    want /= 6.0;
    const std::vector<std::uint8_t> eta(6, 1);
    CHECK(unlabeled_loss(p, p, eta) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("unlabeled_loss: partial gating divides by the full batch size") {
    // Two samples, eta = (1, 0), CE of the first = ln 2 -> loss = ln2 / 2.
    const std::vector<ProbDist> p_hat{ProbDist::one_hot(2, 0),
                                      ProbDist::adopt_unchecked({0.3, 0.7})};
    const std::vector<ProbDist> p_strong{ProbDist::adopt_unchecked({0.5, 0.5}),
                                         ProbDist::adopt_unchecked({0.9, 0.1})};
    const std::vector<std::uint8_t> eta{1, 0};
    CHECK(unlabeled_loss(p_hat, p_strong, eta) ==
          doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-9));
}

TEST_CASE("unlabeled_loss: length mismatch rejected") {
    const std::vector<ProbDist> a{ProbDist::uniform(3)};
    const std::vector<ProbDist> b{ProbDist::uniform(3), ProbDist::uniform(3)};
    const std::vector<std::uint8_t> eta{1};
    CHECK_THROWS_AS(unlabeled_loss(a, b, eta), LengthMismatchError);
}

TEST_CASE("supervised_loss: perfect predictions give ~0") {
    std::vector<ProbDist> y, p;
    for (int i = 0; i < 4; ++i) {
        y.push_back(ProbDist::one_hot(6, i));
        p.push_back(ProbDist::one_hot(6, i));
    }
    CHECK(std::abs(supervised_loss(y, p)) <= 1e-9);
}

TEST_CASE("supervised_loss: uniform predictions over 10 classes give ln 10") {
    std::vector<ProbDist> y, p;
    for (int i = 0; i < 5; ++i) {
        y.push_back(ProbDist::one_hot(10, i % 10));
        p.push_back(ProbDist::uniform(10));
    }
    CHECK(supervised_loss(y, p) == doctest::Approx(std::log(10.0)).epsilon(1e-9));
}

TEST_CASE("supervised_loss: a single sample reduces to one cross entropy") {
    const std::vector<ProbDist> y{ProbDist::one_hot(3, 1)};
    const std::vector<ProbDist> p{ProbDist::adopt_unchecked({0.2, 0.5, 0.3})};
    CHECK(supervised_loss(y, p) == doctest::Approx(cross_entropy(y[0], p[0])));
}

TEST_CASE("self_supervised_loss: fully retained batch is zero") {
    std::mt19937_64 rng(3);
    std::vector<UnitVector> qw, qs;
    for (int i = 0; i < 8; ++i) {
        qw.push_back(random_unit(6, rng));
        qs.push_back(random_unit(6, rng));
    }
    const std::vector<std::uint8_t> eta(8, 1);
    CHECK(self_supervised_loss(qw, qs, eta, 0.1) == 0.0);
}

TEST_CASE("self_supervised_loss: equal views at equal temperatures give entropy") {
    std::mt19937_64 rng(4);
    std::vector<UnitVector> q;
    double want = 0.0;
    for (int i = 0; i < 5; ++i) {
        q.push_back(random_unit(8, rng));
        want += entropy(tempered_softmax(q.back().values(), 0.1));
    }
    want /= 5.0;
    const std::vector<std::uint8_t> eta(5, 0);
    CHECK(self_supervised_loss(q, q, eta, 0.1, 1.0) ==
          doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("self_supervised_loss: frozen high-precision single-sample value") {
    // d=2, q_w = q_s = (1,0), T = 0.1, mult = 5:
    // CE(SM(q/0.5), SM(q/0.1)) = 1.1920746164937733 (50-digit evaluation of
    // the exact formula, including the 1e-12 log clamp).
    const std::vector<UnitVector> q{l2_normalize(std::vector<double>{1.0, 0.0})};
    const std::vector<std::uint8_t> eta{0};
    CHECK(self_supervised_loss(q, q, eta, 0.1, 5.0) ==
          doctest::Approx(1.1920746164937733).epsilon(1e-12));
}

TEST_CASE("self_supervised_loss: target multiplier softens the target side") {
    // With mult > 1 the target SM(q/(mult T)) is flatter than the source.
    const std::vector<UnitVector> q{l2_normalize(std::vector<double>{1.0, 0.0})};
    const std::vector<std::uint8_t> eta{0};
    const double at5 = self_supervised_loss(q, q, eta, 0.1, 5.0);
    const double at1 = self_supervised_loss(q, q, eta, 0.1, 1.0);
    CHECK(at5 > at1);  // mismatched target/source raises the cross entropy
}

TEST_CASE("gating complementarity: the two unlabeled losses split the batch") {
    std::mt19937_64 rng(5);
    const std::size_t b = 24, c = 6, d = 10;
    std::vector<ProbDist> p_hat, p_strong;
    std::vector<UnitVector> qw, qs;
    std::vector<std::uint8_t> eta;
    for (std::size_t i = 0; i < b; ++i) {
        p_hat.push_back(random_dist(c, rng));
        p_strong.push_back(random_dist(c, rng));
        qw.push_back(random_unit(d, rng));
        qs.push_back(random_unit(d, rng));
        eta.push_back(rng() % 2);
    }
    const double lu = unlabeled_loss(p_hat, p_strong, eta);
    const double lc = self_supervised_loss(qw, qs, eta, 0.1);

    // Perturbing a gated-out sample never moves the loss it is gated from.
    for (std::size_t i = 0; i < b; ++i) {
        auto p2 = p_strong;
        auto q2 = qs;
        p2[i] = random_dist(c, rng);
        q2[i] = random_unit(d, rng);
        if (eta[i]) {
            CHECK(self_supervised_loss(qw, q2, eta, 0.1) == lc);
        } else {
            CHECK(unlabeled_loss(p_hat, p2, eta) == lu);
        }
    }

    // The index sets partition the batch.
    std::size_t retained = 0;
    for (auto e : eta) retained += e;
    CHECK(retained + (b - retained) == b);
}

TEST_CASE("losses are finite and nonnegative on random batches") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 50; ++t) {
        const std::size_t b = 1 + rng() % 16, c = 2 + rng() % 8, d = 2 + rng() % 12;
        std::vector<ProbDist> p_hat, p_strong, y, p_x;
        std::vector<UnitVector> qw, qs;
        std::vector<std::uint8_t> eta;
        for (std::size_t i = 0; i < b; ++i) {
            p_hat.push_back(random_dist(c, rng));
            p_strong.push_back(random_dist(c, rng));
            y.push_back(ProbDist::one_hot(c, rng() % c));
            p_x.push_back(random_dist(c, rng));
            qw.push_back(random_unit(d, rng));
            qs.push_back(random_unit(d, rng));
            eta.push_back(rng() % 2);
        }
        for (double v : {unlabeled_loss(p_hat, p_strong, eta), supervised_loss(y, p_x),
                         self_supervised_loss(qw, qs, eta, 0.1)}) {
            CHECK(std::isfinite(v));
            CHECK(v >= -1e-9);
        }
    }
}

TEST_CASE("total_loss: weighted combination") {
    CHECK(total_loss(1.0, 2.0, 3.0, 4.0, LossWeights{}) == doctest::Approx(10.0));
    CHECK(total_loss(1.5, 2.0, 3.0, 4.0, LossWeights{0.0, 0.0, 0.0}) ==
          doctest::Approx(1.5));
    CHECK(total_loss(0.0, 0.0, 0.0, 0.0, LossWeights{}) == 0.0);
    CHECK(total_loss(1.0, 2.0, 3.0, 4.0, LossWeights{0.5, 2.0, 0.25}) ==
          doctest::Approx(1.0 + 1.0 + 6.0 + 1.0));
}

TEST_CASE("self_supervised_loss: parameter validation") {
    const std::vector<UnitVector> q{l2_normalize(std::vector<double>{1.0, 0.0})};
    const std::vector<std::uint8_t> eta{0};
    CHECK_THROWS_AS(self_supervised_loss(q, q, eta, 0.0), NonPositiveTemperatureError);
    CHECK_THROWS_AS(self_supervised_loss(q, q, eta, 0.1, 0.0), InvalidConfigError);
}
