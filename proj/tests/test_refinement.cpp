#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "plr/refinement.hpp"

using namespace plr;

namespace {

ProbDist random_dist(std::size_t c, std::mt19937_64& rng) {
    std::vector<double> v(c);
    double sum = 0.0;
    for (double& x : v) {
        x = std::uniform_real_distribution<double>(0.02, 1.0)(rng);
        sum += x;
    }
    for (double& x : v) x /= sum;
    return ProbDist::adopt_unchecked(std::move(v));
}

ClusterLabelTable one_row_table(std::vector<double> z) {
    ClusterLabelTable t(1, z.size());
    t.set_row(0, z, true);
    return t;
}

}  // namespace

TEST_CASE("distribution_align: uniform marginal is the identity") {
    RunningMarginal rm(2);
    const ProbDist p = ProbDist::adopt_unchecked({0.8, 0.2});
    const ProbDist out = distribution_align(p, rm);
    CHECK(out[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(rm.warm());
    // The marginal moved toward p.
    CHECK(rm.marginal()[0] == doctest::Approx(0.99 * 0.5 + 0.01 * 0.8).epsilon(1e-12));
}

TEST_CASE("distribution_align: p equal to the marginal becomes uniform") {
    RunningMarginal rm(4, 0.9);
    // Warm the marginal onto a skewed distribution.
    const ProbDist skew = ProbDist::adopt_unchecked({0.7, 0.1, 0.1, 0.1});
    for (int i = 0; i < 400; ++i) distribution_align(skew, rm);
    for (std::size_t c = 0; c < 4; ++c)
        CHECK(rm.marginal()[c] == doctest::Approx(skew[c]).epsilon(1e-9));

    RunningMarginal frozen = rm;
    const ProbDist out = distribution_align(skew, frozen);
    for (std::size_t c = 0; c < 4; ++c)
        CHECK(out[c] == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("distribution_align: direct arithmetic case") {
    // p = (0.8, 0.2), p_bar = (0.5, 0.5) -> (0.8, 0.2) after renormalization.
    RunningMarginal rm(2);
    const ProbDist p = ProbDist::adopt_unchecked({0.8, 0.2});
    const ProbDist out = distribution_align(p, rm);
    CHECK(out[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("distribution_align: frozen marginal applied twice equals dividing by its square") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        const std::size_t c = 2 + rng() % 8;
        RunningMarginal rm(c, 0.5);
        for (int i = 0; i < 20; ++i) distribution_align(random_dist(c, rng), rm);
        const ProbDist bar = rm.marginal();
        const ProbDist p = random_dist(c, rng);

        // Two passes against the same frozen marginal.
        RunningMarginal a = rm;
        const ProbDist once = distribution_align(p, a);
        RunningMarginal b = rm;
        const ProbDist twice = distribution_align(once, b);

        // Direct division by bar^2, renormalized.
        std::vector<double> direct(c);
        double sum = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            direct[j] = p[j] / (bar[j] * bar[j]);
            sum += direct[j];
        }
        for (std::size_t j = 0; j < c; ++j)
            CHECK(twice[j] == doctest::Approx(direct[j] / sum).epsilon(1e-9));
    }
}

TEST_CASE("refine: alpha=1 passes the aligned prediction through") {
    const ProbDist p = ProbDist::adopt_unchecked({0.7, 0.3});
    const std::vector<ClusterLabelTable> tables{one_row_table({0.1, 0.9})};
    const std::vector<std::int32_t> assign{0};
    const ProbDist out = refine(p, tables, assign, 1.0);
    CHECK(out[0] == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("refine: direct arithmetic on the mixing rule") {
    // alpha=0.8, DA(p) = (0.7, 0.3), z = (0.5, 0.5) -> (0.66, 0.34)
    const ProbDist p = ProbDist::adopt_unchecked({0.7, 0.3});
    const std::vector<ClusterLabelTable> tables{one_row_table({0.5, 0.5})};
    const std::vector<std::int32_t> assign{0};
    const ProbDist out = refine(p, tables, assign, 0.8);
    CHECK(out[0] == doctest::Approx(0.66).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.34).epsilon(1e-12));
}

TEST_CASE("refine: alpha=0 returns the head-averaged cluster label") {
    const ProbDist p = ProbDist::adopt_unchecked({0.9, 0.1});
    const std::vector<ClusterLabelTable> tables{one_row_table({0.5, 0.5}),
                                                one_row_table({0.1, 0.9})};
    const std::vector<std::int32_t> assign{0, 0};
    const ProbDist out = refine(p, tables, assign, 0.0);
    CHECK(out[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("refine: no assignment or invalid rows fall back to the aligned input") {
    const ProbDist p = ProbDist::adopt_unchecked({0.6, 0.4});
    SUBCASE("no assignment") {
        const std::vector<ClusterLabelTable> tables{one_row_table({0.5, 0.5})};
        const std::vector<std::int32_t> assign{-1};
        const ProbDist out = refine(p, tables, assign, 0.5);
        CHECK(out[0] == doctest::Approx(0.6));
    }
    SUBCASE("assigned cluster is invalid") {
        ClusterLabelTable t(2, 2);  // all rows start invalid
        const std::vector<ClusterLabelTable> tables{std::move(t)};
        const std::vector<std::int32_t> assign{1};
        const ProbDist out = refine(p, tables, assign, 0.5);
        CHECK(out[0] == doctest::Approx(0.6));
    }
    SUBCASE("empty table span") {
        const ProbDist out = refine(p, {}, {}, 0.5);
        CHECK(out[0] == doctest::Approx(0.6));
    }
}

TEST_CASE("refine: only valid heads contribute to the average") {
    const ProbDist p = ProbDist::adopt_unchecked({0.5, 0.5});
    ClusterLabelTable invalid(1, 2);
    const std::vector<ClusterLabelTable> tables{one_row_table({1.0, 0.0}),
                                                std::move(invalid)};
    const std::vector<std::int32_t> assign{0, 0};
    const ProbDist out = refine(p, tables, assign, 0.0);
    CHECK(out[0] == doctest::Approx(1.0));  // head 1 skipped
}

TEST_CASE("refine: output is convex and sums to one") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 200; ++t) {
        const std::size_t c = 2 + rng() % 10;
        const ProbDist p = random_dist(c, rng);
        const ProbDist z = random_dist(c, rng);
        ClusterLabelTable table(1, c);
        table.set_row(0, z.values(), true);
        const std::vector<ClusterLabelTable> tables{std::move(table)};
        const std::vector<std::int32_t> assign{0};
        const double alpha = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const ProbDist out = refine(p, tables, assign, alpha);

        double sum = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            CHECK(out[j] >= std::min(p[j], z[j]) - 1e-12);
            CHECK(out[j] <= std::max(p[j], z[j]) + 1e-12);
            sum += out[j];
        }
        CHECK(std::abs(sum - 1.0) <= 1e-6);
        // Confidence damping bound.
        CHECK(out.max_value() <=
              alpha * p.max_value() + (1.0 - alpha) * z.max_value() + 1e-12);
    }
}

TEST_CASE("refine: a disagreeing cluster label strictly lowers confidence") {
    const ProbDist p = ProbDist::adopt_unchecked({0.9, 0.1});
    const std::vector<ClusterLabelTable> tables{one_row_table({0.2, 0.8})};
    const std::vector<std::int32_t> assign{0};
    const ProbDist out = refine(p, tables, assign, 0.8);
    CHECK(out.max_value() < p.max_value());
}

TEST_CASE("reliability: boundary inclusive") {
    CHECK(reliability(ProbDist::adopt_unchecked({0.95, 0.05}), 0.95));
    CHECK(!reliability(ProbDist::adopt_unchecked({0.9499, 0.0501}), 0.95));
}

TEST_CASE("reliability: uniform fails any tau above 1/C") {
    const ProbDist u = ProbDist::uniform(8);
    CHECK(!reliability(u, 0.2));
    CHECK(reliability(u, 0.125));  // exactly 1/C passes the inclusive gate
}

TEST_CASE("reliability: one-hot passes any tau up to 1") {
    const ProbDist p = ProbDist::one_hot(5, 2);
    CHECK(reliability(p, 0.5));
    CHECK(reliability(p, 0.999999));
}

TEST_CASE("mean_cluster_label: averages valid rows across heads") {
    const std::vector<ClusterLabelTable> tables{one_row_table({0.8, 0.2}),
                                                one_row_table({0.4, 0.6})};
    const std::vector<std::int32_t> assign{0, 0};
    const auto z = mean_cluster_label(tables, assign);
    REQUIRE(z.has_value());
    CHECK((*z)[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK((*z)[1] == doctest::Approx(0.4).epsilon(1e-12));

    const std::vector<std::int32_t> none{-1, -1};
    CHECK(!mean_cluster_label(tables, none).has_value());
}

TEST_CASE("running marginal stays a distribution") {
    std::mt19937_64 rng(7);
    RunningMarginal rm(6, 0.95);
    for (int i = 0; i < 500; ++i) {
        rm.update(random_dist(6, rng));
        double sum = 0.0;
        for (std::size_t c = 0; c < 6; ++c) {
            CHECK(rm.marginal()[c] > 0.0);
            sum += rm.marginal()[c];
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}
