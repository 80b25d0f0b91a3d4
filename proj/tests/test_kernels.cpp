#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "plr/kernels.hpp"

using namespace plr;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::vector<double> v(n);
    for (double& x : v) x = nd(rng);
    return v;
}

struct BackendGuard {
    ~BackendGuard() { kernels::reset_backend(); }
};

}  // namespace

TEST_CASE("scalar dot and sum_sq match naive loops") {
    std::mt19937_64 rng(1);
    const auto& ops = kernels::scalar_ops();
    for (std::size_t n : {1u, 2u, 5u, 16u, 33u}) {
        const auto a = random_vec(n, rng);
        const auto b = random_vec(n, rng);
        double want = 0.0;
        for (std::size_t i = 0; i < n; ++i) want += a[i] * b[i];
        CHECK(ops.dot(a.data(), b.data(), n) == doctest::Approx(want).epsilon(1e-14));
        double want_sq = 0.0;
        for (double x : a) want_sq += x * x;
        CHECK(ops.sum_sq(a.data(), n) == doctest::Approx(want_sq).epsilon(1e-14));
    }
}

TEST_CASE("best_scored_row breaks ties toward the lowest index") {
    const auto& ops = kernels::scalar_ops();
    // Two identical rows: the first must win.
    const std::vector<double> q{1.0, 0.0};
    const std::vector<double> rows{1.0, 0.0, 1.0, 0.0};
    double sim = 0.0;
    CHECK(ops.best_scored_row(q.data(), rows.data(), nullptr, 2, 2, &sim) == 0);
    CHECK(sim == doctest::Approx(1.0));

    // A bias entry flips the winner.
    const std::vector<double> bias{0.0, 0.25};
    CHECK(ops.best_scored_row(q.data(), rows.data(), bias.data(), 2, 2, &sim) == 1);
    CHECK(sim == doctest::Approx(1.0));  // raw similarity, not the biased score
}

TEST_CASE("every available backend agrees with the scalar reference") {
    const auto backends = kernels::available_backends();
    REQUIRE(!backends.empty());
    const auto& ref = kernels::scalar_ops();

    std::mt19937_64 rng(42);
    for (const auto* ops : backends) {
        CAPTURE(ops->name);
        for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 31u, 33u, 64u, 101u}) {
            const auto a = random_vec(n, rng);
            const auto b = random_vec(n, rng);

            const double want_dot = ref.dot(a.data(), b.data(), n);
            CHECK(ops->dot(a.data(), b.data(), n) ==
                  doctest::Approx(want_dot).epsilon(1e-12));
            CHECK(ops->sum_sq(a.data(), n) ==
                  doctest::Approx(ref.sum_sq(a.data(), n)).epsilon(1e-12));

            auto y_ref = random_vec(n, rng);
            auto y_got = y_ref;
            ref.axpy(0.37, a.data(), y_ref.data(), n);
            ops->axpy(0.37, a.data(), y_got.data(), n);
            for (std::size_t i = 0; i < n; ++i)
                CHECK(y_got[i] == doctest::Approx(y_ref[i]).epsilon(1e-13));

            // Pure elementwise multiply: bitwise identical.
            auto s_ref = a;
            auto s_got = a;
            ref.scale(s_ref.data(), n, 1.0 / 3.0);
            ops->scale(s_got.data(), n, 1.0 / 3.0);
            for (std::size_t i = 0; i < n; ++i) CHECK(s_got[i] == s_ref[i]);

            // axpy with multiplier 1 must be bitwise equal even under FMA.
            auto acc_ref = random_vec(n, rng);
            auto acc_got = acc_ref;
            ref.axpy(1.0, a.data(), acc_ref.data(), n);
            ops->axpy(1.0, a.data(), acc_got.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(acc_got[i] == acc_ref[i]);
        }

        // Argmax agreement over random scoring problems.
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t k = 2 + rng() % 32;
            const std::size_t d = 1 + rng() % 40;
            const auto q = random_vec(d, rng);
            const auto rows = random_vec(k * d, rng);
            std::vector<double> bias(k);
            for (double& x : bias)
                x = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
            double sim_ref = 0.0, sim_got = 0.0;
            const auto want =
                ref.best_scored_row(q.data(), rows.data(), bias.data(), k, d, &sim_ref);
            const auto got =
                ops->best_scored_row(q.data(), rows.data(), bias.data(), k, d, &sim_got);
            CHECK(got == want);
            CHECK(sim_got == doctest::Approx(sim_ref).epsilon(1e-12));
        }
    }
}

TEST_CASE("backend forcing is honored and reversible") {
    BackendGuard guard;
    kernels::force_backend(kernels::scalar_ops());
    CHECK(std::string(kernels::active().name) == "scalar");
    kernels::reset_backend();
    const auto backends = kernels::available_backends();
    // Auto-detection picks the widest available backend.
    CHECK(std::string(kernels::active().name) == backends.back()->name);
}

#if defined(PLR_WITH_AVX2)
TEST_CASE("avx2 backend is exercised on this machine when supported") {
    const auto backends = kernels::available_backends();
    bool has_avx2 = false;
    for (const auto* b : backends)
        if (std::string(b->name) == "avx2") has_avx2 = true;
    // Informational: the equivalence suite above already covered it if present.
    MESSAGE("avx2 backend available: ", has_avx2);
    CHECK(true);
}
#endif
