#include "verify/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "plr/banks.hpp"
#include "plr/clustering.hpp"
#include "plr/config.hpp"
#include "plr/engine.hpp"
#include "plr/experiment.hpp"
#include "plr/losses.hpp"
#include "plr/prototypes.hpp"
#include "plr/seeding.hpp"
#include "plr/vecmath.hpp"

namespace plr::verify {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream s;
    s << std::setprecision(6) << v;
    return s.str();
}

UnitVector random_unit(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::vector<double> v(d);
    for (double& x : v) x = nd(rng);
    return l2_normalize(v);
}

// ---------------------------------------------------------------------------
// Independent oracles (plain loops only; no engine code paths).
// ---------------------------------------------------------------------------

std::size_t brute_force_best(const UnitVector& q,
                             const std::vector<UnitVector>& centroids,
                             const std::vector<double>& duals) {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centroids.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < q.dim(); ++j) s += q[j] * centroids[k][j];
        s += duals[k];
        if (s > best_score) {
            best_score = s;
            best = k;
        }
    }
    return best;
}

// Mini-batch K-means without any dual machinery, mirroring the engine's
// warmup update policy (running epoch accumulators, refresh every batch,
// reset at epoch end).
struct VanillaMiniBatchKMeans {
    std::size_t k = 0;
    std::size_t d = 0;
    std::vector<double> centroids;
    std::vector<double> sums;
    std::vector<std::int64_t> counts;

    VanillaMiniBatchKMeans(const ClusterState& init) {
        k = init.cluster_count();
        d = init.dim();
        centroids.resize(k * d);
        for (std::size_t c = 0; c < k; ++c) {
            const auto row = init.centroid(c);
            std::copy(row.begin(), row.end(), centroids.begin() + c * d);
        }
        sums.assign(k * d, 0.0);
        counts.assign(k, 0);
    }

    std::vector<std::uint32_t> assign(std::span<const UnitVector> batch) const {
        std::vector<std::uint32_t> out(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            std::size_t best = 0;
            double best_s = -std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                double s = 0.0;
                for (std::size_t j = 0; j < d; ++j) s += batch[i][j] * centroids[c * d + j];
                if (s > best_s) {
                    best_s = s;
                    best = c;
                }
            }
            out[i] = static_cast<std::uint32_t>(best);
        }
        return out;
    }

    void refresh() {
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            double norm2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double m = sums[c * d + j] / static_cast<double>(counts[c]);
                norm2 += m * m;
            }
            const double norm = std::sqrt(norm2);
            if (norm < 1e-12) continue;
            for (std::size_t j = 0; j < d; ++j)
                centroids[c * d + j] =
                    sums[c * d + j] / static_cast<double>(counts[c]) / norm;
        }
    }

    void accumulate_and_refresh(std::span<const UnitVector> batch,
                                const std::vector<std::uint32_t>& asg) {
        for (std::size_t i = 0; i < batch.size(); ++i) {
            for (std::size_t j = 0; j < d; ++j) sums[asg[i] * d + j] += batch[i][j];
            counts[asg[i]] += 1;
        }
        refresh();
    }

    void end_epoch() {
        refresh();
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
    }
};

// Stationary desk-scale clustering workload: points drawn around `modes`
// well-separated directions with sigma = 0.1 x mean inter-mean distance,
// normalized back onto the sphere.
struct GaussianWorld {
    std::vector<UnitVector> points;
    std::vector<std::vector<std::uint32_t>> epoch_orders;
};

GaussianWorld make_gaussian_world(std::size_t n, std::size_t modes, std::size_t d,
                                  std::size_t epochs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;

    std::vector<std::vector<double>> means(modes);
    for (auto& m : means) {
        m.resize(d);
        double n2 = 0.0;
        for (double& x : m) {
            x = nd(rng);
            n2 += x * x;
        }
        for (double& x : m) x /= std::sqrt(n2);
    }
    double dist_sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < modes; ++a)
        for (std::size_t b = a + 1; b < modes; ++b) {
            double d2 = 0.0;
            for (std::size_t j = 0; j < d; ++j)
                d2 += (means[a][j] - means[b][j]) * (means[a][j] - means[b][j]);
            dist_sum += std::sqrt(d2);
            ++pairs;
        }
    const double sigma = 0.1 * dist_sum / static_cast<double>(pairs);

    GaussianWorld world;
    world.points.reserve(n);
    std::vector<double> x(d);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t m = i % modes;
        for (std::size_t j = 0; j < d; ++j) x[j] = means[m][j] + sigma * nd(rng);
        world.points.push_back(l2_normalize(x));
    }

    world.epoch_orders.resize(epochs);
    for (std::size_t e = 0; e < epochs; ++e) {
        auto& order = world.epoch_orders[e];
        order.resize(n);
        std::iota(order.begin(), order.end(), 0u);
        std::mt19937_64 erng(mix_seed(seed, 100 + e));
        std::shuffle(order.begin(), order.end(), erng);
    }
    return world;
}

std::vector<UnitVector> gather(const GaussianWorld& w, std::size_t epoch,
                               std::size_t begin, std::size_t end) {
    std::vector<UnitVector> batch;
    batch.reserve(end - begin);
    for (std::size_t i = begin; i < end; ++i)
        batch.push_back(w.points[w.epoch_orders[epoch][i]]);
    return batch;
}

// The shared biased-world run behind the refinement-gain and
// confidence-damping checks.
const std::vector<EpochReport>& biased_run() {
    static const std::vector<EpochReport> reports =
        run_in_memory(RunConfig::biased_preset());
    return reports;
}

CheckResult make_result(const std::string& name, bool pass, const std::string& detail,
                        Clock::time_point t0) {
    return CheckResult{name, pass, detail, seconds_since(t0)};
}

}  // namespace

CheckResult check_assignment_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(20240601);
    std::size_t mismatches = 0;
    const std::size_t trials = 10000;

    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t k = 2 + rng() % 63;  // K in [2, 64]
        const std::size_t d = 3 + rng() % 30;
        std::vector<UnitVector> centroids;
        centroids.reserve(k);
        std::vector<double> centroid_flat;
        centroid_flat.reserve(k * d);
        for (std::size_t c = 0; c < k; ++c) {
            centroids.push_back(random_unit(d, rng));
            const auto vals = centroids.back().values();
            centroid_flat.insert(centroid_flat.end(), vals.begin(), vals.end());
        }
        std::vector<double> duals(k);
        for (double& r : duals) r = std::uniform_real_distribution<double>(0.0, 1.0)(rng);

        const ClusterState state = ClusterState::restore(nlohmann::json{
            {"k", k},
            {"d", d},
            {"gamma", 0.0},
            {"centroids", centroid_flat},
            {"duals", duals},
            {"mode", "warmup"},
            {"epoch", 0},
        });

        const UnitVector q = random_unit(d, rng);
        const std::vector<UnitVector> batch{q};
        const auto got = state.assign_batch(batch);
        const std::size_t want = brute_force_best(q, centroids, duals);
        if (got[0].cluster != want) ++mismatches;
    }

    const double secs = seconds_since(t0);
    const bool pass = mismatches == 0 && secs < 5.0;
    return make_result("assignment_oracle", pass,
                       std::to_string(trials - mismatches) + "/" + std::to_string(trials) +
                           " exact in " + fmt(secs) + " s",
                       t0);
}

CheckResult check_unconstrained_reduction() {
    const auto t0 = Clock::now();
    const std::size_t n = 2000, k = 8, d = 16, epochs = 10, batch_size = 64;
    const GaussianWorld world = make_gaussian_world(n, 4, d, epochs, 424242);

    const auto pool = gather(world, 0, 0, batch_size);
    ClusterState state = ClusterState::init_clusters(k, 0.0, pool, 99);
    VanillaMiniBatchKMeans vanilla(state);

    std::size_t mismatches = 0;
    std::size_t compared = 0;
    for (std::size_t e = 0; e < epochs; ++e) {
        for (std::size_t begin = 0; begin < n; begin += batch_size) {
            const auto batch = gather(world, e, begin, std::min(n, begin + batch_size));
            const auto a = state.assign_batch(batch);
            state.update_duals(a, 0.0, static_cast<std::int64_t>(n), 20.0);
            state.accumulate_and_update_centroids(batch, a);

            const auto va = vanilla.assign(batch);
            vanilla.accumulate_and_refresh(batch, va);
            for (std::size_t i = 0; i < batch.size(); ++i) {
                ++compared;
                if (a[i].cluster != va[i]) ++mismatches;
            }
        }
        state.end_epoch(false);
        vanilla.end_epoch();
    }
    double max_dual = 0.0;
    for (double r : state.duals()) max_dual = std::max(max_dual, r);

    const bool pass = mismatches == 0 && max_dual == 0.0;
    return make_result("unconstrained_reduction", pass,
                       std::to_string(compared - mismatches) + "/" +
                           std::to_string(compared) + " assignments identical, max dual " +
                           fmt(max_dual),
                       t0);
}

CheckResult check_constraint_satisfaction() {
    const auto t0 = Clock::now();
    const std::size_t n = 2000, k = 8, d = 16, epochs = 30, batch_size = 64;
    const int warmup = 5;
    const double gamma = 0.9 * static_cast<double>(n) / static_cast<double>(k);  // 225
    const GaussianWorld world = make_gaussian_world(n, 4, d, epochs, 424242);

    auto run = [&](double g) {
        const auto pool = gather(world, 0, 0, batch_size);
        ClusterState state = ClusterState::init_clusters(k, g, pool, 99);
        std::int64_t min_last = 0;
        for (std::size_t e = 0; e < epochs; ++e) {
            for (std::size_t begin = 0; begin < n; begin += batch_size) {
                const auto batch = gather(world, e, begin, std::min(n, begin + batch_size));
                const auto a = state.assign_batch(batch);
                state.update_duals(a, g, static_cast<std::int64_t>(n), 20.0);
                state.accumulate_and_update_centroids(batch, a);
            }
            if (e + 1 == epochs) {
                const auto counts = state.epoch_counts();
                min_last = *std::min_element(counts.begin(), counts.end());
            }
            state.end_epoch(static_cast<int>(e) + 1 >= warmup);
        }
        return min_last;
    };

    const std::int64_t min_constrained = run(gamma);
    const std::int64_t min_control = run(0.0);
    const double secs = seconds_since(t0);

    const bool pass = static_cast<double>(min_constrained) >= 0.8 * gamma &&
                      static_cast<double>(min_control) < 0.5 * gamma && secs < 60.0;
    return make_result("constraint_satisfaction", pass,
                       "min last-epoch size " + std::to_string(min_constrained) +
                           " (need >= " + fmt(0.8 * gamma) + "), control " +
                           std::to_string(min_control) + " (need < " + fmt(0.5 * gamma) +
                           ") in " + fmt(secs) + " s",
                       t0);
}

CheckResult check_cluster_label_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(555);
    double max_dev = 0.0;
    bool flags_ok = true;

    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 100 + rng() % 9901;  // up to 10,000
        const std::size_t k = 2 + rng() % 49;
        const std::size_t c = 2 + rng() % 19;
        const std::size_t heads = 1 + rng() % 2;
        const std::size_t head = rng() % heads;

        SampleBanks banks(n, heads);
        banks.begin_epoch(0);

        // Raw dump mirrored outside the banks.
        std::vector<std::int32_t> label(n, -1), cluster(n, -1);
        std::vector<double> sim(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto y = static_cast<std::size_t>(rng() % c);
            std::vector<double> p(c, 0.0);
            const double mass = std::uniform_real_distribution<double>(0.55, 0.95)(rng);
            for (std::size_t j = 0; j < c; ++j)
                p[j] = (1.0 - mass) / static_cast<double>(c - 1);
            p[y] = mass;
            banks.record_prediction(i, ProbDist::adopt_unchecked(std::move(p)), 0.5);
            label[i] = static_cast<std::int32_t>(y);

            if (rng() % 100 < 95) {
                const auto cl = static_cast<std::uint32_t>(rng() % k);
                const double s = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
                banks.record_assignment(i, head, Assignment{0, cl, s});
                cluster[i] = static_cast<std::int32_t>(cl);
                sim[i] = s;
            }
        }

        const ClusterLabelTable table = build_cluster_labels(banks, head, k, c);

        // Brute-force recomputation from the dump.
        std::vector<double> mass(k * c, 0.0);
        std::vector<double> den(k, 0.0);
        std::vector<std::int64_t> members(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (cluster[i] < 0) continue;
            const double w = std::max(sim[i], 1e-6);
            mass[static_cast<std::size_t>(cluster[i]) * c +
                 static_cast<std::size_t>(label[i])] += w;
            den[static_cast<std::size_t>(cluster[i])] += w;
            members[static_cast<std::size_t>(cluster[i])] += 1;
        }
        for (std::size_t cl = 0; cl < k; ++cl) {
            if (table.valid(cl) != (members[cl] > 0)) flags_ok = false;
            const auto row = table.row(cl);
            for (std::size_t y = 0; y < c; ++y) {
                const double want = members[cl] > 0 ? mass[cl * c + y] / den[cl]
                                                    : 1.0 / static_cast<double>(c);
                max_dev = std::max(max_dev, std::abs(row[y] - want));
            }
        }
    }

    const bool pass = flags_ok && max_dev < 1e-9;
    return make_result("cluster_label_oracle", pass,
                       "max row deviation " + fmt(max_dev) +
                           (flags_ok ? "" : ", validity flags wrong"),
                       t0);
}

CheckResult check_refinement_gain() {
    const auto t0 = Clock::now();
    const auto& reports = biased_run();

    double mean_ref = 0.0, mean_cls = 0.0;
    std::size_t wins = 0, total = 0;
    for (const auto& r : reports) {
        if (r.epoch < 5 || r.epoch > 50) continue;
        mean_ref += r.pl_acc_refined;
        mean_cls += r.pl_acc_classifier;
        wins += r.pl_acc_refined >= r.pl_acc_classifier ? 1 : 0;
        ++total;
    }
    mean_ref /= static_cast<double>(total);
    mean_cls /= static_cast<double>(total);
    const double win_frac = static_cast<double>(wins) / static_cast<double>(total);
    const double secs = seconds_since(t0);

    const bool pass = mean_ref >= mean_cls && win_frac >= 0.8 && secs < 300.0;
    return make_result("refinement_gain", pass,
                       "mean refined " + fmt(mean_ref) + " vs classifier " + fmt(mean_cls) +
                           ", refined >= classifier in " + fmt(100.0 * win_frac) +
                           "% of epochs 5-50, " + fmt(secs) + " s",
                       t0);
}

CheckResult check_confidence_damping() {
    const auto t0 = Clock::now();
    const auto& reports = biased_run();

    std::size_t violations = 0;
    double worst_gap = 0.0;
    for (const auto& r : reports) {
        if (r.epoch <= 1) continue;
        if (r.retention_rate > r.retention_rate_unrefined) {
            ++violations;
            worst_gap = std::max(worst_gap, r.retention_rate - r.retention_rate_unrefined);
        }
    }
    const bool pass = violations == 0;
    return make_result("confidence_damping", pass,
                       violations == 0
                           ? "refined retention <= unrefined retention in every epoch > 1"
                           : std::to_string(violations) + " epochs violate (worst gap " +
                                 fmt(worst_gap) + ")",
                       t0);
}

CheckResult check_memory_accounting() {
    const auto t0 = Clock::now();
    const std::size_t n = 1'200'000, k = 4800, c = 1000, d = 128;
    SampleBanks banks(n, 1);
    ClusterLabelTable table(k, c);

    const std::int64_t slots = footprint(banks, table);
    const std::int64_t naive = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(d);
    const bool pass = slots == 9'600'000 && naive == 153'600'000 && naive / slots == 16;
    return make_result("memory_accounting", pass,
                       "footprint " + std::to_string(slots) + ", naive " +
                           std::to_string(naive) + ", ratio " + std::to_string(naive / slots) +
                           "x",
                       t0);
}

CheckResult check_loss_identities() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(777);
    bool ok = true;
    std::string why;

    // CE(p, p) = H(p) against an independent entropy computation.
    double max_dev = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t c = 2 + rng() % 19;
        std::vector<double> p(c);
        double sum = 0.0;
        for (double& v : p) {
            v = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
            sum += v;
        }
        for (double& v : p) v /= sum;
        const ProbDist dist = ProbDist::adopt_unchecked(std::vector<double>(p));
        double h = 0.0;
        for (double v : p) h -= v * std::log(v);
        max_dev = std::max(max_dev, std::abs(cross_entropy(dist, dist) - h));
    }
    if (max_dev >= 1e-9) {
        ok = false;
        why = "CE(p,p) vs H(p) deviation " + fmt(max_dev);
    }

    // Fully gated batches are exactly zero.
    const std::size_t b = 16, c = 6, d = 8;
    std::vector<ProbDist> p_hat, p_strong;
    std::vector<UnitVector> qw, qs;
    for (std::size_t i = 0; i < b; ++i) {
        std::vector<double> raw(c);
        for (double& v : raw) v = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
        p_hat.push_back(tempered_softmax(raw, 1.0));
        for (double& v : raw) v = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
        p_strong.push_back(tempered_softmax(raw, 1.0));
        qw.push_back(random_unit(d, rng));
        qs.push_back(random_unit(d, rng));
    }
    const std::vector<std::uint8_t> all_zero(b, 0), all_one(b, 1);
    if (ok && unlabeled_loss(p_hat, p_strong, all_zero) != 0.0) {
        ok = false;
        why = "gated unlabeled loss not exactly 0";
    }
    if (ok && self_supervised_loss(qw, qs, all_one, 0.1, 5.0) != 0.0) {
        ok = false;
        why = "gated self-supervised loss not exactly 0";
    }
    const double sum4 = total_loss(1.5, 2.5, 3.5, 4.5, LossWeights{});
    if (ok && std::abs(sum4 - 12.0) > 1e-12) {
        ok = false;
        why = "total loss with unit weights is not the plain sum";
    }

    return make_result("loss_identities", ok, ok ? "max CE/H deviation " + fmt(max_dev) : why,
                       t0);
}

CheckResult check_prototype_correctness() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(31337);
    const std::size_t c = 12, d = 24;
    PrototypeSet ps(c, d);

    // Accumulation log: every accepted (class, projection) pair in order.
    std::vector<std::pair<std::size_t, UnitVector>> log;
    for (std::size_t cls = 0; cls < c; ++cls) {  // one labeled sample per class
        const UnitVector q = random_unit(d, rng);
        ps.accumulate_labeled(q, cls);
        log.emplace_back(cls, q);
    }
    for (int t = 0; t < 2000; ++t) {
        const std::size_t cls = rng() % c;
        const UnitVector q = random_unit(d, rng);
        if (rng() % 2) {
            ps.accumulate_labeled(q, cls);
            log.emplace_back(cls, q);
        } else {
            const bool eta = rng() % 2;
            ps.accumulate_unlabeled(q, cls, eta);
            if (eta) log.emplace_back(cls, q);
        }
    }
    ps.finalize_epoch();

    // Offline recomputation from the log.
    std::vector<double> sums(c * d, 0.0);
    std::vector<std::int64_t> counts(c, 0);
    for (const auto& [cls, q] : log) {
        for (std::size_t j = 0; j < d; ++j) sums[cls * d + j] += q[j];
        counts[cls] += 1;
    }
    double max_dev = 0.0;
    for (std::size_t cls = 0; cls < c; ++cls) {
        double norm2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double m = sums[cls * d + j] / static_cast<double>(counts[cls]);
            norm2 += m * m;
        }
        const double norm = std::sqrt(norm2);
        const auto proto = ps.prototype(cls);
        for (std::size_t j = 0; j < d; ++j) {
            const double want = sums[cls * d + j] / static_cast<double>(counts[cls]) / norm;
            max_dev = std::max(max_dev, std::abs(proto[j] - want));
        }
    }

    // proto_loss equals the CE(one-hot, tempered softmax) composition.
    const double temp = 0.1;
    std::vector<UnitVector> batch;
    std::vector<std::uint32_t> yhat;
    for (int i = 0; i < 200; ++i) {
        batch.push_back(random_unit(d, rng));
        yhat.push_back(static_cast<std::uint32_t>(rng() % c));
    }
    const double direct = ps.proto_loss(batch, yhat, temp);
    double composed = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        std::vector<double> scores(c);
        for (std::size_t cls = 0; cls < c; ++cls) {
            const auto proto = ps.prototype(cls);
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) s += batch[i][j] * proto[j];
            scores[cls] = s;
        }
        composed += cross_entropy(ProbDist::one_hot(c, yhat[i]),
                                  tempered_softmax(scores, temp));
    }
    composed /= static_cast<double>(batch.size());
    const double loss_dev = std::abs(direct - composed);

    const bool pass = max_dev < 1e-9 && loss_dev < 1e-9;
    return make_result("prototype_correctness", pass,
                       "max prototype deviation " + fmt(max_dev) + ", loss route deviation " +
                           fmt(loss_dev),
                       t0);
}

CheckResult check_determinism() {
    const auto t0 = Clock::now();

    RunConfig cfg = RunConfig::biased_preset();
    cfg.world.unlabeled_count = 1000;
    cfg.world.labeled_count = 40;
    cfg.neighbourhood = 50.0;  // K = 20
    cfg.warmup_epochs = 4;
    cfg.epochs = 8;

    const auto base = std::filesystem::temp_directory_path() / "plrefine_verify";
    const auto dir_a = base / "det_a";
    const auto dir_b = base / "det_b";
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);

    run_experiment(cfg, dir_a);
    run_experiment(cfg, dir_b);

    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string a = slurp(dir_a / "report.jsonl");
    const std::string b = slurp(dir_b / "report.jsonl");
    const std::string ca = slurp(dir_a / "summary.csv");
    const std::string cb = slurp(dir_b / "summary.csv");

    std::filesystem::remove_all(base);

    const bool pass = !a.empty() && a == b && !ca.empty() && ca == cb;
    return make_result("determinism", pass,
                       pass ? "report.jsonl byte-identical across two runs (" +
                                  std::to_string(a.size()) + " bytes)"
                            : "outputs differ between identical runs",
                       t0);
}

std::vector<CheckResult> run_all(std::ostream* progress) {
    using CheckFn = CheckResult (*)();
    const CheckFn checks[] = {
        check_assignment_oracle,   check_unconstrained_reduction,
        check_constraint_satisfaction, check_cluster_label_oracle,
        check_refinement_gain,     check_confidence_damping,
        check_memory_accounting,   check_loss_identities,
        check_prototype_correctness, check_determinism,
    };

    std::vector<CheckResult> results;
    results.reserve(std::size(checks));
    int idx = 0;
    for (CheckFn fn : checks) {
        CheckResult r = fn();
        ++idx;
        if (progress) {
            *progress << "[" << std::setw(2) << idx << "/" << std::size(checks) << "] "
                      << std::left << std::setw(28) << r.name << std::right
                      << (r.pass ? " PASS " : " FAIL ") << "(" << fmt(r.seconds) << " s) "
                      << r.detail << "\n";
        }
        results.push_back(std::move(r));
    }
    if (progress) {
        const bool ok = all_passed(results);
        *progress << (ok ? "all checks passed" : "SOME CHECKS FAILED") << "\n";
    }
    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.pass; });
}

}  // namespace plr::verify
