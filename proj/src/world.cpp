#include "plr/world.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "plr/seeding.hpp"

namespace plr {
namespace {

// Mock classifier shape. Accuracy is a logistic function of class
// separation; confidence (the believed-class logit) scales linearly with it.
constexpr double kAccMidpoint = 2.5;
constexpr double kAccSlope = 1.1;
constexpr double kConfBase = 1.0;
constexpr double kConfSlope = 1.0;
constexpr double kLogitJitter = 0.25;
constexpr double kStrongViewConf = 0.9;  // strong-view predictions are softer

double unif(std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double unif(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> unit_noise(std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<double> g(d);
    double n2 = 0.0;
    do {
        n2 = 0.0;
        for (double& v : g) {
            v = nd(rng);
            n2 += v * v;
        }
    } while (n2 < 1e-24);
    const double inv = 1.0 / std::sqrt(n2);
    for (double& v : g) v *= inv;
    return g;
}

}  // namespace

void WorldConfig::validate() const {
    if (unlabeled_count == 0) throw InvalidConfigError("world.N must be >= 1");
    if (class_count < 2) throw InvalidConfigError("world.C must be >= 2");
    if (labeled_count < class_count)
        throw InvalidConfigError("world.M must be >= world.C (one label per class)");
    if (dim == 0) throw InvalidConfigError("world.d must be >= 1");
    if (class_sep < 0.0) throw InvalidConfigError("world.class_sep must be >= 0");
    if (sep_growth < 0.0) throw InvalidConfigError("world.sep_growth must be >= 0");
    if (view_noise < 0.0) throw InvalidConfigError("world.view_noise must be >= 0");
    if (!(label_noise >= 0.0 && label_noise < 1.0))
        throw InvalidConfigError("world.label_noise must be in [0, 1)");
    if (imbalance < 1.0) throw InvalidConfigError("world.imbalance must be >= 1");
    if (!classifier_bias.empty()) {
        if (classifier_bias.size() != class_count)
            throw InvalidConfigError("world.classifier_bias must have C entries");
        for (double b : classifier_bias)
            if (!(b > 0.0)) throw InvalidConfigError("world.classifier_bias entries must be > 0");
    }
}

WorldConfig WorldConfig::biased_preset() {
    WorldConfig cfg;
    cfg.unlabeled_count = 4000;
    cfg.labeled_count = 40;
    cfg.class_count = 10;
    cfg.dim = 32;
    cfg.class_sep = 1.5;
    cfg.sep_growth = 0.1;
    cfg.view_noise = 0.35;
    cfg.classifier_bias.assign(10, 1.0);
    cfg.classifier_bias[0] = 2.0;  // one overconfident class
    cfg.label_noise = 0.1;
    cfg.imbalance = 1.0;
    cfg.rng_seed = 7;
    return cfg;
}

World::World(WorldConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    const std::size_t c = cfg_.class_count;
    const std::size_t d = cfg_.dim;

    std::mt19937_64 dir_rng(mix_seed(cfg_.rng_seed, 1));
    class_dirs_.resize(c * d);
    for (std::size_t i = 0; i < c; ++i) {
        const auto g = unit_noise(d, dir_rng);
        std::copy(g.begin(), g.end(), class_dirs_.begin() + i * d);
    }

    // Class sizes follow a geometric ramp with max/min ratio = imbalance.
    std::vector<double> weight(c);
    for (std::size_t i = 0; i < c; ++i) {
        const double t = c > 1 ? static_cast<double>(i) / static_cast<double>(c - 1) : 0.0;
        weight[i] = std::pow(cfg_.imbalance, -t);
    }
    const double wsum = std::accumulate(weight.begin(), weight.end(), 0.0);
    const std::size_t n = cfg_.unlabeled_count;
    std::vector<std::size_t> quota(c);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < c; ++i) {
        quota[i] = static_cast<std::size_t>(std::floor(weight[i] / wsum * static_cast<double>(n)));
        assigned += quota[i];
    }
    for (std::size_t i = 0; assigned < n; i = (i + 1) % c) {
        ++quota[i];
        ++assigned;
    }
    truth_.reserve(n);
    for (std::size_t i = 0; i < c; ++i)
        truth_.insert(truth_.end(), quota[i], static_cast<std::uint32_t>(i));
    std::mt19937_64 truth_rng(mix_seed(cfg_.rng_seed, 2));
    std::shuffle(truth_.begin(), truth_.end(), truth_rng);

    labeled_cls_.resize(cfg_.labeled_count);
    for (std::size_t j = 0; j < cfg_.labeled_count; ++j)
        labeled_cls_[j] = static_cast<std::uint32_t>(j % c);
}

double World::separation_at(int epoch) const {
    return cfg_.class_sep + cfg_.sep_growth * static_cast<double>(epoch);
}

void World::make_sample_views(std::uint32_t cls, double sep, std::mt19937_64& rng,
                              UnitVector& q_weak, UnitVector& q_strong) const {
    const std::size_t d = cfg_.dim;
    const double* mu = class_dirs_.data() + static_cast<std::size_t>(cls) * d;

    std::vector<double> latent = unit_noise(d, rng);
    for (std::size_t j = 0; j < d; ++j) latent[j] += sep * mu[j];
    const UnitVector base = l2_normalize(latent);

    auto view = [&](void) {
        std::vector<double> raw = unit_noise(d, rng);
        for (std::size_t j = 0; j < d; ++j)
            raw[j] = base[j] + cfg_.view_noise * raw[j];
        return l2_normalize(raw);
    };
    q_weak = view();
    q_strong = view();
}

ProbDist World::mock_prediction(std::uint32_t truth, double sep, bool strong_view,
                                std::mt19937_64& rng) const {
    const std::size_t c = cfg_.class_count;
    const double acc = 1.0 / (1.0 + std::exp(-(sep - kAccMidpoint) * kAccSlope));

    auto other_class = [&](std::uint32_t avoid) {
        const auto r = static_cast<std::uint32_t>(
            std::uniform_int_distribution<std::size_t>(0, c - 2)(rng));
        return r >= avoid ? r + 1 : r;
    };

    // Believed class plus the class it is confused with. Erroneous beliefs
    // keep a sizeable logit on the truth: a confused classifier, not an
    // adversarial one.
    std::uint32_t believed;
    std::uint32_t runner_up;
    double conf_factor;
    double runner_strength;
    if (unif(rng) < cfg_.label_noise) {
        believed = static_cast<std::uint32_t>(
            std::uniform_int_distribution<std::size_t>(0, c - 1)(rng));
        runner_up = believed == truth ? other_class(believed) : truth;
        conf_factor = unif(rng, 0.35, 0.85);
        runner_strength = unif(rng, 0.3, 0.9);
    } else if (unif(rng) < acc) {
        believed = truth;
        runner_up = other_class(believed);
        conf_factor = unif(rng, 0.75, 1.25);
        runner_strength = unif(rng, 0.0, 0.7);
    } else {
        believed = other_class(truth);
        runner_up = truth;
        conf_factor = unif(rng, 0.5, 1.0);
        runner_strength = unif(rng, 0.5, 0.95);
    }

    double a = (kConfBase + kConfSlope * sep) * conf_factor;
    if (strong_view) a *= kStrongViewConf;

    std::normal_distribution<double> jitter(0.0, kLogitJitter);
    std::vector<double> logits(c);
    for (std::size_t j = 0; j < c; ++j) logits[j] = jitter(rng);
    logits[believed] += a;
    logits[runner_up] += a * runner_strength;

    const ProbDist raw = tempered_softmax(logits, 1.0);
    if (cfg_.classifier_bias.empty()) return raw;

    std::vector<double> biased(c);
    double sum = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
        biased[j] = raw[j] * cfg_.classifier_bias[j];
        sum += biased[j];
    }
    for (double& p : biased) p /= sum;
    return ProbDist::adopt_unchecked(std::move(biased));
}

EpochStream World::epoch_stream(int epoch, std::size_t batch_labeled,
                                std::size_t mu) const {
    if (batch_labeled == 0) throw InvalidConfigError("engine.B must be >= 1");
    if (mu == 0) throw InvalidConfigError("engine.mu must be >= 1");
    return EpochStream(this, epoch, batch_labeled, mu);
}

EpochStream::EpochStream(const World* world, int epoch, std::size_t b, std::size_t mu)
    : world_(world),
      epoch_(epoch),
      b_(b),
      mu_(mu),
      sep_(world->separation_at(epoch)),
      rng_(mix_seed(world->config().rng_seed, 0x10000 + static_cast<std::uint64_t>(epoch))) {
    order_.resize(world->config().unlabeled_count);
    std::iota(order_.begin(), order_.end(), 0u);
    std::shuffle(order_.begin(), order_.end(), rng_);
    labeled_order_.resize(world->config().labeled_count);
    std::iota(labeled_order_.begin(), labeled_order_.end(), 0u);
    std::shuffle(labeled_order_.begin(), labeled_order_.end(), rng_);
}

std::size_t EpochStream::total_unlabeled() const {
    return world_->config().unlabeled_count;
}

std::optional<Batch> EpochStream::next() {
    if (pos_ >= order_.size()) return std::nullopt;

    Batch batch;
    batch.labeled.reserve(b_);
    for (std::size_t j = 0; j < b_; ++j) {
        const std::uint32_t idx = labeled_order_[labeled_pos_];
        labeled_pos_ = (labeled_pos_ + 1) % labeled_order_.size();
        LabeledSample s;
        s.cls = world_->labeled_classes()[idx];
        UnitVector unused_strong;
        world_->make_sample_views(s.cls, sep_, rng_, s.q_weak, unused_strong);
        s.p_x = world_->mock_prediction(s.cls, sep_, /*strong_view=*/false, rng_);
        batch.labeled.push_back(std::move(s));
    }

    const std::size_t take = std::min(mu_ * b_, order_.size() - pos_);
    batch.unlabeled.reserve(take);
    for (std::size_t j = 0; j < take; ++j, ++pos_) {
        const std::uint32_t id = order_[pos_];
        UnlabeledSample s;
        s.id = id;
        s.truth = world_->ground_truth()[id];
        world_->make_sample_views(s.truth, sep_, rng_, s.q_weak, s.q_strong);
        s.p_weak = world_->mock_prediction(s.truth, sep_, /*strong_view=*/false, rng_);
        s.p_strong = world_->mock_prediction(s.truth, sep_, /*strong_view=*/true, rng_);
        batch.unlabeled.push_back(std::move(s));
    }
    return batch;
}

void World::dump_ground_truth_csv(std::ostream& out) const {
    out << "sample_id,true_class\n";
    for (std::size_t i = 0; i < truth_.size(); ++i)
        out << i << ',' << truth_[i] << "\n";
}

}  // namespace plr
