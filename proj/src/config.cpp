#include "plr/config.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace plr {
namespace {

using nlohmann::json;

// Field extraction that reports the fully qualified field name on error.
template <typename T>
T require(const json& j, const std::string& scope, const std::string& key) {
    if (!j.contains(key))
        throw InvalidConfigError("missing required field: " + scope + key);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidConfigError("field has wrong type: " + scope + key);
    }
}

template <typename T>
T optional_field(const json& j, const std::string& scope, const std::string& key,
                 T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidConfigError("field has wrong type: " + scope + key);
    }
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
    RunConfig cfg;
    if (!j.contains("world")) throw InvalidConfigError("missing required field: world");
    const json& w = j.at("world");
    cfg.world.unlabeled_count = require<std::size_t>(w, "world.", "N");
    cfg.world.labeled_count = require<std::size_t>(w, "world.", "M");
    cfg.world.class_count = require<std::size_t>(w, "world.", "C");
    cfg.world.dim = require<std::size_t>(w, "world.", "d");
    cfg.world.class_sep = optional_field(w, "world.", "class_sep", cfg.world.class_sep);
    cfg.world.sep_growth = optional_field(w, "world.", "sep_growth", cfg.world.sep_growth);
    cfg.world.view_noise = optional_field(w, "world.", "view_noise", cfg.world.view_noise);
    cfg.world.classifier_bias = optional_field(w, "world.", "classifier_bias",
                                               cfg.world.classifier_bias);
    cfg.world.label_noise = optional_field(w, "world.", "label_noise", cfg.world.label_noise);
    cfg.world.imbalance = optional_field(w, "world.", "imbalance", cfg.world.imbalance);
    cfg.world.rng_seed = optional_field(w, "world.", "rng_seed", cfg.world.rng_seed);
    cfg.world.validate();

    if (!j.contains("engine")) throw InvalidConfigError("missing required field: engine");
    const json& e = j.at("engine");
    if (e.contains("K")) cfg.cluster_count = require<std::size_t>(e, "engine.", "K");
    if (e.contains("n")) cfg.neighbourhood = require<double>(e, "engine.", "n");
    if (cfg.cluster_count && cfg.neighbourhood)
        throw InvalidConfigError("engine.K and engine.n are mutually exclusive");
    if (!cfg.cluster_count && !cfg.neighbourhood)
        throw InvalidConfigError("missing required field: engine.K or engine.n");
    if (cfg.neighbourhood && !(*cfg.neighbourhood > 0.0))
        throw InvalidConfigError("engine.n must be > 0");

    cfg.gamma_frac = optional_field(e, "engine.", "gamma_frac", cfg.gamma_frac);
    if (cfg.gamma_frac < 0.0) throw InvalidConfigError("engine.gamma_frac must be >= 0");
    cfg.lambda_dual = optional_field(e, "engine.", "lambda_dual", cfg.lambda_dual);
    cfg.alpha = optional_field(e, "engine.", "alpha", cfg.alpha);
    cfg.tau = optional_field(e, "engine.", "tau", cfg.tau);
    cfg.temperature = optional_field(e, "engine.", "T", cfg.temperature);
    cfg.target_temp_mult =
        optional_field(e, "engine.", "target_temp_mult", cfg.target_temp_mult);
    cfg.heads = optional_field(e, "engine.", "H", cfg.heads);
    cfg.warmup_epochs = optional_field(e, "engine.", "warmup_epochs", cfg.warmup_epochs);
    cfg.da_momentum = optional_field(e, "engine.", "da_momentum", cfg.da_momentum);
    cfg.loss_weights.lambda_u =
        optional_field(e, "engine.", "lambda_u", cfg.loss_weights.lambda_u);
    cfg.loss_weights.lambda_p =
        optional_field(e, "engine.", "lambda_p", cfg.loss_weights.lambda_p);
    cfg.loss_weights.lambda_c =
        optional_field(e, "engine.", "lambda_c", cfg.loss_weights.lambda_c);
    cfg.engine_seed = optional_field(e, "engine.", "rng_seed", cfg.engine_seed);
    cfg.epochs = require<int>(e, "engine.", "epochs");
    if (cfg.epochs < 1) throw InvalidConfigError("engine.epochs must be >= 1");
    cfg.batch_labeled = optional_field(e, "engine.", "B", cfg.batch_labeled);
    if (cfg.batch_labeled == 0) throw InvalidConfigError("engine.B must be >= 1");
    cfg.mu = optional_field(e, "engine.", "mu", cfg.mu);
    if (cfg.mu == 0) throw InvalidConfigError("engine.mu must be >= 1");

    cfg.output_dir = optional_field<std::string>(j, "", "output_dir", "");

    // Resolve derived quantities now so bad combinations fail at load time.
    cfg.engine_config();
    return cfg;
}

RunConfig RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InvalidConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return from_json(j);
}

json RunConfig::to_json() const {
    json w{
        {"N", world.unlabeled_count},
        {"M", world.labeled_count},
        {"C", world.class_count},
        {"d", world.dim},
        {"class_sep", world.class_sep},
        {"sep_growth", world.sep_growth},
        {"view_noise", world.view_noise},
        {"label_noise", world.label_noise},
        {"imbalance", world.imbalance},
        {"rng_seed", world.rng_seed},
    };
    if (!world.classifier_bias.empty()) w["classifier_bias"] = world.classifier_bias;

    json e{
        {"gamma_frac", gamma_frac},
        {"lambda_dual", lambda_dual},
        {"alpha", alpha},
        {"tau", tau},
        {"T", temperature},
        {"target_temp_mult", target_temp_mult},
        {"H", heads},
        {"warmup_epochs", warmup_epochs},
        {"da_momentum", da_momentum},
        {"lambda_u", loss_weights.lambda_u},
        {"lambda_p", loss_weights.lambda_p},
        {"lambda_c", loss_weights.lambda_c},
        {"rng_seed", engine_seed},
        {"epochs", epochs},
        {"B", batch_labeled},
        {"mu", mu},
    };
    if (cluster_count) e["K"] = *cluster_count;
    if (neighbourhood) e["n"] = *neighbourhood;

    json j{{"world", w}, {"engine", e}};
    if (!output_dir.empty()) j["output_dir"] = output_dir;
    return j;
}

std::size_t RunConfig::derived_cluster_count() const {
    if (cluster_count) return *cluster_count;
    const double n = static_cast<double>(world.unlabeled_count);
    return static_cast<std::size_t>(std::ceil(n / *neighbourhood));
}

double RunConfig::derived_gamma() const {
    const double n_per_cluster =
        neighbourhood ? *neighbourhood
                      : static_cast<double>(world.unlabeled_count) /
                            static_cast<double>(*cluster_count);
    return gamma_frac * n_per_cluster;
}

EngineConfig RunConfig::engine_config() const {
    EngineConfig e;
    e.cluster_count = derived_cluster_count();
    e.gamma = derived_gamma();
    e.lambda_dual = lambda_dual;
    e.alpha = alpha;
    e.tau = tau;
    e.temperature = temperature;
    e.target_temp_mult = target_temp_mult;
    e.heads = heads;
    e.warmup_epochs = warmup_epochs;
    e.da_momentum = da_momentum;
    e.loss_weights = loss_weights;
    e.rng_seed = engine_seed;
    e.validate(world.unlabeled_count);
    return e;
}

RunConfig RunConfig::biased_preset() {
    RunConfig cfg;
    cfg.world = WorldConfig::biased_preset();
    cfg.neighbourhood = 100.0;  // K = 40 at N = 4000
    cfg.warmup_epochs = 20;
    cfg.epochs = 51;
    cfg.batch_labeled = 64;
    cfg.mu = 7;
    cfg.engine_seed = 11;
    return cfg;
}

}  // namespace plr
