// Run configuration: a single JSON document covering the world, the engine
// hyperparameters and the output location. K and gamma may be given directly
// or derived from the neighbourhood size n (K = ceil(N/n), gamma =
// gamma_frac * n).
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "plr/engine.hpp"
#include "plr/world.hpp"

namespace plr {

struct RunConfig {
    WorldConfig world;

    // Exactly one of cluster_count / neighbourhood must be set.
    std::optional<std::size_t> cluster_count;   // engine.K
    std::optional<double> neighbourhood;        // engine.n
    double gamma_frac = 0.9;
    double lambda_dual = 20.0;
    double alpha = 0.8;
    double tau = 0.95;
    double temperature = 0.1;
    double target_temp_mult = 5.0;
    std::size_t heads = 1;
    int warmup_epochs = 20;
    double da_momentum = 0.99;
    LossWeights loss_weights;
    std::uint64_t engine_seed = 1;

    int epochs = 51;
    std::size_t batch_labeled = 64;  // B
    std::size_t mu = 7;

    std::string output_dir;

    // Throws InvalidConfigError naming the offending field.
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load_file(const std::string& path);
    nlohmann::json to_json() const;

    // Derived quantities (resolve the K-or-n choice).
    std::size_t derived_cluster_count() const;
    double derived_gamma() const;
    EngineConfig engine_config() const;

    // The configuration exercised by the refinement-gain analysis.
    static RunConfig biased_preset();
};

}  // namespace plr
