#include "plr/experiment.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace plr {
namespace {

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw Error("cannot open output file: " + p.string());
    return out;
}

std::string format_value(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

}  // namespace

std::vector<EpochReport> run_in_memory(const RunConfig& cfg) {
    World world(cfg.world);
    Engine engine(cfg.engine_config(), cfg.world.unlabeled_count, cfg.world.class_count,
                  cfg.world.dim);
    std::vector<EpochReport> reports;
    reports.reserve(static_cast<std::size_t>(cfg.epochs));
    for (int e = 0; e < cfg.epochs; ++e) {
        EpochStream stream = world.epoch_stream(e, cfg.batch_labeled, cfg.mu);
        reports.push_back(engine.run_epoch(stream));
    }
    return reports;
}

std::vector<EpochReport> run_experiment(const RunConfig& cfg,
                                        const std::filesystem::path& out_dir,
                                        std::ostream* log) {
    std::filesystem::create_directories(out_dir);

    const EngineConfig ecfg = cfg.engine_config();
    nlohmann::ordered_json header{
        {"N", cfg.world.unlabeled_count},
        {"M", cfg.world.labeled_count},
        {"C", cfg.world.class_count},
        {"d", cfg.world.dim},
        {"K", ecfg.cluster_count},
        {"gamma", ecfg.gamma},
        {"lambda_dual", ecfg.lambda_dual},
        {"alpha", ecfg.alpha},
        {"tau", ecfg.tau},
        {"T", ecfg.temperature},
        {"target_temp_mult", ecfg.target_temp_mult},
        {"H", ecfg.heads},
        {"warmup_epochs", ecfg.warmup_epochs},
        {"da_momentum", ecfg.da_momentum},
        {"epochs", cfg.epochs},
        {"B", cfg.batch_labeled},
        {"mu", cfg.mu},
    };
    if (log)
        *log << "run: N=" << cfg.world.unlabeled_count << " C=" << cfg.world.class_count
             << " d=" << cfg.world.dim << " K=" << ecfg.cluster_count
             << " gamma=" << ecfg.gamma << " epochs=" << cfg.epochs << "\n";

    open_out(out_dir / "run_config.json") << cfg.to_json().dump(2) << "\n";
    open_out(out_dir / "run_header.json") << header.dump(2) << "\n";

    World world(cfg.world);
    {
        auto gt = open_out(out_dir / "ground_truth.csv");
        world.dump_ground_truth_csv(gt);
    }

    Engine engine(ecfg, cfg.world.unlabeled_count, cfg.world.class_count, cfg.world.dim);

    auto jsonl = open_out(out_dir / "report.jsonl");
    auto csv = open_out(out_dir / "summary.csv");
    EpochReport::write_csv_header(csv);

    std::vector<EpochReport> reports;
    reports.reserve(static_cast<std::size_t>(cfg.epochs));
    for (int e = 0; e < cfg.epochs; ++e) {
        EpochStream stream = world.epoch_stream(e, cfg.batch_labeled, cfg.mu);
        EpochReport r = engine.run_epoch(stream);
        jsonl << r.to_json().dump() << "\n";
        r.append_csv(csv);
        if (log && (e % 10 == 0 || e + 1 == cfg.epochs))
            *log << "  epoch " << e << ": acc_cls=" << r.pl_acc_classifier
                 << " acc_ref=" << r.pl_acc_refined << " retention=" << r.retention_rate
                 << "\n";
        reports.push_back(std::move(r));
    }

    {
        auto banks = open_out(out_dir / "banks.csv");
        engine.banks().dump_csv(banks);
    }
    {
        auto protos = open_out(out_dir / "prototypes.csv");
        engine.prototypes().dump_csv(protos);
    }
    const auto tables = engine.tables();
    for (std::size_t h = 0; h < tables.size(); ++h) {
        auto t = open_out(out_dir / ("cluster_labels_h" + std::to_string(h) + ".csv"));
        tables[h].dump_csv(t);
    }
    if (const MultiHeadState* heads = engine.clusters()) {
        for (std::size_t h = 0; h < heads->head_count(); ++h) {
            auto s = open_out(out_dir / ("cluster_state_h" + std::to_string(h) + ".json"));
            s << heads->head(h).snapshot().dump(2) << "\n";
        }
    }
    return reports;
}

RunConfig apply_sweep_param(const RunConfig& base, const std::string& param,
                            double value) {
    RunConfig cfg = base;
    if (param == "n") {
        cfg.cluster_count.reset();
        cfg.neighbourhood = value;
    } else if (param == "alpha") {
        cfg.alpha = value;
    } else if (param == "d") {
        cfg.world.dim = static_cast<std::size_t>(value);
    } else if (param == "tau") {
        cfg.tau = value;
    } else if (param == "H") {
        cfg.heads = static_cast<std::size_t>(value);
    } else if (param == "lambda_dual") {
        cfg.lambda_dual = value;
    } else if (param == "target_temp_mult") {
        cfg.target_temp_mult = value;
    } else {
        throw InvalidConfigError("unknown sweep parameter: " + param);
    }
    cfg.engine_config();  // revalidate the combination
    return cfg;
}

void run_sweep(const RunConfig& base, const std::string& param,
               const std::vector<double>& values,
               const std::filesystem::path& out_dir, std::ostream* log) {
    if (values.empty()) throw InvalidConfigError("sweep needs at least one value");
    std::filesystem::create_directories(out_dir);
    auto combined = open_out(out_dir / "sweep_summary.csv");
    combined << "param,value,K,gamma,mean_acc_refined_last10,mean_acc_classifier_last10,"
                "final_retention,final_min_cluster_size,mean_disagreement_last10\n";
    combined.precision(17);

    for (double v : values) {
        const RunConfig cfg = apply_sweep_param(base, param, v);
        const auto sub = out_dir / (param + "_" + format_value(v));
        if (log) *log << "sweep " << param << "=" << v << " -> " << sub.string() << "\n";
        const auto reports = run_experiment(cfg, sub, log);

        const std::size_t window = std::min<std::size_t>(10, reports.size());
        double ref = 0.0, cls = 0.0, dis = 0.0;
        for (std::size_t i = reports.size() - window; i < reports.size(); ++i) {
            ref += reports[i].pl_acc_refined;
            cls += reports[i].pl_acc_classifier;
            dis += reports[i].disagreement_rate;
        }
        const EngineConfig ecfg = cfg.engine_config();
        combined << param << ',' << v << ',' << ecfg.cluster_count << ',' << ecfg.gamma
                 << ',' << ref / static_cast<double>(window) << ','
                 << cls / static_cast<double>(window) << ','
                 << reports.back().retention_rate << ','
                 << reports.back().min_cluster_size << ','
                 << dis / static_cast<double>(window) << "\n";
    }
}

}  // namespace plr
