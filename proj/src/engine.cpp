#include "plr/engine.hpp"

#include <algorithm>
#include <ostream>

#include <nlohmann/json.hpp>

#include "plr/seeding.hpp"

namespace plr {

void EngineConfig::validate(std::size_t n_unlabeled) const {
    if (cluster_count < 2) throw InvalidConfigError("engine.K must be >= 2");
    if (cluster_count > n_unlabeled)
        throw InvalidConfigError("engine.K must not exceed world.N");
    if (gamma < 0.0) throw InvalidConfigError("engine.gamma must be >= 0");
    if (gamma * static_cast<double>(cluster_count) > static_cast<double>(n_unlabeled))
        throw InvalidConfigError("engine.gamma infeasible: K * gamma exceeds N");
    if (!(lambda_dual > 0.0)) throw InvalidConfigError("engine.lambda_dual must be > 0");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw InvalidConfigError("engine.alpha must be in [0, 1]");
    if (!(tau > 0.0 && tau < 1.0)) throw InvalidConfigError("engine.tau must be in (0, 1)");
    if (!(temperature > 0.0)) throw InvalidConfigError("engine.T must be > 0");
    if (!(target_temp_mult > 0.0))
        throw InvalidConfigError("engine.target_temp_mult must be > 0");
    if (heads == 0) throw InvalidConfigError("engine.H must be >= 1");
    if (warmup_epochs < 0) throw InvalidConfigError("engine.warmup_epochs must be >= 0");
    if (!(da_momentum > 0.0 && da_momentum < 1.0))
        throw InvalidConfigError("engine.da_momentum must be in (0, 1)");
    if (loss_weights.lambda_u < 0.0 || loss_weights.lambda_p < 0.0 ||
        loss_weights.lambda_c < 0.0)
        throw InvalidConfigError("engine loss weights must be >= 0");
}

Engine::Engine(EngineConfig cfg, std::size_t n_unlabeled, std::size_t class_count,
               std::size_t dim)
    : cfg_(cfg),
      n_(n_unlabeled),
      c_(class_count),
      d_(dim),
      banks_(n_unlabeled, cfg.heads),
      protos_(class_count, dim),
      marginal_(class_count, cfg.da_momentum) {
    cfg_.validate(n_unlabeled);
}

void Engine::cluster_step(std::vector<std::uint32_t> ids, std::vector<UnitVector> q) {
    if (clusters_) {
        run_cluster_batch(ids, q);
        return;
    }
    seed_pool_.insert(seed_pool_.end(), q.begin(), q.end());
    pending_ids_.push_back(std::move(ids));
    pending_q_.push_back(std::move(q));
    if (seed_pool_.size() < cfg_.cluster_count) return;

    std::vector<ClusterState> heads;
    heads.reserve(cfg_.heads);
    try {
        for (std::size_t h = 0; h < cfg_.heads; ++h)
            heads.push_back(ClusterState::init_clusters(cfg_.cluster_count, cfg_.gamma,
                                                        seed_pool_,
                                                        mix_seed(cfg_.rng_seed, h)));
    } catch (const TooFewSeedsError&) {
        return;  // duplicates shrank the pool; keep buffering
    }
    clusters_.emplace(std::move(heads));
    seed_pool_.clear();
    seed_pool_.shrink_to_fit();
    for (std::size_t b = 0; b < pending_q_.size(); ++b)
        run_cluster_batch(pending_ids_[b], pending_q_[b]);
    pending_ids_.clear();
    pending_q_.clear();
}

void Engine::run_cluster_batch(std::span<const std::uint32_t> ids,
                               std::span<const UnitVector> q) {
    const auto per_head = clusters_->assign_batch(q);
    for (std::size_t h = 0; h < per_head.size(); ++h)
        for (std::size_t i = 0; i < ids.size(); ++i)
            banks_.record_assignment(ids[i], h, per_head[h][i]);
    clusters_->update_duals(per_head, cfg_.gamma, static_cast<std::int64_t>(n_),
                            cfg_.lambda_dual);
    clusters_->accumulate_and_update_centroids(q, per_head);
}

EpochReport Engine::run_epoch(EpochStream& stream) {
    banks_.begin_epoch(epochs_run_);

    std::size_t seen = 0;
    std::size_t cls_correct = 0, ref_correct = 0;
    std::size_t z_samples = 0, z_correct = 0, disagree = 0;
    std::size_t retained = 0, retained_unref = 0;
    double lx_sum = 0.0, lu_sum = 0.0, lp_sum = 0.0, lc_sum = 0.0;
    std::size_t labeled_seen = 0;
    std::vector<std::uint32_t> truth(n_, 0);
    std::vector<std::uint8_t> seen_flag(n_, 0);

    std::vector<ProbDist> y_onehot, p_x;
    std::vector<ProbDist> refined_batch, p_strong_batch;
    std::vector<UnitVector> qw_batch, qs_batch;
    std::vector<std::uint8_t> eta_batch;
    std::vector<std::uint32_t> ids, yhat_batch;
    std::vector<std::int32_t> head_assign(cfg_.heads, -1);

    while (auto batch = stream.next()) {
        y_onehot.clear();
        p_x.clear();
        for (const LabeledSample& s : batch->labeled) {
            if (s.cls >= c_) throw IndexOutOfRangeError("labeled class out of range");
            protos_.accumulate_labeled(s.q_weak, s.cls);
            y_onehot.push_back(ProbDist::one_hot(c_, s.cls));
            p_x.push_back(s.p_x);
        }
        if (!batch->labeled.empty()) {
            lx_sum += supervised_loss(y_onehot, p_x) *
                      static_cast<double>(batch->labeled.size());
            labeled_seen += batch->labeled.size();
        }

        const std::size_t bsz = batch->unlabeled.size();
        if (bsz == 0) continue;
        refined_batch.clear();
        p_strong_batch.clear();
        qw_batch.clear();
        qs_batch.clear();
        eta_batch.assign(bsz, 0);
        ids.assign(bsz, 0);
        yhat_batch.assign(bsz, 0);

        for (std::size_t i = 0; i < bsz; ++i) {
            UnlabeledSample& s = batch->unlabeled[i];
            if (s.id >= n_) throw IndexOutOfRangeError("unlabeled sample id out of range");
            if (seen_flag[s.id]) throw Error("sample streamed twice in one epoch");
            seen_flag[s.id] = 1;
            truth[s.id] = s.truth;
            ++seen;
            ids[i] = s.id;

            const ProbDist aligned = distribution_align(s.p_weak, marginal_);

            // Stale (previous-epoch) assignments: this epoch's pass has not
            // yet overwritten them.
            for (std::size_t h = 0; h < cfg_.heads; ++h)
                head_assign[h] = banks_.cluster_of(s.id, h);
            std::optional<ProbDist> z;
            ProbDist refined = aligned;
            if (!prev_tables_.empty()) {
                z = mean_cluster_label(prev_tables_, head_assign);
                refined = refine(aligned, prev_tables_, head_assign, cfg_.alpha);
            }

            banks_.record_prediction(s.id, refined, cfg_.tau);
            const auto yhat = static_cast<std::uint32_t>(banks_.hard_label(s.id));
            const bool eta = banks_.reliable(s.id);
            protos_.accumulate_unlabeled(s.q_weak, yhat, eta);

            const std::size_t cls_label = aligned.arg_max();
            cls_correct += cls_label == s.truth ? 1 : 0;
            ref_correct += refined.arg_max() == s.truth ? 1 : 0;
            if (z) {
                ++z_samples;
                const std::size_t z_label = z->arg_max();
                z_correct += z_label == s.truth ? 1 : 0;
                disagree += z_label != cls_label ? 1 : 0;
            }
            retained += eta ? 1 : 0;
            retained_unref += aligned.max_value() >= cfg_.tau ? 1 : 0;

            eta_batch[i] = eta ? 1 : 0;
            yhat_batch[i] = yhat;
            refined_batch.push_back(std::move(refined));
            p_strong_batch.push_back(std::move(s.p_strong));
            qw_batch.push_back(std::move(s.q_weak));
            qs_batch.push_back(std::move(s.q_strong));
        }

        lu_sum += unlabeled_loss(refined_batch, p_strong_batch, eta_batch) *
                  static_cast<double>(bsz);
        lc_sum += self_supervised_loss(qw_batch, qs_batch, eta_batch, cfg_.temperature,
                                       cfg_.target_temp_mult) *
                  static_cast<double>(bsz);
        // No prototypical loss until every class prototype exists (first epoch).
        if (protos_.all_initialized())
            lp_sum += protos_.proto_loss(qs_batch, yhat_batch, cfg_.temperature) *
                      static_cast<double>(bsz);

        cluster_step(std::vector<std::uint32_t>(ids), std::move(qw_batch));
        qw_batch = {};
    }

    if (seen != n_) throw Error("epoch stream did not cover every unlabeled sample");
    if (!clusters_) throw TooFewSeedsError("stream ended before K distinct projections arrived");

    // Epoch wrap-up: prototypes, label tables, swap, clustering epoch close.
    protos_.finalize_epoch();
    if (epochs_run_ == 0 && !protos_.all_initialized())
        throw UninitializedPrototypesError(
            "first epoch must provide a labeled sample for every class");

    std::vector<ClusterLabelTable> new_tables;
    new_tables.reserve(cfg_.heads);
    for (std::size_t h = 0; h < cfg_.heads; ++h)
        new_tables.push_back(build_cluster_labels(banks_, h, cfg_.cluster_count, c_));
    prev_tables_ = std::move(new_tables);

    std::int64_t min_cluster = 0;
    {
        std::vector<std::int64_t> counts(cfg_.heads * cfg_.cluster_count, 0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t h = 0; h < cfg_.heads; ++h) {
                const std::int32_t cl = banks_.cluster_of(i, h);
                if (cl >= 0) ++counts[h * cfg_.cluster_count + static_cast<std::size_t>(cl)];
            }
        min_cluster = *std::min_element(counts.begin(), counts.end());
    }

    const PurityReport purity =
        purity_report(banks_, truth, 0, cfg_.cluster_count, c_);

    clusters_->end_epoch(epochs_run_ + 1 >= cfg_.warmup_epochs);

    EpochReport r;
    r.epoch = epochs_run_;
    const auto dn = static_cast<double>(n_);
    r.pl_acc_classifier = static_cast<double>(cls_correct) / dn;
    r.pl_acc_cluster =
        z_samples ? static_cast<double>(z_correct) / static_cast<double>(z_samples) : 0.0;
    r.pl_acc_refined = static_cast<double>(ref_correct) / dn;
    r.disagreement_rate =
        z_samples ? static_cast<double>(disagree) / static_cast<double>(z_samples) : 0.0;
    r.retention_rate = static_cast<double>(retained) / dn;
    r.retention_rate_unrefined = static_cast<double>(retained_unref) / dn;
    r.cluster_purity_per_class = purity.per_class;
    r.purity_defined = purity.defined;
    r.min_cluster_size = min_cluster;
    r.loss_components = {
        labeled_seen ? lx_sum / static_cast<double>(labeled_seen) : 0.0,
        lu_sum / dn,
        lp_sum / dn,
        lc_sum / dn,
    };

    epochs_run_ += 1;
    return r;
}

PurityReport purity_report(const SampleBanks& banks,
                           std::span<const std::uint32_t> ground_truth,
                           std::size_t head, std::size_t cluster_count,
                           std::size_t class_count) {
    if (ground_truth.size() != banks.sample_count())
        throw LengthMismatchError("ground truth must cover every sample");

    std::vector<std::int64_t> member(cluster_count * class_count, 0);
    for (std::size_t i = 0; i < banks.sample_count(); ++i) {
        const std::int32_t cl = banks.cluster_of(i, head);
        if (cl < 0) continue;
        const std::uint32_t t = ground_truth[i];
        if (static_cast<std::size_t>(cl) >= cluster_count || t >= class_count)
            throw IndexOutOfRangeError("cluster or class out of range");
        ++member[static_cast<std::size_t>(cl) * class_count + t];
    }

    PurityReport out;
    out.per_class.assign(class_count, 0.0);
    out.defined.assign(class_count, 0);
    std::vector<double> purity_sum(class_count, 0.0);
    std::vector<std::int64_t> dominated(class_count, 0);

    for (std::size_t k = 0; k < cluster_count; ++k) {
        std::int64_t total = 0;
        std::size_t dom = 0;
        for (std::size_t c = 0; c < class_count; ++c) {
            total += member[k * class_count + c];
            if (member[k * class_count + c] > member[k * class_count + dom]) dom = c;
        }
        if (total == 0) continue;
        purity_sum[dom] +=
            static_cast<double>(member[k * class_count + dom]) / static_cast<double>(total);
        dominated[dom] += 1;
    }
    for (std::size_t c = 0; c < class_count; ++c) {
        if (dominated[c] > 0) {
            out.per_class[c] = purity_sum[c] / static_cast<double>(dominated[c]);
            out.defined[c] = 1;
        }
    }
    return out;
}

nlohmann::ordered_json EpochReport::to_json() const {
    return nlohmann::ordered_json{
        {"epoch", epoch},
        {"pl_acc_classifier", pl_acc_classifier},
        {"pl_acc_cluster", pl_acc_cluster},
        {"pl_acc_refined", pl_acc_refined},
        {"disagreement_rate", disagreement_rate},
        {"retention_rate", retention_rate},
        {"retention_rate_unrefined", retention_rate_unrefined},
        {"cluster_purity_per_class", cluster_purity_per_class},
        {"purity_defined", purity_defined},
        {"min_cluster_size", min_cluster_size},
        {"loss_x", loss_components[0]},
        {"loss_u", loss_components[1]},
        {"loss_p", loss_components[2]},
        {"loss_c", loss_components[3]},
    };
}

void EpochReport::write_csv_header(std::ostream& out) {
    out << "epoch,pl_acc_classifier,pl_acc_cluster,pl_acc_refined,disagreement_rate,"
           "retention_rate,retention_rate_unrefined,min_cluster_size,"
           "mean_cluster_purity,loss_x,loss_u,loss_p,loss_c\n";
}

void EpochReport::append_csv(std::ostream& out) const {
    double purity_sum = 0.0;
    std::size_t defined = 0;
    for (std::size_t c = 0; c < cluster_purity_per_class.size(); ++c) {
        if (purity_defined[c]) {
            purity_sum += cluster_purity_per_class[c];
            ++defined;
        }
    }
    out.precision(17);
    out << epoch << ',' << pl_acc_classifier << ',' << pl_acc_cluster << ','
        << pl_acc_refined << ',' << disagreement_rate << ',' << retention_rate << ','
        << retention_rate_unrefined << ',' << min_cluster_size << ','
        << (defined ? purity_sum / static_cast<double>(defined) : 0.0) << ','
        << loss_components[0] << ',' << loss_components[1] << ',' << loss_components[2]
        << ',' << loss_components[3] << "\n";
}

}  // namespace plr
