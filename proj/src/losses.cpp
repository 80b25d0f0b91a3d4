#include "plr/losses.hpp"

namespace plr {

double unlabeled_loss(std::span<const ProbDist> p_hat,
                      std::span<const ProbDist> p_strong,
                      std::span<const std::uint8_t> eta) {
    if (p_hat.size() != p_strong.size() || p_hat.size() != eta.size())
        throw LengthMismatchError("unlabeled_loss: batch length mismatch");
    if (p_hat.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < p_hat.size(); ++i) {
        if (!eta[i]) continue;
        total += cross_entropy(p_hat[i], p_strong[i]);
    }
    return total / static_cast<double>(p_hat.size());
}

double supervised_loss(std::span<const ProbDist> y, std::span<const ProbDist> p_x) {
    if (y.size() != p_x.size())
        throw LengthMismatchError("supervised_loss: batch length mismatch");
    if (y.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) total += cross_entropy(y[i], p_x[i]);
    return total / static_cast<double>(y.size());
}

double self_supervised_loss(std::span<const UnitVector> q_weak,
                            std::span<const UnitVector> q_strong,
                            std::span<const std::uint8_t> eta, double temperature,
                            double target_temp_mult) {
    if (q_weak.size() != q_strong.size() || q_weak.size() != eta.size())
        throw LengthMismatchError("self_supervised_loss: batch length mismatch");
    if (!(temperature > 0.0))
        throw NonPositiveTemperatureError("self_supervised_loss temperature must be > 0");
    if (!(target_temp_mult > 0.0))
        throw InvalidConfigError("target_temp_mult must be > 0");
    if (q_weak.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < q_weak.size(); ++i) {
        if (eta[i]) continue;
        const ProbDist target =
            tempered_softmax(q_weak[i].values(), target_temp_mult * temperature);
        const ProbDist source = tempered_softmax(q_strong[i].values(), temperature);
        total += cross_entropy(target, source);
    }
    return total / static_cast<double>(q_weak.size());
}

double total_loss(double lx, double lu, double lp, double lc, const LossWeights& w) {
    return lx + w.lambda_u * lu + w.lambda_p * lp + w.lambda_c * lc;
}

}  // namespace plr
