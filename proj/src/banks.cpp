#include "plr/banks.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace plr {

SampleBanks::SampleBanks(std::size_t sample_count, std::size_t head_count)
    : n_(sample_count), h_(head_count) {
    if (n_ == 0) throw InvalidConfigError("banks need at least one sample");
    if (h_ == 0) throw InvalidConfigError("banks need at least one head");
    hard_label_.assign(n_, -1);
    reliable_.assign(n_, 0);
    epoch_stamp_.assign(n_, -1);
    cluster_of_.assign(n_ * h_, -1);
    sim_score_.assign(n_ * h_, 0.0);
}

void SampleBanks::check_index(std::size_t i, std::size_t head) const {
    if (i >= n_) throw IndexOutOfRangeError("sample index out of range");
    if (head >= h_) throw IndexOutOfRangeError("head index out of range");
}

void SampleBanks::record_prediction(std::size_t i, const ProbDist& refined, double tau) {
    check_index(i, 0);
    if (!(tau > 0.0 && tau < 1.0)) throw InvalidConfigError("tau must be in (0, 1)");
    const std::size_t y = refined.arg_max();
    hard_label_[i] = static_cast<std::int32_t>(y);
    reliable_[i] = refined[y] >= tau ? 1 : 0;
    epoch_stamp_[i] = current_epoch_;
}

void SampleBanks::record_assignment(std::size_t i, std::size_t head, const Assignment& a) {
    check_index(i, head);
    cluster_of_[i * h_ + head] = static_cast<std::int32_t>(a.cluster);
    sim_score_[i * h_ + head] = a.similarity;
}

std::int32_t SampleBanks::hard_label(std::size_t i) const {
    check_index(i, 0);
    return hard_label_[i];
}

bool SampleBanks::reliable(std::size_t i) const {
    check_index(i, 0);
    return reliable_[i] != 0;
}

std::int32_t SampleBanks::epoch_stamp(std::size_t i) const {
    check_index(i, 0);
    return epoch_stamp_[i];
}

std::int32_t SampleBanks::cluster_of(std::size_t i, std::size_t head) const {
    check_index(i, head);
    return cluster_of_[i * h_ + head];
}

double SampleBanks::sim_score(std::size_t i, std::size_t head) const {
    check_index(i, head);
    return sim_score_[i * h_ + head];
}

void SampleBanks::dump_csv(std::ostream& out) const {
    out << "sample_id,hard_label,reliable,epoch_stamp";
    for (std::size_t h = 0; h < h_; ++h) out << ",cluster_h" << h << ",sim_h" << h;
    out << "\n";
    out.precision(17);
    for (std::size_t i = 0; i < n_; ++i) {
        out << i << ',' << hard_label_[i] << ',' << int(reliable_[i]) << ','
            << epoch_stamp_[i];
        for (std::size_t h = 0; h < h_; ++h)
            out << ',' << cluster_of_[i * h_ + h] << ',' << sim_score_[i * h_ + h];
        out << "\n";
    }
}

SampleBanks SampleBanks::load_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw Error("banks csv: missing header");
    const std::size_t heads = static_cast<std::size_t>(
        std::count(header.begin(), header.end(), ',') - 3) / 2;
    if (heads == 0) throw Error("banks csv: malformed header");

    struct Row {
        std::size_t id;
        std::int32_t label;
        int reliable;
        std::int32_t stamp;
        std::vector<std::int32_t> cluster;
        std::vector<double> sim;
    };
    std::vector<Row> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        Row r;
        char comma = 0;
        ls >> r.id >> comma >> r.label >> comma >> r.reliable >> comma >> r.stamp;
        r.cluster.resize(heads);
        r.sim.resize(heads);
        for (std::size_t h = 0; h < heads; ++h)
            ls >> comma >> r.cluster[h] >> comma >> r.sim[h];
        if (!ls) throw Error("banks csv: malformed row");
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw Error("banks csv: no rows");

    SampleBanks banks(rows.size(), heads);
    for (const Row& r : rows) {
        if (r.id >= rows.size()) throw Error("banks csv: sample id out of range");
        banks.hard_label_[r.id] = r.label;
        banks.reliable_[r.id] = r.reliable ? 1 : 0;
        banks.epoch_stamp_[r.id] = r.stamp;
        for (std::size_t h = 0; h < heads; ++h) {
            banks.cluster_of_[r.id * heads + h] = r.cluster[h];
            banks.sim_score_[r.id * heads + h] = r.sim[h];
        }
    }
    return banks;
}

ClusterLabelTable::ClusterLabelTable(std::size_t k, std::size_t c) : k_(k), c_(c) {
    if (k_ == 0 || c_ < 2) throw InvalidConfigError("label table needs K >= 1, C >= 2");
    z_.assign(k_ * c_, 1.0 / static_cast<double>(c_));
    valid_.assign(k_, 0);
}

std::span<const double> ClusterLabelTable::row(std::size_t k) const {
    if (k >= k_) throw IndexOutOfRangeError("table row out of range");
    return {z_.data() + k * c_, c_};
}

void ClusterLabelTable::set_row(std::size_t k, std::span<const double> z, bool valid) {
    if (k >= k_) throw IndexOutOfRangeError("table row out of range");
    if (z.size() != c_) throw DimensionMismatchError("table row has wrong width");
    std::copy(z.begin(), z.end(), z_.begin() + k * c_);
    valid_[k] = valid ? 1 : 0;
}

void ClusterLabelTable::dump_csv(std::ostream& out) const {
    out.precision(17);
    for (std::size_t k = 0; k < k_; ++k) {
        for (std::size_t c = 0; c < c_; ++c) {
            if (c) out << ',';
            out << z_[k * c_ + c];
        }
        out << "\n";
    }
}

ClusterLabelTable build_cluster_labels(const SampleBanks& banks, std::size_t head,
                                       std::size_t k, std::size_t c,
                                       double sim_floor) {
    if (head >= banks.head_count()) throw IndexOutOfRangeError("head index out of range");
    ClusterLabelTable table(k, c);
    std::vector<double> mass(k * c, 0.0);
    std::vector<double> row_sum(k, 0.0);

    for (std::size_t i = 0; i < banks.sample_count(); ++i) {
        const std::int32_t cl = banks.cluster_of(i, head);
        const std::int32_t y = banks.hard_label(i);
        if (cl < 0 || y < 0) continue;
        if (static_cast<std::size_t>(cl) >= k || static_cast<std::size_t>(y) >= c)
            throw IndexOutOfRangeError("recorded cluster or label out of range");
        const double w = std::max(banks.sim_score(i, head), sim_floor);
        mass[static_cast<std::size_t>(cl) * c + static_cast<std::size_t>(y)] += w;
        row_sum[static_cast<std::size_t>(cl)] += w;
    }

    std::vector<double> row(c);
    for (std::size_t cl = 0; cl < k; ++cl) {
        if (row_sum[cl] <= 0.0) continue;  // stays uniform + invalid
        for (std::size_t y = 0; y < c; ++y) row[y] = mass[cl * c + y] / row_sum[cl];
        table.set_row(cl, row, true);
    }
    return table;
}

std::int64_t footprint(const SampleBanks& banks, const ClusterLabelTable& table) {
    return banks.scalar_slots() + static_cast<std::int64_t>(table.cluster_count()) *
                                      static_cast<std::int64_t>(table.class_count());
}

}  // namespace plr
