#pragma once

// Partitioning, scoring, significance and agreement statistics, learning curves.

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmark/ensemble.hpp"
#include "tmark/error.hpp"
#include "tmark/models.hpp"
#include "tmark/rng.hpp"

namespace tmark {

struct SplitRatios {
    double train = 0.8;
    double dev = 0.1;
    double test = 0.1;
};

struct Partition {
    std::vector<std::string> train_ids;
    std::vector<std::string> dev_ids;
    std::vector<std::string> test_ids;
    std::uint64_t seed = 0;
};

/// Seeded shuffle, then contiguous train/dev/test slices (sizes rounded to nearest).
inline Partition partition(std::vector<std::string> ids, std::uint64_t seed, const SplitRatios& ratios = {}) {
    if (ids.size() < 10) throw ConfigError("partition needs at least 10 ids, got " + std::to_string(ids.size()));
    if (ratios.train < 0 || ratios.dev < 0 || ratios.test < 0 ||
        std::abs(ratios.train + ratios.dev + ratios.test - 1.0) > 1e-9) {
        throw ConfigError("split ratios must be non-negative and sum to 1");
    }
    {
        std::set<std::string> seen(ids.begin(), ids.end());
        if (seen.size() != ids.size()) throw ConfigError("partition ids must be unique");
    }
    Rng rng(seed);
    rng.shuffle(ids);
    const double n = static_cast<double>(ids.size());
    std::size_t n_train = static_cast<std::size_t>(std::llround(ratios.train * n));
    std::size_t n_dev = static_cast<std::size_t>(std::llround(ratios.dev * n));
    n_train = std::min(n_train, ids.size());
    n_dev = std::min(n_dev, ids.size() - n_train);

    Partition out;
    out.seed = seed;
    out.train_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.dev_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train),
                       ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_dev));
    out.test_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train + n_dev), ids.end());
    return out;
}

struct LabelScore {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
    std::uint64_t support = 0;
};

struct EvalReport {
    double overall_accuracy = 0.0;
    /// Support-weighted mean of the per-label F-scores.
    double overall_f_score = 0.0;
    std::size_t instances = 0;
    std::map<std::string, LabelScore> per_label;
    std::map<std::string, std::map<std::string, std::uint64_t>> confusion;  ///< gold -> predicted -> count

    nlohmann::json to_json() const {
        nlohmann::json labels = nlohmann::json::object();
        for (const auto& [label, s] : per_label) {
            labels[label] = {{"precision", s.precision}, {"recall", s.recall}, {"f_score", s.f_score}, {"support", s.support}};
        }
        return nlohmann::json{{"accuracy", overall_accuracy},
                              {"f_score", overall_f_score},
                              {"instances", instances},
                              {"per_label", std::move(labels)},
                              {"confusion", confusion}};
    }

    /// Aligned columns: label, support, accuracy (recall) and F-score, in percent.
    std::string to_table(const std::string& title = "") const {
        std::ostringstream out;
        if (!title.empty()) out << title << '\n';
        out << std::left << std::setw(12) << "TMark" << std::right << std::setw(9) << "Support" << std::setw(10)
            << "Accuracy" << std::setw(10) << "F-score" << '\n';
        out << std::fixed << std::setprecision(1);
        for (const auto& [label, s] : per_label) {
            out << std::left << std::setw(12) << label << std::right << std::setw(9) << s.support << std::setw(10)
                << 100.0 * s.recall << std::setw(10) << 100.0 * s.f_score << '\n';
        }
        out << std::left << std::setw(12) << "All" << std::right << std::setw(9) << instances << std::setw(10)
            << 100.0 * overall_accuracy << std::setw(10) << 100.0 * overall_f_score << '\n';
        return out.str();
    }
};

inline EvalReport score(const std::vector<std::string>& gold, const std::vector<std::string>& pred) {
    if (gold.size() != pred.size()) {
        throw ConfigError("gold and predicted label lists differ in length (" + std::to_string(gold.size()) + " vs " +
                          std::to_string(pred.size()) + ")");
    }
    if (gold.empty()) throw ConfigError("cannot score an empty label list");

    EvalReport report;
    report.instances = gold.size();
    std::set<std::string> labels(gold.begin(), gold.end());
    labels.insert(pred.begin(), pred.end());
    std::map<std::string, std::uint64_t> predicted, correct;
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        ++report.confusion[gold[i]][pred[i]];
        ++report.per_label[gold[i]].support;
        ++predicted[pred[i]];
        if (gold[i] == pred[i]) {
            ++correct[gold[i]];
            ++hits;
        }
    }
    double weighted_f = 0.0;
    for (const auto& label : labels) {
        auto& s = report.per_label[label];
        double tp = static_cast<double>(correct[label]);
        s.precision = predicted[label] ? tp / static_cast<double>(predicted[label]) : 0.0;
        s.recall = s.support ? tp / static_cast<double>(s.support) : 0.0;
        s.f_score = (s.precision + s.recall) > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
        weighted_f += s.f_score * static_cast<double>(s.support);
    }
    const double n = static_cast<double>(gold.size());
    report.overall_accuracy = static_cast<double>(hits) / n;
    report.overall_f_score = weighted_f / n;
    return report;
}

struct ChiSquareResult {
    double statistic = 0.0;
    bool significant = false;  ///< statistic > 3.841 (df = 1, p < 0.05)
};

/// Pearson chi-square (no continuity correction) on the 2x2 table of
/// correct/incorrect counts for two classifiers.
inline ChiSquareResult chi_square(std::uint64_t correct1, std::uint64_t wrong1, std::uint64_t correct2,
                                  std::uint64_t wrong2) {
    const double a = static_cast<double>(correct1), b = static_cast<double>(wrong1);
    const double c = static_cast<double>(correct2), d = static_cast<double>(wrong2);
    const double n = a + b + c + d;
    const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
    if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) return {};
    const double diff = a * d - b * c;
    ChiSquareResult out;
    out.statistic = n * diff * diff / (r1 * r2 * c1 * c2);
    out.significant = out.statistic > 3.841;
    return out;
}

inline ChiSquareResult chi_square(const std::vector<std::string>& gold, const std::vector<std::string>& pred1,
                                  const std::vector<std::string>& pred2) {
    if (gold.size() != pred1.size() || gold.size() != pred2.size()) {
        throw ConfigError("chi_square: label lists differ in length");
    }
    std::uint64_t ok1 = 0, ok2 = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        ok1 += gold[i] == pred1[i];
        ok2 += gold[i] == pred2[i];
    }
    return chi_square(ok1, gold.size() - ok1, ok2, gold.size() - ok2);
}

/// Cohen's kappa with rater-specific marginals. When chance agreement is 1 the
/// coefficient is 1 for perfect observed agreement and 0 otherwise.
inline double kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.size() != b.size()) throw ConfigError("kappa: rater label lists differ in length");
    if (a.empty()) throw ConfigError("kappa: need at least one rated item");
    const double n = static_cast<double>(a.size());
    std::map<std::string, double> ma, mb;
    double agree = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma[a[i]] += 1.0;
        mb[b[i]] += 1.0;
        if (a[i] == b[i]) agree += 1.0;
    }
    double p_o = agree / n;
    double p_e = 0.0;
    for (const auto& [label, count] : ma) {
        auto it = mb.find(label);
        if (it != mb.end()) p_e += (count / n) * (it->second / n);
    }
    if (p_e >= 1.0) return p_o >= 1.0 ? 1.0 : 0.0;
    return (p_o - p_e) / (1.0 - p_e);
}

/// Mean of kappa over all unordered rater pairs.
inline double pairwise_mean_kappa(const std::vector<std::vector<std::string>>& raters) {
    if (raters.size() < 2) throw ConfigError("pairwise kappa needs at least two raters");
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < raters.size(); ++i) {
        for (std::size_t j = i + 1; j < raters.size(); ++j) {
            sum += kappa(raters[i], raters[j]);
            ++pairs;
        }
    }
    return sum / static_cast<double>(pairs);
}

struct CurvePoint {
    std::size_t size;
    double accuracy;
};

/// Accuracy on `eval_set` after training on growing prefixes of a seeded shuffle of `train`.
inline std::vector<CurvePoint> learning_curve(const std::vector<Example>& train, const std::vector<Example>& eval_set,
                                              ModelKind kind, const FeatureConfig& config, const MarkerSet& markers,
                                              const std::vector<std::size_t>& sizes, std::uint64_t seed) {
    if (eval_set.empty()) throw ConfigError("learning curve needs a non-empty evaluation set");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] == 0) throw ConfigError("learning curve sizes must be positive");
        if (sizes[i] > train.size()) {
            throw ConfigError("learning curve size " + std::to_string(sizes[i]) + " exceeds the " +
                              std::to_string(train.size()) + " training instances");
        }
        if (i > 0 && sizes[i] < sizes[i - 1]) throw ConfigError("learning curve sizes must be ascending");
    }
    std::vector<std::size_t> order(train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    return detail::parallel_map<CurvePoint>(sizes.size(), [&](std::size_t k) {
        std::vector<Example> prefix;
        prefix.reserve(sizes[k]);
        for (std::size_t i = 0; i < sizes[k]; ++i) prefix.push_back(train[order[i]]);
        auto model = MarkerModel::train(prefix, kind, config, markers);
        return CurvePoint{sizes[k], accuracy(model, eval_set)};
    });
}

}  // namespace tmark
