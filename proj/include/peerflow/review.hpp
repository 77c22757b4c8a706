#pragma once

#include "peerflow/config.hpp"
#include "peerflow/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace peerflow {

struct ReviewScore {
    std::int64_t manuscript_id = 0;
    int reviewer_id = 0;
    double value = 0.0;
    int issue = 0;
};

struct Thresholds {
    double theta1 = 8.0;
    double theta2 = 6.0;
    double theta3 = 4.0;

    static Thresholds from(const std::array<double, 3>& th) { return {th[0], th[1], th[2]}; }
    std::array<double, 3> as_array() const { return {theta1, theta2, theta3}; }
    bool strictly_ordered() const { return theta1 > theta2 && theta2 > theta3; }
};

/// Reviewers drawn for one manuscript.
struct Assignment {
    std::int64_t manuscript_id = 0;
    std::vector<int> reviewer_ids;
};

/// Draw `count` distinct reviewers uniformly without replacement (Floyd's
/// algorithm) and bump their current-issue load.
inline std::vector<int> draw_reviewers(std::span<Reviewer> reviewers, int count, RngStream& rng)
{
    const auto pool = static_cast<int>(reviewers.size());
    if (count > pool) {
        throw std::invalid_argument("assign_reviewers: more reviewers per manuscript than reviewers available");
    }
    std::vector<int> picked;
    picked.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int j = pool - count; j < pool; ++j) {
        const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(j) + 1));
        const bool seen = std::find(picked.begin(), picked.end(), t) != picked.end();
        picked.push_back(seen ? j : t);
    }
    for (int idx : picked) {
        reviewers[static_cast<std::size_t>(idx)].load_current_issue += 1;
    }
    return picked;
}

/// Give each manuscript `per_manuscript` distinct reviewers. Reviewer ids are
/// their positions in `reviewers`.
inline std::vector<Assignment> assign_reviewers(std::span<const Manuscript> manuscripts,
                                                std::span<Reviewer> reviewers, int per_manuscript,
                                                RngStream& rng)
{
    if (per_manuscript < 1 || per_manuscript > static_cast<int>(reviewers.size())) {
        throw std::invalid_argument("assign_reviewers: more reviewers per manuscript than reviewers available");
    }
    std::vector<Assignment> out;
    out.reserve(manuscripts.size());
    for (const auto& m : manuscripts) {
        out.push_back({m.id, draw_reviewers(reviewers, per_manuscript, rng)});
    }
    return out;
}

inline double noise_variance(const NoiseParams& params, int load)
{
    if (load < 1) {
        throw std::invalid_argument("reviewer scored with no assignment");
    }
    return params.beta * std::pow(static_cast<double>(load), params.gamma);
}

/// Multiplicative review: max(0, eta * (1 + delta)).
inline double noisy_score(double eta, double delta) { return std::max(0.0, eta * (1.0 + delta)); }

/// One reviewer's score. The reviewer's load must already be final for the issue.
inline ReviewScore score_manuscript(const Manuscript& m, const Reviewer& reviewer, const NoiseParams& params,
                                    RngStream& rng, int issue = 0)
{
    const double delta = gaussian(rng, 0.0, noise_variance(params, reviewer.load_current_issue));
    return {m.id, reviewer.id, noisy_score(m.eta, delta), issue};
}

/// Arithmetic mean of fresh scores, blended 50/50 with `prior` when present.
inline double aggregate_score(std::span<const double> scores, std::optional<double> prior = std::nullopt)
{
    if (scores.empty()) {
        throw std::invalid_argument("aggregate_score: no scores");
    }
    // Shifted mean: exact when every score is equal.
    const double base = scores.front();
    double offset = 0.0;
    for (double s : scores) offset += s - base;
    const double mean = base + offset / static_cast<double>(scores.size());
    return prior ? 0.5 * mean + 0.5 * *prior : mean;
}

inline double aggregate_score(std::span<const ReviewScore> scores, std::optional<double> prior = std::nullopt)
{
    std::vector<double> values;
    values.reserve(scores.size());
    for (const auto& s : scores) values.push_back(s.value);
    return aggregate_score(std::span<const double>(values), prior);
}

/// Post-rejection revision. The gain's mean uses k before the increment.
inline Manuscript revise(Manuscript m, const RevisionParams& params, RngStream& rng)
{
    const double mean = params.mu * std::pow(params.alpha, m.k_revisions);
    const double gain = gaussian(rng, mean, params.sigma * params.sigma);
    m.eta = std::max(0.0, m.eta + gain);
    m.k_revisions += 1;
    return m;
}

inline constexpr double kThresholdGap = 1e-6;

/// Re-derive thresholds from the issue just completed: each theta becomes the
/// lowest per-journal mean published quality within its quartile. Quartiles
/// with no publications in `issue` keep their previous value.
inline Thresholds update_thresholds(std::span<const Journal> journals, const Thresholds& current, int issue)
{
    std::array<double, 3> th = current.as_array();
    std::array<std::optional<double>, 3> lowest{};
    for (const auto& j : journals) {
        const int q = index(j.quartile);
        if (q > 2 || j.published_issues.empty() || j.published_issues.back() != issue) continue;
        const double latest = j.quality_per_issue.back();
        if (!lowest[q] || latest < *lowest[q]) lowest[q] = latest;
    }
    for (int q = 0; q < 3; ++q) {
        if (lowest[q]) th[q] = *lowest[q];
    }
    th[1] = std::min(th[1], th[0] - kThresholdGap);
    th[2] = std::min(th[2], th[1] - kThresholdGap);
    return Thresholds::from(th);
}

} // namespace peerflow
