#pragma once

#include "peerflow/config.hpp"
#include "peerflow/systems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace peerflow {

struct IssueMetrics {
    int issue = 0;
    double mean_reviews_per_reviewer = 0.0;
    std::array<double, 4> quartile_mean_quality{}; // NaN for a band with no publications
    std::vector<int> acceptances_by_submission_count; // [t] = accepted on try t+1
    double first_try_acceptance_fraction = 0.0;
    int acceptances = 0;
    int backlog_size = 0;
    int created = 0;
    int retired = 0;
};

inline IssueMetrics compute_issue_metrics(const IssueLedger& ledger, int n_reviewers, std::span<const Journal> journals)
{
    if (n_reviewers <= 0) {
        throw std::invalid_argument("compute_issue_metrics: zero reviewers");
    }
    IssueMetrics m;
    m.issue = ledger.issue;
    m.mean_reviews_per_reviewer = static_cast<double>(ledger.reviews) / n_reviewers;
    m.acceptances = static_cast<int>(ledger.acceptances.size());
    m.backlog_size = ledger.carried_out;
    m.created = ledger.created;
    m.retired = ledger.retired;

    std::vector<double> sum(journals.size(), 0.0);
    std::vector<int> count(journals.size(), 0);
    for (const auto& a : ledger.acceptances) {
        const auto tries = static_cast<std::size_t>(a.prior_rejections) + 1;
        if (m.acceptances_by_submission_count.size() < tries) m.acceptances_by_submission_count.resize(tries, 0);
        m.acceptances_by_submission_count[tries - 1] += 1;
        sum.at(static_cast<std::size_t>(a.journal_id)) += a.eta;
        count[static_cast<std::size_t>(a.journal_id)] += 1;
    }
    if (m.acceptances > 0) {
        m.first_try_acceptance_fraction =
            static_cast<double>(m.acceptances_by_submission_count[0]) / m.acceptances;
    }

    std::array<double, 4> band_sum{};
    std::array<int, 4> band_n{};
    for (std::size_t j = 0; j < journals.size(); ++j) {
        if (count[j] == 0) continue;
        const int q = index(journals[j].quartile);
        band_sum[q] += sum[j] / count[j];
        band_n[q] += 1;
    }
    for (int q = 0; q < 4; ++q) {
        m.quartile_mean_quality[q] =
            band_n[q] > 0 ? band_sum[q] / band_n[q] : std::numeric_limits<double>::quiet_NaN();
    }
    return m;
}

inline std::vector<IssueMetrics> compute_run_metrics(std::span<const IssueLedger> ledgers, int n_reviewers,
                                                     std::span<const Journal> journals)
{
    std::vector<IssueMetrics> out;
    out.reserve(ledgers.size());
    for (const auto& l : ledgers) out.push_back(compute_issue_metrics(l, n_reviewers, journals));
    return out;
}

struct RejectionCeiling {
    int value = 0;
    bool no_data = true;
};

inline RejectionCeiling max_rejections_before_acceptance(std::span<const IssueLedger> run)
{
    if (run.empty()) {
        throw std::invalid_argument("max_rejections_before_acceptance: empty run");
    }
    RejectionCeiling out;
    for (const auto& l : run) {
        for (const auto& a : l.acceptances) {
            out.value = std::max(out.value, a.prior_rejections);
            out.no_data = false;
        }
    }
    return out;
}

/// Share of all publications in the run that had no prior rejection.
inline double run_first_try_fraction(std::span<const IssueLedger> run)
{
    long long total = 0;
    long long first = 0;
    for (const auto& l : run) {
        for (const auto& a : l.acceptances) {
            ++total;
            first += a.prior_rejections == 0 ? 1 : 0;
        }
    }
    return total > 0 ? static_cast<double>(first) / static_cast<double>(total) : 0.0;
}

/// Average ranks (1-based) with ties sharing their mean rank.
inline std::vector<double> average_ranks(std::span<const double> values)
{
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

/// Spearman rank correlation; nullopt when either side is constant.
inline std::optional<double> spearman(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) {
        throw std::invalid_argument("spearman: length mismatch");
    }
    if (x.size() < 2) return std::nullopt;
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

/// series[j][t] = quality of journal j at the end of issue t+1.
using JournalQualitySeries = std::vector<std::vector<double>>;

inline JournalQualitySeries journal_quality_series(std::span<const Journal> journals, int n_issues,
                                                   double initial = 0.0)
{
    JournalQualitySeries out(journals.size());
    for (std::size_t j = 0; j < journals.size(); ++j) {
        out[j].reserve(static_cast<std::size_t>(n_issues));
        for (int t = 1; t <= n_issues; ++t) out[j].push_back(journal_quality_at(journals[j], t, initial));
    }
    return out;
}

/// Rank persistence of journal quality between an early issue and the last
/// one. nullopt means degenerate (a constant cross-section).
inline std::optional<double> matthew_correlation(const JournalQualitySeries& series, int early_issue = 5)
{
    if (series.empty() || series.front().size() < 2) {
        throw std::invalid_argument("matthew_correlation: need at least two issues");
    }
    const std::size_t last = series.front().size() - 1;
    const std::size_t early = std::min<std::size_t>(static_cast<std::size_t>(std::max(early_issue, 1)) - 1, last);
    std::vector<double> x, y;
    for (const auto& s : series) {
        x.push_back(s[early]);
        y.push_back(s[last]);
    }
    return spearman(x, y);
}

/// The six per-run outputs reported by sensitivity sweeps.
struct RunSummary {
    std::array<double, 4> quartile_mean{};
    double burden = 0.0;
    double first_try = 0.0;
};

inline constexpr std::array<const char*, 6> kSummaryOutputs{"q1_mean", "q2_mean", "q3_mean",
                                                            "q4_mean", "burden", "first_try"};

inline double summary_value(const RunSummary& s, std::size_t output)
{
    return output < 4 ? s.quartile_mean[output] : output == 4 ? s.burden : s.first_try;
}

/// Quartile means and burden are averaged over the second half of the run
/// (issues after n/2), skipping issues where a band published nothing;
/// first-try is taken over every publication in the run.
inline RunSummary summarize_run(std::span<const IssueMetrics> metrics, std::span<const IssueLedger> ledgers)
{
    RunSummary s;
    if (metrics.empty()) return s;
    const std::size_t start = metrics.size() / 2;
    std::array<int, 4> qn{};
    int bn = 0;
    for (std::size_t i = start; i < metrics.size(); ++i) {
        for (int q = 0; q < 4; ++q) {
            if (!std::isnan(metrics[i].quartile_mean_quality[q])) {
                s.quartile_mean[q] += metrics[i].quartile_mean_quality[q];
                qn[q] += 1;
            }
        }
        s.burden += metrics[i].mean_reviews_per_reviewer;
        ++bn;
    }
    for (int q = 0; q < 4; ++q) {
        s.quartile_mean[q] = qn[q] > 0 ? s.quartile_mean[q] / qn[q] : std::numeric_limits<double>::quiet_NaN();
    }
    s.burden /= bn;
    s.first_try = run_first_try_fraction(ledgers);
    return s;
}

} // namespace peerflow
