#pragma once

#include "peerflow/io.hpp"
#include "peerflow/metrics.hpp"
#include "peerflow/quality.hpp"
#include "peerflow/sweep.hpp"
#include "peerflow/systems.hpp"

#include <array>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace peerflow {

/// Copy of `base` with n new manuscripts per issue. Per-journal capacity is
/// scaled by n / base.n (rounded) and then lowered until total capacity is
/// below n, so every size keeps the same seat pressure.
inline SimConfig with_submissions(const SimConfig& base, int n)
{
    SimConfig cfg = base;
    cfg.n_new_per_issue = n;
    const double scaled = std::round(static_cast<double>(base.capacity_per_journal) * n / base.n_new_per_issue);
    int cap = std::max(1, static_cast<int>(scaled));
    while (cap > 1 && static_cast<long long>(cap) * cfg.n_journals >= n) --cap;
    cfg.capacity_per_journal = cap;
    return cfg;
}

inline const std::vector<std::string>& figure_ids()
{
    static const std::vector<std::string> ids{"1", "3", "4", "5", "6", "7", "8"};
    return ids;
}

inline constexpr int kFigureOneSamples = 4000;

namespace figures {

inline const std::array<int, 5> kSubmissionSizes{1000, 2000, 3000, 4000, 5000};

/// Density grid plus sampled qualities.
inline void fig1(const SimConfig& cfg, std::ostream& out)
{
    const auto table = build_cdf(cfg.dist);
    out << "kind,eta,pdf,cdf\n";
    for (std::size_t i = 0; i < table.grid.size(); i += 8) {
        const double eta = table.grid[i];
        out << "grid," << io::num(eta) << ',' << io::num(quality_density(table.params, eta) / table.norm) << ','
            << io::num(table.cdf_values[i]) << '\n';
    }
    RngStream rng(cfg.seed, "figure1");
    for (int i = 0; i < kFigureOneSamples; ++i) {
        const double eta = sample_quality(table, rng);
        out << "sample," << io::num(eta) << ",," << io::num(table.cdf(eta)) << '\n';
    }
}

struct SizedRun {
    SystemKind system;
    int n;
    std::vector<IssueLedger> ledgers;
    std::vector<IssueMetrics> metrics;
    std::vector<Journal> journals;
};

inline std::vector<SizedRun> run_grid(const SimConfig& base, const std::vector<SystemKind>& systems,
                                      const std::vector<int>& sizes, unsigned threads)
{
    std::vector<SizedRun> runs;
    for (auto sys : systems) {
        for (int n : sizes) runs.push_back({sys, n, {}, {}, {}});
    }
    parallel_for(runs.size(), threads, [&](std::size_t i) {
        SimConfig cfg = with_submissions(base, runs[i].n);
        cfg.system = runs[i].system;
        auto result = run_simulation(cfg);
        runs[i].metrics = compute_run_metrics(result.ledgers, cfg.n_reviewers, result.final_state.journals);
        runs[i].ledgers = std::move(result.ledgers);
        runs[i].journals = std::move(result.final_state.journals);
    });
    return runs;
}

/// Panel a: burden at the final issue against n. Panel b: burden per issue
/// at the configured n.
inline void fig3(const SimConfig& cfg, std::ostream& out, unsigned threads)
{
    std::vector<int> sizes(kSubmissionSizes.begin(), kSubmissionSizes.end());
    const auto runs = run_grid(cfg, {SystemKind::novel, SystemKind::regular}, sizes, threads);
    const auto at_n = run_grid(cfg, {SystemKind::novel, SystemKind::regular}, {cfg.n_new_per_issue}, threads);
    out << "panel,system,n,issue,mean_reviews_per_reviewer\n";
    for (const auto& r : runs) {
        const auto& last = r.metrics.back();
        out << "a," << to_string(r.system) << ',' << r.n << ',' << last.issue << ','
            << io::num(last.mean_reviews_per_reviewer) << '\n';
    }
    for (const auto& r : at_n) {
        for (const auto& m : r.metrics) {
            out << "b," << to_string(r.system) << ',' << r.n << ',' << m.issue << ','
                << io::num(m.mean_reviews_per_reviewer) << '\n';
        }
    }
}

/// Publications by submission count over the whole run, against n.
inline void fig4(const SimConfig& cfg, std::ostream& out, unsigned threads)
{
    std::vector<int> sizes(kSubmissionSizes.begin(), kSubmissionSizes.end());
    const auto runs = run_grid(cfg, {SystemKind::regular, SystemKind::novel}, sizes, threads);
    out << "system,n,tries,acceptances\n";
    for (const auto& r : runs) {
        std::vector<long long> hist(static_cast<std::size_t>(cfg.max_resubmissions) + 1, 0);
        for (const auto& m : r.metrics) {
            for (std::size_t t = 0; t < m.acceptances_by_submission_count.size(); ++t) {
                hist[t] += m.acceptances_by_submission_count[t];
            }
        }
        for (std::size_t t = 0; t < hist.size(); ++t) {
            out << to_string(r.system) << ',' << r.n << ',' << t + 1 << ',' << hist[t] << '\n';
        }
    }
}

/// Quartile mean quality per issue for one system.
inline void quartile_series(const SimConfig& cfg, SystemKind system, std::ostream& out)
{
    SimConfig c = cfg;
    c.system = system;
    const auto result = run_simulation(c);
    const auto metrics = compute_run_metrics(result.ledgers, c.n_reviewers, result.final_state.journals);
    out << "system,issue,q1_mean,q2_mean,q3_mean,q4_mean\n";
    for (const auto& m : metrics) {
        out << to_string(system) << ',' << m.issue;
        for (double q : m.quartile_mean_quality) out << ',' << io::num(q);
        out << '\n';
    }
}

inline constexpr int kSimplifiedIssues = 40;

/// Per-journal quality trajectories of the simplified system.
inline void journal_trajectories(const SimConfig& cfg, const std::vector<int>& sizes, std::ostream& out,
                                 unsigned threads)
{
    SimConfig c = cfg;
    c.n_issues = kSimplifiedIssues;
    std::vector<SizedRun> runs;
    for (int n : sizes) runs.push_back({SystemKind::simplified, n, {}, {}, {}});
    parallel_for(runs.size(), threads, [&](std::size_t i) {
        SimConfig ci = c;
        ci.n_new_per_issue = runs[i].n;
        ci.system = SystemKind::simplified;
        auto result = run_simulation(ci);
        runs[i].journals = std::move(result.final_state.journals);
    });
    out << "n,issue,journal_id,quality\n";
    for (const auto& r : runs) {
        const auto series = journal_quality_series(r.journals, kSimplifiedIssues);
        for (int t = 0; t < kSimplifiedIssues; ++t) {
            for (std::size_t j = 0; j < series.size(); ++j) {
                out << r.n << ',' << t + 1 << ',' << j << ',' << io::num(series[j][static_cast<std::size_t>(t)])
                    << '\n';
            }
        }
    }
}

} // namespace figures

/// Write the data behind one figure. Throws std::invalid_argument for an
/// unknown id.
inline void write_figure_data(const std::string& id, const SimConfig& cfg, std::ostream& out,
                              unsigned threads = sweep_threads())
{
    if (id == "1") figures::fig1(cfg, out);
    else if (id == "3") figures::fig3(cfg, out, threads);
    else if (id == "4") figures::fig4(cfg, out, threads);
    else if (id == "5") figures::quartile_series(cfg, SystemKind::regular, out);
    else if (id == "6") figures::quartile_series(cfg, SystemKind::novel, out);
    else if (id == "7") figures::journal_trajectories(cfg, {10000}, out, threads);
    else if (id == "8") figures::journal_trajectories(cfg, {5000, 7000}, out, threads);
    else {
        std::string valid;
        for (const auto& v : figure_ids()) valid += (valid.empty() ? "" : ", ") + v;
        throw std::invalid_argument("unknown figure id '" + id + "' (valid ids: " + valid + ")");
    }
}

} // namespace peerflow
