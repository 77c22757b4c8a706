#pragma once

#include "peerflow/config_io.hpp"
#include "peerflow/metrics.hpp"
#include "peerflow/sweep.hpp"
#include "peerflow/systems.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace peerflow::io {

/// Shortest text that round-trips the double; empty for NaN.
inline std::string num(double v)
{
    if (std::isnan(v)) return {};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Column layout of issue_metrics.csv. `tries_<t>` counts publications on
/// their t-th submission, t = 1 .. max_tries.
inline void write_issue_metrics(std::ostream& out, std::span<const IssueMetrics> metrics, int max_tries)
{
    out << "issue,mean_reviews_per_reviewer,q1_mean,q2_mean,q3_mean,q4_mean,acceptances,"
           "first_try_fraction,backlog_size,created,retired";
    for (int t = 1; t <= max_tries; ++t) out << ",tries_" << t;
    out << '\n';
    for (const auto& m : metrics) {
        out << m.issue << ',' << num(m.mean_reviews_per_reviewer);
        for (double q : m.quartile_mean_quality) out << ',' << num(q);
        out << ',' << m.acceptances << ',' << num(m.first_try_acceptance_fraction) << ',' << m.backlog_size << ','
            << m.created << ',' << m.retired;
        for (int t = 0; t < max_tries; ++t) {
            const auto& h = m.acceptances_by_submission_count;
            out << ',' << (t < static_cast<int>(h.size()) ? h[static_cast<std::size_t>(t)] : 0);
        }
        out << '\n';
    }
}

inline constexpr const char* kLedgerHeader =
    "issue,kind,created,carried_in,reviews,applications,carried_out,retired,"
    "manuscript_id,journal_id,prior_rejections,eta,score,born_issue";

/// Ledgers in long form: one `issue` row of counts per issue followed by one
/// `acceptance` row per publication. Unused columns stay empty.
inline void write_ledgers(std::ostream& out, std::span<const IssueLedger> ledgers)
{
    out << kLedgerHeader << '\n';
    for (const auto& l : ledgers) {
        out << l.issue << ",issue," << l.created << ',' << l.carried_in << ',' << l.reviews << ',' << l.applications
            << ',' << l.carried_out << ',' << l.retired << ",,,,,,\n";
        for (const auto& a : l.acceptances) {
            out << l.issue << ",acceptance,,,,,,," << a.manuscript_id << ',' << a.journal_id << ','
                << a.prior_rejections << ',' << num(a.eta) << ',' << num(a.score) << ',' << a.born_issue << '\n';
        }
    }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline long long to_ll(const std::string& s) { return std::stoll(s); }

} // namespace detail

inline std::vector<IssueLedger> read_ledgers(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kLedgerHeader) {
        throw std::runtime_error("ledgers.csv: unexpected header");
    }
    std::vector<IssueLedger> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c = detail::split_csv_line(line);
        if (c.size() != 14) throw std::runtime_error("ledgers.csv: malformed row: " + line);
        const int issue = static_cast<int>(detail::to_ll(c[0]));
        if (c[1] == "issue") {
            IssueLedger l;
            l.issue = issue;
            l.created = static_cast<int>(detail::to_ll(c[2]));
            l.carried_in = static_cast<int>(detail::to_ll(c[3]));
            l.reviews = detail::to_ll(c[4]);
            l.applications = static_cast<int>(detail::to_ll(c[5]));
            l.carried_out = static_cast<int>(detail::to_ll(c[6]));
            l.retired = static_cast<int>(detail::to_ll(c[7]));
            out.push_back(std::move(l));
        } else if (c[1] == "acceptance") {
            if (out.empty() || out.back().issue != issue) {
                throw std::runtime_error("ledgers.csv: acceptance row before its issue row");
            }
            Acceptance a;
            a.manuscript_id = detail::to_ll(c[8]);
            a.journal_id = static_cast<int>(detail::to_ll(c[9]));
            a.prior_rejections = static_cast<int>(detail::to_ll(c[10]));
            a.eta = std::stod(c[11]);
            a.score = std::stod(c[12]);
            a.born_issue = static_cast<int>(detail::to_ll(c[13]));
            out.back().acceptances.push_back(a);
        } else {
            throw std::runtime_error("ledgers.csv: unknown row kind '" + c[1] + "'");
        }
    }
    return out;
}

/// One row per journal per issue: publications that issue, their mean
/// quality (empty if none) and the journal's running quality afterwards.
inline void write_journals(std::ostream& out, std::span<const Journal> journals, std::span<const IssueLedger> ledgers,
                           bool quartiles_used)
{
    out << "issue,journal_id,quartile,publications,issue_mean_quality,running_quality\n";
    std::vector<int> pubs(journals.size());
    for (const auto& l : ledgers) {
        std::fill(pubs.begin(), pubs.end(), 0);
        for (const auto& a : l.acceptances) pubs[static_cast<std::size_t>(a.journal_id)] += 1;
        for (std::size_t j = 0; j < journals.size(); ++j) {
            const auto& jr = journals[j];
            const double running = journal_quality_at(jr, l.issue, std::nan(""));
            out << l.issue << ',' << jr.id << ',' << (quartiles_used ? to_string(jr.quartile) : "") << ','
                << pubs[j] << ',' << (pubs[j] > 0 ? num(running) : std::string{}) << ',' << num(running) << '\n';
        }
    }
}

inline void write_sweep(std::ostream& out, const SweepResult& r)
{
    out << "parameter,value";
    for (const char* o : kSummaryOutputs) out << ',' << o;
    for (const char* o : kSummaryOutputs) out << ',' << o << "_se";
    out << '\n';
    for (const auto& p : r.points) {
        out << r.spec.parameter << ',' << num(p.value);
        for (std::size_t o = 0; o < kSummaryOutputs.size(); ++o) out << ',' << num(summary_value(p.mean, o));
        for (std::size_t o = 0; o < kSummaryOutputs.size(); ++o) out << ',' << num(summary_value(p.stderr_, o));
        out << '\n';
    }
}

/// Range summary in the shape of a sensitivity table: one row per parameter.
inline void write_table_summary(std::ostream& out, const SweepResult& r)
{
    out << "parameter,lo,hi,step,runs_per_point,grid_points";
    for (const char* o : kSummaryOutputs) out << ',' << o << "_min," << o << "_max";
    out << '\n';
    out << r.spec.parameter << ',' << num(r.spec.lo) << ',' << num(r.spec.hi) << ',' << num(r.spec.step) << ','
        << r.spec.runs_per_point << ',' << r.points.size();
    for (std::size_t o = 0; o < kSummaryOutputs.size(); ++o) out << ',' << num(r.min[o]) << ',' << num(r.max[o]);
    out << '\n';
}

} // namespace peerflow::io
