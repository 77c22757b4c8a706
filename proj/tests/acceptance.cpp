// Acceptance suite: one PASS/FAIL line per headline criterion.
#include "commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

using namespace peerflow;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail)
{
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << std::endl;
    if (!ok) ++failures;
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Run {
    std::vector<IssueLedger> ledgers;
    std::vector<IssueMetrics> metrics;
    std::vector<Journal> journals;
    double seconds = 0.0;
};

Run simulate(const SimConfig& cfg)
{
    const auto t0 = std::chrono::steady_clock::now();
    auto r = run_simulation(cfg);
    Run out;
    out.metrics = compute_run_metrics(r.ledgers, cfg.n_reviewers, r.final_state.journals);
    out.ledgers = std::move(r.ledgers);
    out.journals = std::move(r.final_state.journals);
    out.seconds = seconds_since(t0);
    return out;
}

std::vector<Run> simulate_all(const std::vector<SimConfig>& cfgs)
{
    std::vector<Run> runs(cfgs.size());
    parallel_for(cfgs.size(), sweep_threads(), [&](std::size_t i) { runs[i] = simulate(cfgs[i]); });
    return runs;
}

SimConfig baseline_with(SystemKind system, std::uint64_t seed)
{
    auto cfg = baseline_config();
    cfg.system = system;
    cfg.seed = seed;
    return cfg;
}

// ---------------------------------------------------------------- sampler

void sampler_fidelity()
{
    const auto t0 = std::chrono::steady_clock::now();
    const QualityDistParams p{0.255, 0.3, 0.2, 10.0};
    const auto table = build_cdf(p, 4096);
    RngStream rng(1, "quality");
    std::vector<double> s(4000);
    for (double& v : s) v = sample_quality(table, rng);
    std::sort(s.begin(), s.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = table.cdf(s[i]);
        ks = std::max({ks, std::abs(f - double(i) / s.size()), std::abs(f - double(i + 1) / s.size())});
    }
    // Hit-or-miss in u = eta^(1-b), where the density is bounded.
    RngStream darts(2, "darts");
    const double u_max = std::pow(10.0, 0.7);
    const double u_cut = std::pow(5.0, 0.7);
    long long hits = 0, below = 0;
    for (int i = 0; i < 1000000; ++i) {
        const double u = u_max * darts.uniform();
        if (darts.uniform() < std::exp(-p.c * std::pow(u, 1.0 / 0.7))) {
            ++hits;
            below += u <= u_cut;
        }
    }
    const double oracle = double(below) / double(hits);
    const double f5 = table.cdf(5.0);
    const double secs = seconds_since(t0);
    report(ks < 0.03 && std::abs(f5 - oracle) < 0.005 && secs < 5.0, "sampler fidelity",
           "KS distance " + fmt("%.4f", ks) + " (< 0.03), F(5) " + fmt("%.4f", f5) + " vs darts " +
               fmt("%.4f", oracle) + " (|diff| < 0.005), " + fmt("%.2f", secs) + " s (< 5 s)");
}

// ------------------------------------------------- baseline comparisons

void rejection_ceiling(const std::vector<Run>& novel, const std::vector<Run>& regular)
{
    long long total = 0, within = 0;
    int regular_max = 0, novel_max = 0;
    double slowest = 0.0;
    for (int i = 0; i < 5; ++i) {
        for (const auto& l : novel[i].ledgers) {
            for (const auto& a : l.acceptances) {
                ++total;
                within += a.prior_rejections <= 3;
            }
        }
        novel_max = std::max(novel_max, max_rejections_before_acceptance(novel[i].ledgers).value);
        regular_max = std::max(regular_max, max_rejections_before_acceptance(regular[i].ledgers).value);
        slowest = std::max({slowest, novel[i].seconds, regular[i].seconds});
    }
    const double share = double(within) / double(total);
    report(share >= 0.99 && regular_max >= 4 && slowest < 120.0, "rejection ceiling",
           "novel share with <= 3 prior rejections " + fmt("%.4f", share) + " (>= 0.99), novel max " +
               std::to_string(novel_max) + ", regular max " + std::to_string(regular_max) +
               " (>= 4), slowest run " + fmt("%.2f", slowest) + " s");
}

void first_try(const std::vector<Run>& novel, const std::vector<Run>& regular)
{
    double mean = 0.0;
    int lower = 0;
    double reg_mean = 0.0;
    for (std::size_t i = 0; i < novel.size(); ++i) {
        const double n = run_first_try_fraction(novel[i].ledgers);
        const double r = run_first_try_fraction(regular[i].ledgers);
        mean += n / novel.size();
        reg_mean += r / novel.size();
        lower += r < n;
    }
    report(mean >= 0.85 && lower == static_cast<int>(novel.size()), "first-try acceptance",
           "novel mean over 10 runs " + fmt("%.4f", mean) + " (>= 0.85), regular mean " + fmt("%.4f", reg_mean) +
               ", regular lower on " + std::to_string(lower) + "/10 seeds");
}

void burden_separation()
{
    std::vector<SimConfig> cfgs;
    for (int n : {1000, 2000, 3000}) {
        for (auto sys : {SystemKind::novel, SystemKind::regular}) {
            auto cfg = with_submissions(baseline_config(), n);
            cfg.system = sys;
            cfgs.push_back(cfg);
        }
    }
    const auto runs = simulate_all(cfgs);
    bool ok = true;
    std::string detail;
    std::vector<double> gaps;
    for (std::size_t i = 0; i < cfgs.size(); i += 2) {
        const double nov = runs[i].metrics.back().mean_reviews_per_reviewer;
        const double reg = runs[i + 1].metrics.back().mean_reviews_per_reviewer;
        ok = ok && nov < reg;
        gaps.push_back(reg - nov);
        detail += "n=" + std::to_string(cfgs[i].n_new_per_issue) + " (cap " +
                  std::to_string(cfgs[i].capacity_per_journal) + "): novel " + fmt("%.2f", nov) + " < regular " +
                  fmt("%.2f", reg) + "; ";
    }
    ok = ok && gaps.back() > gaps.front();
    report(ok, "reviewer burden separation",
           detail + "gap grows " + fmt("%.2f", gaps.front()) + " -> " + fmt("%.2f", gaps.back()));
}

double series_sd(const std::vector<IssueMetrics>& m, int q, int from, int to)
{
    std::vector<double> v;
    for (const auto& x : m) {
        if (x.issue >= from && x.issue <= to && !std::isnan(x.quartile_mean_quality[q])) {
            v.push_back(x.quartile_mean_quality[q]);
        }
    }
    double mean = 0.0;
    for (double x : v) mean += x / v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (v.size() - 1));
}

void quartile_stratification(const std::vector<Run>& novel, const std::vector<Run>& regular)
{
    int ordered = 0, considered = 0;
    for (const auto& m : novel[0].metrics) {
        if (m.issue < 3) continue;
        ++considered;
        const auto& q = m.quartile_mean_quality;
        ordered += q[0] >= q[1] && q[1] >= q[2] && q[2] >= q[3];
    }
    const double share = double(ordered) / considered;
    int steadier = 0;
    std::array<int, 3> per_quartile{};
    for (std::size_t s = 0; s < novel.size(); ++s) {
        double nov = 0.0, reg = 0.0;
        for (int q = 0; q < 3; ++q) {
            const double a = series_sd(novel[s].metrics, q, 5, 20);
            const double b = series_sd(regular[s].metrics, q, 5, 20);
            nov += a / 3.0;
            reg += b / 3.0;
            per_quartile[q] += a < b;
        }
        steadier += nov < reg;
    }
    report(share >= 0.95 && steadier >= 8, "quartile stratification",
           "ordered in " + std::to_string(ordered) + "/" + std::to_string(considered) + " issues (>= 95%), novel Q1-Q3 SD lower on " +
               std::to_string(steadier) + "/10 seeds (>= 8; per band Q1 " + std::to_string(per_quartile[0]) +
               ", Q2 " + std::to_string(per_quartile[1]) + ", Q3 " + std::to_string(per_quartile[2]) + ")");
}

// ---------------------------------------------------------------- Matthew

struct Shape {
    double rho = 0.0;
    bool degenerate = false;
    double top = 0.0;    // share within 5% of the maximum quality
    double bottom = 0.0; // share in the lowest quarter of the quality range
};

Shape matthew_shape(int n)
{
    auto cfg = baseline_config();
    cfg.system = SystemKind::simplified;
    cfg.n_new_per_issue = n;
    cfg.n_issues = 40;
    const auto r = simulate(cfg);
    const auto series = journal_quality_series(r.journals, 40);
    Shape s;
    const auto rho = matthew_correlation(series, 5);
    s.degenerate = !rho;
    s.rho = rho.value_or(0.0);
    double lo = 1e300, hi = -1e300;
    for (const auto& j : series) {
        lo = std::min(lo, j.back());
        hi = std::max(hi, j.back());
    }
    for (const auto& j : series) {
        s.top += (j.back() >= 0.95 * hi) / double(series.size());
        s.bottom += (j.back() < lo + 0.25 * (hi - lo)) / double(series.size());
    }
    return s;
}

void matthew_effect()
{
    std::vector<int> sizes{10000, 7000, 5000};
    std::vector<Shape> shapes(sizes.size());
    parallel_for(sizes.size(), sweep_threads(), [&](std::size_t i) { shapes[i] = matthew_shape(sizes[i]); });
    const auto& main = shapes[0];
    bool ok = !main.degenerate && main.rho > 0.8 && std::abs(main.top - 0.10) <= 0.10 &&
              std::abs(main.bottom - 0.50) <= 0.10;
    std::string detail = "n=10000: rho(5,40) " + fmt("%.3f", main.rho) + " (> 0.8), top " + fmt("%.2f", main.top) +
                         " (0.10 +- 0.10), lowest band " + fmt("%.2f", main.bottom) + " (0.50 +- 0.10)";
    for (std::size_t i = 1; i < shapes.size(); ++i) {
        const bool stable = std::abs(shapes[i].top - main.top) <= 0.10 && std::abs(shapes[i].bottom - main.bottom) <= 0.10;
        ok = ok && stable;
        detail += "; n=" + std::to_string(sizes[i]) + ": rho " + fmt("%.3f", shapes[i].rho) + ", top " +
                  fmt("%.2f", shapes[i].top) + ", lowest " + fmt("%.2f", shapes[i].bottom) +
                  (stable ? " (stable)" : " (shape differs)");
    }
    report(ok, "Matthew effect", detail);
}

// ------------------------------------------------------------ sensitivity

void sensitivity_directions()
{
    struct Case {
        const char* param;
        double lo, hi, step;
        const char* output;
        int expected_points;
    };
    const std::vector<Case> cases{{"beta", 0.02, 0.20, 0.02, "first_try", 10},
                                  {"gamma", 0.25, 0.45, 0.02, "first_try", 11},
                                  {"c", 0.1, 0.3, 0.02, "q4_mean", 11},
                                  {"alpha", 0.6, 0.9, 0.03, "first_try", 11}};
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        SweepSpec spec;
        spec.parameter = c.param;
        spec.lo = c.lo;
        spec.hi = c.hi;
        spec.step = c.step;
        spec.runs_per_point = 10;
        const auto r = run_sweep(spec);
        const auto dir = monotone_direction(r, c.output);
        const bool counts = static_cast<int>(r.points.size()) == c.expected_points &&
                            grid_point_count(spec) == c.expected_points;
        ok = ok && counts && dir == Direction::decreasing;
        detail += std::string(c.param) + " -> " + c.output + " " + to_string(dir) + " over " +
                  std::to_string(r.points.size()) + " points; ";
    }
    report(ok, "sensitivity directions", detail);
}

// ------------------------------------------------------------ determinism

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void determinism()
{
    const fs::path root = fs::temp_directory_path() / "peerflow_acceptance_determinism";
    fs::remove_all(root);
    const std::string bin = PEERFLOW_BINARY;
    std::vector<std::string> identical, differing;
    for (const char* tag : {"a", "b"}) {
        const auto dir = root / tag;
        const std::string d = dir.string();
        const std::vector<std::string> cmds{
            bin + " run --seed 7 --out " + d + "/novel",
            bin + " run --system regular --seed 7 --out " + d + "/regular",
            bin + " run --system simplified --issues 10 --seed 7 --out " + d + "/simplified",
            bin + " sweep --param sigma --lo 0.3 --hi 0.42 --step 0.06 --runs 2 --issues 6 --out " + d + "/sweep",
            bin + " figdata " + d + "/novel 1",
            bin + " figdata " + d + "/novel 6",
        };
        for (const auto& c : cmds) {
            if (std::system((c + " >/dev/null 2>&1").c_str()) != 0) {
                report(false, "determinism", "command failed: " + c);
                return;
            }
        }
    }
    for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
        if (entry.path().extension() != ".csv") continue;
        const auto rel = fs::relative(entry.path(), root / "a");
        (slurp(entry.path()) == slurp(root / "b" / rel) ? identical : differing).push_back(rel.string());
    }
    fs::remove_all(root);
    report(differing.empty() && identical.size() >= 12, "determinism",
           std::to_string(identical.size()) + " CSV files byte-identical across repeated commands, " +
               std::to_string(differing.size()) + " differ");
}

// ------------------------------------------------------- zero-noise oracle

SimConfig noise_free(SystemKind system, int n, int journals, int capacity, std::uint64_t seed)
{
    auto cfg = baseline_config();
    cfg.system = system;
    cfg.n_new_per_issue = n;
    cfg.n_journals = journals;
    cfg.capacity_per_journal = capacity;
    cfg.n_reviewers = 60;
    cfg.noise.beta = 0.0;
    cfg.author_estimate_sigma = 0.0;
    cfg.revision.mu = 0.0;
    cfg.revision.sigma = 0.0;
    cfg.seed = seed;
    return cfg;
}

void zero_noise_oracle()
{
    bool infinite_ok = true;
    for (auto system : {SystemKind::novel, SystemKind::regular, SystemKind::simplified}) {
        const auto cfg = noise_free(system, 500, 8, 1 << 20, 3);
        auto s = make_initial_state(cfg);
        for (int t = 0; t < 10; ++t) {
            const auto l = run_issue(s, cfg);
            infinite_ok = infinite_ok && static_cast<int>(l.acceptances.size()) == cfg.n_new_per_issue;
            for (const auto& a : l.acceptances) infinite_ok = infinite_ok && a.prior_rejections == 0 && a.score == a.eta;
        }
    }

    // Finite capacity, one journal per band: each band's journal takes the
    // best remaining applicants that target it, best band first.
    int issues = 0, matched = 0;
    for (auto system : {SystemKind::novel, SystemKind::regular}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto cfg = noise_free(system, 50, 4, 9, seed);
            auto s = make_initial_state(cfg);
            std::map<std::int64_t, int> rejections;
            for (int t = 0; t < 10; ++t) {
                std::vector<std::pair<double, std::int64_t>> applicants;
                for (const auto& m : s.pool) applicants.push_back({m.eta, m.id});
                RngStream probe = s.quality_rng;
                for (int i = 0; i < cfg.n_new_per_issue; ++i) {
                    applicants.push_back({sample_quality(*s.table, probe), s.next_id + i});
                }
                std::sort(applicants.begin(), applicants.end(), [](auto x, auto y) {
                    return x.first != y.first ? x.first > y.first : x.second < y.second;
                });
                const auto th = s.thresholds;
                auto band = [&](double e) { return e >= th.theta1 ? 0 : e >= th.theta2 ? 1 : e >= th.theta3 ? 2 : 3; };
                std::array<int, 4> seats{9, 9, 9, 9};
                std::set<std::int64_t> expected;
                for (int j = 0; j < 4; ++j) {
                    for (auto [eta, id] : applicants) {
                        if (seats[j] == 0) break;
                        if (expected.count(id)) continue;
                        const int q = band(eta);
                        const int rej = rejections[id];
                        bool wants;
                        if (system == SystemKind::novel) {
                            const int other = rej <= 1 ? (q == 0 ? 1 : q - 1) : (q == 3 ? 2 : q + 1);
                            wants = j == q || j == other;
                        } else {
                            wants = j == (rej >= 2 ? std::min(q + 1, 3) : q);
                        }
                        if (wants) {
                            expected.insert(id);
                            --seats[j];
                        }
                    }
                }
                const auto l = run_issue(s, cfg);
                std::set<std::int64_t> got;
                for (const auto& a : l.acceptances) got.insert(a.manuscript_id);
                ++issues;
                matched += got == expected;
                for (auto [eta, id] : applicants) {
                    if (!got.count(id)) rejections[id] += 1;
                }
            }
        }
    }
    report(infinite_ok && matched == issues, "zero-noise oracle",
           std::string("infinite capacity: ") + (infinite_ok ? "all first-try, score == quality" : "violated") +
               "; finite capacity (n=50, J=4): " + std::to_string(matched) + "/" + std::to_string(issues) +
               " issues match brute-force slices");
}

} // namespace

int main()
{
    std::cout << "peerflow acceptance suite (threads: " << sweep_threads() << ")" << std::endl;
    sampler_fidelity();

    std::vector<SimConfig> cfgs;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) cfgs.push_back(baseline_with(SystemKind::novel, seed));
    for (std::uint64_t seed = 1; seed <= 10; ++seed) cfgs.push_back(baseline_with(SystemKind::regular, seed));
    const auto runs = simulate_all(cfgs);
    const std::vector<Run> novel(runs.begin(), runs.begin() + 10);
    const std::vector<Run> regular(runs.begin() + 10, runs.end());

    rejection_ceiling(novel, regular);
    first_try(novel, regular);
    burden_separation();
    quartile_stratification(novel, regular);
    matthew_effect();
    sensitivity_directions();
    determinism();
    zero_noise_oracle();

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
