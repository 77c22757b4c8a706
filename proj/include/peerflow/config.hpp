#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace peerflow {

/// Density f(eta) = a * eta^-b * exp(-c * eta), truncated to (0, eta_max].
struct QualityDistParams {
    double a = 0.255;
    double b = 0.3;
    double c = 0.2;
    double eta_max = 10.0;
};

/// Reviewer noise variance is beta * load^gamma.
struct NoiseParams {
    double beta = 0.1;
    double gamma = 0.35;
};

/// Revision gain y ~ N(mu * alpha^k, sigma^2).
struct RevisionParams {
    double mu = 0.5;
    double alpha = 0.75;
    double sigma = 0.55;
};

enum class SystemKind { novel, regular, simplified };

inline const char* to_string(SystemKind kind) noexcept
{
    switch (kind) {
    case SystemKind::novel: return "novel";
    case SystemKind::regular: return "regular";
    case SystemKind::simplified: return "simplified";
    }
    return "unknown";
}

inline SystemKind parse_system(const std::string& text)
{
    if (text == "novel") return SystemKind::novel;
    if (text == "regular") return SystemKind::regular;
    if (text == "simplified") return SystemKind::simplified;
    throw std::invalid_argument("unknown system '" + text + "' (expected novel, regular or simplified)");
}

struct SimConfig {
    int n_new_per_issue = 3000;
    int n_journals = 100;
    int n_reviewers = 500;
    int capacity_per_journal = 29;
    int n_issues = 20;
    std::array<double, 3> init_thresholds{8.0, 6.0, 4.0};
    QualityDistParams dist{};
    NoiseParams noise{};
    RevisionParams revision{};
    SystemKind system = SystemKind::novel;
    std::uint64_t seed = 1;
    double author_estimate_sigma = 0.15;
    int max_resubmissions = 8;
};

/// The configuration every experiment starts from.
inline SimConfig baseline_config() { return SimConfig{}; }

enum class Quartile : int { Q1 = 0, Q2 = 1, Q3 = 2, Q4 = 3 };

inline int index(Quartile q) noexcept { return static_cast<int>(q); }

inline const char* to_string(Quartile q) noexcept
{
    static constexpr const char* names[] = {"Q1", "Q2", "Q3", "Q4"};
    return names[index(q)];
}

enum class ManuscriptStatus { pending_review, scored, accepted, retired };

struct Manuscript {
    std::int64_t id = 0;
    double eta = 0.0;
    int k_revisions = 0;
    int rejections = 0;
    std::optional<double> last_score;
    int born_issue = 0;
    ManuscriptStatus status = ManuscriptStatus::pending_review;
    int accepted_journal = -1;
    int accepted_issue = -1;
};

struct Reviewer {
    int id = 0;
    int load_current_issue = 0;
    std::vector<int> load_history;
};

struct Journal {
    int id = 0;
    Quartile quartile = Quartile::Q4;
    int capacity = 0;
    std::vector<int> published_issues;   // issue index of each quality_per_issue entry
    std::vector<double> quality_per_issue;
    double running_quality = 0.0;
};

/// Every violated invariant of `cfg`, as a human-readable line. Empty means
/// the configuration may be simulated.
inline std::vector<std::string> validate_config(const SimConfig& cfg)
{
    std::vector<std::string> out;
    auto positive_count = [&](const char* name, long long value) {
        if (value < 1) {
            out.push_back(std::string(name) + " must be >= 1 (got " + std::to_string(value) + ")");
        }
    };
    positive_count("n_new_per_issue", cfg.n_new_per_issue);
    positive_count("n_journals", cfg.n_journals);
    positive_count("n_reviewers", cfg.n_reviewers);
    positive_count("capacity_per_journal", cfg.capacity_per_journal);
    if (cfg.n_issues < 0) out.push_back("n_issues must be >= 0 (got " + std::to_string(cfg.n_issues) + ")");
    positive_count("max_resubmissions", cfg.max_resubmissions);

    const auto& th = cfg.init_thresholds;
    if (!(th[0] > th[1] && th[1] > th[2])) {
        out.emplace_back("thresholds not strictly decreasing");
    }
    if (!(th[2] > 0.0)) {
        out.emplace_back("lowest threshold must be positive");
    }

    const long long total = static_cast<long long>(cfg.n_journals) * cfg.capacity_per_journal;
    if (cfg.n_journals >= 1 && cfg.capacity_per_journal >= 1 && total >= cfg.n_new_per_issue) {
        out.push_back("total capacity " + std::to_string(total) + " \xE2\x89\xA5 n " +
                      std::to_string(cfg.n_new_per_issue));
    }
    if (cfg.system != SystemKind::simplified && cfg.n_journals < 4) {
        out.emplace_back("too few journals to form quartiles");
    }
    if (cfg.system == SystemKind::simplified && cfg.n_journals >= 1 && cfg.n_journals < 2) {
        out.emplace_back("simplified system needs at least two journals");
    }
    if (cfg.n_reviewers >= 1 && cfg.n_reviewers < 6) {
        out.emplace_back("n_reviewers must be at least 6 (fresh manuscripts need six reviewers)");
    }

    if (!(cfg.dist.a > 0.0)) out.emplace_back("a must be > 0");
    if (!(cfg.dist.b > 0.0 && cfg.dist.b < 1.0)) out.emplace_back("b must lie in (0, 1)");
    if (!(cfg.dist.c > 0.0)) out.emplace_back("c must be > 0");
    if (!(cfg.dist.eta_max > 0.0)) out.emplace_back("eta_max must be > 0");
    if (!(cfg.noise.beta > 0.0)) out.emplace_back("beta must be > 0");
    if (!(cfg.noise.gamma > 0.0)) out.emplace_back("gamma must be > 0");
    if (!(cfg.revision.alpha > 0.0 && cfg.revision.alpha < 1.0)) out.emplace_back("alpha must lie in (0, 1)");
    if (!(cfg.revision.sigma >= 0.0)) out.emplace_back("sigma must be >= 0");
    if (!std::isfinite(cfg.revision.mu)) out.emplace_back("mu must be finite");
    if (!(cfg.author_estimate_sigma >= 0.0)) out.emplace_back("author_estimate_sigma must be >= 0");
    return out;
}

struct QuartileSizes {
    int q1 = 0;
    int q2 = 0;
    int q3 = 0;
    int q4 = 0;

    std::array<int, 4> as_array() const { return {q1, q2, q3, q4}; }
    friend bool operator==(const QuartileSizes&, const QuartileSizes&) = default;
};

/// Split J journals into bands covering the top 10%, 10-25%, 25-50% and the
/// rest. Cumulative cut points round half away from zero; an empty band takes
/// one slot from the largest band.
inline QuartileSizes quartile_partition(int n_journals)
{
    if (n_journals < 4) {
        throw std::invalid_argument("too few journals to form quartiles");
    }
    const double J = n_journals;
    const int c1 = static_cast<int>(std::round(0.10 * J));
    const int c2 = static_cast<int>(std::round(0.25 * J));
    const int c3 = static_cast<int>(std::round(0.50 * J));
    std::array<int, 4> sizes{c1, c2 - c1, c3 - c2, n_journals - c3};
    for (int& s : sizes) {
        if (s < 1) {
            int largest = 0;
            for (int i = 1; i < 4; ++i) {
                if (sizes[i] > sizes[largest]) largest = i;
            }
            sizes[largest] -= 1 - s;
            s = 1;
        }
    }
    return {sizes[0], sizes[1], sizes[2], sizes[3]};
}

} // namespace peerflow
