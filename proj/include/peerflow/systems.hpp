#pragma once

#include "peerflow/config.hpp"
#include "peerflow/quality.hpp"
#include "peerflow/review.hpp"
#include "peerflow/rng.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace peerflow {

inline constexpr int kFreshReviewers = 6;
inline constexpr int kRevisedReviewers = 3;
inline constexpr int kRegularReviewers = 2;

struct Application {
    std::int64_t manuscript_id = 0;
    int journal_id = 0;
    double score = 0.0;
    int issue = 0;
};

/// One publication decided in an issue.
struct Acceptance {
    std::int64_t manuscript_id = 0;
    int journal_id = 0;
    int prior_rejections = 0;
    double eta = 0.0;
    double score = 0.0;
    int born_issue = 0;
};

struct IssueLedger {
    int issue = 0;
    int created = 0;
    int carried_in = 0;
    long long reviews = 0; // reviewer assignments made this issue
    int applications = 0;
    std::vector<Acceptance> acceptances;
    int carried_out = 0; // rejected, revised and kept for the next issue
    int retired = 0;
};

class InvalidConfig : public std::invalid_argument {
public:
    explicit InvalidConfig(std::vector<std::string> violations)
        : std::invalid_argument(join(violations)), violations_(std::move(violations))
    {
    }
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v)
    {
        std::string out = "invalid configuration:";
        for (const auto& s : v) out += "\n  " + s;
        return out;
    }
    std::vector<std::string> violations_;
};

/// Everything a run owns between issues.
struct SimState {
    int issue = 0; // number of completed issues
    std::vector<Manuscript> pool; // manuscripts awaiting the next round, ascending id
    std::vector<Reviewer> reviewers;
    std::vector<Journal> journals;
    Thresholds thresholds;
    std::shared_ptr<const QualityCdfTable> table;
    std::int64_t next_id = 0;

    RngStream quality_rng;
    RngStream assignment_rng;
    RngStream noise_rng;
    RngStream revision_rng;
    RngStream targeting_rng;
    RngStream estimate_rng;

    explicit SimState(std::uint64_t seed)
        : quality_rng(seed, "quality"), assignment_rng(seed, "assignment"), noise_rng(seed, "noise"),
          revision_rng(seed, "revision"), targeting_rng(seed, "targeting"), estimate_rng(seed, "estimate")
    {
    }
};

/// Journal ids in a quartile, ascending. Ids are assigned best band first.
inline std::array<std::vector<int>, 4> journals_by_quartile(std::span<const Journal> journals)
{
    std::array<std::vector<int>, 4> out;
    for (const auto& j : journals) out[static_cast<std::size_t>(index(j.quartile))].push_back(j.id);
    return out;
}

/// Fresh state: reviewers with zero load, journals split into quartiles
/// (simplified system: one flat band at equal quality), thresholds from cfg.
inline SimState make_initial_state(const SimConfig& cfg, std::shared_ptr<const QualityCdfTable> table = nullptr)
{
    SimState s(cfg.seed);
    s.table = table ? std::move(table) : std::make_shared<const QualityCdfTable>(build_cdf(cfg.dist));
    s.thresholds = Thresholds::from(cfg.init_thresholds);
    s.reviewers.resize(static_cast<std::size_t>(cfg.n_reviewers));
    for (int r = 0; r < cfg.n_reviewers; ++r) s.reviewers[r].id = r;

    s.journals.resize(static_cast<std::size_t>(cfg.n_journals));
    const bool flat = cfg.system == SystemKind::simplified || cfg.n_journals < 4;
    const std::array<int, 4> sizes =
        flat ? std::array<int, 4>{0, 0, 0, cfg.n_journals} : quartile_partition(cfg.n_journals).as_array();
    const auto th = cfg.init_thresholds;
    const std::array<double, 4> start_quality{th[0], th[1], th[2], 0.5 * th[2]};
    int id = 0;
    for (int q = 0; q < 4; ++q) {
        for (int i = 0; i < sizes[q]; ++i, ++id) {
            auto& j = s.journals[id];
            j.id = id;
            j.quartile = static_cast<Quartile>(q);
            j.capacity = cfg.capacity_per_journal;
            j.running_quality = flat ? 0.0 : start_quality[q];
        }
    }
    return s;
}

inline Quartile quartile_of(double score, const Thresholds& th)
{
    if (score >= th.theta1) return Quartile::Q1;
    if (score >= th.theta2) return Quartile::Q2;
    if (score >= th.theta3) return Quartile::Q3;
    return Quartile::Q4;
}

inline Quartile one_above(Quartile q) { return q == Quartile::Q1 ? Quartile::Q1 : static_cast<Quartile>(index(q) - 1); }
inline Quartile one_below(Quartile q) { return q == Quartile::Q4 ? Quartile::Q4 : static_cast<Quartile>(index(q) + 1); }

/// Quartile pair a novel-system author applies to: the score's own band plus
/// one above (hopeful, at most one prior rejection) or one below (after two
/// or more rejections). Edge bands pair with their only neighbour.
inline std::pair<Quartile, Quartile> target_quartiles_novel(double score, int rejections, const Thresholds& th)
{
    const Quartile q = quartile_of(score, th);
    if (rejections <= 1) {
        return {q, q == Quartile::Q1 ? Quartile::Q2 : one_above(q)};
    }
    return {q, q == Quartile::Q4 ? Quartile::Q3 : one_below(q)};
}

/// Single target band for a regular-system submission.
inline Quartile target_quartile_regular(double estimate, int rejections, const Thresholds& th)
{
    const Quartile q = quartile_of(estimate, th);
    return rejections >= 2 ? one_below(q) : q;
}

/// Journal ids in selection priority: by quartile (unless `flat`), then
/// running quality descending, then id ascending.
inline std::vector<int> priority_order(std::span<const Journal> journals, bool flat)
{
    std::vector<int> order(journals.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
        const auto& a = journals[lhs];
        const auto& b = journals[rhs];
        if (!flat && a.quartile != b.quartile) return index(a.quartile) < index(b.quartile);
        if (a.running_quality != b.running_quality) return a.running_quality > b.running_quality;
        return a.id < b.id;
    });
    return order;
}

/// Preferential admission. Journals pick in priority order; each takes its
/// applications by score (descending, ties by manuscript id) up to capacity,
/// skipping manuscripts another journal already took. Returns
/// manuscript id -> journal id.
inline std::unordered_map<std::int64_t, int> accept_applications(std::span<const Application> applications,
                                                                 std::span<const Journal> journals,
                                                                 bool flat = false)
{
    std::vector<std::vector<const Application*>> by_journal(journals.size());
    for (const auto& a : applications) {
        if (a.journal_id < 0 || a.journal_id >= static_cast<int>(journals.size())) {
            throw std::out_of_range("accept_applications: application names an unknown journal");
        }
        by_journal[static_cast<std::size_t>(a.journal_id)].push_back(&a);
    }
    std::unordered_map<std::int64_t, int> accepted;
    for (int jid : priority_order(journals, flat)) {
        auto& apps = by_journal[static_cast<std::size_t>(jid)];
        std::sort(apps.begin(), apps.end(), [](const Application* x, const Application* y) {
            if (x->score != y->score) return x->score > y->score;
            return x->manuscript_id < y->manuscript_id;
        });
        int taken = 0;
        const int capacity = journals[static_cast<std::size_t>(jid)].capacity;
        for (const Application* a : apps) {
            if (taken >= capacity) break;
            if (accepted.try_emplace(a->manuscript_id, jid).second) ++taken;
        }
    }
    return accepted;
}

namespace detail {

inline void create_manuscripts(SimState& s, const SimConfig& cfg, IssueLedger& ledger)
{
    ledger.carried_in = static_cast<int>(s.pool.size());
    for (int i = 0; i < cfg.n_new_per_issue; ++i) {
        Manuscript m;
        m.id = s.next_id++;
        m.eta = sample_quality(*s.table, s.quality_rng);
        m.born_issue = ledger.issue;
        s.pool.push_back(m);
    }
    ledger.created = cfg.n_new_per_issue;
}

/// Assign every pool manuscript's reviewers, then score with final loads.
/// `reviewers_for(m)` gives the panel size; `use_prior` blends in last_score.
template <typename PanelSize>
void review_pool(SimState& s, const SimConfig& cfg, IssueLedger& ledger, PanelSize reviewers_for, bool use_prior)
{
    std::vector<std::vector<int>> panels;
    panels.reserve(s.pool.size());
    for (const auto& m : s.pool) {
        const int count = reviewers_for(m);
        panels.push_back(draw_reviewers(s.reviewers, count, s.assignment_rng));
        ledger.reviews += count;
    }
    std::vector<double> values;
    for (std::size_t i = 0; i < s.pool.size(); ++i) {
        auto& m = s.pool[i];
        values.clear();
        for (int rid : panels[i]) {
            values.push_back(score_manuscript(m, s.reviewers[rid], cfg.noise, s.noise_rng, ledger.issue).value);
        }
        const auto prior = use_prior ? m.last_score : std::nullopt;
        m.last_score = aggregate_score(std::span<const double>(values), prior);
        m.status = ManuscriptStatus::scored;
    }
}

/// Record publications, revise or retire the rest, roll journal and reviewer
/// per-issue state forward.
inline void settle_issue(SimState& s, const SimConfig& cfg, IssueLedger& ledger,
                         const std::unordered_map<std::int64_t, int>& accepted, bool update_quartile_thresholds)
{
    std::vector<double> sum(s.journals.size(), 0.0);
    std::vector<int> count(s.journals.size(), 0);
    std::vector<Manuscript> next_pool;
    next_pool.reserve(s.pool.size());
    for (auto& m : s.pool) {
        if (const auto it = accepted.find(m.id); it != accepted.end()) {
            m.status = ManuscriptStatus::accepted;
            m.accepted_journal = it->second;
            m.accepted_issue = ledger.issue;
            ledger.acceptances.push_back({m.id, it->second, m.rejections, m.eta, *m.last_score, m.born_issue});
            sum[static_cast<std::size_t>(it->second)] += m.eta;
            count[static_cast<std::size_t>(it->second)] += 1;
            continue;
        }
        m.rejections += 1;
        if (m.rejections > cfg.max_resubmissions) {
            m.status = ManuscriptStatus::retired;
            ledger.retired += 1;
            continue;
        }
        m = revise(std::move(m), cfg.revision, s.revision_rng);
        m.status = ManuscriptStatus::pending_review;
        next_pool.push_back(std::move(m));
    }
    s.pool = std::move(next_pool);
    ledger.carried_out = static_cast<int>(s.pool.size());

    for (std::size_t j = 0; j < s.journals.size(); ++j) {
        if (count[j] == 0) continue;
        auto& journal = s.journals[j];
        const double mean = sum[j] / count[j];
        journal.published_issues.push_back(ledger.issue);
        journal.quality_per_issue.push_back(mean);
        journal.running_quality = mean;
    }
    if (update_quartile_thresholds) {
        s.thresholds = update_thresholds(s.journals, s.thresholds, ledger.issue);
    }
    for (auto& r : s.reviewers) {
        r.load_history.push_back(r.load_current_issue);
        r.load_current_issue = 0;
    }
    s.issue = ledger.issue;
}

inline int pick(const std::vector<int>& ids, RngStream& rng)
{
    return ids[static_cast<std::size_t>(rng.below(ids.size()))];
}

} // namespace detail

/// Platform-mediated issue: platform review, two applications per
/// manuscript, preferential admission, revision of the rejected.
inline IssueLedger run_issue_novel(SimState& s, const SimConfig& cfg)
{
    IssueLedger ledger;
    ledger.issue = s.issue + 1;
    detail::create_manuscripts(s, cfg, ledger);
    detail::review_pool(
        s, cfg, ledger, [](const Manuscript& m) { return m.last_score ? kRevisedReviewers : kFreshReviewers; },
        true);

    const auto bands = journals_by_quartile(s.journals);
    std::vector<Application> apps;
    apps.reserve(2 * s.pool.size());
    for (const auto& m : s.pool) {
        const auto [first, second] = target_quartiles_novel(*m.last_score, m.rejections, s.thresholds);
        for (Quartile q : {first, second}) {
            const auto& ids = bands[static_cast<std::size_t>(index(q))];
            if (ids.empty()) continue;
            apps.push_back({m.id, detail::pick(ids, s.targeting_rng), *m.last_score, ledger.issue});
        }
    }
    ledger.applications = static_cast<int>(apps.size());
    const auto accepted = accept_applications(apps, s.journals);
    detail::settle_issue(s, cfg, ledger, accepted, true);
    return ledger;
}

/// Journal-mediated issue: authors self-estimate, submit to one journal,
/// which has two reviewers score it and takes its best submissions.
inline IssueLedger run_issue_regular(SimState& s, const SimConfig& cfg)
{
    IssueLedger ledger;
    ledger.issue = s.issue + 1;
    detail::create_manuscripts(s, cfg, ledger);

    const auto bands = journals_by_quartile(s.journals);
    const double est_var = cfg.author_estimate_sigma * cfg.author_estimate_sigma;
    std::vector<int> target(s.pool.size());
    for (std::size_t i = 0; i < s.pool.size(); ++i) {
        const auto& m = s.pool[i];
        const double estimate = m.eta * (1.0 + gaussian(s.estimate_rng, 0.0, est_var));
        const Quartile q = target_quartile_regular(estimate, m.rejections, s.thresholds);
        target[i] = detail::pick(bands[static_cast<std::size_t>(index(q))], s.targeting_rng);
    }

    detail::review_pool(s, cfg, ledger, [](const Manuscript&) { return kRegularReviewers; }, false);

    std::vector<Application> apps;
    apps.reserve(s.pool.size());
    for (std::size_t i = 0; i < s.pool.size(); ++i) {
        apps.push_back({s.pool[i].id, target[i], *s.pool[i].last_score, ledger.issue});
    }
    ledger.applications = static_cast<int>(apps.size());
    const auto accepted = accept_applications(apps, s.journals);
    detail::settle_issue(s, cfg, ledger, accepted, true);
    return ledger;
}

/// The two journals a simplified-rule author applies to: the nearest with
/// quality at or above the score and the nearest strictly below. When one
/// side is empty the two nearest on the other side are used.
inline std::pair<int, int> nearest_journals(double score, std::span<const Journal> journals)
{
    if (journals.size() < 2) {
        throw std::invalid_argument("nearest_journals: need at least two journals");
    }
    std::vector<int> order(journals.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int l, int r) {
        if (journals[l].running_quality != journals[r].running_quality)
            return journals[l].running_quality < journals[r].running_quality;
        return journals[l].id < journals[r].id;
    });
    const auto above = std::partition_point(order.begin(), order.end(),
                                            [&](int j) { return journals[j].running_quality < score; });
    if (above == order.end()) return {order.end()[-1], order.end()[-2]};
    if (above == order.begin()) return {order[0], order[1]};
    return {*above, *(above - 1)};
}

/// Quartile-free issue: journals are ranked purely by running quality and
/// authors apply around their platform score. In the first issue every
/// manuscript goes to one uniformly random journal.
inline IssueLedger run_issue_simplified(SimState& s, const SimConfig& cfg)
{
    IssueLedger ledger;
    ledger.issue = s.issue + 1;
    detail::create_manuscripts(s, cfg, ledger);
    detail::review_pool(
        s, cfg, ledger, [](const Manuscript& m) { return m.last_score ? kRevisedReviewers : kFreshReviewers; },
        true);

    std::vector<Application> apps;
    apps.reserve(2 * s.pool.size());
    const bool first_issue = ledger.issue == 1;
    for (const auto& m : s.pool) {
        if (first_issue) {
            const int j = static_cast<int>(s.targeting_rng.below(s.journals.size()));
            apps.push_back({m.id, j, *m.last_score, ledger.issue});
            continue;
        }
        const auto [up, down] = nearest_journals(*m.last_score, s.journals);
        apps.push_back({m.id, up, *m.last_score, ledger.issue});
        apps.push_back({m.id, down, *m.last_score, ledger.issue});
    }
    ledger.applications = static_cast<int>(apps.size());
    const auto accepted = accept_applications(apps, s.journals, true);
    detail::settle_issue(s, cfg, ledger, accepted, false);
    return ledger;
}

inline IssueLedger run_issue(SimState& s, const SimConfig& cfg)
{
    switch (cfg.system) {
    case SystemKind::novel: return run_issue_novel(s, cfg);
    case SystemKind::regular: return run_issue_regular(s, cfg);
    case SystemKind::simplified: return run_issue_simplified(s, cfg);
    }
    throw std::logic_error("run_issue: unknown system");
}

struct SimulationResult {
    std::vector<IssueLedger> ledgers;
    SimState final_state;
};

/// Validate, then run cfg.n_issues issues of the configured system.
inline SimulationResult run_simulation(const SimConfig& cfg, std::shared_ptr<const QualityCdfTable> table = nullptr)
{
    if (auto violations = validate_config(cfg); !violations.empty()) {
        throw InvalidConfig(std::move(violations));
    }
    SimulationResult result{{}, make_initial_state(cfg, std::move(table))};
    result.ledgers.reserve(static_cast<std::size_t>(cfg.n_issues));
    for (int i = 0; i < cfg.n_issues; ++i) {
        result.ledgers.push_back(run_issue(result.final_state, cfg));
    }
    return result;
}

/// Quality of journal `j` as of the end of `issue`: its latest per-issue mean
/// at or before that issue, or its starting quality if it has not published.
inline double journal_quality_at(const Journal& j, int issue, double initial = 0.0)
{
    const auto it = std::upper_bound(j.published_issues.begin(), j.published_issues.end(), issue);
    if (it == j.published_issues.begin()) return initial;
    return j.quality_per_issue[static_cast<std::size_t>(it - j.published_issues.begin()) - 1];
}

} // namespace peerflow
