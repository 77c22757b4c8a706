#pragma once

#include "peerflow/config.hpp"
#include "peerflow/config_io.hpp"
#include "peerflow/metrics.hpp"
#include "peerflow/systems.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace peerflow {

struct SweepSpec {
    std::string parameter; // a, b, c, beta, gamma, mu, alpha or sigma
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
    int runs_per_point = 10;
    SimConfig base = baseline_config();
};

struct SweepPoint {
    double value = 0.0;
    RunSummary mean;   // averaged over runs
    RunSummary stderr_; // standard error of each averaged output
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepPoint> points;
    std::array<double, 6> min{};
    std::array<double, 6> max{};
};

enum class Direction { increasing, decreasing, non_monotone };

inline const char* to_string(Direction d)
{
    switch (d) {
    case Direction::increasing: return "increasing";
    case Direction::decreasing: return "decreasing";
    case Direction::non_monotone: return "non-monotone";
    }
    return "?";
}

inline constexpr double kStepTolerance = 1e-9;

/// floor((hi - lo) / step) + 1, with (hi - lo) required to be a whole number
/// of steps up to kStepTolerance.
inline int grid_point_count(const SweepSpec& spec)
{
    const double ratio = (spec.hi - spec.lo) / spec.step;
    return static_cast<int>(std::floor(ratio + kStepTolerance)) + 1;
}

inline std::vector<std::string> validate_sweep(const SweepSpec& spec)
{
    std::vector<std::string> out;
    static const std::array<const char*, 8> names{"a", "b", "c", "beta", "gamma", "mu", "alpha", "sigma"};
    if (std::find(names.begin(), names.end(), spec.parameter) == names.end()) {
        out.push_back("unknown sweep parameter '" + spec.parameter + "'");
    }
    if (!(spec.lo < spec.hi)) out.emplace_back("range must satisfy lo < hi");
    if (!(spec.step > 0.0)) {
        out.emplace_back("step must be positive");
    } else if (spec.lo < spec.hi) {
        const double ratio = (spec.hi - spec.lo) / spec.step;
        if (std::abs(ratio - std::round(ratio)) * spec.step > kStepTolerance) {
            out.emplace_back("step does not divide (hi - lo)");
        }
    }
    if (spec.runs_per_point < 1) out.emplace_back("runs_per_point must be >= 1");
    return out;
}

inline std::vector<double> grid_values(const SweepSpec& spec)
{
    const int n = grid_point_count(spec);
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v.push_back(spec.lo + i * spec.step);
    return v;
}

/// Worker count: PEERFLOW_THREADS if set and positive, else hardware threads.
inline unsigned sweep_threads()
{
    if (const char* env = std::getenv("PEERFLOW_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

class SweepError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Run `job(i)` for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any job is rethrown once all workers stop.
template <typename Job>
void parallel_for(std::size_t count, unsigned threads, Job job)
{
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

/// Run one configured simulation and reduce it to the six sweep outputs.
inline RunSummary simulate_summary(const SimConfig& cfg, std::shared_ptr<const QualityCdfTable> table = nullptr)
{
    const auto result = run_simulation(cfg, std::move(table));
    const auto metrics = compute_run_metrics(result.ledgers, cfg.n_reviewers, result.final_state.journals);
    return summarize_run(metrics, result.ledgers);
}

/// One-at-a-time sweep. Run r at every grid point uses seed base.seed + r,
/// so grid points share random numbers run for run.
inline SweepResult run_sweep(const SweepSpec& spec, unsigned threads = sweep_threads())
{
    if (auto problems = validate_sweep(spec); !problems.empty()) {
        std::string msg = "invalid sweep:";
        for (const auto& p : problems) msg += " " + p + ";";
        throw SweepError(msg);
    }
    const auto values = grid_values(spec);
    std::vector<SimConfig> configs;
    for (double v : values) {
        SimConfig cfg = spec.base;
        set_kernel_parameter(cfg, spec.parameter, v);
        if (auto problems = validate_config(cfg); !problems.empty()) {
            throw SweepError("invalid grid configuration at " + spec.parameter + " = " + detail::format_double(v) +
                             ": " + problems.front());
        }
        configs.push_back(cfg);
    }

    std::vector<std::shared_ptr<const QualityCdfTable>> tables(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        tables[i] = std::make_shared<const QualityCdfTable>(build_cdf(configs[i].dist));
    }

    const auto runs = static_cast<std::size_t>(spec.runs_per_point);
    std::vector<RunSummary> summaries(values.size() * runs);
    parallel_for(summaries.size(), threads, [&](std::size_t task) {
        const std::size_t point = task / runs;
        const std::size_t run = task % runs;
        SimConfig cfg = configs[point];
        cfg.seed = spec.base.seed + run;
        summaries[task] = simulate_summary(cfg, tables[point]);
    });

    SweepResult result;
    result.spec = spec;
    result.min.fill(std::numeric_limits<double>::infinity());
    result.max.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t p = 0; p < values.size(); ++p) {
        SweepPoint point;
        point.value = values[p];
        for (std::size_t o = 0; o < kSummaryOutputs.size(); ++o) {
            double sum = 0.0, sumsq = 0.0;
            for (std::size_t r = 0; r < runs; ++r) {
                const double v = summary_value(summaries[p * runs + r], o);
                sum += v;
                sumsq += v * v;
            }
            const double n = static_cast<double>(runs);
            const double mean = sum / n;
            const double var = runs > 1 ? std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0)) : 0.0;
            const double se = std::sqrt(var / n);
            if (o < 4) {
                point.mean.quartile_mean[o] = mean;
                point.stderr_.quartile_mean[o] = se;
            } else if (o == 4) {
                point.mean.burden = mean;
                point.stderr_.burden = se;
            } else {
                point.mean.first_try = mean;
                point.stderr_.first_try = se;
            }
            result.min[o] = std::min(result.min[o], mean);
            result.max[o] = std::max(result.max[o], mean);
        }
        result.points.push_back(point);
    }
    return result;
}

inline std::size_t output_index(const std::string& name)
{
    for (std::size_t i = 0; i < kSummaryOutputs.size(); ++i) {
        if (name == kSummaryOutputs[i]) return i;
    }
    throw std::invalid_argument("unknown sweep output '" + name + "'");
}

/// Sign of the Spearman correlation between parameter value and averaged
/// output; |rho| < 0.5 counts as non-monotone.
inline Direction monotone_direction(const SweepResult& result, const std::string& output)
{
    if (result.points.size() < 3) {
        throw std::invalid_argument("monotone_direction: need at least three grid points");
    }
    const std::size_t o = output_index(output);
    std::vector<double> x, y;
    for (const auto& p : result.points) {
        x.push_back(p.value);
        y.push_back(summary_value(p.mean, o));
    }
    const auto rho = spearman(x, y);
    if (!rho || std::abs(*rho) < 0.5) return Direction::non_monotone;
    return *rho > 0 ? Direction::increasing : Direction::decreasing;
}

} // namespace peerflow
