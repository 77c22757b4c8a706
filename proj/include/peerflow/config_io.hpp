#pragma once

#include "peerflow/config.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace peerflow {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_double(std::string_view key, std::string_view text)
{
    double value = 0.0;
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), last, value);
    if (text.empty() || ec != std::errc{} || ptr != last) {
        throw ConfigError("key '" + std::string(key) + "': not a number: '" + std::string(text) + "'");
    }
    return value;
}

template <typename Int>
Int parse_integer(std::string_view key, std::string_view text)
{
    Int value{};
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ConfigError("key '" + std::string(key) + "': not an integer: '" + std::string(text) + "'");
    }
    return value;
}

inline std::string format_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Names accepted by set_parameter and the config file, in file order.
inline const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys{
        "n_new_per_issue", "n_journals", "n_reviewers", "capacity_per_journal", "n_issues",
        "init_thresholds", "a", "b", "c", "eta_max", "beta", "gamma", "mu", "alpha", "sigma",
        "system", "seed", "author_estimate_sigma", "max_resubmissions"};
    return keys;
}

/// Assign one field from its textual form. Unknown keys are an error.
inline void set_parameter(SimConfig& cfg, std::string_view key, std::string_view value)
{
    using detail::parse_double;
    using detail::parse_integer;
    if (key == "n_new_per_issue") cfg.n_new_per_issue = parse_integer<int>(key, value);
    else if (key == "n_journals") cfg.n_journals = parse_integer<int>(key, value);
    else if (key == "n_reviewers") cfg.n_reviewers = parse_integer<int>(key, value);
    else if (key == "capacity_per_journal") cfg.capacity_per_journal = parse_integer<int>(key, value);
    else if (key == "n_issues") cfg.n_issues = parse_integer<int>(key, value);
    else if (key == "max_resubmissions") cfg.max_resubmissions = parse_integer<int>(key, value);
    else if (key == "seed") cfg.seed = parse_integer<std::uint64_t>(key, value);
    else if (key == "a") cfg.dist.a = parse_double(key, value);
    else if (key == "b") cfg.dist.b = parse_double(key, value);
    else if (key == "c") cfg.dist.c = parse_double(key, value);
    else if (key == "eta_max") cfg.dist.eta_max = parse_double(key, value);
    else if (key == "beta") cfg.noise.beta = parse_double(key, value);
    else if (key == "gamma") cfg.noise.gamma = parse_double(key, value);
    else if (key == "mu") cfg.revision.mu = parse_double(key, value);
    else if (key == "alpha") cfg.revision.alpha = parse_double(key, value);
    else if (key == "sigma") cfg.revision.sigma = parse_double(key, value);
    else if (key == "author_estimate_sigma") cfg.author_estimate_sigma = parse_double(key, value);
    else if (key == "system") {
        try {
            cfg.system = parse_system(std::string(value));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    } else if (key == "init_thresholds") {
        std::array<double, 3> th{};
        std::size_t start = 0;
        for (int i = 0; i < 3; ++i) {
            const auto comma = value.find(',', start);
            if ((i < 2) == (comma == std::string_view::npos)) {
                throw ConfigError("key 'init_thresholds': expected three comma-separated numbers");
            }
            const auto piece = value.substr(start, i < 2 ? comma - start : std::string_view::npos);
            th[i] = parse_double(key, detail::trim(piece));
            start = comma + 1;
        }
        cfg.init_thresholds = th;
    } else {
        throw ConfigError("unknown key '" + std::string(key) + "'");
    }
}

/// Set a real-valued kernel parameter by its sweep name.
inline void set_kernel_parameter(SimConfig& cfg, std::string_view name, double value)
{
    if (name == "a") cfg.dist.a = value;
    else if (name == "b") cfg.dist.b = value;
    else if (name == "c") cfg.dist.c = value;
    else if (name == "beta") cfg.noise.beta = value;
    else if (name == "gamma") cfg.noise.gamma = value;
    else if (name == "mu") cfg.revision.mu = value;
    else if (name == "alpha") cfg.revision.alpha = value;
    else if (name == "sigma") cfg.revision.sigma = value;
    else throw ConfigError("unknown sweep parameter '" + std::string(name) + "'");
}

/// Parse `key = value` lines. Blank lines and `#` comments are ignored.
inline SimConfig parse_config(std::istream& in, SimConfig cfg = baseline_config())
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = detail::trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        try {
            set_parameter(cfg, detail::trim(view.substr(0, eq)), detail::trim(view.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

inline SimConfig load_config(const std::string& path, SimConfig base = baseline_config())
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    return parse_config(in, base);
}

/// Ordered (key, value) pairs; parse_config of the joined lines reproduces cfg.
inline std::vector<std::pair<std::string, std::string>> config_entries(const SimConfig& cfg)
{
    using detail::format_double;
    const auto& th = cfg.init_thresholds;
    return {
        {"n_new_per_issue", std::to_string(cfg.n_new_per_issue)},
        {"n_journals", std::to_string(cfg.n_journals)},
        {"n_reviewers", std::to_string(cfg.n_reviewers)},
        {"capacity_per_journal", std::to_string(cfg.capacity_per_journal)},
        {"n_issues", std::to_string(cfg.n_issues)},
        {"init_thresholds", format_double(th[0]) + "," + format_double(th[1]) + "," + format_double(th[2])},
        {"a", format_double(cfg.dist.a)},
        {"b", format_double(cfg.dist.b)},
        {"c", format_double(cfg.dist.c)},
        {"eta_max", format_double(cfg.dist.eta_max)},
        {"beta", format_double(cfg.noise.beta)},
        {"gamma", format_double(cfg.noise.gamma)},
        {"mu", format_double(cfg.revision.mu)},
        {"alpha", format_double(cfg.revision.alpha)},
        {"sigma", format_double(cfg.revision.sigma)},
        {"system", to_string(cfg.system)},
        {"seed", std::to_string(cfg.seed)},
        {"author_estimate_sigma", format_double(cfg.author_estimate_sigma)},
        {"max_resubmissions", std::to_string(cfg.max_resubmissions)},
    };
}

inline std::string format_config(const SimConfig& cfg)
{
    std::ostringstream out;
    for (const auto& [k, v] : config_entries(cfg)) {
        out << k << " = " << v << '\n';
    }
    return out.str();
}

} // namespace peerflow
