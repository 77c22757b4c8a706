#pragma once

#include "peerflow/peerflow.hpp"

#include "json.hpp"
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace peerflow::cli {

namespace fs = std::filesystem;
using nlohmann::json;

struct ConfigFlags {
    std::string config_path;
    std::string system;
    std::optional<int> n;
    std::optional<int> issues;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> sets; // KEY=VALUE
};

struct SweepFlags {
    std::string param;
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
    int runs = 10;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitIo = 3;

/// Baseline, then the config file, then --set pairs, then the named flags.
inline SimConfig resolve_config(const ConfigFlags& flags)
{
    SimConfig cfg = flags.config_path.empty() ? baseline_config() : load_config(flags.config_path);
    for (const auto& kv : flags.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
        set_parameter(cfg, detail::trim(std::string_view(kv).substr(0, eq)),
                      detail::trim(std::string_view(kv).substr(eq + 1)));
    }
    if (!flags.system.empty()) cfg.system = parse_system(flags.system);
    if (flags.n) cfg.n_new_per_issue = *flags.n;
    if (flags.issues) cfg.n_issues = *flags.issues;
    if (flags.seed) cfg.seed = *flags.seed;
    return cfg;
}

inline std::string sha256_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    char buf[1 << 15];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return hex.str();
}

inline std::string utc_now()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline json config_json(const SimConfig& cfg)
{
    json out = json::object();
    for (const auto& [k, v] : config_entries(cfg)) out[k] = v;
    return out;
}

inline SimConfig config_from_json(const json& j)
{
    SimConfig cfg = baseline_config();
    for (const auto& [k, v] : j.items()) set_parameter(cfg, k, v.get<std::string>());
    return cfg;
}

/// Reports an invalid config on `err`; true if it may run.
inline bool check_config(const SimConfig& cfg, std::ostream& err)
{
    const auto problems = validate_config(cfg);
    for (const auto& p : problems) err << "invalid config: " << p << '\n';
    return problems.empty();
}

inline bool prepare_dir(const fs::path& dir, std::ostream& err)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        err << "cannot create output directory " << dir << ": " << ec.message() << '\n';
        return false;
    }
    return true;
}

/// Write each (name, writer) into `dir` and then manifest.json.
inline int write_outputs(const fs::path& dir, const std::string& command, const SimConfig& cfg,
                         const std::string& started,
                         const std::vector<std::pair<std::string, std::function<void(std::ostream&)>>>& files,
                         json extra, std::ostream& err)
{
    json outputs = json::array();
    for (const auto& [name, writer] : files) {
        const fs::path path = dir / name;
        {
            std::ofstream out(path, std::ios::binary);
            if (!out) {
                err << "cannot write " << path << '\n';
                return kExitIo;
            }
            writer(out);
            if (!out) {
                err << "write failed for " << path << '\n';
                return kExitIo;
            }
        }
        outputs.push_back({{"file", name}, {"sha256", sha256_file(path)}});
    }
    json manifest = {{"command", command},     {"config", config_json(cfg)}, {"seed", cfg.seed},
                     {"started_at", started}, {"finished_at", utc_now()},    {"outputs", outputs}};
    for (auto& [k, v] : extra.items()) manifest[k] = v;
    std::ofstream out(dir / "manifest.json");
    if (!(out << manifest.dump(2) << '\n')) {
        err << "cannot write " << (dir / "manifest.json") << '\n';
        return kExitIo;
    }
    return kExitOk;
}

inline int cmd_run(const ConfigFlags& flags, const fs::path& out_dir, std::ostream& err)
{
    const std::string started = utc_now();
    SimConfig cfg;
    try {
        cfg = resolve_config(flags);
    } catch (const std::exception& e) {
        err << "invalid config: " << e.what() << '\n';
        return kExitInvalid;
    }
    if (!check_config(cfg, err)) return kExitInvalid;
    if (!prepare_dir(out_dir, err)) return kExitIo;

    const auto result = run_simulation(cfg);
    const auto& journals = result.final_state.journals;
    const auto metrics = compute_run_metrics(result.ledgers, cfg.n_reviewers, journals);
    const int max_tries = cfg.max_resubmissions + 1;
    const bool quartiles = cfg.system != SystemKind::simplified;
    return write_outputs(
        out_dir, "run", cfg, started,
        {{"issue_metrics.csv", [&](std::ostream& o) { io::write_issue_metrics(o, metrics, max_tries); }},
         {"ledgers.csv", [&](std::ostream& o) { io::write_ledgers(o, result.ledgers); }},
         {"journals.csv", [&](std::ostream& o) { io::write_journals(o, journals, result.ledgers, quartiles); }}},
        json::object(), err);
}

inline int cmd_sweep(const ConfigFlags& flags, const SweepFlags& sweep, const fs::path& out_dir, std::ostream& err)
{
    const std::string started = utc_now();
    SweepSpec spec;
    try {
        spec.base = resolve_config(flags);
    } catch (const std::exception& e) {
        err << "invalid config: " << e.what() << '\n';
        return kExitInvalid;
    }
    if (!check_config(spec.base, err)) return kExitInvalid;
    spec.parameter = sweep.param;
    spec.lo = sweep.lo;
    spec.hi = sweep.hi;
    spec.step = sweep.step;
    spec.runs_per_point = sweep.runs;
    if (const auto problems = validate_sweep(spec); !problems.empty()) {
        for (const auto& p : problems) err << "invalid sweep: " << p << '\n';
        return kExitInvalid;
    }
    if (!prepare_dir(out_dir, err)) return kExitIo;

    SweepResult result;
    try {
        result = run_sweep(spec);
    } catch (const SweepError& e) {
        err << e.what() << '\n';
        return kExitInvalid;
    }
    json extra = {{"sweep",
                   {{"parameter", spec.parameter},
                    {"lo", spec.lo},
                    {"hi", spec.hi},
                    {"step", spec.step},
                    {"runs_per_point", spec.runs_per_point}}}};
    return write_outputs(out_dir, "sweep", spec.base, started,
                         {{"sweep.csv", [&](std::ostream& o) { io::write_sweep(o, result); }},
                          {"table_summary.csv", [&](std::ostream& o) { io::write_table_summary(o, result); }}},
                         extra, err);
}

/// Regenerate one figure's data from the configuration recorded in a run
/// directory. Writes fig<id>.csv into `out_dir` (the run directory if empty).
inline int cmd_figdata(const fs::path& run_dir, const std::string& id, fs::path out_dir, std::ostream& err)
{
    const auto& ids = figure_ids();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
        err << "unknown figure id '" << id << "'; valid ids:";
        for (const auto& v : ids) err << ' ' << v;
        err << '\n';
        return kExitInvalid;
    }
    const fs::path manifest_path = run_dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) {
        err << "missing input: " << manifest_path.string() << '\n';
        return kExitIo;
    }
    SimConfig cfg;
    try {
        const json manifest = json::parse(in);
        for (const auto& entry : manifest.at("outputs")) {
            const fs::path file = run_dir / entry.at("file").get<std::string>();
            if (!fs::exists(file)) {
                err << "missing input: " << file.string() << '\n';
                return kExitIo;
            }
        }
        cfg = config_from_json(manifest.at("config"));
    } catch (const std::exception& e) {
        err << "unreadable manifest " << manifest_path.string() << ": " << e.what() << '\n';
        return kExitInvalid;
    }
    if (!check_config(cfg, err)) return kExitInvalid;
    if (out_dir.empty()) out_dir = run_dir;
    if (!prepare_dir(out_dir, err)) return kExitIo;

    const fs::path path = out_dir / ("fig" + id + ".csv");
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        err << "cannot write " << path << '\n';
        return kExitIo;
    }
    write_figure_data(id, cfg, out);
    return out ? kExitOk : kExitIo;
}

} // namespace peerflow::cli
