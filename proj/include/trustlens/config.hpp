#pragma once

// Run configuration: a flat text file of `section.key = value` lines. Blank
// lines and `#` comments are ignored. Any key can be overridden from the
// environment as TRUSTLENS_SECTION_KEY (upper case, dot replaced by '_').

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trustlens/dataset.hpp"
#include "trustlens/error.hpp"
#include "trustlens/evaluation.hpp"

namespace trustlens {

struct RunConfig {
    std::filesystem::path dataset_path;
    RatingFormat dataset_format = RatingFormat::tab;
    ExperimentConfig experiment;
    std::filesystem::path output_dir = ".";
    std::string output_csv = "report.csv";
    std::string output_json = "report.json";
    std::string output_graph = "graph.txt";
};

struct ConfigKey {
    std::string_view name;
    std::string_view fallback; ///< empty means required
    std::string_view help;
};

inline constexpr std::array<ConfigKey, 15> config_keys{{
    {"dataset.path", "", "rating file; relative paths resolve against the config file"},
    {"dataset.format", "tab", "tab | double-colon"},
    {"experiment.windows", "5", "number of equal-duration windows, >= 1"},
    {"experiment.cumulative", "false", "windows grow from the first timestamp instead of being disjoint"},
    {"experiment.user_cap", "0", "users sampled per window, 0 keeps all"},
    {"experiment.seed", "42", "sampling seed"},
    {"similarity.min_overlap", "10", "co-rated items needed for a similarity edge, >= 2"},
    {"trust.k_exponent", "1", "odd positive exponent of the evidence mapping"},
    {"predictor.normalize", "true", "divide the Resnick sum by the total absolute weight"},
    {"eval.fast_mode", "false", "predict from the full-window graph (held-out rating leaks)"},
    {"eval.min_user_ratings", "10", "ratings a user needs in a window to be evaluated"},
    {"output.dir", ".", "report directory"},
    {"output.csv", "report.csv", "CSV report file name"},
    {"output.json", "report.json", "JSON report file name"},
    {"output.graph", "graph.txt", "edge-list file name for dump-graph"},
}};

inline std::string env_name(std::string_view key) {
    std::string out = "TRUSTLENS_";
    for (char c : key)
        out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    return std::string(s.substr(b, s.find_last_not_of(ws) - b + 1));
}

inline bool known_key(std::string_view k) {
    return std::any_of(config_keys.begin(), config_keys.end(), [&](const ConfigKey& c) { return c.name == k; });
}

template <class T>
bool parse_unsigned(const std::string& s, T& out) {
    if (s.empty() || s[0] == '-' || s[0] == '+')
        return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

inline bool parse_bool(const std::string& s, bool& out) {
    std::string v;
    for (char c : s)
        v += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (v == "true" || v == "1" || v == "yes" || v == "on")
        out = true;
    else if (v == "false" || v == "0" || v == "no" || v == "off")
        out = false;
    else
        return false;
    return true;
}

} // namespace detail

using ConfigValues = std::map<std::string, std::string>;

/// Parses config text. Problems are appended to `violations`.
inline ConfigValues parse_config(std::istream& in, std::vector<std::string>& violations) {
    ConfigValues values;
    std::string line;
    for (std::size_t no = 1; std::getline(in, line); ++no) {
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        const std::string body = detail::trim(line);
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            violations.push_back("line " + std::to_string(no) + ": expected 'section.key = value'");
            continue;
        }
        const std::string key = detail::trim(std::string_view(body).substr(0, eq));
        const std::string value = detail::trim(std::string_view(body).substr(eq + 1));
        if (!detail::known_key(key)) {
            violations.push_back("line " + std::to_string(no) + ": unknown key '" + key + "'");
            continue;
        }
        if (values.count(key))
            violations.push_back("line " + std::to_string(no) + ": duplicate key '" + key + "'");
        values[key] = value;
    }
    return values;
}

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

inline std::optional<std::string> process_env(const std::string& name) {
    if (const char* v = std::getenv(name.c_str()))
        return std::string(v);
    return std::nullopt;
}

/// Builds a RunConfig from parsed values, environment overrides and defaults.
/// `base_dir` anchors a relative dataset path. Every violation is collected.
inline RunConfig resolve_config(ConfigValues values, const std::filesystem::path& base_dir,
                                std::vector<std::string>& violations, const EnvLookup& env = process_env,
                                bool check_paths = true) {
    for (const auto& k : config_keys)
        if (auto v = env(env_name(k.name)))
            values[std::string(k.name)] = detail::trim(*v);
    auto get = [&](std::string_view key) {
        auto it = values.find(std::string(key));
        if (it != values.end())
            return it->second;
        for (const auto& k : config_keys)
            if (k.name == key)
                return std::string(k.fallback);
        return std::string();
    };
    auto bad = [&](std::string_view key, const std::string& why) {
        violations.push_back(std::string(key) + ": " + why);
    };

    RunConfig cfg;
    auto& ex = cfg.experiment;
    auto& ev = ex.eval;

    const std::string path = get("dataset.path");
    if (path.empty()) {
        bad("dataset.path", "required");
    } else {
        cfg.dataset_path = std::filesystem::path(path);
        if (cfg.dataset_path.is_relative())
            cfg.dataset_path = base_dir / cfg.dataset_path;
        cfg.dataset_path = std::filesystem::absolute(cfg.dataset_path).lexically_normal();
        if (check_paths && !std::filesystem::is_regular_file(cfg.dataset_path))
            bad("dataset.path", "no such file " + cfg.dataset_path.string());
    }
    try {
        cfg.dataset_format = parse_rating_format(get("dataset.format"));
    } catch (const error&) {
        bad("dataset.format", "expected tab or double-colon, got '" + get("dataset.format") + "'");
    }

    auto unsigned_key = [&](std::string_view key, auto& out, std::uint64_t min) {
        const std::string v = get(key);
        if (!detail::parse_unsigned(v, out))
            bad(key, "expected a non-negative integer, got '" + v + "'");
        else if (static_cast<std::uint64_t>(out) < min)
            bad(key, "must be at least " + std::to_string(min));
    };
    auto bool_key = [&](std::string_view key, bool& out) {
        const std::string v = get(key);
        if (!detail::parse_bool(v, out))
            bad(key, "expected true or false, got '" + v + "'");
    };

    unsigned_key("experiment.windows", ex.windows, 1);
    bool_key("experiment.cumulative", ex.cumulative);
    unsigned_key("experiment.user_cap", ex.user_cap, 0);
    unsigned_key("experiment.seed", ex.seed, 0);
    unsigned_key("similarity.min_overlap", ev.min_overlap, 2);
    {
        const std::string v = get("trust.k_exponent");
        int k = 0;
        auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), k);
        if (v.empty() || ec != std::errc{} || p != v.data() + v.size())
            bad("trust.k_exponent", "expected an integer, got '" + v + "'");
        else if (!valid_exponent(k))
            bad("trust.k_exponent", "must be an odd positive integer, got " + v);
        else
            ev.evidence.k = k;
    }
    bool_key("predictor.normalize", ev.normalize);
    bool_key("eval.fast_mode", ev.fast_mode);
    unsigned_key("eval.min_user_ratings", ev.min_user_ratings, 0);

    cfg.output_dir = get("output.dir");
    if (cfg.output_dir.empty())
        bad("output.dir", "must not be empty");
    for (auto [key, field] : {std::pair{"output.csv", &cfg.output_csv}, {"output.json", &cfg.output_json},
                              {"output.graph", &cfg.output_graph}}) {
        *field = get(key);
        if (field->empty())
            bad(key, "must not be empty");
    }
    return cfg;
}

inline void throw_violations(const std::vector<std::string>& violations) {
    if (violations.empty())
        return;
    std::string msg = "invalid config: ";
    for (std::size_t k = 0; k < violations.size(); ++k)
        msg += (k ? "; " : "") + violations[k];
    throw config_error(msg);
}

/// Reads and validates a config file; throws config_error listing every
/// violation.
inline RunConfig load_config(const std::filesystem::path& file, const EnvLookup& env = process_env) {
    std::ifstream in(file);
    if (!in)
        throw config_error("cannot open config file " + file.string());
    std::vector<std::string> violations;
    auto values = parse_config(in, violations);
    auto cfg = resolve_config(std::move(values), file.parent_path(), violations, env);
    throw_violations(violations);
    return cfg;
}

/// The resolved settings in config-file syntax, one key per line.
inline std::string format_config(const RunConfig& cfg) {
    const auto& ex = cfg.experiment;
    const auto& ev = ex.eval;
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    const std::map<std::string_view, std::string> v{
        {"dataset.path", cfg.dataset_path.string()},
        {"dataset.format", std::string(format_name(cfg.dataset_format))},
        {"experiment.windows", std::to_string(ex.windows)},
        {"experiment.cumulative", b(ex.cumulative)},
        {"experiment.user_cap", std::to_string(ex.user_cap)},
        {"experiment.seed", std::to_string(ex.seed)},
        {"similarity.min_overlap", std::to_string(ev.min_overlap)},
        {"trust.k_exponent", std::to_string(ev.evidence.k)},
        {"predictor.normalize", b(ev.normalize)},
        {"eval.fast_mode", b(ev.fast_mode)},
        {"eval.min_user_ratings", std::to_string(ev.min_user_ratings)},
        {"output.dir", cfg.output_dir.string()},
        {"output.csv", cfg.output_csv},
        {"output.json", cfg.output_json},
        {"output.graph", cfg.output_graph},
    };
    std::ostringstream out;
    for (const auto& k : config_keys)
        out << k.name << " = " << v.at(k.name) << '\n';
    return out.str();
}

} // namespace trustlens
