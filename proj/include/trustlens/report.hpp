#pragma once

#include <array>
#include <charconv>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "trustlens/evaluation.hpp"

namespace trustlens {

inline constexpr std::string_view csv_header =
    "ts_index,mode,population,sparsity,n_predictions,coverage,mae_percent,fscore,ucg,tgc,tp,fp,fn,tn";

/// Shortest text that reads back to the same double.
inline std::string format_number(double v) {
    std::array<char, 32> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), p);
}

inline std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

/// One row per (window, mode, population). The user coverage gain compares
/// the two modes and is written on hybrid rows only.
inline void write_csv(std::ostream& out, const std::vector<WindowReport>& reports) {
    out << csv_header << '\n';
    for (const auto& w : reports) {
        for (const auto& m : w.modes) {
            for (Population pop : all_populations) {
                const auto& p = m[pop];
                const bool hybrid = m.mode == NeighborMode::hybrid;
                out << w.ts_index << ',' << mode_name(m.mode) << ',' << population_name(pop) << ','
                    << format_number(w.sparsity) << ',' << p.predicted << ',' << format_number(p.coverage) << ','
                    << format_number(p.mae_percent) << ',' << format_number(p.fscore) << ','
                    << format_number(hybrid ? w.ucg : std::nullopt) << ',' << format_number(p.tgc) << ','
                    << p.confusion.tp << ',' << p.confusion.fp << ',' << p.confusion.fn << ',' << p.confusion.tn
                    << '\n';
            }
        }
    }
}

namespace detail {

inline nlohmann::ordered_json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

} // namespace detail

inline nlohmann::ordered_json to_json(const PopulationReport& p) {
    return {
        {"attempted", p.attempted},
        {"n_predictions", p.predicted},
        {"coverage", p.coverage},
        {"mae_percent", detail::optional_json(p.mae_percent)},
        {"fscore", p.fscore},
        {"tgc", detail::optional_json(p.tgc)},
        {"tgc_pooled", detail::optional_json(p.tgc_pooled)},
        {"confusion", {{"tp", p.confusion.tp}, {"fp", p.confusion.fp}, {"fn", p.confusion.fn}, {"tn", p.confusion.tn}}},
    };
}

inline nlohmann::ordered_json to_json(const WindowReport& w) {
    nlohmann::ordered_json modes = nlohmann::ordered_json::object();
    for (const auto& m : w.modes) {
        nlohmann::ordered_json pops = nlohmann::ordered_json::object();
        for (Population pop : all_populations)
            pops[std::string(population_name(pop))] = to_json(m[pop]);
        modes[std::string(mode_name(m.mode))] = pops;
    }
    return {
        {"ts_index", w.ts_index},
        {"window", {{"start", w.window.start}, {"end", w.window.end}}},
        {"ratings", w.ratings},
        {"users", w.users},
        {"items", w.items},
        {"sparsity", detail::optional_json(w.sparsity)},
        {"new_users", w.new_users},
        {"new_items", w.new_items},
        {"graph_edges", w.graph_edges},
        {"ucg", detail::optional_json(w.ucg)},
        {"ucg_inputs",
         {{"predictions_hybrid", w.ucg_inputs.predictions_hybrid},
          {"population_hybrid", w.ucg_inputs.population_hybrid},
          {"predictions_standard", w.ucg_inputs.predictions_standard},
          {"population_standard", w.ucg_inputs.population_standard}}},
        {"modes", modes},
    };
}

inline nlohmann::ordered_json to_json(const std::vector<WindowReport>& reports) {
    nlohmann::ordered_json windows = nlohmann::ordered_json::array();
    for (const auto& w : reports)
        windows.push_back(to_json(w));
    return {{"windows", windows}};
}

} // namespace trustlens
