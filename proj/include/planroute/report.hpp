#pragma once

#include <cmath>
#include <ostream>
#include <string>

#include "json.hpp"
#include "planroute/router_sim.hpp"
#include "planroute/scheme.hpp"
#include "planroute/verify.hpp"

namespace planroute {

using Json = nlohmann::ordered_json;

inline const char* mode_name(SsspMode m) { return m == SsspMode::Exact ? "exact" : "noise"; }

// Infinite or NaN doubles have no JSON form; they become null.
inline Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json to_json(const SchemeConfig& c) {
  return {{"eps", c.eps},
          {"reps", c.reps},
          {"seed", c.seed},
          {"sssp", c.mode == SsspMode::Exact ? std::string("exact") : "noise:" + std::to_string(c.noise_eps)},
          {"full_multiplier", c.full_multiplier}};
}

inline Json to_json(const SeparatorAudit& a) {
  return {{"separators", a.separators},
          {"degenerate", a.degenerate},
          {"fallbacks", a.fallbacks},
          {"balance_violations", a.balance_violations},
          {"arm_violations", a.arm_violations},
          {"worst_ratio", a.worst_ratio}};
}

inline Json to_json(const SizeReport& r) {
  return {{"id_bits", r.id_bits},
          {"dist_bits", r.dist_bits},
          {"max_label_bits", r.max_label_bits},
          {"mean_label_bits", r.mean_label_bits},
          {"max_table_bits", r.max_table_bits},
          {"mean_table_bits", r.mean_table_bits},
          {"max_trees_per_node", r.max_trees},
          {"mean_trees_per_node", r.mean_trees}};
}

/// Sidecar written next to a PRTS1 file. Build time is kept here, never in
/// the binary, so the binary stays reproducible.
inline Json scheme_sidecar(const Scheme& s) {
  Json levels = Json::array();
  for (const auto& l : s.diagnostics.levels)
    levels.push_back({{"level", l.level},
                      {"delta", l.delta},
                      {"trees", l.trees},
                      {"max_recursion_depth", l.max_depth},
                      {"max_trees_per_vertex_per_recursion", l.max_trees_per_vertex_per_recursion},
                      {"max_trees_per_node_per_cover", l.max_trees_per_node_per_cover},
                      {"spanning_tree", l.spanning}});
  Json hist = Json::object();
  for (const auto& [k, c] : trees_per_node_histogram(s)) hist["<=" + std::to_string(std::int64_t{1} << k)] = c;
  const auto sizes = measure_sizes(s);
  return {{"format", "PRTS1"},
          {"n", s.n},
          {"hierarchy",
           {{"d_star", s.hierarchy.d_star},
            {"levels_built", s.diagnostics.levels_built},
            {"cover_eps", s.hierarchy.cover_eps},
            {"reps", s.hierarchy.reps},
            {"diameter_bound", s.diagnostics.diameter_bound},
            {"diameter_exact", s.diagnostics.diameter_exact}}},
          {"diagnostics",
           {{"trees", s.diagnostics.trees},
            {"levels", levels},
            {"trees_per_node_histogram", hist},
            {"separator_audit", to_json(s.diagnostics.audit)},
            {"note",
             "per-node tree totals are measured against both the per-cover O(eps^-1 log^2 n) count and the "
             "O~(eps^-2) total; neither is asserted"},
            {"build_seconds", s.diagnostics.build_seconds}}},
          {"sizes", to_json(sizes)}};
}

inline Json to_json(const PacketTrace& t) {
  Json j = {{"source", t.source},
            {"target", t.target},
            {"status", to_string(t.status)},
            {"tree", t.tree},
            {"level", t.level},
            {"bound", t.bound},
            {"path", t.path},
            {"hops", t.hops},
            {"routed", t.routed},
            {"exact", t.exact},
            {"stretch", number_or_null(t.stretch)}};
  if (t.strict_checked) {
    j["strict_identical"] = t.strict_identical;
    j["reselect_disagreements"] = t.reselect_disagreements;
  }
  return j;
}

inline Json to_json(const StretchReport& r) {
  Json levels = Json::object();
  for (const auto& [k, c] : r.per_level) levels[std::to_string(k)] = c;
  Json decades = Json::array();
  for (const auto& d : r.decades)
    decades.push_back({{"decade", d.decade}, {"pairs", d.pairs}, {"failures", d.failures}, {"p99", d.p99}, {"max", d.max}});
  Json j = {{"pairs", r.pairs},
            {"delivered", r.delivered},
            {"failures", r.failures},
            {"failure_kinds", r.failure_kinds},
            {"stretch", {{"min", r.min}, {"p50", r.p50}, {"p90", r.p90}, {"p99", r.p99}, {"max", r.max}}},
            {"within_1_plus_eps", r.within_bound},
            {"within_fraction", r.within_fraction()},
            {"below_one", r.below_one},
            {"per_level", levels},
            {"decades", decades}};
  if (r.strict_checked > 0)
    j["strict"] = {{"checked", r.strict_checked},
                   {"identical", r.strict_identical},
                   {"reselect_disagreements", r.reselect_disagreements}};
  return j;
}

/// Per-pair CSV: s,t,exact,routed,stretch,tree,status.
inline void write_stretch_csv(const StretchReport& r, std::ostream& os) {
  os << "s,t,exact,routed,stretch,tree,status\n";
  for (const auto& t : r.traces)
    os << t.source << ',' << t.target << ',' << t.exact << ',' << t.routed << ','
       << (std::isfinite(t.stretch) ? std::to_string(t.stretch) : std::string("inf")) << ',' << t.tree << ','
       << to_string(t.status) << '\n';
}

inline Json to_json(const PropertyResult& r) {
  Json j = {{"property", r.property},
            {"instance", r.instance},
            {"passed", r.passed},
            {"asserted", r.asserted},
            {"measured", number_or_null(r.measured)},
            {"bound", number_or_null(r.bound)}};
  if (r.ci) j["ci"] = {r.ci->low, r.ci->high};
  j["seed"] = r.seed;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

}  // namespace planroute
