// planroute: generate planar graphs, build routing schemes, route packets and
// run the property suites.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "planroute/graph_io.hpp"
#include "planroute/parallel.hpp"
#include "planroute/report.hpp"
#include "planroute/router_sim.hpp"
#include "planroute/scheme.hpp"
#include "planroute/verify.hpp"

using namespace planroute;

namespace {

// Input problems detected after parsing; reported like CLI11 usage errors.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GraphSource {
  std::string file;
  std::string grid;
  std::string tri_grid;
  std::string weights{"unit"};
  std::uint64_t seed{1};

  void add_to(CLI::App* app) {
    auto* f = app->add_option("--graph", file, "Graph file")->check(CLI::ExistingFile);
    auto* g = app->add_option("--grid", grid, "Generate an RxC grid");
    auto* t = app->add_option("--tri-grid", tri_grid, "Generate a triangulated RxC grid");
    f->excludes(g)->excludes(t);
    g->excludes(t);
    app->add_option("--weights", weights, "Generator weights: unit or uniform:LO:HI")->capture_default_str();
    app->add_option("--seed", seed, "Root seed")->capture_default_str();
  }

  Json describe() const {
    if (!file.empty()) return {{"file", file}};
    return {{grid.empty() ? "tri_grid" : "grid", grid.empty() ? tri_grid : grid}, {"weights", weights}, {"seed", seed}};
  }

  EmbeddedGraph load() const {
    if (!file.empty()) {
      try {
        return read_graph(file);
      } catch (const GraphError& e) {
        throw UsageError(file + ": " + e.what());
      }
    }
    const std::string& spec = grid.empty() ? tri_grid : grid;
    if (spec.empty()) throw UsageError("one of --graph, --grid, --tri-grid is required");
    std::smatch m;
    if (!std::regex_match(spec, m, std::regex(R"((\d+)x(\d+))")))
      throw UsageError("grid size must look like RxC, got '" + spec + "'");
    const int r = std::stoi(m[1]), c = std::stoi(m[2]);
    if (r < 1 || c < 1 || static_cast<long long>(r) * c > 5'000'000) throw UsageError("grid size out of range");
    WeightDist wd = WeightDist::unit();
    std::smatch w;
    if (std::regex_match(weights, w, std::regex(R"(uniform:(\d+):(\d+))"))) {
      const long long lo = std::stoll(w[1]), hi = std::stoll(w[2]);
      if (lo < 1 || hi < lo) throw UsageError("uniform weights need 1 <= LO <= HI");
      wd = WeightDist::uniform(lo, hi);
    } else if (weights != "unit") {
      throw UsageError("weights must be unit or uniform:LO:HI");
    }
    return grid.empty() ? generate_triangulated_grid(r, c, wd, seed) : generate_grid(r, c, wd, seed);
  }
};

struct SchemeOptions {
  double eps{0.5};
  int reps{0};
  std::string sssp{"exact"};
  bool full_multiplier{false};

  void add_to(CLI::App* app) {
    app->add_option("--eps", eps, "Stretch parameter")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--reps", reps, "Covers per distance class (0: ceil(2 log2 n))")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app->add_option("--sssp", sssp, "Shortest-path oracle: exact or noise:EPS")->capture_default_str();
    app->add_flag("--full-multiplier", full_multiplier, "Partition diameter multiplier 6400 lg^2 n");
  }

  SchemeConfig config(std::uint64_t seed, int jobs) const {
    SchemeConfig c;
    c.eps = eps;
    c.reps = reps;
    c.seed = seed;
    c.jobs = jobs;
    c.full_multiplier = full_multiplier;
    std::smatch m;
    if (sssp == "exact") {
      c.mode = SsspMode::Exact;
    } else if (std::regex_match(sssp, m, std::regex(R"(noise:([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))"))) {
      c.mode = SsspMode::StretchNoise;
      c.noise_eps = std::stod(m[1]);
      if (!(c.noise_eps > 0)) throw UsageError("noise error must be positive");
    } else {
      throw UsageError("--sssp must be exact or noise:EPS");
    }
    return c;
  }
};

Json envelope(const std::string& command, Json config) {
  return {{"tool", "planroute"}, {"version", kVersion}, {"command", command}, {"config", std::move(config)}};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
}

Scheme load_or_build(const std::string& scheme_file, const EmbeddedGraph& g, const SchemeConfig& cfg) {
  if (scheme_file.empty()) return build_scheme(g, cfg);
  std::ifstream is(scheme_file, std::ios::binary);
  if (!is) throw UsageError("cannot open " + scheme_file);
  Scheme s;
  try {
    s = read_scheme(is);
  } catch (const SchemeError& e) {
    throw UsageError(scheme_file + ": " + e.what());
  }
  if (s.n != g.num_vertices()) throw UsageError("scheme and graph differ in vertex count");
  return s;
}

std::vector<std::pair<VertexId, VertexId>> parse_pairs(const std::string& text, VertexId n) {
  std::vector<std::pair<VertexId, VertexId>> out;
  std::stringstream ss(text);
  std::string item;
  const std::regex re(R"(\s*(\d+):(\d+)\s*)");
  while (std::getline(ss, item, ',')) {
    std::smatch m;
    if (!std::regex_match(item, m, re)) throw UsageError("pairs must look like s:t,s:t; got '" + item + "'");
    const long long s = std::stoll(m[1]), t = std::stoll(m[2]);
    if (s >= n || t >= n) throw UsageError("pair " + item + " names a vertex outside the graph");
    out.push_back({static_cast<VertexId>(s), static_cast<VertexId>(t)});
  }
  if (out.empty()) throw UsageError("no pairs given");
  return out;
}

bool is_assertion_failure(RouteStatus s) {
  return s == RouteStatus::MissingTable || s == RouteStatus::NotAdjacent || s == RouteStatus::Loop;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compact (1+eps)-stretch routing on weighted planar graphs"};
  app.set_version_flag("--version", std::string("planroute ") + kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  int jobs = default_jobs();
  app.add_option("--jobs", jobs, "Worker threads (default: available cores)")->check(CLI::PositiveNumber);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a generated graph");
  GraphSource gen_src;
  std::string gen_out;
  gen->add_option("--grid", gen_src.grid, "RxC grid");
  gen->add_option("--tri-grid", gen_src.tri_grid, "Triangulated RxC grid")->excludes(gen->get_option("--grid"));
  gen->add_option("--weights", gen_src.weights, "unit or uniform:LO:HI")->capture_default_str();
  gen->add_option("--seed", gen_src.seed, "Root seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output graph file (default stdout)");

  // build
  auto* build = app.add_subcommand("build", "Build a routing scheme");
  GraphSource build_src;
  SchemeOptions build_opt;
  std::string build_out;
  build_src.add_to(build);
  build_opt.add_to(build);
  build->add_option("--out", build_out, "Scheme file (PRTS1); the sidecar goes to OUT.json")->required();

  // route
  auto* rt = app.add_subcommand("route", "Route packets for explicit pairs");
  GraphSource rt_src;
  SchemeOptions rt_opt;
  std::string rt_scheme, rt_pairs, rt_out;
  bool rt_strict = false;
  rt_src.add_to(rt);
  rt_opt.add_to(rt);
  rt->add_option("--scheme", rt_scheme, "Scheme file (default: build in memory)")->check(CLI::ExistingFile);
  rt->add_option("--pairs", rt_pairs, "Pairs s:t,s:t,...")->required();
  rt->add_flag("--strict", rt_strict, "Also re-select the tree at every hop and compare");
  rt->add_option("--out", rt_out, "JSON output (default stdout)");

  // eval
  auto* ev = app.add_subcommand("eval", "Measure stretch over sampled pairs");
  GraphSource ev_src;
  SchemeOptions ev_opt;
  std::string ev_scheme, ev_out, ev_csv, ev_sampler{"uniform"};
  std::int64_t ev_count = 1000;
  bool ev_strict = false;
  ev_src.add_to(ev);
  ev_opt.add_to(ev);
  ev->add_option("--scheme", ev_scheme, "Scheme file (default: build in memory)")->check(CLI::ExistingFile);
  ev->add_option("--count", ev_count, "Number of pairs")->check(CLI::PositiveNumber)->capture_default_str();
  ev->add_option("--sampler", ev_sampler, "uniform or stratified")
      ->check(CLI::IsMember({"uniform", "stratified"}))
      ->capture_default_str();
  ev->add_flag("--strict", ev_strict, "Also re-select the tree at every hop and compare");
  ev->add_option("--out", ev_out, "JSON report (default stdout)");
  ev->add_option("--csv", ev_csv, "Per-pair CSV");

  // verify
  auto* ver = app.add_subcommand("verify", "Run property suites");
  std::string suite{"all"}, ver_out;
  int ver_n = 256;
  std::uint64_t ver_seed = 1;
  std::vector<std::string> suites{"all"};
  for (const auto& s : suite_names()) suites.push_back(s);
  ver->add_option("--suite", suite, "Suite name")->check(CLI::IsMember(suites))->capture_default_str();
  ver->add_option("--n", ver_n, "Instance size")->check(CLI::Range(16, 1 << 20))->capture_default_str();
  ver->add_option("--seed", ver_seed, "Root seed")->capture_default_str();
  ver->add_option("--out", ver_out, "JSON lines output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) {
      const EmbeddedGraph g = gen_src.load();
      std::ostringstream os;
      os << "# planroute " << kVersion << " generate "
         << (gen_src.grid.empty() ? "tri-grid=" + gen_src.tri_grid : "grid=" + gen_src.grid)
         << " weights=" << gen_src.weights << " seed=" << gen_src.seed << '\n';
      write_graph(g, os);
      write_text(gen_out, os.str());
      return 0;
    }

    if (build->parsed()) {
      const EmbeddedGraph g = build_src.load();
      const SchemeConfig cfg = build_opt.config(build_src.seed, jobs);
      const Scheme s = build_scheme(g, cfg);
      {
        std::ofstream os(build_out, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + build_out);
        write_scheme(s, os);
      }
      Json config = to_json(s.config);
      config["graph"] = build_src.describe();
      Json side = envelope("build", config);
      side.update(scheme_sidecar(s));
      write_text(build_out + ".json", side.dump(2) + "\n");
      const auto sizes = measure_sizes(s);
      std::cout << "wrote " << build_out << " (" << s.n << " nodes, " << s.diagnostics.trees << " trees, "
                << s.diagnostics.levels_built << " levels, max label " << sizes.max_label_bits << " bits)\n";
      return 0;
    }

    if (rt->parsed()) {
      const EmbeddedGraph g = rt_src.load();
      const auto pairs = parse_pairs(rt_pairs, g.num_vertices());
      const SchemeConfig cfg = rt_opt.config(rt_src.seed, jobs);
      const Scheme s = load_or_build(rt_scheme, g, cfg);
      Json config = to_json(s.config);
      config["graph"] = rt_src.describe();
      if (!rt_scheme.empty()) config["scheme_file"] = rt_scheme;
      Json out = envelope("route", config);
      out["traces"] = Json::array();
      bool broken = false;
      RouteOptions ro;
      ro.strict = rt_strict;
      for (auto [a, b] : pairs) {
        const auto t = route(g, s, a, b, -1, ro);
        if (is_assertion_failure(t.status) || (t.delivered() && t.stretch < 1.0)) broken = true;
        out["traces"].push_back(to_json(t));
      }
      write_text(rt_out, out.dump(2) + "\n");
      return broken ? 1 : 0;
    }

    if (ev->parsed()) {
      const EmbeddedGraph g = ev_src.load();
      const SchemeConfig cfg = ev_opt.config(ev_src.seed, jobs);
      const Scheme s = load_or_build(ev_scheme, g, cfg);
      EvalOptions eo;
      eo.strict = ev_strict;
      eo.jobs = jobs;
      eo.keep_traces = !ev_csv.empty();
      const auto sampler = ev_sampler == "uniform" ? PairSampler::Uniform : PairSampler::StratifiedDecade;
      const auto rep = evaluate(g, s, sampler, ev_count, hash_keys(ev_src.seed, {0x6576ULL}), eo);
      Json config = to_json(s.config);
      config["graph"] = ev_src.describe();
      config["count"] = ev_count;
      config["sampler"] = ev_sampler;
      if (!ev_scheme.empty()) config["scheme_file"] = ev_scheme;
      Json out = envelope("eval", config);
      out["report"] = to_json(rep);
      write_text(ev_out, out.dump(2) + "\n");
      if (!ev_csv.empty()) {
        std::ostringstream csv;
        csv << "# planroute " << kVersion << " eval " << config.dump() << '\n';
        write_stretch_csv(rep, csv);
        write_text(ev_csv, csv.str());
      }
      std::int64_t broken = rep.below_one;
      for (const auto& [kind, c] : rep.failure_kinds)
        if (kind != to_string(RouteStatus::NoTree)) broken += c;
      return broken > 0 ? 1 : 0;
    }

    if (ver->parsed()) {
      Json config = {{"suite", suite}, {"n", ver_n}, {"seed", ver_seed}};
      std::ofstream file;
      if (!ver_out.empty()) {
        file.open(ver_out);
        if (!file) throw std::runtime_error("cannot write " + ver_out);
      }
      std::ostream& lines = ver_out.empty() ? std::cout : file;
      std::ostream& table = ver_out.empty() ? std::cerr : std::cout;
      lines << envelope("verify", config).dump() << '\n';
      std::vector<PropertyResult> results;
      run_suite(suite, ver_n, ver_seed, jobs, [&](const PropertyResult& r) {
        lines << to_json(r).dump() << '\n';
        lines.flush();
        results.push_back(r);
      });
      int failed = 0;
      table << "\nproperty                    result  measured      bound         instance\n";
      for (const auto& r : results) {
        const char* verdict = !r.asserted ? "info" : r.passed ? "pass" : "FAIL";
        char buf[96];
        std::snprintf(buf, sizeof buf, "%-27s %-7s %-13.6g %-13.6g ", r.property.c_str(), verdict, r.measured, r.bound);
        table << buf << r.instance << '\n';
        if (r.asserted && !r.passed) ++failed;
      }
      table << results.size() << " properties, " << failed << " failed\n";
      for (const auto& r : results)
        if (r.asserted && !r.passed) std::cerr << "FAILED " << to_json(r).dump() << '\n';
      return failed > 0 ? 1 : 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
