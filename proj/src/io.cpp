#include "consensus/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace consensus {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where.empty() ? what : where + ": " + what);
}

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items())
    if (!ok.count(item.key())) fail(where, "unknown key \"" + item.key() + "\"");
}

std::uint64_t get_uint(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
    fail(where, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

int get_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < -1000000 || v > 1000000) fail(where, "integer out of range");
  return static_cast<int>(v);
}

double get_double(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

bool get_bool(const Json& j, const std::string& where) {
  if (!j.is_boolean()) fail(where, "expected true or false");
  return j.get<bool>();
}

std::string get_string(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected a string");
  return j.get<std::string>();
}

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) fail(where, std::string("missing required key \"") + key + "\"");
  return j.at(key);
}

template <class T, class F>
std::vector<T> get_list(const Json& j, const std::string& where, F item) {
  if (!j.is_array()) fail(where, "expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(item(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

const char* tie_break_name(TieBreak t) { return t == TieBreak::LowestSender ? "lowest-sender" : "seeded-random"; }

PatternSpec pattern_from_json(const Json& j, std::size_t n, std::vector<std::string>& warnings) {
  const std::string where = "pattern";
  check_keys(j, where, {"family", "seed", "period", "graph", "graphs"});
  PatternSpec spec;
  spec.family = get_string(require(j, "family", where), where + ".family");
  static const std::set<std::string> families{"fixed", "periodic", "random-rooted", "random-nonsplit",
                                              "rotating-star", "bidirectional-intermittent"};
  if (!families.count(spec.family)) fail(where + ".family", "unknown family \"" + spec.family + "\"");
  if (j.contains("seed")) spec.seed = get_uint(j["seed"], where + ".seed");
  if (j.contains("period")) {
    spec.period = get_uint(j["period"], where + ".period");
    if (spec.period < 1) fail(where + ".period", "must be at least 1");
  }
  if (spec.family == "fixed") {
    if (j.contains("graphs")) fail(where, "family \"fixed\" takes \"graph\", not \"graphs\"");
    spec.graphs.push_back(graph_from_json(require(j, "graph", where), &warnings));
  } else if (spec.family == "periodic") {
    if (j.contains("graph")) fail(where, "family \"periodic\" takes \"graphs\", not \"graph\"");
    const Json& list = require(j, "graphs", where);
    if (!list.is_array() || list.empty()) fail(where + ".graphs", "expected a nonempty array");
    for (const auto& g : list) spec.graphs.push_back(graph_from_json(g, &warnings));
  } else if (j.contains("graph") || j.contains("graphs")) {
    fail(where, "family \"" + spec.family + "\" does not take explicit graphs");
  }
  for (const auto& g : spec.graphs)
    if (g.size() != n)
      fail(where, "graph has " + std::to_string(g.size()) + " agents, scenario has " + std::to_string(n));
  return spec;
}

Json pattern_to_json(const PatternSpec& spec) {
  Json j{{"family", spec.family}, {"period", spec.period}};
  if (spec.seed) j["seed"] = *spec.seed;
  if (spec.family == "fixed" && !spec.graphs.empty()) j["graph"] = graph_to_json(spec.graphs.front());
  if (spec.family == "periodic") {
    j["graphs"] = Json::array();
    for (const auto& g : spec.graphs) j["graphs"].push_back(graph_to_json(g));
  }
  return j;
}

InitialSpec initial_from_json(const Json& j, std::size_t n, int d) {
  const std::string where = "initial";
  check_keys(j, where, {"kind", "seed", "positions"});
  InitialSpec spec;
  const std::string kind = get_string(require(j, "kind", where), where + ".kind");
  if (kind == "random-unit-box") {
    spec.kind = InitialSpec::Kind::RandomUnitBox;
    if (j.contains("positions")) fail(where, "\"positions\" requires kind \"explicit\"");
    if (j.contains("seed")) spec.seed = get_uint(j["seed"], where + ".seed");
  } else if (kind == "explicit") {
    spec.kind = InitialSpec::Kind::Explicit;
    if (j.contains("seed")) fail(where, "\"seed\" requires kind \"random-unit-box\"");
    spec.positions = points_from_json(require(j, "positions", where));
    if (spec.positions.cols() != static_cast<Eigen::Index>(n) || spec.positions.rows() != d)
      fail(where + ".positions", "expected " + std::to_string(n) + " agents of dimension " + std::to_string(d));
  } else {
    fail(where + ".kind", "expected \"random-unit-box\" or \"explicit\"");
  }
  return spec;
}

Json points_to_json(const PointSet& pts) {
  Json list = Json::array();
  for (Eigen::Index c = 0; c < pts.cols(); ++c) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < pts.rows(); ++k) row.push_back(pts(k, c));
    list.push_back(std::move(row));
  }
  return list;
}

Json nullable(const std::optional<std::uint64_t>& v) { return v ? Json(*v) : Json(nullptr); }

double json_number(double x) { return std::isfinite(x) ? x : 0.0; }

}  // namespace

CommGraph graph_from_json(const Json& j, std::vector<std::string>* warnings) {
  const std::string where = "graph";
  check_keys(j, where, {"n", "edges"});
  const std::uint64_t n = get_uint(require(j, "n", where), where + ".n");
  if (n < 1 || n > 64) fail(where + ".n", "must be between 1 and 64");
  const Json& edges = require(j, "edges", where);
  if (!edges.is_array()) fail(where + ".edges", "expected an array of [from, to] pairs");
  std::vector<std::pair<AgentId, AgentId>> list;
  std::vector<bool> looped(n, false);
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2) fail(where + ".edges", "expected [from, to] pairs");
    const auto p = get_uint(e[0], where + ".edges");
    const auto q = get_uint(e[1], where + ".edges");
    if (p >= n || q >= n) fail(where + ".edges", "agent id out of range in [" + std::to_string(p) + ", " + std::to_string(q) + "]");
    if (p == q) looped[p] = true;
    list.emplace_back(p, q);
  }
  if (warnings) {
    std::string missing;
    for (std::uint64_t p = 0; p < n; ++p)
      if (!looped[p]) missing += (missing.empty() ? "" : ", ") + std::to_string(p);
    if (!missing.empty()) warnings->push_back("graph: added missing self-loops on agents " + missing);
  }
  return CommGraph(n, list);
}

Json graph_to_json(const CommGraph& g) {
  Json edges = Json::array();
  for (const auto& [p, q] : g.edges()) edges.push_back({p, q});
  return Json{{"n", g.size()}, {"edges", edges}};
}

Json polytope_to_json(const Polytoped& poly) { return points_to_json(poly.vertices); }

PointSet points_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) fail("points", "expected a nonempty array of coordinate arrays");
  const std::size_t d = j[0].is_array() ? j[0].size() : 0;
  if (d == 0) fail("points", "expected arrays of at least one coordinate");
  PointSet pts(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    if (!j[c].is_array() || j[c].size() != d) fail("points", "all points must have " + std::to_string(d) + " coordinates");
    for (std::size_t k = 0; k < d; ++k) {
      const double v = get_double(j[c][k], "points");
      if (!std::isfinite(v)) fail("points", "non-finite coordinate");
      pts(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return pts;
}

bool same_spec(const RunSpec& a, const RunSpec& b) {
  return a.n == b.n && a.d == b.d && a.algorithm == b.algorithm && a.options.tie_break == b.options.tie_break &&
         a.options.tie_seed == b.options.tie_seed && a.options.frame_reduction == b.options.frame_reduction &&
         a.options.allow_unsafe_component_midpoint == b.options.allow_unsafe_component_midpoint &&
         a.pattern == b.pattern && a.initial == b.initial && a.epsilon == b.epsilon &&
         a.max_rounds == b.max_rounds && a.seed == b.seed;
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return same_spec(a.spec, b.spec) && a.audit == b.audit && a.output == b.output && a.sweep == b.sweep;
}

ScenarioConfig config_from_json(const Json& j) {
  check_keys(j, "config", {"n", "d", "algorithm", "pattern", "initial", "epsilon", "max_rounds", "seed",
                           "tie_break", "tie_seed", "frame_reduction", "allow_unsafe_component_midpoint",
                           "audit", "output", "sweep"});
  ScenarioConfig cfg;
  RunSpec& s = cfg.spec;
  s.n = get_uint(require(j, "n", ""), "n");
  if (s.n < 1 || s.n > 64) fail("n", "must be between 1 and 64");
  s.d = get_int(require(j, "d", ""), "d");
  if (s.d < 1) fail("d", "must be at least 1");
  try {
    s.algorithm = parse_algorithm(get_string(require(j, "algorithm", ""), "algorithm"));
  } catch (const std::invalid_argument& e) {
    fail("algorithm", e.what());
  }
  s.pattern = pattern_from_json(require(j, "pattern", ""), s.n, cfg.warnings);
  if (j.contains("initial")) s.initial = initial_from_json(j["initial"], s.n, s.d);
  if (j.contains("epsilon")) s.epsilon = get_double(j["epsilon"], "epsilon");
  if (j.contains("max_rounds")) s.max_rounds = get_uint(j["max_rounds"], "max_rounds");
  if (j.contains("seed")) s.seed = get_uint(j["seed"], "seed");
  if (j.contains("tie_break")) {
    const std::string t = get_string(j["tie_break"], "tie_break");
    if (t == "lowest-sender") s.options.tie_break = TieBreak::LowestSender;
    else if (t == "seeded-random") s.options.tie_break = TieBreak::SeededRandom;
    else fail("tie_break", "expected \"lowest-sender\" or \"seeded-random\"");
  }
  if (j.contains("tie_seed")) s.options.tie_seed = get_uint(j["tie_seed"], "tie_seed");
  if (j.contains("frame_reduction")) s.options.frame_reduction = get_bool(j["frame_reduction"], "frame_reduction");
  if (j.contains("allow_unsafe_component_midpoint"))
    s.options.allow_unsafe_component_midpoint =
        get_bool(j["allow_unsafe_component_midpoint"], "allow_unsafe_component_midpoint");

  if (j.contains("audit")) {
    const Json& a = j["audit"];
    check_keys(a, "audit", {"safeness", "matrices", "moreau", "moreau_window"});
    if (a.contains("safeness")) cfg.audit.safeness = get_bool(a["safeness"], "audit.safeness");
    if (a.contains("matrices")) cfg.audit.matrices = get_bool(a["matrices"], "audit.matrices");
    if (a.contains("moreau")) cfg.audit.moreau = get_bool(a["moreau"], "audit.moreau");
    if (a.contains("moreau_window")) cfg.audit.moreau_window = get_uint(a["moreau_window"], "audit.moreau_window");
  }
  if (j.contains("output")) {
    const Json& o = j["output"];
    check_keys(o, "output", {"trace", "deltas", "summary", "report", "sweep"});
    auto str = [&](const char* key, std::string& dst) {
      if (o.contains(key)) dst = get_string(o[key], std::string("output.") + key);
    };
    str("trace", cfg.output.trace);
    str("deltas", cfg.output.deltas);
    str("summary", cfg.output.summary);
    str("report", cfg.output.report);
    str("sweep", cfg.output.sweep);
  }
  if (j.contains("sweep")) {
    const Json& w = j["sweep"];
    check_keys(w, "sweep", {"n", "d", "algorithm", "seed"});
    if (w.contains("n"))
      cfg.sweep.n = get_list<std::size_t>(w["n"], "sweep.n", [](const Json& v, const std::string& at) {
        const auto n = get_uint(v, at);
        if (n < 1 || n > 64) fail(at, "must be between 1 and 64");
        return static_cast<std::size_t>(n);
      });
    if (w.contains("d"))
      cfg.sweep.d = get_list<int>(w["d"], "sweep.d", [](const Json& v, const std::string& at) {
        const int d = get_int(v, at);
        if (d < 1) fail(at, "must be at least 1");
        return d;
      });
    if (w.contains("algorithm"))
      cfg.sweep.algorithm = get_list<std::string>(w["algorithm"], "sweep.algorithm", [](const Json& v, const std::string& at) {
        const std::string text = get_string(v, at);
        try {
          (void)parse_algorithm(text);
        } catch (const std::invalid_argument& e) {
          fail(at, e.what());
        }
        return text;
      });
    if (w.contains("seed"))
      cfg.sweep.seed = get_list<std::uint64_t>(w["seed"], "sweep.seed", get_uint);
  }
  return cfg;
}

Json config_to_json(const ScenarioConfig& cfg) {
  const RunSpec& s = cfg.spec;
  Json initial;
  if (s.initial.kind == InitialSpec::Kind::Explicit) {
    initial = Json{{"kind", "explicit"}, {"positions", points_to_json(s.initial.positions)}};
  } else {
    initial = Json{{"kind", "random-unit-box"}};
    if (s.initial.seed) initial["seed"] = *s.initial.seed;
  }
  Json j{{"n", s.n},
         {"d", s.d},
         {"algorithm", to_string(s.algorithm)},
         {"pattern", pattern_to_json(s.pattern)},
         {"initial", initial},
         {"epsilon", s.epsilon},
         {"max_rounds", s.max_rounds},
         {"seed", s.seed},
         {"tie_break", tie_break_name(s.options.tie_break)},
         {"tie_seed", s.options.tie_seed},
         {"frame_reduction", s.options.frame_reduction},
         {"allow_unsafe_component_midpoint", s.options.allow_unsafe_component_midpoint},
         {"audit",
          {{"safeness", cfg.audit.safeness},
           {"matrices", cfg.audit.matrices},
           {"moreau", cfg.audit.moreau},
           {"moreau_window", cfg.audit.moreau_window}}},
         {"output",
          {{"trace", cfg.output.trace},
           {"deltas", cfg.output.deltas},
           {"summary", cfg.output.summary},
           {"report", cfg.output.report},
           {"sweep", cfg.output.sweep}}}};
  if (!cfg.sweep.empty())
    j["sweep"] = Json{{"n", cfg.sweep.n}, {"d", cfg.sweep.d}, {"algorithm", cfg.sweep.algorithm}, {"seed", cfg.sweep.seed}};
  return j;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  os << "round,agent";
  for (int k = 0; k < trace.d; ++k) os << ",comp_" << k;
  os << '\n';
  for (const auto& c : trace.configurations) {
    for (Eigen::Index p = 0; p < c.positions.cols(); ++p) {
      os << c.round << ',' << p;
      for (Eigen::Index k = 0; k < c.positions.rows(); ++k) os << ',' << format_double(c.positions(k, p));
      os << '\n';
    }
  }
}

void write_deltas_csv(std::ostream& os, const RunTrace& trace) {
  os << "round,k,delta_k\n";
  for (std::size_t t = 0; t < trace.deltas.size(); ++t)
    for (Eigen::Index k = 0; k < trace.deltas[t].size(); ++k)
      os << t << ',' << k << ',' << format_double(trace.deltas[t](k)) << '\n';
}

RunTrace read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("trace: empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 3 || header[0] != "round" || header[1] != "agent")
    throw ConfigError("trace: header must start with round,agent,comp_0");
  const int d = static_cast<int>(header.size()) - 2;
  for (int k = 0; k < d; ++k)
    if (header[static_cast<std::size_t>(k) + 2] != "comp_" + std::to_string(k))
      throw ConfigError("trace: unexpected column " + header[static_cast<std::size_t>(k) + 2]);

  struct Row {
    std::uint64_t round;
    std::size_t agent;
    std::vector<double> x;
  };
  std::vector<Row> rows;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    Row r;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != header.size())
      throw ConfigError("trace line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) + " fields");
    auto parse_num = [&](const std::string& text, auto& out) {
      const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
      if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ConfigError("trace line " + std::to_string(lineno) + ": bad number \"" + text + "\"");
    };
    parse_num(cells[0], r.round);
    parse_num(cells[1], r.agent);
    r.x.resize(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) parse_num(cells[static_cast<std::size_t>(k) + 2], r.x[static_cast<std::size_t>(k)]);
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw ConfigError("trace: no data rows");

  std::size_t n = 0;
  while (n < rows.size() && rows[n].round == rows[0].round) ++n;
  if (rows[0].round != 0) throw ConfigError("trace: must start at round 0");
  if (rows.size() % n != 0) throw ConfigError("trace: rounds have different numbers of agents");

  RunTrace trace;
  trace.n = n;
  trace.d = d;
  for (std::size_t base = 0; base < rows.size(); base += n) {
    Configuration c;
    c.round = rows[base].round;
    if (c.round != trace.configurations.size())
      throw ConfigError("trace: round " + std::to_string(c.round) + " out of sequence");
    c.positions.resize(d, static_cast<Eigen::Index>(n));
    for (std::size_t p = 0; p < n; ++p) {
      const Row& r = rows[base + p];
      if (r.round != c.round || r.agent != p)
        throw ConfigError("trace: expected agent " + std::to_string(p) + " of round " + std::to_string(c.round));
      for (int k = 0; k < d; ++k) c.positions(k, static_cast<Eigen::Index>(p)) = r.x[static_cast<std::size_t>(k)];
    }
    trace.deltas.push_back(component_diameters(c.positions));
    trace.configurations.push_back(std::move(c));
  }
  trace.rounds = trace.configurations.back().round;
  trace.initial = trace.configurations.front();
  trace.final_configuration = trace.configurations.back();
  return trace;
}

Json metrics_to_json(const RunSpec& spec, const RunTrace& trace) {
  const Metrics& m = trace.metrics;
  Json delta0 = Json::array();
  Json delta_final = Json::array();
  if (!trace.deltas.empty()) {
    for (Eigen::Index k = 0; k < trace.deltas.front().size(); ++k) delta0.push_back(trace.deltas.front()(k));
    for (Eigen::Index k = 0; k < trace.deltas.back().size(); ++k) delta_final.push_back(trace.deltas.back()(k));
  }
  return Json{{"n", spec.n},
              {"d", spec.d},
              {"algorithm", to_string(spec.algorithm)},
              {"pattern", spec.pattern.family},
              {"epsilon", spec.epsilon},
              {"seed", spec.seed},
              {"rounds", trace.rounds},
              {"converged", m.converged},
              {"T_eps", nullable(m.t_eps)},
              {"bound_T", nullable(m.bound_t)},
              {"theorem", m.theorem},
              {"empirical_rate", json_number(m.empirical_rate)},
              {"delta_initial", delta0},
              {"delta_final", delta_final}};
}

Json safeness_report_to_json(const SafenessReport& r) {
  Json violations = Json::array();
  for (const auto& v : r.violations) violations.push_back({v.round, v.agent, v.component, v.margin});
  return Json{{"claimed_alpha", r.claimed_alpha},
              {"worst_alpha", r.worst_alpha},
              {"transitions", r.rounds.size()},
              {"passed", r.passed()},
              {"violations", violations}};
}

Json moreau_report_to_json(const MoreauReport& r) {
  return Json{{"a", r.a},
              {"window", r.window},
              {"A1_positive_diagonal", r.positive_diagonal},
              {"A2_bounded_below", r.bounded_below},
              {"A3_bidirectional", r.bidirectional},
              {"A4_strongly_connected", r.strongly_connected},
              {"passed", r.all()},
              {"witnesses", r.witnesses}};
}

}  // namespace consensus
