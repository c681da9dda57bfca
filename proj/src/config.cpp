#include "npeit/config.hpp"

#include "npeit/numeric_format.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace npeit {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

double positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
  return v;
}

int at_least(int v, int lo, const char* what) {
  if (v < lo) throw std::invalid_argument(std::string(what) + " must be >= " + std::to_string(lo));
  return v;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split_ws(s)) out.push_back(parse_number(t));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : " ") + format_number(x);
  return out;
}

Point parse_point(const std::string& s) {
  const auto t = split_ws(s);
  if (t.size() != 2) throw std::invalid_argument("expected two coordinates");
  return {parse_number(t[0]), parse_number(t[1])};
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

TangentLadder& ladder_of(ExperimentConfig& c) {
  if (!c.ladder) c.ladder = TangentLadder{};
  return *c.ladder;
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> s = {
      {"scene",
       {{"outer", [](ExperimentConfig& c, const std::string& v) { c.outer = parse_curve(v); }},
        {"inclusion",
         [](ExperimentConfig& c, const std::string& v) { c.inclusion = parse_curve(v); }},
        {"n_outer",
         [](ExperimentConfig& c, const std::string& v) {
           c.n_outer = at_least(parse_integer(v), 16, "n_outer");
         }},
        {"n_inclusion",
         [](ExperimentConfig& c, const std::string& v) {
           c.n_inclusion = at_least(parse_integer(v), 16, "n_inclusion");
         }}}},
      {"physics",
       {{"k0", [](ExperimentConfig& c, const std::string& v) { c.k0 = positive(parse_number(v), "k0"); }},
        {"f", [](ExperimentConfig& c, const std::string& v) { c.f = parse_fourier(v); }}}},
      {"sweep",
       {{"k_base",
         [](ExperimentConfig& c, const std::string& v) {
           c.k_base = positive(parse_number(v), "k_base");
         }},
        {"k_ratio",
         [](ExperimentConfig& c, const std::string& v) {
           c.k_ratio = positive(parse_number(v), "k_ratio");
         }},
        {"k_count",
         [](ExperimentConfig& c, const std::string& v) {
           c.k_count = at_least(parse_integer(v), 1, "k_count");
         }}}},
      {"spectrum",
       {{"n_modes",
         [](ExperimentConfig& c, const std::string& v) {
           c.n_modes = at_least(parse_integer(v), 1, "n_modes");
         }},
        {"J", [](ExperimentConfig& c, const std::string& v) { c.J = at_least(parse_integer(v), 1, "J"); }}}},
      {"stability",
       {{"pair",
         [](ExperimentConfig& c, const std::string& v) {
           const auto bar = v.find('|');
           if (bar == std::string::npos || v.find('|', bar + 1) != std::string::npos)
             throw std::invalid_argument("pair must read '<curve> | <curve>'");
           c.pairs.push_back({parse_curve(trim(v.substr(0, bar))), parse_curve(trim(v.substr(bar + 1)))});
         }},
        {"tangent_center",
         [](ExperimentConfig& c, const std::string& v) { ladder_of(c).center = parse_point(v); }},
        {"tangent_radius",
         [](ExperimentConfig& c, const std::string& v) {
           ladder_of(c).radius = positive(parse_number(v), "tangent_radius");
         }},
        {"tangent_offsets",
         [](ExperimentConfig& c, const std::string& v) {
           auto& l = ladder_of(c);
           l.offsets = parse_list(v);
           for (double t : l.offsets) positive(t, "tangent offset");
         }}}},
      {"expansion",
       {{"k",
         [](ExperimentConfig& c, const std::string& v) {
           c.expansion_k = positive(parse_number(v), "expansion k");
         }},
        {"reconstruction_J",
         [](ExperimentConfig& c, const std::string& v) {
           c.reconstruction_J = at_least(parse_integer(v), 1, "reconstruction_J");
         }}}},
      {"output", {{"directory", [](ExperimentConfig& c, const std::string& v) { c.output_dir = v; }}}},
  };
  return s;
}

}  // namespace

std::vector<double> ExperimentConfig::k_ladder() const {
  std::vector<double> ks;
  double k = k_base;
  for (int i = 0; i < k_count; ++i, k *= k_ratio) ks.push_back(k);
  return ks;
}

std::vector<InclusionPair> ExperimentConfig::all_pairs() const {
  std::vector<InclusionPair> out = pairs;
  if (ladder)
    for (double t : ladder->offsets)
      out.push_back({CurveShape::circle(ladder->center, ladder->radius),
                     CurveShape::circle(ladder->center + Point(t, 0.0), ladder->radius - t)});
  return out;
}

InclusionScene ExperimentConfig::scene() const { return scene_for(inclusion); }

InclusionScene ExperimentConfig::scene_for(const CurveShape& shape) const {
  return InclusionScene(make_curve(outer, n_outer), make_curve(shape, n_inclusion), k0);
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream is(text);
  std::string line, section;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + msg);
    };
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!schema().count(section)) fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    if (section.empty()) fail("key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& keys = schema().at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) fail("unknown key '" + key + "' in [" + section + "]");
    if (key != "pair" && !seen.insert(section + "." + key).second)
      fail("repeated key '" + key + "'");
    if (value.empty() && key != "directory") fail("empty value for '" + key + "'");
    try {
      it->second(c, value);
    } catch (const std::exception& e) {
      fail(key + ": " + e.what());
    }
  }
  if (c.ladder && c.ladder->offsets.empty())
    throw ConfigError("tangent ladder given without tangent_offsets");
  if (c.ladder)
    for (double t : c.ladder->offsets)
      if (t >= c.ladder->radius) throw ConfigError("tangent offset must be below tangent_radius");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "[scene]\n"
     << "outer = " << format_curve(c.outer) << '\n'
     << "inclusion = " << format_curve(c.inclusion) << '\n'
     << "n_outer = " << c.n_outer << '\n'
     << "n_inclusion = " << c.n_inclusion << "\n\n"
     << "[physics]\n"
     << "k0 = " << format_number(c.k0) << '\n'
     << "f = " << format_fourier(c.f) << "\n\n"
     << "[sweep]\n"
     << "k_base = " << format_number(c.k_base) << '\n'
     << "k_ratio = " << format_number(c.k_ratio) << '\n'
     << "k_count = " << c.k_count << "\n\n"
     << "[spectrum]\n"
     << "n_modes = " << c.n_modes << '\n'
     << "J = " << c.J << "\n\n"
     << "[stability]\n";
  for (const auto& p : c.pairs)
    os << "pair = " << format_curve(p.first) << " | " << format_curve(p.second) << '\n';
  if (c.ladder) {
    os << "tangent_center = " << format_number(c.ladder->center.x()) << ' '
       << format_number(c.ladder->center.y()) << '\n'
       << "tangent_radius = " << format_number(c.ladder->radius) << '\n'
       << "tangent_offsets = " << format_list(c.ladder->offsets) << '\n';
  }
  os << "\n[expansion]\n"
     << "k = " << format_number(c.expansion_k) << '\n'
     << "reconstruction_J = " << c.reconstruction_J << "\n\n"
     << "[output]\n"
     << "directory = " << c.output_dir << '\n';
  return os.str();
}

}  // namespace npeit
