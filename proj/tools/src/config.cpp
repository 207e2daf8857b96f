#include "config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "decaylab/errors.hpp"

namespace decaylab::cli {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"scenario", {"name", "geometry", "p"}},
      {"data", {"amplitude", "support_radius", "center", "phi0_power", "phi1_power"}},
      {"physical",
       {"spacing", "extent", "points", "t_end", "cfl", "output_every", "probe_radii",
        "workers"}},
      {"compactified",
       {"enabled", "points", "t_end", "cfl", "handoff_spacing", "truncation",
        "taper_start", "output_every"}},
      {"diagnostics", {"flux_apexes", "seed"}},
      {"analysis",
       {"fit_t_min", "fit_t_max", "lightcone_v0", "lightcone_u_min", "lightcone_u_max"}},
      {"duhamel", {"bound_points", "lemma_points"}},
      {"checks", {"conformal", "huygens"}},
      {"output", {"directory"}},
  };
  return keys;
}

template <class T>
void read(const pt::ptree& tree, const std::string& key, T& out) {
  const auto node = tree.get_optional<std::string>(key);
  if (!node) return;
  std::istringstream in(*node);
  T value{};
  if constexpr (std::is_same_v<T, bool>) {
    std::string word;
    in >> word;
    if (word == "true" || word == "1" || word == "yes") {
      value = true;
    } else if (word == "false" || word == "0" || word == "no") {
      value = false;
    } else {
      throw ConfigError(key + ": expected true or false, got '" + *node + "'");
    }
  } else {
    if (!(in >> value)) throw ConfigError(key + ": cannot parse '" + *node + "'");
    std::string rest;
    if (in >> rest) throw ConfigError(key + ": trailing text in '" + *node + "'");
  }
  out = value;
}

std::vector<double> read_list(const pt::ptree& tree, const std::string& key,
                              std::vector<double> fallback) {
  const auto node = tree.get_optional<std::string>(key);
  if (!node) return fallback;
  std::string text = *node;
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::vector<double> out;
  std::string word;
  while (in >> word) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(word, &used));
      if (used != word.size()) throw ConfigError(key + ": cannot parse '" + word + "'");
    } catch (const std::logic_error&) {
      throw ConfigError(key + ": cannot parse '" + word + "'");
    }
  }
  return out;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    char buf[3];
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

ScenarioConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError(section + ": unknown section");
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(section + ": keys must live inside a section");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError(section + "." + key + ": unknown key");
    }
  }

  ScenarioConfig c;
  read(tree, "scenario.name", c.name);
  std::string geometry = "radial";
  read(tree, "scenario.geometry", geometry);
  if (geometry == "radial") {
    c.geometry = Geometry::radial;
  } else if (geometry == "cartesian") {
    c.geometry = Geometry::cartesian;
  } else {
    throw ConfigError("scenario.geometry: expected radial or cartesian, got '" + geometry + "'");
  }
  read(tree, "scenario.p", c.p);

  read(tree, "data.amplitude", c.data.amplitude);
  read(tree, "data.support_radius", c.data.support_radius);
  read(tree, "data.phi0_power", c.data.phi0_power);
  read(tree, "data.phi1_power", c.data.phi1_power);
  const auto centre = read_list(tree, "data.center", {0.0, 0.0, 0.0});
  require(centre.size() == 3, "data.center", "expected three numbers");
  c.data.center = {centre[0], centre[1], centre[2]};

  read(tree, "physical.spacing", c.physical.spacing);
  read(tree, "physical.extent", c.physical.extent);
  read(tree, "physical.points", c.physical.points);
  read(tree, "physical.t_end", c.physical.t_end);
  read(tree, "physical.cfl", c.physical.cfl);
  read(tree, "physical.output_every", c.physical.output_every);
  read(tree, "physical.workers", c.physical.workers);
  c.physical.probe_radii = read_list(tree, "physical.probe_radii", c.physical.probe_radii);
  if (c.geometry == Geometry::cartesian && !tree.get_optional<std::string>("physical.cfl")) {
    c.physical.cfl = 0.25;
  }

  read(tree, "compactified.enabled", c.compactified.enabled);
  read(tree, "compactified.points", c.compactified.points);
  read(tree, "compactified.t_end", c.compactified.t_end);
  read(tree, "compactified.cfl", c.compactified.cfl);
  read(tree, "compactified.handoff_spacing", c.compactified.handoff_spacing);
  read(tree, "compactified.truncation", c.compactified.truncation);
  read(tree, "compactified.taper_start", c.compactified.taper_start);
  read(tree, "compactified.output_every", c.compactified.output_every);

  read(tree, "diagnostics.flux_apexes", c.diagnostics.flux_apexes);
  read(tree, "diagnostics.seed", c.diagnostics.seed);

  read(tree, "analysis.fit_t_min", c.analysis.fit_t_min);
  read(tree, "analysis.fit_t_max", c.analysis.fit_t_max);
  read(tree, "analysis.lightcone_v0", c.analysis.lightcone_v0);
  read(tree, "analysis.lightcone_u_min", c.analysis.lightcone_u_min);
  read(tree, "analysis.lightcone_u_max", c.analysis.lightcone_u_max);

  read(tree, "duhamel.bound_points", c.duhamel.bound_points);
  read(tree, "duhamel.lemma_points", c.duhamel.lemma_points);

  read(tree, "checks.conformal", c.checks.conformal);
  read(tree, "checks.huygens", c.checks.huygens);

  std::string dir = "runs/" + c.name;
  read(tree, "output.directory", dir);
  c.output_dir = dir;

  c.hash = sha256_hex(text);
  validate(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate(const ScenarioConfig& c) {
  require(!c.name.empty(), "scenario.name", "must not be empty");
  require(c.p >= 3.0 && c.p < 5.0, "scenario.p",
          "must satisfy 3 <= p < 5, the range of the decay estimate (got " +
              std::to_string(c.p) + ")");
  try {
    c.data.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("data: ") + e.what());
  }
  if (c.geometry == Geometry::radial) {
    require(c.data.centered(), "data.center", "radial scenarios need a centred bump");
    require(c.physical.spacing > 0.0, "physical.spacing", "must be positive");
    require(c.data.support_radius >= 4.0 * c.physical.spacing, "physical.spacing",
            "the bump must span at least 4 cells");
    require(c.physical.cfl > 0.0 && c.physical.cfl <= 1.0, "physical.cfl",
            "must lie in (0, 1]");
  } else {
    require(c.physical.points >= 9, "physical.points", "need at least 9 nodes per axis");
    require(c.physical.points % 2 == 1, "physical.points", "must be odd so the origin is a node");
    require(c.physical.extent > 0.0, "physical.extent", "box half width must be positive");
    const double h = 2.0 * c.physical.extent / static_cast<double>(c.physical.points - 1);
    require(c.data.support_radius >= 4.0 * h, "physical.points",
            "the bump must span at least 4 cells");
    require(c.physical.cfl > 0.0 && c.physical.cfl <= 1.0 / std::sqrt(3.0), "physical.cfl",
            "must lie in (0, 1/sqrt(3)] for the 7-point stencil");
    require(c.physical.t_end - 1.0 + c.data.support_radius + norm(c.data.center) <=
                c.physical.extent - 2.0 * h,
            "physical.t_end", "support would reach the box boundary (increase extent)");
    require(!c.compactified.enabled, "compactified.enabled",
            "the compactified long-time path is radial only");
  }
  require(c.physical.t_end > 1.0, "physical.t_end", "must exceed the data time 1");
  require(c.physical.output_every > 0, "physical.output_every", "must be positive");
  for (const double r : c.physical.probe_radii) {
    require(r >= 0.0, "physical.probe_radii", "radii must be non-negative");
  }
  if (c.geometry == Geometry::radial && c.physical.extent > 0.0) {
    require(c.physical.extent >= c.physical.t_end - 1.0 + c.data.support_radius +
                                     4.0 * c.physical.spacing,
            "physical.extent", "support would reach r_max before t_end");
  }
  if (c.compactified.enabled) {
    require(c.compactified.points >= 33, "compactified.points", "need at least 33 nodes");
    require(c.compactified.t_end < 0.0 && c.compactified.t_end > -1.0, "compactified.t_end",
            "must lie in (-1, 0)");
    require(c.compactified.cfl > 0.0 && c.compactified.cfl <= 1.0, "compactified.cfl",
            "must lie in (0, 1]");
    require(c.compactified.truncation > 0.0 && c.compactified.truncation < 1.0,
            "compactified.truncation", "must lie in (0, 1)");
    require(c.compactified.taper_start < c.compactified.truncation,
            "compactified.taper_start", "must be below the truncation radius");
    require(c.compactified.handoff_spacing > 0.0 &&
                c.data.support_radius >= 4.0 * c.compactified.handoff_spacing,
            "compactified.handoff_spacing", "the bump must span at least 4 cells");
    require(c.compactified.output_every > 0, "compactified.output_every", "must be positive");
  }
  require(c.diagnostics.flux_apexes == 0 || c.compactified.enabled, "diagnostics.flux_apexes",
          "flux needs the compactified stage");
  require(c.analysis.fit_t_min > 1.0 && c.analysis.fit_t_max > c.analysis.fit_t_min,
          "analysis.fit_t_min", "need 1 < fit_t_min < fit_t_max");
  require(c.analysis.lightcone_u_max > c.analysis.lightcone_u_min &&
              c.analysis.lightcone_u_min > 0.0,
          "analysis.lightcone_u_min", "need 0 < lightcone_u_min < lightcone_u_max");
}

}  // namespace decaylab::cli
