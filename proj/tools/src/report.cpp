#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "decaylab/errors.hpp"

namespace decaylab::cli {
namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct Entry {
  std::string run;
  json summary;
};

enum class Verdict { pass, fail, missing };

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "PASS";
    case Verdict::fail:
      return "FAIL";
    default:
      return "MISSING";
  }
}

struct Row {
  std::string id;
  std::string title;
  std::string threshold;
  json details = json::array();
  Verdict verdict = Verdict::missing;

  void add(const std::string& run, double value, bool ok) {
    details.push_back({{"run", run}, {"value", value}, {"pass", ok}});
    if (!ok) {
      verdict = Verdict::fail;
    } else if (verdict == Verdict::missing) {
      verdict = Verdict::pass;
    }
  }
};

const json* find(const json& j, std::initializer_list<const char*> path) {
  const json* cur = &j;
  for (const char* key : path) {
    if (!cur->is_object() || !cur->contains(key)) return nullptr;
    cur = &(*cur)[key];
  }
  return cur;
}

double exponent_tolerance(const json& s) {
  if (s.value("geometry", "radial") == "cartesian") return 0.3;
  return s.value("p", 3.0) >= 3.5 ? 0.25 : 0.15;
}

}  // namespace

Report build_report(const std::vector<fs::path>& run_dirs) {
  if (run_dirs.empty()) throw ConfigError("report: no run directories given");
  Report rep;
  std::vector<Entry> entries;
  for (const auto& d : run_dirs) {
    const fs::path file = d / "summary.json";
    std::ifstream in(file);
    if (!in) {
      rep.missing.push_back(file.string());
      continue;
    }
    try {
      entries.push_back({d.string(), json::parse(in)});
    } catch (const json::exception&) {
      rep.missing.push_back(file.string() + " (unreadable)");
      continue;
    }
    const fs::path manifest = d / "manifest.json";
    std::ifstream min(manifest);
    if (!min) {
      rep.missing.push_back(manifest.string());
      continue;
    }
    try {
      const json m = json::parse(min);
      for (const auto& a : m.value("artifacts", json::array())) {
        const fs::path f = d / a.value("file", "");
        if (!fs::exists(f)) rep.missing.push_back(f.string());
      }
    } catch (const json::exception&) {
      rep.missing.push_back(manifest.string() + " (unreadable)");
    }
  }

  std::vector<Row> rows{
      {"1", "conformal identity order", ">= 1.8"},
      {"2", "map identities", "<= 1e-12 relative"},
      {"3", "energy drift", "< 1% radial, < 3% Cartesian"},
      {"4", "mantle flux over E0", "<= 1.05"},
      {"5", "running sup variation", "< 5% on t~ in [-0.5, -0.05]"},
      {"6", "weak weighted sup", "finite"},
      {"7a", "fixed-x decay exponent", "p - 1 within 0.15 (p=3) / 0.25 (p=4) / 0.3 (3D)"},
      {"7b", "light-cone decay exponent", "1 within 0.2"},
      {"8", "decay lemma ratio", "finite, converged quadrature"},
      {"9", "Huygens support at the origin", "|chi| <= 1e-10"},
      {"10", "improvement chain", "measured below bound at every point"},
  };
  const auto row = [&rows](const std::string& id) -> Row& {
    return *std::find_if(rows.begin(), rows.end(), [&](const Row& r) { return r.id == id; });
  };

  for (const auto& e : entries) {
    const json& s = e.summary;
    if (const json* v = find(s, {"conformal", "order"})) row("1").add(e.run, *v, *v >= 1.8);
    if (const json* v = find(s, {"conformal", "map_identity_max"})) {
      row("2").add(e.run, *v, *v <= 1e-12);
    }
    if (const json* v = find(s, {"energy", "drift"})) {
      row("3").add(e.run, *v, *v < s.value("energy_target", 0.01));
    }
    if (const json* v = find(s, {"flux", "max_ratio"})) row("4").add(e.run, *v, *v <= 1.05);
    if (const json* v = find(s, {"running_sup_variation"})) row("5").add(e.run, *v, *v < 0.05);
    if (const json* v = find(s, {"weak_sup", "value"})) {
      row("6").add(e.run, *v, std::isfinite(v->get<double>()));
    }
    if (const json* v = find(s, {"fixed_x_fit", "exponent"})) {
      const double target = s.value("p", 3.0) - 1.0;
      row("7a").add(e.run, *v, std::abs(v->get<double>() - target) <= exponent_tolerance(s));
    }
    if (const json* v = find(s, {"lightcone_fit", "exponent"})) {
      row("7b").add(e.run, *v, std::abs(v->get<double>() - 1.0) <= 0.2);
    }
    if (const json* v = find(s, {"lemma", "max_ratio"})) {
      const bool conv = s["lemma"].value("all_converged", false);
      row("8").add(e.run, *v, std::isfinite(v->get<double>()) && conv);
    }
    if (const json* v = find(s, {"huygens", "max_after"})) row("9").add(e.run, *v, *v <= 1e-10);
    if (const json* v = find(s, {"bound", "ok"})) {
      row("10").add(e.run, s["bound"].value("points", 0), v->get<bool>());
    }
  }

  // Refinement stability: runs sharing a scenario name at different
  // resolutions, compared between the two finest.
  std::map<std::string, std::vector<const Entry*>> groups;
  for (const auto& e : entries) groups[e.summary.value("scenario", "")].push_back(&e);
  Row stability{"6r", "weak sup refinement stability", "< 10% change between the two finest"};
  Row stokes{"4r", "Stokes residual order", ">= 1 between the two finest"};
  for (auto& [name, members] : groups) {
    if (members.size() < 2) continue;
    const auto res = [](const Entry* e) {
      return e->summary.value("compact_resolution", e->summary.value("resolution", 0.0));
    };
    std::sort(members.begin(), members.end(),
              [&](const Entry* a, const Entry* b) { return res(a) > res(b); });
    const Entry& coarse = *members[members.size() - 2];
    const Entry& fine = *members.back();
    const json* a = find(coarse.summary, {"weak_sup", "value"});
    const json* b = find(fine.summary, {"weak_sup", "value"});
    if (a && b) {
      const double change = std::abs(b->get<double>() - a->get<double>()) / std::abs(b->get<double>());
      stability.add(name, change, change < 0.1);
    }
    const json* ra = find(coarse.summary, {"flux", "max_stokes_residual"});
    const json* rb = find(fine.summary, {"flux", "max_stokes_residual"});
    if (ra && rb && res(&fine) > 0.0 && res(&coarse) > res(&fine)) {
      const double order =
          std::log(ra->get<double>() / rb->get<double>()) / std::log(res(&coarse) / res(&fine));
      stokes.add(name, order, order >= 1.0);
    }
  }
  if (!stability.details.empty()) rows.push_back(stability);
  if (!stokes.details.empty()) rows.push_back(stokes);

  rep.all_pass = rep.missing.empty();
  json out_rows = json::array();
  std::ostringstream md;
  md << "# decaylab report\n\n";
  md << "Runs: " << entries.size() << "\n\n";
  md << "| row | check | threshold | verdict | values |\n|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    if (r.verdict != Verdict::pass) rep.all_pass = false;
    out_rows.push_back({{"id", r.id},
                        {"title", r.title},
                        {"threshold", r.threshold},
                        {"verdict", verdict_name(r.verdict)},
                        {"details", r.details}});
    std::string values;
    for (const auto& d : r.details) {
      if (!values.empty()) values += "; ";
      std::ostringstream v;
      v.precision(6);
      v << d["value"].get<double>();
      values += v.str();
    }
    md << "| " << r.id << " | " << r.title << " | " << r.threshold << " | "
       << verdict_name(r.verdict) << " | " << (values.empty() ? "-" : values) << " |\n";
  }
  if (!rep.missing.empty()) {
    md << "\nMissing artifacts:\n\n";
    for (const auto& m : rep.missing) md << "- " << m << '\n';
  }
  json runs = json::array();
  for (const auto& e : entries) runs.push_back(e.run);
  rep.data = {{"runs", runs}, {"rows", out_rows}, {"missing", rep.missing},
              {"all_pass", rep.all_pass}};
  rep.markdown = md.str();
  return rep;
}

void write_report(const Report& report, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream(out_dir / "report.json") << report.data.dump(2) << '\n';
  std::ofstream(out_dir / "report.md") << report.markdown;
}

}  // namespace decaylab::cli
