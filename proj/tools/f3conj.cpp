// Command line front end: decide <a> <b>, profile <f>, corpus <dir>,
// selftest. Exit codes follow the verdict (0 yes, 1 no, 2 unknown); every
// failure path exits above 2 so scripts can tell errors from verdicts.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "f3conj/io.hpp"
#include "f3conj/pipeline.hpp"

namespace {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitUnknown = 2;
constexpr int kExitError = 3;

int64_t ms_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               t0)
      .count();
}

const char* verdict_text(f3conj::Verdict v) {
  switch (v) {
    case f3conj::Verdict::yes: return "yes";
    case f3conj::Verdict::no: return "no";
    default: return "unknown";
  }
}

int verdict_exit(f3conj::Verdict v) {
  switch (v) {
    case f3conj::Verdict::yes: return kExitYes;
    case f3conj::Verdict::no: return kExitNo;
    default: return kExitUnknown;
  }
}

f3conj::FreeMap load_rank3(const std::string& path) {
  f3conj::FreeMapEnvelope env = f3conj::load_free_map(path);
  if (env.map.rank() != 3)
    throw std::runtime_error(path + ": expected a rank-3 map, got rank " +
                             std::to_string(env.map.rank()));
  return env.map;
}

ordered_json budget_json(double scale, const f3conj::DecideBudget& b) {
  ordered_json j;
  j["scale"] = scale;
  j["rep_nodes"] = b.rep_nodes;
  j["support_nodes"] = b.support_nodes;
  j["search_nodes"] = b.search_nodes;
  j["search_depth"] = b.search_depth;
  j["twisted_powers"] = b.twisted.powers;
  j["twisted_nodes"] = b.twisted.nodes;
  j["twisted_slack"] = b.twisted.slack;
  return j;
}

ordered_json decide_json(const f3conj::DecideResult& r, double scale,
                         const f3conj::DecideBudget& b, int64_t millis) {
  ordered_json j;
  j["schema_version"] = 1;
  j["verdict"] = verdict_text(r.verdict);
  j["branch"] = r.branch;
  if (r.verdict == f3conj::Verdict::yes)
    j["witness"] = f3conj::images_text(r.witness);
  if (r.verdict == f3conj::Verdict::no) {
    ordered_json c;
    c["invariant"] = r.invariant;
    c["left"] = r.left_value;
    c["right"] = r.right_value;
    j["certificate"] = c;
  }
  if (r.verdict == f3conj::Verdict::unknown)
    j["unknown_reason"] = r.unknown_reason;
  j["transcript"] = r.transcript;
  j["timings"] = ordered_json{{"decide_ms", millis}};
  j["budgets"] = budget_json(scale, b);
  return j;
}

ordered_json profile_json(const f3conj::InvariantProfile& p) {
  ordered_json j;
  j["char_poly"] = f3conj::poly_text(p.char_poly);
  j["char_poly_coefficients"] = p.char_poly;
  j["snf_shift"] = p.snf_shift;
  if (!p.has_growth) {
    j["growth"] = nullptr;
  } else {
    ordered_json g;
    g["type"] = p.growth_type == f3conj::GrowthType::polynomial
                    ? "polynomial"
                    : "exponential";
    if (p.growth_type == f3conj::GrowthType::polynomial)
      g["degree"] = p.growth_degree;
    g["representative_power"] = p.rep_power;
    g["provenance"] = p.growth_provenance;
    j["growth"] = g;
  }
  if (p.factor) {
    ordered_json f;
    std::vector<std::string> basis;
    for (const f3conj::Word& w : p.factor->basis)
      basis.push_back(f3conj::word_text(w));
    f["basis"] = basis;
    f["witness"] = f3conj::word_text(p.factor->witness);
    j["invariant_factor"] = f;
  }
  if (p.carrier_rank != 0) {
    ordered_json c;
    c["rank"] = p.carrier_rank;
    if (p.carrier_rank == 2) {
      std::vector<std::string> basis;
      for (const f3conj::Word& w : p.carrier_basis)
        basis.push_back(f3conj::word_text(w));
      c["basis"] = basis;
      c["witness"] = f3conj::word_text(p.carrier_witness);
    }
    c["provenance"] = p.carrier_provenance;
    j["carrier"] = c;
  }
  if (p.peripherals_populated) {
    ordered_json pe;
    pe["almost_toral"] = p.peripherals.almost_toral;
    std::vector<ordered_json> entries;
    for (const f3conj::PeripheralEntry& e : p.peripherals.entries) {
      ordered_json je;
      je["kind"] = e.kind == f3conj::PeripheralKind::torus  ? "torus"
                   : e.kind == f3conj::PeripheralKind::klein ? "klein"
                                                             : "higher_rank";
      je["rank"] = e.rank;
      if (e.rank == 1) {
        je["period"] = e.period;
        je["axis"] = f3conj::word_text(e.axis);
      }
      entries.push_back(je);
    }
    pe["entries"] = entries;
    j["peripherals"] = pe;
  }
  if (!p.notes.empty()) j["notes"] = p.notes;
  return j;
}

void print_decide_text(const f3conj::DecideResult& r) {
  std::cout << "verdict: " << verdict_text(r.verdict) << "\n";
  std::cout << "branch: " << r.branch << "\n";
  if (r.verdict == f3conj::Verdict::yes)
    std::cout << "witness: " << f3conj::images_text(r.witness) << "\n";
  if (r.verdict == f3conj::Verdict::no)
    std::cout << "invariant: " << r.invariant << " (" << r.left_value
              << " vs " << r.right_value << ")\n";
  if (r.verdict == f3conj::Verdict::unknown)
    std::cout << "reason: " << r.unknown_reason << "\n";
  std::cout << "transcript:\n";
  for (const std::string& line : r.transcript)
    std::cout << "  - " << line << "\n";
}

void print_profile_text(const f3conj::InvariantProfile& p) {
  std::cout << "growth: " << f3conj::growth_text(p) << "\n";
  std::cout << "char poly: " << f3conj::poly_text(p.char_poly) << "\n";
  std::cout << "smith shift: " << f3conj::vec_text(p.snf_shift) << "\n";
  if (p.factor) {
    std::cout << "invariant factor: <";
    for (size_t i = 0; i < p.factor->basis.size(); ++i)
      std::cout << (i ? ", " : "") << f3conj::word_text(p.factor->basis[i]);
    std::cout << ">\n";
  }
  if (p.carrier_rank != 0) {
    std::cout << "lamination carrier: rank " << p.carrier_rank;
    if (p.carrier_rank == 2) {
      std::cout << " <";
      for (size_t i = 0; i < p.carrier_basis.size(); ++i)
        std::cout << (i ? ", " : "") << f3conj::word_text(p.carrier_basis[i]);
      std::cout << ">";
    }
    std::cout << "\n";
  }
  if (p.peripherals_populated) {
    int torus = 0, klein = 0, other = 0;
    for (const f3conj::PeripheralEntry& e : p.peripherals.entries) {
      if (e.kind == f3conj::PeripheralKind::torus) ++torus;
      else if (e.kind == f3conj::PeripheralKind::klein) ++klein;
      else ++other;
    }
    std::cout << "peripheral candidates: " << torus << " torus, " << klein
              << " klein, " << other << " unresolved\n";
  }
  if (!p.notes.empty()) std::cout << "notes: " << p.notes << "\n";
}

// Independent re-verification used by corpus runs: a yes must conjugate one
// side onto the other up to inner, a no must survive the swapped decision.
bool verify_yes(const f3conj::FreeMap& l, const f3conj::FreeMap& r,
                const f3conj::FreeMap& witness) {
  return f3conj::is_inner(
      f3conj::compose(f3conj::inverse(f3conj::conjugate_map(l, witness)), r));
}

int run_corpus(const std::string& dir, const std::string& report_path,
               double scale, const f3conj::DecideBudget& budget) {
  namespace fs = std::filesystem;
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) {
    std::cerr << "error: no .json instances under " << dir << "\n";
    return kExitError;
  }

  struct Loaded {
    std::string path;
    f3conj::FreeMap map = f3conj::FreeMap::identity(3);
  };
  std::vector<Loaded> maps;
  ordered_json jfiles = ordered_json::array();
  int parse_failures = 0;
  for (const std::string& p : paths) {
    ordered_json jf;
    jf["file"] = fs::path(p).filename().string();
    try {
      maps.push_back({p, load_rank3(p)});
      jf["images"] = f3conj::images_text(maps.back().map);
    } catch (const std::exception& e) {
      jf["error"] = e.what();
      ++parse_failures;
    }
    jfiles.push_back(jf);
  }

  auto t0 = Clock::now();
  ordered_json jpairs = ordered_json::array();
  int yes = 0, no = 0, unknown = 0, violations = 0;
  for (size_t i = 0; i < maps.size(); ++i)
    for (size_t j = i + 1; j < maps.size(); ++j) {
      auto tp = Clock::now();
      f3conj::DecideResult r = f3conj::decide(maps[i].map, maps[j].map, budget);
      ordered_json jp;
      jp["left"] = fs::path(maps[i].path).filename().string();
      jp["right"] = fs::path(maps[j].path).filename().string();
      jp["verdict"] = verdict_text(r.verdict);
      jp["branch"] = r.branch;
      bool sound = true;
      if (r.verdict == f3conj::Verdict::yes) {
        ++yes;
        jp["witness"] = f3conj::images_text(r.witness);
        sound = verify_yes(maps[i].map, maps[j].map, r.witness);
      } else if (r.verdict == f3conj::Verdict::no) {
        ++no;
        jp["certificate"] = ordered_json{{"invariant", r.invariant},
                                         {"left", r.left_value},
                                         {"right", r.right_value}};
        f3conj::DecideResult back =
            f3conj::decide(maps[j].map, maps[i].map, budget);
        sound = back.verdict == f3conj::Verdict::no;
      } else {
        ++unknown;
        jp["unknown_reason"] = r.unknown_reason;
      }
      if (!sound) ++violations;
      jp["sound"] = sound;
      jp["millis"] = ms_since(tp);
      jpairs.push_back(jp);
    }

  ordered_json report;
  report["schema_version"] = 1;
  report["directory"] = dir;
  report["budgets"] = budget_json(scale, budget);
  report["files"] = jfiles;
  report["pairs"] = jpairs;
  report["summary"] =
      ordered_json{{"files", maps.size()},
                   {"parse_failures", parse_failures},
                   {"pairs", jpairs.size()},
                   {"yes", yes},
                   {"no", no},
                   {"unknown", unknown},
                   {"soundness_violations", violations}};
  report["timings"] = ordered_json{{"total_ms", ms_since(t0)}};

  std::ofstream out(report_path);
  if (!out) {
    std::cerr << "error: cannot write " << report_path << "\n";
    return kExitError;
  }
  out << report.dump(2) << "\n";
  std::cout << "corpus: " << jpairs.size() << " pairs (" << yes << " yes, "
            << no << " no, " << unknown << " unknown), " << violations
            << " soundness violations, report at " << report_path << "\n";
  return (violations == 0 && parse_failures == 0) ? 0 : kExitError;
}

int run_selftest(const f3conj::DecideBudget& budget) {
  using namespace f3conj;
  const Word a = Word::gen(1), b = Word::gen(2), c = Word::gen(3);
  const FreeMap quad(3, {a, b * a, c * b});
  const FreeMap toral(3, {a, b * a, c * a});
  const FreeMap expo(3, {a * b, a, c * a});
  int failed = 0;
  auto check = [&](const char* name, bool ok) {
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
    if (!ok) ++failed;
  };

  InvariantProfile pq = profile(quad, budget);
  check("quadratic example profiles to polynomial degree 2",
        pq.has_growth && pq.growth_type == GrowthType::polynomial &&
            pq.growth_degree == 2 && pq.factor.has_value());
  InvariantProfile pt = profile(toral, budget);
  check("linear example profiles to polynomial degree 1",
        pt.has_growth && pt.growth_type == GrowthType::polynomial &&
            pt.growth_degree == 1);
  InvariantProfile pe = profile(expo, budget);
  check("exponential example carries a rank-2 factor",
        pe.has_growth && pe.growth_type == GrowthType::exponential &&
            pe.carrier_rank == 2);

  FreeMap chi(3, {b * a, a.inverse(), c});
  FreeMap planted = compose(conjugate_map(quad, chi), FreeMap::inner(3, c * b));
  DecideResult ry = decide(quad, planted, budget);
  check("planted conjugate decides yes with a verified witness",
        ry.verdict == Verdict::yes &&
            verify_yes(quad, planted, ry.witness));

  DecideResult rn = decide(quad, expo, budget);
  check("quadratic vs exponential separates on growth type",
        rn.verdict == Verdict::no && rn.invariant == "growth type");
  DecideResult rd = decide(quad, toral, budget);
  check("degree 2 vs degree 1 separates on the degree",
        rd.verdict == Verdict::no &&
            rd.invariant == "polynomial growth degree");

  FreeMapEnvelope env =
      parse_free_map_text(free_map_to_json(quad, "round trip").dump());
  check("envelope round trip preserves the map", env.map == quad);

  std::cout << (failed == 0 ? "selftest passed\n" : "selftest FAILED\n");
  return failed == 0 ? 0 : kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conjugacy toolkit for outer automorphisms of a rank-3 free "
               "group"};
  app.require_subcommand(1);

  double scale = 1.0;
  if (const char* env = std::getenv("F3CONJ_BUDGET")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0)) {
      std::cerr << "error: F3CONJ_BUDGET must be a positive number, got '"
                << env << "'\n";
      return kExitError;
    }
    scale = v;
  }

  std::string file1, file2, dir, report_path;
  bool as_json = false;

  CLI::App* cmd_decide =
      app.add_subcommand("decide", "decide conjugacy of two stored maps");
  cmd_decide->add_option("file1", file1, "first map (JSON envelope)")
      ->required();
  cmd_decide->add_option("file2", file2, "second map (JSON envelope)")
      ->required();
  cmd_decide->add_option("--budget", scale, "budget scale factor")
      ->check(CLI::PositiveNumber);
  cmd_decide->add_flag("--json", as_json, "emit a JSON report");

  CLI::App* cmd_profile =
      app.add_subcommand("profile", "invariant profile of one stored map");
  cmd_profile->add_option("file", file1, "map file (JSON envelope)")
      ->required();
  cmd_profile->add_option("--budget", scale, "budget scale factor")
      ->check(CLI::PositiveNumber);
  cmd_profile->add_flag("--json", as_json, "emit a JSON report");

  CLI::App* cmd_corpus =
      app.add_subcommand("corpus", "decide all pairs in a directory");
  cmd_corpus->add_option("dir", dir, "directory of map files")->required();
  cmd_corpus->add_option("--report", report_path, "output report path")
      ->required();
  cmd_corpus->add_option("--budget", scale, "budget scale factor")
      ->check(CLI::PositiveNumber);

  CLI::App* cmd_selftest =
      app.add_subcommand("selftest", "run the built-in smoke checks");
  cmd_selftest->add_option("--budget", scale, "budget scale factor")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  f3conj::DecideBudget budget = f3conj::DecideBudget{}.scaled(scale);

  try {
    if (cmd_decide->parsed()) {
      f3conj::FreeMap l = load_rank3(file1);
      f3conj::FreeMap r = load_rank3(file2);
      auto t0 = Clock::now();
      f3conj::DecideResult res = f3conj::decide(l, r, budget);
      int64_t millis = ms_since(t0);
      if (as_json)
        std::cout << decide_json(res, scale, budget, millis).dump(2) << "\n";
      else
        print_decide_text(res);
      return verdict_exit(res.verdict);
    }
    if (cmd_profile->parsed()) {
      f3conj::FreeMap m = load_rank3(file1);
      f3conj::InvariantProfile p = f3conj::profile(m, budget);
      if (as_json) {
        ordered_json j;
        j["schema_version"] = 1;
        j["file"] = file1;
        j["images"] = f3conj::images_text(m);
        j.update(profile_json(p));
        std::cout << j.dump(2) << "\n";
      } else {
        print_profile_text(p);
      }
      return 0;
    }
    if (cmd_corpus->parsed()) return run_corpus(dir, report_path, scale, budget);
    if (cmd_selftest->parsed()) return run_selftest(budget);
  } catch (const f3conj::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
