// Runs the twelve acceptance experiments and prints one line per criterion.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "coarse/experiment.hpp"

using coarse::ExperimentConfig;
using nlohmann::json;

namespace {

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::vector<ExperimentConfig> runs;
  bool warn_only = false;
};

ExperimentConfig cfg(std::string name, json params) {
  ExperimentConfig c;
  c.name = std::move(name);
  c.params = std::move(params);
  return c;
}

std::vector<Criterion> criteria() {
  return {
      {1, "partition-of-unity kernels", 120,
       {cfg("cover-kernel", {{"cover", "interval"}, {"half_width", 100}}),
        cfg("cover-kernel", {{"cover", "balls"}, {"half_width", 40}, {"r", 2}}),
        cfg("cover-kernel", {{"cover", "zk"}, {"half_width", 40}, {"k", 2}, {"L", 1}}),
        cfg("cover-kernel", {{"cover", "zk"}, {"half_width", 40}, {"k", 2}, {"L", 3}})}},
      {2, "tree tent kernel", 60,
       {cfg("tree-embed", {{"valence", 3}, {"depth", 14}, {"S", {2, 4, 8, 16}}, {"p", {1, 2}}})}},
      {3, "Voronoi cover", 120, {cfg("voronoi-check", {{"n", {2, 4, 6}}, {"samples", 10000}})}},
      {4, "Z^k type bound", 60, {cfg("zk-cover", {{"k", 2}, {"half_width", 40}, {"L", {1, 3}}})}},
      {5, "lamplighter metric", 120,
       {cfg("lamplighter-metric", {{"radius", 8}, {"sandwich_m", json::array()}})}},
      {6, "j-embedding sandwich", 60,
       {cfg("lamplighter-metric",
            {{"radius", 0}, {"sandwich_m", {2, 3}}, {"sandwich_radius", 10}, {"sandwich_pairs", 200}})}},
      {7, "embedding floor", 120,
       {cfg("embed", {{"kind", "tree"}, {"depth", 14}, {"u", "overlog"}, {"a", 1}, {"p", 2}, {"D_slope", 1}})}},
      {8, "Mazur map", 30, {cfg("embed", {{"kind", "mazur"}, {"q", 2}, {"p", 1}, {"samples", 10000}})}},
      {9, "subspace pullback", 60, {cfg("cover-kernel", {{"cover", "pullback"}, {"half_width", 10}})}},
      {10, "(C_p) diagnostics", 10,
       {cfg("cp-check", {{"u", "identity"}, {"p", 1}, {"log_T", {10, 20}}, {"expect", "diverging"}}),
        cfg("cp-check", {{"u", "overlog"}, {"a", 1}, {"p", 2}, {"expect", "converging"}})}},
      {11, "lamplighter cover", 300, {cfg("lamplighter-cover", {{"L", 1}, {"radius", 10}})}},
      {12, "profile shape", 300, {cfg("profile", json::object())}, true},
  };
}

}  // namespace

int main() {
  int failed = 0;
  for (const auto& c : criteria()) {
    std::vector<std::string> problems;
    std::string note;
    const auto start = std::chrono::steady_clock::now();
    for (const auto& run : c.runs) {
      try {
        auto report = coarse::run_experiment(run);
        for (const auto& f : report.failures) problems.push_back(run.name + ": " + f);
        if (c.warn_only && report.parameters.contains("warnings")) {
          std::ostringstream s;
          s << "fitted C " << report.parameters.value("fitted_C", 0.0) << ", warnings " << report.parameters["warnings"].dump();
          note = s.str();
        }
      } catch (const std::exception& e) {
        problems.push_back(run.name + ": " + e.what());
      }
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.1f s of %.0f s", seconds, c.budget_s);
    if (seconds > c.budget_s) problems.push_back("runtime " + std::string(timing));

    const bool pass = problems.empty();
    if (!pass) ++failed;
    std::cout << "criterion " << c.id << ": " << (pass ? "PASS" : "FAIL") << "  " << c.title << " (" << timing << ")";
    if (!note.empty()) std::cout << "  [" << note << "]";
    std::cout << "\n";
    for (std::size_t i = 0; i < problems.size() && i < 5; ++i) std::cout << "    " << problems[i] << "\n";
    if (problems.size() > 5) std::cout << "    ... " << problems.size() - 5 << " more\n";
    std::cout.flush();
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criterion(s) failed") << "\n";
  return failed == 0 ? 0 : 1;
}
