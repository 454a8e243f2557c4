// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments
// select criterion ids; --json writes the collected details to a file.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "fbmclt/verification.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  std::string json_path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--json" && i + 1 < argc) {
      json_path = argv[++i];
    } else {
      ids.push_back(std::atoi(arg.c_str()));
    }
  }
  if (ids.empty()) ids = fbmclt::all_criteria();

  bool all = true;
  fbmclt::Json report = fbmclt::Json::array();
  for (int id : ids) {
    bool ok = false;
    fbmclt::CriterionResult r;
    try {
      r = fbmclt::run_criterion(id);
      ok = r.passed && r.within_budget();
    } catch (const std::exception& e) {
      r.id = id;
      r.name = fbmclt::criterion_name(id);
      r.details = {{"exception", e.what()}};
    }
    all = all && ok;
    std::printf("criterion %d [%s]: %s (%.1f s, budget %.0f s%s)\n", id, r.name.c_str(), ok ? "PASS" : "FAIL",
                r.seconds, r.budget_seconds, r.within_budget() ? "" : ", over budget");
    std::fflush(stdout);
    report.push_back({{"id", id}, {"name", r.name}, {"passed", r.passed}, {"seconds", r.seconds}, {"details", r.details}});
  }
  if (!json_path.empty()) std::ofstream(json_path) << report.dump(2) << "\n";
  return all ? 0 : 1;
}
