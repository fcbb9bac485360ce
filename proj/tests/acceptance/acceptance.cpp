// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance [--criterion N]... [--seed S] [--workers W]

#include <CLI11.hpp>
#include <algorithm>
#include <iostream>

#include "crs/parallel.hpp"
#include "crs/validation.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> ids;
  crs::ValidationOptions opts;
  opts.workers = crs::default_workers();
  app.add_option("--criterion", ids, "criteria to run (default: all)")->check(CLI::Range(1, 10));
  app.add_option("--seed", opts.seed, "master seed");
  app.add_option("--workers", opts.workers, "worker threads");
  CLI11_PARSE(app, argc, argv);

  bool ok = true;
  for (const crs::CriterionInfo& info : crs::criteria()) {
    if (!ids.empty() && std::find(ids.begin(), ids.end(), info.id) == ids.end()) continue;
    const crs::CriterionResult r = crs::run_criterion(info.id, opts);
    std::cout << crs::format_result(r) << std::endl;
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}
