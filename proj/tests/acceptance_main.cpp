#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "svasym/acceptance.hpp"
#include "svasym/csv.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria runner", "acceptance"};
  svasym::AcceptanceOptions options;
  std::string report;
  app.add_option("--only", options.only, "criterion ids to run")->delimiter(',');
  app.add_option("--seed", options.seed, "random seed");
  app.add_option("--report", report, "write the JSON report here");
  CLI11_PARSE(app, argc, argv);

  const auto results = svasym::run_acceptance(options);
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    std::cout << fmt::format("{} {} {:.2f}s {}\n", r.id, r.pass ? "PASS" : "FAIL", r.runtime_s, r.description);
    std::cout << "  measured: " << r.measured.dump() << "\n";
    std::cout << "  expected: " << r.expected.dump() << "  tolerance: " << r.tolerance.dump() << "\n";
  }
  if (!report.empty()) svasym::write_text_file(report, svasym::acceptance_report(results).dump(2) + "\n");
  return all ? 0 : 1;
}
