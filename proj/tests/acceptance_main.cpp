// One line per acceptance criterion; exit status 0 iff all pass.
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#include "acceptance_suite.hpp"

int main(int argc, char** argv) {
  using namespace starform::acceptance;
  std::uint64_t seed = 0;
  std::string suite = "all";
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--seed") seed = std::strtoull(argv[i + 1], nullptr, 10);
    else if (flag == "--suite") suite = argv[i + 1];
  }
  try {
    const auto report = run_suite(parse_suite(suite), seed);
    for (const auto& c : report.criteria) {
      std::printf("[%s] criterion %d: %s  %s\n", c.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                  c.detail.dump().c_str());
    }
    std::printf("%s\n", report.pass() ? "all criteria passed" : "some criteria FAILED");
    return report.pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance: %s\n", e.what());
    return 2;
  }
}
