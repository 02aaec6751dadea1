// Runs the oracle suite and prints a TAP report. Exit status 1 on any failure.
#include <cstdio>
#include <cstdlib>

#include "oracles.hpp"

int main(int argc, char** argv) {
  sslmseg::oracle::SuiteOptions o;
  if (argc > 1) o.seed = std::strtoull(argv[1], nullptr, 10);
  const auto reports = sslmseg::oracle::oracle_suite(o);
  std::fputs(sslmseg::oracle::tap(reports).c_str(), stdout);
  for (const auto& r : reports) {
    if (!r.pass) return 1;
  }
  return 0;
}
