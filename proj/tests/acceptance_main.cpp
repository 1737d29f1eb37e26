// Acceptance gate: runs every suite row and prints one verdict line each.
// Exit status 0 only when all rows pass.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "cmw/suite.hpp"

int main(int argc, char** argv) {
  unsigned long long seed = 1;
  for (int i = 1; i < argc - 1; ++i)
    if (std::strcmp(argv[i], "--seed") == 0) seed = std::strtoull(argv[i + 1], nullptr, 10);

  const cmw::SuiteReport rep = cmw::run_suite(seed);
  for (const cmw::SuiteRow& row : rep.rows)
    std::printf("%s %-24s (%6.2fs) %s\n", row.pass ? "PASS" : "FAIL",
                row.name.c_str(), row.seconds, row.detail.c_str());
  std::printf("%s: %zu/%zu criteria passed (seed %llu)\n",
              rep.all_pass() ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              static_cast<std::size_t>(
                  std::count_if(rep.rows.begin(), rep.rows.end(),
                                [](const cmw::SuiteRow& r) { return r.pass; })),
              rep.rows.size(), seed);
  return rep.all_pass() ? 0 : 1;
}
