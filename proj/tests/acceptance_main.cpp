#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "polyprog/acceptance.hpp"

#include <cstdio>

TEST_CASE("verification battery") {
  const auto results = polyprog::run_acceptance(0, POLYPROG_DATA_DIR);
  CHECK(results.size() == 12);
  for (const auto& cr : results) {
    std::printf("%s\n", polyprog::criterion_line(cr).c_str());
    std::fflush(stdout);
    CHECK_MESSAGE(cr.pass, cr.name, ": ", cr.detail);
  }
}
