// Runs the acceptance checklist, one line per criterion.
// Exit 0 when every executed criterion passes, 3 otherwise.

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "nrlink/acceptance.hpp"

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
      if (only < 1 || only > nrlink::kNumCriteria) {
        std::fprintf(stderr, "criterion id must be 1..%d\n", nrlink::kNumCriteria);
        return 2;
      }
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  return nrlink::run_checklist(only, stdout) ? 0 : 3;
}
