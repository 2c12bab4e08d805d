#include <cstdio>

#include "ccm/version.hpp"

int main() {
  std::printf("ccmnet %s\n", ccm::kVersion);
  return 0;
}
