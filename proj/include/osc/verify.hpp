#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace osc {

struct InvariantCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Fast versions of the library invariants, run in process by the `verify` subcommand.
std::vector<InvariantCheck> verify_invariants(std::uint64_t seed, int workers);

}  // namespace osc
