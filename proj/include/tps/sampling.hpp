#pragma once

#include <cstdint>

#include "tps/operator.hpp"

namespace tps {

// Seed for item `index` of a run with the given master seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// iid standard normal coefficients on every non-identity basis element; the
// identity coefficient is 0.
OperatorExpr sample_hamiltonian(const ClassPtr& cls, std::uint64_t seed);

}  // namespace tps
