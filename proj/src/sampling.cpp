#include "tps/sampling.hpp"

#include <random>

namespace tps {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

OperatorExpr sample_hamiltonian(const ClassPtr& cls, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CVector c = CVector::Zero(static_cast<Eigen::Index>(cls->dim()));
  for (std::size_t j = 0; j < cls->dim(); ++j) {
    const auto& terms = cls->basis()[j].terms();
    if (terms.size() == 1 && terms.begin()->first.is_identity()) continue;
    c(static_cast<Eigen::Index>(j)) = nd(rng);
  }
  return OperatorExpr(cls, c);
}

}  // namespace tps
