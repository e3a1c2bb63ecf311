#include "tps/common.hpp"

#include <cstdlib>
#include <string>

namespace tps {

int max_dense_sites() {
  if (const char* env = std::getenv("TPS_SPECTRA_MAX_N")) {
    try {
      int v = std::stoi(env);
      if (v > 0 && v <= 20) return v;
    } catch (const std::exception&) {
    }
  }
  return 12;
}

void check_dense_size(int n) {
  if (n < 1) throw Error(ErrorKind::invalid_argument, "site count must be positive");
  if (n > max_dense_sites()) {
    throw Error(ErrorKind::dimension,
                "dense dimension 2^" + std::to_string(n) + " exceeds cap 2^" +
                    std::to_string(max_dense_sites()) +
                    " (raise TPS_SPECTRA_MAX_N)");
  }
}

}  // namespace tps
