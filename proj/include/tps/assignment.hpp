#pragma once

#include <vector>

#include "tps/common.hpp"

namespace tps {

struct Assignment {
  // row_to_col[i] is the column matched to row i.
  std::vector<int> row_to_col;
  double cost = 0.0;
};

// Minimum-cost perfect matching on a square cost matrix (Hungarian method with
// potentials, O(N^3)).
Assignment solve_assignment(const RMatrix& cost);

}  // namespace tps
