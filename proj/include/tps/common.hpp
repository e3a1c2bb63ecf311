#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tps {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// Broad failure categories; the CLI maps these onto exit codes.
enum class ErrorKind {
  invalid_argument,  // bad parameters or malformed input files
  dimension,         // dense cap exceeded or mismatched sizes
  not_in_class,      // operator outside the requested subspace
  degenerate,        // refused because of a degenerate spectrum
  defective,         // near-defective eigenpair, derivatives unreliable
  numerical,         // solver non-convergence and similar
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Largest site count the dense engine accepts. Defaults to 12 and can be
// lowered or raised with TPS_SPECTRA_MAX_N.
int max_dense_sites();

// Throws ErrorKind::dimension when 2^n exceeds the dense cap.
void check_dense_size(int n);

inline std::size_t hilbert_dim(int n) { return std::size_t{1} << n; }

}  // namespace tps
