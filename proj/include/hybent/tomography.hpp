// Two-mode iterative maximum-likelihood (R rho R) reconstruction from binned
// same-phase quadrature pairs, with detection losses folded into the POVM.
#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "hybent/fock.hpp"
#include "hybent/homodyne.hpp"

namespace hybent {

/// An observed bin has (numerically) zero predicted probability.
class StalledLikelihood : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TomoConfig {
  ModeShape dims{3, 10};
  double bin_width = 0.2;
  double x_range = 6.0;      ///< bins partition [-x_range, x_range]
  double efficiency = 1.0;   ///< loss folded into the POVM
  int max_iter = 2000;
  double tol = 1e-9;         ///< relative log-likelihood change over 10 iterations
  double dilution = 1.0;     ///< 1 = plain R rho R
  std::vector<double> phases;  ///< empty = the distinct phases present in the data
};
void validate(const TomoConfig& cfg);
int bin_count(const TomoConfig& cfg);

struct Povm {
  ModeShape dims;
  std::vector<double> phases;
  int n_bins = 0;
  double bin_width = 0.0;
  double x_range = 0.0;
  double efficiency = 1.0;
  /// mode_a[phase][bin], mode_b[phase][bin]: loss-corrected single-mode bin operators.
  std::vector<std::vector<CMatrix>> mode_a;
  std::vector<std::vector<CMatrix>> mode_b;
  /// max over phases and modes of |1 - sum_bins Pi| before loss correction.
  double identity_deficit = 0.0;

  /// Pi_a(phase, i) (x) Pi_b(phase, j) on the two-mode space.
  CMatrix element(int phase, int i, int j) const;
};
/// Throws TruncationError when the bins miss more than 1e-3 of the identity.
Povm build_povm(const TomoConfig& cfg, std::span<const double> phases);

struct BinnedData {
  std::vector<double> phases;
  std::vector<Eigen::MatrixXd> counts;  ///< counts[phase](i, j)
  std::size_t used = 0;
  std::size_t dropped = 0;              ///< samples outside [-x_range, x_range)
};
BinnedData bin_data(std::span<const QuadSample> samples, const TomoConfig& cfg);

/// p[phase](i, j) = Tr[Pi rho].
std::vector<Eigen::MatrixXd> probabilities(const Povm& povm, const DensityOp& rho);

struct ZeroBin {
  int phase, i, j;
};
/// sum_j f_j log p_j with f_j = counts / used. Returns -infinity when an observed
/// bin has p_j <= 0, listing such bins in `zero_bins` if given.
double loglik(const BinnedData& data, const DensityOp& rho, const Povm& povm,
              std::vector<ZeroBin>* zero_bins = nullptr);

struct TomoResult {
  DensityOp rho;
  std::vector<double> loglik_trace;  ///< entry k: log-likelihood after k iterations
  int iterations = 0;
  bool converged = false;
  std::size_t used = 0;
  std::size_t dropped = 0;
  double identity_deficit = 0.0;
};
TomoResult reconstruct(const BinnedData& data, const Povm& povm, const TomoConfig& cfg);
TomoResult reconstruct(std::span<const QuadSample> samples, const TomoConfig& cfg);

}  // namespace hybent
