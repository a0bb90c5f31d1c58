// Truncated Fock-space states and operators.
//
// Basis ordering is mode-major lexicographic: the last mode's occupation
// varies fastest, so index = ((n0 * d1 + n1) * d2 + n2) ... Modes are
// 0-based throughout the API.
//
// Phase conventions:
//   beam splitter   B(theta) = exp(theta (a^dag b - a b^dag)),
//                   B |alpha>|0> = |alpha cos(theta)>|-alpha sin(theta)>
//   quadrature      x_theta = (a e^{-i theta} + a^dag e^{i theta}) / sqrt(2),
//                   vacuum variance 1/2
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hybent {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when truncation discards more amplitude than the audit threshold.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a projection or conditioning has (numerically) zero probability.
class DegenerateOutcome : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default norm-loss threshold for truncation audits.
inline constexpr double kTruncationTol = 1e-10;

class ModeShape {
 public:
  ModeShape() = default;
  explicit ModeShape(std::vector<int> dims);
  ModeShape(std::initializer_list<int> dims) : ModeShape(std::vector<int>(dims)) {}

  int modes() const { return static_cast<int>(dims_.size()); }
  int dim(int mode) const;
  const std::vector<int>& dims() const { return dims_; }
  std::size_t total() const { return total_; }
  std::size_t stride(int mode) const;

  /// Occupation numbers for a flat basis index.
  std::vector<int> occupations(std::size_t index) const;
  std::size_t index(std::span<const int> occupations) const;

  ModeShape without(int mode) const;
  ModeShape select(std::span<const int> modes) const;
  void check_mode(int mode) const;

  bool operator==(const ModeShape& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::size_t total_ = 0;
};

std::string to_string(const ModeShape& shape);

struct Ket {
  ModeShape shape;
  CVector amps;
  bool normalized = false;
  /// Probability mass known to be lost to truncation while building this ket.
  double discarded = 0.0;

  Ket() = default;
  Ket(ModeShape shape, CVector amps, bool normalized = false, double discarded = 0.0);

  double norm2() const { return amps.squaredNorm(); }
  /// Returns a unit-norm copy; throws InvalidInput for a zero vector.
  Ket normalized_copy() const;
  cplx operator[](std::size_t i) const { return amps(static_cast<Eigen::Index>(i)); }
};

Ket basis_ket(const ModeShape& shape, std::span<const int> occupations);
Ket fock_ket(int n, int d);

struct LinOp {
  ModeShape shape;
  CMatrix matrix;

  LinOp() = default;
  LinOp(ModeShape shape, CMatrix matrix);
};

class DensityOp {
 public:
  DensityOp() = default;
  /// Validates Hermiticity, unit trace and positivity at the given tolerances.
  DensityOp(ModeShape shape, CMatrix matrix, double herm_tol = 1e-10, double trace_tol = 1e-8,
            double psd_tol = 1e-8);

  static DensityOp pure(const Ket& psi);
  static DensityOp maximally_mixed(const ModeShape& shape);
  /// Hermitian-symmetrizes and divides by the trace before validating.
  static DensityOp normalized(ModeShape shape, CMatrix matrix);

  const ModeShape& shape() const { return shape_; }
  const CMatrix& matrix() const { return matrix_; }
  double trace() const { return matrix_.trace().real(); }
  double purity() const;
  double min_eigenvalue() const;

 private:
  ModeShape shape_;
  CMatrix matrix_;
};

// ---------------------------------------------------------------------------
// Single-mode builders

double coherent_tail(cplx alpha, int d);
/// Normalized flag is set only when the tail beyond d is below kTruncationTol.
Ket coherent(cplx alpha, int d);

LinOp creation_op(int d);
LinOp annihilation_op(int d);
LinOp number_op(int d);
LinOp parity_op(int d);
/// exp(i phi n)
LinOp phase_shift_op(double phi, int d);

/// Smallest working dimension satisfying d_work >= d + ceil(10 |beta|) + 10.
int displacement_work_dim(cplx beta, int d);
/// Top-left d x d block of exp(beta a^dag - beta^* a) built in d_work levels.
LinOp displacement_op(cplx beta, int d, int d_work);
LinOp displacement_op(cplx beta, int d);

/// exp(G) for anti-Hermitian G via the Hermitian eigendecomposition of iG.
CMatrix expm_antihermitian(const CMatrix& generator);

/// Two-mode operator on dims (dim(mode_a), dim(mode_b)) of `shape`, ordered (a, b).
/// Built exactly per total-photon block and cropped to the truncated dims.
LinOp beam_splitter_op(double theta, int mode_a, int mode_b, const ModeShape& shape);
LinOp beam_splitter_op(double theta, int dim_a, int dim_b);

// ---------------------------------------------------------------------------
// Composition and reduction

Ket tensor(const Ket& a, const Ket& b);
DensityOp tensor(const DensityOp& a, const DensityOp& b);
LinOp tensor(const LinOp& a, const LinOp& b);
LinOp identity_op(const ModeShape& shape);

/// Applies an operator defined on the sub-shape of `modes` (in that order).
Ket apply(const LinOp& op, const Ket& psi, std::span<const int> modes);
Ket apply(const LinOp& op, const Ket& psi);
/// Embeds a local operator into the full shape (dense; only for small shapes).
LinOp embed(const LinOp& op, const ModeShape& shape, std::span<const int> modes);

/// a^dag on one mode with a norm-loss audit on the discarded top level.
Ket apply_creation(const Ket& psi, int mode, double tol = kTruncationTol);
/// D(beta) on one mode: pads the mode to d_work, applies the full exponential,
/// crops back and audits the cropped mass.
Ket apply_displacement(const Ket& psi, int mode, cplx beta, double tol = 1e-8);
/// Re-truncates (or zero-pads) one mode; audits the dropped mass.
Ket resize_mode(const Ket& psi, int mode, int new_dim, double tol = kTruncationTol);
DensityOp resize_mode(const DensityOp& rho, int mode, int new_dim, double tol = kTruncationTol);

DensityOp partial_trace(const DensityOp& rho, std::span<const int> keep);

struct Projection {
  Ket state;  ///< unnormalized conditional state on the remaining modes
  double probability;
};
Projection project_mode(const Ket& psi, int mode, int fock_n);

DensityOp apply(const LinOp& op, const DensityOp& rho, std::span<const int> modes);
/// O m O^dag with O acting on `modes`; no density-matrix validation (Kraus terms).
CMatrix sandwich(const LinOp& op, const CMatrix& m, const ModeShape& shape, std::span<const int> modes);

/// Photon-number expectation of one mode.
double mean_photon(const Ket& psi, int mode);
double mean_photon(const DensityOp& rho, int mode);
/// Photon-number distribution of one mode.
std::vector<double> photon_distribution(const DensityOp& rho, int mode);

}  // namespace hybent
