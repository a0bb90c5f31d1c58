// Synthetic two-mode homodyne data: loss channel, quadrature densities and a
// deterministic inverse-CDF sampler.
//
// Both modes are measured at the same local-oscillator phase theta, with
// <x_theta|n> = psi_n(x) e^{-i n theta}.
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "hybent/fock.hpp"

namespace hybent {

/// Uniform grid of n points on [x_min, x_max].
struct QuadGrid {
  double x_min = -6.0;
  double x_max = 6.0;
  int n = 4096;

  double dx() const { return (x_max - x_min) / (n - 1); }
  double x(int k) const { return x_min + dx() * k; }
};

/// psi_0..psi_{d-1} at x (Hermite functions, vacuum variance 1/2).
Eigen::VectorXd quadrature_wavefunctions(double x, int d);
/// Row k holds the wavefunctions at grid point k.
Eigen::MatrixXd quadrature_wavefunctions(const QuadGrid& grid, int d);

// ---------------------------------------------------------------------------
// Loss

/// Kraus operators of a pure-loss channel with transmissivity eta on d levels:
/// E_k|n> = sqrt(C(n,k) eta^(n-k) (1-eta)^k) |n-k>.
std::vector<CMatrix> loss_kraus(double eta, int d);
/// Loss of transmissivity eta on every listed mode. eta = 1 returns rho unchanged.
DensityOp apply_loss(const DensityOp& rho, double eta, std::span<const int> modes);
/// Heisenberg-picture (adjoint) loss applied to a single-mode operator.
CMatrix loss_adjoint(const CMatrix& op, double eta);

// ---------------------------------------------------------------------------
// Quadrature densities

/// p(x) of a single-mode state on the grid.
Eigen::VectorXd quad_pdf_single(const DensityOp& rho_single, double theta, const QuadGrid& grid);
/// p(x1, x2) of a two-mode state, both quadratures on `grid`. Throws
/// TruncationError when the grid misses more than 1e-6 of the probability.
Eigen::MatrixXd quad_pdf(const DensityOp& rho, double theta, const QuadGrid& grid, double norm_tol = 1e-6);

// ---------------------------------------------------------------------------
// Sampling

struct QuadSample {
  std::uint64_t event_id;
  double theta;
  double x1;
  double x2;
};

struct HomodyneConfig {
  std::vector<double> phases;  ///< LO phases, ascending, in [0, pi]; 7-13 values
  double state_phase = 0.0;    ///< relative phase written onto the discrete mode before measurement
  std::uint64_t n_samples = 600000;
  double efficiency = 1.0;
  std::uint64_t seed = 1;
  double x_range = 0.0;        ///< grid half-width; 0 = 4 + sqrt(2) alpha_max
  int grid_points = 4096;
};

/// k pi / n for k = 0..n-1; theta = pi would repeat theta = 0 with x -> -x.
std::vector<double> default_phases(int n = 9);
void validate(const HomodyneConfig& cfg);
/// Half-width used for a state when cfg.x_range is 0.
double default_x_range(const DensityOp& rho);

/// Event i is measured at phases[i % K]. Loss of `efficiency` acts on both modes.
/// The stream for each block of events depends only on (seed, block index).
std::vector<QuadSample> sample(const DensityOp& rho, const HomodyneConfig& cfg);

void write_dataset_csv(const std::filesystem::path& path, std::span<const QuadSample> samples);
std::vector<QuadSample> read_dataset_csv(const std::filesystem::path& path);

}  // namespace hybent
