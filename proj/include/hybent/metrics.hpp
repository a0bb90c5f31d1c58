// Figures of merit: fidelity, partial-transpose negativity, Wigner functions.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "hybent/fock.hpp"

namespace hybent {

/// <psi|rho|psi> for normalized psi.
double fidelity(const DensityOp& rho, const Ket& psi);
cplx overlap(const Ket& psi, const Ket& phi);

/// rho^{T_mode} for a two-mode operator.
CMatrix partial_transpose(const DensityOp& rho, int mode);
/// Sum of |negative eigenvalues| of the partial transpose over `mode`.
double npt(const DensityOp& rho, int mode = 0);
/// Pure-state shortcut via Schmidt coefficients: ((sum sqrt(l))^2 - 1) / 2.
double npt_pure(const Ket& psi);

struct NptRow {
  double alpha_i;
  double npt;
  int dim_mode2;
  double truncation_delta;  ///< |npt(dim) - npt(2 dim)|
};
/// NPT of the pre-displacement hybrid state per grid point, unit efficiency.
std::vector<NptRow> npt_curve(std::span<const double> alpha_i_grid);

struct WignerWindow {
  double x_min = -5.0;
  double x_max = 5.0;
  int n_x = 101;
  double p_min = -5.0;
  double p_max = 5.0;
  int n_p = 101;
};

struct WignerGrid {
  double x_min, x_max, p_min, p_max;
  int n_x, n_p;
  Eigen::MatrixXd values;  ///< values(i, j) = W(x_i, p_j)
  double integral;         ///< Riemann sum of W over the grid
  std::string status;      ///< "ok", or "warning" when the integral misses 1 by > 0.01

  double x(int i) const;
  double p(int j) const;
};

/// W(x, p) = (1/pi) Tr[rho D(alpha) Pi D(alpha)^dag], alpha = (x + ip)/sqrt(2), so
/// that W integrates to 1 over dx dp (vacuum peak 1/pi).
WignerGrid wigner(const DensityOp& rho, const WignerWindow& win);
double wigner_point(const DensityOp& rho, double x, double p);

struct Conditioned {
  DensityOp state;
  double probability;
};
/// Projects mode 0 onto |fock_n> and returns the normalized mode-1 state.
Conditioned condition_on_mode1(const DensityOp& rho, int fock_n);

}  // namespace hybent
