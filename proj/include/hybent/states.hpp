// Builders for the hybrid single-photon / coherent-state family and the
// small-scale closed forms that describe them.
//
// Two-mode states are ordered (discrete mode, coherent mode): mode 0 carries
// |0>/|1>, mode 1 carries the coherent-state part.
#pragma once

#include <span>
#include <string>
#include <vector>

#include "hybent/fock.hpp"

namespace hybent {

struct HybridParams {
  double alpha_i = 0.0;   ///< seed coherent amplitude
  int n_add = 1;          ///< photon additions
  double g = 0.0;         ///< amplitude gain of photon addition
  double t = 0.0;         ///< weight of a^dag on the coherent mode
  double r = 1.0;         ///< weight of a^dag on the vacuum mode
  double alpha_f = 0.0;   ///< amplitude of the symmetric hybrid state
  double phi = 0.0;       ///< relative phase between the two branches
  double displacement = 0.0;  ///< magnitude of the final displacement D(-displacement)
};

/// Parameters for n_add = 1 with balanced weights and the symmetric displacement.
HybridParams make_hybrid_params(double alpha_i, double phi = 0.0);

/// g = 1/2 + sqrt(1/4 + n/alpha^2). Throws InvalidInput for alpha <= 0.
double gain(int n_add, double alpha);
/// t = (alpha^2 + 2)^(-1/2); equalizes the two photon-addition branches.
double balancing_t(double alpha);
/// n! L_n(-alpha^2), the squared norm of (a^dag)^n |alpha>.
double pacs_norm(double alpha, int n_add);

/// Normalized (a^dag)^n |alpha> from its Fock amplitudes; throws TruncationError
/// when more than 1e-10 of the norm lies beyond d.
Ket photon_added_coherent(double alpha, int n_add, int d);

double fidelity_pacs_coherent(double alpha, int n_add);
/// Brute-force |<g alpha|PACS>|^2 in d levels.
double fidelity_pacs_coherent_numeric(double alpha, int n_add, int d);

struct SuperposedAddition {
  Ket state;     ///< normalized (r a1^dag + t a2^dag)|input>
  double norm2;  ///< squared norm before normalization
};
SuperposedAddition apply_superposed_addition(double r, double t, const Ket& input);

/// Mode-1 dim 3; mode-2 dim 30 up to alpha_i = 2, 50 up to 3.25, grown beyond.
ModeShape default_hybrid_dims(double alpha_i);

/// (|1>|alpha_i> + e^{i phi}|0> a^dag|alpha_i>/sqrt(alpha_i^2+1)) / sqrt(2)
Ket hybrid_pre(double alpha_i, double phi, const ModeShape& dims);

/// hybrid_pre followed by D(-displacement) on the coherent mode. The pre-state is
/// built with `build_dim` levels and cropped to dims afterwards.
Ket hybrid_displaced(double alpha_i, double displacement, double phi, const ModeShape& dims, int build_dim);

struct SymmetricHybrid {
  Ket state;
  HybridParams params;
};
SymmetricHybrid hybrid_symmetric(double alpha_i, const ModeShape& dims);

struct SymmetricFidelity {
  double fidelity;
  double alpha_f;
};
SymmetricFidelity fidelity_symmetric(double alpha_i);
double fidelity_symmetric_numeric(double alpha_i, const ModeShape& dims);
/// |<Psi(alpha_target)|D(-displacement) hybrid_pre(alpha_i)>|^2 from coherent-state
/// inner products (real amplitudes, phi = 0).
double fidelity_displaced_analytic(double alpha_i, double displacement, double alpha_target);

/// (|0>|alpha> + |1>|-alpha>) / sqrt(2)
Ket ideal_hybrid(double alpha, const ModeShape& dims);
/// [2(1 - exp(-2a^2 - 2b^2))]^(-1/2)
double ecs_norm_closed(double a, double b);
/// N'(|a>|b> - |-a>|-b>) on (channel mode, output mode).
Ket ecs(double a, double b, const ModeShape& dims);

struct SmallFidelityRow {
  double alpha_i;
  double alpha_f;
  double f_closed;
  double f_oracle;
  double f_free;             ///< best fidelity to Psi(alpha_f) over free (alpha_i, displacement)
  double alpha_i_free;
  double displacement_free;
  double delta;              ///< f_free - f_closed
};

/// Direct mapping alpha_i -> (alpha_f, F) plus the free-parameter grid search.
std::vector<SmallFidelityRow> sweep_fidelity_small(std::span<const double> alpha_i_grid);

/// Named builder used by the CLI: coherent | pacs | hybrid-pre | hybrid-sym |
/// ideal-hybrid | ecs.
struct StateRequest {
  std::string kind;
  double alpha = 1.0;          ///< alpha_i for hybrid kinds, alpha for coherent/pacs/ideal, alpha_f for ecs
  double alpha_prime = 1.58;   ///< ecs output amplitude
  double phi = 0.0;
  int n_add = 1;
  std::vector<int> dims;       ///< empty = defaults
};
struct BuiltState {
  Ket state;
  HybridParams params;
};
BuiltState build_state(const StateRequest& req);

}  // namespace hybent
