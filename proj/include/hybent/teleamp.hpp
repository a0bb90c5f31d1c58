// Tele-amplification of the coherent arm of a small hybrid pair through an
// unbalanced entangled coherent state (ECS) channel.
//
// Mode labels: 1 = discrete mode of the hybrid pair, 2 = its coherent arm,
// 3 = channel half mixed with mode 2 on a 50:50 beam splitter, 2' = output.
// The four-mode ket is ordered (1, 2, 3, 2').
#pragma once

#include <span>
#include <string>
#include <vector>

#include "hybent/fock.hpp"

namespace hybent {

struct TeleampParams {
  double alpha_i = 0.0;
  double g = 0.0;
  double alpha_f = 0.0;        ///< channel amplitude on mode 3
  double alpha_f_prime = 0.0;  ///< channel amplitude on mode 2' (target)
  double displacement = 0.0;   ///< D(-displacement) applied to mode 2 of the hybrid pair
  double n_prime = 0.0;        ///< ECS normalization
  double n_o = 0.0;            ///< 1/sqrt(2(1 - exp(-4 alpha_f^2)))
};

/// Symmetric mapping: alpha_f = (g-1) alpha_i / 2, displacement = (1+g) alpha_i / 2.
TeleampParams make_teleamp_params(double alpha_i, double alpha_f_prime);
TeleampParams make_teleamp_params(double alpha_i, double alpha_f_prime, double alpha_f, double displacement);
void validate(const TeleampParams& p);

struct TeleampDims {
  int d1 = 3;
  int d2 = 20;
  int d3 = 20;
  int d2p = 25;
};

enum class BellOutcome { k10, k01 };

struct BellProjection {
  Ket state;           ///< normalized state on (1, 2')
  double probability;
};

/// Mixes modes 2 and 3 on a 50:50 beam splitter and projects them onto |1,0>
/// (k10) or |0,1> followed by a pi phase shift on 2' (k01).
BellProjection bell_project(const Ket& psi_s, const Ket& ecs_channel, BellOutcome outcome);

/// The hybrid pair fed into the teleporter, on dims (d1, d2).
Ket teleamp_input(const TeleampParams& p, const TeleampDims& dims);

struct TeleampResult {
  Ket out_state;
  double fidelity_prime = 0.0;
  double p_10 = 0.0;
  double p_01 = 0.0;
  double p_total = 0.0;
  double outcome_overlap = 0.0;  ///< |<out_10|out_01>|
};
/// Brute-force Fock-space evaluation; the ground truth for every closed form here.
TeleampResult teleamp_oracle(const TeleampParams& p, const TeleampDims& dims = {});

/// Exact two-component algebra: the projection only sees the |0>, |1> amplitudes
/// of mode 2, so output and probabilities follow from coherent-state overlaps.
struct ReducedTeleamp {
  double fidelity_prime;
  double p_10;
  double p_01;
};
ReducedTeleamp teleamp_reduced(const TeleampParams& p);

/// Maximizes the output fidelity over the displacement and the channel amplitude
/// alpha_f for fixed alpha_i and alpha_f'.
TeleampParams optimize_teleamp(double alpha_i, double alpha_f_prime);

// Printed closed forms. These assume the symmetric mapping between alpha_i, g
// and alpha_f.

/// Explicit output state as printed. `flip_minus_branch` negates every |-alpha_f'>
/// coefficient, the sign pattern a "+" channel would produce.
Ket teleamp_output_closed_form(const TeleampParams& p, const TeleampDims& dims = {}, bool flip_minus_branch = false);
double teleamp_fidelity_closed(const TeleampParams& p);

enum class SuccessProbForm {
  kPrinted,             ///< (g a^2 - a^2) read as (g - 1) a^2
  kGainSquared,         ///< (g a^2 - a^2) read as g^2 a^2 - a^2
  kGainSquaredOutput,   ///< g^2 reading with exp(-2 alpha_f'^2) in the last term
};
double teleamp_success_prob_closed(const TeleampParams& p, SuccessProbForm form = SuccessProbForm::kPrinted);

enum class TeleampMode { kFixed, kOptimized };
std::string to_string(TeleampMode mode);
TeleampMode teleamp_mode_from_string(const std::string& s);

struct TeleampRow {
  double alpha_i;
  double alpha_f;
  double alpha_f_prime;
  double displacement;
  double f_closed;
  double f_oracle;
  double p_closed;
  double p_oracle;
  double f_small;          ///< small-state fidelity F(alpha_i) of the untransmitted pair
  double outcome_overlap;
};
/// One row per grid point, sorted by alpha_f'.
std::vector<TeleampRow> sweep_teleamp(double alpha_i, std::span<const double> alpha_f_prime_grid,
                                      TeleampMode mode = TeleampMode::kOptimized, const TeleampDims& dims = {});

struct ClosedFormReportRow {
  double alpha_i;
  double alpha_f_prime;
  double f_oracle;
  double f_closed;
  double state_fidelity_printed;  ///< |<closed|oracle>|^2, closed form as printed
  double state_fidelity_flipped;  ///< same with the |-alpha_f'> sign flipped
  double p_oracle;
  double p_printed;
  double p_gain_squared;
  double p_gain_squared_output;
};
/// Compares every printed closed form with the oracle under the symmetric mapping.
std::vector<ClosedFormReportRow> closed_form_report(double alpha_i, std::span<const double> alpha_f_prime_grid,
                                                    const TeleampDims& dims = {});

}  // namespace hybent
