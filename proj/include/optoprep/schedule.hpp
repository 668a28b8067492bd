#pragma once

#include <string>
#include <vector>

#include "optoprep/model.hpp"

namespace optoprep {

// Per-period drive phases with the compensating frame ramp.  Index j runs over
// driven periods only; free half-periods leave the ledger untouched.
//   varphi[j] = (4/3) pi k^2 sum_{l<j} eta_l^2
//   psi[2j]   = pi + varphi[2j],  psi[2j+1] = varphi[2j+1]
// varphi has one extra trailing entry, the frame phase left after the last
// period (undone before any state comparison).
struct PhaseLedger {
  std::vector<double> psi;        // per driven period
  std::vector<double> varphi;     // size psi.size() + 1
  std::vector<double> phi_steps;  // (4/3) pi k^2 eta_j^2 per driven period
  double final_phase() const { return varphi.empty() ? 0.0 : varphi.back(); }
};

// pi_on_second_period swaps which period of each pair carries the pi offset;
// both choices satisfy the cancellation condition.
PhaseLedger phase_schedule(const std::vector<double>& block_amplitudes, double k,
                           bool pi_on_second_period = false);

enum class SegmentKind { Driven, Free };

// One timeline segment.  Driven segments span 2T (a pair of periods sharing
// eta with the two ledger phases); free segments span T/2.
struct Segment {
  SegmentKind kind = SegmentKind::Free;
  double t_start = 0.0;    // units of T
  double duration = 0.0;   // units of T
  double eta = 0.0;
  double psi_first = 0.0;
  double psi_second = 0.0;
};

struct DrivingPattern {
  std::vector<Segment> segments;
  std::vector<double> block_amplitudes;  // one eta per 5T block
  SystemParams params;
  PhaseLedger ledger;

  double total_duration() const;                 // units of T
  std::vector<DrivePulse> pulses() const;        // one per driven period
  int n_blocks() const { return static_cast<int>(block_amplitudes.size()); }
};

// Block layout: [driven 2T, free T/2, driven 2T, free T/2], constant eta per
// block.  Throws ConstraintViolation when an amplitude leaves [0, eta_max].
DrivingPattern build_pattern(const std::vector<double>& block_amplitudes,
                             const SystemParams& params, double eta_max,
                             bool pi_on_second_period = false);

struct CancellationReport {
  double first_moment;   // |sum_j eta_j e^{-i(psi_j - varphi_j)}|, ~0 by construction
  Complex zeta_prime;    // (1/N) sum_j eta_j^2 e^{-2i(psi_j - varphi_j)}
  double chi;            // (1/N) sum_j eta_j^2
  bool degenerate;       // all amplitudes zero
};
CancellationReport validate_cancellation(const DrivingPattern& pattern);

// Plain-text serialization, bit-exact on round trip.
std::string pattern_to_json(const DrivingPattern& pattern);
DrivingPattern pattern_from_json(const std::string& text);

}  // namespace optoprep
