#include "optoprep/schedule.hpp"

#include <cmath>

#include "json.hpp"

namespace optoprep {

PhaseLedger phase_schedule(const std::vector<double>& block_amplitudes, double k,
                           bool pi_on_second_period) {
  if (!(k > 0.0)) throw InvalidParameter("k must be positive");
  for (double eta : block_amplitudes)
    if (eta < 0.0) throw InvalidParameter("amplitudes must be non-negative");

  // Four driven periods per block, all at the block's amplitude.
  std::vector<double> per_period;
  per_period.reserve(4 * block_amplitudes.size());
  for (double eta : block_amplitudes)
    for (int i = 0; i < 4; ++i) per_period.push_back(eta);

  PhaseLedger ledger;
  const size_t n = per_period.size();
  ledger.psi.resize(n);
  ledger.phi_steps.resize(n);
  ledger.varphi.resize(n + 1);
  const double c = (4.0 / 3.0) * M_PI * k * k;
  double phi = 0.0;
  for (size_t j = 0; j < n; ++j) {
    ledger.varphi[j] = phi;
    ledger.phi_steps[j] = c * per_period[j] * per_period[j];
    const bool first_of_pair = (j % 2 == 0);
    const bool carries_pi = first_of_pair != pi_on_second_period;
    ledger.psi[j] = phi + (carries_pi ? M_PI : 0.0);
    phi += ledger.phi_steps[j];
  }
  ledger.varphi[n] = phi;
  return ledger;
}

double DrivingPattern::total_duration() const {
  double d = 0.0;
  for (const auto& s : segments) d += s.duration;
  return d;
}

std::vector<DrivePulse> DrivingPattern::pulses() const {
  std::vector<DrivePulse> out;
  for (const auto& s : segments) {
    if (s.kind != SegmentKind::Driven) continue;
    out.push_back({s.eta, s.psi_first, s.t_start, 1.0});
    out.push_back({s.eta, s.psi_second, s.t_start + 1.0, 1.0});
  }
  return out;
}

DrivingPattern build_pattern(const std::vector<double>& block_amplitudes,
                             const SystemParams& params, double eta_max,
                             bool pi_on_second_period) {
  validate(params);
  if (eta_max < 0.0) throw InvalidParameter("eta_max must be non-negative");
  for (double eta : block_amplitudes)
    if (eta < 0.0 || eta > eta_max)
      throw ConstraintViolation("block amplitude outside [0, eta_max]");

  DrivingPattern pat;
  pat.block_amplitudes = block_amplitudes;
  pat.params = params;
  pat.ledger = phase_schedule(block_amplitudes, params.k, pi_on_second_period);

  double t = 0.0;
  size_t period = 0;
  for (double eta : block_amplitudes) {
    for (int half = 0; half < 2; ++half) {
      Segment driven;
      driven.kind = SegmentKind::Driven;
      driven.t_start = t;
      driven.duration = 2.0;
      driven.eta = eta;
      driven.psi_first = pat.ledger.psi[period];
      driven.psi_second = pat.ledger.psi[period + 1];
      period += 2;
      pat.segments.push_back(driven);
      t += 2.0;
      Segment free;
      free.kind = SegmentKind::Free;
      free.t_start = t;
      free.duration = 0.5;
      pat.segments.push_back(free);
      t += 0.5;
    }
  }
  return pat;
}

CancellationReport validate_cancellation(const DrivingPattern& pattern) {
  CancellationReport rep{};
  const auto& led = pattern.ledger;
  Complex m1{0.0, 0.0};
  Complex m2{0.0, 0.0};
  double chi = 0.0;
  size_t j = 0;
  bool any = false;
  for (const auto& p : pattern.pulses()) {
    const double delta = led.psi[j] - led.varphi[j];
    m1 += p.eta * std::exp(Complex(0.0, -delta));
    m2 += p.eta * p.eta * std::exp(Complex(0.0, -2.0 * delta));
    chi += p.eta * p.eta;
    if (p.eta != 0.0) any = true;
    ++j;
  }
  const double n = j > 0 ? static_cast<double>(j) : 1.0;
  rep.first_moment = std::abs(m1);
  rep.zeta_prime = m2 / n;
  rep.chi = chi / n;
  rep.degenerate = !any;
  return rep;
}

namespace {

nlohmann::json ledger_to_json(const PhaseLedger& led) {
  return {{"psi", led.psi}, {"varphi", led.varphi}, {"phi_steps", led.phi_steps}};
}

PhaseLedger ledger_from_json(const nlohmann::json& j) {
  PhaseLedger led;
  led.psi = j.at("psi").get<std::vector<double>>();
  led.varphi = j.at("varphi").get<std::vector<double>>();
  led.phi_steps = j.at("phi_steps").get<std::vector<double>>();
  return led;
}

}  // namespace

std::string pattern_to_json(const DrivingPattern& pattern) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["omega_m"] = pattern.params.omega_m;
  j["omega_c_ratio"] = pattern.params.omega_c_ratio;
  j["k"] = pattern.params.k;
  j["cavity_dim"] = pattern.params.space.cavity_dim;
  j["mech_dim"] = pattern.params.space.mech_dim;
  j["block_amplitudes"] = pattern.block_amplitudes;
  j["ledger"] = ledger_to_json(pattern.ledger);
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : pattern.segments) {
    nlohmann::json seg;
    seg["kind"] = s.kind == SegmentKind::Driven ? "driven" : "free";
    seg["t_start_T"] = s.t_start;
    seg["duration_T"] = s.duration;
    if (s.kind == SegmentKind::Driven) {
      seg["eta"] = s.eta;
      seg["psi"] = {s.psi_first, s.psi_second};
    }
    segs.push_back(seg);
  }
  j["segments"] = segs;
  return j.dump(2);
}

DrivingPattern pattern_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("schema_version").get<int>() != 1)
    throw InvalidParameter("unsupported pattern schema version");
  DrivingPattern pat;
  pat.params.omega_m = j.at("omega_m").get<double>();
  pat.params.omega_c_ratio = j.at("omega_c_ratio").get<int>();
  pat.params.k = j.at("k").get<double>();
  pat.params.space.cavity_dim = j.at("cavity_dim").get<int>();
  pat.params.space.mech_dim = j.at("mech_dim").get<int>();
  pat.block_amplitudes = j.at("block_amplitudes").get<std::vector<double>>();
  pat.ledger = ledger_from_json(j.at("ledger"));
  for (const auto& seg : j.at("segments")) {
    Segment s;
    s.kind = seg.at("kind").get<std::string>() == "driven" ? SegmentKind::Driven
                                                           : SegmentKind::Free;
    s.t_start = seg.at("t_start_T").get<double>();
    s.duration = seg.at("duration_T").get<double>();
    if (s.kind == SegmentKind::Driven) {
      s.eta = seg.at("eta").get<double>();
      const auto& psi = seg.at("psi");
      s.psi_first = psi.at(0).get<double>();
      s.psi_second = psi.at(1).get<double>();
    }
    pat.segments.push_back(s);
  }
  return pat;
}

}  // namespace optoprep
