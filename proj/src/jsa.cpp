#include "setomo/jsa.hpp"

#include <cmath>
#include <string>

namespace setomo {

void CouplingParams::validate() const {
  if (!std::isfinite(gain) || gain < 0.0) {
    fail(ErrorKind::kInvalidArgument, "CouplingParams: gain must be >= 0, got " + std::to_string(gain));
  }
  if (!std::isfinite(gain_phase)) fail(ErrorKind::kInvalidArgument, "CouplingParams: gain_phase must be finite");
  if (chi && *chi < 0.0) fail(ErrorKind::kInvalidArgument, "CouplingParams: chi must be >= 0");
  if (pump_amp && *pump_amp < 0.0) fail(ErrorKind::kInvalidArgument, "CouplingParams: pump_amp must be >= 0");
  if (chi && pump_amp) {
    const double product = *chi * *pump_amp;
    if (std::abs(product - gain) > 1e-12 * std::max(1.0, gain)) {
      fail(ErrorKind::kInvalidArgument, "CouplingParams: gain must equal chi * pump_amp");
    }
  }
}

cplx PumpProfile::amplitude_at(double x) const {
  const ModeGrid& g = amplitude.grid;
  const double first = g.point(0);
  const double last = g.point(g.size() - 1);
  if (x < g.lower() || x > g.upper()) {
    fail(ErrorKind::kOutOfRange, "pump amplitude requested at " + std::to_string(x) + " outside its grid");
  }
  // Half a cell beyond the outermost samples holds the edge value.
  if (x <= first) return amplitude[0];
  if (x >= last) return amplitude[g.size() - 1];
  const double t = (x - first) / g.spacing();
  const int i = std::min(static_cast<int>(t), g.size() - 2);
  const double w = t - i;
  return (1.0 - w) * amplitude[i] + w * amplitude[i + 1];
}

PumpProfile PumpProfile::flat(const ModeGrid& grid, double chirp) {
  return PumpProfile{Field1D(grid, std::vector<cplx>(static_cast<std::size_t>(grid.size()), cplx(1.0, 0.0))),
                     chirp};
}

PumpProfile PumpProfile::gaussian(const ModeGrid& grid, double center, double sigma, double chirp) {
  if (!(sigma > 0.0)) fail(ErrorKind::kInvalidArgument, "pump width must be positive");
  Field1D amp(grid);
  for (int i = 0; i < grid.size(); ++i) {
    const double d = grid.point(i) - center;
    amp[i] = std::exp(-d * d / (4.0 * sigma * sigma));
  }
  return PumpProfile{std::move(amp), chirp};
}

PhaseMatchingFunction PhaseMatchingFunction::gaussian_difference(const ModeGrid& grid_s, const ModeGrid& grid_i,
                                                                 double sigma) {
  if (!(sigma > 0.0)) fail(ErrorKind::kInvalidArgument, "phase-matching width must be positive");
  Field2D f(grid_s, grid_i);
  for (int i = 0; i < f.rows(); ++i) {
    for (int j = 0; j < f.cols(); ++j) {
      const double d = grid_s.point(i) - grid_i.point(j);
      f(i, j) = std::exp(-d * d / (4.0 * sigma * sigma));
    }
  }
  return PhaseMatchingFunction{std::move(f)};
}

PhaseMatchingFunction PhaseMatchingFunction::separable_gaussian(const ModeGrid& grid_s, const ModeGrid& grid_i,
                                                                double sigma_s, double sigma_i) {
  if (!(sigma_s > 0.0) || !(sigma_i > 0.0)) fail(ErrorKind::kInvalidArgument, "phase-matching widths must be positive");
  Field2D f(grid_s, grid_i);
  for (int i = 0; i < f.rows(); ++i) {
    const double ks = grid_s.point(i);
    for (int j = 0; j < f.cols(); ++j) {
      const double ki = grid_i.point(j);
      f(i, j) = std::exp(-ks * ks / (4.0 * sigma_s * sigma_s) - ki * ki / (4.0 * sigma_i * sigma_i));
    }
  }
  return PhaseMatchingFunction{std::move(f)};
}

JointAmplitude normalize(const Field2D& kernel) {
  const double norm = std::sqrt(squared_norm(kernel));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    fail(ErrorKind::kDegenerateKernel, "kernel has zero (or non-finite) norm and cannot be normalized");
  }
  const double scale = 1.0 / norm;
  Field2D out = kernel;
  if (scale != 1.0) {
    for (cplx& v : out.values()) v *= scale;
  }
  return JointAmplitude{std::move(out), scale, {}, true};
}

JointAmplitude build_jsa_pump_phasematch(const PumpProfile& pump, const PhaseMatchingFunction& pm) {
  const Field2D& s = pm.values;
  Field2D raw(s.grid_s(), s.grid_i());
  for (int i = 0; i < s.rows(); ++i) {
    const double ks = s.grid_s().point(i);
    for (int j = 0; j < s.cols(); ++j) {
      const double sum = ks + s.grid_i().point(j);
      raw(i, j) = pump.amplitude_at(sum) * std::polar(1.0, pump.chirp * sum * sum) * s(i, j);
    }
  }
  return normalize(raw);
}

JointAmplitude gaussian_jsa(double sigma_plus, double sigma_minus, double chirp, const ModeGrid& grid_s,
                            const ModeGrid& grid_i) {
  if (!(sigma_plus > 0.0) || !(sigma_minus > 0.0)) {
    fail(ErrorKind::kInvalidArgument, "gaussian_jsa widths must be positive");
  }
  Field2D raw(grid_s, grid_i);
  for (int i = 0; i < raw.rows(); ++i) {
    const double k = grid_s.point(i);
    for (int j = 0; j < raw.cols(); ++j) {
      const double kp = grid_i.point(j);
      const double plus = k + kp;
      const double minus = k - kp;
      const double envelope =
          std::exp(-plus * plus / (4.0 * sigma_plus * sigma_plus) - minus * minus / (4.0 * sigma_minus * sigma_minus));
      raw(i, j) = std::polar(envelope, chirp * plus * plus);
    }
  }
  return normalize(raw);
}

Field2D effective_kernel(const JointAmplitude& jsa) {
  Field2D out = jsa.kernel;
  if (jsa.coupling.gain_phase != 0.0) {
    const cplx phase = std::polar(1.0, jsa.coupling.gain_phase);
    for (cplx& v : out.values()) v *= phase;
  }
  return out;
}

json joint_amplitude_to_json(const JointAmplitude& jsa) {
  json j = field2d_to_json(jsa.kernel);
  json meta{{"norm_factor", jsa.norm_factor},
            {"gain", jsa.coupling.gain},
            {"gain_phase", jsa.coupling.gain_phase},
            {"chi", jsa.coupling.chi ? json(*jsa.coupling.chi) : json(nullptr)},
            {"pump_amp", jsa.coupling.pump_amp ? json(*jsa.coupling.pump_amp) : json(nullptr)},
            {"normalized", jsa.normalized}};
  j["metadata"] = std::move(meta);
  return j;
}

JointAmplitude joint_amplitude_from_json(const json& j) {
  JointAmplitude jsa{field2d_from_json(j), 1.0, {}, true};
  if (j.contains("metadata")) {
    const json& m = j.at("metadata");
    jsa.norm_factor = m.value("norm_factor", 1.0);
    jsa.coupling.gain = m.value("gain", 0.0);
    jsa.coupling.gain_phase = m.value("gain_phase", 0.0);
    jsa.normalized = m.value("normalized", true);
    if (m.contains("chi") && !m.at("chi").is_null()) jsa.coupling.chi = m.at("chi").get<double>();
    if (m.contains("pump_amp") && !m.at("pump_amp").is_null()) jsa.coupling.pump_amp = m.at("pump_amp").get<double>();
  }
  return jsa;
}

}  // namespace setomo
