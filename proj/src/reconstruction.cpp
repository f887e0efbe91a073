#include "setomo/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Dense>

namespace setomo {

namespace {

using MatrixXcdR = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// E(r, c) = exp(i sign q_r k_c).
Eigen::MatrixXcd phase_matrix(const ModeGrid& q, const ModeGrid& k, double sign) {
  Eigen::MatrixXcd m(q.size(), k.size());
  for (int r = 0; r < q.size(); ++r) {
    for (int c = 0; c < k.size(); ++c) m(r, c) = std::polar(1.0, sign * q.point(r) * k.point(c));
  }
  return m;
}

void require_interferometer_grids(const Field2D& kernel, const SeedProfile& seed) {
  if (!(kernel.grid_s() == kernel.grid_i())) {
    fail(ErrorKind::kInvalidArgument, "interferometric detection needs equal signal and idler grids");
  }
  if (!(kernel.grid_i() == seed.alpha.grid)) fail(ErrorKind::kInvalidArgument, "seed grid does not match the idler grid");
}

// W(a, b) = L(k_a, k_b) a*(k_a) a*(k_b) dk dk'.
MatrixXcdR seeded_weights(const Field2D& kernel, const SeedProfile& seed) {
  MatrixXcdR w(kernel.rows(), kernel.cols());
  const double area = kernel.cell_area();
  for (int a = 0; a < kernel.rows(); ++a) {
    for (int b = 0; b < kernel.cols(); ++b) {
      w(a, b) = kernel(a, b) * std::conj(seed.alpha[a]) * std::conj(seed.alpha[b]) * area;
    }
  }
  return w;
}

// s(m, n) = 2 gain sum_ab W(a, b) exp(i k_a (q_sigma_m + q_eta_n)) exp(i k_b q_sigma_m).
Field2D forward_lowgain(const MatrixXcdR& w, const ModeGrid& k_grid, double gain, const ModeGrid& grid_sigma,
                        const ModeGrid& grid_eta) {
  const Eigen::MatrixXcd e_sigma = phase_matrix(grid_sigma, k_grid, 1.0);
  const Eigen::MatrixXcd e_eta = phase_matrix(grid_eta, k_grid, 1.0);
  // V(m, a) = exp(i k_a q_sigma_m) sum_b W(a, b) exp(i k_b q_sigma_m)
  Eigen::MatrixXcd v = e_sigma * w.transpose();
  v = v.cwiseProduct(e_sigma);
  Field2D out(grid_sigma, grid_eta);
  Eigen::Map<MatrixXcdR> s(out.values().data(), out.rows(), out.cols());
  s.noalias() = (2.0 * gain) * v * e_eta.transpose();
  return out;
}

double field_norm(std::span<const cplx> v) {
  double acc = 0.0;
  for (const cplx& x : v) acc += std::norm(x);
  return std::sqrt(acc);
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 cell_engine(std::uint64_t seed, std::uint64_t cell) {
  std::uint64_t state = seed ^ (cell * 0xd1b54a32d192ed03ULL);
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
                    static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state))};
  return std::mt19937_64(seq);
}

// Half-width of the smallest interval centred on `center` holding (1 - 1e-6) of the mass.
double support_half_width(std::vector<std::pair<double, double>> dist_mass) {
  const double total = std::accumulate(dist_mass.begin(), dist_mass.end(), 0.0,
                                       [](double acc, const auto& p) { return acc + p.second; });
  if (!(total > 0.0)) return 0.0;
  std::sort(dist_mass.begin(), dist_mass.end());
  const double target = (1.0 - 1e-6) * total;
  double acc = 0.0;
  for (const auto& [d, m] : dist_mass) {
    acc += m;
    if (acc >= target) return d;
  }
  return dist_mass.back().first;
}

JointAmplitude empty_amplitude(const ModeGrid& grid) {
  return JointAmplitude{Field2D(grid, grid), 1.0, {}, true};
}

}  // namespace

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kExact:
      return "exact";
    case Provenance::kLowGain:
      return "lowgain";
    case Provenance::kExternalFile:
      return "external-file";
  }
  return "unknown";
}

Provenance provenance_from_name(const std::string& name) {
  if (name == "exact") return Provenance::kExact;
  if (name == "lowgain") return Provenance::kLowGain;
  if (name == "external-file") return Provenance::kExternalFile;
  fail(ErrorKind::kInvalidArgument, "unknown record provenance '" + name + "'");
}

void NoiseParams::validate() const {
  if (!(delta_eta >= 0.0) || !(delta_sigma >= 0.0)) {
    fail(ErrorKind::kInvalidArgument, "jitter variances must be non-negative");
  }
  if (mc_samples < 1) fail(ErrorKind::kInvalidArgument, "mc_samples must be at least 1");
}

json record_to_json(const MeasurementRecord& record) {
  json re = json::array();
  json im = json::array();
  for (int m = 0; m < record.map.rows(); ++m) {
    json row_re = json::array();
    json row_im = json::array();
    for (int n = 0; n < record.map.cols(); ++n) {
      row_re.push_back(record.map(m, n).real());
      row_im.push_back(record.map(m, n).imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  json j{{"grid_sigma", grid_to_json(record.grid_sigma())},
         {"grid_eta", grid_to_json(record.grid_eta())},
         {"re", std::move(re)},
         {"im", std::move(im)},
         {"gain_used", record.gain_used},
         {"provenance", provenance_name(record.provenance)},
         {"rng",
          {{"algorithm", record.rng_algorithm.empty() ? json(nullptr) : json(record.rng_algorithm)},
           {"seed", record.rng_seed ? json(*record.rng_seed) : json(nullptr)}}},
         {"noise",
          {{"delta_eta", record.noise.delta_eta},
           {"delta_sigma", record.noise.delta_sigma},
           {"mc_samples", record.noise.mc_samples}}}};
  if (!record.se_re.empty()) {
    j["se_re"] = record.se_re;
    j["se_im"] = record.se_im;
  }
  return j;
}

MeasurementRecord record_from_json(const json& j) {
  try {
    const ModeGrid gs = grid_from_json(j.at("grid_sigma"));
    const ModeGrid ge = grid_from_json(j.at("grid_eta"));
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (re.size() != static_cast<std::size_t>(gs.size()) || im.size() != re.size()) {
      fail(ErrorKind::kInvalidArgument, "record rows do not match grid_sigma");
    }
    MeasurementRecord r(Field2D(gs, ge));
    for (int m = 0; m < gs.size(); ++m) {
      const auto& rr = re.at(static_cast<std::size_t>(m));
      const auto& ri = im.at(static_cast<std::size_t>(m));
      if (rr.size() != static_cast<std::size_t>(ge.size()) || ri.size() != rr.size()) {
        fail(ErrorKind::kInvalidArgument, "record columns do not match grid_eta");
      }
      for (int n = 0; n < ge.size(); ++n) {
        r.map(m, n) = cplx(rr.at(static_cast<std::size_t>(n)).get<double>(),
                           ri.at(static_cast<std::size_t>(n)).get<double>());
      }
    }
    r.gain_used = j.value("gain_used", 0.0);
    r.provenance = provenance_from_name(j.value("provenance", std::string("external-file")));
    if (j.contains("rng") && j["rng"].is_object()) {
      const auto& rng = j["rng"];
      if (rng.contains("algorithm") && rng["algorithm"].is_string()) r.rng_algorithm = rng["algorithm"];
      if (rng.contains("seed") && rng["seed"].is_number()) r.rng_seed = rng["seed"].get<std::uint64_t>();
    }
    if (j.contains("noise") && j["noise"].is_object()) {
      const auto& n = j["noise"];
      r.noise.delta_eta = n.value("delta_eta", 0.0);
      r.noise.delta_sigma = n.value("delta_sigma", 0.0);
      r.noise.mc_samples = n.value("mc_samples", 0);
    }
    if (j.contains("se_re")) {
      r.se_re = j["se_re"].get<std::vector<double>>();
      r.se_im = j.at("se_im").get<std::vector<double>>();
    }
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::kInvalidArgument, std::string("malformed measurement record: ") + e.what());
  }
}

LowGainSignalMap::LowGainSignalMap(const Field2D& kernel, double gain, const SeedProfile& seed)
    : k_(kernel.grid_s().points()), gain_(gain) {
  require_interferometer_grids(kernel, seed);
  const MatrixXcdR w = seeded_weights(kernel, seed);
  weights_.assign(w.data(), w.data() + w.size());
  seed_conj_.resize(k_.size());
  for (std::size_t i = 0; i < k_.size(); ++i) seed_conj_[i] = std::conj(seed.alpha[static_cast<int>(i)]);
}

cplx LowGainSignalMap::operator()(double q_sigma, double q_eta) const {
  const std::size_t n = k_.size();
  thread_local std::vector<cplx> e1;
  thread_local std::vector<cplx> e2;
  e1.resize(n);
  e2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    e1[i] = std::polar(1.0, k_[i] * (q_sigma + q_eta));
    e2[i] = std::polar(1.0, k_[i] * q_sigma);
  }
  cplx acc{0.0, 0.0};
  for (std::size_t a = 0; a < n; ++a) {
    cplx row{0.0, 0.0};
    const cplx* w = weights_.data() + a * n;
    for (std::size_t b = 0; b < n; ++b) row += w[b] * e2[b];
    acc += row * e1[a];
  }
  return 2.0 * gain_ * acc;
}

MeasurementRecord sample_signal_map(const Field2D& kernel, double gain, const SeedProfile& seed,
                                    const ModeGrid& grid_sigma, const ModeGrid& grid_eta) {
  require_interferometer_grids(kernel, seed);
  MeasurementRecord r(forward_lowgain(seeded_weights(kernel, seed), kernel.grid_s(), gain, grid_sigma, grid_eta));
  r.gain_used = gain;
  r.provenance = Provenance::kLowGain;
  return r;
}

MeasurementRecord sample_signal_map(const SchmidtData& schmidt, double gain, const SeedProfile& seed,
                                    const ModeGrid& grid_sigma, const ModeGrid& grid_eta) {
  MeasurementRecord r(Field2D(grid_sigma, grid_eta));
  for (int m = 0; m < grid_sigma.size(); ++m) {
    for (int n = 0; n < grid_eta.size(); ++n) {
      InterferometerSettings st{grid_sigma.point(m), grid_eta.point(n), 0.0};
      const double re = interferometric_signal_exact(schmidt, gain, seed, st);
      st.quadrature_theta = 0.5 * kPi;
      const double im = interferometric_signal_exact(schmidt, gain, seed, st);
      r.map(m, n) = cplx(re, im);
    }
  }
  r.gain_used = gain;
  r.provenance = Provenance::kExact;
  return r;
}

ModeGrid dual_sigma_grid(const ModeGrid& mode_grid) { return conjugate_grid(mode_grid); }
ModeGrid dual_eta_grid(const ModeGrid& mode_grid) { return conjugate_grid(mode_grid); }

Field2D invert_kernel(const MeasurementRecord& record, const ModeGrid& grid) {
  const ModeGrid& gs = record.grid_sigma();
  const ModeGrid& ge = record.grid_eta();
  const Eigen::Map<const MatrixXcdR> s(record.map.values().data(), record.map.rows(), record.map.cols());
  const Eigen::MatrixXcd e_sigma = phase_matrix(gs, grid, -1.0);
  const Eigen::MatrixXcd e_eta = phase_matrix(ge, grid, -1.0);
  // U(m, a) = exp(-i k_a q_sigma_m) sum_n S(m, n) exp(-i k_a q_eta_n)
  Eigen::MatrixXcd u = s * e_eta;
  u = u.cwiseProduct(e_sigma);
  const double measure = gs.spacing() * ge.spacing() / (kTwoPi * kTwoPi);
  Field2D out(grid, grid);
  Eigen::Map<MatrixXcdR> r(out.values().data(), out.rows(), out.cols());
  r.noalias() = measure * u.transpose() * e_sigma;
  return out;
}

Reconstruction invert_to_modal(const MeasurementRecord& record, const SeedProfile& seed, double gain,
                               double reg_eps) {
  if (!(gain > 0.0) || !std::isfinite(gain)) fail(ErrorKind::kInvalidArgument, "inversion needs gain > 0");
  if (!(reg_eps >= 0.0)) fail(ErrorKind::kInvalidArgument, "reg_eps must be non-negative");
  const ModeGrid& grid = seed.alpha.grid;
  const Field2D raw = invert_kernel(record, grid);

  double max_amp = 0.0;
  for (const cplx& a : seed.alpha.values) max_amp = std::max(max_amp, std::abs(a));
  const double floor = reg_eps * max_amp * max_amp;

  Reconstruction out(empty_amplitude(grid), Field2D(grid, grid));
  out.mask.assign(raw.values().size(), false);
  // Below 2 pi / span no alias can land on the grid and the whole grid is recoverable.
  const double full = kTwoPi / grid.span() * (1.0 + 1e-12);
  const double dq_sigma = record.grid_sigma().spacing();
  const double dq_eta = record.grid_eta().spacing();
  const double band_sigma = dq_sigma > full ? kPi / dq_sigma : std::numeric_limits<double>::infinity();
  const double band_eta = dq_eta > full ? kPi / dq_eta : std::numeric_limits<double>::infinity();

  std::size_t masked = 0;
  std::size_t band_masked = 0;
  for (int a = 0; a < grid.size(); ++a) {
    for (int b = 0; b < grid.size(); ++b) {
      const double w = std::abs(seed.alpha[a]) * std::abs(seed.alpha[b]);
      const std::size_t idx = static_cast<std::size_t>(a) * static_cast<std::size_t>(grid.size()) + b;
      const bool in_band = std::abs(grid.point(a) - grid.center()) <= band_eta &&
                           std::abs(grid.point(a) + grid.point(b) - 2.0 * grid.center()) <= band_sigma;
      if (!in_band) {
        out.mask[idx] = true;
        ++masked;
        ++band_masked;
        continue;
      }
      if (!(w > 0.0) || w < floor) {
        out.mask[idx] = true;
        ++masked;
        continue;
      }
      out.estimate(a, b) = raw(a, b) / (2.0 * gain * std::conj(seed.alpha[a]) * std::conj(seed.alpha[b]));
    }
  }
  if (masked == out.mask.size()) fail(ErrorKind::kReconstructionFailed, "every cell is masked by the seed floor");
  out.masked_fraction = static_cast<double>(masked) / static_cast<double>(out.mask.size());
  out.band_masked_fraction = static_cast<double>(band_masked) / static_cast<double>(out.mask.size());

  const Field2D forward = forward_lowgain(seeded_weights(out.estimate, seed), grid, gain, record.grid_sigma(),
                                          record.grid_eta());
  std::vector<cplx> diff(forward.values().begin(), forward.values().end());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= record.map.values()[i];
  const double ref = field_norm(record.map.values());
  out.residual = ref > 0.0 ? field_norm(diff) / ref : field_norm(diff);

  if (!(squared_norm(out.estimate) > 0.0)) {
    fail(ErrorKind::kReconstructionFailed, "reconstructed kernel vanishes on the unmasked support");
  }
  out.jsa = normalize(out.estimate);
  out.jsa.coupling.gain = gain;
  return out;
}

double fidelity(const Field2D& a, const Field2D& b, const std::vector<bool>* mask) {
  if (!a.same_grids(b)) fail(ErrorKind::kInvalidArgument, "fidelity on mismatched grids");
  const auto va = a.values();
  const auto vb = b.values();
  if (mask != nullptr) {
    if (mask->empty()) fail(ErrorKind::kInvalidArgument, "fidelity mask is empty");
    if (mask->size() != va.size()) fail(ErrorKind::kInvalidArgument, "fidelity mask does not match kernel size");
    if (std::all_of(mask->begin(), mask->end(), [](bool m) { return m; })) {
      fail(ErrorKind::kInvalidArgument, "fidelity mask leaves no cells");
    }
  }
  cplx ab{0.0, 0.0};
  double aa = 0.0;
  double bb = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    if (mask != nullptr && (*mask)[i]) continue;
    ab += std::conj(va[i]) * vb[i];
    aa += std::norm(va[i]);
    bb += std::norm(vb[i]);
  }
  if (!(aa > 0.0) || !(bb > 0.0)) fail(ErrorKind::kInvalidArgument, "fidelity of a vanishing kernel");
  return std::min(1.0, std::norm(ab) / (aa * bb));
}

double fidelity(const JointAmplitude& a, const JointAmplitude& b, const std::vector<bool>* mask) {
  return fidelity(a.kernel, b.kernel, mask);
}

double jitter_attenuation(double k, double k_prime, const NoiseParams& noise) {
  const double s = k + k_prime;
  return std::exp(-kJitterConstant * (s * s * noise.delta_sigma + k * k * noise.delta_eta));
}

JointAmplitude apply_jitter_analytic(const JointAmplitude& jsa, const NoiseParams& noise) {
  JointAmplitude out = jsa;
  const ModeGrid& gs = jsa.kernel.grid_s();
  const ModeGrid& gi = jsa.kernel.grid_i();
  for (int a = 0; a < gs.size(); ++a) {
    for (int b = 0; b < gi.size(); ++b) out.kernel(a, b) *= jitter_attenuation(gs.point(a), gi.point(b), noise);
  }
  out.normalized = false;
  return out;
}

MeasurementRecord apply_jitter_monte_carlo(const SignalMapFn& map_fn, const NoiseParams& noise,
                                           const ModeGrid& grid_sigma, const ModeGrid& grid_eta) {
  noise.validate();
  MeasurementRecord r(Field2D(grid_sigma, grid_eta));
  const std::size_t cells = r.map.values().size();
  r.se_re.assign(cells, 0.0);
  r.se_im.assign(cells, 0.0);
  r.noise = noise;
  r.rng_algorithm = kRngAlgorithm;
  r.rng_seed = noise.rng_seed;
  r.provenance = Provenance::kLowGain;

  const double sd_sigma = std::sqrt(0.5 * noise.delta_sigma);
  const double sd_eta = std::sqrt(0.5 * noise.delta_eta);
  for (int m = 0; m < grid_sigma.size(); ++m) {
    for (int n = 0; n < grid_eta.size(); ++n) {
      const std::size_t cell = static_cast<std::size_t>(m) * static_cast<std::size_t>(grid_eta.size()) + n;
      auto engine = cell_engine(noise.rng_seed, cell);
      std::normal_distribution<double> normal(0.0, 1.0);
      // Welford accumulators, fixed order per cell.
      cplx mean{0.0, 0.0};
      double m2_re = 0.0;
      double m2_im = 0.0;
      for (int t = 1; t <= noise.mc_samples; ++t) {
        double ds = 0.0;
        double de = 0.0;
        if (sd_sigma > 0.0) ds = sd_sigma * normal(engine);
        if (sd_eta > 0.0) de = sd_eta * normal(engine);
        const cplx x = map_fn(grid_sigma.point(m) + ds, grid_eta.point(n) + de);
        const cplx delta = x - mean;
        mean += delta / static_cast<double>(t);
        const cplx delta2 = x - mean;
        m2_re += delta.real() * delta2.real();
        m2_im += delta.imag() * delta2.imag();
      }
      r.map.values()[cell] = mean;
      if (noise.mc_samples > 1) {
        const double nm = static_cast<double>(noise.mc_samples);
        r.se_re[cell] = std::sqrt(m2_re / (nm - 1.0) / nm);
        r.se_im[cell] = std::sqrt(m2_im / (nm - 1.0) / nm);
      }
    }
  }
  return r;
}

NyquistReport nyquist_check(const Field2D& kernel, const ModeGrid& grid_sigma, const ModeGrid& grid_eta,
                            const SeedProfile* seed) {
  const SeedProfile weight = seed != nullptr ? *seed : SeedProfile::flat(kernel.grid_i(), 1.0);
  require_interferometer_grids(kernel, weight);
  const ModeGrid& gs = kernel.grid_s();
  const ModeGrid& gi = kernel.grid_i();
  const double c_sum = gs.center() + gi.center();

  std::vector<std::pair<double, double>> sum_axis;
  std::vector<std::pair<double, double>> sig_axis;
  sum_axis.reserve(kernel.values().size());
  sig_axis.reserve(kernel.values().size());
  for (int a = 0; a < gs.size(); ++a) {
    for (int b = 0; b < gi.size(); ++b) {
      const double mass = std::norm(kernel(a, b) * weight.alpha[a] * weight.alpha[b]);
      sum_axis.emplace_back(std::abs(gs.point(a) + gi.point(b) - c_sum), mass);
      sig_axis.emplace_back(std::abs(gs.point(a) - gs.center()), mass);
    }
  }

  NyquistReport rep;
  rep.k_max_sigma = support_half_width(std::move(sum_axis));
  rep.k_max_eta = support_half_width(std::move(sig_axis));
  rep.required_dq_sigma = kPi / rep.k_max_sigma;
  rep.required_dq_eta = kPi / rep.k_max_eta;
  rep.sampling_ok = grid_sigma.spacing() <= rep.required_dq_sigma * (1.0 + 1e-12) &&
                    grid_eta.spacing() <= rep.required_dq_eta * (1.0 + 1e-12);

  const Field2D predicted = forward_lowgain(seeded_weights(kernel, weight), gs, 1.0, grid_sigma, grid_eta);
  double peak = 0.0;
  double edge = 0.0;
  for (int m = 0; m < predicted.rows(); ++m) {
    for (int n = 0; n < predicted.cols(); ++n) {
      const double v = std::abs(predicted(m, n));
      peak = std::max(peak, v);
      if (m == 0 || n == 0 || m == predicted.rows() - 1 || n == predicted.cols() - 1) edge = std::max(edge, v);
    }
  }
  rep.edge_ratio = peak > 0.0 ? edge / peak : 0.0;
  rep.span_ok = rep.edge_ratio <= 1e-4;
  rep.pass = rep.sampling_ok && rep.span_ok;
  return rep;
}

}  // namespace setomo
