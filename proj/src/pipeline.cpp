#include "setomo/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "setomo/oracle.hpp"
#include "setomo/schmidt.hpp"

#ifndef SETOMO_VERSION
#define SETOMO_VERSION "0.0.0"
#endif

namespace setomo {

const char* toolkit_version() { return SETOMO_VERSION; }

namespace {

// Walks one JSON object, recording type errors and unknown keys under a dotted path.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {}

  ~ObjectReader() {
    for (const auto& [key, value] : obj_.items()) {
      if (!used_.contains(key)) errors_.push_back(where(key) + ": unknown key '" + key + "'");
    }
  }

  ObjectReader(const ObjectReader&) = delete;
  ObjectReader& operator=(const ObjectReader&) = delete;

  void read(const std::string& key, double& out) { read_with(key, out, "a number", &json::is_number); }
  void read(const std::string& key, bool& out) { read_with(key, out, "a boolean", &json::is_boolean); }
  void read(const std::string& key, std::string& out) { read_with(key, out, "a string", &json::is_string); }

  void read(const std::string& key, int& out) {
    const json* v = find(key);
    if (v == nullptr) return;
    if (!v->is_number_integer() || v->get<long long>() < INT32_MIN || v->get<long long>() > INT32_MAX) {
      errors_.push_back(where(key) + ": expected an integer");
      return;
    }
    out = v->get<int>();
  }

  void read(const std::string& key, std::uint64_t& out) {
    const json* v = find(key);
    if (v == nullptr) return;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
      errors_.push_back(where(key) + ": expected a non-negative integer");
      return;
    }
    out = v->get<std::uint64_t>();
  }

  // A number or an array of numbers.
  void read(const std::string& key, std::vector<double>& out) {
    const json* v = find(key);
    if (v == nullptr) return;
    if (v->is_number()) {
      out = {v->get<double>()};
      return;
    }
    if (!v->is_array() || v->empty() ||
        !std::all_of(v->begin(), v->end(), [](const json& x) { return x.is_number(); })) {
      errors_.push_back(where(key) + ": expected a number or a non-empty array of numbers");
      return;
    }
    out = v->get<std::vector<double>>();
  }

  void read(const std::string& key, std::optional<double>& out) {
    const json* v = find(key);
    if (v == nullptr || v->is_null()) return;
    if (!v->is_number()) {
      errors_.push_back(where(key) + ": expected a number");
      return;
    }
    out = v->get<double>();
  }

  // Object child, or nullptr if absent or of the wrong type.
  const json* child(const std::string& key) {
    const json* v = find(key);
    if (v == nullptr) return nullptr;
    if (!v->is_object()) {
      errors_.push_back(where(key) + ": expected an object");
      return nullptr;
    }
    return v;
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json* find(const std::string& key) {
    used_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  template <class T>
  void read_with(const std::string& key, T& out, const char* what, bool (json::*pred)() const noexcept) {
    const json* v = find(key);
    if (v == nullptr) return;
    if (!(v->*pred)()) {
      errors_.push_back(where(key) + ": expected " + what);
      return;
    }
    out = v->get<T>();
  }

  const json& obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

void read_grid(ObjectReader& parent, const std::string& key, GridConfig& g, std::vector<std::string>& errors) {
  if (const json* j = parent.child(key)) {
    ObjectReader r(*j, parent.where(key), errors);
    r.read("center", g.center);
    r.read("span", g.span);
    r.read("n", g.n);
  }
}

void read_optional_grid(ObjectReader& parent, const std::string& key, std::optional<GridConfig>& g,
                        std::vector<std::string>& errors) {
  if (const json* j = parent.child(key)) {
    GridConfig tmp;
    ObjectReader r(*j, parent.where(key), errors);
    r.read("center", tmp.center);
    r.read("span", tmp.span);
    r.read("n", tmp.n);
    g = tmp;
  }
}

void check_grid(const GridConfig& g, const std::string& path, std::vector<std::string>& errors) {
  if (!(g.span > 0.0) || !std::isfinite(g.span)) errors.push_back(path + ".span: must be positive");
  if (!std::isfinite(g.center)) errors.push_back(path + ".center: must be finite");
  if (g.n < 2) errors.push_back(path + ".n: must be at least 2");
  if (g.n > 4096) errors.push_back(path + ".n: must be at most 4096");
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

void validate_values(const ScenarioConfig& c, std::vector<std::string>& e) {
  if (c.schema_version != kSchemaVersion) {
    e.push_back("schema_version: unsupported version " + std::to_string(c.schema_version) + " (expected " +
                std::to_string(kSchemaVersion) + ")");
  }
  check_grid(c.grid, "grid", e);

  static const std::set<std::string> jsa_types{"gaussian", "pump-phasematch", "file"};
  if (!jsa_types.contains(c.jsa.type)) e.push_back("jsa.type: unknown type '" + c.jsa.type + "'");
  if (c.jsa.type == "gaussian" && (!(c.jsa.sigma_plus > 0.0) || !(c.jsa.sigma_minus > 0.0))) {
    e.push_back("jsa: sigma_plus and sigma_minus must be positive");
  }
  if (c.jsa.type == "pump-phasematch" && (!(c.jsa.pump_sigma > 0.0) || !(c.jsa.pm_sigma > 0.0))) {
    e.push_back("jsa: pump_sigma and pm_sigma must be positive");
  }
  if (c.jsa.type == "file" && c.jsa.file.empty()) e.push_back("jsa.file: required when jsa.type is 'file'");

  if (!(c.coupling.gain >= 0.0) || !std::isfinite(c.coupling.gain)) {
    e.push_back("coupling.gain: must be >= 0 (CouplingParams invariant: gain = |chi * pump_amp| is a magnitude)");
  }
  if (c.coupling.chi && c.coupling.pump_amp &&
      std::abs(*c.coupling.chi * *c.coupling.pump_amp - c.coupling.gain) > 1e-12 * std::max(1.0, c.coupling.gain)) {
    e.push_back("coupling: chi * pump_amp must equal gain (CouplingParams invariant)");
  }

  static const std::set<std::string> seed_types{"flat", "gaussian", "point", "file"};
  if (!seed_types.contains(c.seed.type)) e.push_back("seed.type: unknown type '" + c.seed.type + "'");
  if (c.seed.type == "gaussian" && !(c.seed.sigma > 0.0)) e.push_back("seed.sigma: must be positive");
  if (c.seed.type == "file" && c.seed.file.empty()) e.push_back("seed.file: required when seed.type is 'file'");

  if (c.interferometer.grid_sigma) check_grid(*c.interferometer.grid_sigma, "interferometer.grid_sigma", e);
  if (c.interferometer.grid_eta) check_grid(*c.interferometer.grid_eta, "interferometer.grid_eta", e);

  if (c.measurement.model != "lowgain" && c.measurement.model != "exact") {
    e.push_back("measurement.model: must be 'lowgain' or 'exact'");
  }

  for (double d : c.noise.delta_sigma) {
    if (!(d >= 0.0)) e.push_back("noise.delta_sigma: values must be >= 0");
  }
  for (double d : c.noise.delta_eta) {
    if (!(d >= 0.0)) e.push_back("noise.delta_eta: values must be >= 0");
  }
  if (c.noise.mc_samples < 1) e.push_back("noise.mc_samples: must be at least 1");

  if (!(c.reg_eps >= 0.0)) e.push_back("reg_eps: must be >= 0");
  if (!(c.schmidt_tol >= 0.0) || !(c.schmidt_tol < 1.0)) e.push_back("schmidt_tol: must lie in [0, 1)");

  if (!(c.gain_sweep.gain_min > 0.0) || !(c.gain_sweep.gain_max > c.gain_sweep.gain_min)) {
    e.push_back("gain_sweep: need 0 < gain_min < gain_max");
  }
  if (c.gain_sweep.points < 2) e.push_back("gain_sweep.points: must be at least 2");

  if (c.oracle.trials < 1) e.push_back("oracle.trials: must be at least 1");
  if (c.oracle.max_modes < 2 || c.oracle.max_modes > kOracleMaxModes) {
    e.push_back("oracle.max_modes: must lie in [2, " + std::to_string(kOracleMaxModes) + "]");
  }
  if (!(c.oracle.max_gain >= 0.0)) e.push_back("oracle.max_gain: must be >= 0");
}

std::filesystem::path resolve(const ScenarioConfig& cfg, const std::string& file) {
  std::filesystem::path p(file);
  return p.is_absolute() || cfg.base_dir.empty() ? p : cfg.base_dir / p;
}

void check_input_file(const ScenarioConfig& cfg, const std::string& key, const std::string& file,
                      std::vector<std::string>& errors) {
  const auto p = resolve(cfg, file);
  std::error_code ec;
  if (!std::filesystem::is_regular_file(p, ec)) {
    errors.push_back(key + ": input file '" + p.string() + "' does not exist");
    return;
  }
  try {
    (void)read_json_file(p);
  } catch (const Error& ex) {
    errors.push_back(key + ": " + ex.what());
  }
}

json grid_config_json(const GridConfig& g) { return json{{"center", g.center}, {"span", g.span}, {"n", g.n}}; }

// ---- output rendering ----

std::string csv_table(const std::string& hash, const std::string& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out = "# setomo " + std::string(toolkit_version()) + " config_hash=" + hash + "\n";
  out += header;
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c != 0) out += ',';
      out += format_shortest(row[c]);
    }
    out += '\n';
  }
  return out;
}

json meta_block(const ScenarioConfig& cfg, const std::string& scenario) {
  return json{{"toolkit_version", toolkit_version()}, {"config_hash", config_hash(cfg)}, {"scenario", scenario}};
}

std::string json_file(json j, const ScenarioConfig& cfg, const std::string& scenario) {
  j["meta"] = meta_block(cfg, scenario);
  return dump_json(j);
}

json base_summary() {
  return json{{"fidelity", nullptr},
              {"schmidt_number", nullptr},
              {"lambdas", nullptr},
              {"masked_fraction", nullptr},
              {"gamma3_slope", nullptr}};
}

std::vector<std::vector<double>> kernel_rows(const Field2D& kernel) {
  std::vector<std::vector<double>> rows;
  rows.reserve(kernel.values().size());
  for (int a = 0; a < kernel.rows(); ++a) {
    for (int b = 0; b < kernel.cols(); ++b) {
      rows.push_back({kernel.grid_s().point(a), kernel.grid_i().point(b), kernel(a, b).real(), kernel(a, b).imag()});
    }
  }
  return rows;
}

std::vector<std::vector<double>> record_rows(const MeasurementRecord& r) {
  std::vector<std::vector<double>> rows;
  rows.reserve(r.map.values().size());
  for (int m = 0; m < r.map.rows(); ++m) {
    for (int n = 0; n < r.map.cols(); ++n) {
      rows.push_back({r.grid_sigma().point(m), r.grid_eta().point(n), r.map(m, n).real(), r.map(m, n).imag()});
    }
  }
  return rows;
}

std::pair<ModeGrid, ModeGrid> record_grids(const ScenarioConfig& cfg, const ModeGrid& mode_grid) {
  const auto& ic = cfg.interferometer;
  return {ic.grid_sigma ? make_mode_grid(*ic.grid_sigma) : dual_sigma_grid(mode_grid),
          ic.grid_eta ? make_mode_grid(*ic.grid_eta) : dual_eta_grid(mode_grid)};
}

MeasurementRecord make_record(const ScenarioConfig& cfg, const JointAmplitude& jsa, const SeedProfile& seed,
                              const ModeGrid& gs, const ModeGrid& ge) {
  const Field2D kernel = effective_kernel(jsa);
  if (cfg.measurement.model == "exact") {
    return sample_signal_map(schmidt_decompose(kernel, cfg.schmidt_tol), cfg.coupling.gain, seed, gs, ge);
  }
  return sample_signal_map(kernel, cfg.coupling.gain, seed, gs, ge);
}

json nyquist_json(const NyquistReport& n) {
  return json{{"pass", n.pass},
              {"sampling_ok", n.sampling_ok},
              {"span_ok", n.span_ok},
              {"k_max_sigma", n.k_max_sigma},
              {"k_max_eta", n.k_max_eta},
              {"required_dq_sigma", n.required_dq_sigma},
              {"required_dq_eta", n.required_dq_eta},
              {"edge_ratio", n.edge_ratio}};
}

// ---- scenarios ----

void scenario_jsa(const ScenarioConfig& cfg, ScenarioOutput& out) {
  const JointAmplitude jsa = build_jsa(cfg);
  const std::string hash = config_hash(cfg);
  out.files["jsa.json"] = json_file(joint_amplitude_to_json(jsa), cfg, "jsa");
  out.files["jsa.csv"] = csv_table(hash, "k_s,k_i,re_L,im_L", kernel_rows(jsa.kernel));
  out.summary["diagnostics"] = json{{"norm_factor", jsa.norm_factor}};
}

void scenario_schmidt(const ScenarioConfig& cfg, ScenarioOutput& out) {
  const JointAmplitude jsa = build_jsa(cfg);
  const SchmidtData s = schmidt_decompose(jsa, cfg.schmidt_tol);
  std::vector<std::vector<double>> rows;
  const auto lambdas = s.lambdas();
  for (int n = 0; n < s.rank(); ++n) {
    rows.push_back({static_cast<double>(n), lambdas[static_cast<std::size_t>(n)],
                    s.sqrt_lambdas[static_cast<std::size_t>(n)]});
  }
  out.files["schmidt.json"] = json_file(schmidt_to_json(s), cfg, "schmidt");
  out.files["schmidt_modes.csv"] = csv_table(config_hash(cfg), "n,lambda,sqrt_lambda", rows);
  out.summary["schmidt_number"] = schmidt_number(s);
  out.summary["lambdas"] = lambdas;
  out.summary["diagnostics"] = json{{"rank", s.rank()}, {"dropped_weight", s.dropped_weight}};
}

void scenario_direct(const ScenarioConfig& cfg, ScenarioOutput& out) {
  const JointAmplitude jsa = build_jsa(cfg);
  const Field2D kernel = effective_kernel(jsa);
  const SeedProfile seed = build_seed(cfg, kernel.grid_i());
  const SchmidtData s = schmidt_decompose(kernel, cfg.schmidt_tol);
  const double gain = cfg.coupling.gain;
  const auto exact = stimulated_spectrum(s, gain, seed);
  // The narrowband reference uses the seed's centre and integrated weight.
  const double center = std::clamp(cfg.seed.center, kernel.grid_i().lower(), kernel.grid_i().upper());
  const double intensity = seed.integrated_intensity();
  std::vector<std::vector<double>> rows;
  for (int k = 0; k < kernel.rows(); ++k) {
    rows.push_back({kernel.grid_s().point(k), exact[static_cast<std::size_t>(k)],
                    lowgain_stimulated_spectrum(kernel, gain, seed, k),
                    sipe_limit_spectrum(kernel, gain, center, intensity, k)});
  }
  out.files["direct.csv"] = csv_table(config_hash(cfg), "k_s,intensity_exact,intensity_lowgain,intensity_sipe", rows);
  out.summary["schmidt_number"] = schmidt_number(s);
  out.summary["lambdas"] = s.lambdas();
  out.summary["diagnostics"] =
      json{{"total_signal_photons", total_signal_photons(s, gain, seed)}, {"seed_intensity", seed.total_intensity()}};
}

void scenario_interf(const ScenarioConfig& cfg, ScenarioOutput& out) {
  const JointAmplitude jsa = build_jsa(cfg);
  const SeedProfile seed = build_seed(cfg, jsa.kernel.grid_i());
  const auto [gs, ge] = record_grids(cfg, jsa.kernel.grid_s());
  const MeasurementRecord record = make_record(cfg, jsa, seed, gs, ge);
  out.files["record.json"] = json_file(record_to_json(record), cfg, "interf");
  out.files["interf.csv"] = csv_table(config_hash(cfg), "q_sigma,q_eta,re_S,im_S", record_rows(record));
  const NyquistReport nyq = nyquist_check(effective_kernel(jsa), gs, ge, &seed);
  out.summary["diagnostics"] = json{{"nyquist", nyquist_json(nyq)}, {"provenance", provenance_name(record.provenance)}};
}

void scenario_reconstruct(const ScenarioConfig& cfg, ScenarioOutput& out) {
  const JointAmplitude jsa = build_jsa(cfg);
  const SeedProfile seed = build_seed(cfg, jsa.kernel.grid_i());
  MeasurementRecord record = [&] {
    if (!cfg.measurement.record_file.empty()) {
      MeasurementRecord r = record_from_json(read_json_file(resolve(cfg, cfg.measurement.record_file)));
      r.provenance = Provenance::kExternalFile;
      return r;
    }
    const auto [gs, ge] = record_grids(cfg, jsa.kernel.grid_s());
    return make_record(cfg, jsa, seed, gs, ge);
  }();
  const double gain = record.gain_used > 0.0 ? record.gain_used : cfg.coupling.gain;
  const NyquistReport nyq = nyquist_check(effective_kernel(jsa), record.grid_sigma(), record.grid_eta(), &seed);
  const Reconstruction rec = invert_to_modal(record, seed, gain, cfg.reg_eps);
  const Field2D truth = effective_kernel(jsa);
  const double fid = fidelity(truth, rec.jsa.kernel, &rec.mask);

  std::vector<std::vector<double>> rows;
  for (int a = 0; a < truth.rows(); ++a) {
    for (int b = 0; b < truth.cols(); ++b) {
      const std::size_t idx = static_cast<std::size_t>(a) * static_cast<std::size_t>(truth.cols()) + b;
      rows.push_back({truth.grid_s().point(a), truth.grid_i().point(b), truth(a, b).real(), truth(a, b).imag(),
                      rec.jsa.kernel(a, b).real(), rec.jsa.kernel(a, b).imag(), rec.mask[idx] ? 1.0 : 0.0});
    }
  }
  out.files["record.json"] = json_file(record_to_json(record), cfg, "reconstruct");
  out.files["reconstruction.json"] = json_file(joint_amplitude_to_json(rec.jsa), cfg, "reconstruct");
  out.files["reconstruct.csv"] =
      csv_table(config_hash(cfg), "k_s,k_i,re_true,im_true,re_rec,im_rec,masked", rows);
  out.summary["fidelity"] = fid;
  out.summary["masked_fraction"] = rec.masked_fraction;
  out.summary["diagnostics"] = json{{"residual", rec.residual},
                                    {"nyquist", nyquist_json(nyq)},
                                    {"provenance", provenance_name(record.provenance)},
                                    {"reg_eps", cfg.reg_eps}};
  if (!nyq.pass) out.summary["warnings"] = json::array({"record grids fail the sampling check"});
}

double fraction_within_3se(const MeasurementRecord& mc, const MeasurementRecord& ref) {
  std::size_t ok = 0;
  const auto a = mc.map.values();
  const auto b = ref.map.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double se = std::hypot(mc.se_re[i], mc.se_im[i]);
    if (std::abs(a[i] - b[i]) <= 3.0 * se) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(a.size());
}

void scenario_noise_sweep(const ScenarioConfig& cfg, ScenarioOutput& out) {
  const JointAmplitude jsa = build_jsa(cfg);
  const SeedProfile seed = build_seed(cfg, jsa.kernel.grid_i());
  const auto [gs, ge] = record_grids(cfg, jsa.kernel.grid_s());
  const Field2D truth = effective_kernel(jsa);
  const double gain = cfg.coupling.gain;
  std::vector<std::vector<double>> rows;
  double last_fidelity = 1.0;
  for (double ds : cfg.noise.delta_sigma) {
    for (double de : cfg.noise.delta_eta) {
      NoiseParams noise{de, ds, cfg.noise.mc_samples, cfg.rng_seed};
      JointAmplitude attenuated = apply_jitter_analytic(jsa, noise);
      const Field2D att_kernel = effective_kernel(attenuated);
      const MeasurementRecord record = sample_signal_map(att_kernel, gain, seed, gs, ge);
      const Reconstruction rec = invert_to_modal(record, seed, gain, cfg.reg_eps);
      const double fid_true = fidelity(truth, rec.jsa.kernel, &rec.mask);
      const double fid_att = fidelity(att_kernel, rec.jsa.kernel, &rec.mask);
      double mc_fraction = std::nan("");
      if (cfg.noise.monte_carlo) {
        const LowGainSignalMap map(truth, gain, seed);
        const MeasurementRecord mc = apply_jitter_monte_carlo(map, noise, gs, ge);
        mc_fraction = fraction_within_3se(mc, record);
      }
      rows.push_back({ds, de, std::sqrt(squared_norm(att_kernel)), fid_true, fid_att, mc_fraction});
      last_fidelity = fid_true;
    }
  }
  out.files["noise_sweep.csv"] = csv_table(
      config_hash(cfg), "delta_sigma,delta_eta,attenuated_norm,fidelity_vs_true,fidelity_vs_attenuated,mc_within_3se",
      rows);
  out.summary["fidelity"] = last_fidelity;
  out.summary["diagnostics"] = json{
      {"jitter_constant", kJitterConstant},
      {"jitter_note",
       "jitter density exp(-delta^2/Delta) averages exp(i k delta) to exp(-k^2 Delta/4); "
       "the attenuation uses c = 1/4, not c = 1"},
      {"rng", {{"algorithm", kRngAlgorithm}, {"seed", cfg.rng_seed}}}};
}

void scenario_gain_sweep(const ScenarioConfig& cfg, ScenarioOutput& out) {
  const JointAmplitude jsa = build_jsa(cfg);
  const SeedProfile seed = build_seed(cfg, jsa.kernel.grid_i());
  const InterferometerSettings st{cfg.interferometer.q_sigma, cfg.interferometer.q_eta, cfg.interferometer.theta};
  const GainSweepResult res = run_gain_sweep(jsa, seed, st, cfg.gain_sweep.gain_min, cfg.gain_sweep.gain_max,
                                             cfg.gain_sweep.points, cfg.schmidt_tol);
  std::vector<std::vector<double>> rows;
  for (const auto& p : res.points) rows.push_back({p.gain, p.exact, p.lowgain, p.abs_error});
  out.files["gain_sweep.csv"] = csv_table(config_hash(cfg), "gain,signal_exact,signal_lowgain,abs_error", rows);
  out.summary["gamma3_slope"] = res.slope;
}

void scenario_oracle_check(const ScenarioConfig& cfg, ScenarioOutput& out) {
  const OracleCheckResult res =
      run_oracle_check(cfg.oracle.trials, cfg.oracle.max_modes, cfg.oracle.max_gain, cfg.rng_seed);
  std::vector<std::vector<double>> rows;
  for (std::size_t t = 0; t < res.trials.size(); ++t) {
    const auto& tr = res.trials[t];
    rows.push_back({static_cast<double>(t), static_cast<double>(tr.n), tr.gain, tr.rel_spectrum, tr.rel_total,
                    tr.rel_interf});
  }
  out.files["oracle_check.csv"] =
      csv_table(config_hash(cfg), "trial,n,gain,rel_spectrum,rel_total,rel_interf", rows);
  out.summary["diagnostics"] = json{{"max_rel_deviation", res.max_rel},
                                    {"tolerance", 1e-8},
                                    {"pass", res.max_rel <= 1e-8},
                                    {"trials", cfg.oracle.trials}};
}

double rel_dev(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-12); }

}  // namespace

ConfigReport parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  ConfigReport rep;
  rep.config.base_dir = base_dir;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    rep.errors.push_back("parse error at line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                         e.what());
    return rep;
  }
  if (!doc.is_object()) {
    rep.errors.push_back("config root must be a JSON object");
    return rep;
  }
  auto& c = rep.config;
  auto& e = rep.errors;
  {
    ObjectReader root(doc, "", e);
    if (!doc.contains("schema_version")) e.push_back("schema_version: required");
    root.read("schema_version", c.schema_version);
    read_grid(root, "grid", c.grid, e);
    if (const json* j = root.child("jsa")) {
      ObjectReader r(*j, "jsa", e);
      r.read("type", c.jsa.type);
      r.read("sigma_plus", c.jsa.sigma_plus);
      r.read("sigma_minus", c.jsa.sigma_minus);
      r.read("chirp", c.jsa.chirp);
      r.read("pump_sigma", c.jsa.pump_sigma);
      r.read("pm_sigma", c.jsa.pm_sigma);
      r.read("file", c.jsa.file);
    }
    if (const json* j = root.child("coupling")) {
      ObjectReader r(*j, "coupling", e);
      r.read("gain", c.coupling.gain);
      r.read("gain_phase", c.coupling.gain_phase);
      r.read("chi", c.coupling.chi);
      r.read("pump_amp", c.coupling.pump_amp);
    }
    if (const json* j = root.child("seed")) {
      ObjectReader r(*j, "seed", e);
      r.read("type", c.seed.type);
      r.read("amplitude", c.seed.amplitude);
      r.read("phase", c.seed.phase);
      r.read("center", c.seed.center);
      r.read("sigma", c.seed.sigma);
      r.read("file", c.seed.file);
    }
    if (const json* j = root.child("interferometer")) {
      ObjectReader r(*j, "interferometer", e);
      r.read("q_sigma", c.interferometer.q_sigma);
      r.read("q_eta", c.interferometer.q_eta);
      r.read("theta", c.interferometer.theta);
      read_optional_grid(r, "grid_sigma", c.interferometer.grid_sigma, e);
      read_optional_grid(r, "grid_eta", c.interferometer.grid_eta, e);
    }
    if (const json* j = root.child("measurement")) {
      ObjectReader r(*j, "measurement", e);
      r.read("model", c.measurement.model);
      r.read("record_file", c.measurement.record_file);
    }
    if (const json* j = root.child("noise")) {
      ObjectReader r(*j, "noise", e);
      r.read("delta_sigma", c.noise.delta_sigma);
      r.read("delta_eta", c.noise.delta_eta);
      r.read("monte_carlo", c.noise.monte_carlo);
      r.read("mc_samples", c.noise.mc_samples);
    }
    root.read("reg_eps", c.reg_eps);
    root.read("schmidt_tol", c.schmidt_tol);
    if (const json* j = root.child("gain_sweep")) {
      ObjectReader r(*j, "gain_sweep", e);
      r.read("gain_min", c.gain_sweep.gain_min);
      r.read("gain_max", c.gain_sweep.gain_max);
      r.read("points", c.gain_sweep.points);
    }
    if (const json* j = root.child("oracle")) {
      ObjectReader r(*j, "oracle", e);
      r.read("trials", c.oracle.trials);
      r.read("max_modes", c.oracle.max_modes);
      r.read("max_gain", c.oracle.max_gain);
    }
    root.read("rng_seed", c.rng_seed);
    root.read("output_dir", c.output_dir);
    root.read("report_runtime", c.report_runtime);
  }
  validate_values(c, e);
  return rep;
}

ConfigReport load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ConfigReport rep;
    rep.errors.push_back("cannot open config file '" + path.string() + "'");
    return rep;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

std::vector<std::string> check_scenario(const ScenarioConfig& cfg, const std::string& scenario) {
  std::vector<std::string> errors;
  if (std::find(kScenarioNames.begin(), kScenarioNames.end(), scenario) == kScenarioNames.end()) {
    errors.push_back("unknown scenario '" + scenario + "'");
    return errors;
  }
  if (scenario != "oracle-check") {
    if (cfg.jsa.type == "file" && !cfg.jsa.file.empty()) check_input_file(cfg, "jsa.file", cfg.jsa.file, errors);
    if (scenario != "jsa" && scenario != "schmidt" && cfg.seed.type == "file" && !cfg.seed.file.empty()) {
      check_input_file(cfg, "seed.file", cfg.seed.file, errors);
    }
  }
  if (scenario == "reconstruct") {
    if (!cfg.measurement.record_file.empty()) {
      check_input_file(cfg, "measurement.record_file", cfg.measurement.record_file, errors);
    }
    if (!(cfg.coupling.gain > 0.0) && cfg.measurement.record_file.empty()) {
      errors.push_back("coupling.gain: reconstruct needs gain > 0");
    }
  }
  if ((scenario == "interf" || scenario == "reconstruct") && cfg.measurement.model == "exact" &&
      cfg.interferometer.grid_sigma && cfg.interferometer.grid_eta &&
      static_cast<long long>(cfg.interferometer.grid_sigma->n) * cfg.interferometer.grid_eta->n > 1 << 20) {
    errors.push_back("interferometer: exact record larger than 2^20 cells");
  }
  return errors;
}

json config_to_json(const ScenarioConfig& c) {
  json ic{{"q_sigma", c.interferometer.q_sigma}, {"q_eta", c.interferometer.q_eta}, {"theta", c.interferometer.theta}};
  if (c.interferometer.grid_sigma) ic["grid_sigma"] = grid_config_json(*c.interferometer.grid_sigma);
  if (c.interferometer.grid_eta) ic["grid_eta"] = grid_config_json(*c.interferometer.grid_eta);
  return json{
      {"schema_version", c.schema_version},
      {"grid", grid_config_json(c.grid)},
      {"jsa",
       {{"type", c.jsa.type},
        {"sigma_plus", c.jsa.sigma_plus},
        {"sigma_minus", c.jsa.sigma_minus},
        {"chirp", c.jsa.chirp},
        {"pump_sigma", c.jsa.pump_sigma},
        {"pm_sigma", c.jsa.pm_sigma},
        {"file", c.jsa.file}}},
      {"coupling",
       {{"gain", c.coupling.gain},
        {"gain_phase", c.coupling.gain_phase},
        {"chi", c.coupling.chi ? json(*c.coupling.chi) : json(nullptr)},
        {"pump_amp", c.coupling.pump_amp ? json(*c.coupling.pump_amp) : json(nullptr)}}},
      {"seed",
       {{"type", c.seed.type},
        {"amplitude", c.seed.amplitude},
        {"phase", c.seed.phase},
        {"center", c.seed.center},
        {"sigma", c.seed.sigma},
        {"file", c.seed.file}}},
      {"interferometer", ic},
      {"measurement", {{"model", c.measurement.model}, {"record_file", c.measurement.record_file}}},
      {"noise",
       {{"delta_sigma", c.noise.delta_sigma},
        {"delta_eta", c.noise.delta_eta},
        {"monte_carlo", c.noise.monte_carlo},
        {"mc_samples", c.noise.mc_samples}}},
      {"reg_eps", c.reg_eps},
      {"schmidt_tol", c.schmidt_tol},
      {"gain_sweep",
       {{"gain_min", c.gain_sweep.gain_min}, {"gain_max", c.gain_sweep.gain_max}, {"points", c.gain_sweep.points}}},
      {"oracle",
       {{"trials", c.oracle.trials}, {"max_modes", c.oracle.max_modes}, {"max_gain", c.oracle.max_gain}}},
      {"rng_seed", c.rng_seed},
      {"output_dir", c.output_dir},
      {"report_runtime", c.report_runtime}};
}

std::string config_hash(const ScenarioConfig& cfg) {
  const std::string canon = dump_json(config_to_json(cfg), -1);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ModeGrid make_mode_grid(const GridConfig& g) { return ModeGrid(g.center, g.span, g.n); }

JointAmplitude build_jsa(const ScenarioConfig& cfg) {
  JointAmplitude jsa = [&] {
    if (cfg.jsa.type == "file") {
      return joint_amplitude_from_json(read_json_file(resolve(cfg, cfg.jsa.file)));
    }
    const ModeGrid g = make_mode_grid(cfg.grid);
    if (cfg.jsa.type == "pump-phasematch") {
      // Sample points coincide with every k + k' of the mode grid.
      const ModeGrid sum_grid(2.0 * g.center(), (2 * g.size() - 1) * g.spacing(), 2 * g.size() - 1);
      const auto pump = PumpProfile::gaussian(sum_grid, 2.0 * g.center(), cfg.jsa.pump_sigma, cfg.jsa.chirp);
      const auto pm = PhaseMatchingFunction::gaussian_difference(g, g, cfg.jsa.pm_sigma);
      return build_jsa_pump_phasematch(pump, pm);
    }
    return gaussian_jsa(cfg.jsa.sigma_plus, cfg.jsa.sigma_minus, cfg.jsa.chirp, g, g);
  }();
  jsa.coupling.gain = cfg.coupling.gain;
  jsa.coupling.gain_phase = cfg.coupling.gain_phase;
  jsa.coupling.chi = cfg.coupling.chi;
  jsa.coupling.pump_amp = cfg.coupling.pump_amp;
  jsa.coupling.validate();
  return jsa;
}

SeedProfile build_seed(const ScenarioConfig& cfg, const ModeGrid& grid) {
  const cplx amp = std::polar(cfg.seed.amplitude, cfg.seed.phase);
  if (cfg.seed.type == "file") {
    SeedProfile s{field1d_from_json(read_json_file(resolve(cfg, cfg.seed.file)))};
    if (!(s.alpha.grid == grid)) fail(ErrorKind::kConfig, "seed.file: grid does not match the idler grid");
    return s;
  }
  if (cfg.seed.type == "gaussian") return SeedProfile::gaussian(grid, amp, cfg.seed.center, cfg.seed.sigma);
  if (cfg.seed.type == "point") return SeedProfile::point(grid, cfg.seed.center, amp);
  return SeedProfile::flat(grid, amp);
}

ScenarioOutput run_scenario(const ScenarioConfig& cfg, const std::string& scenario) {
  const auto errors = check_scenario(cfg, scenario);
  if (!errors.empty()) fail(ErrorKind::kConfig, errors.front());
  const auto start = std::chrono::steady_clock::now();
  ScenarioOutput out;
  out.summary = base_summary();
  if (scenario == "jsa") {
    scenario_jsa(cfg, out);
  } else if (scenario == "schmidt") {
    scenario_schmidt(cfg, out);
  } else if (scenario == "direct") {
    scenario_direct(cfg, out);
  } else if (scenario == "interf") {
    scenario_interf(cfg, out);
  } else if (scenario == "reconstruct") {
    scenario_reconstruct(cfg, out);
  } else if (scenario == "noise-sweep") {
    scenario_noise_sweep(cfg, out);
  } else if (scenario == "gain-sweep") {
    scenario_gain_sweep(cfg, out);
  } else {
    scenario_oracle_check(cfg, out);
  }
  if (cfg.report_runtime) {
    out.summary["runtime_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  out.files["summary.json"] = json_file(out.summary, cfg, scenario);
  return out;
}

void write_outputs(const ScenarioOutput& out, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kConfig, "cannot create output directory '" + dir.string() + "': " + ec.message());
  for (const auto& [name, text] : out.files) write_text_file(dir / name, text);
}

OracleCheckResult run_oracle_check(int trials, int max_modes, double max_gain, std::uint64_t rng_seed) {
  if (trials < 1 || max_modes < 2 || max_modes > kOracleMaxModes || !(max_gain >= 0.0)) {
    fail(ErrorKind::kInvalidArgument, "invalid oracle-check parameters");
  }
  std::mt19937_64 eng(rng_seed);
  std::uniform_int_distribution<int> modes(2, max_modes);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  OracleCheckResult res;
  for (int t = 0; t < trials; ++t) {
    OracleTrial tr;
    tr.n = modes(eng);
    const ModeGrid grid(normal(eng), 2.0 + 6.0 * unit(eng), tr.n);
    Field2D raw(grid, grid);
    for (cplx& v : raw.values()) v = cplx(normal(eng), normal(eng));
    const JointAmplitude jsa = normalize(raw);
    SeedProfile seed = SeedProfile::zero(grid);
    const double seed_scale = 0.5 + 2.5 * unit(eng);
    for (cplx& a : seed.alpha.values) a = seed_scale * cplx(normal(eng), normal(eng));
    tr.gain = max_gain * unit(eng);
    const InterferometerSettings st{4.0 * unit(eng) - 2.0, 4.0 * unit(eng) - 2.0, kTwoPi * unit(eng)};

    const SchmidtData s = schmidt_decompose(jsa.kernel);
    const auto spectrum = stimulated_spectrum(s, tr.gain, seed);
    const double total = total_signal_photons(s, tr.gain, seed);
    const double interf = interferometric_signal_exact(s, tr.gain, seed, st);

    const GaussianTransform tf = build_transform(jsa.kernel, tr.gain);
    const OracleExpectations ox = oracle_expectations(tf, seed_displacement(seed, grid.size()));
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
      tr.rel_spectrum = std::max(tr.rel_spectrum, rel_dev(spectrum[k], ox.signal_spectrum()[k]));
    }
    tr.rel_total = rel_dev(total, ox.n_total_s());
    tr.rel_interf = rel_dev(interf, ox.n_diff_interf(st));
    res.max_rel = std::max({res.max_rel, tr.rel_spectrum, tr.rel_total, tr.rel_interf});
    res.trials.push_back(tr);
  }
  return res;
}

GainSweepResult run_gain_sweep(const JointAmplitude& jsa, const SeedProfile& seed,
                               const InterferometerSettings& settings, double gain_min, double gain_max, int points,
                               double schmidt_tol) {
  if (!(gain_min > 0.0) || !(gain_max > gain_min) || points < 2) {
    fail(ErrorKind::kInvalidArgument, "gain sweep needs 0 < gain_min < gain_max and at least 2 points");
  }
  const Field2D kernel = effective_kernel(jsa);
  const SchmidtData s = schmidt_decompose(kernel, schmidt_tol);
  GainSweepResult res;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int used = 0;
  for (int p = 0; p < points; ++p) {
    const double g = gain_min * std::pow(gain_max / gain_min, static_cast<double>(p) / (points - 1));
    GainSweepPoint pt;
    pt.gain = g;
    pt.exact = interferometric_signal_exact(s, g, seed, settings);
    pt.lowgain = interferometric_signal_lowgain(kernel, g, seed, settings);
    pt.abs_error = std::abs(pt.exact - pt.lowgain);
    res.points.push_back(pt);
    if (pt.abs_error > 0.0) {
      const double x = std::log(g);
      const double y = std::log(pt.abs_error);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++used;
    }
  }
  if (used < 2) fail(ErrorKind::kNumeric, "gain sweep error vanished; slope undefined");
  res.slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
  return res;
}

}  // namespace setomo
