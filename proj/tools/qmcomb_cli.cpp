// qmcomb: analyze, optimize, glue and simulate resonator memory circuits.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmcomb/io.hpp"
#include "qmcomb/qmcomb.hpp"

namespace fs = std::filesystem;
using namespace qmcomb;
using io::json;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kInput = 2, kNumeric = 3, kNotConverged = 4 };

std::vector<double> split_numbers(const std::string& s, char sep, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InputError(std::string("bad ") + what + " '" + s + "'");
    }
  }
  if (out.size() != expected) throw InputError(std::string("bad ") + what + " '" + s + "'");
  return out;
}

FrequencyGrid<double> parse_grid(const std::string& s) {
  const auto v = split_numbers(s, ':', 3, "--grid (expected lo:hi:n)");
  try {
    return FrequencyGrid<double>(v[0], v[1], int(v[2]));
  } catch (const InvalidParameter& e) {
    throw InputError(e.what());
  }
}

std::pair<double, double> parse_band(const std::string& s) {
  const auto v = split_numbers(s, ':', 2, "--band (expected lo:hi)");
  if (!(v[0] < v[1])) throw InputError("--band: lo must be < hi");
  return {v[0], v[1]};
}

PulseSpec parse_pulse(const std::string& s) {
  PulseSpec p;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw InputError("--pulse: expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const double value = split_numbers(item.substr(eq + 1), ',', 1, "--pulse value")[0];
    if (key == "sigma")
      p.sigma = value;
    else if (key == "center")
      p.center = value;
    else if (key == "detuning")
      p.detuning = value;
    else
      throw InputError("--pulse: unknown key '" + key + "'");
  }
  if (!(p.sigma > 0)) throw InputError("--pulse: sigma must be > 0");
  return p;
}

std::string band_label(double lo, double hi) { return "[" + io::format_number(lo) + ", " + io::format_number(hi) + "]"; }

/// Records what a command read and wrote; written last.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::map<std::string, std::string> overrides;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void write(const fs::path& path) const {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json j{{"command", command},
           {"inputs", inputs},
           {"overrides", overrides},
           {"outputs", outputs},
           {"tool_version", kVersion},
           {"wall_clock_seconds", secs}};
    io::write_atomic(path, io::dump(j));
  }
};

fs::path manifest_path_for(const fs::path& out) {
  fs::path p = out;
  p += ".manifest.json";
  return p;
}

void emit(RunManifest& m, const fs::path& path, const std::string& contents) {
  io::write_atomic(path, contents);
  m.outputs.push_back(path.string());
}

struct AnalyzeOutput {
  SpectralResponse<double> response;
  DelayProfile<double> profile;
};

AnalyzeOutput analyze_circuit(const Circuit<double>& c, const FrequencyGrid<double>& grid) {
  auto r = spectral_response(c, grid);
  auto p = delay_profile(r);
  return {std::move(r), std::move(p)};
}

void record_overrides(RunManifest& m, CLI::App* sub) {
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    std::string joined;
    for (const auto& r : opt->results()) joined += (joined.empty() ? "" : " ") + r;
    m.overrides[opt->get_name()] = joined;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model, optimize and verify multi-block resonator frequency-comb memories"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Spectral response and delay profile of a circuit file");
  std::string a_circuit, a_grid, a_band, a_out;
  analyze->add_option("--circuit", a_circuit, "Circuit JSON file")->required();
  analyze->add_option("--grid", a_grid, "Frequency grid lo:hi:n (default: 4001 points over [-4,4] or [-6,6])");
  analyze->add_option("--band", a_band, "Print the T_rel spread over lo:hi");
  analyze->add_option("--out", a_out, "Response CSV path")->required();

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Optimize a single block (partial: k; full: k and g)");
  std::string o_mode = "full", o_out, o_search;
  double o_halfwidth = 1.0;
  int o_samples = 41, o_starts = 0;
  long o_budget = 0;
  double o_tol = 0;
  unsigned long long o_seed = 0;
  optimize->add_option("--mode", o_mode, "partial | full")->check(CLI::IsMember({"partial", "full"}));
  optimize->add_option("--band-halfwidth", o_halfwidth, "Objective band half-width");
  optimize->add_option("--samples", o_samples, "Objective sample count (odd)");
  optimize->add_option("--search", o_search, "SearchConfig JSON file");
  optimize->add_option("--starts", o_starts, "Number of multistart points");
  optimize->add_option("--tol", o_tol, "Parameter tolerance");
  optimize->add_option("--budget", o_budget, "Evaluation budget");
  optimize->add_option("--seed", o_seed, "Start jitter seed (0: cell centres)");
  optimize->add_option("--out", o_out, "OptimResult JSON path")->required();

  // glue
  auto* glue = app.add_subcommand("glue", "Glue two copies of a block, or design the equidistant comb baseline");
  std::string g_circuit, g_out, g_composite, g_band = "-3:3";
  double g_k = 3.47, g_g = 0.29, g_delta = 1.0, g_halfwidth = 1.0;
  int g_comb = 0;
  glue->add_option("--circuit", g_circuit, "File holding the single block to glue");
  glue->add_option("--k", g_k, "Block waveguide coupling");
  glue->add_option("--g", g_g, "Block inter-resonator coupling");
  glue->add_option("--delta", g_delta, "Block detuning half-spread");
  glue->add_option("--band-halfwidth", g_halfwidth, "Per-block band half-width (search range is 6x this)");
  glue->add_option("--band", g_band, "Band for the composite spread lo:hi");
  glue->add_option("--comb", g_comb, "Design an N-resonator equidistant comb instead");
  glue->add_option("--out", g_out, "Result JSON path")->required();
  glue->add_option("--composite", g_composite, "Circuit file for the designed circuit (default: <out stem>_circuit.json)");

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "Time-domain ODE and transfer-function propagation of a pulse");
  std::string s_circuit, s_pulse, s_out;
  double s_dt = 0.005, s_tend = -1;
  simulate_cmd->add_option("--circuit", s_circuit, "Circuit JSON file")->required();
  simulate_cmd->add_option("--pulse", s_pulse, "sigma=S,center=C,detuning=D (default sigma=2, center=6 sigma)");
  simulate_cmd->add_option("--dt", s_dt, "Time step");
  simulate_cmd->add_option("--t-end", s_tend, "Window end (default center + 10 T(0) + 6 sigma)");
  simulate_cmd->add_option("--out", s_out, "Output prefix")->required();

  // reproduce-figures
  auto* repro = app.add_subcommand("reproduce-figures", "Run optimize, analyze and glue for the figure datasets");
  std::string r_out;
  repro->add_option("--out", r_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  RunManifest manifest;
  fs::path manifest_path;
  try {
    if (analyze->parsed()) {
      manifest.command = "analyze";
      record_overrides(manifest, analyze);
      const auto circuit = io::read_circuit(a_circuit);
      manifest.inputs.push_back(a_circuit);
      std::optional<std::pair<double, double>> band;
      if (!a_band.empty()) band = parse_band(a_band);
      const auto grid = a_grid.empty()
                            ? default_grid(circuit, band ? std::max(std::abs(band->first), std::abs(band->second)) : 0)
                            : parse_grid(a_grid);
      const auto res = analyze_circuit(circuit, grid);
      emit(manifest, a_out, io::response_csv(res.response, res.profile));
      std::cout << "T(0) = " << io::format_number(res.profile.delay_at_zero) << "\n";
      if (band)
        std::cout << "spread " << band_label(band->first, band->second) << " = "
                  << io::format_number(delay_spread(res.profile, band->first, band->second)) << "\n";
      manifest_path = manifest_path_for(a_out);
    } else if (optimize->parsed()) {
      manifest.command = "optimize";
      record_overrides(manifest, optimize);
      SearchConfig search;
      if (!o_search.empty()) {
        search = io::search_config_from_json(io::read_json(o_search));
        manifest.inputs.push_back(o_search);
      }
      if (o_starts > 0) search.starts = o_starts;
      if (o_tol > 0) search.tol = o_tol;
      if (o_budget > 0) search.budget = o_budget;
      if (optimize->count("--seed")) search.seed = o_seed;
      const ObjectiveSpec spec{o_halfwidth, o_samples};
      const OptimMode mode = parse_mode(o_mode);
      manifest_path = manifest_path_for(o_out);
      OptimResult result;
      int code = kOk;
      try {
        result = optimize_block(mode, spec, search);
      } catch (const BudgetExceeded& e) {
        result = e.best();
        code = kNotConverged;
        std::cerr << "qmcomb: " << e.what() << " (best-so-far written)\n";
      }
      emit(manifest, o_out, io::dump(io::to_json(result, mode)));
      std::cout << "k = " << io::format_number(result.k) << "\ng = " << io::format_number(result.g)
                << "\nobjective = " << io::format_number(result.objective_value) << "\nspread "
                << band_label(-spec.band_halfwidth, spec.band_halfwidth) << " = "
                << io::format_number(result.spread_in_band) << "\n";
      manifest.write(manifest_path);
      return code;
    } else if (glue->parsed()) {
      manifest.command = "glue";
      record_overrides(manifest, glue);
      const auto [lo, hi] = parse_band(g_band);
      fs::path composite_path = g_composite;
      if (composite_path.empty()) {
        composite_path = fs::path(g_out).parent_path() / (fs::path(g_out).stem().string() + "_circuit.json");
      }
      if (g_comb > 0) {
        Comb<double> comb = equidistant_comb(g_comb, 1.0);
        comb.k = curvature_flat_k(comb);
        const Circuit<double> c{comb};
        const double spread = circuit_spread(c, lo, hi);
        json j{{"design", "equidistant_comb"},
               {"n_resonators", g_comb},
               {"detunings", comb.detunings},
               {"k", comb.k},
               {"spread_in_band", spread},
               {"band", {lo, hi}}};
        emit(manifest, g_out, io::dump(j));
        emit(manifest, composite_path, io::dump(io::circuit_to_json(c)));
        std::cout << "k = " << io::format_number(comb.k) << "\nspread " << band_label(lo, hi) << " = "
                  << io::format_number(spread) << "\n";
      } else {
        Block<double> block{0, g_delta, g_k, g_g};
        if (!g_circuit.empty()) {
          const auto c = io::read_circuit(g_circuit);
          manifest.inputs.push_back(g_circuit);
          if (c.elements.size() != 1 || !std::holds_alternative<Block<double>>(c.elements[0]))
            throw InputError("glue: circuit file must hold exactly one block");
          block = std::get<Block<double>>(c.elements[0]);
        }
        if (lo != -hi) throw InputError("glue: --band must be symmetric");
        const auto r = glue_delta(block, g_halfwidth, hi);
        json j = io::to_json(r);
        j["band"] = {lo, hi};
        emit(manifest, g_out, io::dump(j));
        emit(manifest, composite_path, io::dump(io::circuit_to_json(r.composite)));
        std::cout << "delta = " << io::format_number(r.delta_shift) << "\nspread " << band_label(lo, hi) << " = "
                  << io::format_number(r.spread_in_band) << "\n";
      }
      manifest_path = manifest_path_for(g_out);
    } else if (simulate_cmd->parsed()) {
      manifest.command = "simulate";
      record_overrides(manifest, simulate_cmd);
      const auto circuit = io::read_circuit(s_circuit);
      manifest.inputs.push_back(s_circuit);
      const PulseSpec pulse = s_pulse.empty() ? PulseSpec{} : parse_pulse(s_pulse);
      const auto r = simulate(circuit, pulse, s_dt, s_tend);
      const std::string prefix = s_out;
      emit(manifest, prefix + "_input.csv", io::waveform_csv(r.input));
      emit(manifest, prefix + "_ode.csv", io::waveform_csv(r.ode_output));
      emit(manifest, prefix + "_tf.csv", io::waveform_csv(r.tf_output));
      const double tg = group_delay(circuit);
      json metrics{{"ode", io::to_json(r.ode_metrics)},
                   {"tf", io::to_json(r.tf_metrics)},
                   {"discrepancy_relative_l2", r.discrepancy},
                   {"group_delay", tg},
                   {"dt", s_dt}};
      emit(manifest, prefix + "_metrics.json", io::dump(metrics));
      std::cout << "efficiency (ode) = " << io::format_number(r.ode_metrics.efficiency)
                << "\nefficiency (tf) = " << io::format_number(r.tf_metrics.efficiency)
                << "\nfidelity (tf) = " << io::format_number(r.tf_metrics.fidelity)
                << "\nmeasured_delay (tf) = " << io::format_number(r.tf_metrics.measured_delay)
                << "\ngroup_delay = " << io::format_number(tg)
                << "\ndiscrepancy = " << io::format_number(r.discrepancy) << "\n";
      manifest_path = prefix + "_manifest.json";
    } else if (repro->parsed()) {
      manifest.command = "reproduce-figures";
      record_overrides(manifest, repro);
      const fs::path dir = r_out;
      json summary;
      auto block_circuit = [](double k, double g) { return Circuit<double>{Block<double>{0, 1, k, g}}; };
      auto write_analysis = [&](const Circuit<double>& c, const std::string& name, double band) {
        const auto res = analyze_circuit(c, default_grid(c));
        emit(manifest, dir / (name + ".csv"), io::response_csv(res.response, res.profile));
        emit(manifest, dir / (name + "_circuit.json"), io::dump(io::circuit_to_json(c)));
        return delay_spread(res.profile, -band, band);
      };

      bool converged = true;
      for (OptimMode mode : {OptimMode::partial, OptimMode::full}) {
        OptimResult r;
        try {
          r = optimize_block(mode);
        } catch (const BudgetExceeded& e) {
          r = e.best();
          converged = false;
        }
        const std::string name = "fig2_" + to_string(mode);
        emit(manifest, dir / (name + "_optim.json"), io::dump(io::to_json(r, mode)));
        summary[name] = {{"k", r.k}, {"g", r.g}, {"spread_-1_1", write_analysis(block_circuit(r.k, r.g), name, 1.0)}};
      }
      // Reference parameter sets, for comparison with the optimizer output.
      summary["fig2_reference_partial"] = {{"k", 3.17}, {"g", 0.0},
                                          {"spread_-1_1", write_analysis(block_circuit(3.17, 0.0), "fig2_reference_partial", 1.0)}};
      summary["fig2_reference_full"] = {{"k", 3.47}, {"g", 0.29},
                                       {"spread_-1_1", write_analysis(block_circuit(3.47, 0.29), "fig2_reference_full", 1.0)}};

      const auto glued = glue_delta(Block<double>{0, 1, 3.47, 0.29});
      emit(manifest, dir / "fig3_glued.json", io::dump(io::to_json(glued)));
      summary["fig3_glued"] = {{"delta", glued.delta_shift}, {"spread_-3_3", write_analysis(glued.composite, "fig3_glued", 3.0)}};

      Comb<double> comb = equidistant_comb(4, 1.0);
      comb.k = curvature_flat_k(comb);
      summary["fig3_comb"] = {{"k", comb.k}, {"detunings", comb.detunings},
                              {"spread_-3_3", write_analysis(Circuit<double>{comb}, "fig3_comb", 3.0)}};
      emit(manifest, dir / "summary.json", io::dump(summary));
      std::cout << io::dump(summary);
      manifest_path = dir / "manifest.json";
      manifest.write(manifest_path);
      return converged ? kOk : kNotConverged;
    }
    manifest.write(manifest_path);
  } catch (const InputError& e) {
    std::cerr << "qmcomb: " << e.what() << "\n";
    return kInput;
  } catch (const InvalidParameter& e) {
    std::cerr << "qmcomb: " << e.what() << "\n";
    return kInput;
  } catch (const NumericError& e) {
    std::cerr << "qmcomb: " << e.what() << "\n";
    return kNumeric;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "qmcomb: " << e.what() << "\n";
    return kInput;
  }
  return kOk;
}
