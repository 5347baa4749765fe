#include "qmcomb/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qmcomb::io {

namespace {

double number(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InputError(where + ": missing \"" + key + "\"");
  if (!j.at(key).is_number()) throw InputError(where + ": \"" + key + "\" must be a number");
  return j.at(key).get<double>();
}

}  // namespace

Circuit<double> circuit_from_json(const json& j) {
  if (!j.is_object()) throw InputError("circuit: top level must be an object");
  if (j.contains("unit") && j.at("unit") != "Delta")
    throw InputError("circuit: unsupported unit (expected \"Delta\")");
  if (!j.contains("elements") || !j.at("elements").is_array()) throw InputError("circuit: missing \"elements\" array");
  Circuit<double> c;
  int idx = 0;
  for (const auto& e : j.at("elements")) {
    const std::string where = "circuit element " + std::to_string(idx++);
    if (!e.is_object() || !e.contains("type") || !e.at("type").is_string())
      throw InputError(where + ": missing \"type\"");
    const std::string type = e.at("type").get<std::string>();
    if (type == "block") {
      Block<double> b;
      b.center = e.contains("center") ? number(e, "center", where) : 0.0;
      b.delta = e.contains("delta") ? number(e, "delta", where) : 1.0;
      b.k = number(e, "k", where);
      b.g = e.contains("g") ? number(e, "g", where) : 0.0;
      c.elements.emplace_back(b);
    } else if (type == "comb") {
      Comb<double> cb;
      if (!e.contains("detunings") || !e.at("detunings").is_array()) throw InputError(where + ": missing \"detunings\"");
      for (const auto& d : e.at("detunings")) {
        if (!d.is_number()) throw InputError(where + ": detunings must be numbers");
        cb.detunings.push_back(d.get<double>());
      }
      cb.k = number(e, "k", where);
      c.elements.emplace_back(cb);
    } else {
      throw InputError(where + ": unknown type \"" + type + "\"");
    }
  }
  try {
    c.validate();
  } catch (const InvalidParameter& ex) {
    throw InputError(std::string("circuit: ") + ex.what());
  }
  return c;
}

json circuit_to_json(const Circuit<double>& c) {
  json elements = json::array();
  for (const auto& e : c.elements) {
    if (const auto* b = std::get_if<Block<double>>(&e)) {
      elements.push_back({{"type", "block"}, {"center", b->center}, {"delta", b->delta}, {"k", b->k}, {"g", b->g}});
    } else {
      const auto& cb = std::get<Comb<double>>(e);
      elements.push_back({{"type", "comb"}, {"detunings", cb.detunings}, {"k", cb.k}});
    }
  }
  return {{"unit", "Delta"}, {"elements", elements}};
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

Circuit<double> read_circuit(const std::filesystem::path& path) { return circuit_from_json(read_json(path)); }

void write_circuit(const std::filesystem::path& path, const Circuit<double>& c) {
  write_atomic(path, dump(circuit_to_json(c)));
}

SearchConfig search_config_from_json(const json& j, SearchConfig s) {
  if (!j.is_object()) throw InputError("search config: must be an object");
  auto pair = [](const json& v, const char* name) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw InputError(std::string("search config: bounds.") + name + " must be [lo, hi]");
    return std::pair<double, double>{v[0].get<double>(), v[1].get<double>()};
  };
  try {
    if (j.contains("bounds")) {
      const auto& b = j.at("bounds");
      if (b.contains("k")) s.k_bounds = pair(b.at("k"), "k");
      if (b.contains("g")) s.g_bounds = pair(b.at("g"), "g");
    }
    if (j.contains("starts")) s.starts = j.at("starts").get<int>();
    if (j.contains("tol")) s.tol = j.at("tol").get<double>();
    if (j.contains("budget")) s.budget = j.at("budget").get<long>();
    if (j.contains("seed")) s.seed = j.at("seed").get<unsigned long long>();
  } catch (const json::exception& e) {
    throw InputError(std::string("search config: ") + e.what());
  }
  return s;
}

json search_config_to_json(const SearchConfig& s) {
  return {{"bounds", {{"k", {s.k_bounds.first, s.k_bounds.second}}, {"g", {s.g_bounds.first, s.g_bounds.second}}}},
          {"starts", s.starts},
          {"tol", s.tol},
          {"budget", s.budget}};
}

json to_json(const OptimResult& r, OptimMode mode) {
  return {{"mode", to_string(mode)},
          {"k", r.k},
          {"g", r.g},
          {"objective_value", r.objective_value},
          {"spread_in_band", r.spread_in_band},
          {"n_evaluations", r.n_evaluations},
          {"converged", r.converged}};
}

json to_json(const GlueResult& r) {
  return {{"delta_shift", r.delta_shift},
          {"spread_in_band", r.spread_in_band},
          {"residual", r.residual},
          {"composite", circuit_to_json(r.composite)}};
}

json to_json(const StorageMetrics& m) {
  return {{"efficiency", m.efficiency}, {"fidelity", m.fidelity}, {"measured_delay", m.measured_delay}};
}

std::string format_number(double x) {
  if (x == 0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string response_csv(const SpectralResponse<double>& r, const DelayProfile<double>& p) {
  std::ostringstream out;
  out << "nu,re_S,im_S,phase_unwrapped,T,T_rel\n";
  for (int i = 0; i < r.grid.n_points; ++i) {
    const auto s = r.s[i];
    const double rel = p.relative[std::size_t(i)];
    out << format_number(r.grid[i]) << ',' << format_number(s.real()) << ',' << format_number(s.imag()) << ','
        << format_number(r.phase[std::size_t(i)]) << ',' << format_number(p.delay[std::size_t(i)]) << ','
        << (std::isnan(rel) ? std::string() : format_number(rel)) << '\n';
  }
  return out.str();
}

std::string waveform_csv(const Waveform& w) {
  std::ostringstream out;
  out << "t,re_a,im_a\n";
  for (int i = 0; i < w.size(); ++i)
    out << format_number(w.time(i)) << ',' << format_number(w.samples[i].real()) << ','
        << format_number(w.samples[i].imag()) << '\n';
  return out.str();
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << contents;
    if (!out) throw InputError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace qmcomb::io
