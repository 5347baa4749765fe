#include "qmcomb/timesim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <variant>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "qmcomb/delay.hpp"
#include "qmcomb/errors.hpp"
#include "qmcomb/response.hpp"

namespace qmcomb {

using cd = std::complex<double>;

TimeGrid TimeGrid::spanning(double t0, double t_end, double dt) {
  if (!(dt > 0)) throw InvalidParameter("time grid: dt must be > 0");
  if (!(t_end > t0)) throw InvalidParameter("time grid: t_end must exceed t0");
  return {t0, dt, int(std::floor((t_end - t0) / dt + 1e-9)) + 1};
}

Waveform gaussian_pulse(double center, double sigma, double carrier_detuning, const TimeGrid& grid) {
  if (!(sigma > 0)) throw InvalidParameter("pulse: sigma must be > 0");
  if (!(grid.dt > 0) || grid.n_samples < 1) throw InvalidParameter("pulse: invalid time grid");
  Waveform w{grid.t0, grid.dt, Eigen::VectorXcd(grid.n_samples)};
  for (int i = 0; i < grid.n_samples; ++i) {
    const double t = w.time(i);
    const double x = (t - center) / sigma;
    w.samples[i] = std::exp(-0.5 * x * x) * std::polar(1.0, -carrier_detuning * t);
  }
  return w;
}

double energy(const Waveform& w) { return w.samples.squaredNorm() * w.dt; }

namespace {

void require_same_grid(const Waveform& a, const Waveform& b) {
  if (a.size() != b.size() || a.dt != b.dt || a.t0 != b.t0)
    throw InvalidParameter("waveforms must share the same time grid");
}

Eigen::VectorXd bin_frequencies(int n, double dt) {
  // exp(+2 pi i m j / n) = exp(-i nu t_j) for nu = -2 pi m / (n dt).
  Eigen::VectorXd nu(n);
  for (int m = 0; m < n; ++m) {
    const int ms = m < (n + 1) / 2 ? m : m - n;
    nu[m] = -2 * std::numbers::pi * ms / (n * dt);
  }
  return nu;
}

// Input value at the midpoint of [t_i, t_i+1] by 4-point Lagrange interpolation.
Eigen::VectorXcd midpoints(const Eigen::VectorXcd& a) {
  const Eigen::Index n = a.size();
  Eigen::VectorXcd m = Eigen::VectorXcd::Zero(std::max<Eigen::Index>(n - 1, 0));
  if (n < 4) {
    for (Eigen::Index i = 0; i + 1 < n; ++i) m[i] = 0.5 * (a[i] + a[i + 1]);
    return m;
  }
  m[0] = (5.0 * a[0] + 15.0 * a[1] - 5.0 * a[2] + a[3]) / 16.0;
  for (Eigen::Index i = 1; i + 2 < n; ++i) m[i] = (-a[i - 1] + 9.0 * a[i] + 9.0 * a[i + 1] - a[i + 2]) / 16.0;
  m[n - 2] = (a[n - 4] - 5.0 * a[n - 3] + 15.0 * a[n - 2] + 5.0 * a[n - 1]) / 16.0;
  return m;
}

// db/dt = -A b + sqrt(k) a_in (1, 0, 1); a_out = a_in - sqrt(k) (b1 + b3).
Eigen::VectorXcd integrate_block(const Block<double>& blk, const Eigen::VectorXcd& in, double dt, BlockState& state) {
  const cd i(0, 1);
  const double k = blk.k, g = blk.g, sk = std::sqrt(k);
  const double d1 = blk.center - blk.delta, d2 = blk.center, d3 = blk.center + blk.delta;
  Eigen::Matrix3cd a;
  a << i * d1 + k / 2, i * g, 0.0,
       i * g, i * d2, i * g,
       k, i * g, i * d3 + k / 2;
  const Eigen::Vector3cd drive(sk, 0.0, sk);
  auto rhs = [&](const Eigen::Vector3cd& b, cd u) -> Eigen::Vector3cd { return -a * b + drive * u; };

  const Eigen::VectorXcd mid = midpoints(in);
  Eigen::Vector3cd b(state.b1, state.b2, state.b3);
  Eigen::VectorXcd out(in.size());
  out[0] = in[0] - sk * (b[0] + b[2]);
  for (Eigen::Index n = 0; n + 1 < in.size(); ++n) {
    const Eigen::Vector3cd k1 = rhs(b, in[n]);
    const Eigen::Vector3cd k2 = rhs(b + 0.5 * dt * k1, mid[n]);
    const Eigen::Vector3cd k3 = rhs(b + 0.5 * dt * k2, mid[n]);
    const Eigen::Vector3cd k4 = rhs(b + dt * k3, in[n + 1]);
    b += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out[n + 1] = in[n + 1] - sk * (b[0] + b[2]);
  }
  state = {b[0], b[1], b[2]};
  return out;
}

Eigen::VectorXcd integrate_resonator(double detuning, double k, const Eigen::VectorXcd& in, double dt) {
  const cd i(0, 1);
  const double sk = std::sqrt(k);
  const cd a = i * detuning + k / 2;
  auto rhs = [&](cd b, cd u) { return -a * b + sk * u; };
  const Eigen::VectorXcd mid = midpoints(in);
  cd b = 0;
  Eigen::VectorXcd out(in.size());
  out[0] = in[0];
  for (Eigen::Index n = 0; n + 1 < in.size(); ++n) {
    const cd k1 = rhs(b, in[n]);
    const cd k2 = rhs(b + 0.5 * dt * k1, mid[n]);
    const cd k3 = rhs(b + 0.5 * dt * k2, mid[n]);
    const cd k4 = rhs(b + dt * k3, in[n + 1]);
    b += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out[n + 1] = in[n + 1] - sk * b;
  }
  return out;
}

}  // namespace

Eigen::MatrixX2d amplitude_spectrum(const Waveform& w) {
  Eigen::FFT<double> fft;
  Eigen::VectorXcd spec;
  fft.fwd(spec, w.samples);
  const Eigen::VectorXd nu = bin_frequencies(w.size(), w.dt);
  Eigen::MatrixX2d out(w.size(), 2);
  for (int m = 0; m < w.size(); ++m) {
    out(m, 0) = nu[m];
    out(m, 1) = std::abs(spec[m]) * w.dt;
  }
  return out;
}

Waveform ode_propagate(const Circuit<double>& circuit, const Waveform& input, std::vector<BlockState>& final_states) {
  circuit.validate();
  if (!(input.dt > 0)) throw InvalidParameter("ode: dt must be > 0");
  if (max_rate(circuit) * input.dt >= 0.1)
    throw InvalidStep("ode: max rate * dt must be < 0.1; reduce dt");
  final_states.clear();
  Eigen::VectorXcd field = input.samples;
  for (const auto& e : circuit.elements) {
    if (const auto* b = std::get_if<Block<double>>(&e)) {
      BlockState s{};
      if (b->k != 0 || b->g != 0) field = integrate_block(*b, field, input.dt, s);
      final_states.push_back(s);
    } else {
      const auto& c = std::get<Comb<double>>(e);
      if (c.k == 0) continue;
      for (double d : c.detunings) field = integrate_resonator(d, c.k, field, input.dt);
    }
  }
  return {input.t0, input.dt, field};
}

Waveform ode_propagate(const Circuit<double>& circuit, const Waveform& input) {
  std::vector<BlockState> states;
  return ode_propagate(circuit, input, states);
}

Waveform tf_propagate(const Circuit<double>& circuit, const Waveform& input) {
  circuit.validate();
  const int n = input.size();
  if (n < 2) throw InvalidParameter("tf: need at least two samples");
  Eigen::FFT<double> fft;
  Eigen::VectorXcd spec;
  fft.fwd(spec, input.samples);
  const Eigen::VectorXd nu = bin_frequencies(n, input.dt);
  const Eigen::VectorXcd s = cascade_response(circuit, nu);
  spec = spec.cwiseProduct(s);
  Eigen::VectorXcd out;
  fft.inv(out, spec);

  const double peak = out.cwiseAbs().maxCoeff();
  if (peak > 0 && (std::abs(out[0]) > 1e-4 * peak || std::abs(out[n - 1]) > 1e-4 * peak))
    throw WindowTooShort("tf: output reaches the window edges; lengthen the window");
  return {input.t0, input.dt, out};
}

double relative_l2(const Waveform& a, const Waveform& b) {
  require_same_grid(a, b);
  const double nb = b.samples.norm();
  if (nb == 0) throw InvalidParameter("relative_l2: reference waveform is zero");
  return (a.samples - b.samples).norm() / nb;
}

StorageMetrics storage_metrics(const Waveform& input, const Waveform& output) {
  require_same_grid(input, output);
  const double e_in = input.samples.squaredNorm();
  if (e_in == 0) throw InvalidParameter("metrics: input has zero energy");
  const double e_out = output.samples.squaredNorm();

  StorageMetrics m;
  m.efficiency = e_out / e_in;
  if (e_out == 0) return m;

  // Linear cross-correlation c[s] = sum_j conj(in[j - s]) out[j] via a zero-padded FFT.
  const int n = input.size();
  int len = 1;
  while (len < 2 * n) len <<= 1;
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(len), b = Eigen::VectorXcd::Zero(len);
  a.head(n) = input.samples;
  b.head(n) = output.samples;
  Eigen::FFT<double> fft;
  Eigen::VectorXcd fa, fb, corr;
  fft.fwd(fa, a);
  fft.fwd(fb, b);
  const Eigen::VectorXcd prod = fa.conjugate().cwiseProduct(fb);
  fft.inv(corr, prod);

  auto shift_of = [&](int idx) { return idx < len / 2 ? idx : idx - len; };
  int best = 0;
  double best_mag = -1;
  for (int idx = 0; idx < len; ++idx) {
    const int s = shift_of(idx);
    if (s <= -n || s >= n) continue;
    const double mag = std::abs(corr[idx]);
    if (mag > best_mag) {
      best_mag = mag;
      best = idx;
    }
  }
  double frac = 0;
  const double y0 = std::norm(corr[(best - 1 + len) % len]);
  const double y1 = best_mag * best_mag;
  const double y2 = std::norm(corr[(best + 1) % len]);
  const double denom = y0 - 2 * y1 + y2;
  if (denom < 0) frac = std::clamp(0.5 * (y0 - y2) / denom, -0.5, 0.5);

  m.measured_delay = (shift_of(best) + frac) * input.dt;
  m.fidelity = std::min(1.0, y1 / (e_in * e_out));
  return m;
}

double group_delay(const Circuit<double>& circuit, double nu, double h) {
  const cd sp = cascade_response(circuit, nu + h);
  const cd sm = cascade_response(circuit, nu - h);
  const cd sp2 = cascade_response(circuit, nu + 2 * h);
  const cd sm2 = cascade_response(circuit, nu - 2 * h);
  const cd s0 = cascade_response(circuit, nu);
  auto ph = [&](cd s) { return std::arg(s * std::conj(s0)); };
  return (ph(sm2) - 8 * ph(sm) + 8 * ph(sp) - ph(sp2)) / (12 * h);
}

double slowest_decay_rate(const Circuit<double>& circuit) {
  double rate = std::numeric_limits<double>::infinity();
  for (const auto& e : circuit.elements) {
    if (const auto* b = std::get_if<Block<double>>(&e)) {
      detail::Mat3c<double> a;
      detail::block_system(b->delta, b->k, b->g, 0.0, a);
      const Eigen::ComplexEigenSolver<detail::Mat3c<double>> es(a, false);
      // Modes with zero decay are dark: neither driven nor observed.
      for (int i = 0; i < 3; ++i) {
        const double re = es.eigenvalues()[i].real();
        if (re > 1e-9 * (b->k + 1)) rate = std::min(rate, re);
      }
    } else {
      rate = std::min(rate, std::get<Comb<double>>(e).k / 2);
    }
  }
  return rate;
}

double default_window_end(const Circuit<double>& circuit, const PulseSpec& pulse) {
  const double center = pulse.center < 0 ? 6 * pulse.sigma : pulse.center;
  const double rate = slowest_decay_rate(circuit);
  const double ringdown = std::isfinite(rate) ? std::log(1e6) / rate : 0.0;
  return center + 10 * std::abs(delay_at_zero(circuit)) + 6 * pulse.sigma + ringdown;
}

SimulationReport simulate(const Circuit<double>& circuit, PulseSpec pulse, double dt, double t_end) {
  circuit.validate();
  if (pulse.center < 0) pulse.center = 6 * pulse.sigma;
  if (t_end <= 0) t_end = default_window_end(circuit, pulse);
  SimulationReport r;
  r.input = gaussian_pulse(pulse.center, pulse.sigma, pulse.detuning, TimeGrid::spanning(0.0, t_end, dt));
  r.ode_output = ode_propagate(circuit, r.input);
  r.tf_output = tf_propagate(circuit, r.input);
  r.ode_metrics = storage_metrics(r.input, r.ode_output);
  r.tf_metrics = storage_metrics(r.input, r.tf_output);
  r.discrepancy = relative_l2(r.ode_output, r.tf_output);
  return r;
}

}  // namespace qmcomb
