#pragma once

#include <complex>

#include <Eigen/Core>

#include "qmcomb/circuit.hpp"

namespace qmcomb {

struct TimeGrid {
  double t0 = 0;
  double dt = 0.005;
  int n_samples = 0;

  static TimeGrid spanning(double t0, double t_end, double dt);
};

/// Field amplitude a(t_i), t_i = t0 + i dt.
struct Waveform {
  double t0 = 0;
  double dt = 0.005;
  Eigen::VectorXcd samples;

  int size() const { return int(samples.size()); }
  double time(int i) const { return t0 + dt * i; }
  TimeGrid grid() const { return {t0, dt, size()}; }
};

/// Mode amplitudes of one block's resonators.
struct BlockState {
  std::complex<double> b1, b2, b3;
};

struct StorageMetrics {
  double efficiency = 0;
  double fidelity = 0;
  double measured_delay = 0;
};

/// exp(-(t - center)^2 / (2 sigma^2)) exp(-i detuning t), unit peak.
Waveform gaussian_pulse(double center, double sigma, double carrier_detuning, const TimeGrid& grid);

/// sum |a_i|^2 dt
double energy(const Waveform& w);

/// ||a - b|| / ||b|| over samples on the same grid.
double relative_l2(const Waveform& a, const Waveform& b);

/// Rows (nu_m, |A(nu_m)|) of the DFT magnitude scaled by dt, with bins
/// mapped to frequencies under the exp(-i nu t) convention.
Eigen::MatrixX2d amplitude_spectrum(const Waveform& w);

/// Fixed-step RK4 integration of the coupled-mode equations, element by
/// element along the waveguide. Resonator 3 of a block sees
/// a1(t) - sqrt(k) b1(t) at the same instant.
Waveform ode_propagate(const Circuit<double>& circuit, const Waveform& input);

/// Same, also returning the final mode amplitudes of every block element.
Waveform ode_propagate(const Circuit<double>& circuit, const Waveform& input, std::vector<BlockState>& final_states);

/// Multiply the DFT of the input by S(nu) at each bin and transform back.
Waveform tf_propagate(const Circuit<double>& circuit, const Waveform& input);

StorageMetrics storage_metrics(const Waveform& input, const Waveform& output);

/// Group delay d(phase)/d nu at nu (positive for a delaying circuit).
double group_delay(const Circuit<double>& circuit, double nu = 0, double h = 1e-4);

struct PulseSpec {
  double sigma = 2.0;
  double center = -1;  // negative: 6 sigma
  double detuning = 0.0;
};

struct SimulationReport {
  Waveform input;
  Waveform ode_output;
  Waveform tf_output;
  StorageMetrics ode_metrics;
  StorageMetrics tf_metrics;
  double discrepancy = 0;  // relative L2 of ode vs tf
};

/// Smallest nonzero decay rate of the circuit's resonator modes.
double slowest_decay_rate(const Circuit<double>& circuit);

/// Window [0, center + 10 T(0) + 6 sigma + ln(1e6) / slowest decay rate].
double default_window_end(const Circuit<double>& circuit, const PulseSpec& pulse);

SimulationReport simulate(const Circuit<double>& circuit, PulseSpec pulse, double dt = 0.005, double t_end = -1);

}  // namespace qmcomb
