#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace bfm {

/// Single-pole step-response model V_out(t) = (1 + A e^{-t/tau}) V_in(t).
struct StepResponseModel {
  double a_coef = 0.0;  // overshoot amplitude A
  double tau_ns = 1.0;
};

struct StepResponseFit {
  StepResponseModel model;
  double residual_norm = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
  int iterations = 0;
};

/// Gamma(|Phi|) = sqrt(gamma_i^2 + (k |Phi|)^2). Units compose directly:
/// gamma in 1/us and k in MHz/Phi0 (MHz == 1/us).
struct DephasingFitModel {
  double gamma_i_per_us = 0.0;
  double k_mhz_per_phi0 = 0.0;
};

struct DephasingFit {
  DephasingFitModel model;
  double residual_norm = 0.0;
  int iterations = 0;
};

/// Inverted-parabola flux dispersion f(Phi) = -(A/2) Phi^2 + c.
struct FluxDispersion {
  double a_curv_ghz_per_phi0sq = 0.0;
  double c_ghz = 0.0;
};

/// Applies the distortion model pointwise; t is measured from waveform start.
std::vector<double> distort(std::span<const double> waveform, double dt_ns,
                            const StepResponseModel& model);

/// Inverse filter; requires |A| < 1. distort(predistort(w)) == w.
std::vector<double> predistort(std::span<const double> waveform, double dt_ns,
                               const StepResponseModel& model);

/// Fits (A, tau) to an accumulated-phase trace
///   phi(t) = 2 pi s [t + A tau (1 - e^{-t/tau})],
/// s the nominal flux-pulse sensitivity in MHz. Damped Gauss-Newton with
/// analytic Jacobian, max 200 iterations, relative step tolerance 1e-10.
StepResponseFit fit_step_response(std::span<const double> t_ns, std::span<const double> phi_rad,
                                  double nominal_sensitivity_mhz);

struct RamseyEnvelope {
  Eigen::VectorXd t_ns;
  Eigen::VectorXd envelope;
};

/// Monte Carlo Ramsey decay envelope for quasi-static Gaussian frequency
/// noise of width sigma_f (MHz): mean of cos(2 pi x t) over draws x.
RamseyEnvelope simulate_ramsey_envelope(double sigma_f_mhz, const Eigen::VectorXd& t_grid_ns,
                                        int samples, std::uint64_t seed);

/// Rate Gamma (1/ns) of a Gaussian envelope exp(-Gamma^2 t^2), by linear
/// least squares of -ln(envelope) against t^2.
double fit_gaussian_envelope_rate(const Eigen::VectorXd& t_ns, const Eigen::VectorXd& envelope);

/// Fits the quadrature-sum dephasing model to (|Phi|, Gamma) points.
DephasingFit fit_gamma_vs_flux(std::span<const double> phi_phi0,
                               std::span<const double> gamma_per_us);

/// Flux-noise amplitude sigma_Phi = sqrt(2) k / (2 pi A), returned in
/// micro-flux-quanta for k in MHz/Phi0 and A in GHz/Phi0^2.
double flux_noise_sigma(double k_mhz_per_phi0, double a_curv_ghz_per_phi0sq);

/// Ramsey calibration of the Z-pulse phase: embeds each odd pulse count N,
/// extracts the accumulated fringe offset, and refines one running
/// phase-per-pulse estimate across the list (folded to (-pi, pi]). The first
/// list entry anchors the 2pi branch, so sequences should start at N = 1.
std::vector<double> zgate_phase_series(std::span<const int> n_pulses, double phase_per_pulse);

}  // namespace bfm
