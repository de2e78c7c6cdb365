#include "butterfly/calibration.hpp"

#include <cmath>
#include <string>

#include "butterfly/errors.hpp"
#include "butterfly/rng.hpp"
#include "butterfly/state.hpp"
#include "butterfly/units.hpp"

namespace bfm {

namespace {

double fold_phase(double phi) {
  double x = std::fmod(phi, kTwoPi);
  if (x > kPi) x -= kTwoPi;
  if (x <= -kPi) x += kTwoPi;
  return x;
}

std::string residual_trace(const std::vector<double>& costs) {
  std::string s;
  for (double c : costs) s += (s.empty() ? "" : ", ") + std::to_string(c);
  return s;
}

}  // namespace

std::vector<double> distort(std::span<const double> waveform, double dt_ns,
                            const StepResponseModel& model) {
  if (!(dt_ns > 0.0)) throw argument_error("dt must be positive");
  if (!(model.tau_ns > 0.0)) throw argument_error("tau must be positive");
  std::vector<double> out(waveform.size());
  for (std::size_t k = 0; k < waveform.size(); ++k)
    out[k] = (1.0 + model.a_coef * std::exp(-(k * dt_ns) / model.tau_ns)) * waveform[k];
  return out;
}

std::vector<double> predistort(std::span<const double> waveform, double dt_ns,
                               const StepResponseModel& model) {
  if (!(dt_ns > 0.0)) throw argument_error("dt must be positive");
  if (!(model.tau_ns > 0.0)) throw argument_error("tau must be positive");
  if (!(std::abs(model.a_coef) < 1.0))
    throw argument_error("predistortion needs |A| < 1 for a stable inverse filter");
  std::vector<double> out(waveform.size());
  for (std::size_t k = 0; k < waveform.size(); ++k)
    out[k] = waveform[k] / (1.0 + model.a_coef * std::exp(-(k * dt_ns) / model.tau_ns));
  return out;
}

StepResponseFit fit_step_response(std::span<const double> t_ns, std::span<const double> phi_rad,
                                  double nominal_sensitivity_mhz) {
  const std::size_t n = t_ns.size();
  if (n != phi_rad.size()) throw argument_error("t and phi lengths differ");
  if (n < 10) throw argument_error("need at least 10 samples");
  for (std::size_t k = 1; k < n; ++k)
    if (!(t_ns[k] > t_ns[k - 1])) throw argument_error("times must be increasing");
  const double omega_s = omega_from_mhz(nominal_sensitivity_mhz);
  if (omega_s == 0.0) throw argument_error("nominal sensitivity must be nonzero");

  auto model_phase = [&](double a, double tau, double t) {
    return omega_s * (t + a * tau * (1.0 - std::exp(-t / tau)));
  };
  auto cost_of = [&](double a, double tau) {
    double c = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = model_phase(a, tau, t_ns[k]) - phi_rad[k];
      c += r * r;
    }
    return c;
  };

  // Initial guess: the early-time slope is omega_s (1 + A); tau from the span.
  double a = 0.0;
  {
    std::size_t k1 = 1;
    while (k1 + 1 < n && t_ns[k1] == t_ns[0]) ++k1;
    const double early = (phi_rad[k1] - phi_rad[0]) / (t_ns[k1] - t_ns[0]);
    a = std::clamp(early / omega_s - 1.0, -0.9, 0.9);
  }
  double tau = std::max((t_ns[n - 1] - t_ns[0]) / 5.0, 1.0);

  double lambda = 1e-3;
  double cost = cost_of(a, tau);
  std::vector<double> costs{cost};
  int iterations = 0;
  bool converged = false;
  Eigen::Matrix2d jtj_final = Eigen::Matrix2d::Zero();
  for (; iterations < 200; ++iterations) {
    Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
    Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
    for (std::size_t k = 0; k < n; ++k) {
      const double t = t_ns[k];
      const double decay = std::exp(-t / tau);
      const double r = model_phase(a, tau, t) - phi_rad[k];
      Eigen::Vector2d j;
      j[0] = omega_s * tau * (1.0 - decay);
      j[1] = omega_s * a * ((1.0 - decay) - (t / tau) * decay);
      jtj += j * j.transpose();
      jtr += j * r;
    }
    jtj_final = jtj;
    bool stepped = false;
    for (int attempt = 0; attempt < 25; ++attempt) {
      Eigen::Matrix2d damped = jtj;
      damped(0, 0) += lambda * (jtj(0, 0) + 1e-18);
      damped(1, 1) += lambda * (jtj(1, 1) + 1e-18);
      const Eigen::Vector2d delta = damped.ldlt().solve(-jtr);
      const double a_new = a + delta[0];
      const double tau_new = std::max(tau + delta[1], 1e-3);
      const double cost_new = cost_of(a_new, tau_new);
      if (cost_new <= cost) {
        const double step = std::abs(delta[0]) / (std::abs(a) + 1.0) +
                            std::abs(delta[1]) / (std::abs(tau) + 1.0);
        a = a_new;
        tau = tau_new;
        const bool tiny_step = step < 1e-10;
        const bool tiny_gain = cost - cost_new <= 1e-14 * (cost + 1e-30);
        cost = cost_new;
        lambda = std::max(lambda / 3.0, 1e-14);
        stepped = true;
        if (tiny_step || tiny_gain) converged = true;
        break;
      }
      lambda *= 10.0;
    }
    costs.push_back(cost);
    if (converged) break;
    if (!stepped) {
      converged = true;  // no descent direction left at machine precision
      break;
    }
  }
  if (!converged)
    throw fit_error("step-response fit did not converge; residual trace: " +
                    residual_trace(costs));

  StepResponseFit fit;
  fit.model = StepResponseModel{a, tau};
  fit.residual_norm = std::sqrt(cost);
  fit.iterations = iterations + 1;
  const double dof = static_cast<double>(n > 2 ? n - 2 : 1);
  const Eigen::Matrix2d inv = jtj_final.inverse();
  fit.covariance = inv * (cost / dof);
  return fit;
}

RamseyEnvelope simulate_ramsey_envelope(double sigma_f_mhz, const Eigen::VectorXd& t_grid_ns,
                                        int samples, std::uint64_t seed) {
  if (sigma_f_mhz < 0.0) throw argument_error("sigma_f must be non-negative");
  if (samples < 1000) throw argument_error("need at least 1000 Monte Carlo samples");
  RamseyEnvelope env;
  env.t_ns = t_grid_ns;
  env.envelope = Eigen::VectorXd::Zero(t_grid_ns.size());
  GaussianStream stream(seed);
  for (int s = 0; s < samples; ++s) {
    const double omega = omega_from_mhz(stream.next(sigma_f_mhz));
    for (Eigen::Index k = 0; k < t_grid_ns.size(); ++k)
      env.envelope[k] += std::cos(omega * t_grid_ns[k]);
  }
  env.envelope /= static_cast<double>(samples);
  return env;
}

double fit_gaussian_envelope_rate(const Eigen::VectorXd& t_ns, const Eigen::VectorXd& envelope) {
  if (t_ns.size() != envelope.size()) throw argument_error("grid and envelope lengths differ");
  double sxx = 0.0, sxy = 0.0;
  int used = 0;
  for (Eigen::Index k = 0; k < t_ns.size(); ++k) {
    if (t_ns[k] <= 0.0 || envelope[k] <= 0.05) continue;  // log blows up in the tail
    const double x = t_ns[k] * t_ns[k];
    const double y = -std::log(envelope[k]);
    sxx += x * x;
    sxy += x * y;
    ++used;
  }
  if (used < 2) throw fit_error("not enough usable points for an envelope fit");
  return std::sqrt(std::max(sxy / sxx, 0.0));
}

DephasingFit fit_gamma_vs_flux(std::span<const double> phi_phi0,
                               std::span<const double> gamma_per_us) {
  const std::size_t n = phi_phi0.size();
  if (n != gamma_per_us.size()) throw argument_error("data lengths differ");
  if (n < 3) throw argument_error("need at least 3 points");
  {
    const double first = std::abs(phi_phi0[0]);
    bool distinct = false;
    for (double p : phi_phi0)
      if (std::abs(std::abs(p) - first) > 1e-15) distinct = true;
    if (!distinct) throw fit_error("degenerate data: all points share the same |Phi|");
  }

  // Parameters (a, b) = (gamma_i^2, k^2); linear fit in the squared domain
  // seeds the Gauss-Newton refinement in the rate domain.
  double a, b;
  {
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      mx += phi_phi0[k] * phi_phi0[k];
      my += gamma_per_us[k] * gamma_per_us[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double dx = phi_phi0[k] * phi_phi0[k] - mx;
      const double dy = gamma_per_us[k] * gamma_per_us[k] - my;
      sxx += dx * dx;
      sxy += dx * dy;
    }
    b = std::max(sxy / sxx, 0.0);
    a = std::max(my - b * mx, 0.0);
  }

  auto cost_of = [&](double pa, double pb) {
    double c = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double g = std::sqrt(std::max(pa + pb * phi_phi0[k] * phi_phi0[k], 0.0));
      const double r = g - gamma_per_us[k];
      c += r * r;
    }
    return c;
  };

  double lambda = 1e-3;
  double cost = cost_of(a, b);
  std::vector<double> costs{cost};
  int iterations = 0;
  bool converged = false;
  for (; iterations < 200; ++iterations) {
    Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
    Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
    for (std::size_t k = 0; k < n; ++k) {
      const double x = phi_phi0[k] * phi_phi0[k];
      const double g = std::sqrt(std::max(a + b * x, 1e-30));
      const double r = g - gamma_per_us[k];
      Eigen::Vector2d j;
      j[0] = 0.5 / g;
      j[1] = 0.5 * x / g;
      jtj += j * j.transpose();
      jtr += j * r;
    }
    bool stepped = false;
    for (int attempt = 0; attempt < 25; ++attempt) {
      Eigen::Matrix2d damped = jtj;
      damped(0, 0) += lambda * (jtj(0, 0) + 1e-18);
      damped(1, 1) += lambda * (jtj(1, 1) + 1e-18);
      const Eigen::Vector2d delta = damped.ldlt().solve(-jtr);
      const double a_new = std::max(a + delta[0], 0.0);
      const double b_new = std::max(b + delta[1], 0.0);
      const double cost_new = cost_of(a_new, b_new);
      if (cost_new <= cost) {
        const double step = std::abs(a_new - a) / (a + 1e-12) + std::abs(b_new - b) / (b + 1e-12);
        a = a_new;
        b = b_new;
        const bool done = step < 1e-10 || cost - cost_new <= 1e-14 * (cost + 1e-30);
        cost = cost_new;
        lambda = std::max(lambda / 3.0, 1e-14);
        stepped = true;
        if (done) converged = true;
        break;
      }
      lambda *= 10.0;
    }
    costs.push_back(cost);
    if (converged) break;
    if (!stepped) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw fit_error("dephasing fit did not converge; residual trace: " + residual_trace(costs));

  DephasingFit fit;
  fit.model.gamma_i_per_us = std::sqrt(a);
  fit.model.k_mhz_per_phi0 = std::sqrt(b);
  fit.residual_norm = std::sqrt(cost);
  fit.iterations = iterations + 1;
  return fit;
}

double flux_noise_sigma(double k_mhz_per_phi0, double a_curv_ghz_per_phi0sq) {
  if (!(a_curv_ghz_per_phi0sq > 0.0)) throw argument_error("curvature must be positive");
  // k in MHz = 1e-3 GHz; result in Phi0 scaled to micro-Phi0.
  return std::sqrt(2.0) * (k_mhz_per_phi0 * 1e-3) / (kTwoPi * a_curv_ghz_per_phi0sq) * 1e6;
}

std::vector<double> zgate_phase_series(std::span<const int> n_pulses, double phase_per_pulse) {
  if (n_pulses.empty()) throw argument_error("empty pulse-count list");
  for (int n : n_pulses)
    if (n < 1 || n % 2 == 0)
      throw argument_error("pulse counts must be odd positive integers, got " +
                           std::to_string(n));

  // One fringe: P_excited(theta) = (1 + cos(N alpha + theta))/2, sampled and
  // fitted with a single harmonic; the fit offset is fold(N alpha).
  auto fringe_offset = [&](int n_count) {
    constexpr int kThetaPoints = 24;
    double sc = 0.0, ss = 0.0, sum_c2 = 0.0, sum_s2 = 0.0;
    for (int k = 0; k < kThetaPoints; ++k) {
      const double theta = kTwoPi * k / kThetaPoints;
      StateVector s = basis_state(1, "0");
      s = apply_site_rotation(s, sigma_y(0), -kPi / 4.0);  // Ry(pi/2)
      s = apply_site_rotation(s, sigma_z(0), -0.5 * n_count * phase_per_pulse);
      s = apply_site_rotation(s, sigma_z(0), -0.5 * theta);
      s = apply_site_rotation(s, sigma_y(0), -kPi / 4.0);
      const double p1 = excited_population(s, 0) - 0.5;
      sc += p1 * std::cos(theta);
      ss += p1 * std::sin(theta);
      sum_c2 += std::cos(theta) * std::cos(theta);
      sum_s2 += std::sin(theta) * std::sin(theta);
    }
    const double a_coef = sc / sum_c2, b_coef = ss / sum_s2;
    return std::atan2(-b_coef, a_coef);
  };

  std::vector<double> extracted;
  extracted.reserve(n_pulses.size());
  double estimate = 0.0;
  for (std::size_t i = 0; i < n_pulses.size(); ++i) {
    const int count = n_pulses[i];
    const double offset = fringe_offset(count);
    if (i == 0) {
      estimate = fold_phase(offset) / count;  // branch anchor; start lists at N = 1
    } else {
      estimate += fold_phase(offset - count * estimate) / count;
    }
    estimate = fold_phase(estimate);
    extracted.push_back(estimate);
  }
  return extracted;
}

}  // namespace bfm
