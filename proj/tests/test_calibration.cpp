#include <doctest.h>

#include <cmath>
#include <vector>

#include "butterfly/calibration.hpp"
#include "butterfly/errors.hpp"
#include "butterfly/rng.hpp"
#include "butterfly/units.hpp"

using namespace bfm;

TEST_SUITE("calibration") {

TEST_CASE("distort") {
  const StepResponseModel model{0.1, 50.0};
  SUBCASE("A = 0 is the identity") {
    const std::vector<double> w{0.0, 0.5, 1.0, -0.25};
    const std::vector<double> out = distort(w, 2.0, StepResponseModel{0.0, 50.0});
    for (std::size_t k = 0; k < w.size(); ++k) CHECK(out[k] == w[k]);
  }
  SUBCASE("unit step overshoots then settles") {
    std::vector<double> step(501, 1.0);
    const std::vector<double> out = distort(step, 1.0, model);
    CHECK(out[0] == doctest::Approx(1.1));
    CHECK(out[500] == doctest::Approx(1.0).epsilon(1e-4));
  }
  SUBCASE("zero waveform stays zero") {
    const std::vector<double> out = distort(std::vector<double>(32, 0.0), 1.0, model);
    for (double v : out) CHECK(v == 0.0);
  }
}

TEST_CASE("predistort") {
  SUBCASE("round trip is the identity") {
    GaussianStream stream(8);
    std::vector<double> w(200);
    for (double& v : w) v = stream.next();
    const StepResponseModel model{0.35, 80.0};
    const std::vector<double> round = distort(predistort(w, 0.5, model), 0.5, model);
    for (std::size_t k = 0; k < w.size(); ++k)
      CHECK(round[k] == doctest::Approx(w[k]).epsilon(1e-12));
  }
  SUBCASE("unit step first sample divides by 1 + A") {
    const std::vector<double> out = predistort(std::vector<double>{1.0, 1.0}, 1.0,
                                               StepResponseModel{0.1, 50.0});
    CHECK(out[0] == doctest::Approx(1.0 / 1.1));
  }
  SUBCASE("|A| >= 1 is rejected") {
    CHECK_THROWS_AS(predistort(std::vector<double>{1.0}, 1.0, StepResponseModel{1.0, 50.0}),
                    argument_error);
  }
}

TEST_CASE("fit_step_response") {
  const double sensitivity = 12.0;  // MHz
  auto synthesize = [&](double a, double tau, double noise_sigma, std::uint64_t seed) {
    std::vector<double> t, phi;
    GaussianStream stream(seed);
    for (int k = 0; k <= 60; ++k) {
      const double time = 5.0 * k;
      t.push_back(time);
      double value = omega_from_mhz(sensitivity) *
                     (time + a * tau * (1.0 - std::exp(-time / tau)));
      if (noise_sigma > 0.0) value += stream.next(noise_sigma);  // additive, radians
      phi.push_back(value);
    }
    return std::pair(t, phi);
  };
  SUBCASE("noise-free round trip recovers A and tau within 1%") {
    const auto [t, phi] = synthesize(0.08, 120.0, 0.0, 0);
    const StepResponseFit fit = fit_step_response(t, phi, sensitivity);
    CHECK(fit.model.a_coef == doctest::Approx(0.08).epsilon(0.01));
    CHECK(fit.model.tau_ns == doctest::Approx(120.0).epsilon(0.01));
    CHECK(fit.residual_norm < 1e-6);
  }
  SUBCASE("A = 0 trace fits near zero") {
    const auto [t, phi] = synthesize(0.0, 100.0, 0.0, 0);
    const StepResponseFit fit = fit_step_response(t, phi, sensitivity);
    CHECK(std::abs(fit.model.a_coef) <= 0.005);
  }
  SUBCASE("1% additive noise still recovers within 5%") {
    const auto [t, phi] = synthesize(0.08, 120.0, 0.01, 4);
    const StepResponseFit fit = fit_step_response(t, phi, sensitivity);
    CHECK(fit.model.a_coef == doctest::Approx(0.08).epsilon(0.05));
    CHECK(fit.model.tau_ns == doctest::Approx(120.0).epsilon(0.05));
    CHECK(fit.covariance(0, 0) > 0.0);
  }
  SUBCASE("input validation") {
    std::vector<double> t{0, 1, 2}, phi{0, 1, 2};
    CHECK_THROWS_AS(fit_step_response(t, phi, sensitivity), argument_error);
  }
}

TEST_CASE("ramsey envelope") {
  SUBCASE("zero noise keeps the envelope at one") {
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(11, 0.0, 200.0);
    const RamseyEnvelope env = simulate_ramsey_envelope(0.0, grid, 2000, 1);
    CHECK(env.envelope.minCoeff() == doctest::Approx(1.0));
  }
  SUBCASE("matches the closed-form Gaussian at sigma_f = 1 MHz") {
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(2, 0.0, 100.0);
    const RamseyEnvelope env = simulate_ramsey_envelope(1.0, grid, 200000, 7);
    const double expected = std::exp(-0.5 * std::pow(kTwoPi * 0.1, 2));  // ~0.8211
    CHECK(env.envelope[1] == doctest::Approx(expected).epsilon(0.01));
  }
  SUBCASE("fitted rate approaches 2 pi sigma_f / sqrt(2)") {
    Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(49, 10.0, 250.0);
    const RamseyEnvelope env = simulate_ramsey_envelope(1.0, grid, 100000, 3);
    const double gamma = fit_gaussian_envelope_rate(env.t_ns, env.envelope);
    const double expected = kTwoPi * 1e-3 / std::sqrt(2.0);
    CHECK(gamma == doctest::Approx(expected).epsilon(0.03));
  }
  SUBCASE("sample floor is enforced") {
    CHECK_THROWS_AS(simulate_ramsey_envelope(1.0, Eigen::VectorXd::LinSpaced(3, 0, 10), 10, 0),
                    argument_error);
  }
}

TEST_CASE("fit_gamma_vs_flux") {
  auto synthesize = [](double gamma_i, double k, double noise, std::uint64_t seed) {
    std::vector<double> phi, gamma;
    GaussianStream stream(seed);
    for (int n = 0; n <= 20; ++n) {
      const double p = 0.002 * n;
      phi.push_back(p);
      double g = std::sqrt(gamma_i * gamma_i + k * k * p * p);
      if (noise > 0.0) g *= 1.0 + stream.next(noise);
      gamma.push_back(g);
    }
    return std::pair(phi, gamma);
  };
  SUBCASE("clean data recovers both parameters within 1%") {
    const auto [phi, gamma] = synthesize(0.1, 3.74, 0.0, 0);
    const DephasingFit fit = fit_gamma_vs_flux(phi, gamma);
    CHECK(fit.model.gamma_i_per_us == doctest::Approx(0.1).epsilon(0.01));
    CHECK(fit.model.k_mhz_per_phi0 == doctest::Approx(3.74).epsilon(0.01));
  }
  SUBCASE("gamma_i = 0 degenerates to a line through the origin") {
    const auto [phi, gamma] = synthesize(0.0, 2.5, 0.0, 0);
    const DephasingFit fit = fit_gamma_vs_flux(phi, gamma);
    CHECK(fit.model.gamma_i_per_us == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(fit.model.k_mhz_per_phi0 == doctest::Approx(2.5).epsilon(0.01));
  }
  SUBCASE("2% noise keeps the estimate within 5%") {
    const auto [phi, gamma] = synthesize(0.1, 3.74, 0.02, 12);
    const DephasingFit fit = fit_gamma_vs_flux(phi, gamma);
    CHECK(fit.model.gamma_i_per_us == doctest::Approx(0.1).epsilon(0.05));
    CHECK(fit.model.k_mhz_per_phi0 == doctest::Approx(3.74).epsilon(0.05));
  }
  SUBCASE("estimator is consistent as noise shrinks") {
    const auto [p1, g1] = synthesize(0.15, 3.0, 0.02, 5);
    const auto [p2, g2] = synthesize(0.15, 3.0, 0.002, 5);
    const double err1 = std::abs(fit_gamma_vs_flux(p1, g1).model.k_mhz_per_phi0 - 3.0);
    const double err2 = std::abs(fit_gamma_vs_flux(p2, g2).model.k_mhz_per_phi0 - 3.0);
    CHECK(err2 < err1);
  }
  SUBCASE("degenerate |Phi| data is rejected") {
    std::vector<double> phi{0.01, -0.01, 0.01}, gamma{0.2, 0.2, 0.2};
    CHECK_THROWS_AS(fit_gamma_vs_flux(phi, gamma), fit_error);
  }
}

TEST_CASE("flux_noise_sigma reproduces the calibrated table") {
  struct Row {
    double k, a, sigma;
  };
  // (k MHz/Phi0, A GHz/Phi0^2, sigma_Phi uPhi0) for the eight flux-tunable channels
  const Row rows[] = {{15.01, 24.525, 137.747}, {3.74, 27.298, 30.835}, {3.98, 27.089, 33.049},
                      {4.10, 26.153, 35.312},   {2.39, 26.086, 20.619}, {2.33, 25.783, 20.348},
                      {2.70, 25.866, 23.510},   {3.60, 24.899, 32.530}};
  for (const Row& row : rows)
    CHECK(flux_noise_sigma(row.k, row.a) ==
          doctest::Approx(row.sigma).epsilon(0.0015));
  CHECK(flux_noise_sigma(0.0, 25.0) == 0.0);
  CHECK_THROWS_AS(flux_noise_sigma(1.0, 0.0), argument_error);
}

TEST_CASE("zgate phase series") {
  const std::vector<int> counts{1, 3, 5, 7, 9, 11};
  SUBCASE("exact pi stays pi for every odd count") {
    const std::vector<double> out = zgate_phase_series(counts, kPi);
    for (double v : out) CHECK(std::abs(v) == doctest::Approx(kPi).epsilon(1e-9));
  }
  SUBCASE("zero phase extracts zero") {
    const std::vector<double> out = zgate_phase_series(counts, 0.0);
    for (double v : out) CHECK(std::abs(v) < 1e-9);
  }
  SUBCASE("slightly miscalibrated pulse converges to the folded value") {
    const double truth = kPi + 0.02;
    const double folded = truth - kTwoPi;
    const std::vector<double> out = zgate_phase_series(counts, truth);
    CHECK(out.back() == doctest::Approx(folded).epsilon(1e-9));
    for (std::size_t k = 1; k < out.size(); ++k)
      CHECK(std::abs(out[k] - folded) <= std::abs(out[k - 1] - folded) + 1e-12);
  }
  SUBCASE("even counts are rejected") {
    const std::vector<int> bad{1, 2};
    CHECK_THROWS_AS(zgate_phase_series(bad, 0.5), argument_error);
  }
}

}  // TEST_SUITE
