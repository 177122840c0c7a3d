#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library routine it is meant to check.

#include <array>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ppm/parameters.hpp"
#include "ppm/rng.hpp"

namespace oracle {

using Mat = std::array<std::array<double, 2>, 2>;

inline ppm::CanonicalParams random_canonical(ppm::Rng& rng, double tau_lo = 1.0, double tau_hi = 100.0) {
  ppm::CanonicalParams c;
  c.chi = rng.uniform_open();
  c.epsilon = rng.uniform_open();
  c.eta = rng.uniform_open();
  c.xi = rng.uniform_open();
  c.tau0 = tau_lo + (tau_hi - tau_lo) * rng.uniform();
  return c;
}

// Drift and noise matrices of the linear-noise SDE written out from the
// macro rates directly (not through FluctConstants).
struct Linear {
  Mat A;  // dZ = A Z dt + B dW
  Mat Q;  // B B^T
};

inline Linear linear_system(const ppm::MacroParams& p) {
  const double ra = p.gamma_B / p.beta_AB;
  const double rb = (p.gamma_A * p.beta_AB - p.gamma_B * p.alpha_AA) / (p.alpha_AB * p.beta_AB);
  Linear out;
  out.A = {{{-p.alpha_AA * ra, -p.alpha_AB * ra}, {p.beta_AB * rb, 0.0}}};
  const double qxx = 2.0 * p.alpha_AA * ra * (1.0 - ra - rb);
  const double qyy = ra * rb * (p.beta_AB + p.alpha_AB - p.alpha_AA);
  const double qxy = -p.beta_AB * ra * rb;
  out.Q = {{{qxx, qxy}, {qxy, qyy}}};
  return out;
}

// Solve A C + C A^T + Q = 0 for symmetric C by Cramer's rule on the 3x3
// system in (c_xx, c_xy, c_yy).
inline Mat lyapunov(const Mat& A, const Mat& Q) {
  const double a = A[0][0], b = A[0][1], c = A[1][0], d = A[1][1];
  // rows: (0,0), (0,1), (1,1) entries of A C + C A^T
  const double M[3][3] = {{2 * a, 2 * b, 0}, {c, a + d, b}, {0, 2 * c, 2 * d}};
  const double rhs[3] = {-Q[0][0], -Q[0][1], -Q[1][1]};
  auto det3 = [](const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double D = det3(M);
  double x[3];
  for (int k = 0; k < 3; ++k) {
    double Mk[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) Mk[i][j] = j == k ? rhs[i] : M[i][j];
    x[k] = det3(Mk) / D;
  }
  return {{{x[0], x[1]}, {x[1], x[2]}}};
}

inline Mat mul(const Mat& x, const Mat& y) {
  Mat r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
  return r;
}

// exp(M) by scaling and squaring with a Taylor core.
inline Mat expm(Mat m) {
  double norm = 0.0;
  for (auto& row : m)
    for (double v : row) norm = std::max(norm, std::abs(v));
  int squarings = 0;
  while (norm > 0.125) {
    norm *= 0.5;
    ++squarings;
  }
  const double s = std::ldexp(1.0, -squarings);
  for (auto& row : m)
    for (double& v : row) v *= s;
  Mat result{{{1, 0}, {0, 1}}}, term = result;
  for (int k = 1; k < 20; ++k) {
    term = mul(term, m);
    for (auto& row : term)
      for (double& v : row) v /= k;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) result[i][j] += term[i][j];
  }
  for (int i = 0; i < squarings; ++i) result = mul(result, result);
  return result;
}

// Stationary E[Z(t) Z(t + tau)^T] of the linear SDE: C0 exp(A^T tau) for
// tau >= 0 and exp(A |tau|) C0 for tau < 0.
inline Mat lagged_covariance(const Linear& sys, double tau) {
  const Mat C0 = lyapunov(sys.A, sys.Q);
  if (tau >= 0.0) {
    Mat At{{{sys.A[0][0] * tau, sys.A[1][0] * tau}, {sys.A[0][1] * tau, sys.A[1][1] * tau}}};
    return mul(C0, expm(At));
  }
  const double a = -tau;
  Mat As{{{sys.A[0][0] * a, sys.A[0][1] * a}, {sys.A[1][0] * a, sys.A[1][1] * a}}};
  return mul(expm(As), C0);
}

inline double mean(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

inline double variance(std::span<const double> x) {
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / x.size();
}

inline double covariance(std::span<const double> x, std::span<const double> y) {
  const double mx = mean(x), my = mean(y);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
  return s / x.size();
}

// Standard error of the mean of a correlated series by non-overlapping batches.
inline double batch_standard_error(std::span<const double> x, std::size_t batches = 50) {
  const std::size_t len = x.size() / batches;
  std::vector<double> means;
  for (std::size_t b = 0; b < batches; ++b) means.push_back(mean(x.subspan(b * len, len)));
  return std::sqrt(variance(means) / (batches - 1));
}

inline double relative_error(double got, double want, double floor = 0.0) {
  return std::abs(got - want) / std::max(std::abs(want), floor);
}

inline std::filesystem::path scratch(const std::string& name) {
  const char* env = std::getenv("PPM_TEST_SCRATCH");
  const std::filesystem::path root = env && *env ? env : std::filesystem::temp_directory_path() / "ppm_tests";
  const auto dir = root / name;
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace oracle
