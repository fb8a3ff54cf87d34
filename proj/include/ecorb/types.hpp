#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ecorb {

using Vec4 = std::array<double, 4>;

inline constexpr double pi = std::numbers::pi;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// step size underflow, step budget exhausted, degenerate events
struct PropagationError : NumericError {
  using NumericError::NumericError;
};

// Mass parameter, number of radial maxima, and the Jacobi constant.  K and L
// are derived views so that conversions cannot drift.
struct Params {
  double mu = 0.0;
  int n = 1;
  double C = 0.0;

  static Params from_C(double mu, int n, double C);
  static Params from_K(double mu, int n, double K);
  static Params from_L(double mu, int n, double L);

  double K() const;
  double L() const;
  double eps() const { return 1.0 / std::sqrt(K()); }
  double xi() const { return 1.0 / std::sqrt(L()); }
  void validate() const;
};

inline double c_from_k(double mu, double K) {
  return 3.0 * mu + K * std::pow(1.0 - mu, 2.0 / 3.0);
}

inline double k_from_c(double mu, double C) {
  return (C - 3.0 * mu) / std::pow(1.0 - mu, 2.0 / 3.0);
}

inline Params Params::from_C(double mu, int n, double C) {
  Params p{mu, n, C};
  p.validate();
  return p;
}

inline Params Params::from_K(double mu, int n, double K) {
  return from_C(mu, n, c_from_k(mu, K));
}

inline Params Params::from_L(double mu, int n, double L) {
  return from_K(mu, n, L * std::pow(double(n), 2.0 / 3.0));
}

inline double Params::K() const { return k_from_c(mu, C); }

inline double Params::L() const { return K() / std::pow(double(n), 2.0 / 3.0); }

inline void Params::validate() const {
  if (!(mu >= 0.0 && mu < 1.0))
    throw DomainError("mu must lie in [0,1); use the Hill system for mu = 1");
  if (n < 1) throw DomainError("n must be >= 1");
  if (!(C > 3.0 * mu)) throw DomainError("C must exceed 3 mu");
}

}  // namespace ecorb
