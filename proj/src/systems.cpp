#include "ecorb/system.hpp"

#include "ecorb/dynamics.hpp"
#include "ecorb/hill.hpp"

namespace ecorb {

RtbpSystem::RtbpSystem(double mu, double C) : mu_(mu), C_(C) {
  if (!(mu >= 0.0 && mu < 1.0)) throw DomainError("mu must lie in [0,1)");
  if (!(C > 3.0 * mu)) throw DomainError("C must exceed 3 mu");
  K_ = k_from_c(mu, C);
}

Vec4 RtbpSystem::rhs(const Vec4& z) const { return normalized_rhs_k(z, mu_, K_); }

double RtbpSystem::residual(const Vec4& z) const { return normalized_residual_k(z, mu_, K_); }

HillSystem::HillSystem(double K) : K_(K) {
  if (!(K > 0.0)) throw DomainError("K must be positive");
}

Vec4 HillSystem::rhs(const Vec4& z) const { return hill_scaled_rhs(z, K_); }

double HillSystem::residual(const Vec4& z) const { return hill_scaled_residual(z, K_); }

SystemFactory rtbp_factory(double mu) {
  return [mu](double C) -> std::unique_ptr<EjectionSystem> {
    return std::make_unique<RtbpSystem>(mu, C);
  };
}

SystemFactory hill_factory() {
  return [](double K) -> std::unique_ptr<EjectionSystem> { return std::make_unique<HillSystem>(K); };
}

}  // namespace ecorb
