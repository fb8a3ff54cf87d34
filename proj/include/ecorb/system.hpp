#pragma once

#include <functional>
#include <memory>
#include <string>

#include "ecorb/types.hpp"

namespace ecorb {

// A regularized, scaled problem whose ejection states are (0,0,cos,sin) and
// whose collision point is the origin.
class EjectionSystem {
 public:
  virtual ~EjectionSystem() = default;
  virtual Vec4 rhs(const Vec4& z) const = 0;
  virtual double residual(const Vec4& z) const = 0;
  virtual std::string name() const = 0;
  virtual double mu() const = 0;
  // scaled energy K; C for the restricted problem follows from mu
  virtual double K() const = 0;
};

class RtbpSystem final : public EjectionSystem {
 public:
  RtbpSystem(double mu, double C);
  Vec4 rhs(const Vec4& z) const override;
  double residual(const Vec4& z) const override;
  std::string name() const override { return "rtbp"; }
  double mu() const override { return mu_; }
  double K() const override { return K_; }
  double C() const { return C_; }

 private:
  double mu_, C_, K_;
};

class HillSystem final : public EjectionSystem {
 public:
  explicit HillSystem(double K);
  Vec4 rhs(const Vec4& z) const override;
  double residual(const Vec4& z) const override;
  std::string name() const override { return "hill"; }
  double mu() const override { return 1.0; }
  double K() const override { return K_; }

 private:
  double K_;
};

// Builds the system for one value of the continuation parameter (C for the
// restricted problem, K for Hill).
using SystemFactory = std::function<std::unique_ptr<EjectionSystem>(double)>;

SystemFactory rtbp_factory(double mu);
SystemFactory hill_factory();

}  // namespace ecorb
