#pragma once

#include <string>

namespace p2asym {

enum class Regime { OuterI, PainleveII, PoleIII, EllipticII_inf, KuzmakIV, Oracle };

std::string regime_name(Regime r);

// Common output row of every evaluator.
struct SolutionSample {
  double t = 0.0;
  double u = 0.0;
  Regime regime = Regime::OuterI;
  double residual = 0.0;  // order-of-magnitude residual estimate
};

}  // namespace p2asym
