#pragma once

// Symbolic right-hand-side constants of the multilinear estimates:
//   prod_j N_j^{e_j} (log N_j)^{l_j} * gain^delta,
// where gain = N_num/N_1 + 1/N_2 and the exponents are exact rationals.
// Slack parameters (delta, eta, eps) are baked into the exponents at
// construction time and echoed back for reporting.

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "harmlab/rational.hpp"

namespace harmlab {

struct EstimateConstant {
  // 1-based spectral-parameter index j -> exponent of N_j
  std::map<int, Rational> base_exponents;
  // 1-based index j -> power of log N_j
  std::map<int, Rational> log_powers;

  // gain factor (N_num/N_1 + 1/N_2)^gain_exponent; gain_numerator_index
  // is 2 for the bilinear cases and k+1 for the multilinear ones.
  Rational gain_exponent{0};
  int gain_numerator_index = 2;

  bool epsilon_slack = false;  // an arbitrary eps > 0 appears in the exponent

  // Echo of the free parameters used to instantiate the exponents.
  Rational delta_used{0}, eta_used{0}, eps_used{0};

  Rational total_base_exponent() const {
    Rational s{0};
    for (const auto& [j, e] : base_exponents) s += e;
    return s;
  }
  Rational total_log_power() const {
    Rational s{0};
    for (const auto& [j, l] : log_powers) s += l;
    return s;
  }

  // Numeric value at concrete spectral parameters (natural log).
  // N is 1-based via N[j-1]; ignore_gain drops the gain factor.
  double evaluate(const std::vector<double>& N, bool ignore_gain = false) const {
    double v = 1.0;
    auto at = [&](int j) -> double {
      if (j < 1 || j > static_cast<int>(N.size()))
        throw std::invalid_argument("EstimateConstant::evaluate: missing N_" + std::to_string(j));
      return N[j - 1];
    };
    for (const auto& [j, e] : base_exponents) v *= std::pow(at(j), to_double(e));
    for (const auto& [j, l] : log_powers) {
      double ln = std::log(at(j));
      if (ln > 0) v *= std::pow(ln, to_double(l));
    }
    if (!ignore_gain && gain_exponent != Rational(0)) {
      double gain = at(gain_numerator_index) / at(1) + 1.0 / at(2);
      v *= std::pow(gain, to_double(gain_exponent));
    }
    return v;
  }
};

}  // namespace harmlab
