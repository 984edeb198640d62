// Copyright 2026 The rcd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rcd/core/dist.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>

namespace rcd::dist {

namespace {
const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);
}  // namespace

double norm_pdf(double x) { return boost::math::pdf(kStdNormal, x); }

double norm_cdf(double x) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return boost::math::cdf(kStdNormal, x);
}

double norm_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return boost::math::quantile(kStdNormal, p);
}

double t_pdf(double x, double df) {
  if (std::isinf(x)) return 0.0;
  return boost::math::pdf(boost::math::students_t_distribution<double>(df), x);
}

double t_cdf(double x, double df) {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  return boost::math::cdf(boost::math::students_t_distribution<double>(df), x);
}

double t_quantile(double p, double df) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return boost::math::quantile(boost::math::students_t_distribution<double>(df), p);
}

double chisq1_cdf(double x) {
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::cdf(boost::math::chi_squared_distribution<double>(1.0), x);
}

double huber_kappa(double c) {
  if (std::isinf(c)) return 1.0;
  const double tail = 1.0 - norm_cdf(c);
  return (2.0 * norm_cdf(c) - 1.0) - 2.0 * c * norm_pdf(c) + 2.0 * c * c * tail;
}

}  // namespace rcd::dist
