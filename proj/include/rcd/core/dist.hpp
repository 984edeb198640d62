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

#pragma once

// Thin wrappers over Boost.Math for the reference laws used by pivots.

namespace rcd::dist {

double norm_pdf(double x);
double norm_cdf(double x);
double norm_quantile(double p);

double t_pdf(double x, double df);
double t_cdf(double x, double df);
double t_quantile(double p, double df);

/// Distribution function of a chi-square with one degree of freedom.
double chisq1_cdf(double x);

/// E[psi_c(Z)^2] for Z ~ N(0,1): the consistency constant of Huber's Proposal 2.
double huber_kappa(double c);

}  // namespace rcd::dist
