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

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rcd/cd/distribution.hpp"
#include "rcd/mest/estimating_function.hpp"
#include "rcd/models/dataset.hpp"

namespace rcd {

enum class BootVariant { basic, normal, percentile, t_boot };

const char* to_string(BootVariant v);
BootVariant boot_variant_from_string(const std::string& s);

/// Monotone increasing reparametrization h used by the t-bootstrap. The
/// inverse is found numerically when not supplied.
struct Transform {
  std::string name = "identity";
  std::function<double(double)> h;      // empty: identity
  std::function<double(double)> h_inv;  // optional

  static Transform identity() { return {}; }
  static Transform log();

  double apply(double psi) const { return h ? h(psi) : psi; }
  double invert(double v) const;
};

struct BootstrapConfig {
  std::size_t B = 1000;
  EstimatingFunction estimator = EstimatingFunction::ml_score();
  BootVariant variant = BootVariant::percentile;
  Transform transform;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double max_drop_fraction = 0.1;
};

/// Replicate estimates from the ML-fitted normal model, shared by all
/// variants.
struct BootReplicates {
  double psi_hat = 0.0;
  double tau_hat = 0.0;            // standard error of h(psi_hat)
  std::vector<double> estimates;   // psi*_b, kept replicates in replicate order
  std::vector<double> q;           // (h(psi_hat) - h(psi*_b)) / tau*_b
  std::size_t B = 0;
  std::size_t dropped = 0;
};

BootReplicates boot_replicates(const BootstrapConfig& cfg, const Dataset& d);
ConfidenceDistribution boot_cd_from(const BootReplicates& reps, BootVariant variant, const Transform& transform = {});
ConfidenceDistribution boot_cd(const BootstrapConfig& cfg, const Dataset& d);

}  // namespace rcd
