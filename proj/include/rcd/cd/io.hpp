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

#include <iosfwd>
#include <string>

#include "rcd/cd/curve.hpp"
#include "rcd/cd/distribution.hpp"

namespace rcd {

// Text format: one header line
//   # rcd-cd kind=<closed_form|empirical|grid> n=<size> [family=.. loc=.. scale=.. df=..]
// followed by "psi,C" rows. Empirical CDs list every sorted draw with its
// ECDF value; closed forms list a 401-point tabulation for plotting and are
// restored from the header parameters.
void write_cd(std::ostream& os, const ConfidenceDistribution& cd);
ConfidenceDistribution read_cd(std::istream& is);

void save_cd(const std::string& path, const ConfidenceDistribution& cd);
ConfidenceDistribution load_cd(const std::string& path);

/// Four-column CSV psi,C,cc,density.
void write_plot_csv(std::ostream& os, const PlotData& pd);

/// Shortest round-trip representation of a double.
std::string fmt_double(double v);

}  // namespace rcd
