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

#include "rcd/app/jobs.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "rcd/bootcd/bootcd.hpp"
#include "rcd/cd/curve.hpp"
#include "rcd/cd/io.hpp"
#include "rcd/core/error.hpp"
#include "rcd/core/rng.hpp"
#include "rcd/harness/harness.hpp"
#include "rcd/models/sampler.hpp"
#include "rcd/npcd/npcd.hpp"
#include "rcd/simcd/simcd.hpp"

namespace rcd {

namespace fs = std::filesystem;

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"analyze", "simulate", "npcd", "boot", "abc"};
  return s;
}

std::string file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return fmt::format("{:016x}", h);
}

namespace {

// ---- output plumbing -------------------------------------------------------

class Outputs {
 public:
  explicit Outputs(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw IoError(fmt::format("cannot create output directory '{}'", dir));
  }

  std::ofstream open(const std::string& name) {
    std::ofstream os(dir_ / name, std::ios::binary);
    if (!os) throw IoError(fmt::format("cannot write '{}'", (dir_ / name).string()));
    files_.push_back(name);
    return os;
  }

  std::vector<std::string> files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::string num(double v) { return std::isfinite(v) ? fmt_double(v) : "NA"; }

std::string csv_text(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

// Minimal line chart.
struct Series {
  std::string name;
  std::vector<double> x, y;
};

void write_svg(std::ostream& os, const std::string& title, const std::string& ylabel, const std::vector<Series>& series) {
  constexpr double W = 640, H = 400, L = 60, R = 180, T = 30, B = 40;
  double x0 = INFINITY, x1 = -INFINITY, y0 = 0.0, y1 = -INFINITY;
  for (const Series& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
        x0 = std::min(x0, s.x[i]);
        x1 = std::max(x1, s.x[i]);
        y1 = std::max(y1, s.y[i]);
      }
  if (!(x1 > x0)) x0 -= 0.5, x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = 1.0;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02",
                                 "#a6761d", "#666666", "#1f78b4", "#b2df8a", "#fb9a99"};
  os << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
                    "font-size=\"11\">\n",
                    W, H);
  os << fmt::format("<text x=\"{}\" y=\"18\" font-size=\"13\">{}</text>\n", L, title);
  os << fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\"/>\n", L, T,
                    W - L - R, H - T - B);
  os << fmt::format("<text x=\"{}\" y=\"{}\">{:.3g}</text><text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3g}</text>\n", L,
                    H - B + 14, x0, W - R, H - B + 14, x1);
  os << fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.3g}</text><text x=\"{}\" y=\"{}\" "
                    "text-anchor=\"end\">{}</text>\n",
                    L - 4, T + 8, y1, L - 4, H - B, ylabel);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* col = colors[k % std::size(colors)];
    os << fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"", col);
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) os << fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
    os << "\"/>\n";
    os << fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", W - R + 8, T + 14 * (k + 1), col, s.name);
  }
  os << "</svg>\n";
}

// One CD per row of the summary table.
struct NamedCd {
  std::string name, file;
  std::optional<ConfidenceDistribution> cd;
  std::string error;
  double acceptance_rate = -1.0;
  bool non_monotone = false;
};

void write_cd_set(Outputs& out, const std::vector<NamedCd>& cds, const Config& cfg, const std::vector<double>& margins) {
  std::vector<double> levels = cfg.reals("estimation.levels").value_or(std::vector<double>{0.9, 0.95});
  for (double l : levels)
    if (!(l > 0.0 && l < 1.0)) throw ConfigError(fmt::format("estimation.levels: {} outside (0, 1)", l));
  const double null = cfg.real("estimation.null");

  auto summary = out.open("summary.csv");
  summary << "method,status,median,mean,mode";
  for (double l : levels) summary << fmt::format(",lo{0},hi{0}", num(l));
  summary << ",p_value_two_sided,p_value_greater";
  for (double m : margins) summary << fmt::format(",evidence_gt_{}", num(m));
  summary << ",acceptance_rate,non_monotone,error\n";

  std::vector<Series> c_series, cc_series, d_series;
  for (const NamedCd& n : cds) {
    if (!n.cd) {
      summary << n.name << ",failed,NA,NA,NA";
      for (std::size_t i = 0; i < levels.size(); ++i) summary << ",NA,NA";
      summary << ",NA,NA";
      for (std::size_t i = 0; i < margins.size(); ++i) summary << ",NA";
      summary << fmt::format(",{},{},{}\n", n.acceptance_rate >= 0 ? num(n.acceptance_rate) : "NA", n.non_monotone,
                             csv_text(n.error));
      continue;
    }
    const ConfidenceDistribution& cd = *n.cd;
    double mode = NAN;
    try {
      mode = cd.point_estimates().mode;
    } catch (const std::exception&) {
    }
    summary << fmt::format("{},ok,{},{},{}", n.name, num(cd.median()), num(cd.mean()), num(mode));
    for (double l : levels) {
      const auto [lo, hi] = cd.interval(l);
      summary << fmt::format(",{},{}", num(lo), num(hi));
    }
    summary << fmt::format(",{},{}", num(cd.p_value(null, Alternative::two_sided)), num(cd.p_value(null, Alternative::greater)));
    for (double m : margins) summary << "," << num(1.0 - cd.evaluate(m));
    summary << fmt::format(",{},{},\n", n.acceptance_rate >= 0 ? num(n.acceptance_rate) : "NA", n.non_monotone);

    {
      auto os = out.open("cd_" + n.file + ".csv");
      write_cd(os, cd);
    }
    const PlotData pd = plot_data(cd);
    {
      auto os = out.open("plot_" + n.file + ".csv");
      write_plot_csv(os, pd);
    }
    c_series.push_back({n.name, pd.psi, pd.c});
    cc_series.push_back({n.name, pd.psi, pd.cc});
    d_series.push_back({n.name, pd.psi, pd.density});
  }

  // Aligned text version of the summary.
  auto txt = out.open("summary.txt");
  std::size_t w = 8;
  for (const NamedCd& n : cds) w = std::max(w, n.name.size() + 2);
  txt << fmt::format("{:<{}}{:>10}", "Method", w, "median");
  for (double l : levels) txt << fmt::format("{:>24}", fmt::format("{}% CI", num(100 * l)));
  txt << fmt::format("{:>10}", "p-value");
  for (double m : margins) txt << fmt::format("{:>10}", fmt::format("ev>{}", num(m)));
  txt << '\n';
  for (const NamedCd& n : cds) {
    txt << fmt::format("{:<{}}", n.name, w);
    if (!n.cd) {
      txt << "failed: " << n.error << '\n';
      continue;
    }
    txt << fmt::format("{:>10.3f}", n.cd->median());
    for (double l : levels) {
      const auto [lo, hi] = n.cd->interval(l);
      txt << fmt::format("{:>24}", fmt::format("({:.3f}, {:.3f})", lo, hi));
    }
    txt << fmt::format("{:>10.3f}", n.cd->p_value(null, Alternative::two_sided));
    for (double m : margins) txt << fmt::format("{:>10.3f}", 1.0 - n.cd->evaluate(m));
    txt << '\n';
  }

  if (cfg.flag("run.plots") && !c_series.empty()) {
    auto a = out.open("cd.svg");
    write_svg(a, "Confidence distributions", "C", c_series);
    auto b = out.open("cc.svg");
    write_svg(b, "Confidence curves", "cc", cc_series);
    auto c = out.open("density.svg");
    write_svg(c, "Confidence densities", "density", d_series);
  }
}

// ---- config decoding -------------------------------------------------------

Range parse_range(const std::string& key, const std::string& text) {
  std::stringstream ss(text);
  std::string a, b;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  if (!std::getline(ss, a, sep) || !std::getline(ss, b)) throw ConfigError(fmt::format("{}: expected lo,hi, got '{}'", key, text));
  char* e1 = nullptr;
  char* e2 = nullptr;
  const double lo = std::strtod(a.c_str(), &e1), hi = std::strtod(b.c_str(), &e2);
  if (*e1 != '\0' || *e2 != '\0' || !(lo < hi)) throw ConfigError(fmt::format("{}: '{}' is not a range lo < hi", key, text));
  return {lo, hi};
}

bool custom_proposal(const Config& cfg) {
  return !cfg.is_auto("proposal.psi") || !cfg.is_auto("proposal.nuisance") || !cfg.is_auto("proposal.sigma");
}

// Proposal with configured overrides on top of `base`.
ProposalSpec apply_proposal(const Config& cfg, ProposalSpec base) {
  base.R = cfg.count("proposal.R");
  if (!cfg.is_auto("proposal.psi")) base.psi = parse_range("proposal.psi", cfg.str("proposal.psi"));
  if (!cfg.is_auto("proposal.nuisance")) {
    base.nuisance.clear();
    for (const std::string& item : cfg.list("proposal.nuisance")) base.nuisance.push_back(parse_range("proposal.nuisance", item));
  }
  if (!cfg.is_auto("proposal.sigma")) {
    const std::string s = cfg.str("proposal.sigma");
    if (s.rfind("fixed:", 0) == 0) {
      base.sigma.reset();
      char* end = nullptr;
      base.sigma_fixed = std::strtod(s.c_str() + 6, &end);
      if (*end != '\0' || !(base.sigma_fixed > 0.0)) throw ConfigError(fmt::format("proposal.sigma: bad fixed value '{}'", s));
    } else {
      base.sigma = parse_range("proposal.sigma", s);
    }
  }
  return base;
}

std::uint64_t seed_of(const Config& cfg) {
  const long long s = cfg.integer("run.seed");
  if (s < 0) throw ConfigError("run.seed must be non-negative");
  return static_cast<std::uint64_t>(s);
}

Dataset load_input(Config& cfg) {
  const std::string input = cfg.str("run.input");
  if (input.empty()) throw ConfigError(fmt::format("{} needs an input CSV (run.input)", cfg.str("run.subcommand")));
  const std::string fp = file_fingerprint(input);
  const std::string& recorded = cfg.str("run.input_fnv1a");
  if (!recorded.empty() && recorded != fp)
    throw ConfigError(fmt::format("input '{}' changed since the manifest was written (fingerprint {} vs {})", input, fp,
                                  recorded));
  cfg.set("run.input_fnv1a", fp);
  return read_csv_file(input);
}

void write_manifest(Outputs& out, const Config& cfg) {
  auto os = out.open("manifest.ini");
  os << "; rcd run manifest: rerun with `rcdtool rerun manifest.ini`\n";
  cfg.write(os);
}

// ---- subcommands -----------------------------------------------------------

JobResult analyze(Config& cfg, const JobContext& ctx) {
  const Dataset d = load_input(cfg);
  std::vector<Method> methods;
  if (cfg.is_auto("estimation.methods")) {
    methods = d.kind == DatasetKind::regression ? regression_methods() : all_methods();
  } else {
    methods = parse_methods(cfg.str("estimation.methods"));
  }
  if (d.kind == DatasetKind::regression)
    for (Method m : methods)
      if (!regression_capable(m)) throw ConfigError(fmt::format("method {} is not available for regression data", to_string(m)));
  std::vector<double> margins;
  if (auto m = cfg.reals("estimation.margins")) {
    margins = *m;
  } else if (d.kind == DatasetKind::regression) {
    margins = default_margins();
  } else if (d.kind == DatasetKind::two_sample) {
    margins = {4.0};
  }
  MethodConfig mc = method_config(cfg, &d);
  mc.workers = ctx.workers;
  const auto outcomes = build_cds(d, methods, mc, seed_of(cfg));

  Outputs out(ctx.out_dir);
  std::vector<NamedCd> cds;
  JobResult res;
  for (const MethodOutcome& o : outcomes) {
    cds.push_back({to_string(o.method), slug(o.method), o.cd, o.error, o.acceptance_rate, o.non_monotone});
    res.failures += !o.cd;
  }
  write_cd_set(out, cds, cfg, margins);
  if (!margins.empty()) {
    EvidenceTable t;
    t.datasets = {fs::path(cfg.str("run.input")).stem().string()};
    t.deltas = margins;
    t.methods = methods;
    for (const MethodOutcome& o : outcomes)
      for (double m : margins) {
        EvidenceCell c;
        if (o.cd) {
          c.value = 1.0 - o.cd->evaluate(m);
        } else {
          c.error = o.error;
        }
        t.cells.push_back(c);
      }
    auto a = out.open("evidence.csv");
    write_evidence_csv(a, t);
    auto b = out.open("evidence.txt");
    write_evidence_table(b, t);
  }
  write_manifest(out, cfg);
  res.files = out.files();
  if (res.failures == outcomes.size()) throw NumericError("every method failed on this dataset");
  return res;
}

JobResult simulate(Config& cfg, const JobContext& ctx) {
  StudySpec s;
  s.scenarios.clear();
  for (const std::string& item : cfg.list("study.scenarios")) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError(fmt::format("study.scenarios: expected n:fraction, got '{}'", item));
    char* e1 = nullptr;
    char* e2 = nullptr;
    const std::string a = item.substr(0, colon), b = item.substr(colon + 1);
    const long n = std::strtol(a.c_str(), &e1, 10);
    const double f = std::strtod(b.c_str(), &e2);
    if (*e1 != '\0' || *e2 != '\0' || n <= 0) throw ConfigError(fmt::format("study.scenarios: bad entry '{}'", item));
    s.scenarios.push_back({static_cast<std::size_t>(n), f});
  }
  const std::string m = cfg.str("study.methods");
  s.methods = m == "all" || m == "auto" ? all_methods() : parse_methods(m);
  s.replicates = cfg.count("study.replicates");
  s.psi0 = cfg.real("study.psi0");
  s.delta = cfg.real("study.delta");
  s.alpha = cfg.real("study.alpha");
  s.mu_N = cfg.real("study.mu_N");
  s.sigma = cfg.real("study.sigma");
  s.contamination_scale = cfg.real("study.contamination_scale");
  s.contamination_direction = cfg.real("study.contamination_direction");
  s.seed = seed_of(cfg);
  s.workers = ctx.workers;
  s.method = method_config(cfg, nullptr);
  s.validate();

  const StudyReport r = run_study(s, ctx.progress);
  Outputs out(ctx.out_dir);
  {
    auto os = out.open("study.csv");
    write_study_csv(os, r);
  }
  for (std::size_t n : study_sizes(r)) {
    auto a = out.open(fmt::format("coverage_n{}.txt", n));
    write_coverage_table(a, r, n);
    auto b = out.open(fmt::format("stability_n{}.txt", n));
    write_stability_table(b, r, n);
  }
  write_manifest(out, cfg);
  JobResult res;
  res.files = out.files();
  for (const MethodStats& c : r.cells) res.failures += c.failures;
  const bool total = std::all_of(r.cells.begin(), r.cells.end(), [](const MethodStats& c) { return c.used() == 0; });
  if (total) throw NumericError("every method failed on every replicate");
  return res;
}

NpcdConfig npcd_config(const Config& cfg, DiscrepancyKind kind, std::uint64_t seed, unsigned workers) {
  NpcdConfig c;
  c.kind = kind;
  if (!cfg.is_auto("npcd.theta_ref")) c.reference.theta_ref = cfg.real("npcd.theta_ref");
  if (!cfg.is_auto("npcd.reference_size")) c.reference.size = cfg.count("npcd.reference_size");
  c.proposal = parse_range("npcd.proposal", cfg.str("npcd.proposal"));
  c.R = cfg.count("npcd.R");
  c.bins = cfg.count("npcd.bins");
  c.threshold = cfg.real("npcd.threshold");
  c.density_size = cfg.count("npcd.density_size");
  c.seed = seed;
  c.workers = workers;
  return c;
}

JobResult npcd(Config& cfg, const JobContext& ctx) {
  const std::uint64_t seed = seed_of(cfg);
  std::vector<DiscrepancyKind> kinds;
  for (const std::string& k : cfg.list("npcd.kinds")) kinds.push_back(discrepancy_from_string(k));
  if (kinds.empty()) throw ConfigError("npcd.kinds is empty");

  // Datasets: the input sample, or the synthetic contamination levels.
  std::vector<std::pair<std::string, Dataset>> data;
  DatasetSpec base;
  OneSampleModel om;
  om.theta = cfg.real("npcd.theta0");
  om.sigma = 1.0;
  om.n = cfg.count("npcd.n");
  base.model = om;
  base.seed = seed;
  base.contamination.mechanism = ContaminationMechanism::cauchy_extreme;
  base.contamination.independent_extremes = cfg.flag("npcd.independent_extremes");
  if (!cfg.str("run.input").empty()) {
    const Dataset d = load_input(cfg);
    if (d.kind != DatasetKind::one_sample) throw ConfigError("npcd needs a one-sample CSV (column y)");
    data.emplace_back("input", d);
  } else {
    if (om.n < 1) throw ConfigError("npcd.n must be positive");
    const auto levels = cfg.reals("npcd.levels").value_or(std::vector<double>{0.05, 0.1, 0.15});
    for (double l : levels) {
      if (!(l >= 0.0 && l < 1.0)) throw ConfigError(fmt::format("npcd.levels: {} outside [0, 1)", l));
      DatasetSpec s = base;
      s.contamination.fraction = l;
      if (l == 0.0) s.contamination.mechanism = ContaminationMechanism::none;
      data.emplace_back(fmt::format("eps{}", num(l)), sample(s));
    }
  }

  Outputs out(ctx.out_dir);
  auto summary = out.open("npcd_summary.csv");
  summary << "dataset,kind,sample_mean,median,mean,lo95,hi95,theta_ref,d_obs,acceptance_rate,saturated_fraction,"
             "low_discrimination,non_monotone\n";
  std::vector<Series> dens;
  JobResult res;
  for (std::size_t k = 0; k < data.size(); ++k) {
    const Dataset& d = data[k].second;
    const std::vector<double> y(d.y.data(), d.y.data() + d.n());
    if (cfg.str("run.input").empty()) {
      auto os = out.open(fmt::format("data_{}.csv", data[k].first));
      write_csv(os, d);
    }
    for (DiscrepancyKind kind : kinds) {
      const NpcdResult r = semimetric_cd(npcd_config(cfg, kind, derive_seed(seed, {0x9c, k}), ctx.workers), y);
      const auto [lo, hi] = r.cd().interval(0.95);
      summary << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", data[k].first, to_string(kind), num(d.y.mean()),
                             num(r.cd().median()), num(r.cd().mean()), num(lo), num(hi), num(r.theta_ref), num(r.d_obs),
                             num(r.sig.acceptance_rate), num(r.saturated_fraction), r.low_discrimination,
                             r.sig.non_monotone);
      const std::string tag = fmt::format("{}_{}", to_string(kind), data[k].first);
      const PlotData pd = plot_data(r.cd());
      {
        auto os = out.open("plot_" + tag + ".csv");
        write_plot_csv(os, pd);
      }
      if (r.density) {
        auto os = out.open("density_" + tag + ".csv");
        os << "psi,density\n";
        for (std::size_t i = 0; i < r.density->grid.x.size(); ++i)
          os << num(r.density->grid.x[i]) << ',' << num(r.density->grid.y[i]) << '\n';
        dens.push_back({tag, r.density->grid.x, r.density->grid.y});
      }
    }
  }

  if (cfg.flag("npcd.sweep")) {
    // Fig.-7 style sweep: plain Cauchy replacements at one level, one CD
    // per reference value. A reference whose CD falls outside the proposal
    // range is reported, not fatal.
    DatasetSpec s = base;
    s.contamination.mechanism = ContaminationMechanism::cauchy;
    s.contamination.scale = 1.0;
    s.contamination.fraction = cfg.real("npcd.sweep_level");
    const auto refs = cfg.reals("npcd.sweep_refs").value_or(std::vector<double>{3, 4, 5, 6, 10, 20, 40, 100});
    const NpcdConfig c = npcd_config(cfg, DiscrepancyKind::wasserstein1, derive_seed(seed, {0x5e}), ctx.workers);
    {
      auto os = out.open("data_sweep.csv");
      write_csv(os, sample(s));
    }
    auto os = out.open("sweep.csv");
    os << "theta_ref,median_clean,median_contaminated,shift,error\n";
    for (double ref : refs) {
      try {
        const ShiftRow r = contamination_shift(c, s, {ref}).front();
        os << fmt::format("{},{},{},{},\n", num(r.theta_ref), num(r.median_clean), num(r.median_contaminated), num(r.shift));
      } catch (const NumericError& e) {
        os << fmt::format("{},NA,NA,NA,{}\n", num(ref), csv_text(e.what()));
      }
    }
  }
  if (cfg.flag("run.plots") && !dens.empty()) {
    auto os = out.open("density.svg");
    write_svg(os, "Semimetric confidence densities", "density", dens);
  }
  write_manifest(out, cfg);
  res.files = out.files();
  return res;
}

JobResult boot(Config& cfg, const JobContext& ctx) {
  const Dataset d = load_input(cfg);
  BootstrapConfig bc;
  bc.B = cfg.count("boot.B");
  if (bc.B < 100) throw ConfigError("boot.B must be at least 100");
  const std::string est = cfg.str("boot.estimator");
  if (est == "ml") {
    bc.estimator = EstimatingFunction::ml_score();
  } else if (est == "huber") {
    bc.estimator = EstimatingFunction::huber(cfg.real("estimation.huber_c"));
  } else {
    throw ConfigError(fmt::format("boot.estimator: unknown '{}' (ml, huber)", est));
  }
  const std::string tr = cfg.str("boot.transform");
  if (tr == "identity") {
    bc.transform = Transform::identity();
  } else if (tr == "log") {
    bc.transform = Transform::log();
  } else {
    throw ConfigError(fmt::format("boot.transform: unknown '{}' (identity, log)", tr));
  }
  std::vector<BootVariant> variants;
  for (const std::string& v : cfg.list("boot.variants")) variants.push_back(boot_variant_from_string(v));
  if (variants.empty()) throw ConfigError("boot.variants is empty");
  if (std::find(variants.begin(), variants.end(), BootVariant::t_boot) != variants.end()) bc.variant = BootVariant::t_boot;
  bc.seed = seed_of(cfg);
  bc.workers = ctx.workers;
  const BootReplicates reps = boot_replicates(bc, d);

  Outputs out(ctx.out_dir);
  {
    auto os = out.open("replicates.csv");
    const bool with_q = reps.q.size() == reps.estimates.size();
    os << (with_q ? "estimate,q\n" : "estimate\n");
    for (std::size_t b = 0; b < reps.estimates.size(); ++b) {
      os << num(reps.estimates[b]);
      if (with_q) os << ',' << num(reps.q[b]);
      os << '\n';
    }
  }
  std::vector<NamedCd> cds;
  JobResult res;
  for (BootVariant v : variants) {
    NamedCd n{std::string("Boot/") + to_string(v), std::string("boot_") + to_string(v), std::nullopt, {}};
    try {
      n.cd = boot_cd_from(reps, v, bc.transform);
    } catch (const std::exception& e) {
      n.error = e.what();
      ++res.failures;
    }
    cds.push_back(std::move(n));
  }
  write_cd_set(out, cds, cfg, cfg.reals("estimation.margins").value_or(std::vector<double>{}));
  write_manifest(out, cfg);
  res.files = out.files();
  return res;
}

JobResult abc(Config& cfg, const JobContext& ctx) {
  const Dataset d = load_input(cfg);
  MethodConfig mc = method_config(cfg, &d);
  std::vector<SummaryStatistic> summaries;
  for (const std::string& s : cfg.list("abc.summaries"))
    summaries.push_back({summary_kind_from_string(s), EstimatingFunction::huber(mc.huber_c), mc.project_nuisance});
  if (summaries.empty()) throw ConfigError("abc.summaries is empty");
  const ProposalSpec prop = mc.proposal ? *mc.proposal : default_proposal(d, mc.proposals);
  const ProposalRun run = run_proposals(d, prop, summaries, seed_of(cfg), ctx.workers);

  std::vector<NamedCd> cds;
  JobResult res;
  for (std::size_t s = 0; s < summaries.size(); ++s) {
    const std::string name = to_string(summaries[s].kind);
    NamedCd a{"ABC/" + name, "abc_" + name, std::nullopt, {}};
    try {
      AbcResult r = abc_from(run, s, mc.abc);
      a.acceptance_rate = r.acceptance_rate;
      a.cd = std::move(r.cd);
    } catch (const std::exception& e) {
      a.error = e.what();
      ++res.failures;
    }
    cds.push_back(std::move(a));
    NamedCd g{"CDensity/" + name, "cdensity_" + name, std::nullopt, {}};
    try {
      SigResult r = sig_from(run, s, mc.bins, mc.nonmonotone_threshold);
      g.acceptance_rate = r.acceptance_rate;
      g.non_monotone = r.non_monotone;
      g.cd = std::move(r.cd);
    } catch (const std::exception& e) {
      g.error = e.what();
      ++res.failures;
    }
    cds.push_back(std::move(g));
  }
  Outputs out(ctx.out_dir);
  {
    auto os = out.open("proposals.csv");
    os << "psi";
    for (const auto& s : summaries) os << ',' << to_string(s.kind);
    os << '\n';
    for (std::size_t j = 0; j < run.psi.size(); ++j) {
      os << num(run.psi[j]);
      for (std::size_t s = 0; s < summaries.size(); ++s) os << ',' << num(run.t[s][j]);
      os << '\n';
    }
  }
  write_cd_set(out, cds, cfg, cfg.reals("estimation.margins").value_or(std::vector<double>{}));
  write_manifest(out, cfg);
  res.files = out.files();
  if (res.failures == cds.size()) throw NumericError("every simulation CD failed on this dataset");
  return res;
}

}  // namespace

MethodConfig method_config(const Config& cfg, const Dataset* d) {
  MethodConfig mc;
  mc.huber_c = cfg.real("estimation.huber_c");
  if (!(mc.huber_c > 0.0)) throw ConfigError("estimation.huber_c must be positive");
  mc.welch = cfg.flag("estimation.welch");
  mc.project_nuisance = cfg.flag("estimation.project_nuisance");
  mc.proposals = cfg.count("proposal.R");
  if (mc.proposals < 1) throw ConfigError("proposal.R must be at least 1");
  if (custom_proposal(cfg)) mc.proposal = apply_proposal(cfg, d ? default_proposal(*d, mc.proposals) : ProposalSpec{});
  mc.abc.tolerance = cfg.real("abc.tolerance");
  if (!(mc.abc.tolerance > 0.0)) throw ConfigError("abc.tolerance must be positive");
  const std::string dist = cfg.str("abc.distance");
  if (dist == "absolute") {
    mc.abc.distance = Distance::absolute;
  } else if (dist == "scaled_absolute") {
    mc.abc.distance = Distance::scaled_absolute;
  } else {
    throw ConfigError(fmt::format("abc.distance: unknown '{}' (absolute, scaled_absolute)", dist));
  }
  mc.abc.pilot = cfg.count("abc.pilot");
  mc.bins = cfg.count("abc.bins");
  if (mc.bins < 1) throw ConfigError("abc.bins must be at least 1");
  mc.nonmonotone_threshold = cfg.real("abc.threshold");
  mc.boot_B = cfg.count("boot.B");
  if (mc.boot_B < 100) throw ConfigError("boot.B must be at least 100");
  return mc;
}

JobResult run_job(Config cfg, const JobContext& ctx) {
  if (ctx.out_dir.empty()) throw ConfigError("output directory is empty");
  if (!cfg.str("run.input").empty()) cfg.set("run.input", fs::absolute(cfg.str("run.input")).lexically_normal().string());
  const std::string sub = cfg.str("run.subcommand");
  if (sub == "analyze") return analyze(cfg, ctx);
  if (sub == "simulate") return simulate(cfg, ctx);
  if (sub == "npcd") return npcd(cfg, ctx);
  if (sub == "boot") return boot(cfg, ctx);
  if (sub == "abc") return abc(cfg, ctx);
  throw ConfigError(fmt::format("unknown subcommand '{}' (analyze, simulate, npcd, boot, abc)", sub));
}

}  // namespace rcd
