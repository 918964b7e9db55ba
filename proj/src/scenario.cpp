#include "skewprod/scenario.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>

#include "skewprod/csv.hpp"
#include "skewprod/digits.hpp"
#include "skewprod/graphs.hpp"
#include "skewprod/lyapunov.hpp"
#include "skewprod/stablefibre.hpp"

namespace skewprod {

namespace {

constexpr std::size_t kXiDigits = 64;

// Seed streams of the scenario seed.
constexpr std::uint64_t kStreamMiddleXi = 2;  // shared with classify_scenario
constexpr std::uint64_t kStreamTrajectory = 100;
constexpr std::uint64_t kStreamFibre = 1000;

class OutputDir {
 public:
  explicit OutputDir(std::string dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }
  std::ofstream open(const std::string& name, std::vector<std::string>& files) const {
    files.push_back(name);
    return open_output((std::filesystem::path(dir_) / name).string());
  }

 private:
  std::string dir_;
};

}  // namespace

std::uint64_t trajectory_seed(std::uint64_t seed) { return split_seed(seed, kStreamTrajectory); }

TrajectoryStats run_trajectory(const FibreFamily& fam, const BakerSystem& sys, std::uint64_t seed,
                               std::size_t index, double y0, std::size_t steps,
                               std::size_t burn_in, std::size_t max_rows, std::ostream* csv) {
  TrajectoryStats st;
  std::mt19937_64 rng(split_seed(seed, 2 * index));
  DigitStream xi = DigitStream::typical(sys, split_seed(seed, 2 * index + 1));
  std::array<std::uint8_t, kXiDigits> ring{};
  for (auto& d : ring) d = xi.next();
  std::size_t pos = 0;
  double x = uniform01(rng);
  double y = y0;
  const std::size_t recorded = steps >= burn_in ? steps - burn_in + 1 : 0;
  const std::size_t stride = std::max<std::size_t>(1, (recorded + max_rows - 1) / max_rows);
  if (csv) write_row(*csv, {"step", "xi", "x", "y"});
  DigitSequence window(kXiDigits);
  for (std::size_t j = 0;; ++j) {
    if (csv && j >= burn_in && (j - burn_in) % stride == 0) {
      for (std::size_t i = 0; i < kXiDigits; ++i) window[i] = ring[(pos + i) % kXiDigits];
      write_row(*csv, {num(static_cast<std::uint64_t>(j)), num(point_from_digits(sys, window)),
                       num(x), num(y)});
      ++st.rows;
    }
    if (j == steps) break;
    const std::uint8_t d = ring[pos];
    ring[pos] = xi.next();
    pos = (pos + 1) % kXiDigits;
    const double next = fam.value(x, y);
    x = sys.inverse_branch(d, x);
    if ((next < 0.0) != (y < 0.0)) {
      st.crossings.push_back({index, static_cast<std::uint64_t>(j + 1), y, next});
    }
    y = next;
  }
  st.final_y = y;
  return st;
}

void write_levelset_csv(std::ostream& os, const FibreFamily& fam, const BakerSystem& sys,
                        Interval J, std::size_t nx, std::size_t ny) {
  write_row(os, {"x", "y", "below"});
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(nx);
    const double tx = sys.tau(x);
    for (std::size_t j = 0; j < ny; ++j) {
      const double y = J.lo + J.width() * (static_cast<double>(j) + 0.5) / static_cast<double>(ny);
      const bool below = fam.value(x, fam.value(tx, y)) < y;
      write_row(os, {num(x), num(y), below ? "1" : "0"});
    }
  }
}

void write_crossings_csv(std::ostream& os, const std::vector<Crossing>& crossings) {
  write_row(os, {"trajectory", "step", "y_before", "y_after"});
  for (const auto& c : crossings) {
    write_row(os, {num(static_cast<std::uint64_t>(c.trajectory)), num(c.step), num(c.y_before),
                   num(c.y_after)});
  }
}

void write_strip_bound(std::ostream& os, const StripBound& s) {
  os << "threshold: " << num(s.threshold) << '\n'
     << "window: [" << num(s.window.lo) << ", " << num(s.window.hi) << "]\n"
     << "sup_two_step: " << num(s.sup) << '\n'
     << "padding: " << num(s.padding) << '\n'
     << "pass: " << (s.pass ? "true" : "false") << '\n'
     << "quaternary_digits: " << s.quaternary_digits << '\n'
     << "cantor_dimension: " << num(s.cantor_dimension) << '\n'
     << "dimension_lower_bound: " << num(s.bound) << '\n';
}

ScenarioSummary run_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  ScenarioSummary out;
  const OutputDir dir(cfg.output_dir);
  const ArctanFamily fam(cfg.r, cfg.eps);
  const BakerSystem sys(cfg.a);
  const Interval I = cfg.I();
  const Interval J = cfg.J();

  {
    auto os = dir.open("resolved_config.txt", out.files);
    write_config(os, cfg);
  }
  out.certificate = check_hypotheses(fam, sys, I, J, cfg.hypothesis_grid);
  {
    auto os = dir.open("certificate.txt", out.files);
    write_certificate(os, out.certificate);
  }
  if (!out.certificate.pass) {
    if (!cfg.override_hypotheses) {
      throw HypothesisError("hypothesis certificate failed (binding constraint: " +
                            out.certificate.binding + ")");
    }
    out.notes.push_back("hypothesis certificate failed; continuing under override");
  }

  std::vector<Crossing> crossings;
  for (std::size_t i = 0; i < cfg.trajectory_y0.size(); ++i) {
    auto os = dir.open("trajectory_" + std::to_string(i) + ".csv", out.files);
    TrajectoryStats st = run_trajectory(fam, sys, trajectory_seed(cfg.seed), i,
                                        cfg.trajectory_y0[i], cfg.trajectory_steps, cfg.burn_in,
                                        cfg.max_rows, &os);
    crossings.insert(crossings.end(), st.crossings.begin(), st.crossings.end());
  }
  out.crossings = crossings.size();
  {
    auto os = dir.open("crossings.csv", out.files);
    write_crossings_csv(os, crossings);
  }
  {
    auto os = dir.open("levelset.csv", out.files);
    write_levelset_csv(os, fam, sys, J, cfg.levelset_nx, cfg.levelset_ny);
  }

  const StableField field = make_stable_field(fam, sys, I, J);
  for (std::size_t k = 0; k < cfg.fibre_y.size(); ++k) {
    DigitStream xi = DigitStream::typical(sys, split_seed(cfg.seed, kStreamFibre + k));
    const StableFibre fib = integrate_fibre(field, fam, sys, xi.take(field.terms + kXiDigits),
                                            cfg.fibre_x, cfg.fibre_y[k], cfg.fibre_h);
    auto os = dir.open("fibre_" + std::to_string(k) + ".csv", out.files);
    write_fibre_csv(os, fib);
  }

  const GraphGrid upper =
      pullback_graph(fam, sys, GraphKind::upper, cfg.graph_grid, cfg.graph_depth, cfg.M);
  const GraphGrid lower =
      pullback_graph(fam, sys, GraphKind::lower, cfg.graph_grid, cfg.graph_depth, cfg.M);
  DigitStream mxi = DigitStream::typical(sys, split_seed(cfg.seed, kStreamMiddleXi));
  const GraphGrid middle = middle_graph(fam, sys, cfg.graph_grid, cfg.graph_depth, 0.0, J,
                                        mxi.take(cfg.graph_depth + 1 + kXiDigits));
  for (const GraphGrid* g : {&upper, &lower, &middle}) {
    auto os = dir.open(std::string("graph_") + to_string(g->kind) + ".csv", out.files);
    write_graph_csv(os, *g);
  }

  const ClassifyConfig ccfg = cfg.classify_config();
  out.report = classify_scenario(fam, sys, ccfg);
  {
    auto os = dir.open("classification.txt", out.files);
    write_report(os, out.report);
  }
  {
    auto os = dir.open("classification_margins.csv", out.files);
    write_margins_csv(os, out.report, ccfg);
  }
  {
    auto os = dir.open("exponents.csv", out.files);
    write_exponent_header(os);
    write_exponent_row(os, cfg.scenario, GraphKind::lower, MeasureKind::lebesgue,
                       out.report.lambda_minus);
    write_exponent_row(os, cfg.scenario, GraphKind::middle, MeasureKind::lebesgue,
                       out.report.lambda_star);
    write_exponent_row(os, cfg.scenario, GraphKind::upper, MeasureKind::lebesgue,
                       out.report.lambda_plus);
  }

  {
    auto os = dir.open("dimension.csv", out.files);
    write_dimension_header(os);
    for (const auto& name : cfg.dimension_phi_hat) {
      const GraphKind kind = parse_graph_kind(name);
      const GraphGrid& g = kind == GraphKind::upper ? upper : kind == GraphKind::lower ? lower : middle;
      for (std::size_t n : cfg.dimension_orders) {
        try {
          const DimensionEstimate d = dimension_estimate(fam, sys, g, n);
          write_dimension_row(os, cfg.scenario, d);
          out.dimensions.push_back(d);
        } catch (const NumericError& e) {
          // The upper graph is the reference potential; other choices may
          // legitimately be unavailable (e.g. diverged middle slice).
          if (kind == GraphKind::upper) throw;
          out.notes.push_back(std::string("dimension with phi_hat = ") + name + ", n = " +
                              std::to_string(n) + " unavailable: " + e.what());
        }
      }
    }
  }

  if (sys.is_doubling()) {
    out.has_strip = true;
    out.strip = negative_strip_bound(fam, sys, cfg.strip_threshold,
                                     Interval{cfg.strip_window_lo, cfg.strip_window_hi});
    auto os = dir.open("strip_bound.txt", out.files);
    write_strip_bound(os, out.strip);
  }
  return out;
}

void write_summary(std::ostream& os, const ScenarioSummary& s) {
  os << "certificate_pass: " << (s.certificate.pass ? "true" : "false") << '\n'
     << "expansion_margin: " << num(s.certificate.expansion_margin) << '\n'
     << "invariance_margin: " << num(s.certificate.invariance_margin) << '\n'
     << "case: " << s.report.case_label << " (" << s.report.case_grade << ")\n"
     << "subcase: " << s.report.subcase << " (" << s.report.subcase_grade << ")\n"
     << "lambda_minus: " << num(s.report.lambda_minus.value) << '\n'
     << "lambda_star: " << num(s.report.lambda_star.value) << '\n'
     << "lambda_plus: " << num(s.report.lambda_plus.value) << '\n'
     << "crossings: " << s.crossings << '\n';
  for (const auto& d : s.dimensions) {
    os << "dimension[" << to_string(d.phi_hat) << ", n=" << d.order
       << "]: " << (d.empty ? std::string("P empty") : num(d.value)) << " (gap " << num(d.gap)
       << ")\n";
  }
  if (s.has_strip) {
    os << "strip_bound: " << (s.strip.pass ? "pass" : "fail") << ", dim >= " << num(s.strip.bound)
       << '\n';
  }
  for (const auto& f : s.files) os << "file: " << f << '\n';
  for (const auto& n : s.notes) os << "note: " << n << '\n';
}

}  // namespace skewprod
