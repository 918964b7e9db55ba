#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "skewprod/classify.hpp"
#include "skewprod/config.hpp"
#include "skewprod/csv.hpp"
#include "skewprod/dimension.hpp"
#include "skewprod/graphs.hpp"
#include "skewprod/hypotheses.hpp"
#include "skewprod/lyapunov.hpp"
#include "skewprod/scenario.hpp"
#include "skewprod/stablefibre.hpp"

using namespace skewprod;

namespace {

struct ConfigOptions {
  std::string file;
  std::string preset;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
};

void add_config_options(CLI::App* cmd, ConfigOptions& o) {
  cmd->add_option("-c,--config", o.file, "key = value configuration file");
  cmd->add_option("-p,--preset", o.preset, "fig1a, fig1b, fig1c or fig2");
  cmd->add_option("-s,--set", o.sets, "override, KEY=VALUE (repeatable)");
  cmd->add_option("--seed", o.seed, "random seed");
}

ScenarioConfig resolve(const ConfigOptions& o, bool need_seed) {
  ScenarioConfig cfg;
  if (!o.preset.empty()) apply_preset(cfg, o.preset);
  if (!o.file.empty()) cfg = load_config(o.file, cfg);
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects KEY=VALUE, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) set_config_value(cfg, "seed", std::to_string(*o.seed));
  if (!need_seed && !cfg.has_seed) set_config_value(cfg, "seed", "0");
  validate(cfg);
  return cfg;
}

// Writes to `path`, or to stdout when the path is empty or "-".
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
  } else {
    auto os = open_output(path);
    fn(os);
  }
}

DigitSequence parse_word(const std::string& s) {
  DigitSequence w;
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("digit words use only 0 and 1");
    w.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  if (w.empty()) throw std::invalid_argument("digit word must not be empty");
  return w;
}

GraphGrid build_graph(const ArctanFamily& fam, const BakerSystem& sys, const ScenarioConfig& cfg,
                      GraphKind kind) {
  if (kind == GraphKind::middle) {
    DigitStream xi = DigitStream::typical(sys, split_seed(cfg.seed, 2));
    return middle_graph(fam, sys, cfg.graph_grid, cfg.graph_depth, 0.0, cfg.J(),
                        xi.take(cfg.graph_depth + 65));
  }
  return pullback_graph(fam, sys, kind, cfg.graph_grid, cfg.graph_depth, cfg.M);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Skew products over generalized baker maps: invariant graphs, stable fibres, "
               "exponents, classification and dimension"};
  app.require_subcommand(1);

  // check-hypotheses
  ConfigOptions hyp_cfg;
  std::string hyp_out;
  std::optional<std::size_t> hyp_grid;
  auto* hyp = app.add_subcommand("check-hypotheses", "certify the standing hypotheses on T x J");
  add_config_options(hyp, hyp_cfg);
  hyp->add_option("--grid", hyp_grid, "grid cells per axis");
  hyp->add_option("-o,--out", hyp_out, "certificate file (stdout by default)");

  // scan-region
  double scan_eps = 0.1, scan_a = 0.5;
  std::vector<double> scan_M{0.76, 0.98}, scan_r{1.0, 1.22};
  std::size_t scan_nM = 100, scan_nr = 100, scan_cell = 200;
  std::string scan_out;
  auto* scan = app.add_subcommand("scan-region", "certify the hypotheses over an (M, r) grid");
  scan->add_option("--eps", scan_eps, "forcing amplitude")->capture_default_str();
  scan->add_option("--a", scan_a, "base split")->capture_default_str();
  scan->add_option("--M-range", scan_M, "M range LO HI")->expected(2)->capture_default_str();
  scan->add_option("--r-range", scan_r, "r range LO HI")->expected(2)->capture_default_str();
  scan->add_option("--nM", scan_nM, "M nodes")->capture_default_str();
  scan->add_option("--nr", scan_nr, "r nodes")->capture_default_str();
  scan->add_option("--cell-grid", scan_cell, "grid per axis for each node")->capture_default_str();
  scan->add_option("-o,--out", scan_out, "CSV file (stdout by default)");

  // graphs
  ConfigOptions graph_cfg;
  std::string graph_kind = "upper", graph_out;
  auto* graphs = app.add_subcommand("graphs", "pullback graphs and the middle slice");
  add_config_options(graphs, graph_cfg);
  graphs->add_option("-k,--kind", graph_kind, "upper, lower or middle")->capture_default_str();
  graphs->add_option("-o,--out", graph_out, "CSV file (stdout by default)");

  // fibre
  ConfigOptions fib_cfg;
  double fib_x = 0.5, fib_y = 0.0;
  std::uint64_t fib_stream = 0;
  std::size_t fib_equiv = 0;
  std::string fib_out;
  auto* fibre = app.add_subcommand("fibre", "strong stable fibre through (xi, x, y)");
  add_config_options(fibre, fib_cfg);
  fibre->add_option("--x", fib_x, "anchor x")->capture_default_str();
  fibre->add_option("--y", fib_y, "anchor y")->capture_default_str();
  fibre->add_option("--xi-stream", fib_stream, "seed stream selecting xi")->capture_default_str();
  fibre->add_option("--equivariance", fib_equiv, "report the equivariance residual at this n");
  fibre->add_option("-o,--out", fib_out, "CSV file (stdout by default)");

  // lyapunov
  ConfigOptions lya_cfg;
  std::string lya_graph = "upper", lya_measure = "lebesgue", lya_word, lya_out;
  double lya_p = 0.5;
  std::size_t lya_order = 1, lya_samples = 100000, lya_n = 0;
  std::vector<double> lya_p_one;
  bool lya_mc = false;
  double lya_x = 0.5, lya_y = 0.0;
  auto* lya = app.add_subcommand("lyapunov", "graph exponents under a measure, or along an orbit");
  add_config_options(lya, lya_cfg);
  lya->add_option("--graph", lya_graph, "upper, lower or middle")->capture_default_str();
  lya->add_option("--measure", lya_measure, "lebesgue, bernoulli, markov or periodic")
      ->capture_default_str();
  lya->add_option("--prob", lya_p, "bernoulli probability of digit 1")->capture_default_str();
  lya->add_option("--order", lya_order, "markov memory")->capture_default_str();
  lya->add_option("--p-one", lya_p_one, "markov P(1 | previous digits), 2^order values");
  lya->add_option("--word", lya_word, "periodic itinerary, e.g. 01");
  lya->add_option("--samples", lya_samples, "Monte Carlo samples")->capture_default_str();
  lya->add_flag("--monte-carlo", lya_mc, "lebesgue by Monte Carlo instead of quadrature");
  lya->add_option("--orbit", lya_n, "forward orbit exponent of length N at (--x, --y)");
  lya->add_option("--x", lya_x, "orbit start x")->capture_default_str();
  lya->add_option("--y", lya_y, "orbit start y")->capture_default_str();
  lya->add_option("-o,--out", lya_out, "CSV file (stdout by default)");

  // classify
  ConfigOptions cls_cfg;
  std::string cls_out, cls_margins;
  auto* cls = app.add_subcommand("classify", "case A/B classification with subcases");
  add_config_options(cls, cls_cfg);
  cls->add_option("-o,--out", cls_out, "report file (stdout by default)");
  cls->add_option("--margins", cls_margins, "margins CSV");

  // dimension
  ConfigOptions dim_cfg;
  std::string dim_out;
  bool dim_lenient = false;
  auto* dim = app.add_subcommand("dimension", "dimension of the pinched set by pressure duality");
  add_config_options(dim, dim_cfg);
  dim->add_flag("--lenient", dim_lenient, "report the duality gap instead of failing on it");
  dim->add_option("-o,--out", dim_out, "CSV file (stdout by default)");

  // scenario
  ConfigOptions sc_cfg;
  std::string sc_dir;
  bool sc_override = false;
  auto* sc = app.add_subcommand("scenario", "run every stage and write all artifacts");
  add_config_options(sc, sc_cfg);
  sc->add_option("-d,--output-dir", sc_dir, "output directory (overrides output_dir)");
  sc->add_flag("--override-hypotheses", sc_override, "continue when the certificate fails");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*hyp) {
      const ScenarioConfig cfg = resolve(hyp_cfg, false);
      const ArctanFamily fam(cfg.r, cfg.eps);
      const BakerSystem sys(cfg.a);
      const auto cert =
          check_hypotheses(fam, sys, cfg.I(), cfg.J(), hyp_grid.value_or(cfg.hypothesis_grid));
      emit(hyp_out, [&](std::ostream& os) { write_certificate(os, cert); });
      return cert.pass ? 0 : 2;
    }
    if (*scan) {
      const auto cells = scan_region(scan_eps, scan_a, {scan_M[0], scan_M[1]}, {scan_r[0], scan_r[1]},
                                     scan_nM, scan_nr, scan_cell);
      emit(scan_out, [&](std::ostream& os) { write_region_csv(os, cells); });
      return 0;
    }
    if (*graphs) {
      const ScenarioConfig cfg = resolve(graph_cfg, true);
      const ArctanFamily fam(cfg.r, cfg.eps);
      const BakerSystem sys(cfg.a);
      const GraphGrid g = build_graph(fam, sys, cfg, parse_graph_kind(graph_kind));
      emit(graph_out, [&](std::ostream& os) { write_graph_csv(os, g); });
      return 0;
    }
    if (*fibre) {
      const ScenarioConfig cfg = resolve(fib_cfg, true);
      const ArctanFamily fam(cfg.r, cfg.eps);
      const BakerSystem sys(cfg.a);
      const StableField field = make_stable_field(fam, sys, cfg.I(), cfg.J());
      DigitStream xi = DigitStream::typical(sys, split_seed(cfg.seed, 1000 + fib_stream));
      const StableFibre f = integrate_fibre(field, fam, sys, xi.take(field.terms + fib_equiv + 64),
                                            fib_x, fib_y, cfg.fibre_h);
      emit(fib_out, [&](std::ostream& os) { write_fibre_csv(os, f); });
      if (fib_equiv > 0) {
        const auto e = equivariance_residual(f, field, fam, sys, fib_equiv);
        std::cerr << "equivariance residual " << num(e.residual) << " envelope " << num(e.envelope)
                  << " budget " << num(e.budget) << '\n';
      }
      return 0;
    }
    if (*lya) {
      const ScenarioConfig cfg = resolve(lya_cfg, true);
      const ArctanFamily fam(cfg.r, cfg.eps);
      const BakerSystem sys(cfg.a);
      if (lya_n > 0) {
        DigitStream xi = DigitStream::typical(sys, cfg.seed);
        const auto e = forward_exponent(fam, sys, xi, lya_x, lya_y, lya_n, cfg.J());
        emit(lya_out, [&](std::ostream& os) {
          write_exponent_header(os);
          write_exponent_row(os, cfg.scenario, GraphKind::upper, MeasureKind::lebesgue, e);
        });
        if (!e.converged) std::cerr << "warning: orbit average has not converged\n";
        return 0;
      }
      MeasureModel mu;
      if (lya_measure == "lebesgue") mu = MeasureModel::lebesgue(cfg.seed, !lya_mc);
      else if (lya_measure == "bernoulli") mu = MeasureModel::bernoulli(lya_p, cfg.seed);
      else if (lya_measure == "markov") mu = MeasureModel::markov(lya_order, lya_p_one, cfg.seed);
      else if (lya_measure == "periodic") mu = MeasureModel::periodic(parse_word(lya_word));
      else throw std::invalid_argument("unknown measure '" + lya_measure + "'");
      const GraphKind kind = parse_graph_kind(lya_graph);
      GraphGrid g;
      if (kind == GraphKind::middle || mu.kind != MeasureKind::lebesgue || !mu.quadrature) {
        g.kind = kind;
        g.depth = cfg.graph_depth;
        g.anchor = kind == GraphKind::upper ? cfg.M : kind == GraphKind::lower ? -cfg.M : 0.0;
      } else {
        g = build_graph(fam, sys, cfg, kind);
      }
      const auto e = measure_exponent(fam, sys, g, cfg.J(), mu, lya_samples);
      emit(lya_out, [&](std::ostream& os) {
        write_exponent_header(os);
        write_exponent_row(os, cfg.scenario, kind, mu.kind, e);
      });
      return 0;
    }
    if (*cls) {
      const ScenarioConfig cfg = resolve(cls_cfg, true);
      const ArctanFamily fam(cfg.r, cfg.eps);
      const BakerSystem sys(cfg.a);
      const ClassifyConfig ccfg = cfg.classify_config();
      const auto report = classify_scenario(fam, sys, ccfg);
      emit(cls_out, [&](std::ostream& os) { write_report(os, report); });
      if (!cls_margins.empty()) {
        auto os = open_output(cls_margins);
        write_margins_csv(os, report, ccfg);
      }
      return 0;
    }
    if (*dim) {
      const ScenarioConfig cfg = resolve(dim_cfg, true);
      const ArctanFamily fam(cfg.r, cfg.eps);
      const BakerSystem sys(cfg.a);
      DimensionOptions opt;
      opt.strict = !dim_lenient;
      std::vector<DimensionEstimate> rows;
      for (const auto& name : cfg.dimension_phi_hat) {
        const GraphGrid g = build_graph(fam, sys, cfg, parse_graph_kind(name));
        for (std::size_t n : cfg.dimension_orders) {
          rows.push_back(dimension_estimate(fam, sys, g, n, opt));
        }
      }
      emit(dim_out, [&](std::ostream& os) {
        write_dimension_header(os);
        for (const auto& d : rows) write_dimension_row(os, cfg.scenario, d);
      });
      if (sys.is_doubling()) {
        const auto s = negative_strip_bound(fam, sys, cfg.strip_threshold,
                                            {cfg.strip_window_lo, cfg.strip_window_hi});
        write_strip_bound(std::cerr, s);
      }
      return 0;
    }
    if (*sc) {
      ScenarioConfig cfg = resolve(sc_cfg, true);
      if (!sc_dir.empty()) cfg.output_dir = sc_dir;
      if (sc_override) cfg.override_hypotheses = true;
      const auto summary = run_scenario(cfg);
      write_summary(std::cout, summary);
      return 0;
    }
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis failure: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
