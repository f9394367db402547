// emdq: mismatch removal and deformation fields for 2D/3D point matches.
//
// Exit codes: 0 ok, 1 usage error, 2 unreadable/malformed input, 3 degenerate input.

#include "emdq/bench.hpp"
#include "emdq/field.hpp"
#include "emdq/io.hpp"
#include "emdq/metrics.hpp"
#include "emdq/pipeline.hpp"
#include "emdq/svg.hpp"
#include "emdq/synth.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

using namespace emdq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitDegenerate = 3;

struct Common {
  std::string input;
  std::string output;
  int dim = 0;  // 0: take it from the file
  bool sparse = false;
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string svg;
  std::map<std::string, std::string> overrides;
};

// Flag name -> Config key.
const std::pair<const char*, const char*> kOverrides[] = {
    {"--H", "H"},           {"--r", "r"},         {"--a", "a"},
    {"--p-min", "p_min"},   {"--theta", "theta"}, {"--t-min", "t_min"},
    {"--n-neighbor", "n_neighbor"},
};

void add_pipeline_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--input,-i", c.input, "Match CSV (dim,n,units header)")->required();
  cmd->add_option("--output,-o", c.output, "Output CSV (default: stdout)");
  cmd->add_option("--dim", c.dim, "Expected dimension of the input")->check(CLI::IsMember({2, 3}));
  cmd->add_flag("--sparse", c.sparse, "Sparse R1P-RNSC (fixed random subset for re-weighting)");
  cmd->add_option("--seed", c.seed, "RANSAC seed");
  cmd->add_option("--config", c.config, "key=value parameter file")->check(CLI::ExistingFile);
  cmd->add_option("--svg", c.svg, "Also write an SVG rendering here");
  for (const auto& [flag, key] : kOverrides)
    cmd->add_option(flag, c.overrides[key], std::string("Override ") + key);
}

Config build_config(const MatchSet& m, const Common& c) {
  Config cfg = default_config(m);
  if (!c.config.empty()) load_config_file(cfg, c.config);
  for (const auto& [key, value] : c.overrides)
    if (!value.empty()) set_config_value(cfg, key, value);
  if (c.sparse) cfg.sparse = true;
  if (c.seed) cfg.seed = *c.seed;
  cfg.validate();
  return cfg;
}

MatchFile read_input(const Common& c) {
  return load_matches(c.input, c.dim == 0 ? std::nullopt : std::optional<int>(c.dim));
}

// Writes through `write` to c.output, or stdout when no output was given.
template <typename F>
void emit(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write(out);
  if (!out) throw Error("write failed: " + path);
}

// Summary goes to stdout unless stdout carries the CSV.
std::ostream& info(const Common& c) { return c.output.empty() ? std::cerr : std::cout; }

FilterResult run_filter(const MatchSet& m, const Config& cfg, const Common& c) {
  FilterResult res = filter_matches(m, cfg);
  if (res.ransac.empty())
    std::cerr << "warning: no rigid hypothesis reached t_min=" << cfg.t_min
              << " support; every match is labeled outlier\n";
  std::ostream& os = info(c);
  os << "matches: " << m.size() << "  inliers: " << res.labels().count_inliers() << '\n'
     << "gamma (R1P-RNSC): " << format_double(res.ransac.gamma)
     << "  trials: " << res.ransac.trials << "  hypotheses: " << res.ransac.hypotheses.size()
     << '\n'
     << "EM iterations: " << res.em.report.iterations
     << (res.em.report.converged ? "" : " (not converged)") << "  sigma: "
     << format_double(res.em.state.sigma) << '\n';
  char buf[96];
  std::snprintf(buf, sizeof buf, "time: %.2f ms (R1P-RNSC %.2f, EMDQ %.2f)\n",
                res.ransac_ms + res.em_ms, res.ransac_ms, res.em_ms);
  os << buf;
  return res;
}

int cmd_filter(const Common& c) {
  const MatchFile f = read_input(c);
  const Config cfg = build_config(f.matches, c);
  const FilterResult res = run_filter(f.matches, cfg, c);
  emit(c.output, [&](std::ostream& os) { write_labels(os, res.labels()); });
  if (!c.svg.empty()) save_svg_matches(c.svg, f.matches, res.labels());
  return kExitOk;
}

struct FieldOpts {
  double step = 0.0;         // 0: 50 in 2D, r in 3D
  std::vector<double> bounds;  // lo..., hi...
  std::string labels;
};

int cmd_field(const Common& c, const FieldOpts& fo) {
  const MatchFile f = read_input(c);
  const MatchSet& m = f.matches;
  const Config cfg = build_config(m, c);
  const FilterResult res = run_filter(m, cfg, c);
  if (!fo.labels.empty()) save_labels(fo.labels, res.labels());

  GridBounds b;
  if (!fo.bounds.empty()) {
    if (fo.bounds.size() != 2 * static_cast<std::size_t>(m.dim))
      throw ConfigError("--bounds needs " + std::to_string(2 * m.dim) + " values");
    for (int d = 0; d < m.dim; ++d) {
      b.lo[d] = fo.bounds[static_cast<std::size_t>(d)];
      b.hi[d] = fo.bounds[static_cast<std::size_t>(m.dim + d)];
    }
  } else {
    b.lo = b.hi = m.x.front();
    for (const Vec3& x : m.x) {
      b.lo = b.lo.cwiseMin(x);
      b.hi = b.hi.cwiseMax(x);
    }
  }
  const double step = fo.step > 0.0 ? fo.step : (m.dim == 2 ? 50.0 : cfg.r);
  const FieldGrid g = grid_field(m, res.em.state, res.labels(), b, step, cfg);
  info(c) << "grid: " << g.shape[0] << " x " << g.shape[1];
  if (m.dim == 3) info(c) << " x " << g.shape[2];
  info(c) << " (step " << format_double(step) << ")\n";
  emit(c.output, [&](std::ostream& os) { write_field(os, g.samples, m.dim); });
  if (!c.svg.empty()) save_svg_field(c.svg, g.samples, m, res.labels());
  return kExitOk;
}

struct SynthOpts {
  std::string output;
  std::size_t n = 1000;
  int dim = 2;
  double outlier_ratio = 0.5;
  int anchors = 3;
  std::optional<double> noise;
  std::uint64_t seed = 1;
  bool pattern = false;
};

int cmd_synth(const SynthOpts& o) {
  SynthSpec spec;
  if (o.pattern) {
    if (o.dim != 2) throw ConfigError("--pattern is 2D only");
    spec = pattern_spec(o.seed);
  } else {
    spec = o.dim == 3 ? spec_3d(1.0 - o.outlier_ratio, o.n, o.seed) : sweep_spec(o.outlier_ratio, o.seed, o.n);
  }
  spec.n = o.n;
  spec.n_anchors = o.anchors;
  if (o.noise) spec.noise_sigma = *o.noise;
  const SynthScene scene = synth_generate(spec);
  emit(o.output, [&](std::ostream& os) {
    write_matches(os, scene.matches, o.dim == 3 ? "m" : "px", &scene.gt);
  });
  return kExitOk;
}

struct EvalOpts {
  std::string input;
  std::string labels;
};

int cmd_eval(const EvalOpts& o) {
  const MatchFile f = load_matches(o.input);
  if (!f.gt) throw ParseError(ParseErrorKind::bad_header, 1, "input has no gt column");
  const LabelResult l = load_labels(o.labels);
  if (l.size() != f.matches.size())
    throw ParseError(ParseErrorKind::truncated, 0,
                     "labels have " + std::to_string(l.size()) + " rows, matches " +
                         std::to_string(f.matches.size()));
  const Metrics mt = compute_metrics(l, *f.gt);
  std::cout << "n_errors: " << mt.n_errors << '\n'
            << "tp: " << mt.tp << "  fp: " << mt.fp << "  fn: " << mt.fn << "  tn: " << mt.tn << '\n'
            << "precision: " << format_double(mt.precision)
            << (mt.precision_undefined ? " (undefined)" : "") << '\n'
            << "recall: " << format_double(mt.recall) << (mt.recall_undefined ? " (undefined)" : "")
            << '\n'
            << "fscore: " << format_double(mt.fscore) << '\n';
  return kExitOk;
}

struct BenchOpts {
  int seeds = 20;
  int runs = 20;
  int threads = 0;
  std::uint64_t seed = 1;
  bool serial = false;
  bool skip_sweep = false;
};

int cmd_bench(const BenchOpts& o) {
  if (o.threads > 0) omp_set_num_threads(o.threads);
  const Exec exec = o.serial ? Exec::serial : Exec::parallel;
  std::printf("# %s kernels, %d OpenMP thread(s)\n", o.serial ? "serial" : "parallel",
              o.serial ? 1 : omp_get_max_threads());
  char buf[256];
  if (!o.skip_sweep) {
    std::printf("%-8s %5s %9s %9s %11s %11s %10s %10s %8s\n", "outliers", "seeds", "F_emdq",
                "F_r1p", "err_emdq", "err_r1p", "P_emdq", "P_r1p", "ms");
    for (double ratio : {0.30, 0.50, 0.70, 0.85}) {
      const SweepRow r = sweep_row(ratio, o.seeds, o.seed, exec);
      std::snprintf(buf, sizeof buf, "%-8.2f %5d %9.4f %9.4f %11.1f %11.1f %10.4f %10.4f %8.2f\n",
                    r.outlier_ratio, r.seeds, r.f_emdq, r.f_r1p, r.errors_emdq, r.errors_r1p,
                    r.precision_emdq, r.precision_r1p, r.ms);
      std::fputs(buf, stdout);
    }
    std::printf("\n");
  }
  std::printf("%-22s %6s %10s %10s %10s\n", "runtime (50% outliers)", "runs", "median_ms",
              "min_ms", "max_ms");
  for (std::size_t n : {500, 1000, 2000}) {
    const Timing t = time_pipeline(n, 0.5, o.runs, o.seed, exec);
    std::snprintf(buf, sizeof buf, "%-22s %6d %10.2f %10.2f %10.2f\n",
                  ("pipeline N=" + std::to_string(n)).c_str(), o.runs, t.median_ms, t.min_ms,
                  t.max_ms);
    std::fputs(buf, stdout);
  }
  const Timing g = time_grid(o.runs, o.seed, exec);
  std::snprintf(buf, sizeof buf, "%-22s %6d %10.2f %10.2f %10.2f\n", "grid 17x13", o.runs,
                g.median_ms, g.min_ms, g.max_ms);
  std::fputs(buf, stdout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mismatch removal (R1P-RNSC + EMDQ) and smooth deformation fields"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Common filter_c, field_c;
  auto* filter = app.add_subcommand("filter", "Label matches as inliers/outliers");
  add_pipeline_flags(filter, filter_c);

  FieldOpts fo;
  auto* field = app.add_subcommand("field", "Filter, then sample the deformation field on a lattice");
  add_pipeline_flags(field, field_c);
  field->add_option("--grid-step", fo.step, "Lattice spacing (default 50 in 2D, r in 3D)")
      ->check(CLI::PositiveNumber);
  field->add_option("--bounds", fo.bounds, "Lattice box lo_x lo_y [lo_z] hi_x hi_y [hi_z] (default: bounding box of x)")
      ->expected(4, 6);
  field->add_option("--labels", fo.labels, "Also write the labels CSV here");

  SynthOpts so;
  auto* synth = app.add_subcommand("synth", "Generate a ground-truthed synthetic scene");
  synth->add_option("--output,-o", so.output, "Match CSV with gt column (default: stdout)");
  synth->add_option("--n", so.n, "Number of matches")->check(CLI::PositiveNumber);
  synth->add_option("--dim", so.dim, "2 (pixels) or 3 (metres)")->check(CLI::IsMember({2, 3}));
  synth->add_option("--outlier-ratio", so.outlier_ratio, "Fraction of uniform outliers")
      ->check(CLI::Range(0.0, 0.999));
  synth->add_option("--anchors", so.anchors, "Local rigid motions blended into the field")
      ->check(CLI::PositiveNumber);
  synth->add_option("--noise", so.noise, "Inlier noise per axis (default 2 px / 1 mm)");
  synth->add_option("--seed", so.seed, "Scene seed");
  synth->add_flag("--pattern", so.pattern, "Repeating-pattern scene (30% outliers + 15% shifted group)");

  EvalOpts eo;
  auto* eval = app.add_subcommand("eval", "Score a labels CSV against the gt column of a match CSV");
  eval->add_option("--input,-i", eo.input, "Match CSV with gt column")->required();
  eval->add_option("--labels,-l", eo.labels, "Labels CSV")->required();

  BenchOpts bo;
  auto* bench = app.add_subcommand("bench", "Outlier-ratio sweep and runtime table");
  bench->add_option("--seeds", bo.seeds, "Scenes per outlier ratio")->check(CLI::PositiveNumber);
  bench->add_option("--runs", bo.runs, "Timing repetitions")->check(CLI::PositiveNumber);
  bench->add_option("--threads", bo.threads, "OpenMP threads (default: runtime default)")
      ->check(CLI::PositiveNumber);
  bench->add_option("--seed", bo.seed, "First scene seed");
  bench->add_flag("--serial", bo.serial, "Use the serial reference kernels");
  bench->add_flag("--no-sweep", bo.skip_sweep, "Only print the runtime table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (filter->parsed()) return cmd_filter(filter_c);
    if (field->parsed()) return cmd_field(field_c, fo);
    if (synth->parsed()) return cmd_synth(so);
    if (eval->parsed()) return cmd_eval(eo);
    if (bench->parsed()) return cmd_bench(bo);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const DegenerateInputError& e) {
    std::cerr << "error: degenerate input: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
