#include "geolab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "geolab/csv.hpp"
#include "geolab/errors.hpp"
#include "geolab/experiments.hpp"
#include "geolab/gallagher.hpp"
#include "geolab/geodesic_counts.hpp"
#include "geolab/spectral.hpp"

namespace geolab {
namespace {

namespace fs = std::filesystem;
using csv::format_real;

struct RunConfig {
  std::string zeros_path;
  std::string cache_path;
  std::string out_path;
  unsigned workers = std::max(1U, std::thread::hardware_concurrency());

  double x = 0.0;
  double T = 0.0;
  bool uncapped = false;
  double T_scale = 1.0;
  std::int64_t t_max = 0;

  double x_min = 1e3;
  double x_max = 1e7;
  int per_decade = 8;
  double epsilon = 0.1;

  int n_min = 2;
  int n_max = 12;
  int samples = 256;
  std::vector<double> T_list{10.0, 30.0, 60.0};

  std::string input_path;
  int random_count = 0;
  std::uint64_t seed = 1;
  double theta = 0.25;
  double U = 1.0;
};

// --zeros, then GEOLAB_ZEROS, then the bundled table if present. An empty
// string means no table: the zero sum is empty.
std::string resolve_zeros_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("GEOLAB_ZEROS"); env != nullptr && *env != '\0') return env;
#ifdef GEOLAB_DEFAULT_ZEROS
  if (fs::exists(GEOLAB_DEFAULT_ZEROS)) return GEOLAB_DEFAULT_ZEROS;
#endif
  return {};
}

ZeroTable load_zeros(const RunConfig& cfg) {
  const std::string path = resolve_zeros_path(cfg.zeros_path);
  if (path.empty()) return {};
  return load_zero_table_file(path);
}

void require_output_dir(const std::string& path) {
  if (path.empty() || path == "-") return;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw IoError("output directory '" + parent.string() + "' does not exist");
  }
}

template <typename Writer>
void emit(const std::string& path, std::ostream& out, Writer write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  write(file);
  file.flush();
  if (!file) throw IoError("write to '" + path + "' failed");
}

// Trace table reaching x: read from the cache when it is long enough,
// otherwise built and, with a cache path, written back.
TraceTable traces_for(double x, const RunConfig& cfg) {
  const std::int64_t needed = std::max<std::int64_t>(3, max_trace_for(x).value_or(3));
  if (!cfg.cache_path.empty() && fs::exists(cfg.cache_path)) {
    std::ifstream in(cfg.cache_path, std::ios::binary);
    if (!in) throw IoError("cannot open cache '" + cfg.cache_path + "'");
    TraceTable cached = read_trace_cache(in);
    if (cached.t_max() >= needed) return cached;
  }
  TraceTable table = build_trace_table(needed, cfg.workers);
  if (!cfg.cache_path.empty()) {
    std::ofstream file(cfg.cache_path, std::ios::binary);
    if (!file) throw IoError("cannot write cache '" + cfg.cache_path + "'");
    write_trace_cache(file, table);
    if (!file) throw IoError("write to cache '" + cfg.cache_path + "' failed");
  }
  return table;
}

int cmd_count(const RunConfig& cfg, std::ostream& out) {
  if (!(cfg.x > 1.0)) throw DomainError("count: --x must exceed 1");
  const ZeroTable zeros = load_zeros(cfg);
  const TraceTable traces = traces_for(cfg.x, cfg);
  const CountSnapshot s = count_snapshot(cfg.x, traces);
  out << "x=" << format_real(s.x) << '\n'
      << "pi=" << s.pi << '\n'
      << "theta=" << format_real(s.theta) << '\n'
      << "psi=" << format_real(s.psi) << '\n'
      << "li=" << format_real(s.li) << '\n';
  TruncationChoice choice;
  choice.capped = false;
  choice.T = cfg.T > 0.0 ? cfg.T : std::max(1.0, zeros.max_gamma());
  require_coverage(zeros, choice.T, "spectral");
  const ExplicitPsi e = explicit_psi(cfg.x, choice, zeros);
  out << "zeros_used=" << zeros.up_to(choice.T).size() << '\n'
      << "T=" << format_real(choice.T) << '\n'
      << "explicit_psi=" << format_real(e.value) << '\n'
      << "explicit_minus_psi=" << format_real(e.value - s.psi) << '\n'
      << "error_budget=" << format_real(e.error_budget) << '\n';
  return 0;
}

int cmd_table(const RunConfig& cfg, std::ostream& out) {
  require_output_dir(cfg.out_path);
  const TraceTable table = build_trace_table(cfg.t_max, cfg.workers);
  if (!cfg.cache_path.empty()) {
    emit(cfg.cache_path, out, [&](std::ostream& o) { write_trace_cache(o, table); });
  }
  emit(cfg.out_path, out, [&](std::ostream& o) { write_trace_csv(o, table); });
  return 0;
}

int cmd_explicit(const RunConfig& cfg, std::ostream& out) {
  if (!(cfg.x > 1.0)) throw DomainError("explicit: --x must exceed 1");
  if (!(cfg.T >= 1.0)) throw DomainError("explicit: --T must be >= 1");
  const ZeroTable zeros = load_zeros(cfg);
  TruncationChoice choice;
  choice.capped = !cfg.uncapped;
  choice.T = cfg.T;
  require_coverage(zeros, choice.T, "spectral");
  const ExplicitPsi e = explicit_psi(cfg.x, choice, zeros);
  const TraceTable traces = traces_for(cfg.x, cfg);
  const double exact = psi(cfg.x, traces);
  out << "x=" << format_real(cfg.x) << '\n'
      << "T=" << format_real(cfg.T) << '\n'
      << "mode=" << (choice.capped ? "capped" : "uncapped") << '\n'
      << "explicit_psi=" << format_real(e.value) << '\n'
      << "psi=" << format_real(exact) << '\n'
      << "residual=" << format_real(e.value - exact) << '\n'
      << "error_budget=" << format_real(e.error_budget) << '\n'
      << "normalized_residual=" << format_real(std::abs(e.value - exact) / e.error_budget) << '\n';
  return 0;
}

int cmd_scan(const RunConfig& cfg, std::ostream& out) {
  require_output_dir(cfg.out_path);
  ScanConfig sc;
  sc.x_min = cfg.x_min;
  sc.x_max = cfg.x_max;
  sc.per_decade = cfg.per_decade;
  sc.epsilon = cfg.epsilon;
  sc.capped = !cfg.uncapped;
  sc.T_scale = cfg.T_scale;
  sc.workers = cfg.workers;
  const ZeroTable zeros = load_zeros(cfg);
  const TraceTable traces = traces_for(cfg.x_max, cfg);
  const std::vector<ScanRow> rows = run_error_scan(sc, traces, zeros);
  emit(cfg.out_path, out, [&](std::ostream& o) { write_scan_csv(o, rows); });
  if (!cfg.out_path.empty() && cfg.out_path != "-") {
    const auto exceptional = std::count_if(rows.begin(), rows.end(), [](const ScanRow& r) { return r.exceptional; });
    out << "rows=" << rows.size() << " exceptional=" << exceptional << '\n';
    const RegressionSummary fit = fit_exponent(rows);
    out << "fitted exponent " << format_real(fit.slope) << " over [" << format_real(fit.x_min) << ", "
        << format_real(fit.x_max) << "] from " << fit.points_used << " rows\n";
  }
  return 0;
}

int cmd_exceptional(const RunConfig& cfg, std::ostream& out) {
  require_output_dir(cfg.out_path);
  const ZeroTable zeros = load_zeros(cfg);
  const auto reports =
      run_exceptional_scan(cfg.n_min, cfg.n_max, cfg.epsilon, cfg.samples, zeros, cfg.T_scale, cfg.workers);
  emit(cfg.out_path, out, [&](std::ostream& o) { write_exceptional_csv(o, reports); });
  return 0;
}

int cmd_eq4(const RunConfig& cfg, std::ostream& out) {
  require_output_dir(cfg.out_path);
  const ZeroTable zeros = load_zeros(cfg);
  const auto cells = run_eq4_grid(cfg.n_min, cfg.n_max, cfg.T_list, zeros, cfg.workers);
  emit(cfg.out_path, out, [&](std::ostream& o) { write_eq4_csv(o, cells); });
  return 0;
}

int cmd_gallagher(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.input_path.empty()) {
    std::ifstream in(cfg.input_path);
    if (!in) throw IoError("cannot open '" + cfg.input_path + "'");
    const GallagherCheck c = check_inequality(read_coefficients_csv(in, cfg.theta, cfg.U));
    out << "lhs=" << format_real(c.lhs) << '\n'
        << "rhs=" << format_real(c.rhs) << '\n'
        << (c.holds ? "holds" : "VIOLATED") << '\n';
    return c.holds ? 0 : 1;
  }
  if (cfg.random_count < 1) throw DomainError("gallagher: --random must be >= 1");
  std::mt19937_64 rng(cfg.seed);
  int held = 0;
  double worst = 0.0;
  for (int i = 0; i < cfg.random_count; ++i) {
    const GallagherCheck c = check_inequality(random_spec(rng, cfg.theta, cfg.U));
    held += c.holds ? 1 : 0;
    if (c.rhs > 0.0) worst = std::max(worst, c.lhs / c.rhs);
  }
  out << held << '/' << cfg.random_count << " hold\n"
      << "max lhs/rhs=" << format_real(worst) << '\n';
  return held == cfg.random_count ? 0 : 1;
}

int cmd_validate_zeros(const RunConfig& cfg, std::ostream& out) {
  const ZeroTable zeros = load_zeros(cfg);
  out << "source=" << (zeros.source().empty() ? "(none)" : zeros.source()) << '\n'
      << "zeros=" << zeros.size() << '\n';
  if (zeros.empty()) {
    out << "weyl_ratio=0\nweyl_valid=false\n";
    return 0;
  }
  const double T = zeros.max_gamma();
  const WeylDiagnostic w = weyl_check(zeros, T);
  double window_max = 0.0;
  for (double t = 0.0; t + 1.0 <= T; t += 0.25) window_max = std::max(window_max, unit_window_inverse_sum(zeros, t));
  out << "max_gamma=" << format_real(T) << '\n'
      << "weyl_ratio=" << format_real(w.ratio) << '\n'
      << "weyl_valid=" << (w.valid ? "true" : "false") << '\n'
      << "max_unit_window_inverse_sum=" << format_real(window_max) << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prime geodesic counts and spectral error terms for the modular surface", "geolab"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_zeros = [&](CLI::App* sub) {
    sub->add_option("--zeros", cfg.zeros_path, "zero table file (default: $GEOLAB_ZEROS, then the bundled table)");
  };
  auto add_runtime = [&](CLI::App* sub) {
    sub->add_option("--workers", cfg.workers, "worker threads")->check(CLI::Range(1U, 1024U));
    sub->add_option("--cache", cfg.cache_path, "binary trace-table cache file");
  };

  auto* count = app.add_subcommand("count", "exact counts at x and the explicit-formula comparison");
  count->add_option("--x", cfg.x, "cutoff")->required();
  count->add_option("--T", cfg.T, "zero-sum truncation (default: whole table)");
  add_zeros(count);
  add_runtime(count);

  auto* table = app.add_subcommand("table", "build the trace table and write it as CSV");
  table->add_option("--t-max", cfg.t_max, "largest trace")->required();
  table->add_option("--out", cfg.out_path, "CSV output (default: stdout)");
  add_runtime(table);

  auto* expl = app.add_subcommand("explicit", "truncated explicit formula for psi at x");
  expl->add_option("--x", cfg.x, "cutoff")->required();
  expl->add_option("--T", cfg.T, "truncation height")->required();
  expl->add_flag("--uncapped", cfg.uncapped, "allow T above sqrt(x)/(log x)^2");
  add_zeros(expl);
  add_runtime(expl);

  auto* scan = app.add_subcommand("scan", "error-term scan over a log-uniform grid");
  scan->add_option("--x-min", cfg.x_min, "first grid point")->capture_default_str();
  scan->add_option("--x-max", cfg.x_max, "last grid point")->capture_default_str();
  scan->add_option("--per-decade", cfg.per_decade, "grid points per decade")->capture_default_str();
  scan->add_option("--epsilon", cfg.epsilon, "epsilon")->capture_default_str();
  scan->add_flag("--uncapped", cfg.uncapped, "do not clamp T to the validity window");
  scan->add_option("--T-scale", cfg.T_scale, "constant in front of the optimal T")->capture_default_str();
  scan->add_option("--out", cfg.out_path, "CSV output (default: stdout)");
  add_zeros(scan);
  add_runtime(scan);

  auto* exc = app.add_subcommand("exceptional", "logarithmic measure of the exceptional set per window");
  exc->add_option("--n-min", cfg.n_min, "first window")->capture_default_str();
  exc->add_option("--n-max", cfg.n_max, "last window")->capture_default_str();
  exc->add_option("--epsilon", cfg.epsilon, "epsilon")->capture_default_str();
  exc->add_option("--samples", cfg.samples, "samples per window")->capture_default_str();
  exc->add_option("--T-scale", cfg.T_scale, "constant in front of the optimal T")->capture_default_str();
  exc->add_option("--out", cfg.out_path, "CSV output (default: stdout)");
  add_zeros(exc);
  add_runtime(exc);

  auto* eq4 = app.add_subcommand("eq4", "window mean-square grid");
  eq4->add_option("--n-min", cfg.n_min, "first window")->capture_default_str();
  eq4->add_option("--n-max", cfg.n_max, "last window")->capture_default_str();
  eq4->add_option("--T-list", cfg.T_list, "comma-separated truncation heights")->delimiter(',');
  eq4->add_option("--out", cfg.out_path, "CSV output (default: stdout)");
  add_zeros(eq4);
  add_runtime(eq4);

  auto* gal = app.add_subcommand("gallagher", "check the mean-value inequality for exponential sums");
  auto* input = gal->add_option("--input", cfg.input_path, "CSV with header nu,re,im");
  auto* random = gal->add_option("--random", cfg.random_count, "number of random sums");
  input->excludes(random);
  gal->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  gal->add_option("--theta", cfg.theta, "theta in (0, 1)")->capture_default_str();
  gal->add_option("--U", cfg.U, "half-width of the u interval")->capture_default_str();

  auto* validate = app.add_subcommand("validate-zeros", "load a zero table and report Weyl-law diagnostics");
  add_zeros(validate);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (gal->parsed() && cfg.input_path.empty() && cfg.random_count == 0) {
      throw CLI::ValidationError("gallagher", "one of --input or --random is required");
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    CLI::App* shown = &app;
    for (CLI::App* sub : app.get_subcommands()) shown = sub;
    err << shown->help();
    return 1;
  }

  try {
    if (count->parsed()) return cmd_count(cfg, out);
    if (table->parsed()) return cmd_table(cfg, out);
    if (expl->parsed()) return cmd_explicit(cfg, out);
    if (scan->parsed()) return cmd_scan(cfg, out);
    if (exc->parsed()) return cmd_exceptional(cfg, out);
    if (eq4->parsed()) return cmd_eq4(cfg, out);
    if (gal->parsed()) return cmd_gallagher(cfg, out);
    if (validate->parsed()) return cmd_validate_zeros(cfg, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
  err << app.help();
  return 1;
}

}  // namespace geolab
