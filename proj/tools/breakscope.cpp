#include "breakscope/csv_io.hpp"
#include "breakscope/error.hpp"
#include "breakscope/report.hpp"
#include "breakscope/sim_lab.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

namespace bs = breakscope;

namespace {

void apply_thread_override() {
  if (const char* env = std::getenv("BREAKSCOPE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw bs::Error(bs::ErrorKind::IoError, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw bs::Error(bs::ErrorKind::IoError, "write to " + path + " failed");
}

struct DetectArgs {
  std::string input;
  std::string out;
  std::optional<bs::Index> breaks;
  bs::Index max_breaks = 5;
  std::optional<bs::Index> factors;
  bs::Index max_factors = 12;
  std::optional<bs::Index> min_spacing;
  bool standardize = true;
  bool transpose = false;
  bool no_header = false;
  bs::CsvOptions::DateColumn date_column = bs::CsvOptions::DateColumn::Auto;
  bool impute_mean = false;
  std::uint64_t seed = 0;
  bool quiet = false;
};

int run_detect(const DetectArgs& a) {
  bs::CsvOptions csv;
  csv.has_header = !a.no_header;
  csv.date_column = a.date_column;
  csv.impute_mean = a.impute_mean;
  csv.transpose = a.transpose;
  bs::LoadedPanel loaded = bs::load_csv(a.input, csv);
  for (const auto& w : loaded.warnings) std::cerr << "WARNING: " << w << '\n';

  bs::DetectOptions opts;
  opts.breaks = a.breaks;
  opts.max_breaks = a.max_breaks;
  opts.factors = a.factors;
  opts.max_factors = a.max_factors;
  opts.min_spacing = a.min_spacing;
  opts.standardize = a.standardize;
  opts.seed = a.seed;
  bs::DetectionReport report = bs::run_detection(loaded.panel, opts, a.input);
  report.warnings.insert(report.warnings.begin(), loaded.warnings.begin(), loaded.warnings.end());

  if (!a.out.empty()) write_text(a.out, bs::to_json(report).dump(2) + "\n");
  if (!a.quiet) std::cout << bs::human_summary(report);
  return 0;
}

struct SimulateArgs {
  std::string scheme = "dgp1b";
  bs::SimulationSpec spec;
  std::optional<bs::Index> r0;
  bs::Index reps = 200;
  bool select = false;
  bs::Index m_max = 5;
  bs::Index min_spacing = 0;
  std::string out_csv;
  std::string out_json;
};

bs::SimulationSpec resolve_spec(const SimulateArgs& a) {
  bs::SimulationSpec spec = a.spec;
  spec.scheme = bs::parse_scheme(a.scheme);
  spec.r0 = a.r0.value_or(spec.scheme == bs::SchemeKind::IndependentRegimes ? 2 : 3);
  spec.validate();
  return spec;
}

int run_simulate(const SimulateArgs& a) {
  const bs::SimulationSpec spec = resolve_spec(a);
  if (a.reps < 1) throw bs::Error(bs::ErrorKind::InvalidArgument, "--reps must be at least 1");
  const bs::MetricsTable table = a.select ? bs::selection_experiment(spec, a.reps, a.m_max, a.min_spacing)
                                          : bs::monte_carlo(spec, a.reps, true, spec.m0, a.min_spacing);
  std::ostringstream csv;
  bs::write_metrics_csv({table}, csv);
  if (!a.out_csv.empty()) write_text(a.out_csv, csv.str());
  if (!a.out_json.empty()) write_text(a.out_json, bs::to_json(table).dump(2) + "\n");
  if (a.out_csv.empty()) std::cout << csv.str();
  return 0;
}

int run_generate(const SimulateArgs& a, const std::string& out) {
  const bs::SimulationSpec spec = resolve_spec(a);
  const bs::SimulatedTruth truth = bs::simulate_panel(spec);
  if (out.empty()) {
    bs::write_csv(truth.panel, std::cout);
  } else {
    bs::save_csv(truth.panel, out);
  }
  std::cerr << "true breaks:";
  for (bs::Index k : truth.true_breaks) std::cerr << ' ' << k;
  std::cerr << " (r=" << truth.r_pseudo << ")\n";
  return 0;
}

void add_spec_options(CLI::App* cmd, SimulateArgs& a) {
  cmd->add_option("--scheme", a.scheme, "dgp1a, dgp1b, dgp1c, dgp1d, dgp1e or dgp3")->capture_default_str();
  cmd->add_option("--n", a.spec.n, "number of series")->capture_default_str();
  cmd->add_option("--t", a.spec.periods, "number of periods")->capture_default_str();
  cmd->add_option("--m0", a.spec.m0, "number of true breaks")->capture_default_str();
  cmd->add_option("--r0", a.r0, "factors per regime (default 3, or 2 for dgp3)");
  cmd->add_option("--fractions", a.spec.break_fractions, "break fractions in (0,1)");
  cmd->add_option("--rho", a.spec.rho, "factor AR(1) coefficient")->capture_default_str();
  cmd->add_option("--alpha", a.spec.alpha, "idiosyncratic AR(1) coefficient")->capture_default_str();
  cmd->add_option("--beta", a.spec.beta, "cross-sectional correlation decay")->capture_default_str();
  cmd->add_option("--b", a.spec.b, "dgp1a mean-loading shift")->capture_default_str();
  cmd->add_option("--seed", a.spec.seed, "base seed")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_override();

  CLI::App app{"Structural breaks in factor loadings"};
  app.require_subcommand(1);

  DetectArgs detect;
  auto* det = app.add_subcommand("detect", "detect, count and classify loading breaks in a CSV panel");
  det->add_option("input", detect.input, "CSV file, rows are periods")->required();
  auto* opt_breaks = det->add_option("--breaks", detect.breaks, "known number of breaks");
  det->add_option("--max-breaks", detect.max_breaks, "largest m considered by the criterion")
      ->capture_default_str()
      ->excludes(opt_breaks);
  auto* opt_factors = det->add_option("--factors", detect.factors, "known number of pseudo-factors");
  det->add_option("--max-factors", detect.max_factors, "largest factor count considered by IC2")
      ->capture_default_str()
      ->excludes(opt_factors);
  det->add_option("--min-spacing", detect.min_spacing, "minimum regime length (default max(20, r+2))");
  det->add_flag("--standardize,!--no-standardize", detect.standardize, "demean and scale each series (default on)");
  det->add_flag("--transpose", detect.transpose, "rows are series, columns are periods");
  det->add_flag("--no-header", detect.no_header, "first row is data");
  const std::map<std::string, bs::CsvOptions::DateColumn> date_map{{"auto", bs::CsvOptions::DateColumn::Auto},
                                                                    {"none", bs::CsvOptions::DateColumn::None},
                                                                    {"first", bs::CsvOptions::DateColumn::First}};
  det->add_option("--date-column", detect.date_column, "auto, none or first")
      ->transform(CLI::CheckedTransformer(date_map, CLI::ignore_case));
  det->add_flag("--impute-mean", detect.impute_mean, "fill missing cells with column means");
  det->add_option("--seed", detect.seed, "reserved; the pipeline is deterministic");
  det->add_option("--out", detect.out, "write the JSON report here");
  det->add_flag("--quiet", detect.quiet, "suppress the summary on standard output");

  SimulateArgs sim;
  auto* simc = app.add_subcommand("simulate", "Monte Carlo break-date accuracy or detection rate");
  add_spec_options(simc, sim);
  simc->add_option("--reps", sim.reps, "replications")->capture_default_str();
  simc->add_flag("--select", sim.select, "select m by the criterion and report the detection rate");
  simc->add_option("--m-max", sim.m_max, "largest m in selection runs")->capture_default_str();
  simc->add_option("--min-spacing", sim.min_spacing, "minimum regime length (0: max(r+2, ceil(T/10)))")
      ->capture_default_str();
  simc->add_option("--out-csv", sim.out_csv, "metrics CSV (default: standard output)");
  simc->add_option("--out-json", sim.out_json, "metrics JSON");

  SimulateArgs gen;
  std::string gen_out;
  auto* genc = app.add_subcommand("generate", "write one simulated panel as CSV");
  add_spec_options(genc, gen);
  genc->add_option("--out", gen_out, "CSV path (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return bs::exit_code(bs::ErrorClass::Usage);
  }

  try {
    if (det->parsed()) return run_detect(detect);
    if (simc->parsed()) return run_simulate(sim);
    return run_generate(gen, gen_out);
  } catch (const bs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return bs::exit_code(bs::classify(e.kind()));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return bs::exit_code(bs::ErrorClass::Numerical);
  }
}
