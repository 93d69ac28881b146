// tensorord: simulate tensor samples, estimate latent orders, run studies.
//
// Exit codes: 0 success, 1 I/O or format failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tensorord/augment.hpp"
#include "tensorord/errors.hpp"
#include "tensorord/ladle.hpp"
#include "tensorord/report.hpp"
#include "tensorord/simgen.hpp"
#include "tensorord/study.hpp"
#include "tensorord/tensor_io.hpp"

namespace fs = std::filesystem;
using namespace tensorord;

namespace {

constexpr int kIoFailure = 1;
constexpr int kUsageError = 2;

// "out/run" and "out/run.json" both name the pair out/run.json + out/run.csv.
fs::path output_base(const fs::path& p) {
  fs::path base = p;
  if (base.extension() == ".json" || base.extension() == ".csv") base.replace_extension();
  return base;
}

fs::path with_suffix(const fs::path& base, const char* ext) { return fs::path(base.string() + ext); }

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

template <typename Fn>
void write_text(const fs::path& path, Fn&& fn) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  fn(out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct SimulateArgs {
  std::vector<std::size_t> dims{5, 15, 20};
  std::vector<std::size_t> latent{3, 5, 10};
  std::size_t n = 1000;
  double sigma2 = 0.1;
  std::vector<double> core_spectra;
  std::optional<double> core_dof;
  std::optional<double> core_variance;
  std::uint64_t seed = 0;
  std::string output;
};

SimModelSpec build_spec(const SimulateArgs& a) {
  SimModelSpec spec = SimModelSpec::benchmark(a.sigma2, a.n, a.seed);
  const bool is_benchmark = a.dims == spec.dims && a.latent == spec.latent;
  if (!is_benchmark) {
    // Generic model: identity core mixing and unit-variance core unless given.
    spec.dims = a.dims;
    spec.latent = a.latent;
    spec.core_variance = 1.0;
    spec.core_spectra.clear();
    if (a.latent.size() != a.dims.size()) throw ArgumentError("--latent must have one entry per --dims entry");
    for (std::size_t d : a.latent) spec.core_spectra.push_back(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(d)));
  }
  if (!a.core_spectra.empty()) {
    std::size_t need = 0;
    for (std::size_t d : a.latent) need += d;
    if (a.core_spectra.size() != need)
      throw ArgumentError("--core-spectra needs sum(latent) = " + std::to_string(need) + " values");
    spec.core_spectra.clear();
    std::size_t at = 0;
    for (std::size_t d : a.latent) {
      spec.core_spectra.push_back(
          Eigen::Map<const Eigen::VectorXd>(a.core_spectra.data() + at, static_cast<Eigen::Index>(d)));
      at += d;
    }
  }
  if (a.core_dof) spec.core_dof = *a.core_dof;
  if (a.core_variance) spec.core_variance = *a.core_variance;
  spec.validate();
  return spec;
}

struct EstimateArgs {
  std::string input;
  std::string output;
  std::string estimator = "augment";
  std::vector<std::size_t> r{10};
  std::vector<std::size_t> s;
  double quantile = 0.3;
  std::string noise_method = "quantile";
  std::string sampler = "reduced";
  std::string bound = "adaptive";
  bool zero_origin = false;
  std::uint64_t seed = 0;
};

SearchBoundRule parse_bound(const std::string& s) { return s == "full" ? SearchBoundRule::full : SearchBoundRule::adaptive; }

int run_estimate(const EstimateArgs& a) {
  const Estimator estimator = parse_estimator(a.estimator);
  // Validate everything before touching the input.
  AugmentConfig ac;
  LadleConfig lc;
  if (estimator == Estimator::augment) {
    ac.r = a.r;
    if (!a.s.empty()) ac.s = a.s;
    ac.noise = NoiseMethod::parse(a.noise_method, a.quantile);
    ac.sampler = a.sampler == "literal" ? AugmentSampler::literal : AugmentSampler::reduced;
    ac.seed = a.seed;
  } else {
    if (!a.s.empty()) lc.s = a.s;
    lc.bound = parse_bound(a.bound);
    lc.zero_origin = a.zero_origin;
    lc.seed = a.seed;
  }

  const TensorSample sample = load_sample(a.input);
  const fs::path base = output_base(a.output);
  nlohmann::json report;
  if (estimator == Estimator::augment) {
    ac.validate(sample.order());
    const AugmentReport r = estimate_orders(sample, ac);
    report = report_json(r, ac);
    write_text(with_suffix(base, ".csv"), [&](std::ostream& out) { write_curves_csv(out, r); });
  } else {
    lc.validate(sample.order());
    const LadleReport r = estimate_orders_ladle(sample, lc);
    report = report_json(r, lc);
    write_text(with_suffix(base, ".csv"), [&](std::ostream& out) { write_curves_csv(out, r); });
  }
  write_json(with_suffix(base, ".json"), report);
  std::cout << "d_hat = " << report["d_hat"].dump() << '\n';
  return 0;
}

struct StudyArgs {
  std::string output;
  std::string estimator = "augment";
  std::vector<double> sigma2;
  std::vector<std::size_t> r;
  std::vector<double> quantile;
  std::string noise_method = "quantile";
  std::optional<std::size_t> s;
  std::optional<std::size_t> reps;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  bool paper_scale = false;
  bool quiet = false;
};

int run_study_cmd(const StudyArgs& a) {
  StudyConfig c;
  c.estimator = parse_estimator(a.estimator);
  if (a.paper_scale) {
    c.reps = 1000;
    c.s = 50;
    c.r = {1, 5, 10, 25, 50};
    c.quantile = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  }
  if (!a.sigma2.empty()) c.sigma2 = a.sigma2;
  if (!a.r.empty()) c.r = a.r;
  if (!a.quantile.empty()) c.quantile = a.quantile;
  if (a.noise_method == "min") {
    c.quantile = {0.0};
  } else {
    c.noise_kind = NoiseMethod::parse(a.noise_method, 0.5).kind;
  }
  if (a.reps) c.reps = *a.reps;
  if (a.s) (c.estimator == Estimator::ladle ? c.ladle_s : c.s) = *a.s;
  c.n = a.n;
  c.seed = a.seed;
  c.threads = a.threads;
  c.validate();

  const StudyResult result = run_study(c, [&](std::size_t done, std::size_t total) {
    if (!a.quiet) std::cerr << "\rrepetition " << done << '/' << total << std::flush;
  });
  if (!a.quiet) std::cerr << '\n';

  const fs::path base = output_base(a.output);
  write_json(with_suffix(base, ".json"), study_json(result));
  write_text(with_suffix(base, ".csv"), [&](std::ostream& out) { write_study_csv(out, result); });
  for (const auto& cell : result.cells) {
    std::cout << "sigma2=" << cell.sigma2 << ' ' << estimator_name(cell.estimator);
    if (cell.estimator == Estimator::augment) std::cout << " r=" << cell.r << " q=" << cell.quantile;
    std::cout << "  exact=" << cell.frequency(result.truth) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent order estimation for tensor-valued samples"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Draw a sample from the noisy Tucker model");
  simulate->add_option("--dims", sim.dims, "Observation dimensions")->delimiter(',')->capture_default_str();
  simulate->add_option("--latent", sim.latent, "Latent dimensions")->delimiter(',')->capture_default_str();
  simulate->add_option("--n", sim.n, "Sample size")->capture_default_str();
  simulate->add_option("--sigma2", sim.sigma2, "Noise variance")->capture_default_str();
  simulate->add_option("--core-spectra", sim.core_spectra, "Diagonals of D_k, concatenated over modes")->delimiter(',');
  simulate->add_option("--core-dof", sim.core_dof, "Student-t degrees of freedom of the core");
  simulate->add_option("--core-variance", sim.core_variance, "Per-entry core variance");
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--output", sim.output, "Sample file (TOF1); the spec goes to <output>.json")->required();

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate latent orders of a sample file");
  estimate->add_option("--input", est.input, "Sample file (TOF1)")->required()->check(CLI::ExistingFile);
  estimate->add_option("--output", est.output, "Output base; writes <base>.json and <base>.csv")->required();
  estimate->add_option("--estimator", est.estimator)->check(CLI::IsMember({"augment", "ladle"}))->capture_default_str();
  estimate->add_option("--r", est.r, "Augmentation rows, one value or one per mode")->delimiter(',')->capture_default_str();
  estimate->add_option("--s", est.s, "Replicates (augment, default 50) or bootstrap samples (ladle, default 200)")
      ->delimiter(',');
  estimate->add_option("--quantile", est.quantile, "Noise-variance quantile")->capture_default_str();
  estimate->add_option("--noise-method", est.noise_method)
      ->check(CLI::IsMember({"quantile", "tail-mean", "min"}))
      ->capture_default_str();
  estimate->add_option("--sampler", est.sampler, "Augmented scatter sampler")
      ->check(CLI::IsMember({"reduced", "literal"}))
      ->capture_default_str();
  estimate->add_option("--bound", est.bound, "Ladle search bound")
      ->check(CLI::IsMember({"adaptive", "full"}))
      ->capture_default_str();
  estimate->add_flag("--zero-origin", est.zero_origin, "Ladle: pin g_B(0) to 0");
  estimate->add_option("--seed", est.seed)->capture_default_str();

  std::string curves_input, curves_output;
  auto* curves = app.add_subcommand("curves", "Export mode and pooled eigenvalue spectra as CSV");
  curves->add_option("--input", curves_input, "Sample file (TOF1)")->required()->check(CLI::ExistingFile);
  curves->add_option("--output", curves_output, "CSV path")->required();

  StudyArgs st;
  auto* study = app.add_subcommand("study", "Monte Carlo study over the benchmark model");
  study->add_option("--output", st.output, "Output base; writes <base>.json and <base>.csv")->required();
  study->add_option("--estimator", st.estimator)->check(CLI::IsMember({"augment", "ladle"}))->capture_default_str();
  study->add_option("--sigma2", st.sigma2, "Noise variance grid (default 0.1,0.5,1.0)")->delimiter(',');
  study->add_option("--r", st.r, "Augmentation row grid (default 10)")->delimiter(',');
  study->add_option("--quantile", st.quantile, "Quantile grid (default 0.3); 0 means the minimum")->delimiter(',');
  study->add_option("--noise-method", st.noise_method)
      ->check(CLI::IsMember({"quantile", "tail-mean", "min"}))
      ->capture_default_str();
  study->add_option("--s", st.s, "Replicates (augment, default 20) or bootstrap samples (ladle, default 200)");
  study->add_option("--reps", st.reps, "Repetitions per cell (default 100)");
  study->add_option("--n", st.n)->capture_default_str();
  study->add_option("--seed", st.seed)->capture_default_str();
  study->add_option("--threads", st.threads)->capture_default_str();
  study->add_flag("--paper-scale", st.paper_scale, "1000 repetitions, s = 50, full r and quantile grids");
  study->add_flag("--quiet", st.quiet, "No progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*simulate) {
      const SimModelSpec spec = build_spec(sim);
      save_sample(sim.output, generate(spec));
      write_json(with_suffix(sim.output, ".json"), to_json(spec));
      return 0;
    }
    if (*estimate) return run_estimate(est);
    if (*curves) {
      const TensorSample sample = center(load_sample(curves_input));
      const auto spectra = mode_spectra(sample);
      write_text(curves_output, [&](std::ostream& out) { write_spectra_csv(out, spectra); });
      return 0;
    }
    if (*study) return run_study_cmd(st);
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoFailure;
  }
  return 0;
}
