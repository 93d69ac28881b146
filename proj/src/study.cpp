#include "tensorord/study.hpp"

#include <atomic>
#include <chrono>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

#include "tensorord/errors.hpp"

namespace tensorord {

namespace {

constexpr std::uint64_t kDataTag = 0x64617461;  // "data"
constexpr std::uint64_t kFitTag = 0x666974;     // "fit"

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

struct RepOutcome {
  std::vector<std::vector<std::size_t>> d_hat;  // per cell
  std::vector<double> seconds;                  // per cell
};

std::vector<StudyCell> make_cells(const StudyConfig& c) {
  std::vector<StudyCell> cells;
  for (double sigma2 : c.sigma2) {
    if (c.estimator == Estimator::ladle) {
      cells.push_back({sigma2, Estimator::ladle, 0, 0.0, {}, 0.0});
      continue;
    }
    for (std::size_t r : c.r)
      for (double q : c.quantile) cells.push_back({sigma2, Estimator::augment, r, q, {}, 0.0});
  }
  return cells;
}

// Every cell at one noise level applied to one simulated dataset.
void run_repetition(const StudyConfig& config, const std::vector<StudyCell>& cells, double sigma2, std::size_t rep,
                    RepOutcome& out) {
  const std::uint64_t data_seed = derive_seed(derive_seed(config.seed, kDataTag), rep);
  const TensorSample centered = center(generate(SimModelSpec::benchmark(sigma2, config.n, data_seed)));
  const std::vector<ModeSpectrum> spectra = mode_spectra(centered);
  const std::uint64_t fit_seed = derive_seed(data_seed, kFitTag);

  for (std::size_t c = 0; c < cells.size(); ++c) {
    const StudyCell& cell = cells[c];
    if (cell.sigma2 != sigma2) continue;
    const auto start = Clock::now();
    std::vector<std::size_t> d;
    if (cell.estimator == Estimator::augment) {
      AugmentConfig ac;
      ac.r = {cell.r};
      ac.s = {config.s};
      // q = 0 is the sample minimum.
      ac.noise = cell.quantile == 0.0 ? NoiseMethod::minimum() : NoiseMethod{config.noise_kind, cell.quantile};
      ac.seed = fit_seed;
      for (std::size_t k = 0; k < spectra.size(); ++k) d.push_back(augment_mode(centered, spectra, k, ac).d_hat);
    } else {
      LadleConfig lc;
      lc.s = {config.ladle_s};
      lc.seed = fit_seed;
      lc.bound = config.ladle_bound;
      for (std::size_t k = 0; k < spectra.size(); ++k) d.push_back(ladle_mode(centered, spectra[k], k, lc).d_hat);
    }
    out.d_hat[c] = std::move(d);
    out.seconds[c] = since(start);
  }
}

}  // namespace

std::string estimator_name(Estimator e) { return e == Estimator::ladle ? "ladle" : "augment"; }

Estimator parse_estimator(const std::string& name) {
  if (name == "augment") return Estimator::augment;
  if (name == "ladle") return Estimator::ladle;
  throw ArgumentError("unknown estimator '" + name + "' (expected augment or ladle)");
}

void StudyConfig::validate() const {
  if (reps < 1) throw ArgumentError("study needs at least one repetition");
  if (n < 2) throw ArgumentError("sample size n must be at least 2");
  if (sigma2.empty()) throw ArgumentError("sigma2 grid is empty");
  for (double v : sigma2)
    if (!(v >= 0.0)) throw ArgumentError("sigma2 values must be non-negative");
  if (estimator == Estimator::augment) {
    if (r.empty() || quantile.empty()) throw ArgumentError("r and quantile grids must be non-empty");
    for (std::size_t v : r)
      if (v < 1) throw ArgumentError("r must be at least 1");
    for (double q : quantile)
      if (!(q >= 0.0 && q < 1.0)) throw ArgumentError("quantile must be 0 (minimum) or lie in (0, 1)");
    if (s < 1) throw ArgumentError("s must be at least 1");
  } else if (ladle_s < 1) {
    throw ArgumentError("ladle s must be at least 1");
  }
  if (threads < 1) throw ArgumentError("threads must be at least 1");
}

std::size_t StudyCell::total() const {
  std::size_t t = 0;
  for (const auto& [key, count] : histogram) t += count;
  return t;
}

double StudyCell::frequency(const std::vector<std::size_t>& d_hat) const {
  const auto it = histogram.find(d_hat);
  return it == histogram.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total());
}

double StudyCell::mode_frequency(std::size_t k, std::size_t value) const {
  std::size_t hits = 0;
  for (const auto& [key, count] : histogram)
    if (key.at(k) == value) hits += count;
  return static_cast<double>(hits) / static_cast<double>(total());
}

double StudyCell::mode_below(std::size_t k, std::size_t value) const {
  std::size_t hits = 0;
  for (const auto& [key, count] : histogram)
    if (key.at(k) < value) hits += count;
  return static_cast<double>(hits) / static_cast<double>(total());
}

StudyResult run_study(const StudyConfig& config, const StudyProgress& progress) {
  config.validate();
  const auto start = Clock::now();
  StudyResult result;
  result.config = config;
  result.truth = SimModelSpec::benchmark(0.1, config.n, 0).latent;
  result.cells = make_cells(config);

  const std::size_t total = config.sigma2.size() * config.reps;
  std::size_t done = 0;
  std::mutex progress_mutex;

  for (double sigma2 : config.sigma2) {
    std::vector<RepOutcome> outcomes(config.reps);
    for (auto& o : outcomes) {
      o.d_hat.resize(result.cells.size());
      o.seconds.resize(result.cells.size());
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t rep; (rep = next.fetch_add(1)) < config.reps;) {
        run_repetition(config, result.cells, sigma2, rep, outcomes[rep]);
        if (progress) {
          std::lock_guard lock(progress_mutex);
          progress(++done, total);
        }
      }
    };
    const std::size_t workers = std::min(config.threads, config.reps);
    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    }

    for (std::size_t c = 0; c < result.cells.size(); ++c) {
      if (result.cells[c].sigma2 != sigma2) continue;
      for (const auto& o : outcomes) {
        ++result.cells[c].histogram[o.d_hat[c]];
        result.cells[c].seconds += o.seconds[c];
      }
    }
  }
  result.seconds = since(start);
  return result;
}

nlohmann::json study_json(const StudyResult& result) {
  const StudyConfig& c = result.config;
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : result.cells) {
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& [d, count] : cell.histogram)
      hist.push_back({{"d_hat", d}, {"count", count}, {"frequency", static_cast<double>(count) / c.reps}});
    nlohmann::json j{{"sigma2", cell.sigma2},
                     {"estimator", estimator_name(cell.estimator)},
                     {"exact_frequency", cell.frequency(result.truth)},
                     {"histogram", hist},
                     {"seconds", cell.seconds}};
    if (cell.estimator == Estimator::augment) {
      j["r"] = cell.r;
      j["quantile"] = cell.quantile;
    }
    cells.push_back(std::move(j));
  }
  nlohmann::json config{{"estimator", estimator_name(c.estimator)},
                        {"sigma2", c.sigma2},
                        {"reps", c.reps},
                        {"n", c.n},
                        {"seed", c.seed},
                        {"threads", c.threads}};
  if (c.estimator == Estimator::augment) {
    config["r"] = c.r;
    config["quantile"] = c.quantile;
    config["s"] = c.s;
    config["noise_method"] = NoiseMethod{c.noise_kind, 0.0}.name();
  } else {
    config["s"] = c.ladle_s;
    config["bound"] = c.ladle_bound == SearchBoundRule::full ? "full" : "adaptive";
  }
  return {{"schema", kStudySchema},
          {"config", config},
          {"truth", result.truth},
          {"cells", cells},
          {"timing", {{"total_seconds", result.seconds}, {"mean_seconds_per_rep", result.seconds / static_cast<double>(c.reps * c.sigma2.size())}}}};
}

void write_study_csv(std::ostream& out, const StudyResult& result) {
  out << "# schema: " << kStudySchema << '\n' << "# seed: " << result.config.seed << '\n';
  out << "cell,sigma2,estimator,r,quantile";
  for (std::size_t k = 0; k < result.truth.size(); ++k) out << ",d" << k + 1;
  out << ",count,frequency\n" << std::setprecision(10);
  for (std::size_t c = 0; c < result.cells.size(); ++c) {
    const StudyCell& cell = result.cells[c];
    for (const auto& [d, count] : cell.histogram) {
      out << c + 1 << ',' << cell.sigma2 << ',' << estimator_name(cell.estimator) << ',' << cell.r << ','
          << cell.quantile;
      for (std::size_t v : d) out << ',' << v;
      out << ',' << count << ',' << static_cast<double>(count) / static_cast<double>(result.config.reps) << '\n';
    }
  }
}

}  // namespace tensorord
