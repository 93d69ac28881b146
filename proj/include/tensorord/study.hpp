#pragma once

// Monte Carlo study over the benchmark model: for every noise level, R datasets
// are simulated and every estimator cell is applied to each of them. Dataset
// seeds depend on (seed, repetition) only, so cells sharing a noise level see
// the same data and results do not depend on the worker count.

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "tensorord/augment.hpp"
#include "tensorord/ladle.hpp"
#include "tensorord/simgen.hpp"

namespace tensorord {

inline constexpr const char* kStudySchema = "tensorord.study/1";

enum class Estimator { augment, ladle };

std::string estimator_name(Estimator e);
Estimator parse_estimator(const std::string& name);

struct StudyConfig {
  Estimator estimator = Estimator::augment;
  std::vector<double> sigma2{0.1, 0.5, 1.0};
  std::vector<std::size_t> r{10};       // augment only
  std::vector<double> quantile{0.3};    // augment only
  NoiseMethod::Kind noise_kind = NoiseMethod::Kind::quantile;
  std::size_t reps = 100;
  std::size_t n = 1000;
  std::size_t s = 20;                   // augmentation replicates
  std::size_t ladle_s = 200;            // bootstrap samples
  SearchBoundRule ladle_bound = SearchBoundRule::full;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void validate() const;
};

struct StudyCell {
  double sigma2 = 0.0;
  Estimator estimator = Estimator::augment;
  std::size_t r = 0;      // 0 for the ladle
  double quantile = 0.0;  // 0 for the ladle
  std::map<std::vector<std::size_t>, std::size_t> histogram;
  double seconds = 0.0;  // estimator time summed over repetitions

  std::size_t total() const;
  double frequency(const std::vector<std::size_t>& d_hat) const;
  // Fraction of repetitions whose estimate for mode k equals value.
  double mode_frequency(std::size_t k, std::size_t value) const;
  // Fraction of repetitions whose estimate for mode k is below value.
  double mode_below(std::size_t k, std::size_t value) const;
};

struct StudyResult {
  StudyConfig config;
  std::vector<std::size_t> truth;
  std::vector<StudyCell> cells;
  double seconds = 0.0;
};

using StudyProgress = std::function<void(std::size_t done, std::size_t total)>;

StudyResult run_study(const StudyConfig& config, const StudyProgress& progress = {});

nlohmann::json study_json(const StudyResult& result);
// Rows cell,sigma2,estimator,r,quantile,d1,d2,d3,count,frequency.
void write_study_csv(std::ostream& out, const StudyResult& result);

}  // namespace tensorord
