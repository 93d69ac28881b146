#include "tensorord/report.hpp"

#include <iomanip>
#include <numeric>
#include <ostream>

namespace tensorord {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::string sampler_name(AugmentSampler s) { return s == AugmentSampler::literal ? "literal" : "reduced"; }

nlohmann::json sample_json(std::size_t n, const Dims& dims) { return {{"n", n}, {"dims", dims}}; }

nlohmann::json timing_json(const std::vector<double>& seconds) {
  return {{"per_mode_seconds", seconds}, {"total_seconds", std::accumulate(seconds.begin(), seconds.end(), 0.0)}};
}

void write_row(std::ostream& out, std::size_t mode, Eigen::Index index, double a, double b, double c) {
  out << mode << ',' << index << ',' << a << ',' << b << ',' << c << '\n';
}

}  // namespace

nlohmann::json to_json(const AugmentConfig& config) {
  nlohmann::json j{{"estimator", "augment"},
                   {"r", config.r},
                   {"s", config.s},
                   {"noise_method", config.noise.name()},
                   {"seed", config.seed},
                   {"sampler", sampler_name(config.sampler)}};
  if (config.noise.kind != NoiseMethod::Kind::minimum) j["quantile"] = config.noise.q;
  return j;
}

nlohmann::json to_json(const LadleConfig& config) {
  return {{"estimator", "ladle"},
          {"s", config.s},
          {"seed", config.seed},
          {"bound", config.bound == SearchBoundRule::full ? "full" : "adaptive"},
          {"zero_origin", config.zero_origin}};
}

nlohmann::json to_json(const SimModelSpec& spec) {
  nlohmann::json core = nlohmann::json::array();
  for (const auto& d : spec.core_spectra) core.push_back(to_vector(d));
  return {{"schema", kSimSpecSchema}, {"dims", spec.dims},         {"latent", spec.latent},
          {"n", spec.n},              {"sigma2", spec.sigma2},     {"core_spectra", core},
          {"core_dof", spec.core_dof}, {"core_variance", spec.core_variance}, {"seed", spec.seed}};
}

nlohmann::json report_json(const AugmentReport& report, const AugmentConfig& config) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& c : report.modes) {
    modes.push_back({{"k", c.mode + 1},
                     {"d_hat", c.d_hat},
                     {"sigma2_hat", c.sigma2_hat},
                     {"curves",
                      {{"phi", to_vector(c.phi)},
                       {"f", to_vector(c.f)},
                       {"g", to_vector(c.g)},
                       {"lambda_hat", to_vector(c.lambda_hat)}}}});
  }
  return {{"schema", kReportSchema},
          {"config", to_json(config)},
          {"sample", sample_json(report.n, report.dims)},
          {"d_hat", report.d_hat()},
          {"modes", modes},
          {"timing", timing_json(report.seconds)}};
}

nlohmann::json report_json(const LadleReport& report, const LadleConfig& config) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& c : report.modes) {
    modes.push_back({{"k", c.mode + 1},
                     {"d_hat", c.d_hat},
                     {"q_k", c.q},
                     {"curves", {{"phiB", to_vector(c.phi)}, {"fB", to_vector(c.f)}, {"gB", to_vector(c.g)}}}});
  }
  return {{"schema", kReportSchema},
          {"config", to_json(config)},
          {"sample", sample_json(report.n, report.dims)},
          {"d_hat", report.d_hat()},
          {"modes", modes},
          {"timing", timing_json(report.seconds)}};
}

void write_curves_csv(std::ostream& out, const AugmentReport& report) {
  out << "# schema: " << kCurvesSchema << '\n' << "mode,index,phi,f,g\n" << std::setprecision(17);
  for (const auto& c : report.modes)
    for (Eigen::Index i = 0; i < c.g.size(); ++i) write_row(out, c.mode + 1, i, c.phi(i), c.f(i), c.g(i));
}

void write_curves_csv(std::ostream& out, const LadleReport& report) {
  out << "# schema: " << kCurvesSchema << '\n' << "mode,index,phiB,fB,gB\n" << std::setprecision(17);
  for (const auto& c : report.modes)
    for (Eigen::Index i = 0; i < c.g.size(); ++i) write_row(out, c.mode + 1, i, c.phi(i), c.f(i), c.g(i));
}

void write_spectra_csv(std::ostream& out, std::span<const ModeSpectrum> spectra) {
  out << "# schema: " << kSpectraSchema << '\n' << "kind,mode,index,value\n" << std::setprecision(17);
  for (const auto& s : spectra)
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
      out << "eigenvalue," << s.mode + 1 << ',' << i + 1 << ',' << s.eigenvalues(i) << '\n';
  for (std::size_t k = 0; k < spectra.size(); ++k) {
    const auto pooled = pooled_scaled_eigenvalues(spectra, k);
    for (std::size_t i = 0; i < pooled.values.size(); ++i)
      out << "pooled," << k + 1 << ',' << i + 1 << ',' << pooled.values[i] << '\n';
  }
}

}  // namespace tensorord
