#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tensorord/report.hpp"
#include "tensorord/simgen.hpp"
#include "tensorord/study.hpp"
#include "tensorord/tensor_io.hpp"

using namespace tensorord;

namespace {

std::size_t count_data_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') ++rows;
  return rows - 1;  // header
}

}  // namespace

TEST_CASE("TOF1 roundtrip") {
  const Tensor t({2, 3, 1}, {1.5, -2, 3e-300, 4, 5, 1e300});
  std::stringstream buf;
  write_tof1(buf, t);
  const std::string bytes = buf.str();
  CHECK(bytes.size() == 4 + 1 + 3 * 4 + 6 * 8);
  CHECK(bytes.substr(0, 4) == "TOF1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 3);
  CHECK(static_cast<unsigned char>(bytes[5]) == 2);  // little-endian u32
  CHECK(read_tof1(buf) == t);
}

TEST_CASE("TOF1 rejects malformed input") {
  const Tensor t({2, 2}, {1, 2, 3, 4});
  std::stringstream good;
  write_tof1(good, t);
  const std::string bytes = good.str();

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::istringstream a(bad_magic);
  CHECK_THROWS_AS(read_tof1(a), FormatError);

  std::istringstream b(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_tof1(b), FormatError);

  std::istringstream c(bytes.substr(0, 6));
  CHECK_THROWS_AS(read_tof1(c), FormatError);

  std::string zero_dim = bytes;
  zero_dim[5] = 0;
  std::istringstream d(zero_dim);
  CHECK_THROWS_AS(read_tof1(d), FormatError);
}

TEST_CASE("sample files") {
  const TensorSample s = generate(SimModelSpec::benchmark(0.1, 7, 2));
  const Tensor stacked = stack_sample(s);
  CHECK(stacked.dims() == Dims{7, 5, 15, 20});
  const TensorSample back = unstack_sample(stacked);
  for (std::size_t i = 0; i < 7; ++i) CHECK(back[i] == s[i]);

  const auto path = std::filesystem::temp_directory_path() / "tensorord_io_test.tof";
  save_sample(path, s);
  const TensorSample loaded = load_sample(path);
  for (std::size_t i = 0; i < 7; ++i) CHECK(loaded[i] == s[i]);
  std::filesystem::remove(path);
  CHECK_THROWS(load_sample(path));
  CHECK_THROWS_AS(unstack_sample(Tensor({3}, {1, 2, 3})), FormatError);
}

TEST_CASE("report JSON and curve CSV") {
  AugmentConfig cfg;
  cfg.s = {5};
  const TensorSample x = generate(SimModelSpec::benchmark(0.1, 300, 5));
  const AugmentReport rep = estimate_orders(x, cfg);
  const nlohmann::json j = report_json(rep, cfg);
  CHECK(j["schema"] == kReportSchema);
  CHECK(j["modes"].size() == 3);
  CHECK(j["modes"][0]["k"] == 1);
  CHECK(j["modes"][2]["curves"]["phi"].size() == 21);
  CHECK(j["sample"]["n"] == 300);
  CHECK(j["d_hat"].get<std::vector<std::size_t>>() == rep.d_hat());
  CHECK(nlohmann::json::parse(j.dump()) == j);

  std::ostringstream csv;
  write_curves_csv(csv, rep);
  CHECK(csv.str().rfind(std::string("# schema: ") + kCurvesSchema, 0) == 0);
  CHECK(count_data_rows(csv.str()) == 6 + 16 + 21);

  LadleConfig lcfg;
  lcfg.s = {5};
  const LadleReport lrep = estimate_orders_ladle(x, lcfg);
  const nlohmann::json lj = report_json(lrep, lcfg);
  CHECK(lj["modes"][1]["q_k"] == 5);
  CHECK(lj["modes"][1]["curves"]["gB"].size() == 6);
  std::ostringstream lcsv;
  write_curves_csv(lcsv, lrep);
  CHECK(lcsv.str().find("mode,index,phiB,fB,gB") != std::string::npos);
  CHECK(count_data_rows(lcsv.str()) == 5 + 6 + 7);

  std::ostringstream spectra;
  write_spectra_csv(spectra, mode_spectra(center(x)));
  CHECK(count_data_rows(spectra.str()) == 40 + 3 * 40);
}

TEST_CASE("study runner") {
  StudyConfig cfg;
  cfg.sigma2 = {0.1, 1.0};
  cfg.r = {2, 10};
  cfg.quantile = {0.0, 0.3};
  cfg.reps = 1;
  cfg.n = 150;
  cfg.s = 3;
  cfg.seed = 7;
  const StudyResult one = run_study(cfg);
  CHECK(one.truth == std::vector<std::size_t>{3, 5, 10});
  CHECK(one.cells.size() == 2 * 2 * 2);
  for (const auto& c : one.cells) {
    CHECK(c.histogram.size() == 1);
    CHECK(c.total() == 1);
  }

  cfg.reps = 4;
  const StudyResult serial = run_study(cfg);
  cfg.threads = 3;
  const StudyResult parallel = run_study(cfg);
  for (std::size_t i = 0; i < serial.cells.size(); ++i) {
    CHECK(serial.cells[i].histogram == parallel.cells[i].histogram);
    CHECK(serial.cells[i].total() == 4);
    double sum = 0;
    for (const auto& [d, n] : serial.cells[i].histogram) sum += serial.cells[i].frequency(d);
    CHECK(sum == doctest::Approx(1.0));
  }

  const nlohmann::json j = study_json(serial);
  CHECK(j["schema"] == kStudySchema);
  CHECK(j["config"]["seed"] == 7);
  std::ostringstream csv;
  write_study_csv(csv, serial);
  CHECK(csv.str().find("# seed: 7") != std::string::npos);
  CHECK(csv.str().find("cell,sigma2,estimator,r,quantile,d1,d2,d3,count,frequency") != std::string::npos);

  StudyConfig bad = cfg;
  bad.reps = 0;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  bad = cfg;
  bad.quantile = {1.0};
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  CHECK_THROWS_AS(parse_estimator("pca"), ArgumentError);
  CHECK(parse_estimator("ladle") == Estimator::ladle);
}
