#pragma once

// JSON and CSV serialization of estimator outputs. Mode numbers in all output
// files are 1-based. Every file carries a versioned schema string.

#include <json.hpp>

#include <iosfwd>
#include <span>
#include <string>

#include "tensorord/augment.hpp"
#include "tensorord/ladle.hpp"
#include "tensorord/simgen.hpp"
#include "tensorord/spectral.hpp"

namespace tensorord {

inline constexpr const char* kReportSchema = "tensorord.report/1";
inline constexpr const char* kCurvesSchema = "tensorord.curves/1";
inline constexpr const char* kSpectraSchema = "tensorord.spectra/1";
inline constexpr const char* kSimSpecSchema = "tensorord.simspec/1";

nlohmann::json to_json(const AugmentConfig& config);
nlohmann::json to_json(const LadleConfig& config);
nlohmann::json to_json(const SimModelSpec& spec);

nlohmann::json report_json(const AugmentReport& report, const AugmentConfig& config);
nlohmann::json report_json(const LadleReport& report, const LadleConfig& config);

// Long format, one row per (mode, index): mode,index,phi,f,g (ladle: phiB,fB,gB).
void write_curves_csv(std::ostream& out, const AugmentReport& report);
void write_curves_csv(std::ostream& out, const LadleReport& report);

// Rows kind,mode,index,value with kind "eigenvalue" for each mode spectrum and
// "pooled" for the pooled set of each target mode.
void write_spectra_csv(std::ostream& out, std::span<const ModeSpectrum> spectra);

}  // namespace tensorord
