#pragma once

#include <iosfwd>

#include "mltrust/errors.hpp"
#include "mltrust_cli/config.hpp"

namespace mltrust::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitConfigError = 3;

// Output file names, relative to the output directory.
inline constexpr const char* kNetworkFile = "network.json";
inline constexpr const char* kTrustFile = "trust.json";
inline constexpr const char* kEdgesFile = "edges.csv";
inline constexpr const char* kHistogramFile = "trust_histogram.csv";
inline constexpr const char* kScoresFile = "scores.csv";
inline constexpr const char* kConvergenceFile = "convergence.csv";
inline constexpr const char* kMetricsCsvFile = "metrics.csv";
inline constexpr const char* kMetricsJsonFile = "metrics.json";
inline constexpr const char* kStressReportFile = "stress_report.json";
inline constexpr const char* kStressPairsFile = "stress_pairs.csv";
inline constexpr const char* kStressScoresFile = "stress_scores.csv";
inline constexpr const char* kReportFile = "report.json";

// Each command writes into config.output_dir and logs warnings to `log`.
void cmd_build(const RunConfig& config, std::ostream& log);
void cmd_trust(const RunConfig& config, std::ostream& log);
void cmd_score(const RunConfig& config, std::ostream& log);
void cmd_eval(const RunConfig& config, std::ostream& log);
void cmd_stress(const RunConfig& config, std::ostream& log);
void cmd_report(const RunConfig& config, std::ostream& out, std::ostream& log);

int exit_code_for(ErrorCode code);

}  // namespace mltrust::cli
