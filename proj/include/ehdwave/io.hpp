// Run configuration and on-disk formats.
//
// Reals that must round-trip exactly are stored as {"hex": "%a", "dec": value};
// readers use the hex string, the decimal is for people. Every document
// carries `version` and the RunConfig that produced it.

#ifndef EHDWAVE_IO_HPP
#define EHDWAVE_IO_HPP

#include "ehdwave/continuation.hpp"
#include "ehdwave/core.hpp"
#include "ehdwave/diagnostics.hpp"
#include "ehdwave/newton.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ehdwave::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// Malformed or incompatible file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string hex_string(double v);
double parse_hex(const std::string& s);

json real_to_json(double v);
/// Accepts {"hex", "dec"} objects, hex strings and plain numbers.
double real_from_json(const json& j);

json trace_to_json(const TraceD& t);
TraceD trace_from_json(const json& j);

json to_json(const NewtonConfig& c);
NewtonConfig newton_from_json(const json& j, NewtonConfig base = {});
json to_json(const ContinuationConfig& c);
ContinuationConfig continuation_from_json(const json& j, ContinuationConfig base = {});

/// Everything needed to repeat a run.
struct RunConfig {
  std::string command;
  double gamma = 0.0;
  double eps1 = 0.5;
  std::optional<double> alpha;
  std::optional<double> eps;
  /// 0 selects a box wide enough for the initial profile.
  double half_length = 0.0;
  Eigen::Index n_points = 512;
  NewtonConfig newton{};
  ContinuationConfig continuation{};
  std::string out_dir = ".";
  std::string format = "json";
  std::string input;
  std::vector<double> q0_list{0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
  double dt = 1e-3;
  double x_max = 10.0;

  /// alpha, from --alpha or alpha_cr - eps.
  double resolved_alpha() const;
};

json to_json(const RunConfig& c);
RunConfig run_config_from_json(const json& j);

json to_json(const BranchPoint& p);
BranchPoint branch_point_from_json(const json& j);

json summary_to_json(const DiagnosticsSummary& d);

json solution_to_json(const WaveSolution& s, const RunConfig& rc,
                      const std::optional<DiagnosticsSummary>& diag = std::nullopt);
WaveSolution solution_from_json(const json& j);

/// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

/// Two whitespace-separated columns; header lines start with '#'.
void write_curve(const std::filesystem::path& path, const std::vector<double>& a,
                 const std::vector<double>& b, const std::string& columns, const RunConfig& rc);

/// branch.jsonl (header, one record per point, stop record) plus
/// solutions/point_NNNNN.json for the stored points.
void write_branch(const std::filesystem::path& dir, const Branch& b, const RunConfig& rc);

struct BranchFile {
  json header;
  std::vector<BranchPoint> points;
  json stop;
};

BranchFile read_branch(const std::filesystem::path& dir);

}  // namespace ehdwave::io

#endif  // EHDWAVE_IO_HPP
