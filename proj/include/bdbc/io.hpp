#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdbc/region.hpp"
#include "bdbc/sim.hpp"

// Config ingestion, result serialization (CSV / JSON / SVG) and the
// scenario runner behind the `capacity` command-line tool. Configs are JSON
// with complex entries written as [re, im] pairs. CSV output uses 12
// significant digits, '.' decimals and LF line endings.

namespace bdbc {

struct SimScenario {
  std::vector<int> block_lengths{20, 60, 120};
  double rate_fraction = 0.7;  // of the maxmin rate
  long trials = 2000;
  double epsilon_p = 0.0;  // resolved to 0.05 * power when omitted in the file
  double delta = 0.1;
  std::uint64_t seed = 1;
  bool fresh_codebook = true;
};

struct ScenarioConfig {
  CMatrix h1;
  CMatrix h2;
  double noise_variance = 1.0;
  double power = 1.0;
  int sweep_points = 51;
  SolverConfig solver;
  std::optional<SimScenario> sim;
  std::string output_dir = "out";
  std::vector<std::string> formats{"csv", "json"};  // subset of csv, json, svg
  std::string description;

  BidirectionalChannel channel() const;
  bool wants(const std::string& format) const;
};

/// Parses and fully validates a config; throws std::runtime_error naming
/// the offending field.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& json_text);

/// Inverse of parse_config: parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& cfg);

/// One simulated operating point: a block length with its realized code.
struct SimRow {
  int block_length = 0;
  double target_rate_bits = 0.0;
  double code_rate1_bits = 0.0;  // nominal rate toward node 1
  double code_rate2_bits = 0.0;
  std::size_t m1 = 1;
  std::size_t m2 = 1;
  TrialStats stats;
};

/// Candidate sets are capped at 2^12 so the exhaustive decoder scan stays
/// desk-scale; the nominal code rates still drive the thresholds.
constexpr int kMaxCandidateExponent = 12;

/// Runs run_trials once per block length at the given per-direction target
/// rates (message counts 2^(n R*) capped, per-row seed mixed from sc.seed).
std::vector<SimRow> simulate_block_lengths(const BidirectionalChannel& ch,
                                           const CovarianceMatrix& q,
                                           double target_r1_bits, double target_r2_bits,
                                           const SimScenario& sc);

std::string boundary_csv(const CapacityBoundary& boundary);
std::string sim_csv(const std::vector<SimRow>& rows);
std::string summary_json(const CapacityBoundary& boundary, const ScenarioConfig& cfg);

/// Self-contained SVG: shaded downward hull, boundary polyline, markers for
/// the two single-user endpoints and the equal-rate point, axes in bits.
void emit_plot(const CapacityBoundary& boundary, const std::string& path);
std::string plot_svg(const CapacityBoundary& boundary);

/// Full pipeline: sweep, maxmin, optional simulation, file emission gated
/// by cfg.formats. Returns 0 on full certification, 2 when any boundary
/// solve failed certification; I/O problems throw.
int run_scenario(const ScenarioConfig& cfg);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace bdbc
