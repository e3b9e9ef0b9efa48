#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dts/config.hpp"
#include "dts/diagnostics.hpp"

namespace dts {

inline constexpr int kHistoryFormatVersion = 1;
inline constexpr int kSnapshotFormatVersion = 1;

struct RunOutcome {
  MarchResult result;
  std::vector<HistoryRecord> history;  // initial state first, then one per physical step
  std::vector<StepReport> steps;
  std::optional<ErrorNorms> error;     // against the exact solution at the final time
  ConservationReport audit;
  long long pseudo_iterations = 0;
  bool converged() const { return result.nonconverged_steps == 0; }
};

/// Runs one case. When `out_dir` is given, writes history.csv, summary.json
/// and final_state.bin there.
RunOutcome run_case(const RunConfig& config,
                    const std::optional<std::filesystem::path>& out_dir = std::nullopt);

struct SweepRow {
  double dt = 0.0;
  int elements = 0;
  ErrorNorms error;
  std::optional<double> rate_l1;
  std::optional<double> rate_l2;
  bool warning = false;  // error did not decrease from the previous row
};

/// Observed orders log(e_i / e_{i+1}) / log(s_i / s_{i+1}); with halving
/// steps this is log2(e_i / e_{i+1}).
std::vector<double> observed_rates(const std::vector<double>& errors,
                                   const std::vector<double>& steps);

/// Builds the table from per-run errors. Throws InsufficientSweepError below three rows.
std::vector<SweepRow> convergence_table(const std::vector<double>& dts,
                                        const std::vector<int>& elements,
                                        const std::vector<ErrorNorms>& errors,
                                        SweepParameter parameter);

/// Runs every config and tabulates errors against the exact solution.
std::vector<SweepRow> sweep(const std::vector<RunConfig>& configs, SweepParameter parameter,
                            const std::optional<std::filesystem::path>& out_dir = std::nullopt);

void write_history_csv(const std::filesystem::path& path, const std::vector<HistoryRecord>& history,
                       const std::vector<StepReport>& steps);
void write_convergence_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
/// Little-endian snapshot: "DTSF", u32 version, u32 dim, u32 order, u32
/// components, u32 elements[3], u64 node count, f64 time, then node-major
/// f64 values in element-major node order.
void write_snapshot(const std::filesystem::path& path, const Field& field, const Mesh& mesh,
                    double time);
struct Snapshot {
  int dim = 0;
  int order = 0;
  std::array<int, 3> elements{};
  double time = 0.0;
  std::vector<State> values;
};
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace dts
