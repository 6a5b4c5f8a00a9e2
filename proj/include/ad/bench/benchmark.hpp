#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ad::bench {

/// One overhead measurement: median seconds per call of the primal function and
/// of the derivative operation, and their ratio.
struct BenchmarkRecord {
  std::string operation;
  std::size_t n = 0;
  std::size_t repetitions = 0;
  double tPrimal = 0.0;
  double tDeriv = 0.0;
  double omega = 0.0;
  bool reliable = true;
};

/// Monotone clock in seconds together with its smallest observable tick.
struct ClockSource {
  std::function<double()> now;
  double granularity = 0.0;
};

/// std::chrono::steady_clock with an empirically measured granularity.
const ClockSource& steadyClock();

struct MeasureOptions {
  ClockSource clock = steadyClock();
  /// Calls are batched until one batch of the primal (and, separately, of the
  /// derivative) takes at least this long.
  double targetBatchSeconds = 1e-3;
  std::size_t maxBatch = std::size_t{1} << 20;
};

/// Names accepted by measureOverhead, in suite order. "primal" times the primal
/// against itself.
const std::vector<std::string>& operationNames();
bool isOperation(std::string_view name);

/// Median-of-`repetitions` timing of `op` against the primal at dimension n on
/// an instance generated from `seed`. One untimed warm-up call of each precedes
/// measurement. The record is flagged unreliable when a primal batch is shorter
/// than 100 clock ticks or the primal value is not finite.
/// Throws std::invalid_argument for an unknown op, n == 0 or repetitions < 3.
BenchmarkRecord measureOverhead(const std::string& op, std::size_t n, std::size_t repetitions, std::uint64_t seed,
                                const MeasureOptions& options = {});

struct SuiteConfig {
  std::vector<std::string> ops;
  std::vector<std::size_t> sizes;
  std::size_t repetitions = 5;
  std::uint64_t seed = 0;
  /// Runs (op, n) cells on separate threads; each timed region stays single-threaded.
  bool parallel = false;
};

/// One record per (op, n), ops outermost, in the order given.
std::vector<BenchmarkRecord> runSuite(const SuiteConfig& config, const MeasureOptions& options = {});

inline constexpr const char* kCsvHeader = "operation,n,repetitions,t_primal_s,t_deriv_s,omega,reliable";

void writeCsv(std::ostream& os, const std::vector<BenchmarkRecord>& records);

}  // namespace ad::bench
