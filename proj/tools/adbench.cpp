#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ad/bench/benchmark.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kUnreliable = 2;

std::vector<std::string> splitList(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto begin = item.find_first_not_of(" \t");
    const auto end = item.find_last_not_of(" \t");
    if (begin != std::string::npos) items.push_back(item.substr(begin, end - begin + 1));
  }
  return items;
}

std::string joinedOperationNames() {
  std::string out;
  for (const std::string& name : ad::bench::operationNames()) out += (out.empty() ? "" : ", ") + name;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Measures the cost of derivative operations relative to the primal function and writes a CSV report."};

  std::string opsText;
  std::string sizesText;
  std::size_t reps = 5;
  std::uint64_t seed = 42;
  bool strict = false;
  bool parallel = false;
  std::string outPath;

  app.add_option("--ops", opsText, "Comma-separated operations, or 'all'. Valid: " + joinedOperationNames())
      ->required();
  app.add_option("--n", sizesText, "Comma-separated input dimensions, each at least 1")->required();
  app.add_option("--reps", reps, "Timed repetitions per measurement (median is reported)")
      ->check(CLI::Range(std::size_t{3}, std::size_t{1000000}));
  app.add_option("--seed", seed, "Seed for the generated problem instances");
  app.add_flag("--strict", strict, "Exit with status 2 if any record is flagged unreliable");
  app.add_flag("--parallel", parallel, "Measure (op, n) cells concurrently");
  app.add_option("--out", outPath, "Write the CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  ad::bench::SuiteConfig config;
  config.repetitions = reps;
  config.seed = seed;
  config.parallel = parallel;

  const std::vector<std::string> ops = splitList(opsText);
  if (ops.size() == 1 && ops[0] == "all") {
    config.ops = ad::bench::operationNames();
  } else {
    for (const std::string& op : ops) {
      if (!ad::bench::isOperation(op)) {
        std::cerr << "adbench: unknown operation '" << op << "'; valid operations: " << joinedOperationNames()
                  << ", all\n";
        return kUsageError;
      }
    }
    config.ops = ops;
  }

  for (const std::string& item : splitList(sizesText)) {
    std::size_t consumed = 0;
    unsigned long long value = 0;
    try {
      value = std::stoull(item, &consumed);
    } catch (const std::exception&) {
      consumed = 0;
    }
    if (consumed != item.size() || value == 0 || item[0] == '-') {
      std::cerr << "adbench: --n expects positive integers, got '" << item << "'\n";
      return kUsageError;
    }
    config.sizes.push_back(static_cast<std::size_t>(value));
  }

  const std::vector<ad::bench::BenchmarkRecord> records = ad::bench::runSuite(config);

  if (outPath.empty()) {
    ad::bench::writeCsv(std::cout, records);
  } else {
    std::ofstream out(outPath);
    if (!out) {
      std::cerr << "adbench: cannot open '" << outPath << "' for writing\n";
      return kUsageError;
    }
    ad::bench::writeCsv(out, records);
  }

  if (strict) {
    for (const auto& r : records)
      if (!r.reliable) {
        std::cerr << "adbench: unreliable measurement for " << r.operation << " at n=" << r.n << '\n';
        return kUnreliable;
      }
  }
  return 0;
}
