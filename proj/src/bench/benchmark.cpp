#include "ad/bench/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <random>
#include <stdexcept>

#include "ad/api.hpp"
#include "ad/bench/helmholtz.hpp"

namespace ad::bench {
namespace {

using Call = std::function<double()>;

struct Workload {
  Call primal;
  Call deriv;
};

RealVector uniformVector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  RealVector v(n);
  for (double& e : v) e = dist(rng);
  return v;
}

RealMatrix uniformMatrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  RealMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

double first(const ADVector& v) { return v.empty() ? 0.0 : v[0].value(); }
double first(const ADMatrix& m) { return m.elements().empty() ? 0.0 : m.elements()[0].value(); }

// Scalar objective: the Helmholtz energy at its instance point.
Workload scalarWorkload(const std::string& op, std::size_t n, std::uint64_t seed) {
  const HelmholtzInstance inst = HelmholtzInstance::generate(n, seed);
  const Helmholtz f(inst);
  const ADVector x = ADVector::constant(inst.x);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const ADVector v = ADVector::constant(uniformVector(rng, n, -1.0, 1.0));
  const Call primal = [f, x] { return f(x).value(); };

  if (op == "primal") return {primal, primal};
  if (op == "grad") return {primal, [f, x] { return first(grad(f, x)); }};
  if (op == "gradv") return {primal, [f, x, v] { return gradv(f, x, v).value(); }};
  if (op == "hessian") return {primal, [f, x] { return first(hessian(f, x)); }};
  if (op == "hessianv") return {primal, [f, x, v] { return first(hessianv(f, x, v)); }};
  if (op == "gradhessian") return {primal, [f, x] { return first(gradhessian(f, x).second); }};
  if (op == "gradhessianv") return {primal, [f, x, v] { return first(gradhessianv(f, x, v).second); }};
  if (op == "laplacian") return {primal, [f, x] { return laplacian(f, x).value(); }};

  // Univariate restriction s -> f(x + s d) along a direction that stays feasible near s = 0.
  RealVector d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = 0.01 * inst.x[i] * v[i].value();
  const ADVector dir = ADVector::constant(d);
  const auto line = [f, x, dir](const ADScalar& s) { return f(x + s * dir); };
  const Call linePrimal = [line] { return line(0.0).value(); };
  if (op == "diff") return {linePrimal, [line] { return diff(line, ADScalar(0.0)).value(); }};
  if (op == "diff2") return {linePrimal, [line] { return diff2(line, ADScalar(0.0)).value(); }};
  if (op == "diffn") return {linePrimal, [line] { return diffn(3, line, ADScalar(0.0)).value(); }};
  throw std::invalid_argument("unknown operation: " + op);
}

// Vector field R^n -> R^n: F(x) = tanh(A x) o x.
Workload fieldWorkload(const std::string& op, std::size_t n, std::uint64_t seed) {
  const HelmholtzInstance inst = HelmholtzInstance::generate(n, seed);
  const ADMatrix a = ADMatrix::constant(inst.A);
  const auto field = [a](const ADVector& x) {
    return hadamard(map([](const ADScalar& e) { return tanh(e); }, matVec(a, x)), x);
  };
  const ADVector x = ADVector::constant(inst.x);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const ADVector v = ADVector::constant(uniformVector(rng, n, -1.0, 1.0));
  const Call primal = [field, x] { return first(field(x)); };

  if (op == "jacobian") return {primal, [field, x] { return first(jacobian(field, x)); }};
  if (op == "jacobianT") return {primal, [field, x] { return first(jacobianT(field, x)); }};
  if (op == "jacobianv") return {primal, [field, x, v] { return first(jacobianv(field, x, v)); }};
  if (op == "jacobianTv") return {primal, [field, x, v] { return first(jacobianTv(field, x, v)); }};
  if (op == "div") return {primal, [field, x] { return div(field, x).value(); }};
  throw std::invalid_argument("unknown operation: " + op);
}

// Field R^3 -> R^3 with n Fourier terms: F(x) = C sin(W x), W n x 3, C 3 x n.
Workload spatialWorkload(const std::string& op, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const ADMatrix w = ADMatrix::constant(uniformMatrix(rng, n, 3, -1.0, 1.0));
  const ADMatrix c = ADMatrix::constant(uniformMatrix(rng, 3, n, -1.0, 1.0));
  const auto field = [w, c](const ADVector& x) {
    return matVec(c, map([](const ADScalar& e) { return sin(e); }, matVec(w, x)));
  };
  const ADVector x = ADVector::constant(uniformVector(rng, 3, -1.0, 1.0));
  const Call primal = [field, x] { return first(field(x)); };

  if (op == "curl") return {primal, [field, x] { return first(curl(field, x)); }};
  if (op == "curldiv") return {primal, [field, x] { return curldiv(field, x).second.value(); }};
  throw std::invalid_argument("unknown operation: " + op);
}

Workload makeWorkload(const std::string& op, std::size_t n, std::uint64_t seed) {
  if (op.starts_with("jacobian") || op == "div") return fieldWorkload(op, n, seed);
  if (op.starts_with("curl")) return spatialWorkload(op, n, seed);
  return scalarWorkload(op, n, seed);
}

double timeBatch(const Call& call, std::size_t batch, const ClockSource& clock) {
  volatile double sink = 0.0;
  const double start = clock.now();
  for (std::size_t k = 0; k < batch; ++k) sink = call();
  const double stop = clock.now();
  (void)sink;
  return stop - start;
}

std::size_t calibrateBatch(const Call& call, const MeasureOptions& options) {
  std::size_t batch = 1;
  while (batch < options.maxBatch) {
    const double t = timeBatch(call, batch, options.clock);
    if (t >= options.targetBatchSeconds) break;
    const double grow = t > 0.0 ? std::clamp(1.2 * options.targetBatchSeconds / t, 2.0, 100.0) : 100.0;
    batch = std::min(options.maxBatch, static_cast<std::size_t>(std::ceil(static_cast<double>(batch) * grow)));
  }
  return batch;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

}  // namespace

const ClockSource& steadyClock() {
  static const ClockSource clock = [] {
    const auto origin = std::chrono::steady_clock::now();
    ClockSource c;
    c.now = [origin] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - origin).count();
    };
    double tick = 1.0;
    for (int k = 0; k < 200; ++k) {
      const double t0 = c.now();
      double t1 = c.now();
      while (t1 == t0) t1 = c.now();
      tick = std::min(tick, t1 - t0);
    }
    c.granularity = tick;
    return c;
  }();
  return clock;
}

const std::vector<std::string>& operationNames() {
  static const std::vector<std::string> names = {
      "primal",   "diff",       "diff2",     "diffn",      "grad", "gradv",   "hessian",
      "hessianv", "gradhessian", "gradhessianv", "laplacian", "jacobian", "jacobianv", "jacobianT",
      "jacobianTv", "curl",     "div",       "curldiv"};
  return names;
}

bool isOperation(std::string_view name) {
  const auto& names = operationNames();
  return std::find(names.begin(), names.end(), name) != names.end();
}

BenchmarkRecord measureOverhead(const std::string& op, std::size_t n, std::size_t repetitions, std::uint64_t seed,
                                const MeasureOptions& options) {
  if (!isOperation(op)) throw std::invalid_argument("unknown operation: " + op);
  if (n == 0) throw std::invalid_argument("measureOverhead: n must be at least 1");
  if (repetitions < 3) throw std::invalid_argument("measureOverhead: repetitions must be at least 3");

  const Workload work = makeWorkload(op, n, seed);
  const bool selfRatio = op == "primal";

  const double primalValue = work.primal();
  if (!selfRatio) (void)work.deriv();

  const std::size_t primalBatch = calibrateBatch(work.primal, options);
  const std::size_t derivBatch = selfRatio ? primalBatch : calibrateBatch(work.deriv, options);

  std::vector<double> primalTimes;
  std::vector<double> derivTimes;
  double shortestPrimalBatch = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < repetitions; ++r) {
    const double tp = timeBatch(work.primal, primalBatch, options.clock);
    shortestPrimalBatch = std::min(shortestPrimalBatch, tp);
    primalTimes.push_back(tp / static_cast<double>(primalBatch));
    if (!selfRatio) derivTimes.push_back(timeBatch(work.deriv, derivBatch, options.clock) / static_cast<double>(derivBatch));
  }

  BenchmarkRecord rec;
  rec.operation = op;
  rec.n = n;
  rec.repetitions = repetitions;
  rec.tPrimal = median(primalTimes);
  rec.tDeriv = selfRatio ? rec.tPrimal : median(derivTimes);
  rec.omega = rec.tPrimal > 0.0 ? rec.tDeriv / rec.tPrimal : std::numeric_limits<double>::quiet_NaN();
  rec.reliable = std::isfinite(primalValue) && rec.tPrimal > 0.0 && rec.tDeriv > 0.0 &&
                 shortestPrimalBatch >= 100.0 * options.clock.granularity;
  return rec;
}

std::vector<BenchmarkRecord> runSuite(const SuiteConfig& config, const MeasureOptions& options) {
  for (const std::string& op : config.ops)
    if (!isOperation(op)) throw std::invalid_argument("unknown operation: " + op);

  std::vector<BenchmarkRecord> records;
  records.reserve(config.ops.size() * config.sizes.size());
  if (!config.parallel) {
    for (const std::string& op : config.ops)
      for (std::size_t n : config.sizes)
        records.push_back(measureOverhead(op, n, config.repetitions, config.seed, options));
    return records;
  }
  std::vector<std::future<BenchmarkRecord>> cells;
  for (const std::string& op : config.ops)
    for (std::size_t n : config.sizes)
      cells.push_back(std::async(std::launch::async, [&, op, n] {
        return measureOverhead(op, n, config.repetitions, config.seed, options);
      }));
  for (auto& cell : cells) records.push_back(cell.get());
  return records;
}

void writeCsv(std::ostream& os, const std::vector<BenchmarkRecord>& records) {
  os << kCsvHeader << '\n';
  char line[256];
  for (const BenchmarkRecord& r : records) {
    std::snprintf(line, sizeof line, ",%zu,%zu,%.9e,%.9e,%.6f,%s\n", r.n, r.repetitions, r.tPrimal, r.tDeriv,
                  r.omega, r.reliable ? "true" : "false");
    os << r.operation << line;
  }
}

}  // namespace ad::bench
