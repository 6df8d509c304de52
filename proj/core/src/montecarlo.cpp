#include "kglab/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

namespace kglab {
namespace {

unsigned resolve_threads(unsigned requested, std::uint64_t jobs) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::uint64_t>(n, std::max<std::uint64_t>(jobs, 1)));
}

// Runs body(r) for r in [0, jobs) on `threads` workers. Each job writes only
// its own output slot, so scheduling never changes results.
template <typename Body>
void parallel_for(std::uint64_t jobs, unsigned threads, Body&& body) {
  threads = resolve_threads(threads, jobs);
  if (threads == 1) {
    for (std::uint64_t r = 0; r < jobs; ++r) body(r);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::uint64_t r = next.fetch_add(1); r < jobs; r = next.fetch_add(1)) {
      try {
        body(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs);
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

// Mean and standard error of the mean, accumulated in the given order.
struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};

template <typename Values>
MeanStderr mean_stderr(const Values& values) {
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

double binomial_stderr(double p, std::uint64_t reps) {
  if (reps < 2) return 0.0;
  return std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

}  // namespace

unsigned threads_from_env() {
  const char* raw = std::getenv("KG_LAB_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  const unsigned long v = std::strtoul(raw, &end, 10);
  if (end == raw || *end != '\0') throw ValidationError(std::string("KG_LAB_THREADS is not a count: ") + raw);
  return static_cast<unsigned>(v);
}

EstimateSeries run_replications(const BanditInstance& inst, std::uint64_t horizon, std::uint64_t n0,
                                std::uint64_t reps, std::uint64_t seed, std::span<const std::uint64_t> checkpoints,
                                ReplicationOptions options) {
  if (reps == 0) throw ValidationError("run_replications: need at least one replication");
  const std::size_t k = inst.k();
  const std::size_t cps = checkpoints.size();

  std::vector<RunTrace> traces(reps);
  parallel_for(reps, options.threads, [&](std::uint64_t r) {
    RngStream rng(seed, r);
    traces[r] = run_kg(inst, horizon, n0, rng, checkpoints);
  });

  EstimateSeries s;
  s.k = k;
  s.checkpoint_rounds.assign(checkpoints.begin(), checkpoints.end());
  s.replications = reps;
  s.seed = seed;
  s.low_replication = reps < 2;
  s.pe_hat.resize(cps);
  s.pe_stderr.resize(cps);
  s.sr_hat.resize(cps);
  s.sr_stderr.resize(cps);
  s.cr_hat.resize(cps);
  s.cr_stderr.resize(cps);
  s.alpha_hat.resize(cps * k);
  s.alpha_stderr.resize(cps * k);

  const auto& gaps = inst.constants().gaps;
  const ArmIndex best = inst.best();
  std::vector<double> buffer(reps);
  for (std::size_t c = 0; c < cps; ++c) {
    const double t = static_cast<double>(checkpoints[c]);

    std::uint64_t errors = 0;
    for (const auto& tr : traces) errors += tr.recommendation_at_checkpoints[c] != best ? 1 : 0;
    s.pe_hat[c] = static_cast<double>(errors) / static_cast<double>(reps);
    s.pe_stderr[c] = binomial_stderr(s.pe_hat[c], reps);

    for (std::uint64_t r = 0; r < reps; ++r) buffer[r] = gaps[traces[r].recommendation_at_checkpoints[c]];
    auto sr = mean_stderr(buffer);
    s.sr_hat[c] = sr.mean;
    s.sr_stderr[c] = sr.std_error;

    for (std::uint64_t r = 0; r < reps; ++r) {
      const auto pulls = traces[r].pulls_at(c);
      double regret = 0.0;
      for (ArmIndex i = 0; i < k; ++i) regret += gaps[i] * static_cast<double>(pulls[i]);
      buffer[r] = regret;
    }
    auto cr = mean_stderr(buffer);
    s.cr_hat[c] = cr.mean;
    s.cr_stderr[c] = cr.std_error;

    for (ArmIndex i = 0; i < k; ++i) {
      for (std::uint64_t r = 0; r < reps; ++r) buffer[r] = static_cast<double>(traces[r].pulls_at(c)[i]) / t;
      auto a = mean_stderr(buffer);
      s.alpha_hat[c * k + i] = a.mean;
      s.alpha_stderr[c * k + i] = a.std_error;
    }
  }
  if (options.keep_traces) s.traces = std::move(traces);
  return s;
}

std::vector<std::uint64_t> geometric_grid(std::uint64_t start, std::uint64_t stop, std::size_t points) {
  if (start == 0 || stop < start) throw ValidationError("geometric grid: need 0 < start <= stop");
  if (points == 0) throw ValidationError("geometric grid: need at least one point");
  std::vector<std::uint64_t> grid;
  grid.reserve(points);
  if (points == 1) return {stop};
  const double log_start = std::log(static_cast<double>(start));
  const double log_stop = std::log(static_cast<double>(stop));
  for (std::size_t j = 0; j < points; ++j) {
    const double frac = static_cast<double>(j) / static_cast<double>(points - 1);
    auto v = static_cast<std::uint64_t>(std::floor(std::exp(log_start + frac * (log_stop - log_start))));
    grid.push_back(std::clamp(v, start, stop));
  }
  grid.front() = start;
  grid.back() = stop;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<std::uint64_t> default_checkpoints(std::size_t k, std::uint64_t n0, std::uint64_t horizon) {
  return geometric_grid(k * n0, horizon, 30);
}

std::optional<double> neg_log_rate(double p, std::uint64_t t) {
  if (!(p > 0.0) || t == 0) return std::nullopt;
  return -std::log(p) / static_cast<double>(t);
}

std::optional<double> neg_log_rate(const std::optional<LogValue>& p, std::uint64_t t) {
  if (!p || p->is_zero() || t == 0) return std::nullopt;
  return -p->log_magnitude / static_cast<double>(t);
}

TransformedSeries estimate_transforms(const EstimateSeries& series) {
  TransformedSeries out;
  out.checkpoint_rounds = series.checkpoint_rounds;
  const double reps = static_cast<double>(series.replications);
  for (std::size_t c = 0; c < series.checkpoint_rounds.size(); ++c) {
    const auto t = series.checkpoint_rounds[c];
    out.pe_rate.push_back(neg_log_rate(series.pe_hat[c], t));
    out.sr_rate.push_back(neg_log_rate(series.sr_hat[c], t));
    out.cr_per_round.push_back(series.cr_hat[c] / static_cast<double>(t));
    out.pe_rule_of_three_rate.push_back(-std::log(std::min(1.0, 3.0 / reps)) / static_cast<double>(t));
  }
  return out;
}

double concentration_bound(double sigma, std::uint64_t m, double eps) {
  if (!(sigma > 0.0)) throw ValidationError("concentration bound: sigma must be positive");
  if (m == 0) throw ValidationError("concentration bound: m must be at least 1");
  if (!(eps > 0.0)) throw ValidationError("concentration bound: eps must be positive");
  const double md = static_cast<double>(m);
  return 2.0 * sigma / (std::sqrt(md) * eps) * std::exp(-md * eps * eps / (2.0 * sigma * sigma));
}

ConcentrationResult concentration_check(double sigma, std::uint64_t m, double eps, std::uint64_t reps,
                                        std::uint64_t seed, unsigned threads) {
  ConcentrationResult res;
  res.bound = concentration_bound(sigma, m, eps);
  if (reps == 0) throw ValidationError("concentration check: need at least one replication");

  std::vector<unsigned char> exceeded(reps);
  parallel_for(reps, threads, [&](std::uint64_t r) {
    RngStream rng(seed, r);
    double sum = 0.0;
    for (std::uint64_t s = 0; s < m; ++s) sum += rng.normal(0.0, sigma);
    exceeded[r] = std::fabs(sum / static_cast<double>(m)) >= eps ? 1 : 0;
  });
  std::uint64_t hits = 0;
  for (auto e : exceeded) hits += e;
  res.empirical = static_cast<double>(hits) / static_cast<double>(reps);
  res.std_error = binomial_stderr(res.empirical, reps);
  return res;
}

}  // namespace kglab
