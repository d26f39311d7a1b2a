#include "slitsim/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace slitsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t bits = splitmix64(splitmix64(seed) ^ splitmix64(~index));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

void EmissionSpec::validate() const {
  if (!(v0 > 0) || !std::isfinite(v0)) throw ConfigError("v0 must be positive");
  if (!(alpha_min < alpha_max)) throw ConfigError("alpha_min must be below alpha_max");
  if (n == 0) throw ConfigError("n must be positive");
}

double EmissionSpec::alpha(std::size_t i) const {
  if (mode == Mode::Random) {
    return alpha_min + (alpha_max - alpha_min) * counter_uniform(seed, i);
  }
  if (n == 1) return (alpha_min + alpha_max) / 2;
  // Centre plus signed offset: a symmetric range gives exactly mirrored angles.
  const double mid = (alpha_min + alpha_max) / 2;
  const double half = (alpha_max - alpha_min) / 2;
  const double k = 2.0 * static_cast<double>(i) - static_cast<double>(n - 1);
  return mid + half * (k / static_cast<double>(n - 1));
}

void HistogramSpec::validate() const {
  if (!(bin_width > 0) || !std::isfinite(bin_width)) throw ConfigError("bin_width must be positive");
  if (!(y_min < y_max)) throw ConfigError("y_min must be below y_max");
}

std::size_t HistogramSpec::bins() const {
  // Guard against spans that are an exact multiple up to rounding.
  const double ratio = (y_max - y_min) / bin_width;
  return static_cast<std::size_t>(std::ceil(ratio * (1 - 1e-12)));
}

Histogram::Histogram(const HistogramSpec& s) : spec(s), counts(s.bins(), 0) {}

void Histogram::record(const Outcome& o) {
  ++n_emitted;
  if (const auto* hit = std::get_if<Detected>(&o)) {
    ++n_detected;
    const double y = hit->y_hit;
    if (y < spec.y_min) {
      ++n_underflow;
    } else if (y > spec.y_max) {
      ++n_overflow;
    } else {
      auto k = static_cast<std::size_t>((y - spec.y_min) / spec.bin_width);
      if (k >= counts.size()) k = counts.size() - 1;
      ++counts[k];
    }
  } else if (std::holds_alternative<Blocked>(o)) {
    ++n_blocked;
  } else if (std::holds_alternative<Escaped>(o)) {
    ++n_escaped;
  } else {
    ++n_steplimit;
  }
}

void Histogram::check_conservation() const {
  const std::uint64_t binned = std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  if (binned + n_underflow + n_overflow != n_detected) {
    throw Error("histogram: binned counts do not match n_detected");
  }
  if (n_detected + n_blocked + n_escaped + n_steplimit != n_emitted) {
    throw Error("histogram: outcome tallies do not sum to n_emitted");
  }
}

Histogram run_ensemble(const EmissionSpec& e, const Geometry& g, const FieldParams<double>& f,
                       const StepParams<double>& sp, const HistogramSpec& h, unsigned workers) {
  e.validate();
  sp.validate();
  h.validate();
  if (workers == 0) throw ConfigError("workers must be at least 1");
  check_consistent(g, f);

  constexpr std::size_t kBlock = 256;
  std::atomic<std::size_t> next_block{0};
  std::vector<Histogram> partial(workers, Histogram(h));
  auto work = [&](unsigned w) {
    Histogram& local = partial[w];
    for (;;) {
      const std::size_t begin = next_block.fetch_add(1) * kBlock;
      if (begin >= e.n) return;
      const std::size_t end = std::min(e.n, begin + kBlock);
      for (std::size_t i = begin; i < end; ++i) {
        local.record(run_discrete_trajectory(e.alpha(i), e.v0, g, f, sp, false).outcome);
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  Histogram total(h);
  for (const auto& p : partial) total = merge(total, p);
  total.check_conservation();
  return total;
}

Histogram merge(const Histogram& a, const Histogram& b) {
  if (!(a.spec == b.spec) || a.counts.size() != b.counts.size()) {
    throw SpecMismatchError("merge: histogram specs differ");
  }
  Histogram out = a;
  for (std::size_t k = 0; k < out.counts.size(); ++k) out.counts[k] += b.counts[k];
  out.n_emitted += b.n_emitted;
  out.n_detected += b.n_detected;
  out.n_blocked += b.n_blocked;
  out.n_escaped += b.n_escaped;
  out.n_steplimit += b.n_steplimit;
  out.n_underflow += b.n_underflow;
  out.n_overflow += b.n_overflow;
  return out;
}

std::vector<double> normalize(const Histogram& h) {
  if (h.n_detected == 0) throw EmptyHistogramError("normalize: no detected particles");
  std::vector<double> f(h.counts.size());
  const auto n = static_cast<double>(h.n_detected);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(h.counts[k]) / n;
  return f;
}

}  // namespace slitsim
