#include "lsl/random_mult.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "lsl/error.hpp"
#include "lsl/extremal.hpp"
#include "lsl/kernels.hpp"
#include "lsl/parallel.hpp"
#include "lsl/primes.hpp"

namespace lsl::randmult {

namespace {

constexpr std::uint64_t kChunk = 1024;

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void require_trials(std::uint64_t trials) {
  if (trials == 0) throw DomainError("trials must be >= 1");
}

// Shared per-x tables; each trial fills f(1..x) from fresh prime signs.
class Sampler {
 public:
  explicit Sampler(std::uint64_t x) : x_(x) {
    if (x > kLinearSieveCeiling) throw ResourceError("random sampling supports x <= 10^7");
    spf_ = smallest_prime_factors(static_cast<std::uint32_t>(x));
    for (std::uint64_t n = 2; n <= x; ++n)
      if (spf_[n] == n) primes_.push_back(n);
  }

  std::uint64_t x() const { return x_; }
  const std::vector<std::uint64_t>& primes() const { return primes_; }

  void draw(std::uint64_t seed, std::vector<std::int8_t>& f) const {
    f.assign(x_ + 1, 0);
    if (x_ >= 1) f[1] = 1;
    for (const auto p : primes_) f[p] = static_cast<std::int8_t>(prime_sign(seed, p));
    for (std::uint64_t n = 4; n <= x_; ++n) {
      const std::uint32_t p = spf_[n];
      if (p != n) f[n] = static_cast<std::int8_t>(f[p] * f[n / p]);
    }
  }

 private:
  std::uint64_t x_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint64_t> primes_;
};

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) { return mix64(seed, trial); }

// Runs body(trial_seed, f, acc) for each trial, chunked deterministically,
// and returns per-chunk accumulators in chunk order.
template <class Acc, class Body>
std::vector<Acc> run_trials(const Sampler& sampler, std::uint64_t trials, std::uint64_t seed, unsigned workers, Body body) {
  const std::size_t chunks = static_cast<std::size_t>((trials + kChunk - 1) / kChunk);
  std::vector<Acc> acc(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    std::vector<std::int8_t> f;
    const std::uint64_t lo = c * kChunk, hi = std::min(trials, lo + kChunk);
    for (std::uint64_t t = lo; t < hi; ++t) {
      sampler.draw(trial_seed(seed, t), f);
      body(f, acc[c]);
    }
  });
  return acc;
}

TailEstimate make_tail(std::uint64_t x, std::uint64_t trials, std::uint64_t hits) {
  TailEstimate e;
  e.x = x;
  e.trials = trials;
  e.hits = hits;
  e.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  e.wilson = wilson_interval(hits, trials);
  return e;
}

}  // namespace

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) { return splitmix(splitmix(a) ^ b); }

int prime_sign(std::uint64_t seed, std::uint64_t p) { return (mix64(seed, p) >> 63) ? 1 : -1; }

SignVector sample_sign_vector(const RandomModel& model) {
  SignVector sv;
  sv.limit = model.limit;
  sv.primes = primes_up_to(model.limit).primes;
  sv.signs.reserve(sv.primes.size());
  for (const auto p : sv.primes) sv.signs.push_back(static_cast<std::int8_t>(prime_sign(model.seed, p)));
  return sv;
}

Interval wilson_interval(std::uint64_t hits, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  Interval iv{std::max(0.0, center - half), std::min(1.0, center + half)};
  if (hits == 0) iv.lo = 0.0;
  if (hits == trials) iv.hi = 1.0;
  iv.lo = std::min(iv.lo, p);
  iv.hi = std::max(iv.hi, p);
  return iv;
}

TailEstimate negativity_probability_mc(std::uint64_t x, std::uint64_t trials, std::uint64_t seed, unsigned workers) {
  require_trials(trials);
  if (x == 0) throw DomainError("x must be >= 1");
  const Sampler sampler(x);
  const auto acc = run_trials<std::uint64_t>(sampler, trials, seed, workers, [&](const std::vector<std::int8_t>& f, std::uint64_t& hits) {
    const auto r = kernels::reciprocal_sum(std::span<const std::int8_t>(f).subspan(1, x), 1);
    const double bound = r.error;
    if (r.value < -bound) {
      ++hits;
    } else if (r.value <= bound) {
      std::vector<std::int64_t> coeff(f.begin() + 1, f.end());
      if (harmonic_sum(coeff, 1) < 0) ++hits;
    }
  });
  std::uint64_t hits = 0;
  for (const auto h : acc) hits += h;
  return make_tail(x, trials, hits);
}

Rational negativity_probability_exact(std::uint64_t x, unsigned workers) {
  const auto e = extremal::enumerate_sign_vectors(x, workers);
  Rational r(BigInt(static_cast<unsigned long>(e.negative_count)), BigInt(static_cast<unsigned long>(e.total)));
  r.canonicalize();
  return r;
}

std::uint64_t exact_even_moment(std::uint64_t x, unsigned q) {
  if (q % 2 != 0) throw DomainError("q must be even");
  if (x == 0) throw DomainError("x must be >= 1");
  if (q == 0) return 1;
  std::map<std::uint64_t, std::uint64_t> classes;
  for (std::uint64_t n = 1; n <= x; ++n) ++classes[squarefree_parity_kernel(n)];

  // kernels multiply as squarefree parts: ker(a b) = a b / gcd(a,b)^2
  auto combine = [](std::uint64_t a, std::uint64_t b) {
    const std::uint64_t g = std::gcd(a, b);
    const unsigned __int128 prod = static_cast<unsigned __int128>(a / g) * (b / g);
    if (prod >> 64) throw ResourceError("exact_even_moment: kernel overflow");
    return static_cast<std::uint64_t>(prod);
  };
  auto checked_add = [](std::uint64_t& acc, unsigned __int128 v) {
    const unsigned __int128 s = static_cast<unsigned __int128>(acc) + v;
    if (s >> 64) throw ResourceError("exact_even_moment: count overflow");
    acc = static_cast<std::uint64_t>(s);
  };

  // distribution of the kernel of a product of q/2 integers, squared up
  std::map<std::uint64_t, std::uint64_t> half = classes;
  std::uint64_t work = classes.size();
  for (unsigned i = 1; i < q / 2; ++i) {
    work *= classes.size();
    if (work > kMomentBudget) throw ResourceError("exact_even_moment: (x, q) beyond enumeration budget");
    std::map<std::uint64_t, std::uint64_t> next;
    for (const auto& [a, ca] : half)
      for (const auto& [b, cb] : classes) checked_add(next[combine(a, b)], static_cast<unsigned __int128>(ca) * cb);
    half = std::move(next);
  }
  std::uint64_t total = 0;
  for (const auto& [k, c] : half) checked_add(total, static_cast<unsigned __int128>(c) * c);
  return total;
}

MomentReport empirical_moment(std::uint64_t x, unsigned q, std::uint64_t trials, std::uint64_t seed, unsigned workers,
                              MomentWeight weight) {
  require_trials(trials);
  if (x == 0) throw DomainError("x must be >= 1");
  const Sampler sampler(x);
  std::vector<double> w(x + 1, 1.0);
  if (weight == MomentWeight::FracPart)
    for (std::uint64_t n = 1; n <= x; ++n) w[n] = static_cast<double>(x % n) / static_cast<double>(n);

  struct Acc {
    double sum = 0, sum_sq = 0;
  };
  const auto acc = run_trials<Acc>(sampler, trials, seed, workers, [&](const std::vector<std::int8_t>& f, Acc& a) {
    double s = 0;
    for (std::uint64_t n = 1; n <= x; ++n) s += f[n] * w[n];
    const double v = std::pow(s, static_cast<double>(q));
    a.sum += v;
    a.sum_sq += v * v;
  });
  double sum = 0, sum_sq = 0;
  for (const auto& a : acc) {
    sum += a.sum;
    sum_sq += a.sum_sq;
  }
  const double n = static_cast<double>(trials);
  MomentReport r;
  r.x = x;
  r.q = q;
  r.weight = weight;
  r.trials = trials;
  r.empirical_value = sum / n;
  const double var = trials > 1 ? std::max(0.0, (sum_sq - n * r.empirical_value * r.empirical_value) / (n - 1)) : 0.0;
  r.standard_error = std::sqrt(var / n);
  if (weight == MomentWeight::Unit && q % 2 == 0) {
    try {
      r.exact_value = exact_even_moment(x, q);
      r.relative_deviation = std::abs(r.empirical_value - static_cast<double>(*r.exact_value)) / static_cast<double>(*r.exact_value);
    } catch (const ResourceError&) {
    }
  }
  return r;
}

PrimeTailReport prime_sum_tail(std::uint64_t x, double t, std::uint64_t trials, std::uint64_t seed, unsigned workers) {
  require_trials(trials);
  if (!(t > 0)) throw DomainError("threshold must be > 0");
  if (x > kLinearSieveCeiling) throw ResourceError("prime_sum_tail supports x <= 10^7");
  const auto primes = primes_up_to(x).primes;
  const std::size_t chunks = static_cast<std::size_t>((trials + kChunk - 1) / kChunk);
  std::vector<std::uint64_t> hits(chunks, 0);
  parallel_for(chunks, workers, [&](std::size_t c) {
    const std::uint64_t lo = c * kChunk, hi = std::min(trials, lo + kChunk);
    for (std::uint64_t tr = lo; tr < hi; ++tr) {
      const std::uint64_t s = trial_seed(seed, tr);
      std::int64_t sum = 0;
      for (const auto p : primes) sum += prime_sign(s, p);
      if (static_cast<double>(sum) <= -t) ++hits[c];
    }
  });
  PrimeTailReport r;
  r.x = x;
  r.threshold = t;
  r.trials = trials;
  for (const auto h : hits) r.hits += h;
  r.empirical = static_cast<double>(r.hits) / static_cast<double>(trials);
  r.hoeffding_bound = primes.empty() ? 0.0 : std::exp(-t * t / (2.0 * static_cast<double>(primes.size())));
  return r;
}

TailEstimate fracpart_tail_mc(std::uint64_t x, double M, std::uint64_t trials, std::uint64_t seed, unsigned workers) {
  require_trials(trials);
  if (!(M > 0)) throw DomainError("M must be > 0");
  if (x < 2) throw DomainError("x must be >= 2");
  const Sampler sampler(x);
  const double threshold = M * static_cast<double>(x) / std::log(static_cast<double>(x));
  std::vector<double> w(x + 1, 0.0);
  for (std::uint64_t n = 1; n <= x; ++n) w[n] = static_cast<double>(x % n) / static_cast<double>(n);
  const auto acc = run_trials<std::uint64_t>(sampler, trials, seed, workers, [&](const std::vector<std::int8_t>& f, std::uint64_t& hits) {
    kernels::Neumaier s;
    for (std::uint64_t n = 1; n <= x; ++n) s.add(f[n] * w[n]);
    if (std::abs(s.value()) >= threshold) ++hits;
  });
  std::uint64_t hits = 0;
  for (const auto h : acc) hits += h;
  return make_tail(x, trials, hits);
}

}  // namespace lsl::randmult
