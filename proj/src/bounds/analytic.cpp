#include "lsl/analytic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "lsl/error.hpp"
#include "lsl/kernels.hpp"
#include "lsl/logsum.hpp"
#include "lsl/parallel.hpp"
#include "lsl/primes.hpp"

namespace lsl::bounds {

namespace {

void require_completely_multiplicative(const MultiplicativeSpec& spec) {
  if (!spec.completely_multiplicative()) throw DomainError("operation needs a completely multiplicative spec");
}

struct PrimeTerm {
  double a;      // f(p) p^-sigma
  double theta;  // log p
  int terms;     // series length for -log(1 - w), 0 = use std::log
};

std::vector<PrimeTerm> prime_terms(const MultiplicativeSpec& spec, double sigma, std::uint64_t cutoff) {
  const auto primes = primes_up_to(cutoff).primes;
  std::vector<PrimeTerm> out;
  out.reserve(primes.size());
  for (const auto p : primes) {
    const double fp = spec.prime_value(p);
    if (std::abs(fp) > 1.0) throw DomainError("halasz: |f(p)| must be <= 1");
    const double theta = std::log(static_cast<double>(p));
    const double a = fp * std::exp(-sigma * theta);
    int terms = 0;
    const double mag = std::abs(a);
    if (mag == 0.0) {
      terms = -1;
    } else if (mag <= 0.02) {
      // |a|^(n+1) / (n+1) below 1e-18
      terms = static_cast<int>(std::ceil(std::log(1e-18) / std::log(mag))) - 1;
      terms = std::max(terms, 1);
    }
    out.push_back({a, theta, terms});
  }
  return out;
}

// -log(1 - w)
std::complex<double> neg_log1m(std::complex<double> w, int terms) {
  if (terms < 0) return 0.0;
  if (terms == 0) return -std::log(1.0 - w);
  std::complex<double> acc = 1.0 / terms;
  for (int j = terms - 1; j >= 1; --j) acc = 1.0 / j + w * acc;
  return w * acc;
}

std::complex<double> log_product_at(const std::vector<PrimeTerm>& terms, double t) {
  std::complex<double> acc = 0.0;
  for (const auto& pt : terms) {
    const std::complex<double> w = pt.a * std::polar(1.0, -t * pt.theta);
    acc += neg_log1m(w, pt.terms);
  }
  return acc;
}

double log_ratio(const std::vector<PrimeTerm>& terms, double sigma, double t) {
  return log_product_at(terms, t).real() - std::log(std::abs(std::complex<double>(sigma, t)));
}

}  // namespace

std::complex<double> euler_product_log(const MultiplicativeSpec& spec, double sigma, double t, std::uint64_t cutoff) {
  require_completely_multiplicative(spec);
  if (!(sigma > 1.0)) throw DomainError("euler product needs Re s > 1");
  return log_product_at(prime_terms(spec, sigma, cutoff), t);
}

double prime_tail_estimate(double sigma, std::uint64_t cutoff) {
  if (!(sigma > 1.0)) throw DomainError("tail estimate needs sigma > 1");
  const double arg = (sigma - 1.0) * std::log(static_cast<double>(std::max<std::uint64_t>(cutoff, 2)));
  return -std::expint(-arg);  // E1(arg)
}

HalaszReport halasz_M(const MultiplicativeSpec& spec, std::uint64_t x, const HalaszOptions& options) {
  require_completely_multiplicative(spec);
  if (x < 3) throw DomainError("halasz_M needs x >= 3");
  const double L = std::log(static_cast<double>(x));
  HalaszReport r;
  r.x = x;
  r.sigma = 1.0 + 1.0 / L;
  r.t_max = options.t_max.value_or(L);
  if (r.t_max < 0) throw DomainError("t_max must be >= 0");
  r.steps = r.t_max == 0 ? 1 : std::max<std::uint64_t>(options.steps, 2);
  r.euler_cutoff = options.euler_cutoff.value_or(std::max<std::uint64_t>(x, kDefaultEulerCutoff));
  if (r.euler_cutoff < x) throw DomainError("euler_cutoff must be >= x");

  const auto terms = prime_terms(spec, r.sigma, r.euler_cutoff);
  const double dt = r.steps > 1 ? 2.0 * r.t_max / static_cast<double>(r.steps - 1) : 0.0;
  auto grid_t = [&](std::uint64_t k) { return r.steps > 1 ? -r.t_max + dt * static_cast<double>(k) : 0.0; };

  // Chunks of the grid; phases advance by a fixed rotation per prime.
  constexpr std::uint64_t kChunk = 256;
  const std::size_t chunks = static_cast<std::size_t>((r.steps + kChunk - 1) / kChunk);
  std::vector<double> lratio(r.steps);
  parallel_for(chunks, options.workers, [&](std::size_t c) {
    const std::uint64_t lo = c * kChunk, hi = std::min<std::uint64_t>(r.steps, lo + kChunk);
    std::vector<std::complex<double>> acc(hi - lo, 0.0);
    for (const auto& pt : terms) {
      if (pt.terms < 0) continue;
      std::complex<double> w = pt.a * std::polar(1.0, -grid_t(lo) * pt.theta);
      const std::complex<double> rot = std::polar(1.0, -dt * pt.theta);
      for (std::uint64_t k = lo; k < hi; ++k) {
        acc[k - lo] += neg_log1m(w, pt.terms);
        w *= rot;
      }
    }
    for (std::uint64_t k = lo; k < hi; ++k)
      lratio[k] = acc[k - lo].real() - std::log(std::abs(std::complex<double>(r.sigma, grid_t(k))));
  });

  std::uint64_t best = 0;
  for (std::uint64_t k = 1; k < r.steps; ++k) {
    if (lratio[k] > lratio[best]) best = k;
    if (std::abs(std::exp(lratio[k] - lratio[k - 1]) - 1.0) > 0.10) r.coarse_grid_warning = true;
  }
  double t_best = grid_t(best), l_best = lratio[best];

  if (r.steps > 1) {
    const double h = dt / 2;
    const double gm = log_ratio(terms, r.sigma, t_best - h), gp = log_ratio(terms, r.sigma, t_best + h);
    const double d1 = (gp - gm) / (2 * h), d2 = (gp - 2 * l_best + gm) / (h * h);
    if (d2 < 0) {
      double t_new = t_best - d1 / d2;
      t_new = std::clamp(t_new, std::max(-r.t_max, t_best - dt), std::min(r.t_max, t_best + dt));
      const double l_new = log_ratio(terms, r.sigma, t_new);
      if (l_new > l_best) {
        t_best = t_new;
        l_best = l_new;
        r.refined = true;
      }
    }
  }
  r.argmax_t = t_best;
  r.max_ratio = std::exp(l_best);
  r.M = std::log(L) - l_best;
  r.tail_log_bound = prime_tail_estimate(r.sigma, r.euler_cutoff);
  return r;
}

std::string to_string(PrimeWeight w) {
  switch (w) {
    case PrimeWeight::OneMinusF: return "1-f";
    case PrimeWeight::OnePlusF: return "1+f";
    case PrimeWeight::F: return "f";
    case PrimeWeight::One: return "1";
  }
  return "?";
}

PrimeWeight parse_prime_weight(const std::string& text) {
  if (text == "1-f") return PrimeWeight::OneMinusF;
  if (text == "1+f" || text == "g") return PrimeWeight::OnePlusF;
  if (text == "f") return PrimeWeight::F;
  if (text == "1") return PrimeWeight::One;
  throw ConfigError("unknown prime weight '" + text + "' (expected 1-f, 1+f, f or 1)");
}

double mertens_weighted_sum(const MultiplicativeSpec& spec, std::uint64_t x, PrimeWeight weight) {
  kernels::Neumaier acc;
  for (const auto p : primes_up_to(x).primes) {
    double w = 1.0;
    switch (weight) {
      case PrimeWeight::OneMinusF: w = 1.0 - spec.prime_value(p); break;
      case PrimeWeight::OnePlusF: w = 1.0 + spec.prime_value(p); break;
      case PrimeWeight::F: w = spec.prime_value(p); break;
      case PrimeWeight::One: break;
    }
    acc.add(w / static_cast<double>(p));
  }
  return acc.value();
}

double hall_tenenbaum_bound(const MultiplicativeSpec& spec, std::uint64_t x) {
  return static_cast<double>(x) * std::exp(-kHallTenenbaumKappa * mertens_weighted_sum(spec, x, PrimeWeight::OneMinusF));
}

CepEnvelope cep_envelope(double w, double z) {
  if (!(z >= 2.0) || !(w >= z)) throw DomainError("cep_envelope needs w >= z >= 2");
  CepEnvelope e;
  e.u = std::log(w) / std::log(z);
  e.envelope = w * std::pow(e.u, -e.u);
  e.valid = e.u <= std::sqrt(z);
  return e;
}

namespace {

class PsiCounter {
 public:
  PsiCounter(std::uint64_t x, std::uint64_t y, std::size_t budget) : budget_(budget) {
    primes_ = primes_up_to(std::min(x, y)).primes;
    next_prime_ = y + 1;
    while (!is_prime(next_prime_)) ++next_prime_;
  }

  std::size_t memo_size() const { return memo_.size(); }
  std::size_t prime_count() const { return primes_.size(); }

  // smooth n <= x over the first j primes
  std::uint64_t count(std::uint64_t x, std::size_t j) {
    if (x == 0) return 0;
    const auto below = static_cast<std::size_t>(std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
    if (j >= below) {
      j = below;
      if (x < next_prime_) return x;  // every prime <= x is allowed
    }
    if (j == 0) return 1;
    if (j == 1) return static_cast<std::uint64_t>(std::bit_width(x));
    const Key key{x, j};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::uint64_t s = static_cast<std::uint64_t>(std::bit_width(x));
    for (std::size_t i = 1; i < j; ++i) s += count(x / primes_[i], i + 1);
    if (memo_.size() >= budget_) throw ResourceError("psi_smooth: memo budget exceeded");
    memo_.emplace(key, s);
    return s;
  }

 private:
  struct Key {
    std::uint64_t x;
    std::size_t j;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const { return std::hash<std::uint64_t>()(k.x * 0x9e3779b97f4a7c15ULL ^ k.j); }
  };
  std::vector<std::uint64_t> primes_;
  std::uint64_t next_prime_ = 2;
  std::size_t budget_;
  std::unordered_map<Key, std::uint64_t, KeyHash> memo_;
};

}  // namespace

SmoothCount psi_smooth(std::uint64_t x, std::uint64_t y, std::size_t memo_budget) {
  if (x == 0 || y == 0) throw DomainError("psi_smooth needs x >= 1 and y >= 1");
  SmoothCount s;
  s.x = x;
  s.y = y;
  if (y >= x) {
    s.psi = x;
  } else {
    PsiCounter counter(x, y, memo_budget);
    s.psi = counter.count(x, counter.prime_count());
    s.memo_entries = counter.memo_size();
  }
  if (y >= 2) {
    s.u = std::log(static_cast<double>(x)) / std::log(static_cast<double>(y));
    s.rho_u = dickman_rho(s.u);
    s.cep_envelope = static_cast<double>(x) * std::pow(s.u, -s.u);
    s.cep_valid = s.u <= std::sqrt(static_cast<double>(y));
  } else {
    s.u = std::numeric_limits<double>::infinity();
    s.rho_u = 0.0;
    s.cep_envelope = 0.0;
  }
  return s;
}

double dickman_rho(double u, double step) {
  if (!(u >= 0)) throw DomainError("dickman_rho needs u >= 0");
  if (!(step > 0)) throw DomainError("dickman_rho needs step > 0");
  if (u <= 1.0) return 1.0;
  if (u > 50.0) return 0.0;
  const auto n = static_cast<std::size_t>(std::ceil((u - 1.0) / step));
  const double h = (u - 1.0) / static_cast<double>(n);
  std::vector<double> r(n + 1);
  r[0] = 1.0;
  auto delayed = [&](double v) {
    if (v <= 1.0) return 1.0;
    const double pos = (v - 1.0) / h;
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return r[i] + (r[i + 1] - r[i]) * frac;
  };
  // midpoint rule on rho'(u) = -rho(u - 1) / u
  for (std::size_t k = 0; k < n; ++k) {
    const double m = 1.0 + (static_cast<double>(k) + 0.5) * h;
    r[k + 1] = r[k] - h * delayed(m - 1.0) / m;
  }
  return std::max(0.0, r[n]);
}

LogValue euler_moment_product(unsigned q, double delta, std::uint64_t p_lo, std::uint64_t p_hi) {
  if (q % 2 != 0) throw DomainError("q must be even");
  if (!(delta >= 0.0 && delta < 1.0)) throw DomainError("delta must lie in [0, 1)");
  if (p_lo < 2 || p_lo > p_hi) throw DomainError("need 2 <= p_lo <= p_hi");
  kernels::Neumaier log_acc;
  double direct = 1.0;
  for (const auto p : primes_up_to(p_hi).primes) {
    if (p < p_lo) continue;
    const double a = std::pow(static_cast<double>(p), delta - 1.0);
    const double factor = 0.5 * (std::pow(1.0 + a, q) + std::pow(1.0 - a, q));
    log_acc.add(std::log(factor));
    direct *= factor;
  }
  LogValue v;
  v.log_value = log_acc.value();
  v.value = std::isfinite(direct) ? direct : std::exp(v.log_value);
  return v;
}

double MomentParams::delta() const { return std::log(y) / std::log(x); }

double MomentParams::epsilon() const {
  const double ll = std::log(std::log(x));
  return std::log(ll) / (C * ll);
}

MomentBound moment_bound_rhs(const MomentParams& p) {
  if (!(p.x >= 16.0)) throw DomainError("moment bound needs x >= 16");
  if (p.q == 0 || p.q % 2 != 0) throw DomainError("q must be a positive even integer");
  if (!(p.y > 1.0 && p.y <= p.x)) throw DomainError("need 1 < y <= x");
  if (!(p.C > 0)) throw DomainError("C must be > 0");
  const double L = std::log(p.x), LL = std::log(L);
  const double q = p.q;
  MomentBound b;
  b.delta = p.delta();
  b.epsilon = p.epsilon();
  b.log_term1 = q * L - 0.5 * q * std::log(p.y) + q * (q * std::exp(-b.epsilon * L) + 2.0 * LL);
  b.log_term2 = q * (L - p.C * LL);
  const double hi = std::max(b.log_term1, b.log_term2), lo = std::min(b.log_term1, b.log_term2);
  b.total.log_value = hi + std::log1p(std::exp(lo - hi));
  b.total.value = std::exp(b.total.log_value);
  return b;
}

MarkovTail markov_tail_bound(double x, double M, double A, double C) {
  if (!(x >= 16.0)) throw DomainError("markov bound needs x >= 16");
  if (!(M > 0) || !(A > 0) || !(C > 0)) throw DomainError("M, A and C must be > 0");
  MarkovTail m;
  m.x = x;
  m.M = M;
  m.A = A;
  m.C = C;
  const double L = std::log(x), LL = std::log(L), LLL = std::log(LL);
  m.y = std::pow(L, A);
  if (m.y > x) {
    m.y = x;
    m.y_clamped = true;
  }
  m.q_raw = std::exp(LLL * L / (C * LL));
  m.q = static_cast<unsigned>(std::max(2.0, 2.0 * std::round(m.q_raw / 2.0)));
  m.rhs = moment_bound_rhs({x, m.y, m.q, C});
  m.log_bound = m.rhs.total.log_value - m.q * std::log(M * x / L);
  m.bound = std::exp(m.log_bound);
  return m;
}

PrimeProductCount count_prime_products(const PrimeProductQuery& query, std::uint64_t budget) {
  if (query.k == 0) throw DomainError("k must be >= 1");
  if (!(query.lambda_param > 0 && query.lambda_param < 1)) throw DomainError("lambda must lie in (0, 1)");
  if (query.u && query.v && *query.u > *query.v) throw DomainError("need u <= v");
  std::vector<std::uint64_t> P = query.primes;
  std::sort(P.begin(), P.end());
  P.erase(std::unique(P.begin(), P.end()), P.end());
  const double L = std::log(static_cast<double>(std::max<std::uint64_t>(query.x, 2)));
  for (const auto p : P) {
    if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
    const double lp = std::log(static_cast<double>(p));
    if (query.v && !(lp > L / *query.v - 1e-12)) throw DomainError(std::to_string(p) + " is not above x^(1/v)");
    if (query.u && !(lp <= L / *query.u + 1e-12)) throw DomainError(std::to_string(p) + " exceeds x^(1/u)");
  }
  PrimeProductCount out;
  const auto x = static_cast<unsigned __int128>(query.x);
  auto dfs = [&](auto&& self, unsigned depth, unsigned __int128 prod) -> void {
    if (++out.nodes > budget) throw ResourceError("count_prime_products: enumeration budget exceeded");
    if (depth == query.k) {
      if (2 * prod >= x) ++out.count;
      return;
    }
    for (const auto p : P) {
      if (prod * p > x) break;
      self(self, depth + 1, prod * p);
    }
  };
  dfs(dfs, 0, 1);
  if (query.v && query.x >= 2) {
    const double scale = static_cast<double>(query.x) / (std::pow(*query.v, query.k) * L);
    out.ratio = static_cast<double>(out.count) / scale;
  }
  return out;
}

Lemma32Report lemma32_diagnostic(const MultiplicativeSpec& spec, std::uint64_t x, std::uint64_t z) {
  require_completely_multiplicative(spec);
  if (x == 0 || z == 0) throw DomainError("need x >= 1 and z >= 1");
  Lemma32Report r;
  r.x = x;
  r.z = z;
  r.lhs = logsum::smooth_restricted_logsum(spec, x, z).get_d();
  r.rhs_core = std::exp(mertens_weighted_sum(spec, z, PrimeWeight::OnePlusF));
  r.ratio = r.lhs / r.rhs_core;
  r.u = z >= 2 ? std::log(static_cast<double>(x)) / std::log(static_cast<double>(z)) : std::numeric_limits<double>::infinity();
  return r;
}

Prop33Report prop33_diagnostic(const MultiplicativeSpec& spec, std::uint64_t x, double delta, double v, double epsilon) {
  if (!(delta > 0 && delta < 1)) throw DomainError("delta must lie in (0, 1)");
  if (!(v > 0) || !(epsilon > 0)) throw DomainError("v and epsilon must be > 0");
  if (x < 3) throw DomainError("prop33 needs x >= 3");
  Prop33Report r;
  r.x = x;
  r.delta = delta;
  r.v = v;
  r.epsilon = epsilon;
  const double L = std::log(static_cast<double>(x));
  const double lower = std::exp(L / v);
  kernels::Neumaier hyp;
  for (const auto p : primes_up_to(x).primes) {
    if (static_cast<double>(p) < lower * (1 - 1e-15)) continue;
    if (spec.prime_value(p) >= -delta) {
      ++r.primes_in_set;
      hyp.add(1.0 / static_cast<double>(p));
    }
  }
  r.hypothesis_sum = hyp.value();
  r.hypothesis_holds = r.hypothesis_sum >= 1.0 + epsilon;
  r.in_proven_range = 40000.0 / (epsilon * epsilon) <= v && v <= L / (1000.0 * std::log(L));
  r.lhs = logsum::compute_ledger(spec, x, logsum::Mode::CompensatedFloat).G;
  r.rhs_skeleton = epsilon * epsilon * std::pow((1.0 - delta) / v, v / std::numbers::e) *
                   std::exp(mertens_weighted_sum(spec, x, PrimeWeight::F)) * static_cast<double>(x);
  r.ratio = r.lhs / r.rhs_skeleton;
  return r;
}

}  // namespace lsl::bounds
