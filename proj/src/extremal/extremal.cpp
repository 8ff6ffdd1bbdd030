#include "lsl/extremal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "lsl/error.hpp"
#include "lsl/kronecker.hpp"
#include "lsl/parallel.hpp"
#include "lsl/primes.hpp"

namespace lsl::extremal {

std::string to_string(Method m) {
  switch (m) {
    case Method::Exhaustive: return "exhaustive";
    case Method::BranchBound: return "branch-bound";
    case Method::Greedy: return "greedy";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  if (text == "exhaustive") return Method::Exhaustive;
  if (text == "bb" || text == "branch-bound") return Method::BranchBound;
  if (text == "greedy") return Method::Greedy;
  throw ConfigError("unknown method '" + text + "' (expected exhaustive, bb or greedy)");
}

namespace {

// a precedes b when, at the smallest prime where they differ, a has -1.
bool lex_less(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t d = a ^ b;
  if (!d) return false;
  return (a & (d & (~d + 1))) == 0;
}

SignVector signs_from_mask(std::uint64_t x, const std::vector<std::uint64_t>& primes, std::uint64_t mask) {
  SignVector sv;
  sv.limit = x;
  sv.primes = primes;
  sv.signs.resize(primes.size());
  for (std::size_t i = 0; i < primes.size(); ++i) sv.signs[i] = (mask >> i) & 1 ? 1 : -1;
  return sv;
}

// Bitmask over prime indices of the primes dividing n to an odd power.
std::uint64_t parity_mask(std::uint64_t n, const std::vector<std::uint64_t>& primes) {
  std::uint64_t mask = 0;
  for (std::size_t i = 0; i < primes.size() && n > 1; ++i) {
    const std::uint64_t p = primes[i];
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e & 1) mask |= std::uint64_t(1) << i;
  }
  if (n != 1) throw DomainError("parity_mask: factor outside prime list");
  return mask;
}

struct Candidate {
  Int192 value;
  std::uint64_t mask = 0;
  std::uint64_t negative = 0;
  bool set = false;

  void offer(const Int192& v, std::uint64_t m) {
    if (v.sign() < 0) ++negative;
    if (!set || v < value || (v == value && lex_less(m, mask))) {
      value = v;
      mask = m;
      set = true;
    }
  }
};

}  // namespace

SignEnumeration enumerate_sign_vectors(std::uint64_t x, unsigned workers) {
  if (x == 0) throw DomainError("x must be >= 1");
  const auto primes = primes_up_to(x).primes;
  const std::size_t k = primes.size();
  if (k > kExhaustiveMaxPrimes)
    throw ResourceError("exhaustive enumeration needs pi(x) <= " + std::to_string(kExhaustiveMaxPrimes) + " (pi(" +
                        std::to_string(x) + ") = " + std::to_string(k) + ")");

  const BigInt D = lcm_up_to(x);
  std::map<std::uint64_t, BigInt> grouped;
  for (std::uint64_t n = 1; n <= x; ++n) grouped[parity_mask(n, primes)] += D / n;

  std::vector<std::uint64_t> masks;
  std::vector<Int192> weight, twice;
  for (const auto& [m, w] : grouped) {
    masks.push_back(m);
    weight.push_back(Int192::from_big(w));
    twice.push_back(Int192::from_big(w * 2));
  }
  std::vector<std::vector<std::uint32_t>> members(k);
  for (std::size_t c = 0; c < masks.size(); ++c)
    for (std::size_t i = 0; i < k; ++i)
      if ((masks[c] >> i) & 1) members[i].push_back(static_cast<std::uint32_t>(c));

  // The smallest primes are fixed per task; the rest run in Gray order with
  // the largest primes on the fastest-changing positions.
  const std::size_t top = std::min<std::size_t>(k, 8);
  const std::size_t low = k - top;
  const std::size_t tasks = std::size_t(1) << top;
  std::vector<Candidate> results(tasks);

  parallel_for(tasks, workers, [&](std::size_t task) {
    std::uint64_t assign = task;
    std::vector<std::int8_t> sign(masks.size());
    Int192 total;
    for (std::size_t c = 0; c < masks.size(); ++c) {
      sign[c] = std::popcount(masks[c] & ~assign) & 1 ? -1 : 1;
      if (sign[c] > 0)
        total += weight[c];
      else
        total -= weight[c];
    }
    Candidate& best = results[task];
    best.offer(total, assign);
    const std::uint64_t steps = std::uint64_t(1) << low;
    for (std::uint64_t t = 1; t < steps; ++t) {
      const std::size_t i = k - 1 - static_cast<std::size_t>(std::countr_zero(t));
      assign ^= std::uint64_t(1) << i;
      for (const std::uint32_t c : members[i]) {
        if (sign[c] > 0)
          total -= twice[c];
        else
          total += twice[c];
        sign[c] = static_cast<std::int8_t>(-sign[c]);
      }
      best.offer(total, assign);
    }
  });

  Candidate best;
  std::uint64_t negative = 0;
  for (const auto& r : results) {
    negative += r.negative;
    if (!best.set || r.value < best.value || (r.value == best.value && lex_less(r.mask, best.mask))) {
      best.value = r.value;
      best.mask = r.mask;
      best.set = true;
    }
  }

  SignEnumeration out;
  out.x = x;
  out.primes = primes;
  out.minimum = Rational(best.value.to_big(), D);
  out.minimum.canonicalize();
  out.argmin_mask = best.mask;
  out.negative_count = negative;
  out.total = std::uint64_t(1) << k;
  return out;
}

ExtremalResult delta1_exhaustive(std::uint64_t x, unsigned workers) {
  const auto e = enumerate_sign_vectors(x, workers);
  ExtremalResult r;
  r.x = x;
  r.minimum = e.minimum;
  r.argmin = signs_from_mask(x, e.primes, e.argmin_mask);
  r.method = Method::Exhaustive;
  r.nodes_explored = e.total;
  return r;
}

namespace {

struct BranchProblem {
  std::uint64_t x;
  std::vector<std::uint64_t> small;  // p*p <= x
  std::vector<std::uint64_t> large;
  BigInt D;

  // integers n <= x free of large primes, grouped by parity mask
  std::vector<std::uint64_t> cls_mask;
  std::vector<BigInt> cls_exact;  // sum D/n
  std::vector<double> cls_real;   // sum 1/n
  std::vector<int> cls_top;       // highest prime index in mask, -1 if none

  // coefficient of f(p) for large p is (1/p) sum_{m <= x/p} f(m)/m
  std::uint64_t qmax = 0;
  BigInt M;                          // lcm(1..qmax)
  std::vector<std::uint64_t> m_mask;  // index m
  std::vector<BigInt> m_exact;        // M/m
  std::vector<double> m_real;         // 1/m
  std::vector<int> m_top;
  std::vector<std::uint64_t> group_q;  // ascending
  std::vector<BigInt> group_exact;     // sum_p D/(p M)
  std::vector<double> group_real;      // sum_p 1/p
  std::vector<std::vector<std::uint64_t>> group_primes;

  std::uint64_t nodes = 0;
  bool have_best = false;
  BigInt best;
  double best_real = std::numeric_limits<double>::infinity();
  std::uint64_t best_small = 0;
  std::vector<std::int8_t> best_large;

  static int top_bit(std::uint64_t m) { return m ? 63 - std::countl_zero(m) : -1; }

  static int value(std::uint64_t mask, std::uint64_t assign) { return std::popcount(mask & ~assign) & 1 ? -1 : 1; }

  double lower_bound(std::size_t depth, std::uint64_t assign) const {
    const int fixed = static_cast<int>(depth);
    double lb = 0;
    for (std::size_t c = 0; c < cls_mask.size(); ++c)
      lb += cls_top[c] < fixed ? value(cls_mask[c], assign) * cls_real[c] : -cls_real[c];
    double h_fixed = 0, h_free = 0;
    std::uint64_t m = 1;
    for (std::size_t g = 0; g < group_q.size(); ++g) {
      for (; m <= group_q[g]; ++m) {
        if (m_top[m] < fixed)
          h_fixed += value(m_mask[m], assign) * m_real[m];
        else
          h_free += m_real[m];
      }
      lb -= (std::abs(h_fixed) + h_free) * group_real[g];
    }
    return lb;
  }

  void leaf(std::uint64_t assign) {
    BigInt v = 0;
    for (std::size_t c = 0; c < cls_mask.size(); ++c) {
      if (value(cls_mask[c], assign) > 0)
        v += cls_exact[c];
      else
        v -= cls_exact[c];
    }
    std::vector<std::int8_t> large_signs;
    large_signs.reserve(large.size());
    BigInt h = 0;
    std::uint64_t m = 1;
    for (std::size_t g = 0; g < group_q.size(); ++g) {
      for (; m <= group_q[g]; ++m) {
        if (value(m_mask[m], assign) > 0)
          h += m_exact[m];
        else
          h -= m_exact[m];
      }
      // f(p) = -sign(coefficient); zero coefficient takes -1
      const int s = sgn(h) > 0 ? -1 : (sgn(h) < 0 ? 1 : -1);
      v -= abs(h) * group_exact[g];
      for (std::size_t j = 0; j < group_primes[g].size(); ++j) large_signs.push_back(static_cast<std::int8_t>(s));
    }
    if (!have_best || v < best) {
      have_best = true;
      best = v;
      best_real = Rational(v, D).get_d();
      best_small = assign;
      best_large = std::move(large_signs);
    }
  }

  void search(std::size_t depth, std::uint64_t assign) {
    ++nodes;
    if (depth == small.size()) {
      leaf(assign);
      return;
    }
    if (have_best) {
      const double lb = lower_bound(depth, assign);
      if (lb - 1e-9 * (1.0 + std::abs(lb)) > best_real) return;
    }
    search(depth + 1, assign);
    search(depth + 1, assign | (std::uint64_t(1) << depth));
  }
};

}  // namespace

ExtremalResult delta1_branch_bound(std::uint64_t x) {
  if (x == 0) throw DomainError("x must be >= 1");
  BranchProblem bp;
  bp.x = x;
  for (const auto p : primes_up_to(x).primes) (p * p <= x ? bp.small : bp.large).push_back(p);
  if (bp.small.size() > kBranchMaxPrimes)
    throw ResourceError("branch-and-bound needs at most " + std::to_string(kBranchMaxPrimes) + " primes <= sqrt(x)");
  bp.D = lcm_up_to(x);

  std::map<std::uint64_t, BigInt> grouped;
  for (std::uint64_t n = 1; n <= x; ++n) {
    std::uint64_t r = n;
    for (const auto p : bp.small)
      while (r % p == 0) r /= p;
    if (r != 1) continue;
    auto& slot = grouped[parity_mask(n, bp.small)];
    slot += bp.D / n;
  }
  for (auto& [mask, w] : grouped) {
    bp.cls_mask.push_back(mask);
    bp.cls_real.push_back(Rational(w, bp.D).get_d());
    bp.cls_exact.push_back(w);
    bp.cls_top.push_back(BranchProblem::top_bit(mask));
  }

  std::map<std::uint64_t, std::vector<std::uint64_t>> by_q;
  for (const auto p : bp.large) by_q[x / p].push_back(p);
  bp.qmax = by_q.empty() ? 0 : by_q.rbegin()->first;
  bp.M = lcm_up_to(std::max<std::uint64_t>(bp.qmax, 1));
  bp.m_mask.assign(bp.qmax + 1, 0);
  bp.m_exact.assign(bp.qmax + 1, 0);
  bp.m_real.assign(bp.qmax + 1, 0.0);
  bp.m_top.assign(bp.qmax + 1, -1);
  for (std::uint64_t m = 1; m <= bp.qmax; ++m) {
    bp.m_mask[m] = parity_mask(m, bp.small);
    bp.m_exact[m] = bp.M / m;
    bp.m_real[m] = 1.0 / static_cast<double>(m);
    bp.m_top[m] = BranchProblem::top_bit(bp.m_mask[m]);
  }
  for (auto& [q, ps] : by_q) {
    BigInt e = 0;
    double r = 0;
    for (const auto p : ps) {
      e += bp.D / (bp.M * p);
      r += 1.0 / static_cast<double>(p);
    }
    bp.group_q.push_back(q);
    bp.group_exact.push_back(e);
    bp.group_real.push_back(r);
    bp.group_primes.push_back(ps);
  }

  bp.search(0, 0);

  // group_primes run in ascending q, i.e. descending p
  std::vector<std::pair<std::uint64_t, std::int8_t>> large_assign;
  std::size_t idx = 0;
  for (const auto& ps : bp.group_primes)
    for (const auto p : ps) large_assign.emplace_back(p, bp.best_large[idx++]);
  std::sort(large_assign.begin(), large_assign.end());

  ExtremalResult r;
  r.x = x;
  r.method = Method::BranchBound;
  r.nodes_explored = bp.nodes;
  r.minimum = Rational(bp.best, bp.D);
  r.minimum.canonicalize();
  r.argmin.limit = x;
  for (std::size_t i = 0; i < bp.small.size(); ++i) {
    r.argmin.primes.push_back(bp.small[i]);
    r.argmin.signs.push_back((bp.best_small >> i) & 1 ? 1 : -1);
  }
  for (const auto& [p, s] : large_assign) {
    r.argmin.primes.push_back(p);
    r.argmin.signs.push_back(s);
  }
  return r;
}

ExtremalResult delta1_greedy(std::uint64_t x) {
  if (x == 0) throw DomainError("x must be >= 1");
  if (x > kLinearSieveCeiling) throw ResourceError("greedy search supports x <= 10^7");
  const auto n_max = static_cast<std::uint32_t>(x);
  // largest prime factor
  std::vector<std::uint32_t> lpf(n_max + 1, 0);
  for (std::uint32_t p = 2; p <= n_max; ++p)
    if (lpf[p] == 0)
      for (std::uint32_t m = p; m <= n_max; m += p) lpf[m] = p;

  std::vector<std::uint32_t> start(n_max + 2, 0);
  for (std::uint32_t n = 2; n <= n_max; ++n) ++start[lpf[n] + 1];
  for (std::uint32_t i = 1; i < start.size(); ++i) start[i] += start[i - 1];
  std::vector<std::uint32_t> order(n_max > 1 ? n_max - 1 : 0);
  {
    auto pos = start;
    for (std::uint32_t n = 2; n <= n_max; ++n) order[pos[lpf[n]]++] = n;
  }

  std::vector<std::int8_t> f(n_max + 1, 0);
  f[1] = 1;
  SignVector sv;
  sv.limit = x;
  std::uint64_t decisions = 0;
  for (std::uint32_t p = 2; p <= n_max; ++p) {
    if (lpf[p] != p) continue;
    double a_odd = 0, c_odd = 0;
    for (std::uint32_t i = start[p]; i < start[p + 1]; ++i) {
      std::uint32_t m = order[i];
      unsigned v = 0;
      while (m % p == 0) {
        m /= p;
        ++v;
      }
      if (v & 1) {
        // Neumaier
        const double term = f[m] / static_cast<double>(order[i]);
        const double t = a_odd + term;
        c_odd += std::abs(a_odd) >= std::abs(term) ? (a_odd - t) + term : (term - t) + a_odd;
        a_odd = t;
      }
    }
    const std::int8_t fp = (a_odd + c_odd) < 0 ? 1 : -1;
    for (std::uint32_t i = start[p]; i < start[p + 1]; ++i) {
      const std::uint32_t n = order[i];
      std::uint32_t m = n;
      unsigned v = 0;
      while (m % p == 0) {
        m /= p;
        ++v;
      }
      f[n] = static_cast<std::int8_t>(v & 1 ? f[m] * fp : f[m]);
    }
    sv.primes.push_back(p);
    sv.signs.push_back(fp);
    ++decisions;
  }

  std::vector<std::int64_t> coeff(f.begin() + 1, f.end());
  ExtremalResult r;
  r.x = x;
  r.method = Method::Greedy;
  r.nodes_explored = decisions;
  r.minimum = harmonic_sum(coeff, 1);
  r.argmin = std::move(sv);
  return r;
}

Rational logsum_of_signs(const SignVector& signs, std::uint64_t x) {
  std::vector<std::int64_t> coeff(x);
  for (std::uint64_t n = 1; n <= x; ++n) {
    std::uint64_t r = n;
    int v = 1;
    for (std::uint64_t p = 2; p * p <= r; ++p)
      while (r % p == 0) {
        r /= p;
        v *= signs.sign_of(p);
      }
    if (r > 1) v *= signs.sign_of(r);
    coeff[n - 1] = v;
  }
  return harmonic_sum(coeff, 1);
}

std::vector<std::int64_t> fundamental_discriminants(std::int64_t bound) {
  std::vector<std::int64_t> out;
  for (std::int64_t a = 2; a <= bound; ++a) {
    if (is_fundamental_discriminant(-a)) out.push_back(-a);
    if (is_fundamental_discriminant(a)) out.push_back(a);
  }
  return out;
}

CharacterScanResult delta0_character_scan(std::uint64_t x, std::int64_t disc_bound, unsigned workers) {
  if (x == 0) throw DomainError("x must be >= 1");
  if (disc_bound < 3) throw DomainError("disc_bound must be >= 3");
  const auto discs = fundamental_discriminants(disc_bound);
  std::vector<Rational> sums(discs.size());
  parallel_for(discs.size(), workers, [&](std::size_t i) {
    std::vector<std::int64_t> coeff(x);
    for (std::uint64_t n = 1; n <= x; ++n) coeff[n - 1] = kronecker(discs[i], n);
    sums[i] = harmonic_sum(coeff, 1);
  });
  CharacterScanResult r;
  r.x = x;
  r.disc_bound = disc_bound;
  r.discriminants_scanned = discs.size();
  for (std::size_t i = 0; i < discs.size(); ++i) {
    if (i == 0 || sums[i] < r.minimum) {
      r.minimum = sums[i];
      r.argmin_discriminant = discs[i];
    }
  }
  return r;
}

VertexCheckReport delta_vertex_check(std::uint64_t x, std::uint64_t samples, std::uint64_t seed) {
  if (x == 0) throw DomainError("x must be >= 1");
  VertexCheckReport rep;
  rep.x = x;
  const auto primes = primes_up_to(x).primes;
  for (const auto p : primes)
    for (std::uint64_t q = p; q <= x; q *= p) rep.slots.push_back(q);
  std::sort(rep.slots.begin(), rep.slots.end());
  const std::size_t S = rep.slots.size();
  if (S > kVertexMaxSlots)
    throw ResourceError("vertex check needs at most " + std::to_string(kVertexMaxSlots) + " prime powers <= x");

  auto slot_index = [&](std::uint64_t q) {
    return static_cast<std::size_t>(std::lower_bound(rep.slots.begin(), rep.slots.end(), q) - rep.slots.begin());
  };
  // exact prime-power factorisation of each n as a slot mask
  std::vector<std::uint32_t> nmask(x + 1, 0);
  for (std::uint64_t n = 2; n <= x; ++n) {
    std::uint64_t r = n;
    for (const auto p : primes) {
      if (r % p) continue;
      std::uint64_t q = 1;
      while (r % p == 0) {
        r /= p;
        q *= p;
      }
      nmask[n] |= std::uint32_t(1) << slot_index(q);
    }
  }
  const BigInt Dbig = lcm_up_to(x);
  const auto D = static_cast<__int128>(Dbig.get_ui());
  std::vector<__int128> w(x + 1);
  for (std::uint64_t n = 1; n <= x; ++n) w[n] = D / static_cast<__int128>(n);

  __int128 best = 0;
  std::uint64_t best_assign = 0;
  bool have = false;
  const std::uint64_t vertices = std::uint64_t(1) << S;
  for (std::uint64_t a = 0; a < vertices; ++a) {
    __int128 v = 0;
    for (std::uint64_t n = 1; n <= x; ++n) v += std::popcount(nmask[n] & ~a) & 1 ? -w[n] : w[n];
    if (!have || v < best || (v == best && lex_less(a, best_assign))) {
      have = true;
      best = v;
      best_assign = a;
    }
  }
  const bool neg = best < 0;
  const auto mag = static_cast<unsigned __int128>(neg ? -best : best);
  BigInt num = static_cast<unsigned long>(mag >> 64);
  num <<= 64;
  num += static_cast<unsigned long>(static_cast<std::uint64_t>(mag));
  if (neg) num = -num;
  rep.vertex_minimum = Rational(num, Dbig);
  rep.vertex_minimum.canonicalize();
  for (std::size_t i = 0; i < S; ++i) rep.vertex_argmin.push_back((best_assign >> i) & 1 ? 1 : -1);

  std::mt19937_64 rng(seed);
  std::vector<double> val(S);
  rep.samples = samples;
  rep.min_sample_value = std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (auto& v : val) v = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    Rational total = 1;
    for (std::uint64_t n = 2; n <= x; ++n) {
      Rational fn = 1;
      for (std::size_t i = 0; i < S; ++i)
        if ((nmask[n] >> i) & 1) fn *= rational_from_double(val[i]);
      total += fn / n;
    }
    rep.min_sample_value = std::min(rep.min_sample_value, total.get_d());
    if (total < rep.vertex_minimum) ++rep.violations;
  }
  if (samples == 0) rep.min_sample_value = 0;
  return rep;
}

}  // namespace lsl::extremal
