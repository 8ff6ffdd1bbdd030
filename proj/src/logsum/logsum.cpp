#include "lsl/logsum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "lsl/error.hpp"
#include "lsl/format.hpp"
#include "lsl/parallel.hpp"

namespace lsl::logsum {

namespace {

constexpr double u = kernels::kUnitRoundoff;
constexpr std::uint64_t kBlock = 1 << 16;

void require_table(const ValueTable& values, std::uint64_t x) {
  if (x < 1) throw DomainError("x must be >= 1");
  if (values.limit < x)
    throw ConfigError("value table covers n <= " + std::to_string(values.limit) + ", need " + std::to_string(x));
}

SumLedger exact_ledger(const ValueTable& values, std::uint64_t x) {
  if (x > kExactLimit)
    throw ModeError("exact mode is limited to x <= " + std::to_string(kExactLimit) + " (got " + std::to_string(x) + ")");
  SumLedger L;
  L.x = x;
  L.mode = Mode::ExactRational;
  if (values.integral()) {
    std::vector<std::int64_t> cs(x), cphi(x);
    std::int64_t T = 0, G = 0;
    for (std::uint64_t n = 1; n <= x; ++n) {
      const std::int64_t f = values.codes[n];
      cs[n - 1] = f;
      cphi[n - 1] = f * static_cast<std::int64_t>(x % n);
      T += f;
      G += f * static_cast<std::int64_t>(x / n);
    }
    L.S_exact = harmonic_sum(cs);
    L.Phi_exact = harmonic_sum(cphi);
    L.T_exact = Rational(BigInt(static_cast<long>(T)));
    L.G_exact = Rational(BigInt(static_cast<long>(G)));
  } else {
    std::vector<Rational> cs(x), cphi(x), ts(x), gs(x);
    for (std::uint64_t n = 1; n <= x; ++n) {
      const Rational f = rational_from_double(values.reals[n]);
      cs[n - 1] = f;
      cphi[n - 1] = f * Rational(BigInt(static_cast<unsigned long>(x % n)));
      ts[n - 1] = f;
      gs[n - 1] = f * Rational(BigInt(static_cast<unsigned long>(x / n)));
    }
    L.S_exact = harmonic_sum(std::span<const Rational>(cs));
    L.Phi_exact = harmonic_sum(std::span<const Rational>(cphi));
    L.T_exact = tree_sum(std::move(ts));
    L.G_exact = tree_sum(std::move(gs));
  }
  L.S = L.S_exact.get_d();
  L.T = L.T_exact.get_d();
  L.G = L.G_exact.get_d();
  L.Phi = L.Phi_exact.get_d();
  return L;
}

double exact_int_error(std::int64_t v) {
  return std::abs(v) < (std::int64_t(1) << 53) ? 0.0 : u * std::abs(double(v));
}

SumLedger float_ledger(const ValueTable& values, std::uint64_t x, const LedgerOptions& options) {
  if (x >= (std::uint64_t(1) << 52)) throw DomainError("x too large for compensated mode");
  SumLedger L;
  L.x = x;
  L.mode = Mode::CompensatedFloat;
  const std::size_t blocks = static_cast<std::size_t>((x + kBlock - 1) / kBlock);
  if (values.integral()) {
    struct Part {
      kernels::CompensatedSum s, phi;
      std::int64_t t = 0, g = 0;
    };
    std::vector<Part> parts(blocks);
    parallel_for(blocks, options.workers, [&](std::size_t b) {
      const std::uint64_t lo = 1 + b * kBlock;
      const std::uint64_t hi = std::min(x + 1, lo + kBlock);
      std::span<const std::int8_t> v(values.codes.data() + lo, hi - lo);
      parts[b].s = kernels::reciprocal_sum(v, lo, options.isa);
      parts[b].phi = kernels::fracpart_sum(v, lo, x, options.isa);
      parts[b].t = kernels::signed_sum(v, options.isa);
      parts[b].g = kernels::floor_sum(v, lo, x, options.isa);
    });
    kernels::CompensatedSum s, phi;
    std::int64_t t = 0, g = 0;
    for (const auto& p : parts) {
      s = kernels::merge(s, p.s);
      phi = kernels::merge(phi, p.phi);
      t += p.t;
      g += p.g;
    }
    L.S = s.value;
    L.S_error = s.error;
    L.Phi = phi.value;
    L.Phi_error = phi.error;
    L.T = double(t);
    L.T_error = exact_int_error(t);
    L.G = double(g);
    L.G_error = exact_int_error(g);
  } else {
    kernels::Neumaier s, phi, t, g;
    for (std::uint64_t n = 1; n <= x; ++n) {
      const double f = values.reals[n];
      if (f == 0.0) continue;
      s.add(f / double(n));
      phi.add(f * (double(x % n) / double(n)));
      t.add(f);
      g.add(f * double(x / n));
    }
    L.S = s.value();
    L.S_error = kernels::neumaier_bound(s.abs_sum(), s.terms());
    // two roundings per term
    L.Phi = phi.value();
    L.Phi_error = kernels::neumaier_bound(2.0 * phi.abs_sum(), phi.terms());
    L.T = t.value();
    L.T_error = kernels::neumaier_bound(t.abs_sum(), t.terms());
    L.G = g.value();
    L.G_error = kernels::neumaier_bound(g.abs_sum(), g.terms());
  }
  const double xd = double(x);
  L.float_error_bound = (xd * L.S_error + L.G_error + L.Phi_error +
                         4.0 * u * (xd * std::abs(L.S) + std::abs(L.G) + std::abs(L.Phi))) *
                        (1.0 + 0x1p-40);
  return L;
}

}  // namespace

std::string to_string(Mode mode) { return mode == Mode::ExactRational ? "exact" : "compensated"; }

Mode parse_mode(const std::string& text) {
  if (text == "exact" || text == "exact-rational") return Mode::ExactRational;
  if (text == "compensated" || text == "compensated-float" || text == "float") return Mode::CompensatedFloat;
  throw UsageError("unknown mode '" + text + "' (expected exact|compensated)");
}

bool SumLedger::identity_holds() const {
  if (mode == Mode::ExactRational) return Rational(BigInt(static_cast<unsigned long>(x))) * S_exact == G_exact + Phi_exact;
  return std::abs(double(x) * S - G - Phi) <= float_error_bound;
}

SumLedger compute_ledger(const ValueTable& values, std::uint64_t x, Mode mode, const LedgerOptions& options) {
  require_table(values, x);
  return mode == Mode::ExactRational ? exact_ledger(values, x) : float_ledger(values, x, options);
}

SumLedger compute_ledger(const MultiplicativeSpec& spec, std::uint64_t x, Mode mode, const LedgerOptions& options) {
  if (x < 1) throw DomainError("x must be >= 1");
  if (mode == Mode::ExactRational && x > kExactLimit)
    throw ModeError("exact mode is limited to x <= " + std::to_string(kExactLimit) + " (got " + std::to_string(x) + ")");
  return compute_ledger(sieve_values(spec, x), x, mode, options);
}

DecompositionReport decomposition_report(const SumLedger& ledger) {
  if (ledger.x < 3) throw DomainError("decomposition report needs x >= 3");
  DecompositionReport r;
  r.ledger = ledger;
  const double xd = double(ledger.x);
  if (ledger.mode == Mode::ExactRational) {
    const Rational head = ledger.S_exact - ledger.G_exact / Rational(BigInt(static_cast<unsigned long>(ledger.x)));
    r.residual = head.get_d();
    if (ledger.T_exact != 0) r.residual -= (1.0 - kEulerGamma) * ledger.T_exact.get_d() / xd;
  } else {
    r.residual = ledger.S - ledger.G / xd;
    if (ledger.T != 0.0) r.residual -= (1.0 - kEulerGamma) * ledger.T / xd;
  }
  r.normalized_residual = std::abs(r.residual) * std::pow(std::log(xd), 0.2);
  return r;
}

std::string csv_header() { return "x,S,T,G,Phi,residual,normalized_residual,mode,error_bound"; }

std::string csv_row(const SumLedger& L) {
  std::string row = std::to_string(L.x) + ",";
  if (L.mode == Mode::ExactRational) {
    row += to_fraction_string(L.S_exact) + "," + to_fraction_string(L.T_exact) + "," + to_fraction_string(L.G_exact) +
           "," + to_fraction_string(L.Phi_exact) + ",";
  } else {
    row += format_double(L.S) + "," + format_double(L.T) + "," + format_double(L.G) + "," + format_double(L.Phi) + ",";
  }
  if (L.x >= 3) {
    const auto rep = decomposition_report(L);
    row += format_double(rep.residual) + "," + format_double(rep.normalized_residual) + ",";
  } else {
    row += ",,";
  }
  row += to_string(L.mode) + "," + format_double(L.float_error_bound);
  return row;
}

std::vector<double> divisor_sum_table(const ValueTable& values) {
  const std::uint64_t limit = values.limit;
  if (limit > kDivisorTableLimit) throw ResourceError("divisor_sum_table limited to 10^7");
  std::vector<double> g(limit + 1, 0.0);
  if (values.integral()) {
    std::vector<std::int32_t> acc(limit + 1, 0);
    for (std::uint64_t d = 1; d <= limit; ++d) {
      const std::int32_t f = values.codes[d];
      if (f == 0) continue;
      for (std::uint64_t m = d; m <= limit; m += d) acc[m] += f;
    }
    for (std::uint64_t n = 1; n <= limit; ++n) g[n] = acc[n];
  } else {
    for (std::uint64_t d = 1; d <= limit; ++d) {
      const double f = values.reals[d];
      if (f == 0.0) continue;
      for (std::uint64_t m = d; m <= limit; m += d) g[m] += f;
    }
  }
  return g;
}

std::vector<double> divisor_sum_table(const MultiplicativeSpec& spec, std::uint64_t limit) {
  if (limit > kDivisorTableLimit) throw ResourceError("divisor_sum_table limited to 10^7");
  return divisor_sum_table(sieve_values(spec, limit));
}

namespace {

template <class G>
void enumerate_smooth(const MultiplicativeSpec& spec, const std::vector<std::uint64_t>& primes, std::uint64_t x,
                      std::uint64_t budget, std::vector<std::pair<G, std::uint64_t>>& terms) {
  auto fval = [&](std::uint64_t p, unsigned k, std::uint64_t pk) -> G {
    const double v = spec.prime_power_value(p, k, pk);
    if constexpr (std::is_same_v<G, Rational>)
      return rational_from_double(v);
    else
      return static_cast<G>(v);
  };
  std::function<void(std::size_t, std::uint64_t, const G&)> dfs = [&](std::size_t idx, std::uint64_t n, const G& gn) {
    if (terms.size() >= budget)
      throw ResourceError("smooth-integer enumeration exceeded budget of " + std::to_string(budget));
    terms.emplace_back(gn, n);
    for (std::size_t i = idx; i < primes.size(); ++i) {
      const std::uint64_t p = primes[i];
      if (p > x / n) break;
      std::uint64_t m = n, pk = 1;
      unsigned k = 0;
      G gpk = G(1);
      while (m <= x / p) {
        m *= p;
        pk *= p;
        ++k;
        gpk = gpk + fval(p, k, pk);
        dfs(i + 1, m, G(gn * gpk));
      }
    }
  };
  dfs(0, 1, G(1));
}

}  // namespace

Rational smooth_restricted_logsum(const MultiplicativeSpec& spec, std::uint64_t x, std::uint64_t z,
                                  std::uint64_t budget) {
  if (z < 2) throw DomainError("smooth_restricted_logsum needs z >= 2");
  if (x < 1) throw DomainError("x must be >= 1");
  const auto primes = primes_up_to(std::min(x, z)).primes;
  if (!primes.empty() && spec.limit() != MultiplicativeSpec::kUnbounded && primes.back() > spec.limit())
    throw ConfigError("spec does not cover primes up to " + std::to_string(primes.back()));
  std::vector<Rational> fractions;
  if (spec.function_class() == FunctionClass::F) {
    std::vector<std::pair<Rational, std::uint64_t>> terms;
    enumerate_smooth<Rational>(spec, primes, x, budget, terms);
    fractions.reserve(terms.size());
    for (auto& [g, n] : terms) fractions.push_back(g / Rational(BigInt(static_cast<unsigned long>(n))));
  } else {
    std::vector<std::pair<std::int64_t, std::uint64_t>> terms;
    enumerate_smooth<std::int64_t>(spec, primes, x, budget, terms);
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    fractions.reserve(terms.size());
    for (auto& [g, n] : terms) {
      if (g == 0) continue;
      Rational q(BigInt(static_cast<long>(g)), BigInt(static_cast<unsigned long>(n)));
      q.canonicalize();
      fractions.push_back(std::move(q));
    }
  }
  return tree_sum(std::move(fractions));
}

IdentitySweep exact_identity_sweep(const ValueTable& values, std::uint64_t x_max) {
  if (!values.integral()) throw ConfigError("exact identity sweep needs an integral (F0/F1) table");
  require_table(values, x_max);
  IdentitySweep out;
  const BigInt D = lcm_up_to(x_max);
  std::vector<BigInt> w(x_max + 1);
  for (std::uint64_t n = 1; n <= x_max; ++n) mpz_divexact_ui(w[n].get_mpz_t(), D.get_mpz_t(), n);
  // S_num = D * S(x), Phi_num = D * Phi(x); identity: x * S_num == D * G + Phi_num
  BigInt s_num = 0, phi_num, lhs, rhs;
  for (std::uint64_t x = 1; x <= x_max; ++x) {
    const int fx = values.codes[x];
    if (fx > 0) s_num += w[x];
    if (fx < 0) s_num -= w[x];
    phi_num = 0;
    std::int64_t G = 0;
    for (std::uint64_t n = 1; n <= x; ++n) {
      const int f = values.codes[n];
      if (f == 0) continue;
      const unsigned long r = x % n;
      G += f * static_cast<std::int64_t>(x / n);
      if (r == 0) continue;
      if (f > 0)
        mpz_addmul_ui(phi_num.get_mpz_t(), w[n].get_mpz_t(), r);
      else
        mpz_submul_ui(phi_num.get_mpz_t(), w[n].get_mpz_t(), r);
    }
    mpz_mul_ui(lhs.get_mpz_t(), s_num.get_mpz_t(), x);
    rhs = D * BigInt(static_cast<long>(G)) + phi_num;
    ++out.checked;
    if (lhs != rhs) out.failures.push_back(x);
  }
  return out;
}

PositivityScan positivity_scan(const MultiplicativeSpec& spec, std::uint64_t x_max, const ScanOptions& options) {
  if (x_max < 1) throw DomainError("x_max must be >= 1");
  if (spec.function_class() == FunctionClass::F) throw ConfigError("positivity scan supports F0/F1 specs");
  const std::uint64_t seg = std::max<std::uint64_t>(options.segment_size, 1024);
  const std::size_t segments = static_cast<std::size_t>((x_max + seg - 1) / seg);
  SegmentedSieve sieve(spec, x_max);

  struct Part {
    kernels::CompensatedSum total;
    double local_min = 0;
    std::uint64_t local_argmin = 0;
  };
  std::vector<Part> parts(segments);
  parallel_for(segments, options.workers, [&](std::size_t k) {
    const std::uint64_t lo = 1 + k * seg;
    const std::uint64_t hi = std::min(x_max + 1, lo + seg);
    std::vector<std::int8_t> codes(hi - lo);
    sieve.fill(lo, hi, std::span<std::int8_t>(codes));
    kernels::Neumaier acc;
    double best = INFINITY;
    std::uint64_t arg = lo;
    for (std::uint64_t n = lo; n < hi; ++n) {
      const int c = codes[n - lo];
      if (c != 0) acc.add(double(c) / double(n));
      const double v = acc.value();
      if (v < best) {
        best = v;
        arg = n;
      }
    }
    parts[k] = {acc.result(), best, arg};
  });

  PositivityScan out;
  out.x_max = x_max;
  out.segments = segments;
  out.min_value = INFINITY;
  out.certified_margin = INFINITY;
  kernels::CompensatedSum base;
  for (const auto& p : parts) {
    const double cand = base.value + p.local_min;
    const double err = (base.error + p.total.error + u * std::abs(cand)) * (1.0 + 0x1p-40);
    out.certified_margin = std::min(out.certified_margin, cand - err);
    out.error_bound = std::max(out.error_bound, err);
    if (cand < out.min_value) {
      out.min_value = cand;
      out.argmin_x = p.local_argmin;
    }
    base = kernels::merge(base, p.total);
  }
  out.final_value = base.value;
  out.certified = out.certified_margin > 0;
  if (out.min_value <= 0) {
    // locate the first computed crossing
    kernels::Neumaier acc;
    for (std::uint64_t lo = 1; lo <= x_max && !out.first_nonpositive; lo += seg) {
      const std::uint64_t hi = std::min(x_max + 1, lo + seg);
      std::vector<std::int8_t> codes(hi - lo);
      sieve.fill(lo, hi, std::span<std::int8_t>(codes));
      for (std::uint64_t n = lo; n < hi; ++n) {
        if (codes[n - lo] != 0) acc.add(double(codes[n - lo]) / double(n));
        if (acc.value() <= 0) {
          out.first_nonpositive = n;
          break;
        }
      }
    }
  }
  return out;
}

}  // namespace lsl::logsum
