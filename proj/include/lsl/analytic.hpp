#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lsl/multiplicative.hpp"

namespace lsl::bounds {

// ---- Halasz quantity -------------------------------------------------------

// log F(s) for F(s) = prod_{p <= cutoff} (1 - f(p) p^-s)^-1, s = sigma + i t.
std::complex<double> euler_product_log(const MultiplicativeSpec& spec, double sigma, double t, std::uint64_t cutoff);

// Estimate of sum_{p > cutoff} p^-sigma from the prime number theorem:
// E1((sigma - 1) log cutoff).
double prime_tail_estimate(double sigma, std::uint64_t cutoff);

inline constexpr std::uint64_t kDefaultEulerCutoff = 1'000'000;
inline constexpr std::uint64_t kDefaultHalaszSteps = 4096;

struct HalaszOptions {
  std::optional<double> t_max;              // default log x
  std::uint64_t steps = kDefaultHalaszSteps;
  std::optional<std::uint64_t> euler_cutoff;  // default max(x, 10^6)
  unsigned workers = 1;
};

struct HalaszReport {
  std::uint64_t x = 0;
  double sigma = 0;  // 1 + 1/log x
  double t_max = 0;
  std::uint64_t steps = 0;
  double argmax_t = 0;
  double max_ratio = 0;  // max |F(s)/s| over the grid (after refinement)
  double M = 0;          // log log x - log max_ratio
  std::uint64_t euler_cutoff = 0;
  double tail_log_bound = 0;  // |log F - log F_truncated| is about this
  bool refined = false;       // Newton step improved on the grid maximum
  bool coarse_grid_warning = false;
};

HalaszReport halasz_M(const MultiplicativeSpec& spec, std::uint64_t x, const HalaszOptions& options = {});

// ---- Hall-Tenenbaum ---------------------------------------------------------

inline constexpr double kHallTenenbaumKappa = 0.32867;

enum class PrimeWeight { OneMinusF, OnePlusF, F, One };
std::string to_string(PrimeWeight w);
PrimeWeight parse_prime_weight(const std::string& text);

// sum_{p <= x} w(p) / p
double mertens_weighted_sum(const MultiplicativeSpec& spec, std::uint64_t x, PrimeWeight weight);

// x exp(-kappa sum_{p <= x} (1 - f(p)) / p)
double hall_tenenbaum_bound(const MultiplicativeSpec& spec, std::uint64_t x);

// ---- smooth numbers ---------------------------------------------------------

inline constexpr std::size_t kPsiMemoBudget = 20'000'000;

struct CepEnvelope {
  double u = 0;
  double envelope = 0;  // w u^-u
  bool valid = false;   // u <= sqrt(z)
};

CepEnvelope cep_envelope(double w, double z);

struct SmoothCount {
  std::uint64_t x = 0;
  std::uint64_t y = 0;
  std::uint64_t psi = 0;
  double u = 0;
  double rho_u = 0;
  double cep_envelope = 0;
  bool cep_valid = false;
  std::uint64_t memo_entries = 0;
};

// Psi(x, y) by Psi(x, p_j) = Psi(x, p_{j-1}) + Psi(x / p_j, p_j).
SmoothCount psi_smooth(std::uint64_t x, std::uint64_t y, std::size_t memo_budget = kPsiMemoBudget);

inline constexpr double kDickmanStep = 1e-3;

// Dickman rho; 0 for u > 50.
double dickman_rho(double u, double step = kDickmanStep);

// ---- moment pipeline --------------------------------------------------------

struct LogValue {
  double log_value = 0;
  double value = 0;  // exp(log_value), may be inf
};

// prod_{p_lo <= p <= p_hi} ((1 + p^(delta-1))^q + (1 - p^(delta-1))^q) / 2
LogValue euler_moment_product(unsigned q, double delta, std::uint64_t p_lo, std::uint64_t p_hi);

struct MomentParams {
  double x = 0;
  double y = 0;
  unsigned q = 2;
  double C = 1;
  double delta() const;
  double epsilon() const;
};

struct MomentBound {
  double delta = 0;
  double epsilon = 0;
  double log_term1 = 0;  // log of (x^q / y^(q/2)) exp(q (q x^-eps + 2 log log x))
  double log_term2 = 0;  // log of (x / (log x)^C)^q
  LogValue total;
};

MomentBound moment_bound_rhs(const MomentParams& params);

struct MarkovTail {
  double x = 0;
  double M = 0;
  double A = 0;
  double C = 0;
  double y = 0;
  bool y_clamped = false;  // (log x)^A exceeded x
  double q_raw = 0;
  unsigned q = 2;
  MomentBound rhs;
  double log_bound = 0;  // log(rhs) - q log(M x / log x)
  double bound = 0;
};

MarkovTail markov_tail_bound(double x, double M, double A, double C);

// ---- prime products and structural diagnostics -----------------------------

struct PrimeProductQuery {
  std::vector<std::uint64_t> primes;
  unsigned k = 1;
  std::uint64_t x = 0;
  double lambda_param = 0.5;
  std::optional<double> u;
  std::optional<double> v;
};

struct PrimeProductCount {
  std::uint64_t count = 0;
  std::uint64_t nodes = 0;
  std::optional<double> ratio;  // count / (x / (v^k log x))
};

inline constexpr std::uint64_t kPrimeProductBudget = 100'000'000;

// Ordered k-tuples from the set with x/2 <= p_1 ... p_k <= x.
PrimeProductCount count_prime_products(const PrimeProductQuery& query, std::uint64_t budget = kPrimeProductBudget);

struct Lemma32Report {
  std::uint64_t x = 0;
  std::uint64_t z = 0;
  double lhs = 0;        // sum over z-smooth n <= x of g(n)/n
  double rhs_core = 0;   // exp(sum_{p <= z} g(p)/p)
  double ratio = 0;
  double u = 0;          // log x / log z
};

Lemma32Report lemma32_diagnostic(const MultiplicativeSpec& spec, std::uint64_t x, std::uint64_t z);

struct Prop33Report {
  std::uint64_t x = 0;
  double delta = 0;
  double v = 0;
  double epsilon = 0;
  std::uint64_t primes_in_set = 0;  // p in [x^(1/v), x] with f(p) >= -delta
  double hypothesis_sum = 0;
  bool hypothesis_holds = false;    // hypothesis_sum >= 1 + epsilon
  bool in_proven_range = false;     // 40000/eps^2 <= v <= log x / (1000 log log x)
  double lhs = 0;                   // sum_{n <= x} g(n)
  double rhs_skeleton = 0;          // eps^2 ((1-delta)/v)^(v/e) exp(sum_{p<=x} f(p)/p) x
  double ratio = 0;
};

Prop33Report prop33_diagnostic(const MultiplicativeSpec& spec, std::uint64_t x, double delta, double v, double epsilon);

}  // namespace lsl::bounds
