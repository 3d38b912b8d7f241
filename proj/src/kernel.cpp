#include "tow/kernel.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "tow/errors.hpp"
#include "tow/rng.hpp"

namespace tow {

namespace {

void check_exponent(double p) {
  if (!(p > 1.0)) throw Error(ErrorKind::InvalidExponent, "p must exceed 1, got " + std::to_string(p));
  if (!(p <= KernelParams::kMaxExponent))
    throw Error(ErrorKind::InvalidExponent, "p above 64 is not supported, got " + std::to_string(p));
}

void check_dim(int dim) {
  if (dim < 2 || dim > KernelParams::kMaxDim)
    throw Error(ErrorKind::UnsupportedDimension, "dimension must lie in [2, 8], got " + std::to_string(dim));
}

}  // namespace

KernelParams::KernelParams(int dim, double p, double eps) : dim_(dim), p_(p), eps_(eps) {
  check_dim(dim);
  check_exponent(p);
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw Error(ErrorKind::InvalidArgument, "eps must be positive, got " + std::to_string(eps));
  gamma_ = gamma_constant(dim, p);
  // gamma_{N,p+1}/gamma_{N,p} = Gamma(p/2) Gamma((N+p)/2) / (Gamma((p-1)/2) Gamma((N+p+1)/2))
  first_moment_ratio_ = std::exp(std::lgamma(0.5 * p) + std::lgamma(0.5 * (dim + p)) -
                                 std::lgamma(0.5 * (p - 1.0)) - std::lgamma(0.5 * (dim + p + 1.0)));
}

double unit_ball_volume(int dim) {
  return std::exp(0.5 * dim * std::log(std::numbers::pi) - std::lgamma(0.5 * dim + 1.0));
}

double gamma_constant(int dim, double p) {
  check_dim(dim);
  check_exponent(p);
  const double log_value = std::lgamma(0.5 * dim + 1.0) + std::lgamma(0.5 * (p - 1.0)) -
                           std::lgamma(0.5 * (dim + p));
  return std::exp(log_value) / (2.0 * std::sqrt(std::numbers::pi));
}

double monomial_integral(int dim, std::span<const double> exponents) {
  check_dim(dim);
  if (static_cast<int>(exponents.size()) != dim)
    throw Error(ErrorKind::InvalidArgument, "need one exponent per coordinate");
  double log_value = std::lgamma(0.5 * dim + 1.0) - 0.5 * dim * std::log(std::numbers::pi);
  double total = 0.0;
  for (double a : exponents) {
    if (!(a > -1.0)) throw Error(ErrorKind::InvalidExponent, "monomial exponents must exceed -1");
    log_value += std::lgamma(0.5 * (a + 1.0));
    total += a;
  }
  log_value -= std::lgamma(0.5 * (dim + total + 2.0));
  return std::exp(log_value);
}

MomentTable moment_table(const KernelParams& params) {
  const double n = params.dim();
  const double p = params.p();
  MomentTable t{};
  t.first_moment_ratio = params.first_moment_ratio();
  t.axial_p_moment = (p - 1.0) / (n + p);
  t.cross_moment = 1.0 / (n + p);
  t.radial_moment = (n + p - 2.0) / (n + p);
  t.shell_fraction = 0.5 - std::exp2(-(n + p - 1.0));
  return t;
}

const char* to_string(MomentKind kind) {
  switch (kind) {
    case MomentKind::Gamma: return "gamma";
    case MomentKind::FirstMomentRatio: return "first_moment_ratio";
    case MomentKind::AxialP: return "axial_p_moment";
    case MomentKind::Cross: return "cross_moment";
    case MomentKind::Radial: return "radial_moment";
    case MomentKind::ShellFraction: return "shell_fraction";
  }
  return "unknown";
}

MomentKind moment_kind_from_string(const std::string& name) {
  for (MomentKind k : {MomentKind::Gamma, MomentKind::FirstMomentRatio, MomentKind::AxialP,
                       MomentKind::Cross, MomentKind::Radial, MomentKind::ShellFraction}) {
    if (name == to_string(k)) return k;
  }
  if (name == "radial") return MomentKind::Radial;
  if (name == "axial") return MomentKind::AxialP;
  if (name == "cross") return MomentKind::Cross;
  if (name == "shell") return MomentKind::ShellFraction;
  if (name == "first") return MomentKind::FirstMomentRatio;
  throw Error(ErrorKind::InvalidArgument, "unknown moment kind '" + name + "'");
}

double closed_form(int dim, double p, MomentKind kind) {
  const KernelParams params(dim, p, 1.0);
  const MomentTable t = moment_table(params);
  switch (kind) {
    case MomentKind::Gamma: return params.gamma();
    case MomentKind::FirstMomentRatio: return t.first_moment_ratio;
    case MomentKind::AxialP: return t.axial_p_moment;
    case MomentKind::Cross: return t.cross_moment;
    case MomentKind::Radial: return t.radial_moment;
    case MomentKind::ShellFraction: return t.shell_fraction;
  }
  return 0.0;
}

McEstimate mc_moment_oracle(int dim, double p, MomentKind kind, std::int64_t samples,
                            std::uint64_t seed) {
  check_dim(dim);
  check_exponent(p);
  if (samples < 10000) throw Error(ErrorKind::InvalidArgument, "mc oracle needs at least 1e4 samples");

  Philox rng(seed, 0);
  const double axial_power = 1.0 / (p - 1.0);
  // Half-space normal for the shell indicator; any unit vector works.
  const double shell_normal = 1.0 / std::sqrt(static_cast<double>(dim));

  std::vector<double> h(dim);
  std::int64_t accepted = 0;
  double mean = 0.0, m2 = 0.0;  // Welford over accepted points
  for (std::int64_t i = 0; i < samples; ++i) {
    double r2 = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double w = rng.symmetric();
      h[d] = d == 0 ? std::copysign(std::pow(std::abs(w), axial_power), w) : w;
      r2 += h[d] * h[d];
    }
    if (r2 >= 1.0) continue;
    ++accepted;
    double f = 0.0;
    switch (kind) {
      case MomentKind::Gamma: f = 1.0; break;
      case MomentKind::FirstMomentRatio: f = std::abs(h[0]); break;
      case MomentKind::AxialP: f = h[0] * h[0]; break;
      case MomentKind::Cross: f = h[1] * h[1]; break;
      case MomentKind::Radial: f = r2; break;
      case MomentKind::ShellFraction: {
        double proj = 0.0;
        for (int d = 0; d < dim; ++d) proj += shell_normal * h[d];
        f = (r2 >= 0.25 && proj >= 0.0) ? 1.0 : 0.0;
        break;
      }
    }
    const double delta = f - mean;
    mean += delta / static_cast<double>(accepted);
    m2 += delta * (f - mean);
  }

  if (kind == MomentKind::Gamma) {
    // Vol{w : |h(w)| < 1} = 2^N P(accept) = (p-1) * integral of |h_1|^{p-2} over B_1.
    const double frac = static_cast<double>(accepted) / static_cast<double>(samples);
    const double se_frac = std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples));
    const double scale = std::exp2(dim) / (2.0 * unit_ball_volume(dim) * (p - 1.0));
    return {scale * frac, scale * se_frac};
  }
  if (accepted < 2) throw Error(ErrorKind::InvalidArgument, "mc oracle accepted too few samples");
  const double var = m2 / static_cast<double>(accepted - 1);
  return {mean, std::sqrt(var / static_cast<double>(accepted))};
}

}  // namespace tow
