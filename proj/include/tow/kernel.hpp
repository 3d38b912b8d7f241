#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace tow {

/// Dimension, exponent and step of the directional kernel (z.h)_+^{p-2}.
/// Construction validates the ranges and caches the normalization constant.
class KernelParams {
 public:
  static constexpr int kMaxDim = 8;
  static constexpr double kMaxExponent = 64.0;

  KernelParams(int dim, double p, double eps);

  int dim() const noexcept { return dim_; }
  double p() const noexcept { return p_; }
  double eps() const noexcept { return eps_; }

  /// gamma_{N,p}: ball average of (z.h)_+^{p-2}.
  double gamma() const noexcept { return gamma_; }
  /// gamma_{N,p+1} / gamma_{N,p}: first moment of the normalized kernel along z.
  double first_moment_ratio() const noexcept { return first_moment_ratio_; }

  KernelParams with_eps(double eps) const { return KernelParams(dim_, p_, eps); }
  KernelParams with_p(double p) const { return KernelParams(dim_, p, eps_); }

 private:
  int dim_;
  double p_;
  double eps_;
  double gamma_;
  double first_moment_ratio_;
};

/// Closed-form moments of the normalized kernel.
struct MomentTable {
  double first_moment_ratio;  ///< gamma_{N,p+1}/gamma_{N,p}
  double axial_p_moment;      ///< (p-1)/(N+p)
  double cross_moment;        ///< 1/(N+p)
  double radial_moment;       ///< (N+p-2)/(N+p)
  double shell_fraction;      ///< 1/2 - 2^{-(N+p-1)}
};

double unit_ball_volume(int dim);

/// gamma_{N,p} = Gamma(N/2+1) Gamma((p-1)/2) / (2 sqrt(pi) Gamma((N+p)/2)),
/// evaluated through log-Gamma so large N+p does not overflow.
double gamma_constant(int dim, double p);
inline double gamma_constant(const KernelParams& params) { return params.gamma(); }

/// Ball average of |h_1|^{a_1} ... |h_N|^{a_N}; one exponent per coordinate.
double monomial_integral(int dim, std::span<const double> exponents);

MomentTable moment_table(const KernelParams& params);

enum class MomentKind { Gamma, FirstMomentRatio, AxialP, Cross, Radial, ShellFraction };

const char* to_string(MomentKind kind);
MomentKind moment_kind_from_string(const std::string& name);

/// Value of the requested quantity from the closed forms above.
double closed_form(int dim, double p, MomentKind kind);

struct McEstimate {
  double estimate;
  double std_error;
};

/// Monte Carlo estimate of a kernel quantity, independent of every closed
/// form. Points are drawn uniformly from the cube [-1,1]^N in coordinates
/// w with h_1 = sign(w_1)|w_1|^{1/(p-1)}; in those coordinates the kernel
/// weight |h_1|^{p-2} dh becomes Lebesgue measure, so every estimator has
/// bounded variance even when p <= 3/2. Rejection keeps |h| < 1.
McEstimate mc_moment_oracle(int dim, double p, MomentKind kind, std::int64_t samples,
                            std::uint64_t seed);

}  // namespace tow
