#pragma once

#include <vector>

#include "tow/kernel.hpp"
#include "tow/vec.hpp"

namespace tow {

struct GaussLegendre {
  std::vector<double> nodes;    ///< on (-1, 1), ascending
  std::vector<double> weights;  ///< sum to 2
};

GaussLegendre gauss_legendre(int count);

/// Product rule for the directional average in the canonical frame z = e1.
///
/// With h = t e1 + y the kernel integral becomes
///   int_0^1 t^{p-2} c_N(t) G(t) dt,   c_N(t) = (1 - t^2)^{(N-1)/2},
/// where G is the cross-sectional average. The axial variable is mapped by
/// t = s^{1/(p-1)} (so t^{p-2} dt = ds/(p-1)) followed by
/// s = 1 - (1 - sigma^2)^2, which keeps the integrand smooth at both ends for
/// every p > 1; Gauss-Legendre is then applied in sigma. The cross-section is
/// Gauss-Legendre on an interval (N = 2) or a radius x angle product (N = 3).
struct QuadratureRule {
  struct AxialNode {
    double t;
    double weight;  ///< includes (1 - t^2)^{(N-1)/2} and 1/(p-1)
  };
  struct CrossNode {
    Vec y;  ///< (N-1)-vector in the unit cross-section ball, stored in y[0..N-2]
    double weight;
  };

  int dim = 2;
  double p = 2.0;
  std::vector<AxialNode> axial_nodes;
  std::vector<CrossNode> cross_nodes;

  /// Expanded product nodes h in B_1 (canonical frame) with weights that
  /// already include 1/(gamma_{N,p} |B_1|); they sum to 1 up to
  /// normalization_defect.
  std::vector<Vec> nodes;
  std::vector<double> weights;
  double normalization_defect = 0.0;

  int total_node_count() const { return static_cast<int>(nodes.size()); }
};

/// Throws UnsupportedDimension for N > 3 and InvalidArgument for counts < 4.
QuadratureRule build_rule(const KernelParams& params, int axial_count = 32, int cross_count = 32);

/// Orthogonal map R with R e1 = z: explicit rotation for N = 2, Householder
/// reflection for N = 3.
class Frame {
 public:
  Frame(const Vec& z, int dim);

  Vec apply(const Vec& h) const {
    return {m_[0][0] * h[0] + m_[0][1] * h[1] + m_[0][2] * h[2],
            m_[1][0] * h[0] + m_[1][1] * h[1] + m_[1][2] * h[2],
            m_[2][0] * h[0] + m_[2][1] * h[1] + m_[2][2] * h[2]};
  }
  /// Column k of R, i.e. R e_k.
  Vec column(int k) const { return {m_[0][k], m_[1][k], m_[2][k]}; }

 private:
  double m_[3][3]{};
};

}  // namespace tow
