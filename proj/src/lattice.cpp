#include "tow/lattice.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "tow/errors.hpp"
#include "tow/search.hpp"

namespace tow {

namespace {

Eigen::VectorXd scatter_excess(const std::vector<Vec>& y, const std::vector<double>& w, int dim) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  for (std::size_t k = 0; k < y.size(); ++k)
    for (int d = 0; d < dim; ++d) {
      const double s = y[k][d] - std::floor(y[k][d]);
      e(d) += w[k] * s * (1.0 - s);
    }
  return e;
}

std::vector<Vec> symmetric_sphere(int count) {
  auto half = fibonacci_sphere(count / 2);
  std::vector<Vec> out = half;
  for (const Vec& v : half) out.push_back(-v);
  return out;
}

}  // namespace

StencilBank::StencilBank(const GridField& grid, const KernelParams& params, const QuadratureRule& rule,
                         const Options& options)
    : dim_(params.dim()) {
  if (grid.dim() != dim_ || rule.dim != dim_)
    throw Error(ErrorKind::InvalidArgument, "grid, rule and kernel dimensions differ");
  if (dim_ == 2) {
    const int size = options.bank > 0 ? options.bank : 1024;
    const int coarse = options.coarse > 0 ? options.coarse : 64;
    if (size % coarse != 0 || size % 2 != 0 || coarse < 4)
      throw Error(ErrorKind::InvalidArgument, "bank size must be even and a multiple of the coarse count");
    stride_ = size / coarse;
    for (int j = 0; j < size; ++j) dirs_.push_back(direction_from_angle(2.0 * std::numbers::pi * j / size));
  } else {
    const int fine = options.bank > 0 ? options.bank : 2048;
    const int coarse = options.coarse > 0 ? options.coarse : 256;
    if (fine % 2 != 0 || coarse % 2 != 0 || coarse < 8)
      throw Error(ErrorKind::InvalidArgument, "sphere banks need even sizes");
    dirs_ = symmetric_sphere(coarse);
    coarse_ = coarse;
    for (const Vec& v : symmetric_sphere(fine)) dirs_.push_back(v);
    const double radius = 1.5 * std::sqrt(4.0 * std::numbers::pi / coarse);
    const double cos_r = std::cos(radius);
    coarse_to_fine_.resize(coarse);
    for (int c = 0; c < coarse; ++c)
      for (int j = coarse; j < size(); ++j)
        if (dot(dirs_[c], dirs_[j], 3) >= cos_r) coarse_to_fine_[c].push_back(j);
    fine_neighbors_.resize(fine);
    std::vector<std::pair<double, int>> cand(fine);
    for (int a = 0; a < fine; ++a) {
      for (int b = 0; b < fine; ++b) cand[b] = {-dot(dirs_[coarse + a], dirs_[coarse + b], 3), coarse + b};
      std::partial_sort(cand.begin(), cand.begin() + 9, cand.end());
      for (int k = 1; k < 9; ++k) fine_neighbors_[a].push_back(cand[k].second);
    }
  }
  for (const Vec& z : dirs_) build_stencil(grid, params, rule, z, options.moment_correction);
}

void StencilBank::build_stencil(const GridField& grid, const KernelParams& params, const QuadratureRule& rule,
                                const Vec& z, bool correct) {
  const int n = dim_;
  const Frame frame(z, n);
  const double scale = params.eps() / grid.dx();
  const std::size_t count = rule.nodes.size();
  std::vector<Vec> y(count);
  std::vector<double> w(rule.weights);
  double wsum = 0.0;
  for (double v : w) wsum += v;
  for (auto& v : w) v /= wsum;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < count; ++k) {
    y[k] = scaled(frame.apply(rule.nodes[k]), scale);
    for (int d = 0; d < n; ++d) mean(d) += w[k] * y[k][d];
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t k = 0; k < count; ++k)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) cov(a, b) += w[k] * (y[k][a] - mean(a)) * (y[k][b] - mean(b));

  std::vector<Vec> yp = y;
  if (correct) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> cov_eig(cov);
    const Eigen::MatrixXd cov_inv_sqrt = cov_eig.operatorInverseSqrt();
    Eigen::VectorXd excess = Eigen::VectorXd::Zero(n);
    for (int iter = 0; iter < 500; ++iter) {
      Eigen::MatrixXd target = cov;
      target.diagonal() -= excess;
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(target);
      if (!(eig.eigenvalues().minCoeff() > 0.0))
        throw Error(ErrorKind::InvalidArgument, "grid too coarse for moment-matched stencils (decrease grid.dx)");
      const Eigen::MatrixXd a = eig.operatorSqrt() * cov_inv_sqrt;
      double am[3][3] = {}, mu[3] = {};
      for (int r = 0; r < n; ++r) {
        mu[r] = mean(r);
        for (int c = 0; c < n; ++c) am[r][c] = a(r, c);
      }
      for (std::size_t k = 0; k < count; ++k) {
        double dev[3] = {};
        for (int d = 0; d < n; ++d) dev[d] = y[k][d] - mu[d];
        for (int r = 0; r < n; ++r) {
          double acc = mu[r];
          for (int c = 0; c < n; ++c) acc += am[r][c] * dev[c];
          yp[k][r] = acc;
        }
      }
      const Eigen::VectorXd next = scatter_excess(yp, w, n);
      const double change = (next - excess).cwiseAbs().maxCoeff();
      excess = next;
      if (change < 1e-15 * std::max(1.0, scale * scale)) break;
    }
  }

  int half = 0;
  for (const Vec& v : yp)
    for (int d = 0; d < n; ++d) half = std::max(half, static_cast<int>(std::ceil(std::abs(v[d]))) + 1);
  const int side = 2 * half + 1;
  std::vector<double> box(static_cast<std::size_t>(n == 2 ? side * side : side * side * side), 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    int cell[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int d = 0; d < n; ++d) {
      const double f = std::floor(yp[k][d]);
      cell[d] = static_cast<int>(f) + half;
      frac[d] = yp[k][d] - f;
    }
    for (int mask = 0; mask < (1 << n); ++mask) {
      double wt = w[k];
      std::size_t idx = 0, mult = 1;
      for (int d = 0; d < n; ++d) {
        const int bit = (mask >> d) & 1;
        wt *= bit ? frac[d] : 1.0 - frac[d];
        idx += static_cast<std::size_t>(cell[d] + bit) * mult;
        mult *= static_cast<std::size_t>(side);
      }
      box[idx] += wt;
    }
  }

  Eigen::VectorXd smean = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd ssecond = Eigen::MatrixXd::Zero(n, n);
  const auto& strides = grid.strides();
  double center = 0.0;
  for (std::size_t idx = 0; idx < box.size(); ++idx) {
    if (box[idx] == 0.0) continue;
    std::size_t rest = idx;
    int o[3] = {0, 0, 0};
    std::ptrdiff_t off = 0;
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) {
      o[d] = static_cast<int>(rest % side) - half;
      rest /= side;
      off += static_cast<std::ptrdiff_t>(o[d]) * strides[d];
      r2 += static_cast<double>(o[d]) * o[d];
    }
    if (off == 0) center = box[idx];
    offsets_.push_back(off);
    weights_.push_back(box[idx]);
    reach_ = std::max(reach_, std::sqrt(r2));
    for (int a = 0; a < n; ++a) {
      smean(a) += box[idx] * o[a];
      for (int b = 0; b < n; ++b) ssecond(a, b) += box[idx] * o[a] * o[b];
    }
  }
  begin_.push_back(weights_.size());
  center_.push_back(center);

  if (correct) {
    const Eigen::MatrixXd target = cov + mean * mean.transpose();
    const double defect = std::max((smean - mean).cwiseAbs().maxCoeff(), (ssecond - target).cwiseAbs().maxCoeff());
    moment_defect_ = std::max(moment_defect_, defect);
  }
}

void StencilBank::refine(const double* u, std::size_t node, Choice& c, double sign) const {
  if (dim_ == 2) {
    const int size = this->size();
    for (int step = stride_; step >= 1; step /= 2) {
      for (;;) {
        const int left = (c.index - step + size) % size;
        const int right = (c.index + step) % size;
        const double vl = apply(left, u, node), vr = apply(right, u, node);
        if (sign * vl > sign * c.value && sign * vl >= sign * vr) {
          c = {left, vl};
        } else if (sign * vr > sign * c.value) {
          c = {right, vr};
        } else {
          break;
        }
      }
    }
    return;
  }
  for (int j : coarse_to_fine_[c.index]) {
    const double v = apply(j, u, node);
    if (sign * v > sign * c.value) c = {j, v};
  }
  for (;;) {
    if (c.index < coarse_) return;
    Choice next = c;
    for (int j : fine_neighbors_[c.index - coarse_]) {
      const double v = apply(j, u, node);
      if (sign * v > sign * next.value) next = {j, v};
    }
    if (next.index == c.index) return;
    c = next;
  }
}

void StencilBank::extrema(const double* u, std::size_t node, int incumbent_max, int incumbent_min, Choice& hi,
                          Choice& lo) const {
  const int step = dim_ == 2 ? stride_ : 1;
  const int limit = dim_ == 2 ? size() : coarse_;
  hi = {0, apply(0, u, node)};
  lo = hi;
  for (int j = step; j < limit; j += step) {
    const double v = apply(j, u, node);
    if (v > hi.value) hi = {j, v};
    if (v < lo.value) lo = {j, v};
  }
  refine(u, node, hi, 1.0);
  refine(u, node, lo, -1.0);
  if (incumbent_max >= 0 && incumbent_max != hi.index) {
    const double v = apply(incumbent_max, u, node);
    if (v >= hi.value) hi = {incumbent_max, v};
  }
  if (incumbent_min >= 0 && incumbent_min != lo.index) {
    const double v = apply(incumbent_min, u, node);
    if (v <= lo.value) lo = {incumbent_min, v};
  }
}

void StencilBank::extrema_exhaustive(const double* u, std::size_t node, Choice& hi, Choice& lo) const {
  hi = {0, apply(0, u, node)};
  lo = hi;
  for (int j = 1; j < size(); ++j) {
    const double v = apply(j, u, node);
    if (v > hi.value) hi = {j, v};
    if (v < lo.value) lo = {j, v};
  }
}

int StencilBank::nearest(const Vec& z) const {
  if (dim_ == 2) {
    const int size = this->size();
    const double turns = std::atan2(z[1], z[0]) / (2.0 * std::numbers::pi);
    return static_cast<int>(((std::llround(turns * size) % size) + size) % size);
  }
  int best = 0;
  double bd = -2.0;
  for (int j = 0; j < size(); ++j) {
    const double d = dot(z, dirs_[j], 3);
    if (d > bd) bd = d, best = j;
  }
  return best;
}

}  // namespace tow
