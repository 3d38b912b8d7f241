#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tow/grid_field.hpp"
#include "tow/kernel.hpp"
#include "tow/quadrature.hpp"
#include "tow/vec.hpp"

namespace tow {

/// Translation-invariant lattice version of I^z_eps for a fixed bank of
/// directions. Each stencil is the quadrature rule placed on the lattice by
/// multilinear scattering; with moment correction the nodes are first
/// contracted about their mean so that the scattered stencil reproduces the
/// mean and covariance of the continuous average exactly (the scattering
/// otherwise adds the variance sum_k w_k s_k (1 - s_k) per axis). Weights
/// stay positive, so the operator stays monotone, and it is exact on
/// quadratics.
class StencilBank {
 public:
  struct Options {
    bool moment_correction = true;
    int bank = 0;    ///< total directions; 0 selects 1024 (N = 2) or 2048 (N = 3)
    int coarse = 0;  ///< coarse candidates per search; 0 selects 64 / 256
  };

  StencilBank(const GridField& grid, const KernelParams& params, const QuadratureRule& rule,
              const Options& options);

  int size() const noexcept { return static_cast<int>(dirs_.size()); }
  const Vec& direction(int b) const { return dirs_[b]; }
  /// Largest distance (grid units) from the center to any stencil entry.
  double reach() const noexcept { return reach_; }
  /// Largest deviation of stencil mean/covariance from the target moments.
  double moment_defect() const noexcept { return moment_defect_; }
  std::size_t entries() const noexcept { return weights_.size(); }
  /// Weight the stencil puts on its own center node.
  double center_weight(int b) const { return center_[b]; }

  double apply(int b, const double* u, std::size_t node) const {
    const double* base = u + node;
    double acc = 0.0;
    for (std::size_t k = begin_[b]; k < begin_[b + 1]; ++k) acc += weights_[k] * base[offsets_[k]];
    return acc;
  }

  struct Choice {
    int index = 0;
    double value = 0.0;
  };

  /// Bank-restricted sup and inf of the lattice average at node. Coarse scan
  /// followed by local pattern search; incumbent indices (or -1) are always
  /// candidates, so a returned value is never worse than the incumbent's.
  void extrema(const double* u, std::size_t node, int incumbent_max, int incumbent_min, Choice& hi,
               Choice& lo) const;
  /// Exact sup and inf over every bank direction; ties go to the lowest index.
  void extrema_exhaustive(const double* u, std::size_t node, Choice& hi, Choice& lo) const;

  /// Bank index closest to z.
  int nearest(const Vec& z) const;

 private:
  void build_stencil(const GridField& grid, const KernelParams& params, const QuadratureRule& rule,
                     const Vec& z, bool correct);
  void refine(const double* u, std::size_t node, Choice& c, double sign) const;

  int dim_;
  std::vector<Vec> dirs_;
  std::vector<std::size_t> begin_{0};
  std::vector<std::ptrdiff_t> offsets_;
  std::vector<double> weights_;
  std::vector<double> center_;
  double reach_ = 0.0;
  double moment_defect_ = 0.0;

  // N = 2: indices are angles 2 pi j / size, coarse = every stride-th.
  int stride_ = 1;
  // N = 3: coarse set [0, coarse_) and fine set [coarse_, size); neighbor lists.
  int coarse_ = 0;
  std::vector<std::vector<int>> coarse_to_fine_;
  std::vector<std::vector<int>> fine_neighbors_;
};

}  // namespace tow
