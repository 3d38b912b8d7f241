#pragma once

#include <functional>
#include <vector>

#include "tow/vec.hpp"

namespace tow {

struct SearchConfig {
  int coarse = 0;     ///< 0 selects 64 angles (N = 2) or 256 sphere points (N = 3)
  double tol = 1e-8;  ///< angular tolerance of the refinement
};

struct Extrema {
  double max_value = 0.0;
  Vec argmax{};
  double min_value = 0.0;
  Vec argmin{};
  int evaluations = 0;
};

/// Maximizes and minimizes a continuous function of a unit direction.
/// N = 2: coarse scan of equally spaced angles, then golden-section search in
/// the bracket around the best coarse angle. N = 3: Fibonacci-sphere scan,
/// then quadratic-fit pattern search in tangent-plane coordinates. Coarse
/// ties go to the first candidate; refinement never returns a value worse
/// than the coarse optimum.
Extrema search_extrema(int dim, const std::function<double(const Vec&)>& objective,
                       const SearchConfig& config = {});

int default_coarse_count(int dim);

Vec direction_from_angle(double theta);

/// count points spread over the unit sphere in R^3 (golden-angle spiral).
std::vector<Vec> fibonacci_sphere(int count);

}  // namespace tow
