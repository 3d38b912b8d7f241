#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tow/grid_field.hpp"
#include "tow/kernel.hpp"
#include "tow/quadrature.hpp"
#include "tow/vec.hpp"

namespace tow {

using ScalarFn = std::function<double(const Vec&)>;

/// Quadrature approximation of I^z_eps u(x): the rule's canonical nodes are
/// rotated so that e1 maps to z, scaled by eps and shifted to x. Grid fields
/// are sampled by multilinear interpolation (OutOfDomain if a node is not
/// covered); callables are evaluated directly.
double apply(const QuadratureRule& rule, const GridField& field, const Vec& x, const Vec& z,
             const KernelParams& params);
double apply(const QuadratureRule& rule, const ScalarFn& u, const Vec& x, const Vec& z,
             const KernelParams& params);

struct DirectionPair {
  Vec z;
  Vec w;
};

/// Random direction pairs with |z - w| <= delta (deterministic in seed).
std::vector<DirectionPair> probe_pairs(int dim, int count, double delta, std::uint64_t seed);

/// max |I^z u(x) - I^w u(x)| over the pairs whose separation is at most delta.
double continuity_probe(const QuadratureRule& rule, const GridField& field, const Vec& x,
                        const KernelParams& params, std::span<const DirectionPair> pairs, double delta);
double continuity_probe(const QuadratureRule& rule, const ScalarFn& u, const Vec& x,
                        const KernelParams& params, std::span<const DirectionPair> pairs, double delta);

Vec random_direction(int dim, std::uint64_t seed, std::uint64_t stream);

}  // namespace tow
