#pragma once

// Synthetic parametric families standing in for expensive solvers.
//
//   separable           sum_t prod_k c_{k,t}(x_{i_k}) v_t, smooth cosine
//                       profiles on [0, 1]; Tucker rank <= (R, ..., R).
//   lowrank_plus_decay  R unit separable terms plus `terms` random separable
//                       terms scaled by rho^t.
//   gaussian_bump       exp(-((x - alpha)^2 + (y - beta)^2) / gamma) sampled on
//                       a uniform grid of [-1, 1]^2 (or [-1, 1] at y = 0),
//                       with trapezoidal weights as the Gram.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "fvt/sampler.hpp"

namespace fvt {

enum class Family { Separable, GaussianBump, LowRankPlusDecay };

Family parse_family(std::string_view name);
std::string_view to_string(Family f) noexcept;

struct FamilySpec {
  Family family = Family::Separable;
  Shape dims{8, 8, 8};
  std::size_t h = 16;
  /// Gram used by separable and lowrank_plus_decay: Identity, or a seeded
  /// random Diagonal / Dense one. gaussian_bump always uses quadrature weights.
  GramKind gram = GramKind::Identity;
  /// Overrides the generated inner product when set (dimension must be h).
  std::optional<InnerProduct> ip;
  std::size_t rank = 3;
  double rho = 0.5;
  std::size_t terms = 6;
  /// gaussian_bump spatial dimension; 0 picks 2 when h is a perfect square.
  std::size_t spatial_dim = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// The default gaussian_bump instance: 50 x 50 x 50, h = 256.
FamilySpec default_bump_spec();

/// Parameter values behind each grid index. gaussian_bump: alpha, beta in
/// [-0.8, 0.8], gamma in [0.001, 0.1]; others: uniform nodes of [0, 1]. A
/// single-point axis sits at the interval midpoint. Modes beyond the third
/// of gaussian_bump are inert and use [0, 1].
std::vector<Eigen::VectorXd> family_grids(const FamilySpec& spec);

InnerProduct family_inner_product(const FamilySpec& spec);

/// Continuous parameter map for separable and gaussian_bump; throws
/// InvalidArgument for lowrank_plus_decay (its noise lives on the grid only).
std::function<HVec(const std::vector<double>&)> make_param_function(const FamilySpec& spec);

EntryOracle make_oracle(const FamilySpec& spec, std::size_t threads = 1);

/// Spatial sample points of gaussian_bump (2 x h; y = 0 in 1-D).
Eigen::MatrixXd bump_points(const FamilySpec& spec);

}  // namespace fvt
