#include "fvt/problems.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <string>

namespace fvt {

namespace {

struct SeparableTerms {
  std::vector<std::vector<double>> freq;   // [t][k]
  std::vector<std::vector<double>> phase;  // [t][k]
  std::vector<HVec> v;                     // [t]
};

SeparableTerms draw_separable(std::size_t terms, std::size_t d, std::size_t h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uf(0.5, 2.5);
  std::uniform_real_distribution<double> up(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> nd;
  SeparableTerms s;
  for (std::size_t t = 0; t < terms; ++t) {
    std::vector<double> f(d), p(d);
    for (std::size_t k = 0; k < d; ++k) {
      f[k] = uf(rng);
      p[k] = up(rng);
    }
    HVec v(static_cast<Eigen::Index>(h));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = nd(rng);
    s.freq.push_back(std::move(f));
    s.phase.push_back(std::move(p));
    s.v.push_back(v / std::sqrt(static_cast<double>(h)));
  }
  return s;
}

double profile(const SeparableTerms& s, std::size_t t, std::size_t k, double x) {
  return std::cos(std::numbers::pi * s.freq[t][k] * x + s.phase[t][k]);
}

Eigen::VectorXd uniform_grid(std::size_t n, double lo, double hi) {
  if (n == 1) return Eigen::VectorXd::Constant(1, 0.5 * (lo + hi));
  return Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(n), lo, hi);
}

Eigen::VectorXd trapezoid(std::size_t n) {
  if (n == 1) return Eigen::VectorXd::Constant(1, 2.0);
  const double dx = 2.0 / static_cast<double>(n - 1);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), dx);
  w(0) *= 0.5;
  w(static_cast<Eigen::Index>(n) - 1) *= 0.5;
  return w;
}

std::size_t side_of(std::size_t h) {
  auto s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(h))));
  return s * s == h ? s : 0;
}

std::size_t bump_spatial_dim(const FamilySpec& spec) {
  if (spec.spatial_dim != 0) return spec.spatial_dim;
  return side_of(spec.h) != 0 ? 2 : 1;
}

}  // namespace

Family parse_family(std::string_view name) {
  if (name == "separable") return Family::Separable;
  if (name == "gaussian_bump") return Family::GaussianBump;
  if (name == "lowrank_plus_decay") return Family::LowRankPlusDecay;
  throw Error(ErrorCode::InvalidArgument, "unknown family '" + std::string(name) + "'");
}

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::Separable: return "separable";
    case Family::GaussianBump: return "gaussian_bump";
    case Family::LowRankPlusDecay: return "lowrank_plus_decay";
  }
  return "?";
}

void FamilySpec::validate() const {
  if (dims.empty()) throw Error(ErrorCode::InvalidArgument, "dims must be non-empty");
  for (auto n : dims) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "dims must be >= 1");
  }
  if (h == 0) throw Error(ErrorCode::InvalidArgument, "h must be >= 1");
  if (ip && ip->dim() != h) throw Error(ErrorCode::DimensionMismatch, "inner product dimension differs from h");
  if (family != Family::GaussianBump && rank == 0) throw Error(ErrorCode::InvalidArgument, "rank must be >= 1");
  if (family == Family::LowRankPlusDecay && !(rho > 0.0 && rho < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "rho must lie in (0, 1)");
  }
  if (family == Family::GaussianBump) {
    if (dims.size() < 2) throw Error(ErrorCode::InvalidArgument, "gaussian_bump needs at least 2 modes");
    if (spatial_dim != 0 && spatial_dim != 1 && spatial_dim != 2) {
      throw Error(ErrorCode::InvalidArgument, "spatial_dim must be 1 or 2");
    }
    if (bump_spatial_dim(*this) == 2 && side_of(h) == 0) {
      throw Error(ErrorCode::InvalidArgument, "2-D gaussian_bump needs a square h");
    }
  }
}

FamilySpec default_bump_spec() {
  FamilySpec s;
  s.family = Family::GaussianBump;
  s.dims = {50, 50, 50};
  s.h = 256;
  s.gram = GramKind::Diagonal;
  return s;
}

std::vector<Eigen::VectorXd> family_grids(const FamilySpec& spec) {
  spec.validate();
  std::vector<Eigen::VectorXd> g;
  for (std::size_t k = 0; k < spec.dims.size(); ++k) {
    if (spec.family == Family::GaussianBump && k < 2) {
      g.push_back(uniform_grid(spec.dims[k], -0.8, 0.8));
    } else if (spec.family == Family::GaussianBump && k == 2) {
      g.push_back(uniform_grid(spec.dims[k], 0.001, 0.1));
    } else {
      g.push_back(uniform_grid(spec.dims[k], 0.0, 1.0));
    }
  }
  return g;
}

Eigen::MatrixXd bump_points(const FamilySpec& spec) {
  spec.validate();
  const auto h = static_cast<Eigen::Index>(spec.h);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2, h);
  if (bump_spatial_dim(spec) == 1) {
    P.row(0) = uniform_grid(spec.h, -1.0, 1.0).transpose();
    return P;
  }
  const std::size_t s = side_of(spec.h);
  const Eigen::VectorXd x = uniform_grid(s, -1.0, 1.0);
  for (std::size_t ix = 0; ix < s; ++ix) {
    for (std::size_t iy = 0; iy < s; ++iy) {
      const auto q = static_cast<Eigen::Index>(ix * s + iy);
      P(0, q) = x(static_cast<Eigen::Index>(ix));
      P(1, q) = x(static_cast<Eigen::Index>(iy));
    }
  }
  return P;
}

InnerProduct family_inner_product(const FamilySpec& spec) {
  spec.validate();
  if (spec.ip) return *spec.ip;
  if (spec.family == Family::GaussianBump) {
    if (bump_spatial_dim(spec) == 1) return InnerProduct::diagonal(trapezoid(spec.h));
    const std::size_t s = side_of(spec.h);
    const Eigen::VectorXd w1 = trapezoid(s);
    Eigen::VectorXd w(static_cast<Eigen::Index>(spec.h));
    for (std::size_t ix = 0; ix < s; ++ix) {
      for (std::size_t iy = 0; iy < s; ++iy) {
        w(static_cast<Eigen::Index>(ix * s + iy)) = w1(static_cast<Eigen::Index>(ix)) * w1(static_cast<Eigen::Index>(iy));
      }
    }
    return InnerProduct::diagonal(std::move(w));
  }
  // Separate stream from the family coefficients so the Gram choice does not
  // change the tensor.
  std::mt19937_64 rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
  const auto h = static_cast<Eigen::Index>(spec.h);
  switch (spec.gram) {
    case GramKind::Identity:
      return InnerProduct::identity(spec.h);
    case GramKind::Diagonal: {
      std::uniform_real_distribution<double> u(0.5, 2.0);
      Eigen::VectorXd w(h);
      for (Eigen::Index i = 0; i < h; ++i) w(i) = u(rng);
      return InnerProduct::diagonal(std::move(w));
    }
    case GramKind::Dense: {
      std::normal_distribution<double> nd;
      Eigen::MatrixXd M(h, h);
      for (Eigen::Index j = 0; j < h; ++j) {
        for (Eigen::Index i = 0; i < h; ++i) M(i, j) = nd(rng);
      }
      Eigen::MatrixXd G = M * M.transpose() / static_cast<double>(h) + Eigen::MatrixXd::Identity(h, h);
      G = 0.5 * (G + G.transpose()).eval();
      return InnerProduct::dense(G);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown Gram kind");
}

std::function<HVec(const std::vector<double>&)> make_param_function(const FamilySpec& spec) {
  spec.validate();
  const std::size_t d = spec.dims.size();
  if (spec.family == Family::GaussianBump) {
    auto P = std::make_shared<const Eigen::MatrixXd>(bump_points(spec));
    return [P, d](const std::vector<double>& a) -> HVec {
      if (a.size() != d) throw Error(ErrorCode::DimensionMismatch, "parameter count");
      const double gamma = a.size() > 2 ? a[2] : 0.05;
      if (!(gamma > 0.0)) throw Error(ErrorCode::DomainError, "gamma must be > 0");
      const Eigen::ArrayXd dx = P->row(0).array() - a[0];
      const Eigen::ArrayXd dy = P->row(1).array() - a[1];
      return (-(dx.square() + dy.square()) / gamma).exp().matrix();
    };
  }
  if (spec.family == Family::LowRankPlusDecay) {
    throw Error(ErrorCode::InvalidArgument, "lowrank_plus_decay has no continuous parameter map");
  }
  std::mt19937_64 rng(spec.seed);
  auto terms = std::make_shared<const SeparableTerms>(draw_separable(spec.rank, d, spec.h, rng));
  const std::size_t h = spec.h;
  return [terms, d, h](const std::vector<double>& a) -> HVec {
    if (a.size() != d) throw Error(ErrorCode::DimensionMismatch, "parameter count");
    HVec out = HVec::Zero(static_cast<Eigen::Index>(h));
    for (std::size_t t = 0; t < terms->v.size(); ++t) {
      double c = 1.0;
      for (std::size_t k = 0; k < d; ++k) c *= profile(*terms, t, k, a[k]);
      out += c * terms->v[t];
    }
    return out;
  };
}

EntryOracle make_oracle(const FamilySpec& spec, std::size_t threads) {
  spec.validate();
  InnerProduct ip = family_inner_product(spec);
  const std::size_t d = spec.dims.size();
  auto grids = std::make_shared<const std::vector<Eigen::VectorXd>>(family_grids(spec));

  if (spec.family != Family::LowRankPlusDecay) {
    auto f = make_param_function(spec);
    auto eval = [grids, f, d](const MultiIndex& idx) {
      std::vector<double> a(d);
      for (std::size_t k = 0; k < d; ++k) a[k] = (*grids)[k](static_cast<Eigen::Index>(idx[k]));
      return f(a);
    };
    return EntryOracle(spec.dims, std::move(ip), eval, threads);
  }

  // Leading terms share the separable construction; the decaying tail uses
  // unit-norm random profiles tabulated on the grid.
  std::mt19937_64 rng(spec.seed);
  auto lead = std::make_shared<const SeparableTerms>(draw_separable(spec.rank, d, spec.h, rng));
  std::normal_distribution<double> nd;
  struct Tail {
    std::vector<std::vector<Eigen::VectorXd>> prof;  // [t][k], length n_k
    std::vector<HVec> v;
  };
  auto tail = std::make_shared<Tail>();
  double amp = 1.0;
  for (std::size_t t = 0; t < spec.terms; ++t) {
    amp *= spec.rho;
    std::vector<Eigen::VectorXd> prof;
    for (std::size_t k = 0; k < d; ++k) {
      Eigen::VectorXd c(static_cast<Eigen::Index>(spec.dims[k]));
      for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = nd(rng);
      prof.push_back(c / c.norm());
    }
    HVec v(static_cast<Eigen::Index>(spec.h));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = nd(rng);
    tail->prof.push_back(std::move(prof));
    tail->v.push_back(amp * v / v.norm());
  }
  std::shared_ptr<const Tail> ctail = tail;
  const std::size_t h = spec.h;
  auto eval = [grids, lead, ctail, d, h](const MultiIndex& idx) {
    HVec out = HVec::Zero(static_cast<Eigen::Index>(h));
    for (std::size_t t = 0; t < lead->v.size(); ++t) {
      double c = 1.0;
      for (std::size_t k = 0; k < d; ++k) c *= profile(*lead, t, k, (*grids)[k](static_cast<Eigen::Index>(idx[k])));
      out += c * lead->v[t];
    }
    for (std::size_t t = 0; t < ctail->v.size(); ++t) {
      double c = 1.0;
      for (std::size_t k = 0; k < d; ++k) c *= ctail->prof[t][k](static_cast<Eigen::Index>(idx[k]));
      out += c * ctail->v[t];
    }
    return out;
  };
  return EntryOracle(spec.dims, std::move(ip), eval, threads);
}

}  // namespace fvt
