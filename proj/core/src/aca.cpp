#include "fvt/aca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace fvt {

namespace {

using Index = Eigen::Index;

Index as_index(std::size_t v) { return static_cast<Index>(v); }

constexpr std::size_t kNoPivot = std::numeric_limits<std::size_t>::max();
constexpr int kRedraws = 5;

std::size_t argmax_first(const Eigen::VectorXd& v) {
  std::size_t best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[as_index(best)]) best = static_cast<std::size_t>(i);
  }
  return best;
}

bool contains(const IndexSet& s, std::size_t j) { return std::binary_search(s.begin(), s.end(), j); }

void insert_sorted(IndexSet& s, std::size_t j) {
  auto it = std::lower_bound(s.begin(), s.end(), j);
  if (it == s.end() || *it != j) s.insert(it, j);
}

// Linear indices of the rows of the mode-k fiber matrix over `sets`, expressed
// as (before, after) offsets around mode k.
struct FiberLayout {
  std::vector<std::size_t> before;
  std::vector<std::size_t> after;
  std::size_t n = 0;
  std::size_t after_size = 1;

  FiberLayout(const Shape& dims, const std::vector<IndexSet>& sets, std::size_t k) : n(dims[k]) {
    for (std::size_t l = k + 1; l < dims.size(); ++l) after_size *= dims[l];
    std::vector<std::size_t> rows{0};
    for (std::size_t l = 0; l < dims.size(); ++l) {
      if (l == k) continue;  // collapsed to a single slot
      std::vector<std::size_t> next;
      next.reserve(rows.size() * sets[l].size());
      for (auto base : rows) {
        for (auto i : sets[l]) next.push_back(base * dims[l] + i);
      }
      rows = std::move(next);
    }
    before.reserve(rows.size());
    after.reserve(rows.size());
    for (auto r : rows) {
      before.push_back(r / after_size);
      after.push_back(r % after_size);
    }
  }

  std::size_t rows() const { return before.size(); }
  std::size_t linear(std::size_t row, std::size_t j) const { return (before[row] * n + j) * after_size + after[row]; }
};

// Lazily evaluated norms of Row(A - B)(I')_k; remembers the largest seen.
class ResidualFiberNorms final : public NormMatrix {
 public:
  ResidualFiberNorms(EntrySource& residual, const std::vector<IndexSet>& aux, std::size_t k)
      : residual_(residual), layout_(residual.dims(), aux, k) {}

  std::size_t rows() const override { return layout_.rows(); }
  std::size_t cols() const override { return layout_.n; }

  Eigen::VectorXd row_norms(std::size_t i) override {
    std::vector<std::size_t> lin(layout_.n);
    for (std::size_t j = 0; j < layout_.n; ++j) lin[j] = layout_.linear(i, j);
    return norms(lin);
  }

  Eigen::VectorXd col_norms(std::size_t j) override {
    std::vector<std::size_t> lin(layout_.rows());
    for (std::size_t r = 0; r < layout_.rows(); ++r) lin[r] = layout_.linear(r, j);
    return norms(lin);
  }

  /// ||R_k(:, j)|| in l2(H) for every column j (evaluates the whole matrix).
  Eigen::VectorXd all_column_norms() {
    Eigen::VectorXd out(as_index(layout_.n));
    for (std::size_t j = 0; j < layout_.n; ++j) out[as_index(j)] = col_norms(j).norm();
    return out;
  }

  double max_seen() const { return max_seen_; }
  bool scanned() const { return scanned_; }

 private:
  Eigen::VectorXd norms(const std::vector<std::size_t>& lin) {
    Eigen::MatrixXd vals;
    residual_.fetch(lin, vals);
    Eigen::VectorXd out = residual_.ip().squared_norms(vals).cwiseMax(0.0).cwiseSqrt();
    if (out.size() > 0) {
      scanned_ = true;
      max_seen_ = std::max(max_seen_, out.maxCoeff());
    }
    return out;
  }

  EntrySource& residual_;
  FiberLayout layout_;
  double max_seen_ = 0.0;
  bool scanned_ = false;
};

void check_scores(const Eigen::VectorXd& p, std::size_t n) {
  if (static_cast<std::size_t>(p.size()) != n) throw Error(ErrorCode::InvalidArgument, "score vector has the wrong length");
  for (Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) throw Error(ErrorCode::InvalidArgument, "scores must be non-negative");
  }
  if (std::abs(p.sum() - 1.0) > 1e-9) throw Error(ErrorCode::InvalidArgument, "scores must sum to 1");
}

IndexSet draw_distinct(DrawRule rule, std::size_t n, std::size_t count, std::mt19937_64& rng,
                       const Eigen::VectorXd* scores) {
  count = std::min(count, n);
  IndexSet out;
  std::size_t attempts = 0;
  const std::size_t max_attempts = 64 * count + 64;
  while (out.size() < count && attempts < max_attempts) {
    ++attempts;
    const std::size_t j = rule == DrawRule::Leverage ? draw(rule, n, attempts, rng, scores)
                                                     : draw(DrawRule::Uniform, n, attempts, rng);
    insert_sorted(out, j);
  }
  // Degenerate distributions: fill with the smallest unused indices.
  for (std::size_t j = 0; out.size() < count && j < n; ++j) insert_sorted(out, j);
  return out;
}

double max_entry_norm(const BTensor& core) {
  if (core.size() == 0) return 0.0;
  return std::sqrt(std::max(0.0, core.ip().squared_norms(core.coeffs()).maxCoeff()));
}

}  // namespace

DrawRule parse_draw_rule(std::string_view name) {
  if (name == "uniform") return DrawRule::Uniform;
  if (name == "roundrobin" || name == "round_robin") return DrawRule::RoundRobin;
  if (name == "leverage") return DrawRule::Leverage;
  throw Error(ErrorCode::InvalidArgument, "unknown draw rule '" + std::string(name) + "'");
}

std::string_view to_string(DrawRule rule) noexcept {
  switch (rule) {
    case DrawRule::Uniform: return "uniform";
    case DrawRule::RoundRobin: return "roundrobin";
    case DrawRule::Leverage: return "leverage";
  }
  return "uniform";
}

RookResult rook_pivot(NormMatrix& M, std::size_t j_start, std::size_t n_rook) {
  if (M.rows() == 0 || M.cols() == 0) throw Error(ErrorCode::InvalidArgument, "rook_pivot: empty matrix");
  if (j_start >= M.cols()) throw Error(ErrorCode::IndexOutOfRange, "rook_pivot: start column");
  RookResult out;
  out.col = j_start;
  for (std::size_t s = 0; s < n_rook; ++s) {
    const Eigen::VectorXd c = M.col_norms(out.col);
    const std::size_t i = argmax_first(c);
    out.row = i;
    const Eigen::VectorXd r = M.row_norms(i);
    out.col = argmax_first(r);
    out.max_norm = std::max({out.max_norm, c.maxCoeff(), r.maxCoeff()});
  }
  return out;
}

std::size_t round_robin_stride(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "round_robin_stride: n must be >= 1");
  for (std::size_t s = (n + 1) / 2; s >= 1; --s) {
    if (std::gcd(s, n) == 1) return s;
  }
  return 1;
}

std::size_t draw(DrawRule rule, std::size_t n_k, std::size_t draw_count, std::mt19937_64& rng,
                 const Eigen::VectorXd* scores) {
  if (n_k == 0) throw Error(ErrorCode::InvalidArgument, "draw: n_k must be >= 1");
  switch (rule) {
    case DrawRule::Uniform: {
      std::uniform_int_distribution<std::size_t> dist(0, n_k - 1);
      return dist(rng);
    }
    case DrawRule::RoundRobin: {
      if (draw_count == 0) throw Error(ErrorCode::InvalidArgument, "draw: count is 1-based");
      return ((draw_count - 1) * round_robin_stride(n_k)) % n_k;
    }
    case DrawRule::Leverage: {
      if (!scores) throw Error(ErrorCode::InvalidArgument, "leverage draw needs a score vector");
      check_scores(*scores, n_k);
      std::uniform_real_distribution<double> u01(0.0, 1.0);
      const double u = u01(rng) * scores->sum();
      double acc = 0.0;
      std::size_t last_positive = 0;
      for (std::size_t i = 0; i < n_k; ++i) {
        const double p = (*scores)[as_index(i)];
        if (p <= 0.0) continue;
        last_positive = i;
        acc += p;
        if (u < acc) return i;
      }
      return last_positive;
    }
  }
  return 0;
}

Eigen::VectorXd leverage_scores(const BMatrix& slab, double tol_rel) {
  const SVDFactors f = svd(slab, tol_rel, /*with_u=*/false);
  if (f.rank() == 0) throw Error(ErrorCode::InvalidArgument, "leverage_scores: zero slab has no distribution");
  Eigen::VectorXd p = f.V.rowwise().squaredNorm() / static_cast<double>(f.rank());
  return p / p.sum();
}

std::vector<Eigen::VectorXd> sample_leverage_scores(EntrySource& src, const std::vector<std::size_t>& samples,
                                                    std::mt19937_64& rng, double tol_rel) {
  const Shape& dims = src.dims();
  if (samples.size() != dims.size()) throw Error(ErrorCode::DimensionMismatch, "one sample count per mode");
  std::vector<Eigen::VectorXd> out;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const std::size_t rows = std::max<std::size_t>(1, samples[k]);
    std::vector<MultiIndex> fibers(rows, MultiIndex(dims.size(), 0));
    for (auto& f : fibers) {
      for (std::size_t l = 0; l < dims.size(); ++l) {
        if (l == k) continue;
        std::uniform_int_distribution<std::size_t> dist(0, dims[l] - 1);
        f[l] = dist(rng);
      }
    }
    std::vector<std::size_t> lin(rows * dims[k]);
    for (std::size_t j = 0; j < dims[k]; ++j) {
      for (std::size_t r = 0; r < rows; ++r) {
        MultiIndex idx = fibers[r];
        idx[k] = j;
        lin[j * rows + r] = linear_index(dims, idx);
      }
    }
    Eigen::MatrixXd c;
    src.fetch(lin, c);
    out.push_back(leverage_scores(BMatrix(rows, dims[k], src.ip(), std::move(c)), tol_rel));
  }
  return out;
}

void AbcConfig::validate(const Shape& dims) const {
  if (n_iter == 0) throw Error(ErrorCode::InvalidArgument, "n_iter must be >= 1");
  if (!(tol_rel >= 0.0) || !(early_stop >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerances must be >= 0");
  if (aux.empty()) {
    if (aux_size == 0) throw Error(ErrorCode::InvalidArgument, "auxiliary index sets must be non-empty");
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (aux_size > dims[k]) {
        throw Error(ErrorCode::InvalidArgument, "aux size " + std::to_string(aux_size) + " exceeds mode " +
                                                    std::to_string(k) + " size " + std::to_string(dims[k]));
      }
    }
    return;
  }
  if (aux.size() != dims.size()) throw Error(ErrorCode::DimensionMismatch, "one auxiliary set per mode");
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (aux[k].empty()) throw Error(ErrorCode::EmptyIndexSet, "auxiliary set " + std::to_string(k) + " is empty");
    for (auto i : aux[k]) {
      if (i >= dims[k]) throw Error(ErrorCode::IndexOutOfRange, "auxiliary set " + std::to_string(k));
    }
  }
}

AbcResult tucker_abc(CachedOracle& oracle, const AbcConfig& cfg, const AbcObserver& observer) {
  const Shape dims = oracle.dims();
  const std::size_t d = dims.size();
  cfg.validate(dims);
  std::mt19937_64 rng(cfg.seed);

  std::vector<Eigen::VectorXd> scores;
  if (cfg.draw == DrawRule::Leverage) {
    std::vector<std::size_t> samples(d);
    for (std::size_t k = 0; k < d; ++k) samples[k] = cfg.aux.empty() ? cfg.aux_size : cfg.aux[k].size();
    scores = sample_leverage_scores(oracle, samples, rng, cfg.tol_rel);
  }

  std::vector<IndexSet> aux(d);
  for (std::size_t k = 0; k < d; ++k) {
    if (!cfg.aux.empty()) {
      for (auto i : cfg.aux[k]) insert_sorted(aux[k], i);
    } else {
      aux[k] = draw_distinct(cfg.draw, dims[k], cfg.aux_size, rng, scores.empty() ? nullptr : &scores[k]);
    }
  }

  AbcResult result;
  AbcReport& report = result.report;
  report.leverage_evaluations = oracle.count();
  std::vector<IndexSet> sets(d);
  std::optional<TuckerCrossModel> model;
  std::vector<std::size_t> draws(d, 0);

  for (std::size_t s = 1; s <= cfg.n_iter; ++s) {
    const std::vector<IndexSet> saved_sets = sets;
    const std::vector<IndexSet> saved_aux = aux;
    double max_res = 0.0;
    bool scanned = false;
    std::vector<std::size_t> pivots(d, kNoPivot);

    ResidualView residual(oracle, model ? &model->decomp : nullptr);
    for (std::size_t k = 0; k < d; ++k) {
      ResidualFiberNorms view(residual, aux, k);
      const Eigen::VectorXd* sk = scores.empty() ? nullptr : &scores[k];
      auto attempt = [&] {
        const std::size_t start = draw(cfg.draw, dims[k], ++draws[k], rng, sk);
        return rook_pivot(view, start, cfg.n_rook).col;
      };
      std::size_t j = attempt();
      for (int t = 0; t < kRedraws && contains(sets[k], j); ++t) j = attempt();
      if (contains(sets[k], j)) {
        if (sets[k].size() == dims[k]) {
          max_res = std::max(max_res, view.max_seen());
          scanned = scanned || view.scanned();
          continue;
        }
        const Eigen::VectorXd col = view.all_column_norms();
        double best = -1.0;
        for (std::size_t c = 0; c < dims[k]; ++c) {
          if (!contains(sets[k], c) && col[as_index(c)] > best) {
            best = col[as_index(c)];
            j = c;
          }
        }
      }
      max_res = std::max(max_res, view.max_seen());
      scanned = scanned || view.scanned();
      insert_sorted(sets[k], j);
      insert_sorted(aux[k], j);
      pivots[k] = j;
    }

    if (cfg.early_stop > 0.0 && model && scanned && max_res <= cfg.early_stop * max_entry_norm(model->core())) {
      sets = saved_sets;
      aux = saved_aux;
      report.converged = true;
      break;
    }

    bool any_empty = false;
    for (const auto& set : sets) any_empty = any_empty || set.empty();
    if (!any_empty) model = tucker_cross(oracle, sets, cfg.tol_rel);

    report.iterations = s;
    report.pivots.push_back(pivots);
    report.max_residual.push_back(max_res);
    Rank sizes(d);
    for (std::size_t k = 0; k < d; ++k) sizes[k] = sets[k].size();
    report.index_sizes.push_back(sizes);
    report.ranks.push_back(model ? tucker_rank(model->core(), cfg.tol_rel) : Rank(d, 0));
    report.evaluations.push_back(oracle.count());
    if (observer && model) observer(s, *model);
  }

  report.index_sets = sets;
  report.aux_sets = aux;
  if (model) {
    result.model = std::move(*model);
  } else {
    result.model.index_sets = sets;
  }
  return result;
}

}  // namespace fvt
