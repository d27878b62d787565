#include "mjf/handicap_search.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "mjf/error.hpp"

namespace mjf {

namespace {

constexpr const char* kModule = "handicap_search";

BigInt big_binomial(std::uint64_t n, std::uint64_t k) { return BigInt(binomial(n, k)); }

}  // namespace

WeightFunction WeightFunction::uniform(std::size_t count) {
  WeightFunction w;
  if (count == 0) return w;
  w.sigma.assign(count, Rational(1) / Rational(static_cast<std::int64_t>(count)));
  return w;
}

WeightFunction WeightFunction::normalised(std::vector<Rational> raw) {
  Rational total;
  for (const auto& s : raw) {
    if (s.sign() < 0) throw Error(kModule, "HS_WEIGHT", "negative weight " + s.to_string());
    total += s;
  }
  if (total.is_zero()) throw Error(kModule, "HS_WEIGHT", "weights sum to zero");
  for (auto& s : raw) s /= total;
  return WeightFunction{std::move(raw)};
}

std::vector<bool> WeightFunction::support() const {
  std::vector<bool> out(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) out[i] = sigma[i].sign() > 0;
  return out;
}

std::size_t WeightFunction::support_size() const {
  return static_cast<std::size_t>(std::count_if(sigma.begin(), sigma.end(), [](const Rational& s) { return s.sign() > 0; }));
}

Rational WeightProfile::gap() const {
  if (order.empty()) return Rational(0);
  return normalised[order.front()] - normalised[order.back()];
}

bool lex_less(const WeightProfile& a, const WeightProfile& b) {
  return std::lexicographical_compare(a.sorted.begin(), a.sorted.end(), b.sorted.begin(), b.sorted.end());
}

HandicapProblem::HandicapProblem(Configuration cfg, Multijoints joints, WeightFunction weights, unsigned lambda,
                                 TaskPool pool)
    : cfg_(std::move(cfg)),
      joints_(std::move(joints)),
      weights_(std::move(weights)),
      lambda_(lambda),
      pool_(pool),
      binomial_product_(1) {
  if (weights_.sigma.size() != joints_.size()) {
    throw Error(kModule, "HS_WEIGHT",
                "weight vector has " + std::to_string(weights_.sigma.size()) + " entries for " +
                    std::to_string(joints_.size()) + " multijoints");
  }
  support_ = weights_.support();
  support_size_ = weights_.support_size();
  for (auto k : cfg_.k_list) binomial_product_ *= big_binomial(lambda_ + k, k);

  std::size_t total = 0;
  for (const auto& fam : cfg_.families) {
    family_offset_.push_back(total);
    total += fam.size();
  }
  planes_.resize(total);
  for (std::size_t j = 0; j < cfg_.families.size(); ++j) {
    for (std::size_t i = 0; i < cfg_.families[j].size(); ++i) {
      auto& data = planes_[family_offset_[j] + i];
      const auto& plane = cfg_.families[j][i];
      for (std::size_t q = 0; q < joints_.size(); ++q) {
        if (plane.contains(joints_.points[q])) {
          data.points.push_back(q);
          data.coords.push_back(joints_.points[q]);
        }
      }
      if (!data.points.empty()) data.chart = std::make_unique<PlaneChart>(plane);
    }
  }
}

std::size_t HandicapProblem::flat(std::size_t family, std::size_t plane) const {
  if (family >= cfg_.families.size() || plane >= cfg_.families[family].size()) {
    throw Error(kModule, "HS_RANGE", "no plane " + std::to_string(plane) + " in family " + std::to_string(family));
  }
  return family_offset_[family] + plane;
}

const std::vector<std::size_t>& HandicapProblem::plane_points(std::size_t family, std::size_t plane) const {
  return planes_[flat(family, plane)].points;
}

const PlaneChart& HandicapProblem::chart(std::size_t family, std::size_t plane) const {
  const auto& data = planes_[flat(family, plane)];
  if (!data.chart) throw Error(kModule, "HS_RANGE", "plane carries no multijoint");
  return *data.chart;
}

std::size_t HandicapProblem::position(std::size_t family, std::size_t plane, std::size_t point) const {
  const auto& pts = plane_points(family, plane);
  auto it = std::lower_bound(pts.begin(), pts.end(), point);
  if (it == pts.end() || *it != point) throw Error(kModule, "HS_RANGE", "point not on plane");
  return static_cast<std::size_t>(it - pts.begin());
}

std::vector<std::int64_t> HandicapProblem::slice(std::size_t flat_index, std::span<const std::int64_t> alpha) const {
  const auto& pts = planes_[flat_index].points;
  std::vector<std::int64_t> out;
  out.reserve(pts.size());
  for (auto q : pts) out.push_back(alpha[q]);
  // Counts only see differences of alpha, so the cache key is shifted to min 0.
  if (!out.empty()) {
    const auto lo = *std::min_element(out.begin(), out.end());
    for (auto& v : out) v -= lo;
  }
  return out;
}

std::vector<std::size_t> HandicapProblem::counts(std::size_t family, std::size_t plane,
                                                 std::span<const std::int64_t> alpha) const {
  if (alpha.size() != joints_.size()) throw Error(kModule, "HS_RANGE", "handicap length mismatch");
  const std::size_t f = flat(family, plane);
  const auto& data = planes_[f];
  if (data.points.empty()) return {};
  CacheKey key{f, slice(f, alpha)};
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->counts.find(key); it != cache_->counts.end()) return it->second;
  }
  auto result = tableau_counts(*data.chart, data.coords, key.second, lambda_);
  std::lock_guard lock(cache_->mutex);
  return cache_->counts.emplace(std::move(key), std::move(result)).first->second;
}

void HandicapProblem::prefetch(std::span<const std::int64_t> alpha) const {
  std::vector<std::pair<std::size_t, std::size_t>> missing;
  {
    std::lock_guard lock(cache_->mutex);
    for (std::size_t j = 0; j < cfg_.families.size(); ++j) {
      for (std::size_t i = 0; i < cfg_.families[j].size(); ++i) {
        const std::size_t f = family_offset_[j] + i;
        if (planes_[f].points.empty()) continue;
        if (!cache_->counts.count(CacheKey{f, slice(f, alpha)})) missing.emplace_back(j, i);
      }
    }
  }
  if (missing.size() < 2 || pool_.workers() < 2) return;
  pool_.parallel_for(missing.size(), [&](std::size_t m) { counts(missing[m].first, missing[m].second, alpha); });
}

bool HandicapProblem::in_admissible_set(std::span<const std::int64_t> alpha) const {
  for (std::size_t j = 0; j < cfg_.families.size(); ++j) {
    for (std::size_t i = 0; i < cfg_.families[j].size(); ++i) {
      const auto& pts = plane_points(j, i);
      if (std::none_of(pts.begin(), pts.end(), [&](std::size_t q) { return support_[q]; })) continue;
      auto c = counts(j, i, alpha);
      for (std::size_t a = 0; a < pts.size(); ++a) {
        if (!support_[pts[a]] && c[a] != 0) return false;
      }
    }
  }
  return true;
}

Handicap HandicapProblem::to_handicap(std::span<const std::int64_t> alpha) const {
  return Handicap(joints_.points, alpha);
}

std::vector<std::int64_t> HandicapProblem::from_handicap(const Handicap& alpha) const {
  std::vector<std::int64_t> out;
  out.reserve(joints_.size());
  for (const auto& p : joints_.points) out.push_back(alpha.at(p));
  return out;
}

WeightProfile compute_w(const HandicapProblem& problem, std::span<const std::int64_t> alpha) {
  const auto& joints = problem.joints();
  const auto& support = problem.support();
  const std::size_t m = joints.size();
  problem.prefetch(alpha);

  WeightProfile prof;
  prof.raw.assign(m, Rational(0));
  prof.normalised.assign(m, Rational(0));
  prof.argmin.assign(m, 0);
  const Rational norm(problem.binomial_product(), BigInt(1));
  for (std::size_t q = 0; q < m; ++q) {
    if (!support[q]) continue;
    const auto& witnesses = joints.witnesses[q];
    if (witnesses.empty()) {
      throw Error(kModule, "HS_WITNESS", "support point " + to_string(joints.points[q]) + " has no witness tuple");
    }
    BigInt best = -1;
    for (std::size_t w = 0; w < witnesses.size(); ++w) {
      BigInt prod = 1;
      for (std::size_t j = 0; j < witnesses[w].size(); ++j) {
        auto c = problem.counts(j, witnesses[w][j], alpha);
        prod *= c[problem.position(j, witnesses[w][j], q)];
      }
      if (best < 0 || prod < best) {
        best = prod;
        prof.argmin[q] = w;
      }
    }
    prof.raw[q] = Rational(best, BigInt(1)) / problem.weights().sigma[q];
    prof.normalised[q] = prof.raw[q] / norm;
  }

  for (std::size_t q = 0; q < m; ++q) {
    if (support[q]) prof.order.push_back(q);
  }
  std::stable_sort(prof.order.begin(), prof.order.end(),
                   [&](std::size_t a, std::size_t b) { return prof.normalised[a] > prof.normalised[b]; });
  prof.sorted = prof.normalised;
  std::sort(prof.sorted.begin(), prof.sorted.end(), std::greater<>());
  return prof;
}

WeightProfile compute_w(const HandicapProblem& problem, const Handicap& alpha) {
  auto values = problem.from_handicap(alpha);
  return compute_w(problem, std::span<const std::int64_t>(values));
}

Handicap perturbation_step(const Handicap& alpha, std::size_t t, std::span<const Point> support_order) {
  if (t < 1 || t > support_order.size()) {
    throw Error(kModule, "HS_RANGE",
                "t = " + std::to_string(t) + " outside 1.." + std::to_string(support_order.size()));
  }
  std::set<Point> in_order(support_order.begin(), support_order.end());
  Handicap out = alpha;
  for (std::size_t i = 0; i < t; ++i) out.set(support_order[i], alpha.at(support_order[i]) - 1);
  for (const auto& [p, v] : alpha.values()) {
    if (!in_order.count(p)) out.set(p, v - 1);
  }
  return out;
}

std::vector<std::int64_t> perturbation_step(std::span<const std::int64_t> alpha, std::size_t t,
                                            std::span<const std::size_t> support_order,
                                            const std::vector<bool>& support) {
  if (t < 1 || t > support_order.size()) {
    throw Error(kModule, "HS_RANGE",
                "t = " + std::to_string(t) + " outside 1.." + std::to_string(support_order.size()));
  }
  std::vector<std::int64_t> out(alpha.begin(), alpha.end());
  for (std::size_t i = 0; i < t; ++i) --out[support_order[i]];
  for (std::size_t q = 0; q < out.size(); ++q) {
    if (!support[q]) --out[q];
  }
  return out;
}

ContinuityRadius continuity_radius(const WeightFunction& weights, std::size_t joint_count,
                                   std::span<const std::size_t> k_list, unsigned lambda) {
  if (weights.support_size() == 0) throw Error(kModule, "HS_EMPTY", "weight function has empty support");
  if (lambda == 0) throw Error(kModule, "HS_LAMBDA", "continuity radius needs lambda >= 1");
  Rational min_sigma;
  bool first = true;
  for (const auto& s : weights.sigma) {
    if (s.sign() > 0 && (first || s < min_sigma)) {
      min_sigma = s;
      first = false;
    }
  }
  const std::size_t d = k_list.size();
  BigInt full = 1;
  for (auto k : k_list) full *= big_binomial(lambda + k, k);
  BigInt numerator = 0;
  const BigInt jcount(joint_count);
  for (std::size_t mask = 1; mask < (std::size_t{1} << d); ++mask) {
    BigInt term = 1;
    for (std::size_t j = 0; j < d; ++j) {
      const auto k = k_list[j];
      if (mask >> j & 1) {
        term *= big_binomial(lambda + k - 1, k - 1) * jcount;
      } else {
        term *= big_binomial(lambda + k, k);
      }
    }
    numerator += term;
  }
  ContinuityRadius r;
  r.half_step = Rational(numerator, full) / min_sigma;
  r.h = r.half_step * Rational(2 * static_cast<std::int64_t>(lambda));
  return r;
}

std::string to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::good: return "good";
    case SearchStatus::budget_exhausted: return "budget_exhausted";
    case SearchStatus::stuck: return "stuck";
  }
  return "unknown";
}

std::vector<std::int64_t> initial_handicap(const HandicapProblem& problem) {
  const auto n_support = static_cast<std::int64_t>(problem.support_size());
  const std::int64_t deep = -(static_cast<std::int64_t>(problem.lambda()) + 1) * (1 + n_support);
  std::vector<std::int64_t> alpha(problem.joints().size());
  for (std::size_t q = 0; q < alpha.size(); ++q) alpha[q] = problem.support()[q] ? 0 : deep;
  return alpha;
}

namespace {

std::int64_t support_spread(const std::vector<std::int64_t>& alpha, const std::vector<bool>& support) {
  std::int64_t lo = 0, hi = 0;
  bool first = true;
  for (std::size_t q = 0; q < alpha.size(); ++q) {
    if (!support[q]) continue;
    if (first || alpha[q] < lo) lo = alpha[q];
    if (first || alpha[q] > hi) hi = alpha[q];
    first = false;
  }
  return hi - lo;
}

}  // namespace

std::string to_string(MoveKind k) {
  switch (k) {
    case MoveKind::top: return "top";
    case MoveKind::lower: return "lower";
    case MoveKind::raise: return "raise";
    case MoveKind::subset: return "subset";
  }
  return "unknown";
}

std::vector<std::int64_t> apply_move(std::span<const std::int64_t> alpha, std::span<const std::size_t> points,
                                     const std::vector<bool>& support) {
  std::vector<std::int64_t> out(alpha.begin(), alpha.end());
  for (auto q : points) {
    if (q >= out.size() || !support[q]) throw Error(kModule, "HS_RANGE", "move point outside the support");
    --out[q];
  }
  for (std::size_t q = 0; q < out.size(); ++q) {
    if (!support[q]) --out[q];
  }
  return out;
}

namespace {

struct Candidate {
  MoveKind kind;
  std::vector<std::size_t> points;
  bool gap_move = false;
};

std::vector<Candidate> candidates(const WeightProfile& profile, const Rational& step_gap, bool refine) {
  const auto& order = profile.order;
  const auto& w = profile.normalised;
  const std::size_t m = order.size();
  std::vector<Candidate> out;
  auto top = [&](std::size_t t, bool gap) {
    std::vector<std::size_t> pts(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(t));
    std::sort(pts.begin(), pts.end());
    out.push_back({MoveKind::top, std::move(pts), gap});
  };
  std::size_t gap_t = 0;
  for (std::size_t t = 1; t < m; ++t) {
    if (w[order[t - 1]] - w[order[t]] > step_gap) {
      gap_t = t;
      break;
    }
  }
  if (gap_t) top(gap_t, true);
  if (!refine || m < 2) return out;
  for (std::size_t t = 1; t < m; ++t) {
    if (t != gap_t) top(t, false);
  }
  std::vector<std::size_t> supp(order.begin(), order.end());
  std::sort(supp.begin(), supp.end());
  std::set<std::vector<std::size_t>> seen;
  for (const auto& c : out) seen.insert(c.points);
  auto add = [&](MoveKind kind, std::vector<std::size_t> pts) {
    if (seen.insert(pts).second) out.push_back({kind, std::move(pts), false});
  };
  for (auto q : supp) add(MoveKind::lower, {q});
  for (auto q : supp) {
    std::vector<std::size_t> rest;
    for (auto r : supp) {
      if (r != q) rest.push_back(r);
    }
    add(MoveKind::raise, std::move(rest));
  }
  if (m <= kSubsetMoveLimit) {
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << m); ++mask) {
      std::vector<std::size_t> pts;
      for (std::size_t i = 0; i < m; ++i) {
        if (mask >> i & 1) pts.push_back(supp[i]);
      }
      add(MoveKind::subset, std::move(pts));
    }
  }
  return out;
}

}  // namespace

SearchResult search_good_handicap(const HandicapProblem& problem, const SearchOptions& options) {
  const auto& support = problem.support();
  const std::size_t n_support = problem.support_size();
  if (n_support == 0) throw Error(kModule, "HS_EMPTY", "weight function has empty support");
  if (problem.lambda() == 0) throw Error(kModule, "HS_LAMBDA", "handicap search needs lambda >= 1");
  if (connected_components(problem.joints(), support).size() != 1) {
    throw Error(kModule, "HS_DISCONNECTED", "support of the weight function is not connected");
  }

  SearchResult res;
  res.radius = continuity_radius(problem.weights(), problem.joints().size(), problem.config().k_list, problem.lambda());
  const Rational lam(static_cast<std::int64_t>(problem.lambda()));
  const Rational step_gap = res.radius.h / lam;
  res.target = Rational(static_cast<std::int64_t>(n_support)) * step_gap;
  res.target_joint = Rational(static_cast<std::int64_t>(problem.joints().size())) * step_gap;

  res.alpha = initial_handicap(problem);
  res.profile = compute_w(problem, res.alpha);

  for (;;) {
    const Rational gap = res.profile.gap();
    if (!options.refine && gap <= res.target) {
      res.status = SearchStatus::good;
      break;
    }
    if (res.iterations >= options.budget) {
      res.status = gap <= res.target ? SearchStatus::good : SearchStatus::budget_exhausted;
      break;
    }
    // Past spread + lambda + 1 repetitions the moved points sit more than
    // lambda below the rest and further steps change no tableau.
    const std::int64_t cap = support_spread(res.alpha, support) + 2 * static_cast<std::int64_t>(problem.lambda()) + 2;
    bool moved = false;
    for (const auto& cand : candidates(res.profile, step_gap, options.refine)) {
      auto trial = res.alpha;
      for (std::int64_t c = 1; c <= cap; ++c) {
        trial = apply_move(trial, cand.points, support);
        auto prof = compute_w(problem, trial);
        if (!lex_less(prof, res.profile)) continue;
        const std::set<std::size_t> moved_set(cand.points.begin(), cand.points.end());
        const std::set<std::size_t> top_after(prof.order.begin(),
                                              prof.order.begin() + static_cast<std::ptrdiff_t>(cand.points.size()));
        res.moves.push_back(SearchMove{cand.kind, cand.points, c, cand.gap_move, moved_set == top_after});
        res.alpha = std::move(trial);
        res.profile = std::move(prof);
        moved = true;
        break;
      }
      if (moved) break;
    }
    if (!moved) {
      res.status = gap <= res.target ? SearchStatus::good : SearchStatus::stuck;
      break;
    }
    ++res.iterations;
  }
  res.gap = res.profile.gap();
  return res;
}

std::int64_t default_oracle_box(const HandicapProblem& problem) {
  const auto n = static_cast<std::int64_t>(problem.support_size());
  return (static_cast<std::int64_t>(problem.lambda()) + 1) * std::max<std::int64_t>(n - 1, 0);
}

OracleResult brute_force_handicap_oracle(const HandicapProblem& problem, std::int64_t box) {
  const auto& support = problem.support();
  const std::size_t n_support = problem.support_size();
  if (n_support == 0) throw Error(kModule, "HS_EMPTY", "weight function has empty support");
  if (box < 0) throw Error(kModule, "HS_GUARD", "negative oracle box");
  if (n_support > 4) throw Error(kModule, "HS_GUARD", "oracle limited to |Supp S| <= 4");
  const std::uint64_t side = static_cast<std::uint64_t>(2 * box + 1);
  std::uint64_t total = 1;
  for (std::size_t i = 1; i < n_support; ++i) {
    total *= side;
    if (total > 1'000'000) throw Error(kModule, "HS_GUARD", "oracle box too large");
  }

  std::vector<std::size_t> free_points;
  for (std::size_t q = 0; q < support.size(); ++q) {
    if (support[q]) free_points.push_back(q);
  }
  free_points.erase(free_points.begin());  // first support point pinned to 0
  const std::int64_t deep = -box - static_cast<std::int64_t>(problem.lambda()) - 1;

  auto decode = [&](std::uint64_t code) {
    std::vector<std::int64_t> alpha(support.size(), deep);
    for (std::size_t q = 0; q < support.size(); ++q) {
      if (support[q]) alpha[q] = 0;
    }
    // Last free point varies fastest; values run from -box upwards.
    for (std::size_t i = free_points.size(); i-- > 0;) {
      alpha[free_points[i]] = static_cast<std::int64_t>(code % side) - box;
      code /= side;
    }
    return alpha;
  };

  OracleResult best;
  bool have = false;
  constexpr std::uint64_t kBlock = 4096;
  std::vector<WeightProfile> block;
  for (std::uint64_t start = 0; start < total; start += kBlock) {
    const std::uint64_t len = std::min(kBlock, total - start);
    block.assign(len, {});
    problem.pool().parallel_for(len, [&](std::size_t i) { block[i] = compute_w(problem, decode(start + i)); });
    for (std::uint64_t i = 0; i < len; ++i) {
      if (!have || lex_less(block[i], best.profile)) {
        best.profile = std::move(block[i]);
        best.alpha = decode(start + i);
        have = true;
      }
    }
  }
  best.evaluated = total;
  return best;
}

}  // namespace mjf
