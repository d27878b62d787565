#include "mjf/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mjf/error.hpp"
#include "mjf/linalg.hpp"
#include "mjf/poly_dual.hpp"
#include "mjf/tableau.hpp"

namespace mjf {

namespace {

constexpr const char* kModule = "factorization";

Rational binomial_rational(std::uint64_t n, std::uint64_t k) {
  return Rational(static_cast<std::int64_t>(binomial(n, k)));
}

const FactorisationTable::Row& row_at(const FactorisationTable& t, std::size_t family, std::size_t plane) {
  if (family >= t.rows.size() || plane >= t.rows[family].size()) {
    throw Error(kModule, "FAC_RANGE", "no plane " + std::to_string(plane) + " in family " + std::to_string(family));
  }
  return t.rows[family][plane];
}

}  // namespace

Rational FactorisationTable::s(std::size_t family, std::size_t plane, std::size_t point) const {
  const auto& row = row_at(*this, family, plane);
  auto it = std::lower_bound(row.points.begin(), row.points.end(), point);
  if (it == row.points.end() || *it != point) return Rational(0);
  return row.s[static_cast<std::size_t>(it - row.points.begin())];
}

std::size_t FactorisationTable::tilde_s(std::size_t family, std::size_t plane, std::size_t point) const {
  const auto& row = row_at(*this, family, plane);
  auto it = std::lower_bound(row.points.begin(), row.points.end(), point);
  if (it == row.points.end() || *it != point) return 0;
  return row.tilde_s[static_cast<std::size_t>(it - row.points.begin())];
}

bool FactorisationTable::rows_sum_to_one() const {
  for (const auto& family : rows) {
    for (const auto& row : family) {
      if (row.points.empty()) continue;
      Rational total;
      for (const auto& v : row.s) total += v;
      if (total != Rational(1)) return false;
    }
  }
  return true;
}

FactorisationTable build_s(const HandicapProblem& problem, std::span<const std::int64_t> alpha, const Rational& gap) {
  const auto& cfg = problem.config();
  FactorisationTable t;
  t.lambda = problem.lambda();
  t.alpha.assign(alpha.begin(), alpha.end());
  t.gap = gap;
  problem.prefetch(alpha);
  t.rows.resize(cfg.d());
  for (std::size_t j = 0; j < cfg.d(); ++j) {
    const Rational full = binomial_rational(problem.lambda() + cfg.k_list[j], cfg.k_list[j]);
    t.rows[j].resize(cfg.families[j].size());
    for (std::size_t i = 0; i < cfg.families[j].size(); ++i) {
      auto& row = t.rows[j][i];
      row.points = problem.plane_points(j, i);
      row.tilde_s = problem.counts(j, i, alpha);
      for (auto c : row.tilde_s) row.s.push_back(Rational(static_cast<std::int64_t>(c)) / full);
    }
  }
  return t;
}

VerificationReport verify_factorisation(const HandicapProblem& problem, const FactorisationTable& table,
                                     const std::optional<Rational>& threshold) {
  VerificationReport rep;
  rep.row_sums = table.rows_sum_to_one();
  rep.gap = table.gap;
  rep.threshold = threshold;
  const auto& joints = problem.joints();
  const auto& support = problem.support();
  const auto& sigma = problem.weights().sigma;
  const std::size_t n = problem.config().n;
  rep.w_lower_bound = binomial_rational(problem.lambda() + n, n) / Rational(problem.binomial_product(), BigInt(1));
  if (problem.support_size() == 0) {
    rep.w_bound = true;
    return rep;
  }
  if (problem.lambda() > 0) {
    auto radius = continuity_radius(problem.weights(), joints.size(), problem.config().k_list, problem.lambda());
    rep.slack = radius.h / Rational(static_cast<std::int64_t>(problem.lambda()));
  }

  Rational best;
  bool have = false;
  for (std::size_t q = 0; q < joints.size(); ++q) {
    if (!support[q]) continue;
    for (std::size_t w = 0; w < joints.witnesses[q].size(); ++w) {
      Rational prod(1);
      for (std::size_t j = 0; j < joints.witnesses[q][w].size(); ++j) prod *= table.s(j, joints.witnesses[q][w][j], q);
      WitnessMargin m{q, w, std::nullopt};
      if (prod.is_zero()) {
        rep.zero_factor = true;
      } else {
        m.ratio = sigma[q] / prod;
        if (!have || *m.ratio > best) best = *m.ratio;
        have = true;
      }
      rep.margins.push_back(std::move(m));
    }
  }
  if (!rep.zero_factor && have) rep.c_emp = best;

  auto profile = compute_w(problem, std::span<const std::int64_t>(table.alpha));
  rep.max_normalised_w = profile.sorted.front();
  rep.w_bound = rep.max_normalised_w >= rep.w_lower_bound;
  if (threshold) rep.threshold_ok = rep.c_emp && *rep.c_emp <= *threshold;
  return rep;
}

TupleChoice default_tuple_choice(const HandicapProblem& problem, std::span<const std::int64_t> alpha) {
  TupleChoice choice(problem.joints().size(), 0);
  if (problem.support_size() == 0) return choice;
  auto profile = compute_w(problem, alpha);
  for (std::size_t q = 0; q < choice.size(); ++q) {
    if (problem.support()[q]) choice[q] = profile.argmin[q];
  }
  return choice;
}

namespace {

TupleChoice resolve_choice(const HandicapProblem& problem, std::span<const std::int64_t> alpha,
                           const TupleChoice& choice) {
  const auto& joints = problem.joints();
  if (choice.empty()) return default_tuple_choice(problem, alpha);
  if (choice.size() != joints.size()) throw Error(kModule, "FAC_CHOICE", "tuple choice length mismatch");
  for (std::size_t q = 0; q < choice.size(); ++q) {
    if (choice[q] >= joints.witnesses[q].size()) {
      throw Error(kModule, "FAC_CHOICE", "point " + to_string(joints.points[q]) + " has no witness " +
                                             std::to_string(choice[q]));
    }
  }
  return choice;
}

}  // namespace

CountingResult counting_certificate(const HandicapProblem& problem, std::span<const std::int64_t> alpha,
                                        const TupleChoice& choice) {
  const auto& joints = problem.joints();
  const auto chosen = resolve_choice(problem, alpha, choice);
  problem.prefetch(alpha);
  CountingResult res;
  res.lhs = 0;
  for (std::size_t q = 0; q < joints.size(); ++q) {
    const auto& w = joints.witnesses[q][chosen[q]];
    BigInt prod = 1;
    for (std::size_t j = 0; j < w.size(); ++j) prod *= problem.counts(j, w[j], alpha)[problem.position(j, w[j], q)];
    res.lhs += prod;
  }
  const std::size_t n = problem.config().n;
  res.rhs = BigInt(binomial(problem.lambda() + n, n));
  res.pass = res.lhs >= res.rhs;
  return res;
}

VanishingResult vanishing_certificate(const HandicapProblem& problem, std::span<const std::int64_t> alpha,
                                      const TupleChoice& choice) {
  const auto& joints = problem.joints();
  const auto& cfg = problem.config();
  const auto chosen = resolve_choice(problem, alpha, choice);
  const unsigned lambda = problem.lambda();

  // Accepted generators per (family, plane), one list per plane point.
  std::vector<std::pair<std::size_t, std::size_t>> planes;
  for (std::size_t q = 0; q < joints.size(); ++q) {
    const auto& w = joints.witnesses[q][chosen[q]];
    for (std::size_t j = 0; j < w.size(); ++j) planes.emplace_back(j, w[j]);
  }
  std::sort(planes.begin(), planes.end());
  planes.erase(std::unique(planes.begin(), planes.end()), planes.end());
  std::vector<std::vector<std::vector<MultiIndex>>> accepted(planes.size());
  problem.pool().parallel_for(planes.size(), [&](std::size_t m) {
    const auto [j, i] = planes[m];
    const auto& pts = problem.plane_points(j, i);
    std::vector<Point> coords;
    std::vector<std::int64_t> slice;
    for (auto q : pts) {
      coords.push_back(joints.points[q]);
      slice.push_back(alpha[q]);
    }
    auto tab = build_tableau(problem.chart(j, i), coords, slice, lambda);
    accepted[m].resize(pts.size());
    for (std::size_t a = 0; a < pts.size(); ++a) accepted[m][a] = tab.accepted(a);
  });
  auto lookup = [&](std::size_t j, std::size_t i) {
    return static_cast<std::size_t>(std::lower_bound(planes.begin(), planes.end(), std::make_pair(j, i)) - planes.begin());
  };

  VanishingResult res;
  res.dim = binomial(lambda + cfg.n, cfg.n);
  IncrementalBasis<std::size_t> basis(cfg.field, res.dim);
  for (std::size_t q = 0; q < joints.size() && !basis.full(); ++q) {
    const auto& w = joints.witnesses[q][chosen[q]];
    std::vector<PlaneChart> charts;
    std::vector<const std::vector<MultiIndex>*> lists;
    for (std::size_t j = 0; j < w.size(); ++j) {
      charts.push_back(problem.chart(j, w[j]));
      lists.push_back(&accepted[lookup(j, w[j])][problem.position(j, w[j], q)]);
    }
    if (std::any_of(lists.begin(), lists.end(), [](auto* l) { return l->empty(); })) continue;
    SubstitutionMatrix sub(cfg.field, joints.points[q], charts, lambda);
    std::vector<std::size_t> digit(lists.size(), 0);
    std::vector<MultiIndex> blocks(lists.size());
    for (;;) {
      for (std::size_t j = 0; j < lists.size(); ++j) blocks[j] = (*lists[j])[digit[j]];
      ++res.functionals;
      basis.try_extend(sub.column(blocks).coeffs, q);
      std::size_t j = lists.size();
      while (j-- > 0) {
        if (++digit[j] < lists[j]->size()) break;
        digit[j] = 0;
      }
      if (j == static_cast<std::size_t>(-1) || basis.full()) break;
    }
  }
  res.rank = basis.rank();
  res.pass = res.rank == res.dim;
  return res;
}

SweepReport lambda_sweep(const Configuration& cfg, const Multijoints& joints, const WeightFunction& weights,
                         std::span<const unsigned> lambdas, const SweepOptions& options, const TaskPool& pool) {
  if (!std::is_sorted(lambdas.begin(), lambdas.end())) {
    throw Error(kModule, "FAC_LAMBDA", "lambda list must be ascending");
  }
  SweepReport rep;
  for (auto lambda : lambdas) {
    try {
      HandicapProblem problem(cfg, joints, weights, lambda, pool);
      SweepStage stage{lambda, search_good_handicap(problem, options.search), {}, {}, {}, std::nullopt};
      stage.table = build_s(problem, stage.search.alpha, stage.search.gap);
      stage.verification = verify_factorisation(problem, stage.table, options.threshold);
      stage.counting = counting_certificate(problem, stage.search.alpha);
      if (options.vanishing) stage.vanishing = vanishing_certificate(problem, stage.search.alpha);
      rep.stages.push_back(std::move(stage));
    } catch (const Error& e) {
      throw Error(e.module(), e.code(), "lambda=" + std::to_string(lambda) + ": " + e.what());
    }
  }
  for (std::size_t i = 1; i < rep.stages.size(); ++i) {
    if (rep.stages[i].search.gap > rep.stages[i - 1].search.gap) rep.gaps_non_increasing = false;
  }
  if (rep.stages.size() >= 2) {
    const auto& a = rep.stages[rep.stages.size() - 2].table;
    const auto& b = rep.stages.back().table;
    Rational worst;
    for (std::size_t j = 0; j < a.rows.size(); ++j) {
      for (std::size_t i = 0; i < a.rows[j].size(); ++i) {
        for (std::size_t m = 0; m < a.rows[j][i].s.size(); ++m) {
          worst = std::max(worst, abs(a.rows[j][i].s[m] - b.rows[j][i].s[m]));
        }
      }
    }
    rep.last_difference = worst;
  }
  return rep;
}

Configuration all_planes_configuration(const PrimeField& field, std::size_t n, std::vector<std::size_t> k_list,
                                       std::uint64_t cap) {
  Configuration cfg{field, n, std::move(k_list), {}};
  for (auto k : cfg.k_list) cfg.families.push_back(enumerate_planes(field, n, k, cap));
  cfg.validate();
  return cfg;
}

GrassmannFactorisation extend_to_grassmannian(const HandicapProblem& problem, const FactorisationTable& table,
                                              const VerificationReport& report, GrassmannMode mode,
                                              std::uint64_t cap) {
  const auto& cfg = problem.config();
  const auto& joints = problem.joints();
  const auto& support = problem.support();
  const unsigned lambda = problem.lambda();

  GrassmannFactorisation g;
  g.lambda = lambda;
  g.mode = mode;
  g.c_emp = report.c_emp;
  g.rows.resize(cfg.d());
  g.values.resize(cfg.d());
  g.row_sums = true;

  std::vector<std::size_t> support_index;
  for (std::size_t q = 0; q < joints.size(); ++q) {
    if (support[q]) support_index.push_back(q);
  }

  std::set<std::pair<std::size_t, std::vector<std::size_t>>> classes;
  for (std::size_t j = 0; j < cfg.d(); ++j) {
    const auto k = cfg.k_list[j];
    const Rational full = binomial_rational(lambda + k, k);
    // Base planes of this family by trace on the support.
    std::map<std::vector<std::size_t>, std::size_t> representative;
    for (std::size_t i = 0; i < cfg.families[j].size(); ++i) {
      std::vector<std::size_t> trace;
      for (auto q : problem.plane_points(j, i)) {
        if (support[q]) trace.push_back(q);
      }
      if (!trace.empty()) representative.emplace(std::move(trace), i);
    }

    auto planes = enumerate_planes(cfg.field, cfg.n, k, cap);
    for (auto& plane : planes) {
      GrassmannRow row{plane, {}, {}, Rational(0)};
      std::vector<std::size_t> trace;
      for (auto q : support_index) {
        if (plane.contains(joints.points[q])) {
          trace.push_back(q);
          row.trace.push_back(joints.points[q]);
        }
      }
      if (!trace.empty()) {
        classes.emplace(j, trace);
        if (mode == GrassmannMode::enumerate) {
          std::vector<std::int64_t> slice;
          for (auto q : trace) slice.push_back(table.alpha[q]);
          auto counts = tableau_counts(PlaneChart(plane), row.trace, slice, lambda);
          for (auto c : counts) row.s.push_back(Rational(static_cast<std::int64_t>(c)) / full);
        } else {
          auto it = representative.find(trace);
          if (it == representative.end()) {
            std::string listing;
            for (const auto& p : row.trace) listing += (listing.empty() ? "" : " ") + to_string(p);
            throw Error(kModule, "GR_TRACE",
                        "family " + std::to_string(j) + " has no plane with trace {" + listing + "}");
          }
          for (auto q : trace) row.s.push_back(table.s(j, it->second, q));
        }
        for (std::size_t a = 0; a < trace.size(); ++a) {
          row.row_sum += row.s[a];
          g.values[j][{row.trace[a], plane.direction()}] = row.s[a];
        }
      }
      ++g.rows_checked;
      if (row.row_sum != Rational(trace.empty() ? 0 : 1)) g.row_sums = false;
      g.rows[j].push_back(std::move(row));
    }
  }
  g.trace_classes = classes.size();

  // Every wedge-1 tuple of directions at every support point.
  std::vector<std::vector<GrassmannElement>> grass;
  std::uint64_t per_point = 1;
  for (auto k : cfg.k_list) {
    grass.push_back(enumerate_grassmannian(cfg.field, cfg.n, k));
    per_point *= grass.back().size();
    if (per_point * std::max<std::size_t>(support_index.size(), 1) > cap) {
      throw Error(kModule, "GR_CAP", "direction tuples exceed the cap");
    }
  }
  bool infinite = false;
  Rational worst;
  bool have = false;
  for (auto q : support_index) {
    const auto& p = joints.points[q];
    std::vector<std::size_t> digit(cfg.d(), 0);
    std::vector<GrassmannElement> spaces;
    for (;;) {
      spaces.clear();
      for (std::size_t j = 0; j < cfg.d(); ++j) spaces.push_back(grass[j][digit[j]]);
      if (wedge(spaces) == 1) {
        ++g.tuples_checked;
        Rational prod(1);
        for (std::size_t j = 0; j < cfg.d(); ++j) prod *= g.values[j].at({p, spaces[j]});
        if (prod.is_zero()) {
          infinite = true;
        } else {
          Rational ratio = problem.weights().sigma[q] / prod;
          if (!have || ratio > worst) worst = ratio;
          have = true;
        }
      }
      std::size_t j = cfg.d();
      while (j-- > 0) {
        if (++digit[j] < grass[j].size()) break;
        digit[j] = 0;
      }
      if (j == static_cast<std::size_t>(-1)) break;
    }
  }
  if (!infinite && have) g.c_grass = worst;
  // Ordered in the extended reals: an infinite C_emp dominates anything.
  if (!have && !infinite) {
    g.domination = true;  // empty support: nothing to dominate
  } else {
    g.domination = !g.c_emp || (g.c_grass && *g.c_grass <= *g.c_emp);
  }

  g.restriction = true;
  for (std::size_t j = 0; j < cfg.d(); ++j) {
    for (std::size_t i = 0; i < cfg.families[j].size(); ++i) {
      const auto& plane = cfg.families[j][i];
      for (auto q : problem.plane_points(j, i)) {
        if (!support[q]) continue;
        if (g.values[j].at({joints.points[q], plane.direction()}) != table.s(j, i, q)) g.restriction = false;
      }
    }
  }
  return g;
}

MultijointInequality verify_multijoint_inequality(const HandicapProblem& problem, const FactorisationTable& table,
                                                  const VerificationReport& report,
                                                  const std::vector<std::vector<Rational>>& f) {
  const auto& cfg = problem.config();
  const auto& joints = problem.joints();
  const auto& sigma = problem.weights().sigma;
  const std::size_t d = cfg.d();
  if (f.size() != d) throw Error(kModule, "MJ_DIM", "need one weight vector per family");
  for (std::size_t j = 0; j < d; ++j) {
    if (f[j].size() != cfg.families[j].size()) {
      throw Error(kModule, "MJ_DIM", "family " + std::to_string(j) + " weight vector has the wrong length");
    }
    for (const auto& v : f[j]) {
      if (v.sign() < 0) throw Error(kModule, "MJ_NEG", "negative plane weight " + v.to_string());
    }
  }

  MultijointInequality res;
  const std::size_t m = joints.size();
  std::vector<Rational> t_full(m);
  std::vector<std::vector<Rational>> t_j(d, std::vector<Rational>(m));
  for (std::size_t q = 0; q < m; ++q) {
    for (const auto& w : joints.witnesses[q]) {
      Rational prod(1);
      for (std::size_t j = 0; j < d; ++j) prod *= f[j][w[j]];
      t_full[q] += prod;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < cfg.families[j].size(); ++i) {
      const auto& row = table.rows[j][i];
      for (std::size_t a = 0; a < row.points.size(); ++a) t_j[j][row.points[a]] += row.s[a] * f[j][i];
    }
  }

  res.link_pointwise = true;
  for (std::size_t q = 0; q < m; ++q) {
    const Rational left = sigma[q] * t_full[q];
    if (!report.c_emp) {
      if (!left.is_zero()) res.link_pointwise = false;
      continue;
    }
    Rational right = *report.c_emp;
    for (std::size_t j = 0; j < d; ++j) right *= t_j[j][q];
    if (left > right) res.link_pointwise = false;
  }

  res.link_bounded = true;
  for (std::size_t j = 0; j < d; ++j) {
    Rational tn, fn;
    for (const auto& v : t_j[j]) tn += v;
    for (const auto& v : f[j]) fn += v;
    if (tn > fn) res.link_bounded = false;
    res.t_norms.push_back(tn);
    res.f_norms.push_back(fn);
  }

  const double inv_d = 1.0 / static_cast<double>(d);
  for (std::size_t q = 0; q < m; ++q) {
    res.lhs += std::pow(sigma[q].to_double(), inv_d) * std::pow(t_full[q].to_double(), inv_d);
    double prod = 1;
    for (std::size_t j = 0; j < d; ++j) prod *= std::pow(t_j[j][q].to_double(), inv_d);
    res.middle += prod;
  }
  res.holder = 1;
  double f_root = 1;
  for (std::size_t j = 0; j < d; ++j) {
    res.holder *= std::pow(res.t_norms[j].to_double(), inv_d);
    f_root *= std::pow(res.f_norms[j].to_double(), inv_d);
  }
  res.rhs = report.c_emp ? std::pow(report.c_emp->to_double(), inv_d) * f_root
                         : std::numeric_limits<double>::infinity();
  res.link_holder = res.middle <= res.holder * (1 + kHolderTolerance);
  return res;
}

}  // namespace mjf
