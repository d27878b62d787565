#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mjf/geometry.hpp"
#include "mjf/poly_dual.hpp"
#include "mjf/rational.hpp"
#include "mjf/tableau.hpp"
#include "mjf/task_pool.hpp"

namespace mjf {

/// sigma_p = S(p)^d on J, normalised so that the values sum to one.
struct WeightFunction {
  std::vector<Rational> sigma;  // aligned with J

  /// Uniform weight 1/|J| on every multijoint.
  static WeightFunction uniform(std::size_t count);
  /// Explicit non-negative weights, rescaled to sum to one (HS_WEIGHT on
  /// negative entries or an all-zero vector).
  static WeightFunction normalised(std::vector<Rational> raw);

  std::vector<bool> support() const;
  std::size_t support_size() const;
};

/// w_p(alpha) for every multijoint.
struct WeightProfile {
  std::vector<Rational> raw;         // min over witnesses of prod_j tilde S / sigma_p; 0 off support
  std::vector<Rational> normalised;  // raw / prod_j C(lambda + k_j, k_j)
  std::vector<std::size_t> argmin;   // minimising witness index per point (0 off support)
  std::vector<std::size_t> order;    // support points by descending w, ties by point order
  std::vector<Rational> sorted;      // all of J, descending normalised values

  /// max - min of normalised w over the support.
  Rational gap() const;
};

/// True when a's sorted profile is lexicographically smaller than b's.
bool lex_less(const WeightProfile& a, const WeightProfile& b);

/// One configuration, weight function and lambda, with the plane incidence
/// and a tableau cache shared by every evaluation.
class HandicapProblem {
 public:
  HandicapProblem(Configuration cfg, Multijoints joints, WeightFunction weights, unsigned lambda,
                  TaskPool pool = TaskPool(1));

  const Configuration& config() const noexcept { return cfg_; }
  const Multijoints& joints() const noexcept { return joints_; }
  const WeightFunction& weights() const noexcept { return weights_; }
  unsigned lambda() const noexcept { return lambda_; }
  const TaskPool& pool() const noexcept { return pool_; }
  const std::vector<bool>& support() const noexcept { return support_; }
  std::size_t support_size() const noexcept { return support_size_; }

  /// J indices on plane (family, index), ascending.
  const std::vector<std::size_t>& plane_points(std::size_t family, std::size_t plane) const;
  const PlaneChart& chart(std::size_t family, std::size_t plane) const;
  /// Position of J index `point` inside plane_points(family, plane).
  std::size_t position(std::size_t family, std::size_t plane, std::size_t point) const;

  /// tilde S on one plane, aligned with plane_points.
  std::vector<std::size_t> counts(std::size_t family, std::size_t plane, std::span<const std::int64_t> alpha) const;
  /// prod_j C(lambda + k_j, k_j)
  const BigInt& binomial_product() const noexcept { return binomial_product_; }

  /// Fills the cache for every plane touched by J, in parallel.
  void prefetch(std::span<const std::int64_t> alpha) const;

  /// Tableaux vanish at every off-support point of every plane meeting the support.
  bool in_admissible_set(std::span<const std::int64_t> alpha) const;

  Handicap to_handicap(std::span<const std::int64_t> alpha) const;
  std::vector<std::int64_t> from_handicap(const Handicap& alpha) const;

 private:
  struct PlaneData {
    std::vector<std::size_t> points;
    std::unique_ptr<PlaneChart> chart;
    std::vector<Point> coords;
  };
  using CacheKey = std::pair<std::size_t, std::vector<std::int64_t>>;

  std::size_t flat(std::size_t family, std::size_t plane) const;
  std::vector<std::int64_t> slice(std::size_t flat_index, std::span<const std::int64_t> alpha) const;

  Configuration cfg_;
  Multijoints joints_;
  WeightFunction weights_;
  unsigned lambda_;
  TaskPool pool_;
  std::vector<bool> support_;
  std::size_t support_size_ = 0;
  std::vector<std::size_t> family_offset_;
  std::vector<PlaneData> planes_;
  BigInt binomial_product_;
  struct Cache {
    std::mutex mutex;
    std::map<CacheKey, std::vector<std::size_t>> counts;
  };
  std::unique_ptr<Cache> cache_ = std::make_unique<Cache>();
};

/// w_p(alpha). Throws HS_WITNESS when a support point has no witness tuple.
WeightProfile compute_w(const HandicapProblem& problem, std::span<const std::int64_t> alpha);
WeightProfile compute_w(const HandicapProblem& problem, const Handicap& alpha);

/// alpha - v: decrement the first t entries of support_order and every point
/// of the handicap's domain outside support_order. HS_RANGE unless 1 <= t <= |support_order|.
Handicap perturbation_step(const Handicap& alpha, std::size_t t, std::span<const Point> support_order);
std::vector<std::int64_t> perturbation_step(std::span<const std::int64_t> alpha, std::size_t t,
                                            std::span<const std::size_t> support_order,
                                            const std::vector<bool>& support);

struct ContinuityRadius {
  Rational h;                // explicit constant with |w_i(alpha) - w_i(alpha - v)| <= h / (2 lambda)
  Rational half_step;        // h / (2 lambda), normalised profile
};

/// Explicit h for the normalised profile. HS_EMPTY on empty support.
ContinuityRadius continuity_radius(const WeightFunction& weights, std::size_t joint_count,
                                   std::span<const std::size_t> k_list, unsigned lambda);

enum class SearchStatus { good, budget_exhausted, stuck };

std::string to_string(SearchStatus s);

enum class MoveKind {
  top,     // the first t points of the descending order
  lower,   // one support point
  raise,   // every support point but one
  subset,  // any other proper subset, small supports only
};

std::string to_string(MoveKind k);

struct SearchMove {
  MoveKind kind;
  std::vector<std::size_t> points;  // support points decremented, ascending J indices
  std::int64_t repeats;
  bool gap_move;        // top move at the least t with w_t - w_{t+1} > h / lambda
  bool top_preserved;   // the decremented set is still the top |points| after the step
};

/// Decrements `points` and every off-support point once.
std::vector<std::int64_t> apply_move(std::span<const std::int64_t> alpha, std::span<const std::size_t> points,
                                     const std::vector<bool>& support);

/// Supports up to this size also try every proper subset as a move.
constexpr std::size_t kSubsetMoveLimit = 6;

struct SearchOptions {
  std::size_t budget = 10'000;  // accepted moves
  /// Keep descending after the gap target is met, until no perturbation
  /// lowers the sorted profile.
  bool refine = true;
};

struct SearchResult {
  std::vector<std::int64_t> alpha;  // aligned with J
  WeightProfile profile;
  SearchStatus status = SearchStatus::good;
  Rational gap;
  Rational target;        // |Supp S| * h / lambda
  Rational target_joint;  // |J| * h / lambda
  ContinuityRadius radius;
  std::size_t iterations = 0;
  std::vector<SearchMove> moves;
};

/// Lexicographic descent starting from alpha = 0 on the support and a deep
/// negative value off it. Each round tries the gap perturbation, the other
/// top-t perturbations, single-point lowers and raises, and on small supports
/// every proper subset, each repeated c = 1..cap times; the first strict
/// lexicographic improvement is taken. HS_DISCONNECTED when the
/// support is not connected, HS_EMPTY when it is empty, HS_LAMBDA for lambda = 0.
SearchResult search_good_handicap(const HandicapProblem& problem, const SearchOptions& options = {});

struct OracleResult {
  std::vector<std::int64_t> alpha;
  WeightProfile profile;
  std::size_t evaluated = 0;
};

/// (lambda + 1)(|Supp S| - 1): every admissible profile is reached inside this box.
std::int64_t default_oracle_box(const HandicapProblem& problem);

/// Exhaustive lexicographic minimum over handicaps with the first support
/// point pinned to 0 and the rest in [-box, box]. HS_GUARD when
/// |Supp S| > 4 or (2 box + 1)^(|Supp S| - 1) > 10^6.
OracleResult brute_force_handicap_oracle(const HandicapProblem& problem, std::int64_t box);

/// Initial handicap of the search: 0 on the support, -(lambda+1)(1+|Supp S|) off it.
std::vector<std::int64_t> initial_handicap(const HandicapProblem& problem);

}  // namespace mjf
