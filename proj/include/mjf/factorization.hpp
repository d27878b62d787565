#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mjf/geometry.hpp"
#include "mjf/handicap_search.hpp"
#include "mjf/rational.hpp"

namespace mjf {

/// s(p, plane) = tilde S / C(lambda + k_j, k_j) for every plane of every family.
struct FactorisationTable {
  struct Row {
    std::vector<std::size_t> points;   // J indices on the plane, ascending
    std::vector<std::size_t> tilde_s;  // aligned with points
    std::vector<Rational> s;
  };

  unsigned lambda = 0;
  std::vector<std::int64_t> alpha;
  Rational gap;
  std::vector<std::vector<Row>> rows;  // [family][plane]

  /// Zero when the point is not on the plane.
  Rational s(std::size_t family, std::size_t plane, std::size_t point) const;
  std::size_t tilde_s(std::size_t family, std::size_t plane, std::size_t point) const;
  /// Every nonempty row sums to exactly one.
  bool rows_sum_to_one() const;
};

FactorisationTable build_s(const HandicapProblem& problem, std::span<const std::int64_t> alpha,
                           const Rational& gap = Rational(0));

struct WitnessMargin {
  std::size_t point;
  std::size_t witness;
  std::optional<Rational> ratio;  // sigma_p / prod_j s; empty when some factor is zero
};

struct VerificationReport {
  std::optional<Rational> c_emp;  // max ratio over support witnesses; empty means infinite
  std::vector<WitnessMargin> margins;
  bool zero_factor = false;       // some support witness has a vanishing s factor
  bool row_sums = false;
  Rational max_normalised_w;
  Rational w_lower_bound;         // C(lambda + n, n) / prod_j C(lambda + k_j, k_j)
  bool w_bound = false;
  Rational slack;                 // h / lambda
  Rational gap;
  std::optional<Rational> threshold;
  bool threshold_ok = true;

  bool ok() const { return !zero_factor && row_sums && w_bound && threshold_ok; }
};

VerificationReport verify_factorisation(const HandicapProblem& problem, const FactorisationTable& table,
                                     const std::optional<Rational>& threshold = std::nullopt);

/// Witness index per J point. Empty means the w-minimising tuple on the
/// support and the first witness elsewhere.
using TupleChoice = std::vector<std::size_t>;

TupleChoice default_tuple_choice(const HandicapProblem& problem, std::span<const std::int64_t> alpha);

struct CountingResult {
  BigInt lhs;
  BigInt rhs;
  bool pass = false;
};

/// sum_p prod_j tilde S(p, pi_j(p)) against C(lambda + n, n).
CountingResult counting_certificate(const HandicapProblem& problem, std::span<const std::int64_t> alpha,
                                        const TupleChoice& choice = {});

struct VanishingResult {
  std::size_t rank = 0;
  std::size_t dim = 0;
  std::size_t functionals = 0;
  bool pass = false;
};

/// Rank of the composed functionals D_1 ... D_d at p over all J points,
/// each D_j running over the accepted basis of its tableau.
VanishingResult vanishing_certificate(const HandicapProblem& problem, std::span<const std::int64_t> alpha,
                                      const TupleChoice& choice = {});

struct SweepStage {
  unsigned lambda;
  SearchResult search;
  FactorisationTable table;
  VerificationReport verification;
  CountingResult counting;
  std::optional<VanishingResult> vanishing;
};

struct SweepReport {
  std::vector<SweepStage> stages;
  bool gaps_non_increasing = true;
  /// max |s_lambda - s_lambda'| between the last two stages, over every (family, plane, point).
  std::optional<Rational> last_difference;
};

struct SweepOptions {
  SearchOptions search;
  bool vanishing = false;
  std::optional<Rational> threshold;
};

/// Search, tabulate and verify at every lambda (ascending). Errors are
/// rethrown with the failing lambda in the message.
SweepReport lambda_sweep(const Configuration& cfg, const Multijoints& joints, const WeightFunction& weights,
                         std::span<const unsigned> lambdas, const SweepOptions& options = {},
                         const TaskPool& pool = TaskPool(1));

/// Every affine k_j-plane of F_p^n as family j.
Configuration all_planes_configuration(const PrimeField& field, std::size_t n, std::vector<std::size_t> k_list,
                                       std::uint64_t cap = kDefaultPlaneCap);

enum class GrassmannMode {
  enumerate,        // base families are every plane; s comes from trace tableaux
  representatives,  // base families stand in for every trace class
};

struct GrassmannRow {
  AffinePlane plane;
  std::vector<Point> trace;  // plane meets Supp S here
  std::vector<Rational> s;   // aligned with trace
  Rational row_sum;
};

struct GrassmannFactorisation {
  unsigned lambda = 0;
  GrassmannMode mode = GrassmannMode::enumerate;
  std::vector<std::vector<GrassmannRow>> rows;  // [family] over every affine k_j-plane
  /// [family]: (support point, direction) -> s
  std::vector<std::map<std::pair<Point, GrassmannElement>, Rational>> values;
  std::size_t trace_classes = 0;

  std::size_t rows_checked = 0;
  bool row_sums = false;        // = 1 on planes meeting Supp S, 0 elsewhere
  std::size_t tuples_checked = 0;
  std::optional<Rational> c_grass;  // max sigma_p / prod_j s(p, V_j) over wedge-1 tuples
  std::optional<Rational> c_emp;
  bool domination = false;      // c_grass <= c_emp, with an empty optional read as infinity
  bool restriction = false;     // agrees with the base table on the base families

  bool ok() const { return row_sums && domination && restriction; }
};

/// Extends the base table to every (point, direction). In representatives
/// mode a trace class without a representative raises GR_TRACE naming it.
GrassmannFactorisation extend_to_grassmannian(const HandicapProblem& problem, const FactorisationTable& table,
                                              const VerificationReport& report, GrassmannMode mode,
                                              std::uint64_t cap = kDefaultPlaneCap);

struct MultijointInequality {
  bool link_pointwise = false;  // sigma_p T[f](p) <= C_emp prod_j T_j[f_j](p), exact
  bool link_holder = false;     // sum_p prod_j T_j^(1/d) <= prod_j ||T_j f_j||^(1/d), relative 1e-9
  bool link_bounded = false;    // ||T_j f_j||_1 <= ||f_j||_1, exact
  std::vector<Rational> t_norms;
  std::vector<Rational> f_norms;
  double lhs = 0;     // sum_p S(p) T[f](p)^(1/d)
  double middle = 0;  // sum_p prod_j T_j[f_j](p)^(1/d)
  double holder = 0;  // prod_j ||T_j f_j||^(1/d)
  double rhs = 0;     // C_emp^(1/d) prod_j ||f_j||^(1/d)

  bool pass() const { return link_pointwise && link_holder && link_bounded; }
};

constexpr double kHolderTolerance = 1e-9;

/// f[j][i] is the weight of plane i of family j. MJ_NEG on negative entries.
MultijointInequality verify_multijoint_inequality(const HandicapProblem& problem, const FactorisationTable& table,
                                                  const VerificationReport& report,
                                                  const std::vector<std::vector<Rational>>& f);

}  // namespace mjf
