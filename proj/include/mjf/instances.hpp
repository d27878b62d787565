#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mjf/geometry.hpp"

namespace mjf {

/// mt19937_64 with its own bounded draw, so a seed gives the same stream on
/// every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);

 private:
  std::mt19937_64 engine_;
};

/// One random instance for the tableau property suites.
struct TableauInstance {
  AffinePlane plane;
  std::vector<Point> points;        // distinct points of the plane
  std::vector<std::int64_t> alpha;  // aligned with points
  unsigned lambda;
};

/// p drawn from `primes`, n <= max_n, k <= min(max_k, n), lambda <= max_lambda,
/// between 1 and min(p^k, max_points) points, alpha in [-alpha_range, alpha_range].
TableauInstance random_tableau_instance(Rng& rng, const std::vector<std::uint64_t>& primes, std::size_t max_n,
                                        std::size_t max_k, unsigned max_lambda, std::size_t max_points = 6,
                                        std::int64_t alpha_range = 6);

AffinePlane random_plane(Rng& rng, const PrimeField& field, std::size_t n, std::size_t k);

/// Three axis lines through the origin of F_p^3.
Configuration single_joint_config(std::uint64_t p);
/// F_5^2, lines: family 0 = {y = 0}, family 1 = {x = 0, x = 1}; J = {(0,0), (1,0)}.
Configuration two_joint_config();
/// F_3^3 with every axis-parallel line, nine per family; J is all 27 points.
Configuration grid_config();

/// The same configurations as JSON documents for the CLI.
std::string single_joint_config_json(std::uint64_t p, const std::string& lambdas);
std::string two_joint_config_json(const std::string& lambdas);
std::string grid_config_json(const std::string& lambdas);

}  // namespace mjf
