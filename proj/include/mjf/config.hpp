#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mjf/error.hpp"
#include "mjf/geometry.hpp"
#include "mjf/handicap_search.hpp"
#include "mjf/rational.hpp"

namespace mjf {

struct PlaneSpec {
  std::vector<std::uint32_t> base;
  std::vector<std::vector<std::uint32_t>> directions;

  friend bool operator==(const PlaneSpec&, const PlaneSpec&) = default;
};

struct FamilySpec {
  std::size_t k = 0;
  bool all = false;  // every affine k-plane
  std::vector<PlaneSpec> planes;

  friend bool operator==(const FamilySpec&, const FamilySpec&) = default;
};

struct WeightEntry {
  std::vector<std::uint32_t> point;
  Rational sigma;

  friend bool operator==(const WeightEntry&, const WeightEntry&) = default;
};

struct RunConfig {
  std::uint64_t p = 0;
  std::size_t n = 0;
  std::vector<FamilySpec> families;
  bool uniform = true;
  std::vector<WeightEntry> weights;  // when not uniform
  std::vector<unsigned> lambdas;
  std::size_t budget = 10'000;
  std::uint64_t seed = 0;
  std::uint64_t plane_cap = kDefaultPlaneCap;
  std::optional<std::int64_t> oracle_box;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ConfigViolation {
  std::string code;
  std::string message;
};

/// Every violation found in a configuration document; code() is the first one's.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigViolation> violations);
  const std::vector<ConfigViolation>& violations() const noexcept { return violations_; }

 private:
  std::vector<ConfigViolation> violations_;
};

/// Throws ConfigError listing every problem, not just the first.
RunConfig parse_config(std::string_view text);

/// Canonical echo; parse_config(config_to_json(c).dump()) == c.
nlohmann::json config_to_json(const RunConfig& cfg);

/// Planes canonicalised, "all" families enumerated (GEO_CAP beyond plane_cap).
Configuration build_configuration(const RunConfig& cfg);

/// Uniform over J, or the explicit entries normalised to sum to one.
/// CFG_JOINT when an entry names a point outside J.
WeightFunction build_weights(const RunConfig& cfg, const Multijoints& joints);

}  // namespace mjf
