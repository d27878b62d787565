#include "mjf/instances.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "mjf/error.hpp"

namespace mjf {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw Error("cli_harness", "RNG_BOUND", "empty range");
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

AffinePlane random_plane(Rng& rng, const PrimeField& field, std::size_t n, std::size_t k) {
  const std::uint32_t p = field.modulus();
  Point base{std::vector<std::uint32_t>(n)};
  for (auto& x : base.coords) x = static_cast<std::uint32_t>(rng.below(p));
  for (;;) {
    std::vector<RowFp> dirs(k, RowFp(n));
    for (auto& d : dirs) {
      for (auto& x : d) x = static_cast<std::uint32_t>(rng.below(p));
    }
    if (rref_rank(MatrixFp(field, n, dirs)).rank == k) return canonicalize_plane(field, base, std::move(dirs));
  }
}

TableauInstance random_tableau_instance(Rng& rng, const std::vector<std::uint64_t>& primes, std::size_t max_n,
                                        std::size_t max_k, unsigned max_lambda, std::size_t max_points,
                                        std::int64_t alpha_range) {
  const PrimeField field(primes[rng.below(primes.size())]);
  const auto n = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(max_n)));
  const auto k = static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(std::min(max_k, n))));
  const auto lambda = static_cast<unsigned>(rng.between(0, max_lambda));
  auto plane = random_plane(rng, field, n, k);
  auto all = plane.points();
  const std::size_t count =
      static_cast<std::size_t>(rng.between(1, static_cast<std::int64_t>(std::min(all.size(), max_points))));
  // Partial Fisher-Yates for a uniform subset.
  for (std::size_t i = 0; i < count; ++i) std::swap(all[i], all[i + rng.below(all.size() - i)]);
  all.resize(count);
  std::vector<std::int64_t> alpha(count);
  for (auto& a : alpha) a = rng.between(-alpha_range, alpha_range);
  return {std::move(plane), std::move(all), std::move(alpha), lambda};
}

namespace {

AffinePlane line(const PrimeField& f, std::vector<std::uint32_t> base, std::vector<std::uint32_t> dir) {
  return canonicalize_plane(f, Point{std::move(base)}, {std::move(dir)});
}

}  // namespace

Configuration single_joint_config(std::uint64_t p) {
  const PrimeField f(p);
  Configuration cfg{f, 3, {1, 1, 1}, {}};
  cfg.families.push_back({line(f, {0, 0, 0}, {1, 0, 0})});
  cfg.families.push_back({line(f, {0, 0, 0}, {0, 1, 0})});
  cfg.families.push_back({line(f, {0, 0, 0}, {0, 0, 1})});
  cfg.validate();
  return cfg;
}

Configuration two_joint_config() {
  const PrimeField f(5);
  Configuration cfg{f, 2, {1, 1}, {}};
  cfg.families.push_back({line(f, {0, 0}, {1, 0})});
  cfg.families.push_back({line(f, {0, 0}, {0, 1}), line(f, {1, 0}, {0, 1})});
  cfg.validate();
  return cfg;
}

Configuration grid_config() {
  const PrimeField f(3);
  Configuration cfg{f, 3, {1, 1, 1}, {}};
  for (std::size_t axis = 0; axis < 3; ++axis) {
    std::vector<AffinePlane> fam;
    for (std::uint32_t a = 0; a < 3; ++a) {
      for (std::uint32_t b = 0; b < 3; ++b) {
        std::vector<std::uint32_t> base(3, 0), dir(3, 0);
        dir[axis] = 1;
        base[(axis + 1) % 3] = a;
        base[(axis + 2) % 3] = b;
        fam.push_back(line(f, base, dir));
      }
    }
    std::sort(fam.begin(), fam.end());
    cfg.families.push_back(std::move(fam));
  }
  cfg.validate();
  return cfg;
}

std::string single_joint_config_json(std::uint64_t p, const std::string& lambdas) {
  std::ostringstream os;
  os << R"({"p": )" << p << R"(, "n": 3, "families": [)"
     << R"({"k": 1, "planes": [{"base": [0,0,0], "directions": [[1,0,0]]}]},)"
     << R"({"k": 1, "planes": [{"base": [0,0,0], "directions": [[0,1,0]]}]},)"
     << R"({"k": 1, "planes": [{"base": [0,0,0], "directions": [[0,0,1]]}]}],)"
     << R"( "weights": "uniform", "lambda": )" << lambdas << "}";
  return os.str();
}

std::string two_joint_config_json(const std::string& lambdas) {
  std::ostringstream os;
  os << R"({"p": 5, "n": 2, "families": [)"
     << R"({"k": 1, "planes": [{"base": [0,0], "directions": [[1,0]]}]},)"
     << R"({"k": 1, "planes": [{"base": [0,0], "directions": [[0,1]]}, {"base": [1,0], "directions": [[0,1]]}]}],)"
     << R"( "weights": "uniform", "lambda": )" << lambdas << "}";
  return os.str();
}

std::string grid_config_json(const std::string& lambdas) {
  std::ostringstream os;
  os << R"({"p": 3, "n": 3, "families": [)";
  for (int axis = 0; axis < 3; ++axis) {
    os << (axis ? "," : "") << R"({"k": 1, "planes": [)";
    bool first = true;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        int base[3] = {0, 0, 0}, dir[3] = {0, 0, 0};
        dir[axis] = 1;
        base[(axis + 1) % 3] = a;
        base[(axis + 2) % 3] = b;
        os << (first ? "" : ",") << R"({"base": [)" << base[0] << ',' << base[1] << ',' << base[2]
           << R"(], "directions": [[)" << dir[0] << ',' << dir[1] << ',' << dir[2] << "]]}";
        first = false;
      }
    }
    os << "]}";
  }
  os << R"(], "weights": "uniform", "lambda": )" << lambdas << "}";
  return os.str();
}

}  // namespace mjf
