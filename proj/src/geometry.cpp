#include "mjf/geometry.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "mjf/error.hpp"

namespace mjf {

std::string to_string(const Point& p) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < p.coords.size(); ++i) os << (i ? "," : "") << p.coords[i];
  os << ')';
  return os.str();
}

GrassmannElement GrassmannElement::from_spanning(const PrimeField& field, std::size_t n,
                                                 std::vector<RowFp> vectors) {
  const std::size_t count = vectors.size();
  for (auto& v : vectors) {
    if (v.size() != n) throw Error("geometry", "GEO_DIM", "direction vector has wrong length");
    for (auto& x : v) x %= field.modulus();
  }
  auto e = rref_rank(MatrixFp(field, n, std::move(vectors)));
  if (e.rank != count) throw Error("geometry", "GEO_DEP", "spanning directions are linearly dependent");
  return GrassmannElement(std::move(e.echelon), std::move(e.pivots));
}

RowFp GrassmannElement::reduce(RowFp v) const {
  const std::uint32_t p = field().modulus();
  for (std::size_t i = 0; i < pivots_.size(); ++i) {
    const std::uint32_t c = v[pivots_[i]];
    if (c != 0) kernels::axpy_mod(v, basis_.row(i), field().neg(c), p);
  }
  return v;
}

bool GrassmannElement::contains(const RowFp& v) const {
  auto r = reduce(v);
  return std::all_of(r.begin(), r.end(), [](std::uint32_t x) { return x == 0; });
}

std::strong_ordering operator<=>(const GrassmannElement& a, const GrassmannElement& b) {
  if (auto c = a.k() <=> b.k(); c != 0) return c;
  if (auto c = a.n() <=> b.n(); c != 0) return c;
  return a.basis_.rows() <=> b.basis_.rows();
}

AffinePlane::AffinePlane(Point base, GrassmannElement direction)
    : base_{direction.reduce(std::move(base.coords))}, direction_(std::move(direction)) {}

bool AffinePlane::contains(const Point& p) const {
  if (p.dim() != n()) return false;
  const PrimeField& f = direction_.field();
  RowFp diff(n());
  for (std::size_t i = 0; i < n(); ++i) diff[i] = f.sub(p.coords[i], base_.coords[i]);
  return direction_.contains(diff);
}

std::vector<Point> AffinePlane::points() const {
  const PrimeField& f = direction_.field();
  const std::uint32_t p = f.modulus();
  std::vector<Point> out;
  std::vector<std::uint32_t> t(k(), 0);
  while (true) {
    Point q = base_;
    for (std::size_t i = 0; i < k(); ++i) {
      if (t[i] != 0) kernels::axpy_mod(q.coords, direction_.basis().row(i), t[i], p);
    }
    out.push_back(std::move(q));
    std::size_t i = 0;
    while (i < k() && ++t[i] == p) t[i++] = 0;
    if (i == k()) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::strong_ordering operator<=>(const AffinePlane& a, const AffinePlane& b) {
  if (auto c = a.direction_ <=> b.direction_; c != 0) return c;
  return a.base_ <=> b.base_;
}

std::string to_string(const AffinePlane& plane) {
  std::ostringstream os;
  os << to_string(plane.base()) << "+<";
  const auto& rows = plane.direction().basis().rows();
  for (std::size_t i = 0; i < rows.size(); ++i) os << (i ? "," : "") << to_string(Point{rows[i]});
  os << '>';
  return os.str();
}

AffinePlane canonicalize_plane(const PrimeField& field, const Point& base, std::vector<RowFp> directions) {
  Point b = base;
  for (auto& x : b.coords) x %= field.modulus();
  auto dir = GrassmannElement::from_spanning(field, base.dim(), std::move(directions));
  return AffinePlane(std::move(b), std::move(dir));
}

void Configuration::validate() const {
  if (d() < 2) throw Error("geometry", "GEO_CONFIG", "need at least two families");
  if (families.size() != d()) throw Error("geometry", "GEO_CONFIG", "family count does not match k list");
  if (std::accumulate(k_list.begin(), k_list.end(), std::size_t{0}) != n) {
    throw Error("geometry", "GEO_KSUM", "plane dimensions do not sum to n");
  }
  for (std::size_t j = 0; j < d(); ++j) {
    for (const auto& pl : families[j]) {
      if (pl.k() != k_list[j] || pl.n() != n || pl.direction().field() != field) {
        throw Error("geometry", "GEO_CONFIG", "plane " + to_string(pl) + " does not fit family " + std::to_string(j));
      }
    }
  }
}

int wedge(std::span<const GrassmannElement> spaces) {
  if (spaces.empty()) throw Error("geometry", "GEO_DIM", "wedge of no subspaces");
  const std::size_t n = spaces.front().n();
  std::size_t total = 0;
  MatrixFp stacked(spaces.front().field(), n);
  for (const auto& v : spaces) {
    if (v.n() != n) throw Error("geometry", "GEO_DIM", "subspaces live in different ambient spaces");
    total += v.k();
    for (const auto& r : v.basis().rows()) stacked.add_row(r);
  }
  if (total != n) throw Error("geometry", "GEO_DIM", "subspace dimensions do not sum to n");
  return rref_rank(stacked).rank == n ? 1 : 0;
}

int delta_kernel(const Point& p, std::span<const AffinePlane> planes) {
  std::vector<GrassmannElement> dirs;
  dirs.reserve(planes.size());
  for (const auto& pl : planes) {
    if (!pl.contains(p)) return 0;
    dirs.push_back(pl.direction());
  }
  return wedge(dirs);
}

std::optional<std::size_t> Multijoints::index_of(const Point& p) const {
  auto it = std::lower_bound(points.begin(), points.end(), p);
  if (it == points.end() || *it != p) return std::nullopt;
  return static_cast<std::size_t>(it - points.begin());
}

Multijoints detect_multijoints(const Configuration& cfg) {
  cfg.validate();
  const std::size_t d = cfg.d();
  std::vector<std::map<Point, std::vector<std::size_t>>> incidence(d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < cfg.families[j].size(); ++i) {
      for (auto& q : cfg.families[j][i].points()) incidence[j][std::move(q)].push_back(i);
    }
  }
  Multijoints out;
  for (const auto& [point, first] : incidence[0]) {
    std::vector<const std::vector<std::size_t>*> lists{&first};
    bool everywhere = true;
    for (std::size_t j = 1; j < d && everywhere; ++j) {
      auto it = incidence[j].find(point);
      if (it == incidence[j].end()) {
        everywhere = false;
      } else {
        lists.push_back(&it->second);
      }
    }
    if (!everywhere) continue;
    std::vector<Witness> found;
    Witness w(d);
    std::vector<GrassmannElement> dirs;
    std::function<void(std::size_t)> walk = [&](std::size_t j) {
      if (j == d) {
        dirs.clear();
        for (std::size_t m = 0; m < d; ++m) dirs.push_back(cfg.families[m][w[m]].direction());
        if (wedge(dirs) == 1) found.push_back(w);
        return;
      }
      for (auto idx : *lists[j]) {
        w[j] = idx;
        walk(j + 1);
      }
    };
    walk(0);
    if (!found.empty()) {
      out.points.push_back(point);
      out.witnesses.push_back(std::move(found));
    }
  }
  return out;
}

std::uint64_t gaussian_binomial(std::uint64_t n, std::uint64_t k, std::uint64_t q) {
  if (k > n) return 0;
  // Product of (q^(n-i) - 1) / (q^(i+1) - 1), kept exact in 128 bits.
  unsigned __int128 num = 1, den = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    unsigned __int128 a = 1, b = 1;
    for (std::uint64_t e = 0; e < n - i; ++e) a *= q;
    for (std::uint64_t e = 0; e < i + 1; ++e) b *= q;
    num *= (a - 1);
    den *= (b - 1);
  }
  return static_cast<std::uint64_t>(num / den);
}

std::vector<GrassmannElement> enumerate_grassmannian(const PrimeField& field, std::size_t n, std::size_t k) {
  if (k < 1 || k > n) throw Error("geometry", "GEO_DIM", "need 1 <= k <= n");
  const std::uint32_t p = field.modulus();
  std::vector<GrassmannElement> out;
  std::vector<std::size_t> pivots(k);
  std::iota(pivots.begin(), pivots.end(), 0);
  while (true) {
    // Free positions: row i, column c > pivots[i] with c not a pivot.
    std::vector<std::pair<std::size_t, std::size_t>> free;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t c = pivots[i] + 1; c < n; ++c) {
        if (std::find(pivots.begin(), pivots.end(), c) == pivots.end()) free.emplace_back(i, c);
      }
    }
    std::vector<std::uint32_t> vals(free.size(), 0);
    while (true) {
      std::vector<RowFp> rows(k, RowFp(n, 0));
      for (std::size_t i = 0; i < k; ++i) rows[i][pivots[i]] = 1;
      for (std::size_t f = 0; f < free.size(); ++f) rows[free[f].first][free[f].second] = vals[f];
      out.push_back(GrassmannElement::from_spanning(field, n, std::move(rows)));
      std::size_t f = 0;
      while (f < vals.size() && ++vals[f] == p) vals[f++] = 0;
      if (f == vals.size()) break;
    }
    // Next pivot combination.
    std::size_t i = k;
    while (i > 0 && pivots[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++pivots[i - 1];
    for (std::size_t m = i; m < k; ++m) pivots[m] = pivots[m - 1] + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<AffinePlane> enumerate_planes(const PrimeField& field, std::size_t n, std::size_t k,
                                          std::uint64_t cap) {
  if (k < 1 || k > n) throw Error("geometry", "GEO_DIM", "need 1 <= k <= n");
  const std::uint64_t p = field.modulus();
  unsigned __int128 count = gaussian_binomial(n, k, p);
  for (std::size_t e = 0; e < n - k; ++e) count *= p;
  if (count > cap) {
    throw Error("geometry", "GEO_CAP",
                "enumeration of " + std::to_string(static_cast<std::uint64_t>(count)) + " planes exceeds cap " +
                    std::to_string(cap));
  }
  std::vector<AffinePlane> out;
  out.reserve(static_cast<std::size_t>(count));
  for (auto& dir : enumerate_grassmannian(field, n, k)) {
    std::vector<std::size_t> free;
    for (std::size_t c = 0; c < n; ++c) {
      if (std::find(dir.pivots().begin(), dir.pivots().end(), c) == dir.pivots().end()) free.push_back(c);
    }
    std::vector<std::uint32_t> vals(free.size(), 0);
    while (true) {
      Point base{std::vector<std::uint32_t>(n, 0)};
      for (std::size_t f = 0; f < free.size(); ++f) base.coords[free[f]] = vals[f];
      out.emplace_back(std::move(base), dir);
      std::size_t f = 0;
      while (f < vals.size() && ++vals[f] == p) vals[f++] = 0;
      if (f == vals.size()) break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<std::size_t>> connected_components(const Multijoints& joints,
                                                           const std::vector<bool>& subset) {
  const std::size_t m = joints.size();
  auto member = [&](std::size_t i) { return subset.empty() || subset.at(i); };
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  // Contributing plane (family, index) -> first member point that saw it.
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
  for (std::size_t i = 0; i < m; ++i) {
    if (!member(i)) continue;
    for (const auto& w : joints.witnesses[i]) {
      for (std::size_t j = 0; j < w.size(); ++j) {
        auto [it, inserted] = seen.emplace(std::make_pair(j, w[j]), i);
        if (!inserted) {
          auto a = find(i), b = find(it->second);
          if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
      }
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < m; ++i) {
    if (member(i)) groups[find(i)].push_back(i);
  }
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

}  // namespace mjf
