#include "mjf/config.hpp"

#include <set>

namespace mjf {

namespace {

std::string summarise(const std::vector<ConfigViolation>& v) {
  std::string out = std::to_string(v.size()) + " configuration violation(s)";
  for (const auto& x : v) out += "\n  " + x.code + ": " + x.message;
  return out;
}

class Collector {
 public:
  void add(std::string code, std::string message) { items_.push_back({std::move(code), std::move(message)}); }
  bool empty() const { return items_.empty(); }
  std::vector<ConfigViolation>& items() { return items_; }

 private:
  std::vector<ConfigViolation> items_;
};

using json = nlohmann::json;

std::optional<std::int64_t> as_int(const json& v) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  return std::nullopt;
}

// Coordinates may be any integers; they are reduced mod p.
std::optional<std::vector<std::uint32_t>> read_vector(const json& v, std::size_t n, std::uint64_t p,
                                                      const std::string& where, Collector& errs) {
  if (!v.is_array()) {
    errs.add("CFG_SCHEMA", where + " must be an array of integers");
    return std::nullopt;
  }
  if (v.size() != n) {
    errs.add("CFG_DIM", where + " has " + std::to_string(v.size()) + " coordinates, expected " + std::to_string(n));
    return std::nullopt;
  }
  std::vector<std::uint32_t> out;
  for (const auto& x : v) {
    auto i = as_int(x);
    if (!i) {
      errs.add("CFG_SCHEMA", where + " must contain integers");
      return std::nullopt;
    }
    if (p >= 2) {
      auto m = static_cast<std::int64_t>(p);
      out.push_back(static_cast<std::uint32_t>(((*i % m) + m) % m));
    } else {
      out.push_back(0);
    }
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigViolation> violations)
    : Error("cli_harness", violations.empty() ? "CFG_SCHEMA" : violations.front().code, summarise(violations)),
      violations_(std::move(violations)) {}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::vector<ConfigViolation>{{"CFG_JSON", e.what()}});
  }
  if (!doc.is_object()) throw ConfigError(std::vector<ConfigViolation>{{"CFG_SCHEMA", "configuration must be a JSON object"}});

  Collector errs;
  RunConfig cfg;
  static const std::set<std::string> known{"p", "n", "families", "weights", "lambda", "budget", "seed", "caps"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) errs.add("CFG_SCHEMA", "unknown key \"" + key + "\"");
  }

  bool field_ok = false;
  if (auto p = doc.contains("p") ? as_int(doc["p"]) : std::nullopt; !p) {
    errs.add("CFG_SCHEMA", "\"p\" must be an integer");
  } else if (*p < 2 || *p >= (std::int64_t{1} << 31) || !is_prime(static_cast<std::uint64_t>(*p))) {
    errs.add("CFG_PRIME", "p = " + std::to_string(*p) + " is not a prime below 2^31");
  } else {
    cfg.p = static_cast<std::uint64_t>(*p);
    field_ok = true;
  }

  bool n_ok = false;
  if (auto n = doc.contains("n") ? as_int(doc["n"]) : std::nullopt; !n) {
    errs.add("CFG_SCHEMA", "\"n\" must be an integer");
  } else if (*n < 1 || *n > 16) {
    errs.add("CFG_DIM", "n = " + std::to_string(*n) + " outside 1..16");
  } else {
    cfg.n = static_cast<std::size_t>(*n);
    n_ok = true;
  }

  if (!doc.contains("families") || !doc["families"].is_array()) {
    errs.add("CFG_SCHEMA", "\"families\" must be an array");
  } else {
    std::size_t ksum = 0;
    bool k_ok = true;
    const auto& fams = doc["families"];
    for (std::size_t j = 0; j < fams.size(); ++j) {
      const std::string where = "families[" + std::to_string(j) + "]";
      const auto& f = fams[j];
      if (!f.is_object()) {
        errs.add("CFG_SCHEMA", where + " must be an object");
        k_ok = false;
        continue;
      }
      for (const auto& [key, value] : f.items()) {
        if (key != "k" && key != "planes") errs.add("CFG_SCHEMA", where + ": unknown key \"" + key + "\"");
      }
      FamilySpec spec;
      auto k = f.contains("k") ? as_int(f["k"]) : std::nullopt;
      if (!k || *k < 1) {
        errs.add("CFG_SCHEMA", where + ".k must be a positive integer");
        k_ok = false;
        continue;
      }
      spec.k = static_cast<std::size_t>(*k);
      ksum += spec.k;
      if (n_ok && spec.k > cfg.n) errs.add("CFG_DIM", where + ".k exceeds n");
      if (!f.contains("planes")) {
        errs.add("CFG_SCHEMA", where + ".planes is required");
      } else if (f["planes"].is_string()) {
        if (f["planes"] != "all") errs.add("CFG_SCHEMA", where + ".planes must be \"all\" or an array");
        spec.all = true;
      } else if (!f["planes"].is_array()) {
        errs.add("CFG_SCHEMA", where + ".planes must be \"all\" or an array");
      } else if (n_ok && field_ok) {
        const PrimeField field(cfg.p);
        for (std::size_t i = 0; i < f["planes"].size(); ++i) {
          const std::string pw = where + ".planes[" + std::to_string(i) + "]";
          const auto& pl = f["planes"][i];
          if (!pl.is_object() || !pl.contains("base") || !pl.contains("directions") || !pl["directions"].is_array()) {
            errs.add("CFG_SCHEMA", pw + " needs \"base\" and an array \"directions\"");
            continue;
          }
          PlaneSpec ps;
          auto base = read_vector(pl["base"], cfg.n, cfg.p, pw + ".base", errs);
          bool ok = base.has_value();
          if (base) ps.base = *base;
          for (std::size_t a = 0; a < pl["directions"].size(); ++a) {
            auto dir = read_vector(pl["directions"][a], cfg.n, cfg.p, pw + ".directions[" + std::to_string(a) + "]", errs);
            if (dir) ps.directions.push_back(*dir); else ok = false;
          }
          if (!ok) continue;
          if (ps.directions.size() != spec.k) {
            errs.add("CFG_PLANE", pw + " has " + std::to_string(ps.directions.size()) + " directions, expected k = " +
                                      std::to_string(spec.k));
            continue;
          }
          try {
            canonicalize_plane(field, Point{ps.base}, ps.directions);
          } catch (const Error&) {
            errs.add("CFG_PLANE", pw + " has linearly dependent directions");
            continue;
          }
          spec.planes.push_back(std::move(ps));
        }
      }
      cfg.families.push_back(std::move(spec));
    }
    if (k_ok && n_ok && ksum != cfg.n) {
      errs.add("CFG_KSUM", "family dimensions sum to " + std::to_string(ksum) + ", expected n = " + std::to_string(cfg.n));
    }
  }

  if (!doc.contains("weights") || doc["weights"] == "uniform") {
    cfg.uniform = true;
  } else if (!doc["weights"].is_array()) {
    errs.add("CFG_SCHEMA", "\"weights\" must be \"uniform\" or an array");
  } else {
    cfg.uniform = false;
    bool any_positive = false;
    std::set<std::vector<std::uint32_t>> seen;
    const auto& ws = doc["weights"];
    for (std::size_t i = 0; i < ws.size(); ++i) {
      const std::string where = "weights[" + std::to_string(i) + "]";
      const auto& w = ws[i];
      if (!w.is_object() || !w.contains("point") || !w.contains("sigma")) {
        errs.add("CFG_SCHEMA", where + " needs \"point\" and \"sigma\"");
        continue;
      }
      WeightEntry e;
      bool ok = true;
      if (n_ok && field_ok) {
        auto pt = read_vector(w["point"], cfg.n, cfg.p, where + ".point", errs);
        if (pt) e.point = *pt; else ok = false;
      }
      if (!w["sigma"].is_string()) {
        errs.add("CFG_RAT", where + ".sigma must be a \"num/den\" string");
        ok = false;
      } else {
        try {
          e.sigma = Rational::from_string(w["sigma"].get<std::string>());
          if (e.sigma.sign() < 0) {
            errs.add("CFG_NEG", where + ".sigma is negative");
            ok = false;
          }
        } catch (const Error& ex) {
          errs.add("CFG_RAT", where + ".sigma: " + ex.what());
          ok = false;
        }
      }
      if (!ok) continue;
      if (!seen.insert(e.point).second) {
        errs.add("CFG_SCHEMA", where + " repeats a point");
        continue;
      }
      if (e.sigma.sign() > 0) any_positive = true;
      cfg.weights.push_back(std::move(e));
    }
    if (!any_positive && errs.empty()) errs.add("CFG_ZERO", "weights are all zero");
  }

  if (!doc.contains("lambda")) {
    errs.add("CFG_LAMBDA", "\"lambda\" is required");
  } else {
    json list = doc["lambda"].is_array() ? doc["lambda"] : json::array({doc["lambda"]});
    for (const auto& v : list) {
      auto l = as_int(v);
      if (!l || *l < 0 || *l > 4096) {
        errs.add("CFG_LAMBDA", "lambda entries must be integers in 0..4096");
        cfg.lambdas.clear();
        break;
      }
      cfg.lambdas.push_back(static_cast<unsigned>(*l));
    }
    if (cfg.lambdas.empty() && !list.empty()) {
      // already reported
    } else if (cfg.lambdas.empty()) {
      errs.add("CFG_LAMBDA", "lambda list is empty");
    } else {
      for (std::size_t i = 1; i < cfg.lambdas.size(); ++i) {
        if (cfg.lambdas[i] <= cfg.lambdas[i - 1]) {
          errs.add("CFG_LAMBDA", "lambda list must be strictly ascending");
          break;
        }
      }
    }
  }

  if (doc.contains("budget")) {
    auto b = as_int(doc["budget"]);
    if (!b || *b < 0) errs.add("CFG_SCHEMA", "\"budget\" must be a non-negative integer");
    else cfg.budget = static_cast<std::size_t>(*b);
  }
  if (doc.contains("seed")) {
    if (doc["seed"].is_number_unsigned()) cfg.seed = doc["seed"].get<std::uint64_t>();
    else if (auto s = as_int(doc["seed"]); s && *s >= 0) cfg.seed = static_cast<std::uint64_t>(*s);
    else errs.add("CFG_SCHEMA", "\"seed\" must be a non-negative integer");
  }
  if (doc.contains("caps")) {
    const auto& caps = doc["caps"];
    if (!caps.is_object()) {
      errs.add("CFG_SCHEMA", "\"caps\" must be an object");
    } else {
      for (const auto& [key, value] : caps.items()) {
        if (key == "plane_cap") {
          auto c = as_int(value);
          if (!c || *c < 1) errs.add("CFG_SCHEMA", "caps.plane_cap must be a positive integer");
          else cfg.plane_cap = static_cast<std::uint64_t>(*c);
        } else if (key == "oracle_box") {
          auto c = as_int(value);
          if (!c || *c < 0) errs.add("CFG_SCHEMA", "caps.oracle_box must be a non-negative integer");
          else cfg.oracle_box = *c;
        } else {
          errs.add("CFG_SCHEMA", "caps: unknown key \"" + key + "\"");
        }
      }
    }
  }

  if (!errs.empty()) throw ConfigError(std::move(errs.items()));
  return cfg;
}

nlohmann::json config_to_json(const RunConfig& cfg) {
  json doc;
  doc["p"] = cfg.p;
  doc["n"] = cfg.n;
  doc["families"] = json::array();
  for (const auto& f : cfg.families) {
    json fam;
    fam["k"] = f.k;
    if (f.all) {
      fam["planes"] = "all";
    } else {
      fam["planes"] = json::array();
      for (const auto& pl : f.planes) fam["planes"].push_back({{"base", pl.base}, {"directions", pl.directions}});
    }
    doc["families"].push_back(std::move(fam));
  }
  if (cfg.uniform) {
    doc["weights"] = "uniform";
  } else {
    doc["weights"] = json::array();
    for (const auto& w : cfg.weights) doc["weights"].push_back({{"point", w.point}, {"sigma", w.sigma.to_string()}});
  }
  doc["lambda"] = cfg.lambdas;
  doc["budget"] = cfg.budget;
  doc["seed"] = cfg.seed;
  doc["caps"] = {{"plane_cap", cfg.plane_cap}};
  if (cfg.oracle_box) doc["caps"]["oracle_box"] = *cfg.oracle_box;
  return doc;
}

Configuration build_configuration(const RunConfig& rc) {
  const PrimeField field(rc.p);
  Configuration cfg{field, rc.n, {}, {}};
  for (const auto& f : rc.families) {
    cfg.k_list.push_back(f.k);
    if (f.all) {
      cfg.families.push_back(enumerate_planes(field, rc.n, f.k, rc.plane_cap));
      continue;
    }
    std::vector<AffinePlane> planes;
    for (const auto& pl : f.planes) planes.push_back(canonicalize_plane(field, Point{pl.base}, pl.directions));
    cfg.families.push_back(std::move(planes));
  }
  cfg.validate();
  return cfg;
}

WeightFunction build_weights(const RunConfig& cfg, const Multijoints& joints) {
  if (cfg.uniform) return WeightFunction::uniform(joints.size());
  std::vector<Rational> raw(joints.size());
  std::vector<ConfigViolation> missing;
  for (const auto& w : cfg.weights) {
    auto idx = joints.index_of(Point{w.point});
    if (!idx) {
      missing.push_back({"CFG_JOINT", "weight point " + to_string(Point{w.point}) + " is not a multijoint"});
      continue;
    }
    raw[*idx] = w.sigma;
  }
  if (!missing.empty()) throw ConfigError(std::move(missing));
  return WeightFunction::normalised(std::move(raw));
}

}  // namespace mjf
