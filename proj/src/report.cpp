#include "mjf/report.hpp"

#include <sstream>

namespace mjf {

using json = nlohmann::json;

std::string emit_report(const RunReport& report, ReportFormat format) {
  if (format == ReportFormat::json) return report.doc.dump(2) + "\n";
  std::ostringstream os;
  os << "lambda,family,plane_id,point,tilde_s,s\n";
  for (const auto& r : report.rows) {
    std::string point;
    for (std::size_t i = 0; i < r.point.coords.size(); ++i) point += (i ? " " : "") + std::to_string(r.point.coords[i]);
    os << r.lambda << ',' << r.family << ',' << r.plane_id << ',' << point << ',' << r.tilde_s << ','
       << r.s.to_string() << '\n';
  }
  return os.str();
}

json to_json(const Point& p) { return p.coords; }

json to_json(const Rational& r) { return r.to_string(); }

json to_json(const BigInt& v) { return v.str(); }

json to_json(const AffinePlane& plane) {
  return {{"base", plane.base().coords}, {"directions", plane.direction().basis().rows()}};
}

json to_json(const FactorisationTable& table, const Multijoints& joints) {
  json out = json::array();
  for (std::size_t j = 0; j < table.rows.size(); ++j) {
    for (std::size_t i = 0; i < table.rows[j].size(); ++i) {
      const auto& row = table.rows[j][i];
      if (row.points.empty()) continue;
      json r{{"family", j}, {"plane_id", i}, {"points", json::array()}, {"tilde_s", row.tilde_s}, {"s", json::array()}};
      for (std::size_t a = 0; a < row.points.size(); ++a) {
        r["points"].push_back(to_json(joints.points[row.points[a]]));
        r["s"].push_back(to_json(row.s[a]));
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

json to_json(const VerificationReport& rep) {
  json out{{"c_emp", rep.c_emp ? to_json(*rep.c_emp) : json("inf")},
           {"zero_factor", rep.zero_factor},
           {"row_sums", rep.row_sums},
           {"max_normalised_w", to_json(rep.max_normalised_w)},
           {"w_lower_bound", to_json(rep.w_lower_bound)},
           {"w_bound", rep.w_bound},
           {"slack", to_json(rep.slack)},
           {"gap", to_json(rep.gap)},
           {"ok", rep.ok()}};
  json margins = json::array();
  for (const auto& m : rep.margins) {
    margins.push_back({{"point", m.point}, {"witness", m.witness}, {"ratio", m.ratio ? to_json(*m.ratio) : json("inf")}});
  }
  out["margins"] = std::move(margins);
  if (rep.threshold) {
    out["threshold"] = to_json(*rep.threshold);
    out["threshold_ok"] = rep.threshold_ok;
  }
  return out;
}

json to_json(const CountingResult& c) { return {{"lhs", to_json(c.lhs)}, {"rhs", to_json(c.rhs)}, {"pass", c.pass}}; }

json to_json(const VanishingResult& v) {
  return {{"rank", v.rank}, {"dim", v.dim}, {"functionals", v.functionals}, {"pass", v.pass}};
}

json to_json(const SearchResult& s, const Multijoints& joints) {
  json moves = json::array();
  for (const auto& m : s.moves) {
    moves.push_back({{"kind", to_string(m.kind)},
                     {"points", m.points},
                     {"repeats", m.repeats},
                     {"gap_move", m.gap_move},
                     {"top_preserved", m.top_preserved}});
  }
  json w = json::array();
  for (std::size_t q = 0; q < joints.size(); ++q) w.push_back(to_json(s.profile.normalised[q]));
  return {{"handicap", s.alpha},
          {"status", to_string(s.status)},
          {"gap", to_json(s.gap)},
          {"target", to_json(s.target)},
          {"target_joint", to_json(s.target_joint)},
          {"h", to_json(s.radius.h)},
          {"iterations", s.iterations},
          {"w", std::move(w)},
          {"moves", std::move(moves)}};
}

json to_json(const MultijointInequality& m) {
  json t = json::array(), f = json::array();
  for (const auto& v : m.t_norms) t.push_back(to_json(v));
  for (const auto& v : m.f_norms) f.push_back(to_json(v));
  return {{"link_pointwise", m.link_pointwise},
          {"link_holder", m.link_holder},
          {"link_bounded", m.link_bounded},
          {"t_norms", std::move(t)},
          {"f_norms", std::move(f)},
          {"lhs", m.lhs},
          {"middle", m.middle},
          {"holder", m.holder},
          {"rhs", m.rhs},
          {"pass", m.pass()}};
}

json to_json(const GrassmannFactorisation& g) {
  json rows = json::array();
  for (std::size_t j = 0; j < g.rows.size(); ++j) {
    for (const auto& row : g.rows[j]) {
      if (row.trace.empty()) continue;
      json r{{"family", j}, {"plane", to_json(row.plane)}, {"trace", json::array()}, {"s", json::array()},
             {"row_sum", to_json(row.row_sum)}};
      for (std::size_t a = 0; a < row.trace.size(); ++a) {
        r["trace"].push_back(to_json(row.trace[a]));
        r["s"].push_back(to_json(row.s[a]));
      }
      rows.push_back(std::move(r));
    }
  }
  return {{"mode", g.mode == GrassmannMode::enumerate ? "enumerate" : "representatives"},
          {"rows", std::move(rows)},
          {"trace_classes", g.trace_classes},
          {"rows_checked", g.rows_checked},
          {"row_sums", g.row_sums},
          {"tuples_checked", g.tuples_checked},
          {"c_grass", g.c_grass ? to_json(*g.c_grass) : json("inf")},
          {"c_emp", g.c_emp ? to_json(*g.c_emp) : json("inf")},
          {"domination", g.domination},
          {"restriction", g.restriction},
          {"ok", g.ok()}};
}

void append_rows(std::vector<CsvRow>& rows, const FactorisationTable& table, const Multijoints& joints) {
  for (std::size_t j = 0; j < table.rows.size(); ++j) {
    for (std::size_t i = 0; i < table.rows[j].size(); ++i) {
      const auto& row = table.rows[j][i];
      for (std::size_t a = 0; a < row.points.size(); ++a) {
        rows.push_back({table.lambda, j, i, joints.points[row.points[a]], row.tilde_s[a], row.s[a]});
      }
    }
  }
}

}  // namespace mjf
