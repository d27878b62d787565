#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mjf/factorization.hpp"
#include "mjf/geometry.hpp"
#include "mjf/rational.hpp"

namespace mjf {

/// One CSV line: lambda,family,plane_id,point,tilde_s,s
struct CsvRow {
  unsigned lambda;
  std::size_t family;
  std::size_t plane_id;
  Point point;
  std::size_t tilde_s;
  Rational s;
};

struct RunReport {
  nlohmann::json doc = nlohmann::json::object();
  std::vector<CsvRow> rows;
  int exit_code = 0;
};

enum class ReportFormat { json, csv };

/// JSON: sorted keys, two-space indent, trailing newline. CSV: header plus rows.
std::string emit_report(const RunReport& report, ReportFormat format);

nlohmann::json to_json(const Point& p);
nlohmann::json to_json(const Rational& r);
nlohmann::json to_json(const BigInt& v);
nlohmann::json to_json(const AffinePlane& plane);
nlohmann::json to_json(const FactorisationTable& table, const Multijoints& joints);
nlohmann::json to_json(const VerificationReport& rep);
nlohmann::json to_json(const CountingResult& c);
nlohmann::json to_json(const VanishingResult& v);
nlohmann::json to_json(const SearchResult& s, const Multijoints& joints);
nlohmann::json to_json(const MultijointInequality& m);
nlohmann::json to_json(const GrassmannFactorisation& g);

void append_rows(std::vector<CsvRow>& rows, const FactorisationTable& table, const Multijoints& joints);

}  // namespace mjf
