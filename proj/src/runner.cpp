#include "mjf/runner.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "mjf/factorization.hpp"
#include "mjf/handicap_search.hpp"
#include "mjf/instances.hpp"

namespace mjf {

using json = nlohmann::json;

namespace {

struct Context {
  RunConfig cfg;
  Configuration config;
  Multijoints joints;
  WeightFunction weights;
  std::vector<unsigned> lambdas;
  TaskPool pool;
  Rng rng;
  std::size_t draws;
};

class Checks {
 public:
  void add(const std::string& name, bool ok) {
    auto [it, inserted] = values_.emplace(name, ok);
    if (!inserted) it->second = it->second && ok;
  }
  bool all() const {
    for (const auto& [name, ok] : values_) {
      if (!ok) return false;
    }
    return true;
  }
  json to_json() const { return values_; }

 private:
  std::map<std::string, bool> values_;
};

json joints_json(const Context& ctx) {
  json points = json::array();
  for (const auto& p : ctx.joints.points) points.push_back(to_json(p));
  json sigma = json::array();
  for (const auto& s : ctx.weights.sigma) sigma.push_back(to_json(s));
  return {{"points", std::move(points)},
          {"components", connected_components(ctx.joints)},
          {"sigma", std::move(sigma)},
          {"witnesses", ctx.joints.witnesses}};
}

std::vector<std::int64_t> random_handicap(Rng& rng, std::size_t size, unsigned lambda) {
  const auto r = static_cast<std::int64_t>(lambda) + 2;
  std::vector<std::int64_t> alpha(size);
  for (auto& a : alpha) a = rng.between(-r, r);
  return alpha;
}

TupleChoice random_choice(Rng& rng, const Multijoints& joints) {
  TupleChoice c(joints.size());
  for (std::size_t q = 0; q < c.size(); ++q) c[q] = rng.below(joints.witnesses[q].size());
  return c;
}

struct Staged {
  HandicapProblem problem;
  SearchResult search;
  FactorisationTable table;
};

Staged stage_at(const Context& ctx, unsigned lambda) {
  HandicapProblem problem(ctx.config, ctx.joints, ctx.weights, lambda, ctx.pool);
  SearchOptions so;
  so.budget = ctx.cfg.budget;
  auto search = search_good_handicap(problem, so);
  auto table = build_s(problem, search.alpha, search.gap);
  return {std::move(problem), std::move(search), std::move(table)};
}

void search_checks(Checks& checks, const Staged& st) {
  checks.add("admissible", st.problem.in_admissible_set(st.search.alpha));
  checks.add("row_sums", st.table.rows_sum_to_one());
  checks.add("gap_within_target", st.search.status != SearchStatus::stuck);
}

bool run_factorize(const std::string& command, Context& ctx, RunReport& rep, Checks& checks) {
  const unsigned lambda = ctx.lambdas.back();
  auto st = stage_at(ctx, lambda);
  json stage{{"lambda", lambda}, {"search", to_json(st.search, ctx.joints)}, {"table", to_json(st.table, ctx.joints)}};
  append_rows(rep.rows, st.table, ctx.joints);
  search_checks(checks, st);
  if (command == "verify") {
    auto ver = verify_factorisation(st.problem, st.table);
    stage["verification"] = to_json(ver);
    checks.add("no_zero_factor", !ver.zero_factor);
    checks.add("w_lower_bound", ver.w_bound);
    json chain = json::array();
    auto run_chain = [&](const std::vector<std::vector<Rational>>& f) {
      auto m = verify_multijoint_inequality(st.problem, st.table, ver, f);
      checks.add("inequality_pointwise", m.link_pointwise);
      checks.add("inequality_holder", m.link_holder);
      checks.add("inequality_bounded", m.link_bounded);
      chain.push_back(to_json(m));
    };
    std::vector<std::vector<Rational>> ones;
    for (const auto& fam : ctx.config.families) ones.emplace_back(fam.size(), Rational(1));
    run_chain(ones);
    for (std::size_t draw = 0; draw < ctx.draws; ++draw) {
      std::vector<std::vector<Rational>> f;
      for (const auto& fam : ctx.config.families) {
        std::vector<Rational> v(fam.size());
        for (auto& x : v) x = Rational(ctx.rng.between(0, 5));
        f.push_back(std::move(v));
      }
      run_chain(f);
    }
    stage["inequality"] = std::move(chain);
  }
  rep.doc["stages"] = json::array({std::move(stage)});
  return st.search.status == SearchStatus::budget_exhausted;
}

bool run_sweep(Context& ctx, RunReport& rep, Checks& checks) {
  SweepOptions so;
  so.search.budget = ctx.cfg.budget;
  auto sweep = lambda_sweep(ctx.config, ctx.joints, ctx.weights, ctx.lambdas, so, ctx.pool);
  json stages = json::array();
  json gaps = json::array(), c_emp = json::array();
  bool budget = false;
  for (const auto& st : sweep.stages) {
    stages.push_back({{"lambda", st.lambda},
                      {"search", to_json(st.search, ctx.joints)},
                      {"table", to_json(st.table, ctx.joints)},
                      {"verification", to_json(st.verification)},
                      {"counting", to_json(st.counting)}});
    append_rows(rep.rows, st.table, ctx.joints);
    gaps.push_back(to_json(st.search.gap));
    c_emp.push_back(st.verification.c_emp ? to_json(*st.verification.c_emp) : json("inf"));
    checks.add("gap_within_target", st.search.status != SearchStatus::stuck);
    checks.add("row_sums", st.verification.row_sums);
    checks.add("no_zero_factor", !st.verification.zero_factor);
    checks.add("w_lower_bound", st.verification.w_bound);
    checks.add("counting", st.counting.pass);
    budget = budget || st.search.status == SearchStatus::budget_exhausted;
  }
  rep.doc["stages"] = std::move(stages);
  rep.doc["series"] = {{"gap", std::move(gaps)},
                       {"c_emp", std::move(c_emp)},
                       {"gaps_non_increasing", sweep.gaps_non_increasing},
                       {"s_last_difference", sweep.last_difference ? to_json(*sweep.last_difference) : json(nullptr)}};
  return budget;
}

bool run_certify(Context& ctx, RunReport& rep, Checks& checks) {
  json stages = json::array();
  bool budget = false;
  for (auto lambda : ctx.lambdas) {
    auto st = stage_at(ctx, lambda);
    search_checks(checks, st);
    budget = budget || st.search.status == SearchStatus::budget_exhausted;
    append_rows(rep.rows, st.table, ctx.joints);
    auto c4 = counting_certificate(st.problem, st.search.alpha);
    auto van = vanishing_certificate(st.problem, st.search.alpha);
    checks.add("counting", c4.pass);
    checks.add("vanishing", van.pass);
    json draws = json::array();
    for (std::size_t draw = 0; draw < ctx.draws; ++draw) {
      auto alpha = random_handicap(ctx.rng, ctx.joints.size(), lambda);
      auto choice = random_choice(ctx.rng, ctx.joints);
      auto c = counting_certificate(st.problem, alpha, choice);
      auto v = vanishing_certificate(st.problem, alpha, choice);
      checks.add("counting", c.pass);
      checks.add("vanishing", v.pass);
      draws.push_back({{"handicap", alpha}, {"choice", choice}, {"counting", to_json(c)}, {"vanishing", to_json(v)}});
    }
    stages.push_back({{"lambda", lambda},
                      {"search", to_json(st.search, ctx.joints)},
                      {"counting", to_json(c4)},
                      {"vanishing", to_json(van)},
                      {"draws", std::move(draws)}});
  }
  rep.doc["stages"] = std::move(stages);
  return budget;
}

bool run_oracle(Context& ctx, RunReport& rep, Checks& checks) {
  json stages = json::array();
  bool budget = false;
  for (auto lambda : ctx.lambdas) {
    HandicapProblem problem(ctx.config, ctx.joints, ctx.weights, lambda, ctx.pool);
    SearchOptions so;
    so.budget = ctx.cfg.budget;
    auto search = search_good_handicap(problem, so);
    const auto box = ctx.cfg.oracle_box.value_or(default_oracle_box(problem));
    auto oracle = brute_force_handicap_oracle(problem, box);
    const bool match = search.profile.sorted == oracle.profile.sorted;
    checks.add("oracle_match", match);
    budget = budget || search.status == SearchStatus::budget_exhausted;
    json sorted_s = json::array(), sorted_o = json::array();
    for (const auto& v : search.profile.sorted) sorted_s.push_back(to_json(v));
    for (const auto& v : oracle.profile.sorted) sorted_o.push_back(to_json(v));
    stages.push_back({{"lambda", lambda},
                      {"box", box},
                      {"search", to_json(search, ctx.joints)},
                      {"search_profile", std::move(sorted_s)},
                      {"oracle_handicap", oracle.alpha},
                      {"oracle_profile", std::move(sorted_o)},
                      {"evaluated", oracle.evaluated},
                      {"match", match}});
  }
  rep.doc["stages"] = std::move(stages);
  return budget;
}

bool run_grassmann(Context& ctx, RunReport& rep, Checks& checks) {
  const unsigned lambda = ctx.lambdas.back();
  auto st = stage_at(ctx, lambda);
  search_checks(checks, st);
  append_rows(rep.rows, st.table, ctx.joints);
  auto ver = verify_factorisation(st.problem, st.table);
  auto g = extend_to_grassmannian(st.problem, st.table, ver, GrassmannMode::enumerate,
                                  ctx.cfg.plane_cap);
  checks.add("grassmann_row_sums", g.row_sums);
  checks.add("grassmann_domination", g.domination);
  checks.add("grassmann_restriction", g.restriction);
  rep.doc["stages"] = json::array({{{"lambda", lambda},
                                    {"search", to_json(st.search, ctx.joints)},
                                    {"verification", to_json(ver)},
                                    {"grassmann", to_json(g)}}});
  return st.search.status == SearchStatus::budget_exhausted;
}

RunReport error_report(const std::string& command, const Error& e) {
  RunReport rep;
  json err{{"module", e.module()}, {"code", e.code()}, {"message", e.what()}};
  if (auto* ce = dynamic_cast<const ConfigError*>(&e)) {
    json list = json::array();
    for (const auto& v : ce->violations()) list.push_back({{"code", v.code}, {"message", v.message}});
    err["violations"] = std::move(list);
  }
  rep.doc = {{"command", command}, {"error", std::move(err)}, {"ok", false}};
  rep.exit_code = kExitFailure;
  return rep;
}

}  // namespace

RunReport run_command(const std::string& command, const RunConfig& input, const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  try {
    if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
      throw Error("cli_harness", "CLI_COMMAND", "unknown command \"" + command + "\"");
    }
    RunConfig cfg = input;
    if (options.lambda) cfg.lambdas = {*options.lambda};
    if (options.budget) cfg.budget = *options.budget;
    if (options.seed) cfg.seed = *options.seed;
    if (options.oracle_box) cfg.oracle_box = *options.oracle_box;
    if (options.plane_cap) cfg.plane_cap = *options.plane_cap;

    auto config = build_configuration(cfg);
    auto joints = detect_multijoints(config);
    auto weights = build_weights(cfg, joints);
    Context ctx{cfg, std::move(config), std::move(joints), std::move(weights), cfg.lambdas,
                TaskPool(options.threads), Rng(cfg.seed), options.draws};

    RunReport rep;
    rep.doc["command"] = command;
    rep.doc["config"] = config_to_json(cfg);
    rep.doc["multijoints"] = joints_json(ctx);
    Checks checks;
    bool budget = false;
    if (command == "factorize" || command == "verify") {
      budget = run_factorize(command, ctx, rep, checks);
    } else if (command == "sweep") {
      budget = run_sweep(ctx, rep, checks);
    } else if (command == "certify") {
      budget = run_certify(ctx, rep, checks);
    } else if (command == "oracle") {
      budget = run_oracle(ctx, rep, checks);
    } else if (command == "grassmann") {
      budget = run_grassmann(ctx, rep, checks);
    }
    rep.doc["checks"] = checks.to_json();
    rep.doc["budget_exhausted"] = budget;
    rep.doc["ok"] = checks.all() && !budget;
    rep.exit_code = budget ? kExitBudget : checks.all() ? kExitOk : kExitFailure;
    if (options.timing) {
      rep.doc["timing_ms"] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    }
    return rep;
  } catch (const Error& e) {
    return error_report(command, e);
  }
}

RunReport run_text(const std::string& command, std::string_view config_text, const RunOptions& options) {
  try {
    return run_command(command, parse_config(config_text), options);
  } catch (const Error& e) {
    return error_report(command, e);
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Handicap-ordered vanishing tableaux and multijoint factorisations over F_p"};
  std::string command, config_path, format = "json";
  RunOptions options;
  unsigned lambda = 0;
  std::size_t budget = 0;
  std::uint64_t seed = 0, plane_cap = 0;
  std::int64_t oracle_box = 0;
  app.add_option("command", command, "detect | factorize | verify | sweep | certify | oracle | grassmann")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--config", config_path, "configuration JSON file")->required();
  auto* lambda_opt = app.add_option("--lambda", lambda, "use this single lambda instead of the config list");
  auto* budget_opt = app.add_option("--budget", budget, "accepted search moves before giving up");
  auto* seed_opt = app.add_option("--seed", seed, "seed for the random draws");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  auto* box_opt = app.add_option("--oracle-box", oracle_box, "half-width of the brute-force handicap box")
                      ->check(CLI::NonNegativeNumber);
  auto* cap_opt = app.add_option("--plane-cap", plane_cap, "maximum number of enumerated planes")
                      ->check(CLI::PositiveNumber);
  app.add_option("--threads", options.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--draws", options.draws, "random draws per certificate");
  app.add_flag("--timing", options.timing, "include wall-clock timing in the report");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitFailure;
  }
  if (*lambda_opt) options.lambda = lambda;
  if (*budget_opt) options.budget = budget;
  if (*seed_opt) options.seed = seed;
  if (*box_opt) options.oracle_box = oracle_box;
  if (*cap_opt) options.plane_cap = plane_cap;

  std::ifstream in(config_path);
  if (!in) {
    err << "cannot read " << config_path << "\n";
    return kExitFailure;
  }
  std::stringstream text;
  text << in.rdbuf();
  auto rep = run_text(command, text.str(), options);
  if (rep.doc.contains("error")) {
    err << rep.doc["error"]["code"].get<std::string>() << ": " << rep.doc["error"]["message"].get<std::string>() << "\n";
  }
  out << emit_report(rep, format == "csv" ? ReportFormat::csv : ReportFormat::json);
  return rep.exit_code;
}

}  // namespace mjf
