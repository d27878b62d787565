#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mjf/config.hpp"
#include "mjf/runner.hpp"

using namespace mjf;

namespace {

const char* kSingle = R"({"p": 3, "n": 3, "families": [
  {"k": 1, "planes": [{"base": [0, 0, 0], "directions": [[1, 0, 0]]}]},
  {"k": 1, "planes": [{"base": [0, 0, 0], "directions": [[0, 1, 0]]}]},
  {"k": 1, "planes": [{"base": [0, 0, 0], "directions": [[0, 0, 1]]}]}],
  "weights": "uniform", "lambda": [2]})";

const char* kTwoJoint = R"({"p": 5, "n": 2, "families": [
  {"k": 1, "planes": [{"base": [0, 0], "directions": [[1, 0]]}]},
  {"k": 1, "planes": [{"base": [0, 0], "directions": [[0, 1]]}, {"base": [1, 0], "directions": [[0, 1]]}]}],
  "weights": [{"point": [0, 0], "sigma": "9/10"}, {"point": [1, 0], "sigma": "1/10"}],
  "lambda": [2, 4], "seed": 7, "caps": {"oracle_box": 3}})";

std::vector<std::string> codes_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    std::vector<std::string> out;
    for (const auto& v : e.violations()) out.push_back(v.code);
    return out;
  }
  return {};
}

bool has(const std::vector<std::string>& v, const std::string& code) {
  return std::find(v.begin(), v.end(), code) != v.end();
}

}  // namespace

TEST_CASE("minimal configuration parses") {
  const auto cfg = parse_config(kSingle);
  CHECK(cfg.p == 3);
  CHECK(cfg.n == 3);
  CHECK(cfg.families.size() == 3);
  CHECK(cfg.uniform);
  CHECK(cfg.lambdas == std::vector<unsigned>{2});
  CHECK(cfg.budget == 10'000);
  CHECK_FALSE(cfg.oracle_box.has_value());
}

TEST_CASE("each violation has its own code") {
  CHECK(codes_of(R"({"p": 4, "n": 1, "families": [{"k": 1, "planes": "all"}], "lambda": [1]})") ==
        std::vector<std::string>{"CFG_PRIME"});
  CHECK(codes_of(R"({"p": 3, "n": 2, "families": [{"k": 1, "planes": "all"}], "lambda": [1]})") ==
        std::vector<std::string>{"CFG_KSUM"});
  CHECK(has(codes_of(R"({"p": 3, "n": 1, "families": [{"k": 1, "planes": "all"}], "lambda": [1],
                         "weights": [{"point": [0], "sigma": "1/0"}]})"),
            "CFG_RAT"));
  CHECK(has(codes_of(R"({"p": 3, "n": 1, "families": [{"k": 1, "planes": "all"}], "lambda": [1],
                         "weights": [{"point": [0], "sigma": "-1/2"}]})"),
            "CFG_NEG"));
  CHECK(has(codes_of(R"({"p": 3, "n": 1, "families": [{"k": 1, "planes": "all"}], "lambda": [1],
                         "weights": [{"point": [0], "sigma": "0/1"}]})"),
            "CFG_ZERO"));
  CHECK(has(codes_of(R"({"p": 3, "n": 1, "families": [{"k": 1, "planes": "all"}], "lambda": [2, 1]})"),
            "CFG_LAMBDA"));
  CHECK(has(codes_of(R"({"p": 3, "n": 2, "families": [
                           {"k": 1, "planes": [{"base": [0, 0], "directions": [[0, 0]]}]},
                           {"k": 1, "planes": "all"}], "lambda": [1]})"),
            "CFG_PLANE"));
  CHECK(has(codes_of(R"({"p": 3, "n": 2, "families": [
                           {"k": 1, "planes": [{"base": [0, 0, 0], "directions": [[1, 0]]}]},
                           {"k": 1, "planes": "all"}], "lambda": [1]})"),
            "CFG_DIM"));
  CHECK(codes_of("{not json") == std::vector<std::string>{"CFG_JSON"});
  CHECK(codes_of("[1, 2]") == std::vector<std::string>{"CFG_SCHEMA"});
  CHECK(has(codes_of(R"({"p": 3, "n": 1, "families": [{"k": 1, "planes": "all"}], "lambda": [1], "colour": 1})"),
            "CFG_SCHEMA"));
}

TEST_CASE("all violations are reported, not just the first") {
  const auto codes = codes_of(R"({"p": 9, "n": 2, "families": [{"k": 1, "planes": "all"}],
                                  "weights": [{"point": [0, 0], "sigma": "x"}]})");
  CHECK(has(codes, "CFG_PRIME"));
  CHECK(has(codes, "CFG_KSUM"));
  CHECK(has(codes, "CFG_RAT"));
  CHECK(has(codes, "CFG_LAMBDA"));
  try {
    parse_config(R"({"p": 9, "n": 2, "families": [{"k": 1, "planes": "all"}], "lambda": [1]})");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.code() == "CFG_PRIME");
    CHECK(e.module() == "cli_harness");
  }
}

TEST_CASE("configuration echo round-trips") {
  for (const char* text : {kSingle, kTwoJoint}) {
    const auto cfg = parse_config(text);
    const auto echo = config_to_json(cfg).dump();
    CHECK(parse_config(echo) == cfg);
    CHECK(config_to_json(parse_config(echo)).dump() == echo);
  }
  const auto all = parse_config(R"({"p": 2, "n": 2, "families": [{"k": 1, "planes": "all"}, {"k": 1, "planes": "all"}],
                                    "lambda": [1, 3], "budget": 5, "caps": {"plane_cap": 100}})");
  CHECK(parse_config(config_to_json(all).dump()) == all);
}

TEST_CASE("coordinates are reduced and weights normalised") {
  const auto cfg = parse_config(R"({"p": 5, "n": 2, "families": [
    {"k": 1, "planes": [{"base": [5, -5], "directions": [[6, 0]]}]},
    {"k": 1, "planes": [{"base": [0, 0], "directions": [[0, 1]]}]}],
    "weights": [{"point": [0, 0], "sigma": "3/2"}], "lambda": [1]})");
  CHECK(cfg.families[0].planes[0].base == std::vector<std::uint32_t>{0, 0});
  CHECK(cfg.families[0].planes[0].directions[0] == std::vector<std::uint32_t>{1, 0});
  const auto config = build_configuration(cfg);
  const auto joints = detect_multijoints(config);
  const auto w = build_weights(cfg, joints);
  REQUIRE(w.sigma.size() == 1);
  CHECK(w.sigma[0] == Rational(1));

  auto stray = cfg;
  stray.weights = {{{1, 1}, Rational(1)}};
  try {
    build_weights(stray, joints);
    FAIL("expected CFG_JOINT");
  } catch (const Error& e) {
    CHECK(e.code() == "CFG_JOINT");
  }
}

TEST_CASE("every command succeeds on the single joint") {
  for (const auto& cmd : kCommands) {
    const auto rep = run_text(cmd, kSingle);
    INFO(cmd);
    CHECK(rep.exit_code == kExitOk);
    CHECK(rep.doc["ok"] == true);
    CHECK(rep.doc["command"] == cmd);
    CHECK(rep.doc["multijoints"]["points"].size() == 1);
  }
  const auto cert = run_text("certify", kSingle);
  CHECK(cert.doc["checks"]["counting"] == true);
  CHECK(cert.doc["checks"]["vanishing"] == true);
  CHECK(run_text("oracle", kSingle).doc["checks"]["oracle_match"] == true);
}

TEST_CASE("empty families give an empty J") {
  const auto rep = run_text("detect", R"({"p": 3, "n": 2, "families": [{"k": 1, "planes": []}, {"k": 1, "planes": []}],
                                          "lambda": [1]})");
  CHECK(rep.exit_code == kExitOk);
  CHECK(rep.doc["multijoints"]["points"].empty());
}

TEST_CASE("errors carry module attribution and exit 1") {
  const auto bad = run_text("sweep", R"({"p": 4, "n": 1, "families": [{"k": 1, "planes": "all"}], "lambda": [1]})");
  CHECK(bad.exit_code == kExitFailure);
  CHECK(bad.doc["ok"] == false);
  CHECK(bad.doc["error"]["code"] == "CFG_PRIME");
  CHECK(bad.doc["error"]["module"] == "cli_harness");
  CHECK(bad.doc["error"]["violations"].size() == 1);

  const auto unknown = run_text("explode", kSingle);
  CHECK(unknown.exit_code == kExitFailure);
  CHECK(unknown.doc["error"]["code"] == "CLI_COMMAND");

  // Two components: the search refuses a disconnected support.
  const auto split = run_text("factorize", R"({"p": 3, "n": 3, "families": [
    {"k": 1, "planes": [{"base": [0, 0, 0], "directions": [[1, 0, 0]]}, {"base": [1, 1, 1], "directions": [[1, 0, 0]]}]},
    {"k": 1, "planes": [{"base": [0, 0, 0], "directions": [[0, 1, 0]]}, {"base": [1, 1, 1], "directions": [[0, 1, 0]]}]},
    {"k": 1, "planes": [{"base": [0, 0, 0], "directions": [[0, 0, 1]]}, {"base": [1, 1, 1], "directions": [[0, 0, 1]]}]}],
    "lambda": [1]})");
  CHECK(split.exit_code == kExitFailure);
  CHECK(split.doc["error"]["code"] == "HS_DISCONNECTED");
  CHECK(split.doc["error"]["module"] == "handicap_search");
}

TEST_CASE("overrides replace the configuration values") {
  RunOptions opt;
  opt.lambda = 3;
  opt.seed = 11;
  opt.budget = 4;
  const auto rep = run_text("factorize", kTwoJoint, opt);
  CHECK(rep.exit_code == kExitOk);
  CHECK(rep.doc["config"]["lambda"] == nlohmann::json::array({3}));
  CHECK(rep.doc["config"]["seed"] == 11);
  CHECK(rep.doc["config"]["budget"] == 4);
  CHECK(rep.doc["stages"][0]["lambda"] == 3);
}

TEST_CASE("rationals serialise as strings") {
  const auto rep = run_text("factorize", kTwoJoint);
  for (const auto& s : rep.doc["multijoints"]["sigma"]) CHECK(s.is_string());
  CHECK(rep.doc["multijoints"]["sigma"][0] == "9/10");
  CHECK(emit_report(rep, ReportFormat::json).find("0.9") == std::string::npos);
}

TEST_CASE("CSV report has the documented header and exact values") {
  const auto rep = run_text("factorize", kTwoJoint);
  const auto csv = emit_report(rep, ReportFormat::csv);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "lambda,family,plane_id,point,tilde_s,s");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind("4,", 0) == 0);
  }
  // Line 0 of family 0 holds both joints; each vertical line holds one.
  CHECK(rows == 4);
  CHECK(rows == rep.rows.size());
}

TEST_CASE("empty report is a valid document") {
  const auto text = emit_report(RunReport{}, ReportFormat::json);
  CHECK(nlohmann::json::parse(text).is_object());
  CHECK(text.back() == '\n');
  CHECK(emit_report(RunReport{}, ReportFormat::csv) == "lambda,family,plane_id,point,tilde_s,s\n");
}

TEST_CASE("reports are byte-identical across runs and thread counts") {
  RunOptions one;
  const auto base = emit_report(run_text("sweep", kTwoJoint, one), ReportFormat::json);
  CHECK(emit_report(run_text("sweep", kTwoJoint, one), ReportFormat::json) == base);
  for (std::size_t t : {2u, 8u}) {
    RunOptions opt;
    opt.threads = t;
    CHECK(emit_report(run_text("sweep", kTwoJoint, opt), ReportFormat::json) == base);
    CHECK(emit_report(run_text("certify", kTwoJoint, opt), ReportFormat::json) ==
          emit_report(run_text("certify", kTwoJoint, one), ReportFormat::json));
  }
}

TEST_CASE("the executable parses flags and reports exit codes") {
  const std::string path = std::string(MJF_TEST_DATA) + "/two_joint.json";
  std::ostringstream out, err;
  const char* ok_argv[] = {"mjf", "factorize", "--config", path.c_str(), "--lambda", "2", "--format", "csv"};
  CHECK(run_cli(8, ok_argv, out, err) == kExitOk);
  CHECK(out.str().rfind("lambda,family,plane_id,point,tilde_s,s\n2,", 0) == 0);

  std::ostringstream out2, err2;
  const char* missing[] = {"mjf", "detect", "--config", "/nonexistent/config.json"};
  CHECK(run_cli(4, missing, out2, err2) == kExitFailure);

  std::ostringstream out3, err3;
  const char* bad_cmd[] = {"mjf", "explode", "--config", path.c_str()};
  CHECK(run_cli(4, bad_cmd, out3, err3) == kExitFailure);

  std::ostringstream out4, err4;
  const std::string bad = std::string(MJF_TEST_DATA) + "/bad_prime.json";
  const char* bad_cfg[] = {"mjf", "detect", "--config", bad.c_str()};
  CHECK(run_cli(4, bad_cfg, out4, err4) == kExitFailure);
  CHECK(err4.str().rfind("CFG_PRIME", 0) == 0);
}
