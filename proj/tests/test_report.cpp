#include <doctest.h>

#include <sstream>

#include "families.hpp"
#include "opid/errors.hpp"
#include "opid/report.hpp"

using namespace opid;
using nlohmann::json;

namespace {
json linear_config() {
  return json::parse(R"({
    "function": {"family": "linear", "coefficients": [[[1]]]},
    "l": 1, "N_list": [16, 32]
  })");
}
}  // namespace

TEST_CASE("csv quoting follows RFC 4180") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  std::ostringstream os;
  write_csv(os, Table{{"variant", "N"}, {{"selfadjoint:S1", "8"}, {"x,y", "16"}}});
  CHECK(os.str() == "variant,N\r\nselfadjoint:S1,8\r\n\"x,y\",16\r\n");
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(linear_config());
  CHECK(cfg.l == 1.0);
  CHECK(cfg.variant == Variant::selfadjoint);
  CHECK(cfg.N_list == std::vector<int>{16, 32});
  CHECK(cfg.function.length == 1.0);
  CHECK(cfg.tolerances.order_threshold == 1.5);
  CHECK(cfg.format == OutputFormat::json);

  auto doc = linear_config();
  doc["function"]["coefficients"] = json::parse(R"([[[[0.5, -0.25]]]])");
  CHECK(parse_config(doc).function.coefficients[0](0, 0) == cplx(0.5, -0.25));

  doc = linear_config();
  doc["tolerances"] = {{"order_threshold", 1.2}};
  doc["output"] = {{"path", "x.csv"}, {"format", "csv"}};
  const auto t = parse_config(doc);
  CHECK(t.tolerances.order_threshold == 1.2);
  CHECK(t.format == OutputFormat::csv);
  CHECK(*t.output_path == "x.csv");
}

TEST_CASE("invalid configs") {
  auto bad = [](const std::string& patch) {
    auto doc = linear_config();
    doc.merge_patch(json::parse(patch));
    return doc;
  };
  CHECK_THROWS_AS(parse_config(bad(R"({"function": {"m2": 0}})")), InvalidSpec);
  CHECK_THROWS_AS(parse_config(bad(R"({"resolution": 3})")), InvalidSpec);
  CHECK_THROWS_AS(parse_config(bad(R"({"function": {"colour": "red"}})")), InvalidSpec);
  CHECK_THROWS_AS(parse_config(bad(R"({"tolerances": {"nope": 1}})")), InvalidSpec);
  CHECK_THROWS_AS(parse_config(bad(R"({"N_list": [32, 16]})")), InvalidSpec);
  CHECK_THROWS_AS(parse_config(bad(R"({"l": -1})")), InvalidSpec);
  CHECK_THROWS_AS(parse_config(bad(R"({"variant": "hermitian"})")), InvalidSpec);
  CHECK_THROWS_AS(parse_config(bad(R"({"epsilons": [0]})")), InvalidSpec);
  CHECK_THROWS_AS(parse_config(bad(R"({"function": {"family": "spline"}})")), InvalidSpec);
  CHECK_THROWS_AS(parse_config(bad(R"({"output": {"format": "xml"}})")), InvalidSpec);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), InvalidSpec);
}

TEST_CASE("commands produce verdicts") {
  const auto cfg = parse_config(linear_config());
  const auto id = run_command("verify-identity", cfg);
  CHECK(id.verdict.status == VerdictStatus::pass);
  CHECK(id.table.header == std::vector<std::string>{"variant", "N", "residual", "order"});
  CHECK(id.table.rows.size() == 2);

  const auto comp = run_command("components", cfg);
  CHECK(comp.table.rows.size() == 8);
  CHECK(comp.table.rows[0][0] == "S1");

  auto c12 = linear_config();
  c12["function"] = json::parse(R"({"family": "constant", "coefficients": [[[1.2]]]})");
  const auto skip = run_command("positivity", parse_config(c12));
  CHECK(skip.verdict.status == VerdictStatus::skip);
  CHECK(skip.verdict.exit_code() == 0);
  CHECK(skip.verdict.reason.find("hypothesis unmet") != std::string::npos);

  const auto pre = run_command("factorize", parse_config(c12));
  CHECK(pre.verdict.status == VerdictStatus::fail);
  CHECK(pre.verdict.exit_code() == 1);
  CHECK_FALSE(pre.verdict.reason.empty());

  CHECK_THROWS_AS(run_command("bogus", cfg), InvalidSpec);
}

TEST_CASE("json report carries verdict, table and timestamp") {
  const auto result = run_command("converge", parse_config(linear_config()));
  const auto doc = to_json(result, "2026-01-01T00:00:00Z");
  CHECK(doc["command"] == "converge");
  CHECK(doc["status"] == "pass");
  CHECK(doc["timestamp"] == "2026-01-01T00:00:00Z");
  CHECK(doc["table"].size() == 2);
  CHECK(doc["checks"][0]["pass"] == true);
  // reruns are identical apart from the timestamp
  const auto again = to_json(run_command("converge", parse_config(linear_config())), "2026-01-01T00:00:00Z");
  CHECK(doc.dump() == again.dump());
}

TEST_CASE("number formatting round-trips") {
  const double v = 0.1 + 0.2;
  CHECK(std::stod(format_double(v)) == v);
}
