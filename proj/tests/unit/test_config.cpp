#include <cmath>
#include <limits>

#include "doctest.h"
#include "json.hpp"
#include "tow/config.hpp"
#include "tow/report.hpp"

using namespace tow;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InvalidArgument;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal config parses with defaults") {
  const RunConfig c = parse_config("p = 1.5\neps = 0.1\ndomain.shape = ball\ndomain.radius = 1.0");
  CHECK(c.real("p") == 1.5);
  CHECK(c.real("eps") == 0.1);
  CHECK(c.text("domain.shape") == "ball");
  CHECK(c.integer("dim") == 2);
  CHECK(c.integer("schema") == RunConfig::kSchema);
  CHECK(c.is_explicit("p"));
  CHECK_FALSE(c.is_explicit("dim"));
  CHECK(c.values().size() == config_keys().size());
}

TEST_CASE("parse errors name their cause") {
  CHECK(kind_of([] { parse_config("p = 0.5"); }) == ErrorKind::RangeError);
  CHECK(message_of([] { parse_config("p = 0.5"); }).find("p = 0.5") != std::string::npos);
  CHECK(kind_of([] { parse_config("unknown = 3"); }) == ErrorKind::UnknownKey);
  CHECK(message_of([] { parse_config("unknown = 3"); }).find("'unknown'") != std::string::npos);
  CHECK(kind_of([] { parse_config("p = 1.5\nthis line is junk\n"); }) == ErrorKind::ParseError);
  CHECK(message_of([] { parse_config("p = 1.5\nthis line is junk\n"); }).find("line 2") != std::string::npos);
  CHECK(kind_of([] { parse_config("p = 1.5\np = 1.6"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { parse_config("p = abc"); }) == ErrorKind::RangeError);
  CHECK(kind_of([] { parse_config("dim = 2.5"); }) == ErrorKind::RangeError);
  CHECK(kind_of([] { parse_config("dim = 4"); }) == ErrorKind::RangeError);
  CHECK(kind_of([] { parse_config("eps = -1"); }) == ErrorKind::RangeError);
  CHECK(kind_of([] { parse_config("domain.shape = torus"); }) == ErrorKind::RangeError);
  CHECK(kind_of([] { parse_config("solver.tol = nan"); }) == ErrorKind::RangeError);
  CHECK(kind_of([] { parse_config("schema = 2"); }) == ErrorKind::RangeError);
}

TEST_CASE("comments and whitespace") {
  const RunConfig c = parse_config("# header\n\n  p=3   # trailing\n\tg.a = 1, 2\n");
  CHECK(c.real("p") == 3.0);
  CHECK(c.list("g.a") == std::vector<double>{1.0, 2.0});
}

TEST_CASE("emit then parse reproduces the config") {
  const RunConfig a = parse_config("p = 1.7\neps = 0.05\ng.kind = linear\ng.a = 0.1,0.3\nseed = 99\n");
  const std::string text = emit_config(a);
  const RunConfig b = parse_config(text);
  CHECK(a == b);
  CHECK(emit_config(b) == text);
  const RunConfig d = parse_config("");
  CHECK(parse_config(emit_config(d)) == d);
}

TEST_CASE("problem construction") {
  const RunConfig c = parse_config(
      "p = 1.5\neps = 0.1\nf.kind = quadratic-compatible\ng.kind = quadratic\ndomain.radius = 1\n");
  const DppProblem prob = problem_from_config(c);
  CHECK(prob.params.p() == 1.5);
  CHECK(prob.f(Vec{}) == doctest::Approx(-1.5 / 3.5));
  CHECK(prob.g(Vec{0.3, 0.4, 0}) == doctest::Approx(0.25));
  CHECK(prob.spacing() == doctest::Approx(0.0125));

  const RunConfig r = parse_config("p = 1.5\neps = 0.1\ng.kind = expression\ng.id = radial_p_harmonic\n"
                                   "domain.shape = annulus\ndomain.radius = 1.5\ndomain.inner_radius = 0.5\n");
  const DppProblem pr = problem_from_config(r);
  CHECK(pr.g(Vec{2.0, 0, 0}) == doctest::Approx(0.5));  // exponent (p - N)/(p - 1) = -1
  CHECK(pr.domain.shape == Shape::Annulus);

  const RunConfig bad = parse_config("eps = 0.8\n");
  CHECK(kind_of([&] { problem_from_config(bad); }) == ErrorKind::InvalidArgument);

  const RunConfig game = parse_config("game.player_one = radial\ngame.direction_two = 0,2\ngame.start = 0.1,0.2\n");
  const GameConfig g = game_from_config(game);
  CHECK(g.player_one.kind == StrategyKind::Radial);
  CHECK(g.player_two.direction[1] == 1.0);
  CHECK(g.start[1] == 0.2);
}

TEST_CASE("named expressions") {
  const Vec x{0.5, -0.25, 0};
  CHECK(named_expression("sign_x1", 2, 1.5)(x) == 1.0);
  CHECK(named_expression("saddle", 2, 1.5)(x) == doctest::Approx(0.1875));
  CHECK(named_expression("cos_x1", 2, 1.5)(x) == doctest::Approx(std::cos(0.5)));
  CHECK(named_expression("linear", 2, 1.5, Vec{2, 4, 0}, 1.0)(x) == doctest::Approx(1.0));
  CHECK(kind_of([] { named_expression("sinh", 2, 1.5); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("exit codes") {
  CHECK(exit_code(ErrorKind::ParseError) == 2);
  CHECK(exit_code(ErrorKind::UnknownKey) == 2);
  CHECK(exit_code(ErrorKind::RangeError) == 2);
  CHECK(exit_code(ErrorKind::NotConverged) == 3);
  CHECK(exit_code(ErrorKind::SamplerStall) == 3);
  CHECK(exit_code(ErrorKind::IoError) == 4);
}

TEST_CASE("report rendering") {
  Report r;
  r.title = "demo";
  r.add("a", 0.1).add("n", std::int64_t{3}).add("ok", true).add("name", std::string("x"));
  r.add_series("history", {1.0, 0.5});
  r.columns = {"eps", "value"};
  r.rows = {{0.2, 1.0 / 3.0}, {0.1, std::int64_t{7}}};
  const std::string csv = render_report(r, Format::Csv);
  CHECK(csv == "eps,value\n0.20000000000000001,0.33333333333333331\n0.10000000000000001,7\n");
  const std::string json = render_report(r, Format::Json);
  const auto parsed = nlohmann::ordered_json::parse(json);
  CHECK(parsed.begin().key() == "report");
  CHECK(parsed["a"].get<double>() == 0.1);
  CHECK(parsed["n"].get<std::int64_t>() == 3);
  CHECK(parsed["ok"].get<bool>());
  CHECK(parsed["history"] == nlohmann::ordered_json::array({1.0, 0.5}));
  CHECK(parsed["rows"][0]["value"].get<double>() == 1.0 / 3.0);
  CHECK(parsed["rows"][1]["value"].get<std::int64_t>() == 7);
  CHECK(render_report(r, Format::Text).find("n = 3\n") != std::string::npos);
  CHECK(render_report(r, Format::Json) == json);

  Report bad = r;
  bad.add("broken", std::numeric_limits<double>::quiet_NaN());
  CHECK(kind_of([&] { render_report(bad, Format::Json); }) == ErrorKind::NonFinite);
  CHECK(message_of([&] { render_report(bad, Format::Text); }).find("broken") != std::string::npos);

  Report ragged = r;
  ragged.rows.push_back({1.0});
  CHECK(kind_of([&] { render_report(ragged, Format::Csv); }) == ErrorKind::InvalidArgument);

  CHECK(kind_of([&] { emit_report(r, Format::Csv, "/nonexistent-dir/out.csv"); }) == ErrorKind::IoError);
  CHECK(format_from_string("json-style") == Format::Json);
}
