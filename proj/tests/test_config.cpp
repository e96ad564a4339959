#include <doctest.h>

#include <cmath>
#include <fstream>

#include "mussel/config.hpp"
#include "mussel/errors.hpp"

using namespace mussel;
using nlohmann::json;

namespace {

std::string validation_message(const json& j) {
  try {
    parse_config(j);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults are the reference parameter set") {
  const RunConfig c = parse_config(default_config_json());
  CHECK(c.model.r == 1.1);
  CHECK(c.model.gamma == 4.0);
  CHECK(c.model.alpha == 0.654);
  CHECK(c.model.l == 6.0);
  CHECK_FALSE(c.d_given);
  CHECK_FALSE(c.tau_given);
  CHECK_FALSE(c.simulate.offset.has_value());
  CHECK(c.simulate.sim.grid_points == 256);
}

TEST_CASE("shipped config parses") {
  std::ifstream in(std::string(MUSSEL_CONFIG_DIR) + "/reference.json");
  REQUIRE(in.good());
  const RunConfig c = parse_config(json::parse(in));
  REQUIRE(c.simulate.offset.has_value());
  CHECK(c.simulate.offset->second == -0.002);
  CHECK(c.simulate.ic.k_m == 6.0);
  CHECK(c.classify.tau_eps == 0.5);
}

TEST_CASE("errors name the offending path") {
  json j = default_config_json();
  j["model"]["r"] = "big";
  CHECK(validation_message(j) == "config.model.r: expected a number");

  j = default_config_json();
  j["model"]["typo"] = 1;
  CHECK(validation_message(j) == "config.model.typo: unknown key");

  j = default_config_json();
  j["extra"] = json::object();
  CHECK(validation_message(j) == "config.extra: unknown key");

  j = default_config_json();
  j["simulate"] = {{"grid_points", 12.5}};
  CHECK(validation_message(j) == "config.simulate.grid_points: expected an integer");

  j = default_config_json();
  j["model"]["gamma"] = -1.0;
  CHECK(validation_message(j) == "config.model.gamma: must be positive");

  j = default_config_json();
  j["model"].erase("alpha");
  CHECK(validation_message(j) == "config.model.alpha: required");

  CHECK(validation_message(json::object()) == "config.model: required");
  CHECK(validation_message(json::array()) == "config: expected an object");
}

TEST_CASE("dotted overrides") {
  json j = default_config_json();
  apply_overrides(j, {{"model.d", "0.06"}, {"simulate.offset.tau_eps", "0.5"},
                      {"simulate.offset.d_eps", "-1e-3"}, {"sweep.threads", "2"}});
  const RunConfig c = parse_config(j);
  CHECK(c.d_given);
  CHECK(c.model.d == 0.06);
  REQUIRE(c.simulate.offset.has_value());
  CHECK(c.simulate.offset->first == 0.5);
  CHECK(c.sweep.threads == 2);

  json k = default_config_json();
  apply_overrides(k, {{"model.r", "abc"}});
  CHECK(k["model"]["r"] == "abc");
  CHECK(validation_message(k) == "config.model.r: expected a number");
  CHECK_THROWS_AS(apply_overrides(k, {{"model..r", "1"}}), ValidationError);
  CHECK_THROWS_AS(apply_overrides(k, {{"model.r.x", "1"}}), ValidationError);
}

TEST_CASE("dimensional mode") {
  json j = {{"model",
             {{"dimensional",
               {{"e", 2.2}, {"c", 1.0}, {"d_M", 4.0}, {"k_M", 1.0}, {"f", 0.654}, {"H", 1.0},
                {"A_up", 2.0}, {"D_M", 0.2}, {"D_A", 1.0}, {"tau_dimensional", 0.25},
                {"domain_length", 6.0 * M_PI}}}}}};
  const RunConfig c = parse_config(j);
  CHECK(c.model.r == doctest::Approx(1.1));
  CHECK(c.model.d == doctest::Approx(0.05));
  CHECK(c.model.tau == doctest::Approx(1.0));
  CHECK(c.model.l == doctest::Approx(6.0));
  CHECK(c.d_given);
  CHECK(c.tau_given);
  const json out = to_json(c);
  CHECK(out.contains("dimensional_source"));
  CHECK(out["model"]["r"].get<double>() == doctest::Approx(1.1));

  json mixed = j;
  mixed["model"]["r"] = 1.1;
  CHECK(validation_message(mixed) == "config.model.r: not allowed together with model.dimensional");

  json missing = j;
  missing["model"]["dimensional"].erase("H");
  CHECK(validation_message(missing) == "config.model.dimensional.H: required");
}

TEST_CASE("resolved config round-trips") {
  std::ifstream in(std::string(MUSSEL_CONFIG_DIR) + "/reference.json");
  json j = json::parse(in);
  apply_overrides(j, {{"model.tau", "7.5"}, {"numerics.residual_tol", "1e-9"}});
  const RunConfig c = parse_config(j);
  const json once = to_json(c);
  const json twice = to_json(parse_config(once));
  CHECK(once == twice);
  CHECK(once.dump() == twice.dump());
}
