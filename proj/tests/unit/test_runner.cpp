#include <doctest.h>

#include "vlab/errors.hpp"
#include "vlab/runner.hpp"

#include <cmath>

using namespace vlab;

TEST_CASE("config validation") {
    CHECK_NOTHROW((void)parse_config(Json{{"experiment", "ktrig-check"}}));
    CHECK_THROWS_AS((void)parse_config(Json{{"experiment", "unknown-thing"}}),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_config(Json::array()), ConfigError);
    CHECK_THROWS_AS((void)parse_config(Json{{"points", 10}}), ConfigError);

    SUBCASE("unknown keys are rejected with their path") {
        Json j{{"experiment", "ktrig-check"}, {"bogus", 1}};
        try {
            (void)parse_config(j);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("bogus") != std::string::npos);
        }
    }
    SUBCASE("nested keys are checked too") {
        Json j{{"experiment", "classical-virial"},
               {"integrator", {{"step", 1e-3}, {"dt", 1.0}}}};
        CHECK_THROWS_AS((void)parse_config(j), ConfigError);
    }
    SUBCASE("types are enforced") {
        Json j{{"experiment", "ml-oscillator"}, {"lambda", "big"}};
        CHECK_THROWS_AS((void)parse_config(j), ConfigError);
    }
}

TEST_CASE("dotted overrides") {
    Json cfg{{"experiment", "classical-virial"}};
    apply_override(cfg, "integrator.step=0.002");
    apply_override(cfg, "system.name=harmonic");
    CHECK(cfg["integrator"]["step"].get<double>() == doctest::Approx(0.002));
    CHECK(cfg["system"]["name"] == "harmonic");
    CHECK_THROWS_AS(apply_override(cfg, "no_equals_sign"), ConfigError);
}

TEST_CASE("identity-suite experiment passes and is deterministic") {
    const auto cfg = parse_config(Json{{"experiment", "ktrig-check"}});
    RunReport r1 = run(cfg);
    RunReport r2 = run(cfg);
    CHECK(r1.pass);
    Json j1 = report_json(r1), j2 = report_json(r2);
    j1.erase("meta");
    j2.erase("meta");
    CHECK(j1.dump() == j2.dump());
}

TEST_CASE("classical pipeline end to end") {
    Json j{{"experiment", "classical-virial"},
           {"integrator", {{"step", 2e-3}, {"t_end", 7.0}}}};
    const RunReport rep = run(parse_config(j));
    CHECK(rep.pass);
    REQUIRE(rep.checks.size() >= 3);
    // kinetic-side check carries <E_c> in lhs, energy in params
    CHECK(std::abs(rep.checks[0].lhs - 0.25) < 1e-6);
    CHECK(rep.extra.contains("hypervirial_h_ratio"));
}

TEST_CASE("oscillator law pipeline") {
    Json j{{"experiment", "ml-oscillator"},
           {"lambda", 1.0},
           {"integrator", {{"step", 2e-3}}}};
    const RunReport rep = run(parse_config(j));
    CHECK(rep.pass);
    CHECK(rep.checks[0].rhs ==
          doctest::Approx(2.0 * 3.14159265358979323846 * std::sqrt(2.0)));
}

TEST_CASE("report rendering") {
    Json j{{"experiment", "ktrig-check"}, {"points", 100}};
    const RunReport rep = run(parse_config(j));

    const std::string csv = emit(rep, Format::Csv);
    CHECK(csv.rfind("identity,lhs,rhs", 0) == 0);

    const std::string pretty = emit(rep, Format::Pretty);
    CHECK(pretty.find("PASS") != std::string::npos);

    const Json doc = Json::parse(emit(rep, Format::Json));
    CHECK(doc.contains("meta"));
    CHECK(doc["pass"].get<bool>());
    CHECK(doc["config"]["experiment"] == "ktrig-check");

    CHECK_THROWS_AS((void)parse_format("yaml"), ConfigError);
}

TEST_CASE("exit code classes") {
    CHECK(exit_code_for(ConfigError("x")) == 2);
    CHECK(exit_code_for(MethodMismatch("x")) == 2);
    CHECK(exit_code_for(ConvergenceError("x")) == 3);
    CHECK(exit_code_for(QuadratureError("x")) == 3);
    CHECK(exit_code_for(DomainError("x")) == 4);
    CHECK(exit_code_for(DegenerateDegree("x")) == 4);
    CHECK(exit_code_for(std::runtime_error("x")) == 1);
}

TEST_CASE("degenerate scaling degree propagates as a domain error") {
    Json j{{"experiment", "nonstrict"},
           {"degree", 2.0},
           {"integrator", {{"step", 5e-3}}}};
    CHECK_THROWS_AS((void)run(parse_config(j)), DegenerateDegree);
}
