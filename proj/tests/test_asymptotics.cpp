#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "concnls/asymptotics.hpp"

using namespace concnls;

namespace {
const ModelParams kSub = make_model_params(3, 2.0, 4.0 / 3.0, 1.0);
const ModelParams kSuper = make_model_params(3, 3.5, 4.0 / 3.0, 1.0);
const ModelParams kCrit = make_model_params(3, 3.0, 4.0 / 3.0, 1.0);
} // namespace

TEST_CASE("subcritical suite passes") {
    const auto rep = run_subcritical_suite(kSub);
    for (const auto& r : rep.records) {
        INFO(r.name << " expected " << r.expected << " measured " << r.measured);
        CHECK(r.pass);
    }
    CHECK(rep.pass());
    CHECK_THROWS_AS(run_subcritical_suite(kSuper), std::invalid_argument);
}

TEST_CASE("supercritical suite passes") {
    const auto rep = run_supercritical_suite(kSuper);
    for (const auto& r : rep.records) {
        INFO(r.name << " expected " << r.expected << " measured " << r.measured);
        CHECK(r.pass);
    }
    CHECK(rep.pass());
    CHECK_THROWS_AS(run_supercritical_suite(kSub), std::invalid_argument);
}

TEST_CASE("critical suite passes") {
    const auto rep = run_critical_suite(kCrit);
    for (const auto& r : rep.records) {
        INFO(r.name << " expected " << r.expected << " measured " << r.measured);
        CHECK(r.pass);
    }
    CHECK(rep.pass());
    CHECK_THROWS_AS(run_critical_suite(kSub), std::invalid_argument);
}

TEST_CASE("mu-infinity suite passes") {
    const auto rep = run_mu_infinity_suite(kSub);
    for (const auto& r : rep.records) {
        INFO(r.name << " expected " << r.expected << " measured " << r.measured);
        CHECK(r.pass);
    }
    CHECK(rep.pass());
}

TEST_CASE("scaling suite passes") {
    FlowOpts o;
    o.n_nodes = 1200;
    const auto rep = run_scaling_suite(kSub, o);
    for (const auto& r : rep.records) {
        INFO(r.name << " expected " << r.expected << " measured " << r.measured);
        CHECK(r.pass);
    }
    CHECK(rep.pass());
}

TEST_CASE("report serialization carries provenance") {
    SuiteReport rep;
    rep.suite = "demo";
    rep.check_rel("a", "anchor-string", 1.0, 1.0, 1e-9);
    rep.check_bound("b", "bound-anchor", 0.5, 1.0);
    const auto j = rep.to_json();
    CHECK(j.at("pass").get<bool>());
    CHECK(j.at("records").size() == 2);
    CHECK(j.at("records")[0].at("anchor") == "anchor-string");
    std::ostringstream os;
    rep.print_table(os);
    CHECK(os.str().find("suite: demo") != std::string::npos);
    CHECK(os.str().find("pass") != std::string::npos);

    SuiteReport bad;
    bad.suite = "bad";
    bad.check_true("must fail", "x", false);
    CHECK_FALSE(bad.pass());
}
