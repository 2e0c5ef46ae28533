#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "radpl/verify.hpp"

using namespace radpl;

namespace {

VerifyConfig small_config() {
    VerifyConfig cfg;
    cfg.M = 256;
    cfg.q_list = {40.0};
    cfg.local_min_samples = 40;
    return cfg;
}

}  // namespace

TEST_CASE("registry names are unique") {
    std::set<std::string> names;
    for (const CheckSpec& c : check_registry()) {
        CHECK(names.insert(c.name).second);
        CHECK(!c.property.empty());
    }
}

TEST_CASE("report covers the registry exactly") {
    const VerifyConfig cfg = small_config();
    const VerificationReport rep = run_verification(cfg);

    std::map<std::string, int> counts;
    for (const CheckResult& c : rep.checks) ++counts[c.name];
    for (const CheckSpec& spec : check_registry()) {
        const int expected =
            spec.scope == CheckScope::global ? 1 : static_cast<int>(cfg.q_list.size());
        CHECK(counts[spec.name] == expected);
    }
    int total = 0;
    for (const CheckSpec& spec : check_registry())
        total += spec.scope == CheckScope::global ? 1 : static_cast<int>(cfg.q_list.size());
    CHECK(static_cast<int>(rep.checks.size()) == total);
}

TEST_CASE("above the fold: module invariants pass, the two documented anchors fail") {
    const VerificationReport rep = run_verification(small_config());
    std::set<std::string> failed;
    for (const CheckResult& c : rep.checks)
        if (c.status == "fail") failed.insert(c.name);
    // the second solution hugs the constant closer than double precision at
    // q = 40, so exactly these two sampling anchors cannot hold
    CHECK(failed == std::set<std::string>{"local_min_at_1", "third_solution_ordering"});
    CHECK(!rep.all_passed());
}

TEST_CASE("below the fold everything passes, fold-dependent checks are skipped") {
    VerifyConfig cfg = small_config();
    cfg.q_list = {3.0};
    const VerificationReport rep = run_verification(cfg);
    CHECK(rep.all_passed());
    std::set<std::string> skipped;
    for (const CheckResult& c : rep.checks)
        if (c.status == "skipped") skipped.insert(c.name);
    CHECK(skipped.count("local_min_at_1") == 1);
    CHECK(skipped.count("third_solution_ordering") == 1);
    CHECK(skipped.count("miranda_crossing_seed_surface") == 1);
}

TEST_CASE("fault injection: a tampered quadrature weight is caught") {
    VerifyConfig cfg = small_config();
    cfg.q_list = {3.0};  // cheapest configuration; the global check suffices
    RadialGrid grid(cfg.N, cfg.M);
    // simulate a corrupted grid; the weights are immutable by design, so the
    // fault is injected through the back door
    const_cast<std::vector<double>&>(grid.weights())[3] += 1e-6;
    const VerificationReport rep = run_verification(cfg, grid);
    bool quadrature_failed = false;
    for (const CheckResult& c : rep.checks)
        if (c.name == "quadrature_total_mass") quadrature_failed = c.status == "fail";
    CHECK(quadrature_failed);
    CHECK(!rep.all_passed());
}

TEST_CASE("report JSON is deterministic and carries the verdict") {
    VerifyConfig cfg = small_config();
    cfg.q_list = {3.0};
    const json a = report_to_json(run_verification(cfg));
    const json b = report_to_json(run_verification(cfg));
    CHECK(a.dump() == b.dump());
    CHECK(a.at("schema") == 1);
    CHECK(a.at("all_passed") == true);
    CHECK(a.at("checks").size() > 0);
    for (const auto& c : a.at("checks")) {
        CHECK(c.contains("name"));
        CHECK(c.contains("property"));
        CHECK(c.contains("status"));
    }

    VerifyConfig other = cfg;
    other.seed += 1;
    const json c = report_to_json(run_verification(other));
    CHECK(a.at("input_hash") != c.at("input_hash"));
}
