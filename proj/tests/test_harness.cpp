#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "savns/harness.hpp"

using namespace savns;
using namespace savns::harness;

namespace {

RunConfig small_config(SchemeKind scheme, CaseKind c, int n) {
    RunConfig cfg;
    cfg.nx = n;
    cfg.ny = n;
    cfg.case_kind = c;
    cfg.params.scheme = scheme;
    return cfg;
}

} // namespace

TEST_CASE("rates") {
    const std::vector<double> e1{1e-2, 5e-3};
    const std::vector<double> d1{0.1, 0.05};
    CHECK(rates(e1, d1).at(0) == doctest::Approx(1.0));

    const std::vector<double> e2{4e-3, 1e-3};
    CHECK(rates(e2, d1).at(0) == doctest::Approx(2.0));

    // A second-order error column.
    const std::vector<double> e3{1.99e-3, 5.25e-4, 1.36e-4, 3.95e-5};
    const std::vector<double> d3{0.1, 0.05, 0.025, 0.0125};
    const std::vector<double> r = rates(e3, d3);
    REQUIRE(r.size() == 3);
    CHECK(std::round(r[0] * 100) / 100 == doctest::Approx(1.92));
    CHECK(std::round(r[1] * 100) / 100 == doctest::Approx(1.95));
    CHECK(std::round(r[2] * 100) / 100 == doctest::Approx(1.78));

    const std::vector<double> bad{1e-2, 0.0};
    CHECK_THROWS_AS(rates(bad, d1), std::domain_error);
    const std::vector<double> one{1e-2};
    const std::vector<double> one_dt{0.1};
    CHECK_THROWS_AS(rates(one, one_dt), ContractViolation);
}

TEST_CASE("step count and config validation") {
    CHECK(step_count(1.0, 0.1) == 10);
    CHECK(step_count(1.0, 1.0 / 80.0) == 80);
    CHECK_THROWS_AS(step_count(1.0, 0.3), ContractViolation);

    RunConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.dts = {0.05, 0.1};
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
    cfg.dts = {0.1, 0.1};
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);
    cfg.dts = {0.3};
    CHECK_THROWS_AS(cfg.validate(), ContractViolation);

    RunConfig st;
    st.mode = Mode::Stability;
    CHECK_THROWS_AS(st.validate(), ContractViolation);
    st.case_kind = CaseKind::StabilityIC;
    CHECK_NOTHROW(st.validate());
    st.params.scheme = SchemeKind::NonlinearScalar;
    CHECK_THROWS_AS(st.validate(), ContractViolation);

    RunConfig pm;
    pm.paper_mode = true;
    CHECK(pm.grid().nx == 250);
    CHECK(pm.grid().ny == 250);
    CHECK(parse_mode("single") == Mode::Single);
    CHECK(parse_case_kind("stability") == CaseKind::StabilityIC);
    CHECK_THROWS(parse_case_kind("3"));
}

TEST_CASE("backends agree on a small run") {
    for (SchemeKind s : {SchemeKind::First, SchemeKind::SecondRotational, SchemeKind::NonlinearScalar}) {
        RunConfig cfg = small_config(s, CaseKind::Example1, 16);
        const RunResult a = run_simulation(cfg, 1.0 / 8.0);
        cfg.backend = Backend::ConjugateGradient;
        const RunResult b = run_simulation(cfg, 1.0 / 8.0);
        CHECK(a.errors->e_u == doctest::Approx(b.errors->e_u).epsilon(1e-8));
        CHECK(std::abs(a.errors->e_u - b.errors->e_u) < 1e-8);
        CHECK(std::abs(a.errors->e_p - b.errors->e_p) < 1e-8);
        CHECK(std::abs(a.errors->e_q - b.errors->e_q) < 1e-8);
        CHECK((a.final_state.u - b.final_state.u).max_abs() < 1e-8);
        CHECK(a.div_max <= cfg.divergence_bound());
        CHECK(b.div_max <= cfg.divergence_bound());
    }
}

TEST_CASE("zero initial data in a stability run only decays the scalar") {
    RunConfig cfg = small_config(SchemeKind::First, CaseKind::StabilityIC, 16);
    cfg.mode = Mode::Stability;
    cfg.ic_amplitude = 0.0;
    cfg.dts = {0.1};
    const RunResult r = stability_study(cfg);
    CHECK(r.final_state.u.max_abs() == 0.0);
    REQUIRE(r.trace);
    CHECK(r.trace->rows.size() == 11);
    double q = 1.0;
    for (std::size_t k = 1; k < r.trace->rows.size(); ++k) {
        q /= 1.1;
        const EnergyRow& row = r.trace->rows[k];
        CHECK(row.energy == doctest::Approx(q * q).epsilon(1e-13));
        CHECK(row.dissipation == 0.0);
        // Only the scalar term moves, and it strictly decreases.
        CHECK(row.violation < 0.0);
        CHECK(row.violation == doctest::Approx(q * q - q * q * 1.21).epsilon(1e-12));
    }
    CHECK(r.trace->passed());
}

TEST_CASE("stability traces satisfy the energy law") {
    for (SchemeKind s : {SchemeKind::First, SchemeKind::SecondRotational}) {
        RunConfig cfg = small_config(s, CaseKind::StabilityIC, 24);
        cfg.mode = Mode::Stability;
        cfg.params.t_final = 2.0;
        cfg.dts = {0.5};
        const RunResult r = stability_study(cfg);
        REQUIRE(r.trace);
        CHECK(r.trace->rows.size() == 5);
        CHECK(r.trace->passed());
        CHECK(r.div_max <= cfg.divergence_bound());
    }
}

TEST_CASE("CSV output is byte stable") {
    RunConfig cfg = small_config(SchemeKind::SecondRotational, CaseKind::Example2, 16);
    cfg.dts = {0.25, 0.125};
    std::ostringstream a;
    std::ostringstream b;
    write_convergence_csv(a, convergence_study(cfg));
    write_convergence_csv(b, convergence_study(cfg));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("dt,e_u,rate_u,e_p,rate_p,e_q,rate_q\n", 0) == 0);
    // header + two rows; the first row has empty rate fields
    std::istringstream lines(a.str());
    std::string header, row1, row2;
    std::getline(lines, header);
    std::getline(lines, row1);
    std::getline(lines, row2);
    CHECK(row1.find(",,") != std::string::npos);
    CHECK(row1.rfind("2.500000e-01,", 0) == 0);
    CHECK(row2.find(",,") == std::string::npos);

    RunConfig st = small_config(SchemeKind::First, CaseKind::StabilityIC, 12);
    st.mode = Mode::Stability;
    st.dts = {0.25};
    std::ostringstream c;
    std::ostringstream d;
    write_energy_csv(c, *stability_study(st).trace);
    write_energy_csv(d, *stability_study(st).trace);
    CHECK(c.str() == d.str());
    CHECK(c.str().rfind("n,t,energy,dissipation,violation\n0,", 0) == 0);
}

TEST_CASE("halving dt does not increase the velocity error") {
    for (SchemeKind s : {SchemeKind::First, SchemeKind::SecondRotational, SchemeKind::NonlinearScalar}) {
        for (CaseKind c : {CaseKind::Example1, CaseKind::Example2}) {
            RunConfig cfg = small_config(s, c, 64);
            cfg.dts = {0.1, 0.05, 0.025};
            const ConvergenceTable t = convergence_study(cfg);
            for (std::size_t k = 1; k < t.rows.size(); ++k) CHECK(t.rows[k].e_u <= 1.05 * t.rows[k - 1].e_u);
            CHECK(t.div_max <= cfg.divergence_bound());
        }
    }
}
