#include "fullerlab/jsonio.hpp"

#include "fullerlab/problems.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <sstream>

using namespace fullerlab;
using namespace fullerlab::testing;

TEST_CASE("poly JSON round-trip") {
    SplitMix64 rng(31);
    for (int i = 0; i < 30; ++i) {
        Poly p = random_poly(rng, 3, 4, 6);
        CHECK(poly_from_json(poly_to_json(p), 3) == p);
    }
    CHECK_THROWS_AS(poly_from_json(Json::object(), 2), std::invalid_argument);
    Json bad = Json::array();
    bad.push_back({{"coeff", "1/2"}, {"exps", {1, 2, 3}}});
    CHECK_THROWS_AS(poly_from_json(bad, 2), std::invalid_argument);
}

TEST_CASE("problem JSON round-trip for every built-in") {
    QMatrix m1 = QMatrix::from_rows({{Rational(2), Rational(1)}, {Rational(1), Rational(2)}});
    QMatrix m2 = QMatrix::from_rows({{Rational(1), Rational(0)}, {Rational(0), Rational(3)}});
    Poly c = Poly::from_text("1/2 * x0^2 + 1/2 * x1^2", 2);
    for (const AffineSystem& sys :
         {fuller_classic(), fuller_multi(m1, m2),
          hamiltonian_family(m1, m2, Poly::from_text("1/4 * x0^4", 2), c), time_optimal_di()}) {
        AffineSystem back = problem_from_json(problem_to_json(sys));
        CHECK(back.n == sys.n);
        CHECK(back.m == sys.m);
        CHECK(back.f == sys.f);
        CHECK(back.f0 == sys.f0);
        CHECK(back.K == sys.K);
        for (int i = 0; i < sys.m; ++i) {
            CHECK(back.g[static_cast<size_t>(i)] == sys.g[static_cast<size_t>(i)]);
            CHECK(back.g0[static_cast<size_t>(i)] == sys.g0[static_cast<size_t>(i)]);
        }
    }
}

TEST_CASE("problem JSON errors name the offending field") {
    Json j = problem_to_json(fuller_classic());
    j.erase("f0");
    try {
        problem_from_json(j);
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("'f0'") != std::string::npos);
    }

    Json mismatched = problem_to_json(fuller_classic());
    mismatched["n"] = 3; // f entries still have 2 variables
    CHECK_THROWS_AS(problem_from_json(mismatched), std::invalid_argument);
}

TEST_CASE("matrix JSON accepts rational strings and integers") {
    Json j = Json::parse(R"([["1","1/2"],["1/2",2]])");
    QMatrix m = qmatrix_from_json(j);
    CHECK(m.at(0, 1) == Rational(1, 2));
    CHECK(m.at(1, 1) == Rational(2));
    CHECK(qmatrix_from_json(qmatrix_to_json(m)) == m);
    CHECK_THROWS_AS(qmatrix_from_json(Json::parse("[[1.5]]")), std::invalid_argument);
    CHECK_THROWS_AS(qmatrix_from_json(Json::parse("[]")), std::invalid_argument);
}

TEST_CASE("trajectory and events CSV schemas") {
    Trajectory traj;
    traj.state_dim = 3;
    traj.input_dim = 1;
    ExtremalPoint pt;
    pt.t = 0.5;
    pt.z = {0.0, 1.0, -2.0};
    pt.p = {-1.0, 0.25, 0.125};
    pt.u = {1.0};
    traj.samples.push_back(pt);
    SwitchEvent e;
    e.t = 0.25;
    e.input_index = 0;
    e.direction = -1;
    e.phi_slope = -3.5;
    traj.events.push_back(e);

    std::ostringstream ts;
    write_trajectory_csv(ts, traj);
    std::string tcsv = ts.str();
    CHECK(tcsv.find("t,z0,z1,z2,p0,p1,p2,u0\n") == 0);
    CHECK(tcsv.find("0.5,0,1,-2,-1,0.25,0.125,1\n") != std::string::npos);

    std::ostringstream es;
    write_events_csv(es, traj);
    std::string ecsv = es.str();
    CHECK(ecsv.find("t,input,direction,slope\n") == 0);
    CHECK(ecsv.find("0.25,0,-1,-3.5\n") != std::string::npos);
}

TEST_CASE("17 significant digits survive the CSV round trip") {
    Trajectory traj;
    traj.state_dim = 1;
    traj.input_dim = 0;
    ExtremalPoint pt;
    pt.t = 1.0 / 3.0;
    pt.z = {0.1234567890123456789};
    pt.p = {-2.0 / 7.0};
    traj.samples.push_back(pt);
    std::ostringstream ts;
    write_trajectory_csv(ts, traj);
    std::string line = ts.str();
    auto second_line = line.substr(line.find('\n') + 1);
    double t_back = std::stod(second_line.substr(0, second_line.find(',')));
    CHECK(t_back == 1.0 / 3.0);
}
