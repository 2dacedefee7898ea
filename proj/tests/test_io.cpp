#include <doctest.h>

#include <sstream>

#include "bdpz/errors.hpp"
#include "bdpz/io.hpp"

using namespace bdpz;

TEST_CASE("numbers keep 17 significant digits") {
    CHECK(format_number(13.0 / 28.0) == "0.4642857142857143");
    CHECK(std::stod(format_number(0.1)) == 0.1);
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("bound reports serialize value as a string") {
    const BoundReport r{BoundKind::theorem2, 1.5e-7, {{"N1", -150.0}}};
    const auto j = report_to_json(r);
    CHECK(j.at("kind") == "theorem2");
    CHECK(j.at("value") == "1.4999999999999999e-07");
    CHECK(j.at("inputs_digest").at("N1") == "-150");
}

TEST_CASE("CSV headers") {
    const Window w{-1, 1};
    Trajectory traj;
    traj.snapshots.push_back(ProbabilitySnapshot::delta(w, 0));
    traj.moments.push_back(moments(traj.snapshots.back()));
    std::ostringstream a;
    write_trajectory_csv(a, traj);
    CHECK(a.str() == "t,k,p\n0,-1,0\n0,0,1\n0,1,0\n");
    std::ostringstream b;
    write_moments_csv(b, traj);
    CHECK(b.str() == "t,mean,variance,mass\n0,0,0,1\n");
    EmpiricalDistribution h{ProbabilitySnapshot::delta({2, 2}, 2, 1.0), {0.0}, {3}, 3, 9};
    std::ostringstream c;
    write_histogram_csv(c, h);
    CHECK(c.str() == "k,p_hat,stderr,n_paths,seed,t\n2,1,0,3,9,1\n");
}

TEST_CASE("weight configs") {
    const auto w = parse_weights(std::string(R"({"head":{"1":1,"-1":2},"pos_ratio":1.25,"neg_ratio":1.5})"));
    CHECK(w(-2) == doctest::Approx(3.0));
    CHECK(w(3) == doctest::Approx(1.5625));
    CHECK_THROWS_AS(parse_weights(std::string(R"({"head":{"x":1},"pos_ratio":1,"neg_ratio":1})")), SchemaError);
    CHECK_THROWS_AS(parse_weights(std::string(R"({"head":{"1":1,"-1":1}})")), SchemaError);
    CHECK_THROWS_AS(resolve_weights("/nonexistent/weights.json"), SchemaError);
}

TEST_CASE("table factors") {
    const auto m = parse_model(std::string(R"({"name":"t","horizon":2,
        "birth":[{"lo":"-inf","hi":"+inf","base":1,"factor":{"kind":"table","entries":{"-1":0.5,"1":2},"default":1}}],
        "death":[{"lo":"-inf","hi":"+inf","base":1}]})"));
    CHECK(m.birth_rate(1, 0.0) == 2.0);
    CHECK(m.birth_rate(-1, 0.0) == 0.5);
    CHECK(m.birth_rate(7, 0.0) == 1.0);
}
