#include <doctest.h>

#include "gridplan/error.hpp"
#include "gridplan/linear_program.hpp"

using namespace gridplan;

TEST_CASE("terms are merged and zero coefficients dropped") {
    LinearProgram lp;
    const int x = lp.add_variable("x", 0, 10, 1);
    const int y = lp.add_variable("y", 0, 10, 2);
    lp.add_constraint("r", Sense::LessEqual, 5, {{y, 1.0}, {x, 2.0}, {x, 1.0}, {y, -1.0}});
    const auto& row = lp.constraint(0);
    REQUIRE(row.terms.size() == 1);
    CHECK(row.terms[0].column == x);
    CHECK(row.terms[0].coefficient == 3.0);
    CHECK(lp.num_nonzeros() == 1);
}

TEST_CASE("duplicate names and crossed bounds are rejected") {
    LinearProgram lp;
    lp.add_variable("x", 0, 1, 0);
    CHECK_THROWS_AS(lp.add_variable("x", 0, 1, 0), Error);
    CHECK_THROWS_AS(lp.add_variable("z", 2, 1, 0), Error);
    lp.add_constraint("r", Sense::Equal, 1, {{0, 1.0}});
    CHECK_THROWS_AS(lp.add_constraint("r", Sense::Equal, 1, {{0, 1.0}}), Error);
    CHECK_THROWS_AS(lp.add_constraint("q", Sense::Equal, 1, {{7, 1.0}}), Error);
}

TEST_CASE("activity, objective and violation") {
    LinearProgram lp;
    lp.add_variable("x", 0, 4, 1.5);
    lp.add_variable("y", -kInfinity, kInfinity, -1);
    lp.add_constraint("a", Sense::GreaterEqual, 3, {{0, 1.0}, {1, 1.0}});
    lp.add_constraint("b", Sense::LessEqual, 1, {{0, 1.0}, {1, -1.0}});
    lp.set_objective_offset(10);
    const std::vector<double> x{2.0, 0.5};
    const auto act = lp.row_activity(x);
    CHECK(act[0] == doctest::Approx(2.5));
    CHECK(act[1] == doctest::Approx(1.5));
    CHECK(lp.objective_value(x) == doctest::Approx(10 + 3 - 0.5));
    CHECK(lp.max_violation(x) == doctest::Approx(0.5));
    CHECK(lp.find_variable("y").value() == 1);
    CHECK_FALSE(lp.find_constraint("zz").has_value());
}

TEST_CASE("sparse views agree with rows") {
    LinearProgram lp;
    for (int j = 0; j < 4; ++j) lp.add_variable("v" + std::to_string(j), 0, 1, 0);
    lp.add_constraint("r0", Sense::Equal, 0, {{0, 1.0}, {3, 2.0}});
    lp.add_constraint("r1", Sense::Equal, 0, {{1, -1.0}, {3, 4.0}});
    const auto csc = lp.column_major();
    const auto csr = lp.row_major();
    CHECK(csc.major == 4);
    CHECK(csr.major == 2);
    CHECK(csc.nonzeros() == 4);
    CHECK(csc.start[4] - csc.start[3] == 2);
    CHECK(csr.start[1] - csr.start[0] == 2);
}
