#include "doctest.h"
#include "rtdyn/csv.hpp"

#include <random>
#include <sstream>

using namespace rtdyn;

TEST_CASE("write then read is the identity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index rows = 1 + trial * 7, cols = 1 + trial % 4;
    Table t;
    for (Eigen::Index j = 0; j < cols; ++j) t.columns.push_back("c" + std::to_string(j));
    t.data.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) t.data(i, j) = u(rng) * std::pow(10.0, static_cast<int>(40 * u(rng)));
    t.data(0, 0) = 0.1;
    std::stringstream ss;
    write_csv(ss, t);
    const Table r = read_csv(ss);
    CHECK(r.columns == t.columns);
    CHECK(r.data == t.data);
  }
}

TEST_CASE("special values and formatting") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_number(1.0) == "1");
  std::stringstream ss("a,b\ninf,-inf\n+2, 3e-2 \n\n");
  const Table t = read_csv(ss);
  CHECK(std::isinf(t.data(0, 0)));
  CHECK(t.data(1, 0) == 2.0);
  CHECK(t.data(1, 1) == 0.03);
}

TEST_CASE("errors name the column or line") {
  std::stringstream ss("time,value\n1,2\n");
  const Table t = read_csv(ss);
  try {
    t.column("power");
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("'power'") != std::string::npos);
  }
  CHECK_THROWS_AS(require_columns(t, {"time", "freq"}, "x.csv"), std::invalid_argument);

  std::stringstream bad("time,value\n1,2\n3,abc\n");
  try {
    read_csv(bad, "in.csv");
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("in.csv:3") != std::string::npos);
  }
  std::stringstream ragged("time,value\n1,2,3\n");
  CHECK_THROWS_AS(read_csv(ragged), std::invalid_argument);
  std::stringstream empty("");
  CHECK_THROWS_AS(read_csv(empty), std::invalid_argument);
}

TEST_CASE("raw value streams") {
  std::stringstream ss("1\n 2.5\n\n-3\n");
  const Eigen::VectorXd v = read_values(ss);
  REQUIRE(v.size() == 3);
  CHECK(v[1] == 2.5);
  std::stringstream bad("1\nx\n");
  CHECK_THROWS_AS(read_values(bad), std::invalid_argument);
}
