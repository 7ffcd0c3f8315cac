#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "hazshift/errors.hpp"
#include "hazshift/json_writer.hpp"
#include "hazshift/parallel.hpp"
#include "hazshift/quadrature.hpp"
#include "hazshift/rng.hpp"

using namespace hazshift;

TEST_CASE("quadrature: exact on polynomials and smooth integrands") {
  CHECK(integrate([](double x) { return x * x * x; }, 0.0, 1.0, 1e-12) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(integrate([](double x) { return std::exp(-x); }, 0.0, 2.0, 1e-12) ==
        doctest::Approx(1.0 - std::exp(-2.0)).epsilon(1e-13));
  const double pi = 3.14159265358979323846;
  CHECK(integrate([](double x) { return std::sin(x) * std::sin(x); }, 0.0, 2.0 * pi, 1e-11) ==
        doctest::Approx(pi).epsilon(1e-12));
  CHECK(integrate([](double) { return 1.0; }, 3.0, 3.0, 1e-12) == 0.0);
}

TEST_CASE("quadrature: subdivides a peaked integrand to tolerance") {
  // narrow gaussian bump; crude single-panel GK15 would be far off
  const double v = integrate([](double x) { return std::exp(-500.0 * (x - 0.3) * (x - 0.3)); },
                             0.0, 1.0, 1e-12);
  const double exact = std::sqrt(3.14159265358979323846 / 500.0);  // tails < 1e-20
  CHECK(v == doctest::Approx(exact).epsilon(1e-11));
}

TEST_CASE("quadrature: reports non-convergence and bad integrands") {
  CHECK_THROWS_AS(integrate([](double x) { return std::exp(-500.0 * (x - 0.3) * (x - 0.3)); }, 0.0,
                            1.0, 1e-12, 0),
                  QuadratureError);
  CHECK_THROWS_AS(integrate([](double) { return std::numeric_limits<double>::quiet_NaN(); }, 0.0, 1.0, 1e-8),
                  QuadratureError);
}

TEST_CASE("rng: deterministic per seed, distinct across streams") {
  RngStream a(derive_seed(42, 0));
  RngStream b(derive_seed(42, 0));
  RngStream c(derive_seed(42, 1));
  bool all_equal = true;
  bool any_diff_c = false;
  for (int i = 0; i < 100; ++i) {
    const double va = a.uniform();
    all_equal = all_equal && va == b.uniform();
    any_diff_c = any_diff_c || va != c.uniform();
  }
  CHECK(all_equal);
  CHECK(any_diff_c);
}

TEST_CASE("rng: uniform stays strictly inside (0,1)") {
  RngStream s(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("rng: exponential moments") {
  RngStream s(11);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = s.exponential();
    REQUIRE(v > 0.0);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(mean == doctest::Approx(1.0).epsilon(0.02));
  CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("rng: normal moments") {
  RngStream s(13);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = s.normal();
    sum += v;
    sumsq += v * v;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(1.0).scale(0.02));
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("json writer: shape, escaping, and 17-digit round trip") {
  JsonWriter w;
  w.begin_object();
  w.key("a").value(1);
  w.key("b").begin_array().value(true).value("x\"y\n").end_array();
  w.key("c").begin_object().key("d").value(0.5).end_object();
  w.end_object();
  CHECK(w.str() == "{\"a\":1,\"b\":[true,\"x\\\"y\\n\"],\"c\":{\"d\":0.5}}");

  RngStream s(17);
  for (int i = 0; i < 1000; ++i) {
    const double v = (s.uniform() - 0.5) * std::exp(40.0 * (s.uniform() - 0.5));
    const std::string text = JsonWriter::format_double(v);
    CHECK(std::strtod(text.c_str(), nullptr) == v);
  }
}

TEST_CASE("parallel_for: index-addressed results match serial, errors propagate") {
  std::vector<double> serial(257), parallel(257);
  for (std::size_t i = 0; i < serial.size(); ++i) serial[i] = std::sqrt(static_cast<double>(i));
  parallel_for(parallel.size(), 4, [&](std::size_t i) { parallel[i] = std::sqrt(static_cast<double>(i)); });
  CHECK(serial == parallel);

  CHECK_THROWS_AS(parallel_for(8, 3,
                               [](std::size_t i) {
                                 if (i == 5) throw Error("Boom", "boom");
                               }),
                  Error);
}
