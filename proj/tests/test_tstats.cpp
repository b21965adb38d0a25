#include <doctest.h>

#include "fdrlab/core.hpp"
#include "fdrlab/rng.hpp"
#include "fdrlab/tstats.hpp"

#include <cmath>

using namespace fdrlab;

namespace {

DataMatrix from_columns(std::initializer_list<std::initializer_list<double>> cols) {
  const Index m = static_cast<Index>(cols.size());
  const Index n = static_cast<Index>(cols.begin()->size());
  Matrix values(n, m);
  Index j = 0;
  for (const auto& col : cols) {
    Index i = 0;
    for (double v : col) values(i++, j) = v;
    ++j;
  }
  return DataMatrix{std::move(values)};
}

// Independent oracle: plain two-pass moments written against the definitions,
// no shared code with the library path.
struct NaiveStats {
  double t, mean, sd, skew;
};

NaiveStats naive_stats(const std::vector<double>& col) {
  const double n = static_cast<double>(col.size());
  double mean = 0.0;
  for (double v : col) mean += v;
  mean /= n;
  double s2 = 0.0, m2 = 0.0, m3 = 0.0;
  for (double v : col) {
    const double d = v - mean;
    s2 += d * d;
    m2 += d * d;
    m3 += d * d * d;
  }
  s2 /= (n - 1.0);
  m2 /= n;
  m3 /= n;
  NaiveStats out;
  out.mean = mean;
  out.sd = std::sqrt(s2);
  out.t = mean / (out.sd / std::sqrt(n));
  out.skew = m3 / std::pow(m2, 1.5);
  return out;
}

}  // namespace

TEST_CASE("t statistic examples") {
  const auto zero = t_statistics(from_columns({{-1.0, 1.0}}));
  CHECK(zero.t[0] == 0.0);

  const auto simple = t_statistics(from_columns({{1.0, 2.0, 3.0}}));
  // 2 / (1/sqrt(3)) = 2 sqrt(3)
  CHECK(simple.t[0] == doctest::Approx(3.4641016151377546).epsilon(1e-14));
  CHECK(simple.mean[0] == doctest::Approx(2.0));
  CHECK(simple.sd[0] == doctest::Approx(1.0));

  CHECK_THROWS_AS(t_statistics(from_columns({{5.0, 5.0, 5.0}})),
                  DegenerateColumnError);
}

TEST_CASE("skewness examples") {
  Vector sym(4);
  sym << -1.0, 1.0, -1.0, 1.0;
  CHECK(column_skewness(sym) == 0.0);

  Vector spike(3);
  spike << 0.0, 0.0, 3.0;
  // central moments (2, 2): 2 / 2^{3/2}
  CHECK(column_skewness(spike) == doctest::Approx(0.70710678118654752).epsilon(1e-14));

  Vector shifted = spike.array() + 17.25;
  CHECK(column_skewness(shifted) ==
        doctest::Approx(column_skewness(spike)).epsilon(1e-12));

  Vector flat = Vector::Constant(5, 3.25);
  CHECK_THROWS_AS(column_skewness(flat), DegenerateColumnError);
}

TEST_CASE("scale and sign equivariance on random columns") {
  RandomStream rng = make_rng_stream(11, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 5 + static_cast<Index>(rng.uniform_below(40));
    Matrix col(n, 1);
    for (Index i = 0; i < n; ++i) col(i, 0) = rng.normal() + 0.3;
    DataMatrix x{col};
    const auto base = t_statistics(x);

    const double c = 0.5 + 3.0 * rng.uniform01();
    DataMatrix scaled{col * c};
    const auto s = t_statistics(scaled);
    CHECK(s.t[0] == doctest::Approx(base.t[0]).epsilon(1e-12));
    CHECK(s.skew[0] == doctest::Approx(base.skew[0]).epsilon(1e-12));

    DataMatrix negated{-col};
    const auto neg = t_statistics(negated);
    CHECK(neg.t[0] == doctest::Approx(-base.t[0]).epsilon(1e-12));
    CHECK(neg.skew[0] == doctest::Approx(-base.skew[0]).epsilon(1e-12));
  }
}

TEST_CASE("agreement with the naive oracle on random 100-sample columns") {
  RandomStream rng = make_rng_stream(12, 0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> raw(100);
    Matrix col(100, 1);
    for (int i = 0; i < 100; ++i) {
      raw[static_cast<std::size_t>(i)] = std::exp(rng.normal()) - 1.0;
      col(i, 0) = raw[static_cast<std::size_t>(i)];
    }
    const auto got = t_statistics(DataMatrix{col});
    const auto want = naive_stats(raw);
    CHECK(got.t[0] == doctest::Approx(want.t).epsilon(1e-12));
    CHECK(got.sd[0] == doctest::Approx(want.sd).epsilon(1e-12));
    CHECK(got.skew[0] == doctest::Approx(want.skew).epsilon(1e-12));
    CHECK(column_skewness(col.col(0)) == doctest::Approx(want.skew).epsilon(1e-12));
  }
}

TEST_CASE("validate_matrix rejects bad inputs") {
  Matrix one_row(1, 3);
  one_row << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(validate_matrix(one_row), TooFewSamplesError);

  Matrix with_nan(2, 2);
  with_nan << 1.0, 2.0, std::nan(""), 4.0;
  CHECK_THROWS_AS(validate_matrix(with_nan), NonFiniteEntryError);

  Matrix minimal(2, 1);
  minimal << 0.0, 1.0;
  CHECK(validate_matrix(minimal).samples() == 2);
}
