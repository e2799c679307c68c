#include <doctest.h>

#include <random>

#include "spikereg/data.hpp"
#include "spikereg/encoding.hpp"

using namespace spikereg;

namespace {

SpikeTrain encode_row(std::initializer_list<double> values, double factor = 0.5,
                      AerMode mode = AerMode::Symmetric) {
  Matrix<double> m(1, static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double v : values) m(0, k++) = v;
  return aer_encode(m, factor, mode);
}

std::vector<int> as_vector(const SpikeTrain& s) {
  std::vector<int> out;
  for (Eigen::Index t = 0; t < s.cols(); ++t) out.push_back(s(0, t));
  return out;
}

Matrix<double> random_sample(std::uint64_t seed, int rows, int cols) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0, 1);
  Matrix<double> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

}  // namespace

TEST_CASE("hand-worked channels") {
  CHECK(as_vector(encode_row({5, 5, 5, 5})) == std::vector<int>{0, 0, 0, 0});
  CHECK(as_vector(encode_row({0, 1, 2, 3})) == std::vector<int>{0, 0, 0, 0});
  CHECK(as_vector(encode_row({0, 1, 0, 1})) == std::vector<int>{0, -1, 0, 0});
}

TEST_CASE("literal mode uses one threshold for both signs") {
  // diffs 1,-1,1,1: mean 0.5, sd 1, single threshold 1.0
  CHECK(as_vector(encode_row({0, 1, 0, 1}, 0.5, AerMode::Literal)) == std::vector<int>{0, -1, 0, 0});
  // diffs 0,3,0,0 -> mean 0.75, sd 1.5, threshold 1.5: step 1 fires +1, the rest sit below
  CHECK(as_vector(encode_row({0, 0, 3, 3}, 0.5, AerMode::Literal)) ==
        std::vector<int>{-1, 1, -1, -1});
  CHECK(as_vector(encode_row({0, 0, 3, 3}, 0.5, AerMode::Symmetric)) ==
        std::vector<int>{0, 1, 0, 0});
}

TEST_CASE("golden files from the reference script") {
  const auto input = read_csv_matrix(SPIKEREG_TEST_DATA "/aer_input.csv");
  REQUIRE(input.rows() == 10);
  REQUIRE(input.cols() == 64);
  const auto sym = read_spike_csv(SPIKEREG_TEST_DATA "/aer_golden_symmetric.csv");
  const auto lit = read_spike_csv(SPIKEREG_TEST_DATA "/aer_golden_literal.csv");
  CHECK(aer_encode(input, 0.5) == sym);
  CHECK(aer_encode(input, 0.5, AerMode::Literal) == lit);
}

TEST_CASE("output is ternary and shape-preserving") {
  const auto x = random_sample(3, 6, 40);
  const auto s = aer_encode(x, 0.5);
  CHECK(s.rows() == 6);
  CHECK(s.cols() == 40);
  CHECK((s.array().abs() <= 1).all());
}

TEST_CASE("negating the signal flips every symmetric event") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = random_sample(seed, 4, 50);
    const SpikeTrain neg = aer_encode(Matrix<double>(-x), 0.5);
    CHECK(neg == SpikeTrain(-aer_encode(x, 0.5)));
  }
}

TEST_CASE("invariant to positive power-of-two scaling and integer offsets") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Matrix<double> x = (random_sample(seed, 3, 60) * 100).array().round();
    const auto base = aer_encode(x, 0.5);
    CHECK(aer_encode(Matrix<double>(x * 8.0), 0.5) == base);
    CHECK(aer_encode(Matrix<double>(x.array() + 1000.0), 0.5) == base);
  }
}

TEST_CASE("deterministic and factor-monotone") {
  const auto x = random_sample(11, 5, 80);
  CHECK(aer_encode(x, 0.5) == aer_encode(x, 0.5));
  // A higher factor can only silence events.
  const auto lo = aer_encode(x, 0.25);
  const auto hi = aer_encode(x, 1.0);
  CHECK(hi.cwiseAbs().cast<int>().sum() <= lo.cwiseAbs().cast<int>().sum());
  for (Eigen::Index i = 0; i < hi.size(); ++i)
    if (hi.data()[i] != 0) CHECK(lo.data()[i] == hi.data()[i]);
}

TEST_CASE("float scalar instantiation agrees on clear-cut data") {
  Eigen::MatrixXf x(1, 4);
  x << 0, 1, 0, 1;
  const auto s = aer_encode(x, 0.5f);
  CHECK(as_vector(s) == std::vector<int>{0, -1, 0, 0});
}

TEST_CASE("invalid input") {
  Matrix<double> one(2, 1);
  one.setZero();
  CHECK_THROWS_AS(aer_encode(one, 0.5), Error);
  try {
    aer_encode(one, 0.5);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyChannel);
  }
  Matrix<double> nan = Matrix<double>::Zero(1, 4);
  nan(0, 2) = std::numeric_limits<double>::quiet_NaN();
  try {
    aer_encode(nan, 0.5);
    FAIL("expected NonFiniteInput");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteInput);
  }
}
