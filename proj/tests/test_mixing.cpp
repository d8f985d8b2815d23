#include "helpers.hpp"
#include "ubss/error.hpp"
#include "ubss/mixing.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace ubss;

TEST_CASE("mixing matrix construction enforces shape") {
  CHECK_THROWS_AS(MixingMatrix(Eigen::MatrixXd::Ones(3, 3)), ShapeError);
  CHECK_THROWS_AS(MixingMatrix(Eigen::MatrixXd::Ones(4, 3)), ShapeError);
  CHECK_THROWS_AS(MixingMatrix(Eigen::MatrixXd::Ones(1, 3)), ShapeError);
  Eigen::MatrixXd nan = Eigen::MatrixXd::Ones(2, 3);
  nan(1, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(MixingMatrix{nan}, InvalidMatrixError);
}

TEST_CASE("combinations are lexicographic") {
  const auto c = combinations(4, 2);
  REQUIRE(c.size() == 6);
  CHECK(c[0] == std::vector<std::size_t>{0, 1});
  CHECK(c[2] == std::vector<std::size_t>{0, 3});
  CHECK(c[5] == std::vector<std::size_t>{2, 3});
  CHECK(combinations(5, 3).size() == 10);
  CHECK(combinations(3, 0).size() == 1);
}

TEST_CASE("validate_mixing_matrix on the reference matrix matches cofactor determinants") {
  const ValidationReport r = validate_mixing_matrix(default_mixing_matrix(), 1e-9);
  CHECK(r.passed);
  REQUIRE(r.submatrix_results.size() == 4);
  // exact rational values of the four 3x3 minors
  const double frozen[] = {0.138125, 0.232875, 0.28075, 0.579};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& sub = r.submatrix_results[k];
    const double cof = std::abs(oracle::cofactor_det(oracle::columns(oracle::eq9(), sub.columns)));
    CHECK(sub.abs_determinant == doctest::Approx(cof).epsilon(1e-12));
    CHECK(sub.abs_determinant == doctest::Approx(frozen[k]).epsilon(1e-12));
  }
  CHECK(r.min_abs_determinant == doctest::Approx(0.138125).epsilon(1e-12));
}

TEST_CASE("validate_mixing_matrix flags a duplicated column") {
  Eigen::MatrixXd a(2, 3);
  a << 1, 0, 1,
       0, 1, 0;
  const ValidationReport r = validate_mixing_matrix(MixingMatrix(a), 1e-9);
  CHECK_FALSE(r.passed);
  CHECK(r.submatrix_results[1].columns == std::vector<std::size_t>{0, 2});
  CHECK(r.submatrix_results[1].abs_determinant == 0.0);
  CHECK_THROWS_AS(MixingMatrix::checked(a), InvalidMatrixError);
}

TEST_CASE("validate_mixing_matrix 2x3 with determinants 1, 1, -1") {
  Eigen::MatrixXd a(2, 3);
  a << 1, 0, 1,
       0, 1, 1;
  const ValidationReport r = validate_mixing_matrix(MixingMatrix(a), 1e-9);
  CHECK(r.passed);
  REQUIRE(r.submatrix_results.size() == 3);
  for (const auto& sub : r.submatrix_results)
    CHECK(sub.abs_determinant == doctest::Approx(1.0));
  CHECK_THROWS(validate_mixing_matrix(MixingMatrix(a), 0.0));
}

TEST_CASE("assumption check is invariant under column permutation") {
  Eigen::MatrixXd a = default_mixing_matrix().matrix();
  std::vector<int> perm{0, 1, 2, 3};
  do {
    Eigen::MatrixXd p(3, 4);
    for (int j = 0; j < 4; ++j)
      p.col(j) = a.col(perm[static_cast<std::size_t>(j)]);
    const ValidationReport r = validate_mixing_matrix(MixingMatrix(p));
    CHECK(r.passed);
    CHECK(r.min_abs_determinant == doctest::Approx(0.138125).epsilon(1e-12));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("a zero column is rejected at checked construction") {
  Eigen::MatrixXd a(2, 3);
  a << 2, 0, 0,
       0, 2, 0;
  CHECK_THROWS_AS(MixingMatrix::checked(a), InvalidMatrixError);
}

TEST_CASE("mix_block examples") {
  const MixingMatrix a = default_mixing_matrix();

  SUBCASE("zero sources") {
    FrameBlock s(std::vector<Frame>(4, Frame(3, 2)));
    const MixedBlock x = mix_block(a, s);
    REQUIRE(x.count() == 3);
    for (const Frame& f : x.frames())
      for (double v : f.pixels())
        CHECK(v == 0.0);
  }
  SUBCASE("constant 100 sources give 100 x row sums") {
    FrameBlock s(std::vector<Frame>(4, Frame(5, 4, 100.0)));
    const MixedBlock x = mix_block(a, s);
    const double expected[] = {165.0, 175.0, 165.0};
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(x[i].width() == 5);
      CHECK(x[i].height() == 4);
      for (double v : x[i].pixels())
        CHECK(v == doctest::Approx(expected[i]).epsilon(1e-14));
    }
  }
  SUBCASE("standard-basis sources copy rows of A") {
    std::vector<Frame> frames;
    for (std::size_t j = 0; j < 4; ++j) {
      Frame f(4, 1);
      f[j] = 1.0;
      frames.push_back(f);
    }
    const MixedBlock x = mix_block(a, FrameBlock(frames));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t t = 0; t < 4; ++t)
        CHECK(x[i][t] == a(i, t));
  }
  SUBCASE("frame count must match") {
    FrameBlock s(std::vector<Frame>(3, Frame(2, 2)));
    CHECK_THROWS_AS(mix_block(a, s), ShapeError);
  }
  SUBCASE("frames must share dimensions") {
    CHECK_THROWS_AS(FrameBlock({Frame(2, 2), Frame(2, 2), Frame(4, 2), Frame(2, 2)}), ShapeError);
  }
}

TEST_CASE("mix_block is linear") {
  std::mt19937_64 rng(7);
  const MixingMatrix a = default_mixing_matrix();
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  for (int trial = 0; trial < 25; ++trial) {
    const auto s1 = testing::random_frames(4, 6, 4, rng);
    const auto s2 = testing::random_frames(4, 6, 4, rng);
    const double alpha = coef(rng), beta = coef(rng);
    std::vector<Frame> combo;
    for (std::size_t j = 0; j < 4; ++j) {
      Frame f(6, 4);
      for (std::size_t t = 0; t < f.size(); ++t)
        f[t] = alpha * s1[j][t] + beta * s2[j][t];
      combo.push_back(f);
    }
    const MixedBlock x1 = mix_block(a, FrameBlock(s1));
    const MixedBlock x2 = mix_block(a, FrameBlock(s2));
    const MixedBlock xc = mix_block(a, FrameBlock(combo));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t t = 0; t < xc[i].size(); ++t) {
        const double expect = alpha * x1[i][t] + beta * x2[i][t];
        CHECK(std::abs(xc[i][t] - expect) <= 1e-9 * std::max(1.0, std::abs(expect)));
      }
  }
}

TEST_CASE("generalized_inverse") {
  SUBCASE("orthonormal rows") {
    Eigen::MatrixXd a(2, 3);
    a << 1, 0, 0,
         0, 1, 0;
    const Eigen::MatrixXd p = generalized_inverse(MixingMatrix(a));
    Eigen::MatrixXd expected(3, 2);
    expected << 1, 0,
                0, 1,
                0, 0;
    CHECK((p - expected).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("reference matrix right-inverse identity") {
    const MixingMatrix a = default_mixing_matrix();
    const Eigen::MatrixXd p = generalized_inverse(a);
    CHECK(p.rows() == 4);
    CHECK(p.cols() == 3);
    CHECK((a.matrix() * p - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);
    // A+ A equals the null-space projector built from cofactors
    const oracle::Mat proj = oracle::row_space_projector(oracle::eq9());
    CHECK((p * a.matrix() - testing::to_eigen(proj)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("rank-deficient rows are rejected") {
    Eigen::MatrixXd a(2, 3);
    a << 1, 2, 3,
         2, 4, 6;
    CHECK_THROWS_AS(generalized_inverse(MixingMatrix(a)), InvalidMatrixError);
  }
  SUBCASE("minimum-norm solution reproduces in-range vectors") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-50, 50);
    const MixingMatrix a = default_mixing_matrix();
    const Eigen::MatrixXd p = generalized_inverse(a);
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::Vector3d x(d(rng), d(rng), d(rng));
      const Eigen::VectorXd y = p * x;
      CHECK((a.matrix() * y - x).norm() <= 1e-9 * x.norm());
    }
  }
}

TEST_CASE("random matrices: pseudo-inverse identity holds whenever validation passes") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  int accepted = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index m = 2 + trial % 3;
    Eigen::MatrixXd a(m, m + 1 + trial % 2);
    for (Eigen::Index i = 0; i < a.size(); ++i)
      a(i) = d(rng);
    const MixingMatrix mm(a);
    if (!validate_mixing_matrix(mm, 1e-3).passed)
      continue;
    ++accepted;
    const Eigen::MatrixXd p = generalized_inverse(mm);
    CHECK((a * p - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-12);
  }
  CHECK(accepted > 100);
}

TEST_CASE("check_sparsity counts") {
  Eigen::MatrixXd s(4, 3);
  s.col(0) << 5, 0, -2, 0;
  s.col(1) << 1, 1, 1, 0;
  s.col(2) << 0, 0, 0, 0;
  const SparsityReport r = check_sparsity(s, 3);
  CHECK(r.max_nonzeros == 2);
  CHECK(r.worst_column_nonzeros == 3);
  CHECK_FALSE(r.satisfied);
  CHECK(r.satisfied_fraction == doctest::Approx(2.0 / 3.0));
  CHECK(r.histogram == std::vector<std::size_t>{1, 0, 1, 1, 0});

  const SparsityReport first = check_sparsity(s.leftCols(1), 3);
  CHECK(first.satisfied);

  const SparsityReport zero = check_sparsity(Eigen::MatrixXd::Zero(4, 10), 3);
  CHECK(zero.satisfied);
  CHECK(zero.satisfied_fraction == 1.0);
  CHECK(zero.histogram[0] == 10);

  FrameBlock block(std::vector<Frame>(4, Frame(2, 2, 1.0)));
  CHECK_FALSE(check_sparsity(block, 3).satisfied);
}
