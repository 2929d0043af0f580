#include "pik/pinv.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <limits>

#include "pik/random_system.hpp"

using namespace pik;
using Catch::Approx;

namespace {

double spectral_norm(const Mat& A) {
  if (A.size() == 0) return 0.0;
  return A.jacobiSvd().singularValues()(0);
}

Mat random_orthogonal(Rng& rng, int n) {
  const Mat A = random_matrix(rng, n, n);
  Eigen::HouseholderQR<Mat> qr(A);
  return qr.householderQ();
}

}  // namespace

TEST_CASE("moore_penrose textbook cases", "[pinv]") {
  SECTION("zero matrix maps to transposed zero") {
    const Mat P = moore_penrose(Mat::Zero(2, 3));
    REQUIRE(P.rows() == 3);
    REQUIRE(P.cols() == 2);
    REQUIRE(P.norm() == 0.0);
  }

  SECTION("rank-deficient diagonal inverts only the nonzero entry") {
    Mat A = Mat::Zero(2, 2);
    A(0, 0) = 2.0;
    const Mat P = moore_penrose(A);
    REQUIRE(P(0, 0) == Approx(0.5).margin(1e-15));
    REQUIRE(P(1, 1) == Approx(0.0).margin(1e-15));
    REQUIRE(P(0, 1) == Approx(0.0).margin(1e-15));
    REQUIRE(P(1, 0) == Approx(0.0).margin(1e-15));
  }

  SECTION("full-rank wide matrix reconstructs") {
    Rng rng(42);
    const Mat A = random_matrix(rng, 4, 6);
    const Mat P = moore_penrose(A);
    REQUIRE((A * P * A - A).norm() <= 1e-10 * A.norm());
  }

  SECTION("zero-dimension input is rejected") {
    REQUIRE_THROWS_AS(moore_penrose(Mat(0, 3)), std::domain_error);
    REQUIRE_THROWS_AS(moore_penrose(Mat(2, 0)), std::domain_error);
  }

  SECTION("non-finite input is rejected") {
    Mat A = Mat::Ones(2, 2);
    A(1, 1) = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(moore_penrose(A), data_error);
  }
}

TEST_CASE("moore_penrose satisfies the Penrose identities over random ranks", "[pinv][property]") {
  Rng rng(12345);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int m = 1 + static_cast<int>(rng.below(8));
    const int n = 1 + static_cast<int>(rng.below(8));
    const int rank = static_cast<int>(rng.below(static_cast<uint64_t>(std::min(m, n)) + 1));
    const Mat A = random_matrix_with_rank(rng, m, n, rank);
    const Mat P = moore_penrose(A);

    const double sa = std::max(1.0, A.norm());
    const double sp = std::max(1.0, P.norm());
    worst = std::max(worst, (A * P * A - A).norm() / sa);
    worst = std::max(worst, (P * A * P - P).norm() / sp);
    worst = std::max(worst, ((A * P).transpose() - A * P).norm());
    worst = std::max(worst, ((P * A).transpose() - P * A).norm());
  }
  REQUIRE(worst <= 1e-9);
}

TEST_CASE("extended_damped_pinv limit behavior", "[pinv]") {
  Rng rng(7);
  const Mat A = random_matrix(rng, 3, 4);

  SECTION("infinite damping gives the zero map") {
    const Mat Z = extended_damped_pinv(A, DampingValue::inf());
    REQUIRE(Z.rows() == 4);
    REQUIRE(Z.cols() == 3);
    REQUIRE(Z.norm() == 0.0);
  }

  SECTION("zero damping reduces to the pseudoinverse") {
    const Mat D = extended_damped_pinv(A, DampingValue::finite(0.0));
    REQUIRE((D - moore_penrose(A)).norm() <= 1e-14);
  }

  SECTION("scalar case: sigma/(sigma^2 + lambda^2)") {
    const Mat one = Mat::Constant(1, 1, 1.0);
    const Mat D = extended_damped_pinv(one, DampingValue::finite(1.0));
    REQUIRE(D(0, 0) == Approx(0.5).margin(1e-15));
  }

  SECTION("negative damping is rejected") {
    REQUIRE_THROWS_AS(extended_damped_pinv(A, DampingValue::finite(-1.0)), std::domain_error);
  }
}

TEST_CASE("damping_value follows the determinant schedule", "[pinv]") {
  const Mat zero1 = Mat::Zero(1, 1);
  const Mat one1 = Mat::Constant(1, 1, 1.0);

  SECTION("singular block with positive mu saturates") {
    const DampingValue lam = damping_value(zero1, 1.0, 1);
    REQUIRE(lam.infinite);
  }

  SECTION("regular block gets mu^2 / |M|^nu") {
    const DampingValue lam = damping_value(one1, 1.0, 1);
    REQUIRE_FALSE(lam.infinite);
    REQUIRE(lam.value == Approx(1.0));

    const DampingValue lam2 = damping_value(Mat::Constant(1, 1, 4.0), 2.0, 2);
    REQUIRE(lam2.value == Approx(0.25));
  }

  SECTION("mu = 0 switches damping off regardless of nu") {
    const DampingValue lam = damping_value(Mat::Constant(1, 1, 0.5), 0.0, 3);
    REQUIRE(lam.is_zero());
  }

  SECTION("nu = 0 means constant damping, 0^0 = 1") {
    const DampingValue lam = damping_value(zero1, 2.0, 0);
    REQUIRE_FALSE(lam.infinite);
    REQUIRE(lam.value == Approx(4.0));
  }

  SECTION("invalid arguments") {
    REQUIRE_THROWS_AS(damping_value(Mat::Zero(2, 3), 1.0, 1), std::domain_error);
    REQUIRE_THROWS_AS(damping_value(one1, -1.0, 1), std::domain_error);
    REQUIRE_THROWS_AS(damping_value(one1, 1.0, -1), std::domain_error);
  }
}

TEST_CASE("pinv_norm_bound reports the pair (m1, m2)", "[pinv]") {
  SECTION("zero matrix: m1 = 0") {
    const NormBoundPair nb = pinv_norm_bound(Mat::Zero(2, 2), 1.0, 2.0);
    REQUIRE(nb.m1 == 0.0);
  }

  SECTION("identity with nu = 0: (1, 1/2mu)") {
    const NormBoundPair nb = pinv_norm_bound(Mat::Identity(2, 2), 1.0, 0.0);
    REQUIRE(nb.m1 == Approx(1.0));
    REQUIRE(nb.m2 == Approx(0.5));
  }

  SECTION("mu = 0 pushes m2 to infinity") {
    const NormBoundPair nb = pinv_norm_bound(Mat::Identity(2, 2), 0.0, 1.0);
    REQUIRE(std::isinf(nb.m2));
  }

  SECTION("constructed singular values recompute exactly") {
    Rng rng(99);
    const Mat U = random_orthogonal(rng, 3);
    const Mat V = random_orthogonal(rng, 5);
    Mat S = Mat::Zero(3, 5);
    S(0, 0) = 2.0;
    S(1, 1) = 1.0;
    S(2, 2) = 0.5;
    const Mat A = U * S * V.transpose();

    const NormBoundPair nb = pinv_norm_bound(A, 0.4, 2.0);
    // m1 = 1/0.5, m2 = (2^2 * 1^2 * 0.5^2) / (2 * 0.4)
    REQUIRE(nb.m1 == Approx(2.0).epsilon(1e-9));
    REQUIRE(nb.m2 == Approx(1.25).epsilon(1e-9));
  }
}

TEST_CASE("damped pseudoinverse norm stays within min(m1, m2)", "[pinv][property]") {
  Rng rng(2024);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    const int m = 1 + static_cast<int>(rng.below(6));
    const int n = 1 + static_cast<int>(rng.below(6));
    const int full = std::min(m, n);
    int rank = full;
    if (i % 3 == 1) rank = std::max(full - 1, 0);
    if (i % 5 == 1) rank = 0;
    const double mu = (i % 7 == 0) ? 0.0 : rng.uniform(1e-3, 1.0);
    const int nu = static_cast<int>(rng.below(4));
    const Mat A = random_matrix_with_rank(rng, m, n, rank);

    const DampingValue lam = damping_value(A * A.transpose(), mu, nu);
    const Mat A_star = extended_damped_pinv(A, lam);
    const double norm = spectral_norm(A_star);
    const NormBoundPair nb = pinv_norm_bound(A, mu, static_cast<double>(nu));

    REQUIRE(norm <= std::min(nb.m1, nb.m2) + 1e-9);
    if (mu > 0.0) {
      const double smax = spectral_norm(A);
      REQUIRE(norm <= std::pow(smax, static_cast<double>(nu * full)) / (2.0 * mu) + 1e-9);
      ++checked;
    }
  }
  REQUIRE(checked > 500);
}

TEST_CASE("damped pseudoinverse vanishes continuously with the matrix", "[pinv][property]") {
  Rng rng(31);
  const Mat A = random_matrix(rng, 3, 3);
  const double mu = 0.5;
  const int nu = 1;

  double prev = std::numeric_limits<double>::infinity();
  double last = 0.0;
  for (int k = 1; k <= 8; ++k) {
    const double eps = std::pow(10.0, -k);
    const Mat Ae = eps * A;
    const DampingValue lam = damping_value(Ae * Ae.transpose(), mu, nu);
    last = spectral_norm(extended_damped_pinv(Ae, lam));
    REQUIRE(last <= prev + 1e-12);
    prev = last;
  }
  REQUIRE(last < 1e-6);
}
