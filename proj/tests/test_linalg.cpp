#include <catch2/catch_amalgamated.hpp>

#include "encircle/linalg.hpp"
#include "encircle/rng.hpp"

using namespace encircle;

TEST_CASE("jacobi_eigen solves a known 2x2") {
  Matrix a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = 1;
  a(1, 0) = 1;
  a(1, 1) = 2;
  const SymEigen e = jacobi_eigen(a);
  REQUIRE(e.values[0] == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(e.values[1] == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("jacobi_eigen eigenpairs satisfy A v = lambda v") {
  const int n = 14;
  CounterRng rng(42);
  Matrix a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c) a(r, c) = a(c, r) = rng.uniform(-1, 1);
  const SymEigen e = jacobi_eigen(a);
  for (int k = 0; k < n; ++k) {
    for (int r = 0; r < n; ++r) {
      double av = 0.0;
      for (int c = 0; c < n; ++c) av += a(r, c) * e.vectors(c, k);
      REQUIRE(av == Catch::Approx(e.values[k] * e.vectors(r, k)).margin(1e-11));
    }
  }
  // eigenvalues ascending
  for (int k = 1; k < n; ++k) REQUIRE(e.values[k] >= e.values[k - 1]);
}

TEST_CASE("jacobi_eigen trace and identity cases") {
  REQUIRE(jacobi_eigen(Matrix::identity(5)).values[0] == Catch::Approx(1.0));
  Matrix z(4, 4);
  const SymEigen e = jacobi_eigen(z);
  for (double v : e.values) REQUIRE(v == 0.0);
}

TEST_CASE("jacobi_eigen rejects non-symmetric input") {
  Matrix a(2, 2);
  a(0, 1) = 1.0;
  REQUIRE_THROWS_AS(jacobi_eigen(a), NotSymmetric);
}

TEST_CASE("counter rng is reproducible and stream-stable") {
  CounterRng a(7), b(7), c(8);
  const double v1 = a.next_unit();
  REQUIRE(v1 == b.next_unit());
  REQUIRE(v1 != c.next_unit());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform(-3, 3);
    REQUIRE(u >= -3.0);
    REQUIRE(u < 3.0);
  }
  REQUIRE(derive_seed(1, 0) != derive_seed(1, 1));
  REQUIRE(derive_seed(1, 0) == derive_seed(1, 0));
}
