#include "doctest.h"

#include "qcalab/kernels.hpp"
#include "qcalab/linalg.hpp"

using namespace qcalab;

namespace {

Mat random_mat(int n, Rng& rng) { return random_complex(n, n, rng); }

}  // namespace

TEST_CASE("embed matches an explicit Kronecker product") {
  Rng rng(1);
  const Mat a = random_mat(3, rng);
  // dims {2, 3, 2}; subsystem = middle factor
  const SplitIndex s({2, 3, 2}, {1});
  const Mat want = kron(kron(Mat::Identity(2, 2), a), Mat::Identity(2, 2));
  CHECK((kernels::embed(a, s) - want).norm() < 1e-13);
}

TEST_CASE("subsystem digits follow the listed order") {
  Rng rng(2);
  const Mat a = random_mat(2, rng), b = random_mat(3, rng);
  const SplitIndex s({2, 3}, {1, 0});  // sub = (site 1, site 0)
  CHECK((kernels::embed(kron(b, a), s) - kron(a, b)).norm() < 1e-13);
}

TEST_CASE("partial trace of a product") {
  Rng rng(3);
  const Mat a = random_mat(2, rng), b = random_mat(4, rng);
  const SplitIndex s({2, 4}, {0});
  CHECK((kernels::partial_trace(kron(a, b), s) - b.trace() * a).norm() < 1e-12);
}

TEST_CASE("reduced density of a product state") {
  Rng rng(4);
  CVec u = random_complex(2, 1, rng).col(0), v = random_complex(3, 1, rng).col(0);
  u.normalize();
  v.normalize();
  CVec psi(6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) psi(i * 3 + j) = u(i) * v(j);
  const Mat rho = kernels::reduced_density(psi, SplitIndex({2, 3}, {1}));
  CHECK((rho - v * v.adjoint()).norm() < 1e-13);
}

TEST_CASE("serial and OpenMP kernels agree bitwise") {
  Rng rng(5);
  const std::vector<int> dims{2, 3, 2, 2};
  const SplitIndex s(dims, {2, 0});
  const Mat g = random_mat(4, rng);
  const Mat x = random_mat(24, rng);
  CHECK(kernels::serial::embed(g, s) == kernels::omp::embed(g, s));
  CHECK((kernels::serial::partial_trace(x, s) - kernels::omp::partial_trace(x, s)).norm() < 1e-12);
  Mat x1 = x, x2 = x;
  kernels::serial::apply_left(x1, g, s);
  kernels::omp::apply_left(x2, g, s);
  CHECK((x1 - x2).norm() < 1e-12);
  kernels::serial::apply_right(x1, g, s);
  kernels::omp::apply_right(x2, g, s);
  CHECK((x1 - x2).norm() < 1e-12);
  const CVec psi = random_complex(24, 1, rng).col(0);
  CHECK((kernels::serial::reduced_density(psi, s) - kernels::omp::reduced_density(psi, s)).norm() < 1e-12);
}

TEST_CASE("apply_left equals multiplication by the embedded gate") {
  Rng rng(6);
  const SplitIndex s({3, 2, 2}, {2, 1});
  const Mat g = random_mat(4, rng), x = random_mat(12, rng);
  Mat y = x;
  kernels::apply_left(y, g, s);
  CHECK((y - kernels::embed(g, s) * x).norm() < 1e-12);
  y = x;
  kernels::apply_right(y, g, s);
  CHECK((y - x * kernels::embed(g, s)).norm() < 1e-12);
}

TEST_CASE("permute_factors round trip") {
  Rng rng(7);
  const std::vector<int> dims{2, 3, 4};
  const Mat x = random_mat(24, rng);
  const std::vector<int> perm{2, 0, 1};
  const Mat y = kernels::permute_factors(x, dims, perm);
  const std::vector<int> pdims{4, 2, 3};
  const std::vector<int> inv{1, 2, 0};
  CHECK((kernels::permute_factors(y, pdims, inv) - x).norm() < 1e-13);
  // product operators move factor by factor
  const Mat a = random_mat(2, rng), b = random_mat(3, rng), c = random_mat(4, rng);
  CHECK((kernels::permute_factors(kron(kron(a, b), c), dims, perm) - kron(kron(c, a), b)).norm() < 1e-12);
}
