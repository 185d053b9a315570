#pragma once

#include <cstddef>
#include <vector>

#include "qcalab/types.hpp"

namespace qcalab {

// Splits a tensor-product index space into a chosen subsystem and the rest.
// full index = sub_off[s] + rest_off[r]; the subsystem digits follow the
// order of `positions`, the rest keeps the ambient order.
struct SplitIndex {
  std::vector<std::size_t> sub_off;
  std::vector<std::size_t> rest_off;
  std::size_t sub_dim = 1;
  std::size_t rest_dim = 1;
  std::size_t full_dim = 1;

  SplitIndex() = default;
  SplitIndex(const std::vector<int>& dims, const std::vector<int>& positions);
};

namespace kernels {

// Reference implementations: plain loops, no threading.
namespace serial {
Mat embed(const Mat& a, const SplitIndex& s);
Mat partial_trace(const Mat& x, const SplitIndex& s);
Mat reduced_density(const CVec& psi, const SplitIndex& s);
void apply_left(Mat& x, const Mat& g, const SplitIndex& s);
void apply_right(Mat& x, const Mat& g, const SplitIndex& s);
}  // namespace serial

// OpenMP versions. Every output entry is owned by one thread, so results
// are bitwise independent of the thread count.
namespace omp {
Mat embed(const Mat& a, const SplitIndex& s);
Mat partial_trace(const Mat& x, const SplitIndex& s);
Mat reduced_density(const CVec& psi, const SplitIndex& s);
void apply_left(Mat& x, const Mat& g, const SplitIndex& s);
void apply_right(Mat& x, const Mat& g, const SplitIndex& s);
}  // namespace omp

// a (on the subsystem) tensored with identity on the rest.
Mat embed(const Mat& a, const SplitIndex& s);
// Unnormalized trace over the rest.
Mat partial_trace(const Mat& x, const SplitIndex& s);
// rho_sub = tr_rest |psi><psi|
Mat reduced_density(const CVec& psi, const SplitIndex& s);
// x <- (g (x) I) x   and   x <- x (g (x) I)
void apply_left(Mat& x, const Mat& g, const SplitIndex& s);
void apply_right(Mat& x, const Mat& g, const SplitIndex& s);

// Reorders tensor factors: output factor k is input factor perm[k].
Mat permute_factors(const Mat& x, const std::vector<int>& dims, const std::vector<int>& perm);
CVec permute_factors(const CVec& v, const std::vector<int>& dims, const std::vector<int>& perm);

}  // namespace kernels
}  // namespace qcalab
