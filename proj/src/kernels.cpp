#include "qcalab/kernels.hpp"

#include <algorithm>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qcalab {

SplitIndex::SplitIndex(const std::vector<int>& dims, const std::vector<int>& positions) {
  const int n = static_cast<int>(dims.size());
  std::vector<std::size_t> stride(n, 1);
  for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * static_cast<std::size_t>(dims[k + 1]);
  full_dim = n ? stride[0] * static_cast<std::size_t>(dims[0]) : 1;

  std::vector<char> in_sub(n, 0);
  for (int p : positions) {
    if (p < 0 || p >= n || in_sub[p]) throw Error(ErrorCode::InvalidArgument, "bad subsystem position");
    in_sub[p] = 1;
  }
  std::vector<int> rest;
  for (int k = 0; k < n; ++k)
    if (!in_sub[k]) rest.push_back(k);

  auto offsets = [&](const std::vector<int>& pos) {
    std::size_t total = 1;
    for (int p : pos) total *= static_cast<std::size_t>(dims[p]);
    std::vector<std::size_t> off(total, 0);
    // last position varies fastest
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx, o = 0;
      for (int k = static_cast<int>(pos.size()) - 1; k >= 0; --k) {
        const std::size_t d = static_cast<std::size_t>(dims[pos[k]]);
        o += (rem % d) * stride[pos[k]];
        rem /= d;
      }
      off[idx] = o;
    }
    return off;
  };
  sub_off = offsets(positions);
  rest_off = offsets(rest);
  sub_dim = sub_off.size();
  rest_dim = rest_off.size();
}

namespace kernels {

namespace serial {

Mat embed(const Mat& a, const SplitIndex& s) {
  Mat out = Mat::Zero(s.full_dim, s.full_dim);
  for (std::size_t r = 0; r < s.rest_dim; ++r)
    for (std::size_t i = 0; i < s.sub_dim; ++i)
      for (std::size_t j = 0; j < s.sub_dim; ++j)
        out(s.sub_off[i] + s.rest_off[r], s.sub_off[j] + s.rest_off[r]) = a(i, j);
  return out;
}

Mat partial_trace(const Mat& x, const SplitIndex& s) {
  Mat out = Mat::Zero(s.sub_dim, s.sub_dim);
  for (std::size_t i = 0; i < s.sub_dim; ++i)
    for (std::size_t j = 0; j < s.sub_dim; ++j) {
      cplx acc = 0.0;
      for (std::size_t r = 0; r < s.rest_dim; ++r)
        acc += x(s.sub_off[i] + s.rest_off[r], s.sub_off[j] + s.rest_off[r]);
      out(i, j) = acc;
    }
  return out;
}

Mat reduced_density(const CVec& psi, const SplitIndex& s) {
  Mat out = Mat::Zero(s.sub_dim, s.sub_dim);
  for (std::size_t i = 0; i < s.sub_dim; ++i)
    for (std::size_t j = 0; j < s.sub_dim; ++j) {
      cplx acc = 0.0;
      for (std::size_t r = 0; r < s.rest_dim; ++r)
        acc += psi(s.sub_off[i] + s.rest_off[r]) * std::conj(psi(s.sub_off[j] + s.rest_off[r]));
      out(i, j) = acc;
    }
  return out;
}

void apply_left(Mat& x, const Mat& g, const SplitIndex& s) {
  CVec buf(s.sub_dim), res(s.sub_dim);
  for (Eigen::Index c = 0; c < x.cols(); ++c)
    for (std::size_t r = 0; r < s.rest_dim; ++r) {
      for (std::size_t i = 0; i < s.sub_dim; ++i) buf(i) = x(s.sub_off[i] + s.rest_off[r], c);
      res.noalias() = g * buf;
      for (std::size_t i = 0; i < s.sub_dim; ++i) x(s.sub_off[i] + s.rest_off[r], c) = res(i);
    }
}

void apply_right(Mat& x, const Mat& g, const SplitIndex& s) {
  Eigen::RowVectorXcd buf(s.sub_dim), res(s.sub_dim);
  for (Eigen::Index row = 0; row < x.rows(); ++row)
    for (std::size_t r = 0; r < s.rest_dim; ++r) {
      for (std::size_t i = 0; i < s.sub_dim; ++i) buf(i) = x(row, s.sub_off[i] + s.rest_off[r]);
      res.noalias() = buf * g;
      for (std::size_t i = 0; i < s.sub_dim; ++i) x(row, s.sub_off[i] + s.rest_off[r]) = res(i);
    }
}

}  // namespace serial

namespace omp {

Mat embed(const Mat& a, const SplitIndex& s) {
  Mat out = Mat::Zero(s.full_dim, s.full_dim);
  const long long nr = static_cast<long long>(s.rest_dim);
#pragma omp parallel for schedule(static)
  for (long long r = 0; r < nr; ++r)
    for (std::size_t j = 0; j < s.sub_dim; ++j) {
      const std::size_t col = s.sub_off[j] + s.rest_off[r];
      for (std::size_t i = 0; i < s.sub_dim; ++i) out(s.sub_off[i] + s.rest_off[r], col) = a(i, j);
    }
  return out;
}

Mat partial_trace(const Mat& x, const SplitIndex& s) {
  Mat out = Mat::Zero(s.sub_dim, s.sub_dim);
  const long long n = static_cast<long long>(s.sub_dim * s.sub_dim);
#pragma omp parallel for schedule(static)
  for (long long e = 0; e < n; ++e) {
    const std::size_t i = static_cast<std::size_t>(e) % s.sub_dim;
    const std::size_t j = static_cast<std::size_t>(e) / s.sub_dim;
    cplx acc = 0.0;
    const std::size_t oi = s.sub_off[i], oj = s.sub_off[j];
    for (std::size_t r = 0; r < s.rest_dim; ++r) acc += x(oi + s.rest_off[r], oj + s.rest_off[r]);
    out(i, j) = acc;
  }
  return out;
}

Mat reduced_density(const CVec& psi, const SplitIndex& s) {
  // Reshape into a sub x rest matrix, then rho = M M^dagger.
  Mat m(s.sub_dim, s.rest_dim);
  const long long nr = static_cast<long long>(s.rest_dim);
#pragma omp parallel for schedule(static)
  for (long long r = 0; r < nr; ++r)
    for (std::size_t i = 0; i < s.sub_dim; ++i) m(i, r) = psi(s.sub_off[i] + s.rest_off[r]);
  Mat out(s.sub_dim, s.sub_dim);
  out.noalias() = m * m.adjoint();
  return out;
}

void apply_left(Mat& x, const Mat& g, const SplitIndex& s) {
  const long long nc = x.cols();
#pragma omp parallel
  {
    CVec buf(s.sub_dim), res(s.sub_dim);
#pragma omp for schedule(static)
    for (long long c = 0; c < nc; ++c)
      for (std::size_t r = 0; r < s.rest_dim; ++r) {
        for (std::size_t i = 0; i < s.sub_dim; ++i) buf(i) = x(s.sub_off[i] + s.rest_off[r], c);
        res.noalias() = g * buf;
        for (std::size_t i = 0; i < s.sub_dim; ++i) x(s.sub_off[i] + s.rest_off[r], c) = res(i);
      }
  }
}

void apply_right(Mat& x, const Mat& g, const SplitIndex& s) {
  // one column block per rest index, so the inner step is a dense product
  const long long nr = static_cast<long long>(s.rest_dim);
  const Eigen::Index rows = x.rows();
#pragma omp parallel
  {
    Mat blk(rows, s.sub_dim), res(rows, s.sub_dim);
#pragma omp for schedule(static)
    for (long long r = 0; r < nr; ++r) {
      for (std::size_t i = 0; i < s.sub_dim; ++i) blk.col(i) = x.col(s.sub_off[i] + s.rest_off[r]);
      res.noalias() = blk * g;
      for (std::size_t i = 0; i < s.sub_dim; ++i) x.col(s.sub_off[i] + s.rest_off[r]) = res.col(i);
    }
  }
}

}  // namespace omp

Mat embed(const Mat& a, const SplitIndex& s) { return omp::embed(a, s); }
Mat partial_trace(const Mat& x, const SplitIndex& s) { return omp::partial_trace(x, s); }
Mat reduced_density(const CVec& psi, const SplitIndex& s) { return omp::reduced_density(psi, s); }
void apply_left(Mat& x, const Mat& g, const SplitIndex& s) { omp::apply_left(x, g, s); }
void apply_right(Mat& x, const Mat& g, const SplitIndex& s) { omp::apply_right(x, g, s); }

namespace {
std::vector<std::size_t> permutation_map(const std::vector<int>& dims, const std::vector<int>& perm) {
  // out factor k = in factor perm[k]; returns in-index for each out-index
  const int n = static_cast<int>(dims.size());
  std::vector<int> out_dims(n);
  for (int k = 0; k < n; ++k) out_dims[k] = dims[perm[k]];
  std::vector<std::size_t> in_stride(n, 1);
  for (int k = n - 2; k >= 0; --k) in_stride[k] = in_stride[k + 1] * dims[k + 1];
  std::size_t total = 1;
  for (int d : dims) total *= d;
  std::vector<std::size_t> map(total);
  std::vector<int> digit(n, 0);
  for (std::size_t o = 0; o < total; ++o) {
    std::size_t in = 0;
    for (int k = 0; k < n; ++k) in += digit[k] * in_stride[perm[k]];
    map[o] = in;
    for (int k = n - 1; k >= 0; --k) {
      if (++digit[k] < out_dims[k]) break;
      digit[k] = 0;
    }
  }
  return map;
}
}  // namespace

Mat permute_factors(const Mat& x, const std::vector<int>& dims, const std::vector<int>& perm) {
  const auto map = permutation_map(dims, perm);
  const Eigen::Index n = static_cast<Eigen::Index>(map.size());
  Mat out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = x(map[i], map[j]);
  return out;
}

CVec permute_factors(const CVec& v, const std::vector<int>& dims, const std::vector<int>& perm) {
  const auto map = permutation_map(dims, perm);
  CVec out(static_cast<Eigen::Index>(map.size()));
  for (std::size_t i = 0; i < map.size(); ++i) out(i) = v(map[i]);
  return out;
}

}  // namespace kernels
}  // namespace qcalab
