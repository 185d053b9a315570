#pragma once

#include <random>
#include <vector>

#include "qcalab/types.hpp"

namespace qcalab {

using Rng = std::mt19937_64;

// Hilbert-Schmidt inner product normalized so that <I, I> = 1.
cplx hs_inner(const Mat& a, const Mat& b);
double hs_norm(const Mat& a);

double op_norm(const Mat& a);
double min_singular(const Mat& a);
Mat hermitian_part(const Mat& a);

// Unitary factor of the polar decomposition y = u |y|.
Mat polar_unitary(const Mat& y, double* smin = nullptr);

// exp(i t H) for Hermitian H via eigendecomposition.
Mat exp_i_hermitian(const Mat& h, double t);
// Eigenvalues and eigenvectors of a normal matrix (Schur form).
void normal_eig(const Mat& u, CVec& evals, Mat& evecs);
// Principal logarithm of a unitary; throws LogBranchFailure when an
// eigenvalue sits within `margin` of -1.
Mat log_unitary(const Mat& u, double margin);
// Principal power y^s of a normal matrix with spectrum off the negative axis.
Mat normal_power(const Mat& y, double s);

// Orthogonal projector onto the eigenspace of Hermitian h with eigenvalue > cut.
Mat spectral_projector(const Mat& h, double cut);

Mat haar_unitary(int n, Rng& rng);
Mat random_hermitian(int n, Rng& rng);
Mat random_complex(int n, int m, Rng& rng);

// Multiplies by a global phase so that the trace is real positive, or, for
// (near) traceless matrices, the largest-magnitude entry.
Mat fix_phase(const Mat& u);

// Distance between two matrices after optimal global phase alignment.
double phase_distance(const Mat& a, const Mat& b);

Mat kron(const Mat& a, const Mat& b);

// Pauli matrices and generalized Weyl operators X^a Z^b on C^d.
Mat pauli(char c);
Mat weyl(int d, int a, int b);

bool is_unitary(const Mat& u, double tol);

}  // namespace qcalab
