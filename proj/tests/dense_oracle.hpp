#pragma once

// Brute-force dense reference for small registers: Kronecker-product Pauli
// matrices and full-matrix exponentials, independent of the block-sparse code.

#include <complex>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "tvqs/ansatz.hpp"
#include "tvqs/qsim.hpp"

namespace dense {

using Mat = Eigen::MatrixXcd;
using cplx = std::complex<double>;

inline Mat pauli(tvqs::qsim::Axis a) {
  Mat m(2, 2);
  switch (a) {
    case tvqs::qsim::Axis::X:
      m << 0, 1, 1, 0;
      break;
    case tvqs::qsim::Axis::Y:
      m << 0, cplx(0, -1), cplx(0, 1), 0;
      break;
    case tvqs::qsim::Axis::Z:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Qubit i is bit i of the index, so qubit n-1 is the leftmost Kronecker factor.
inline Mat term(const tvqs::qsim::PauliString& p, int n) {
  std::vector<Mat> site(static_cast<std::size_t>(n), Mat::Identity(2, 2));
  for (const auto& f : p.factors) site[static_cast<std::size_t>(f.qubit)] = pauli(f.axis);
  Mat out = Mat::Identity(1, 1);
  for (int q = n - 1; q >= 0; --q) out = kron(out, site[static_cast<std::size_t>(q)]);
  return p.coeff * out;
}

inline Mat hamiltonian(const std::vector<tvqs::qsim::PauliString>& terms, int n) {
  const auto dim = Eigen::Index{1} << n;
  Mat h = Mat::Zero(dim, dim);
  for (const auto& t : terms) h += term(t, n);
  return h;
}

inline Mat expm_hermitian(const Mat& h, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Eigen::VectorXcd phase(h.rows());
  for (Eigen::Index k = 0; k < h.rows(); ++k) phase(k) = std::polar(1.0, -t * es.eigenvalues()(k));
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

inline Mat rz_layer(std::span<const double> thetas) {
  Mat out = Mat::Identity(1, 1);
  for (int q = static_cast<int>(thetas.size()) - 1; q >= 0; --q) {
    Mat r = Mat::Zero(2, 2);
    r(0, 0) = std::polar(1.0, -0.5 * thetas[static_cast<std::size_t>(q)]);
    r(1, 1) = std::polar(1.0, 0.5 * thetas[static_cast<std::size_t>(q)]);
    out = kron(out, r);
  }
  return out;
}

inline Mat circuit(const tvqs::ansatz::CircuitParams& params, const tvqs::ansatz::EntanglerSpec& spec) {
  const int n = params.n_qubits();
  const Mat ug = expm_hermitian(hamiltonian(spec.hamiltonian(), n), spec.tau);
  Mat u = Mat::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n);
  for (int k = 0; k < params.depth(); ++k) {
    const Mat r = rz_layer(params.layer(k));
    u = (spec.order == tvqs::ansatz::LayerOrder::EntanglerFirst ? Mat(r * ug) : Mat(ug * r)) * u;
  }
  return u;
}

inline Eigen::VectorXcd to_eigen(const tvqs::qsim::StateVector& s) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t j = 0; j < s.dim(); ++j) v(static_cast<Eigen::Index>(j)) = s[j];
  return v;
}

}  // namespace dense
