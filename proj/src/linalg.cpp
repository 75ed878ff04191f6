#include "varalg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace varalg {

JacobiEigen jacobi_eigen(const Eigen::MatrixXd& symmetric) {
  const int n = static_cast<int>(symmetric.rows());
  Eigen::MatrixXd a = symmetric;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  const double norm = a.norm();
  const double target = 1e-12 * (norm > 0 ? norm : 1.0);

  auto off_norm = [&a, n]() {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps && off_norm() > target; ++sweep) {
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Rotation angle per the classical two-by-two diagonalization.
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&a](int i, int j) { return a(i, i) < a(j, j); });

  JacobiEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

SpdMatrix make_spd(const Eigen::MatrixXd& raw) {
  if (raw.rows() != raw.cols())
    throw DimensionMismatch("make_spd: matrix is not square (" +
                            std::to_string(raw.rows()) + "x" +
                            std::to_string(raw.cols()) + ")");
  if (raw.rows() == 0) throw DimensionMismatch("make_spd: empty matrix");
  if (!raw.allFinite()) throw BadParams("make_spd: non-finite entries");

  const double max_abs = raw.cwiseAbs().maxCoeff();
  const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * (max_abs > 0 ? max_abs : 1.0))
    throw NotSymmetric("make_spd: max |a_ij - a_ji| = " + std::to_string(asym) +
                       " exceeds 1e-9 relative tolerance");

  SpdMatrix m;
  m.entries_ = 0.5 * (raw + raw.transpose());

  JacobiEigen eig = jacobi_eigen(m.entries_);
  m.spectrum_ = eig.values;
  m.eigenvectors_ = eig.vectors;

  const double lo = m.spectrum_(0);
  const double hi = m.spectrum_(m.spectrum_.size() - 1);
  if (!(lo > 1e-12 * std::max(hi, 0.0)))
    throw NotPositiveDefinite(
        "make_spd: not positive definite (lambda_1 = " + std::to_string(lo) +
            ")",
        lo);

  m.ones_form_ = m.entries_.sum();  // equals Tr(A) + 2 sum_{i<j} a_ij
  return m;
}

NormBoundCheck verify_norm_bounds(const SpdMatrix& A, const Eigen::VectorXd& u) {
  if (u.size() != A.n())
    throw DimensionMismatch("verify_norm_bounds: dim(u) = " +
                            std::to_string(u.size()) + ", expected " +
                            std::to_string(A.n()));
  NormBoundCheck out;
  out.quad_form = u.dot(A.entries() * u);
  const double slack = 1e-10 * (1.0 + std::abs(out.quad_form));
  const double nsq = u.squaredNorm();
  out.lower_ok = A.lambda_min() * nsq <= out.quad_form + slack;
  out.upper_ok = out.quad_form <= A.lambda_max() * nsq + slack;
  const double inf = u.size() ? u.cwiseAbs().maxCoeff() : 0.0;
  out.infnorm_ok =
      inf <= std::sqrt(std::max(out.quad_form, 0.0) / A.lambda_min()) + slack;
  return out;
}

SignConditionVerdict check_sign_conditions(const SpdMatrix& A) {
  const int n = A.n();
  const Eigen::MatrixXd& a = A.entries();
  SignConditionVerdict v;
  v.a1_holds = true;
  for (int i = 0; i < n && v.a1_holds; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && a(i, j) > 0.0) {
        v.a1_holds = false;
        break;
      }

  v.a2_witnesses.assign(std::max(n - 1, 0), std::nullopt);
  bool all_rows = n >= 1;
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      if (a(i, j) < 0.0) {
        v.a2_witnesses[i - 1] = j + 1;  // 1-based column index
        break;
      }
    }
    if (!v.a2_witnesses[i - 1]) all_rows = false;
  }
  v.a2_holds = v.a1_holds && all_rows;
  return v;
}

Eigen::VectorXd solve_spd(const SpdMatrix& A, const Eigen::VectorXd& b) {
  if (b.size() != A.n())
    throw DimensionMismatch("solve_spd: dim(b) = " + std::to_string(b.size()) +
                            ", expected " + std::to_string(A.n()));
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A.entries());
  Eigen::VectorXd x = ldlt.solve(b);
  // One step of iterative refinement keeps the residual at the contract level
  // for mildly conditioned inputs.
  x += ldlt.solve(b - A.entries() * x);
  return x;
}

}  // namespace varalg
