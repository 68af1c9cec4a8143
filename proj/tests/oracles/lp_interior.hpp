#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace oracle {

// Infeasible-start primal-dual path-following method for
//   min c'x  s.t.  A x <= b,  x >= 0
// written in standard form with slacks. Independent of the library's simplex.
struct IpmResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  int iterations = 0;
};

inline IpmResult lp_interior_point(const Eigen::VectorXd& c, const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                   double tol = 1e-12, int max_iter = 500) {
  const Eigen::Index m = a.rows(), nx = a.cols(), n = nx + m;
  Eigen::MatrixXd abar(m, n);
  abar << a, Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd cbar = Eigen::VectorXd::Zero(n);
  cbar.head(nx) = c;

  Eigen::VectorXd z = Eigen::VectorXd::Ones(n), s = Eigen::VectorXd::Ones(n), lam = Eigen::VectorXd::Zero(m);
  const double scale = 1.0 + std::max(b.cwiseAbs().maxCoeff(), c.cwiseAbs().maxCoeff());
  IpmResult out;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd rp = abar * z - b;
    const Eigen::VectorXd rd = abar.transpose() * lam + s - cbar;
    const double mu = z.dot(s) / static_cast<double>(n);
    out.iterations = it;
    if (rp.lpNorm<Eigen::Infinity>() < tol * scale && rd.lpNorm<Eigen::Infinity>() < tol * scale && mu < tol * scale)
      break;
    const Eigen::VectorXd d = z.cwiseQuotient(s);

    auto solve = [&](const Eigen::VectorXd& rc, Eigen::VectorXd& dz, Eigen::VectorXd& dl, Eigen::VectorXd& ds) {
      // S dz + Z ds = rc, A dz = -rp, A' dl + ds = -rd
      const Eigen::MatrixXd m_mat = abar * d.asDiagonal() * abar.transpose();
      const Eigen::VectorXd rhs = -rp - abar * (d.cwiseProduct(rd) + rc.cwiseQuotient(s));
      dl = m_mat.ldlt().solve(rhs);
      dz = d.cwiseProduct(abar.transpose() * dl + rd) + rc.cwiseQuotient(s);
      ds = (rc - s.cwiseProduct(dz)).cwiseQuotient(z);
    };
    auto max_step = [](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
      double t = 1.0;
      for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv(i) < 0) t = std::min(t, -v(i) / dv(i));
      return t;
    };

    // Mehrotra predictor-corrector
    Eigen::VectorXd dz, dl, ds;
    solve(-z.cwiseProduct(s), dz, dl, ds);
    const double ap = max_step(z, dz), ad = max_step(s, ds);
    const double mu_aff = (z + ap * dz).dot(s + ad * ds) / static_cast<double>(n);
    const double sigma = std::pow(mu_aff / mu, 3);
    const Eigen::VectorXd rc =
        -z.cwiseProduct(s) - dz.cwiseProduct(ds) + Eigen::VectorXd::Constant(n, sigma * mu);
    solve(rc, dz, dl, ds);
    const double tp = std::min(1.0, 0.995 * max_step(z, dz));
    const double td = std::min(1.0, 0.995 * max_step(s, ds));
    z += tp * dz;
    lam += td * dl;
    s += td * ds;
    if (it + 1 == max_iter) throw std::runtime_error("lp_interior_point: no convergence");
  }
  out.x = z.head(nx);
  out.objective = c.dot(out.x);
  return out;
}

}  // namespace oracle
