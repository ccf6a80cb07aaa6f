#include "conic_ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chanres::conic::detail {

void pack_hermitian(const CMatrix& x, double* out) {
  const int m = static_cast<int>(x.rows());
  const double r2 = std::sqrt(2.0);
  int k = 0;
  for (int i = 0; i < m; ++i) out[k++] = x(i, i).real();
  for (int j = 0; j < m; ++j) {
    for (int i = j + 1; i < m; ++i) {
      const Complex v = 0.5 * (x(i, j) + std::conj(x(j, i)));
      out[k++] = r2 * v.real();
      out[k++] = r2 * v.imag();
    }
  }
}

CMatrix unpack_hermitian(const double* in, int m) {
  CMatrix x(m, m);
  const double r2 = 1.0 / std::sqrt(2.0);
  int k = 0;
  for (int i = 0; i < m; ++i) x(i, i) = in[k++];
  for (int j = 0; j < m; ++j) {
    for (int i = j + 1; i < m; ++i) {
      const Complex v(r2 * in[k], r2 * in[k + 1]);
      k += 2;
      x(i, j) = v;
      x(j, i) = std::conj(v);
    }
  }
  return x;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PsdBlock {
  int m;
  int off;
};

class Cones {
 public:
  explicit Cones(const ConeLayout& layout) : lp_(layout.lp), degree_(layout.degree()) {
    int off = layout.lp;
    for (int m : layout.psd) {
      blocks_.push_back({m, off});
      off += m * m;
    }
    total_ = off;
  }

  int lp() const { return lp_; }
  int total() const { return total_; }
  int degree() const { return degree_; }
  const std::vector<PsdBlock>& blocks() const { return blocks_; }

  CMatrix get(const RVector& v, const PsdBlock& b) const { return unpack_hermitian(v.data() + b.off, b.m); }
  void put(RVector& v, const PsdBlock& b, const CMatrix& x) const { pack_hermitian(x, v.data() + b.off); }

  RVector identity() const {
    RVector e = RVector::Zero(total_);
    e.head(lp_).setOnes();
    for (const auto& b : blocks_) put(e, b, CMatrix::Identity(b.m, b.m));
    return e;
  }

  /// Smallest "eigenvalue" over all cones.
  double min_eig(const RVector& v) const {
    double t = kInf;
    if (lp_ > 0) t = v.head(lp_).minCoeff();
    for (const auto& b : blocks_) {
      Eigen::SelfAdjointEigenSolver<CMatrix> es(get(v, b), Eigen::EigenvaluesOnly);
      t = std::min(t, es.eigenvalues()(0));
    }
    return t;
  }

  RVector sprod(const RVector& a, const RVector& c) const {
    RVector out(total_);
    out.head(lp_) = a.head(lp_).cwiseProduct(c.head(lp_));
    for (const auto& b : blocks_) {
      const CMatrix x = get(a, b);
      const CMatrix y = get(c, b);
      put(out, b, 0.5 * (x * y + y * x));
    }
    return out;
  }

 private:
  int lp_;
  int degree_;
  int total_ = 0;
  std::vector<PsdBlock> blocks_;
};

struct Scaling {
  RVector w;  // lp part
  std::vector<CMatrix> r, rinv;
  RVector lamLp;
  std::vector<RVector> lamPsd;
};

enum class Op { W, WT, WinvT, Winv };

RVector apply(const Cones& k, const Scaling& sc, Op op, const RVector& v) {
  RVector out(k.total());
  const int lp = k.lp();
  if (op == Op::W || op == Op::WT)
    out.head(lp) = v.head(lp).cwiseProduct(sc.w);
  else
    out.head(lp) = v.head(lp).cwiseQuotient(sc.w);
  for (std::size_t i = 0; i < k.blocks().size(); ++i) {
    const auto& b = k.blocks()[i];
    const CMatrix x = k.get(v, b);
    CMatrix y;
    switch (op) {
      case Op::W: y = sc.r[i].adjoint() * x * sc.r[i]; break;
      case Op::WT: y = sc.r[i] * x * sc.r[i].adjoint(); break;
      case Op::WinvT: y = sc.rinv[i] * x * sc.rinv[i].adjoint(); break;
      case Op::Winv: y = sc.rinv[i].adjoint() * x * sc.rinv[i]; break;
    }
    k.put(out, b, y);
  }
  return out;
}

RVector lambda_vec(const Cones& k, const Scaling& sc) {
  RVector out(k.total());
  out.head(k.lp()) = sc.lamLp;
  for (std::size_t i = 0; i < k.blocks().size(); ++i)
    k.put(out, k.blocks()[i], sc.lamPsd[i].cast<Complex>().asDiagonal().toDenseMatrix());
  return out;
}

RVector lambda_div(const Cones& k, const Scaling& sc, const RVector& r) {
  RVector out(k.total());
  out.head(k.lp()) = r.head(k.lp()).cwiseQuotient(sc.lamLp);
  for (std::size_t i = 0; i < k.blocks().size(); ++i) {
    const auto& b = k.blocks()[i];
    CMatrix x = k.get(r, b);
    const RVector& l = sc.lamPsd[i];
    for (int p = 0; p < b.m; ++p)
      for (int q = 0; q < b.m; ++q) x(p, q) *= 2.0 / (l(p) + l(q));
    k.put(out, b, x);
  }
  return out;
}

/// Largest step a with lambda + a d in the cone.
double max_step_scaled(const Cones& k, const Scaling& sc, const RVector& d) {
  double a = kInf;
  for (int i = 0; i < k.lp(); ++i)
    if (d(i) < 0) a = std::min(a, -sc.lamLp(i) / d(i));
  for (std::size_t i = 0; i < k.blocks().size(); ++i) {
    const auto& b = k.blocks()[i];
    const RVector inv = sc.lamPsd[i].cwiseSqrt().cwiseInverse();
    CMatrix x = k.get(d, b);
    x = inv.asDiagonal() * x * inv.asDiagonal();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(x, Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues()(0);
    if (mn < 0) a = std::min(a, -1.0 / mn);
  }
  return a;
}

bool compute_scaling(const Cones& k, const RVector& s, const RVector& z, Scaling& sc) {
  const int lp = k.lp();
  if (lp > 0) {
    if (s.head(lp).minCoeff() <= 0 || z.head(lp).minCoeff() <= 0) return false;
    sc.w = s.head(lp).cwiseQuotient(z.head(lp)).cwiseSqrt();
    sc.lamLp = s.head(lp).cwiseProduct(z.head(lp)).cwiseSqrt();
  } else {
    sc.w.resize(0);
    sc.lamLp.resize(0);
  }
  sc.r.clear();
  sc.rinv.clear();
  sc.lamPsd.clear();
  for (const auto& b : k.blocks()) {
    Eigen::LLT<CMatrix> ls(k.get(s, b));
    Eigen::LLT<CMatrix> lz(k.get(z, b));
    if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    const CMatrix Ls = ls.matrixL();
    const CMatrix Lz = lz.matrixL();
    Eigen::JacobiSVD<CMatrix> svd(Lz.adjoint() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const RVector sig = svd.singularValues();
    if (sig.minCoeff() <= 0) return false;
    const CMatrix& V = svd.matrixV();
    const RVector isq = sig.cwiseSqrt().cwiseInverse();
    CMatrix r = Ls * V * isq.asDiagonal();
    // R^{-1} = Sigma^{1/2} V^H Ls^{-1}
    CMatrix lsinv = Ls.triangularView<Eigen::Lower>().solve(CMatrix::Identity(b.m, b.m));
    CMatrix rinv = sig.cwiseSqrt().asDiagonal() * V.adjoint() * lsinv;
    sc.r.push_back(std::move(r));
    sc.rinv.push_back(std::move(rinv));
    sc.lamPsd.push_back(sig);
  }
  return true;
}

Scaling identity_scaling(const Cones& k) {
  Scaling sc;
  sc.w = RVector::Ones(k.lp());
  sc.lamLp = RVector::Ones(k.lp());
  for (const auto& b : k.blocks()) {
    sc.r.push_back(CMatrix::Identity(b.m, b.m));
    sc.rinv.push_back(CMatrix::Identity(b.m, b.m));
    sc.lamPsd.push_back(RVector::Ones(b.m));
  }
  return sc;
}

// Solves  [0 A' G'; A 0 0; G 0 -W'W] [dx; dy; dz] = [r1; r2; r3].
class Kkt {
 public:
  Kkt(const RMatrix& G, const RMatrix& A, const Cones& k) : G_(G), A_(A), k_(k) {}

  bool factor(const Scaling& sc) {
    sc_ = &sc;
    const int n = static_cast<int>(G_.cols());
    M_.resize(G_.rows(), n);
    const int lp = k_.lp();
    if (lp > 0) M_.topRows(lp) = sc.w.cwiseInverse().asDiagonal() * G_.topRows(lp);
    for (std::size_t i = 0; i < k_.blocks().size(); ++i) {
      const auto& b = k_.blocks()[i];
      for (int j = 0; j < n; ++j) {
        const CMatrix x = unpack_hermitian(G_.col(j).data() + b.off, b.m);
        pack_hermitian(sc.rinv[i] * x * sc.rinv[i].adjoint(), M_.col(j).data() + b.off);
      }
    }
    RMatrix H = RMatrix::Zero(n, n);
    H.selfadjointView<Eigen::Lower>().rankUpdate(M_.transpose());
    if (A_.rows() > 0) H.selfadjointView<Eigen::Lower>().rankUpdate(A_.transpose());
    H = H.selfadjointView<Eigen::Lower>();
    if (!chol(H, hllt_)) return false;
    if (A_.rows() > 0) {
      RMatrix Y = hllt_.matrixL().solve(A_.transpose());
      RMatrix S = Y.transpose() * Y;
      if (!chol(S, sllt_)) return false;
    }
    return true;
  }

  // Returns dx, dy, dz; wdz = W dz.
  void solve(const RVector& r1, const RVector& r2, const RVector& r3, RVector& dx, RVector& dy,
             RVector& dz, RVector& wdz) const {
    raw(r1, r2, r3, dx, dy, wdz);
    // one step of iterative refinement on the full system
    dz = apply(k_, *sc_, Op::Winv, wdz);
    const RVector e1 = r1 - (A_.rows() ? RVector(A_.transpose() * dy) : RVector::Zero(r1.size())) -
                       G_.transpose() * dz;
    const RVector e2 = r2 - A_ * dx;
    const RVector e3 = r3 - (G_ * dx - apply(k_, *sc_, Op::WT, wdz));
    RVector cx, cy, cw;
    raw(e1, e2, e3, cx, cy, cw);
    dx += cx;
    dy += cy;
    wdz += cw;
    dz = apply(k_, *sc_, Op::Winv, wdz);
  }

 private:
  static bool chol(RMatrix& H, Eigen::LLT<RMatrix>& llt) {
    const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
    double delta = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      RMatrix Hr = H;
      Hr.diagonal().array() += delta;
      llt.compute(Hr);
      if (llt.info() == Eigen::Success) return true;
      delta = delta == 0.0 ? 1e-14 * scale : delta * 100.0;
    }
    return false;
  }

  void raw(const RVector& r1, const RVector& r2, const RVector& r3, RVector& dx, RVector& dy,
           RVector& wdz) const {
    const RVector t = apply(k_, *sc_, Op::WinvT, r3);
    RVector g = r1 + M_.transpose() * t;
    if (A_.rows() > 0) {
      g += A_.transpose() * r2;
      const RVector hg = hllt_.solve(g);
      dy = sllt_.solve(A_ * hg - r2);
      dx = hllt_.solve(g - A_.transpose() * dy);
    } else {
      dy.resize(0);
      dx = hllt_.solve(g);
    }
    wdz = M_ * dx - t;
  }

  const RMatrix& G_;
  const RMatrix& A_;
  const Cones& k_;
  const Scaling* sc_ = nullptr;
  RMatrix M_;
  Eigen::LLT<RMatrix> hllt_;
  Eigen::LLT<RMatrix> sllt_;
};

struct Presolved {
  RMatrix A;
  RVector b;
  std::vector<int> rows;  // kept original rows
  bool inconsistent = false;
  RVector ray;  // full-length y certificate when inconsistent
};

Presolved presolve(const RMatrix& A, const RVector& b) {
  Presolved p;
  const int m = static_cast<int>(A.rows());
  if (m == 0) {
    p.A = A;
    p.b = b;
    return p;
  }
  Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(A);
  const RVector xls = cod.solve(b);
  const RVector res = A * xls - b;
  const double rn = res.norm();
  if (rn > 1e-8 * (1.0 + b.norm())) {
    p.inconsistent = true;
    p.ray = res / (rn * rn);
    return p;
  }
  Eigen::ColPivHouseholderQR<RMatrix> qr(A.transpose());
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  std::vector<int> keep(qr.colsPermutation().indices().data(),
                        qr.colsPermutation().indices().data() + rank);
  std::sort(keep.begin(), keep.end());
  p.rows = keep;
  p.A.resize(rank, A.cols());
  p.b.resize(rank);
  for (int i = 0; i < rank; ++i) {
    p.A.row(i) = A.row(keep[i]);
    p.b(i) = b(keep[i]);
  }
  return p;
}

double nrm1(const RVector& v) { return std::max(1.0, v.norm()); }

}  // namespace

StandardResult solve_standard(const StandardForm& prob, const Settings& st) {
  const Cones k(prob.cones);
  const int n = static_cast<int>(prob.c.size());
  const int pFull = static_cast<int>(prob.b.size());
  StandardResult out;

  Presolved pre = presolve(prob.A, prob.b);
  if (pre.inconsistent) {
    out.status = Status::Infeasible;
    out.x = RVector::Zero(n);
    out.y = pre.ray;
    out.z = RVector::Zero(k.total());
    out.s = RVector::Zero(k.total());
    out.primal = kInf;
    out.dual = kInf;
    out.message = "inconsistent equality constraints";
    return out;
  }
  const RMatrix& A = pre.A;
  const RVector& b = pre.b;
  const RMatrix& G = prob.G;
  const RVector& h = prob.h;
  const RVector& c = prob.c;

  auto expand_y = [&](const RVector& y) {
    RVector full = RVector::Zero(pFull);
    for (std::size_t i = 0; i < pre.rows.size(); ++i) full(pre.rows[i]) = y(static_cast<int>(i));
    return full;
  };

  const RVector e = k.identity();
  Kkt kkt(G, A, k);

  // initial point
  RVector x, y, z, s;
  {
    const Scaling id = identity_scaling(k);
    if (!kkt.factor(id)) {
      out.status = Status::Inaccurate;
      out.message = "singular KKT system at start";
      out.x = RVector::Zero(n);
      out.y = RVector::Zero(pFull);
      out.z = out.s = RVector::Zero(k.total());
      return out;
    }
    RVector dz, wdz;
    kkt.solve(RVector::Zero(n), b, h, x, y, dz, wdz);
    s = -dz;
    RVector x2;
    kkt.solve(-c, RVector::Zero(b.size()), RVector::Zero(k.total()), x2, y, z, wdz);
    const double ts = -k.min_eig(s);
    if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;
    const double tz = -k.min_eig(z);
    if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
  }
  double tau = 1.0, kappa = 1.0;

  const double resx0 = nrm1(c), resy0 = nrm1(b), resz0 = nrm1(h);
  const double nu = k.degree();

  struct Best {
    bool set = false;
    double score = kInf;
    RVector x, y, z, s;
    double pcost = 0, dcost = 0, gap = 0, pres = 0, dres = 0;
  } best;

  auto finish = [&](Status status, const RVector& xx, const RVector& yy, const RVector& zz,
                    const RVector& ss, double pc, double dc, double gp, double pr, double dr,
                    int it, std::string msg) {
    out.status = status;
    out.x = xx;
    out.y = expand_y(yy);
    out.z = zz;
    out.s = ss;
    out.primal = pc;
    out.dual = dc;
    out.gap = gp;
    out.pres = pr;
    out.dres = dr;
    out.iterations = it;
    out.message = std::move(msg);
    return out;
  };

  Scaling sc;
  int iter = 0;
  for (; iter <= st.maxIterations; ++iter) {
    // residuals
    const RVector rx = (A.rows() ? RVector(A.transpose() * y) : RVector::Zero(n)) + G.transpose() * z +
                       c * tau;
    const RVector ry = b * tau - A * x;
    const RVector rz = h * tau - G * x - s;
    const double cx = c.dot(x), by = b.dot(y), hz = h.dot(z);
    const double rt = -cx - by - hz - kappa;

    const double pcost = cx / tau;
    const double dcost = -(by + hz) / tau;
    const double gap = s.dot(z) / (tau * tau);
    const double pres = std::max((A * x / tau - b).norm() / resy0, (G * x / tau + s / tau - h).norm() / resz0);
    const double dres = rx.norm() / tau / resx0;
    const double gapm = std::max(gap, std::abs(pcost - dcost)) /
                        std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));

    if (pres <= st.feastol && dres <= st.feastol && (gapm <= st.abstol || gapm <= st.reltol))
      return finish(Status::Optimal, x / tau, y / tau, z / tau, s / tau, pcost, dcost, gapm, pres, dres,
                    iter, "optimal");

    const double score = std::max({pres, dres, gapm});
    if (score < best.score) {
      best.set = true;
      best.score = score;
      best.x = x / tau;
      best.y = y / tau;
      best.z = z / tau;
      best.s = s / tau;
      best.pcost = pcost;
      best.dcost = dcost;
      best.gap = gapm;
      best.pres = pres;
      best.dres = dres;
    }

    if (hz + by < 0) {
      const RVector aty = (A.rows() ? RVector(A.transpose() * y) : RVector::Zero(n)) + G.transpose() * z;
      const double pinf = aty.norm() / resx0 / (-(hz + by));
      if (pinf <= st.feastol) {
        const double sc0 = -(hz + by);
        return finish(Status::Infeasible, RVector::Zero(n), y / sc0, z / sc0, RVector::Zero(k.total()),
                      kInf, kInf, 0.0, pres, dres, iter, "primal infeasible");
      }
    }
    if (cx < 0) {
      const double dinf = std::max((A * x).norm() / resy0, (G * x + s).norm() / resz0) / (-cx);
      if (dinf <= st.feastol)
        return finish(Status::Unbounded, x / (-cx), RVector::Zero(b.size()), RVector::Zero(k.total()),
                      s / (-cx), -kInf, -kInf, 0.0, pres, dres, iter, "dual infeasible");
    }
    if (iter == st.maxIterations) break;

    if (!compute_scaling(k, s, z, sc)) break;
    if (!kkt.factor(sc)) break;

    const RVector lam = lambda_vec(k, sc);
    const RVector lamsq = k.sprod(lam, lam);
    const double mu = (lam.dot(lam) + tau * kappa) / (nu + 1.0);

    RVector x1, y1, z1, w1;
    kkt.solve(-c, b, h, x1, y1, z1, w1);
    const double q1 = c.dot(x1) + b.dot(y1) + h.dot(z1);
    if (std::abs(kappa / tau - q1) < 1e-300) break;

    struct Dir {
      RVector dx, dy, dz, wdz, dst;
      double dtau, dkappa;
    };
    auto direction = [&](double gamma, const RVector& rc, double rk) {
      Dir d;
      const RVector ldiv = lambda_div(k, sc, rc);
      RVector x2, y2, z2, w2;
      kkt.solve(-gamma * rx, gamma * ry, gamma * rz - apply(k, sc, Op::WT, ldiv), x2, y2, z2, w2);
      const double q2 = c.dot(x2) + b.dot(y2) + h.dot(z2);
      d.dtau = (-gamma * rt + q2 + rk / tau) / (kappa / tau - q1);
      d.dkappa = (rk - kappa * d.dtau) / tau;
      d.dx = x2 + d.dtau * x1;
      d.dy = y2 + d.dtau * y1;
      d.dz = z2 + d.dtau * z1;
      d.wdz = w2 + d.dtau * w1;
      d.dst = ldiv - d.wdz;
      return d;
    };
    auto step_len = [&](const Dir& d) {
      double a = std::min(max_step_scaled(k, sc, d.dst), max_step_scaled(k, sc, d.wdz));
      if (d.dtau < 0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    const Dir aff = direction(1.0, -lamsq, -tau * kappa);
    const double aa = std::min(1.0, step_len(aff));
    const double sigma = std::pow(1.0 - aa, 3);
    RVector rc = -lamsq - k.sprod(aff.dst, aff.wdz) + sigma * mu * e;
    const double rk = -tau * kappa - aff.dtau * aff.dkappa + sigma * mu;
    const Dir d = direction(1.0 - sigma, rc, rk);
    const double alpha = std::min(1.0, 0.99 * step_len(d));
    if (!(alpha > 1e-12)) break;

    x += alpha * d.dx;
    y += alpha * d.dy;
    z += alpha * d.dz;
    s += alpha * apply(k, sc, Op::WT, d.dst);
    tau += alpha * d.dtau;
    kappa += alpha * d.dkappa;
  }

  if (best.set && best.pres <= st.accepted && best.dres <= st.accepted && best.gap <= st.accepted)
    return finish(Status::Optimal, best.x, best.y, best.z, best.s, best.pcost, best.dcost, best.gap,
                  best.pres, best.dres, iter, "optimal (reduced accuracy)");
  if (best.set)
    return finish(Status::Inaccurate, best.x, best.y, best.z, best.s, best.pcost, best.dcost, best.gap,
                  best.pres, best.dres, iter, "stalled before reaching tolerance");
  return finish(Status::Inaccurate, RVector::Zero(n), RVector::Zero(b.size()), RVector::Zero(k.total()),
                RVector::Zero(k.total()), 0, 0, 0, kInf, kInf, iter, "numerical failure");
}

}  // namespace chanres::conic::detail
