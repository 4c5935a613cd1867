#include "mg/fem.hpp"

#include <algorithm>
#include <cmath>

namespace mg {

namespace {

struct Gauss1D {
  std::array<double, 3> pts{};
  std::array<double, 3> wts{};
  int n = 0;
};

Gauss1D gauss_rule(int npts) {
  Gauss1D g;
  g.n = npts;
  if (npts == 2) {
    const double a = 1.0 / std::sqrt(3.0);
    g.pts = {-a, a, 0};
    g.wts = {1.0, 1.0, 0};
  } else {
    const double a = std::sqrt(0.6);
    g.pts = {-a, 0.0, a};
    g.wts = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  }
  return g;
}

void lagrange1d(int order, double x, double* N, double* dN) {
  if (order == 1) {
    N[0] = 0.5 * (1.0 - x);
    N[1] = 0.5 * (1.0 + x);
    dN[0] = -0.5;
    dN[1] = 0.5;
  } else {
    N[0] = 0.5 * x * (x - 1.0);
    N[1] = 1.0 - x * x;
    N[2] = 0.5 * x * (x + 1.0);
    dN[0] = x - 0.5;
    dN[1] = -2.0 * x;
    dN[2] = x + 0.5;
  }
}

// Accumulate element triplets into the matrix in batches to bound the
// triplet buffer for 81x81 elasticity blocks.
class BatchedSparse {
 public:
  BatchedSparse(Eigen::Index n, std::size_t flush_at = 8'000'000)
      : acc_(n, n), flush_at_(flush_at) {
    acc_.setZero();
  }
  void add(int i, int j, double v) {
    trips_.emplace_back(i, j, v);
    if (trips_.size() >= flush_at_) flush();
  }
  Eigen::SparseMatrix<double> take() {
    flush();
    acc_.makeCompressed();
    return std::move(acc_);
  }

 private:
  void flush() {
    if (trips_.empty()) return;
    Eigen::SparseMatrix<double> part(acc_.rows(), acc_.cols());
    part.setFromTriplets(trips_.begin(), trips_.end());
    acc_ += part;
    trips_.clear();
  }
  Eigen::SparseMatrix<double> acc_;
  std::vector<Eigen::Triplet<double>> trips_;
  std::size_t flush_at_;
};

}  // namespace

ShapeFns shape_eval(int order, const std::array<double, 3>& xi) {
  if (order != 1 && order != 2) throw Error("element order must be 1 or 2");
  for (double c : xi)
    if (std::abs(c) > 1.0 + 1e-12)
      throw Error("local coordinate outside [-1,1]^3");
  ShapeFns s;
  const int n1 = order + 1;
  double N[3][3], dN[3][3];
  for (int ax = 0; ax < 3; ++ax) lagrange1d(order, xi[ax], N[ax], dN[ax]);
  s.count = n1 * n1 * n1;
  int idx = 0;
  for (int dk = 0; dk < n1; ++dk)
    for (int dj = 0; dj < n1; ++dj)
      for (int di = 0; di < n1; ++di, ++idx) {
        s.values[idx] = N[0][di] * N[1][dj] * N[2][dk];
        s.gradients[idx] = {dN[0][di] * N[1][dj] * N[2][dk],
                            N[0][di] * dN[1][dj] * N[2][dk],
                            N[0][di] * N[1][dj] * dN[2][dk]};
      }
  return s;
}

Eigen::VectorXd SparseSystem::expand(const Eigen::VectorXd& x_free) const {
  Eigen::VectorXd full(dofs.free_index.size());
  for (std::size_t i = 0; i < dofs.free_index.size(); ++i)
    full[(Eigen::Index)i] = dofs.free_index[i] >= 0
                                ? x_free[dofs.free_index[i]]
                                : dofs.fixed_value[i];
  return full;
}

Eigen::VectorXd solve_spd(const SparseSystem& s, const SolveOptions& opts,
                          SolveReport* report) {
  SolveReport local;
  SolveReport& rep = report ? *report : local;
  const Eigen::Index n = s.A.rows();
  if (n == 0) return Eigen::VectorXd();
  if (!(opts.rel_tol > 0) || opts.rel_tol > 1e-3)
    throw Error("rel_tol must be in (0, 1e-3]");

  const double bnorm = s.b.norm();
  if (bnorm == 0.0) {
    rep.rel_residual = 0.0;
    return Eigen::VectorXd::Zero(n);
  }

  auto try_direct = [&](Eigen::VectorXd& out) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(s.A);
    if (ldlt.info() != Eigen::Success) return false;
    out = ldlt.solve(s.b);
    // one step of iterative refinement
    out += ldlt.solve(s.b - s.A * out);
    rep.rel_residual = (s.b - s.A * out).norm() / bnorm;
    rep.used_direct = true;
    return rep.rel_residual <= opts.rel_tol;
  };

  if (n >= opts.direct_threshold) {
    Eigen::VectorXd x;
    if (try_direct(x)) return x;
  }

  // Jacobi-preconditioned conjugate gradients.
  Eigen::VectorXd invdiag(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = s.A.coeff(i, i);
    if (!(d > 0)) throw Error("matrix not positive definite (diagonal)");
    invdiag[i] = 1.0 / d;
  }
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = s.b;
  Eigen::VectorXd z = invdiag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);
  rep.used_direct = false;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Eigen::VectorXd Ap = s.A * p;
    const double pAp = p.dot(Ap);
    if (!(pAp > 0)) throw Error("matrix not positive definite (pAp <= 0)");
    const double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    const double rel = r.norm() / bnorm;
    rep.history.push_back(rel);
    rep.iterations = it + 1;
    if (rel <= opts.rel_tol) {
      rep.rel_residual = rel;
      return x;
    }
    z = invdiag.cwiseProduct(r);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  // CG hit the cap; a sparse factorization gets one last chance.
  Eigen::VectorXd xd;
  if (try_direct(xd)) return xd;
  throw Error("solve_spd did not converge: rel residual " +
              std::to_string(rep.history.empty() ? 1.0 : rep.history.back()) +
              " after " + std::to_string(rep.iterations) + " iterations");
}

ScalarAssembly assemble_scalar(const Mesh& m, const ScalarProblem& p) {
  const std::size_t ne = m.element_count();
  const std::size_t nn = m.node_count();
  if (p.coeff.size() != ne)
    throw Error("assemble_scalar: coefficient count does not match elements");
  if (!p.active.empty() && p.active.size() != ne)
    throw Error("assemble_scalar: active mask size mismatch");

  const int npe = m.nodes_per_element();
  const Gauss1D g = gauss_rule(m.order + 1);

  BatchedSparse acc((Eigen::Index)nn);
  Eigen::VectorXd b_full = Eigen::VectorXd::Zero((Eigen::Index)nn);
  std::vector<std::int8_t> touched(nn, 0);

  std::vector<std::array<double, 3>> grad(npe);
  for (std::size_t e = 0; e < ne; ++e) {
    if (!p.active.empty() && !p.active[e]) continue;
    const double c = p.coeff[e];
    const auto& box = m.element_box[e];
    const double hx = box[1] - box[0], hy = box[3] - box[2],
                 hz = box[5] - box[4];
    const double detj = hx * hy * hz / 8.0;
    const double sx = 2.0 / hx, sy = 2.0 / hy, sz = 2.0 / hz;
    const auto& conn = m.elements[e];
    for (int a : conn) touched[a] = 1;

    Eigen::MatrixXd Ke = Eigen::MatrixXd::Zero(npe, npe);
    Eigen::VectorXd fe = Eigen::VectorXd::Zero(npe);
    const double q = p.source_density.empty() ? 0.0 : p.source_density[e];
    for (int kq = 0; kq < g.n; ++kq)
      for (int jq = 0; jq < g.n; ++jq)
        for (int iq = 0; iq < g.n; ++iq) {
          const auto s =
              shape_eval(m.order, {g.pts[iq], g.pts[jq], g.pts[kq]});
          const double w = g.wts[iq] * g.wts[jq] * g.wts[kq] * detj;
          for (int a = 0; a < npe; ++a)
            grad[a] = {s.gradients[a][0] * sx, s.gradients[a][1] * sy,
                       s.gradients[a][2] * sz};
          for (int a = 0; a < npe; ++a) {
            for (int bnode = 0; bnode < npe; ++bnode)
              Ke(a, bnode) += c * w *
                              (grad[a][0] * grad[bnode][0] +
                               grad[a][1] * grad[bnode][1] +
                               grad[a][2] * grad[bnode][2]);
            if (q != 0.0) fe(a) += q * w * s.values[a];
          }
        }
    for (int a = 0; a < npe; ++a) {
      b_full[conn[a]] += fe(a);
      for (int bnode = 0; bnode < npe; ++bnode)
        acc.add(conn[a], conn[bnode], Ke(a, bnode));
    }
  }

  // Robin boundary terms: h * int N_a N_b dA and h*T_amb * int N_a dA.
  if (p.robin_h > 0.0) {
    const int nfp = (m.order + 1) * (m.order + 1);
    for (int fi : p.robin_facets) {
      const Facet& f = m.facets[fi];
      const double ja = f.area / 4.0;
      double N1[2][3], dN1[2][3];
      for (int bq = 0; bq < g.n; ++bq)
        for (int aq = 0; aq < g.n; ++aq) {
          lagrange1d(m.order, g.pts[aq], N1[0], dN1[0]);
          lagrange1d(m.order, g.pts[bq], N1[1], dN1[1]);
          const double w = g.wts[aq] * g.wts[bq] * ja * p.robin_h;
          for (int bnode = 0; bnode < nfp; ++bnode) {
            const double Nb =
                N1[0][bnode % (m.order + 1)] * N1[1][bnode / (m.order + 1)];
            b_full[f.nodes[bnode]] += w * p.robin_ambient * Nb;
            for (int anode = 0; anode < nfp; ++anode) {
              const double Na =
                  N1[0][anode % (m.order + 1)] * N1[1][anode / (m.order + 1)];
              acc.add(f.nodes[anode], f.nodes[bnode], w * Na * Nb);
            }
          }
        }
    }
  }

  ScalarAssembly out;
  out.A_full = acc.take();
  out.b_full = b_full;

  // Reduce: drop untouched nodes and eliminate Dirichlet ones.
  DofMap& dm = out.sys.dofs;
  dm.components = 1;
  dm.free_index.assign(nn, -1);
  dm.fixed_value.assign(nn, 0.0);
  std::vector<std::int8_t> is_fixed(nn, 0);
  for (const auto& [node, value] : p.dirichlet) {
    is_fixed[node] = 1;
    dm.fixed_value[node] = value;
  }
  for (std::size_t i = 0; i < nn; ++i)
    if (touched[i] && !is_fixed[i]) dm.free_index[i] = dm.n_free++;

  std::vector<Eigen::Triplet<double>> trips;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dm.n_free);
  for (std::size_t i = 0; i < nn; ++i)
    if (dm.free_index[i] >= 0) b[dm.free_index[i]] = b_full[(Eigen::Index)i];
  for (int col = 0; col < out.A_full.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(out.A_full, col); it;
         ++it) {
      const int fi = dm.free_index[it.row()];
      const int fj = dm.free_index[it.col()];
      if (fi >= 0 && fj >= 0)
        trips.emplace_back(fi, fj, it.value());
      else if (fi >= 0 && is_fixed[it.col()])
        b[fi] -= it.value() * dm.fixed_value[it.col()];
    }
  out.sys.A.resize(dm.n_free, dm.n_free);
  out.sys.A.setFromTriplets(trips.begin(), trips.end());
  out.sys.A.makeCompressed();
  out.sys.b = b;
  return out;
}

SparseSystem assemble_elastic(const Mesh& m, const ElasticProblem& p) {
  const std::size_t ne = m.element_count();
  const std::size_t nn = m.node_count();
  if (p.youngs.size() != ne || p.poisson.size() != ne)
    throw Error("assemble_elastic: material arrays do not match elements");
  const bool thermal = p.temperature != nullptr;
  if (thermal && p.tce.size() != ne)
    throw Error("assemble_elastic: tce array does not match elements");

  const int npe = m.nodes_per_element();
  const int ndof = 3 * npe;
  const Gauss1D g = gauss_rule(m.order + 1);

  SparseSystem sys;
  DofMap& dm = sys.dofs;
  dm.components = 3;
  dm.free_index.assign(3 * nn, -1);
  dm.fixed_value.assign(3 * nn, 0.0);
  std::vector<std::int8_t> is_fixed(3 * nn, 0);
  for (int node : p.fixed_nodes)
    for (int c = 0; c < 3; ++c) is_fixed[3 * node + c] = 1;
  for (const auto& [dof, value] : p.dirichlet) {
    is_fixed[dof] = 1;
    dm.fixed_value[dof] = value;
  }
  for (std::size_t i = 0; i < 3 * nn; ++i)
    if (!is_fixed[i]) dm.free_index[i] = dm.n_free++;

  BatchedSparse acc(dm.n_free);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dm.n_free);

  Eigen::Matrix<double, 6, 6> D;
  Eigen::MatrixXd B(6, ndof);
  std::vector<std::array<double, 3>> grad(npe);
  std::vector<int> gdof(ndof);

  for (std::size_t e = 0; e < ne; ++e) {
    const double E = p.youngs[e], nu = p.poisson[e];
    const double lam = E * nu / ((1 + nu) * (1 - 2 * nu));
    const double mu = E / (2 * (1 + nu));
    D.setZero();
    D(0, 0) = D(1, 1) = D(2, 2) = lam + 2 * mu;
    D(0, 1) = D(0, 2) = D(1, 0) = D(1, 2) = D(2, 0) = D(2, 1) = lam;
    D(3, 3) = D(4, 4) = D(5, 5) = mu;

    const auto& box = m.element_box[e];
    const double hx = box[1] - box[0], hy = box[3] - box[2],
                 hz = box[5] - box[4];
    const double detj = hx * hy * hz / 8.0;
    const double sx = 2.0 / hx, sy = 2.0 / hy, sz = 2.0 / hz;
    const auto& conn = m.elements[e];

    Eigen::MatrixXd Ke = Eigen::MatrixXd::Zero(ndof, ndof);
    Eigen::VectorXd fe = Eigen::VectorXd::Zero(ndof);
    for (int kq = 0; kq < g.n; ++kq)
      for (int jq = 0; jq < g.n; ++jq)
        for (int iq = 0; iq < g.n; ++iq) {
          const auto s =
              shape_eval(m.order, {g.pts[iq], g.pts[jq], g.pts[kq]});
          const double w = g.wts[iq] * g.wts[jq] * g.wts[kq] * detj;
          for (int a = 0; a < npe; ++a)
            grad[a] = {s.gradients[a][0] * sx, s.gradients[a][1] * sy,
                       s.gradients[a][2] * sz};
          B.setZero();
          for (int a = 0; a < npe; ++a) {
            // Voigt order xx,yy,zz,xy,yz,zx with engineering shear.
            B(0, 3 * a + 0) = grad[a][0];
            B(1, 3 * a + 1) = grad[a][1];
            B(2, 3 * a + 2) = grad[a][2];
            B(3, 3 * a + 0) = grad[a][1];
            B(3, 3 * a + 1) = grad[a][0];
            B(4, 3 * a + 1) = grad[a][2];
            B(4, 3 * a + 2) = grad[a][1];
            B(5, 3 * a + 0) = grad[a][2];
            B(5, 3 * a + 2) = grad[a][0];
          }
          Ke.noalias() += w * B.transpose() * D * B;
          if (thermal) {
            double dT = 0.0;
            for (int a = 0; a < npe; ++a)
              dT += s.values[a] * (*p.temperature)[conn[a]];
            dT -= p.reference_temperature;
            Eigen::Matrix<double, 6, 1> eps_th;
            eps_th << p.tce[e] * dT, p.tce[e] * dT, p.tce[e] * dT, 0, 0, 0;
            fe.noalias() += w * B.transpose() * (D * eps_th);
          }
        }

    for (int a = 0; a < npe; ++a)
      for (int c = 0; c < 3; ++c) gdof[3 * a + c] = 3 * conn[a] + c;
    for (int i = 0; i < ndof; ++i) {
      const int fi = dm.free_index[gdof[i]];
      if (fi < 0) continue;
      b[fi] += fe(i);
      for (int j = 0; j < ndof; ++j) {
        const int fj = dm.free_index[gdof[j]];
        if (fj >= 0)
          acc.add(fi, fj, Ke(i, j));
        else
          b[fi] -= Ke(i, j) * dm.fixed_value[gdof[j]];
      }
    }
  }

  sys.A = acc.take();
  sys.b = b;

  // Penalty springs (contact): diagonal stiffness plus pull toward the
  // spring target.
  if (!p.springs.empty()) {
    std::vector<Eigen::Triplet<double>> trips;
    for (const auto& sp : p.springs) {
      const int fi = dm.free_index[3 * sp.node + sp.comp];
      if (fi < 0) continue;
      trips.emplace_back(fi, fi, sp.stiffness);
      b[fi] += sp.stiffness * sp.target;
    }
    Eigen::SparseMatrix<double> extra(dm.n_free, dm.n_free);
    extra.setFromTriplets(trips.begin(), trips.end());
    sys.A += extra;
    sys.b = b;
  }
  return sys;
}

}  // namespace mg
