#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <vector>

#include "mg/mesh.hpp"

namespace mg {

// Tensor-product Lagrange basis on [-1,1]^3, local node order matching
// Mesh::elements (x fastest, then y, then z).
struct ShapeFns {
  int count = 0;
  std::array<double, 27> values{};
  std::array<std::array<double, 3>, 27> gradients{};  // d/dxi
};

ShapeFns shape_eval(int order, const std::array<double, 3>& xi);

struct DofMap {
  int components = 1;
  int n_free = 0;
  std::vector<int> free_index;      // node*components+c -> free dof or -1
  std::vector<double> fixed_value;  // full-length; nonzero only where fixed

  int dof(int node, int c) const { return free_index[node * components + c]; }
};

struct SparseSystem {
  Eigen::SparseMatrix<double> A;  // free dofs only, SPD
  Eigen::VectorXd b;
  DofMap dofs;

  // Full-length vector with constrained values filled back in.
  Eigen::VectorXd expand(const Eigen::VectorXd& x_free) const;
};

struct SolveReport {
  int iterations = 0;
  double rel_residual = 0.0;
  bool used_direct = false;
  std::vector<double> history;
};

struct SolveOptions {
  double rel_tol = 1e-10;
  int max_iterations = 20000;
  // CG below this free-dof count, sparse Cholesky above. The direct
  // path is checked against the same residual contract.
  int direct_threshold = 15000;
};

Eigen::VectorXd solve_spd(const SparseSystem& s, const SolveOptions& opts = {},
                          SolveReport* report = nullptr);

// ---- scalar diffusion: div(c grad u) + q = 0 ---------------------------

struct ScalarProblem {
  std::vector<double> coeff;           // per element
  std::vector<std::int8_t> active;     // element mask; empty = all active
  std::vector<double> source_density;  // per element; empty = none
  std::vector<std::pair<int, double>> dirichlet;  // node -> value
  std::vector<int> robin_facets;                  // indices into mesh.facets
  double robin_h = 0.0;
  double robin_ambient = 0.0;
};

// Assembled with the Dirichlet rows eliminated. Also returns the
// unconstrained operator/rhs so callers can compute reactions.
struct ScalarAssembly {
  SparseSystem sys;
  Eigen::SparseMatrix<double> A_full;  // node x node, no constraints
  Eigen::VectorXd b_full;
};

ScalarAssembly assemble_scalar(const Mesh& m, const ScalarProblem& p);

// ---- linear (thermo)elasticity ----------------------------------------

struct PointSpring {
  int node = -1;
  int comp = 0;
  double stiffness = 0.0;  // uN/um
  double target = 0.0;     // rest position of the spring end, um
};

struct ElasticProblem {
  std::vector<double> youngs;   // per element, MPa
  std::vector<double> poisson;  // per element
  // Thermal strain alpha*(T - ref) per region; temperature nodal.
  std::vector<double> tce;  // per element
  const std::vector<double>* temperature = nullptr;  // nodal, optional
  double reference_temperature = 0.0;
  std::vector<int> fixed_nodes;  // u = 0, all components
  // Prescribed displacement per dof (3*node+c), e.g. patch tests.
  std::vector<std::pair<int, double>> dirichlet;
  std::vector<PointSpring> springs;
};

SparseSystem assemble_elastic(const Mesh& m, const ElasticProblem& p);

}  // namespace mg
