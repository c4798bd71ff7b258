#pragma once

#include <Eigen/Dense>

namespace jolt {

/// Evaluated message tables feeding the data association loop.
/// xi(i, m): legacy-object-oriented evaluation, O rows, column 0 = "no
/// measurement", columns 1..M per measurement.
/// sigma(m, i): measurement-oriented evaluation, M rows, column 0 = "not from
/// a legacy object", columns 1..O per legacy object.
struct AssociationProblem {
  Eigen::MatrixXd xi;     // O x (M+1)
  Eigen::MatrixXd sigma;  // M x (O+1)

  int num_objects() const { return static_cast<int>(xi.rows()); }
  int num_measurements() const { return static_cast<int>(sigma.rows()); }
};

/// Approximate (or exact) posterior association marginals; each row sums to 1.
/// eta_alpha(i, m) = P(object i generated measurement m), column 0 = none.
/// eta_beta(m, i) = P(measurement m came from object i), column 0 = none.
struct AssociationMarginals {
  Eigen::MatrixXd eta_alpha;  // O x (M+1)
  Eigen::MatrixXd eta_beta;   // M x (O+1)
};

/// Iterative sum-product data association over the bipartite exclusion graph.
/// Converges to the exact marginals on tree instances (min(O, M) <= 1).
AssociationMarginals bp_associate(const AssociationProblem& problem, int iterations);

/// Exact marginals by enumeration of all valid association events (all alpha
/// vectors with distinct nonzero entries). Guarded against oversized inputs.
AssociationMarginals exact_associate(const AssociationProblem& problem);

}  // namespace jolt
