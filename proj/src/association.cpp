#include "jolt/association.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace jolt {

namespace {

void check_problem(const AssociationProblem& p) {
  const int O = p.num_objects();
  const int M = p.num_measurements();
  if (p.xi.cols() != M + 1) throw std::invalid_argument("xi must be O x (M+1)");
  if (M > 0 && p.sigma.cols() != O + 1) throw std::invalid_argument("sigma must be M x (O+1)");
  if ((p.xi.array() < 0.0).any() || (M > 0 && (p.sigma.array() < 0.0).any()))
    throw std::invalid_argument("association tables must be nonnegative");
}

void normalize_rows(Eigen::MatrixXd& m, const char* who) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double s = m.row(r).sum();
    if (!(s > 0.0) || !std::isfinite(s))
      throw std::runtime_error(std::string("vanishing association mass in row ") +
                               std::to_string(r) + " (" + who + ")");
    m.row(r) /= s;
  }
}

}  // namespace

AssociationMarginals bp_associate(const AssociationProblem& problem, int iterations) {
  check_problem(problem);
  const int O = problem.num_objects();
  const int M = problem.num_measurements();
  const Eigen::MatrixXd& xi = problem.xi;
  const Eigen::MatrixXd& sg = problem.sigma;

  AssociationMarginals out;
  if (M == 0) {
    out.eta_alpha = Eigen::MatrixXd::Zero(O, 1);
    out.eta_alpha.col(0).setOnes();
    out.eta_beta.resize(0, O + 1);
    return out;
  }

  // phi(i, m): object-to-measurement message; nu(m, i): the reverse.
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(O, M);
  Eigen::MatrixXd nu = Eigen::MatrixXd::Ones(M, O);

  for (int it = 0; it < iterations; ++it) {
    for (int i = 0; i < O; ++i) {
      for (int m = 0; m < M; ++m) {
        double denom = xi(i, 0);
        for (int m2 = 0; m2 < M; ++m2)
          if (m2 != m) denom += xi(i, m2 + 1) * nu(m2, i);
        if (!(denom > 0.0))
          throw std::runtime_error("vanishing association mass in row " + std::to_string(i));
        phi(i, m) = xi(i, m + 1) / denom;
      }
    }
    for (int m = 0; m < M; ++m) {
      for (int i = 0; i < O; ++i) {
        double denom = sg(m, 0);
        for (int i2 = 0; i2 < O; ++i2)
          if (i2 != i) denom += sg(m, i2 + 1) * phi(i2, m);
        if (!(denom > 0.0))
          throw std::runtime_error("vanishing association mass in row " + std::to_string(m));
        nu(m, i) = sg(m, i + 1) / denom;
      }
    }
  }

  out.eta_alpha.resize(O, M + 1);
  for (int i = 0; i < O; ++i) {
    out.eta_alpha(i, 0) = xi(i, 0);
    for (int m = 0; m < M; ++m) out.eta_alpha(i, m + 1) = xi(i, m + 1) * nu(m, i);
  }
  out.eta_beta.resize(M, O + 1);
  for (int m = 0; m < M; ++m) {
    out.eta_beta(m, 0) = sg(m, 0);
    for (int i = 0; i < O; ++i) out.eta_beta(m, i + 1) = sg(m, i + 1) * phi(i, m);
  }
  normalize_rows(out.eta_alpha, "eta_alpha");
  normalize_rows(out.eta_beta, "eta_beta");
  return out;
}

namespace {

/// Recursive enumeration over alpha vectors with distinct nonzero entries.
struct Enumerator {
  const Eigen::MatrixXd& xi;
  const Eigen::MatrixXd& sg;
  int O, M;
  std::vector<bool> used;       // measurement m (0-based) claimed by some object
  std::vector<int> alpha;       // alpha[i] in {0..M}, 0 = none
  Eigen::MatrixXd alpha_acc;    // O x (M+1) accumulated event mass
  Eigen::MatrixXd beta_acc;     // M x (O+1)
  double total = 0.0;
  long long events = 0;

  void run() {
    alpha.assign(O, 0);
    used.assign(M, false);
    recurse(0, 1.0);
  }

  void recurse(int i, double w) {
    if (w == 0.0) return;
    if (i == O) {
      // beta is implied: beta[m] = i+1 if alpha[i] = m+1, else 0.
      double event = w;
      std::vector<int> beta(M, 0);
      for (int o = 0; o < O; ++o)
        if (alpha[o] > 0) beta[alpha[o] - 1] = o + 1;
      for (int m = 0; m < M; ++m) event *= sg(m, beta[m]);
      if (event == 0.0) return;
      if (++events > 10'000'000LL) throw std::runtime_error("oracle size guard");
      total += event;
      for (int o = 0; o < O; ++o) alpha_acc(o, alpha[o]) += event;
      for (int m = 0; m < M; ++m) beta_acc(m, beta[m]) += event;
      return;
    }
    alpha[i] = 0;
    recurse(i + 1, w * xi(i, 0));
    for (int m = 0; m < M; ++m) {
      if (used[m]) continue;
      used[m] = true;
      alpha[i] = m + 1;
      recurse(i + 1, w * xi(i, m + 1));
      alpha[i] = 0;
      used[m] = false;
    }
  }
};

}  // namespace

AssociationMarginals exact_associate(const AssociationProblem& problem) {
  check_problem(problem);
  const int O = problem.num_objects();
  const int M = problem.num_measurements();

  AssociationMarginals out;
  if (M == 0) {
    out.eta_alpha = Eigen::MatrixXd::Zero(O, 1);
    out.eta_alpha.col(0).setOnes();
    out.eta_beta.resize(0, O + 1);
    return out;
  }

  // Valid events: pick k objects and assign them k distinct measurements.
  double count = 0.0;
  double choose_o = 1.0;  // C(O, k)
  double perm_m = 1.0;    // M! / (M-k)!
  for (int k = 0; k <= std::min(O, M); ++k) {
    if (k > 0) {
      choose_o *= static_cast<double>(O - k + 1) / k;
      perm_m *= static_cast<double>(M - k + 1);
    }
    count += choose_o * perm_m;
  }
  if (count > 1e7) throw std::runtime_error("oracle size guard");

  Enumerator en{problem.xi, problem.sigma, O, M,
                {}, {}, Eigen::MatrixXd::Zero(O, M + 1), Eigen::MatrixXd::Zero(M, O + 1)};
  en.run();
  if (!(en.total > 0.0)) throw std::runtime_error("vanishing association mass in row 0");
  out.eta_alpha = en.alpha_acc / en.total;
  out.eta_beta = en.beta_acc / en.total;
  normalize_rows(out.eta_alpha, "eta_alpha");
  normalize_rows(out.eta_beta, "eta_beta");
  return out;
}

}  // namespace jolt
