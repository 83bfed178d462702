#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "mco/swarm.hpp"

namespace mco {

// Switched-system block matrices for a swarm of q agents in dimension n with
// leader index j (1-based). All three have side 2nq+n; the state stacking is
// Z = [x_1..x_q, v_1..v_q, p].
struct SystemMatrices {
  int n = 0, q = 0, j = 1;
  CoeffSample coeffs;
  Eigen::MatrixXd L;
  Eigen::MatrixXd A, Ac, B;
  int side() const { return 2 * n * q + n; }
};

// E selects the j-th n-block of an nq vector; W = (1_{q x 1} (x) I_n) E.
Eigen::MatrixXd build_E(int j, int n, int q);
Eigen::MatrixXd build_W(int j, int n, int q);

Eigen::MatrixXd build_A(const CoeffSample& c, const Eigen::MatrixXd& L, int n, int j);
Eigen::MatrixXd build_Ac(const CoeffSample& c, const Eigen::MatrixXd& L, int n);
Eigen::MatrixXd build_B(const CoeffSample& c, const Eigen::MatrixXd& L, int n, int j);
SystemMatrices build_system(const CoeffSample& c, const Eigen::MatrixXd& L, int n, int j);

// One-step update matrices of the two branches:
//   continue branch: I + h(A + hAc); overwrite branch: I + B + h^2 Ac.
Eigen::MatrixXd step_matrix_continue(const SystemMatrices& sm);
Eigen::MatrixXd step_matrix_overwrite(const SystemMatrices& sm);

// Rank with threshold rel_tol * sigma_max * max(rows, cols); rel_tol < 0 uses
// machine epsilon. kernel_basis returns orthonormal columns spanning the
// complement, so numeric_rank(M) + cols(kernel_basis(M)) = cols(M).
int numeric_rank(const Eigen::MatrixXd& M, double rel_tol = -1.0);
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& M, double rel_tol = -1.0);

// Largest mutual projection residual between the spans of two orthonormal
// bases; 1.0 when the dimensions differ.
double span_distance(const Eigen::MatrixXd& K1, const Eigen::MatrixXd& K2);

struct RankLemmaVerdict {
  int case_id = 0;  // 1: mu=kappa=0, 2: kappa!=0, 3: mu!=0 kappa=0; 0: indeterminate
  bool indeterminate = false;
  int expected_rank = -1;
  int rank_A = -1;
  bool rank_matches = false;
  double kernel_residual = 1.0;   // ker(A) vs ker(A + h Ac)
  bool kernels_match = false;
  bool kernel_structure_ok = true;  // case 2: kernel is span{(1 (x) e_i, 0, e_i)}
  bool pass() const { return !indeterminate && rank_matches && kernels_match && kernel_structure_ok; }
};
RankLemmaVerdict check_rank_lemma(const SystemMatrices& sm, double coeff_tol = 1e-9);

// Geometric multiplicity (kernel dimension of M - lambda0 I) equals algebraic
// multiplicity (eigenvalue count within cluster_tol of lambda0). Throws if
// lambda0 is not an eigenvalue at that tolerance.
bool eigen_semisimple(const Eigen::MatrixXd& M, std::complex<double> lambda0,
                      double cluster_tol = 1e-8);

// Candidate eigenvalue sets for the two branch families. The B set carries the
// printed candidates (incl. the cubic roots) plus the p-branch root -h^2 kappa,
// which the printed set misses; see verify_spectrum_containment tests.
std::vector<std::complex<double>> predicted_spectrum_A(const CoeffSample& c,
                                                       const Eigen::MatrixXd& L);
std::vector<std::complex<double>> predicted_spectrum_B(const CoeffSample& c,
                                                       const Eigen::MatrixXd& L);

// Roots of lambda^3 + (1 + h^2 k) lambda^2 + (2h^2 k - h k) lambda + h^2 k.
std::vector<std::complex<double>> b_branch_cubic_roots(double kappa, double h);

bool verify_spectrum_containment(const Eigen::MatrixXd& M,
                                 const std::vector<std::complex<double>>& predicted,
                                 double tol);

// spec(M) inside the open unit disk except possibly a semisimple eigenvalue 1.
bool is_discrete_semistable(const Eigen::MatrixXd& M, double tol = 1e-9);

// Nontrivially semistable, norm at most 1, and the three-way rank equality.
bool is_paracontracting(const Eigen::MatrixXd& W, double tol = 1e-9);

// Finite-family approximate semiobservability: the common kernel of the
// stacked C(I - A_k) must equal ker(I - A_ref).
bool semiobservable_family_check(const std::vector<Eigen::MatrixXd>& family,
                                 const Eigen::MatrixXd& C, const Eigen::MatrixXd& A_ref,
                                 double tol = 1e-9);

struct SpectralReport {
  std::vector<std::complex<double>> eigenvalues;
  int rank = 0;
  int kernel_dim = 0;
  Eigen::MatrixXd kernel;
  bool has_zero_eigenvalue = false;
  bool zero_semisimple = false;
  double tolerance = 0.0;
};
SpectralReport spectral_report(const Eigen::MatrixXd& M, double tol = 1e-8);

struct TheoremVerdict {
  bool h1 = false, h2 = false, h3 = false, h4 = false;
  bool zero_semisimple_a = false, zero_semisimple_b = false;
  // binding step-size bounds min over actual nonzero eigenvalues, per family
  double h_dagger_a = 0.0, h_dagger_b = 0.0;
  double norm_step_a = 0.0, norm_step_b = 0.0;
  std::vector<std::complex<double>> offenders_h1, offenders_h2;
  // printed candidates that are not eigenvalues of the assembled matrices
  std::vector<std::complex<double>> spurious_a, spurious_b;
  bool overall() const {
    return h1 && h2 && h3 && h4 && zero_semisimple_a && zero_semisimple_b;
  }
};
TheoremVerdict check_theorem_hypotheses(const CoeffSample& c, const Eigen::MatrixXd& L,
                                        int n, int j, double tol = 1e-8);

enum class SwitchStatus { kConverged, kMaxIters, kDiverged };

struct SwitchedResult {
  SwitchStatus status = SwitchStatus::kMaxIters;
  int steps = 0;
  Eigen::VectorXd z;
  double x_spread = 0.0;  // max_i max_d |x_i[d] - x_mean[d]|
  double v_norm = 0.0;
  double p_gap = 0.0;  // ||p - x_mean||_inf
  bool in_consensus_kernel = false;
};

// Iterates Z <- P_k Z with P_k = matrices[pick(k)]; stops on step difference
// below tol, divergence above 1e12, or max_iters.
SwitchedResult simulate_switched(const std::vector<Eigen::MatrixXd>& matrices,
                                 const std::function<int(int)>& pick, Eigen::VectorXd z0,
                                 int n, int q, int max_iters, double tol);

}  // namespace mco
