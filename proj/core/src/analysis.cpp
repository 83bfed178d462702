#include "mco/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mco {

namespace {

using Cd = std::complex<double>;

Eigen::MatrixXd kron_with_identity(const Eigen::MatrixXd& L, int n) {
  const int q = static_cast<int>(L.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(q * n, q * n);
  for (int r = 0; r < q; ++r)
    for (int cidx = 0; cidx < q; ++cidx)
      if (L(r, cidx) != 0.0)
        out.block(r * n, cidx * n, n, n) =
            L(r, cidx) * Eigen::MatrixXd::Identity(n, n);
  return out;
}

void require_laplacian(const Eigen::MatrixXd& L) {
  if (L.rows() != L.cols()) throw std::invalid_argument("L must be square");
  for (Eigen::Index i = 0; i < L.rows(); ++i)
    if (std::abs(L.row(i).sum()) > 1e-9)
      throw std::invalid_argument("L is not a Laplacian: row sums must vanish");
}

void require_leader(int j, int q) {
  if (j < 1 || j > q) throw std::invalid_argument("leader index j must be in 1..q");
}

std::vector<Cd> eigenvalues_of(const Eigen::MatrixXd& M) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
  std::vector<Cd> out(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out[i] = es.eigenvalues()(i);
  return out;
}

// roots of z^2 + b z + c over the complex numbers
void quadratic_roots(Cd b, Cd c, std::vector<Cd>& out) {
  Cd disc = b * b - 4.0 * c;
  Cd s = std::sqrt(disc);
  out.push_back((-b + s) / 2.0);
  out.push_back((-b - s) / 2.0);
}

double spectral_norm(const Eigen::MatrixXd& M) {
  return M.jacobiSvd().singularValues()(0);
}

int complex_rank(const Eigen::MatrixXcd& M, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  double eps = rel_tol < 0.0 ? std::numeric_limits<double>::epsilon() : rel_tol;
  double thr = eps * s(0) * static_cast<double>(std::max(M.rows(), M.cols()));
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > thr) ++r;
  return r;
}

}  // namespace

Eigen::MatrixXd build_E(int j, int n, int q) {
  if (q < 2) throw std::invalid_argument("build_E: q must be >= 2");
  require_leader(j, q);
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n * q);
  E.block(0, (j - 1) * n, n, n) = Eigen::MatrixXd::Identity(n, n);
  return E;
}

Eigen::MatrixXd build_W(int j, int n, int q) {
  Eigen::MatrixXd E = build_E(j, n, q);
  Eigen::MatrixXd ones = Eigen::MatrixXd::Zero(n * q, n);
  for (int r = 0; r < q; ++r) ones.block(r * n, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
  return ones * E;
}

Eigen::MatrixXd build_A(const CoeffSample& c, const Eigen::MatrixXd& L, int n, int j) {
  require_laplacian(L);
  const int q = static_cast<int>(L.rows());
  require_leader(j, q);
  const int nq = n * q;
  Eigen::MatrixXd LI = kron_with_identity(L, n);
  Eigen::MatrixXd Inq = Eigen::MatrixXd::Identity(nq, nq);
  Eigen::MatrixXd In = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd onesI = Eigen::MatrixXd::Zero(nq, n);
  for (int r = 0; r < q; ++r) onesI.block(r * n, 0, n, n) = In;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * nq + n, 2 * nq + n);
  A.block(0, nq, nq, nq) = Inq;
  A.block(nq, 0, nq, nq) = -c.mu * LI - c.kappa * Inq;
  A.block(nq, nq, nq, nq) = -c.eta * LI;
  A.block(nq, 2 * nq, nq, n) = c.kappa * onesI;
  A.block(2 * nq, 0, n, nq) = c.kappa * build_E(j, n, q);
  A.block(2 * nq, 2 * nq, n, n) = -c.kappa * In;
  return A;
}

Eigen::MatrixXd build_Ac(const CoeffSample& c, const Eigen::MatrixXd& L, int n) {
  require_laplacian(L);
  const int q = static_cast<int>(L.rows());
  const int nq = n * q;
  Eigen::MatrixXd LI = kron_with_identity(L, n);
  Eigen::MatrixXd Inq = Eigen::MatrixXd::Identity(nq, nq);
  Eigen::MatrixXd onesI = Eigen::MatrixXd::Zero(nq, n);
  for (int r = 0; r < q; ++r) onesI.block(r * n, 0, n, n) = Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd Ac = Eigen::MatrixXd::Zero(2 * nq + n, 2 * nq + n);
  Ac.block(0, 0, nq, nq) = -c.mu * LI - c.kappa * Inq;
  Ac.block(0, nq, nq, nq) = -c.eta * LI;
  Ac.block(0, 2 * nq, nq, n) = c.kappa * onesI;
  return Ac;
}

Eigen::MatrixXd build_B(const CoeffSample& c, const Eigen::MatrixXd& L, int n, int j) {
  require_laplacian(L);
  const int q = static_cast<int>(L.rows());
  require_leader(j, q);
  const int nq = n * q;
  Eigen::MatrixXd LI = kron_with_identity(L, n);
  Eigen::MatrixXd Inq = Eigen::MatrixXd::Identity(nq, nq);
  Eigen::MatrixXd In = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd onesI = Eigen::MatrixXd::Zero(nq, n);
  for (int r = 0; r < q; ++r) onesI.block(r * n, 0, n, n) = In;

  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * nq + n, 2 * nq + n);
  B.block(0, nq, nq, nq) = c.h * Inq;
  B.block(nq, 0, nq, nq) = c.h * (-c.mu * LI - c.kappa * Inq);
  B.block(nq, nq, nq, nq) = -c.h * c.eta * LI;
  B.block(nq, 2 * nq, nq, n) = c.h * c.kappa * onesI;
  B.block(2 * nq, 0, n, nq) = build_E(j, n, q);
  B.block(2 * nq, 2 * nq, n, n) = -In;
  return B;
}

SystemMatrices build_system(const CoeffSample& c, const Eigen::MatrixXd& L, int n, int j) {
  SystemMatrices sm;
  sm.n = n;
  sm.q = static_cast<int>(L.rows());
  sm.j = j;
  sm.coeffs = c;
  sm.L = L;
  sm.A = build_A(c, L, n, j);
  sm.Ac = build_Ac(c, L, n);
  sm.B = build_B(c, L, n, j);
  return sm;
}

Eigen::MatrixXd step_matrix_continue(const SystemMatrices& sm) {
  const double h = sm.coeffs.h;
  return Eigen::MatrixXd::Identity(sm.side(), sm.side()) + h * sm.A + h * h * sm.Ac;
}

Eigen::MatrixXd step_matrix_overwrite(const SystemMatrices& sm) {
  const double h = sm.coeffs.h;
  return Eigen::MatrixXd::Identity(sm.side(), sm.side()) + sm.B + h * h * sm.Ac;
}

int numeric_rank(const Eigen::MatrixXd& M, double rel_tol) {
  return complex_rank(M.cast<Cd>(), rel_tol);
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& M, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double eps = rel_tol < 0.0 ? std::numeric_limits<double>::epsilon() : rel_tol;
  double thr = s.size() == 0 ? 0.0
                             : eps * s(0) * static_cast<double>(std::max(M.rows(), M.cols()));
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > thr) ++r;
  return svd.matrixV().rightCols(M.cols() - r);
}

double span_distance(const Eigen::MatrixXd& K1, const Eigen::MatrixXd& K2) {
  if (K1.cols() != K2.cols()) return 1.0;
  if (K1.cols() == 0) return 0.0;
  double r1 = (K1 * (K1.transpose() * K2) - K2).norm();
  double r2 = (K2 * (K2.transpose() * K1) - K1).norm();
  return std::max(r1, r2);
}

RankLemmaVerdict check_rank_lemma(const SystemMatrices& sm, double coeff_tol) {
  RankLemmaVerdict v;
  const double mu = sm.coeffs.mu, kappa = sm.coeffs.kappa;
  const bool mu0 = std::abs(mu) <= coeff_tol, k0 = std::abs(kappa) <= coeff_tol;
  const bool mu_small = !mu0 && std::abs(mu) <= 1e3 * coeff_tol;
  const bool k_small = !k0 && std::abs(kappa) <= 1e3 * coeff_tol;
  if (mu_small || k_small) {
    v.indeterminate = true;
    return v;
  }
  const int n = sm.n, q = sm.q;
  if (!k0) {
    v.case_id = 2;
    v.expected_rank = 2 * n * q;
  } else if (mu0) {
    v.case_id = 1;
    v.expected_rank = n * q;
  } else {
    v.case_id = 3;
    v.expected_rank = n * (q + numeric_rank(sm.L));
  }

  v.rank_A = numeric_rank(sm.A);
  v.rank_matches = v.rank_A == v.expected_rank;

  Eigen::MatrixXd KA = kernel_basis(sm.A);
  Eigen::MatrixXd KAh = kernel_basis(sm.A + sm.coeffs.h * sm.Ac);
  v.kernel_residual = span_distance(KA, KAh);
  v.kernels_match = v.kernel_residual < 1e-9;

  if (v.case_id == 2) {
    // expected kernel: span{ (1_q (x) e_i, 0, e_i) }
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(sm.side(), n);
    for (int i = 0; i < n; ++i) {
      for (int r = 0; r < q; ++r) K(r * n + i, i) = 1.0;
      K(2 * n * q + i, i) = 1.0;
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(K);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(sm.side(), n);
    v.kernel_structure_ok = span_distance(KA, Q) < 1e-9;
  }
  return v;
}

bool eigen_semisimple(const Eigen::MatrixXd& M, Cd lambda0, double cluster_tol) {
  auto eig = eigenvalues_of(M);
  int alg = 0;
  for (const Cd& e : eig)
    if (std::abs(e - lambda0) <= cluster_tol) ++alg;
  if (alg == 0) throw std::invalid_argument("eigen_semisimple: lambda0 is not an eigenvalue");
  Eigen::MatrixXcd shifted = M.cast<Cd>();
  shifted.diagonal().array() -= lambda0;
  int geo = static_cast<int>(M.cols()) - complex_rank(shifted, -1.0);
  return geo == alg;
}

std::vector<Cd> b_branch_cubic_roots(double kappa, double h) {
  // companion matrix of z^3 + a2 z^2 + a1 z + a0
  double a2 = 1.0 + h * h * kappa;
  double a1 = 2.0 * h * h * kappa - h * kappa;
  double a0 = h * h * kappa;
  Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
  comp(0, 2) = -a0;
  comp(1, 2) = -a1;
  comp(2, 2) = -a2;
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  Eigen::EigenSolver<Eigen::Matrix3d> es(comp, false);
  std::vector<Cd> out(3);
  for (int i = 0; i < 3; ++i) out[i] = es.eigenvalues()(i);
  return out;
}

std::vector<Cd> predicted_spectrum_A(const CoeffSample& c, const Eigen::MatrixXd& L) {
  require_laplacian(L);
  std::vector<Cd> out{Cd(0.0, 0.0), Cd(-c.kappa, 0.0)};
  quadratic_roots(Cd(c.kappa * (1.0 + c.h), 0.0), Cd(c.kappa, 0.0), out);  // lambda_{1,2}
  quadratic_roots(Cd(c.kappa * c.h, 0.0), Cd(c.kappa, 0.0), out);          // lambda_{5,6}
  for (const Cd& m : eigenvalues_of(L)) {
    if (std::abs(m) < 1e-9) continue;
    Cd l = -m;  // member of spec(-L) \ {0}
    // lambda^2 + kappa h lambda + kappa = l (eta lambda + mu h lambda + mu)
    quadratic_roots(Cd(c.kappa * c.h, 0.0) - l * (c.eta + c.mu * c.h),
                    Cd(c.kappa, 0.0) - l * c.mu, out);
  }
  return out;
}

std::vector<Cd> predicted_spectrum_B(const CoeffSample& c, const Eigen::MatrixXd& L) {
  require_laplacian(L);
  const double h = c.h, h2 = c.h * c.h;
  // -h^2 kappa is the p-branch eigenvalue the printed candidate set misses.
  std::vector<Cd> out{Cd(0.0, 0.0), Cd(-1.0, 0.0), Cd(-h2 * c.kappa, 0.0)};
  quadratic_roots(Cd(h2 * c.kappa, 0.0), Cd(h2 * c.kappa, 0.0), out);
  for (const Cd& r : b_branch_cubic_roots(c.kappa, h)) out.push_back(r);
  for (const Cd& m : eigenvalues_of(L)) {
    if (std::abs(m) < 1e-9) continue;
    Cd l = -m;
    // lambda^2 + kappa h^2 lambda + kappa h^2 = l (eta h lambda + mu h^2 lambda + mu h^2)
    quadratic_roots(Cd(c.kappa * h2, 0.0) - l * (c.eta * h + c.mu * h2),
                    Cd(c.kappa * h2, 0.0) - l * c.mu * h2, out);
  }
  return out;
}

bool verify_spectrum_containment(const Eigen::MatrixXd& M, const std::vector<Cd>& predicted,
                                 double tol) {
  if (predicted.empty()) throw std::invalid_argument("verify_spectrum_containment: empty set");
  for (const Cd& e : eigenvalues_of(M)) {
    double best = std::numeric_limits<double>::infinity();
    for (const Cd& p : predicted) best = std::min(best, std::abs(e - p));
    if (best > tol) return false;
  }
  return true;
}

bool is_discrete_semistable(const Eigen::MatrixXd& M, double tol) {
  auto eig = eigenvalues_of(M);
  bool unit_present = false;
  for (const Cd& e : eig) {
    double mod = std::abs(e);
    if (mod > 1.0 + tol) return false;
    if (std::abs(mod - 1.0) <= tol) {
      if (std::abs(e - Cd(1.0, 0.0)) > tol) return false;
      unit_present = true;
    }
  }
  if (unit_present && !eigen_semisimple(M, Cd(1.0, 0.0), std::max(tol, 1e-12))) return false;
  return true;
}

bool is_paracontracting(const Eigen::MatrixXd& W, double tol) {
  if (W.rows() != W.cols()) throw std::invalid_argument("is_paracontracting: W must be square");
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(W.rows(), W.cols());
  if ((W - I).cwiseAbs().maxCoeff() <= tol) return false;  // trivial: W == I
  if (!is_discrete_semistable(W, tol)) return false;
  if (spectral_norm(W) > 1.0 + tol) return false;

  Eigen::MatrixXd Wm = W - I;
  Eigen::MatrixXd G1 = W.transpose() * W - I;
  Eigen::MatrixXd G2 = Wm.transpose() * Wm + Wm * Wm;
  Eigen::MatrixXd G3t = Wm.transpose() * Wm + Wm.transpose() * Wm.transpose();
  Eigen::MatrixXd cat(W.rows(), 2 * W.cols());
  cat << G1, G3t;
  // shared tolerance for all three ranks; matrix products carry a few ulps of
  // noise on their zero singular values, so the plain epsilon cut is too tight
  int r1 = numeric_rank(G1, tol), r2 = numeric_rank(G2, tol), r3 = numeric_rank(cat, tol);
  return r1 == r2 && r2 == r3;
}

bool semiobservable_family_check(const std::vector<Eigen::MatrixXd>& family,
                                 const Eigen::MatrixXd& C, const Eigen::MatrixXd& A_ref,
                                 double tol) {
  if (family.empty()) throw std::invalid_argument("semiobservable_family_check: empty family");
  const Eigen::Index dim = A_ref.cols();
  if (C.cols() != dim) throw std::invalid_argument("semiobservable_family_check: C dimension mismatch");
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::MatrixXd stacked(C.rows() * static_cast<Eigen::Index>(family.size()), dim);
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (family[k].rows() != dim || family[k].cols() != dim)
      throw std::invalid_argument("semiobservable_family_check: family dimension mismatch");
    stacked.middleRows(static_cast<Eigen::Index>(k) * C.rows(), C.rows()) = C * (I - family[k]);
  }
  Eigen::MatrixXd K_family = kernel_basis(stacked);
  Eigen::MatrixXd K_ref = kernel_basis(I - A_ref);
  return span_distance(K_family, K_ref) < tol;
}

SpectralReport spectral_report(const Eigen::MatrixXd& M, double tol) {
  SpectralReport r;
  r.eigenvalues = eigenvalues_of(M);
  r.rank = numeric_rank(M);
  r.kernel = kernel_basis(M);
  r.kernel_dim = static_cast<int>(r.kernel.cols());
  r.tolerance = tol;
  for (const Cd& e : r.eigenvalues)
    if (std::abs(e) <= tol) r.has_zero_eigenvalue = true;
  if (r.has_zero_eigenvalue) r.zero_semisimple = eigen_semisimple(M, Cd(0, 0), tol);
  return r;
}

namespace {

// H1/H2 inequality h < -(lambda + conj(lambda)) / |lambda|^2 over the actual
// nonzero spectrum. Candidates that are not eigenvalues are reported as
// spurious and take no part in the check.
struct FamilyCheck {
  bool pass = true;
  double h_dagger = std::numeric_limits<double>::infinity();
  std::vector<Cd> offenders;
  std::vector<Cd> spurious;
};

FamilyCheck check_family(const std::vector<Cd>& actual, const std::vector<Cd>& predicted,
                         double h, double tol) {
  FamilyCheck fc;
  for (const Cd& e : actual) {
    if (std::abs(e) <= tol) continue;
    double bound = -2.0 * e.real() / std::norm(e);
    if (e.real() >= -tol || !(h < bound)) {
      fc.pass = false;
      fc.offenders.push_back(e);
    }
    fc.h_dagger = std::min(fc.h_dagger, bound);
  }
  for (const Cd& cand : predicted) {
    if (std::abs(cand) <= tol) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const Cd& e : actual) best = std::min(best, std::abs(e - cand));
    if (best > 1e-6) fc.spurious.push_back(cand);
  }
  return fc;
}

}  // namespace

TheoremVerdict check_theorem_hypotheses(const CoeffSample& c, const Eigen::MatrixXd& L,
                                        int n, int j, double tol) {
  if (!(c.h > 0.0)) throw std::invalid_argument("check_theorem_hypotheses: h must be > 0");
  SystemMatrices sm = build_system(c, L, n, j);
  const double h = c.h;
  Eigen::MatrixXd MA = sm.A + h * sm.Ac;
  Eigen::MatrixXd MB = sm.B + h * h * sm.Ac;

  TheoremVerdict v;
  auto eigA = eigenvalues_of(MA);
  auto eigB = eigenvalues_of(MB);

  FamilyCheck fa = check_family(eigA, predicted_spectrum_A(c, L), h, tol);
  FamilyCheck fb = check_family(eigB, predicted_spectrum_B(c, L), h, tol);
  v.h1 = fa.pass;
  v.h2 = fb.pass;
  v.h_dagger_a = fa.h_dagger;
  v.h_dagger_b = fb.h_dagger;
  v.offenders_h1 = std::move(fa.offenders);
  v.offenders_h2 = std::move(fb.offenders);
  v.spurious_a = std::move(fa.spurious);
  v.spurious_b = std::move(fb.spurious);

  v.norm_step_a = spectral_norm(step_matrix_continue(sm));
  v.norm_step_b = spectral_norm(step_matrix_overwrite(sm));
  v.h3 = v.norm_step_a <= 1.0 + tol && v.norm_step_b <= 1.0 + tol;

  auto h4_kernels = [&](const Eigen::MatrixXd& M) {
    Eigen::MatrixXd K1 = kernel_basis(M.transpose() * M + M.transpose() + M);
    Eigen::MatrixXd K2 = kernel_basis(M.transpose() * M + M * M);
    return span_distance(K1, K2) < 1e-9;
  };
  v.h4 = h4_kernels(h * MA) && h4_kernels(MB);

  auto zero_ok = [&](const Eigen::MatrixXd& M, const std::vector<Cd>& eig) {
    bool has_zero = false;
    for (const Cd& e : eig)
      if (std::abs(e) <= tol) has_zero = true;
    if (!has_zero) return false;
    return eigen_semisimple(M, Cd(0, 0), tol);
  };
  v.zero_semisimple_a = zero_ok(MA, eigA);
  v.zero_semisimple_b = zero_ok(MB, eigB);
  return v;
}

SwitchedResult simulate_switched(const std::vector<Eigen::MatrixXd>& matrices,
                                 const std::function<int(int)>& pick, Eigen::VectorXd z0,
                                 int n, int q, int max_iters, double tol) {
  if (matrices.empty()) throw std::invalid_argument("simulate_switched: empty matrix pool");
  const Eigen::Index side = 2 * n * q + n;
  if (z0.size() != side) throw std::invalid_argument("simulate_switched: bad state size");
  for (const auto& P : matrices)
    if (P.rows() != side || P.cols() != side)
      throw std::invalid_argument("simulate_switched: matrix size mismatch");

  SwitchedResult res;
  Eigen::VectorXd z = std::move(z0), znext(side);
  int k = 0;
  for (; k < max_iters; ++k) {
    const Eigen::MatrixXd& P = matrices[static_cast<std::size_t>(pick(k))];
    znext.noalias() = P * z;
    double diff = (znext - z).norm();
    z = znext;
    if (z.norm() > 1e12) {
      res.status = SwitchStatus::kDiverged;
      ++k;
      break;
    }
    if (diff < tol) {
      res.status = SwitchStatus::kConverged;
      ++k;
      break;
    }
  }
  res.steps = k;
  res.z = z;
  // consensus metrics on the limit point
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < q; ++i)
    for (int d = 0; d < n; ++d) mean(d) += z(i * n + d);
  mean /= static_cast<double>(q);
  double spread = 0.0;
  for (int d = 0; d < n; ++d) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < q; ++i) {
      lo = std::min(lo, z(i * n + d));
      hi = std::max(hi, z(i * n + d));
    }
    spread = std::max(spread, hi - lo);
  }
  res.x_spread = spread;
  res.v_norm = z.segment(n * q, n * q).norm();
  double pgap = 0.0;
  for (int d = 0; d < n; ++d) pgap = std::max(pgap, std::abs(z(2 * n * q + d) - mean(d)));
  res.p_gap = pgap;
  res.in_consensus_kernel =
      res.x_spread <= tol && res.v_norm <= tol && res.p_gap <= tol;
  return res;
}

}  // namespace mco
