#include "ctunnel/specsolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseLU>

#include "ctunnel/errors.hpp"

namespace ctunnel {

std::string to_string(Scheme s) { return s == Scheme::Fd4 ? "fd4" : "chebyshev"; }

std::string to_string(PotentialTag t) {
  switch (t) {
    case PotentialTag::Double:
      return "double";
    case PotentialTag::LeftSealed:
      return "left-sealed";
    case PotentialTag::RightSealed:
      return "right-sealed";
    case PotentialTag::QuadraticModel:
      return "quadratic-model";
  }
  return "double";
}

Scheme parse_scheme(const std::string& s) {
  if (s == "fd4") return Scheme::Fd4;
  if (s == "chebyshev") return Scheme::Chebyshev;
  throw ConfigError("unknown scheme '" + s + "' (expected fd4 or chebyshev)");
}

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

bool by_modulus_then_arg(const cplx& a, const cplx& b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb) return ma < mb;
  return std::arg(a) < std::arg(b);
}

// Chebyshev points x_j = cos(j pi / N) and the Trefethen differentiation matrix.
Eigen::MatrixXd cheb_matrix(int N, Eigen::VectorXd& x) {
  x.resize(N + 1);
  for (int j = 0; j <= N; ++j) x[j] = std::cos(std::numbers::pi * j / N);
  Eigen::VectorXd c = Eigen::VectorXd::Ones(N + 1);
  c[0] = c[N] = 2.0;
  Eigen::MatrixXd D(N + 1, N + 1);
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j) {
      if (i == j) continue;
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      D(i, j) = sign * c[i] / (c[j] * (x[i] - x[j]));
    }
  // Negative-sum trick for the diagonal.
  for (int i = 0; i <= N; ++i) {
    double s = 0.0;
    for (int j = 0; j <= N; ++j)
      if (j != i) s += D(i, j);
    D(i, i) = -s;
  }
  return D;
}

// Clenshaw-Curtis weights on [-1, 1] for the points cos(j pi / N).
Eigen::VectorXd clenshaw_curtis(int N) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(N + 1);
  Eigen::VectorXd v = Eigen::VectorXd::Ones(N - 1);
  auto theta = [N](int j) { return std::numbers::pi * j / N; };
  if (N % 2 == 0) {
    w[0] = w[N] = 1.0 / (N * N - 1.0);
    for (int k = 1; k < N / 2; ++k)
      for (int j = 1; j < N; ++j) v[j - 1] -= 2.0 * std::cos(2.0 * k * theta(j)) / (4.0 * k * k - 1);
    for (int j = 1; j < N; ++j) v[j - 1] -= std::cos(N * theta(j)) / (N * N - 1.0);
  } else {
    w[0] = w[N] = 1.0 / (static_cast<double>(N) * N);
    for (int k = 1; k <= (N - 1) / 2; ++k)
      for (int j = 1; j < N; ++j) v[j - 1] -= 2.0 * std::cos(2.0 * k * theta(j)) / (4.0 * k * k - 1);
  }
  for (int j = 1; j < N; ++j) w[j] = 2.0 * v[j - 1] / N;
  return w;
}

double l2_norm(const VectorXcd& v, const VectorXd& w) {
  return std::sqrt((w.array() * v.array().abs2()).sum());
}

// Unit L^2 norm and a deterministic global phase (largest entry real positive).
void normalize(VectorXcd& v, const VectorXd& w) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  const cplx p = std::abs(v[k]) > 0 ? std::conj(v[k]) / std::abs(v[k]) : cplx(1.0);
  v *= p / l2_norm(v, w);
}

Eigen::SparseMatrix<cplx> fd4_sparse(const DiscreteOperator& op, cplx shift) {
  const int n = op.n_points;
  const double c = op.h * op.h / (12.0 * op.dx() * op.dx());
  const cplx e = std::polar(1.0, op.alpha);
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(5 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int k = -2; k <= 2; ++k) {
      const int j = i + k;
      if (j < 0 || j >= n) continue;
      cplx val = c * kFd4Stencil[k + 2];
      if (k == 0) {
        if (i == 0 || i == n - 1) val -= c;
        val += e * op.potential[i] - shift;
      }
      t.emplace_back(i, j, val);
    }
  }
  Eigen::SparseMatrix<cplx> A(n, n);
  A.setFromTriplets(t.begin(), t.end());
  A.makeCompressed();
  return A;
}

VectorXcd apply_op(const DiscreteOperator& op, const VectorXcd& v) {
  if (op.has_matrix) return op.matrix * v;
  return apply_fd4(v, op.potential, op.alpha, op.h, op.dx());
}

double matrix_one_norm(const MatrixXcd& M) { return M.cwiseAbs().colwise().sum().maxCoeff(); }

}  // namespace

DiscreteOperator assemble(const Profile& V, double alpha, double h, double X, int n_points,
                          Scheme scheme, PotentialTag tag, bool dense) {
  require(h > 0, "assemble: h must be positive");
  require(n_points >= 200, "assemble: n_points must be at least 200");
  const double reach = std::max(std::abs(V.x_left()), std::abs(V.x_right()));
  if (!(X > reach + 1.0))
    throw ConfigError("domain half-width X = " + std::to_string(X) +
                      " does not clear the wells by 1 (need X > " + std::to_string(reach + 1) +
                      ")");

  DiscreteOperator op;
  op.alpha = alpha;
  op.h = h;
  op.X = X;
  op.n_points = n_points;
  op.scheme = scheme;
  op.tag = tag;
  op.frequency = V.frequency();
  const int n = n_points;
  const cplx e = std::polar(1.0, alpha);

  if (scheme == Scheme::Fd4) {
    const double dx = 2.0 * X / (n + 1);
    op.grid.resize(n);
    for (int i = 0; i < n; ++i) op.grid[i] = -X + (i + 1) * dx;
    op.weights = VectorXd::Constant(n, dx);
    op.potential.resize(n);
    for (int i = 0; i < n; ++i) op.potential[i] = V(op.grid[i]);
    op.has_matrix = dense;
    if (dense) {
      const double c = h * h / (12.0 * dx * dx);
      op.matrix = MatrixXcd::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        for (int k = -2; k <= 2; ++k) {
          const int j = i + k;
          if (j >= 0 && j < n) op.matrix(i, j) = c * kFd4Stencil[k + 2];
        }
        op.matrix(i, i) += e * op.potential[i];
      }
      // Odd ghost values beyond the Dirichlet nodes.
      op.matrix(0, 0) -= c;
      op.matrix(n - 1, n - 1) -= c;
    }
  } else {
    const int N = n + 1;
    Eigen::VectorXd xc;
    const Eigen::MatrixXd D = cheb_matrix(N, xc);
    const Eigen::MatrixXd D2 = (D * D) / (X * X);
    const Eigen::VectorXd wc = clenshaw_curtis(N) * X;
    op.grid.resize(n);
    op.weights.resize(n);
    op.potential.resize(n);
    // Interior nodes in ascending order (Chebyshev index runs right to left).
    for (int i = 0; i < n; ++i) {
      const int j = N - 1 - i;
      op.grid[i] = X * xc[j];
      op.weights[i] = wc[j];
      op.potential[i] = V(op.grid[i]);
    }
    op.matrix.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) op.matrix(i, k) = -h * h * D2(N - 1 - i, N - 1 - k);
    for (int i = 0; i < n; ++i) op.matrix(i, i) += e * op.potential[i];
    op.has_matrix = true;
  }
  return op;
}

Eigen::VectorXcd apply_fd4(const Eigen::VectorXcd& psi, const Eigen::VectorXd& V, double alpha,
                           double h, double dx) {
  const Eigen::Index n = psi.size();
  const double c = h * h / (12.0 * dx * dx);
  const cplx e = std::polar(1.0, alpha);
  VectorXcd out(n);
  // psi[i] sits at node i+1; nodes 0 and n+1 are the Dirichlet ends and the
  // nodes beyond them carry odd ghost values.
  auto at = [&](Eigen::Index j) -> cplx {
    if (j >= 0 && j < n) return psi[j];
    if (j == -2) return -psi[0];
    if (j == n + 1) return -psi[n - 1];
    return cplx(0.0);
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    cplx acc = 0.0;
    for (int k = -2; k <= 2; ++k) acc += kFd4Stencil[k + 2] * at(i + k);
    out[i] = c * acc + e * V[i] * psi[i];
  }
  return out;
}

std::vector<cplx> all_eigenvalues(const DiscreteOperator& op) {
  require(op.has_matrix, "all_eigenvalues: operator was assembled without a dense matrix");
  Eigen::ComplexSchur<MatrixXcd> schur(op.matrix, false);
  if (schur.info() != Eigen::Success)
    throw NumericFailure("complex Schur decomposition failed for n = " +
                         std::to_string(op.n_points));
  const VectorXcd d = schur.matrixT().diagonal();
  std::vector<cplx> out(d.data(), d.data() + d.size());
  std::sort(out.begin(), out.end(), by_modulus_then_arg);
  return out;
}

SpectrumResult low_lying_spectrum(const DiscreteOperator& op, double R,
                                  const SpectrumOptions& opt) {
  require(op.has_matrix, "low_lying_spectrum: operator was assembled without a dense matrix");
  SpectrumResult res;
  res.R = R;
  res.matrix_norm = matrix_one_norm(op.matrix);
  res.residual_tol = opt.residual_tol_rel * res.matrix_norm;

  for (const cplx& mu : all_eigenvalues(op))
    if (std::abs(mu) < R * op.h) res.eigenvalues.push_back(mu);

  const int n = op.n_points;
  const int m = static_cast<int>(res.eigenvalues.size());
  res.eigenvectors = MatrixXcd::Zero(n, m);
  res.residuals.assign(m, 0.0);
  res.condition.assign(m, 1.0);

  if (opt.eigenvectors && m > 0) {
    std::mt19937_64 rng(20240611);
    std::normal_distribution<double> gauss;
    const double floor = 64 * std::numeric_limits<double>::epsilon() * res.matrix_norm;

    int i = 0;
    while (i < m) {
      // Gather a block of nearly equal eigenvalues.
      int j = i + 1;
      while (j < m && std::abs(res.eigenvalues[j] - res.eigenvalues[i]) <=
                          opt.cluster_rel * std::abs(res.eigenvalues[i]) + floor)
        ++j;
      const int k = j - i;
      cplx shift = 0.0;
      for (int q = i; q < j; ++q) shift += res.eigenvalues[q];
      shift /= static_cast<double>(k);
      shift += cplx(1.0, 1.0) * 1e-10 * std::max(std::abs(shift), 1.0);

      Eigen::PartialPivLU<MatrixXcd> lu(op.matrix - shift * MatrixXcd::Identity(n, n));
      MatrixXcd Q(n, k);
      for (int c = 0; c < k; ++c)
        for (int r = 0; r < n; ++r) Q(r, c) = cplx(gauss(rng), gauss(rng));
      for (int it = 0; it < 4; ++it) {
        MatrixXcd Y = lu.solve(Q);
        Eigen::HouseholderQR<MatrixXcd> qr(Y);
        Q = qr.householderQ() * MatrixXcd::Identity(n, k);
      }
      if (k == 1) {
        res.eigenvectors.col(i) = Q.col(0);
      } else {
        // Rayleigh-Ritz on the block, then match Ritz values to the Schur values.
        const MatrixXcd H = Q.adjoint() * op.matrix * Q;
        Eigen::ComplexEigenSolver<MatrixXcd> ces(H);
        std::vector<bool> used(k, false);
        for (int q = i; q < j; ++q) {
          int best = -1;
          double bd = 0.0;
          for (int r = 0; r < k; ++r) {
            if (used[r]) continue;
            const double d = std::abs(ces.eigenvalues()[r] - res.eigenvalues[q]);
            if (best < 0 || d < bd) best = r, bd = d;
          }
          used[best] = true;
          res.eigenvectors.col(q) = Q * ces.eigenvectors().col(best);
        }
      }
      i = j;
    }

    for (int q = 0; q < m; ++q) {
      VectorXcd v = res.eigenvectors.col(q);
      normalize(v, op.weights);
      res.eigenvectors.col(q) = v;
      res.residuals[q] = (op.matrix * v - res.eigenvalues[q] * v).norm() / v.norm();
      res.condition[q] = v.squaredNorm() / std::abs(v.dot(v.conjugate()));
      if (!(res.residuals[q] <= res.residual_tol)) res.residuals_ok = false;
    }
  }

  if (op.frequency > 0) {
    const ClusterReport cr = cluster_eigenvalues(res.eigenvalues, op.h, op.frequency);
    res.clusters = cr.clusters;
    res.cluster_anomaly = cr.anomaly;
  }
  return res;
}

Eigenpair eigenpair_near(const DiscreteOperator& op, cplx guess, int max_iter) {
  const int n = op.n_points;
  const bool banded = op.scheme == Scheme::Fd4;
  require(banded || op.has_matrix, "eigenpair_near: no matrix available");

  Eigen::SparseLU<Eigen::SparseMatrix<cplx>> slu;
  Eigen::PartialPivLU<MatrixXcd> dlu;
  auto factor = [&](cplx s) {
    if (banded) {
      slu.compute(fd4_sparse(op, s));
      if (slu.info() != Eigen::Success) throw NumericFailure("banded LU failed");
    } else {
      dlu.compute(op.matrix - s * MatrixXcd::Identity(n, n));
    }
  };
  auto solve = [&](const VectorXcd& b) -> VectorXcd {
    return banded ? VectorXcd(slu.solve(b)) : VectorXcd(dlu.solve(b));
  };
  // Complex-symmetric operators admit the second-order bilinear quotient.
  auto quotient = [&](const VectorXcd& v) -> cplx {
    const VectorXcd Lv = apply_op(op, v);
    if (banded) return (v.transpose() * Lv)(0) / (v.transpose() * v)(0);
    return v.dot(Lv) / v.squaredNorm();
  };

  Eigenpair ep;
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(1.0 + 0.1 * std::sin(0.37 * i), 0.05 * std::cos(0.11 * i));
  v.normalize();

  const cplx perturb = cplx(1.0, 1.0) * 1e-12 * std::max(std::abs(guess), 1.0);
  factor(guess + perturb);
  cplx mu = guess;
  int it = 0;
  for (; it < max_iter; ++it) {
    v = solve(v);
    v.normalize();
    const cplx next = quotient(v);
    const bool done = std::abs(next - mu) <= 1e-14 * std::abs(next);
    mu = next;
    if (done) break;
  }
  // One refactorization at the converged value sharpens the vector.
  factor(mu + perturb);
  for (int k = 0; k < 2; ++k) {
    v = solve(v);
    v.normalize();
  }
  mu = quotient(v);
  normalize(v, op.weights);
  ep.value = mu;
  ep.vector = v;
  ep.iterations = it + 3;
  ep.residual = (apply_op(op, v) - mu * v).norm() / v.norm();
  return ep;
}

ClusterReport cluster_eigenvalues(std::span<const cplx> eigenvalues, double h, double a) {
  ClusterReport r;
  r.threshold = 0.3 * a * h;
  for (int i = 0; i < static_cast<int>(eigenvalues.size()); ++i) {
    int home = -1;
    for (int c = 0; c < static_cast<int>(r.clusters.size()) && home < 0; ++c)
      for (int j : r.clusters[c])
        if (std::abs(eigenvalues[i] - eigenvalues[j]) <= r.threshold) {
          home = c;
          break;
        }
    if (home < 0) {
      r.clusters.push_back({i});
    } else {
      r.clusters[home].push_back(i);
    }
  }
  r.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < r.clusters.size(); ++c) {
    cplx s = 0.0;
    for (int i : r.clusters[c]) s += eigenvalues[i];
    r.centers.push_back(s / static_cast<double>(r.clusters[c].size()));
    if (r.clusters[c].size() >= 3) r.anomaly = true;
    for (std::size_t d = c + 1; d < r.clusters.size(); ++d)
      for (int i : r.clusters[c])
        for (int j : r.clusters[d])
          r.min_separation = std::min(r.min_separation, std::abs(eigenvalues[i] - eigenvalues[j]));
  }
  return r;
}

ClusterReport cluster_eigenvalues(const SpectrumResult& result, double h, double a) {
  return cluster_eigenvalues(std::span<const cplx>(result.eigenvalues), h, a);
}

RieszProjector riesz_projector(const DiscreteOperator& op, cplx center, double radius,
                               int n_contour, std::span<const cplx> eigenvalues,
                               const ProjectorOptions& opt) {
  require(op.has_matrix, "riesz_projector: operator was assembled without a dense matrix");
  require(radius > 0 && n_contour >= 4, "riesz_projector: need radius > 0 and n_contour >= 4");
  std::vector<cplx> spectrum;
  if (eigenvalues.empty()) {
    spectrum = all_eigenvalues(op);
    eigenvalues = spectrum;
  }
  RieszProjector P;
  P.center = center;
  P.radius = radius;
  P.n_contour = n_contour;
  P.min_contour_distance = std::numeric_limits<double>::infinity();
  for (const cplx& mu : eigenvalues)
    P.min_contour_distance =
        std::min(P.min_contour_distance, std::abs(std::abs(mu - center) - radius));
  if (P.min_contour_distance < 0.1 * radius)
    throw ContourPlacementError("contour |z - c| = r passes within " +
                                std::to_string(P.min_contour_distance) +
                                " of an eigenvalue (limit 0.1 r)");

  const int n = op.n_points;
  const MatrixXcd I = MatrixXcd::Identity(n, n);
  P.matrix = MatrixXcd::Zero(n, n);
  for (int k = 0; k < n_contour; ++k) {
    const cplx dz = std::polar(radius, 2.0 * std::numbers::pi * k / n_contour);
    const cplx z = center + dz;
    Eigen::PartialPivLU<MatrixXcd> lu(z * I - op.matrix);
    P.matrix += (dz / static_cast<double>(n_contour)) * lu.inverse();
  }
  Eigen::BDCSVD<MatrixXcd> svd(P.matrix);
  P.singular_values = svd.singularValues();
  const double s1 = P.singular_values.size() ? P.singular_values[0] : 0.0;
  if (s1 > opt.proj_tol)
    for (Eigen::Index i = 0; i < P.singular_values.size(); ++i)
      if (P.singular_values[i] > opt.rank_tol * s1) ++P.numeric_rank;
  const double pn = std::max(1.0, P.matrix.norm());
  P.idempotency_defect = (P.matrix * P.matrix - P.matrix).norm() / pn;
  P.commutation_defect =
      (P.matrix * op.matrix - op.matrix * P.matrix).norm() / (op.matrix.norm() * pn);
  return P;
}

double resolvent_norm(const DiscreteOperator& op, cplx z) {
  require(op.has_matrix, "resolvent_norm: operator was assembled without a dense matrix");
  const int n = op.n_points;
  Eigen::BDCSVD<MatrixXcd> svd(op.matrix - z * MatrixXcd::Identity(n, n));
  const VectorXd& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  if (smin <= n * std::numeric_limits<double>::epsilon() * s[0])
    throw NearSpectrumError("L - z is singular to working precision");
  return 1.0 / smin;
}

LocalizationReport localization_check(const Eigen::VectorXcd& psi, const Eigen::VectorXd& weights,
                                      std::span<const double> phi, double h, double floor,
                                      double flag_ratio) {
  require(static_cast<Eigen::Index>(phi.size()) == psi.size(),
          "localization_check: weight samples must match the grid");
  LocalizationReport r;
  const double norm = l2_norm(psi, weights);
  const double peak = psi.cwiseAbs().maxCoeff();
  r.unweighted = peak / norm;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double m = std::abs(psi[i]);
    if (m < floor * peak) continue;
    best = std::max(best, std::log(m / norm) + phi[i] / h);
  }
  r.weighted = std::exp(best);
  r.flagged = r.weighted > flag_ratio * r.unweighted;
  return r;
}

ConvergenceReport convergence_check(const Profile& V, double alpha, double h,
                                    std::span<const std::pair<double, int>> ladder, Scheme scheme,
                                    PotentialTag tag) {
  require(ladder.size() >= 3, "convergence_check: the ladder needs at least three rungs");
  ConvergenceReport rep;
  std::optional<cplx> guess;
  if (V.frequency() > 0) guess = V.frequency() * h * std::polar(1.0, 0.5 * alpha);
  for (const auto& [X, n] : ladder) {
    const bool dense = scheme == Scheme::Chebyshev || !guess;
    const DiscreteOperator op = assemble(V, alpha, h, X, n, scheme, tag, dense);
    if (!guess) guess = all_eigenvalues(op).front();
    const Eigenpair ep = eigenpair_near(op, *guess);
    rep.rungs.push_back({X, n, ep.value});
    guess = ep.value;
  }
  for (std::size_t k = 1; k < rep.rungs.size(); ++k)
    rep.differences.push_back(std::abs(rep.rungs[k].value - rep.rungs[k - 1].value));
  rep.error_estimate = rep.differences.back();
  rep.converged = true;
  const double tiny = 1e-13 * std::abs(rep.rungs.back().value);
  for (std::size_t k = 1; k < rep.differences.size(); ++k)
    if (rep.differences[k] > rep.differences[k - 1] && rep.differences[k] > tiny)
      rep.converged = false;
  if (!rep.converged)
    throw NumericFailure("smallest eigenvalue does not settle along the refinement ladder");
  return rep;
}

Eigen::VectorXcd reflect(const Eigen::VectorXcd& v) { return v.reverse(); }

cplx hermitian_pairing(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g,
                       const Eigen::VectorXd& w) {
  return (f.conjugate().array() * g.array() * w.array().cast<cplx>()).sum();
}

cplx bilinear_pairing(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g,
                      const Eigen::VectorXd& w) {
  return (f.array() * g.array() * w.array().cast<cplx>()).sum();
}

}  // namespace ctunnel
