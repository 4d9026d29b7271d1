#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ctunnel/potential.hpp"

namespace ctunnel {

using cplx = std::complex<double>;

enum class Scheme { Fd4, Chebyshev };
enum class PotentialTag { Double, LeftSealed, RightSealed, QuadraticModel };

std::string to_string(Scheme s);
std::string to_string(PotentialTag t);
Scheme parse_scheme(const std::string& s);

/// Dense matrix of -h^2 d^2/dx^2 + e^{i alpha} V on interior nodes of [-X, X]
/// with Dirichlet conditions.
struct DiscreteOperator {
  double alpha = 0.0;
  double h = 0.0;
  double X = 0.0;
  int n_points = 0;
  Scheme scheme = Scheme::Fd4;
  PotentialTag tag = PotentialTag::Double;
  double frequency = 0.0;  ///< a of the well the operator is built around
  bool has_matrix = true;  ///< false when assembled banded-only (fd4)
  Eigen::VectorXd grid;
  Eigen::VectorXd weights;    ///< quadrature weights for L^2 pairings
  Eigen::VectorXd potential;  ///< V at the grid nodes
  Eigen::MatrixXcd matrix;

  double dx() const { return grid.size() > 1 ? grid[1] - grid[0] : 0.0; }
};

DiscreteOperator assemble(const Profile& V, double alpha, double h, double X, int n_points,
                          Scheme scheme = Scheme::Fd4,
                          PotentialTag tag = PotentialTag::Double, bool dense = true);

/// Fourth-order central second difference coefficients for -h^2 d^2/dx^2.
inline constexpr double kFd4Stencil[5] = {1.0, -16.0, 30.0, -16.0, 1.0};

/// Banded fd4 operator applied to samples with zero Dirichlet data outside.
Eigen::VectorXcd apply_fd4(const Eigen::VectorXcd& psi, const Eigen::VectorXd& V, double alpha,
                           double h, double dx);

struct SpectrumOptions {
  double residual_tol_rel = 1e-8;  ///< residual bound relative to ||matrix||_1
  double cluster_rel = 1e-4;       ///< relative spacing treated as one near-degenerate block
  bool eigenvectors = true;
};

struct SpectrumResult {
  double R = 0.0;
  std::vector<cplx> eigenvalues;
  Eigen::MatrixXcd eigenvectors;  ///< columns, unit L^2 norm under the operator weights
  std::vector<double> residuals;  ///< ||(L - mu) psi|| / ||psi|| in the Euclidean norm
  std::vector<double> condition;  ///< ||psi||^2 / |psi^T psi|
  std::vector<std::vector<int>> clusters;
  double residual_tol = 0.0;
  double matrix_norm = 0.0;  ///< induced 1-norm
  bool residuals_ok = true;
  bool cluster_anomaly = false;
};

/// All eigenvalues of the dense matrix (complex Schur form, no vectors).
std::vector<cplx> all_eigenvalues(const DiscreteOperator& op);

/// Eigenvalues in D(0, R h) sorted by modulus then argument, with
/// eigenvectors from inverse iteration and clusters at threshold 0.3 a h.
SpectrumResult low_lying_spectrum(const DiscreteOperator& op, double R,
                                  const SpectrumOptions& opt = {});

/// Shift-invert iteration for the eigenpair nearest `guess` (banded LU for
/// fd4). Vector is unit L^2 norm.
struct Eigenpair {
  cplx value;
  Eigen::VectorXcd vector;
  double residual = 0.0;
  int iterations = 0;
};
Eigenpair eigenpair_near(const DiscreteOperator& op, cplx guess, int max_iter = 50);

struct ClusterReport {
  std::vector<std::vector<int>> clusters;
  std::vector<cplx> centers;
  double threshold = 0.0;
  double min_separation = 0.0;  ///< smallest distance between eigenvalues of different clusters
  bool anomaly = false;         ///< some cluster holds three or more eigenvalues
};

ClusterReport cluster_eigenvalues(std::span<const cplx> eigenvalues, double h, double a);
ClusterReport cluster_eigenvalues(const SpectrumResult& result, double h, double a);

struct RieszProjector {
  cplx center;
  double radius = 0.0;
  int n_contour = 0;
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd singular_values;
  int numeric_rank = 0;
  double idempotency_defect = 0.0;   ///< ||P^2 - P||_F / max(1, ||P||_F)
  double commutation_defect = 0.0;   ///< ||P L - L P||_F / (||L||_F max(1, ||P||_F))
  double min_contour_distance = 0.0;
};

struct ProjectorOptions {
  double rank_tol = 1e-6;
  double proj_tol = 1e-8;
};

/// Trapezoid-rule contour integral of the resolvent on a circle. When
/// `eigenvalues` is empty the full spectrum is computed for the placement check.
RieszProjector riesz_projector(const DiscreteOperator& op, cplx center, double radius,
                               int n_contour = 32, std::span<const cplx> eigenvalues = {},
                               const ProjectorOptions& opt = {});

/// ||(L - z)^{-1}|| = 1 / sigma_min(L - z).
double resolvent_norm(const DiscreteOperator& op, cplx z);

struct LocalizationReport {
  double weighted = 0.0;    ///< max |psi| e^{Phi/h} / ||psi||
  double unweighted = 0.0;  ///< max |psi| / ||psi||
  bool flagged = false;     ///< weighted / unweighted above the mismatch threshold
};

/// `phi` holds the weight sampled on the operator grid. Points where |psi|
/// drops below `floor` times its maximum are round-off and are skipped.
LocalizationReport localization_check(const Eigen::VectorXcd& psi, const Eigen::VectorXd& weights,
                                      std::span<const double> phi, double h,
                                      double floor = 1e-12, double flag_ratio = 100.0);

struct ConvergenceRung {
  double X = 0.0;
  int n_points = 0;
  cplx value;
};

struct ConvergenceReport {
  std::vector<ConvergenceRung> rungs;
  std::vector<double> differences;  ///< |value_{k+1} - value_k|
  double error_estimate = 0.0;      ///< last difference
  bool converged = false;
};

/// Smallest-modulus eigenvalue along a refinement ladder. Throws
/// NumericFailure when successive differences fail to decrease.
ConvergenceReport convergence_check(const Profile& V, double alpha, double h,
                                    std::span<const std::pair<double, int>> ladder,
                                    Scheme scheme = Scheme::Fd4,
                                    PotentialTag tag = PotentialTag::Double);

/// Index-reversed copy (the reflection x -> -x on a symmetric grid).
Eigen::VectorXcd reflect(const Eigen::VectorXcd& v);

/// Hermitian pairing sum w conj(f) g.
cplx hermitian_pairing(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g,
                       const Eigen::VectorXd& w);
/// Bilinear pairing sum w f g (no conjugation).
cplx bilinear_pairing(const Eigen::VectorXcd& f, const Eigen::VectorXcd& g,
                      const Eigen::VectorXd& w);

}  // namespace ctunnel
