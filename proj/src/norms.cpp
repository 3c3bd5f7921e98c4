#include "aninorm/norms.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "aninorm/errors.hpp"

namespace aninorm {

namespace {

constexpr int kPeakGridPoints = 512;
constexpr int kPeakRefineFactor = 4;
constexpr int kBracketMaxSteps = 400;

void require_stable(const StateSpaceModel& F, const char* what) {
  if (!is_stable(F)) throw StabilityError(std::string(what) + ": model is not stable");
}

// σ̄(F̂(ω)) at many frequencies: A is reduced to Hessenberg form once, so each
// evaluation is an O(n²) elimination plus a small Hermitian eigenproblem.
class GainEvaluator {
 public:
  explicit GainEvaluator(const StateSpaceModel& F) : D_(F.D().cast<Complex>()) {
    const Index n = F.states();
    if (n == 0) return;
    const Eigen::HessenbergDecomposition<Matrix> hessenberg(F.A());
    const Matrix Q = hessenberg.matrixQ();
    H_ = hessenberg.matrixH().cast<Complex>();
    B_ = (Q.transpose() * F.B()).cast<Complex>();
    C_ = (F.C() * Q).cast<Complex>();
  }

  double operator()(double omega) const {
    ComplexMatrix response = D_;
    const Index n = H_.rows();
    if (n > 0) {
      ComplexMatrix M = -H_;
      M.diagonal().array() += std::polar(1.0, omega);
      ComplexMatrix X = B_;
      for (Index k = 0; k + 1 < n; ++k) {
        if (std::abs(M(k + 1, k)) > std::abs(M(k, k))) {
          M.row(k).swap(M.row(k + 1));
          X.row(k).swap(X.row(k + 1));
        }
        if (M(k, k) == Complex(0.0)) return std::numeric_limits<double>::infinity();
        const Complex l = M(k + 1, k) / M(k, k);
        M.row(k + 1).tail(n - k) -= l * M.row(k).tail(n - k);
        X.row(k + 1) -= l * X.row(k);
      }
      if (M(n - 1, n - 1) == Complex(0.0)) return std::numeric_limits<double>::infinity();
      M.triangularView<Eigen::Upper>().solveInPlace(X);
      response += C_ * X;
    }
    if (response.size() == 0) return 0.0;
    const ComplexMatrix gram = response.rows() <= response.cols()
                                   ? ComplexMatrix(response * response.adjoint())
                                   : ComplexMatrix(response.adjoint() * response);
    const Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
  }

 private:
  using Complex = std::complex<double>;
  ComplexMatrix D_;
  ComplexMatrix H_, B_, C_;
};

bool bounded_real(const StateSpaceModel& F, double gamma, const RiccatiOptions& options) {
  try {
    dare_stabilizing(F, 1.0 / (gamma * gamma), options);
    return true;
  } catch (const NoStabilizingSolution&) {
    return false;
  } catch (const MaxIterationsExceeded&) {
    return false;
  }
}

// Golden-section polish of σ̄(F̂(ω)) on [lo, hi]; returns the best value seen.
double polish_peak(const GainEvaluator& gain, double lo, double hi, double best) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double g1 = gain(x1);
  double g2 = gain(x2);
  for (int i = 0; i < 40 && hi - lo > 1e-12; ++i) {
    if (g1 > g2) {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - inv_phi * (hi - lo);
      g1 = gain(x1);
    } else {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + inv_phi * (hi - lo);
      g2 = gain(x2);
    }
    best = std::max({best, g1, g2});
  }
  return std::max({best, g1, g2});
}

}  // namespace

double h2_norm(const StateSpaceModel& F) {
  require_stable(F, "h2_norm");
  double value = F.D().squaredNorm();
  if (F.states() > 0) {
    const Matrix P = solve_stein(F.A(), F.B() * F.B().transpose());
    value += (F.C() * P * F.C().transpose()).trace();
  }
  return std::sqrt(std::max(0.0, value));
}

Matrix observability_gramian(const StateSpaceModel& F) {
  require_stable(F, "observability_gramian");
  return solve_stein(F.A().transpose(), F.C().transpose() * F.C());
}

double peak_gain_on_grid(const StateSpaceModel& F) {
  const GainEvaluator gain(F);
  const double step = std::numbers::pi / (kPeakGridPoints - 1);
  std::vector<double> g(kPeakGridPoints);
  for (int k = 0; k < kPeakGridPoints; ++k) g[k] = gain(k * step);
  const double grid_max = *std::max_element(g.begin(), g.end());
  double best = grid_max;
  for (int k = 0; k < kPeakGridPoints; ++k) {
    const bool local_max = (k == 0 || g[k] >= g[k - 1]) && (k + 1 == kPeakGridPoints || g[k] >= g[k + 1]);
    if (!local_max || g[k] < 0.99 * grid_max) continue;
    const double lo = std::max(0.0, (k - 1) * step);
    const double hi = std::min(std::numbers::pi, (k + 1) * step);
    const double fine = (hi - lo) / (2 * kPeakRefineFactor);
    int best_j = 0;
    double best_fine = -1.0;
    for (int j = 0; j <= 2 * kPeakRefineFactor; ++j) {
      const double v = gain(lo + j * fine);
      if (v > best_fine) {
        best_fine = v;
        best_j = j;
      }
    }
    best = std::max(best, best_fine);
    const double center = lo + best_j * fine;
    best = polish_peak(gain, std::max(lo, center - fine), std::min(hi, center + fine), best);
  }
  return best;
}

HinfBracket hinf_bracket(const StateSpaceModel& F, double tol, const RiccatiOptions& options) {
  if (!(tol > 0.0)) throw std::invalid_argument("hinf_bracket: tol must be positive");
  require_stable(F, "hinf_norm");
  HinfBracket bracket;
  const double h2 = h2_norm(F);
  if (h2 == 0.0) return bracket;

  auto feasible = [&](double gamma) {
    ++bracket.riccati_solves;
    return bounded_real(F, gamma, options);
  };

  // ‖F‖₂/√m <= ‖F‖∞ and every sampled gain are valid lower bounds.
  double lo = std::max(peak_gain_on_grid(F), h2 / std::sqrt(static_cast<double>(F.inputs())));
  double gap = std::max(lo * 1e-3, 1e-300);
  double hi = lo + gap;
  int steps = 0;
  while (!feasible(hi)) {
    lo = hi;
    gap *= 4.0;
    hi = lo + gap;
    if (++steps > kBracketMaxSteps || !std::isfinite(hi)) {
      throw BracketFailure("hinf_norm: could not find a feasible upper bracket");
    }
  }
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (++steps > kBracketMaxSteps) throw BracketFailure("hinf_norm: bisection did not terminate");
  }
  bracket.lower = lo;
  bracket.upper = hi;
  return bracket;
}

double hinf_norm(const StateSpaceModel& F, double tol) {
  const HinfBracket b = hinf_bracket(F, tol);
  return 0.5 * (b.lower + b.upper);
}

}  // namespace aninorm
