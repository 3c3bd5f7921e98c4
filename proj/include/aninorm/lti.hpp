#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "aninorm/numkit.hpp"

namespace aninorm {

/// Discrete-time realization
///   x[k+1] = A x[k] + B w[k]
///   z[k]   = C x[k] + D w[k]
/// with n states, m inputs and p outputs. Dimensions and finiteness are
/// validated on construction; the model is immutable afterwards.
class StateSpaceModel {
 public:
  StateSpaceModel(Matrix A, Matrix B, Matrix C, Matrix D);

  /// Memoryless gain z = D w (n = 0).
  static StateSpaceModel static_gain(Matrix D);

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  const Matrix& C() const { return C_; }
  const Matrix& D() const { return D_; }

  Index states() const { return A_.rows(); }
  Index inputs() const { return B_.cols(); }
  Index outputs() const { return C_.rows(); }

  bool operator==(const StateSpaceModel& other) const;

 private:
  Matrix A_, B_, C_, D_;
};

/// Square (m inputs, m outputs) stable model used as a noise-shaping filter.
/// Full rank of the frequency response is checked where it matters
/// (mean_anisotropy reports rank deficiency as +infinity).
class ShapingFilter {
 public:
  explicit ShapingFilter(StateSpaceModel model);

  const StateSpaceModel& model() const { return model_; }
  Index size() const { return model_.inputs(); }

 private:
  StateSpaceModel model_;
};

/// ρ(A) < 1 - margin.
bool is_stable(const StateSpaceModel& F, double margin = 0.0);

/// F̂(ω) = C (e^{iω} I - A)^{-1} B + D. Throws SingularResolvent when e^{iω}
/// is (numerically) an eigenvalue of A.
ComplexMatrix freq_response(const StateSpaceModel& F, double omega);

/// Series connection z = F(G(w)): G drives F. Requires F.inputs() == G.outputs().
StateSpaceModel cascade(const StateSpaceModel& F, const StateSpaceModel& G);

/// Seeded random stable model. A is a standard normal matrix rescaled to a
/// spectral radius ρ in (0, rho_cap) with 1 - ρ log-uniform on
/// (1 - rho_cap, 1); B, C, D are standard normal. Pure function of its
/// arguments.
StateSpaceModel random_stable(Index n, Index m, Index p, std::uint64_t seed, double rho_cap);

/// JSON interchange: {"A": [[...]], "B": [[...]], "C": [[...]], "D": [[...]]}.
/// Empty matrices take their missing dimension from the other blocks.
StateSpaceModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const StateSpaceModel& F);

StateSpaceModel load_model(const std::filesystem::path& path);
void save_model(const StateSpaceModel& F, const std::filesystem::path& path);

}  // namespace aninorm
