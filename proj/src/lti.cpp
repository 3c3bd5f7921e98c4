#include "aninorm/lti.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <stdexcept>
#include <utility>
#include <vector>

#include "aninorm/errors.hpp"

namespace aninorm {

namespace {

std::string dims(const Matrix& M) {
  return std::to_string(M.rows()) + "x" + std::to_string(M.cols());
}

// Parsed JSON block; cols is unknown (nullopt) when the block has no rows.
struct ParsedBlock {
  Index rows = 0;
  std::optional<Index> cols;
  std::vector<double> values;  // row-major
};

ParsedBlock parse_block(const nlohmann::json& j, const std::string& key) {
  if (!j.is_array()) throw SchemaError("model: \"" + key + "\" must be an array of rows");
  ParsedBlock block;
  block.rows = static_cast<Index>(j.size());
  for (const auto& row : j) {
    if (!row.is_array()) throw SchemaError("model: \"" + key + "\" rows must be arrays");
    const auto len = static_cast<Index>(row.size());
    if (block.cols && *block.cols != len) {
      throw DimensionError("model: ragged rows in \"" + key + "\"");
    }
    block.cols = len;
    for (const auto& v : row) {
      if (!v.is_number()) throw SchemaError("model: non-numeric entry in \"" + key + "\"");
      const double x = v.get<double>();
      if (!std::isfinite(x)) throw SchemaError("model: non-finite entry in \"" + key + "\"");
      block.values.push_back(x);
    }
  }
  return block;
}

Matrix to_matrix(const ParsedBlock& block, Index cols) {
  Matrix M(block.rows, cols);
  for (Index i = 0; i < block.rows; ++i) {
    for (Index k = 0; k < cols; ++k) M(i, k) = block.values[i * cols + k];
  }
  return M;
}

nlohmann::json to_json_rows(const Matrix& M) {
  auto rows = nlohmann::json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

StateSpaceModel::StateSpaceModel(Matrix A, Matrix B, Matrix C, Matrix D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
  if (A_.rows() != A_.cols()) throw DimensionError("model: A must be square, got " + dims(A_));
  const Index n = A_.rows();
  if (B_.rows() != n) throw DimensionError("model: B has " + dims(B_) + ", expected n = " + std::to_string(n) + " rows");
  if (C_.cols() != n) throw DimensionError("model: C has " + dims(C_) + ", expected n = " + std::to_string(n) + " columns");
  if (D_.rows() != C_.rows() || D_.cols() != B_.cols()) {
    throw DimensionError("model: D has " + dims(D_) + ", expected " + std::to_string(C_.rows()) + "x" +
                         std::to_string(B_.cols()));
  }
  require_finite(A_, "model A");
  require_finite(B_, "model B");
  require_finite(C_, "model C");
  require_finite(D_, "model D");
}

StateSpaceModel StateSpaceModel::static_gain(Matrix D) {
  const Index p = D.rows();
  const Index m = D.cols();
  return StateSpaceModel(Matrix(0, 0), Matrix(0, m), Matrix(p, 0), std::move(D));
}

bool StateSpaceModel::operator==(const StateSpaceModel& other) const {
  auto same = [](const Matrix& x, const Matrix& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && (x.size() == 0 || x == y);
  };
  return same(A_, other.A_) && same(B_, other.B_) && same(C_, other.C_) && same(D_, other.D_);
}

ShapingFilter::ShapingFilter(StateSpaceModel model) : model_(std::move(model)) {
  if (model_.inputs() != model_.outputs()) {
    throw NotSquare("shaping filter must have as many outputs as inputs");
  }
  if (model_.inputs() == 0) throw DimensionError("shaping filter must have at least one input");
  if (!is_stable(model_)) throw StabilityError("shaping filter must be stable");
}

bool is_stable(const StateSpaceModel& F, double margin) {
  return spectral_radius(F.A()) < 1.0 - margin;
}

ComplexMatrix freq_response(const StateSpaceModel& F, double omega) {
  const Index n = F.states();
  ComplexMatrix response = F.D().cast<std::complex<double>>();
  if (n == 0) return response;
  const std::complex<double> z = std::polar(1.0, omega);
  ComplexMatrix resolvent = -F.A().cast<std::complex<double>>();
  resolvent.diagonal().array() += z;
  Eigen::PartialPivLU<ComplexMatrix> lu(resolvent);
  if (!(lu.rcond() > 1e-15)) {
    throw SingularResolvent("freq_response: e^{i omega} is numerically an eigenvalue of A");
  }
  response += F.C().cast<std::complex<double>>() * lu.solve(F.B().cast<std::complex<double>>());
  return response;
}

StateSpaceModel cascade(const StateSpaceModel& F, const StateSpaceModel& G) {
  if (F.inputs() != G.outputs()) {
    throw DimensionError("cascade: F has " + std::to_string(F.inputs()) + " inputs but G has " +
                         std::to_string(G.outputs()) + " outputs");
  }
  const Index nf = F.states();
  const Index ng = G.states();
  Matrix A = Matrix::Zero(nf + ng, nf + ng);
  A.topLeftCorner(nf, nf) = F.A();
  A.topRightCorner(nf, ng) = F.B() * G.C();
  A.bottomRightCorner(ng, ng) = G.A();
  Matrix B(nf + ng, G.inputs());
  B.topRows(nf) = F.B() * G.D();
  B.bottomRows(ng) = G.B();
  Matrix C(F.outputs(), nf + ng);
  C.leftCols(nf) = F.C();
  C.rightCols(ng) = F.D() * G.C();
  Matrix D = F.D() * G.D();
  return StateSpaceModel(std::move(A), std::move(B), std::move(C), std::move(D));
}

StateSpaceModel random_stable(Index n, Index m, Index p, std::uint64_t seed, double rho_cap) {
  if (n < 1 || m < 1 || p < 1) throw DimensionError("random_stable: n, m, p must be >= 1");
  if (!(rho_cap > 0.0 && rho_cap <= 1.0)) {
    throw std::invalid_argument("random_stable: rho_cap must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  auto draw = [&](Index rows, Index cols) {
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index k = 0; k < cols; ++k) M(i, k) = normal(rng);
    }
    return M;
  };

  // The distance 1 - ρ(A) is log-uniform on (1 - rho_cap, 1), so a cap close
  // to one actually populates the neighbourhood of the unit circle.
  const double log_min_distance = std::log(std::max(1.0 - rho_cap, 1e-12));
  Matrix A;
  for (;;) {
    const Matrix Z = draw(n, n);
    const double rho_z = spectral_radius(Z);
    const double u = uniform(rng);
    if (rho_z == 0.0 || u == 0.0) continue;
    const double rho = -std::expm1(u * log_min_distance);
    A = Z * (rho / rho_z);
    if (spectral_radius(A) < 1.0) break;
  }
  Matrix B = draw(n, m);
  Matrix C = draw(p, n);
  Matrix D = draw(p, m);
  return StateSpaceModel(std::move(A), std::move(B), std::move(C), std::move(D));
}

StateSpaceModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("model: top-level value must be an object");
  for (const auto& item : j.items()) {
    const auto& key = item.key();
    if (key != "A" && key != "B" && key != "C" && key != "D") {
      throw SchemaError("model: unexpected key \"" + key + "\"");
    }
  }
  for (const char* key : {"A", "B", "C", "D"}) {
    if (!j.contains(key)) throw SchemaError(std::string("model: missing key \"") + key + "\"");
  }
  const ParsedBlock a = parse_block(j.at("A"), "A");
  const ParsedBlock b = parse_block(j.at("B"), "B");
  const ParsedBlock c = parse_block(j.at("C"), "C");
  const ParsedBlock d = parse_block(j.at("D"), "D");

  const Index n = a.rows;
  if (a.cols && *a.cols != n) throw DimensionError("model: A must be square");
  const Index m = b.cols.value_or(d.cols.value_or(0));
  const Index p = c.rows > 0 ? c.rows : d.rows;
  if (b.rows != n) throw DimensionError("model: B must have as many rows as A");
  if (c.cols && *c.cols != n) throw DimensionError("model: C must have as many columns as A");
  if (d.rows != p) throw DimensionError("model: D must have as many rows as C");
  if ((b.cols && *b.cols != m) || (d.cols && *d.cols != m)) {
    throw DimensionError("model: B and D column counts differ");
  }
  Matrix C = (n == 0 && c.rows == 0) ? Matrix(p, 0) : to_matrix(c, n);
  return StateSpaceModel(to_matrix(a, n), to_matrix(b, m), std::move(C), to_matrix(d, m));
}

nlohmann::json model_to_json(const StateSpaceModel& F) {
  return nlohmann::json{{"A", to_json_rows(F.A())},
                        {"B", to_json_rows(F.B())},
                        {"C", to_json_rows(F.C())},
                        {"D", to_json_rows(F.D())}};
}

StateSpaceModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("model: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("model: " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

void save_model(const StateSpaceModel& F, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("model: cannot write " + path.string());
  out << model_to_json(F).dump(2) << '\n';
  if (!out) throw Error("model: write failed for " + path.string());
}

}  // namespace aninorm
