#include "diec/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace diec {

double RandomStream::normal() noexcept {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace diec

namespace diec::quantum {

namespace {

using cd = std::complex<double>;

Eigen::SelfAdjointEigenSolver<Matrix> hermitian_eigen(const Matrix& m) {
  const Matrix h = 0.5 * (m + m.adjoint());
  return Eigen::SelfAdjointEigenSolver<Matrix>(h);
}

std::string describe(const char* what, double value) {
  std::ostringstream os;
  os << what << " (" << value << ")";
  return os.str();
}

}  // namespace

const Matrix2& pauli_x() {
  static const Matrix2 m = (Matrix2() << 0, 1, 1, 0).finished();
  return m;
}

const Matrix2& pauli_y() {
  static const Matrix2 m = (Matrix2() << 0, cd(0, -1), cd(0, 1), 0).finished();
  return m;
}

const Matrix2& pauli_z() {
  static const Matrix2 m = (Matrix2() << 1, 0, 0, -1).finished();
  return m;
}

Matrix kron(const Matrix& lhs, const Matrix& rhs) {
  Matrix out(lhs.rows() * rhs.rows(), lhs.cols() * rhs.cols());
  for (Eigen::Index i = 0; i < lhs.rows(); ++i)
    for (Eigen::Index j = 0; j < lhs.cols(); ++j)
      out.block(i * rhs.rows(), j * rhs.cols(), rhs.rows(), rhs.cols()) = lhs(i, j) * rhs;
  return out;
}

double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void validate_density(const Matrix& rho, double tol) {
  if (rho.rows() == 0 || rho.rows() != rho.cols())
    throw ValidationError("density matrix must be square and non-empty");
  if (const double h = hermiticity_defect(rho); h > tol)
    throw ValidationError(describe("density matrix is not Hermitian", h));
  if (const double t = std::abs(rho.trace() - cd(1.0)); t > tol)
    throw ValidationError(describe("density matrix trace differs from 1 by", t));
  const double min_eig = hermitian_eigen(rho).eigenvalues().minCoeff();
  if (min_eig < -tol)
    throw ValidationError(describe("density matrix has a negative eigenvalue", min_eig));
}

Eigen::VectorXd density_eigenvalues(const Matrix& rho) {
  validate_density(rho);
  Eigen::VectorXd ev = hermitian_eigen(rho).eigenvalues();
  for (auto& v : ev) v = std::clamp(v, 0.0, 1.0);
  return ev;
}

TwoQubitState::TwoQubitState(const Matrix4& m) : m_(m) { validate_density(m_); }

TwoQubitState TwoQubitState::from_matrix(const Matrix& m) {
  if (m.rows() != 4 || m.cols() != 4) throw ValidationError("two-qubit state must be 4x4");
  return TwoQubitState(Matrix4(m));
}

BellDiagonalSpectrum BellDiagonalSpectrum::from_values(const std::array<double, 4>& v) {
  double sum = 0.0;
  std::array<double, 4> c{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (v[i] < -1e-12) throw ValidationError(describe("negative Bell weight", v[i]));
    c[i] = std::max(v[i], 0.0);
    sum += c[i];
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ValidationError(describe("Bell weights do not sum to 1", sum));
  return {c[0], c[1], c[2], c[3]};
}

Observable::Observable(const Matrix& m) : m_(m) {
  const auto d = m.rows();
  if (d == 0 || d != m.cols()) throw ValidationError("observable must be square and non-empty");
  if (d % 2 != 0) throw ValidationError("observable dimension must be even");
  if (d > kMaxLocalDimension) throw ValidationError("observable dimension exceeds supported maximum");
  if (const double h = hermiticity_defect(m); h > kStateTolerance)
    throw ValidationError(describe("observable is not Hermitian", h));
  const double sq = (m * m - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (sq > kStateTolerance) throw ValidationError(describe("observable does not square to identity", sq));
}

Matrix Observable::projector(int bit) const {
  const double sign = bit == 0 ? 1.0 : -1.0;
  return 0.5 * (Matrix::Identity(dim(), dim()) + sign * m_);
}

Matrix JordanBlock::isometry() const {
  Matrix v(first.size(), 2);
  v.col(0) = first;
  v.col(1) = second;
  return v;
}

std::vector<JordanBlock> jordan_blocks(const Observable& obs0, const Observable& obs1) {
  const int d = obs0.dim();
  if (obs1.dim() != d) throw ValidationError("observables act on different dimensions");
  const Matrix& a0 = obs0.matrix();
  const Matrix& a1 = obs1.matrix();

  // The symmetrized product commutes with both reflections; its eigenvalue on
  // each block is cos(angle).
  const auto sym = hermitian_eigen(0.5 * (a0 * a1 + a1 * a0));
  const Eigen::VectorXd& cosines = sym.eigenvalues();
  const Matrix& vecs = sym.eigenvectors();

  constexpr double kClusterTol = 1e-8;
  std::vector<JordanBlock> blocks;
  std::vector<Vector> leftovers;

  auto restricted = [](const Matrix& op, const Matrix& iso) -> Matrix2 {
    return Matrix2(iso.adjoint() * op * iso);
  };

  for (int start = 0; start < d;) {
    int stop = start + 1;
    while (stop < d && cosines(stop) - cosines(start) <= kClusterTol) ++stop;
    const int m = stop - start;
    const double c = std::clamp(cosines.segment(start, m).mean(), -1.0, 1.0);
    const Matrix q = vecs.middleCols(start, m);

    const auto inner = hermitian_eigen(Matrix(q.adjoint() * a0 * q));
    std::vector<Vector> plus, minus;
    for (int k = 0; k < m; ++k) {
      Vector v = q * inner.eigenvectors().col(k);
      v.normalize();
      (inner.eigenvalues()(k) > 0 ? plus : minus).push_back(std::move(v));
    }

    if (1.0 - std::abs(c) > kClusterTol) {
      if (plus.size() != minus.size())
        throw VerificationError("Jordan decomposition: unbalanced eigenspace in a regular block");
      const double s = std::sqrt(1.0 - c * c);
      for (auto& v : plus) {
        Vector w = (a1 * v - c * v) / s;
        w.normalize();
        JordanBlock b;
        b.angle = std::acos(c);
        b.first = v;
        b.second = w;
        const Matrix iso = b.isometry();
        b.obs0 = restricted(a0, iso);
        b.obs1 = restricted(a1, iso);
        blocks.push_back(std::move(b));
      }
      start = stop;
      continue;
    }

    // Degenerate cluster: obs1 = sign * obs0 here. Pair opposite obs0
    // eigenvectors into sigma_z blocks and keep the rest as 1-dim pieces.
    const double sign = c > 0 ? 1.0 : -1.0;
    const std::size_t paired = std::min(plus.size(), minus.size());
    for (std::size_t k = 0; k < paired; ++k) {
      JordanBlock b;
      b.angle = sign > 0 ? 0.0 : std::numbers::pi;
      b.first = plus[k];
      b.second = minus[k];
      const Matrix iso = b.isometry();
      b.obs0 = restricted(a0, iso);
      b.obs1 = restricted(a1, iso);
      blocks.push_back(std::move(b));
    }
    for (std::size_t k = paired; k < plus.size(); ++k) leftovers.push_back(plus[k]);
    for (std::size_t k = paired; k < minus.size(); ++k) leftovers.push_back(minus[k]);
    start = stop;
  }

  if (leftovers.size() % 2 != 0)
    throw VerificationError("Jordan decomposition: odd number of one-dimensional blocks");
  for (std::size_t k = 0; k < leftovers.size(); k += 2) {
    JordanBlock b;
    b.first = leftovers[k];
    b.second = leftovers[k + 1];
    const Matrix iso = b.isometry();
    b.obs0 = restricted(a0, iso);
    b.obs1 = restricted(a1, iso);
    const double cos_angle = 0.5 * (b.obs0 * b.obs1).trace().real();
    b.angle = std::acos(std::clamp(cos_angle, -1.0, 1.0));
    blocks.push_back(std::move(b));
  }
  return blocks;
}

Matrix partial_trace(const Matrix& rho, std::span<const int> dims, std::span<const int> keep) {
  int total = 1;
  for (int d : dims) {
    if (d <= 0) throw ValidationError("subsystem dimensions must be positive");
    total *= d;
  }
  if (rho.rows() != total || rho.cols() != total)
    throw ValidationError("state dimension does not match subsystem dimensions");
  const int parts = static_cast<int>(dims.size());
  std::vector<bool> kept(parts, false);
  int kept_dim = 1;
  for (int k : keep) {
    if (k < 0 || k >= parts || kept[k]) throw ValidationError("invalid subsystem selection");
    kept[k] = true;
    kept_dim *= dims[k];
  }

  // Per full index: its kept-subsystem index and its traced-out remainder.
  std::vector<int> kept_index(total), traced_index(total);
  std::vector<int> digits(parts);
  for (int i = 0; i < total; ++i) {
    int r = i;
    for (int p = parts - 1; p >= 0; --p) {
      digits[p] = r % dims[p];
      r /= dims[p];
    }
    int ki = 0;
    for (int k : keep) ki = ki * dims[k] + digits[k];
    int ti = 0;
    for (int p = 0; p < parts; ++p)
      if (!kept[p]) ti = ti * dims[p] + digits[p];
    kept_index[i] = ki;
    traced_index[i] = ti;
  }

  Matrix out = Matrix::Zero(kept_dim, kept_dim);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j)
      if (traced_index[i] == traced_index[j]) out(kept_index[i], kept_index[j]) += rho(i, j);
  return out;
}

Matrix2 partial_trace(const TwoQubitState& state, Side keep) {
  const std::array<int, 2> dims{2, 2};
  const std::array<int, 1> which{keep == Side::A ? 0 : 1};
  return Matrix2(partial_trace(Matrix(state.matrix()), dims, which));
}

double shannon_entropy(std::span<const double> probabilities) {
  double h = 0.0;
  for (double p : probabilities)
    if (p > kEigenvalueFloor) h -= p * std::log2(p);
  return h;
}

double von_neumann_entropy(const Matrix& rho) {
  const Eigen::VectorXd ev = density_eigenvalues(rho);
  return shannon_entropy(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())));
}

double conditional_entropy(const Matrix& rho, std::span<const int> dims, int target) {
  std::vector<int> rest;
  for (int p = 0; p < static_cast<int>(dims.size()); ++p)
    if (p != target) rest.push_back(p);
  if (rest.size() + 1 != dims.size()) throw ValidationError("conditional entropy: bad target subsystem");
  return von_neumann_entropy(rho) - von_neumann_entropy(partial_trace(rho, dims, rest));
}

double conditional_entropy(const TwoQubitState& state) {
  const std::array<int, 2> dims{2, 2};
  return conditional_entropy(Matrix(state.matrix()), dims, 0);
}

namespace {

Matrix psd_sqrt(const Matrix& rho) {
  const auto es = hermitian_eigen(rho);
  Eigen::VectorXd root = es.eigenvalues();
  for (auto& v : root) v = std::sqrt(std::max(v, 0.0));
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw ValidationError("fidelity: dimension mismatch");
  validate_density(rho);
  validate_density(sigma);
  const Matrix s = psd_sqrt(rho);
  const auto inner = hermitian_eigen(Matrix(s * sigma * s));
  double tr = 0.0;
  for (double v : inner.eigenvalues()) tr += std::sqrt(std::max(v, 0.0));
  return std::clamp(tr * tr, 0.0, 1.0);
}

const std::array<Eigen::Vector4cd, 4>& bell_vectors() {
  static const std::array<Eigen::Vector4cd, 4> v = [] {
    const double r = std::numbers::sqrt2 / 2.0;
    std::array<Eigen::Vector4cd, 4> out;
    out[0] << r, 0, 0, r;   // Phi+
    out[1] << r, 0, 0, -r;  // Phi-
    out[2] << 0, r, r, 0;   // Psi+
    out[3] << 0, r, -r, 0;  // Psi-
    return out;
  }();
  return v;
}

const Matrix4& bell_basis() {
  static const Matrix4 b = [] {
    Matrix4 m;
    for (int k = 0; k < 4; ++k) m.col(k) = bell_vectors()[k];
    return m;
  }();
  return b;
}

Matrix4 in_bell_basis(const TwoQubitState& state) {
  return bell_basis().adjoint() * state.matrix() * bell_basis();
}

double bell_off_diagonal(const TwoQubitState& state) {
  const Matrix4 b = in_bell_basis(state);
  double worst = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) worst = std::max(worst, std::abs(b(i, j)));
  return worst;
}

TwoQubitState twirl(const TwoQubitState& state) {
  static const std::array<Matrix4, 4> bilateral = [] {
    std::array<Matrix4, 4> u;
    u[0] = Matrix4::Identity();
    u[1] = kron(pauli_x(), pauli_x());
    u[2] = kron(pauli_y(), pauli_y());
    u[3] = kron(pauli_z(), pauli_z());
    return u;
  }();
  Matrix4 acc = Matrix4::Zero();
  for (const auto& u : bilateral) acc += u * state.matrix() * u.adjoint();
  return TwoQubitState(0.25 * acc);
}

NotBellDiagonalError::NotBellDiagonalError(double max_off_diagonal)
    : ValidationError(describe("state is not Bell-diagonal; max off-diagonal", max_off_diagonal)),
      max_off_diagonal_(max_off_diagonal) {}

BellDiagonalSpectrum bell_spectrum(const TwoQubitState& state, double tol) {
  const double off = bell_off_diagonal(state);
  if (off > tol) throw NotBellDiagonalError(off);
  const Matrix4 b = in_bell_basis(state);
  return BellDiagonalSpectrum::from_values(
      {b(0, 0).real(), b(1, 1).real(), b(2, 2).real(), b(3, 3).real()});
}

TwoQubitState bell_diagonal_state(const BellDiagonalSpectrum& spectrum) {
  const auto w = spectrum.values();
  Matrix4 m = Matrix4::Zero();
  for (int k = 0; k < 4; ++k) m += w[k] * bell_vectors()[k] * bell_vectors()[k].adjoint();
  return TwoQubitState(m);
}

TwoQubitState werner_state(double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw ValidationError(describe("Werner noise must lie in [0,1]", xi));
  const Eigen::Vector4cd& phi = bell_vectors()[0];
  return TwoQubitState((1.0 - xi) * phi * phi.adjoint() + 0.25 * xi * Matrix4::Identity());
}

Matrix pure_state(const Vector& psi) {
  const Vector v = psi.normalized();
  return v * v.adjoint();
}

Matrix random_density(int dim, RandomStream& rng) {
  if (dim <= 0) throw ValidationError("random_density: dimension must be positive");
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = cd(rng.normal(), rng.normal());
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

TwirlSuiteReport twirl_property_suite(std::uint64_t seed, int states) {
  if (states < 1) throw ValidationError("twirl suite needs at least one state");
  TwirlSuiteReport r;
  r.states = states;
  auto entry_max = [](const Matrix& m) { return m.cwiseAbs().maxCoeff(); };

  for (int k = 0; k < states; ++k) {
    RandomStream rng(seed, static_cast<std::uint64_t>(k), StreamTag::twirl);
    const TwoQubitState rho(Matrix4(random_density(4, rng)));
    const TwoQubitState once = twirl(rho);
    const TwoQubitState twice = twirl(once);
    r.max_off_diagonal = std::max(r.max_off_diagonal, bell_off_diagonal(once));
    const Matrix4 before = in_bell_basis(rho);
    const Matrix4 after = in_bell_basis(once);
    for (int j = 0; j < 4; ++j)
      r.max_diagonal_change = std::max(r.max_diagonal_change, std::abs(before(j, j) - after(j, j)));
    r.max_idempotence_defect = std::max(r.max_idempotence_defect, entry_max(twice.matrix() - once.matrix()));
  }

  std::vector<Matrix4> fixed;
  for (const auto& v : bell_vectors()) fixed.push_back(v * v.adjoint());
  fixed.push_back(0.25 * Matrix4::Identity());
  for (const auto& m : fixed)
    r.max_fixed_point_defect = std::max(r.max_fixed_point_defect, entry_max(twirl(TwoQubitState(m)).matrix() - m));

  // Side information K with 4 values: rho_ABK = sum_k p_k rho_k (x) |k><k|,
  // twirled on AB. The bilateral Paulis act as U (x) U (x) I on the joint state.
  constexpr int kSide = 4;
  const int trials = std::max(1, states / 10);
  for (int t = 0; t < trials; ++t) {
    RandomStream rng(seed, static_cast<std::uint64_t>(t), StreamTag::blocks);
    std::array<double, kSide> weights{};
    double total = 0.0;
    for (auto& w : weights) total += (w = 0.05 + rng.uniform());
    Matrix joint = Matrix::Zero(4 * kSide, 4 * kSide);
    double additive = 0.0;
    for (int k = 0; k < kSide; ++k) {
      weights[k] /= total;
      const TwoQubitState rho(Matrix4(random_density(4, rng)));
      Matrix side = Matrix::Zero(kSide, kSide);
      side(k, k) = 1.0;
      joint += weights[k] * kron(rho.matrix(), side);
      additive += weights[k] * conditional_entropy(twirl(rho));
    }
    Matrix twirled = Matrix::Zero(joint.rows(), joint.cols());
    for (const Matrix2* u : {&pauli_x(), &pauli_y(), &pauli_z()}) {
      const Matrix full = kron(kron(*u, *u), Matrix::Identity(kSide, kSide));
      twirled += full * joint * full.adjoint();
    }
    twirled = 0.25 * (twirled + joint);

    const std::array<int, 3> dims{2, 2, kSide};
    r.max_decoupling_defect =
        std::max(r.max_decoupling_defect, std::abs(conditional_entropy(twirled, dims, 0) - additive));
    for (int k = 0; k < kSide; ++k) {
      Matrix4 block;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) block(i, j) = twirled(i * kSide + k, j * kSide + k) / weights[k];
      r.max_block_off_diagonal = std::max(r.max_block_off_diagonal, bell_off_diagonal(TwoQubitState(block)));
    }
  }

  r.passed = r.max_off_diagonal < 1e-12 && r.max_diagonal_change < 1e-12 && r.max_idempotence_defect < 1e-12 &&
             r.max_fixed_point_defect < 1e-14 && r.max_decoupling_defect < 1e-9 && r.max_block_off_diagonal < 1e-12;
  return r;
}

}  // namespace diec::quantum
