#include "hybent/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/gamma.hpp>
#include <fmt/format.h>

namespace hybent {

namespace {

bool all_finite(const CVector& v) { return v.allFinite(); }
bool all_finite(const CMatrix& m) { return m.allFinite(); }

// Flat offsets of every sub-basis state of `modes` inside `shape`, ordered like
// the sub-shape itself (last listed mode fastest).
std::vector<std::size_t> sub_offsets(const ModeShape& shape, std::span<const int> modes) {
  std::size_t count = 1;
  for (int m : modes) count *= static_cast<std::size_t>(shape.dim(m));
  std::vector<std::size_t> out(count, 0);
  std::size_t block = count;
  for (int m : modes) {
    const std::size_t d = static_cast<std::size_t>(shape.dim(m));
    block /= d;
    for (std::size_t i = 0; i < count; ++i) {
      out[i] += ((i / block) % d) * shape.stride(m);
    }
  }
  return out;
}

std::vector<int> complement(const ModeShape& shape, std::span<const int> modes) {
  std::vector<int> rest;
  for (int m = 0; m < shape.modes(); ++m) {
    if (std::find(modes.begin(), modes.end(), m) == modes.end()) rest.push_back(m);
  }
  return rest;
}

void check_distinct(const ModeShape& shape, std::span<const int> modes) {
  for (std::size_t i = 0; i < modes.size(); ++i) {
    shape.check_mode(modes[i]);
    for (std::size_t j = i + 1; j < modes.size(); ++j) {
      if (modes[i] == modes[j]) throw InvalidInput("repeated mode index");
    }
  }
}

// Applies `op` (on the sub-shape of `modes`) to every column of `m`, acting on the
// row index.
CMatrix apply_rows(const LinOp& op, const CMatrix& m, const ModeShape& shape,
                   std::span<const int> modes) {
  check_distinct(shape, modes);
  if (!(op.shape == shape.select(modes))) {
    throw InvalidInput("operator shape " + to_string(op.shape) + " does not match modes of " +
                       to_string(shape));
  }
  const auto offs = sub_offsets(shape, modes);
  const auto rest = complement(shape, modes);
  const auto bases = sub_offsets(shape, rest);
  const auto sub = static_cast<Eigen::Index>(offs.size());
  CMatrix out(m.rows(), m.cols());
  CMatrix gathered(sub, m.cols());
  for (std::size_t base : bases) {
    for (Eigen::Index s = 0; s < sub; ++s) {
      gathered.row(s) = m.row(static_cast<Eigen::Index>(base + offs[s]));
    }
    const CMatrix mapped = op.matrix * gathered;
    for (Eigen::Index s = 0; s < sub; ++s) {
      out.row(static_cast<Eigen::Index>(base + offs[s])) = mapped.row(s);
    }
  }
  return out;
}

CMatrix resize_rows(const CMatrix& m, const ModeShape& from, const ModeShape& to, int mode) {
  const int keep = std::min(from.dim(mode), to.dim(mode));
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(to.total()), m.cols());
  for (std::size_t i = 0; i < from.total(); ++i) {
    auto occ = from.occupations(i);
    if (occ[static_cast<std::size_t>(mode)] >= keep) continue;
    out.row(static_cast<Eigen::Index>(to.index(occ))) = m.row(static_cast<Eigen::Index>(i));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// ModeShape

ModeShape::ModeShape(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw InvalidInput("ModeShape needs at least one mode");
  total_ = 1;
  for (int d : dims_) {
    if (d < 2) throw InvalidInput(fmt::format("mode dimension {} < 2", d));
    total_ *= static_cast<std::size_t>(d);
  }
}

int ModeShape::dim(int mode) const {
  check_mode(mode);
  return dims_[static_cast<std::size_t>(mode)];
}

std::size_t ModeShape::stride(int mode) const {
  check_mode(mode);
  std::size_t s = 1;
  for (int m = modes() - 1; m > mode; --m) s *= static_cast<std::size_t>(dims_[static_cast<std::size_t>(m)]);
  return s;
}

void ModeShape::check_mode(int mode) const {
  if (mode < 0 || mode >= modes()) {
    throw InvalidInput(fmt::format("mode index {} out of range for {} modes", mode, modes()));
  }
}

std::vector<int> ModeShape::occupations(std::size_t index) const {
  std::vector<int> occ(dims_.size());
  for (std::size_t m = dims_.size(); m-- > 0;) {
    const auto d = static_cast<std::size_t>(dims_[m]);
    occ[m] = static_cast<int>(index % d);
    index /= d;
  }
  return occ;
}

std::size_t ModeShape::index(std::span<const int> occupations) const {
  if (occupations.size() != dims_.size()) throw InvalidInput("occupation list has wrong length");
  std::size_t idx = 0;
  for (std::size_t m = 0; m < dims_.size(); ++m) {
    if (occupations[m] < 0 || occupations[m] >= dims_[m]) {
      throw InvalidInput(fmt::format("occupation {} out of range for mode {}", occupations[m], m));
    }
    idx = idx * static_cast<std::size_t>(dims_[m]) + static_cast<std::size_t>(occupations[m]);
  }
  return idx;
}

ModeShape ModeShape::without(int mode) const {
  check_mode(mode);
  if (modes() == 1) throw InvalidInput("cannot remove the only mode");
  std::vector<int> d = dims_;
  d.erase(d.begin() + mode);
  return ModeShape(std::move(d));
}

ModeShape ModeShape::select(std::span<const int> modes) const {
  std::vector<int> d;
  for (int m : modes) d.push_back(dim(m));
  return ModeShape(std::move(d));
}

std::string to_string(const ModeShape& shape) {
  std::string s = "(";
  for (int m = 0; m < shape.modes(); ++m) {
    if (m) s += ", ";
    s += std::to_string(shape.dim(m));
  }
  return s + ")";
}

// ---------------------------------------------------------------------------
// Ket / LinOp / DensityOp

Ket::Ket(ModeShape shape_, CVector amps_, bool normalized_, double discarded_)
    : shape(std::move(shape_)), amps(std::move(amps_)), normalized(normalized_), discarded(discarded_) {
  if (static_cast<std::size_t>(amps.size()) != shape.total()) {
    throw InvalidInput(fmt::format("ket length {} does not match shape {}", amps.size(), to_string(shape)));
  }
  if (!all_finite(amps)) throw InvalidInput("ket has non-finite amplitudes");
  if (normalized && std::abs(norm2() - 1.0) > 1e-10) {
    throw InvalidInput(fmt::format("ket flagged normalized but norm^2 = {:.15g}", norm2()));
  }
}

Ket Ket::normalized_copy() const {
  const double n2 = norm2();
  if (!(n2 > 0.0)) throw InvalidInput("cannot normalize a zero ket");
  return Ket(shape, amps / std::sqrt(n2), true, discarded);
}

Ket basis_ket(const ModeShape& shape, std::span<const int> occupations) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(shape.total()));
  v(static_cast<Eigen::Index>(shape.index(occupations))) = 1.0;
  return Ket(shape, std::move(v), true);
}

Ket fock_ket(int n, int d) {
  const int occ[] = {n};
  return basis_ket(ModeShape({d}), occ);
}

LinOp::LinOp(ModeShape shape_, CMatrix matrix_) : shape(std::move(shape_)), matrix(std::move(matrix_)) {
  const auto n = static_cast<Eigen::Index>(shape.total());
  if (matrix.rows() != n || matrix.cols() != n) {
    throw InvalidInput(fmt::format("operator of size {}x{} does not match shape {}", matrix.rows(),
                                   matrix.cols(), to_string(shape)));
  }
  if (!all_finite(matrix)) throw InvalidInput("operator has non-finite entries");
}

DensityOp::DensityOp(ModeShape shape, CMatrix matrix, double herm_tol, double trace_tol, double psd_tol)
    : shape_(std::move(shape)), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(shape_.total());
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw InvalidInput("density matrix size does not match shape " + to_string(shape_));
  }
  if (!all_finite(matrix_)) throw InvalidInput("density matrix has non-finite entries");
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > herm_tol) throw InvalidInput(fmt::format("density matrix not Hermitian (max dev {:.3g})", herm));
  if (std::abs(trace() - 1.0) > trace_tol) {
    throw InvalidInput(fmt::format("density matrix trace {:.15g} != 1", trace()));
  }
  const double lmin = min_eigenvalue();
  if (lmin < -psd_tol) throw InvalidInput(fmt::format("density matrix not PSD (min eigenvalue {:.3g})", lmin));
}

DensityOp DensityOp::pure(const Ket& psi) {
  const Ket u = psi.normalized_copy();
  return DensityOp(u.shape, u.amps * u.amps.adjoint());
}

DensityOp DensityOp::maximally_mixed(const ModeShape& shape) {
  const auto n = static_cast<Eigen::Index>(shape.total());
  return DensityOp(shape, CMatrix::Identity(n, n) / static_cast<double>(n));
}

DensityOp DensityOp::normalized(ModeShape shape, CMatrix matrix) {
  CMatrix h = 0.5 * (matrix + matrix.adjoint());
  const double tr = h.trace().real();
  if (!(tr > 0.0)) throw InvalidInput("cannot normalize a density matrix with non-positive trace");
  h /= tr;
  return DensityOp(std::move(shape), std::move(h));
}

double DensityOp::purity() const { return (matrix_ * matrix_).trace().real(); }

double DensityOp::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// Builders

double coherent_tail(cplx alpha, int d) {
  const double lambda = std::norm(alpha);
  if (lambda == 0.0) return 0.0;
  // P(N >= d) for N ~ Poisson(lambda)
  return boost::math::gamma_p(static_cast<double>(d), lambda);
}

Ket coherent(cplx alpha, int d) {
  if (d < 2) throw InvalidInput("coherent: d < 2");
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw InvalidInput("coherent: non-finite amplitude");
  }
  CVector v(d);
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < d; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  const double tail = coherent_tail(alpha, d);
  return Ket(ModeShape({d}), std::move(v), tail <= kTruncationTol, tail);
}

LinOp creation_op(int d) {
  if (d < 2) throw InvalidInput("creation_op: d < 2");
  CMatrix m = CMatrix::Zero(d, d);
  for (int n = 0; n + 1 < d; ++n) m(n + 1, n) = std::sqrt(static_cast<double>(n + 1));
  return LinOp(ModeShape({d}), std::move(m));
}

LinOp annihilation_op(int d) {
  LinOp a = creation_op(d);
  a.matrix.adjointInPlace();
  return a;
}

LinOp number_op(int d) {
  if (d < 2) throw InvalidInput("number_op: d < 2");
  CMatrix m = CMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) m(n, n) = static_cast<double>(n);
  return LinOp(ModeShape({d}), std::move(m));
}

LinOp parity_op(int d) {
  if (d < 2) throw InvalidInput("parity_op: d < 2");
  CMatrix m = CMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) m(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
  return LinOp(ModeShape({d}), std::move(m));
}

LinOp phase_shift_op(double phi, int d) {
  if (d < 2) throw InvalidInput("phase_shift_op: d < 2");
  CMatrix m = CMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) m(n, n) = std::polar(1.0, phi * n);
  return LinOp(ModeShape({d}), std::move(m));
}

CMatrix expm_antihermitian(const CMatrix& generator) {
  const cplx i(0.0, 1.0);
  const CMatrix h = i * generator;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()));
  const auto& lambda = es.eigenvalues();
  CVector phases(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) phases(k) = std::polar(1.0, -lambda(k));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

int displacement_work_dim(cplx beta, int d) {
  return d + static_cast<int>(std::ceil(10.0 * std::abs(beta))) + 10;
}

LinOp displacement_op(cplx beta, int d, int d_work) {
  if (d < 2) throw InvalidInput("displacement_op: d < 2");
  if (d_work < d) throw InvalidInput("displacement_op: d_work < d");
  if (beta == cplx(0.0)) return LinOp(ModeShape({d}), CMatrix::Identity(d, d));
  const CMatrix adag = creation_op(d_work).matrix;
  const CMatrix gen = beta * adag - std::conj(beta) * adag.adjoint();
  const CMatrix u = expm_antihermitian(gen);
  return LinOp(ModeShape({d}), u.topLeftCorner(d, d));
}

LinOp displacement_op(cplx beta, int d) { return displacement_op(beta, d, displacement_work_dim(beta, d)); }

LinOp beam_splitter_op(double theta, int dim_a, int dim_b) {
  if (dim_a < 2 || dim_b < 2) throw InvalidInput("beam_splitter_op: dims < 2");
  const ModeShape sub({dim_a, dim_b});
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(sub.total()), static_cast<Eigen::Index>(sub.total()));
  // The generator conserves n_a + n_b; each total-N block {|k, N-k>} is closed,
  // so its exponential is exact before cropping to the truncated dims.
  for (int total = 0; total <= dim_a + dim_b - 2; ++total) {
    const int size = total + 1;
    CMatrix gen = CMatrix::Zero(size, size);
    for (int k = 0; k <= total; ++k) {
      const double nb = total - k;
      if (k + 1 <= total) gen(k + 1, k) += theta * std::sqrt((k + 1.0) * nb);  // a^dag b
      if (k >= 1) gen(k - 1, k) -= theta * std::sqrt(k * (nb + 1.0));        // a b^dag
    }
    const CMatrix u = expm_antihermitian(gen);
    for (int k_out = 0; k_out <= total; ++k_out) {
      if (k_out >= dim_a || total - k_out >= dim_b) continue;
      for (int k_in = 0; k_in <= total; ++k_in) {
        if (k_in >= dim_a || total - k_in >= dim_b) continue;
        const int o[] = {k_out, total - k_out};
        const int in[] = {k_in, total - k_in};
        out(static_cast<Eigen::Index>(sub.index(o)), static_cast<Eigen::Index>(sub.index(in))) = u(k_out, k_in);
      }
    }
  }
  return LinOp(sub, std::move(out));
}

LinOp beam_splitter_op(double theta, int mode_a, int mode_b, const ModeShape& shape) {
  if (mode_a == mode_b) throw InvalidInput("beam_splitter_op: modes must differ");
  return beam_splitter_op(theta, shape.dim(mode_a), shape.dim(mode_b));
}

// ---------------------------------------------------------------------------
// Composition

Ket tensor(const Ket& a, const Ket& b) {
  std::vector<int> dims = a.shape.dims();
  dims.insert(dims.end(), b.shape.dims().begin(), b.shape.dims().end());
  CVector v(a.amps.size() * b.amps.size());
  for (Eigen::Index i = 0; i < a.amps.size(); ++i) v.segment(i * b.amps.size(), b.amps.size()) = a.amps(i) * b.amps;
  const bool norm = a.normalized && b.normalized;
  return Ket(ModeShape(std::move(dims)), std::move(v), norm && std::abs(v.squaredNorm() - 1.0) <= 1e-10,
             a.discarded + b.discarded);
}

LinOp tensor(const LinOp& a, const LinOp& b) {
  std::vector<int> dims = a.shape.dims();
  dims.insert(dims.end(), b.shape.dims().begin(), b.shape.dims().end());
  const auto ra = a.matrix.rows();
  const auto rb = b.matrix.rows();
  CMatrix m(ra * rb, ra * rb);
  for (Eigen::Index i = 0; i < ra; ++i) {
    for (Eigen::Index j = 0; j < ra; ++j) m.block(i * rb, j * rb, rb, rb) = a.matrix(i, j) * b.matrix;
  }
  return LinOp(ModeShape(std::move(dims)), std::move(m));
}

DensityOp tensor(const DensityOp& a, const DensityOp& b) {
  const LinOp t = tensor(LinOp(a.shape(), a.matrix()), LinOp(b.shape(), b.matrix()));
  return DensityOp(t.shape, t.matrix);
}

LinOp identity_op(const ModeShape& shape) {
  const auto n = static_cast<Eigen::Index>(shape.total());
  return LinOp(shape, CMatrix::Identity(n, n));
}

Ket apply(const LinOp& op, const Ket& psi, std::span<const int> modes) {
  CMatrix col = apply_rows(op, psi.amps, psi.shape, modes);
  return Ket(psi.shape, col.col(0), false, psi.discarded);
}

Ket apply(const LinOp& op, const Ket& psi) {
  if (!(op.shape == psi.shape)) throw InvalidInput("apply: operator/ket shape mismatch");
  return Ket(psi.shape, op.matrix * psi.amps, false, psi.discarded);
}

LinOp embed(const LinOp& op, const ModeShape& shape, std::span<const int> modes) {
  const auto n = static_cast<Eigen::Index>(shape.total());
  return LinOp(shape, apply_rows(op, CMatrix::Identity(n, n), shape, modes));
}

CMatrix sandwich(const LinOp& op, const CMatrix& m, const ModeShape& shape, std::span<const int> modes) {
  const CMatrix left = apply_rows(op, m, shape, modes);
  return apply_rows(op, left.adjoint(), shape, modes).adjoint();
}

DensityOp apply(const LinOp& op, const DensityOp& rho, std::span<const int> modes) {
  const CMatrix both = sandwich(op, rho.matrix(), rho.shape(), modes);
  return DensityOp(rho.shape(), 0.5 * (both + both.adjoint()));
}

Ket apply_creation(const Ket& psi, int mode, double tol) {
  const int d = psi.shape.dim(mode);
  const std::size_t stride = psi.shape.stride(mode);
  CVector out = CVector::Zero(psi.amps.size());
  double lost = 0.0;
  for (std::size_t i = 0; i < psi.shape.total(); ++i) {
    const int n = static_cast<int>((i / stride) % static_cast<std::size_t>(d));
    const cplx a = psi[i];
    if (n + 1 >= d) {
      lost += std::norm(a) * d;
      continue;
    }
    out(static_cast<Eigen::Index>(i + stride)) = std::sqrt(n + 1.0) * a;
  }
  const double kept = out.squaredNorm();
  if (lost > tol * std::max(kept + lost, 1e-300)) {
    throw TruncationError(fmt::format("creation operator discards {:.3g} of the norm on mode {} (dim {})",
                                      lost / (kept + lost), mode, d));
  }
  return Ket(psi.shape, std::move(out), false, psi.discarded + lost);
}

Ket resize_mode(const Ket& psi, int mode, int new_dim, double tol) {
  std::vector<int> dims = psi.shape.dims();
  psi.shape.check_mode(mode);
  dims[static_cast<std::size_t>(mode)] = new_dim;
  const ModeShape to(std::move(dims));
  CVector v = resize_rows(psi.amps, psi.shape, to, mode).col(0);
  const double lost = psi.norm2() - v.squaredNorm();
  if (lost > tol * std::max(psi.norm2(), 1e-300)) {
    throw TruncationError(fmt::format("cropping mode {} to {} levels discards {:.3g} of the norm", mode, new_dim,
                                      lost / psi.norm2()));
  }
  const bool norm = psi.normalized && std::abs(v.squaredNorm() - 1.0) <= 1e-10;
  return Ket(to, std::move(v), norm, psi.discarded + std::max(lost, 0.0));
}

DensityOp resize_mode(const DensityOp& rho, int mode, int new_dim, double tol) {
  std::vector<int> dims = rho.shape().dims();
  rho.shape().check_mode(mode);
  dims[static_cast<std::size_t>(mode)] = new_dim;
  const ModeShape to(std::move(dims));
  const CMatrix rows = resize_rows(rho.matrix(), rho.shape(), to, mode);
  const CMatrix both = resize_rows(rows.adjoint(), rho.shape(), to, mode).adjoint();
  const double lost = 1.0 - both.trace().real();
  if (lost > tol) {
    throw TruncationError(fmt::format("cropping mode {} to {} levels discards {:.3g} of the trace", mode, new_dim, lost));
  }
  return DensityOp::normalized(to, both);
}

Ket apply_displacement(const Ket& psi, int mode, cplx beta, double tol) {
  const int d = psi.shape.dim(mode);
  const int d_work = displacement_work_dim(beta, d);
  const Ket padded = resize_mode(psi, mode, d_work);
  const CMatrix adag = creation_op(d_work).matrix;
  const LinOp u(ModeShape({d_work}), expm_antihermitian(beta * adag - std::conj(beta) * adag.adjoint()));
  const int m[] = {mode};
  Ket moved = apply(u, padded, m);
  moved.normalized = false;
  return resize_mode(moved, mode, d, tol);
}

DensityOp partial_trace(const DensityOp& rho, std::span<const int> keep_in) {
  std::vector<int> keep(keep_in.begin(), keep_in.end());
  std::sort(keep.begin(), keep.end());
  check_distinct(rho.shape(), keep);
  if (keep.empty()) throw InvalidInput("partial_trace: keep set is empty");
  const auto rest = complement(rho.shape(), keep);
  const auto koff = sub_offsets(rho.shape(), keep);
  const auto toff = rest.empty() ? std::vector<std::size_t>{0} : sub_offsets(rho.shape(), rest);
  const auto& m = rho.matrix();
  const auto nk = static_cast<Eigen::Index>(koff.size());
  CMatrix out = CMatrix::Zero(nk, nk);
  for (std::size_t t : toff) {
    for (Eigen::Index i = 0; i < nk; ++i) {
      for (Eigen::Index j = 0; j < nk; ++j) {
        out(i, j) += m(static_cast<Eigen::Index>(koff[i] + t), static_cast<Eigen::Index>(koff[j] + t));
      }
    }
  }
  return DensityOp(rho.shape().select(keep), 0.5 * (out + out.adjoint()));
}

Projection project_mode(const Ket& psi, int mode, int fock_n) {
  const int d = psi.shape.dim(mode);
  if (fock_n < 0 || fock_n >= d) throw InvalidInput(fmt::format("fock_n {} out of range for dim {}", fock_n, d));
  const ModeShape rest = psi.shape.without(mode);
  const std::size_t stride = psi.shape.stride(mode);
  CVector v(static_cast<Eigen::Index>(rest.total()));
  // index = hi * (d * stride) + n * stride + lo
  for (std::size_t r = 0; r < rest.total(); ++r) {
    const std::size_t hi = r / stride;
    const std::size_t lo = r % stride;
    v(static_cast<Eigen::Index>(r)) =
        psi[hi * static_cast<std::size_t>(d) * stride + static_cast<std::size_t>(fock_n) * stride + lo];
  }
  const double p = v.squaredNorm();
  return {Ket(rest, std::move(v), false, psi.discarded), p};
}

double mean_photon(const Ket& psi, int mode) {
  const int d = psi.shape.dim(mode);
  const std::size_t stride = psi.shape.stride(mode);
  double num = 0.0;
  for (std::size_t i = 0; i < psi.shape.total(); ++i) {
    num += std::norm(psi[i]) * static_cast<double>((i / stride) % static_cast<std::size_t>(d));
  }
  return num / psi.norm2();
}

std::vector<double> photon_distribution(const DensityOp& rho, int mode) {
  const int d = rho.shape().dim(mode);
  const std::size_t stride = rho.shape().stride(mode);
  std::vector<double> p(static_cast<std::size_t>(d), 0.0);
  for (std::size_t i = 0; i < rho.shape().total(); ++i) {
    p[(i / stride) % static_cast<std::size_t>(d)] += rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  }
  return p;
}

double mean_photon(const DensityOp& rho, int mode) {
  const auto p = photon_distribution(rho, mode);
  double s = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) s += static_cast<double>(n) * p[n];
  return s;
}

}  // namespace hybent
