#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <istream>
#include <numbers>
#include <ostream>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "stbem/data.hpp"
#include "stbem/error.hpp"
#include "stbem/kernel.hpp"
#include "stbem/parallel.hpp"
#include "stbem/quadrature.hpp"
#include "stbem/space.hpp"

namespace stbem {

using Matrix = Eigen::MatrixXd;

/// Block lower triangular, block Toeplitz Galerkin matrix: block k couples
/// time cell j (source) to cell j + k (test). Blocks are stored densely or,
/// for rotation invariant curves, as the first panel row of each block.
class CausalBlockMatrix {
 public:
  CausalBlockMatrix() = default;

  static CausalBlockMatrix dense(const FullGrid& g, std::vector<Matrix> blocks) {
    CausalBlockMatrix A;
    A.grid_ = g;
    A.blocks_ = std::move(blocks);
    require(static_cast<int>(A.blocks_.size()) == g.cells(), "one block per lag expected");
    return A;
  }

  /// generators[k] has (pt+1)(px+1) rows (time dof q, space dof p of panel 0)
  /// and one column per dof of a time block.
  static CausalBlockMatrix circulant(const FullGrid& g, std::vector<Matrix> generators) {
    CausalBlockMatrix A;
    A.grid_ = g;
    A.generators_ = std::move(generators);
    A.compressed_ = true;
    require(static_cast<int>(A.generators_.size()) == g.cells(), "one generator per lag expected");
    return A;
  }

  const FullGrid& grid() const { return grid_; }
  int nx() const { return grid_.block_size(); }
  int nt() const { return grid_.cells(); }
  long size() const { return static_cast<long>(nx()) * nt(); }
  bool compressed() const { return compressed_; }

  double block_entry(int k, int row, int col) const {
    if (k < 0) return 0.0;
    if (!compressed_) return blocks_[k](row, col);
    const int sp = grid_.disc.px + 1, nsx = grid_.nsx(), M = grid_.panels();
    const int q = row / nsx, i = (row % nsx) / sp, p = row % sp;
    const int r = col / nsx, l = (col % nsx) / sp, pp = col % sp;
    const int d = ((l - i) % M + M) % M;
    return generators_[k](q * sp + p, r * nsx + d * sp + pp);
  }

  double entry(long row, long col) const {
    const int n = static_cast<int>(row / nx()), j = static_cast<int>(col / nx());
    return block_entry(n - j, static_cast<int>(row % nx()), static_cast<int>(col % nx()));
  }

  Matrix block(int k) const {
    if (!compressed_) return blocks_[k];
    Matrix B(nx(), nx());
    for (int r = 0; r < nx(); ++r)
      for (int c = 0; c < nx(); ++c) B(r, c) = block_entry(k, r, c);
    return B;
  }

  /// Expanded (nt*nx)^2 matrix; for tests and desk-scale solvers.
  Matrix to_dense() const {
    const long N = size();
    Matrix D = Matrix::Zero(N, N);
    for (int k = 0; k < nt(); ++k) {
      const Matrix B = block(k);
      for (int j = 0; j + k < nt(); ++j) D.block(static_cast<long>(j + k) * nx(), static_cast<long>(j) * nx(), nx(), nx()) = B;
    }
    return D;
  }

  Vector apply(const Vector& x) const {
    require(x.size() == size(), "dimension mismatch in block matrix product");
    Vector y = Vector::Zero(size());
    for (int k = 0; k < nt(); ++k) {
      const Matrix B = compressed_ ? block(k) : Matrix();
      const Matrix& Bk = compressed_ ? B : blocks_[k];
      for (int j = 0; j + k < nt(); ++j)
        y.segment(static_cast<long>(j + k) * nx(), nx()).noalias() += Bk * x.segment(static_cast<long>(j) * nx(), nx());
    }
    return y;
  }

  /// x^T A x. Circulant piecewise-constant matrices use FFTs in space and time.
  double quadratic_form(const Vector& x) const {
    require(x.size() == size(), "dimension mismatch in quadratic form");
    if (compressed_ && grid_.disc.px == 0 && grid_.disc.pt == 0) return circulant_quadratic_form(x);
    return x.dot(apply(x));
  }

  void write_binary(std::ostream& os) const {
    static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");
    const std::int64_t header[6] = {nx(), nt(), grid_.disc.px, grid_.disc.pt, grid_.lx, grid_.lt};
    os.write(reinterpret_cast<const char*>(header), sizeof(header));
    for (int k = 0; k < nt(); ++k) {
      const Matrix B = block(k);
      for (int r = 0; r < nx(); ++r)
        for (int c = 0; c < nx(); ++c) {
          const double v = B(r, c);
          os.write(reinterpret_cast<const char*>(&v), sizeof v);
        }
    }
  }

  /// Reads a dump written by write_binary; the discretisation supplies the
  /// curve, horizon and base mesh, which the header does not carry.
  static CausalBlockMatrix read_binary(std::istream& is, const Discretisation& disc) {
    std::int64_t header[6];
    if (!is.read(reinterpret_cast<char*>(header), sizeof(header))) throw ConfigError("truncated matrix dump header");
    Discretisation d = disc;
    d.px = static_cast<int>(header[2]);
    d.pt = static_cast<int>(header[3]);
    const FullGrid g(d, static_cast<int>(header[4]), static_cast<int>(header[5]));
    require(g.block_size() == header[0] && g.cells() == header[1], "matrix dump header inconsistent with discretisation");
    std::vector<Matrix> blocks(g.cells(), Matrix(g.block_size(), g.block_size()));
    for (auto& B : blocks)
      for (int r = 0; r < B.rows(); ++r)
        for (int c = 0; c < B.cols(); ++c)
          if (!is.read(reinterpret_cast<char*>(&B(r, c)), sizeof(double))) throw ConfigError("truncated matrix dump");
    return dense(g, std::move(blocks));
  }

 private:
  double circulant_quadratic_form(const Vector& x) const {
    using C = std::complex<double>;
    const int M = grid_.panels(), n_t = nt();
    Eigen::FFT<double> fft;
    // spatial spectra of the data and of each lag generator
    std::vector<std::vector<C>> xh(n_t), ch(n_t);
    std::vector<double> buf(M);
    for (int n = 0; n < n_t; ++n) {
      for (int i = 0; i < M; ++i) buf[i] = x[static_cast<long>(n) * M + i];
      fft.fwd(xh[n], buf);
      for (int i = 0; i < M; ++i) buf[i] = generators_[n](0, i);
      fft.fwd(ch[n], buf);
    }
    const int P = 2 * n_t;
    double total = 0.0;
    std::vector<C> a(P), b(P), ah, bh, conv;
    for (int m = 0; m < M; ++m) {
      std::fill(a.begin(), a.end(), C(0.0));
      std::fill(b.begin(), b.end(), C(0.0));
      for (int n = 0; n < n_t; ++n) {
        a[n] = std::conj(ch[n][m]);
        b[n] = xh[n][m];
      }
      fft.fwd(ah, a);
      fft.fwd(bh, b);
      for (int k = 0; k < P; ++k) ah[k] *= bh[k];
      fft.inv(conv, ah);
      C s(0.0);
      for (int n = 0; n < n_t; ++n) s += std::conj(xh[n][m]) * conv[n];
      total += s.real();
    }
    return total / M;
  }

  FullGrid grid_;
  std::vector<Matrix> blocks_;
  std::vector<Matrix> generators_;
  bool compressed_ = false;
};

struct AssemblyOptions {
  bool use_circulant = true;  // exploit rotation invariance when available
  bool compress = false;      // keep circulant matrices in generator form
  int workers = 0;
};

namespace detail {

inline double legendre(int p, double xi) { return p == 0 ? 1.0 : 2.0 * xi - 1.0; }

/// F_2..F_{1+orders} at tau = j h, j = 0..nt, laid out as F[j * orders + n - 2].
inline void slp_lattice(double a, double h, int nt, int orders, std::vector<double>& F) {
  F.assign(static_cast<std::size_t>(nt + 1) * orders, 0.0);
  for (int j = 1; j <= nt; ++j) {
    const double tau = j * h;
    if (a / tau > special::underflow_argument) continue;
    if (orders == 1) {
      const double z = a / tau;
      F[j] = ((tau + a) * special::expint_e1(z) - tau * std::exp(-z)) / four_pi;
    } else {
      const auto all = slp_antiderivatives(a, tau);
      for (int o = 0; o < orders; ++o) F[static_cast<std::size_t>(j) * orders + o] = all[o + 1];
    }
  }
}

/// Galerkin integrals of the single layer kernel for test panel i and source
/// panel l, all lags: out[((k * tq + q) * sp + p) * tq * sp + r * sp + pp].
inline void single_layer_pair(const FullGrid& g, int i, int l, std::vector<double>& out,
                              std::vector<double>& F) {
  const BoundaryCurve& curve = g.disc.curve;
  const int M = g.panels(), nt = g.cells(), sp = g.disc.px + 1, tq = g.disc.pt + 1;
  const int orders = g.disc.pt == 0 ? 1 : 3;
  const double H = g.H(), h = g.h();
  const int loc = tq * sp;
  out.assign(static_cast<std::size_t>(nt) * loc * loc, 0.0);
  double hp[3] = {1.0, 1.0 / h, 1.0 / (h * h)};
  std::vector<double> T(static_cast<std::size_t>(tq) * tq);
  for (const auto& node : panel_pair_nodes(i, l, M)) {
    const double u = (i + node.xi) * H, v = (l + node.eta) * H;
    const double r2 = curve.chord_sq(u, v);
    if (!(r2 > 0.0)) throw NumericalError("single layer quadrature hit a coincident point");
    const double w = node.w * H * H * curve.speed(u) * curve.speed(v);
    slp_lattice(0.25 * r2, h, nt, orders, F);
    double bx[2], by[2];
    for (int p = 0; p < sp; ++p) {
      bx[p] = legendre(p, node.xi);
      by[p] = legendre(p, node.eta);
    }
    for (int k = 0; k < nt; ++k) {
      for (int q = 0; q < tq; ++q)
        for (int r = 0; r < tq; ++r) {
          double s = 0.0;
          for (const auto& term : time_galerkin_terms(q, r)) {
            const int j = k + term.m;
            if (j <= 0) continue;
            s += term.c * hp[term.n - 2] * F[static_cast<std::size_t>(j) * orders + term.n - 2];
          }
          T[q * tq + r] = s * w;
        }
      double* o = out.data() + static_cast<std::size_t>(k) * loc * loc;
      for (int q = 0; q < tq; ++q)
        for (int p = 0; p < sp; ++p)
          for (int r = 0; r < tq; ++r)
            for (int pp = 0; pp < sp; ++pp) o[(q * sp + p) * loc + r * sp + pp] += T[q * tq + r] * bx[p] * by[pp];
    }
  }
  for (double v : out)
    if (!std::isfinite(v)) throw NumericalError("non-finite single layer entry");
}

}  // namespace detail

/// Galerkin matrix of the single layer operator on a full grid.
inline CausalBlockMatrix assemble_single_layer(const FullGrid& g, const AssemblyOptions& opt = {}) {
  const int M = g.panels(), nt = g.cells(), sp = g.disc.px + 1, tq = g.disc.pt + 1;
  const int nsx = g.nsx(), bs = g.block_size(), loc = tq * sp;

  if (opt.use_circulant && g.disc.curve.rotation_invariant()) {
    std::vector<Matrix> gen(nt, Matrix::Zero(loc, bs));
    parallel_for(M, [&](long l) {
      std::vector<double> out, F;
      detail::single_layer_pair(g, 0, static_cast<int>(l), out, F);
      for (int k = 0; k < nt; ++k)
        for (int q = 0; q < tq; ++q)
          for (int p = 0; p < sp; ++p)
            for (int r = 0; r < tq; ++r)
              for (int pp = 0; pp < sp; ++pp)
                gen[k](q * sp + p, r * nsx + l * sp + pp) = out[(static_cast<std::size_t>(k) * loc + q * sp + p) * loc + r * sp + pp];
    }, opt.workers);
    CausalBlockMatrix C = CausalBlockMatrix::circulant(g, std::move(gen));
    if (opt.compress) return C;
    std::vector<Matrix> blocks(nt);
    for (int k = 0; k < nt; ++k) blocks[k] = C.block(k);
    return CausalBlockMatrix::dense(g, std::move(blocks));
  }

  std::vector<Matrix> blocks(nt, Matrix::Zero(bs, bs));
  // pairs (i, l) with i <= l; the kernel is symmetric in space, so (l, i) is mirrored
  parallel_for(M, [&](long ii) {
    const int i = static_cast<int>(ii);
    std::vector<double> out, F;
    for (int l = i; l < M; ++l) {
      detail::single_layer_pair(g, i, l, out, F);
      for (int k = 0; k < nt; ++k)
        for (int q = 0; q < tq; ++q)
          for (int p = 0; p < sp; ++p)
            for (int r = 0; r < tq; ++r)
              for (int pp = 0; pp < sp; ++pp) {
                const double v = out[(static_cast<std::size_t>(k) * loc + q * sp + p) * loc + r * sp + pp];
                blocks[k](q * nsx + i * sp + p, r * nsx + l * sp + pp) = v;
                if (l != i) blocks[k](q * nsx + l * sp + pp, r * nsx + i * sp + p) = v;
              }
    }
  }, opt.workers);
  return CausalBlockMatrix::dense(g, std::move(blocks));
}

/// Redundant path: every (test cell, source cell) block is integrated on its
/// own from absolute cell endpoints, with no lag or rotation reuse.
inline Matrix assemble_single_layer_blockwise(const FullGrid& g) {
  const BoundaryCurve& curve = g.disc.curve;
  const int M = g.panels(), nt = g.cells(), sp = g.disc.px + 1, tq = g.disc.pt + 1;
  const int nsx = g.nsx();
  const double H = g.H(), h = g.h();
  Matrix A = Matrix::Zero(g.dofs(), g.dofs());
  for (int i = 0; i < M; ++i)
    for (int l = 0; l < M; ++l)
      for (const auto& node : panel_pair_nodes(i, l, M)) {
        const double u = (i + node.xi) * H, v = (l + node.eta) * H;
        const double a = 0.25 * curve.chord_sq(u, v);
        const double w = node.w * H * H * curve.speed(u) * curve.speed(v);
        for (int n = 0; n < nt; ++n)
          for (int j = 0; j <= n; ++j) {
            const double tn = n * h, sj = j * h;
            // F_n at (t_n + m h) - s_j for m = -1, 0, 1
            std::array<std::array<double, 4>, 3> Fm;
            for (int m = -1; m <= 1; ++m) Fm[m + 1] = slp_antiderivatives(a, (tn + m * h) - sj);
            for (int q = 0; q < tq; ++q)
              for (int r = 0; r < tq; ++r) {
                double s = 0.0;
                for (const auto& term : time_galerkin_terms(q, r))
                  s += term.c * std::pow(h, 2 - term.n) * Fm[term.m + 1][term.n - 1];
                for (int p = 0; p < sp; ++p)
                  for (int pp = 0; pp < sp; ++pp)
                    A(g.index(n, q, i, p), g.index(j, r, l, pp)) +=
                        w * s * detail::legendre(p, node.xi) * detail::legendre(pp, node.eta);
              }
          }
      }
  (void)nsx;
  return A;
}

// ---------------------------------------------------------------------------
// Right-hand sides

namespace detail {

/// int_{t0}^{t1} t^pw P_q(t) dt with P_1 = 2 (t - t0)/h - 1.
inline double time_power_moment(int pw, int q, double t0, double t1) {
  const double h = t1 - t0;
  const double I0 = (std::pow(t1, pw + 1) - std::pow(t0, pw + 1)) / (pw + 1);
  if (q == 0) return I0;
  const double I1 = (std::pow(t1, pw + 2) - std::pow(t0, pw + 2)) / (pw + 2);
  return 2.0 / h * (I1 - t0 * I0) - I0;
}

/// int over panel i of f(u) phi_p(u) |gamma'(u)| du.
template <class F>
inline double panel_moment(const FullGrid& g, int i, int p, F&& f, int mode) {
  const Rule1D& rule = gauss20();
  const double H = g.H();
  const int pieces = 1 + static_cast<int>(std::ceil(2.0 * mode * H));
  double s = 0.0;
  for (int c = 0; c < pieces; ++c)
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double xi = (c + rule.x[k]) / pieces;
      const double u = (i + xi) * H;
      s += rule.w[k] / pieces * f(u) * legendre(p, xi) * g.disc.curve.speed(u);
    }
  return s * H;
}

/// Double layer contribution of source panel l to test panel i, with data
/// weight c(v) supplied per node (complex to allow the rotated fast path).
/// out[(n * tq + q) * sp + p] += ... for one data term (mode, power).
template <class Weight>
inline void double_layer_pair(const FullGrid& g, int i, int l, int power, Weight&& weight,
                              std::vector<std::complex<double>>& out) {
  const BoundaryCurve& curve = g.disc.curve;
  const int M = g.panels(), nt = g.cells(), sp = g.disc.px + 1, tq = g.disc.pt + 1;
  const double H = g.H(), h = g.h();
  std::vector<double> X, P1(nt + 1), P2(nt + 1);
  for (const auto& node : panel_pair_nodes(i, l, M)) {
    const double u = (i + node.xi) * H, v = (l + node.eta) * H;
    const double r2 = curve.chord_sq(u, v);
    if (!(r2 > 0.0)) throw NumericalError("double layer quadrature hit a coincident point");
    const double a = 0.25 * r2;
    const double dn = curve.offset_dot_normal(u, v) / (8.0 * std::numbers::pi);
    const std::complex<double> w = node.w * H * H * curve.speed(u) * curve.speed(v) * dn * weight(v);
    for (int j = 0; j <= nt; ++j) {
      exp_moments_dyn(a, j * h, power + 3, X);
      P1[j] = dlp_phi(power + 1, j * h, X);
      P2[j] = dlp_phi(power + 2, j * h, X);
    }
    for (int n = 0; n < nt; ++n) {
      const double I0 = (P1[n + 1] - P1[n]) / (power + 1);
      double tint[2] = {I0, 0.0};
      if (tq == 2) {
        const double J1 = h * P1[n + 1] / (power + 1) - (P2[n + 1] - P2[n]) / ((power + 1.0) * (power + 2.0));
        tint[1] = 2.0 / h * J1 - I0;
      }
      for (int q = 0; q < tq; ++q)
        for (int p = 0; p < sp; ++p) out[(static_cast<std::size_t>(n) * tq + q) * sp + p] += w * tint[q] * legendre(p, node.xi);
    }
  }
}

}  // namespace detail

/// <g, eta> for every basis function eta of the grid.
inline Vector assemble_rhs_indirect(const FullGrid& g, const BoundaryData& data) {
  data.validate();
  const int M = g.panels(), nt = g.cells(), sp = g.disc.px + 1, tq = g.disc.pt + 1;
  Vector b = Vector::Zero(g.dofs());
  for (const auto& term : data.terms) {
    if (term.amplitude == 0.0) continue;
    const auto f = [&](double u) { return std::cos(2.0 * std::numbers::pi * term.mode * u); };
    for (int i = 0; i < M; ++i)
      for (int p = 0; p < sp; ++p) {
        const double S = detail::panel_moment(g, i, p, f, term.mode);
        for (int n = 0; n < nt; ++n)
          for (int q = 0; q < tq; ++q)
            b[g.index(n, q, i, p)] += term.amplitude * S * detail::time_power_moment(term.power, q, n * g.h(), (n + 1) * g.h());
      }
  }
  return b;
}

/// Double layer part <K g, eta> contributed by source panel l to the basis
/// functions of test panel i; layout (n, q, p).
inline Vector rhs_double_layer_pair(const FullGrid& g, const BoundaryData& data, int i, int l) {
  const int nt = g.cells(), sp = g.disc.px + 1, tq = g.disc.pt + 1;
  Vector out = Vector::Zero(static_cast<long>(nt) * tq * sp);
  std::vector<std::complex<double>> acc(out.size());
  for (const auto& term : data.terms) {
    std::fill(acc.begin(), acc.end(), 0.0);
    detail::double_layer_pair(g, i, l, term.power,
                              [&](double v) { return std::complex<double>(std::cos(2.0 * std::numbers::pi * term.mode * v), 0.0); }, acc);
    for (long k = 0; k < out.size(); ++k) out[k] += term.amplitude * acc[k].real();
  }
  return out;
}

/// <(1/2 + K) g, eta>.
inline Vector assemble_rhs_direct(const FullGrid& g, const BoundaryData& data, const AssemblyOptions& opt = {}) {
  data.validate();
  const int M = g.panels(), nt = g.cells(), sp = g.disc.px + 1, tq = g.disc.pt + 1;
  Vector b = 0.5 * assemble_rhs_indirect(g, data);
  const long loc = static_cast<long>(nt) * tq * sp;

  if (opt.use_circulant && g.disc.curve.rotation_invariant()) {
    for (const auto& term : data.terms) {
      if (term.amplitude == 0.0) continue;
      const double k2pi = 2.0 * std::numbers::pi * term.mode;
      std::vector<std::vector<std::complex<double>>> parts(M, std::vector<std::complex<double>>(loc));
      parallel_for(M, [&](long l) {
        detail::double_layer_pair(g, 0, static_cast<int>(l), term.power,
                                  [&](double v) { return std::polar(1.0, k2pi * v); }, parts[l]);
      }, opt.workers);
      std::vector<std::complex<double>> J(loc, 0.0);
      for (int l = 0; l < M; ++l)
        for (long k = 0; k < loc; ++k) J[k] += parts[l][k];
      for (int i = 0; i < M; ++i) {
        const std::complex<double> rot = std::polar(1.0, k2pi * i * g.H());
        for (int n = 0; n < nt; ++n)
          for (int q = 0; q < tq; ++q)
            for (int p = 0; p < sp; ++p)
              b[g.index(n, q, i, p)] += term.amplitude * (rot * J[(static_cast<long>(n) * tq + q) * sp + p]).real();
      }
    }
    return b;
  }

  std::vector<Vector> rows(M);
  parallel_for(M, [&](long i) {
    Vector acc = Vector::Zero(loc);
    for (int l = 0; l < M; ++l) acc += rhs_double_layer_pair(g, data, static_cast<int>(i), l);
    rows[i] = std::move(acc);
  }, opt.workers);
  for (int i = 0; i < M; ++i)
    for (int n = 0; n < nt; ++n)
      for (int q = 0; q < tq; ++q)
        for (int p = 0; p < sp; ++p) b[g.index(n, q, i, p)] += rows[i][(static_cast<long>(n) * tq + q) * sp + p];
  return b;
}

}  // namespace stbem
