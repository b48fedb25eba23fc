#include "ttsketch/low_rank.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <fmt/format.h>

#include "ttsketch/errors.hpp"

namespace ttsketch {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Directions of the range finder whose ||q^T A|| falls below this fraction
// of ||A||_F are round-off, not range.
constexpr double kNegligibleDirection = 1e-12;

enum class Path { kDirect, kGramWide, kGramTall };

Path choose_path(const MatrixRef& m) {
  const auto r = static_cast<double>(m.rows());
  const auto c = static_cast<double>(m.cols());
  if (c > kGramAspectRatio * r) return Path::kGramWide;
  if (r > kGramAspectRatio * c) return Path::kGramTall;
  return Path::kDirect;
}

void require_finite(const MatrixRef& m, const char* what) {
  if (!m.allFinite()) throw NumericError(fmt::format("non-finite entries in {}", what));
}

// Symmetric eigen-decomposition of a Gram matrix, largest first. Eigenvalues
// within the solver's noise floor (dimension * eps * lambda_max) are zeroed.
struct GramSpectrum {
  Vector sigma;
  Matrix vectors;
};

GramSpectrum gram_spectrum(const Matrix& gram, bool want_vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(
      gram, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");
  const Eigen::Index n = gram.rows();
  const Vector& lambda = eig.eigenvalues();
  const double top = n > 0 ? std::max(lambda(n - 1), 0.0) : 0.0;
  const double floor = static_cast<double>(n) * kEps * top;
  GramSpectrum out;
  out.sigma.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double l = lambda(n - 1 - k);
    out.sigma(k) = l > floor ? std::sqrt(l) : 0.0;
  }
  if (want_vectors) out.vectors = eig.eigenvectors().rowwise().reverse();
  return out;
}

Matrix gram_of_rows(const MatrixRef& m) {
  Matrix g = Matrix::Zero(m.rows(), m.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(m);
  return g.selfadjointView<Eigen::Lower>();
}

Matrix gram_of_cols(const MatrixRef& m) {
  Matrix g = Matrix::Zero(m.cols(), m.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(m.transpose());
  return g.selfadjointView<Eigen::Lower>();
}

// Orthonormal Q from Householder QR, columns signed so diag(R) >= 0.
Matrix thin_q(const MatrixRef& m, Vector* r_diag = nullptr) {
  Eigen::HouseholderQR<Matrix> qr(m);
  const Eigen::Index k = std::min(m.rows(), m.cols());
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), k);
  const auto& r = qr.matrixQR();
  Vector diag(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    diag(j) = r(j, j);
    if (r(j, j) < 0) {
      q.col(j) = -q.col(j);
      diag(j) = -diag(j);
    }
  }
  if (r_diag != nullptr) *r_diag = diag;
  return q;
}

struct LeftFactor {
  Vector sigma;
  Matrix u;  // all available left vectors (direct / wide) or right vectors (tall)
  Path path;
};

LeftFactor factor(const MatrixRef& m) {
  LeftFactor f;
  f.path = choose_path(m);
  switch (f.path) {
    case Path::kGramWide: {
      auto spec = gram_spectrum(gram_of_rows(m), true);
      f.sigma = std::move(spec.sigma);
      f.u = std::move(spec.vectors);
      break;
    }
    case Path::kGramTall: {
      auto spec = gram_spectrum(gram_of_cols(m), true);
      f.sigma = std::move(spec.sigma);
      f.u = std::move(spec.vectors);
      break;
    }
    case Path::kDirect: {
      Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU);
      f.sigma = svd.singularValues();
      f.u = svd.matrixU();
      break;
    }
  }
  return f;
}

TruncationResult finish(const MatrixRef& m, LeftFactor f, Index rank) {
  TruncationResult out;
  out.rank = rank;
  const auto r = static_cast<Eigen::Index>(rank);
  if (f.path == Path::kGramTall) {
    // U = A V / sigma; recovered through QR so orthonormality does not
    // degrade with small retained sigma.
    out.basis = thin_q(m * f.u.leftCols(r));
  } else {
    out.basis = f.u.leftCols(r);
  }
  out.sigma = f.sigma.head(r);
  out.tail = tail_norms(f.sigma)(r);
  out.projected.noalias() = out.basis.transpose() * m;
  return out;
}

}  // namespace

Vector singular_values(const MatrixRef& m) {
  require_finite(m, "matrix passed to singular_values");
  switch (choose_path(m)) {
    case Path::kGramWide: return gram_spectrum(gram_of_rows(m), false).sigma;
    case Path::kGramTall: return gram_spectrum(gram_of_cols(m), false).sigma;
    case Path::kDirect: break;
  }
  return Eigen::BDCSVD<Matrix>(m).singularValues();
}

Vector tail_norms(const Vector& sigma) {
  const Eigen::Index n = sigma.size();
  Vector tails(n + 1);
  double acc = 0.0;
  tails(n) = 0.0;
  // Accumulate from the smallest value up.
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    acc += sigma(k) * sigma(k);
    tails(k) = std::sqrt(acc);
  }
  return tails;
}

TruncationResult svd_truncate_tol(const MatrixRef& m, double tol) {
  if (!(tol >= 0.0)) throw InvalidArgument(fmt::format("truncation tolerance {} must be >= 0", tol));
  if (m.size() == 0) throw InvalidArgument("cannot truncate an empty matrix");
  require_finite(m, "matrix passed to svd_truncate_tol");
  LeftFactor f = factor(m);
  const Vector tails = tail_norms(f.sigma);
  Index rank = 1;
  while (rank < static_cast<Index>(f.sigma.size()) && tails(static_cast<Eigen::Index>(rank)) > tol) {
    ++rank;
  }
  return finish(m, std::move(f), rank);
}

TruncationResult svd_truncate_rank(const MatrixRef& m, Index rank) {
  const auto limit = static_cast<Index>(std::min(m.rows(), m.cols()));
  if (rank < 1 || rank > limit) {
    throw InvalidArgument(fmt::format("rank {} outside 1..{} for a {}x{} matrix", rank, limit,
                                      m.rows(), m.cols()));
  }
  require_finite(m, "matrix passed to svd_truncate_rank");
  return finish(m, factor(m), rank);
}

Matrix orthonormalize(const MatrixRef& m) {
  if (m.cols() == 0 || m.cols() > m.rows()) {
    throw DegenerateInput(fmt::format("a {}x{} matrix cannot have full column rank", m.rows(), m.cols()));
  }
  require_finite(m, "matrix passed to orthonormalize");
  Vector diag;
  Matrix q = thin_q(m, &diag);
  const double tol = 10.0 * static_cast<double>(std::max(m.rows(), m.cols())) * kEps * m.norm();
  for (Eigen::Index j = 0; j < diag.size(); ++j) {
    if (!(diag(j) > tol)) {
      throw DegenerateInput(fmt::format("column {} is numerically dependent on earlier columns", j + 1));
    }
  }
  return q;
}

RangeFinderResult adapt_range_finder(const MatrixRef& a, double tol, Index block, unsigned power,
                                     const SketchSpec& family, Stream& rng) {
  if (!(tol > 0.0)) throw InvalidArgument(fmt::format("range finder tolerance {} must be > 0", tol));
  if (block < 1) throw InvalidArgument("range finder block size must be >= 1");
  require_finite(a, "matrix passed to adapt_range_finder");

  const Eigen::Index rows = a.rows();
  const auto cap = static_cast<Index>(std::min(a.rows(), a.cols()));
  const double tol2 = tol * tol;

  RangeFinderResult out;
  out.input_norm2 = a.squaredNorm();
  const double negligible = kNegligibleDirection * std::sqrt(out.input_norm2);
  out.basis.resize(rows, 0);
  out.projected.resize(0, a.cols());

  SketchSpec spec = family;
  spec.rows = static_cast<Index>(a.cols());

  while (static_cast<Index>(out.basis.cols()) < cap) {
    spec.cols = std::min(block, cap - static_cast<Index>(out.basis.cols()));
    Matrix y = draw(spec, rng).apply_right(a);
    for (unsigned i = 0; i < power; ++i) y = a * (a.transpose() * y);
    require_finite(y, "range finder sample block");
    ++out.blocks;

    const Matrix& q = out.basis;
    for (int pass = 0; pass < 2; ++pass) y -= q * (q.transpose() * y);

    Eigen::ColPivHouseholderQR<Matrix> qr(y);
    const auto& r = qr.matrixQR();
    const Eigen::Index steps = std::min(r.rows(), r.cols());
    const double lead = steps > 0 ? std::abs(r(0, 0)) : 0.0;
    Eigen::Index k = 0;
    while (k < steps && lead > 0.0 && std::abs(r(k, k)) > static_cast<double>(rows) * kEps * lead) ++k;

    Index kept = 0;
    if (k > 0) {
      Matrix cand = qr.householderQ() * Matrix::Identity(rows, k);
      cand -= q * (q.transpose() * cand);
      cand = thin_q(cand);
      Matrix b = cand.transpose() * a;
      std::vector<Eigen::Index> keep;
      for (Eigen::Index j = 0; j < b.rows(); ++j) {
        if (b.row(j).norm() > negligible) keep.push_back(j);
      }
      kept = keep.size();
      if (kept > 0) {
        const Eigen::Index old = out.basis.cols();
        out.basis.conservativeResize(Eigen::NoChange, old + static_cast<Eigen::Index>(kept));
        out.projected.conservativeResize(old + static_cast<Eigen::Index>(kept), Eigen::NoChange);
        for (Index i = 0; i < kept; ++i) {
          out.basis.col(old + static_cast<Eigen::Index>(i)) = cand.col(keep[i]);
          out.projected.row(old + static_cast<Eigen::Index>(i)) = b.row(keep[i]);
          out.captured_norm2 += b.row(keep[i]).squaredNorm();
        }
      }
    }
    if (kept == 0) break;
    if (out.input_norm2 - out.captured_norm2 <= tol2) break;
  }
  if (out.basis.cols() == 0) {
    // Nothing above round-off (e.g. A == 0): fall back to one unit vector.
    out.basis = Matrix::Identity(rows, 1);
    out.projected = a.row(0);
    out.captured_norm2 = out.projected.squaredNorm();
  }
  out.capped = static_cast<Index>(out.basis.cols()) == cap &&
               out.input_norm2 - out.captured_norm2 > tol2;
#ifndef NDEBUG
  {
    const double direct = (a - out.basis * out.projected).squaredNorm();
    const double tracked = out.input_norm2 - out.captured_norm2;
    assert(std::abs(direct - tracked) <= 1e-8 * out.input_norm2 + 1e-300);
  }
#endif
  return out;
}

}  // namespace ttsketch
