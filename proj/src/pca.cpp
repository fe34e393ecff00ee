#include "lsagc/pca.hpp"

#include "lsagc/errors.hpp"

#include <cmath>
#include <string>

namespace lsagc {

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return Eigen::MatrixXd::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = rel_tol * (sv.size() > 0 ? sv(0) : 0.0);
  Eigen::VectorXd inv(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) inv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

PcaModel fit_pca(const TimeSeriesEnsemble& ensemble, std::size_t p) {
  return fit_pca(ensemble.data, p);
}

PcaModel fit_pca(const Eigen::MatrixXd& x, std::size_t p) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto t = static_cast<std::size_t>(x.cols());
  if (t < 2) throw DimensionError("PCA needs at least 2 samples");
  if (p < 1 || p > std::min(n, t))
    throw DimensionError("retained components p=" + std::to_string(p) + " outside [1, " +
                         std::to_string(std::min(n, t)) + "]");

  const Eigen::MatrixXd cov = (x * x.transpose()) / static_cast<double>(t - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw SingularSystemError("covariance eigendecomposition failed");

  PcaModel model;
  model.p = p;
  model.w.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n));
  model.explained_variance.resize(static_cast<Eigen::Index>(p));
  model.total_variance = cov.trace();
  const auto& values = eig.eigenvalues();  // ascending
  const auto& vectors = eig.eigenvectors();
  const double top = std::max(values(values.size() - 1), 0.0);
  for (std::size_t c = 0; c < p; ++c) {
    const Eigen::Index src = static_cast<Eigen::Index>(n - 1 - c);
    Eigen::VectorXd v = vectors.col(src);
    Eigen::Index arg = 0;
    for (Eigen::Index k = 1; k < v.size(); ++k)
      if (std::abs(v(k)) > std::abs(v(arg))) arg = k;
    if (v(arg) < 0) v = -v;
    model.w.row(static_cast<Eigen::Index>(c)) = v.transpose();
    const double lambda = std::max(values(src), 0.0);
    model.explained_variance(static_cast<Eigen::Index>(c)) = lambda;
    if (lambda <= 1e-10 * top) model.rank_deficient = true;
  }
  model.w_pinv = pseudo_inverse(model.w);
  return model;
}

Eigen::MatrixXd project(const PcaModel& model, const TimeSeriesEnsemble& ensemble) {
  return project(model, ensemble.data);
}

Eigen::MatrixXd project(const PcaModel& model, const Eigen::MatrixXd& x) {
  if (x.rows() != model.w.cols())
    throw DimensionError("project: ensemble has " + std::to_string(x.rows()) +
                         " rows, model expects " + std::to_string(model.w.cols()));
  return model.w * x;
}

Eigen::MatrixXd reconstruct(const PcaModel& model, const Eigen::MatrixXd& z) {
  if (z.rows() != model.w_pinv.cols())
    throw DimensionError("reconstruct: z has " + std::to_string(z.rows()) +
                         " rows, model retains " + std::to_string(model.w_pinv.cols()));
  return model.w_pinv * z;
}

ReducedPcaView drop_source(const PcaModel& model, std::size_t s) {
  const auto n = model.n_series();
  if (s >= n) throw DimensionError("drop_source: index " + std::to_string(s) + " out of range");
  ReducedPcaView view;
  view.dropped = s;
  view.w.resize(model.w.rows(), static_cast<Eigen::Index>(n - 1));
  const auto si = static_cast<Eigen::Index>(s);
  const auto tail = static_cast<Eigen::Index>(n - 1 - s);
  view.w.leftCols(si) = model.w.leftCols(si);
  view.w.rightCols(tail) = model.w.rightCols(tail);
  view.w_pinv = pseudo_inverse(view.w);
  return view;
}

Eigen::MatrixXd drop_row(const Eigen::MatrixXd& x, std::size_t s) {
  if (s >= static_cast<std::size_t>(x.rows())) throw DimensionError("drop_row: index out of range");
  Eigen::MatrixXd out(x.rows() - 1, x.cols());
  const auto si = static_cast<Eigen::Index>(s);
  const auto tail = x.rows() - 1 - si;
  out.topRows(si) = x.topRows(si);
  out.bottomRows(tail) = x.bottomRows(tail);
  return out;
}

}  // namespace lsagc
