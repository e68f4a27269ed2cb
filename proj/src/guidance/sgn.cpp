#include "unics/guidance/sgn.hpp"

#include <algorithm>
#include <cmath>

namespace unics {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using DVec = Eigen::VectorXd;

RowMat to_double(const Matrix& m) { return m.cast<double>(); }

void relu_bn_inplace(RowMat& x, const BatchNorm& bn) {
  const DVec inv = (bn.var.cast<double>().array() + static_cast<double>(BatchNorm::kEpsilon)).rsqrt().matrix();
  const DVec gain = (inv.array() * bn.scale.cast<double>().array()).matrix();
  const DVec mean = bn.mean.cast<double>();
  const DVec shift = bn.shift.cast<double>();
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    row = row.cwiseMax(0.0);
    row = ((row.transpose() - mean).array() * gain.array() + shift.array()).matrix().transpose();
  }
}

}  // namespace

GuidanceOutput sgn_forward(const SparseGraph& graph, const TspInstance& inst, const SgnWeights& w) {
  w.validate();
  if (graph.size() != inst.size()) throw DimensionMismatch("graph and instance sizes differ");
  if (static_cast<int>(w.gamma) != graph.gamma()) {
    throw DimensionMismatch("weights trained for gamma=" + std::to_string(w.gamma) + ", graph has gamma=" +
                            std::to_string(graph.gamma()));
  }
  const int n = graph.size();
  const int k = graph.degree();
  const Eigen::Index m = static_cast<Eigen::Index>(graph.edge_count());
  const Eigen::Index d = w.dim;

  // Input features.
  double min_x = inst.point(0).x, max_x = min_x, min_y = inst.point(0).y, max_y = min_y;
  for (const Point& p : inst.coords()) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  double span = std::max(max_x - min_x, max_y - min_y);
  if (!(span > 0.0)) span = 1.0;
  double diag = std::hypot(max_x - min_x, max_y - min_y);
  if (!(diag > 0.0)) diag = 1.0;

  RowMat node_x(n, 2);
  for (int i = 0; i < n; ++i) {
    node_x(i, 0) = (inst.point(i).x - min_x) / span;
    node_x(i, 1) = (inst.point(i).y - min_y) / span;
  }
  RowMat edge_x(m, 1);
  for (Eigen::Index s = 0; s < m; ++s) edge_x(s, 0) = static_cast<double>(graph.distance(static_cast<std::size_t>(s))) / diag;

  RowMat v = node_x * to_double(w.node_in).transpose();
  v.rowwise() += w.node_in_bias.cast<double>().transpose();
  RowMat e = edge_x * to_double(w.edge_in).transpose();
  e.rowwise() += w.edge_in_bias.cast<double>().transpose();

  const std::vector<long> rev = graph.reverse_slots();
  auto origin = [&](Eigen::Index s) { return static_cast<Eigen::Index>(s / k); };
  auto target = [&](Eigen::Index s) { return static_cast<Eigen::Index>(graph.target(static_cast<std::size_t>(s))); };

  RowMat attn(m, d), rev_proj(m, d), edge_proj(m, d), v_next(n, d), e_next(m, d);
  for (const SgnLayer& layer : w.layers) {
    attn.noalias() = e * to_double(layer.w_attn).transpose();
    for (int i = 0; i < n; ++i) {
      auto block = attn.middleRows(static_cast<Eigen::Index>(i) * k, k);
      const Eigen::RowVectorXd top = block.colwise().maxCoeff();
      block.rowwise() -= top;
      block = block.array().exp().matrix();
      const Eigen::RowVectorXd z = block.colwise().sum();
      block.array().rowwise() /= z.array();
    }

    const RowMat neigh = v * to_double(layer.w_neigh).transpose();
    v_next.noalias() = v * to_double(layer.w_self).transpose();
    for (Eigen::Index s = 0; s < m; ++s) {
      v_next.row(origin(s)) += attn.row(s).cwiseProduct(neigh.row(target(s)));
    }
    relu_bn_inplace(v_next, layer.node_bn);
    v_next += v;

    const RowMat w_rev = to_double(layer.w_rev);
    rev_proj.noalias() = e * w_rev.transpose();
    const Eigen::RowVectorXd pad_proj = (w_rev * layer.pad.cast<double>()).transpose();
    const RowMat from = v * to_double(layer.w_from).transpose();
    const RowMat to = v * to_double(layer.w_to).transpose();
    edge_proj.noalias() = e * to_double(layer.w_edge).transpose();
    for (Eigen::Index s = 0; s < m; ++s) {
      const long r = rev[static_cast<std::size_t>(s)];
      e_next.row(s) = from.row(origin(s)) + to.row(target(s)) + edge_proj.row(s) +
                      (r >= 0 ? Eigen::RowVectorXd(rev_proj.row(r)) : pad_proj);
    }
    relu_bn_inplace(e_next, layer.edge_bn);
    e_next += e;

    std::swap(v, v_next);
    std::swap(e, e_next);
  }

  RowMat hidden = e * to_double(w.dec1).transpose();
  hidden.rowwise() += w.dec1_bias.cast<double>().transpose();
  hidden = hidden.cwiseMax(0.0);
  RowMat final_e = hidden * to_double(w.dec2).transpose();
  final_e.rowwise() += w.dec2_bias.cast<double>().transpose();
  final_e = final_e.cwiseMax(0.0);
  const DVec logits = final_e * w.w_beta.cast<double>();

  std::vector<double> beta(static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i) {
    const auto row = logits.segment(static_cast<Eigen::Index>(i) * k, k);
    const double top = row.maxCoeff();
    const DVec ex = (row.array() - top).exp().matrix();
    const double z = ex.sum();
    for (int s = 0; s < k; ++s) beta[static_cast<std::size_t>(i) * k + s] = ex(s) / z;
  }

  const DVec pi_raw = v * w.w_pi.cast<double>();
  NodePenalties penalties;
  penalties.pi.resize(static_cast<std::size_t>(n));
  const double bound = w.penalty_bound;
  for (int i = 0; i < n; ++i) penalties.pi[static_cast<std::size_t>(i)] = bound * std::tanh(pi_raw(i));

  return {EdgeScores(graph, std::move(beta)), std::move(penalties)};
}

}  // namespace unics
