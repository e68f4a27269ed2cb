#pragma once

#include "unics/core/instance.hpp"
#include "unics/core/sparse_graph.hpp"
#include "unics/guidance/scores.hpp"
#include "unics/guidance/weights.hpp"

namespace unics {

struct GuidanceOutput {
  EdgeScores scores;
  NodePenalties penalties;
};

/// Inference pass of the sparse graph network over `graph`.
///
/// Node inputs are coordinates mapped into the unit square (aspect ratio
/// kept); edge inputs are sparse-graph distances divided by the diagonal of
/// the coordinate bounding box. Each of the L layers computes, per edge
/// (i, j) and feature channel,
///
///   a_ij = exp(W_a e_ij) / sum_k exp(W_a e_ik)                 (over i's out-edges)
///   v_i' = BN(ReLU(W_s v_i + sum_j a_ij * W_n v_j)) + v_i
///   r_ij = W_r e_ji if (j, i) is a sparse edge, else W_r p
///   e_ij' = BN(ReLU(W_f v_i + W_t v_j + W_o e_ij + r_ij)) + e_ij
///
/// using the previous layer's v and e on the right-hand sides. The decoder
/// is two ReLU linear layers on e, then a per-node softmax of w_beta . e.
/// Penalties are C * tanh(w_pi . v).
///
/// Throws DimensionMismatch when the weights do not fit the graph.
GuidanceOutput sgn_forward(const SparseGraph& graph, const TspInstance& inst, const SgnWeights& w);

}  // namespace unics
