#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace lightretriever {

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

struct QueryScores {
    double pos = 0.0;               // similarity to the positive document
    std::vector<double> negs;       // similarities to the negatives
};

struct ScoreBatch {
    std::vector<QueryScores> queries;
    double tau = 0.02;
};

// Listwise contrastive loss, mean over queries:
//   -log( e^{pos/tau} / (e^{pos/tau} + sum_j e^{neg_j/tau}) )
// evaluated with a max shift so large score/tau ratios stay finite.
double contrastive_loss(const ScoreBatch& batch);

// ln(max(x, 0) + 1): zero for x <= 0, strictly increasing above.
inline double log_saturate(double x) { return x > 0.0 ? std::log1p(x) : 0.0; }

// Squared sum of per-term batch means over pooled logits (N x V):
//   sum_t ( (1/N) sum_i w[i, t] )^2
double flops_regularizer(std::span<const float> pooled_logits, size_t n_docs, size_t vocab_dim);

// Mean over queries of KL( softmax(teacher/tau) || softmax(student/tau) ).
// Zero iff the per-query distributions match; invariant under a constant
// shift of either score list.
double kl_alignment_loss(const std::vector<std::vector<double>>& student_scores,
                         const std::vector<std::vector<double>>& teacher_scores, double tau);

// ---------------------------------------------------------------------------
// Custom causal mask
// ---------------------------------------------------------------------------

// Block-structured causal mask: rows below the prompt attend to the whole
// prompt and causally within their own width-w block, never across blocks.
struct MaskMatrix {
    size_t seq_len = 0;     // L
    size_t prompt_len = 0;  // P
    size_t block_width = 0; // w
    std::vector<uint8_t> entries;  // L x L, 1 = attend, 0 = masked

    bool attends(size_t q, size_t k) const { return entries[q * seq_len + k] != 0; }
};

// Requires 1 <= P <= L, w >= 1 and (L - P) divisible by w. P == L degenerates
// to the standard lower-triangular causal mask.
MaskMatrix custom_causal_mask(size_t seq_len, size_t prompt_len, size_t block_width);

// ---------------------------------------------------------------------------
// Projection + max pooling
// ---------------------------------------------------------------------------

// Reference pipeline for one document: project (T x H) hidden states through
// (H x V), ReLU + log-saturate, then max over unmasked positions. Deliberately
// materializes the full T x V intermediate; this is the slow oracle the fused
// kernel is checked against. mask (length T, 1 = keep) and bias (length V)
// may be empty.
std::vector<float> sparse_doc_pool_naive(std::span<const float> hidden_states, size_t seq_len,
                                         size_t hidden_dim, std::span<const float> projection,
                                         size_t vocab_dim, std::span<const uint8_t> mask = {},
                                         std::span<const float> bias = {});

template <typename T>
struct FusedMaxResult {
    std::vector<T> values;         // B x V
    std::vector<int32_t> argmax;   // B x V, timestep that produced each max
};

template <typename T>
struct GradBundle {
    std::vector<T> grad_input;   // B x T x H
    std::vector<T> grad_weight;  // H x V
    std::vector<T> grad_bias;    // V
};

// Scratch floats the fused forward allocates beyond its outputs: one B x V
// slice, independent of the sequence length.
inline size_t fused_project_max_workspace(size_t batch, size_t vocab_dim) {
    return batch * vocab_dim;
}

// Scratch element count actually allocated by the most recent
// fused_project_max_forward call on this thread; lets tests assert the kernel
// never materialized a B x T x V intermediate.
size_t fused_project_max_last_workspace();

// Y[i, v] = max over unmasked t of (X[i, t, :] . W[:, v] + b[v]), computed one
// timestep slice at a time so no B x T x V tensor ever exists. Ties keep the
// smallest t. Every sequence needs at least one unmasked position. bias and
// mask may be empty spans.
template <typename T>
FusedMaxResult<T> fused_project_max_forward(std::span<const T> input, size_t batch, size_t seq_len,
                                            size_t hidden_dim, std::span<const T> weight,
                                            size_t vocab_dim, std::span<const T> bias = {},
                                            std::span<const uint8_t> mask = {});

// Routes grad_output only through the argmax positions recorded by the
// forward pass:
//   gX[i, t, :] += (gY ⊙ [argmax == t]) W^T,  gW += X_t^T (gY ⊙ [argmax == t]),
//   gb += column sums.
template <typename T>
GradBundle<T> fused_project_max_backward(std::span<const T> grad_output,
                                         std::span<const int32_t> argmax,
                                         std::span<const T> input, size_t batch, size_t seq_len,
                                         size_t hidden_dim, std::span<const T> weight,
                                         size_t vocab_dim, std::span<const uint8_t> mask = {});

extern template FusedMaxResult<float> fused_project_max_forward<float>(
    std::span<const float>, size_t, size_t, size_t, std::span<const float>, size_t,
    std::span<const float>, std::span<const uint8_t>);
extern template FusedMaxResult<double> fused_project_max_forward<double>(
    std::span<const double>, size_t, size_t, size_t, std::span<const double>, size_t,
    std::span<const double>, std::span<const uint8_t>);
extern template GradBundle<float> fused_project_max_backward<float>(
    std::span<const float>, std::span<const int32_t>, std::span<const float>, size_t, size_t,
    size_t, std::span<const float>, size_t, std::span<const uint8_t>);
extern template GradBundle<double> fused_project_max_backward<double>(
    std::span<const double>, std::span<const int32_t>, std::span<const double>, size_t, size_t,
    size_t, std::span<const double>, size_t, std::span<const uint8_t>);

}  // namespace lightretriever
