#include "lightretriever/train_numerics.hpp"

#include <algorithm>
#include <limits>

#include "lightretriever/error.hpp"

namespace lightretriever {

namespace {
thread_local size_t g_last_workspace = 0;
}

size_t fused_project_max_last_workspace() { return g_last_workspace; }

double contrastive_loss(const ScoreBatch& batch) {
    if (!(batch.tau > 0.0)) throw InvalidArgument("contrastive_loss: tau must be > 0");
    if (batch.queries.empty()) throw InvalidArgument("contrastive_loss: empty batch");

    double total = 0.0;
    for (const auto& q : batch.queries) {
        // -log softmax(pos) over {pos} U negs, max-shifted
        double max_logit = q.pos / batch.tau;
        for (double n : q.negs) max_logit = std::max(max_logit, n / batch.tau);
        double denom = std::exp(q.pos / batch.tau - max_logit);
        for (double n : q.negs) denom += std::exp(n / batch.tau - max_logit);
        total += -(q.pos / batch.tau - max_logit - std::log(denom));
    }
    return total / static_cast<double>(batch.queries.size());
}

double flops_regularizer(std::span<const float> pooled_logits, size_t n_docs, size_t vocab_dim) {
    if (n_docs == 0) throw InvalidArgument("flops_regularizer: need at least one document");
    if (pooled_logits.size() != n_docs * vocab_dim)
        throw InvalidArgument("flops_regularizer: buffer size != n_docs * vocab_dim");
    double total = 0.0;
    for (size_t t = 0; t < vocab_dim; ++t) {
        double mean = 0.0;
        for (size_t i = 0; i < n_docs; ++i)
            mean += static_cast<double>(pooled_logits[i * vocab_dim + t]);
        mean /= static_cast<double>(n_docs);
        total += mean * mean;
    }
    return total;
}

double kl_alignment_loss(const std::vector<std::vector<double>>& student_scores,
                         const std::vector<std::vector<double>>& teacher_scores, double tau) {
    if (!(tau > 0.0)) throw InvalidArgument("kl_alignment_loss: tau must be > 0");
    if (student_scores.size() != teacher_scores.size())
        throw InvalidArgument("kl_alignment_loss: query count mismatch");
    if (student_scores.empty()) throw InvalidArgument("kl_alignment_loss: empty batch");

    auto log_softmax = [tau](const std::vector<double>& scores) {
        std::vector<double> out(scores.size());
        double max_logit = -std::numeric_limits<double>::infinity();
        for (double s : scores) max_logit = std::max(max_logit, s / tau);
        double denom = 0.0;
        for (double s : scores) denom += std::exp(s / tau - max_logit);
        const double log_denom = std::log(denom);
        for (size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] / tau - max_logit - log_denom;
        return out;
    };

    double total = 0.0;
    for (size_t q = 0; q < student_scores.size(); ++q) {
        const auto& s = student_scores[q];
        const auto& t = teacher_scores[q];
        if (s.size() != t.size())
            throw InvalidArgument("kl_alignment_loss: score list length mismatch at query " +
                                  std::to_string(q));
        if (s.size() < 2)
            throw InvalidArgument("kl_alignment_loss: need at least 2 scores per query");
        const auto log_p = log_softmax(t);  // teacher
        const auto log_q = log_softmax(s);  // student
        double kl = 0.0;
        for (size_t i = 0; i < s.size(); ++i) kl += std::exp(log_p[i]) * (log_p[i] - log_q[i]);
        total += kl;
    }
    // KL is nonnegative; rounding can leave a tiny negative residue
    return std::max(0.0, total / static_cast<double>(student_scores.size()));
}

MaskMatrix custom_causal_mask(size_t seq_len, size_t prompt_len, size_t block_width) {
    if (prompt_len < 1 || prompt_len > seq_len)
        throw InvalidArgument("custom_causal_mask: need 1 <= prompt_len <= seq_len");
    if (block_width < 1) throw InvalidArgument("custom_causal_mask: block_width must be >= 1");
    if ((seq_len - prompt_len) % block_width != 0)
        throw InvalidArgument("custom_causal_mask: (seq_len - prompt_len) not divisible by width");

    MaskMatrix m;
    m.seq_len = seq_len;
    m.prompt_len = prompt_len;
    m.block_width = block_width;
    m.entries.assign(seq_len * seq_len, 0);
    for (size_t q = 0; q < seq_len; ++q) {
        for (size_t k = 0; k < seq_len; ++k) {
            bool attend;
            if (q < prompt_len) {
                attend = k <= q;  // causal within the prompt
            } else if (k < prompt_len) {
                attend = true;    // blocks see the whole prompt
            } else {
                // causal within the block, never across blocks
                attend = k <= q &&
                         (q - prompt_len) / block_width == (k - prompt_len) / block_width;
            }
            m.entries[q * seq_len + k] = attend ? 1 : 0;
        }
    }
    return m;
}

std::vector<float> sparse_doc_pool_naive(std::span<const float> hidden_states, size_t seq_len,
                                         size_t hidden_dim, std::span<const float> projection,
                                         size_t vocab_dim, std::span<const uint8_t> mask,
                                         std::span<const float> bias) {
    if (hidden_states.size() != seq_len * hidden_dim)
        throw InvalidArgument("sparse_doc_pool_naive: hidden_states size mismatch");
    if (projection.size() != hidden_dim * vocab_dim)
        throw InvalidArgument("sparse_doc_pool_naive: projection size mismatch");
    if (!mask.empty() && mask.size() != seq_len)
        throw InvalidArgument("sparse_doc_pool_naive: mask size mismatch");
    if (!bias.empty() && bias.size() != vocab_dim)
        throw InvalidArgument("sparse_doc_pool_naive: bias size mismatch");
    bool any = mask.empty();
    for (uint8_t m : mask) any = any || m;
    if (!any) throw InvalidArgument("sparse_doc_pool_naive: all positions masked");

    // Full T x V materialization: project, activate, then pool.
    std::vector<float> activated(seq_len * vocab_dim, 0.0f);
    for (size_t t = 0; t < seq_len; ++t) {
        for (size_t v = 0; v < vocab_dim; ++v) {
            double acc = bias.empty() ? 0.0 : static_cast<double>(bias[v]);
            for (size_t h = 0; h < hidden_dim; ++h)
                acc += static_cast<double>(hidden_states[t * hidden_dim + h]) *
                       static_cast<double>(projection[h * vocab_dim + v]);
            activated[t * vocab_dim + v] = static_cast<float>(log_saturate(acc));
        }
    }
    std::vector<float> pooled(vocab_dim, 0.0f);
    bool first = true;
    for (size_t t = 0; t < seq_len; ++t) {
        if (!mask.empty() && !mask[t]) continue;
        for (size_t v = 0; v < vocab_dim; ++v) {
            const float a = activated[t * vocab_dim + v];
            if (first || a > pooled[v]) pooled[v] = a;
        }
        first = false;
    }
    return pooled;
}

template <typename T>
FusedMaxResult<T> fused_project_max_forward(std::span<const T> input, size_t batch, size_t seq_len,
                                            size_t hidden_dim, std::span<const T> weight,
                                            size_t vocab_dim, std::span<const T> bias,
                                            std::span<const uint8_t> mask) {
    if (input.size() != batch * seq_len * hidden_dim)
        throw InvalidArgument("fused_project_max_forward: input size mismatch");
    if (weight.size() != hidden_dim * vocab_dim)
        throw InvalidArgument("fused_project_max_forward: weight size mismatch");
    if (!bias.empty() && bias.size() != vocab_dim)
        throw InvalidArgument("fused_project_max_forward: bias size mismatch");
    if (!mask.empty() && mask.size() != batch * seq_len)
        throw InvalidArgument("fused_project_max_forward: mask size mismatch");
    for (size_t i = 0; i < batch && !mask.empty(); ++i) {
        bool any = false;
        for (size_t t = 0; t < seq_len; ++t) any = any || mask[i * seq_len + t];
        if (!any)
            throw InvalidArgument("fused_project_max_forward: sequence " + std::to_string(i) +
                                  " is fully masked");
    }

    FusedMaxResult<T> result;
    result.values.assign(batch * vocab_dim, std::numeric_limits<T>::lowest());
    result.argmax.assign(batch * vocab_dim, -1);

    // One timestep slice at a time; scratch is a single B x V buffer.
    std::vector<T> slice(fused_project_max_workspace(batch, vocab_dim));
    g_last_workspace = slice.size();
    for (size_t t = 0; t < seq_len; ++t) {
        for (size_t i = 0; i < batch; ++i) {
            if (!mask.empty() && !mask[i * seq_len + t]) continue;
            const T* x = input.data() + (i * seq_len + t) * hidden_dim;
            T* out = slice.data() + i * vocab_dim;
            for (size_t v = 0; v < vocab_dim; ++v) {
                double acc = bias.empty() ? 0.0 : static_cast<double>(bias[v]);
                for (size_t h = 0; h < hidden_dim; ++h)
                    acc += static_cast<double>(x[h]) * static_cast<double>(weight[h * vocab_dim + v]);
                out[v] = static_cast<T>(acc);
            }
            T* y = result.values.data() + i * vocab_dim;
            int32_t* am = result.argmax.data() + i * vocab_dim;
            for (size_t v = 0; v < vocab_dim; ++v) {
                // strict > keeps the smallest t on ties
                if (am[v] < 0 || out[v] > y[v]) {
                    y[v] = out[v];
                    am[v] = static_cast<int32_t>(t);
                }
            }
        }
    }
    for (int32_t a : result.argmax)
        if (a < 0)
            throw InvalidArgument("fused_project_max_forward: sequence with no unmasked position");
    return result;
}

template <typename T>
GradBundle<T> fused_project_max_backward(std::span<const T> grad_output,
                                         std::span<const int32_t> argmax,
                                         std::span<const T> input, size_t batch, size_t seq_len,
                                         size_t hidden_dim, std::span<const T> weight,
                                         size_t vocab_dim, std::span<const uint8_t> mask) {
    if (grad_output.size() != batch * vocab_dim)
        throw InvalidArgument("fused_project_max_backward: grad_output size mismatch");
    if (argmax.size() != batch * vocab_dim)
        throw InvalidArgument("fused_project_max_backward: argmax size mismatch");
    if (input.size() != batch * seq_len * hidden_dim)
        throw InvalidArgument("fused_project_max_backward: input size mismatch");
    if (weight.size() != hidden_dim * vocab_dim)
        throw InvalidArgument("fused_project_max_backward: weight size mismatch");
    if (!mask.empty() && mask.size() != batch * seq_len)
        throw InvalidArgument("fused_project_max_backward: mask size mismatch");

    GradBundle<T> grads;
    grads.grad_input.assign(batch * seq_len * hidden_dim, T(0));
    grads.grad_weight.assign(hidden_dim * vocab_dim, T(0));
    grads.grad_bias.assign(vocab_dim, T(0));

    // Per timestep: keep only the grads whose argmax hit t, then the two GEMM
    // accumulations and the bias column sum.
    std::vector<T> grad_slice(batch * vocab_dim);
    for (size_t t = 0; t < seq_len; ++t) {
        bool slice_nonzero = false;
        for (size_t i = 0; i < batch; ++i) {
            for (size_t v = 0; v < vocab_dim; ++v) {
                const size_t iv = i * vocab_dim + v;
                const T g = argmax[iv] == static_cast<int32_t>(t) ? grad_output[iv] : T(0);
                grad_slice[iv] = g;
                slice_nonzero = slice_nonzero || g != T(0);
            }
        }
        if (!slice_nonzero) continue;
        for (size_t i = 0; i < batch; ++i) {
            const T* x = input.data() + (i * seq_len + t) * hidden_dim;
            const T* gl = grad_slice.data() + i * vocab_dim;
            T* gx = grads.grad_input.data() + (i * seq_len + t) * hidden_dim;
            for (size_t h = 0; h < hidden_dim; ++h) {
                double acc = 0.0;
                for (size_t v = 0; v < vocab_dim; ++v)
                    acc += static_cast<double>(gl[v]) * static_cast<double>(weight[h * vocab_dim + v]);
                gx[h] += static_cast<T>(acc);
            }
            for (size_t h = 0; h < hidden_dim; ++h) {
                const double xh = static_cast<double>(x[h]);
                T* gw = grads.grad_weight.data() + h * vocab_dim;
                for (size_t v = 0; v < vocab_dim; ++v)
                    gw[v] += static_cast<T>(xh * static_cast<double>(gl[v]));
            }
            for (size_t v = 0; v < vocab_dim; ++v) grads.grad_bias[v] += gl[v];
        }
    }
    return grads;
}

template FusedMaxResult<float> fused_project_max_forward<float>(
    std::span<const float>, size_t, size_t, size_t, std::span<const float>, size_t,
    std::span<const float>, std::span<const uint8_t>);
template FusedMaxResult<double> fused_project_max_forward<double>(
    std::span<const double>, size_t, size_t, size_t, std::span<const double>, size_t,
    std::span<const double>, std::span<const uint8_t>);
template GradBundle<float> fused_project_max_backward<float>(
    std::span<const float>, std::span<const int32_t>, std::span<const float>, size_t, size_t,
    size_t, std::span<const float>, size_t, std::span<const uint8_t>);
template GradBundle<double> fused_project_max_backward<double>(
    std::span<const double>, std::span<const int32_t>, std::span<const double>, size_t, size_t,
    size_t, std::span<const double>, size_t, std::span<const uint8_t>);

}  // namespace lightretriever
