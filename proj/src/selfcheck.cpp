#include "lightretriever/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>

#include "lightretriever/train_numerics.hpp"

namespace lightretriever {

namespace {

// splitmix64: deterministic across platforms, unlike <random> distributions.
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // symmetric triangular-ish noise is plenty for property checks
    double signed_unit() { return uniform(-1.0, 1.0); }
    size_t index(size_t n) { return static_cast<size_t>(next() % n); }
};

struct Instance {
    size_t B, T, H, V;
    std::vector<double> x, w, b;
    std::vector<uint8_t> mask;
};

Instance draw_instance(Rng& rng, size_t B, size_t T, size_t H, size_t V, bool with_bias,
                       bool with_mask) {
    Instance inst{B, T, H, V, {}, {}, {}, {}};
    inst.x.resize(B * T * H);
    inst.w.resize(H * V);
    for (auto& v : inst.x) v = rng.signed_unit();
    for (auto& v : inst.w) v = rng.signed_unit();
    if (with_bias) {
        inst.b.resize(V);
        for (auto& v : inst.b) v = rng.signed_unit();
    }
    if (with_mask) {
        inst.mask.assign(B * T, 1);
        for (size_t i = 0; i < B; ++i) {
            for (size_t t = 0; t < T; ++t)
                if (rng.uniform() < 0.3) inst.mask[i * T + t] = 0;
            bool any = false;
            for (size_t t = 0; t < T; ++t) any = any || inst.mask[i * T + t];
            if (!any) inst.mask[i * T + rng.index(T)] = 1;
        }
    }
    return inst;
}

// smallest gap between the max logit and the runner-up over all (i, v)
double min_argmax_gap(const Instance& inst) {
    double min_gap = 1e300;
    for (size_t i = 0; i < inst.B; ++i) {
        for (size_t v = 0; v < inst.V; ++v) {
            double best = -1e300, second = -1e300;
            for (size_t t = 0; t < inst.T; ++t) {
                if (!inst.mask.empty() && !inst.mask[i * inst.T + t]) continue;
                double acc = inst.b.empty() ? 0.0 : inst.b[v];
                for (size_t h = 0; h < inst.H; ++h)
                    acc += inst.x[(i * inst.T + t) * inst.H + h] * inst.w[h * inst.V + v];
                if (acc > best) {
                    second = best;
                    best = acc;
                } else if (acc > second) {
                    second = acc;
                }
            }
            if (second > -1e300) min_gap = std::min(min_gap, best - second);
        }
    }
    return min_gap;
}

CheckResult check(const std::string& name, const std::function<bool(std::string&)>& body) {
    CheckResult r;
    r.name = name;
    try {
        r.passed = body(r.detail);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = e.what();
    }
    return r;
}

bool reorder_equivalence(std::string& detail) {
    Rng rng(101);
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
        Instance inst = draw_instance(rng, 2, 5, 8, 13, it % 2 == 0, it % 3 != 0);
        std::vector<float> xf(inst.x.begin(), inst.x.end());
        std::vector<float> wf(inst.w.begin(), inst.w.end());
        std::vector<float> bf(inst.b.begin(), inst.b.end());

        auto fused = fused_project_max_forward<float>(xf, inst.B, inst.T, inst.H, wf, inst.V, bf,
                                                      inst.mask);
        for (size_t i = 0; i < inst.B; ++i) {
            std::span<const float> hidden(xf.data() + i * inst.T * inst.H, inst.T * inst.H);
            std::span<const uint8_t> mask_row;
            if (!inst.mask.empty())
                mask_row = std::span<const uint8_t>(inst.mask.data() + i * inst.T, inst.T);
            auto naive = sparse_doc_pool_naive(hidden, inst.T, inst.H, wf, inst.V, mask_row, bf);
            for (size_t v = 0; v < inst.V; ++v) {
                const double fused_act =
                    log_saturate(static_cast<double>(fused.values[i * inst.V + v]));
                worst = std::max(worst, std::abs(fused_act - static_cast<double>(naive[v])));
            }
        }
    }
    std::ostringstream ss;
    ss << "max |activate(max) - max(activate)| = " << worst;
    detail = ss.str();
    return worst <= 1e-6;
}

bool fused_workspace_bound(std::string& detail) {
    // structural bound: scratch stays one B x V slice however long T gets
    Rng rng(707);
    const size_t b = 2, h = 4, v = 50;
    size_t ws_short = 0, ws_long = 0;
    for (size_t t : {4ul, 64ul}) {
        std::vector<float> x(b * t * h), w(h * v);
        for (auto& e : x) e = static_cast<float>(rng.signed_unit());
        for (auto& e : w) e = static_cast<float>(rng.signed_unit());
        fused_project_max_forward<float>(x, b, t, h, w, v);
        (t == 4 ? ws_short : ws_long) = fused_project_max_last_workspace();
        if (fused_project_max_last_workspace() >= b * t * v && t > 1) {
            detail = "workspace reached B*T*V at T=" + std::to_string(t);
            return false;
        }
    }
    std::ostringstream ss;
    ss << "workspace " << ws_short << " floats at T=4 and " << ws_long << " at T=64";
    detail = ss.str();
    return ws_short == ws_long && ws_short == fused_project_max_workspace(b, v);
}

bool gradient_check(std::string& detail, SelfcheckMutation mutation) {
    Rng rng(202);
    const double step = 1e-4;
    double worst = 0.0;
    int redraws = 0;
    for (int it = 0; it < 25; ++it) {
        Instance inst = draw_instance(rng, 2, 5, 8, 13, it % 2 == 0, true);
        while (min_argmax_gap(inst) < 1e-3 && redraws < 200) {
            inst = draw_instance(rng, 2, 5, 8, 13, it % 2 == 0, true);
            ++redraws;
        }
        std::vector<double> grad_y(inst.B * inst.V);
        for (auto& g : grad_y) g = rng.signed_unit();

        auto forward_sum = [&](const std::vector<double>& x, const std::vector<double>& w,
                               const std::vector<double>& b) {
            auto out = fused_project_max_forward<double>(x, inst.B, inst.T, inst.H, w, inst.V, b,
                                                         inst.mask);
            double s = 0.0;
            for (size_t i = 0; i < out.values.size(); ++i) s += grad_y[i] * out.values[i];
            return s;
        };

        auto fwd = fused_project_max_forward<double>(inst.x, inst.B, inst.T, inst.H, inst.w,
                                                     inst.V, inst.b, inst.mask);
        auto grads = fused_project_max_backward<double>(grad_y, fwd.argmax, inst.x, inst.B, inst.T,
                                                        inst.H, inst.w, inst.V, inst.mask);
        if (mutation == SelfcheckMutation::backward_sign_flip)
            for (auto& g : grads.grad_weight) g = -g;

        // parameters alias inst.{x,w,b}, so perturbing in place is enough
        auto fd_vs = [&](std::vector<double>& param, size_t idx, double analytic) -> double {
            const double saved = param[idx];
            param[idx] = saved + step;
            const double up = forward_sum(inst.x, inst.w, inst.b);
            param[idx] = saved - step;
            const double down = forward_sum(inst.x, inst.w, inst.b);
            param[idx] = saved;
            const double numeric = (up - down) / (2.0 * step);
            return std::abs(analytic - numeric) /
                   std::max({1.0, std::abs(analytic), std::abs(numeric)});
        };

        // probe a sample of coordinates from each parameter
        for (int probe = 0; probe < 20; ++probe) {
            const size_t xi = rng.index(inst.x.size());
            worst = std::max(worst, fd_vs(inst.x, xi, grads.grad_input[xi]));
            const size_t wi = rng.index(inst.w.size());
            worst = std::max(worst, fd_vs(inst.w, wi, grads.grad_weight[wi]));
            if (!inst.b.empty()) {
                const size_t bi = rng.index(inst.b.size());
                worst = std::max(worst, fd_vs(inst.b, bi, grads.grad_bias[bi]));
            }
        }
    }
    std::ostringstream ss;
    ss << "max relative error = " << worst << " (redraws near ties: " << redraws << ")";
    detail = ss.str();
    return worst < 1e-4;
}

bool mask_fidelity(std::string& detail) {
    for (size_t L = 1; L <= 12; ++L) {
        for (size_t P = 1; P <= L; ++P) {
            for (size_t w = 1; w <= std::max<size_t>(L - P, 1); ++w) {
                if ((L - P) % w != 0) continue;
                const MaskMatrix m = custom_causal_mask(L, P, w);
                for (size_t q = 0; q < L; ++q) {
                    size_t attended = 0;
                    for (size_t k = 0; k < L; ++k) {
                        const bool expect =
                            (q < P && k <= q) || (q >= P && k < P) ||
                            (q >= P && k >= P && (q - P) / w == (k - P) / w && k <= q);
                        if (m.attends(q, k) != expect) {
                            detail = "mismatch at L=" + std::to_string(L) +
                                     " P=" + std::to_string(P) + " w=" + std::to_string(w);
                            return false;
                        }
                        if (m.attends(q, k)) ++attended;
                    }
                    const size_t expect_count = q < P ? q + 1 : P + (q - P) % w + 1;
                    if (attended != expect_count) {
                        detail = "row count mismatch at L=" + std::to_string(L);
                        return false;
                    }
                }
                if (P == L) {
                    for (size_t q = 0; q < L; ++q)
                        for (size_t k = 0; k < L; ++k)
                            if (m.attends(q, k) != (k <= q)) {
                                detail = "P=L does not reduce to the causal mask";
                                return false;
                            }
                }
            }
        }
    }
    detail = "all (L <= 12, P <= L, w | L-P) combinations";
    return true;
}

bool contrastive_identities(std::string& detail) {
    for (double tau : {0.02, 1.0}) {
        ScoreBatch batch;
        batch.tau = tau;
        batch.queries.push_back({0.73, {0.73}});
        const double loss = contrastive_loss(batch);
        if (std::abs(loss - std::log(2.0)) > 1e-9) {
            detail = "pos == neg should give ln 2 at tau=" + std::to_string(tau);
            return false;
        }
    }
    ScoreBatch no_negs;
    no_negs.tau = 0.02;
    no_negs.queries.push_back({1.7, {}});
    if (contrastive_loss(no_negs) != 0.0) {
        detail = "no negatives should give exactly 0";
        return false;
    }
    // cross-route: plain exponentials (no max shift) at small magnitudes
    Rng rng(303);
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
        ScoreBatch batch;
        batch.tau = 1.0;
        for (int q = 0; q < 8; ++q) {
            QueryScores qs;
            qs.pos = rng.signed_unit();
            for (int n = 0; n < 7; ++n) qs.negs.push_back(rng.signed_unit());
            batch.queries.push_back(std::move(qs));
        }
        double direct = 0.0;
        for (const auto& q : batch.queries) {
            double denom = std::exp(q.pos);
            for (double n : q.negs) denom += std::exp(n);
            direct += -std::log(std::exp(q.pos) / denom);
        }
        direct /= static_cast<double>(batch.queries.size());
        worst = std::max(worst, std::abs(direct - contrastive_loss(batch)));
    }
    std::ostringstream ss;
    ss << "max |shifted - direct| = " << worst;
    detail = ss.str();
    return worst <= 1e-12;
}

bool flops_identities(std::string& detail) {
    std::vector<float> zeros(3 * 7, 0.0f);
    if (flops_regularizer(zeros, 3, 7) != 0.0) {
        detail = "all-zero logits should give 0";
        return false;
    }
    Rng rng(404);
    const size_t n = 4, v = 13;
    std::vector<float> logits(n * v);
    for (auto& x : logits) x = static_cast<float>(rng.uniform());
    // N=1 rows reduce to a plain squared sum
    double sq = 0.0;
    for (size_t t = 0; t < v; ++t)
        sq += static_cast<double>(logits[t]) * static_cast<double>(logits[t]);
    if (std::abs(flops_regularizer(std::span<const float>(logits.data(), v), 1, v) - sq) > 1e-12) {
        detail = "N=1 should reduce to sum of squares";
        return false;
    }
    // permutation invariance over documents
    const double base = flops_regularizer(logits, n, v);
    std::vector<float> permuted(logits.begin() + v, logits.end());
    permuted.insert(permuted.end(), logits.begin(), logits.begin() + v);
    const double perm = flops_regularizer(permuted, n, v);
    std::ostringstream ss;
    ss << "|perm - base| = " << std::abs(perm - base);
    detail = ss.str();
    return std::abs(perm - base) <= 1e-12;
}

bool kl_identities(std::string& detail) {
    Rng rng(505);
    std::vector<std::vector<double>> teacher(8), student(8);
    for (auto& row : teacher) {
        row.resize(8);
        for (auto& x : row) x = rng.signed_unit();
    }
    student = teacher;
    if (kl_alignment_loss(student, teacher, 0.5) > 1e-15) {
        detail = "student == teacher should give 0";
        return false;
    }
    for (auto& row : student)
        for (auto& x : row) x += 3.25;  // constant shift
    const double shifted = kl_alignment_loss(student, teacher, 0.5);
    std::ostringstream ss;
    ss << "shift-invariance residual = " << shifted;
    detail = ss.str();
    return shifted <= 1e-12;
}

}  // namespace

std::vector<CheckResult> run_selfcheck(SelfcheckMutation mutation) {
    std::vector<CheckResult> results;
    results.push_back(check("reorder-equivalence", reorder_equivalence));
    results.push_back(check("fused-workspace-bound", fused_workspace_bound));
    results.push_back(check("gradient-vs-finite-differences", [&](std::string& d) {
        return gradient_check(d, mutation);
    }));
    results.push_back(check("custom-causal-mask", mask_fidelity));
    results.push_back(check("contrastive-loss", contrastive_identities));
    results.push_back(check("flops-regularizer", flops_identities));
    results.push_back(check("kl-alignment", kl_identities));
    return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.passed) return false;
    return true;
}

}  // namespace lightretriever
