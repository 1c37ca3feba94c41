// crf.hpp -- linear-chain CRF: scoring, forward/backward, Viterbi decoding
// and L2-regularized maximum-likelihood training.
//
// Path score for labels y over feature-id sets x:
//   begin[y0] + sum_i emission(y_i, x_i) + sum_i transition(y_{i-1}, y_i)
//   + end[y_last],   emission(l, x) = sum_{f in x} W[f][l]
//
// Parameters live in one flat vector laid out as
//   [ emission F*L | transition L*L | begin L | end L ]
// with emission indexed [f*L + l] so each active feature touches a
// contiguous block.

#ifndef DEID_CRF_HPP
#define DEID_CRF_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "deid/core.hpp"
#include "deid/features.hpp"

namespace deid {

// O first so that tie-breaking toward the lowest label id decodes to O on
// an uninformative model.
inline std::vector<Tag> bio_label_set() {
  std::vector<Tag> labels;
  labels.push_back(Tag::outside());
  for (EntityClass c : all_entity_classes()) {
    labels.push_back(Tag::begin(c));
    labels.push_back(Tag::inside(c));
  }
  return labels;
}

class CrfModel {
public:
  static constexpr uint32_t kFormatVersion = 1;

  CrfModel() = default;
  CrfModel(std::vector<Tag> labels, FeatureIndex features, double l2_lambda,
           std::string config_hash = {})
      : labels_(std::move(labels)),
        features_(std::move(features)),
        l2_lambda_(l2_lambda),
        config_hash_(std::move(config_hash)) {
    if (!features_.frozen()) throw error("CrfModel: feature index must be frozen");
    params_.assign(param_count(), 0.0);
  }

  size_t num_labels() const { return labels_.size(); }
  size_t num_features() const { return features_.size(); }
  size_t param_count() const {
    const size_t L = labels_.size();
    return features_.size() * L + L * L + 2 * L;
  }

  const std::vector<Tag>& labels() const { return labels_; }
  const FeatureIndex& feature_index() const { return features_; }
  double l2_lambda() const { return l2_lambda_; }
  const std::string& config_hash() const { return config_hash_; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  // segment offsets into the flat parameter vector
  size_t emission_offset() const { return 0; }
  size_t transition_offset() const { return features_.size() * labels_.size(); }
  size_t begin_offset() const { return transition_offset() + labels_.size() * labels_.size(); }
  size_t end_offset() const { return begin_offset() + labels_.size(); }

  double emission_weight(uint32_t feature, uint32_t label) const {
    return params_[feature * labels_.size() + label];
  }
  double transition_weight(uint32_t from, uint32_t to) const {
    return params_[transition_offset() + from * labels_.size() + to];
  }
  double begin_weight(uint32_t label) const {
    return params_[begin_offset() + label];
  }
  double end_weight(uint32_t label) const {
    return params_[end_offset() + label];
  }

  std::optional<uint32_t> label_id(const Tag& t) const {
    for (size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] == t) return static_cast<uint32_t>(i);
    return std::nullopt;
  }

private:
  std::vector<Tag> labels_;
  FeatureIndex features_;
  std::vector<double> params_;
  double l2_lambda_ = 0.0;
  std::string config_hash_;
};

// One training/decoding sequence: active feature ids per position, plus
// gold label ids when known.
struct CrfInstance {
  std::vector<std::vector<uint32_t>> features;
  std::vector<uint32_t> labels;
};

namespace crf_detail {

inline double logsumexp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// E[t*L + l] = sum of emission weights of position t's active features.
inline std::vector<double> emission_scores(
    const CrfModel& m, const std::vector<std::vector<uint32_t>>& x) {
  const size_t L = m.num_labels();
  std::vector<double> E(x.size() * L, 0.0);
  const std::vector<double>& w = m.params();
  for (size_t t = 0; t < x.size(); ++t) {
    double* row = E.data() + t * L;
    for (uint32_t f : x[t]) {
      const double* wf = w.data() + static_cast<size_t>(f) * L;
      for (size_t l = 0; l < L; ++l) row[l] += wf[l];
    }
  }
  return E;
}

// alpha[t*L + l] = log-sum over paths ending in label l at position t
// (emission of position t included).
inline std::vector<double> forward(const CrfModel& m,
                                   const std::vector<double>& E, size_t n) {
  const size_t L = m.num_labels();
  std::vector<double> alpha(n * L);
  for (size_t l = 0; l < L; ++l) alpha[l] = m.begin_weight(l) + E[l];
  std::vector<double> acc(L);
  for (size_t t = 1; t < n; ++t) {
    for (size_t l = 0; l < L; ++l) {
      for (size_t p = 0; p < L; ++p)
        acc[p] = alpha[(t - 1) * L + p] + m.transition_weight(p, l);
      alpha[t * L + l] = logsumexp(acc) + E[t * L + l];
    }
  }
  return alpha;
}

// beta[t*L + l] = log-sum over path suffixes from label l at position t
// (emission of position t excluded, end weight included).
inline std::vector<double> backward(const CrfModel& m,
                                    const std::vector<double>& E, size_t n) {
  const size_t L = m.num_labels();
  std::vector<double> beta(n * L);
  for (size_t l = 0; l < L; ++l) beta[(n - 1) * L + l] = m.end_weight(l);
  std::vector<double> acc(L);
  for (size_t t = n - 1; t-- > 0;) {
    for (size_t l = 0; l < L; ++l) {
      for (size_t nx = 0; nx < L; ++nx)
        acc[nx] = m.transition_weight(l, nx) + E[(t + 1) * L + nx] +
                  beta[(t + 1) * L + nx];
      beta[t * L + l] = logsumexp(acc);
    }
  }
  return beta;
}

}  // namespace crf_detail

inline double score_path(const CrfModel& m,
                         const std::vector<std::vector<uint32_t>>& x,
                         const std::vector<uint32_t>& y) {
  if (x.empty() || x.size() != y.size())
    throw error("score_path: |x|=" + std::to_string(x.size()) +
                " |y|=" + std::to_string(y.size()));
  std::vector<double> E = crf_detail::emission_scores(m, x);
  const size_t L = m.num_labels();
  double s = m.begin_weight(y[0]) + E[y[0]];
  for (size_t t = 1; t < x.size(); ++t)
    s += m.transition_weight(y[t - 1], y[t]) + E[t * L + y[t]];
  s += m.end_weight(y.back());
  return s;
}

inline double log_partition(const CrfModel& m,
                            const std::vector<std::vector<uint32_t>>& x) {
  if (x.empty()) throw error("log_partition: empty sequence");
  const size_t L = m.num_labels();
  std::vector<double> E = crf_detail::emission_scores(m, x);
  std::vector<double> alpha = crf_detail::forward(m, E, x.size());
  std::vector<double> fin(L);
  for (size_t l = 0; l < L; ++l)
    fin[l] = alpha[(x.size() - 1) * L + l] + m.end_weight(l);
  return crf_detail::logsumexp(fin);
}

// Max-score label path; ties break toward the lowest label id at every
// backpointer decision, so decoding is reproducible.
inline std::vector<uint32_t> viterbi(const CrfModel& m,
                                     const std::vector<std::vector<uint32_t>>& x) {
  if (x.empty()) throw error("viterbi: empty sequence");
  const size_t L = m.num_labels();
  const size_t n = x.size();
  std::vector<double> E = crf_detail::emission_scores(m, x);

  std::vector<double> delta(n * L);
  std::vector<uint32_t> back(n * L, 0);
  for (size_t l = 0; l < L; ++l) delta[l] = m.begin_weight(l) + E[l];
  for (size_t t = 1; t < n; ++t) {
    for (size_t l = 0; l < L; ++l) {
      double best = -std::numeric_limits<double>::infinity();
      uint32_t arg = 0;
      for (size_t p = 0; p < L; ++p) {
        double s = delta[(t - 1) * L + p] + m.transition_weight(p, l);
        if (s > best) {  // strict: first (lowest id) maximum wins
          best = s;
          arg = static_cast<uint32_t>(p);
        }
      }
      delta[t * L + l] = best + E[t * L + l];
      back[t * L + l] = arg;
    }
  }

  double best = -std::numeric_limits<double>::infinity();
  uint32_t last = 0;
  for (size_t l = 0; l < L; ++l) {
    double s = delta[(n - 1) * L + l] + m.end_weight(l);
    if (s > best) {
      best = s;
      last = static_cast<uint32_t>(l);
    }
  }

  std::vector<uint32_t> path(n);
  path[n - 1] = last;
  for (size_t t = n - 1; t > 0; --t) path[t - 1] = back[t * L + path[t]];
  return path;
}

struct NllGradient {
  double nll = 0.0;
  std::vector<double> grad;  // flat, aligned with CrfModel::params()
};

// Negative conditional log-likelihood of the batch plus (lambda/2)||w||^2,
// with its exact gradient: expected minus empirical feature counts from
// forward-backward marginals, plus lambda*w.
inline NllGradient nll_and_gradient(const CrfModel& m,
                                    std::span<const CrfInstance> batch) {
  const size_t L = m.num_labels();
  NllGradient out;
  out.grad.assign(m.param_count(), 0.0);
  std::vector<double>& g = out.grad;
  const size_t toff = m.transition_offset();
  const size_t boff = m.begin_offset();
  const size_t eoff = m.end_offset();

  for (size_t si = 0; si < batch.size(); ++si) {
    const CrfInstance& inst = batch[si];
    const size_t n = inst.features.size();
    if (n == 0) throw error("nll_and_gradient: empty sequence in batch");
    if (inst.labels.size() != n)
      throw error("nll_and_gradient: label/feature length mismatch");

    std::vector<double> E = crf_detail::emission_scores(m, inst.features);
    std::vector<double> alpha = crf_detail::forward(m, E, n);
    std::vector<double> beta = crf_detail::backward(m, E, n);

    std::vector<double> fin(L);
    for (size_t l = 0; l < L; ++l) fin[l] = alpha[(n - 1) * L + l] + m.end_weight(l);
    const double log_z = crf_detail::logsumexp(fin);
    if (!std::isfinite(log_z))
      throw error("nll_and_gradient: non-finite log partition in sequence " +
                  std::to_string(si));

    // unary marginals -> emission, begin, end gradients
    std::vector<double> marg(L);
    for (size_t t = 0; t < n; ++t) {
      for (size_t l = 0; l < L; ++l) {
        marg[l] = std::exp(alpha[t * L + l] + beta[t * L + l] - log_z);
        if (!std::isfinite(marg[l]))
          throw error("nll_and_gradient: non-finite marginal at sequence " +
                      std::to_string(si) + " position " + std::to_string(t));
      }
      for (uint32_t f : inst.features[t]) {
        double* gf = g.data() + static_cast<size_t>(f) * L;
        for (size_t l = 0; l < L; ++l) gf[l] += marg[l];
      }
      const uint32_t gold = inst.labels[t];
      for (uint32_t f : inst.features[t]) g[static_cast<size_t>(f) * L + gold] -= 1.0;
      if (t == 0)
        for (size_t l = 0; l < L; ++l) g[boff + l] += marg[l];
      if (t == n - 1)
        for (size_t l = 0; l < L; ++l) g[eoff + l] += marg[l];
    }
    g[boff + inst.labels[0]] -= 1.0;
    g[eoff + inst.labels[n - 1]] -= 1.0;

    // pairwise marginals -> transition gradient
    for (size_t t = 1; t < n; ++t) {
      for (size_t a = 0; a < L; ++a) {
        const double base = alpha[(t - 1) * L + a];
        for (size_t b = 0; b < L; ++b) {
          double p = std::exp(base + m.transition_weight(a, b) + E[t * L + b] +
                              beta[t * L + b] - log_z);
          g[toff + a * L + b] += p;
        }
      }
      g[toff + inst.labels[t - 1] * L + inst.labels[t]] -= 1.0;
    }

    out.nll += log_z - score_path(m, inst.features, inst.labels);
  }

  const double lambda = m.l2_lambda();
  if (lambda > 0.0) {
    const std::vector<double>& w = m.params();
    double sq = 0.0;
    for (size_t i = 0; i < w.size(); ++i) {
      sq += w[i] * w[i];
      g[i] += lambda * w[i];
    }
    out.nll += 0.5 * lambda * sq;
  }
  return out;
}

// Objective only (forward pass per sequence); used by the line search.
inline double nll(const CrfModel& m, std::span<const CrfInstance> batch) {
  double total = 0.0;
  for (const CrfInstance& inst : batch)
    total += log_partition(m, inst.features) -
             score_path(m, inst.features, inst.labels);
  if (m.l2_lambda() > 0.0) {
    double sq = 0.0;
    for (double w : m.params()) sq += w * w;
    total += 0.5 * m.l2_lambda() * sq;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Training: full-batch gradient descent with backtracking line search
// ---------------------------------------------------------------------------

struct CrfTrainConfig {
  double l2_lambda = 1.0;
  int max_epochs = 100;
  double grad_tolerance = 1e-3;  // infinity norm
  double armijo_c = 1e-4;
  int max_backtracks = 60;
};

struct TrainResult {
  CrfModel model;
  std::vector<double> epoch_nll;  // objective at the start of each epoch
};

struct TaggedSentence {
  std::vector<FeatureVector> features;
  std::vector<Tag> tags;
};

inline TrainResult train_crf(const std::vector<TaggedSentence>& corpus,
                             const CrfTrainConfig& config,
                             std::vector<Tag> labels = bio_label_set(),
                             std::string config_hash = {}) {
  std::vector<TaggedSentence> usable;
  usable.reserve(corpus.size());
  for (const TaggedSentence& s : corpus) {
    if (s.features.size() != s.tags.size())
      throw error("train_crf: feature/tag length mismatch");
    if (!s.features.empty()) usable.push_back(s);
  }
  if (usable.empty()) throw error("train_crf: empty corpus");

  std::vector<std::vector<FeatureVector>> fv;
  fv.reserve(usable.size());
  for (const TaggedSentence& s : usable) fv.push_back(s.features);
  FeatureIndex index = index_features(fv);

  CrfModel model(std::move(labels), std::move(index), config.l2_lambda,
                 std::move(config_hash));

  std::vector<CrfInstance> data;
  data.reserve(usable.size());
  for (const TaggedSentence& s : usable) {
    CrfInstance inst;
    for (const FeatureVector& v : s.features)
      inst.features.push_back(vectorize(v, model.feature_index()));
    for (const Tag& t : s.tags) {
      auto id = model.label_id(t);
      if (!id) throw error("train_crf: tag " + to_string(t) + " not in label set");
      inst.labels.push_back(*id);
    }
    data.push_back(std::move(inst));
  }

  TrainResult result{std::move(model), {}};
  CrfModel& m = result.model;
  std::vector<double> trial(m.param_count());
  double step = 0.0;  // warm-started across epochs
  int rising = 0;
  double prev_nll = std::numeric_limits<double>::infinity();

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    NllGradient ng = nll_and_gradient(m, data);
    result.epoch_nll.push_back(ng.nll);

    if (ng.nll > prev_nll) {
      if (++rising >= 3)
        throw error("train_crf: objective increased for 3 consecutive epochs "
                    "(last " + std::to_string(ng.nll) + ")");
    } else {
      rising = 0;
    }
    prev_nll = ng.nll;

    double ginf = 0.0, gsq = 0.0;
    for (double v : ng.grad) {
      ginf = std::max(ginf, std::abs(v));
      gsq += v * v;
    }
    if (ginf < config.grad_tolerance) break;

    if (step == 0.0) step = 1.0 / std::max(1.0, ginf);
    step *= 2.0;

    bool accepted = false;
    for (int bt = 0; bt < config.max_backtracks; ++bt) {
      for (size_t i = 0; i < trial.size(); ++i)
        trial[i] = m.params()[i] - step * ng.grad[i];
      std::swap(m.params(), trial);
      double f1 = nll(m, data);
      if (f1 <= ng.nll - config.armijo_c * step * gsq) {
        accepted = true;
        break;
      }
      std::swap(m.params(), trial);  // restore
      step *= 0.5;
    }
    if (!accepted) break;  // no descent step found: treat as converged
  }
  return result;
}

}  // namespace deid

#endif  // DEID_CRF_HPP
