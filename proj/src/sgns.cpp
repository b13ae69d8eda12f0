#include "b2v/sgns.hpp"

#include <omp.h>

#include <algorithm>

#include "b2v/error.hpp"

namespace b2v {

void TrainConfig::validate() const {
  if (dimension < 1) throw Error(Errc::InvalidArgument, "dimension must be at least 1");
  if (window < 1) throw Error(Errc::InvalidArgument, "window must be at least 1");
  if (negatives < 1) throw Error(Errc::InvalidArgument, "negatives must be at least 1");
  if (epochs < 1) throw Error(Errc::InvalidArgument, "epochs must be at least 1");
  if (!(initial_lr > 0) || !std::isfinite(initial_lr)) {
    throw Error(Errc::InvalidArgument, "initial_lr must be positive");
  }
  if (!(min_lr >= 0) || min_lr > initial_lr) {
    throw Error(Errc::InvalidArgument, "min_lr must lie in [0, initial_lr]");
  }
  if (!(subsample >= 0) || !std::isfinite(subsample)) {
    throw Error(Errc::InvalidArgument, "subsample must be non-negative");
  }
}

namespace {

std::vector<double> powered(std::span<const std::uint64_t> counts) {
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) w[i] = std::pow(static_cast<double>(counts[i]), 0.75);
  return w;
}

AliasTable sampler_table(std::span<const std::uint64_t> counts) {
  const auto w = powered(counts);
  if (std::none_of(w.begin(), w.end(), [](double x) { return x > 0; })) {
    throw Error(Errc::AllZeroCounts, "negative sampler needs at least one nonzero count");
  }
  return AliasTable(w);
}

std::vector<double> keep_probabilities(const WalkCorpus& corpus, double threshold) {
  std::vector<double> keep(corpus.vocabulary.size(), 1.0);
  if (threshold <= 0) return keep;
  double total = 0;
  for (auto c : corpus.counts) total += static_cast<double>(c);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (corpus.counts[i] == 0) continue;
    const double f = static_cast<double>(corpus.counts[i]) / total;
    keep[i] = std::min(1.0, (std::sqrt(f / threshold) + 1.0) * threshold / f);
  }
  return keep;
}

// Tokens of one walk surviving subsampling, with each one's effective window.
// Replayed identically by the pair count and by training.
struct Schedule {
  std::vector<std::uint32_t> tokens;
  std::vector<std::uint32_t> windows;

  std::uint64_t pair_count() const {
    std::uint64_t n = 0;
    const std::size_t m = tokens.size();
    for (std::size_t i = 0; i < m; ++i) {
      n += std::min<std::size_t>(windows[i], i) + std::min<std::size_t>(windows[i], m - 1 - i);
    }
    return n;
  }
};

void make_schedule(const std::vector<std::uint32_t>& walk, const std::vector<double>& keep,
                   const TrainConfig& cfg, std::uint64_t epoch, std::uint64_t walk_index,
                   Schedule& s) {
  RandomStream rng{cfg.seed, static_cast<std::uint64_t>(StreamTag::Window), epoch, walk_index};
  s.tokens.clear();
  s.windows.clear();
  for (auto t : walk) {
    if (keep[t] < 1.0 && rng.uniform() >= keep[t]) continue;
    s.tokens.push_back(t);
    s.windows.push_back(cfg.shrink_window ? 1 + static_cast<std::uint32_t>(rng.below(cfg.window))
                                          : cfg.window);
  }
}

struct Trainer {
  const WalkCorpus& corpus;
  const TrainConfig& cfg;
  EmbeddingMatrix& emb;
  const NegativeSampler& sampler;
  std::vector<double> keep;
  std::vector<std::uint64_t> first_pair;  // per (epoch, walk), prefix sums
  std::uint64_t total_pairs = 0;

  double lr_at(std::uint64_t pair) const {
    const double frac = static_cast<double>(pair) / static_cast<double>(total_pairs);
    return std::max(cfg.min_lr, cfg.initial_lr - (cfg.initial_lr - cfg.min_lr) * frac);
  }

  // Returns the summed loss over the walk's pairs.
  double train_walk(std::uint32_t epoch, std::size_t w, Schedule& s, std::vector<float>& scratch,
                    std::vector<float*>& targets) const {
    make_schedule(corpus.walks[w], keep, cfg, epoch, w, s);
    RandomStream rng{cfg.seed, static_cast<std::uint64_t>(StreamTag::Train), epoch, w};
    std::uint64_t pair = first_pair[epoch * corpus.walks.size() + w];
    const std::size_t n = cfg.dimension;
    const std::size_t m = s.tokens.size();
    double loss = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t lo = i - std::min<std::size_t>(s.windows[i], i);
      const std::size_t hi = std::min(m - 1, i + s.windows[i]);
      float* v = emb.input(s.tokens[i]).data();
      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == i) continue;
        const auto context = s.tokens[j];
        targets.clear();
        targets.push_back(emb.output(context).data());
        for (std::uint32_t k = 0; k < cfg.negatives; ++k) {
          const auto neg = sampler.sample(rng);
          if (neg != context) targets.push_back(emb.output(neg).data());
        }
        const auto lr = static_cast<float>(lr_at(pair++));
        loss += sgns_step<float>(v, targets.data(), targets.size(), n, lr, scratch.data());
      }
    }
    return loss;
  }
};

}  // namespace

NegativeSampler::NegativeSampler(std::span<const std::uint64_t> counts)
    : table_(sampler_table(counts)) {}

EmbeddingMatrix initial_embedding(const std::vector<NodeId>& vocabulary, std::uint32_t dimension,
                                  std::uint64_t seed) {
  EmbeddingMatrix emb(dimension, vocabulary);
  RandomStream rng{seed, static_cast<std::uint64_t>(StreamTag::Init)};
  const double scale = 1.0 / dimension;
  for (auto& x : emb.input_data()) x = static_cast<float>((rng.uniform() - 0.5) * scale);
  return emb;
}

std::uint64_t count_pairs(const WalkCorpus& corpus, const TrainConfig& cfg) {
  cfg.validate();
  const auto keep = keep_probabilities(corpus, cfg.subsample);
  Schedule s;
  std::uint64_t total = 0;
  for (std::uint32_t e = 0; e < cfg.epochs; ++e) {
    for (std::size_t w = 0; w < corpus.walks.size(); ++w) {
      make_schedule(corpus.walks[w], keep, cfg, e, w, s);
      total += s.pair_count();
    }
  }
  return total;
}

EmbeddingMatrix train(const WalkCorpus& corpus, const TrainConfig& cfg, int workers,
                      TrainReport* report) {
  cfg.validate();
  if (corpus.token_count() == 0) throw Error(Errc::EmptyCorpus, "walk corpus has no tokens");

  EmbeddingMatrix emb = initial_embedding(corpus.vocabulary, cfg.dimension, cfg.seed);
  const NegativeSampler sampler(corpus.counts);
  Trainer t{corpus, cfg, emb, sampler, keep_probabilities(corpus, cfg.subsample), {}, 0};

  const std::size_t walks = corpus.walks.size();
  t.first_pair.resize(static_cast<std::size_t>(cfg.epochs) * walks + 1);
  {
    Schedule s;
    for (std::uint32_t e = 0; e < cfg.epochs; ++e) {
      for (std::size_t w = 0; w < walks; ++w) {
        make_schedule(corpus.walks[w], t.keep, cfg, e, w, s);
        const auto slot = e * walks + w;
        t.first_pair[slot + 1] = t.first_pair[slot] + s.pair_count();
      }
    }
  }
  t.total_pairs = t.first_pair.back();
  TrainReport local;
  local.total_pairs = t.total_pairs;
  if (t.total_pairs == 0) {
    if (report) *report = local;
    return emb;
  }

  const int threads = cfg.deterministic ? 1 : (workers > 0 ? workers : omp_get_max_threads());
  for (std::uint32_t e = 0; e < cfg.epochs; ++e) {
    double loss = 0;
    if (threads == 1) {
      Schedule s;
      std::vector<float> scratch(cfg.dimension);
      std::vector<float*> targets;
      for (std::size_t w = 0; w < walks; ++w) loss += t.train_walk(e, w, s, scratch, targets);
    } else {
      const auto total = static_cast<std::int64_t>(walks);
#pragma omp parallel num_threads(threads) reduction(+ : loss)
      {
        Schedule s;
        std::vector<float> scratch(cfg.dimension);
        std::vector<float*> targets;
#pragma omp for schedule(dynamic, 16)
        for (std::int64_t w = 0; w < total; ++w) {
          loss += t.train_walk(e, static_cast<std::size_t>(w), s, scratch, targets);
        }
      }
    }
    const auto pairs = t.first_pair[(e + 1) * walks] - t.first_pair[e * walks];
    local.epoch_loss.push_back(pairs ? loss / static_cast<double>(pairs) : 0.0);
    if (!emb.all_finite()) {
      throw Error(Errc::InvariantViolation,
                  "non-finite embedding entry after epoch " + std::to_string(e + 1));
    }
  }
  if (report) *report = local;
  return emb;
}

}  // namespace b2v
