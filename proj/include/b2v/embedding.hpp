#pragma once

// Trained node vectors plus the queries built on them.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "b2v/graph.hpp"

namespace b2v {

/// Row-major input and output vectors over a node vocabulary. Labels are the
/// graph node labels at training time (empty when unknown) so that filtered
/// queries work from a checkpoint alone.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// Zero-filled matrix. Throws InvalidArgument on duplicate ids, a zero
  /// dimension or a labels/vocabulary size mismatch.
  EmbeddingMatrix(std::uint32_t dimension, std::vector<NodeId> vocabulary,
                  std::vector<std::string> labels = {});

  std::uint32_t dimension() const { return dimension_; }
  std::size_t size() const { return vocabulary_.size(); }
  const std::vector<NodeId>& vocabulary() const { return vocabulary_; }
  const std::vector<std::string>& labels() const { return labels_; }
  void set_label(std::size_t row, std::string label) { labels_[row] = std::move(label); }

  std::optional<std::uint32_t> index_of(const NodeId& id) const;
  /// Throws UnknownNode.
  std::uint32_t require(const NodeId& id) const;

  std::span<float> input(std::size_t row) { return {input_.data() + row * dimension_, dimension_}; }
  std::span<const float> input(std::size_t row) const {
    return {input_.data() + row * dimension_, dimension_};
  }
  std::span<float> output(std::size_t row) { return {output_.data() + row * dimension_, dimension_}; }
  std::span<const float> output(std::size_t row) const {
    return {output_.data() + row * dimension_, dimension_};
  }
  std::vector<float>& input_data() { return input_; }
  const std::vector<float>& input_data() const { return input_; }
  std::vector<float>& output_data() { return output_; }
  const std::vector<float>& output_data() const { return output_; }

  bool all_finite() const;

  bool operator==(const EmbeddingMatrix& o) const {
    return dimension_ == o.dimension_ && vocabulary_ == o.vocabulary_ && labels_ == o.labels_ &&
           input_ == o.input_ && output_ == o.output_;
  }

 private:
  std::uint32_t dimension_ = 0;
  std::vector<NodeId> vocabulary_;
  std::vector<std::string> labels_;
  std::vector<float> input_;
  std::vector<float> output_;
  std::map<NodeId, std::uint32_t> index_;
};

// --- checkpoint ---------------------------------------------------------

/// Little-endian binary: "B2VE", u32 version, u32 dimension, u64 vocab size,
/// input rows then output rows as float32, then per row the node id and
/// label as u32-length-prefixed strings.
void save_checkpoint(const EmbeddingMatrix& emb, const std::filesystem::path& path);
std::string checkpoint_bytes(const EmbeddingMatrix& emb);
EmbeddingMatrix load_checkpoint(const std::filesystem::path& path);
EmbeddingMatrix parse_checkpoint(std::string_view bytes);

// --- similarity ---------------------------------------------------------

/// Throws ZeroVector when either vector has zero norm, InvalidArgument on a
/// length mismatch.
double cosine(std::span<const double> a, std::span<const double> b);
double cosine(std::span<const float> a, std::span<const float> b);

struct Neighbor {
  NodeId node;
  double similarity = 0;
  bool operator==(const Neighbor&) const = default;
};

struct NeighborList {
  NodeId query;
  std::vector<Neighbor> neighbors;  // descending similarity, ties by ascending id
};

/// Top-k by cosine over input vectors, query excluded. `filter` restricts
/// candidates to the given labels. `workers` > 1 scores rows with OpenMP.
NeighborList knn(const EmbeddingMatrix& emb, const NodeId& query, std::size_t k,
                 const std::set<std::string>& filter = {}, int workers = 1);
/// Single-threaded reference scoring.
NeighborList knn_serial(const EmbeddingMatrix& emb, const NodeId& query, std::size_t k,
                        const std::set<std::string>& filter = {});

// --- comfort prediction -------------------------------------------------

enum class Comfort { Comfortable = 0, Uncomfortable = 1, Neutral = 2 };
using OneHot = std::array<int, 3>;

OneHot one_hot(Comfort c);
std::optional<Comfort> parse_comfort(std::string_view token);
std::string_view comfort_name(Comfort c);
/// Throws InvalidArgument unless exactly one component is 1 and the rest 0.
Comfort from_one_hot(const OneHot& v);

struct LabeledExample {
  NodeId node;
  Comfort label = Comfort::Neutral;
};

/// Majority vote of the k most similar labeled nodes. Vote ties go to the
/// class with the larger summed similarity, then to the lowest class index.
/// A labeled example equal to the query takes part like any other. Examples
/// missing from the vocabulary are ignored. Throws NoLabeledExamples when no
/// usable example remains, UnknownNode for the query.
OneHot predict_comfort(const EmbeddingMatrix& emb, const std::vector<LabeledExample>& labeled,
                       const NodeId& query, std::size_t k);

/// CSV `node_id,label` with label a comfort token.
std::vector<LabeledExample> read_labels(const std::filesystem::path& path);

// --- projector export ---------------------------------------------------

/// Writes vectors.tsv and metadata.tsv (header `node_id\tlabel\tifc_type`) in
/// vocabulary order. Labels and types come from `graph` when it holds the
/// node, otherwise from the matrix labels. Throws IoFailure.
void export_projector(const EmbeddingMatrix& emb, const PropertyGraph* graph,
                      const std::filesystem::path& out_dir);

/// Reads vectors.tsv back, one row per line.
std::vector<std::vector<double>> import_vectors_tsv(const std::filesystem::path& path);

}  // namespace b2v
