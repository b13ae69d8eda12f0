#include "b2v/embedding.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <sstream>

#include "b2v/error.hpp"
#include "b2v/text.hpp"

namespace b2v {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

EmbeddingMatrix::EmbeddingMatrix(std::uint32_t dimension, std::vector<NodeId> vocabulary,
                                 std::vector<std::string> labels)
    : dimension_(dimension), vocabulary_(std::move(vocabulary)), labels_(std::move(labels)) {
  if (dimension_ == 0) throw Error(Errc::InvalidArgument, "embedding dimension must be positive");
  if (labels_.empty()) labels_.resize(vocabulary_.size());
  if (labels_.size() != vocabulary_.size()) {
    throw Error(Errc::InvalidArgument, "label count does not match vocabulary size");
  }
  for (std::size_t i = 0; i < vocabulary_.size(); ++i) {
    if (!index_.emplace(vocabulary_[i], static_cast<std::uint32_t>(i)).second) {
      throw Error(Errc::InvalidArgument, "duplicate vocabulary entry " + vocabulary_[i].str());
    }
  }
  input_.assign(vocabulary_.size() * dimension_, 0.0f);
  output_.assign(vocabulary_.size() * dimension_, 0.0f);
}

std::optional<std::uint32_t> EmbeddingMatrix::index_of(const NodeId& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t EmbeddingMatrix::require(const NodeId& id) const {
  const auto i = index_of(id);
  if (!i) throw Error(Errc::UnknownNode, "node " + id.str() + " is not in the embedding vocabulary");
  return *i;
}

bool EmbeddingMatrix::all_finite() const {
  const auto finite = [](float x) { return std::isfinite(x); };
  return std::all_of(input_.begin(), input_.end(), finite) &&
         std::all_of(output_.begin(), output_.end(), finite);
}

// --- checkpoint ---------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'B', '2', 'V', 'E'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

void put_string(std::string& out, std::string_view s) {
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void get_floats(std::vector<float>& out) {
    need(out.size() * sizeof(float));
    std::memcpy(out.data(), bytes_.data() + pos_, out.size() * sizeof(float));
    pos_ += out.size() * sizeof(float);
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(Errc::FormatError, "checkpoint is truncated");
  }
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string checkpoint_bytes(const EmbeddingMatrix& emb) {
  std::string out(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, emb.dimension());
  put<std::uint64_t>(out, emb.size());
  const auto floats = [&](const std::vector<float>& v) {
    out.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(float));
  };
  floats(emb.input_data());
  floats(emb.output_data());
  for (std::size_t i = 0; i < emb.size(); ++i) {
    put_string(out, emb.vocabulary()[i].str());
    put_string(out, emb.labels()[i]);
  }
  return out;
}

void save_checkpoint(const EmbeddingMatrix& emb, const std::filesystem::path& path) {
  write_file_atomic(path, checkpoint_bytes(emb));
}

EmbeddingMatrix parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw Error(Errc::FormatError, "not an embedding checkpoint (bad magic)");
  }
  Reader r(bytes.substr(4));
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) {
    throw Error(Errc::FormatError, "unsupported checkpoint version " + std::to_string(version));
  }
  const auto dim = r.get<std::uint32_t>();
  const auto n = r.get<std::uint64_t>();
  if (dim == 0) throw Error(Errc::FormatError, "checkpoint dimension is zero");
  if (n > bytes.size() / (2 * sizeof(float) * dim)) throw Error(Errc::FormatError, "checkpoint is truncated");
  std::vector<float> input(n * dim), output(n * dim);
  r.get_floats(input);
  r.get_floats(output);
  std::vector<NodeId> vocab;
  std::vector<std::string> labels;
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto id = NodeId::try_parse(r.get_string());
    if (!id) throw Error(Errc::FormatError, "bad node id in checkpoint vocabulary");
    vocab.push_back(*id);
    labels.push_back(r.get_string());
  }
  if (!r.done()) throw Error(Errc::FormatError, "trailing bytes after checkpoint vocabulary");
  EmbeddingMatrix emb(dim, std::move(vocab), std::move(labels));
  emb.input_data() = std::move(input);
  emb.output_data() = std::move(output);
  return emb;
}

EmbeddingMatrix load_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

// --- similarity ---------------------------------------------------------

namespace {

template <class T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw Error(Errc::InvalidArgument, "cosine of vectors with different lengths");
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<double>(a[i]) * b[i];
    aa += static_cast<double>(a[i]) * a[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  if (aa == 0 || bb == 0) throw Error(Errc::ZeroVector, "cosine of a zero vector");
  return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

bool better(const Neighbor& x, const Neighbor& y) {
  if (x.similarity != y.similarity) return x.similarity > y.similarity;
  return x.node < y.node;
}

bool passes(const EmbeddingMatrix& emb, std::size_t row, const std::set<std::string>& filter) {
  return filter.empty() || filter.count(emb.labels()[row]) != 0;
}

// Zero rows cannot be ranked; they are skipped rather than failing the query.
std::optional<double> try_cosine(std::span<const float> a, std::span<const float> b) {
  try {
    return cosine(a, b);
  } catch (const Error&) {
    return std::nullopt;
  }
}

NeighborList select_top(const NodeId& query, std::vector<Neighbor> scored, std::size_t k) {
  const auto keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(), better);
  scored.resize(keep);
  return {query, std::move(scored)};
}

}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }
double cosine(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }

NeighborList knn_serial(const EmbeddingMatrix& emb, const NodeId& query, std::size_t k,
                        const std::set<std::string>& filter) {
  const auto q = emb.require(query);
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be at least 1");
  std::vector<Neighbor> scored;
  for (std::size_t i = 0; i < emb.size(); ++i) {
    if (i == q || !passes(emb, i, filter)) continue;
    if (const auto s = try_cosine(emb.input(q), emb.input(i))) scored.push_back({emb.vocabulary()[i], *s});
  }
  return select_top(query, std::move(scored), k);
}

NeighborList knn(const EmbeddingMatrix& emb, const NodeId& query, std::size_t k,
                 const std::set<std::string>& filter, int workers) {
  if (workers <= 1) return knn_serial(emb, query, k, filter);
  const auto q = emb.require(query);
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be at least 1");
  const auto n = static_cast<std::int64_t>(emb.size());
  std::vector<double> sim(emb.size());
  std::vector<char> valid(emb.size(), 0);
#pragma omp parallel for num_threads(workers) schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto row = static_cast<std::size_t>(i);
    if (row == q || !passes(emb, row, filter)) continue;
    if (const auto s = try_cosine(emb.input(q), emb.input(row))) {
      sim[row] = *s;
      valid[row] = 1;
    }
  }
  std::vector<Neighbor> scored;
  for (std::size_t i = 0; i < emb.size(); ++i) {
    if (valid[i]) scored.push_back({emb.vocabulary()[i], sim[i]});
  }
  return select_top(query, std::move(scored), k);
}

// --- comfort prediction -------------------------------------------------

OneHot one_hot(Comfort c) {
  OneHot v{0, 0, 0};
  v[static_cast<std::size_t>(c)] = 1;
  return v;
}

std::optional<Comfort> parse_comfort(std::string_view token) {
  if (token == "comfortable") return Comfort::Comfortable;
  if (token == "uncomfortable") return Comfort::Uncomfortable;
  if (token == "neutral") return Comfort::Neutral;
  return std::nullopt;
}

std::string_view comfort_name(Comfort c) {
  switch (c) {
    case Comfort::Comfortable: return "comfortable";
    case Comfort::Uncomfortable: return "uncomfortable";
    case Comfort::Neutral: return "neutral";
  }
  return "neutral";
}

Comfort from_one_hot(const OneHot& v) {
  int ones = 0, at = 0;
  for (int i = 0; i < 3; ++i) {
    if (v[i] == 1) {
      ++ones;
      at = i;
    } else if (v[i] != 0) {
      ones = -1;
      break;
    }
  }
  if (ones != 1) throw Error(Errc::InvalidArgument, "not a one-hot comfort vector");
  return static_cast<Comfort>(at);
}

OneHot predict_comfort(const EmbeddingMatrix& emb, const std::vector<LabeledExample>& labeled,
                       const NodeId& query, std::size_t k) {
  const auto q = emb.require(query);
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be at least 1");

  // One entry per labeled node; a repeated node keeps its last label.
  std::map<NodeId, Comfort> labels;
  for (const auto& ex : labeled) {
    if (emb.index_of(ex.node)) labels[ex.node] = ex.label;
  }
  std::vector<std::pair<Neighbor, Comfort>> scored;
  for (const auto& [node, label] : labels) {
    if (const auto s = try_cosine(emb.input(q), emb.input(*emb.index_of(node)))) {
      scored.push_back({{node, *s}, label});
    }
  }
  if (scored.empty()) throw Error(Errc::NoLabeledExamples, "no labeled example is usable for prediction");
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return better(a.first, b.first); });
  scored.resize(std::min(k, scored.size()));

  std::array<int, 3> votes{};
  std::array<double, 3> weight{};
  for (const auto& [nb, label] : scored) {
    ++votes[static_cast<std::size_t>(label)];
    weight[static_cast<std::size_t>(label)] += nb.similarity;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < 3; ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && weight[c] > weight[best])) best = c;
  }
  return one_hot(static_cast<Comfort>(best));
}

std::vector<LabeledExample> read_labels(const std::filesystem::path& path) {
  const auto table = read_csv(path);
  const auto node_col = table.column("node_id");
  const auto label_col = table.column("label");
  if (!node_col || !label_col) {
    throw Error(Errc::FormatError, "labels CSV needs node_id and label columns");
  }
  std::vector<LabeledExample> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto line = table.row_lines[r];
    if (row.size() <= std::max(*node_col, *label_col)) {
      throw Error(Errc::FormatError, "missing field in labels row", line, 1);
    }
    const auto id = NodeId::try_parse(row[*node_col]);
    if (!id) throw Error(Errc::FormatError, "bad node id '" + row[*node_col] + "'", line, 1);
    const auto c = parse_comfort(row[*label_col]);
    if (!c) throw Error(Errc::FormatError, "unknown comfort label '" + row[*label_col] + "'", line, 1);
    out.push_back({*id, *c});
  }
  return out;
}

// --- projector export ---------------------------------------------------

void export_projector(const EmbeddingMatrix& emb, const PropertyGraph* graph,
                      const std::filesystem::path& out_dir) {
  std::string vectors, metadata = "node_id\tlabel\tifc_type\n";
  for (std::size_t i = 0; i < emb.size(); ++i) {
    const auto& id = emb.vocabulary()[i];
    const auto row = emb.input(i);
    for (std::size_t d = 0; d < row.size(); ++d) {
      if (d) vectors += '\t';
      vectors += format_float(row[d]);
    }
    vectors += '\n';
    const Node* node = graph ? graph->find(id) : nullptr;
    const std::string& label = node ? node->label : emb.labels()[i];
    metadata += id.str() + '\t' + label + '\t' + (id.kind() == NodeKind::Ifc ? label : "") + '\n';
  }
  try {
    std::filesystem::create_directories(out_dir);
  } catch (const std::filesystem::filesystem_error& e) {
    throw Error(Errc::IoFailure, e.what());
  }
  write_file_atomic(out_dir / "vectors.tsv", vectors);
  write_file_atomic(out_dir / "metadata.tsv", metadata);
}

std::vector<std::vector<double>> import_vectors_tsv(const std::filesystem::path& path) {
  const auto text = read_file(path);
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto& row = rows.emplace_back();
    for (auto field : split(line, '\t')) {
      const auto v = parse_double(trim(field));
      if (!v) throw Error(Errc::FormatError, "bad number in vectors file", line_no, 1);
      row.push_back(*v);
    }
    if (row.size() != rows.front().size()) {
      throw Error(Errc::FormatError, "ragged row in vectors file", line_no, 1);
    }
  }
  return rows;
}

}  // namespace b2v
