#pragma once

// Flat key=value run configuration shared by every CLI command.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "b2v/sgns.hpp"
#include "b2v/space_grid.hpp"
#include "b2v/temporal.hpp"
#include "b2v/walks.hpp"

namespace b2v {

struct RunConfig {
  // Paths. Empty means unset.
  std::string ifc;
  std::string footprints;
  std::string sensors;
  std::string graph;
  std::string readings;
  std::string fixes;
  std::string checkpoint;
  std::string labels;
  std::string out;
  std::string export_dir;
  std::string tensor_dir;

  // Graph construction.
  bool strict = false;
  double cell_size = 1.0;
  Adjacency adjacency = Adjacency::Rook;
  std::optional<double> sensor_radius;  // cell size when unset
  std::optional<double> anchor_radius;  // cell size when unset

  TemporalConfig temporal;
  std::string flatten = "union";
  WalkConfig walk;
  TrainConfig train;

  // Queries.
  std::string node;
  std::size_t k = 10;
  std::string filter;  // comma-separated labels

  int workers = 1;

  /// Sets one key from its text form. Throws InvalidArgument for unknown
  /// keys and malformed values.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;
  /// Every key in a fixed order.
  static const std::vector<std::string>& keys();
  static std::string_view describe(std::string_view key);
  static bool is_key(std::string_view key);

  /// Applies `key = value` lines; `#` starts a comment. Errors carry the line.
  void load_text(std::string_view text);
  void load_file(const std::filesystem::path& path);
  /// All keys, one `key = value` per line; load_text() of it reproduces this.
  std::string to_text() const;

  void validate() const;
};

}  // namespace b2v
