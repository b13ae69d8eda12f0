#include "b2v/run_config.hpp"

#include <functional>
#include <limits>
#include <type_traits>

#include "b2v/error.hpp"
#include "b2v/text.hpp"

namespace b2v {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw Error(Errc::InvalidArgument, "config key '" + std::string(key) + "': '" + std::string(value) +
                                         "' is not " + std::string(want));
}

template <class T>
void parse_into(std::string_view key, std::string_view v, T& out) {
  if constexpr (std::is_same_v<T, std::string>) {
    out = std::string(v);
  } else if constexpr (std::is_same_v<T, bool>) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") {
      out = true;
    } else if (v == "false" || v == "0" || v == "no" || v == "off") {
      out = false;
    } else {
      bad_value(key, v, "a boolean");
    }
  } else if constexpr (std::is_same_v<T, double>) {
    const auto d = parse_double(v);
    if (!d || !std::isfinite(*d)) bad_value(key, v, "a number");
    out = *d;
  } else if constexpr (std::is_same_v<T, std::optional<double>>) {
    if (v.empty() || v == "auto") {
      out.reset();
    } else {
      double d = 0;
      parse_into(key, v, d);
      out = d;
    }
  } else if constexpr (std::is_same_v<T, Adjacency>) {
    if (v == "rook") {
      out = Adjacency::Rook;
    } else if (v == "queen") {
      out = Adjacency::Queen;
    } else {
      bad_value(key, v, "rook or queen");
    }
  } else if constexpr (std::is_signed_v<T>) {
    const auto i = parse_int(v);
    if (!i || *i < std::numeric_limits<T>::min() || *i > std::numeric_limits<T>::max()) {
      bad_value(key, v, "an integer in range");
    }
    out = static_cast<T>(*i);
  } else {
    const auto u = parse_uint(v);
    if (!u || *u > std::numeric_limits<T>::max()) bad_value(key, v, "a non-negative integer in range");
    out = static_cast<T>(*u);
  }
}

template <class T>
std::string format_value(const T& v) {
  if constexpr (std::is_same_v<T, std::string>) {
    return v;
  } else if constexpr (std::is_same_v<T, bool>) {
    return v ? "true" : "false";
  } else if constexpr (std::is_same_v<T, double>) {
    return format_double(v);
  } else if constexpr (std::is_same_v<T, std::optional<double>>) {
    return v ? format_double(*v) : "auto";
  } else if constexpr (std::is_same_v<T, Adjacency>) {
    return v == Adjacency::Queen ? "queen" : "rook";
  } else {
    return std::to_string(v);
  }
}

struct Field {
  std::string key;
  std::string help;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Access>
Field field(std::string key, std::string help, Access access) {
  return {key, std::move(help),
          [access, key](RunConfig& c, std::string_view v) { parse_into(key, v, access(c)); },
          [access](const RunConfig& c) { return format_value(access(const_cast<RunConfig&>(c))); }};
}

#define B2V_FIELD(key, help, expr) field(key, help, [](RunConfig& c) -> auto& { return expr; })

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      B2V_FIELD("ifc", "IFC STEP file", c.ifc),
      B2V_FIELD("footprints", "footprint sidecar JSON", c.footprints),
      B2V_FIELD("sensors", "sensor manifest CSV (sensor_id,space_id,x,y)", c.sensors),
      B2V_FIELD("graph", "graph text file or temporal store", c.graph),
      B2V_FIELD("readings", "sensor readings CSV (timestamp,sensor_id,channel,value)", c.readings),
      B2V_FIELD("fixes", "occupant fixes CSV (timestamp,occupant_id,space_id,x,y,feedback)", c.fixes),
      B2V_FIELD("checkpoint", "embedding checkpoint", c.checkpoint),
      B2V_FIELD("labels", "comfort labels CSV (node_id,label)", c.labels),
      B2V_FIELD("out", "output file", c.out),
      B2V_FIELD("export_dir", "directory for vectors.tsv and metadata.tsv", c.export_dir),
      B2V_FIELD("tensor_dir", "directory for manifest.json and tensor.csv", c.tensor_dir),
      B2V_FIELD("strict", "fail on dangling references and unplaceable nodes", c.strict),
      B2V_FIELD("cell_size", "grid cell edge length in meters", c.cell_size),
      B2V_FIELD("adjacency", "cell adjacency: rook or queen", c.adjacency),
      B2V_FIELD("sensor_radius", "sensor-to-cell radius in meters (auto = cell size)", c.sensor_radius),
      B2V_FIELD("anchor_radius", "door/window anchor radius in meters (auto = cell size)", c.anchor_radius),
      B2V_FIELD("step", "snapshot window in seconds", c.temporal.step),
      B2V_FIELD("occupant_radius", "occupant-to-cell radius in meters (auto = cell size)", c.temporal.occupant_radius),
      B2V_FIELD("max_gap", "windows an occupant is carried forward without a fix", c.temporal.max_gap),
      B2V_FIELD("flatten", "temporal projection: union or slice:N", c.flatten),
      B2V_FIELD("p", "walk return parameter", c.walk.p),
      B2V_FIELD("q", "walk in-out parameter", c.walk.q),
      B2V_FIELD("walk_length", "nodes per walk", c.walk.walk_length),
      B2V_FIELD("walks_per_node", "walks started from each node", c.walk.walks_per_node),
      B2V_FIELD("seed", "random seed for walks and training", c.walk.seed),
      B2V_FIELD("alias_entry_cap", "largest alias table size before linear-scan sampling", c.walk.alias_entry_cap),
      B2V_FIELD("dimension", "embedding dimension", c.train.dimension),
      B2V_FIELD("window", "skip-gram context window", c.train.window),
      B2V_FIELD("negatives", "negative samples per pair", c.train.negatives),
      B2V_FIELD("epochs", "training epochs", c.train.epochs),
      B2V_FIELD("initial_lr", "starting learning rate", c.train.initial_lr),
      B2V_FIELD("min_lr", "final learning rate", c.train.min_lr),
      B2V_FIELD("deterministic", "single-worker reproducible training", c.train.deterministic),
      B2V_FIELD("shrink_window", "sample the effective window per center", c.train.shrink_window),
      B2V_FIELD("subsample", "frequent-node subsampling threshold (0 = off)", c.train.subsample),
      B2V_FIELD("node", "query node id (e.g. cell:100:0:1, ifc:42, occ:1)", c.node),
      B2V_FIELD("k", "neighbors to return or vote", c.k),
      B2V_FIELD("filter", "comma-separated node labels to keep in query results", c.filter),
      B2V_FIELD("workers", "worker threads for walks, snapshots, scoring and non-deterministic training", c.workers),
  };
  return table;
}

#undef B2V_FIELD

const Field* find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

const Field& require_field(std::string_view key) {
  const auto* f = find_field(key);
  if (!f) throw Error(Errc::InvalidArgument, "unknown config key '" + std::string(key) + "'");
  return *f;
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) { require_field(key).set(*this, trim(value)); }

std::string RunConfig::get(std::string_view key) const { return require_field(key).get(*this); }

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> out = [] {
    std::vector<std::string> k;
    for (const auto& f : fields()) k.push_back(f.key);
    return k;
  }();
  return out;
}

std::string_view RunConfig::describe(std::string_view key) { return require_field(key).help; }

bool RunConfig::is_key(std::string_view key) { return find_field(key) != nullptr; }

void RunConfig::load_text(std::string_view text) {
  std::size_t line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::InvalidArgument, "expected 'key = value'", line_no, 1);
    }
    try {
      set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.code(), e.detail(), line_no, 1);
    }
  }
}

void RunConfig::load_file(const std::filesystem::path& path) { load_text(read_file(path)); }

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(*this) + "\n";
  return out;
}

void RunConfig::validate() const {
  if (!(cell_size > 0)) throw Error(Errc::InvalidArgument, "cell_size must be positive");
  for (const auto& r : {sensor_radius, anchor_radius}) {
    if (r && *r < 0) throw Error(Errc::InvalidArgument, "radii must be non-negative");
  }
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be at least 1");
  if (workers < 1) throw Error(Errc::InvalidArgument, "workers must be at least 1");
  FlattenMode::parse(flatten);
  temporal.validate();
  walk.validate();
  train.validate();
}

}  // namespace b2v
