#pragma once

// Reader/writer for the ISO 10303-21 clear-text encoding used by .ifc files.
//
// The parser accepts the full value grammar (integers, reals, strings,
// enumerations, references, typed values, nested aggregates, `$` and `*`)
// without checking anything against an EXPRESS schema. Type names are
// matched case-insensitively and stored upper-case.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace b2v::step {

using EntityId = std::int64_t;

struct StepValue;

struct Null {
  bool operator==(const Null&) const = default;
};
struct Derived {
  bool operator==(const Derived&) const = default;
};
struct Enumeration {
  std::string token;  // without the surrounding dots
  bool operator==(const Enumeration&) const = default;
};
struct EntityRef {
  EntityId id = 0;
  bool operator==(const EntityRef&) const = default;
};
using Aggregate = std::vector<StepValue>;
/// `IFCLABEL('x')`: a type name wrapping exactly one value.
struct TypedValue {
  std::string type_name;
  std::vector<StepValue> inner;  // size 1
  const StepValue& value() const { return inner.front(); }
};

struct StepValue {
  std::variant<Null, Derived, std::int64_t, double, std::string, Enumeration, EntityRef,
               TypedValue, Aggregate>
      data;

  StepValue() = default;
  template <typename T>
  StepValue(T v) : data(std::move(v)) {}  // NOLINT(google-explicit-constructor)

  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(data);
  }
  template <typename T>
  const T& as() const {
    return std::get<T>(data);
  }
  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&data);
  }
};

bool operator==(const StepValue& a, const StepValue& b);
bool operator==(const TypedValue& a, const TypedValue& b);

TypedValue make_typed(std::string type_name, StepValue value);

struct StepEntity {
  EntityId id = 0;
  std::string type_name;
  std::vector<StepValue> attributes;

  bool operator==(const StepEntity&) const = default;
};

struct HeaderRecord {
  std::string name;
  std::vector<StepValue> attributes;

  bool operator==(const HeaderRecord&) const = default;
};

class StepModel {
 public:
  using EntityMap = std::map<EntityId, StepEntity>;

  const std::vector<HeaderRecord>& header() const { return header_; }
  const EntityMap& entities() const { return entities_; }
  std::size_t size() const { return entities_.size(); }
  bool empty() const { return entities_.empty(); }

  const StepEntity* find(EntityId id) const;
  bool contains(EntityId id) const { return entities_.count(id) != 0; }

  void add_header(HeaderRecord record) { header_.push_back(std::move(record)); }
  /// Throws Errc::DuplicateId when `entity.id` is taken.
  void add(StepEntity entity);

 private:
  std::vector<HeaderRecord> header_;
  EntityMap entities_;
};

StepModel parse_step(std::string_view text);
StepModel parse_step_file(const std::filesystem::path& path);

/// Serializes back to a STEP file that `parse_step` reads into an equal model.
std::string write_step(const StepModel& model);
std::string write_value(const StepValue& value);

struct DanglingRef {
  EntityId from = 0;
  EntityId missing = 0;
  bool operator==(const DanglingRef&) const = default;
};

/// Every unresolved reference, ordered by referencing id then attribute order.
std::vector<DanglingRef> validate_references(const StepModel& model);

/// Entities whose type matches `type_name` (any case), ascending id.
std::vector<const StepEntity*> entities_of_type(const StepModel& model, std::string_view type_name);

/// Appends every entity id referenced anywhere inside `value`.
void collect_references(const StepValue& value, std::vector<EntityId>& out);

std::string to_upper(std::string_view s);

}  // namespace b2v::step
