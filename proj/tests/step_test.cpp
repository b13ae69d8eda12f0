#include <filesystem>
#include <string>

#include "b2v/error.hpp"
#include "b2v/step.hpp"
#include "b2v/text.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace b2v;
using namespace b2v::step;

namespace {

const char* kMinimal =
    "ISO-10303-21; HEADER; FILE_DESCRIPTION((''),'2;1'); ENDSEC; DATA; "
    "#1=IFCWALL('g',$,'W1',$,$,$,$,$); ENDSEC; END-ISO-10303-21;";

std::string wrap_data(const std::string& records) {
  return "ISO-10303-21;\nHEADER;\nENDSEC;\nDATA;\n" + records + "\nENDSEC;\nEND-ISO-10303-21;\n";
}

Errc error_code_of(const std::string& text) {
  try {
    parse_step(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected parse failure");
  return Errc::InvariantViolation;
}

}  // namespace

TEST_CASE("parse_step reads a single wall record") {
  const auto m = parse_step(kMinimal);
  REQUIRE(m.size() == 1);
  const auto* e = m.find(1);
  REQUIRE(e != nullptr);
  CHECK(e->type_name == "IFCWALL");
  REQUIRE(e->attributes.size() == 8);
  CHECK(e->attributes[0] == StepValue(std::string("g")));
  CHECK(e->attributes[1].is<Null>());
  CHECK(e->attributes[2].as<std::string>() == "W1");
  CHECK(m.header().size() == 1);
  CHECK(m.header()[0].name == "FILE_DESCRIPTION");
}

TEST_CASE("empty DATA section yields an empty model") {
  CHECK(parse_step(wrap_data("")).empty());
}

TEST_CASE("aggregate, enumeration and real values") {
  const auto m = parse_step(wrap_data("#2=IFCDOOR(('a',#3),.T.,1.5E0);"));
  const auto& attrs = m.find(2)->attributes;
  REQUIRE(attrs.size() == 3);
  const auto& agg = attrs[0].as<Aggregate>();
  REQUIRE(agg.size() == 2);
  CHECK(agg[0].as<std::string>() == "a");
  CHECK(agg[1].as<EntityRef>().id == 3);
  CHECK(attrs[1].as<Enumeration>().token == "T");
  CHECK(attrs[2].as<double>() == 1.5);
}

TEST_CASE("value zoo fixture") {
  const auto m = parse_step_file(fixture_path("value_zoo.ifc"));
  CHECK(m.size() == 7);
  CHECK_FALSE(m.contains(40));

  const auto* wall = m.find(3);
  REQUIRE(wall);
  CHECK(wall->type_name == "IFCWALL");  // lower-case input normalized
  CHECK(wall->attributes[2].as<std::string>() == "It's a wall");
  CHECK(wall->attributes[3].as<std::string>() == "multi-line\nrecord");

  const auto& point = m.find(5)->attributes[0].as<Aggregate>();
  CHECK(point[0].as<double>() == 0.0);
  CHECK(point[1].as<double>() == -2.5);
  CHECK(point[2].as<double>() == doctest::Approx(1e-3));

  const auto& prop = m.find(6)->attributes;
  CHECK(prop[0].as<std::string>() == "Name\\X\\E9");  // escapes pass through verbatim
  const auto& typed = prop[2].as<TypedValue>();
  CHECK(typed.type_name == "IFCLABEL");
  CHECK(typed.value().as<std::string>() == "semi;colon");
  CHECK(prop[3].is<Derived>());

  const auto& zoo = m.find(8)->attributes;
  const auto& nested = zoo[0].as<Aggregate>();
  CHECK(nested[1].as<Aggregate>()[1].as<Aggregate>()[1].as<std::int64_t>() == 5);
  CHECK(zoo[1].as<Aggregate>().empty());
  CHECK(zoo[2].as<std::int64_t>() == -42);
  CHECK(zoo[3].as<std::int64_t>() == 7);
  CHECK(zoo[4].as<std::string>() == "0FF");
  CHECK(zoo[5].as<TypedValue>().value().as<Enumeration>().token == "F");

  const auto& big = m.find(9)->attributes;
  CHECK(big[0].as<std::string>() == "back\\\\slash and \\S\\e");
  CHECK(big[2].as<double>() == 1.2345678901234567e300);
}

TEST_CASE("malformed files are rejected with the right category") {
  CHECK(error_code_of("HEADER; ENDSEC; DATA; ENDSEC; END-ISO-10303-21;") == Errc::MalformedFile);
  CHECK(error_code_of("ISO-10303-21; HEADER; ENDSEC; END-ISO-10303-21;") == Errc::MalformedFile);
  CHECK(error_code_of("ISO-10303-21; HEADER; ENDSEC; DATA; ENDSEC;") == Errc::MalformedFile);
  CHECK(error_code_of(wrap_data("#1=IFCWALL('a',$;")) == Errc::SyntaxError);
  CHECK(error_code_of(wrap_data("#1=IFCWALL('a,$);")) == Errc::SyntaxError);
  CHECK(error_code_of(wrap_data("#1=IFCWALL(1);\n#1=IFCDOOR(2);")) == Errc::DuplicateId);
  CHECK(error_code_of(wrap_data("#0=IFCWALL(1);")) == Errc::SyntaxError);
  CHECK(error_code_of(wrap_data("#1=IFCWALL(#0);")) == Errc::SyntaxError);
}

TEST_CASE("syntax errors carry 1-based line and column") {
  const std::string text = wrap_data("#1=IFCWALL('ok');\n#2=IFCWALL('never closed);");
  try {
    parse_step(text);
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SyntaxError);
    CHECK(e.line() == 6);
    CHECK(e.column() == 12);
  }
  try {
    parse_step(wrap_data("#1=IFCWALL((1,2);"));
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::SyntaxError);
    CHECK(e.line() == 5);
  }
}

TEST_CASE("validate_references reports dangling pairs in order") {
  CHECK(validate_references(parse_step(wrap_data("#1=A(#2);\n#2=B($);"))).empty());
  CHECK(validate_references(parse_step(wrap_data("#1=A(#9);"))) ==
        std::vector<DanglingRef>{{1, 9}});
  CHECK(validate_references(parse_step(wrap_data("#2=A(#9);\n#1=A((#9));"))) ==
        std::vector<DanglingRef>{{1, 9}, {2, 9}});
  CHECK(validate_references(parse_step_file(fixture_path("dangling.ifc"))) ==
        std::vector<DanglingRef>{{11, 9}, {12, 9}, {12, 8}});
}

TEST_CASE("entities_of_type sorts by id and ignores case") {
  const auto m = parse_step(wrap_data("#3=IFCWALL();\n#7=IFCWALL();\n#2=IFCDOOR();\n#5=IfcWall();"));
  const auto walls = entities_of_type(m, "ifcwall");
  REQUIRE(walls.size() == 3);
  CHECK(walls[0]->id == 3);
  CHECK(walls[1]->id == 5);
  CHECK(walls[2]->id == 7);
  CHECK(entities_of_type(m, "IFCDOOR").size() == 1);
  CHECK(entities_of_type(parse_step(wrap_data("")), "IFCSPACE").empty());
}

TEST_CASE("fixture corpus: record count matches an independent scanner and round-trips") {
  for (const auto& path : step_fixtures()) {
    CAPTURE(path.string());
    const auto text = read_file(path);
    const auto model = parse_step(text);
    CHECK(model.size() == count_step_records(text));

    const auto again = parse_step(write_step(model));
    CHECK(again.entities() == model.entities());
    CHECK(again.header() == model.header());
    CHECK(write_step(again) == write_step(model));
    // deterministic
    CHECK(parse_step(text).entities() == model.entities());
  }
}

TEST_CASE("reals keep a decimal point when written") {
  CHECK(write_value(StepValue(3.0)) == "3.");
  CHECK(write_value(StepValue(1e300)) == "1.E+300");
  CHECK(write_value(StepValue(std::int64_t{3})) == "3");
  CHECK(write_value(StepValue(std::string("it's"))) == "'it''s'");
  CHECK(parse_step(wrap_data("#1=X(" + write_value(StepValue(0.1)) + ");"))
            .find(1)
            ->attributes[0]
            .as<double>() == 0.1);
}
