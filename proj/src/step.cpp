#include "b2v/step.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "b2v/error.hpp"

namespace b2v::step {

bool operator==(const TypedValue& a, const TypedValue& b) {
  return a.type_name == b.type_name && a.inner == b.inner;
}

bool operator==(const StepValue& a, const StepValue& b) { return a.data == b.data; }

TypedValue make_typed(std::string type_name, StepValue value) {
  TypedValue t;
  t.type_name = std::move(type_name);
  t.inner.push_back(std::move(value));
  return t;
}

std::string to_upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

const StepEntity* StepModel::find(EntityId id) const {
  auto it = entities_.find(id);
  return it == entities_.end() ? nullptr : &it->second;
}

void StepModel::add(StepEntity entity) {
  const auto id = entity.id;
  auto [it, inserted] = entities_.try_emplace(id, std::move(entity));
  if (!inserted) throw Error(Errc::DuplicateId, "entity #" + std::to_string(id) + " defined twice");
}

namespace {

bool is_keyword_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

bool valid_type_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
         });
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  StepModel run() {
    StepModel model;
    skip_blank();
    if (!accept_keyword("ISO-10303-21")) {
      throw Error(Errc::MalformedFile, "missing ISO-10303-21 sentinel", line_, col_);
    }
    expect(';');

    skip_blank();
    if (accept_keyword("HEADER")) {
      expect(';');
      while (true) {
        skip_blank();
        if (accept_keyword("ENDSEC")) {
          expect(';');
          break;
        }
        if (at_end()) throw syntax("unterminated HEADER section");
        HeaderRecord rec;
        rec.name = to_upper(read_keyword());
        expect('(');
        rec.attributes = read_list_body();
        expect(';');
        model.add_header(std::move(rec));
      }
    }

    bool saw_data = false;
    while (true) {
      skip_blank();
      const auto kw_line = line_;
      const auto kw_col = col_;
      if (at_end()) break;
      if (peek() == '#' || peek() == ';') throw syntax("record outside a DATA section");
      const std::string kw = to_upper(read_keyword());
      if (kw == "END-ISO-10303-21") {
        expect(';');
        if (!saw_data) throw Error(Errc::MalformedFile, "missing DATA section", kw_line, kw_col);
        skip_blank();
        if (!at_end()) throw syntax("content after END-ISO-10303-21");
        return model;
      }
      if (kw != "DATA") {
        throw Error(Errc::MalformedFile, "unexpected section '" + kw + "'", kw_line, kw_col);
      }
      saw_data = true;
      skip_blank();
      if (peek() == '(') {  // edition 3 section parameters
        advance();
        read_list_body();
      }
      expect(';');
      read_data_section(model);
    }
    if (!saw_data) throw Error(Errc::MalformedFile, "missing DATA section", line_, col_);
    throw Error(Errc::MalformedFile, "missing END-ISO-10303-21 sentinel", line_, col_);
  }

 private:
  void read_data_section(StepModel& model) {
    while (true) {
      skip_blank();
      if (at_end()) throw syntax("unterminated DATA section");
      if (peek() != '#') {
        const auto l = line_;
        const auto c = col_;
        const std::string kw = to_upper(read_keyword());
        if (kw == "ENDSEC") {
          expect(';');
          return;
        }
        throw Error(Errc::SyntaxError, "expected entity instance or ENDSEC, got '" + kw + "'", l, c);
      }
      const auto rec_line = line_;
      const auto rec_col = col_;
      advance();
      StepEntity entity;
      entity.id = read_entity_id();
      skip_blank();
      expect('=');
      skip_blank();
      if (peek() == '(') {
        throw syntax("complex entity instances are not supported");
      }
      entity.type_name = to_upper(read_keyword());
      if (!valid_type_name(entity.type_name)) {
        throw Error(Errc::SyntaxError, "invalid type name '" + entity.type_name + "'", rec_line,
                    rec_col);
      }
      expect('(');
      entity.attributes = read_list_body();
      expect(';');
      if (model.contains(entity.id)) {
        throw Error(Errc::DuplicateId, "entity #" + std::to_string(entity.id) + " defined twice",
                    rec_line, rec_col);
      }
      model.add(std::move(entity));
    }
  }

  // After an opening '(' has been consumed: values up to the matching ')'.
  std::vector<StepValue> read_list_body() {
    std::vector<StepValue> values;
    skip_blank();
    if (peek() == ')') {
      advance();
      return values;
    }
    while (true) {
      values.push_back(read_value());
      skip_blank();
      if (at_end()) throw syntax("unbalanced parentheses");
      const char c = peek();
      if (c == ',') {
        advance();
        continue;
      }
      if (c == ')') {
        advance();
        return values;
      }
      throw syntax(std::string("unexpected '") + c + "' in parameter list");
    }
  }

  StepValue read_value() {
    skip_blank();
    if (at_end()) throw syntax("unexpected end of input");
    const char c = peek();
    switch (c) {
      case '$':
        advance();
        return Null{};
      case '*':
        advance();
        return Derived{};
      case '\'':
        return read_string();
      case '"':
        return read_binary();
      case '.':
        return read_enum();
      case '#': {
        advance();
        return EntityRef{read_entity_id()};
      }
      case '(': {
        advance();
        return Aggregate(read_list_body());
      }
      default:
        break;
    }
    if (c == '+' || c == '-' || std::isdigit(static_cast<unsigned char>(c))) return read_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const auto l = line_;
      const auto col = col_;
      std::string name = to_upper(read_keyword());
      if (!valid_type_name(name)) {
        throw Error(Errc::SyntaxError, "invalid type name '" + name + "'", l, col);
      }
      skip_blank();
      expect('(');
      auto inner = read_list_body();
      if (inner.size() != 1) {
        throw Error(Errc::SyntaxError, "typed value " + name + " must wrap exactly one value", l,
                    col);
      }
      return make_typed(std::move(name), std::move(inner.front()));
    }
    throw syntax(std::string("unexpected character '") + c + "'");
  }

  StepValue read_string() {
    const auto l = line_;
    const auto c = col_;
    advance();  // opening quote
    std::string out;
    while (true) {
      if (at_end()) throw Error(Errc::SyntaxError, "unterminated string", l, c);
      const char ch = peek();
      advance();
      if (ch == '\'') {
        if (!at_end() && peek() == '\'') {
          advance();
          out.push_back('\'');
          continue;
        }
        return out;
      }
      out.push_back(ch);
    }
  }

  StepValue read_binary() {
    const auto l = line_;
    const auto c = col_;
    advance();
    std::string out;
    while (true) {
      if (at_end()) throw Error(Errc::SyntaxError, "unterminated binary literal", l, c);
      const char ch = peek();
      advance();
      if (ch == '"') return out;
      if (!std::isxdigit(static_cast<unsigned char>(ch))) {
        throw Error(Errc::SyntaxError, "non-hex digit in binary literal", line_, col_ - 1);
      }
      out.push_back(ch);
    }
  }

  StepValue read_enum() {
    const auto l = line_;
    const auto c = col_;
    advance();
    std::string token;
    while (!at_end() && peek() != '.') {
      const char ch = peek();
      if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_') {
        throw Error(Errc::SyntaxError, "invalid enumeration", l, c);
      }
      token.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));
      advance();
    }
    if (at_end()) throw Error(Errc::SyntaxError, "unterminated enumeration", l, c);
    advance();
    if (token.empty()) throw Error(Errc::SyntaxError, "empty enumeration", l, c);
    return Enumeration{std::move(token)};
  }

  StepValue read_number() {
    const auto l = line_;
    const auto c = col_;
    const std::size_t start = pos_;
    bool real = false;
    if (peek() == '+' || peek() == '-') advance();
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
    if (!at_end() && peek() == '.') {
      real = true;
      advance();
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
    }
    if (!at_end() && (peek() == 'E' || peek() == 'e')) {
      real = true;
      advance();
      if (!at_end() && (peek() == '+' || peek() == '-')) advance();
      while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
    }
    std::string lexeme(text_.substr(start, pos_ - start));
    if (!lexeme.empty() && lexeme.front() == '+') lexeme.erase(0, 1);
    if (lexeme.empty() || lexeme == "-") throw Error(Errc::SyntaxError, "invalid number", l, c);
    const char* first = lexeme.data();
    const char* last = lexeme.data() + lexeme.size();
    if (real) {
      // "1." and "1.E5" are valid STEP reals; give from_chars a digit after the point.
      std::string norm = lexeme;
      const auto dot = norm.find('.');
      if (dot != std::string::npos &&
          (dot + 1 == norm.size() || !std::isdigit(static_cast<unsigned char>(norm[dot + 1])))) {
        norm.insert(dot + 1, "0");
      }
      double v = 0;
      auto [p, ec] = std::from_chars(norm.data(), norm.data() + norm.size(), v);
      if (ec != std::errc() || p != norm.data() + norm.size()) {
        throw Error(Errc::SyntaxError, "invalid real '" + lexeme + "'", l, c);
      }
      return v;
    }
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) {
      throw Error(Errc::SyntaxError, "invalid integer '" + lexeme + "'", l, c);
    }
    return v;
  }

  EntityId read_entity_id() {
    const auto l = line_;
    const auto c = col_;
    const std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
    if (start == pos_) throw Error(Errc::SyntaxError, "expected entity id after '#'", l, c);
    EntityId id = 0;
    auto digits = text_.substr(start, pos_ - start);
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (ec != std::errc() || id <= 0) throw Error(Errc::SyntaxError, "invalid entity id", l, c);
    return id;
  }

  std::string read_keyword() {
    skip_blank();
    const std::size_t start = pos_;
    while (!at_end() && is_keyword_char(peek())) advance();
    if (start == pos_) {
      if (at_end()) throw syntax("unexpected end of input");
      throw syntax(std::string("expected keyword, got '") + peek() + "'");
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  bool accept_keyword(std::string_view kw) {
    if (text_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(text_[pos_ + i])) != kw[i]) return false;
    }
    if (pos_ + kw.size() < text_.size() && is_keyword_char(text_[pos_ + kw.size()])) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) advance();
    return true;
  }

  void expect(char c) {
    skip_blank();
    if (at_end()) throw syntax(std::string("expected '") + c + "' before end of input");
    if (peek() != c) {
      if (c == ')' || c == ';') throw syntax("unbalanced parentheses or missing ';'");
      throw syntax(std::string("expected '") + c + "', got '" + peek() + "'");
    }
    advance();
  }

  void skip_blank() {
    while (!at_end()) {
      const char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        const auto l = line_;
        const auto col = col_;
        advance();
        advance();
        while (true) {
          if (at_end()) throw Error(Errc::SyntaxError, "unterminated comment", l, col);
          if (peek() == '*' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
            advance();
            advance();
            break;
          }
          advance();
        }
      } else {
        break;
      }
    }
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  Error syntax(const std::string& what) const { return Error(Errc::SyntaxError, what, line_, col_); }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

void write_real(std::ostream& os, double v) {
  if (!std::isfinite(v)) throw Error(Errc::FormatError, "non-finite real cannot be written");
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, p);
  for (auto& ch : s) {
    if (ch == 'e') ch = 'E';
  }
  if (s.find('.') == std::string::npos) {
    const auto e = s.find('E');
    if (e == std::string::npos) {
      s.push_back('.');
    } else {
      s.insert(e, ".");
    }
  }
  os << s;
}

void write_value_to(std::ostream& os, const StepValue& value);

void write_list(std::ostream& os, const std::vector<StepValue>& values) {
  os << '(';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ',';
    write_value_to(os, values[i]);
  }
  os << ')';
}

struct ValueWriter {
  std::ostream& os;
  void operator()(const Null&) const { os << '$'; }
  void operator()(const Derived&) const { os << '*'; }
  void operator()(std::int64_t v) const { os << v; }
  void operator()(double v) const { write_real(os, v); }
  void operator()(const std::string& s) const {
    os << '\'';
    for (char c : s) {
      if (c == '\'') os << '\'';
      os << c;
    }
    os << '\'';
  }
  void operator()(const Enumeration& e) const { os << '.' << e.token << '.'; }
  void operator()(const EntityRef& r) const { os << '#' << r.id; }
  void operator()(const TypedValue& t) const {
    os << t.type_name;
    write_list(os, t.inner);
  }
  void operator()(const Aggregate& a) const { write_list(os, a); }
};

void write_value_to(std::ostream& os, const StepValue& value) {
  std::visit(ValueWriter{os}, value.data);
}

}  // namespace

StepModel parse_step(std::string_view text) { return Parser(text).run(); }

StepModel parse_step_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_step(ss.str());
}

std::string write_value(const StepValue& value) {
  std::ostringstream os;
  write_value_to(os, value);
  return os.str();
}

std::string write_step(const StepModel& model) {
  std::ostringstream os;
  os << "ISO-10303-21;\nHEADER;\n";
  for (const auto& rec : model.header()) {
    os << rec.name;
    write_list(os, rec.attributes);
    os << ";\n";
  }
  os << "ENDSEC;\nDATA;\n";
  for (const auto& [id, e] : model.entities()) {
    os << '#' << id << '=' << e.type_name;
    write_list(os, e.attributes);
    os << ";\n";
  }
  os << "ENDSEC;\nEND-ISO-10303-21;\n";
  return os.str();
}

void collect_references(const StepValue& value, std::vector<EntityId>& out) {
  if (const auto* r = value.get_if<EntityRef>()) {
    out.push_back(r->id);
  } else if (const auto* agg = value.get_if<Aggregate>()) {
    for (const auto& v : *agg) collect_references(v, out);
  } else if (const auto* t = value.get_if<TypedValue>()) {
    for (const auto& v : t->inner) collect_references(v, out);
  }
}

std::vector<DanglingRef> validate_references(const StepModel& model) {
  std::vector<DanglingRef> out;
  std::vector<EntityId> refs;
  for (const auto& [id, e] : model.entities()) {
    refs.clear();
    for (const auto& a : e.attributes) collect_references(a, refs);
    for (auto r : refs) {
      if (!model.contains(r)) out.push_back({id, r});
    }
  }
  return out;
}

std::vector<const StepEntity*> entities_of_type(const StepModel& model,
                                                std::string_view type_name) {
  const std::string wanted = to_upper(type_name);
  std::vector<const StepEntity*> out;
  for (const auto& [id, e] : model.entities()) {
    if (e.type_name == wanted) out.push_back(&e);
  }
  return out;
}

}  // namespace b2v::step
