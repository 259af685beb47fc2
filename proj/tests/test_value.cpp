#include <doctest.h>

#include <optional>
#include <string>

#include "refcheck/value.hpp"

using namespace refcheck;
using val::parse_json_value;
using val::ValueTree;

namespace {

std::optional<Diagnostic> json_error(const std::string& text, int depth = 64) {
  try {
    parse_json_value(text, depth);
  } catch (const CompileError& e) {
    return e.first();
  }
  return std::nullopt;
}

std::string nested(int depth) {
  std::string out;
  for (int i = 0; i < depth; ++i) out += "{\"a\":";
  out += "1";
  for (int i = 0; i < depth; ++i) out += "}";
  return out;
}

}  // namespace

TEST_CASE("scalars decode to childless roots") {
  auto s = parse_json_value("\"hello\"");
  REQUIRE(std::holds_alternative<std::string>(s.root));
  CHECK(std::get<std::string>(s.root) == "hello");
  CHECK(s.children.empty());

  CHECK(std::get<std::int64_t>(parse_json_value("5").root) == 5);
  CHECK(std::get<std::int64_t>(parse_json_value("-3").root) == -3);
  CHECK(std::get<bool>(parse_json_value("true").root) == true);
  CHECK(std::holds_alternative<ValueTree::Void>(parse_json_value("null").root));
  CHECK(std::get<double>(parse_json_value("3.5").root) == doctest::Approx(3.5));
  // exponent notation always lands on double, even when integral
  CHECK(std::get<double>(parse_json_value("1e2").root) == doctest::Approx(100.0));
}

TEST_CASE("kind_name") {
  CHECK(val::kind_name(parse_json_value("null").root) == "void");
  CHECK(val::kind_name(parse_json_value("false").root) == "bool");
  CHECK(val::kind_name(parse_json_value("7").root) == "int");
  CHECK(val::kind_name(parse_json_value("7.5").root) == "double");
  CHECK(val::kind_name(parse_json_value("\"x\"").root) == "string");
}

TEST_CASE("objects keep field order") {
  auto v = parse_json_value(
      R"({"uid":"21EC2020-3AEA-4069-A2DD-08002B30309D","name":"Ada","age":30})");
  CHECK(std::holds_alternative<ValueTree::Void>(v.root));
  REQUIRE(v.children.size() == 3);
  CHECK(v.children[0].name == "uid");
  CHECK(v.children[1].name == "name");
  CHECK(v.children[2].name == "age");
  REQUIRE(v.children[2].values.size() == 1);
  CHECK(std::get<std::int64_t>(v.children[2].values[0].root) == 30);
  CHECK(v.find("name") == &v.children[1]);
  CHECK(v.find("nope") == nullptr);
}

TEST_CASE("the reserved key sets the node's own root") {
  auto v = parse_json_value(R"({"$":5,"unit":"m"})");
  CHECK(std::get<std::int64_t>(v.root) == 5);
  REQUIRE(v.children.size() == 1);
  CHECK(v.children[0].name == "unit");
  CHECK(std::get<std::string>(v.children[0].values[0].root) == "m");

  // position inside the object does not matter
  auto w = parse_json_value(R"({"unit":"m","$":5})");
  CHECK(std::get<std::int64_t>(w.root) == 5);
  REQUIRE(w.children.size() == 1);
}

TEST_CASE("arrays repeat the field") {
  auto v = parse_json_value(R"({"post":[{"pid":"A"},{"pid":"B"}]})");
  REQUIRE(v.children.size() == 1);
  REQUIRE(v.children[0].values.size() == 2);
  CHECK(std::get<std::string>(v.children[0].values[1].children[0].values[0].root) == "B");

  // empty array is the same as no field at all
  CHECK(parse_json_value(R"({"post":[]})").children.empty());
}

TEST_CASE("repeated keys extend the occurrence list") {
  auto v = parse_json_value(R"({"a":1,"a":2})");
  REQUIRE(v.children.size() == 1);
  REQUIRE(v.children[0].values.size() == 2);
  CHECK(std::get<std::int64_t>(v.children[0].values[0].root) == 1);
  CHECK(std::get<std::int64_t>(v.children[0].values[1].root) == 2);

  auto w = parse_json_value(R"({"a":[1],"a":2})");
  REQUIRE(w.children.size() == 1);
  CHECK(w.children[0].values.size() == 2);
}

TEST_CASE("integer boundaries") {
  CHECK(std::get<std::int64_t>(parse_json_value("9223372036854775807").root) ==
        INT64_MAX);
  CHECK(std::get<std::int64_t>(parse_json_value("-9223372036854775808").root) ==
        INT64_MIN);
  // one past the signed range falls back to double
  CHECK(std::holds_alternative<double>(parse_json_value("9223372036854775808").root));
  CHECK(std::holds_alternative<double>(parse_json_value("18446744073709551615").root));
}

TEST_CASE("malformed documents are rejected") {
  auto e = json_error("{");
  REQUIRE(e);
  CHECK(e->kind == ErrKind::JsonSyntaxError);
  CHECK(json_error("1 2"));
  CHECK(json_error("{\"a\":}"));
  CHECK(json_error("\"\xFF\""));
  CHECK_FALSE(json_error("  {\"a\": 1}  "));
}

TEST_CASE("arrays only live under object keys") {
  auto top = json_error("[1,2]");
  REQUIRE(top);
  CHECK(top->kind == ErrKind::JsonSyntaxError);
  CHECK(json_error(R"({"a":[[1]]})"));
}

TEST_CASE("the reserved key takes scalars only") {
  CHECK(json_error(R"({"$":{"x":1}})"));
  CHECK(json_error(R"({"$":[1]})"));
  CHECK_FALSE(json_error(R"({"$":null})"));
}

TEST_CASE("nesting limit") {
  auto e = json_error(nested(3), 2);
  REQUIRE(e);
  CHECK(e->kind == ErrKind::NestingTooDeep);
  CHECK_FALSE(json_error(nested(2), 2));
  // arrays count as a level too
  CHECK(json_error(R"({"a":[{"b":1}]})", 2));

  CHECK_FALSE(json_error(nested(64)));
  CHECK(json_error(nested(65)));
}
