#include <doctest.h>

#include <string>
#include <vector>

#include "refcheck/validate.hpp"

using namespace refcheck;
using val::ErrorKind;
using val::ValidateOptions;
using val::ValidationError;

namespace {

const char* kSchema = R"(
type guid: string("[A-F\\d]{8,8}-[A-F\\d]{4,4}-[A-F\\d]{4,4}-[A-F\\d]{4,4}-[A-F\\d]{12,12}")

type user: void {
  .uid: guid
  .name: string
  .age: int(age>18)
}

type user_ref: user

type posts: void { .post*: post_type }
type post_type: void {
  .pid: guid
  .owner: guid
  .content: string
}

type opt_box: void { .x?: int }
type id: guid | int
type just_int: int
type meters: int(m>0) { .unit: string }
)";

const char* kGuid = "21EC2020-3AEA-4069-A2DD-08002B30309D";

struct Fixture {
  lang::ResolvedProgram rp = lang::resolve(lang::parse_program(kSchema));

  std::vector<ValidationError> run(const std::string& type, const std::string& json,
                                   ValidateOptions opts = {}) {
    const auto* decl = rp.find_type(type);
    REQUIRE(decl != nullptr);
    return val::validate(val::parse_json_value(json), *decl->body, rp, opts);
  }
};

std::string user_json(const std::string& uid, const std::string& name, long age) {
  return "{\"uid\":\"" + uid + "\",\"name\":\"" + name + "\",\"age\":" + std::to_string(age) +
         "}";
}

}  // namespace

TEST_CASE("valid user passes") {
  Fixture f;
  CHECK(f.run("user", user_json(kGuid, "Ada", 30)).empty());
  // through a named alias too
  CHECK(f.run("user_ref", user_json(kGuid, "Ada", 30)).empty());
}

TEST_CASE("strict predicate bound") {
  Fixture f;
  auto errs = f.run("user", user_json(kGuid, "Ada", 18));
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].kind == ErrorKind::PredicateViolation);
  CHECK(val::path_string(errs[0].path) == ".age");
  CHECK(errs[0].expected == "age>18");
  CHECK(errs[0].found == "18");
  CHECK(f.run("user", user_json(kGuid, "Ada", 19)).empty());
}

TEST_CASE("regex violation and missing field together") {
  Fixture f;
  auto errs = f.run("user", R"({"uid":"not-a-guid","age":30})");
  REQUIRE(errs.size() == 2);
  CHECK(errs[0].kind == ErrorKind::RegexViolation);
  CHECK(val::path_string(errs[0].path) == ".uid");
  CHECK(errs[0].found == "not-a-guid");
  CHECK(errs[1].kind == ErrorKind::MissingField);
  CHECK(val::path_string(errs[1].path) == ".name");
  CHECK(errs[1].expected == "[1,1]");
}

TEST_CASE("basic kind mismatch") {
  Fixture f;
  auto errs = f.run("user", R"({"uid":")" + std::string(kGuid) +
                                R"(","name":"Ada","age":"thirty"})");
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].kind == ErrorKind::BasicKindMismatch);
  CHECK(errs[0].expected == "int");
  CHECK(errs[0].found == "string");
  CHECK(val::path_string(errs[0].path) == ".age");
}

TEST_CASE("closed world by default, open world on request") {
  Fixture f;
  std::string json = R"({"uid":")" + std::string(kGuid) +
                     R"(","name":"Ada","age":30,"mood":"fine"})";
  auto errs = f.run("user", json);
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].kind == ErrorKind::UnexpectedField);
  CHECK(val::path_string(errs[0].path) == ".mood");

  ValidateOptions open;
  open.openWorld = true;
  CHECK(f.run("user", json, open).empty());
}

TEST_CASE("cardinalities") {
  Fixture f;
  CHECK(f.run("opt_box", R"({})").empty());
  CHECK(f.run("opt_box", R"({"x":1})").empty());
  auto errs = f.run("opt_box", R"({"x":[1,2]})");
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].kind == ErrorKind::CardinalityViolation);
  CHECK(errs[0].expected == "[0,1]");
  CHECK(errs[0].found == "2");

  CHECK(f.run("posts", R"({})").empty());
  CHECK(f.run("posts", "{\"post\":[" +
                           ("{\"pid\":\"" + std::string(kGuid) + "\",\"owner\":\"" + kGuid +
                            "\",\"content\":\"hi\"}") +
                           "]}")
            .empty());
}

TEST_CASE("paths index repeated fields") {
  Fixture f;
  std::string good = "{\"pid\":\"" + std::string(kGuid) + "\",\"owner\":\"" + kGuid +
                     "\",\"content\":\"hi\"}";
  std::string bad = "{\"pid\":\"oops\",\"owner\":\"" + std::string(kGuid) +
                    "\",\"content\":\"hi\"}";
  auto errs = f.run("posts", "{\"post\":[" + good + "," + bad + "]}");
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].kind == ErrorKind::RegexViolation);
  CHECK(val::path_string(errs[0].path) == ".post[1].pid");
  CHECK(val::json_pointer(errs[0].path) == "/post/1/pid");
}

TEST_CASE("choice accepts any alternative") {
  Fixture f;
  CHECK(f.run("id", "\"" + std::string(kGuid) + "\"").empty());
  CHECK(f.run("id", "5").empty());

  auto errs = f.run("id", "\"zz\"");
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].kind == ErrorKind::NoChoiceBranch);
  REQUIRE(errs[0].alternatives.size() == 2);
  CHECK(errs[0].alternatives[0].find("guid") == 0);
  CHECK(errs[0].alternatives[1].find("int") == 0);
}

TEST_CASE("choice law on a value sample") {
  // id = guid | int, so acceptance must track the disjunction exactly
  Fixture f;
  const auto* guid = f.rp.find_type("guid");
  const auto* just_int = f.rp.find_type("just_int");
  const auto* either = f.rp.find_type("id");
  REQUIRE((guid && just_int && either));
  for (const char* json :
       {"\"21EC2020-3AEA-4069-A2DD-08002B30309D\"", "5", "-5", "true", "\"zz\"", "null",
        "3.5"}) {
    auto v = val::parse_json_value(json);
    bool inGuid = val::validate(v, *guid->body, f.rp).empty();
    bool inInt = val::validate(v, *just_int->body, f.rp).empty();
    bool inEither = val::validate(v, *either->body, f.rp).empty();
    INFO(json);
    CHECK(inEither == (inGuid || inInt));
  }
}

TEST_CASE("root scalar convention validates") {
  Fixture f;
  CHECK(f.run("meters", R"({"$":5,"unit":"m"})").empty());
  auto errs = f.run("meters", R"({"$":0,"unit":"m"})");
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].kind == ErrorKind::PredicateViolation);
  CHECK(val::path_string(errs[0].path) == "$");
  CHECK(val::json_pointer(errs[0].path).empty());
}

TEST_CASE("root kind mismatch reports at the root") {
  Fixture f;
  auto errs = f.run("guid", "5");
  REQUIRE(errs.size() == 1);
  CHECK(errs[0].kind == ErrorKind::BasicKindMismatch);
  CHECK(val::path_string(errs[0].path) == "$");
}

TEST_CASE("error list is capped") {
  Fixture f;
  std::string json = "{";
  for (int i = 0; i < 300; ++i) {
    if (i) json += ",";
    json += "\"k" + std::to_string(i) + "\":1";
  }
  json += "}";
  auto errs = f.run("opt_box", json);
  CHECK(errs.size() == 256);
}

TEST_CASE("json rendering") {
  Fixture f;
  auto errs = f.run("user", user_json(kGuid, "Ada", 18));
  std::string out = val::errors_to_json(errs);
  CHECK(out.find("\"path\": \".age\"") != std::string::npos);
  CHECK(out.find("\"pointer\": \"/age\"") != std::string::npos);
  CHECK(out.find("\"kind\": \"predicate-violation\"") != std::string::npos);
  CHECK(out.find("\"expected\": \"age>18\"") != std::string::npos);
  CHECK(val::errors_to_json({}) == "[]");
}

TEST_CASE("refined acceptance implies base acceptance") {
  // weakening on hand-built pairs; the generated-pair version lives in
  // the acceptance suite
  auto refined = lang::resolve(lang::parse_program(
      "type t: void { .a: int(a>0) .b: string(\"[A-F]{2,2}\") }"));
  auto erased = lang::resolve(lang::parse_program("type t: void { .a: int .b: string }"));
  for (const char* json : {R"({"a":1,"b":"AF"})", R"({"a":7,"b":"BB"})"}) {
    auto v = val::parse_json_value(json);
    CHECK(val::validate(v, *refined.find_type("t")->body, refined).empty());
    CHECK(val::validate(v, *erased.find_type("t")->body, erased).empty());
  }
}
