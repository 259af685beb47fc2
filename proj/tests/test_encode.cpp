#include <doctest.h>

#include <string>

#include "refcheck/encode.hpp"

using namespace refcheck;
using enc::Encoded;
using enc::EncodeOptions;
using enc::ResidualCheck;
using enc::StaticPathError;
using enc::Vc;

namespace {

Encoded encode_source(const std::string& src, EncodeOptions opts = {}) {
  auto resolved = lang::resolve(lang::parse_program(src));
  return enc::encode(resolved, opts);
}

const char* kNewsBoard = R"(
type guid: string("[A-F\\d]{8,8}-[A-F\\d]{4,4}-[A-F\\d]{4,4}-[A-F\\d]{4,4}-[A-F\\d]{12,12}")
type user: void {
  .uid: guid
  .name: string
  .age: int(age>18)
}
type post_type: void {
  .pid: guid
  .owner: guid
  .content: string
}
type posts: void { .post*: post_type }

operation find_user_by_name(string)(user)
operation get_all_users_posts(guid)(posts)
operation all_posts_by_user(string)(posts)
operation all_posts_by_user2(string)(posts)

main {
  all_posts_by_user(name) {
    find_user_by_name@SelfOut(name)(user);
    get_all_users_posts@SelfOut(user.uid)(posts)
  }
  all_posts_by_user2(name) {
    find_user_by_name@SelfOut(name)(user);
    // wrong field: name is not a guid
    get_all_users_posts@SelfOut(user.name)(posts)
  }
}
)";

// Flattened text of the item holding the negated goal.
std::string goal_line(const Vc& vc) {
  for (auto it = vc.script.items.rbegin(); it != vc.script.items.rend(); ++it)
    if (const auto* s = std::get_if<smt::Sexp>(&*it))
      if (s->flat().rfind("(assert (not ", 0) == 0) return s->flat();
  return "";
}

bool script_has_line(const enc::SmtScript& script, const std::string& flat) {
  for (const auto& item : script.items)
    if (const auto* s = std::get_if<smt::Sexp>(&item))
      if (s->flat() == flat) return true;
  return false;
}

}  // namespace

TEST_CASE("prelude declares sorts, HasType and the boxed kinds") {
  std::string text = enc::encode_prelude().render();
  CHECK(text.find("(set-option :timeout 10000)") != std::string::npos);
  CHECK(text.find("(declare-sort Type 0)") != std::string::npos);
  CHECK(text.find("(declare-sort Term 0)") != std::string::npos);
  CHECK(text.find("(declare-fun HasType (Term Type) Bool)") != std::string::npos);
  // the string block, shaped like the classic boxing axioms
  CHECK(text.find("(declare-fun string () Type)\n"
                  "(declare-fun BoxString (String) Term)\n"
                  "(declare-fun string-term-val (Term) String)\n"
                  "(assert (forall ((v String)) (= (string-term-val (BoxString v)) v)))\n"
                  "(assert (forall ((v String)) (HasType (BoxString v) string)))") !=
        std::string::npos);
  CHECK(text.find("(declare-fun UnitTerm () Term)") != std::string::npos);
  CHECK(text.find("(assert (HasType UnitTerm void))") != std::string::npos);
  CHECK(text.find("(declare-fun BoxInt (Int) Term)") != std::string::npos);
  CHECK(text.find("(declare-fun double-term-val (Term) Real)") != std::string::npos);
}

TEST_CASE("news board: symbols, axiom shapes and counts") {
  Encoded e = encode_source(kNewsBoard);
  std::string base = e.base.render();

  CHECK(script_has_line(e.base, "(declare-fun guid () Type)"));
  CHECK(script_has_line(e.base, "(declare-fun user.uid (Term) Term)"));
  CHECK(script_has_line(e.base, "(declare-fun user.name (Term) Term)"));
  CHECK(script_has_line(e.base, "(declare-fun user.age (Term) Term)"));
  CHECK(script_has_line(e.base, "(declare-fun user.age!t () Type)"));
  CHECK(script_has_line(
      e.base,
      "(assert (forall ((x Term)) (= (HasType x guid) (and (HasType x string) (str.in_re "
      "(string-term-val x) guid-re)))))"));
  CHECK(script_has_line(
      e.base,
      "(assert (forall ((x Term)) (= (HasType x user.age!t) (and (HasType x int) (> (int-term-val "
      "x) 18)))))"));
  CHECK(script_has_line(
      e.base,
      "(assert (forall ((t Term)) (=> (HasType t user) (and (HasType (user.uid t) guid) (HasType "
      "(user.name t) string) (HasType (user.age t) user.age!t)))))"));
  CHECK(script_has_line(
      e.base,
      "(assert (forall ((x Term)) (=> (HasType x string) (HasType (find_user_by_name x) user))))"));

  // .post* is statically opaque: no projection, no axiom for posts
  CHECK(base.find("posts.post") == std::string::npos);

  CHECK(e.stats.iffAxioms == 2);          // guid, user.age!t
  CHECK(e.stats.implicationAxioms == 2);  // user, post_type
  CHECK(e.stats.projectionFunctions == 6);
  CHECK(e.stats.operationAxioms == 4);
}

TEST_CASE("news board: one VC per call site with skolemized goals") {
  Encoded e = encode_source(kNewsBoard);
  REQUIRE(e.obligations.size() == 4);

  const Vc& first = std::get<Vc>(e.obligations[0]);
  CHECK(first.procedure == "all_posts_by_user");
  CHECK(first.callIndex == 0);
  CHECK(first.goalDescription == "argument `name` must have type string");
  CHECK(goal_line(first) == "(assert (not (HasType t0 string)))");
  CHECK(script_has_line(first.script, "(declare-fun t0 () Term)"));
  CHECK(script_has_line(first.script, "(assert (HasType t0 string))"));

  const Vc& second = std::get<Vc>(e.obligations[1]);
  CHECK(second.callIndex == 1);
  CHECK(second.goalDescription == "argument `user.uid` must have type guid");
  CHECK(goal_line(second) == "(assert (not (HasType (user.uid (find_user_by_name t0)) guid)))");

  const Vc& wrong = std::get<Vc>(e.obligations[3]);
  CHECK(wrong.procedure == "all_posts_by_user2");
  CHECK(wrong.callIndex == 1);
  CHECK(goal_line(wrong) == "(assert (not (HasType (user.name (find_user_by_name t0)) guid)))");

  for (const auto& ob : e.obligations) {
    const auto& vc = std::get<Vc>(ob);
    const auto* last = std::get_if<smt::Sexp>(&vc.script.items.back());
    REQUIRE(last != nullptr);
    CHECK(last->flat() == "(check-sat)");
  }
}

TEST_CASE("opaque cardinality yields a residual check, not a VC") {
  Encoded e = encode_source(R"(
type posts: void { .post*: int }
operation give(string)(posts)
operation take(int)(int)
operation p(string)(int)
main { p(x) { give@A(x)(ps); take@A(ps.post)(z) } }
)");
  REQUIRE(e.obligations.size() == 2);
  const auto& residual = std::get<ResidualCheck>(e.obligations[1]);
  CHECK(residual.procedure == "p");
  CHECK(residual.callIndex == 1);
  CHECK(residual.reason == "field `post` has cardinality [0,*]; checked dynamically");
  CHECK(residual.goalDescription == "argument `ps.post` must have type int");
}

TEST_CASE("projection of a missing field is a static path error") {
  Encoded e = encode_source(R"(
type box: void { .v: int }
operation mk(string)(box)
operation use(int)(int)
operation p(string)(int)
main { p(x) { mk@A(x)(b); use@A(b.nope)(z) } }
)");
  const auto& err = std::get<StaticPathError>(e.obligations[1]);
  CHECK(err.detail == "type `box` has no field `nope`");
  CHECK(err.pos.known());
}

TEST_CASE("choice projections: residual when some alternative has the field") {
  std::string prefix = R"(
type a: void { .f: int }
type b: void { .g: int }
type c: a | b
operation mk(string)(c)
operation use(int)(int)
operation p(string)(int)
)";
  Encoded good = encode_source(prefix + "main { p(x) { mk@A(x)(v); use@A(v.f)(w) } }");
  const auto& residual = std::get<ResidualCheck>(good.obligations[1]);
  CHECK(residual.reason == "field `f` is reached through choice type `c`; checked dynamically");

  Encoded bad = encode_source(prefix + "main { p(x) { mk@A(x)(v); use@A(v.zz)(w) } }");
  const auto& err = std::get<StaticPathError>(bad.obligations[1]);
  CHECK(err.detail == "no alternative of choice type `c` has a field `zz`");

  CHECK(script_has_line(
      good.base, "(assert (forall ((x Term)) (= (HasType x c) (or (HasType x a) (HasType x b)))))"));
}

TEST_CASE("broken chains fall back to a typed skolem constant") {
  Encoded e = encode_source(R"(
type posts: void { .post*: int }
type boxy: void { .v: int }
operation give(string)(posts)
operation wrap(int)(boxy)
operation use(int)(int)
operation p(string)(int)
main { p(x) { give@A(x)(ps); wrap@A(ps.post)(b); use@A(b.v)(z) } }
)");
  REQUIRE(e.obligations.size() == 3);
  CHECK(std::holds_alternative<ResidualCheck>(e.obligations[1]));
  const Vc& vc = std::get<Vc>(e.obligations[2]);
  CHECK(script_has_line(vc.script, "(declare-fun b!sk () Term)"));
  CHECK(script_has_line(vc.script, "(assert (HasType b!sk boxy))"));
  CHECK(goal_line(vc) == "(assert (not (HasType (boxy.v b!sk) int)))");
  // only goal-reachable skolems: t0 is not part of this goal's chain
  CHECK_FALSE(script_has_line(vc.script, "(declare-fun t0 () Term)"));
}

TEST_CASE("aliases encode as iff and tolerate forward references") {
  Encoded e = encode_source(R"(
type a: b
type b: string
operation p(a)(b)
main { p(x) { p@A(x)(y) } }
)");
  std::string base = e.base.render();
  auto declB = base.find("(declare-fun b () Type)");
  auto axiomA = base.find("(assert (forall ((x Term)) (= (HasType x a) (HasType x b))))");
  REQUIRE(declB != std::string::npos);
  REQUIRE(axiomA != std::string::npos);
  CHECK(declB < axiomA);
  CHECK(script_has_line(e.base,
                        "(assert (forall ((x Term)) (= (HasType x b) (HasType x string))))"));
  CHECK(e.stats.iffAxioms == 2);
}

TEST_CASE("smt reserved words and prelude collisions are mangled") {
  Encoded e = encode_source(R"(
type let: string
type BoxString: string
)");
  CHECK(script_has_line(e.base, "(declare-fun |let| () Type)"));
  CHECK(script_has_line(e.base, "(declare-fun BoxString!1 () Type)"));
}

TEST_CASE("legacy names switch the regex spellings") {
  Encoded e = encode_source(R"(type guid: string("[A-F\\d]{4,4}"))", EncodeOptions{true, 10000});
  std::string base = e.base.render();
  CHECK(script_has_line(e.base,
                        "(define-fun guid-re () (RegEx String) (re.loop (re.union (re.range \"A\" "
                        "\"F\") (re.range \"0\" \"9\")) 4 4))"));
  CHECK(base.find("str.in.re") != std::string::npos);
  CHECK(base.find("str.in_re") == std::string::npos);

  Encoded modern = encode_source(R"(type guid: string("[A-F\\d]{4,4}"))");
  std::string modernBase = modern.base.render();
  CHECK(modernBase.find("(define-fun guid-re () RegLan") != std::string::npos);
  CHECK(modernBase.find("str.in_re") != std::string::npos);
}

TEST_CASE("empty program encodes to just the prelude") {
  Encoded e = encode_source("");
  CHECK(e.base.render() == enc::encode_prelude().render());
  CHECK(e.obligations.empty());
  CHECK(e.stats.iffAxioms == 0);
}

TEST_CASE("encoding is deterministic") {
  Encoded a = encode_source(kNewsBoard);
  Encoded b = encode_source(kNewsBoard);
  CHECK(a.base.render() == b.base.render());
  REQUIRE(a.obligations.size() == b.obligations.size());
  for (std::size_t i = 0; i < a.obligations.size(); ++i)
    CHECK(std::get<Vc>(a.obligations[i]).script.render() ==
          std::get<Vc>(b.obligations[i]).script.render());
}
