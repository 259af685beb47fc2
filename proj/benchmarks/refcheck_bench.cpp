#include <benchmark/benchmark.h>

#include <cstdint>
#include <string>

#include "refcheck/encode.hpp"
#include "refcheck/predicate.hpp"
#include "refcheck/regex.hpp"
#include "refcheck/resolve.hpp"
#include "refcheck/validate.hpp"
#include "refcheck/value.hpp"

namespace {

using namespace refcheck;

const char* kGuidPattern =
    "[A-F\\d]{8,8}-[A-F\\d]{4,4}-[A-F\\d]{4,4}-[A-F\\d]{4,4}-[A-F\\d]{12,12}";

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

main {
  all_posts_by_user(name) {
    find_user_by_name@SelfOut(name)(user);
    get_all_users_posts@SelfOut(user.uid)(posts)
  }
}
)";

const char* kUserJson =
    R"({"uid":"21EC2020-3AEA-4069-A2DD-08002B30309D","name":"Ada","age":30})";

void BM_RegexCompile(benchmark::State& state) {
  for (auto _ : state) {
    auto re = regex::parse_regex(kGuidPattern);
    regex::CompiledRegex compiled(*re);
    benchmark::DoNotOptimize(compiled);
  }
}
BENCHMARK(BM_RegexCompile);

void BM_RegexMatchHit(benchmark::State& state) {
  auto re = regex::parse_regex(kGuidPattern);
  regex::CompiledRegex compiled(*re);
  std::string subject = "21EC2020-3AEA-4069-A2DD-08002B30309D";
  for (auto _ : state) benchmark::DoNotOptimize(compiled.matches(subject));
}
BENCHMARK(BM_RegexMatchHit);

void BM_RegexMatchMiss(benchmark::State& state) {
  auto re = regex::parse_regex(kGuidPattern);
  regex::CompiledRegex compiled(*re);
  // wrong only in the very last position, so the whole NFA runs
  std::string subject = "21EC2020-3AEA-4069-A2DD-08002B30309g";
  for (auto _ : state) benchmark::DoNotOptimize(compiled.matches(subject));
}
BENCHMARK(BM_RegexMatchMiss);

void BM_PredicateEval(benchmark::State& state) {
  auto parsed = pred::parse_predicate("age>18 && age<150");
  for (auto _ : state) benchmark::DoNotOptimize(pred::eval(*parsed.pred, std::int64_t{42}));
}
BENCHMARK(BM_PredicateEval);

void BM_ParseJsonUser(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(val::parse_json_value(kUserJson));
}
BENCHMARK(BM_ParseJsonUser);

void BM_ValidateUser(benchmark::State& state) {
  auto rp = lang::resolve(lang::parse_program(kNewsBoard));
  const auto* user = rp.find_type("user");
  auto tree = val::parse_json_value(kUserJson);
  for (auto _ : state) benchmark::DoNotOptimize(val::validate(tree, *user->body, rp));
}
BENCHMARK(BM_ValidateUser);

void BM_ParseProgram(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(lang::parse_program(kNewsBoard));
}
BENCHMARK(BM_ParseProgram);

void BM_EncodeNewsBoard(benchmark::State& state) {
  auto rp = lang::resolve(lang::parse_program(kNewsBoard));
  for (auto _ : state) benchmark::DoNotOptimize(enc::encode(rp));
}
BENCHMARK(BM_EncodeNewsBoard);

void BM_RenderVcScripts(benchmark::State& state) {
  auto rp = lang::resolve(lang::parse_program(kNewsBoard));
  auto encoded = enc::encode(rp);
  for (auto _ : state) {
    for (const auto& ob : encoded.obligations)
      if (const auto* vc = std::get_if<enc::Vc>(&ob))
        benchmark::DoNotOptimize(vc->script.render());
  }
}
BENCHMARK(BM_RenderVcScripts);

}  // namespace

BENCHMARK_MAIN();
