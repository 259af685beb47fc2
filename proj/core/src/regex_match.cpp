#include <cstdint>
#include <vector>

#include "refcheck/regex.hpp"
#include "refcheck/unicode.hpp"

namespace refcheck::regex {

// Thompson construction with counted loops expanded into copies, then plain
// set simulation. Time is O(states * input length); no backtracking.
struct CompiledRegex::Nfa {
  struct Range {
    char32_t lo, hi;
    int target;
  };
  struct State {
    std::vector<Range> on_char;
    std::vector<int> eps;
  };
  std::vector<State> states;
  int start = 0;
  int accept = 0;

  // scratch for simulation, reused across matches
  mutable std::vector<std::uint32_t> seen;
  mutable std::uint32_t generation = 0;

  int add_state() {
    states.emplace_back();
    return static_cast<int>(states.size()) - 1;
  }

  void edge(int from, char32_t lo, char32_t hi, int to) {
    states[from].on_char.push_back(Range{lo, hi, to});
  }
  void eps(int from, int to) { states[from].eps.push_back(to); }

  // Compiles `re` between a fresh start state and the returned end state.
  std::pair<int, int> compile(const RegexAst& re) {
    return std::visit(
        [this](const auto& node) -> std::pair<int, int> {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, RegexAst::Literal>) {
            int s = add_state(), e = add_state();
            edge(s, node.cp, node.cp, e);
            return {s, e};
          } else if constexpr (std::is_same_v<T, RegexAst::AnyDigit>) {
            int s = add_state(), e = add_state();
            edge(s, U'0', U'9', e);
            return {s, e};
          } else if constexpr (std::is_same_v<T, RegexAst::CharClass>) {
            int s = add_state(), e = add_state();
            for (const auto& item : node.items) {
              if (std::holds_alternative<RegexAst::ClassDigit>(item)) {
                edge(s, U'0', U'9', e);
              } else {
                auto r = std::get<RegexAst::ClassRange>(item);
                edge(s, r.lo, r.hi, e);
              }
            }
            return {s, e};
          } else if constexpr (std::is_same_v<T, RegexAst::Concat>) {
            int s = add_state();
            int cur = s;
            for (const auto& part : node.parts) {
              auto [ps, pe] = compile(*part);
              eps(cur, ps);
              cur = pe;
            }
            return {s, cur};
          } else if constexpr (std::is_same_v<T, RegexAst::Alt>) {
            int s = add_state(), e = add_state();
            for (const auto& branch : node.branches) {
              auto [bs, be] = compile(*branch);
              eps(s, bs);
              eps(be, e);
            }
            return {s, e};
          } else {
            return compile_loop(node);
          }
        },
        re.node);
  }

  std::pair<int, int> compile_loop(const RegexAst::Loop& loop) {
    int s = add_state();
    int cur = s;
    for (std::uint32_t i = 0; i < loop.min; ++i) {
      auto [is, ie] = compile(*loop.inner);
      eps(cur, is);
      cur = ie;
    }
    if (!loop.max) {
      // trailing Kleene star through a hub state
      int hub = add_state();
      eps(cur, hub);
      auto [is, ie] = compile(*loop.inner);
      eps(hub, is);
      eps(ie, hub);
      return {s, hub};
    }
    int e = add_state();
    for (std::uint32_t i = loop.min; i < *loop.max; ++i) {
      eps(cur, e);
      auto [is, ie] = compile(*loop.inner);
      eps(cur, is);
      cur = ie;
    }
    eps(cur, e);
    return {s, e};
  }

  // iterative closure; expanded loops can produce very long epsilon chains
  void close(std::vector<int>& set, int state) const {
    if (seen[state] == generation) return;
    seen[state] = generation;
    set.push_back(state);
    std::size_t scan = set.size() - 1;
    while (scan < set.size()) {
      for (int next : states[set[scan]].eps) {
        if (seen[next] != generation) {
          seen[next] = generation;
          set.push_back(next);
        }
      }
      ++scan;
    }
  }

  bool run(const std::u32string& input) const {
    if (seen.size() != states.size()) seen.assign(states.size(), 0);
    ++generation;
    std::vector<int> current;
    close(current, start);
    std::vector<int> next;
    for (char32_t cp : input) {
      ++generation;
      next.clear();
      for (int state : current) {
        for (const auto& r : states[state].on_char) {
          if (cp >= r.lo && cp <= r.hi) close(next, r.target);
        }
      }
      current.swap(next);
      if (current.empty()) return false;
    }
    for (int state : current)
      if (state == accept) return true;
    return false;
  }
};

CompiledRegex::CompiledRegex(const RegexAst& re) : nfa_(std::make_unique<Nfa>()) {
  auto [s, e] = nfa_->compile(re);
  nfa_->start = s;
  nfa_->accept = e;
}

CompiledRegex::~CompiledRegex() = default;
CompiledRegex::CompiledRegex(CompiledRegex&&) noexcept = default;
CompiledRegex& CompiledRegex::operator=(CompiledRegex&&) noexcept = default;

bool CompiledRegex::matches(const std::u32string& input) const { return nfa_->run(input); }

bool CompiledRegex::matches(std::string_view utf8) const {
  auto decoded = unicode::decode_utf8(utf8);
  if (!decoded) return false;
  return nfa_->run(*decoded);
}

bool matches(const RegexAst& re, std::string_view utf8) {
  return CompiledRegex(re).matches(utf8);
}

}  // namespace refcheck::regex
