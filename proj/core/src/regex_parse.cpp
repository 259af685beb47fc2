#include <limits>
#include <utility>

#include "refcheck/regex.hpp"
#include "refcheck/unicode.hpp"

namespace refcheck::regex {

RegexPtr make_regex(std::variant<RegexAst::Literal, RegexAst::AnyDigit, RegexAst::CharClass,
                                 RegexAst::Concat, RegexAst::Alt, RegexAst::Loop>
                        node) {
  auto p = std::make_shared<RegexAst>();
  p->node = std::move(node);
  return p;
}

namespace {

// Expansion guard for counted loops: the NFA compiler duplicates loop
// bodies, so the expanded size must stay bounded by what a validator can
// afford to hold per pattern.
constexpr std::uint64_t kMaxExpandedSize = 1u << 20;
constexpr std::uint32_t kMaxLoopCount = 100000;

class Parser {
 public:
  explicit Parser(std::string_view pattern) {
    auto decoded = unicode::decode_utf8(pattern);
    if (!decoded) fail(ErrKind::SyntaxError, Pos{1, 1}, "pattern is not valid UTF-8");
    text_ = std::move(*decoded);
  }

  RegexPtr parse() {
    RegexPtr re = parse_alt();
    if (!at_end()) err("unexpected ')'");  // only an unmatched ')' can stop parse_alt
    return re;
  }

 private:
  std::u32string text_;
  std::size_t i_ = 0;

  bool at_end() const { return i_ >= text_.size(); }
  char32_t peek() const { return text_[i_]; }
  char32_t take() { return text_[i_++]; }
  Pos here() const { return Pos{1, static_cast<int>(i_) + 1}; }

  [[noreturn]] void err(const std::string& msg) { fail(ErrKind::SyntaxError, here(), msg); }
  [[noreturn]] void unsupported(const std::string& what) {
    fail(ErrKind::UnsupportedConstruct, here(), what + " is not supported in the regex subset");
  }

  RegexPtr parse_alt() {
    std::vector<RegexPtr> branches;
    branches.push_back(parse_concat());
    while (!at_end() && peek() == U'|') {
      take();
      branches.push_back(parse_concat());
    }
    if (branches.size() == 1) return branches[0];
    return make_regex(RegexAst::Alt{std::move(branches)});
  }

  RegexPtr parse_concat() {
    std::vector<RegexPtr> parts;
    while (!at_end() && peek() != U'|' && peek() != U')') {
      parts.push_back(parse_repeat());
    }
    if (parts.size() == 1) return parts[0];
    return make_regex(RegexAst::Concat{std::move(parts)});
  }

  RegexPtr parse_repeat() {
    RegexPtr atom = parse_atom();
    bool quantified = false;
    while (!at_end()) {
      char32_t c = peek();
      if (c != U'*' && c != U'+' && c != U'?' && c != U'{') break;
      if (quantified) err("quantifier applied to a quantifier; group the inner expression");
      quantified = true;
      if (c == U'{') {
        atom = parse_counted(std::move(atom));
      } else {
        take();
        RegexAst::Loop loop;
        loop.inner = std::move(atom);
        if (c == U'*') {
          loop.min = 0;
        } else if (c == U'+') {
          loop.min = 1;
        } else {
          loop.min = 0;
          loop.max = 1;
        }
        atom = make_regex(std::move(loop));
      }
    }
    return atom;
  }

  std::uint32_t parse_count() {
    if (at_end() || peek() < U'0' || peek() > U'9') err("expected a repetition count");
    std::uint64_t n = 0;
    while (!at_end() && peek() >= U'0' && peek() <= U'9') {
      n = n * 10 + (take() - U'0');
      if (n > kMaxLoopCount)
        fail(ErrKind::SyntaxError, here(), "repetition count too large");
    }
    return static_cast<std::uint32_t>(n);
  }

  RegexPtr parse_counted(RegexPtr inner) {
    take();  // '{'
    RegexAst::Loop loop;
    loop.inner = std::move(inner);
    loop.min = parse_count();
    loop.max = loop.min;
    if (!at_end() && peek() == U',') {
      take();
      if (!at_end() && peek() == U'}') {
        loop.max.reset();  // {m,}
      } else {
        loop.max = parse_count();
        if (*loop.max < loop.min) err("loop bounds out of order");
      }
    }
    if (at_end() || take() != U'}') err("expected '}'");
    return make_regex(std::move(loop));
  }

  RegexPtr parse_atom() {
    if (at_end()) err("expected an atom");
    char32_t c = peek();
    switch (c) {
      case U'(': {
        take();
        if (!at_end() && peek() == U'?') unsupported("group modifier or lookaround");
        RegexPtr inner = parse_alt();
        if (at_end() || take() != U')') err("expected ')'");
        return inner;
      }
      case U'[':
        return parse_class();
      case U'\\':
        return parse_escape();
      case U'.':
        unsupported("dot-any");
      case U'^':
      case U'$':
        unsupported("anchor");
      case U'*':
      case U'+':
      case U'?':
        err("quantifier without a preceding atom");
      case U'{':
      case U'}':
        err("unmatched brace");
      case U')':
      case U'|':
        err("expected an atom");
      default:
        take();
        return make_regex(RegexAst::Literal{c});
    }
  }

  RegexPtr parse_escape() {
    take();  // backslash
    if (at_end()) err("dangling escape");
    char32_t c = take();
    switch (c) {
      case U'd': return make_regex(RegexAst::AnyDigit{});
      case U'\\': return make_regex(RegexAst::Literal{U'\\'});
      case U'-': return make_regex(RegexAst::Literal{U'-'});
      case U']': return make_regex(RegexAst::Literal{U']'});
      default:
        --i_;
        unsupported("escape '\\" + unicode::encode_utf8(c) + "'");
    }
  }

  // A class endpoint character, or nullopt when the next item is \d.
  std::optional<char32_t> parse_class_char() {
    char32_t c = peek();
    if (c == U'\\') {
      take();
      if (at_end()) err("dangling escape in character class");
      char32_t e = take();
      switch (e) {
        case U'd': return std::nullopt;
        case U'\\': return U'\\';
        case U'-': return U'-';
        case U']': return U']';
        default:
          --i_;
          unsupported("escape '\\" + unicode::encode_utf8(e) + "' in character class");
      }
    }
    if (c == U'-') err("bare '-' in character class; escape it as '\\-'");
    take();
    return c;
  }

  RegexPtr parse_class() {
    take();  // '['
    if (!at_end() && peek() == U'^') unsupported("negated character class");
    std::vector<RegexAst::ClassItem> items;
    while (true) {
      if (at_end()) err("unterminated character class");
      if (peek() == U']') {
        take();
        break;
      }
      auto first = parse_class_char();
      if (!first) {
        items.push_back(RegexAst::ClassDigit{});
        continue;
      }
      if (!at_end() && peek() == U'-') {
        take();
        if (at_end()) err("unterminated character class");
        if (peek() == U']') err("bare '-' in character class; escape it as '\\-'");
        auto second = parse_class_char();
        if (!second) err("'\\d' cannot be a range endpoint");
        if (*second < *first) err("character range out of order");
        items.push_back(RegexAst::ClassRange{*first, *second});
      } else {
        items.push_back(RegexAst::ClassRange{*first, *first});
      }
    }
    if (items.empty()) err("empty character class");
    if (items.size() == 1) {
      // normal form: singleton classes collapse to the equivalent node
      if (std::holds_alternative<RegexAst::ClassDigit>(items[0]))
        return make_regex(RegexAst::AnyDigit{});
      auto range = std::get<RegexAst::ClassRange>(items[0]);
      if (range.lo == range.hi) return make_regex(RegexAst::Literal{range.lo});
    }
    return make_regex(RegexAst::CharClass{std::move(items)});
  }
};

std::uint64_t expanded_size(const RegexAst& re) {
  return std::visit(
      [](const auto& node) -> std::uint64_t {
        using T = std::decay_t<decltype(node)>;
        auto saturate = [](std::uint64_t a, std::uint64_t b) {
          return a > kMaxExpandedSize || b > kMaxExpandedSize ? kMaxExpandedSize + 1
                                                             : std::min<std::uint64_t>(a + b, kMaxExpandedSize + 1);
        };
        if constexpr (std::is_same_v<T, RegexAst::Literal> || std::is_same_v<T, RegexAst::AnyDigit> ||
                      std::is_same_v<T, RegexAst::CharClass>) {
          return 1;
        } else if constexpr (std::is_same_v<T, RegexAst::Concat>) {
          std::uint64_t total = 1;
          for (const auto& p : node.parts) total = saturate(total, expanded_size(*p));
          return total;
        } else if constexpr (std::is_same_v<T, RegexAst::Alt>) {
          std::uint64_t total = 1;
          for (const auto& b : node.branches) total = saturate(total, expanded_size(*b));
          return total;
        } else {
          std::uint64_t inner = expanded_size(*node.inner);
          std::uint64_t copies = node.max ? *node.max : node.min + 1;
          if (copies == 0) copies = 1;
          std::uint64_t product = inner * copies;
          if (inner != 0 && product / inner != copies) return kMaxExpandedSize + 1;
          return std::min<std::uint64_t>(product + 1, kMaxExpandedSize + 1);
        }
      },
      re.node);
}

}  // namespace

RegexPtr parse_regex(std::string_view pattern) {
  Parser parser(pattern);
  RegexPtr re = parser.parse();
  if (expanded_size(*re) > kMaxExpandedSize)
    fail(ErrKind::SyntaxError, Pos{1, 1}, "pattern too large when counted loops are expanded");
  return re;
}

bool structurally_equal(const RegexAst& a, const RegexAst& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&b](const auto&_a) -> bool {
        using T = std::decay_t<decltype(_a)>;
        const auto& _b = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, RegexAst::Literal>) {
          return _a.cp == _b.cp;
        } else if constexpr (std::is_same_v<T, RegexAst::AnyDigit>) {
          return true;
        } else if constexpr (std::is_same_v<T, RegexAst::CharClass>) {
          if (_a.items.size() != _b.items.size()) return false;
          for (std::size_t i = 0; i < _a.items.size(); ++i) {
            if (_a.items[i].index() != _b.items[i].index()) return false;
            if (std::holds_alternative<RegexAst::ClassRange>(_a.items[i])) {
              auto ra = std::get<RegexAst::ClassRange>(_a.items[i]);
              auto rb = std::get<RegexAst::ClassRange>(_b.items[i]);
              if (ra.lo != rb.lo || ra.hi != rb.hi) return false;
            }
          }
          return true;
        } else if constexpr (std::is_same_v<T, RegexAst::Concat>) {
          if (_a.parts.size() != _b.parts.size()) return false;
          for (std::size_t i = 0; i < _a.parts.size(); ++i)
            if (!structurally_equal(*_a.parts[i], *_b.parts[i])) return false;
          return true;
        } else if constexpr (std::is_same_v<T, RegexAst::Alt>) {
          if (_a.branches.size() != _b.branches.size()) return false;
          for (std::size_t i = 0; i < _a.branches.size(); ++i)
            if (!structurally_equal(*_a.branches[i], *_b.branches[i])) return false;
          return true;
        } else {
          return _a.min == _b.min && _a.max == _b.max && structurally_equal(*_a.inner, *_b.inner);
        }
      },
      a.node);
}

}  // namespace refcheck::regex
