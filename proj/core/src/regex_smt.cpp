#include "refcheck/regex.hpp"
#include "refcheck/sexp.hpp"
#include "refcheck/unicode.hpp"

namespace refcheck::regex {

namespace {

using smt::Sexp;

Sexp str_to_re(char32_t cp, bool legacy) {
  return Sexp::app(legacy ? "str.to.re" : "str.to_re", {Sexp::atom(smt::smt_string_literal(cp))});
}

Sexp str_to_re_empty(bool legacy) {
  return Sexp::app(legacy ? "str.to.re" : "str.to_re",
                   {Sexp::atom(smt::smt_string_literal(std::u32string{}))});
}

Sexp range(char32_t lo, char32_t hi) {
  return Sexp::app("re.range", {Sexp::atom(smt::smt_string_literal(lo)),
                                Sexp::atom(smt::smt_string_literal(hi))});
}

Sexp class_item(const RegexAst::ClassItem& item, bool legacy) {
  if (std::holds_alternative<RegexAst::ClassDigit>(item)) return range(U'0', U'9');
  auto r = std::get<RegexAst::ClassRange>(item);
  if (r.lo == r.hi) return str_to_re(r.lo, legacy);
  return range(r.lo, r.hi);
}

Sexp translate(const RegexAst& re, bool legacy) {
  return std::visit(
      [legacy](const auto& node) -> Sexp {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, RegexAst::Literal>) {
          return str_to_re(node.cp, legacy);
        } else if constexpr (std::is_same_v<T, RegexAst::AnyDigit>) {
          return range(U'0', U'9');
        } else if constexpr (std::is_same_v<T, RegexAst::CharClass>) {
          if (node.items.size() == 1) return class_item(node.items[0], legacy);
          std::vector<Sexp> args;
          args.reserve(node.items.size());
          for (const auto& item : node.items) args.push_back(class_item(item, legacy));
          return Sexp::app("re.union", std::move(args));
        } else if constexpr (std::is_same_v<T, RegexAst::Concat>) {
          if (node.parts.empty()) return str_to_re_empty(legacy);
          if (node.parts.size() == 1) return translate(*node.parts[0], legacy);
          std::vector<Sexp> args;
          args.reserve(node.parts.size());
          for (const auto& part : node.parts) args.push_back(translate(*part, legacy));
          return Sexp::app("re.++", std::move(args));
        } else if constexpr (std::is_same_v<T, RegexAst::Alt>) {
          if (node.branches.size() == 1) return translate(*node.branches[0], legacy);
          std::vector<Sexp> args;
          args.reserve(node.branches.size());
          for (const auto& branch : node.branches) args.push_back(translate(*branch, legacy));
          return Sexp::app("re.union", std::move(args));
        } else {
          Sexp inner = translate(*node.inner, legacy);
          if (!node.max) {
            if (node.min == 0) return Sexp::app("re.*", {std::move(inner)});
            if (node.min == 1) return Sexp::app("re.+", {std::move(inner)});
            Sexp counted = Sexp::app("re.loop", {inner, Sexp::atom(std::to_string(node.min)),
                                                 Sexp::atom(std::to_string(node.min))});
            return Sexp::app("re.++", {std::move(counted), Sexp::app("re.*", {std::move(inner)})});
          }
          if (node.min == 0 && *node.max == 1) return Sexp::app("re.opt", {std::move(inner)});
          return Sexp::app("re.loop", {std::move(inner), Sexp::atom(std::to_string(node.min)),
                                       Sexp::atom(std::to_string(*node.max))});
        }
      },
      re.node);
}

bool needs_group_in_concat(const RegexAst& re) {
  return std::holds_alternative<RegexAst::Alt>(re.node) ||
         std::holds_alternative<RegexAst::Concat>(re.node);
}

void render_class_char(std::string& out, char32_t cp) {
  if (cp == U'\\' || cp == U'-' || cp == U']') {
    out += '\\';
  }
  out += unicode::encode_utf8(cp);
}

void render(std::string& out, const RegexAst& re);

void render_grouped(std::string& out, const RegexAst& re, bool group) {
  if (group) {
    out += '(';
    render(out, re);
    out += ')';
  } else {
    render(out, re);
  }
}

void render(std::string& out, const RegexAst& re) {
  std::visit(
      [&out](const auto& node) {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, RegexAst::Literal>) {
          char32_t cp = node.cp;
          if (cp == U'\\' || cp == U'-' || cp == U']') {
            out += '\\';
            out += unicode::encode_utf8(cp);
          } else if (cp == U'[' || cp == U'(' || cp == U')' || cp == U'{' || cp == U'}' ||
                     cp == U'|' || cp == U'*' || cp == U'+' || cp == U'?' || cp == U'.' ||
                     cp == U'^' || cp == U'$') {
            // no escape for these in the subset; a singleton class spells them
            out += '[';
            out += unicode::encode_utf8(cp);
            out += ']';
          } else {
            out += unicode::encode_utf8(cp);
          }
        } else if constexpr (std::is_same_v<T, RegexAst::AnyDigit>) {
          out += "\\d";
        } else if constexpr (std::is_same_v<T, RegexAst::CharClass>) {
          out += '[';
          for (const auto& item : node.items) {
            if (std::holds_alternative<RegexAst::ClassDigit>(item)) {
              out += "\\d";
              continue;
            }
            auto r = std::get<RegexAst::ClassRange>(item);
            render_class_char(out, r.lo);
            if (r.lo != r.hi) {
              out += '-';
              render_class_char(out, r.hi);
            }
          }
          out += ']';
        } else if constexpr (std::is_same_v<T, RegexAst::Concat>) {
          for (const auto& part : node.parts) render_grouped(out, *part, needs_group_in_concat(*part));
        } else if constexpr (std::is_same_v<T, RegexAst::Alt>) {
          bool first = true;
          for (const auto& branch : node.branches) {
            if (!first) out += '|';
            first = false;
            render_grouped(out, *branch, std::holds_alternative<RegexAst::Alt>(branch->node));
          }
        } else {
          bool group = std::holds_alternative<RegexAst::Alt>(node.inner->node) ||
                       std::holds_alternative<RegexAst::Concat>(node.inner->node) ||
                       std::holds_alternative<RegexAst::Loop>(node.inner->node);
          render_grouped(out, *node.inner, group);
          if (!node.max) {
            if (node.min == 0)
              out += '*';
            else if (node.min == 1)
              out += '+';
            else
              out += '{' + std::to_string(node.min) + ",}";
          } else if (node.min == 0 && *node.max == 1) {
            out += '?';
          } else {
            out += '{' + std::to_string(node.min) + ',' + std::to_string(*node.max) + '}';
          }
        }
      },
      re.node);
}

}  // namespace

std::string to_smt(const RegexAst& re, bool legacy_names) {
  return translate(re, legacy_names).flat();
}

smt::Sexp to_smt_sexp(const RegexAst& re, bool legacy_names) {
  return translate(re, legacy_names);
}

std::string render_regex(const RegexAst& re) {
  std::string out;
  render(out, re);
  return out;
}

}  // namespace refcheck::regex
