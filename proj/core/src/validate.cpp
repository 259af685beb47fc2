#include "refcheck/validate.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <utility>
#include <variant>

namespace refcheck::val {

namespace {

std::string card_text(const lang::Cardinality& c) {
  std::string out = "[" + std::to_string(c.min) + ",";
  out += c.max ? std::to_string(*c.max) : std::string("*");
  return out + "]";
}

std::string double_text(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::string root_text(const ValueTree::Root& r) {
  if (const auto* b = std::get_if<bool>(&r)) return *b ? "true" : "false";
  if (const auto* i = std::get_if<std::int64_t>(&r)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&r)) return double_text(*d);
  if (const auto* s = std::get_if<std::string>(&r)) {
    if (s->size() <= 64) return *s;
    return s->substr(0, 61) + "...";
  }
  return "void";
}

bool kind_matches(lang::BasicKind want, const ValueTree::Root& r) {
  switch (want) {
    case lang::BasicKind::Void: return std::holds_alternative<ValueTree::Void>(r);
    case lang::BasicKind::Bool: return std::holds_alternative<bool>(r);
    case lang::BasicKind::Int: return std::holds_alternative<std::int64_t>(r);
    case lang::BasicKind::Double: return std::holds_alternative<double>(r);
    case lang::BasicKind::String: return std::holds_alternative<std::string>(r);
  }
  return false;
}

std::string describe_type(const lang::TypeExpr& t, const lang::ResolvedProgram& rp) {
  if (const auto* named = std::get_if<lang::TypeNamed>(&t.node)) return named->name;
  if (std::holds_alternative<lang::TypeChoice>(t.node)) return "choice";
  const auto& node = std::get<lang::TypeNode>(t.node);
  std::string out{lang::to_string(node.basic)};
  if (lang::has_refinement(node.refinement)) out += " (refined)";
  if (!node.children.empty()) out += " tree";
  (void)rp;
  return out;
}

class Validator {
 public:
  Validator(const lang::ResolvedProgram& rp, const ValidateOptions& opts)
      : rp_(rp), opts_(opts) {}

  std::vector<ValidationError> run(const ValueTree& v, const lang::TypeExpr& t) {
    check(v, t);
    return std::move(errors_);
  }

 private:
  bool full() const { return errors_.size() >= opts_.maxErrors; }

  void emit(ErrorKind kind, std::string message, std::string expected = {},
            std::string found = {}, std::vector<std::string> alternatives = {}) {
    if (full()) return;
    errors_.push_back(ValidationError{path_, kind, std::move(message), std::move(expected),
                                      std::move(found), std::move(alternatives)});
  }

  void check(const ValueTree& v, const lang::TypeExpr& t) {
    if (full()) return;
    auto d = rp_.deref(t);
    if (const auto* choice = std::get_if<lang::TypeChoice>(&d.type->node)) {
      check_choice(v, *choice);
      return;
    }
    check_node(v, std::get<lang::TypeNode>(d.type->node));
  }

  void check_choice(const ValueTree& v, const lang::TypeChoice& choice) {
    std::vector<std::string> summaries;
    for (const auto& alt : choice.alternatives) {
      Validator branch(rp_, opts_);
      auto errs = branch.run(v, *alt);
      if (errs.empty()) return;
      std::string s = describe_type(*alt, rp_) + ": " + errs.front().message;
      if (!errs.front().path.empty()) s += " (at " + path_string(errs.front().path) + ")";
      summaries.push_back(std::move(s));
    }
    emit(ErrorKind::NoChoiceBranch,
         "value matches none of the " + std::to_string(choice.alternatives.size()) +
             " alternatives",
         {}, {}, std::move(summaries));
  }

  void check_node(const ValueTree& v, const lang::TypeNode& node) {
    if (!kind_matches(node.basic, v.root)) {
      emit(ErrorKind::BasicKindMismatch,
           std::string("expected ") + std::string(lang::to_string(node.basic)) + ", found " +
               std::string(kind_name(v.root)),
           std::string(lang::to_string(node.basic)), std::string(kind_name(v.root)));
    } else {
      check_refinement(v, node);
    }

    for (const auto& field : node.children) {
      const ChildEntry* entry = v.find(field.name);
      std::size_t n = entry ? entry->values.size() : 0;
      if (!field.card.admits(n)) {
        path_.push_back(PathStep{field.name, 0, false});
        if (n == 0)
          emit(ErrorKind::MissingField, "required field `" + field.name + "` is missing",
               card_text(field.card), "0");
        else
          emit(ErrorKind::CardinalityViolation,
               "field `" + field.name + "` occurs " + std::to_string(n) +
                   " times, violating cardinality " + card_text(field.card),
               card_text(field.card), std::to_string(n));
        path_.pop_back();
      }
      if (!entry) continue;
      bool indexed = !field.card.is_single();
      for (std::size_t i = 0; i < entry->values.size(); ++i) {
        path_.push_back(PathStep{field.name, i, indexed});
        check(entry->values[i], *field.type);
        path_.pop_back();
      }
    }

    if (!opts_.openWorld) {
      for (const auto& entry : v.children) {
        bool declared = false;
        for (const auto& field : node.children)
          if (field.name == entry.name) {
            declared = true;
            break;
          }
        if (declared) continue;
        path_.push_back(PathStep{entry.name, 0, false});
        emit(ErrorKind::UnexpectedField, "unexpected field `" + entry.name + "`", {},
             entry.name);
        path_.pop_back();
      }
    }
  }

  void check_refinement(const ValueTree& v, const lang::TypeNode& node) {
    if (const auto* re = std::get_if<lang::RegexRefinement>(&node.refinement)) {
      const auto& s = std::get<std::string>(v.root);
      if (!regex::matches(*re->ast, s))
        emit(ErrorKind::RegexViolation,
             "string does not match \"" + re->pattern + "\"", re->pattern, root_text(v.root));
      return;
    }
    if (const auto* pr = std::get_if<lang::PredicateRefinement>(&node.refinement)) {
      bool ok = std::visit(
          [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::int64_t> || std::is_same_v<T, double>)
              return pred::eval(*pr->ast, x);
            else
              return true;  // unreachable: kind already matched int or double
          },
          v.root);
      if (!ok)
        emit(ErrorKind::PredicateViolation,
             "predicate `" + pr->text + "` fails for value " + root_text(v.root), pr->text,
             root_text(v.root));
    }
  }

  const lang::ResolvedProgram& rp_;
  const ValidateOptions& opts_;
  std::vector<ValidationError> errors_;
  std::vector<PathStep> path_;
};

}  // namespace

std::string_view kind_slug(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingField: return "missing-field";
    case ErrorKind::CardinalityViolation: return "cardinality-violation";
    case ErrorKind::BasicKindMismatch: return "basic-kind-mismatch";
    case ErrorKind::RegexViolation: return "regex-violation";
    case ErrorKind::PredicateViolation: return "predicate-violation";
    case ErrorKind::NoChoiceBranch: return "no-choice-branch";
    case ErrorKind::UnexpectedField: return "unexpected-field";
  }
  return "unknown";
}

std::string path_string(const std::vector<PathStep>& path) {
  if (path.empty()) return "$";
  std::string out;
  for (const auto& step : path) {
    out += "." + step.field;
    if (step.indexed) out += "[" + std::to_string(step.index) + "]";
  }
  return out;
}

std::string json_pointer(const std::vector<PathStep>& path) {
  std::string out;
  for (const auto& step : path) {
    out += "/";
    for (char c : step.field) {  // RFC 6901 escaping
      if (c == '~')
        out += "~0";
      else if (c == '/')
        out += "~1";
      else
        out += c;
    }
    if (step.indexed) out += "/" + std::to_string(step.index);
  }
  return out;
}

std::vector<ValidationError> validate(const ValueTree& v, const lang::TypeExpr& t,
                                      const lang::ResolvedProgram& rp,
                                      const ValidateOptions& opts) {
  return Validator(rp, opts).run(v, t);
}

std::string errors_to_json(const std::vector<ValidationError>& errors, int indent) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& e : errors) {
    nlohmann::ordered_json o;
    o["path"] = path_string(e.path);
    o["pointer"] = json_pointer(e.path);
    o["kind"] = std::string(kind_slug(e.kind));
    o["message"] = e.message;
    if (!e.expected.empty()) o["expected"] = e.expected;
    if (!e.found.empty()) o["found"] = e.found;
    if (!e.alternatives.empty()) o["alternatives"] = e.alternatives;
    arr.push_back(std::move(o));
  }
  return arr.dump(indent);
}

}  // namespace refcheck::val
