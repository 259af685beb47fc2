#include <algorithm>
#include <set>
#include <utility>

#include "refcheck/ast.hpp"
#include "refcheck/unicode.hpp"

namespace refcheck::lang {

namespace {

bool is_ident_start(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || c == U'_';
}
bool is_ident_char(char32_t c) { return is_ident_start(c) || (c >= U'0' && c <= U'9'); }

const std::set<std::u32string> kReserved = {U"type", U"operation", U"main",  U"void",
                                           U"bool", U"int",       U"double", U"string"};

std::optional<BasicKind> basic_kind(const std::u32string& word) {
  if (word == U"void") return BasicKind::Void;
  if (word == U"bool") return BasicKind::Bool;
  if (word == U"int") return BasicKind::Int;
  if (word == U"double") return BasicKind::Double;
  if (word == U"string") return BasicKind::String;
  return std::nullopt;
}

struct StringLit {
  std::string content;          // decoded UTF-8
  std::vector<Pos> charPos;     // source position of each content codepoint
  Pos closePos;
};

class Parser {
 public:
  explicit Parser(std::string_view source) {
    auto decoded = unicode::decode_utf8(source);
    if (!decoded) fail(ErrKind::SyntaxError, Pos{1, 1}, "source is not valid UTF-8");
    text_ = std::move(*decoded);
  }

  Program parse() {
    Program prog;
    while (true) {
      skip();
      if (at_end()) break;
      Pos pos = here();
      std::u32string word = read_word("a declaration");
      if (word == U"type") {
        parse_type_decl(prog, pos);
      } else if (word == U"operation") {
        parse_operation(prog, pos);
      } else if (word == U"main") {
        parse_main(prog);
      } else {
        fail(ErrKind::SyntaxError, pos, "expected 'type', 'operation' or 'main'");
      }
    }
    return prog;
  }

 private:
  std::u32string text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;

  bool at_end() const { return i_ >= text_.size(); }
  Pos here() const { return Pos{line_, col_}; }
  char32_t peek() const { return text_[i_]; }

  void advance() {
    if (text_[i_] == U'\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip() {
    while (!at_end()) {
      char32_t c = peek();
      if (c == U' ' || c == U'\t' || c == U'\r' || c == U'\n') {
        advance();
      } else if (c == U'/' && i_ + 1 < text_.size() && text_[i_ + 1] == U'/') {
        while (!at_end() && peek() != U'\n') advance();
      } else {
        break;
      }
    }
  }

  bool eat(char32_t c) {
    skip();
    if (at_end() || peek() != c) return false;
    advance();
    return true;
  }

  void expect(char32_t c, const char* context) {
    skip();
    if (at_end() || peek() != c) {
      fail(ErrKind::SyntaxError, here(),
           std::string("expected '") + static_cast<char>(c) + "' " + context);
    }
    advance();
  }

  std::u32string read_word(const char* what) {
    skip();
    if (at_end() || !is_ident_start(peek()))
      fail(ErrKind::SyntaxError, here(), std::string("expected ") + what);
    std::u32string word;
    while (!at_end() && is_ident_char(peek())) {
      word += peek();
      advance();
    }
    return word;
  }

  std::string read_ident(const char* what, Pos* out_pos = nullptr) {
    skip();
    Pos pos = here();
    std::u32string word = read_word(what);
    if (kReserved.count(word))
      fail(ErrKind::SyntaxError, pos,
           "'" + unicode::encode_utf8(word) + "' is a reserved word; expected " + what);
    if (out_pos) *out_pos = pos;
    return unicode::encode_utf8(word);
  }

  StringLit read_string_literal() {
    skip();
    if (at_end() || peek() != U'"')
      fail(ErrKind::SyntaxError, here(), "expected a string literal");
    advance();
    StringLit lit;
    while (true) {
      if (at_end()) fail(ErrKind::SyntaxError, here(), "unterminated string literal");
      Pos pos = here();
      char32_t c = peek();
      if (c == U'"') {
        lit.closePos = pos;
        advance();
        return lit;
      }
      if (c == U'\n') fail(ErrKind::SyntaxError, pos, "newline in string literal");
      if (c == U'\\') {
        advance();
        if (at_end()) fail(ErrKind::SyntaxError, here(), "unterminated string literal");
        char32_t e = peek();
        if (e != U'\\' && e != U'"')
          fail(ErrKind::SyntaxError, pos,
               "unsupported escape in string literal; only \\\\ and \\\" exist");
        advance();
        lit.content += unicode::encode_utf8(e);
        lit.charPos.push_back(pos);
        continue;
      }
      advance();
      lit.content += unicode::encode_utf8(c);
      lit.charPos.push_back(pos);
    }
  }

  struct RawPred {
    std::string text;
    std::vector<Pos> bytePos;  // source position of each byte of text
    Pos endPos;
  };

  // after the opening '(': collect verbatim until the matching ')'
  RawPred read_raw_predicate() {
    RawPred raw;
    int depth = 0;
    while (true) {
      if (at_end()) fail(ErrKind::SyntaxError, here(), "unterminated refinement; expected ')'");
      Pos pos = here();
      char32_t c = peek();
      if (c == U'(') ++depth;
      if (c == U')') {
        if (depth == 0) {
          raw.endPos = pos;
          advance();
          return raw;
        }
        --depth;
      }
      advance();
      std::string bytes = unicode::encode_utf8(c);
      for (char byte : bytes) {
        raw.text += byte;
        raw.bytePos.push_back(pos);
      }
    }
  }

  // Sub-language diagnostics carry positions into the fragment text;
  // map them back onto the enclosing source before rethrowing.
  template <class Fn, class Map>
  auto rebase(Fn&& fn, Map&& map) {
    try {
      return fn();
    } catch (CompileError& e) {
      std::vector<Diagnostic> mapped;
      for (const auto& d : e.diagnostics()) mapped.push_back({d.kind, map(d.pos), d.message});
      throw CompileError(std::move(mapped));
    }
  }

  Refinement parse_refinement(BasicKind kind, Pos openPos) {
    if (kind == BasicKind::String) {
      StringLit lit = read_string_literal();
      auto ast = rebase(
          [&] { return regex::parse_regex(lit.content); },
          [&](Pos p) {
            std::size_t idx = p.col > 0 ? static_cast<std::size_t>(p.col) - 1 : 0;
            return idx < lit.charPos.size() ? lit.charPos[idx] : lit.closePos;
          });
      expect(U')', "after the pattern");
      return RegexRefinement{std::move(lit.content), std::move(ast)};
    }
    if (kind == BasicKind::Int || kind == BasicKind::Double) {
      RawPred raw = read_raw_predicate();
      auto parsed = rebase(
          [&] { return pred::parse_predicate(raw.text); },
          [&](Pos p) {
            std::size_t idx = p.col > 0 ? static_cast<std::size_t>(p.col) - 1 : 0;
            return idx < raw.bytePos.size() ? raw.bytePos[idx] : raw.endPos;
          });
      return PredicateRefinement{std::move(raw.text), std::move(parsed.binder),
                                 std::move(parsed.pred)};
    }
    fail(ErrKind::BadRefinement, openPos,
         "basic type `" + std::string(to_string(kind)) + "` does not take a refinement");
  }

  std::vector<FieldDecl> parse_children() {
    std::vector<FieldDecl> children;
    std::set<std::string> names;
    while (true) {
      skip();
      if (eat(U'}')) break;
      Pos dotPos = here();
      expect(U'.', "to start a field declaration");
      Pos namePos;
      std::string name = read_ident("a field name", &namePos);
      Cardinality card;
      if (eat(U'*')) {
        card = Cardinality{0, std::nullopt};
      } else if (eat(U'?')) {
        card = Cardinality{0, 1};
      }
      expect(U':', "after the field name");
      TypePtr type = parse_type_expr();
      if (!names.insert(name).second)
        fail(ErrKind::DuplicateName, namePos, "duplicate field name `" + name + "`");
      children.push_back(FieldDecl{std::move(name), card, std::move(type), dotPos});
    }
    return children;
  }

  TypePtr parse_single_type() {
    skip();
    Pos pos = here();
    std::u32string word = read_word("a type");
    if (auto kind = basic_kind(word)) {
      TypeExpr::Node node;
      node.basic = *kind;
      skip();
      if (!at_end() && peek() == U'(') {
        Pos openPos = here();
        advance();
        node.refinement = parse_refinement(*kind, openPos);
      }
      if (eat(U'{')) node.children = parse_children();
      return make_type(std::move(node), pos);
    }
    if (kReserved.count(word))
      fail(ErrKind::SyntaxError, pos,
           "'" + unicode::encode_utf8(word) + "' is a reserved word; expected a type");
    skip();
    if (!at_end() && peek() == U'(')
      fail(ErrKind::BadRefinement, here(),
           "refinements attach to basic types, not to named references");
    return make_type(TypeExpr::Named{unicode::encode_utf8(word)}, pos);
  }

  TypePtr parse_type_expr() {
    Pos pos = here();
    std::vector<TypePtr> alts;
    alts.push_back(parse_single_type());
    while (eat(U'|')) alts.push_back(parse_single_type());
    if (alts.size() == 1) return alts[0];
    return make_type(TypeExpr::Choice{std::move(alts)}, alts[0]->pos.line ? alts[0]->pos : pos);
  }

  void parse_type_decl(Program& prog, Pos pos) {
    Pos namePos;
    std::string name = read_ident("a type name", &namePos);
    expect(U':', "after the type name");
    TypePtr body = parse_type_expr();
    for (const auto& d : prog.typeDecls)
      if (d.name == name)
        fail(ErrKind::DuplicateName, namePos, "duplicate type name `" + name + "`");
    prog.typeDecls.push_back(TypeDecl{std::move(name), std::move(body), pos});
  }

  TypePtr parse_operation_type() {
    skip();
    Pos pos = here();
    std::u32string word = read_word("a type name");
    if (auto kind = basic_kind(word)) {
      TypeExpr::Node node;
      node.basic = *kind;
      return make_type(std::move(node), pos);
    }
    if (kReserved.count(word))
      fail(ErrKind::SyntaxError, pos,
           "'" + unicode::encode_utf8(word) + "' is a reserved word; expected a type name");
    return make_type(TypeExpr::Named{unicode::encode_utf8(word)}, pos);
  }

  void parse_operation(Program& prog, Pos pos) {
    Pos namePos;
    std::string name = read_ident("an operation name", &namePos);
    expect(U'(', "before the request type");
    TypePtr request = parse_operation_type();
    expect(U')', "after the request type");
    expect(U'(', "before the response type");
    TypePtr response = parse_operation_type();
    expect(U')', "after the response type");
    for (const auto& op : prog.operations)
      if (op.name == name)
        fail(ErrKind::DuplicateName, namePos, "duplicate operation name `" + name + "`");
    prog.operations.push_back(OpDecl{std::move(name), std::move(request), std::move(response), pos});
  }

  Path parse_path() {
    Path path;
    path.base = read_ident("a variable", &path.pos);
    while (eat(U'.')) {
      Pos fieldPos;
      path.fields.push_back(read_ident("a field name", &fieldPos));
      path.fieldPos.push_back(fieldPos);
    }
    return path;
  }

  Procedure parse_procedure(Pos pos, std::string name) {
    Procedure proc;
    proc.name = std::move(name);
    proc.pos = pos;
    expect(U'(', "before the parameter");
    proc.paramVar = read_ident("a parameter name");
    expect(U')', "after the parameter");
    expect(U'{', "to open the procedure body");
    std::set<std::string> defined{proc.paramVar};
    while (true) {
      skip();
      if (eat(U'}')) break;
      CallStmt call;
      call.operation = read_ident("an operation name", &call.pos);
      if (eat(U'@')) read_ident("a port name");  // ports are accepted and dropped
      expect(U'(', "before the argument");
      call.argument = parse_path();
      expect(U')', "after the argument");
      expect(U'(', "before the output variable");
      call.output = read_ident("an output variable", &call.outputPos);
      expect(U')', "after the output variable");
      eat(U';');
      if (!defined.insert(call.output).second)
        fail(ErrKind::DuplicateName, call.outputPos,
             "output variable `" + call.output + "` shadows an earlier variable");
      proc.body.push_back(std::move(call));
    }
    return proc;
  }

  void parse_main(Program& prog) {
    expect(U'{', "to open the main block");
    while (true) {
      skip();
      if (eat(U'}')) break;
      Pos pos;
      std::string name = read_ident("a procedure name", &pos);
      for (const auto& p : prog.procedures)
        if (p.name == name)
          fail(ErrKind::DuplicateName, pos, "duplicate procedure name `" + name + "`");
      prog.procedures.push_back(parse_procedure(pos, std::move(name)));
    }
  }
};

}  // namespace

TypePtr make_type(std::variant<TypeNode, TypeChoice, TypeNamed> node, Pos pos) {
  auto t = std::make_shared<TypeExpr>();
  t->node = std::move(node);
  t->pos = pos;
  return t;
}

Program parse_program(std::string_view source) { return Parser(source).parse(); }

}  // namespace refcheck::lang
