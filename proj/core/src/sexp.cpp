#include "refcheck/sexp.hpp"

#include <sstream>
#include <utility>

namespace refcheck::smt {

Sexp Sexp::atom(std::string text) {
  Sexp s;
  s.atom_ = true;
  s.text_ = std::move(text);
  return s;
}

Sexp Sexp::list(std::vector<Sexp> items) {
  Sexp s;
  s.items_ = std::move(items);
  return s;
}

Sexp Sexp::app(std::string head, std::vector<Sexp> args) {
  std::vector<Sexp> items;
  items.reserve(args.size() + 1);
  items.push_back(atom(std::move(head)));
  for (auto& a : args) items.push_back(std::move(a));
  return list(std::move(items));
}

std::string Sexp::flat() const {
  if (atom_) return text_;
  std::string out = "(";
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (i) out += ' ';
    out += items_[i].flat();
  }
  out += ')';
  return out;
}

static void pretty_rec(const Sexp& s, int indent, int width, std::string& out) {
  std::string flat = s.flat();
  if (s.is_atom() || indent + static_cast<int>(flat.size()) <= width) {
    out += flat;
    return;
  }
  const auto& items = s.items();
  out += '(';
  if (items.empty()) {
    out += ')';
    return;
  }
  // head, plus the first argument when it is short enough to read as part
  // of the operator line (e.g. a forall binder list)
  std::string head = items[0].flat();
  out += head;
  std::size_t next = 1;
  if (items.size() > 1) {
    std::string first = items[1].flat();
    if (indent + static_cast<int>(head.size() + first.size()) + 2 <= width) {
      out += ' ';
      out += first;
      next = 2;
    }
  }
  for (std::size_t i = next; i < items.size(); ++i) {
    out += '\n';
    out.append(static_cast<std::size_t>(indent) + 2, ' ');
    pretty_rec(items[i], indent + 2, width, out);
  }
  out += ')';
}

std::string Sexp::pretty(int indent, int width) const {
  std::string out;
  pretty_rec(*this, indent, width, out);
  return out;
}

std::string smt_string_literal(const std::u32string& text) {
  std::string out = "\"";
  for (char32_t cp : text) {
    if (cp == U'"') {
      out += "\"\"";
    } else if (cp >= 0x20 && cp <= 0x7E && cp != U'\\') {
      out += static_cast<char>(cp);
    } else {
      std::ostringstream esc;
      esc << "\\u{" << std::hex << static_cast<std::uint32_t>(cp) << "}";
      out += esc.str();
    }
  }
  out += '"';
  return out;
}

std::string smt_string_literal(char32_t cp) {
  return smt_string_literal(std::u32string(1, cp));
}

std::string smt_int_literal(std::int64_t value) {
  if (value >= 0) return std::to_string(value);
  std::uint64_t magnitude = static_cast<std::uint64_t>(-(value + 1)) + 1;
  return "(- " + std::to_string(magnitude) + ")";
}

std::string smt_decimal_literal(std::int64_t value) {
  if (value >= 0) return std::to_string(value) + ".0";
  std::uint64_t magnitude = static_cast<std::uint64_t>(-(value + 1)) + 1;
  return "(- " + std::to_string(magnitude) + ".0)";
}

}  // namespace refcheck::smt
