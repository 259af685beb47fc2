#include "refcheck/value.hpp"

#include <json.hpp>

#include <cstddef>
#include <limits>
#include <utility>
#include <variant>

namespace refcheck::val {

const ChildEntry* ValueTree::find(std::string_view name) const {
  for (const auto& e : children)
    if (e.name == name) return &e;
  return nullptr;
}

std::string_view kind_name(const ValueTree::Root& r) {
  switch (r.index()) {
    case 0: return "void";
    case 1: return "bool";
    case 2: return "int";
    case 3: return "double";
    default: return "string";
  }
}

namespace {

constexpr std::string_view kRootKey = "$";

/// SAX handler that assembles the tree directly, so repeated keys and key
/// order survive (a DOM round-trip would lose both).
class TreeBuilder : public nlohmann::json_sax<nlohmann::json> {
 public:
  explicit TreeBuilder(int maxDepth) : maxDepth_(maxDepth) {}

  ValueTree take() { return std::move(result_); }

  bool null() override { return scalar(ValueTree::Void{}); }
  bool boolean(bool b) override { return scalar(b); }
  bool number_integer(number_integer_t n) override { return scalar(std::int64_t{n}); }

  bool number_unsigned(number_unsigned_t n) override {
    if (n > static_cast<number_unsigned_t>(std::numeric_limits<std::int64_t>::max()))
      return scalar(static_cast<double>(n));
    return scalar(static_cast<std::int64_t>(n));
  }

  bool number_float(number_float_t n, const string_t&) override { return scalar(double{n}); }
  bool string(string_t& s) override { return scalar(std::move(s)); }

  bool binary(binary_t&) override {
    fail(ErrKind::JsonSyntaxError, {}, "binary values cannot appear in JSON text");
  }

  bool start_object(std::size_t) override {
    reject_nonscalar_root_value("an object");
    enter();
    stack_.emplace_back(ObjectFrame{});
    return true;
  }

  bool key(string_t& k) override {
    auto& top = std::get<ObjectFrame>(stack_.back());
    top.key = std::move(k);
    top.keyPending = true;
    return true;
  }

  bool end_object() override {
    ObjectFrame done = std::move(std::get<ObjectFrame>(stack_.back()));
    stack_.pop_back();
    --depth_;
    deliver(std::move(done.node));
    return true;
  }

  bool start_array(std::size_t) override {
    reject_nonscalar_root_value("an array");
    if (stack_.empty() || !std::holds_alternative<ObjectFrame>(stack_.back()))
      fail(ErrKind::JsonSyntaxError, {}, "arrays may only appear directly under an object key");
    enter();
    auto& owner = std::get<ObjectFrame>(stack_.back());
    std::size_t entry = entry_index(owner.node, owner.key);
    owner.keyPending = false;
    stack_.emplace_back(ArrayFrame{stack_.size() - 1, entry});
    return true;
  }

  bool end_array() override {
    ArrayFrame done = std::get<ArrayFrame>(stack_.back());
    stack_.pop_back();
    --depth_;
    auto& owner = std::get<ObjectFrame>(stack_[done.owner]).node;
    if (owner.children[done.entry].values.empty())
      owner.children.erase(owner.children.begin() + static_cast<std::ptrdiff_t>(done.entry));
    return true;
  }

  bool parse_error(std::size_t, const std::string&,
                   const nlohmann::detail::exception& ex) override {
    std::string msg = ex.what();
    // strip the "[json.exception...]" tag, keeping the human part
    if (auto close = msg.find("] "); msg.rfind('[', 0) == 0 && close != std::string::npos)
      msg.erase(0, close + 2);
    fail(ErrKind::JsonSyntaxError, {}, std::move(msg));
  }

 private:
  struct ObjectFrame {
    ValueTree node;
    std::string key;
    bool keyPending = false;
  };
  struct ArrayFrame {
    std::size_t owner;  // index into stack_, always an ObjectFrame
    std::size_t entry;  // index into that node's children
  };

  void enter() {
    if (++depth_ > maxDepth_)
      fail(ErrKind::NestingTooDeep, {},
           "value nests deeper than " + std::to_string(maxDepth_) + " levels");
  }

  void reject_nonscalar_root_value(const char* what) {
    if (stack_.empty() || !std::holds_alternative<ObjectFrame>(stack_.back())) return;
    const auto& top = std::get<ObjectFrame>(stack_.back());
    if (top.keyPending && top.key == kRootKey)
      fail(ErrKind::JsonSyntaxError, {},
           std::string("the reserved key \"$\" must hold a scalar, not ") + what);
  }

  static std::size_t entry_index(ValueTree& node, const std::string& name) {
    for (std::size_t i = 0; i < node.children.size(); ++i)
      if (node.children[i].name == name) return i;
    node.children.push_back(ChildEntry{name, {}});
    return node.children.size() - 1;
  }

  template <class T>
  bool scalar(T&& v) {
    ValueTree leaf;
    leaf.root = ValueTree::Root{std::forward<T>(v)};
    deliver(std::move(leaf));
    return true;
  }

  void deliver(ValueTree v) {
    if (stack_.empty()) {
      result_ = std::move(v);
      return;
    }
    if (auto* arr = std::get_if<ArrayFrame>(&stack_.back())) {
      auto& owner = std::get<ObjectFrame>(stack_[arr->owner]).node;
      owner.children[arr->entry].values.push_back(std::move(v));
      return;
    }
    auto& top = std::get<ObjectFrame>(stack_.back());
    top.keyPending = false;
    if (top.key == kRootKey) {
      // container values were rejected up front, so v is a childless scalar
      top.node.root = std::move(v.root);
      return;
    }
    std::size_t entry = entry_index(top.node, top.key);
    top.node.children[entry].values.push_back(std::move(v));
  }

  int maxDepth_;
  int depth_ = 0;
  std::vector<std::variant<ObjectFrame, ArrayFrame>> stack_;
  ValueTree result_;
};

}  // namespace

ValueTree parse_json_value(std::string_view text, int maxDepth) {
  TreeBuilder builder(maxDepth);
  nlohmann::json::sax_parse(text, &builder);
  return builder.take();
}

}  // namespace refcheck::val
