#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "refcheck/diagnostics.hpp"

namespace refcheck::val {

struct ValueTree;

/// One named child slot: the field name plus its occurrence list, in
/// arrival order. Absent fields have no entry; lists are never empty.
struct ChildEntry {
  std::string name;
  std::vector<ValueTree> values;
};

/// Tree-structured runtime value: a scalar root plus named, repeatable
/// children. This is the message shape services exchange.
struct ValueTree {
  struct Void {};
  using Root = std::variant<Void, bool, std::int64_t, double, std::string>;

  Root root;
  std::vector<ChildEntry> children;  // names unique

  const ChildEntry* find(std::string_view name) const;
};

/// Root kind as a lowercase name: void, bool, int, double or string.
std::string_view kind_name(const ValueTree::Root& r);

/// Decodes one JSON document into a value tree:
///   - an object's keys become children, in order of first appearance;
///   - a scalar becomes a childless tree holding that root;
///   - the reserved key "$" sets the enclosing node's own root scalar;
///   - an array under a key repeats that field, one child per element
///     (an empty array is the same as omitting the field);
///   - a repeated key extends the field's occurrence list;
///   - null maps to a void root; numbers written with a fraction or
///     exponent, and integers outside 64-bit signed range, map to double.
/// Raises JsonSyntaxError for malformed documents, for arrays not
/// directly under an object key, and for non-scalar "$" values;
/// NestingTooDeep when containers nest past maxDepth.
ValueTree parse_json_value(std::string_view text, int maxDepth = 64);

}  // namespace refcheck::val
