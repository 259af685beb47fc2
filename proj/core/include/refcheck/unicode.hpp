#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace refcheck::unicode {

/// Decodes UTF-8 into scalar values. Returns std::nullopt on malformed input
/// (overlong forms, surrogates, truncation).
std::optional<std::u32string> decode_utf8(std::string_view text);

std::string encode_utf8(char32_t cp);
std::string encode_utf8(const std::u32string& text);

}  // namespace refcheck::unicode
